//! Unscrambled Sobol' sequence in base 2 with 32-bit direction numbers.
//!
//! Points are produced in Gray-code order, the order of the Joe-Kuo
//! reference generator, starting with the all-zeros point at index 0.

use super::sobol_table::{DIRECTION_NUMBERS, MAX_DIM};
use crate::error::{Error, Result};

const BITS: usize = 32;

pub struct SobolSequence {
    dim: usize,
    /// `directions[j * BITS + k]` is direction number `k` of dimension `j`.
    directions: Vec<u32>,
}

impl SobolSequence {
    pub const MAX_DIM: usize = MAX_DIM;

    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "Sobol' dimension {dim} outside the direction-number table (1..={MAX_DIM})"
            )));
        }
        let mut directions = vec![0u32; dim * BITS];
        for (j, &(poly, m)) in DIRECTION_NUMBERS.iter().take(dim).enumerate() {
            let v = &mut directions[j * BITS..(j + 1) * BITS];
            if j == 0 {
                for (k, vk) in v.iter_mut().enumerate() {
                    *vk = 1 << (31 - k);
                }
                continue;
            }
            let s = (32 - poly.leading_zeros() - 1) as usize;
            let a = (poly >> 1) & ((1u32 << (s - 1)) - 1);
            for k in 0..s.min(BITS) {
                v[k] = m[k] << (31 - k);
            }
            for k in s..BITS {
                let mut x = v[k - s] ^ (v[k - s] >> s);
                for i in 1..s {
                    if (a >> (s - 1 - i)) & 1 == 1 {
                        x ^= v[k - i];
                    }
                }
                v[k] = x;
            }
        }
        Ok(Self { dim, directions })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Integer coordinates (scaled by 2^32) of point `index`.
    pub fn point_bits(&self, index: u32) -> Vec<u32> {
        let gray = index ^ (index >> 1);
        (0..self.dim)
            .map(|j| {
                let v = &self.directions[j * BITS..(j + 1) * BITS];
                let mut x = 0u32;
                let mut g = gray;
                let mut k = 0;
                while g != 0 {
                    if g & 1 == 1 {
                        x ^= v[k];
                    }
                    g >>= 1;
                    k += 1;
                }
                x
            })
            .collect()
    }

    /// Point `index` in `[0, 1)^dim`.
    pub fn point(&self, index: u32) -> Vec<f64> {
        self.point_bits(index)
            .into_iter()
            .map(|x| x as f64 / 4_294_967_296.0)
            .collect()
    }

    /// The first `n` points, row-major.
    pub fn first(&self, n: usize) -> Result<Vec<f64>> {
        if n as u64 > u32::MAX as u64 {
            return Err(Error::Unsupported("more than 2^32 - 1 Sobol' points".into()));
        }
        let mut out = Vec::with_capacity(n * self.dim);
        // Gray-code recursion: consecutive points differ by one direction.
        let mut cur = vec![0u32; self.dim];
        for i in 0..n {
            if i > 0 {
                let c = (i - 1).trailing_ones() as usize;
                for (j, x) in cur.iter_mut().enumerate() {
                    *x ^= self.directions[j * BITS + c];
                }
            }
            out.extend(cur.iter().map(|&x| x as f64 / 4_294_967_296.0));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_points() {
        let s = SobolSequence::new(4).unwrap();
        assert_eq!(s.point(0), vec![0.0; 4]);
        assert_eq!(s.point(1), vec![0.5; 4]);
        assert_eq!(s.point(2), vec![0.75, 0.25, 0.25, 0.25]);
        assert_eq!(s.point(3), vec![0.25, 0.75, 0.75, 0.75]);
    }

    #[test]
    fn matches_reference_values() {
        // Reference coordinates (times 1024) from an independent
        // implementation of the same direction numbers.
        let s = SobolSequence::new(50).unwrap();
        let to_k = |v: f64| (v * 1024.0) as u32;
        let p = s.point(1023);
        let got: Vec<u32> = p[40..50].iter().map(|&v| to_k(v)).collect();
        assert_eq!(got, vec![647, 997, 951, 111, 509, 319, 989, 781, 863, 843]);
        assert_eq!(to_k(s.point(777)[13]), 485);
        assert_eq!(to_k(s.point(100)[49]), 680);
        let got: Vec<u32> = s.point(5)[..10].iter().map(|&v| to_k(v)).collect();
        assert_eq!(got, vec![896, 896, 128, 384, 896, 640, 896, 384, 384, 128]);
    }

    #[test]
    fn recursion_matches_direct() {
        let s = SobolSequence::new(13).unwrap();
        let all = s.first(300).unwrap();
        for i in [0usize, 1, 2, 77, 255, 256, 299] {
            assert_eq!(&all[i * 13..(i + 1) * 13], s.point(i as u32).as_slice());
        }
    }

    #[test]
    fn dyadic_balance() {
        let d = 20;
        let s = SobolSequence::new(d).unwrap();
        let pts = s.first(256).unwrap();
        for j in 0..d {
            for bins in [2usize, 4, 16] {
                let mut counts = vec![0; bins];
                for i in 0..256 {
                    counts[(pts[i * d + j] * bins as f64) as usize] += 1;
                }
                assert!(counts.iter().all(|&c| c == 256 / bins), "dim {j} bins {bins}");
            }
        }
    }

    #[test]
    fn dimension_guard() {
        assert!(SobolSequence::new(0).is_err());
        assert!(SobolSequence::new(MAX_DIM + 1).is_err());
        assert!(SobolSequence::new(MAX_DIM).is_ok());
    }
}
