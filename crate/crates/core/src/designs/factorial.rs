//! Regular two-level fractional factorial designs.
//!
//! A design with `n = 2^k` runs and `d` factors is described by `d` distinct
//! nonzero columns in `GF(2)^k`; the first `k` are the base factors (unit
//! vectors) and every other column is the product of the base factors in
//! its bit mask. A defining word is a set of columns whose masks XOR to
//! zero, and the word-length pattern `(A_3, A_4, ...)` counts them by size.
//!
//! Generators are chosen by search:
//!
//! * when the number of candidate generator sets is small, every set is
//!   scored and the minimum-aberration one (lexicographically smallest
//!   full word-length pattern) is kept;
//! * otherwise columns are added greedily, each time picking the column
//!   that creates the fewest new words of length 3, then 4, 5 and 6,
//!   restricted to odd-weight columns whenever enough of them exist.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `C(candidates, p) * 2^p` for the exhaustive search.
const EXHAUSTIVE_BUDGET: f64 = 2.5e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorialMethod {
    FullFactorial,
    MinimumAberration,
    /// Greedy resolution-maximizing search; aberration is not guaranteed
    /// minimal.
    MaxResolutionGreedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorialDesign {
    pub k: u32,
    pub columns: Vec<u32>,
    /// `wlp[i]` is the number of defining words of length `i + 3`. Complete
    /// for the exhaustive search, lengths 3..=6 for the greedy search.
    pub wlp: Vec<u64>,
    pub method: FactorialMethod,
}

impl FactorialDesign {
    pub fn runs(&self) -> usize {
        1usize << self.k
    }

    pub fn factors(&self) -> usize {
        self.columns.len()
    }

    /// Smallest word length in the tracked part of the word-length pattern.
    /// `None` means no word of a tracked length exists.
    pub fn resolution(&self) -> Option<u32> {
        self.wlp.iter().position(|&a| a > 0).map(|i| i as u32 + 3)
    }

    /// Level (`-1` or `+1`) of factor `j` in run `run`.
    pub fn level(&self, run: u32, j: usize) -> f64 {
        let c = self.columns[j];
        if (c.count_ones() - (run & c).count_ones()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Generator words as factor labels, e.g. `"K=ABCDEF"` (labels past
    /// `Z` continue as `F27`, `F28`, ...).
    pub fn generators(&self) -> Vec<String> {
        let label = |j: usize| {
            if j < 26 {
                ((b'A' + j as u8) as char).to_string()
            } else {
                format!("F{}", j + 1)
            }
        };
        self.columns
            .iter()
            .enumerate()
            .skip(self.k as usize)
            .map(|(j, &c)| {
                let rhs: String = (0..self.k as usize).filter(|b| c >> b & 1 == 1).map(label).collect();
                format!("{}={}", label(j), rhs)
            })
            .collect()
    }
}

/// Builds a two-level design with `n` runs and `d` factors.
pub fn two_level_design(d: usize, n: usize) -> Result<FactorialDesign> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Unsupported(format!(
            "two-level fractional factorial needs n = 2^k runs, got n = {n}"
        )));
    }
    let k = n.trailing_zeros();
    if k == 0 || k > 16 {
        return Err(Error::Unsupported(format!("run size 2^{k} outside supported range 2^1..=2^16")));
    }
    if (k as usize) > d {
        return Err(Error::Unsupported(format!(
            "n = 2^{k} exceeds the 2^{d} vertices of a {d}-dimensional cube"
        )));
    }
    if d > n - 1 {
        return Err(Error::Unsupported(format!(
            "a regular design with {n} runs has at most {} factors, got d = {d}",
            n - 1
        )));
    }
    let base: Vec<u32> = (0..k).map(|b| 1u32 << b).collect();
    let p = d - k as usize;
    if p == 0 {
        return Ok(FactorialDesign { k, columns: base, wlp: Vec::new(), method: FactorialMethod::FullFactorial });
    }
    let candidates: Vec<u32> = (1u32..(1 << k)).filter(|c| c.count_ones() >= 2).collect();
    let combos = ln_binomial(candidates.len(), p).exp() * 2f64.powi(p as i32);
    if combos <= EXHAUSTIVE_BUDGET {
        Ok(exhaustive(k, d, &base, &candidates, p))
    } else {
        // Odd-weight columns never form words of odd length, so when there
        // are enough of them the result has resolution at least IV.
        let odd: Vec<u32> = candidates.iter().copied().filter(|c| c.count_ones() % 2 == 1).collect();
        let pool = if odd.len() >= p { odd } else { candidates };
        Ok(greedy(k, d, &base, &pool))
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Full word-length pattern from the generator columns.
fn full_wlp(k: u32, d: usize, gens: &[u32]) -> Vec<u64> {
    let _ = k;
    let mut wlp = vec![0u64; d.saturating_sub(2)];
    let p = gens.len();
    for mask in 1u32..(1 << p) {
        let mut x = 0u32;
        for (g, &c) in gens.iter().enumerate() {
            if mask >> g & 1 == 1 {
                x ^= c;
            }
        }
        let len = (mask.count_ones() + x.count_ones()) as usize;
        if len >= 3 {
            wlp[len - 3] += 1;
        }
    }
    wlp
}

fn exhaustive(k: u32, d: usize, base: &[u32], candidates: &[u32], p: usize) -> FactorialDesign {
    let mut idx: Vec<usize> = (0..p).collect();
    let mut best: Option<(Vec<u64>, Vec<u32>)> = None;
    let m = candidates.len();
    loop {
        let gens: Vec<u32> = idx.iter().map(|&i| candidates[i]).collect();
        let wlp = full_wlp(k, d, &gens);
        if best.as_ref().is_none_or(|(b, _)| wlp < *b) {
            best = Some((wlp, gens));
        }
        // next combination in lexicographic order
        let mut i = p;
        loop {
            if i == 0 {
                let (wlp, gens) = best.expect("at least one combination");
                let mut columns = base.to_vec();
                columns.extend(gens);
                return FactorialDesign { k, columns, wlp, method: FactorialMethod::MinimumAberration };
            }
            i -= 1;
            if idx[i] < m - p + i {
                idx[i] += 1;
                for j in i + 1..p {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn greedy(k: u32, d: usize, base: &[u32], candidates: &[u32]) -> FactorialDesign {
    let size = 1usize << k;
    // counts of 1-, 2-, 3-, 4- and 5-subsets of chosen columns by XOR value
    let mut c1 = vec![0u64; size];
    let mut c2 = vec![0u64; size];
    let mut c3 = vec![0u64; size];
    let mut c4 = vec![0u64; size];
    let mut c5 = vec![0u64; size];
    let mut wlp = vec![0u64; 4];
    let mut columns = Vec::with_capacity(d);
    let mut used = vec![false; size];

    let mut add = |x: u32, columns: &mut Vec<u32>, used: &mut Vec<bool>, wlp: &mut Vec<u64>| {
        let x = x as usize;
        wlp[0] += c2[x];
        wlp[1] += c3[x];
        wlp[2] += c4[x];
        wlp[3] += c5[x];
        let (o1, o2, o3, o4) = (c1.clone(), c2.clone(), c3.clone(), c4.clone());
        for v in 0..size {
            let w = v ^ x;
            c5[v] += o4[w];
            c4[v] += o3[w];
            c3[v] += o2[w];
            c2[v] += o1[w];
        }
        c1[x] += 1;
        used[x] = true;
        columns.push(x as u32);
        (c2.clone(), c3.clone(), c4.clone(), c5.clone())
    };

    let mut state = (vec![0u64; size], vec![0u64; size], vec![0u64; size], vec![0u64; size]);
    for &b in base {
        state = add(b, &mut columns, &mut used, &mut wlp);
    }
    while columns.len() < d {
        let (s2, s3, s4, s5) = &state;
        let best = candidates
            .iter()
            .copied()
            .filter(|&c| !used[c as usize])
            .min_by_key(|&c| {
                let c = c as usize;
                (s2[c], s3[c], s4[c], s5[c])
            })
            .expect("d <= n - 1 leaves a free column");
        state = add(best, &mut columns, &mut used, &mut wlp);
    }
    FactorialDesign { k, columns, wlp, method: FactorialMethod::MaxResolutionGreedy }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_wlp(des: &FactorialDesign, max_len: usize) -> Vec<u64> {
        // count XOR-zero subsets of columns by size, up to max_len
        let d = des.columns.len();
        let mut out = vec![0u64; max_len - 2];
        fn rec(cols: &[u32], start: usize, depth: usize, x: u32, max: usize, out: &mut Vec<u64>) {
            if depth >= 3 && x == 0 {
                out[depth - 3] += 1;
            }
            if depth == max {
                return;
            }
            for i in start..cols.len() {
                rec(cols, i + 1, depth + 1, x ^ cols[i], max, out);
            }
        }
        rec(&des.columns, 0, 0, 0, max_len.min(d), &mut out);
        out
    }

    #[test]
    fn full_factorial() {
        let des = two_level_design(5, 32).unwrap();
        assert_eq!(des.method, FactorialMethod::FullFactorial);
        let mut seen = std::collections::HashSet::new();
        for run in 0..32u32 {
            let row: Vec<i8> = (0..5).map(|j| des.level(run, j) as i8).collect();
            assert!(seen.insert(row));
        }
    }

    #[test]
    fn known_minimum_aberration_designs() {
        // 2^(7-3): minimum aberration design has resolution IV with A_4 = 7.
        let des = two_level_design(7, 16).unwrap();
        assert_eq!(des.method, FactorialMethod::MinimumAberration);
        assert_eq!(des.resolution(), Some(4));
        assert_eq!(des.wlp[1], 7);
        // 2^(10-4) minimum aberration: resolution IV, A_4 = 2.
        let des = two_level_design(10, 64).unwrap();
        assert_eq!(des.resolution(), Some(4));
        assert_eq!(des.wlp[1], 2);
        // 2^(10-3): resolution V
        let des = two_level_design(10, 128).unwrap();
        assert_eq!(des.resolution(), Some(5));
        // 2^(10-1): single word of length 10
        let des = two_level_design(10, 512).unwrap();
        assert_eq!(des.resolution(), Some(10));
    }

    #[test]
    fn greedy_designs_have_expected_resolution() {
        // more than 2^(k-1) factors forces resolution III; otherwise IV is attainable
        for &(d, n, res) in &[(50usize, 64usize, 3u32), (20, 64, 4), (50, 128, 4), (20, 128, 4), (50, 1024, 4)] {
            let des = two_level_design(d, n).unwrap();
            assert_eq!(des.method, FactorialMethod::MaxResolutionGreedy, "d={d} n={n}");
            assert_eq!(des.resolution(), Some(res), "d={d} n={n} wlp={:?}", des.wlp);
        }
    }

    #[test]
    fn greedy_word_counts_are_exact() {
        let des = two_level_design(20, 64).unwrap();
        assert_eq!(brute_wlp(&des, 6), des.wlp);
    }

    #[test]
    fn columns_balanced_and_distinct() {
        for &(d, n) in &[(10usize, 64usize), (20, 512), (50, 1024)] {
            let des = two_level_design(d, n).unwrap();
            let mut cols = des.columns.clone();
            cols.sort();
            cols.dedup();
            assert_eq!(cols.len(), d);
            for j in 0..d {
                let plus = (0..n as u32).filter(|&r| des.level(r, j) > 0.0).count();
                assert_eq!(plus, n / 2);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(two_level_design(10, 96), Err(Error::Unsupported(_))));
        assert!(matches!(two_level_design(5, 64), Err(Error::Unsupported(_))));
        assert!(matches!(two_level_design(20, 16), Err(Error::Unsupported(_))));
    }

    #[test]
    fn generator_labels() {
        let des = two_level_design(5, 16).unwrap();
        let g = des.generators();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0], "E=ABCD");
    }
}
