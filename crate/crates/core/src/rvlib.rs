//! One-dimensional building blocks: the law of `(xi - x)^2` for `xi`
//! uniform on `[-delta, delta]`, its square-root counterpart, and the
//! symmetric Beta law on `[-delta, delta]` with the norm/distance moments
//! it induces in `d` dimensions.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{invalid, Error, Result};
use crate::special::ln_gamma;

/// `eta = (xi - x)^2` with `xi ~ U[-delta, delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedSquareDist {
    pub x: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    pub mean: f64,
    pub variance: f64,
    pub mu3: f64,
    pub mu4: f64,
}

impl ShiftedSquareDist {
    pub fn new(x: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be positive, got {delta}")));
        }
        if !x.is_finite() {
            return Err(invalid("shift must be finite"));
        }
        Ok(Self { x, delta })
    }

    /// Lower edge of the `1/(4 delta sqrt t)` branch, `(delta - |x|)^2`.
    pub fn inner_edge(&self) -> f64 {
        (self.delta - self.x.abs()).powi(2)
    }

    /// Upper end of the support, `(delta + |x|)^2`.
    pub fn outer_edge(&self) -> f64 {
        (self.delta + self.x.abs()).powi(2)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let a = self.x.abs();
        let d = self.delta;
        if t <= 0.0 {
            0.0
        } else if t < self.inner_edge() {
            if a <= d {
                (t.sqrt() / d).min(1.0)
            } else {
                0.0
            }
        } else if t <= self.outer_edge() {
            ((d - a + t.sqrt()) / (2.0 * d)).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }

    /// Density at `t`. The density is unbounded at `t = 0` when
    /// `|x| <= delta`, so a point query there is rejected.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::Domain("density is not defined at t = 0".into()));
        }
        let a = self.x.abs();
        let d = self.delta;
        Ok(if t < 0.0 {
            0.0
        } else if t < self.inner_edge() {
            if a <= d {
                1.0 / (2.0 * d * t.sqrt())
            } else {
                0.0
            }
        } else if t <= self.outer_edge() {
            1.0 / (4.0 * d * t.sqrt())
        } else {
            0.0
        })
    }

    pub fn central_moments(&self) -> CentralMoments {
        let x2 = self.x * self.x;
        let d2 = self.delta * self.delta;
        let mean = x2 + d2 / 3.0;
        let variance = 4.0 * d2 / 3.0 * (x2 + d2 / 15.0);
        let mu3 = 16.0 * d2 * d2 / 15.0 * (x2 + d2 / 63.0);
        CentralMoments { mean, variance, mu3, mu4: 3.0 * mean * mu3 }
    }
}

pub fn lemma1_cdf(dist: &ShiftedSquareDist, t: f64) -> f64 {
    dist.cdf(t)
}

pub fn lemma1_pdf(dist: &ShiftedSquareDist, t: f64) -> Result<f64> {
    dist.pdf(t)
}

pub fn lemma1_central_moments(dist: &ShiftedSquareDist) -> CentralMoments {
    dist.central_moments()
}

/// C.d.f. of `|xi - x|`, `xi ~ U[-delta, delta]`.
pub fn lemma2_cdf(x: f64, delta: f64, t: f64) -> Result<f64> {
    let dist = ShiftedSquareDist::new(x, delta)?;
    Ok(if t <= 0.0 { 0.0 } else { dist.cdf(t * t) })
}

/// `Beta(alpha, alpha)` mapped affinely onto `[-delta, delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSymmetric {
    pub alpha: f64,
    pub delta: f64,
}

impl BetaSymmetric {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { alpha, delta })
    }

    pub fn uniform(delta: f64) -> Result<Self> {
        Self::new(1.0, delta)
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let (a, d) = (self.alpha, self.delta);
        if t <= -d || t >= d {
            return 0.0;
        }
        let ln_beta = 2.0 * ln_gamma(a) - ln_gamma(2.0 * a);
        ((1.0 - 2.0 * a) * (2.0 * d).ln() - ln_beta + (a - 1.0) * (d * d - t * t).ln()).exp()
    }

    /// `(mu2, mu4)`.
    pub fn moments(&self) -> (f64, f64) {
        let (a, d2) = (self.alpha, self.delta * self.delta);
        (d2 / (2.0 * a + 1.0), 3.0 * d2 * d2 / ((2.0 * a + 1.0) * (2.0 * a + 3.0)))
    }

    pub fn sampler(&self) -> BetaSymmetricSampler {
        BetaSymmetricSampler {
            beta: Beta::new(self.alpha, self.alpha).expect("alpha validated positive"),
            delta: self.delta,
        }
    }
}

pub struct BetaSymmetricSampler {
    beta: Beta<f64>,
    delta: f64,
}

impl BetaSymmetricSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.delta * (2.0 * self.beta.sample(rng) - 1.0)
    }
}

pub fn beta_symmetric_moments(dist: &BetaSymmetric) -> (f64, f64) {
    dist.moments()
}

/// Mean and variance of `||Z||^2` for `Z` with iid `dist` coordinates.
pub fn squared_norm_moments(d: u32, dist: &BetaSymmetric) -> (f64, f64) {
    let (a, d2) = (dist.alpha, dist.delta * dist.delta);
    let df = d as f64;
    let s = 2.0 * a + 1.0;
    (df * d2 / s, 4.0 * df * d2 * d2 * a / (s * s * (2.0 * a + 3.0)))
}

/// Mean and variance of `||Z - Z'||^2` for independent `Z, Z'`.
pub fn pair_distance_moments(d: u32, dist: &BetaSymmetric) -> (f64, f64) {
    let (a, d2) = (dist.alpha, dist.delta * dist.delta);
    let df = d as f64;
    let s = 2.0 * a + 1.0;
    (2.0 * df * d2 / s, 4.0 * df * d2 * d2 * (4.0 * a + 3.0) / (s * s * (2.0 * a + 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{domain, stream_rng};
    use crate::special::integrate_piecewise;

    fn grid() -> Vec<ShiftedSquareDist> {
        let mut v = Vec::new();
        for &delta in &[0.4, 1.0] {
            for &f in &[0.0, 0.3, 1.0, 1.7] {
                v.push(ShiftedSquareDist::new(f * delta, delta).unwrap());
            }
        }
        v
    }

    /// E[g(eta)] by quadrature of the density, substituting t = v^2 to
    /// remove the 1/sqrt(t) singularity.
    fn expect<G: Fn(f64) -> f64>(dist: &ShiftedSquareDist, g: G) -> f64 {
        let breaks = [0.0, dist.inner_edge().sqrt(), dist.outer_edge().sqrt()];
        let mut b = breaks.to_vec();
        b.sort_by(f64::total_cmp);
        integrate_piecewise(
            |v| if v == 0.0 { 0.0 } else { g(v * v) * dist.pdf(v * v).unwrap() * 2.0 * v },
            &b,
            1e-13,
        )
    }

    #[test]
    fn lemma1_cdf_examples() {
        let d = ShiftedSquareDist::new(0.0, 1.0).unwrap();
        assert_eq!(d.cdf(0.25), 0.5);
        let d = ShiftedSquareDist::new(2.0, 1.0).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(9.5), 1.0);
        let d = ShiftedSquareDist::new(0.5, 1.0).unwrap();
        assert_eq!(d.cdf(1.0), 0.75);
        assert_eq!(d.cdf(-1.0), 0.0);
    }

    #[test]
    fn lemma1_cdf_against_monte_carlo() {
        let dist = ShiftedSquareDist::new(0.5, 1.0).unwrap();
        let n = 1_000_000u64;
        let mut rng = stream_rng(5, domain::AUX, 0);
        let hits = (0..n).filter(|_| (2.0 * rng.random::<f64>() - 1.0 - 0.5f64).powi(2) <= 1.0).count();
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - dist.cdf(1.0)).abs() <= 4.0 * se);
    }

    #[test]
    fn lemma1_pdf_examples() {
        let d = ShiftedSquareDist::new(0.0, 1.0).unwrap();
        assert_eq!(d.pdf(0.25).unwrap(), 1.0);
        assert_eq!(d.pdf(1.5).unwrap(), 0.0);
        assert!(matches!(d.pdf(0.0), Err(Error::Domain(_))));
        let d = ShiftedSquareDist::new(0.7, 0.9).unwrap();
        assert!((expect(&d, |_| 1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn moments_against_quadrature_on_grid() {
        for dist in grid() {
            assert!((expect(&dist, |_| 1.0) - 1.0).abs() < 1e-8, "{dist:?}");
            let m = dist.central_moments();
            let mean = expect(&dist, |t| t);
            assert!((mean - m.mean).abs() < 1e-8, "{dist:?}");
            for (k, want) in [(2, m.variance), (3, m.mu3), (4, m.mu4)] {
                let got = expect(&dist, |t| (t - mean).powi(k));
                assert!((got - want).abs() < 1e-8, "{dist:?} k={k}: {got} vs {want}");
            }
            // nondecreasing c.d.f.
            let top = dist.outer_edge() * 1.1;
            let mut prev = 0.0;
            for i in 0..=400 {
                let v = dist.cdf(top * i as f64 / 400.0);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn branch_continuity_at_boundary() {
        for dist in grid() {
            let e = dist.inner_edge();
            if e > 0.0 {
                let below = dist.cdf(e * (1.0 - 1e-12));
                assert!((below - dist.cdf(e)).abs() < 1e-9, "{dist:?}");
            }
        }
    }

    #[test]
    fn central_moment_examples() {
        let m = ShiftedSquareDist::new(0.0, 1.0).unwrap().central_moments();
        assert!((m.mean - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.variance - 4.0 / 45.0).abs() < 1e-15);
        let m = ShiftedSquareDist::new(1.0, 1.0).unwrap().central_moments();
        assert!((m.mu3 - 16.0 / 15.0 * (1.0 + 1.0 / 63.0)).abs() < 1e-14);
        assert!((m.mu3 - 1.0836).abs() < 1e-4);
        let m = ShiftedSquareDist::new(0.8, 1e-6).unwrap().central_moments();
        assert!(m.variance < 1e-11);
    }

    #[test]
    fn lemma2_examples() {
        assert!((lemma2_cdf(0.0, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(lemma2_cdf(-0.4, 1.0, 1.5).unwrap(), 1.0);
        assert_eq!(lemma2_cdf(3.0, 1.0, 4.5).unwrap(), 1.0);
        assert!((lemma2_cdf(0.5, 1.0, 0.8).unwrap() - 0.65).abs() < 1e-15);
        for dist in grid() {
            for i in 0..50 {
                let t = i as f64 * 0.05;
                assert_eq!(lemma2_cdf(dist.x, dist.delta, t).unwrap(), dist.cdf(t * t));
            }
        }
    }

    #[test]
    fn lemma2_against_monte_carlo() {
        let n = 1_000_000u64;
        let mut rng = stream_rng(6, domain::AUX, 0);
        let hits = (0..n).filter(|_| (2.0 * rng.random::<f64>() - 1.0 - 0.5f64).abs() <= 0.8).count();
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - lemma2_cdf(0.5, 1.0, 0.8).unwrap()).abs() <= 4.0 * se);
    }

    #[test]
    fn beta_moments() {
        let (mu2, _) = BetaSymmetric::new(1.0, 1.0).unwrap().moments();
        assert!((mu2 - 1.0 / 3.0).abs() < 1e-15);
        let b = BetaSymmetric::new(0.5, 1.0).unwrap();
        let q = integrate_piecewise(|u| {
            // t = sin(u) removes the arcsine singularities at +-1
            let t = u.sin();
            t * t * b.pdf(t) * u.cos()
        }, &[-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2], 1e-13);
        assert!((q - 0.5).abs() < 1e-10);
        assert!((b.moments().0 - 0.5).abs() < 1e-15);
        let m1 = BetaSymmetric::new(2.3, 1.0).unwrap().moments();
        let m2 = BetaSymmetric::new(2.3, 2.0).unwrap().moments();
        assert!((m2.0 - 4.0 * m1.0).abs() < 1e-14);
        assert!((m2.1 - 16.0 * m1.1).abs() < 1e-13);
        assert!(BetaSymmetric::new(0.0, 1.0).is_err());
    }

    #[test]
    fn norm_and_distance_moments() {
        let u = BetaSymmetric::uniform(1.0).unwrap();
        let (m, v) = squared_norm_moments(10, &u);
        assert!((m - 10.0 / 3.0).abs() < 1e-14 && (v - 8.0 / 9.0).abs() < 1e-14);
        let b = BetaSymmetric::new(1.7, 0.6).unwrap();
        let (mu2, mu4) = b.moments();
        let (m1, v1) = squared_norm_moments(1, &b);
        assert!((m1 - mu2).abs() < 1e-15 && (v1 - (mu4 - mu2 * mu2)).abs() < 1e-15);
        let (pm, pv) = pair_distance_moments(10, &u);
        assert!((pm - 20.0 / 3.0).abs() < 1e-14 && (pv - 28.0 / 45.0 * 10.0).abs() < 1e-13);
        let (pm2, pv2) = pair_distance_moments(1, &b);
        assert!((pm2 - 2.0 * mu2).abs() < 1e-15 && (pv2 - 2.0 * (mu4 + mu2 * mu2)).abs() < 1e-15);
        for alpha in [0.3, 1.0, 2.0] {
            let b = BetaSymmetric::new(alpha, 0.8).unwrap();
            assert!((pair_distance_moments(7, &b).0 - 2.0 * squared_norm_moments(7, &b).0).abs() < 1e-14);
        }
    }

    fn mc_check(d: u32, b: BetaSymmetric, pairs: bool, seed: u64) {
        let n = 1_000_000usize;
        let s = b.sampler();
        let mut rng = stream_rng(seed, domain::AUX, d as u64);
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let v: f64 = (0..d)
                .map(|_| {
                    let z = s.sample(&mut rng);
                    let w = if pairs { s.sample(&mut rng) } else { 0.0 };
                    (z - w).powi(2)
                })
                .sum();
            vals.push(v);
        }
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let (m, v) = if pairs { pair_distance_moments(d, &b) } else { squared_norm_moments(d, &b) };
        assert!((mean - m).abs() <= 4.0 * (v / n as f64).sqrt(), "mean {mean} vs {m}");
        // variance of the sample variance ~ (mu4 - sigma^4)/n; use a generous 4se bound
        let m4 = vals.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
        let se_var = ((m4 - var * var) / n as f64).sqrt();
        assert!((var - v).abs() <= 4.0 * se_var, "var {var} vs {v}");
    }

    #[test]
    fn moments_against_monte_carlo() {
        let b = BetaSymmetric::new(0.5, 0.6).unwrap();
        assert!((squared_norm_moments(20, &b).0 - 3.6).abs() < 1e-14);
        mc_check(20, b, false, 1);
        let b2 = BetaSymmetric::new(2.0, 1.0).unwrap();
        assert!((pair_distance_moments(5, &b2).0 - 2.0).abs() < 1e-14);
        mc_check(5, b2, true, 2);
        mc_check(10, BetaSymmetric::uniform(0.4).unwrap(), true, 3);
    }
}
