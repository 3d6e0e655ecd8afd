//! Point-placement schemes: random, factorial and low-discrepancy designs
//! in (or around) the cube `[-delta, delta]^d`.
//!
//! | scheme | points |
//! |---|---|
//! | S1 | iid uniform on `[-delta, delta]^d` |
//! | S2 | the origin, then S1 |
//! | S3 | regular two-level fractional factorial on the vertices `{-delta, delta}^d` |
//! | S4 | iid coordinates from `Beta(alpha, alpha)` mapped to `[-delta, delta]` |
//! | S5 | iid uniform in the ball of radius `delta` |
//! | S6 | iid uniform on the sphere of radius `delta` |
//! | S7 | Sobol' points mapped by `x -> delta (2x - 1)` |
//!
//! Random schemes draw every point sequentially from one stream, so the
//! first `m` points of a design with seed `s` are exactly the design of size
//! `m` with seed `s`.

pub mod factorial;
pub mod sobol;
mod sobol_table;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::{domain, stream_rng};
use crate::rvlib::BetaSymmetric;

pub use factorial::{two_level_design, FactorialDesign, FactorialMethod};
pub use sobol::SobolSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] =
        [SchemeId::S1, SchemeId::S2, SchemeId::S3, SchemeId::S4, SchemeId::S5, SchemeId::S6, SchemeId::S7];

    /// Whether designs depend on a seed.
    pub fn is_random(self) -> bool {
        !matches!(self, SchemeId::S3 | SchemeId::S7)
    }

    /// Whether prefixes of a design are designs of the same scheme.
    pub fn is_nested(self) -> bool {
        self != SchemeId::S3
    }

    /// Whether centres are confined to the cube `[-delta, delta]^d`.
    pub fn is_cube_based(self) -> bool {
        !matches!(self, SchemeId::S5 | SchemeId::S6)
    }

    /// Admissible `delta` interval `(0, hi]` in dimension `d`.
    pub fn delta_max(self, d: usize) -> f64 {
        if self.is_cube_based() {
            1.0
        } else {
            (d as f64).sqrt()
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = SchemeId::ALL.iter().position(|s| s == self).unwrap() + 1;
        write!(f, "s{i}")
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("scheme").unwrap_or(&t);
        let t = t.strip_prefix('s').unwrap_or(t);
        match t.parse::<usize>() {
            Ok(i @ 1..=7) => Ok(SchemeId::ALL[i - 1]),
            _ => Err(invalid(format!("unknown scheme '{s}' (expected s1..s7)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub id: SchemeId,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    pub nesting: bool,
}

impl SchemeSpec {
    /// Builds a spec; `alpha` must be given for S4 and only for S4.
    pub fn new(id: SchemeId, delta: f64, alpha: Option<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be positive and finite, got {delta}")));
        }
        match (id, alpha) {
            (SchemeId::S4, None) => return Err(invalid("scheme s4 requires alpha")),
            (SchemeId::S4, Some(a)) if !(a > 0.0 && a.is_finite()) => {
                return Err(invalid(format!("alpha must be positive, got {a}")))
            }
            (SchemeId::S4, Some(_)) => {}
            (_, Some(_)) => return Err(invalid(format!("alpha only applies to scheme s4, not {id}"))),
            (_, None) => {}
        }
        Ok(Self { id, delta, alpha, nesting: id.is_nested() })
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.id, delta, self.alpha)
    }

    /// Checks `delta` against the admissible range in dimension `d`.
    pub fn validate_for(&self, d: usize) -> Result<()> {
        let hi = self.id.delta_max(d);
        if self.delta > hi * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "delta = {} outside (0, {hi}] for scheme {} in dimension {d}",
                self.delta, self.id
            )));
        }
        Ok(())
    }
}

/// An ordered set of `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub d: usize,
    pub n: usize,
    pub scheme: SchemeSpec,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub points: Vec<f64>,
}

impl Design {
    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    /// The first `m` points as a design of size `m`.
    pub fn prefix(&self, m: usize) -> Result<Design> {
        if m == 0 || m > self.n {
            return Err(invalid(format!("prefix size {m} outside 1..={}", self.n)));
        }
        Ok(Design { n: m, points: self.points[..m * self.d].to_vec(), ..self.clone() })
    }

    /// Squared norms `||Z_j||^2`.
    pub fn squared_norms(&self) -> Vec<f64> {
        self.rows().map(|p| p.iter().map(|v| v * v).sum()).collect()
    }

    /// Checks finiteness and the scheme's coordinate or norm constraints.
    pub fn check_invariants(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.points.len() != self.n * self.d {
            return Err(invalid("design shape mismatch"));
        }
        if self.points.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("design has a non-finite coordinate".into()));
        }
        let delta = self.scheme.delta;
        match self.scheme.id {
            SchemeId::S5 => {
                if self.squared_norms().iter().any(|&s| s.sqrt() > delta * (1.0 + 1e-12)) {
                    return Err(Error::Numeric("scheme s5 point outside the ball".into()));
                }
            }
            SchemeId::S6 => {
                if self.squared_norms().iter().any(|&s| (s.sqrt() - delta).abs() > 1e-12) {
                    return Err(Error::Numeric("scheme s6 point off the sphere".into()));
                }
            }
            _ => {
                if self.points.iter().any(|v| v.abs() > delta) {
                    return Err(Error::Numeric("coordinate outside [-delta, delta]".into()));
                }
            }
        }
        Ok(())
    }

    /// CSV with one point per row and columns `x1..xd`; values are printed
    /// in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.d).map(|j| format!("x{j}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numeric(format!("json encoding failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Design> {
        let d: Design = serde_json::from_str(s).map_err(|e| invalid(format!("bad design json: {e}")))?;
        d.check_invariants()?;
        Ok(d)
    }
}

fn check_size(d: usize, n: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("design size must be at least 1"));
    }
    Ok(())
}

fn random_design(
    spec: SchemeSpec,
    d: usize,
    n: usize,
    seed: u64,
    mut draw: impl FnMut(&mut rand_chacha::ChaCha8Rng, &mut [f64]),
) -> Result<Design> {
    check_size(d, n)?;
    spec.validate_for(d)?;
    let mut rng = stream_rng(seed, domain::DESIGN, 0);
    let mut points = vec![0.0; n * d];
    for row in points.chunks_exact_mut(d) {
        draw(&mut rng, row);
    }
    Ok(Design { d, n, scheme: spec, seed: Some(seed), label: None, points })
}

fn uniform_row(rng: &mut rand_chacha::ChaCha8Rng, delta: f64, row: &mut [f64]) {
    for v in row.iter_mut() {
        *v = delta * (2.0 * rng.random::<f64>() - 1.0);
    }
}

fn gaussian_direction(rng: &mut rand_chacha::ChaCha8Rng, row: &mut [f64]) {
    loop {
        for v in row.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

pub fn gen_scheme1(d: usize, n: usize, delta: f64, seed: u64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S1, delta, None)?;
    random_design(spec, d, n, seed, |rng, row| uniform_row(rng, delta, row))
}

pub fn gen_scheme2(d: usize, n: usize, delta: f64, seed: u64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S2, delta, None)?;
    let mut first = true;
    random_design(spec, d, n, seed, |rng, row| {
        if first {
            first = false;
            row.fill(0.0);
        } else {
            uniform_row(rng, delta, row);
        }
    })
}

pub fn gen_scheme3(d: usize, n: usize, delta: f64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S3, delta, None)?;
    check_size(d, n)?;
    spec.validate_for(d)?;
    let fd = two_level_design(d, n)?;
    let mut points = Vec::with_capacity(n * d);
    for run in 0..n as u32 {
        points.extend((0..d).map(|j| delta * fd.level(run, j)));
    }
    let method = match fd.method {
        FactorialMethod::FullFactorial => "full factorial",
        FactorialMethod::MinimumAberration => "minimum aberration",
        FactorialMethod::MaxResolutionGreedy => "max-resolution fallback",
    };
    let res = fd.resolution().map(|r| r.to_string()).unwrap_or_else(|| "full".into());
    let label = format!("{method}; resolution {res}; generators {}", fd.generators().join(" "));
    Ok(Design { d, n, scheme: spec, seed: None, label: Some(label), points })
}

pub fn gen_scheme4(d: usize, n: usize, delta: f64, alpha: f64, seed: u64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S4, delta, Some(alpha))?;
    if alpha == 1.0 {
        return random_design(spec, d, n, seed, |rng, row| uniform_row(rng, delta, row));
    }
    let sampler = BetaSymmetric::new(alpha, delta)?.sampler();
    random_design(spec, d, n, seed, |rng, row| {
        for v in row.iter_mut() {
            *v = sampler.sample(rng).clamp(-delta, delta);
        }
    })
}

pub fn gen_scheme5(d: usize, n: usize, delta: f64, seed: u64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S5, delta, None)?;
    let inv_d = 1.0 / d.max(1) as f64;
    random_design(spec, d, n, seed, |rng, row| {
        gaussian_direction(rng, row);
        let rad = delta * rng.random::<f64>().powf(inv_d);
        row.iter_mut().for_each(|v| *v *= rad);
    })
}

pub fn gen_scheme6(d: usize, n: usize, delta: f64, seed: u64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S6, delta, None)?;
    random_design(spec, d, n, seed, |rng, row| {
        gaussian_direction(rng, row);
        row.iter_mut().for_each(|v| *v *= delta);
    })
}

pub fn gen_scheme7(d: usize, n: usize, delta: f64) -> Result<Design> {
    let spec = SchemeSpec::new(SchemeId::S7, delta, None)?;
    check_size(d, n)?;
    spec.validate_for(d)?;
    let sob = SobolSequence::new(d)?;
    let points = sob.first(n)?.into_iter().map(|x| delta * (2.0 * x - 1.0)).collect();
    Ok(Design { d, n, scheme: spec, seed: None, label: None, points })
}

/// Generates a design for any scheme; `seed` is ignored by deterministic
/// schemes.
pub fn generate(spec: &SchemeSpec, d: usize, n: usize, seed: u64) -> Result<Design> {
    let delta = spec.delta;
    match spec.id {
        SchemeId::S1 => gen_scheme1(d, n, delta, seed),
        SchemeId::S2 => gen_scheme2(d, n, delta, seed),
        SchemeId::S3 => gen_scheme3(d, n, delta),
        SchemeId::S4 => gen_scheme4(d, n, delta, spec.alpha.unwrap_or(1.0), seed),
        SchemeId::S5 => gen_scheme5(d, n, delta, seed),
        SchemeId::S6 => gen_scheme6(d, n, delta, seed),
        SchemeId::S7 => gen_scheme7(d, n, delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Kolmogorov-Smirnov statistic against a continuous cdf.
    fn ks_stat(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// 1% critical value of the one-sample KS statistic.
    fn ks_crit(n: usize) -> f64 {
        1.628 / (n as f64).sqrt()
    }

    #[test]
    fn scheme_ids_roundtrip() {
        for s in SchemeId::ALL {
            assert_eq!(s.to_string().parse::<SchemeId>().unwrap(), s);
        }
        assert_eq!("S3".parse::<SchemeId>().unwrap(), SchemeId::S3);
        assert_eq!("scheme7".parse::<SchemeId>().unwrap(), SchemeId::S7);
        assert!("s8".parse::<SchemeId>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SchemeSpec::new(SchemeId::S4, 0.5, None).is_err());
        assert!(SchemeSpec::new(SchemeId::S1, 0.5, Some(2.0)).is_err());
        assert!(SchemeSpec::new(SchemeId::S1, 0.0, None).is_err());
        assert!(SchemeSpec::new(SchemeId::S4, 0.5, Some(-1.0)).is_err());
        assert!(gen_scheme1(10, 5, 1.2, 0).is_err());
        assert!(gen_scheme5(10, 5, 3.0, 0).is_ok());
        assert!(gen_scheme6(10, 5, 3.2, 0).is_err());
        assert!(gen_scheme1(10, 0, 0.5, 0).is_err());
    }

    #[test]
    fn nesting_and_determinism() {
        let specs = [
            SchemeSpec::new(SchemeId::S1, 0.7, None).unwrap(),
            SchemeSpec::new(SchemeId::S2, 0.7, None).unwrap(),
            SchemeSpec::new(SchemeId::S4, 0.7, Some(0.5)).unwrap(),
            SchemeSpec::new(SchemeId::S5, 1.4, None).unwrap(),
            SchemeSpec::new(SchemeId::S6, 1.4, None).unwrap(),
            SchemeSpec::new(SchemeId::S7, 0.7, None).unwrap(),
        ];
        for spec in specs {
            let big = generate(&spec, 10, 200, 42).unwrap();
            let again = generate(&spec, 10, 200, 42).unwrap();
            assert_eq!(big, again);
            for m in [1usize, 17, 64] {
                let small = generate(&spec, 10, m, 42).unwrap();
                assert_eq!(small.points, big.prefix(m).unwrap().points, "{}", spec.id);
            }
            if spec.id.is_random() {
                let other = generate(&spec, 10, 200, 43).unwrap();
                assert_ne!(other.points, big.points);
            }
        }
    }

    #[test]
    fn scheme1_and_scheme2() {
        let d1 = gen_scheme1(10, 1000, 0.6, 7).unwrap();
        let d2 = gen_scheme2(10, 1001, 0.6, 7).unwrap();
        assert!(d2.point(0).iter().all(|&v| v == 0.0));
        assert_eq!(&d2.points[10..], d1.points.as_slice());
        assert_eq!(gen_scheme2(4, 1, 0.5, 1).unwrap().points, vec![0.0; 4]);
        let tiny = gen_scheme1(5, 10, 1e-12, 3).unwrap();
        assert!(tiny.points.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn scheme1_uniform_and_moments() {
        let (d, n, delta) = (10usize, 10_000usize, 0.8);
        let des = gen_scheme1(d, n, delta, 99).unwrap();
        let xs: Vec<f64> = des.rows().map(|r| r[3]).collect();
        let ks = ks_stat(xs, |x| (x + delta) / (2.0 * delta));
        assert!(ks < ks_crit(n), "ks = {ks}");
        let s = des.squared_norms();
        let (mean, se) = crate::mc::mean_and_se(&s);
        let exact = d as f64 * delta * delta / 3.0;
        assert!((mean - exact).abs() < 4.0 * se);
    }

    #[test]
    fn scheme2_tail_matches_uniform() {
        let delta = 0.5;
        let des = gen_scheme2(3, 5001, delta, 5).unwrap();
        let xs: Vec<f64> = des.rows().skip(1).map(|r| r[1]).collect();
        assert!(ks_stat(xs, |x| (x + delta) / (2.0 * delta)) < ks_crit(5000));
    }

    #[test]
    fn scheme4_beta() {
        let a = gen_scheme4(8, 300, 0.9, 1.0, 11).unwrap();
        let b = gen_scheme1(8, 300, 0.9, 11).unwrap();
        assert_eq!(a.points, b.points);
        let delta = 0.9;
        for alpha in [0.5, 2.0] {
            let des = gen_scheme4(10, 5000, delta, alpha, 12).unwrap();
            let (m2, _) = BetaSymmetric::new(alpha, delta).unwrap().moments();
            let sq: Vec<f64> = des.points.iter().map(|v| v * v).collect();
            let (mean, se) = crate::mc::mean_and_se(&sq);
            assert!((mean - m2).abs() < 4.0 * se, "alpha={alpha}: {mean} vs {m2}");
            des.check_invariants().unwrap();
        }
        let m_half = gen_scheme4(10, 5000, delta, 0.5, 1).unwrap().points.iter().map(|v| v * v).sum::<f64>();
        let m_one = gen_scheme4(10, 5000, delta, 1.0, 1).unwrap().points.iter().map(|v| v * v).sum::<f64>();
        assert!(m_half > m_one);
    }

    #[test]
    fn scheme5_and_scheme6() {
        let (d, delta) = (10usize, 1.4);
        let s6 = gen_scheme6(d, 2000, delta, 3).unwrap();
        s6.check_invariants().unwrap();
        let s5 = gen_scheme5(d, 20_000, delta, 3).unwrap();
        s5.check_invariants().unwrap();
        let (mean, se) = crate::mc::mean_and_se(&s5.squared_norms());
        let exact = delta * delta * d as f64 / (d as f64 + 2.0);
        assert!((mean - exact).abs() < 4.0 * se, "{mean} vs {exact}");
        // radii of S5 follow (rho/delta)^d ~ U(0,1)
        let us: Vec<f64> = s5.squared_norms().iter().map(|s| (s.sqrt() / delta).powi(d as i32)).collect();
        assert!(ks_stat(us, |u| u) < ks_crit(20_000));
        // directions of S6: first coordinate squared over delta^2 ~ Beta(1/2, (d-1)/2), mean 1/d
        let c: Vec<f64> = s6.rows().map(|r| r[0] * r[0] / (delta * delta)).collect();
        let (m, se) = crate::mc::mean_and_se(&c);
        assert!((m - 1.0 / d as f64).abs() < 4.0 * se);
    }

    #[test]
    fn scheme3_vertices() {
        let des = gen_scheme3(10, 64, 0.44).unwrap();
        assert!(des.points.iter().all(|v| (v.abs() - 0.44).abs() < 1e-15));
        for j in 0..10 {
            assert_eq!(des.rows().filter(|r| r[j] > 0.0).count(), 32);
        }
        let full = gen_scheme3(6, 64, 1.0).unwrap();
        let mut rows: Vec<Vec<i8>> = full.rows().map(|r| r.iter().map(|&v| v as i8).collect()).collect();
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 64);
        assert!(des.label.as_deref().unwrap().contains("minimum aberration"));
        assert!(gen_scheme3(50, 1024, 0.5).unwrap().label.unwrap().contains("fallback"));
        assert!(matches!(gen_scheme3(10, 100, 0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn scheme7_sobol() {
        let des = gen_scheme7(10, 1024, 0.88).unwrap();
        assert!(des.point(0).iter().all(|&v| v == -0.88));
        for j in 0..10 {
            assert_eq!(des.rows().filter(|r| r[j] >= 0.0).count(), 512);
        }
        assert!(matches!(gen_scheme7(2000, 4, 0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn invariants_over_grid() {
        let mut count = 0;
        for (i, id) in SchemeId::ALL.iter().enumerate() {
            for d in [1usize, 3, 10] {
                for &delta in &[0.1, 0.5, 1.0] {
                    let alpha = (*id == SchemeId::S4).then_some(0.3 + i as f64 * 0.1);
                    let spec = SchemeSpec::new(*id, delta, alpha).unwrap();
                    let n = if *id == SchemeId::S3 { 1usize << d.min(3) } else { 8 };
                    if *id == SchemeId::S3 && n > 1 && d < n.trailing_zeros() as usize {
                        continue;
                    }
                    for seed in 0..40u64 {
                        let des = match generate(&spec, d, n, seed) {
                            Ok(x) => x,
                            Err(Error::Unsupported(_)) => continue,
                            Err(e) => panic!("{e}"),
                        };
                        des.check_invariants().unwrap();
                        count += 1;
                    }
                }
            }
        }
        assert!(count > 2000);
    }

    #[test]
    fn serialization() {
        let des = gen_scheme4(3, 5, 0.5, 2.0, 8).unwrap();
        let csv = des.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,x3");
        let parsed: Vec<f64> = lines.flat_map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect::<Vec<_>>()).collect();
        assert_eq!(parsed, des.points);
        let back = Design::from_json(&des.to_json().unwrap()).unwrap();
        assert_eq!(back, des);
    }
}
