//! Fraction of the cube `[-1, 1]^d` covered by the union of `n` balls of
//! radius `r` centred at a design: Monte Carlo estimation, two analytic
//! approximations for uniformly placed centres, and searches over `r` and
//! `delta`.
//!
//! All Monte Carlo work goes through [`nearest_sq_distances`], which returns
//! for every test point its squared distance to the nearest design point.
//! Coverage at any radius is then an empirical c.d.f. of these values, so a
//! single pass serves many radii and searches over `r` run on a frozen,
//! exactly monotone objective.

use serde::{Deserialize, Serialize};

use crate::designs::{generate, Design, SchemeSpec};
use crate::error::{invalid, Error, Result};
use crate::mc::{derive_seed, domain, fill_uniform_cube, mean_and_se, par_chunks, stream_rng, EstimateResult, CHUNK};
use crate::special::{std_normal_cdf, std_normal_pdf, QuadratureSpec};

/// Default number of uniform test points per design.
pub const DEFAULT_TEST_POINTS: u64 = 100_000;
/// Default number of independent designs averaged for random schemes.
pub const DEFAULT_REPLICATIONS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageMethod {
    /// Monte Carlo over test points (and designs, for random schemes).
    Mc,
    /// Normal approximation of the per-ball probability.
    Approx1,
    /// Edgeworth-corrected approximation of the per-ball probability.
    Approx2,
}

impl std::str::FromStr for CoverageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mc" => Ok(Self::Mc),
            "approx1" => Ok(Self::Approx1),
            "approx2" => Ok(Self::Approx2),
            _ => Err(invalid(format!("unknown method '{s}' (expected mc, approx1 or approx2)"))),
        }
    }
}

impl std::fmt::Display for CoverageMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mc => "mc",
            Self::Approx1 => "approx1",
            Self::Approx2 => "approx2",
        })
    }
}

/// Monte Carlo budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McBudget {
    pub test_points: u64,
    pub replications: u32,
    pub seed: u64,
}

impl McBudget {
    pub fn new(test_points: u64, replications: u32, seed: u64) -> Result<Self> {
        if test_points == 0 {
            return Err(invalid("test_points must be at least 1"));
        }
        if replications == 0 {
            return Err(invalid("design replications must be at least 1"));
        }
        Ok(Self { test_points, replications, seed })
    }

    /// Replications actually used: deterministic schemes need only one.
    pub fn effective_replications(&self, spec: &SchemeSpec) -> u32 {
        if spec.id.is_random() {
            self.replications
        } else {
            1
        }
    }
}

impl Default for McBudget {
    fn default() -> Self {
        Self { test_points: DEFAULT_TEST_POINTS, replications: DEFAULT_REPLICATIONS, seed: 0 }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Squared distance from `u` to the nearest row of `points`.
#[inline]
pub(crate) fn nearest_sq(u: &[f64], points: &[f64], norms: &[f64]) -> f64 {
    let d = u.len();
    let un = dot(u, u);
    let mut best = f64::INFINITY;
    for (z, &zn) in points.chunks_exact(d).zip(norms) {
        let v = un + zn - 2.0 * dot(u, z);
        if v < best {
            best = v;
        }
    }
    best.max(0.0)
}

/// For `test_points` uniform points of `[-1, 1]^d` (drawn from `seed`), the
/// squared distance to the nearest design point, in test-point order.
/// Results do not depend on the number of worker threads.
pub fn nearest_sq_distances(design: &Design, test_points: u64, seed: u64) -> Result<Vec<f64>> {
    if test_points == 0 {
        return Err(invalid("test_points must be at least 1"));
    }
    let d = design.d;
    let norms = design.squared_norms();
    let chunks = par_chunks(test_points, CHUNK, |chunk, len| {
        let mut rng = stream_rng(seed, domain::TEST_POINTS, chunk);
        let mut u = vec![0.0; d];
        (0..len)
            .map(|_| {
                fill_uniform_cube(&mut rng, 1.0, &mut u);
                nearest_sq(&u, &design.points, &norms)
            })
            .collect::<Vec<f64>>()
    });
    Ok(chunks.concat())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("radius must be finite and >= 0, got {r}")));
    }
    Ok(())
}

fn fraction_within(dist_sq: &[f64], r: f64) -> u64 {
    let r2 = r * r;
    dist_sq.iter().filter(|&&v| v <= r2).count() as u64
}

/// Covered fraction of the cube for a fixed design, from `test_points`
/// uniform test points; binomial standard error.
pub fn coverage_mc(design: &Design, r: f64, test_points: u64, seed: u64) -> Result<EstimateResult> {
    check_radius(r)?;
    let dist = nearest_sq_distances(design, test_points, seed)?;
    Ok(EstimateResult::binomial(fraction_within(&dist, r), test_points, seed))
}

/// Nearest squared distances for each replication of a scheme. Replication
/// `m` uses design seed `derive_seed(seed, DESIGN, m)` and test-point seed
/// `derive_seed(seed, TEST_POINTS, m)`, so different `delta` values of the
/// same scheme share random numbers.
pub fn replicated_distances(spec: &SchemeSpec, d: usize, n: usize, budget: &McBudget) -> Result<Vec<Vec<f64>>> {
    let reps = budget.effective_replications(spec);
    (0..reps as u64)
        .map(|m| {
            let design = generate(spec, d, n, derive_seed(budget.seed, domain::DESIGN, m))?;
            nearest_sq_distances(&design, budget.test_points, derive_seed(budget.seed, domain::TEST_POINTS, m))
        })
        .collect()
}

fn averaged_from_distances(dists: &[Vec<f64>], r: f64, budget: &McBudget) -> EstimateResult {
    let n_test = budget.test_points;
    if dists.len() == 1 {
        let mut e = EstimateResult::binomial(fraction_within(&dists[0], r), n_test, budget.seed);
        e.seed = budget.seed;
        return e;
    }
    let values: Vec<f64> = dists.iter().map(|v| fraction_within(v, r) as f64 / n_test as f64).collect();
    let (mean, se) = mean_and_se(&values);
    EstimateResult {
        value: mean,
        std_err: se,
        samples: n_test,
        design_replications: dists.len() as u32,
        seed: budget.seed,
    }
}

/// Coverage averaged over independent designs of a scheme. The standard
/// error is the spread of the per-design estimates over `sqrt(M)`, which
/// includes both design and test-point variability. Deterministic schemes
/// use a single design.
pub fn coverage_mc_averaged(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    r: f64,
    budget: &McBudget,
) -> Result<EstimateResult> {
    Ok(coverage_curve_mc(spec, d, n, &[r], budget)?.remove(0))
}

/// [`coverage_mc_averaged`] for several radii from one set of samples.
pub fn coverage_curve_mc(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    radii: &[f64],
    budget: &McBudget,
) -> Result<Vec<EstimateResult>> {
    for &r in radii {
        check_radius(r)?;
    }
    let dists = replicated_distances(spec, d, n, budget)?;
    Ok(radii.iter().map(|&r| averaged_from_distances(&dists, r, budget)).collect())
}

fn check_cube_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("the approximations need delta in (0, 1], got {delta}")));
    }
    Ok(())
}

/// Per-ball coverage probability for a test point whose squared norm is
/// `d/3 + s sqrt(4d/45)` (clamped at 0), under the normal (`corrected =
/// false`) or Edgeworth-corrected approximation; clamped to `[0, 1]`.
fn inner_probability(d: f64, r: f64, delta: f64, s: f64, corrected: bool) -> f64 {
    let sp = ((d + 2.0 * s * (d / 5.0).sqrt()) / (delta * delta)).max(0.0);
    let denom = sp + d / 5.0;
    let c = (3.0 * (r / delta).powi(2) - sp - d) / (2.0 * denom.sqrt());
    let mut p = std_normal_cdf(c);
    if corrected {
        p += (1.0 + 4.0 / d) * (sp + d / 21.0) / (5.0 * denom.powf(1.5)) * (1.0 - c * c) * std_normal_pdf(c);
    }
    p.clamp(0.0, 1.0)
}

fn coverage_approx(d: usize, n: usize, r: f64, delta: f64, corrected: bool) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(invalid("need d >= 1 and n >= 1"));
    }
    check_radius(r)?;
    check_cube_delta(delta)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let (df, nf) = (d as f64, n as f64);
    let psi = |s: f64| (-nf * inner_probability(df, r, delta, s, corrected)).exp();
    let miss = QuadratureSpec::standard_normal().integrate(psi);
    Ok((1.0 - miss).clamp(0.0, 1.0))
}

/// Coverage for `n` centres uniform on `[-delta, delta]^d`, using the normal
/// approximation of the per-ball probability and `(1 - p)^n ~ e^{-np}`.
pub fn coverage_approx1(d: usize, n: usize, r: f64, delta: f64) -> Result<f64> {
    coverage_approx(d, n, r, delta, false)
}

/// As [`coverage_approx1`] with the Edgeworth-corrected per-ball probability
/// (correction factor `1 + 4/d`).
pub fn coverage_approx2(d: usize, n: usize, r: f64, delta: f64) -> Result<f64> {
    coverage_approx(d, n, r, delta, true)
}

/// Smallest `r` whose coverage reaches `target`.
///
/// With `Mc`, the designs and test points are frozen, so the averaged
/// coverage is a step function of `r` and the answer is an exact order
/// statistic of the pooled nearest distances. With the approximations, the
/// answer is found by bisection to `1e-4` in `r` on `[0, 2 sqrt(d)]`.
pub fn radius_for_target(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    target: f64,
    method: CoverageMethod,
    budget: &McBudget,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!("target must lie in (0, 1), got {target}")));
    }
    let r_max = 2.0 * (d as f64).sqrt();
    match method {
        CoverageMethod::Mc => {
            let dists = replicated_distances(spec, d, n, budget)?;
            let mut pooled: Vec<f64> = dists.concat();
            let k = ((target * pooled.len() as f64).ceil() as usize).clamp(1, pooled.len()) - 1;
            let (_, v, _) = pooled.select_nth_unstable_by(k, |a, b| a.partial_cmp(b).unwrap());
            Ok(v.sqrt())
        }
        CoverageMethod::Approx1 | CoverageMethod::Approx2 => {
            let corrected = method == CoverageMethod::Approx2;
            let f = |r: f64| coverage_approx(d, n, r, spec.delta, corrected);
            if f(r_max)? < target {
                return Err(Error::Domain(format!("no radius below 2 sqrt(d) = {r_max} reaches coverage {target}")));
            }
            let (mut lo, mut hi) = (0.0, r_max);
            while hi - lo > 1e-4 {
                let mid = 0.5 * (lo + hi);
                if f(mid)? >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(hi)
        }
    }
}

/// Coverage at one `(delta, r)` by the chosen method.
pub fn coverage_at(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    r: f64,
    method: CoverageMethod,
    budget: &McBudget,
) -> Result<EstimateResult> {
    match method {
        CoverageMethod::Mc => coverage_mc_averaged(spec, d, n, r, budget),
        CoverageMethod::Approx1 | CoverageMethod::Approx2 => {
            let v = coverage_approx(d, n, r, spec.delta, method == CoverageMethod::Approx2)?;
            Ok(EstimateResult { value: v, std_err: 0.0, samples: 0, design_replications: 0, seed: budget.seed })
        }
    }
}

/// Grid of `delta` values `step, 2 step, ...` up to `hi` (inclusive of `hi`).
pub fn delta_grid(step: f64, hi: f64) -> Vec<f64> {
    let m = (hi / step + 1e-9).floor() as usize;
    let mut g: Vec<f64> = (1..=m).map(|i| i as f64 * step).collect();
    if g.last().is_none_or(|&x| hi - x > 1e-9) {
        g.push(hi);
    }
    g
}

/// Maximizes `f` over `(0, hi]`: a grid with step `0.02`, then
/// golden-section search on the bracket around the best grid point to a
/// width of `0.005`. Returns `(argmax, max)`.
pub fn maximize_over_delta<F>(hi: f64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = 0.02;
    let grid = delta_grid(step, hi);
    let mut best = (grid[0], f64::NEG_INFINITY);
    for &x in &grid {
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(1e-3), (best.0 + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    while b - a > 0.005 {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e)?;
        }
    }
    for (x, v) in [(c, fc), (e, fe)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// `delta` maximizing coverage at radius `r`. Monte Carlo evaluations at
/// different `delta` share designs seeds and test points.
pub fn optimize_delta(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    r: f64,
    method: CoverageMethod,
    budget: &McBudget,
) -> Result<(f64, f64)> {
    check_radius(r)?;
    let hi = spec.id.delta_max(d);
    maximize_over_delta(hi, |delta| Ok(coverage_at(&spec.with_delta(delta)?, d, n, r, method, budget)?.value))
}

/// Smallest radius reaching `target` when `delta` is also chosen freely:
/// minimizes [`radius_for_target`] over `delta`. Returns `(delta_star,
/// r_star)`.
pub fn min_radius_over_delta(
    spec: &SchemeSpec,
    d: usize,
    n: usize,
    target: f64,
    method: CoverageMethod,
    budget: &McBudget,
) -> Result<(f64, f64)> {
    let hi = match method {
        CoverageMethod::Mc => spec.id.delta_max(d),
        _ => 1.0,
    };
    let (x, neg) = maximize_over_delta(hi, |delta| {
        Ok(-radius_for_target(&spec.with_delta(delta)?, d, n, target, method, budget)?)
    })?;
    Ok((x, -neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball_cover::mc_oracle_at;
    use crate::designs::{gen_scheme1, SchemeId};

    fn s1(delta: f64) -> SchemeSpec {
        SchemeSpec::new(SchemeId::S1, delta, None).unwrap()
    }

    fn single_point_design(z: Vec<f64>) -> Design {
        let d = z.len();
        Design { d, n: 1, scheme: s1(1.0), seed: None, label: None, points: z }
    }

    #[test]
    fn nearest_matches_brute_force() {
        let des = gen_scheme1(7, 40, 0.8, 1).unwrap();
        let dist = nearest_sq_distances(&des, 300, 2).unwrap();
        let mut rng = stream_rng(2, domain::TEST_POINTS, 0);
        let mut u = vec![0.0; 7];
        for &got in dist.iter().take(300) {
            fill_uniform_cube(&mut rng, 1.0, &mut u);
            let brute = des
                .rows()
                .map(|z| z.iter().zip(&u).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((got - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_radii() {
        let des = gen_scheme1(5, 10, 1.0, 3).unwrap();
        assert_eq!(coverage_mc(&des, 0.0, 1000, 1).unwrap().value, 0.0);
        assert_eq!(coverage_mc(&des, 2.0 * 5f64.sqrt(), 1000, 1).unwrap().value, 1.0);
        let one = coverage_mc(&single_point_design(vec![0.0]), 0.5, 100_000, 4).unwrap();
        assert!((one.value - 0.5).abs() < 3.0 * one.std_err);
    }

    #[test]
    fn monotone_in_r_and_n() {
        for d in [5usize, 10] {
            let des = gen_scheme1(d, 64, 0.7, 5).unwrap();
            let mut prev = 0.0;
            for i in 0..20 {
                let v = coverage_mc(&des, 0.1 * i as f64, 5000, 6).unwrap().value;
                assert!(v >= prev);
                prev = v;
            }
            let mut prev = 0.0;
            for m in [1usize, 4, 16, 64] {
                let v = coverage_mc(&des.prefix(m).unwrap(), 1.2, 5000, 6).unwrap().value;
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn union_bound_and_single_ball() {
        let d = 6;
        let des = gen_scheme1(d, 5, 0.8, 9).unwrap();
        let r = 1.0;
        let n_test = 200_000;
        let union = coverage_mc(&des, r, n_test, 10).unwrap();
        let per_ball: Vec<EstimateResult> =
            des.rows().map(|z| mc_oracle_at(z, &[r], n_test, 11).unwrap()[0]).collect();
        let sum: f64 = per_ball.iter().map(|e| e.value).sum();
        let se = per_ball.iter().map(|e| e.std_err * e.std_err).sum::<f64>().sqrt().hypot(union.std_err);
        assert!(union.value <= sum + 3.0 * se);
        let single = coverage_mc(&des.prefix(1).unwrap(), r, n_test, 12).unwrap();
        assert!(single.z_distance(&per_ball[0]) < 3.0);
    }

    #[test]
    fn exact_one_dimensional_average() {
        // E coverage of [Z - r, Z + r] ∩ [-1, 1] with Z uniform: 1 - (1 - r/2)^2
        let budget = McBudget::new(400, 4000, 13).unwrap();
        let e = coverage_mc_averaged(&s1(1.0), 1, 1, 0.5, &budget).unwrap();
        assert!((e.value - 0.4375).abs() < 3.0 * e.std_err, "{e:?}");
        assert_eq!(e.design_replications, 4000);
    }

    #[test]
    fn deterministic_scheme_uses_one_design() {
        let spec = SchemeSpec::new(SchemeId::S7, 0.9, None).unwrap();
        let e = coverage_mc_averaged(&spec, 5, 32, 1.0, &McBudget::new(1000, 7, 1).unwrap()).unwrap();
        assert_eq!(e.design_replications, 1);
    }

    #[test]
    fn approximation_edges() {
        assert_eq!(coverage_approx1(10, 64, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(coverage_approx2(10, 64, 0.0, 0.7).unwrap(), 0.0);
        assert!(coverage_approx1(10, 1 << 40, 1.5, 0.7).unwrap() > 0.999);
        assert!(coverage_approx1(10, 64, 1.5, 1.5).is_err());
        // the correction vanishes as d grows at fixed standardized radius
        let d = 100_000usize;
        let r = (d as f64 * (1.0 + 0.49) / 3.0).sqrt();
        let (a1, a2) = (coverage_approx1(d, 64, r, 0.7).unwrap(), coverage_approx2(d, 64, r, 0.7).unwrap());
        assert!((a1 - a2).abs() < 1e-3, "{a1} {a2}");
        let mut prev = 0.0;
        for i in 0..40 {
            let v = coverage_approx2(20, 512, 1.5 + 0.05 * i as f64, 0.68).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn approximation_close_to_mc() {
        let (d, n, delta, r) = (20usize, 512usize, 0.68, 2.290);
        let mc = coverage_mc_averaged(&s1(delta), d, n, r, &McBudget::new(20_000, 10, 3).unwrap()).unwrap();
        let a1 = coverage_approx1(d, n, r, delta).unwrap();
        let a2 = coverage_approx2(d, n, r, delta).unwrap();
        // independent reference values of both integrals
        assert!((a1 - 0.962_647_541_593_3).abs() < 1e-8, "{a1}");
        assert!((a2 - 0.904_399_414_340_6).abs() < 1e-8, "{a2}");
        assert!((a2 - mc.value).abs() < 0.01, "a2={a2} mc={mc:?}");
        // the uncorrected approximation overestimates markedly here
        assert!(a1 - mc.value > 0.03, "a1={a1} mc={mc:?}");
    }

    #[test]
    fn radius_search() {
        let budget = McBudget::new(20_000, 10, 17).unwrap();
        let spec = s1(0.7);
        let r = radius_for_target(&spec, 10, 64, 0.9, CoverageMethod::Mc, &budget).unwrap();
        let cov = coverage_mc_averaged(&spec, 10, 64, r, &budget).unwrap().value;
        let below = coverage_mc_averaged(&spec, 10, 64, r * (1.0 - 1e-9), &budget).unwrap().value;
        assert!(cov >= 0.9 && below < 0.9);
        let r2 = radius_for_target(&spec, 10, 64, 0.9, CoverageMethod::Approx2, &budget).unwrap();
        assert!((coverage_approx2(10, 64, r2, 0.7).unwrap() - 0.9).abs() < 2e-3);
        let tiny = radius_for_target(&spec, 10, 64, 1e-6, CoverageMethod::Approx2, &budget).unwrap();
        assert!(tiny < r2);
        assert!(radius_for_target(&spec, 10, 64, 1.0, CoverageMethod::Mc, &budget).is_err());
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = maximize_over_delta(1.0, |x| Ok(-(x - 0.437f64).powi(2))).unwrap();
        assert!((x - 0.437).abs() < 0.005 && v <= 0.0);
        let (x, _) = maximize_over_delta(1.0, Ok).unwrap();
        assert!(x > 0.99);
        let g = delta_grid(0.02, 1.0);
        assert_eq!(g.len(), 50);
        assert!((g[49] - 1.0).abs() < 1e-12);
        assert_eq!(delta_grid(0.02, 10f64.sqrt()).last().copied(), Some(10f64.sqrt()));
    }

    #[test]
    fn delta_effect_with_approximation() {
        let spec = s1(1.0);
        let budget = McBudget::default();
        let (dstar, best) = optimize_delta(&spec, 50, 1024, 3.970, CoverageMethod::Approx2, &budget).unwrap();
        let at_one = coverage_approx2(50, 1024, 3.970, 1.0).unwrap();
        assert!(best >= at_one);
        assert!((dstar - 0.46).abs() < 0.04, "delta* = {dstar}");
    }

    #[test]
    fn min_radius_over_delta_with_approximation() {
        let budget = McBudget::default();
        let spec = s1(1.0);
        let (dstar, r) = min_radius_over_delta(&spec, 50, 512, 0.9, CoverageMethod::Approx2, &budget).unwrap();
        let r1 = radius_for_target(&spec, 50, 512, 0.9, CoverageMethod::Approx2, &budget).unwrap();
        assert!(r < r1 - 0.3);
        assert!((r - 4.020).abs() < 0.03, "r={r}");
        assert!((dstar - 0.45).abs() < 0.05, "dstar={dstar}");
    }
}
