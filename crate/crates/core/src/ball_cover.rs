//! Fraction of the cube `[-1, 1]^d` covered by a single ball `B_d(Z, r)`.
//!
//! With `U` uniform on the cube, the fraction is `P{ ||U - Z||^2 <= r^2 }`,
//! the c.d.f. of a sum of `d` independent shifted squares. Three analytic
//! approximations are provided (normal, first-order Edgeworth and an
//! adjusted Edgeworth), all depending on `Z` through `||Z||^2` only, plus two
//! independent oracles: plain Monte Carlo and characteristic-function
//! inversion.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::{domain, par_chunks, stream_rng, EstimateResult, CHUNK};
use crate::special::{fresnel_with_phase, std_normal_cdf, std_normal_pdf};

/// Which correction constant the adjusted approximation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    /// `Z` on the main diagonal, all coordinates equal: `c_d = 1 + 3/d`.
    Diagonal,
    /// A typical (random) `Z`: `c_d = 1 + 4/d`.
    Typical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCoverQuery {
    pub d: u32,
    pub z_norm_sq: f64,
    pub r: f64,
    pub point_kind: PointKind,
}

impl LocalCoverQuery {
    pub fn new(d: u32, z_norm_sq: f64, r: f64, point_kind: PointKind) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(z_norm_sq >= 0.0 && z_norm_sq.is_finite()) {
            return Err(invalid(format!("||Z||^2 must be finite and >= 0, got {z_norm_sq}")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid(format!("radius must be finite and >= 0, got {r}")));
        }
        Ok(Self { d, z_norm_sq, r, point_kind })
    }

    pub fn with_r(&self, r: f64) -> Self {
        Self { r, ..*self }
    }
}

/// Mean, variance and third central moment of `||U - Z||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple {
    pub mu: f64,
    pub sigma_sq: f64,
    pub mu3: f64,
}

/// Maps a query on `[-delta, delta]^d` (centre norm² `z_prime_norm_sq`,
/// radius `r_prime`) to the equivalent query on `[-1, 1]^d`.
pub fn rescale_query(
    d: u32,
    z_prime_norm_sq: f64,
    r_prime: f64,
    delta: f64,
    point_kind: PointKind,
) -> Result<LocalCoverQuery> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    LocalCoverQuery::new(d, z_prime_norm_sq / (delta * delta), r_prime / delta, point_kind)
}

pub fn moments(q: &LocalCoverQuery) -> MomentTriple {
    let (z, d) = (q.z_norm_sq, q.d as f64);
    MomentTriple {
        mu: z + d / 3.0,
        sigma_sq: 4.0 / 3.0 * (z + d / 15.0),
        mu3: 16.0 / 15.0 * (z + d / 63.0),
    }
}

/// Standardized radius `t = (r^2 - mu) / sigma`.
pub fn standardized_radius(q: &LocalCoverQuery) -> f64 {
    let m = moments(q);
    (q.r * q.r - m.mu) / m.sigma_sq.sqrt()
}

/// Normal approximation `Phi(t)`.
pub fn approx_normal(q: &LocalCoverQuery) -> f64 {
    std_normal_cdf(standardized_radius(q))
}

/// First Edgeworth correction term `mu3 / (6 sigma^3) (1 - t^2) phi(t)`.
pub fn edgeworth_correction(q: &LocalCoverQuery) -> f64 {
    let t = standardized_radius(q);
    let (z, d) = (q.z_norm_sq, q.d as f64);
    let skew = (z + d / 63.0) / (5.0 * 3f64.sqrt() * (z + d / 15.0).powf(1.5));
    skew * (1.0 - t * t) * std_normal_pdf(t)
}

/// Normal approximation plus the first Edgeworth term. Not clamped.
pub fn approx_petrov(q: &LocalCoverQuery) -> f64 {
    approx_normal(q) + edgeworth_correction(q)
}

/// `c_d` of the adjusted approximation.
pub fn adjustment_factor(d: u32, kind: PointKind) -> f64 {
    match kind {
        PointKind::Diagonal => 1.0 + 3.0 / d as f64,
        PointKind::Typical => 1.0 + 4.0 / d as f64,
    }
}

/// Edgeworth approximation with the correction scaled by `c_d`. Not clamped.
pub fn approx_adjusted(q: &LocalCoverQuery) -> f64 {
    approx_normal(q) + adjustment_factor(q.d, q.point_kind) * edgeworth_correction(q)
}

/// Radius `R` at which the normal approximation equals `Phi(-beta)`.
pub fn threshold_radius(d: u32, z_norm_sq: f64, beta: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(z_norm_sq >= 0.0) || !beta.is_finite() {
        return Err(invalid("need ||Z||^2 >= 0 and finite beta"));
    }
    let (z, df) = (z_norm_sq, d as f64);
    let mean = z + df / 3.0;
    let half_sd = (z / 3.0 + df / 45.0).sqrt();
    let bracket = mean - 2.0 * beta * half_sd;
    if bracket < 0.0 {
        return Err(Error::Domain(format!(
            "no threshold radius for beta = {beta}: the bracket is negative; beta must be at most {}",
            mean / (2.0 * half_sd)
        )));
    }
    Ok(bracket.sqrt())
}

/// Centre with all coordinates equal and squared norm `z_norm_sq`.
pub fn diagonal_center(d: u32, z_norm_sq: f64) -> Vec<f64> {
    vec![(z_norm_sq / d as f64).sqrt(); d as usize]
}

/// Monte Carlo estimate of the fraction, with the centre placed on the
/// main diagonal.
pub fn mc_oracle(q: &LocalCoverQuery, samples: u64, seed: u64) -> Result<EstimateResult> {
    let z = diagonal_center(q.d, q.z_norm_sq);
    Ok(mc_oracle_at(&z, &[q.r], samples, seed)?.remove(0))
}

/// Monte Carlo estimates of the fraction for an explicit centre and several
/// radii, all from the same uniform sample.
pub fn mc_oracle_at(z: &[f64], radii: &[f64], samples: u64, seed: u64) -> Result<Vec<EstimateResult>> {
    if z.is_empty() {
        return Err(invalid("centre must have at least one coordinate"));
    }
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    if radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(invalid("radii must be finite and >= 0"));
    }
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].partial_cmp(&radii[b]).unwrap());
    let sq: Vec<f64> = order.iter().map(|&i| radii[i] * radii[i]).collect();
    let max_sq = *sq.last().unwrap();
    let m = sq.len();

    let partial = par_chunks(samples, CHUNK, |chunk, len| {
        let mut rng = stream_rng(seed, domain::ORACLE, chunk);
        // counts[k] = number of samples whose smallest covering radius index is k
        let mut counts = vec![0u64; m + 1];
        for _ in 0..len {
            let mut s = 0.0;
            for &zj in z {
                let u = 2.0 * rng.random::<f64>() - 1.0 - zj;
                s += u * u;
            }
            let k = if s > max_sq { m } else { sq.partition_point(|&t| t < s) };
            counts[k] += 1;
        }
        counts
    });
    let mut totals = vec![0u64; m + 1];
    for c in partial {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    let mut out = vec![EstimateResult::binomial(0, samples, seed); radii.len()];
    let mut cum = 0u64;
    for (k, &i) in order.iter().enumerate() {
        cum += totals[k];
        out[i] = EstimateResult::binomial(cum, samples, seed);
    }
    Ok(out)
}

/// Largest dimension accepted by [`cf_oracle`].
pub const CF_MAX_DIM: usize = 30;

/// Characteristic function of `(U - z)^2` with `U` uniform on `[-1, 1]`.
fn shifted_square_cf(z: f64, s: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    // int_0^a exp(i s w^2) dw = sqrt(pi / 2s) (C(x) + i S(x)), x = a sqrt(2s/pi)
    let scale = (std::f64::consts::PI / (2.0 * s)).sqrt();
    let g = |a: f64| {
        let (c, sn) = fresnel_with_phase(a / scale, s * a * a);
        Complex64::new(c, sn) * scale
    };
    (g(1.0 - z) - g(-1.0 - z)) * 0.5
}

/// Characteristic-function oracle: the c.d.f. of `||U - Z||^2` at `r^2`,
/// obtained by inverting the product of per-coordinate characteristic
/// functions.
///
/// The inversion is the midpoint-rule Gil-Pelaez series
/// `F(x) = 1/2 - sum_k Im[psi(s_k) e^{-i s_k x}] / (pi (k + 1/2))` with
/// `s_k = (k + 1/2) h`. Because the distribution has bounded support, a step
/// `h < 2 pi / L` (with `L` the distance from `x` to the far end of the
/// support) makes the discretization exact; the series is truncated once a
/// bound on its tail falls below `1e-10`, or after a fixed number of terms.
pub fn cf_oracle(z: &[f64], r: f64) -> Result<f64> {
    let d = z.len();
    if d == 0 {
        return Err(invalid("centre must have at least one coordinate"));
    }
    if d > CF_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "characteristic-function oracle is limited to d <= {CF_MAX_DIM}, got d = {d}"
        )));
    }
    if !(r >= 0.0 && r.is_finite()) || z.iter().any(|v| !v.is_finite()) {
        return Err(invalid("radius and centre must be finite, radius >= 0"));
    }
    let x = r * r;
    let lo: f64 = z.iter().map(|v| (v.abs() - 1.0).max(0.0).powi(2)).sum();
    let hi: f64 = z.iter().map(|v| (v.abs() + 1.0).powi(2)).sum();
    if x <= lo {
        return Ok(0.0);
    }
    if x >= hi {
        return Ok(1.0);
    }
    let span = 1.05 * (x - lo).max(hi - x);
    let h = 2.0 * std::f64::consts::PI / span;
    // |psi_z(s)| <= min(1, 0.96 sqrt(pi / 2s)) per coordinate (|C + iS| < 0.96)
    let env = 0.96 * 0.96 * std::f64::consts::PI / (2.0 * h);
    let half_d = d as f64 / 2.0;
    let tol = 1e-10;
    let max_terms: usize = 4_000_000 / d.max(1);

    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 0..max_terms {
        let kk = k as f64 + 0.5;
        let s = kk * h;
        let mut psi = Complex64::new(1.0, 0.0);
        for &zj in z {
            psi *= shifted_square_cf(zj, s);
        }
        let term = (psi * Complex64::from_polar(1.0, -s * x)).im / (std::f64::consts::PI * kk);
        // Neumaier summation
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        if kk > env {
            let tail = (env / kk).powf(half_d) / (std::f64::consts::PI * half_d);
            if tail < tol {
                break;
            }
        }
    }
    Ok((0.5 - (sum + comp)).clamp(0.0, 1.0))
}

/// Symmetry check `C_{d,V,r} = 2^{-d} C_{d,0,r}` for a vertex `V` and
/// `r <= 1`. Returns the Monte Carlo estimate at the vertex and `2^{-d}`
/// times the estimate at the centre, from equal budgets.
///
/// The part of `B_d(V, r)` inside the cube lies in the corner box
/// `[1 - r, 1]^d`, which is `(r/2)^d` of the cube; the vertex estimate
/// samples that box only (mapped affinely onto `[-1, 1]^d`, the ball becomes
/// `B_d(V, 2)`), so it sees enough hits to be informative.
pub fn vertex_relation_check(d: u32, r: f64, samples: u64, seed: u64) -> Result<(EstimateResult, EstimateResult)> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(invalid(format!("the vertex relation holds only for 0 <= r <= 1, got r = {r}")));
    }
    let box_fraction = (0.5 * r).powi(d as i32);
    let in_box = mc_oracle_at(&vec![1.0; d as usize], &[2.0], samples, seed)?.remove(0);
    let vertex =
        EstimateResult { value: in_box.value * box_fraction, std_err: in_box.std_err * box_fraction, ..in_box };
    let centre = mc_oracle_at(&vec![0.0; d as usize], &[r], samples, seed)?.remove(0);
    let scale = 0.5f64.powi(d as i32);
    let scaled = EstimateResult { value: centre.value * scale, std_err: centre.std_err * scale, ..centre };
    Ok((vertex, scaled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball_volume;
    use crate::rvlib::{lemma1_central_moments, ShiftedSquareDist};

    fn q(d: u32, z: f64, r: f64) -> LocalCoverQuery {
        LocalCoverQuery::new(d, z, r, PointKind::Diagonal).unwrap()
    }

    #[test]
    fn rescaling() {
        let a = rescale_query(10, 2.0, 1.3, 1.0, PointKind::Typical).unwrap();
        assert_eq!((a.z_norm_sq, a.r), (2.0, 1.3));
        let b = rescale_query(10, 0.0, 1.0, 0.5, PointKind::Typical).unwrap();
        assert_eq!(b.r, 2.0);
        let c1 = rescale_query(10, 2.0, 1.3, 0.5, PointKind::Typical).unwrap();
        let c2 = rescale_query(10, c1.z_norm_sq, c1.r, 0.8, PointKind::Typical).unwrap();
        let c3 = rescale_query(10, 2.0, 1.3, 0.4, PointKind::Typical).unwrap();
        assert!((c2.r - c3.r).abs() < 1e-14 && (c2.z_norm_sq - c3.z_norm_sq).abs() < 1e-12);
        assert!(rescale_query(10, 1.0, 1.0, 0.0, PointKind::Typical).is_err());
    }

    #[test]
    fn moment_values() {
        let m = moments(&q(10, 0.0, 1.0));
        assert!((m.mu - 10.0 / 3.0).abs() < 1e-15);
        let m = moments(&q(10, 2.5, 1.0));
        assert!((m.mu - 5.8333333333).abs() < 1e-9);
        assert!((m.sigma_sq - 4.2222222222).abs() < 1e-9);
        // sum of per-coordinate moments for an explicit centre
        let z = [0.3, -0.9, 0.0, 1.4, 0.5];
        let (mut mu, mut var, mut mu3) = (0.0, 0.0, 0.0);
        for &zj in &z {
            let c = lemma1_central_moments(&ShiftedSquareDist::new(zj, 1.0).unwrap());
            mu += c.mean;
            var += c.variance;
            mu3 += c.mu3;
        }
        let zsq: f64 = z.iter().map(|v| v * v).sum();
        let m = moments(&q(5, zsq, 1.0));
        assert!((m.mu - mu).abs() < 1e-12 && (m.sigma_sq - var).abs() < 1e-12 && (m.mu3 - mu3).abs() < 1e-12);
    }

    #[test]
    fn normal_approximation() {
        let m = moments(&q(10, 1.0, 0.0));
        assert!((approx_normal(&q(10, 1.0, m.mu.sqrt())) - 0.5).abs() < 1e-15);
        // r = 0, d = 10, Z = 0: t = -sqrt(3) (10/3) / (2 sqrt(10/15))
        let t = -(3f64).sqrt() * (10.0 / 3.0) / (2.0 * (10.0f64 / 15.0).sqrt());
        assert!((t + 3.535_533_905_932_737).abs() < 1e-12);
        assert!((approx_normal(&q(10, 0.0, 0.0)) - std_normal_cdf(t)).abs() < 1e-16);
        let mut prev = 0.0;
        for i in 0..100 {
            let v = approx_normal(&q(10, 0.7, i as f64 * 0.05));
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn approximations_agree_at_unit_t() {
        for &(d, z) in &[(10u32, 0.0), (50, 12.5), (7, 3.0)] {
            let m = moments(&q(d, z, 0.0));
            for t in [-1.0, 1.0] {
                let r = (m.mu + t * m.sigma_sq.sqrt()).sqrt();
                for kind in [PointKind::Diagonal, PointKind::Typical] {
                    let qq = LocalCoverQuery::new(d, z, r, kind).unwrap();
                    let n = approx_normal(&qq);
                    assert!((approx_petrov(&qq) - n).abs() < 1e-15);
                    assert!((approx_adjusted(&qq) - n).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn correction_sign_and_limit() {
        // t = -3 pulls the value down
        let m = moments(&q(20, 0.0, 0.0));
        let r = (m.mu - 3.0 * m.sigma_sq.sqrt()).sqrt();
        assert!(edgeworth_correction(&q(20, 0.0, r)) < 0.0);
        assert!((adjustment_factor(1_000_000, PointKind::Typical) - 1.0).abs() < 1e-5);
        assert_eq!(adjustment_factor(10, PointKind::Diagonal), 1.3);
    }

    #[test]
    fn threshold() {
        assert!((threshold_radius(12, 0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let r = threshold_radius(10, 0.0, 2.0).unwrap();
        let expect = (10.0 / 3.0 - 4.0 * (10.0f64 / 45.0).sqrt()).sqrt();
        assert!((r - expect).abs() < 1e-14);
        assert!((r - 1.203_210_393).abs() < 1e-8);
        for &(d, z, b) in &[(10u32, 0.0, 2.0), (50, 12.5, 1.3), (20, 3.0, -0.5)] {
            let r = threshold_radius(d, z, b).unwrap();
            assert!((approx_normal(&q(d, z, r)) - std_normal_cdf(-b)).abs() < 1e-12);
        }
        match threshold_radius(10, 0.0, 10.0) {
            Err(Error::Domain(msg)) => assert!(msg.contains("at most")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mc_edge_cases() {
        let full = mc_oracle(&q(5, 1.0, 1.0 + 5f64.sqrt()), 5000, 1).unwrap();
        assert_eq!(full.value, 1.0);
        assert_eq!(mc_oracle(&q(5, 1.0, 0.0), 5000, 1).unwrap().value, 0.0);
        let half = mc_oracle(&q(1, 0.0, 0.5), 100_000, 2).unwrap();
        assert!((half.value - 0.5).abs() < 3.0 * half.std_err);
        assert!(mc_oracle(&q(1, 0.0, 0.5), 0, 2).is_err());
        // same seed, same answer
        assert_eq!(mc_oracle(&q(7, 1.0, 1.5), 10_000, 9).unwrap(), mc_oracle(&q(7, 1.0, 1.5), 10_000, 9).unwrap());
    }

    #[test]
    fn mc_multi_radius_consistent() {
        let z = diagonal_center(6, 1.5);
        let radii = [1.8, 0.9, 1.3];
        let multi = mc_oracle_at(&z, &radii, 20_000, 4).unwrap();
        assert!(multi[1].value <= multi[2].value && multi[2].value <= multi[0].value);
        // disc inside the square: exact pi/4 fraction
        let disk = mc_oracle_at(&[0.0, 0.0], &[1.0], 200_000, 5).unwrap()[0];
        let exact = ball_volume(2, 1.0) / 4.0;
        assert!((disk.value - exact).abs() < 3.0 * disk.std_err);
    }

    #[test]
    fn mc_rescaling_identity() {
        // sampling on [-delta, delta]^d directly vs. the rescaled query
        for &delta in &[0.5, 0.8] {
            for &d in &[5usize, 10] {
                let zp: Vec<f64> = (0..d).map(|j| 0.1 * j as f64 * delta).collect();
                let rp = 0.9 * delta * (d as f64 / 3.0).sqrt();
                let n = 100_000u64;
                let mut rng = stream_rng(77, domain::AUX, d as u64);
                let mut hits = 0u64;
                for _ in 0..n {
                    let s: f64 = zp.iter().map(|&z| (delta * (2.0 * rng.random::<f64>() - 1.0) - z).powi(2)).sum();
                    if s <= rp * rp {
                        hits += 1;
                    }
                }
                let direct = EstimateResult::binomial(hits, n, 77);
                let z: Vec<f64> = zp.iter().map(|v| v / delta).collect();
                let scaled = mc_oracle_at(&z, &[rp / delta], n, 78).unwrap()[0];
                assert!(direct.z_distance(&scaled) < 3.0, "delta={delta} d={d}");
            }
        }
    }

    #[test]
    fn cf_exact_cases() {
        assert!((cf_oracle(&[0.0], 0.5).unwrap() - 0.5).abs() < 1e-6);
        assert!((cf_oracle(&[0.0, 0.0], 1.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        // d = 1 off-centre: interval [z - r, z + r] clipped to [-1, 1], length / 2
        let v = cf_oracle(&[0.7], 0.5).unwrap();
        assert!((v - (1.0 - 0.2) / 2.0).abs() < 1e-6, "{v}");
        assert_eq!(cf_oracle(&[0.0; 3], 0.0).unwrap(), 0.0);
        assert_eq!(cf_oracle(&[0.0; 3], 2.0).unwrap(), 1.0);
        assert!(matches!(cf_oracle(&[0.0; 31], 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cf_matches_monte_carlo() {
        for (z, r) in [(vec![0.0; 10], 1.2), (diagonal_center(10, 2.5), 1.6), (vec![0.3, -0.8, 1.2, 0.0, 0.5], 1.0)] {
            let cf = cf_oracle(&z, r).unwrap();
            let mc = mc_oracle_at(&z, &[r], 1_000_000, 21).unwrap()[0];
            assert!((cf - mc.value).abs() <= 3.0 * mc.std_err.max(1e-7), "cf={cf} mc={mc:?}");
        }
    }

    #[test]
    fn vertex_relation_small() {
        let (v, c) = vertex_relation_check(2, 1.0, 400_000, 8).unwrap();
        let pi16 = std::f64::consts::PI / 16.0;
        assert!((v.value - pi16).abs() < 3.0 * v.std_err);
        assert!((c.value - pi16).abs() < 3.0 * c.std_err);
        assert!(vertex_relation_check(3, 1.2, 10, 0).is_err());
    }
}
