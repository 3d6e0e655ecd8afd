//! Coverage of `[-1, 1]^d` by `n` smaller cubes of half-side `r`
//! (`L_inf` balls), with centres uniform on `[-delta, delta]^d`.
//!
//! The fraction of the cube covered by one small cube factorizes into
//! one-dimensional c.d.f.s, which makes the expected union coverage
//! available in closed form:
//!
//! `C = 1 - sum_{k=0}^{n} (-1)^k C(n, k) I_k^d`,
//! `I_k = 1/2 ∫_{-1}^{1} G_{u/delta}(r/delta)^k du`.
//!
//! The alternating sum cancels catastrophically (`C(1024, 512) ~ 1e306`), so
//! it is evaluated with `n + 96` bits of binary precision, including the
//! `I_k` themselves.

use astro_float::{BigFloat, RoundingMode};
use serde::{Deserialize, Serialize};

use crate::designs::gen_scheme1;
use crate::error::{invalid, Error, Result};
use crate::mc::{derive_seed, domain, fill_uniform_cube, mean_and_se, par_chunks, stream_rng, EstimateResult, CHUNK};
use crate::special::big_to_f64;
use crate::union_cover::McBudget;

/// Largest `n` accepted by the closed form.
pub const CLOSED_FORM_MAX_N: usize = 4096;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeCoverQuery {
    pub d: usize,
    pub n: usize,
    pub r: f64,
    pub delta: f64,
}

impl CubeCoverQuery {
    pub fn new(d: usize, n: usize, r: f64, delta: f64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(invalid("need d >= 1 and n >= 1"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid(format!("half-side must be finite and >= 0, got {r}")));
        }
        check_delta(delta)?;
        Ok(Self { d, n, r, delta })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

/// `P{ |u - z| <= r }` for `u` uniform on `[-1, 1]`.
pub fn marginal_cdf_g(z: f64, r: f64) -> f64 {
    let az = z.abs();
    if r <= 0.0 {
        0.0
    } else if r < 1.0 - az {
        r
    } else if r <= 1.0 + az {
        (0.5 * (1.0 + r - az)).max(0.0)
    } else {
        1.0
    }
}

/// Fraction of `[-1, 1]^d` inside the cube of half-side `r` centred at `z`.
pub fn single_cube_fraction(z: &[f64], r: f64) -> f64 {
    z.iter().map(|&zj| marginal_cdf_g(zj, r)).product()
}

/// Fraction of `[-delta, delta]^d` inside the cube of half-side `r_prime`
/// centred at `z_prime`.
pub fn rescaled_fraction(z_prime: &[f64], r_prime: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let z: Vec<f64> = z_prime.iter().map(|v| v / delta).collect();
    Ok(single_cube_fraction(&z, r_prime / delta))
}

/// `I_k` in double precision.
pub fn ik_integral(k: u32, r: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("half-side must be finite and >= 0, got {r}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let x = r / delta;
    let v = ((delta + r - 1.0) / (2.0 * delta)).max(0.0);
    let kp = (k + 1) as f64;
    let val = if x <= 1.0 {
        (delta - r) * x.powi(k as i32) + 2.0 * delta / kp * (x.powi(k as i32 + 1) - v.powi(k as i32 + 1))
    } else if r - delta < 1.0 {
        (r - delta) + 2.0 * delta / kp * (1.0 - v.powi(k as i32 + 1))
    } else {
        1.0
    };
    Ok(val.clamp(0.0, 1.0))
}

/// `I_k` at `p` bits of precision; `r` and `delta` are taken as exact.
fn ik_big(k: usize, r: &BigFloat, delta: &BigFloat, branch: Branch, p: usize) -> BigFloat {
    let one = BigFloat::from_word(1, p);
    if k == 0 {
        return one;
    }
    let two = BigFloat::from_word(2, p);
    let kp = BigFloat::from_word(k as u64 + 1, p);
    let x = r.div(delta, p, RM);
    // v = max(0, (delta + r - 1) / (2 delta))
    let num = delta.add(r, p, RM).sub(&one, p, RM);
    let v = if num.is_positive() { num.div(&two.mul(delta, p, RM), p, RM) } else { BigFloat::from_word(0, p) };
    let coef = two.mul(delta, p, RM).div(&kp, p, RM);
    let v_pow = v.powi(k + 1, p, RM);
    match branch {
        Branch::Inner => {
            let xk = x.powi(k, p, RM);
            let xk1 = xk.mul(&x, p, RM);
            delta.sub(r, p, RM).mul(&xk, p, RM).add(&coef.mul(&xk1.sub(&v_pow, p, RM), p, RM), p, RM)
        }
        Branch::Middle => r.sub(delta, p, RM).add(&coef.mul(&one.sub(&v_pow, p, RM), p, RM), p, RM),
        Branch::Full => one,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// `r <= delta`
    Inner,
    /// `delta < r < delta + 1`
    Middle,
    /// `r >= delta + 1`: one cube always covers everything.
    Full,
}

fn branch(r: f64, delta: f64) -> Branch {
    if r <= delta {
        Branch::Inner
    } else if r - delta < 1.0 {
        Branch::Middle
    } else {
        Branch::Full
    }
}

/// Binary precision used by the closed form for `n` cubes in dimension `d`.
pub fn closed_form_precision(n: usize, d: usize) -> usize {
    let extra = 96 + (usize::BITS - d.leading_zeros()) as usize;
    (n + extra).div_ceil(64) * 64
}

/// Closed-form expected coverage before clamping.
pub fn expected_coverage_closed_form_raw(q: &CubeCoverQuery) -> Result<f64> {
    if q.n > CLOSED_FORM_MAX_N {
        return Err(Error::Unsupported(format!(
            "closed form supports n <= {CLOSED_FORM_MAX_N}, got n = {}",
            q.n
        )));
    }
    let br = branch(q.r, q.delta);
    if br == Branch::Full {
        return Ok(1.0);
    }
    if q.r == 0.0 {
        return Ok(0.0);
    }
    let p = closed_form_precision(q.n, q.d);
    let r = BigFloat::from_f64(q.r, p);
    let delta = BigFloat::from_f64(q.delta, p);
    let mut binom = BigFloat::from_word(1, p);
    // sum_{k>=1} (-1)^{k+1} C(n, k) I_k^d  (the k = 0 term cancels the leading 1)
    let mut acc = BigFloat::from_word(0, p);
    for k in 1..=q.n {
        binom = binom
            .mul(&BigFloat::from_word((q.n - k + 1) as u64, p), p, RM)
            .div(&BigFloat::from_word(k as u64, p), p, RM);
        let term = binom.mul(&ik_big(k, &r, &delta, br, p).powi(q.d, p, RM), p, RM);
        acc = if k % 2 == 1 { acc.add(&term, p, RM) } else { acc.sub(&term, p, RM) };
    }
    big_to_f64(&acc)
}

/// Expected fraction of `[-1, 1]^d` covered by `n` cubes of half-side `r`
/// with centres iid uniform on `[-delta, delta]^d`.
///
/// Values within `1e-6` outside `[0, 1]` are clamped; anything further out
/// means the precision budget was insufficient and is reported as an error.
pub fn expected_coverage_closed_form(q: &CubeCoverQuery) -> Result<f64> {
    let v = expected_coverage_closed_form_raw(q)?;
    if !(-1e-6..=1.0 + 1e-6).contains(&v) {
        return Err(Error::Numeric(format!(
            "closed form left [0, 1] ({v}) at {} bits; increase precision",
            closed_form_precision(q.n, q.d)
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// `min_j ||u - z_j||_inf` with early exit on each centre.
fn nearest_linf(u: &[f64], points: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for z in points.chunks_exact(u.len()) {
        let mut m = 0.0f64;
        for (a, b) in u.iter().zip(z) {
            m = m.max((a - b).abs());
            if m >= best {
                break;
            }
        }
        if m < best {
            best = m;
        }
    }
    best
}

/// Monte Carlo estimate of the expected coverage for each half-side in
/// `radii`, averaging over `budget.replications` independent designs.
pub fn cube_cover_mc_curve(
    d: usize,
    n: usize,
    radii: &[f64],
    delta: f64,
    budget: &McBudget,
) -> Result<Vec<EstimateResult>> {
    if d == 0 || n == 0 {
        return Err(invalid("need d >= 1 and n >= 1"));
    }
    check_delta(delta)?;
    if radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(invalid("half-sides must be finite and >= 0"));
    }
    let m = budget.replications as usize;
    let mut per_rep = vec![vec![0u64; radii.len()]; m];
    for (rep, counts) in per_rep.iter_mut().enumerate() {
        let points = gen_scheme1(d, n, delta, derive_seed(budget.seed, domain::DESIGN, rep as u64))?.points;
        let test_seed = derive_seed(budget.seed, domain::TEST_POINTS, rep as u64);
        let dists = par_chunks(budget.test_points, CHUNK, |chunk, len| {
            let mut rng = stream_rng(test_seed, domain::TEST_POINTS, chunk);
            let mut u = vec![0.0; d];
            (0..len)
                .map(|_| {
                    fill_uniform_cube(&mut rng, 1.0, &mut u);
                    nearest_linf(&u, &points)
                })
                .collect::<Vec<f64>>()
        })
        .concat();
        for (c, &r) in counts.iter_mut().zip(radii) {
            *c = dists.iter().filter(|&&v| v <= r).count() as u64;
        }
    }
    let nt = budget.test_points;
    Ok((0..radii.len())
        .map(|i| {
            if m == 1 {
                return EstimateResult::binomial(per_rep[0][i], nt, budget.seed);
            }
            let vals: Vec<f64> = per_rep.iter().map(|c| c[i] as f64 / nt as f64).collect();
            let (mean, se) = mean_and_se(&vals);
            EstimateResult { value: mean, std_err: se, samples: nt, design_replications: m as u32, seed: budget.seed }
        })
        .collect())
}

pub fn cube_cover_mc(d: usize, n: usize, r: f64, delta: f64, budget: &McBudget) -> Result<EstimateResult> {
    Ok(cube_cover_mc_curve(d, n, &[r], delta, budget)?.remove(0))
}
