//! Mean squared quantization error of a design: `E min_j ||X - Z_j||^2`
//! for `X` uniform on `[-1, 1]^d`, its normal-theory approximation for
//! uniformly placed centres, and the search for the best `delta`.

use serde::{Deserialize, Serialize};

use crate::designs::{Design, SchemeSpec};
use crate::error::{invalid, Result};
use crate::mc::{mean_and_se, EstimateResult};
use crate::special::{expected_max_std_normal, MaxNormalMode};
use crate::union_cover::{maximize_over_delta, nearest_sq_distances, replicated_distances, McBudget};

/// Default number of test points for quantization estimates.
pub const DEFAULT_TEST_POINTS: u64 = 20_000;
/// Default number of designs averaged for random schemes.
pub const DEFAULT_REPLICATIONS: u32 = 50;

pub fn default_budget(seed: u64) -> McBudget {
    McBudget { test_points: DEFAULT_TEST_POINTS, replications: DEFAULT_REPLICATIONS, seed }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizeQuery {
    pub d: usize,
    pub n: usize,
    pub scheme: SchemeSpec,
    pub normalize: bool,
}

fn mean_estimate(dist: &[f64], seed: u64) -> EstimateResult {
    let (mean, se) = mean_and_se(dist);
    EstimateResult { value: mean, std_err: se, samples: dist.len() as u64, design_replications: 1, seed }
}

/// Monte Carlo estimate of the quantization error of a fixed design.
pub fn quantization_mc(design: &Design, test_points: u64, seed: u64) -> Result<EstimateResult> {
    if design.n == 0 || design.points.is_empty() {
        return Err(invalid("design must contain at least one point"));
    }
    Ok(mean_estimate(&nearest_sq_distances(design, test_points, seed)?, seed))
}

/// Quantization error averaged over independent designs of a scheme, with
/// the same seeding as coverage estimates.
pub fn quantization_mc_averaged(spec: &SchemeSpec, d: usize, n: usize, budget: &McBudget) -> Result<EstimateResult> {
    let dists = replicated_distances(spec, d, n, budget)?;
    if dists.len() == 1 {
        return Ok(mean_estimate(&dists[0], budget.seed));
    }
    let values: Vec<f64> = dists.iter().map(|v| v.iter().sum::<f64>() / v.len() as f64).collect();
    let (mean, se) = mean_and_se(&values);
    Ok(EstimateResult {
        value: mean,
        std_err: se,
        samples: budget.test_points,
        design_replications: values.len() as u32,
        seed: budget.seed,
    })
}

/// `(sqrt(d) / 3) F(delta)` with
/// `F = sqrt(d)(1 + delta^2) - c delta sqrt(1 + delta^2/5) E_n`,
/// `c = 8/5` when `corrected`, else `2`, and `E_n = sqrt(2 ln n)`.
pub fn quantization_approx(d: usize, n: usize, delta: f64, corrected: bool) -> Result<f64> {
    quantization_approx_with(d, n, delta, corrected, MaxNormalMode::Rough)
}

/// [`quantization_approx`] with a choice of `E_n`: the rough `sqrt(2 ln n)`
/// or the exact expected maximum of `n` standard normals.
pub fn quantization_approx_with(d: usize, n: usize, delta: f64, corrected: bool, mode: MaxNormalMode) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(invalid("need d >= 1 and n >= 1"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1], got {delta}")));
    }
    let c = if corrected { 1.6 } else { 2.0 };
    let e_n = expected_max_std_normal(n as u64, mode)?;
    let sd = (d as f64).sqrt();
    let f = sd * (1.0 + delta * delta) - c * delta * (1.0 + delta * delta / 5.0).sqrt() * e_n;
    Ok(sd / 3.0 * f)
}

/// `n^{2/d} e_theta`.
pub fn normalized_error(d: usize, n: usize, e_theta: f64) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(invalid("need d >= 1 and n >= 1"));
    }
    if !(e_theta >= 0.0) {
        return Err(invalid(format!("quantization error must be >= 0, got {e_theta}")));
    }
    Ok((2.0 / d as f64 * (n as f64).ln()).exp() * e_theta)
}

/// `delta` minimizing the Monte Carlo normalized quantization error, with
/// designs and test points shared across `delta`. Returns
/// `(delta_star, min_normalized_error)`.
pub fn minimize_over_delta(spec: &SchemeSpec, d: usize, n: usize, budget: &McBudget) -> Result<(f64, f64)> {
    let hi = spec.id.delta_max(d);
    let (x, neg) = maximize_over_delta(hi, |delta| {
        let e = quantization_mc_averaged(&spec.with_delta(delta)?, d, n, budget)?;
        Ok(-normalized_error(d, n, e.value)?)
    })?;
    Ok((x, -neg))
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(invalid("spearman needs two samples of equal length >= 2"));
    }
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let m = (a.len() as f64 + 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - m) * (y - m)).sum();
    let va: f64 = ra.iter().map(|x| (x - m).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - m).powi(2)).sum();
    Ok(cov / (va * vb).sqrt())
}
