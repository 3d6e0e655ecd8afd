//! Closed-form ball and cube geometry in `d` dimensions.
//!
//! Volumes are assembled in log space: `Gamma(d/2 + 1)` overflows an `f64`
//! near `d = 340`, long before the volumes themselves leave the range.

use crate::error::{invalid, Result};
use crate::special::{ln_gamma, reg_incomplete_beta};

/// A ball `B_d(Z, r)`; only `||Z||` matters for the quantities here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    pub d: u32,
    pub r: f64,
    pub center_norm: f64,
}

impl BallSpec {
    pub fn new(d: u32, r: f64, center_norm: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !r.is_finite() || r < 0.0 {
            return Err(invalid(format!("radius must be finite and >= 0, got {r}")));
        }
        if !center_norm.is_finite() || center_norm < 0.0 {
            return Err(invalid(format!("center norm must be >= 0, got {center_norm}")));
        }
        Ok(Self { d, r, center_norm })
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.d, self.r)
    }
}

/// `ln V_d` with `V_d = pi^{d/2} / Gamma(d/2 + 1)`; `d = 0` gives `ln 1`.
pub fn ln_unit_ball_volume(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    ln_unit_ball_volume(d).exp()
}

/// `r^d V_d`.
pub fn ball_volume(d: u32, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    (d as f64 * r.ln() + ln_unit_ball_volume(d)).exp()
}

/// Radius of the ball of unit volume, `V_d^{-1/d}`.
pub fn unit_volume_radius(d: u32) -> f64 {
    (-ln_unit_ball_volume(d) / d as f64).exp()
}

/// Radius of the ball whose volume equals that of `[-delta, delta]^d`.
pub fn matched_cube_radius(d: u32, delta: f64) -> f64 {
    2.0 * delta * unit_volume_radius(d)
}

/// Volume of the cap cut from `B_d(r)` by a hyperplane at distance `h`
/// from the centre.
pub fn cap_volume(d: u32, r: f64, h: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(h >= 0.0 && h <= r) {
        return Err(invalid(format!("cap height must satisfy 0 <= h <= r (h = {h}, r = {r})")));
    }
    if h == r {
        return Ok(0.0);
    }
    if d == 1 {
        return Ok(r - h);
    }
    let df = d as f64;
    let half_ball = 0.5 * ball_volume(d, r);
    let t = 1.0 - (h / r).powi(2);
    let sector = half_ball * reg_incomplete_beta(t, (df - 1.0) / 2.0, 0.5)?;
    let cone = if h == 0.0 {
        0.0
    } else {
        let base_sq = r * r - h * h;
        (h / df) * (0.5 * (df - 1.0) * base_sq.ln() + ln_unit_ball_volume(d - 1)).exp()
    };
    Ok((sector - cone).clamp(0.0, half_ball))
}

/// Volume of `B_d(Z, r) ∩ B_d(Z', r)` with `||Z - Z'|| = center_distance`.
pub fn two_ball_intersection_volume(d: u32, r: f64, center_distance: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    if !(center_distance >= 0.0) {
        return Err(invalid("center distance must be >= 0"));
    }
    if center_distance >= 2.0 * r {
        return Ok(0.0);
    }
    Ok(2.0 * cap_volume(d, r, 0.5 * center_distance)?)
}

/// Hoeffding bound on `P{ | ||X||^2 - d/3 | >= eps d }` for `X` uniform on
/// `[-1, 1]^d`, clipped to 1.
pub fn concentration_band_bound(d: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    Ok((2.0 * (-2.0 * d as f64 * eps * eps).exp()).min(1.0))
}
