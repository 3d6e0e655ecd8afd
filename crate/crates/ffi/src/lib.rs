//! C interface to `hypercover`.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`HcStatus`]; results are written
//!   through out-pointers only on success.
//! * On failure, [`hc_last_error_message`] returns a description, valid until
//!   the next call on the same thread.
//! * Designs are opaque [`HcDesign`] handles created by `hc_design_*` and
//!   released with [`hc_design_free`].
//! * Panics never cross the boundary; they are reported as
//!   [`HcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypercover::ball_cover::{approx_adjusted, approx_normal, approx_petrov, LocalCoverQuery, PointKind};
use hypercover::cube_cover::{expected_coverage_closed_form, CubeCoverQuery};
use hypercover::designs::{generate, Design, SchemeId, SchemeSpec};
use hypercover::geometry::{cap_volume, unit_ball_volume, unit_volume_radius};
use hypercover::quantize::{minimize_over_delta, normalized_error, quantization_approx, quantization_mc};
use hypercover::union_cover::{
    coverage_approx1, coverage_approx2, coverage_mc, coverage_mc_averaged, radius_for_target, CoverageMethod, McBudget,
};
use hypercover::Error;

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    Unsupported = 3,
    Numeric = 4,
    Overflow = 5,
    NullPointer = 6,
    Panic = 7,
}

/// A generated or user-supplied design.
pub struct HcDesign {
    inner: Design,
}

/// Point-placement scheme. `id` is 1..=7; `alpha` is used by scheme 4 only
/// and ignored otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HcScheme {
    pub id: u32,
    pub delta: f64,
    pub alpha: f64,
}

/// Monte Carlo budget: test points per design, designs averaged for random
/// schemes, and the seed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HcBudget {
    pub test_points: u64,
    pub replications: u32,
    pub seed: u64,
}

/// Single-ball approximation variants.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcLocalMethod {
    Normal = 0,
    Petrov = 1,
    Adjusted = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::InvalidArgument(_) => HcStatus::InvalidArgument,
        Error::Domain(_) => HcStatus::Domain,
        Error::Unsupported(_) => HcStatus::Unsupported,
        Error::Numeric(_) => HcStatus::Numeric,
        Error::Overflow(_) => HcStatus::Overflow,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult = Result<(), Failure>;

fn guard<F: FnOnce() -> FfiResult>(f: F) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HcStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            HcStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic");
            HcStatus::Panic
        }
    }
}

/// Writes `v` through `out`, which the caller guarantees is valid when
/// non-null.
unsafe fn write<T>(out: *mut T, v: T, what: &'static str) -> FfiResult {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn design_ref<'a>(h: *const HcDesign) -> Result<&'a Design, Failure> {
    h.as_ref().map(|d| &d.inner).ok_or(Failure::Null("design"))
}

fn scheme_spec(s: &HcScheme) -> Result<SchemeSpec, Error> {
    let id = match s.id {
        1 => SchemeId::S1,
        2 => SchemeId::S2,
        3 => SchemeId::S3,
        4 => SchemeId::S4,
        5 => SchemeId::S5,
        6 => SchemeId::S6,
        7 => SchemeId::S7,
        other => return Err(Error::InvalidArgument(format!("scheme id must be 1..7, got {other}"))),
    };
    let alpha = if id == SchemeId::S4 { Some(s.alpha) } else { None };
    SchemeSpec::new(id, s.delta, alpha)
}

fn budget(b: &HcBudget) -> Result<McBudget, Error> {
    McBudget::new(b.test_points, b.replications, b.seed)
}

/// Description of the last failure on this thread (empty after success).
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Volume of the unit ball in dimension `d` (0 for `d = 0`).
#[no_mangle]
pub extern "C" fn hc_unit_ball_volume(d: u32) -> f64 {
    if d == 0 {
        return 0.0;
    }
    unit_ball_volume(d)
}

/// Radius of the ball of unit volume in dimension `d` (0 for `d = 0`).
#[no_mangle]
pub extern "C" fn hc_unit_volume_radius(d: u32) -> f64 {
    if d == 0 {
        return 0.0;
    }
    unit_volume_radius(d)
}

/// Volume of the cap cut from the ball of radius `r` at distance `h` from
/// the centre.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_cap_volume(d: u32, r: f64, h: f64, out: *mut f64) -> HcStatus {
    guard(|| write(out, cap_volume(d, r, h)?, "out"))
}

/// Approximate fraction of `[-1, 1]^d` covered by a ball of radius `r`
/// whose centre has squared norm `z_norm_sq`. `typical` selects the
/// correction for typical rather than diagonal centres (adjusted method).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_local_cover(
    d: u32,
    z_norm_sq: f64,
    r: f64,
    method: HcLocalMethod,
    typical: bool,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let kind = if typical { PointKind::Typical } else { PointKind::Diagonal };
        let q = LocalCoverQuery::new(d, z_norm_sq, r, kind)?;
        let v = match method {
            HcLocalMethod::Normal => approx_normal(&q),
            HcLocalMethod::Petrov => approx_petrov(&q),
            HcLocalMethod::Adjusted => approx_adjusted(&q),
        };
        write(out, v, "out")
    })
}

/// Generates a design of `n` points in dimension `d`.
///
/// # Safety
/// `scheme` must be null or point to a valid `HcScheme`; `out` must be null
/// or valid for writes. The handle must be released with `hc_design_free`.
#[no_mangle]
pub unsafe extern "C" fn hc_design_generate(
    scheme: *const HcScheme,
    d: usize,
    n: usize,
    seed: u64,
    out: *mut *mut HcDesign,
) -> HcStatus {
    guard(|| {
        let s = scheme.as_ref().ok_or(Failure::Null("scheme"))?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = scheme_spec(s)?;
        spec.validate_for(d)?;
        let design = generate(&spec, d, n, seed)?;
        write(out, Box::into_raw(Box::new(HcDesign { inner: design })), "out")
    })
}

/// Wraps `n` user points (row-major, `n * d` values) as a design.
///
/// # Safety
/// `points` must be null or valid for `n * d` reads; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_design_from_points(
    points: *const f64,
    d: usize,
    n: usize,
    out: *mut *mut HcDesign,
) -> HcStatus {
    guard(|| {
        if points.is_null() {
            return Err(Failure::Null("points"));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if d == 0 || n == 0 {
            return Err(Error::InvalidArgument("need d >= 1 and n >= 1".into()).into());
        }
        let len = d.checked_mul(n).ok_or_else(|| Error::Overflow("n * d overflows".into()))?;
        let pts = std::slice::from_raw_parts(points, len).to_vec();
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("points must be finite".into()).into());
        }
        let scheme = SchemeSpec::new(SchemeId::S1, 1.0, None)?;
        let design = Design { d, n, scheme, seed: None, label: Some("user".into()), points: pts };
        write(out, Box::into_raw(Box::new(HcDesign { inner: design })), "out")
    })
}

/// Releases a design handle. Null is ignored.
///
/// # Safety
/// `design` must be null or a handle from `hc_design_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_design_free(design: *mut HcDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Dimension of a design (0 for null).
///
/// # Safety
/// `design` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_design_dim(design: *const HcDesign) -> usize {
    design.as_ref().map_or(0, |h| h.inner.d)
}

/// Number of points of a design (0 for null).
///
/// # Safety
/// `design` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_design_len(design: *const HcDesign) -> usize {
    design.as_ref().map_or(0, |h| h.inner.n)
}

/// Copies the points (row-major) into `buf`, which holds `capacity` values;
/// fails unless `capacity >= n * d`.
///
/// # Safety
/// `design` must be null or a live handle; `buf` must be null or valid for
/// `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn hc_design_points(design: *const HcDesign, buf: *mut f64, capacity: usize) -> HcStatus {
    guard(|| {
        let des = design_ref(design)?;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if capacity < des.points.len() {
            return Err(Error::InvalidArgument(format!("buffer holds {capacity} values, need {}", des.points.len())).into());
        }
        ptr::copy_nonoverlapping(des.points.as_ptr(), buf, des.points.len());
        Ok(())
    })
}

/// Monte Carlo coverage of `[-1, 1]^d` by balls of radius `r` around a
/// fixed design.
///
/// # Safety
/// `design` must be null or a live handle; `value` and `std_err` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_coverage_mc(
    design: *const HcDesign,
    r: f64,
    test_points: u64,
    seed: u64,
    value: *mut f64,
    std_err: *mut f64,
) -> HcStatus {
    guard(|| {
        let e = coverage_mc(design_ref(design)?, r, test_points, seed)?;
        write(value, e.value, "value")?;
        write(std_err, e.std_err, "std_err")
    })
}

/// Coverage averaged over independent designs of a scheme.
///
/// # Safety
/// Pointers must be null or valid (`scheme`, `budget` for reads; `value`,
/// `std_err` for writes).
#[no_mangle]
pub unsafe extern "C" fn hc_coverage_averaged(
    scheme: *const HcScheme,
    d: usize,
    n: usize,
    r: f64,
    budget_in: *const HcBudget,
    value: *mut f64,
    std_err: *mut f64,
) -> HcStatus {
    guard(|| {
        let spec = scheme_spec(scheme.as_ref().ok_or(Failure::Null("scheme"))?)?;
        let b = budget(budget_in.as_ref().ok_or(Failure::Null("budget"))?)?;
        spec.validate_for(d)?;
        let e = coverage_mc_averaged(&spec, d, n, r, &b)?;
        write(value, e.value, "value")?;
        write(std_err, e.std_err, "std_err")
    })
}

/// Analytic coverage for `n` uniform centres in `[-delta, delta]^d`;
/// `corrected` selects the Edgeworth-corrected version.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_coverage_approx(
    d: usize,
    n: usize,
    r: f64,
    delta: f64,
    corrected: bool,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let v = if corrected { coverage_approx2(d, n, r, delta)? } else { coverage_approx1(d, n, r, delta)? };
        write(out, v, "out")
    })
}

/// Smallest radius reaching coverage `target`, by Monte Carlo with frozen
/// designs and test points.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn hc_radius_for_target(
    scheme: *const HcScheme,
    d: usize,
    n: usize,
    target: f64,
    budget_in: *const HcBudget,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let spec = scheme_spec(scheme.as_ref().ok_or(Failure::Null("scheme"))?)?;
        let b = budget(budget_in.as_ref().ok_or(Failure::Null("budget"))?)?;
        spec.validate_for(d)?;
        write(out, radius_for_target(&spec, d, n, target, CoverageMethod::Mc, &b)?, "out")
    })
}

/// Exact expected coverage of `[-1, 1]^d` by `n` cubes of half-side `r`
/// around uniform centres in `[-delta, delta]^d`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_cube_cover_closed_form(d: usize, n: usize, r: f64, delta: f64, out: *mut f64) -> HcStatus {
    guard(|| write(out, expected_coverage_closed_form(&CubeCoverQuery::new(d, n, r, delta)?)?, "out"))
}

/// Monte Carlo quantization error `E min_j ||X - Z_j||^2` of a design.
///
/// # Safety
/// `design` must be null or a live handle; `value`, `std_err` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_quantization_mc(
    design: *const HcDesign,
    test_points: u64,
    seed: u64,
    value: *mut f64,
    std_err: *mut f64,
) -> HcStatus {
    guard(|| {
        let e = quantization_mc(design_ref(design)?, test_points, seed)?;
        write(value, e.value, "value")?;
        write(std_err, e.std_err, "std_err")
    })
}

/// Approximate quantization error for uniform centres in
/// `[-delta, delta]^d`; `corrected` uses coefficient 8/5 instead of 2.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_quantization_approx(
    d: usize,
    n: usize,
    delta: f64,
    corrected: bool,
    out: *mut f64,
) -> HcStatus {
    guard(|| write(out, quantization_approx(d, n, delta, corrected)?, "out"))
}

/// `n^{2/d} e_theta`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_normalized_error(d: usize, n: usize, e_theta: f64, out: *mut f64) -> HcStatus {
    guard(|| write(out, normalized_error(d, n, e_theta)?, "out"))
}

/// Minimizes the Monte Carlo normalized quantization error over `delta`
/// (the scheme's own `delta` is ignored).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn hc_minimize_quantization(
    scheme: *const HcScheme,
    d: usize,
    n: usize,
    budget_in: *const HcBudget,
    delta_star: *mut f64,
    min_value: *mut f64,
) -> HcStatus {
    guard(|| {
        let spec = scheme_spec(scheme.as_ref().ok_or(Failure::Null("scheme"))?)?;
        let b = budget(budget_in.as_ref().ok_or(Failure::Null("budget"))?)?;
        let (x, v) = minimize_over_delta(&spec, d, n, &b)?;
        write(delta_star, x, "delta_star")?;
        write(min_value, v, "min_value")
    })
}
