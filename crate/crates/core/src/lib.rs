//! Coverage of high-dimensional cubes by balls and by smaller cubes, and the
//! mean-square quantization error of space-filling designs.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`], [`geometry`], [`rvlib`]: numeric kernels, closed-form
//!   ball/cube geometry and the one-dimensional distributions everything
//!   else is built from.
//! * [`ball_cover`]: the fraction of the cube `[-1, 1]^d` covered by one
//!   ball, with CLT / Edgeworth approximations and two oracles.
//! * [`designs`]: the seven point-placement schemes.
//! * [`union_cover`], [`cube_cover`], [`quantize`]: coverage by unions of
//!   balls and of cubes, and quantization error.
//! * [`tables`], [`sweep`]: reference values and CSV/JSON row emission used
//!   by the `hypercover` binary.

// Argument checks are written as `!(x >= 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball_cover;
pub mod cube_cover;
pub mod designs;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod quantize;
pub mod rvlib;
pub mod special;
pub mod sweep;
pub mod tables;
pub mod union_cover;

pub use error::{Error, Result};
pub use mc::EstimateResult;
