//! Radial reduction of the k-plane transform.
//!
//! On radial functions the k-plane transform reduces to the one-dimensional
//! operator
//!
//! ```text
//! T f(r) = ∫_0^∞ f(√(r² + s²)) s^{k-1} ds = ∫_r^∞ f(u) (u² - r²)^{k/2-1} u du,
//! ```
//!
//! bounded from `L^p(r^{d-1} dr)` to `L^q(r^{d-k-1} dr)` with
//! `p = (d+1)/(k+1)`, `q = d+1`. This crate samples radial profiles on a
//! tangent-substituted grid and provides the transform, its adjoint, the
//! sharp constants, an extremizer search, rearrangement and dilation
//! normalization, concentration-compactness diagnostics, and numerical
//! checks of the quantitative estimates around the inequality.
//!
//! Numerics are generic over [`Scalar`] (`f32`, `f64`); the aliases below
//! fix `f64`, which the verification layer uses throughout.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cc;
pub mod error;
pub mod extremal;
pub mod gauss;
pub mod grid;
pub mod interp;
pub mod interval;
pub mod params;
pub mod profile;
pub mod scalar;
pub mod symmetry;
pub mod transform;
pub mod truncated;
pub mod verify;

pub use error::{Error, Result};
pub use params::{Params, Rational};
pub use scalar::Scalar;

pub type Grid = grid::RadialGrid<f64>;
pub type Profile = profile::RadialProfile<f64>;
pub type Intervals = interval::IntervalSet<f64>;
pub type Operator = truncated::OperatorMatrix<f64>;
pub type Trace = extremal::SearchTrace<f64>;
pub type Report = cc::TrichotomyReport<f64>;

/// Library version, stamped into output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
