//! Downlink coverage of finite-area cellular networks whose access points
//! form a Poisson point process with quadratic radial intensity
//! `λ(t) = λ0 (a + b t²)` on a disk of radius `R`.
//!
//! The analytic pipeline runs bottom-up:
//! [`geometry`] (intensity, clipped-ball measure) → [`nnd`] (serving-distance
//! law) → [`interference`] (Laplace functional of the interference) →
//! [`coverage`] (position-dependent and MU-averaged coverage, optimal `b`).
//! [`montecarlo`] is an independent simulator of the same system, and
//! [`oracle`] holds brute-force 2-D quadrature references.

pub mod coverage;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod montecarlo;
pub mod nnd;
pub mod numerics;
pub mod oracle;

pub use coverage::{
    average_coverage, connection_probability, coverage_probability, optimize_b, CoverageResult,
    CoverageTable, OptimizationResult,
};
pub use error::{Error, Result};
pub use geometry::{MuProfile, NetworkParams, PolarPoint, Preset};
pub use interference::{laplace_interference, LaplaceQuery};
pub use montecarlo::{SimConfig, SimEstimate};
pub use nnd::{mean_nnd, nnd_pdf, void_probability};
pub use numerics::{DiffSpec, QuadratureSpec};
