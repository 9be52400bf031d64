//! Exact-arithmetic toolkit for probabilistic metric structures.
//!
//! The building blocks, bottom up:
//!
//! - [`rational`]: arbitrary-precision rational scalars; nothing here ever
//!   touches floating point.
//! - [`distributions`]: the lattice of step distribution functions vanishing
//!   at zero, with the Sibley (modified Levy) distance that metrizes weak
//!   convergence.
//! - [`tnorms`]: t-norms, their conorm duals, and the triangle functions they
//!   induce on step functions by sup- and inf-convolution, with exact kernels
//!   and independent grid oracles.
//! - [`spaces`]: finite probabilistic metric spaces and invariant metric
//!   groups, validated axiom by axiom with witnesses.
//! - [`lipschitz`]: probabilistic 1-Lipschitz maps — membership checking,
//!   point embeddings, shifts, distance-to-set, and extension from a subset.
//! - [`monoid`]: the sup-convolution monoid of 1-Lipschitz maps over a finite
//!   invariant group, its metric and discrete extension, unit-group
//!   computation, and transport/recovery of group isomorphisms through the
//!   map monoid.
//! - [`generate`] and [`files`]: seeded test families and the JSON artifact
//!   schemas used by the command-line tool.

// Validation errors deliberately carry their exact witnesses (rationals,
// reports); they only travel on cold paths.
#![allow(clippy::result_large_err)]

pub mod distributions;
pub mod files;
pub mod generate;
pub mod lipschitz;
pub mod monoid;
pub mod rational;
pub mod report;
pub mod spaces;
pub mod tnorms;

pub use distributions::{sibley_distance, weak_limit, DistFn, WeakTolerance};
pub use lipschitz::LipMap;
pub use rational::Rat;
pub use report::{AxiomId, Report, Violation};
pub use spaces::{ProbGroup, ProbSpace};
pub use tnorms::{TNorm, TriangleFn};
