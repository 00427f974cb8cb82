//! Numerical laboratory for ψ-Dirichlet (non-)improvability of affine forms.
//!
//! The crate is organized around five cooperating modules:
//!
//! * [`psi`] — rate functions ψ, their generalized inverses and transference
//!   duals, the flow-time profile z_ψ, critical-dimension formulas, and
//!   series-convergence classifiers;
//! * [`lattice`] — sup-norm geometry of unimodular grids Λ_{A,b} in R^{m+n}
//!   under the diagonal flow a_t: reduction, exact shortest vectors and
//!   successive minima, duals, and the Mahler inequality oracle;
//! * [`scan`] — three independent checkers for ψ-Dirichlet improvability of
//!   a pair (A, b) over a finite T-window, and a uniform-exponent estimator;
//! * [`cover`] — covering counts of the high sets Z_t against the
//!   e^{(m+n)(t−z(t))} scaling, Hausdorff s-sums, and slope regression;
//! * [`ubiquity`] — exact resonant-point censuses and mean/variance
//!   statistics feeding the local-ubiquity counting bounds.
//!
//! Everything is deterministic given explicit seeds; parallel sweeps reduce
//! in index order.

pub mod cover;
pub mod error;
pub mod lattice;
pub mod num;
pub mod psi;
pub mod scan;
pub mod ubiquity;

pub use error::{Error, Result};
