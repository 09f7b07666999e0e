//! Numerical laboratory for phase-space symmetries in continuous-variable
//! QKD: exact Fock-occupation combinatorics, the de Finetti reduction of
//! orthogonally invariant states to thermal mixtures, covariance-matrix
//! symmetrization under conjugate rotations, and the matching classical
//! (sphere-marginal and Gaussian-channel) statements.

pub mod channel;
pub mod classical;
pub mod combinatorics;
pub mod definetti;
pub mod error;
pub mod grids;
pub mod haar;
pub mod phase_space;
pub mod stats;

pub use error::{Error, Result};

// The matrix and rational types in the public API come from nalgebra and
// num-rational; re-export them so downstream crates name the same versions.
pub use nalgebra;
pub use num_rational;
