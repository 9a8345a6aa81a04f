//! Structure-preserving discretization and time integration of Darwin-type
//! electromagneto-quasistatic (EMQS) field formulations.
//!
//! The crate assembles block operator quadruples (E, J, R, B) for a family of
//! quasistatic Maxwell approximations on a staggered hexahedral grid, evaluates
//! the associated discrete energies, and integrates the resulting
//! differential-algebraic systems with a theta-method. All structural claims
//! (symmetry, skew-symmetry, semi-definiteness, energy balance, gauge
//! residuals) are exposed as machine-checkable diagnostics.
//!
//! The core is `no_std` (alloc required); file formats, scenario parsing and
//! the command line live in the companion `emqs` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

use alloc::string::String;
use core::fmt;

pub mod diagnostics;
pub mod energy;
pub mod formulation;
pub mod grid;
pub mod integrator;
pub mod linalg;
pub mod material;
pub mod sparse;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid specification violates a basic invariant (counts, spacings).
    InvalidGrid(String),
    /// The requested ground node lies on the PEC boundary.
    GroundOnBoundary { node: [usize; 3] },
    /// A material coefficient is out of range.
    InvalidMaterial(String),
    /// A formulation needs an artificial coefficient that was not supplied.
    MissingArtificialMaterial { tag: &'static str, coefficient: &'static str },
    /// Vector or matrix dimensions do not match.
    DimensionMismatch { expected: usize, got: usize },
    /// A linear system is singular; `context` names the formulation and the
    /// offending pivot.
    SingularMatrix(String),
    /// The iterative solver stalled before reaching its tolerance.
    SolverStagnated { residual: f64, tolerance: f64 },
    /// The state layout does not provide a block the operation requires.
    MissingBlock(&'static str),
    /// A gradient of the Hamiltonian was requested for a formulation whose E
    /// operator is not self-adjoint: no compatible Hamiltonian exists.
    NoCompatibleHamiltonian { tag: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::GroundOnBoundary { node } => write!(
                f,
                "ground node ({}, {}, {}) lies on the PEC boundary; pick an interior node",
                node[0], node[1], node[2]
            ),
            Error::InvalidMaterial(msg) => write!(f, "invalid material: {msg}"),
            Error::MissingArtificialMaterial { tag, coefficient } => write!(
                f,
                "formulation {tag} requires the artificial coefficient {coefficient}, \
                 which is zero or undefined"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::SingularMatrix(ctx) => write!(f, "singular matrix: {ctx}"),
            Error::SolverStagnated { residual, tolerance } => write!(
                f,
                "iterative solver stagnated at residual {residual:e} (tolerance {tolerance:e})"
            ),
            Error::MissingBlock(name) => {
                write!(f, "state layout has no `{name}` block for this operation")
            }
            Error::NoCompatibleHamiltonian { tag } => write!(
                f,
                "no compatible Hamiltonian: E is not self-adjoint for {tag}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
