//! Error type shared by all solver modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system must contain at least one center")]
    EmptySystem,
    #[error("strength {value} at index {index} is not strictly positive")]
    NonPositiveStrength { index: usize, value: f64 },
    #[error("centers {a} and {b} coincide within resolution")]
    DuplicateCenter { a: f64, b: f64 },
    #[error("physical constant {name} = {value} is not strictly positive and finite")]
    NonPositiveConstant { name: &'static str, value: f64 },
    #[error("energy {0} is not strictly negative")]
    NonNegativeEnergy(f64),
    #[error("wave number {0} is not strictly positive and finite")]
    NonPositiveKappa(f64),
    #[error("operation requires hbar = 1 and mass = 1/2, got hbar = {hbar}, mass = {mass}")]
    UnitMismatch { hbar: f64, mass: f64 },
    #[error("Jacobi sweep limit ({0}) reached without convergence")]
    NoConvergence(usize),
    #[error("branch index {index} outside 1..={order}")]
    BranchOutOfRange { index: usize, order: usize },
    #[error("bad scan range: {0}")]
    BadRange(String),
    #[error("argument {0} outside the function domain")]
    DomainError(f64),
    #[error("bad geometry: {0}")]
    BadGeometry(String),
    #[error("system is not equidistant with uniform strengths")]
    NotCirculant,
    #[error("coefficient list is not mirror-symmetric at index {0}")]
    AsymmetricCoefficients(usize),
    #[error("center index {index} outside 0..{order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("wave functions carry different wave numbers ({0} vs {1})")]
    KappaMismatch(f64, f64),
    #[error("shifted matrix has a non-positive entry at ({row},{col})")]
    NotEntrywisePositive { row: usize, col: usize },
    #[error("state index {index} outside 0..{count}")]
    StateOutOfRange { index: usize, count: usize },
}
