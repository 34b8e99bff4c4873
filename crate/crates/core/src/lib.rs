//! Bound states of finitely many attractive Dirac delta wells on the line.
//!
//! The solver works in the wave-number variable `kappa = sqrt(2m|E|)/hbar`.
//! A secular matrix `Phi(kappa)` is assembled from the well positions and
//! strengths; bound states sit at the wave numbers where an eigenvalue
//! branch of `Phi` crosses zero. On top of the root finder the crate offers
//! closed forms for one and two wells (Lambert W), the circulant model for
//! equidistant uniform wells, piecewise-exponential wave functions, and
//! verification routines for the structural theorems obeyed by the spectrum
//! (ground-state simplicity, interlacing under well removal, spectral
//! monotonicity in the energy, and the strength-scaled matrix equivalence).

pub mod eigen;
pub mod error;
pub mod lambert;
pub mod model;
pub mod phimatrix;
pub mod spectrum;
pub mod theorems;
pub mod wavefunction;

pub use error::{Error, Result};
pub use model::{DeltaSystem, Energy, Kappa, PhysicalConstants};
