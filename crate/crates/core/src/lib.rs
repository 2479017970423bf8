//! Bound states of the pseudoharmonic diatomic potential
//! V(r) = V0 (r/r0 - r0/r)^2.
//!
//! The potential is exactly solvable for every angular momentum: after the
//! substitution s = r^2 the radial Schrödinger equation becomes an equation
//! of hypergeometric type, and the Nikiforov-Uvarov reduction yields the
//! spectrum and normalized radial wavefunctions in closed form.
//!
//! Module map:
//! - [`units`]: the (eV, Å, amu) unit system and the two physical constants
//!   everything is assembled from.
//! - [`nu`]: the generic Nikiforov-Uvarov reduction for sigma of degree <= 1.
//! - [`special`]: associated Laguerre polynomials with real order, log-gamma,
//!   and mapped Gauss-Legendre quadrature on (0, inf).
//! - [`model`]: the pseudoharmonic instantiation — closed-form energies,
//!   normalized wavefunctions, and the NU assembly they are checked against.
//! - [`oracle`]: independent finite-difference and Numerov eigensolvers used
//!   to cross-validate the closed form.
//! - [`molecules`]: parameter registry, parameter-file parsing, and
//!   back-fitting of (V0, r0) from observed levels.
//! - [`cli`]: the `phspec` command surface.

pub mod cli;
pub mod model;
pub mod molecules;
pub mod nu;
pub mod oracle;
pub mod special;
pub mod units;
