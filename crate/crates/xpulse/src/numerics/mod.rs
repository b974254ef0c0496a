//! Core numerical kernels: Bessel functions and oscillatory quadrature.
//!
//! Everything downstream — field evaluation, energies, residual checks —
//! reduces to integrals of the form
//!
//! ```text
//!     ∫ B(k) k^p J_n(k a) e^{-i k ζ} dk
//! ```
//!
//! over the support of a one-sided spectrum `B`.  This module provides the
//! `J0`/`J1` evaluations and an adaptive panel-based Gauss-Legendre scheme
//! whose panel width tracks the shortest local oscillation period, so each
//! panel sees less than a quarter oscillation of the integrand.

mod bessel;
mod quad;

pub use bessel::{bessel_j0, bessel_j1};
pub use quad::{spectral_integral, spectrum_moment, BesselOrder, QuadratureSettings};
pub(crate) use quad::{panel_grid, RadialKernel};

#[cfg(test)]
pub(crate) mod dd;
