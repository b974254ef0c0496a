//! Numerical laboratory for localized wave pulses with superluminal peak
//! kinematics.
//!
//! The objects of study are axisymmetric superpositions of Bessel modes
//! `J0(k rho sin eta) e^{-ik(t - z cos eta)}`, weighted by a spectral profile
//! `B(k)` and cut off outside a finite window of the co-moving phase
//! `zeta = t - z cos eta`.  Such a pulse translates rigidly along `z` at the
//! speed `1/cos eta > 1` (units with the wavefront speed equal to one), yet
//! carries finite energy and respects front causality — the properties this
//! crate measures rather than assumes.
//!
//! Module map:
//!
//! - [`spectrum`]: spectral profiles `B(k)` (rectangular, truncated Gaussian,
//!   tabulated) and their moments.
//! - [`numerics`]: Bessel functions `J0`/`J1` and the adaptive oscillatory
//!   quadrature behind every field evaluation.
//! - [`pulse`]: the scalar pulse — closed-form field values, geometry
//!   ([`AxiconGeometry`]), plane boundary data, peak tracking and support
//!   measurement.
//! - [`fields`]: the electromagnetic realization via an axial Hertz
//!   potential: all six cylindrical field components.
//! - [`energy`]: spectral closed forms of the total energy against brute
//!   3-D quadrature, with split kinetic/gradient and electric/magnetic parts.
//! - [`frames`]: Lorentz boosts along the axis; the co-moving frame where
//!   the pulse is static and axially uniform, and the energy-divergence
//!   witness that rules out a rest frame with finite total energy.
//! - [`verify`]: finite-difference residuals of the wave and Maxwell
//!   equations on closed-form samples, convergence orders, strict support
//!   checks.
//! - [`slice`]: regular two-dimensional field slices with round-trip CSV
//!   serialization.
//! - [`fdtd`]: an independent axisymmetric leapfrog simulator driven by a
//!   finite aperture (luminal fronts, superluminal peaks) or by compactly
//!   supported Cauchy data (light-cone confinement).
//!
//! Everything is deterministic: identical inputs produce bit-identical
//! outputs regardless of thread count.

// Coefficient tables and reference values are transcribed at their source
// precision even where f64 rounds the trailing digits away.
#![allow(clippy::excessive_precision)]

mod error;
pub mod energy;
pub mod fdtd;
pub mod fields;
pub mod frames;
pub mod numerics;
pub mod pulse;
pub mod slice;
pub mod spectrum;
pub mod verify;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
pub type Complex = num_complex::Complex64;

pub use fdtd::{DetectorTrace, DriveMode, SimConfig, SimOutcome};
pub use fields::EmSample;
pub use frames::BoostFrame;
pub use numerics::{bessel_j0, bessel_j1, spectral_integral, spectrum_moment, QuadratureSettings};
pub use pulse::{AxiconGeometry, CylPoint};
pub use slice::{AxisGrid, EmFieldSlice, FieldSlice, SlicePlan};
pub use spectrum::Spectrum;
