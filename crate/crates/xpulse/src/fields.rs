//! Electromagnetic field of the pulse.
//!
//! Using the scalar profile `Φ` as the magnitude of a z-directed Hertz-type
//! potential, the only nonzero cylindrical components are
//!
//! ```text
//!     E_θ = ∂t ∂ρ Φ          =  i sin η        ∫ B k² J1(kρ sin η) e^{-ikζ} dk
//!     B_ρ = ∂z ∂ρ Φ          = -i sin η cos η  ∫ B k² J1(kρ sin η) e^{-ikζ} dk
//!     B_z = -(∂ρρ + ρ⁻¹∂ρ) Φ =    sin²η        ∫ B k² J0(kρ sin η) e^{-ikζ} dk
//! ```
//!
//! so the pointwise proportionality `B_ρ = -cos η · E_θ` holds everywhere.
//! [`em_field`] evaluates the closed forms; [`em_from_hertz`] instead applies
//! second-order finite differences to the scalar field and converges to the
//! closed forms at O(h²), which cross-checks the derivative bookkeeping.

use crate::numerics::{spectral_integral, BesselOrder, QuadratureSettings};
use crate::pulse::{in_support, phase, scalar_field, AxiconGeometry, CylPoint};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};

/// The three nonzero cylindrical field components at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmSample {
    pub e_theta: Complex,
    pub b_rho: Complex,
    pub b_z: Complex,
}

impl EmSample {
    pub const ZERO: EmSample = EmSample {
        e_theta: Complex::new(0.0, 0.0),
        b_rho: Complex::new(0.0, 0.0),
        b_z: Complex::new(0.0, 0.0),
    };
}

/// Closed-form electromagnetic components; exactly zero outside the slab.
pub fn em_field(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    point: &CylPoint,
    settings: &QuadratureSettings,
) -> Result<EmSample> {
    if !point.rho.is_finite() || point.rho < 0.0 {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {}", point.rho)));
    }
    if !in_support(geometry, point) {
        return Ok(EmSample::ZERO);
    }
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    let a = point.rho * s;
    let zeta = phase(geometry, point);
    let i12 = spectral_integral(spectrum, BesselOrder::One, 2, a, zeta, settings)?;
    let i02 = spectral_integral(spectrum, BesselOrder::Zero, 2, a, zeta, settings)?;
    Ok(EmSample {
        e_theta: Complex::new(0.0, s) * i12,
        b_rho: Complex::new(0.0, -s * c) * i12,
        b_z: s * s * i02,
    })
}

/// Electromagnetic components by second-order central differences of the
/// scalar potential with stencil spacing `h`.
///
/// The full stencil must stay strictly inside the support slab (a collar of
/// width `h(1 + cos η)` in `ζ` around the fronts is rejected) and away from
/// the axis unless the point is exactly on it, where the odd components
/// vanish by symmetry and `B_z = -2 ∂ρρ Φ`.
pub fn em_from_hertz(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    point: &CylPoint,
    h: f64,
    settings: &QuadratureSettings,
) -> Result<EmSample> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("stencil spacing must be positive, got {h}")));
    }
    if !point.rho.is_finite() || point.rho < 0.0 {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {}", point.rho)));
    }
    if !in_support(geometry, point) {
        return Ok(EmSample::ZERO);
    }
    let c = geometry.cos_eta();
    let zeta = phase(geometry, point);
    if zeta.abs() + h * (1.0 + c) >= geometry.t_window() {
        return Err(Error::Domain(format!(
            "stencil at zeta = {zeta} with h = {h} reaches across the support front"
        )));
    }
    if point.rho > 0.0 && point.rho < h {
        return Err(Error::Domain(format!(
            "stencil at rho = {} with h = {h} crosses the axis; sample on the axis or beyond h",
            point.rho
        )));
    }

    let phi = |t: f64, rho: f64, z: f64| -> Result<Complex> {
        scalar_field(geometry, spectrum, &CylPoint::new(t, rho, z), settings)
    };
    let (t, rho, z) = (point.t, point.rho, point.z);

    if rho == 0.0 {
        // Φ is even in ρ: mixed ∂ρ derivatives vanish and the transverse
        // Laplacian degenerates to 2 ∂ρρ.
        let d_rr = 2.0 * (phi(t, h, z)? - phi(t, 0.0, z)?) / (h * h);
        return Ok(EmSample {
            e_theta: Complex::new(0.0, 0.0),
            b_rho: Complex::new(0.0, 0.0),
            b_z: -2.0 * d_rr,
        });
    }

    let pp = phi(t + h, rho + h, z)?;
    let pm = phi(t + h, rho - h, z)?;
    let mp = phi(t - h, rho + h, z)?;
    let mm = phi(t - h, rho - h, z)?;
    let e_theta = (pp - pm - mp + mm) / (4.0 * h * h);

    let zp_rp = phi(t, rho + h, z + h)?;
    let zp_rm = phi(t, rho - h, z + h)?;
    let zm_rp = phi(t, rho + h, z - h)?;
    let zm_rm = phi(t, rho - h, z - h)?;
    let b_rho = (zp_rp - zp_rm - zm_rp + zm_rm) / (4.0 * h * h);

    let center = phi(t, rho, z)?;
    let plus = phi(t, rho + h, z)?;
    let minus = phi(t, rho - h, z)?;
    let d_rr = (plus - 2.0 * center + minus) / (h * h);
    let d_r = (plus - minus) / (2.0 * h);
    let b_z = -(d_rr + d_r / rho);

    Ok(EmSample { e_theta, b_rho, b_z })
}
