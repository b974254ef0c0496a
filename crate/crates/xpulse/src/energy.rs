//! Total field energy: closed forms, pointwise densities, and an independent
//! volume-quadrature cross-check.
//!
//! Writing `M_p = ∫ |B(k)|² k^p dk`, the energy carried by the pulse is
//!
//! ```text
//!     scalar:          E = 8π T M₁ / (sin²η cos η)
//!     electromagnetic: E = 4π T M₃ / cos η
//! ```
//!
//! both finite, with exact equipartition between the time-derivative and
//! gradient parts (scalar) and between the electric and magnetic parts.
//! The numeric cross-check integrates the density over the support slab on a
//! fixed time hyperplane with composite Gauss panels tuned to the known
//! oscillation scales, truncating the radial integral at `rho_max` and
//! averaging the last eight partial sums (spaced half a density oscillation
//! apart) to cancel the oscillatory part of the truncation tail.

use crate::numerics::{
    panel_grid, spectral_integral, spectrum_moment, BesselOrder, QuadratureSettings, RadialKernel,
};
use crate::pulse::AxiconGeometry;
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

/// Controls for the volume-quadrature energy cross-check.
#[derive(Clone, Copy, Debug)]
pub struct EnergyOptions {
    /// Time hyperplane on which to integrate (default `2T`); the result must
    /// not depend on it.
    pub time: Option<f64>,
    /// Radial truncation (default `200 / (k_max sin η)`).
    pub rho_max: Option<f64>,
    /// Maximum tolerated truncation-tail estimate relative to the result.
    pub tail_limit: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions { time: None, rho_max: None, tail_limit: 0.05 }
    }
}

/// Scalar energy from the closed form `8π T M₁ / (sin²η cos η)`.
pub fn scalar_energy_analytic(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let m1 = spectrum_moment(spectrum, 1, settings)?;
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    Ok(8.0 * PI * geometry.t_window() * m1 / (s * s * c))
}

/// Electromagnetic energy from the closed form `4π T M₃ / cos η`.
pub fn em_energy_analytic(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let m3 = spectrum_moment(spectrum, 3, settings)?;
    Ok(4.0 * PI * geometry.t_window() * m3 / geometry.cos_eta())
}

/// Scalar energy density `|∂tΦ|² + |∇Φ|²` at a point (zero outside the slab).
pub fn scalar_energy_density(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    point: &crate::pulse::CylPoint,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !crate::pulse::in_support(geometry, point) {
        return Ok(0.0);
    }
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    let a = point.rho * s;
    let zeta = crate::pulse::phase(geometry, point);
    let i01 = spectral_integral(spectrum, BesselOrder::Zero, 1, a, zeta, settings)?;
    let i11 = spectral_integral(spectrum, BesselOrder::One, 1, a, zeta, settings)?;
    Ok((1.0 + c * c) * i01.norm_sqr() + s * s * i11.norm_sqr())
}

/// Electromagnetic energy density `(|E|² + |B|²)/2` at a point.
pub fn em_energy_density(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    point: &crate::pulse::CylPoint,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !crate::pulse::in_support(geometry, point) {
        return Ok(0.0);
    }
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    let a = point.rho * s;
    let zeta = crate::pulse::phase(geometry, point);
    let i12 = spectral_integral(spectrum, BesselOrder::One, 2, a, zeta, settings)?;
    let i02 = spectral_integral(spectrum, BesselOrder::Zero, 2, a, zeta, settings)?;
    Ok(0.5 * s * s * ((1.0 + c * c) * i12.norm_sqr() + s * s * i02.norm_sqr()))
}

/// Outcome of the scalar volume cross-check.
#[derive(Clone, Copy, Debug)]
pub struct ScalarEnergyReport {
    pub analytic: f64,
    pub numeric: f64,
    /// Half-spread of the last eight radial partial sums.
    pub numeric_error_estimate: f64,
    pub relative_gap: f64,
    pub rho_max: f64,
    pub time: f64,
    /// Volume integral of `|∂tΦ|²`.
    pub kinetic: f64,
    /// Volume integral of `|∇Φ|²`; equals `kinetic` for the exact pulse.
    pub gradient: f64,
}

/// Outcome of the electromagnetic volume cross-check.
#[derive(Clone, Copy, Debug)]
pub struct EmEnergyReport {
    pub analytic: f64,
    pub numeric: f64,
    pub numeric_error_estimate: f64,
    pub relative_gap: f64,
    pub rho_max: f64,
    pub time: f64,
    /// Volume integral of `|E|²/2`.
    pub electric: f64,
    /// Volume integral of `|B|²/2`; equals `electric` for the exact pulse.
    pub magnetic: f64,
}

/// Shared slab sweep: integrates two density parts over the support slab on
/// the hyperplane `t = time`, returning per-radial-panel cumulative sums of
/// each part.  `density` maps the pair of spectral integrals at a node to the
/// two parts (already including all angular/geometry prefactors except the
/// cylindrical measure `2πρ`).
fn slab_sweep(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    power: i32,
    time: f64,
    rho_max: f64,
    density: impl Fn(Complex, Complex) -> (f64, f64) + Sync,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    let t_win = geometry.t_window();
    let k_max = spectrum.max_k();

    let z_lo = (time - t_win) / c;
    let z_hi = (time + t_win) / c;
    let z_cap = ((z_hi - z_lo) / 4.0).min(FRAC_PI_2 / (k_max * c));
    let z_nodes = panel_grid(z_lo, z_hi, z_cap);

    let rho_cap = FRAC_PI_2 / (k_max * s);
    let rho_nodes = panel_grid(0.0, rho_max, rho_cap);
    let panels = rho_nodes.len() / 8;
    if panels < 8 {
        return Err(Error::Domain(format!(
            "rho_max = {rho_max} spans only {panels} radial panels; at least 8 are needed \
             for the truncation-tail estimate"
        )));
    }

    let per_panel: Vec<(f64, f64)> = rho_nodes
        .par_chunks(8)
        .map(|chunk| {
            let mut p_a = 0.0;
            let mut p_b = 0.0;
            for &(rho, w_rho) in chunk {
                let kernel = RadialKernel::build(spectrum, rho * s, power, t_win);
                for &(z, w_z) in &z_nodes {
                    let zeta = time - c * z;
                    let (f0, f1) = kernel.eval(zeta);
                    let (da, db) = density(f0, f1);
                    let w = 2.0 * PI * rho * w_rho * w_z;
                    p_a += w * da;
                    p_b += w * db;
                }
            }
            (p_a, p_b)
        })
        .collect();

    let mut cum_a = Vec::with_capacity(panels);
    let mut cum_b = Vec::with_capacity(panels);
    let mut acc_a = 0.0;
    let mut acc_b = 0.0;
    for (pa, pb) in per_panel {
        acc_a += pa;
        acc_b += pb;
        cum_a.push(acc_a);
        cum_b.push(acc_b);
    }
    Ok((cum_a, cum_b))
}

/// Mean and half-spread of the last eight cumulative sums.
fn tail_average(cumulative: &[f64]) -> (f64, f64) {
    let tail = &cumulative[cumulative.len() - 8..];
    let mean = tail.iter().sum::<f64>() / 8.0;
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    (mean, 0.5 * (max - min))
}

fn resolve_options(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    options: &EnergyOptions,
) -> Result<(f64, f64)> {
    let time = options.time.unwrap_or(2.0 * geometry.t_window());
    if !time.is_finite() {
        return Err(Error::NonFinite("energy hyperplane time"));
    }
    let rho_max = options
        .rho_max
        .unwrap_or(200.0 / (spectrum.max_k() * geometry.sin_eta()));
    if !(rho_max.is_finite() && rho_max > 0.0) {
        return Err(Error::Domain(format!("rho_max must be positive, got {rho_max}")));
    }
    if !(options.tail_limit > 0.0 && options.tail_limit <= 1.0) {
        return Err(Error::Domain(format!(
            "tail limit must lie in (0, 1], got {}",
            options.tail_limit
        )));
    }
    Ok((time, rho_max))
}

fn relative_gap(numeric: f64, analytic: f64) -> f64 {
    if analytic == 0.0 {
        numeric.abs()
    } else {
        (numeric - analytic).abs() / analytic.abs()
    }
}

/// Volume cross-check of the scalar energy, split into its time-derivative
/// and gradient parts.
///
/// # Errors
/// Returns a tail-divergence error when the truncation-tail estimate exceeds
/// `options.tail_limit` of the result.
pub fn scalar_energy(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    options: &EnergyOptions,
    settings: &QuadratureSettings,
) -> Result<ScalarEnergyReport> {
    let (time, rho_max) = resolve_options(geometry, spectrum, options)?;
    let analytic = scalar_energy_analytic(geometry, spectrum, settings)?;
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();

    let (cum_kin, cum_grad) = slab_sweep(geometry, spectrum, 1, time, rho_max, |f0, f1| {
        let kin = f0.norm_sqr();
        let grad = c * c * f0.norm_sqr() + s * s * f1.norm_sqr();
        (kin, grad)
    })?;

    let (kinetic, err_kin) = tail_average(&cum_kin);
    let (gradient, err_grad) = tail_average(&cum_grad);
    let numeric = kinetic + gradient;
    let err = err_kin + err_grad;
    if err > options.tail_limit * numeric.abs() && numeric != 0.0 {
        return Err(Error::TailDivergence { estimate: numeric, tail: err });
    }
    Ok(ScalarEnergyReport {
        analytic,
        numeric,
        numeric_error_estimate: err,
        relative_gap: relative_gap(numeric, analytic),
        rho_max,
        time,
        kinetic,
        gradient,
    })
}

/// Volume cross-check of the electromagnetic energy, split into its electric
/// and magnetic parts.
pub fn em_energy(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    options: &EnergyOptions,
    settings: &QuadratureSettings,
) -> Result<EmEnergyReport> {
    let (time, rho_max) = resolve_options(geometry, spectrum, options)?;
    let analytic = em_energy_analytic(geometry, spectrum, settings)?;
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();

    let (cum_e, cum_b) = slab_sweep(geometry, spectrum, 2, time, rho_max, |f0, f1| {
        let electric = 0.5 * s * s * f1.norm_sqr();
        let magnetic = 0.5 * (s * s * c * c * f1.norm_sqr() + s.powi(4) * f0.norm_sqr());
        (electric, magnetic)
    })?;

    let (electric, err_e) = tail_average(&cum_e);
    let (magnetic, err_b) = tail_average(&cum_b);
    let numeric = electric + magnetic;
    let err = err_e + err_b;
    if err > options.tail_limit * numeric.abs() && numeric != 0.0 {
        return Err(Error::TailDivergence { estimate: numeric, tail: err });
    }
    Ok(EmEnergyReport {
        analytic,
        numeric,
        numeric_error_estimate: err,
        relative_gap: relative_gap(numeric, analytic),
        rho_max,
        time,
        electric,
        magnetic,
    })
}
