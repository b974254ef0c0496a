//! Independent verification that the closed-form fields actually solve the
//! field equations.
//!
//! Rather than trusting the derivation, these scans apply second-order
//! central differences to the evaluated fields and measure the residuals of
//! the wave operator and of the curl/divergence equations.  For an exact
//! solution the interior residual is pure truncation error and must shrink
//! as `h²` when the stencil is refined; outside the support slab every
//! stencil sample is exactly zero, so the residual must vanish identically,
//! and the only non-smooth places are the two front planes, which the scans
//! skip with a collar of width `4h` in the phase coordinate.

use crate::fields::em_field;
use crate::numerics::{spectral_integral, BesselOrder, QuadratureSettings};
use crate::pulse::{phase, scalar_field, AxiconGeometry, CylPoint};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};
use rayon::prelude::*;

/// Rectangular scan region on a fixed time hyperplane.
#[derive(Clone, Copy, Debug)]
pub struct RegionSpec {
    pub t: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_samples: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub z_samples: usize,
}

impl RegionSpec {
    fn validate(&self, h: f64) -> Result<()> {
        if !(self.t.is_finite()
            && self.rho_min.is_finite()
            && self.rho_max.is_finite()
            && self.z_min.is_finite()
            && self.z_max.is_finite())
        {
            return Err(Error::NonFinite("scan region bound"));
        }
        if self.rho_min < 0.0 || self.rho_max < self.rho_min || self.z_max <= self.z_min {
            return Err(Error::Domain(format!("degenerate scan region {self:?}")));
        }
        if self.rho_samples < 2 || self.z_samples < 2 {
            return Err(Error::Domain("scan region needs at least 2 samples per axis".into()));
        }
        for i in 0..self.rho_samples {
            let rho = self.rho(i);
            if rho != 0.0 && rho < h {
                return Err(Error::Domain(format!(
                    "radial node {rho} sits between the axis and the stencil spacing {h}"
                )));
            }
        }
        Ok(())
    }

    fn rho(&self, i: usize) -> f64 {
        if self.rho_samples == 1 {
            return self.rho_min;
        }
        self.rho_min + (self.rho_max - self.rho_min) * i as f64 / (self.rho_samples - 1) as f64
    }

    fn z(&self, j: usize) -> f64 {
        self.z_min + (self.z_max - self.z_min) * j as f64 / (self.z_samples - 1) as f64
    }
}

/// Residual statistics of one operator at one stencil spacing.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub operator: &'static str,
    pub h: f64,
    /// Largest interior residual magnitude.
    pub max_abs: f64,
    /// Root-mean-square interior residual magnitude.
    pub rms: f64,
    pub interior_samples: usize,
    /// Largest residual magnitude outside the slab — exactly zero for these
    /// fields, since every stencil sample vanishes there.
    pub exterior_max: f64,
    pub exterior_samples: usize,
}

/// Observed convergence order between two spacings of the same scan
/// (`None` when either residual is identically zero, where no order is
/// defined).
pub fn convergence_order(coarse: &ResidualReport, fine: &ResidualReport) -> Option<f64> {
    if coarse.rms == 0.0 || fine.rms == 0.0 {
        return None;
    }
    Some((coarse.rms / fine.rms).log2() / (coarse.h / fine.h).log2())
}

enum Zone {
    Interior,
    Exterior,
    Collar,
}

fn classify(geometry: &AxiconGeometry, zeta: f64, h: f64) -> Zone {
    let margin = 4.0 * h;
    if zeta.abs() < geometry.t_window() - margin {
        Zone::Interior
    } else if zeta.abs() > geometry.t_window() + margin {
        Zone::Exterior
    } else {
        Zone::Collar
    }
}

fn gather(
    operator: &'static str,
    h: f64,
    samples: Vec<(Zone, f64)>,
) -> ResidualReport {
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut interior = 0usize;
    let mut exterior_max = 0.0f64;
    let mut exterior = 0usize;
    for (zone, r) in samples {
        match zone {
            Zone::Interior => {
                interior += 1;
                max_abs = max_abs.max(r);
                sum_sq += r * r;
            }
            Zone::Exterior => {
                exterior += 1;
                exterior_max = exterior_max.max(r);
            }
            Zone::Collar => {}
        }
    }
    let rms = if interior > 0 { (sum_sq / interior as f64).sqrt() } else { 0.0 };
    ResidualReport { operator, h, max_abs, rms, interior_samples: interior, exterior_max, exterior_samples: exterior }
}

/// Residual of the wave operator `∂tt - ∂ρρ - ρ⁻¹∂ρ - ∂zz` applied to the
/// scalar field with central differences of spacing `h`.  On the axis the
/// transverse part degenerates to `2∂ρρ` by evenness.
pub fn wave_residual(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    region: &RegionSpec,
    h: f64,
    settings: &QuadratureSettings,
) -> Result<ResidualReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("stencil spacing must be positive, got {h}")));
    }
    region.validate(h)?;
    let nodes: Vec<(f64, f64)> = (0..region.rho_samples)
        .flat_map(|i| (0..region.z_samples).map(move |j| (i, j)))
        .map(|(i, j)| (region.rho(i), region.z(j)))
        .collect();

    let samples: Vec<(Zone, f64)> = nodes
        .par_iter()
        .map(|&(rho, z)| -> Result<(Zone, f64)> {
            let t = region.t;
            let zone = classify(geometry, phase(geometry, &CylPoint::new(t, rho, z)), h);
            if matches!(zone, Zone::Collar) {
                return Ok((zone, 0.0));
            }
            let phi = |t: f64, rho: f64, z: f64| -> Result<Complex> {
                scalar_field(geometry, spectrum, &CylPoint::new(t, rho, z), settings)
            };
            let center = phi(t, rho, z)?;
            let d_tt = (phi(t + h, rho, z)? - 2.0 * center + phi(t - h, rho, z)?) / (h * h);
            let d_zz = (phi(t, rho, z + h)? - 2.0 * center + phi(t, rho, z - h)?) / (h * h);
            let transverse = if rho == 0.0 {
                4.0 * (phi(t, h, z)? - center) / (h * h)
            } else {
                let plus = phi(t, rho + h, z)?;
                let minus = phi(t, rho - h, z)?;
                (plus - 2.0 * center + minus) / (h * h) + (plus - minus) / (2.0 * h * rho)
            };
            Ok((zone, (d_tt - transverse - d_zz).norm()))
        })
        .collect::<Result<_>>()?;

    Ok(gather("wave", h, samples))
}

/// Residuals of the four nontrivial field equations (divergence of B, the
/// two curl-E components, the curl-B component) plus the divergence of E,
/// which vanishes identically because the electric field is azimuthal and
/// nothing depends on the azimuth.
pub fn maxwell_residuals(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    region: &RegionSpec,
    h: f64,
    settings: &QuadratureSettings,
) -> Result<Vec<ResidualReport>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("stencil spacing must be positive, got {h}")));
    }
    region.validate(h)?;
    let nodes: Vec<(f64, f64)> = (0..region.rho_samples)
        .flat_map(|i| (0..region.z_samples).map(move |j| (i, j)))
        .map(|(i, j)| (region.rho(i), region.z(j)))
        .collect();

    // residual magnitudes per node: (div_B, faraday_rho, faraday_z, ampere_theta)
    let samples: Vec<(Zone, [f64; 4])> = nodes
        .par_iter()
        .map(|&(rho, z)| -> Result<(Zone, [f64; 4])> {
            let t = region.t;
            let zone = classify(geometry, phase(geometry, &CylPoint::new(t, rho, z)), h);
            if matches!(zone, Zone::Collar) {
                return Ok((zone, [0.0; 4]));
            }
            let em = |t: f64, rho: f64, z: f64| -> Result<crate::fields::EmSample> {
                em_field(geometry, spectrum, &CylPoint::new(t, rho, z), settings)
            };
            let t_plus = em(t + h, rho, z)?;
            let t_minus = em(t - h, rho, z)?;
            let z_plus = em(t, rho, z + h)?;
            let z_minus = em(t, rho, z - h)?;

            let dt_b_rho = (t_plus.b_rho - t_minus.b_rho) / (2.0 * h);
            let dt_b_z = (t_plus.b_z - t_minus.b_z) / (2.0 * h);
            let dt_e_theta = (t_plus.e_theta - t_minus.e_theta) / (2.0 * h);
            let dz_e_theta = (z_plus.e_theta - z_minus.e_theta) / (2.0 * h);
            let dz_b_rho = (z_plus.b_rho - z_minus.b_rho) / (2.0 * h);
            let dz_b_z = (z_plus.b_z - z_minus.b_z) / (2.0 * h);

            // radial derivatives, folding in the axis symmetries
            // (E_θ and B_ρ odd in ρ, B_z even)
            let (div_rho_b, curl_rho_e, d_rho_b_z) = if rho == 0.0 {
                let r_plus = em(t, h, z)?;
                (2.0 * r_plus.b_rho / h, 2.0 * r_plus.e_theta / h, Complex::new(0.0, 0.0))
            } else {
                let r_plus = em(t, rho + h, z)?;
                let r_minus = em(t, rho - h, z)?;
                (
                    ((rho + h) * r_plus.b_rho - (rho - h) * r_minus.b_rho) / (2.0 * h * rho),
                    ((rho + h) * r_plus.e_theta - (rho - h) * r_minus.e_theta) / (2.0 * h * rho),
                    (r_plus.b_z - r_minus.b_z) / (2.0 * h),
                )
            };

            let div_b = div_rho_b + dz_b_z;
            let faraday_rho = dt_b_rho - dz_e_theta;
            let faraday_z = dt_b_z + curl_rho_e;
            let ampere_theta = dt_e_theta - dz_b_rho + d_rho_b_z;
            Ok((zone, [div_b.norm(), faraday_rho.norm(), faraday_z.norm(), ampere_theta.norm()]))
        })
        .collect::<Result<_>>()?;

    let names = ["div_B", "faraday_rho", "faraday_z", "ampere_theta"];
    let mut reports = Vec::with_capacity(5);
    for (idx, name) in names.iter().enumerate() {
        let per_op: Vec<(Zone, f64)> = samples
            .iter()
            .map(|(zone, r)| {
                let z = match zone {
                    Zone::Interior => Zone::Interior,
                    Zone::Exterior => Zone::Exterior,
                    Zone::Collar => Zone::Collar,
                };
                (z, r[idx])
            })
            .collect();
        reports.push(gather(name, h, per_op));
    }
    // div E = ρ⁻¹ ∂θ E_θ: identically zero for an axisymmetric azimuthal field.
    let interior = reports[0].interior_samples;
    let exterior = reports[0].exterior_samples;
    reports.push(ResidualReport {
        operator: "div_E",
        h,
        max_abs: 0.0,
        rms: 0.0,
        interior_samples: interior,
        exterior_max: 0.0,
        exterior_samples: exterior,
    });
    Ok(reports)
}

/// Support geometry check along the axis direction at fixed `t`.
#[derive(Clone, Copy, Debug)]
pub struct SupportReport {
    /// Largest |Φ| sampled outside the slab — exactly zero by construction.
    pub exterior_max: f64,
    pub exterior_samples: usize,
    /// Largest |Φ| sampled inside.
    pub interior_max: f64,
    /// Magnitude of the on-axis limit of Φ on the front plane from inside:
    /// the field jumps by this amount across the front.
    pub front_jump: f64,
}

/// Verify that the field is exactly zero outside the support slab and
/// measure the discontinuity it carries on the front planes.
pub fn support_check(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t: f64,
    settings: &QuadratureSettings,
) -> Result<SupportReport> {
    let c = geometry.cos_eta();
    let s = geometry.sin_eta();
    let z_lo = (t - geometry.t_window()) / c - 1.0;
    let z_hi = (t + geometry.t_window()) / c + 1.0;
    let mut exterior_max = 0.0f64;
    let mut exterior = 0usize;
    let mut interior_max = 0.0f64;
    let n = 240usize;
    for &rho in &[0.0, 1.0 / s, 3.0 / s] {
        for j in 0..=n {
            let z = z_lo + (z_hi - z_lo) * j as f64 / n as f64;
            let point = CylPoint::new(t, rho, z);
            let v = scalar_field(geometry, spectrum, &point, settings)?.norm();
            if crate::pulse::in_support(geometry, &point) {
                interior_max = interior_max.max(v);
            } else {
                exterior += 1;
                exterior_max = exterior_max.max(v);
            }
        }
    }
    // limit of the spectral integral on the front, evaluated directly
    let front_jump =
        spectral_integral(spectrum, BesselOrder::Zero, 0, 0.0, geometry.t_window(), settings)?
            .norm();
    Ok(SupportReport { exterior_max, exterior_samples: exterior, interior_max, front_jump })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn quarter() -> AxiconGeometry {
        AxiconGeometry::new(FRAC_PI_4, 1.0).unwrap()
    }

    fn rect1() -> Spectrum {
        Spectrum::rectangular(1.0).unwrap()
    }

    fn q() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    fn interior_region() -> RegionSpec {
        RegionSpec {
            t: 0.0,
            rho_min: 0.0,
            rho_max: 1.2,
            rho_samples: 7,
            z_min: -0.8,
            z_max: 0.8,
            z_samples: 9,
        }
    }

    fn wide_region() -> RegionSpec {
        RegionSpec {
            t: 0.0,
            rho_min: 0.0,
            rho_max: 1.2,
            rho_samples: 4,
            z_min: -3.2,
            z_max: 3.2,
            z_samples: 17,
        }
    }

    #[test]
    fn wave_residual_shrinks_at_second_order() {
        let coarse = wave_residual(&quarter(), &rect1(), &interior_region(), 0.02, &q()).unwrap();
        let fine = wave_residual(&quarter(), &rect1(), &interior_region(), 0.01, &q()).unwrap();
        assert!(coarse.interior_samples > 0);
        assert!(coarse.max_abs > 0.0, "residual should be nonzero truncation error");
        let order = convergence_order(&coarse, &fine).unwrap();
        assert!((1.7..=2.3).contains(&order), "wave operator order {order}");
    }

    #[test]
    fn wave_residual_is_exactly_zero_outside() {
        let report = wave_residual(&quarter(), &rect1(), &wide_region(), 0.02, &q()).unwrap();
        assert!(report.exterior_samples > 0);
        assert_eq!(report.exterior_max, 0.0);
    }

    #[test]
    fn field_equation_residuals_shrink_at_second_order() {
        let coarse = maxwell_residuals(&quarter(), &rect1(), &interior_region(), 0.02, &q()).unwrap();
        let fine = maxwell_residuals(&quarter(), &rect1(), &interior_region(), 0.01, &q()).unwrap();
        assert_eq!(coarse.len(), 5);
        for (c, f) in coarse.iter().zip(fine.iter()).take(4) {
            let order = convergence_order(c, f)
                .unwrap_or_else(|| panic!("{} residual unexpectedly zero", c.operator));
            assert!((1.7..=2.3).contains(&order), "{} order {order}", c.operator);
        }
        // the azimuthal-divergence residual is identically zero and has no order
        assert_eq!(coarse[4].operator, "div_E");
        assert_eq!(coarse[4].max_abs, 0.0);
        assert!(convergence_order(&coarse[4], &fine[4]).is_none());
    }

    #[test]
    fn support_is_sharp_with_a_front_jump() {
        let report = support_check(&quarter(), &rect1(), 0.5, &q()).unwrap();
        assert!(report.exterior_samples > 0);
        assert_eq!(report.exterior_max, 0.0);
        assert!(report.interior_max > 0.1);
        // |∫₀¹ e^{-ik} dk| = 2 sin(1/2)
        let expected = 2.0 * (0.5f64).sin();
        assert!((report.front_jump - expected).abs() < 1e-9);
    }

    #[test]
    fn scan_validation() {
        let mut region = interior_region();
        assert!(wave_residual(&quarter(), &rect1(), &region, 0.0, &q()).is_err());
        region.rho_min = 0.005;
        region.rho_max = 0.006;
        // radial nodes fall strictly between the axis and one stencil step
        assert!(wave_residual(&quarter(), &rect1(), &region, 0.02, &q()).is_err());
    }
}
