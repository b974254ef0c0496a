//! The scalar pulse: geometry, support window, field values, aperture data
//! and peak kinematics.
//!
//! The pulse profile is
//!
//! ```text
//!     Φ(t, ρ, z) = ∫ B(k) J0(k ρ sin η) e^{-i k (t - z cos η)} dk    |ζ| < T
//!     Φ(t, ρ, z) = 0                                                |ζ| ≥ T
//! ```
//!
//! with `ζ = t - z cos η` the co-moving phase coordinate and `η ∈ (0, π/2)`
//! the cone (axicon) angle.  Each spectral component solves the wave equation
//! exactly, and the window `|ζ| < T` confines the pulse between two planar
//! fronts `z = (t ∓ T)/cos η` that advance with speed `1/cos η > 1` while
//! any individual front built from switching the aperture on can only expand
//! at speed one.  The intensity peak rides `ζ = 0`, i.e. `z = t/cos η`.

use crate::numerics::{spectral_integral, BesselOrder, QuadratureSettings};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};

/// Cone angle and window half-width defining a pulse family.
///
/// Invariants (enforced at construction): `0 < eta < π/2`, `t_window > 0`.
#[derive(Clone, Copy, Debug)]
pub struct AxiconGeometry {
    eta: f64,
    t_window: f64,
}

impl AxiconGeometry {
    pub fn new(eta: f64, t_window: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::NonFinite("axicon angle"));
        }
        if !t_window.is_finite() {
            return Err(Error::NonFinite("window half-width"));
        }
        if eta <= 0.0 || eta >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::Domain(format!(
                "axicon angle must lie strictly between 0 and π/2, got {eta}"
            )));
        }
        if t_window <= 0.0 {
            return Err(Error::Domain(format!("window half-width must be positive, got {t_window}")));
        }
        Ok(AxiconGeometry { eta, t_window })
    }

    /// Cone angle `η` in radians.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Half-width `T` of the support window in `ζ`.
    pub fn t_window(&self) -> f64 {
        self.t_window
    }

    pub fn cos_eta(&self) -> f64 {
        self.eta.cos()
    }

    pub fn sin_eta(&self) -> f64 {
        self.eta.sin()
    }

    /// Lorentz factor `1/sin η` of the canonical co-moving boost.
    pub fn gamma(&self) -> f64 {
        1.0 / self.eta.sin()
    }

    /// Speed `1/cos η` of the intensity peak (exceeds the wavefront speed 1).
    pub fn peak_speed(&self) -> f64 {
        1.0 / self.eta.cos()
    }

    /// Spatial thickness `2T/cos η` of the support slab along the axis.
    pub fn support_length(&self) -> f64 {
        2.0 * self.t_window / self.eta.cos()
    }
}

/// Spacetime sample point in cylindrical coordinates (`rho ≥ 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylPoint {
    pub t: f64,
    pub rho: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(t: f64, rho: f64, z: f64) -> Self {
        CylPoint { t, rho, z }
    }

    fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || !self.rho.is_finite() || !self.z.is_finite() {
            return Err(Error::NonFinite("field point coordinate"));
        }
        if self.rho < 0.0 {
            return Err(Error::Domain(format!("rho must be >= 0, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Co-moving phase coordinate `ζ = t - z cos η`.
pub fn phase(geometry: &AxiconGeometry, point: &CylPoint) -> f64 {
    point.t - point.z * geometry.cos_eta()
}

/// Whether the point lies strictly inside the support slab `|ζ| < T`.
/// Points on the fronts `|ζ| = T` count as outside (the field is zero there).
pub fn in_support(geometry: &AxiconGeometry, point: &CylPoint) -> bool {
    phase(geometry, point).abs() < geometry.t_window()
}

/// Scalar pulse amplitude `Φ(t, ρ, z)`.
///
/// Exactly zero (no quadrature) outside the support slab; inside it the
/// spectral integral is evaluated adaptively.
pub fn scalar_field(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    point: &CylPoint,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    point.validate()?;
    if !in_support(geometry, point) {
        return Ok(Complex::new(0.0, 0.0));
    }
    let zeta = phase(geometry, point);
    spectral_integral(
        spectrum,
        BesselOrder::Zero,
        0,
        point.rho * geometry.sin_eta(),
        zeta,
        settings,
    )
}

fn window(geometry: &AxiconGeometry, t: f64) -> bool {
    t.abs() < geometry.t_window()
}

/// Aperture trace `Φ(t, ρ, z = 0)`: the value a launching antenna on the
/// plane `z = 0` must impose.
pub fn boundary_value(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t: f64,
    rho: f64,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    let point = CylPoint::new(t, rho, 0.0);
    point.validate()?;
    if !window(geometry, t) {
        return Ok(Complex::new(0.0, 0.0));
    }
    spectral_integral(spectrum, BesselOrder::Zero, 0, rho * geometry.sin_eta(), t, settings)
}

/// Normal derivative `∂Φ/∂z` on the aperture plane `z = 0`:
/// `i cos η ∫ B(k) k J0(k ρ sin η) e^{-i k t} dk` inside the time window.
pub fn boundary_dz(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t: f64,
    rho: f64,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    let point = CylPoint::new(t, rho, 0.0);
    point.validate()?;
    if !window(geometry, t) {
        return Ok(Complex::new(0.0, 0.0));
    }
    let base = spectral_integral(spectrum, BesselOrder::Zero, 1, rho * geometry.sin_eta(), t, settings)?;
    Ok(Complex::new(0.0, geometry.cos_eta()) * base)
}

/// Result of a peak-tracking scan along the axis.
#[derive(Clone, Debug)]
pub struct PeakScan {
    /// The scan times (all beyond the window half-width).
    pub times: Vec<f64>,
    /// Refined axial peak position for each time.
    pub positions: Vec<f64>,
    /// Least-squares slope of position against time: the measured peak speed.
    pub speed: f64,
}

/// Track the on-axis intensity peak over `times` and fit its speed.
///
/// For each time the support interval of `z` is scanned on a grid of step
/// `(0.01/k_max)/cos η`, then the best sample is refined by golden-section
/// search.  The expected result is the peak speed `1/cos η`.
///
/// # Errors
/// Fewer than two times, non-increasing times, or times inside the window
/// are domain errors; an identically zero field along a scan is a no-peak
/// error.
pub fn peak_velocity(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    times: &[f64],
    settings: &QuadratureSettings,
) -> Result<PeakScan> {
    if times.len() < 2 {
        return Err(Error::Domain("peak fit needs at least two scan times".into()));
    }
    for pair in times.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Domain("peak scan times must increase strictly".into()));
        }
    }
    if times[0] <= geometry.t_window() {
        return Err(Error::Domain(format!(
            "peak scan times must exceed the window half-width {}",
            geometry.t_window()
        )));
    }

    let c = geometry.cos_eta();
    let step = (0.01 / spectrum.max_k()) / c;
    let mut positions = Vec::with_capacity(times.len());
    for &t in times {
        let z_lo = (t - geometry.t_window()) / c;
        let z_hi = (t + geometry.t_window()) / c;
        let amplitude = |z: f64| -> Result<f64> {
            let p = CylPoint::new(t, 0.0, z);
            Ok(scalar_field(geometry, spectrum, &p, settings)?.norm())
        };

        let n = ((z_hi - z_lo) / step).ceil() as usize;
        let mut best_i = 0usize;
        let mut best = -1.0f64;
        for i in 0..=n {
            let z = z_lo + (z_hi - z_lo) * i as f64 / n as f64;
            let a = amplitude(z)?;
            if a > best {
                best = a;
                best_i = i;
            }
        }
        if best <= 0.0 {
            return Err(Error::NoPeak(format!("field is identically zero along the scan at t = {t}")));
        }
        let grid = |i: usize| z_lo + (z_hi - z_lo) * i as f64 / n as f64;
        let mut lo = grid(best_i.saturating_sub(1));
        let mut hi = grid((best_i + 1).min(n));
        // Golden-section refinement of the bracketed maximum.
        const INV_PHI: f64 = 0.6180339887498949;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = amplitude(x1)?;
        let mut f2 = amplitude(x2)?;
        while hi - lo > 1e-3 * step {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = amplitude(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = amplitude(x2)?;
            }
        }
        positions.push(0.5 * (lo + hi));
    }

    // Least-squares slope of position against time.
    let nf = times.len() as f64;
    let t_mean = times.iter().sum::<f64>() / nf;
    let z_mean = positions.iter().sum::<f64>() / nf;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &z) in times.iter().zip(positions.iter()) {
        num += (t - t_mean) * (z - z_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    Ok(PeakScan { times: times.to_vec(), positions, speed: num / den })
}

/// Measure the axial thickness of the support slab at fixed `t` by scanning
/// `|Φ|` on a grid of the given step and counting the nonzero stretch.
/// The result approximates `2T/cos η` to within one grid step.
pub fn measure_support_length(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t: f64,
    step: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!("scan step must be positive, got {step}")));
    }
    let c = geometry.cos_eta();
    let z_lo = (t - geometry.t_window()) / c - 3.0 * step;
    let z_hi = (t + geometry.t_window()) / c + 3.0 * step;
    let n = ((z_hi - z_lo) / step).ceil() as usize;
    let mut first = None;
    let mut last = None;
    for i in 0..=n {
        let z = z_lo + step * i as f64;
        let p = CylPoint::new(t, 0.0, z);
        if scalar_field(geometry, spectrum, &p, settings)?.norm() > 0.0 {
            if first.is_none() {
                first = Some(z);
            }
            last = Some(z);
        }
    }
    match (first, last) {
        (Some(a), Some(b)) => Ok(b - a + step),
        _ => Err(Error::NoPeak(format!("field is identically zero along the scan at t = {t}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn quarter() -> AxiconGeometry {
        AxiconGeometry::new(FRAC_PI_4, 1.0).unwrap()
    }

    fn rect1() -> Spectrum {
        Spectrum::rectangular(1.0).unwrap()
    }

    fn q() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn geometry_validates_and_derives() {
        assert!(AxiconGeometry::new(0.0, 1.0).is_err());
        assert!(AxiconGeometry::new(std::f64::consts::FRAC_PI_2, 1.0).is_err());
        assert!(AxiconGeometry::new(FRAC_PI_4, 0.0).is_err());
        assert!(AxiconGeometry::new(f64::NAN, 1.0).is_err());
        let g = quarter();
        assert_abs_diff_eq!(g.peak_speed(), SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.gamma(), SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.support_length(), 2.0 * SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn phase_examples() {
        let g = quarter();
        let p = CylPoint::new(1.0, 0.3, std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(phase(&g, &p), 0.0, epsilon = 1e-15);
        let g3 = AxiconGeometry::new(FRAC_PI_3, 1.0).unwrap();
        let p3 = CylPoint::new(2.0, 0.0, 2.0);
        assert_abs_diff_eq!(phase(&g3, &p3), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn support_window_is_strict() {
        let g = quarter();
        let c = g.cos_eta();
        assert!(in_support(&g, &CylPoint::new(0.0, 1.0, 0.0)));
        // exactly on the trailing front: outside by convention
        assert!(!in_support(&g, &CylPoint::new(1.0, 1.0, 0.0)));
        assert!(!in_support(&g, &CylPoint::new(2.5, 0.0, 1.0 / c)));
    }

    #[test]
    fn on_axis_value_matches_antiderivative() {
        let g = quarter();
        let s = rect1();
        // choose (t, z) with ζ = 0.5
        let p = CylPoint::new(0.5, 0.0, 0.0);
        let v = scalar_field(&g, &s, &p, &q()).unwrap();
        assert_abs_diff_eq!(v.re, 0.9588510772084060, epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, -0.2448348762192546, epsilon = 1e-9);
    }

    #[test]
    fn outside_support_is_exactly_zero() {
        let g = quarter();
        let s = rect1();
        for &(t, rho, z) in &[(3.0, 0.5, 0.0), (-2.0, 1.0, 1.0), (1.0, 0.0, 0.0)] {
            let v = scalar_field(&g, &s, &CylPoint::new(t, rho, z), &q()).unwrap();
            assert_eq!(v, Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn field_on_aperture_equals_boundary_value() {
        let g = quarter();
        let s = rect1();
        for &t in &[-0.9, -0.25, 0.0, 0.4, 0.99] {
            for &rho in &[0.0, 0.7, 2.3] {
                let direct = scalar_field(&g, &s, &CylPoint::new(t, rho, 0.0), &q()).unwrap();
                let bv = boundary_value(&g, &s, t, rho, &q()).unwrap();
                assert!((direct - bv).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_dz_example_and_convergence() {
        let g = quarter();
        let s = rect1();
        // ∫₀¹ k dk = 1/2, so ∂z Φ(0,0,0) = i cos η / 2
        let d = boundary_dz(&g, &s, 0.0, 0.0, &q()).unwrap();
        assert_abs_diff_eq!(d.re, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.im, g.cos_eta() * 0.5, epsilon = 1e-10);

        // central differences of the field converge to boundary_dz at O(h²)
        let err_at = |h: f64| -> f64 {
            let plus = scalar_field(&g, &s, &CylPoint::new(0.2, 0.5, h), &q()).unwrap();
            let minus = scalar_field(&g, &s, &CylPoint::new(0.2, 0.5, -h), &q()).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            (fd - boundary_dz(&g, &s, 0.2, 0.5, &q()).unwrap()).norm()
        };
        let ratio = err_at(1e-2) / err_at(5e-3);
        assert!((3.0..=5.0).contains(&ratio), "O(h²) ratio was {ratio}");
    }

    #[test]
    fn depends_on_zeta_only() {
        let g = quarter();
        let s = rect1();
        let c = g.cos_eta();
        for &(t, rho, z, shift) in &[(0.3, 0.8, 0.1, 1.7), (-0.2, 1.5, -0.4, -2.9), (0.0, 0.0, 0.5, 10.0)]
        {
            let a = scalar_field(&g, &s, &CylPoint::new(t, rho, z), &q()).unwrap();
            let b = scalar_field(&g, &s, &CylPoint::new(t + shift, rho, z + shift / c), &q()).unwrap();
            assert!((a - b).norm() < 1e-10, "translation along the peak line changed the value");
        }
    }

    #[test]
    fn real_spectra_give_conjugate_symmetry() {
        let g = quarter();
        for spectrum in [rect1(), Spectrum::truncated_gaussian(0.8, 0.2, 0.2, 1.4).unwrap()] {
            for &(t, rho, z) in &[(0.4, 0.9, 0.2), (0.15, 2.0, -0.3)] {
                let plus = scalar_field(&g, &spectrum, &CylPoint::new(t, rho, z), &q()).unwrap();
                let minus = scalar_field(&g, &spectrum, &CylPoint::new(-t, rho, -z), &q()).unwrap();
                assert!((plus - minus.conj()).norm() < 1e-10);
            }
        }
    }

    /// Off the peak plane the amplitude decays like 1/ρ at fixed ζ (the
    /// low-wavenumber end of the spectrum dominates the far field), so
    /// ρ·|Φ| stays bounded — by 1/sin η for the canonical flat spectrum.
    #[test]
    fn radial_decay_is_bounded() {
        let g = quarter();
        let s = rect1();
        let k0 = 1.0;
        let sin = g.sin_eta();
        let mut rho = 50.0 / (k0 * sin);
        let hi = 500.0 / (k0 * sin);
        while rho <= hi {
            let p = CylPoint::new(0.0, rho, 0.0);
            let scaled = scalar_field(&g, &s, &p, &q()).unwrap().norm() * rho;
            assert!(scaled < 2.0, "rho |Φ| = {scaled} at rho = {rho}");
            rho *= 1.45;
        }
    }

    #[test]
    fn peak_speed_measured_within_one_percent() {
        let s = rect1();
        for (eta, expect) in [(FRAC_PI_4, SQRT_2), (FRAC_PI_3, 2.0)] {
            let g = AxiconGeometry::new(eta, 1.0).unwrap();
            let scan = peak_velocity(&g, &s, &[2.0, 3.0, 4.0], &q()).unwrap();
            assert!(
                (scan.speed - expect).abs() <= 0.01 * expect,
                "eta = {eta}: measured {}, expected {expect}",
                scan.speed
            );
        }
    }

    #[test]
    fn peak_scan_rejects_bad_inputs() {
        let g = quarter();
        let s = rect1();
        assert!(peak_velocity(&g, &s, &[2.0], &q()).is_err());
        assert!(peak_velocity(&g, &s, &[2.0, 2.0], &q()).is_err());
        assert!(peak_velocity(&g, &s, &[0.5, 2.0], &q()).is_err());

        let zero = Spectrum::tabulated(vec![
            (0.1, Complex::new(0.0, 0.0)),
            (1.0, Complex::new(0.0, 0.0)),
        ])
        .unwrap();
        match peak_velocity(&g, &zero, &[2.0, 3.0], &q()) {
            Err(Error::NoPeak(_)) => {}
            other => panic!("expected NoPeak, got {other:?}"),
        }
    }

    #[test]
    fn support_length_measured_within_one_step() {
        let g = AxiconGeometry::new(FRAC_PI_6, 1.0).unwrap();
        let s = rect1();
        let step = 0.02;
        let measured = measure_support_length(&g, &s, 2.5, step, &q()).unwrap();
        assert!(
            (measured - g.support_length()).abs() <= step,
            "measured {measured}, expected {}",
            g.support_length()
        );
    }

    #[test]
    fn negative_rho_is_a_domain_error() {
        let g = quarter();
        let s = rect1();
        assert!(scalar_field(&g, &s, &CylPoint::new(0.0, -1.0, 0.0), &q()).is_err());
    }
}
