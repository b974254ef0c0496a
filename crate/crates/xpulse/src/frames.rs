//! Lorentz boosts along the axis and the co-moving description of the pulse.
//!
//! Boosting with velocity `v = cos η` (Lorentz factor `γ = 1/sin η`) turns
//! the phase coordinate into pure time: `ζ = t - z cos η = sin η · t'`.  In
//! that frame the pulse is a standing structure,
//!
//! ```text
//!     Φ'(t', ρ, z') = ∫ B(k) J0(kρ sin η) e^{-i k sin η t'} dk ,   |t'| < T/sin η
//! ```
//!
//! independent of `z'`: the energy inside a coaxial cylinder grows exactly
//! linearly with its length, which is how the total energy stays finite only
//! because the support window cuts the slab off.  The functions here evaluate
//! the co-moving closed form, re-evaluate it through the lab frame for
//! consistency checks, and express the aperture-plane data in the co-moving
//! coordinates.

use crate::numerics::{spectral_integral, BesselOrder, QuadratureSettings};
use crate::pulse::{boundary_dz, boundary_value, scalar_field, AxiconGeometry, CylPoint};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};

/// A boost along the axis: `t' = γ(t - v z)`, `z' = γ(z - v t)`.
#[derive(Clone, Copy, Debug)]
pub struct BoostFrame {
    velocity: f64,
    gamma: f64,
}

impl BoostFrame {
    /// Boost with the given subluminal velocity.
    pub fn new(velocity: f64) -> Result<Self> {
        if !velocity.is_finite() {
            return Err(Error::NonFinite("boost velocity"));
        }
        if velocity.abs() >= 1.0 {
            return Err(Error::Domain(format!("boost velocity must satisfy |v| < 1, got {velocity}")));
        }
        Ok(BoostFrame { velocity, gamma: 1.0 / (1.0 - velocity * velocity).sqrt() })
    }

    /// The co-moving boost of a pulse family: `v = cos η`, `γ = 1/sin η`.
    pub fn co_moving(geometry: &AxiconGeometry) -> Self {
        BoostFrame { velocity: geometry.cos_eta(), gamma: 1.0 / geometry.sin_eta() }
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Lab `(t, z)` to boosted `(t', z')`.
    pub fn boost(&self, t: f64, z: f64) -> (f64, f64) {
        (self.gamma * (t - self.velocity * z), self.gamma * (z - self.velocity * t))
    }

    /// Boosted `(t', z')` back to lab `(t, z)`.
    pub fn unboost(&self, t_prime: f64, z_prime: f64) -> (f64, f64) {
        (
            self.gamma * (t_prime + self.velocity * z_prime),
            self.gamma * (z_prime + self.velocity * t_prime),
        )
    }
}

/// Whether `t'` lies inside the co-moving support window `|t'| < T/sin η`.
pub fn boosted_window(geometry: &AxiconGeometry, t_prime: f64) -> bool {
    t_prime.abs() < geometry.t_window() / geometry.sin_eta()
}

/// Co-moving pulse amplitude from its closed form; note the absence of a
/// `z'` argument — the boosted profile is axially uniform.
pub fn boosted_scalar_field(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t_prime: f64,
    rho: f64,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    if !t_prime.is_finite() {
        return Err(Error::NonFinite("boosted time"));
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    if !boosted_window(geometry, t_prime) {
        return Ok(Complex::new(0.0, 0.0));
    }
    let s = geometry.sin_eta();
    spectral_integral(spectrum, BesselOrder::Zero, 0, rho * s, s * t_prime, settings)
}

/// Co-moving amplitude obtained the long way round: transform the event back
/// to the lab frame and evaluate the lab field there.  Must agree with
/// [`boosted_scalar_field`] for every `z'`.
pub fn boosted_field_via_lab(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t_prime: f64,
    rho: f64,
    z_prime: f64,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    let frame = BoostFrame::co_moving(geometry);
    let (t, z) = frame.unboost(t_prime, z_prime);
    scalar_field(geometry, spectrum, &CylPoint::new(t, rho, z), settings)
}

/// Mismatch of the two evaluation routes over a set of boosted events:
/// returns the maximum absolute difference.
pub fn boosted_field_mismatch(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    events: &[(f64, f64, f64)],
    settings: &QuadratureSettings,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(t_prime, rho, z_prime) in events {
        let direct = boosted_scalar_field(geometry, spectrum, t_prime, rho, settings)?;
        let via_lab = boosted_field_via_lab(geometry, spectrum, t_prime, rho, z_prime, settings)?;
        worst = worst.max((direct - via_lab).norm());
    }
    Ok(worst)
}

/// Deterministic low-discrepancy sample of boosted events covering the
/// support window (and a margin outside it), suitable for
/// [`boosted_field_mismatch`].
pub fn boost_check_events(geometry: &AxiconGeometry, count: usize) -> Vec<(f64, f64, f64)> {
    // Additive Kronecker lattice built on the generalized golden ratio
    // φ₃ ≈ 1.2207440846, the positive root of x⁴ = x + 1.
    const A1: f64 = 0.8191725133961645; // 1/φ₃
    const A2: f64 = 0.6710436067037893; // 1/φ₃²
    const A3: f64 = 0.5497004779019703; // 1/φ₃³
    let s = geometry.sin_eta();
    let t_max = 1.3 * geometry.t_window() / s;
    (0..count)
        .map(|i| {
            let n = (i + 1) as f64;
            let u1 = (n * A1).fract();
            let u2 = (n * A2).fract();
            let u3 = (n * A3).fract();
            ((2.0 * u1 - 1.0) * t_max, u2 * 6.0 / s, (2.0 * u3 - 1.0) * 8.0)
        })
        .collect()
}

/// Consistency of the aperture-plane data expressed in co-moving
/// coordinates: on the line `z' = -v t'` (the image of the plane `z = 0`),
/// the co-moving field must reproduce the aperture value, and
/// `-γ v ∂Φ'/∂t'` must reproduce the aperture normal derivative.  Returns
/// the two absolute mismatches `(value, derivative)`.
pub fn boosted_boundary_check(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t_prime: f64,
    rho: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, f64)> {
    let frame = BoostFrame::co_moving(geometry);
    let z_prime = -frame.velocity() * t_prime;
    let (t_lab, _z_lab) = frame.unboost(t_prime, z_prime);

    let via_lab = boosted_field_via_lab(geometry, spectrum, t_prime, rho, z_prime, settings)?;
    let aperture = boundary_value(geometry, spectrum, t_lab, rho, settings)?;
    let value_mismatch = (via_lab - aperture).norm();

    let s = geometry.sin_eta();
    let deriv_mismatch = if boosted_window(geometry, t_prime) {
        // ∂Φ'/∂t' from the closed form, then the chain rule ∂z = -γv ∂t'
        // (the z'-derivative vanishes identically).
        let d_tp = Complex::new(0.0, -s)
            * spectral_integral(spectrum, BesselOrder::Zero, 1, rho * s, s * t_prime, settings)?;
        let lab_normal = -frame.gamma() * frame.velocity() * d_tp;
        (lab_normal - boundary_dz(geometry, spectrum, t_lab, rho, settings)?).norm()
    } else {
        boundary_dz(geometry, spectrum, t_lab, rho, settings)?.norm()
    };
    Ok((value_mismatch, deriv_mismatch))
}

/// Co-moving field energy inside the cylinder `ρ ≤ radius`,
/// `z' ∈ [z_lo, z_hi]`, at fixed `t'`, computed through the lab route so the
/// axial uniformity is measured rather than assumed.  The integrand is the
/// co-moving density `|∂Φ'/∂t'|² + |∇'Φ'|²`; the result scales exactly
/// linearly in `z_hi - z_lo`.
pub fn boosted_energy_in_cylinder(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    t_prime: f64,
    radius: f64,
    z_lo: f64,
    z_hi: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("cylinder radius must be positive, got {radius}")));
    }
    if !(z_lo.is_finite() && z_hi.is_finite() && z_hi > z_lo) {
        return Err(Error::Domain(format!("cylinder span [{z_lo}, {z_hi}] is empty or not finite")));
    }
    let frame = BoostFrame::co_moving(geometry);
    let s = geometry.sin_eta();
    let c = geometry.cos_eta();
    let k_max = spectrum.max_k();

    // Density at one (ρ, z') node via lab-frame closed forms:
    //   ∂t'Φ' = γ(∂t + v ∂z)Φ = -i sin η ∫ B k J0 e^{-ikζ} dk
    //   ∂ρ Φ' =            -sin η ∫ B k J1 e^{-ikζ} dk ,   ∂z'Φ' = 0
    let density = |rho: f64, z_prime: f64| -> Result<f64> {
        let (t, z) = frame.unboost(t_prime, z_prime);
        let point = CylPoint::new(t, rho, z);
        if !crate::pulse::in_support(geometry, &point) {
            return Ok(0.0);
        }
        let zeta = crate::pulse::phase(geometry, &point);
        let i01 = spectral_integral(spectrum, BesselOrder::Zero, 1, rho * s, zeta, settings)?;
        let i11 = spectral_integral(spectrum, BesselOrder::One, 1, rho * s, zeta, settings)?;
        let d_tp = frame.gamma() * (Complex::new(0.0, -1.0) + Complex::new(0.0, c) * c) * i01;
        let d_rho = -s * i11;
        Ok(d_tp.norm_sqr() + d_rho.norm_sqr())
    };

    let rho_nodes = crate::numerics::panel_grid(0.0, radius, std::f64::consts::FRAC_PI_2 / (k_max * s));
    let z_nodes = crate::numerics::panel_grid(z_lo, z_hi, (z_hi - z_lo) / 4.0);
    let mut total = 0.0;
    for &(rho, w_rho) in &rho_nodes {
        for &(zp, w_z) in &z_nodes {
            total += 2.0 * std::f64::consts::PI * rho * w_rho * w_z * density(rho, zp)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
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

    #[test]
    fn boost_example_and_round_trip() {
        let frame = BoostFrame::co_moving(&quarter());
        let (tp, zp) = frame.boost(1.0, 0.0);
        assert_abs_diff_eq!(tp, std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(zp, -1.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = rng.gen_range(-5.0..5.0);
            let z = rng.gen_range(-5.0..5.0);
            let (tp, zp) = frame.boost(t, z);
            let (t2, z2) = frame.unboost(tp, zp);
            assert_abs_diff_eq!(t, t2, epsilon = 1e-12);
            assert_abs_diff_eq!(z, z2, epsilon = 1e-12);
        }
        assert!(BoostFrame::new(1.0).is_err());
        assert!(BoostFrame::new(-1.2).is_err());
    }

    #[test]
    fn phase_becomes_pure_time() {
        let g = quarter();
        let frame = BoostFrame::co_moving(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = rng.gen_range(-3.0..3.0);
            let z = rng.gen_range(-3.0..3.0);
            let (tp, _) = frame.boost(t, z);
            let zeta = crate::pulse::phase(&g, &CylPoint::new(t, 0.0, z));
            assert_abs_diff_eq!(zeta, g.sin_eta() * tp, epsilon = 1e-12);
        }
    }

    #[test]
    fn both_evaluation_routes_agree() {
        let g = quarter();
        let s = rect1();
        let mut events = boost_check_events(&g, 60);
        // seeded random events on top of the lattice
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            events.push((
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.0..6.0),
                rng.gen_range(-6.0..6.0),
            ));
        }
        let worst = boosted_field_mismatch(&g, &s, &events, &q()).unwrap();
        assert!(worst < 1e-9, "route mismatch {worst}");
    }

    #[test]
    fn co_moving_field_ignores_axial_position() {
        let g = quarter();
        let s = rect1();
        let reference = boosted_field_via_lab(&g, &s, 0.6, 1.3, 0.0, &q()).unwrap();
        for zp in [-5.0, -1.0, 2.0, 7.0] {
            let v = boosted_field_via_lab(&g, &s, 0.6, 1.3, zp, &q()).unwrap();
            assert!((v - reference).norm() < 1e-10, "z' = {zp} changed the field");
        }
    }

    #[test]
    fn support_window_maps_exactly() {
        let g = quarter();
        let s = rect1();
        let edge = g.t_window() / g.sin_eta();
        for (tp, expect_inside) in [
            (0.0, true),
            (edge - 1e-9, true),
            (-edge + 1e-9, true),
            (edge + 1e-9, false),
            (-edge - 1e-9, false),
            (3.0 * edge, false),
        ] {
            assert_eq!(boosted_window(&g, tp), expect_inside, "t' = {tp}");
            let direct = boosted_scalar_field(&g, &s, tp, 0.8, &q()).unwrap();
            let via_lab = boosted_field_via_lab(&g, &s, tp, 0.8, 1.7, &q()).unwrap();
            if !expect_inside {
                assert_eq!(direct, Complex::new(0.0, 0.0));
                assert_eq!(via_lab, Complex::new(0.0, 0.0));
            } else {
                assert!(direct.norm() > 0.0);
            }
        }
    }

    #[test]
    fn aperture_data_survives_the_boost() {
        let g = quarter();
        let s = rect1();
        for &(tp, rho) in &[(0.0, 0.0), (0.5, 1.1), (-0.9, 2.4), (1.2, 0.3)] {
            let (dv, dd) = boosted_boundary_check(&g, &s, tp, rho, &q()).unwrap();
            assert!(dv < 1e-9, "value mismatch {dv} at t'={tp}, rho={rho}");
            assert!(dd < 1e-9, "derivative mismatch {dd} at t'={tp}, rho={rho}");
        }
    }

    #[test]
    fn cylinder_energy_is_linear_in_length() {
        let g = quarter();
        let s = rect1();
        let e1 = boosted_energy_in_cylinder(&g, &s, 0.3, 6.0, -1.0, 1.0, &q()).unwrap();
        let e2 = boosted_energy_in_cylinder(&g, &s, 0.3, 6.0, -1.0, 3.0, &q()).unwrap();
        let e_shift = boosted_energy_in_cylinder(&g, &s, 0.3, 6.0, 4.0, 6.0, &q()).unwrap();
        assert!(e1 > 0.0);
        assert!((e2 - 2.0 * e1).abs() <= 1e-10 * e2, "doubling the length: {e1} -> {e2}");
        assert!((e_shift - e1).abs() <= 1e-10 * e1, "translating the cylinder: {e1} -> {e_shift}");
    }
}
