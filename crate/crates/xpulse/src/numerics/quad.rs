//! Adaptive panel quadrature for oscillatory spectral integrals.
//!
//! The integrals have the form `∫ B(k) k^p J_n(k a) e^{-i k ζ} dk` over the
//! support of the spectrum.  Both oscillating factors have known local
//! periods (`2π/a` for the Bessel factor, `2π/|ζ|` for the exponential), so
//! the support is pre-split into Gauss-Legendre panels no wider than a
//! quarter of the shortest period; spectrum breakpoints (support edges,
//! tabulation nodes) are always panel boundaries.  A 16-point rule on less
//! than a quarter oscillation is accurate to far below double rounding, so
//! the subsequent adaptive bisection — accept a panel when the whole-panel
//! value agrees with the sum of its halves — normally terminates at depth
//! zero and only digs in around spectrum kinks.

use crate::numerics::bessel::{j0, j1};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};

const GL8_NODES: [f64; 8] = [
    -0.9602898564975362317,
    -0.7966664774136267396,
    -0.5255324099163289858,
    -0.1834346424956498049,
    0.1834346424956498049,
    0.5255324099163289858,
    0.7966664774136267396,
    0.9602898564975362317,
];

const GL8_WEIGHTS: [f64; 8] = [
    0.1012285362903762592,
    0.2223810344533744705,
    0.3137066458778872873,
    0.3626837833783619830,
    0.3626837833783619830,
    0.3137066458778872873,
    0.2223810344533744705,
    0.1012285362903762592,
];

const GL16_NODES: [f64; 16] = [
    -0.9894009349916499326,
    -0.9445750230732325761,
    -0.8656312023878317439,
    -0.7554044083550030339,
    -0.6178762444026437484,
    -0.4580167776572273863,
    -0.2816035507792589132,
    -0.09501250983763744019,
    0.09501250983763744019,
    0.2816035507792589132,
    0.4580167776572273863,
    0.6178762444026437484,
    0.7554044083550030339,
    0.8656312023878317439,
    0.9445750230732325761,
    0.9894009349916499326,
];

const GL16_WEIGHTS: [f64; 16] = [
    0.02715245941175409485,
    0.06225352393864789286,
    0.09515851168249278481,
    0.1246289712555338721,
    0.1495959888165767321,
    0.1691565193950025382,
    0.1826034150449235889,
    0.1894506104550684963,
    0.1894506104550684963,
    0.1826034150449235889,
    0.1691565193950025382,
    0.1495959888165767321,
    0.1246289712555338721,
    0.09515851168249278481,
    0.06225352393864789286,
    0.02715245941175409485,
];

/// 16-point Gauss-Legendre rule on `[a, b]`.
pub(crate) fn gauss_legendre_16<F: FnMut(f64) -> Complex>(f: &mut F, a: f64, b: f64) -> Complex {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex::new(0.0, 0.0);
    for (x, w) in GL16_NODES.iter().zip(GL16_WEIGHTS.iter()) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Nodes and weights of the composite 8-point rule with panels of width at
/// most `max_width` covering `[lo, hi]`.
pub(crate) fn panel_grid(lo: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, b) in split_panels(lo, hi, max_width) {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            out.push((mid + half * x, w * half));
        }
    }
    out
}

/// Split `[lo, hi]` into equal panels no wider than `max_width`.
pub(crate) fn split_panels(lo: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    let width = hi - lo;
    if width <= 0.0 {
        return Vec::new();
    }
    let n = if max_width.is_finite() && max_width > 0.0 {
        (width / max_width).ceil() as usize
    } else {
        1
    }
    .max(1);
    (0..n)
        .map(|i| {
            let a = lo + width * (i as f64) / (n as f64);
            let b = lo + width * ((i + 1) as f64) / (n as f64);
            (a, b)
        })
        .collect()
}

/// Which Bessel factor multiplies the spectrum in a spectral integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    #[inline]
    fn eval(self, x: f64) -> f64 {
        match self {
            BesselOrder::Zero => j0(x),
            BesselOrder::One => j1(x),
        }
    }
}

/// Tolerances and subdivision budget for the adaptive quadrature.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSettings {
    /// Relative tolerance against the L1 size of the panel sums.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum bisection depth per panel.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 40 }
    }
}

/// Guard against pathological panel counts (e.g. astronomically large radii).
const MAX_INITIAL_PANELS: usize = 2_000_000;

struct Accumulator {
    sum: Complex,
    err: f64,
    failed: bool,
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> Complex>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: Complex,
    budget: f64,
    depth: u32,
    max_depth: u32,
    acc: &mut Accumulator,
) {
    let m = 0.5 * (a + b);
    let left = gauss_legendre_16(f, a, m);
    let right = gauss_legendre_16(f, m, b);
    let better = left + right;
    let disagreement = (whole - better).norm();
    if disagreement <= budget {
        acc.sum += better;
        acc.err += disagreement;
        return;
    }
    if depth >= max_depth {
        acc.sum += better;
        acc.err += disagreement;
        acc.failed = true;
        return;
    }
    refine(f, a, m, left, 0.5 * budget, depth + 1, max_depth, acc);
    refine(f, m, b, right, 0.5 * budget, depth + 1, max_depth, acc);
}

/// Integrate `f` over the spectrum support with oscillation-aware panels.
///
/// `osc_caps` lists additional upper bounds on the panel width (quarter
/// periods of the oscillating factors, smoothness scales).
fn integrate_panels<F: FnMut(f64) -> Complex>(
    f: &mut F,
    breakpoints: &[f64],
    osc_caps: &[f64],
    settings: &QuadratureSettings,
) -> Result<Complex> {
    let lo = breakpoints[0];
    let hi = breakpoints[breakpoints.len() - 1];
    let total_width = hi - lo;
    if total_width <= 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let cap = osc_caps.iter().copied().fold(f64::INFINITY, f64::min);

    let mut panels = Vec::new();
    for seg in breakpoints.windows(2) {
        panels.extend(split_panels(seg[0], seg[1], cap));
        if panels.len() > MAX_INITIAL_PANELS {
            return Err(Error::Domain(format!(
                "quadrature would need more than {MAX_INITIAL_PANELS} panels; \
                 arguments are out of the supported range"
            )));
        }
    }

    // First pass: plain panel values, which also set the size scale that the
    // relative tolerance refers to.
    let first: Vec<Complex> = panels.iter().map(|&(a, b)| gauss_legendre_16(f, a, b)).collect();
    let scale: f64 = first.iter().map(|v| v.norm()).sum();
    let tolerance = settings.abs_tol.max(settings.rel_tol * scale);

    let mut acc = Accumulator { sum: Complex::new(0.0, 0.0), err: 0.0, failed: false };
    for (&(a, b), &whole) in panels.iter().zip(first.iter()) {
        let budget = tolerance * ((b - a) / total_width);
        refine(f, a, b, whole, budget, 0, settings.max_subdivisions, &mut acc);
    }

    if acc.failed || !acc.sum.re.is_finite() || !acc.sum.im.is_finite() {
        return Err(Error::Quadrature { estimate: acc.sum, error_bound: acc.err });
    }
    Ok(acc.sum)
}

/// Panel-width caps for an integrand `B(k) k^p J_n(k a) e^{-i k ζ}`.
fn oscillation_caps(spectrum: &Spectrum, radial_arg: f64, phase_arg: f64) -> Vec<f64> {
    let mut caps = Vec::new();
    if radial_arg > 0.0 {
        caps.push(std::f64::consts::FRAC_PI_2 / radial_arg);
    }
    if phase_arg != 0.0 {
        caps.push(std::f64::consts::FRAC_PI_2 / phase_arg.abs());
    }
    if let Some(w) = spectrum.smoothness_scale() {
        caps.push(0.5 * w);
    }
    caps
}

/// `∫ B(k) k^p J_n(k·radial_arg) e^{-i k·phase_arg} dk` over the support
/// of `spectrum`.
///
/// # Errors
/// - non-finite `radial_arg`/`phase_arg`, negative `radial_arg`, or
///   `power > 3` are domain errors;
/// - failure to reach tolerance within the subdivision budget returns a
///   numerical error carrying the best estimate and its error bound.
pub fn spectral_integral(
    spectrum: &Spectrum,
    order: BesselOrder,
    power: u32,
    radial_arg: f64,
    phase_arg: f64,
    settings: &QuadratureSettings,
) -> Result<Complex> {
    if !radial_arg.is_finite() {
        return Err(Error::NonFinite("spectral integral radial argument"));
    }
    if !phase_arg.is_finite() {
        return Err(Error::NonFinite("spectral integral phase argument"));
    }
    if radial_arg < 0.0 {
        return Err(Error::Domain(format!("radial argument must be >= 0, got {radial_arg}")));
    }
    if power > 3 {
        return Err(Error::Domain(format!("spectral integral power must be <= 3, got {power}")));
    }

    let breakpoints = spectrum.breakpoints();
    let caps = oscillation_caps(spectrum, radial_arg, phase_arg);
    let p = power as i32;
    let mut integrand = |k: f64| -> Complex {
        let amp = spectrum.amplitude(k) * k.powi(p) * order.eval(k * radial_arg);
        let (s, c) = (k * phase_arg).sin_cos();
        amp * Complex::new(c, -s)
    };
    integrate_panels(&mut integrand, &breakpoints, &caps, settings)
}

/// `∫ |B(k)|² k^p dk` over the support of `spectrum`, for `p ∈ {1, 3}`.
pub fn spectrum_moment(spectrum: &Spectrum, power: u32, settings: &QuadratureSettings) -> Result<f64> {
    if power != 1 && power != 3 {
        return Err(Error::Domain(format!("spectrum moment power must be 1 or 3, got {power}")));
    }
    let breakpoints = spectrum.breakpoints();
    let caps = oscillation_caps(spectrum, 0.0, 0.0);
    let p = power as i32;
    let mut integrand = |k: f64| -> Complex {
        let amp = spectrum.amplitude(k);
        Complex::new(amp.norm_sqr() * k.powi(p), 0.0)
    };
    let value = integrate_panels(&mut integrand, &breakpoints, &caps, settings)?;
    Ok(value.re.max(0.0))
}

/// Fixed quadrature nodes in `k` for one radial argument, with the
/// phase-independent part of the integrand folded into the weights.
///
/// Panels are no wider than a quarter period of either `J_n(k a)` or
/// `e^{-ikζ}` for any `|ζ| ≤ zeta_cap` (and no wider than half the spectrum's
/// smoothness scale), so the plain 8-point rule per panel is already at
/// rounding accuracy.  Sweeping many phase offsets at a fixed radius then
/// costs one `sin_cos` per node instead of a full adaptive integration —
/// the layout and the Bessel factors are reused across the sweep.
pub(crate) struct RadialKernel {
    k: Vec<f64>,
    amp0: Vec<Complex>,
    amp1: Vec<Complex>,
}

impl RadialKernel {
    pub(crate) fn build(spectrum: &Spectrum, a: f64, power: i32, zeta_cap: f64) -> RadialKernel {
        let mut cap = std::f64::consts::FRAC_PI_2 / zeta_cap;
        if a > 0.0 {
            cap = cap.min(std::f64::consts::FRAC_PI_2 / a);
        }
        if let Some(w) = spectrum.smoothness_scale() {
            cap = cap.min(0.5 * w);
        }
        let breakpoints = spectrum.breakpoints();
        let mut k = Vec::new();
        let mut amp0 = Vec::new();
        let mut amp1 = Vec::new();
        for seg in breakpoints.windows(2) {
            for (kn, wn) in panel_grid(seg[0], seg[1], cap) {
                let base = spectrum.amplitude(kn) * kn.powi(power) * wn;
                k.push(kn);
                amp0.push(base * j0(kn * a));
                amp1.push(base * j1(kn * a));
            }
        }
        RadialKernel { k, amp0, amp1 }
    }

    /// `(∫B k^p J0(ka) e^{-ikζ} dk, ∫B k^p J1(ka) e^{-ikζ} dk)`.
    pub(crate) fn eval(&self, zeta: f64) -> (Complex, Complex) {
        let mut acc0 = Complex::new(0.0, 0.0);
        let mut acc1 = Complex::new(0.0, 0.0);
        for i in 0..self.k.len() {
            let (s, c) = (self.k[i] * zeta).sin_cos();
            let rot = Complex::new(c, -s);
            acc0 += self.amp0[i] * rot;
            acc1 += self.amp1[i] * rot;
        }
        (acc0, acc1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn settings() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    /// Closed form of the rectangular-spectrum Fourier window:
    /// ∫₀^{k0} e^{-ikζ} dk = (1 - e^{-i k0 ζ}) / (i ζ).
    fn rect_window_exact(k0: f64, zeta: f64) -> Complex {
        if zeta == 0.0 {
            return Complex::new(k0, 0.0);
        }
        let i = Complex::new(0.0, 1.0);
        (Complex::new(1.0, 0.0) - (-i * k0 * zeta).exp()) / (i * zeta)
    }

    /// Direct fine-step Riemann (midpoint) integration, the slow independent
    /// oracle for the `a = 0` Fourier-window case.
    fn riemann_window(spectrum: &Spectrum, zeta: f64, steps: usize) -> Complex {
        let (lo, hi) = spectrum.support();
        let dk = (hi - lo) / steps as f64;
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..steps {
            let k = lo + (i as f64 + 0.5) * dk;
            let (s, c) = (k * zeta).sin_cos();
            acc += spectrum.amplitude(k) * Complex::new(c, -s);
        }
        acc * dk
    }

    #[test]
    fn rectangular_window_at_zero_phase() {
        let s = Spectrum::rectangular(1.0).unwrap();
        let v = spectral_integral(&s, BesselOrder::Zero, 0, 0.0, 0.0, &settings()).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rectangular_window_matches_antiderivative() {
        let s = Spectrum::rectangular(1.0).unwrap();
        let v = spectral_integral(&s, BesselOrder::Zero, 0, 0.0, 0.5, &settings()).unwrap();
        let exact = rect_window_exact(1.0, 0.5);
        assert_abs_diff_eq!(v.re, 0.9588510772084060, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, -0.2448348762192546, epsilon = 1e-12);
        assert_abs_diff_eq!(v.re, exact.re, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, exact.im, epsilon = 1e-12);

        for &zeta in &[-3.0, -0.7, 0.31, 1.9, 8.5] {
            let v = spectral_integral(&s, BesselOrder::Zero, 0, 0.0, zeta, &settings()).unwrap();
            let exact = rect_window_exact(1.0, zeta);
            assert!((v - exact).norm() < 1e-12, "zeta = {zeta}");
        }
    }

    #[test]
    fn matches_riemann_oracle_for_window_integrals() {
        let rect = Spectrum::rectangular(2.0).unwrap();
        let gauss = Spectrum::truncated_gaussian(1.0, 0.25, 0.25, 1.75).unwrap();
        for spectrum in [&rect, &gauss] {
            for &zeta in &[0.0, 0.4, -1.3, 2.2] {
                let fast = spectral_integral(spectrum, BesselOrder::Zero, 0, 0.0, zeta, &settings()).unwrap();
                let slow = riemann_window(spectrum, zeta, 1 << 21);
                assert!(
                    (fast - slow).norm() <= 1e-6 * slow.norm().max(1e-6),
                    "{spectrum} at zeta={zeta}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn oscillatory_bessel_factor_against_fine_riemann() {
        // Large radial argument: panels must track the Bessel oscillation.
        let s = Spectrum::rectangular(1.0).unwrap();
        let a = 30.0;
        let zeta = 0.7;
        let fast = spectral_integral(&s, BesselOrder::Zero, 1, a, zeta, &settings()).unwrap();
        let mut slow = Complex::new(0.0, 0.0);
        let steps = 1 << 21;
        let dk = 1.0 / steps as f64;
        for i in 0..steps {
            let k = (i as f64 + 0.5) * dk;
            let (si, co) = (k * zeta).sin_cos();
            slow += j0(k * a) * k * Complex::new(co, -si);
        }
        slow *= dk;
        assert!((fast - slow).norm() < 1e-9, "{fast} vs {slow}");
    }

    #[test]
    fn moments_of_rectangular_spectra() {
        let s1 = Spectrum::rectangular(1.0).unwrap();
        assert_abs_diff_eq!(spectrum_moment(&s1, 1, &settings()).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spectrum_moment(&s1, 3, &settings()).unwrap(), 0.25, epsilon = 1e-12);
        let s2 = Spectrum::rectangular(2.0).unwrap();
        assert_abs_diff_eq!(spectrum_moment(&s2, 3, &settings()).unwrap(), 4.0, epsilon = 1e-12);
        assert!(spectrum_moment(&s1, 2, &settings()).is_err());
    }

    #[test]
    fn linear_in_the_spectrum() {
        let ks: Vec<f64> = (0..=8).map(|i| 0.25 + i as f64 * 0.15).collect();
        let v1: Vec<(f64, Complex)> =
            ks.iter().map(|&k| (k, Complex::new((2.3 * k).sin(), 0.4 * k))).collect();
        let v2: Vec<(f64, Complex)> =
            ks.iter().map(|&k| (k, Complex::new(1.0 - k, (1.7 * k).cos()))).collect();
        let (alpha, beta) = (0.6, -1.9);
        let combo: Vec<(f64, Complex)> = v1
            .iter()
            .zip(v2.iter())
            .map(|(&(k, a), &(_, b))| (k, a * alpha + b * beta))
            .collect();
        let s1 = Spectrum::tabulated(v1).unwrap();
        let s2 = Spectrum::tabulated(v2).unwrap();
        let sc = Spectrum::tabulated(combo).unwrap();
        for &(order, p, a, zeta) in
            &[(BesselOrder::Zero, 0u32, 0.0, 0.8), (BesselOrder::One, 2, 3.0, -0.4)]
        {
            let i1 = spectral_integral(&s1, order, p, a, zeta, &settings()).unwrap();
            let i2 = spectral_integral(&s2, order, p, a, zeta, &settings()).unwrap();
            let ic = spectral_integral(&sc, order, p, a, zeta, &settings()).unwrap();
            let lin = i1 * alpha + i2 * beta;
            assert!((ic - lin).norm() < 1e-10 * (1.0 + lin.norm()));
        }
    }

    #[test]
    fn invalid_arguments_are_domain_errors() {
        let s = Spectrum::rectangular(1.0).unwrap();
        assert!(spectral_integral(&s, BesselOrder::Zero, 4, 0.0, 0.0, &settings()).is_err());
        assert!(spectral_integral(&s, BesselOrder::Zero, 0, -1.0, 0.0, &settings()).is_err());
        assert!(spectral_integral(&s, BesselOrder::Zero, 0, f64::NAN, 0.0, &settings()).is_err());
        assert!(spectral_integral(&s, BesselOrder::Zero, 0, 0.0, f64::INFINITY, &settings()).is_err());
    }

    #[test]
    fn exhausted_budget_reports_convergence_failure() {
        let s = Spectrum::rectangular(1.0).unwrap();
        let strict = QuadratureSettings { rel_tol: 1e-30, abs_tol: 1e-30, max_subdivisions: 0 };
        let err = spectral_integral(&s, BesselOrder::Zero, 0, 25.0, 4.0, &strict).unwrap_err();
        match err {
            Error::Quadrature { error_bound, .. } => assert!(error_bound > 0.0),
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }
}
