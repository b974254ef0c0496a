//! Wavenumber spectra over `k ≥ 0`.
//!
//! A pulse is specified by a complex amplitude density `B(k)` with bounded
//! support on the positive wavenumber axis.  Three families are supported:
//!
//! - `Rectangular { k0 }`: `B = 1` on `[0, k0]`, the canonical flat spectrum;
//! - `TruncatedGaussian`: `B(k) = exp(-(k-center)²/(2 width²))` on `[lo, hi]`;
//! - `Tabulated`: complex values at ascending nodes, linearly interpolated,
//!   zero outside the tabulated range.
//!
//! The textual grammar used by the command-line tools is
//! `rect:<k0>`, `gauss:<center>,<width>,<lo>,<hi>` and `table:<path>`, where
//! the file contains `k,re,im` rows.

use crate::{Complex, Error, Result};
use std::fmt;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    /// Flat unit amplitude on `[0, k0]`.
    Rectangular { k0: f64 },
    /// `exp(-(k-center)²/(2 width²))` restricted to `[lo, hi]`.
    TruncatedGaussian { center: f64, width: f64, lo: f64, hi: f64 },
    /// Piecewise-linear complex amplitude through `(k, value)` nodes.
    Tabulated { nodes: Vec<(f64, Complex)>, source: Option<String> },
}

impl Spectrum {
    pub fn rectangular(k0: f64) -> Result<Self> {
        if !k0.is_finite() {
            return Err(Error::NonFinite("rectangular spectrum k0"));
        }
        if k0 <= 0.0 {
            return Err(Error::Domain(format!("rectangular spectrum needs k0 > 0, got {k0}")));
        }
        Ok(Spectrum::Rectangular { k0 })
    }

    pub fn truncated_gaussian(center: f64, width: f64, lo: f64, hi: f64) -> Result<Self> {
        for (v, what) in [
            (center, "gaussian center"),
            (width, "gaussian width"),
            (lo, "gaussian lower cut"),
            (hi, "gaussian upper cut"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(what));
            }
        }
        if width <= 0.0 {
            return Err(Error::Domain(format!("gaussian width must be positive, got {width}")));
        }
        if lo < 0.0 || hi <= lo {
            return Err(Error::Domain(format!(
                "gaussian support needs 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Spectrum::TruncatedGaussian { center, width, lo, hi })
    }

    pub fn tabulated(nodes: Vec<(f64, Complex)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Domain("tabulated spectrum needs at least two nodes".into()));
        }
        for window in nodes.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(Error::Domain(format!(
                    "tabulated spectrum nodes must ascend strictly, got {} after {}",
                    window[1].0, window[0].0
                )));
            }
        }
        for &(k, v) in &nodes {
            if !k.is_finite() || !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("tabulated spectrum node"));
            }
            if k < 0.0 {
                return Err(Error::Domain(format!("tabulated node at negative wavenumber {k}")));
            }
        }
        Ok(Spectrum::Tabulated { nodes, source: None })
    }

    /// Load a tabulated spectrum from a CSV file with `k,re,im` rows.
    /// Empty lines, `#` comments and a literal `k,re,im` header are skipped.
    pub fn tabulated_from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut nodes = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "k,re,im" {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "{}:{}: expected `k,re,im`, got {line:?}",
                    path.display(),
                    idx + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{}:{}: bad number {s:?}", path.display(), idx + 1)))
            };
            nodes.push((parse(fields[0])?, Complex::new(parse(fields[1])?, parse(fields[2])?)));
        }
        let mut spectrum = Spectrum::tabulated(nodes)?;
        if let Spectrum::Tabulated { source, .. } = &mut spectrum {
            *source = Some(path.display().to_string());
        }
        Ok(spectrum)
    }

    /// Parse the `rect:` / `gauss:` / `table:` flag grammar.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("spectrum {text:?}: expected `kind:args`")))?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("spectrum {text:?}: bad number {s:?}")))
        };
        match kind {
            "rect" => Spectrum::rectangular(num(rest)?),
            "gauss" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::Parse(format!(
                        "spectrum {text:?}: gauss needs center,width,lo,hi"
                    )));
                }
                Spectrum::truncated_gaussian(num(parts[0])?, num(parts[1])?, num(parts[2])?, num(parts[3])?)
            }
            "table" => Spectrum::tabulated_from_csv(Path::new(rest)),
            other => Err(Error::Parse(format!("unknown spectrum kind {other:?}"))),
        }
    }

    /// Amplitude density at wavenumber `k`; zero off the support.
    pub fn amplitude(&self, k: f64) -> Complex {
        match self {
            Spectrum::Rectangular { k0 } => {
                if (0.0..=*k0).contains(&k) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
            Spectrum::TruncatedGaussian { center, width, lo, hi } => {
                if (*lo..=*hi).contains(&k) {
                    let u = (k - center) / width;
                    Complex::new((-0.5 * u * u).exp(), 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
            Spectrum::Tabulated { nodes, .. } => {
                let first = nodes.first().expect("validated").0;
                let last = nodes.last().expect("validated").0;
                if k < first || k > last {
                    return Complex::new(0.0, 0.0);
                }
                let idx = nodes.partition_point(|&(kn, _)| kn <= k).min(nodes.len() - 1);
                let (k1, v1) = nodes[idx - 1];
                let (k2, v2) = nodes[idx];
                let w = (k - k1) / (k2 - k1);
                v1 * (1.0 - w) + v2 * w
            }
        }
    }

    /// Support interval `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Spectrum::Rectangular { k0 } => (0.0, *k0),
            Spectrum::TruncatedGaussian { lo, hi, .. } => (*lo, *hi),
            Spectrum::Tabulated { nodes, .. } => (nodes[0].0, nodes[nodes.len() - 1].0),
        }
    }

    /// Largest wavenumber carried by the spectrum (sets oscillation scales).
    pub fn max_k(&self) -> f64 {
        self.support().1
    }

    /// Quadrature breakpoints: the support endpoints plus every interior
    /// tabulation node (the interpolant has kinks there).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Spectrum::Rectangular { k0 } => vec![0.0, *k0],
            Spectrum::TruncatedGaussian { lo, hi, .. } => vec![*lo, *hi],
            Spectrum::Tabulated { nodes, .. } => nodes.iter().map(|&(k, _)| k).collect(),
        }
    }

    /// Internal smoothness scale that panels must resolve, if any.
    pub fn smoothness_scale(&self) -> Option<f64> {
        match self {
            Spectrum::TruncatedGaussian { width, .. } => Some(*width),
            _ => None,
        }
    }

    /// True when the amplitude density is real-valued.
    pub fn is_real(&self) -> bool {
        match self {
            Spectrum::Rectangular { .. } | Spectrum::TruncatedGaussian { .. } => true,
            Spectrum::Tabulated { nodes, .. } => nodes.iter().all(|&(_, v)| v.im == 0.0),
        }
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spectrum::Rectangular { k0 } => write!(f, "rect:{k0}"),
            Spectrum::TruncatedGaussian { center, width, lo, hi } => {
                write!(f, "gauss:{center},{width},{lo},{hi}")
            }
            Spectrum::Tabulated { source: Some(path), .. } => write!(f, "table:{path}"),
            Spectrum::Tabulated { nodes, .. } => write!(f, "table:<{} inline nodes>", nodes.len()),
        }
    }
}
