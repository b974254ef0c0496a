use crate::Complex;

/// Unified error type for the crate.
///
/// The variants separate *usage* problems (bad arguments, bad configuration)
/// from *numerical* failures (quadrature that cannot reach tolerance, unstable
/// time stepping, undetectable peaks), so callers can map them to distinct
/// process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument that must be finite was NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// An argument was outside the documented domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed configuration (CLI flags, config file, simulation setup).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Adaptive quadrature exhausted its subdivision budget.  Carries the
    /// best available estimate together with the achieved error bound.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    Quadrature { estimate: Complex, error_bound: f64 },

    /// The radial tail estimate of a volume integral exceeded the trust
    /// threshold; the reported value would not be meaningful.
    #[error("volume quadrature tail too large: estimate {estimate}, tail {tail:e}")]
    TailDivergence { estimate: f64, tail: f64 },

    /// A peak scan found an identically zero field.
    #[error("no peak: {0}")]
    NoPeak(String),

    /// A detector trace never rose above the detection threshold.
    #[error("no signal on detector at rho={rho}, z={z}")]
    NoSignal { rho: f64, z: f64 },

    /// Time stepping produced a non-finite field value.
    #[error("time stepping became unstable at step {step}")]
    Unstable { step: usize },

    /// I/O failure while reading or writing data files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed data while parsing a file (tabulated spectrum, field slice).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of numerical processes (as opposed to bad usage).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::TailDivergence { .. }
                | Error::NoPeak(_)
                | Error::NoSignal { .. }
                | Error::Unstable { .. }
                | Error::NonFinite(_)
        )
    }
}
