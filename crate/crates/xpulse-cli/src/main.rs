//! Command-line front end for the pulse laboratory.
//!
//! Exit codes: 0 when the command ran and every gated check passed, 1 when a
//! gated verification failed, 2 on usage or configuration errors, 3 when a
//! numerical procedure could not reach its accuracy target or went unstable.

mod commands;
mod manifest;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use commands::{
    exec_boost, exec_energy, exec_fdtd, exec_field, exec_peak, exec_rerun, exec_verify,
    BoostParams, CommandOutcome, EnergyParams, FdtdParams, FieldParams, PeakParams, PulseParams,
    VerifyParams,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "xpulse",
    version,
    about = "Numerical laboratory for localized wave pulses with superluminal peaks"
)]
struct Cli {
    /// Cap the number of worker threads (outputs do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for output files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    outdir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PulseFlags {
    /// Axicon angle in radians (exclusive with --eta-deg).
    #[arg(long, conflicts_with = "eta_deg")]
    eta: Option<f64>,

    /// Axicon angle in degrees.
    #[arg(long = "eta-deg")]
    eta_deg: Option<f64>,

    /// Half-width of the temporal support window.
    #[arg(long = "T", default_value_t = 1.0)]
    t_window: f64,

    /// Spectral profile: rect:<k0>, gauss:<center>,<width>,<lo>,<hi> or table:<path>.
    #[arg(long, default_value = "rect:1")]
    spectrum: String,
}

impl PulseFlags {
    fn resolve(&self) -> Result<PulseParams> {
        PulseParams::from_flags(self.eta, self.eta_deg, self.t_window, self.spectrum.clone())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample the exact field on a coordinate plane and write it as CSV.
    Field {
        #[command(flatten)]
        pulse: PulseFlags,
        /// The two swept axes, e.g. t,rho or z,t.
        #[arg(long, default_value = "rho,z")]
        plane: String,
        /// Fix the time coordinate (when t is not in --plane).
        #[arg(long)]
        t: Option<f64>,
        /// Fix the radial coordinate (when rho is not in --plane).
        #[arg(long)]
        rho: Option<f64>,
        /// Fix the axial coordinate (when z is not in --plane).
        #[arg(long)]
        z: Option<f64>,
        /// Time axis as min:step:count.
        #[arg(long = "t-range")]
        t_range: Option<String>,
        /// Radial axis as min:step:count.
        #[arg(long = "rho-range")]
        rho_range: Option<String>,
        /// Axial axis as min:step:count.
        #[arg(long = "z-range")]
        z_range: Option<String>,
        /// Sample the electromagnetic components instead of the scalar field.
        #[arg(long)]
        em: bool,
        /// Output file name (written under --outdir).
        #[arg(long, default_value = "slice.csv")]
        output: String,
    },
    /// Compare the quadrature energy against its spectral closed form.
    Energy {
        #[command(flatten)]
        pulse: PulseFlags,
        /// Check the electromagnetic energy instead of the scalar one.
        #[arg(long)]
        em: bool,
        /// Evaluation time (defaults to a library-chosen interior time).
        #[arg(long)]
        time: Option<f64>,
        /// Truncate the radial integral at this radius instead of the
        /// automatic tail-controlled choice.
        #[arg(long = "rho-max")]
        rho_max: Option<f64>,
        /// Relative bound on the discarded radial tail.
        #[arg(long = "tail-limit", default_value_t = 0.05)]
        tail_limit: f64,
        /// Largest acceptable |numeric/analytic - 1|.
        #[arg(long, default_value_t = 0.02)]
        gate: f64,
        /// Largest acceptable relative gap between the two energy halves.
        #[arg(long = "equipartition-gate", default_value_t = 0.03)]
        equipartition_gate: f64,
    },
    /// Check field equations, support geometry and plane-data consistency.
    Verify {
        #[command(flatten)]
        pulse: PulseFlags,
        /// Evaluation time for the residual region.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Coarse stencil spacing.
        #[arg(long = "h-coarse", default_value_t = 0.02)]
        h_coarse: f64,
        /// Fine stencil spacing (typically half the coarse one).
        #[arg(long = "h-fine", default_value_t = 0.01)]
        h_fine: f64,
        /// Radial extent of the residual region.
        #[arg(long = "rho-max", default_value_t = 1.2)]
        rho_max: f64,
        /// Radial sample count.
        #[arg(long = "rho-samples", default_value_t = 7)]
        rho_samples: usize,
        /// Axial lower bound of the residual region.
        #[arg(long = "z-min", default_value_t = -0.8)]
        z_min: f64,
        /// Axial upper bound of the residual region.
        #[arg(long = "z-max", default_value_t = 0.8)]
        z_max: f64,
        /// Axial sample count.
        #[arg(long = "z-samples", default_value_t = 9)]
        z_samples: usize,
    },
    /// Check the Lorentz-boost structure of the pulse.
    Boost {
        #[command(flatten)]
        pulse: PulseFlags,
        /// Number of boosted events for the two-route comparison.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Co-moving evaluation time (defaults to -0.4 T / sin eta).
        #[arg(long = "t-prime")]
        t_prime: Option<f64>,
        /// Radius of the co-moving energy cylinder.
        #[arg(long = "cylinder-radius", default_value_t = 3.0)]
        cylinder_radius: f64,
        /// Length of the co-moving energy cylinder.
        #[arg(long = "cylinder-length", default_value_t = 2.0)]
        cylinder_length: f64,
    },
    /// Track the pulse peak and measure its speed and support length.
    Peak {
        #[command(flatten)]
        pulse: PulseFlags,
        /// Comma-separated scan times (default: 1.5T,2T,2.5T,3T).
        #[arg(long)]
        times: Option<String>,
        /// Axial scan step for the support-length measurement.
        #[arg(long = "support-step")]
        support_step: Option<f64>,
    },
    /// Run a finite-difference aperture or Cauchy-data experiment.
    Fdtd {
        /// Simulation config file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Fraction of the trace maximum that defines the front arrival.
        #[arg(long = "front-threshold", default_value_t = 1e-3)]
        front_threshold: f64,
    },
    /// Re-execute a recorded run and compare every output byte for byte.
    Rerun {
        /// Manifest file written by a previous run.
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn dispatch(cli: &Cli) -> Result<CommandOutcome> {
    let outdir = &cli.outdir;
    match &cli.command {
        Command::Field {
            pulse,
            plane,
            t,
            rho,
            z,
            t_range,
            rho_range,
            z_range,
            em,
            output,
        } => {
            let params = FieldParams::from_flags(
                pulse.resolve()?,
                plane,
                *t,
                *rho,
                *z,
                t_range.as_deref(),
                rho_range.as_deref(),
                z_range.as_deref(),
                *em,
                output.clone(),
            )?;
            exec_field(&params, outdir)
        }
        Command::Energy { pulse, em, time, rho_max, tail_limit, gate, equipartition_gate } => {
            let params = EnergyParams {
                pulse: pulse.resolve()?,
                em: *em,
                time: *time,
                rho_max: *rho_max,
                tail_limit: *tail_limit,
                gate: *gate,
                equipartition_gate: *equipartition_gate,
            };
            exec_energy(&params, outdir)
        }
        Command::Verify {
            pulse,
            t,
            h_coarse,
            h_fine,
            rho_max,
            rho_samples,
            z_min,
            z_max,
            z_samples,
        } => {
            let params = VerifyParams {
                pulse: pulse.resolve()?,
                t: *t,
                h_coarse: *h_coarse,
                h_fine: *h_fine,
                rho_max: *rho_max,
                rho_samples: *rho_samples,
                z_min: *z_min,
                z_max: *z_max,
                z_samples: *z_samples,
            };
            exec_verify(&params, outdir)
        }
        Command::Boost { pulse, count, t_prime, cylinder_radius, cylinder_length } => {
            let resolved = pulse.resolve()?;
            let geometry = xpulse::AxiconGeometry::new(resolved.eta, resolved.t_window)?;
            let t_prime = t_prime
                .unwrap_or_else(|| -0.4 * geometry.t_window() / geometry.sin_eta());
            let params = BoostParams {
                pulse: resolved,
                count: *count,
                t_prime,
                cylinder_radius: *cylinder_radius,
                cylinder_length: *cylinder_length,
            };
            exec_boost(&params, outdir)
        }
        Command::Peak { pulse, times, support_step } => {
            let resolved = pulse.resolve()?;
            let t_win = resolved.t_window;
            let times = match times {
                Some(list) => list
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| anyhow::anyhow!("bad time {v:?}: {e}"))
                    })
                    .collect::<Result<Vec<f64>>>()?,
                None => vec![1.5 * t_win, 2.0 * t_win, 2.5 * t_win, 3.0 * t_win],
            };
            let spectrum = xpulse::Spectrum::parse(&resolved.spectrum)?;
            let support_step = support_step.unwrap_or(0.02 / spectrum.max_k());
            let params = PeakParams { pulse: resolved, times, support_step };
            exec_peak(&params, outdir)
        }
        Command::Fdtd { config, front_threshold } => {
            let params =
                FdtdParams { config_path: config.clone(), front_threshold: *front_threshold };
            exec_fdtd(&params, outdir)
        }
        Command::Rerun { manifest } => exec_rerun(manifest, outdir),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Field { .. } => "field",
        Command::Energy { .. } => "energy",
        Command::Verify { .. } => "verify",
        Command::Boost { .. } => "boost",
        Command::Peak { .. } => "peak",
        Command::Fdtd { .. } => "fdtd",
        Command::Rerun { .. } => "rerun",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // A zero or duplicate initialization is a usage problem we can ignore;
        // the thread cap only affects scheduling, never results.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            let manifest_name = format!("{}.manifest", command_name(&cli.command));
            if let Err(err) = outcome.manifest.write(&cli.outdir.join(manifest_name)) {
                eprintln!("error: {err:#}");
                return ExitCode::from(2);
            }
            if outcome.gates_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let numerical = err
                .downcast_ref::<xpulse::Error>()
                .is_some_and(xpulse::Error::is_numerical);
            ExitCode::from(if numerical { 3 } else { 2 })
        }
    }
}
