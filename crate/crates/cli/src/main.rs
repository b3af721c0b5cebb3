//! `amplikit`: analysis, tracing, sweeps, simulation and self-verification
//! for generalized quantum search with arbitrary phase rotations.
//!
//! Exit codes: 0 success (or condition satisfied), 1 condition unsatisfied or
//! a failed check, 2 usage or input error.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use amplikit::{parse_angle, Complex64, ComplexLiteral, PhaseConfig};
use output::Format;

#[derive(Parser)]
#[command(
    name = "amplikit",
    version,
    about = "Exact amplitudes and phase conditions for generalized quantum search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase condition, optimal iteration count and period for one configuration
    Analyze {
        #[command(flatten)]
        phases: Phases,
        #[command(flatten)]
        overlap: Overlap,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// |b_k| from every evaluator for k = 1..=k_max
    Trace {
        #[command(flatten)]
        phases: Phases,
        #[command(flatten)]
        overlap: Overlap,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k_max: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate a grid of angles
    Sweep {
        #[command(flatten)]
        overlap: Overlap,
        #[arg(long, value_enum)]
        mode: SweepMode,
        /// Comma separated angles (θ for condition_region, φ otherwise)
        #[arg(long, value_delimiter = ',', value_parser = angle, allow_hyphen_values = true, conflicts_with = "grid")]
        angles: Option<Vec<f64>>,
        /// Inclusive grid START:STOP:COUNT
        #[arg(long, value_parser = grid, allow_hyphen_values = true, conflicts_with = "angles")]
        grid: Option<Grid>,
        /// φ values for condition_region (defaults to the θ values)
        #[arg(long, value_delimiter = ',', value_parser = angle, allow_hyphen_values = true, conflicts_with = "phi_grid")]
        phi_angles: Option<Vec<f64>>,
        /// φ grid START:STOP:COUNT for condition_region
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        phi_grid: Option<Grid>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Full state-vector simulation checked against the 2×2 model
    Simulate {
        /// Number of qubits
        #[arg(long)]
        n: u32,
        /// Index of the initial basis state |γ⟩
        #[arg(long)]
        gamma: usize,
        /// Index of the desired basis state |τ⟩
        #[arg(long)]
        tau: usize,
        #[command(flatten)]
        phases: Phases,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k_max: u64,
        #[arg(long, value_enum, default_value = "walsh-hadamard")]
        unitary: UnitaryKind,
        /// Seed for --unitary random
        #[arg(long)]
        seed: Option<u64>,
        /// Matrix file for --unitary file
        #[arg(long)]
        matrix: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the invariant suite
    Verify {
        /// Restrict to the named sections (repeatable)
        #[arg(long)]
        section: Vec<amplikit::verify::Section>,
    },
}

#[derive(Args)]
struct Phases {
    /// Rotation angle for the initial state, e.g. 0, pi/3, -0.25
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    theta: f64,
    /// Rotation angle for the desired state
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Overlap {
    /// Real overlap p = ⟨τ|U|γ⟩ in (0, 1)
    #[arg(long)]
    p: Option<f64>,
    /// Complex overlap ⟨τ|U|γ⟩ written re,im
    #[arg(long, allow_hyphen_values = true)]
    utg: Option<ComplexLiteral>,
}

impl Overlap {
    fn value(&self) -> Complex64 {
        match (self.p, self.utg) {
            (Some(p), _) => Complex64::new(p, 0.0),
            (None, Some(u)) => u.into(),
            (None, None) => unreachable!("clap enforces one of --p, --utg"),
        }
    }

    fn config(&self, theta: f64, phi: f64) -> amplikit::Result<PhaseConfig> {
        PhaseConfig::new(theta, phi, self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    #[value(name = "identical")]
    Identical,
    #[value(name = "grover_compare")]
    GroverCompare,
    #[value(name = "condition_region")]
    ConditionRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitaryKind {
    WalshHadamard,
    Random,
    File,
}

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

/// Evenly spaced angles, both ends included.
#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("grid `{s}` is not START:STOP:COUNT"));
    };
    let (start, stop) = (angle(start)?, angle(stop)?);
    let count: usize = count
        .parse()
        .ok()
        .filter(|&c| c >= 1)
        .ok_or_else(|| format!("grid count `{count}` must be a positive integer"))?;
    if count == 1 {
        return Ok(Grid(vec![start]));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok(Grid(
        (0..count)
            .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
            .collect(),
    ))
}

/// How a command ended, mapped onto the process exit code. Errors map to 2.
pub enum Status {
    Ok,
    /// Unsatisfied condition or failed check.
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
