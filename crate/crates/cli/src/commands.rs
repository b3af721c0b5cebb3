use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use amplikit::condition::{optimal_floor, SLOPE_STEP};
use amplikit::statevector::{run_trace, DenseUnitary, SearchInstance, UnitarySpec};
use amplikit::verify::{Section, Verifier};
use amplikit::{
    amplitude_closed, check_condition, grover_k, identical_k, model_trace, Complex64, Error, Method, PhaseConfig,
};

use crate::output::{Cell, Format, Table};
use crate::{Command, Grid, Overlap, Status, SweepMode, UnitaryKind};

/// Residual above which `simulate` reports failure.
const SIMULATION_TOLERANCE: f64 = 1e-9;

const CONDITION_COLUMNS: &[&str] = &[
    "theta",
    "phi",
    "p",
    "sin_delta",
    "beta_norm",
    "ratio",
    "satisfied",
    "k_opt_real",
    "k_opt_int",
    "period",
    "b_at_k_opt",
];

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Analyze {
            phases,
            overlap,
            format,
        } => analyze(phases.theta, phases.phi, &overlap, format),
        Command::Trace {
            phases,
            overlap,
            k_max,
            format,
        } => trace(phases.theta, phases.phi, &overlap, k_max, format),
        Command::Sweep {
            overlap,
            mode,
            angles,
            grid,
            phi_angles,
            phi_grid,
            format,
        } => {
            let primary = angles
                .or(grid.map(|Grid(g)| g))
                .context("one of --angles or --grid is required")?;
            let phis = phi_angles.or(phi_grid.map(|Grid(g)| g));
            sweep(&overlap, mode, &primary, phis.as_deref(), format)
        }
        Command::Simulate {
            n,
            gamma,
            tau,
            phases,
            k_max,
            unitary,
            seed,
            matrix,
            format,
        } => {
            let spec = match (unitary, seed, matrix) {
                (UnitaryKind::WalshHadamard, _, _) => UnitarySpec::WalshHadamard,
                (UnitaryKind::Random, Some(seed), _) => UnitarySpec::Random { seed },
                (UnitaryKind::Random, None, _) => bail!("--unitary random requires --seed"),
                (UnitaryKind::File, _, Some(path)) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    UnitarySpec::Dense(DenseUnitary::parse(&text).with_context(|| path.display().to_string())?)
                }
                (UnitaryKind::File, _, None) => bail!("--unitary file requires --matrix"),
            };
            let inst = SearchInstance::new(n, gamma, tau, spec, phases.theta, phases.phi)?;
            simulate(&inst, k_max, format)
        }
        Command::Verify { section } => verify(&section),
    }
}

fn emit(table: &Table, format: Format) -> Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    table.write(format, &mut lock)?;
    lock.flush()?;
    Ok(())
}

/// One row of [`CONDITION_COLUMNS`]. A vanishing cos φ leaves every derived
/// field empty and the condition unsatisfied.
fn condition_row(cfg: &PhaseConfig) -> Result<(Vec<Cell>, bool)> {
    let head = vec![cfg.theta().into(), cfg.phi().into(), cfg.p().into()];
    let v = match check_condition(cfg) {
        Ok(v) => v,
        Err(Error::DegeneratePhase) => {
            let mut row = head;
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, false.into()]);
            row.extend(std::iter::repeat_n(Cell::Empty, 4));
            return Ok((row, false));
        }
        Err(e) => return Err(e.into()),
    };
    let b_at = v
        .k_opt_real
        .map(|k| amplitude_closed(cfg, k).map(|a| a.b_norm))
        .transpose()?;
    let mut row = head;
    row.extend([
        v.sin_delta.into(),
        v.beta_norm.into(),
        v.ratio.into(),
        v.satisfied.into(),
        v.k_opt_real.into(),
        v.k_opt_int.into(),
        v.period.into(),
        b_at.into(),
    ]);
    Ok((row, v.satisfied))
}

fn analyze(theta: f64, phi: f64, overlap: &Overlap, format: Format) -> Result<Status> {
    let cfg = overlap.config(theta, phi)?;
    cfg.require_nondegenerate()?;
    let (row, satisfied) = condition_row(&cfg)?;
    let mut table = Table::new(CONDITION_COLUMNS);
    table.push(row);
    emit(&table, format)?;
    Ok(if satisfied { Status::Ok } else { Status::Negative })
}

fn trace(theta: f64, phi: f64, overlap: &Overlap, k_max: u64, format: Format) -> Result<Status> {
    let cfg = overlap.config(theta, phi)?;
    let trace = model_trace(&cfg, k_max)?;
    let mut table = Table::new(&["k", "b_rec", "b_closed", "b_poly", "residual"]);
    for s in trace.samples() {
        let norm = |m: Method| s.estimate(m).map(|e| e.b.norm());
        table.push(vec![
            s.k.into(),
            norm(Method::CoupledRecurrence).into(),
            s.b_closed.into(),
            norm(Method::Polynomial).into(),
            s.residual.into(),
        ]);
    }
    emit(&table, format)?;
    Ok(Status::Ok)
}

/// Worker pool sized by `AMPLIKIT_THREADS`, defaulting to the machine.
fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("AMPLIKIT_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .with_context(|| format!("AMPLIKIT_THREADS=`{value}` is not a positive integer"))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Evaluates `f` over `points` on the worker pool; rows keep input order.
fn par_rows<T: Sync>(points: &[T], f: impl Fn(&T) -> Result<Vec<Cell>> + Sync + Send) -> Result<Vec<Vec<Cell>>> {
    pool()?.install(|| points.par_iter().map(f).collect())
}

fn optional<T>(r: amplikit::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegeneratePhase) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn sweep(overlap: &Overlap, mode: SweepMode, angles: &[f64], phis: Option<&[f64]>, format: Format) -> Result<Status> {
    let u: Complex64 = overlap.value();
    // rejects an out-of-range overlap before any grid work
    let p = PhaseConfig::new(0.0, 0.0, u)?.p();

    let table = match mode {
        SweepMode::Identical => {
            let mut table = Table::new(&["phi", "k_ol_real", "k_ol_int"]);
            for row in par_rows(angles, |&phi| {
                let k = optional(identical_k(phi, p))?;
                Ok(vec![phi.into(), k.into(), k.map(optimal_floor).into()])
            })? {
                table.push(row);
            }
            table
        }
        SweepMode::GroverCompare => {
            let k_og = grover_k(p)?;
            let mut table = Table::new(&[
                "phi",
                "k_og",
                "k_ol",
                "k_og_int",
                "k_ol_int",
                "grover_not_slower",
                "slope",
            ]);
            for row in par_rows(angles, |&phi| {
                let k_ol = optional(identical_k(phi, p))?;
                let up = optional(identical_k(phi + SLOPE_STEP, p))?;
                let down = optional(identical_k(phi - SLOPE_STEP, p))?;
                let slope = k_ol.and(up.zip(down)).map(|(u, d)| (u - d) / (2.0 * SLOPE_STEP));
                Ok(vec![
                    phi.into(),
                    k_og.into(),
                    k_ol.into(),
                    optimal_floor(k_og).into(),
                    k_ol.map(optimal_floor).into(),
                    k_ol.map(|k| k_og <= k * (1.0 + 1e-12)).into(),
                    slope.into(),
                ])
            })? {
                table.push(row);
            }
            table
        }
        SweepMode::ConditionRegion => {
            let phis = phis.unwrap_or(angles);
            let points: Vec<(f64, f64)> = angles.iter().flat_map(|&t| phis.iter().map(move |&f| (t, f))).collect();
            let mut table = Table::new(CONDITION_COLUMNS);
            for row in par_rows(&points, |&(t, f)| Ok(condition_row(&PhaseConfig::new(t, f, u)?)?.0))? {
                table.push(row);
            }
            table
        }
    };
    emit(&table, format)?;
    Ok(Status::Ok)
}

fn simulate(inst: &SearchInstance, k_max: u64, format: Format) -> Result<Status> {
    let trace = run_trace(inst, k_max)?;
    let mut table = Table::new(&[
        "k",
        "a_re",
        "a_im",
        "b_re",
        "b_im",
        "b_abs",
        "b_model",
        "b_closed",
        "residual",
        "plane_residual",
        "norm_drift",
    ]);
    let mut worst: f64 = 0.0;
    for s in trace.samples() {
        let sim = s.estimate(Method::StateVector).expect("simulation estimate present");
        let model = s.estimate(Method::CoupledRecurrence).expect("model estimate present");
        let a = sim.a.unwrap_or_default();
        let plane = s.plane_residual.unwrap_or(f64::INFINITY);
        worst = worst.max(s.residual).max(plane);
        table.push(vec![
            s.k.into(),
            a.re.into(),
            a.im.into(),
            sim.b.re.into(),
            sim.b.im.into(),
            sim.b.norm().into(),
            model.b.norm().into(),
            s.b_closed.into(),
            s.residual.into(),
            plane.into(),
            s.norm_drift.into(),
        ]);
    }
    emit(&table, format)?;
    if worst > SIMULATION_TOLERANCE {
        eprintln!("residual {worst:e} exceeds {SIMULATION_TOLERANCE:e}");
        return Ok(Status::Negative);
    }
    Ok(Status::Ok)
}

fn verify(sections: &[Section]) -> Result<Status> {
    let sections = if sections.is_empty() {
        &Section::ALL[..]
    } else {
        sections
    };
    let report = Verifier::new().run(sections);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for o in &report.outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag}  {}/{}: {}", o.section, o.name, o.detail)?;
    }
    out.flush()?;
    let failed: Vec<String> = report.failures().map(|o| format!("{}/{}", o.section, o.name)).collect();
    if failed.is_empty() {
        Ok(Status::Ok)
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Ok(Status::Negative)
    }
}
