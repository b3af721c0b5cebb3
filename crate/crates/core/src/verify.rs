//! Self-verification suite: every algebraic identity, cross-model agreement
//! and reference table the library relies on, grouped into named sections.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condition::{
    check_condition, compare_grover_identical, corollary1_verdict, corollary2_excludes, grover_k, grover_k_approx,
    identical_k, monotone_window_check, optimal_k, period, special_phi_zero, special_theta_zero,
};
use crate::error::{Error, Result};
use crate::operator::{det_closed_form, trace_closed_form, trace_magnitude_bound_check};
use crate::recurrence::{coefficient_induction_check, polynomial_b, PairIter, ThreeTermIter, MAX_POLY_STEP};
use crate::spectral::{amplitude_closed, eigenvalues};
use crate::statevector::{run_trace, SearchInstance, UnitarySpec};
use crate::types::{IterationMatrix, PhaseConfig};

/// Produces the iteration matrix for a configuration. The suite takes this as
/// a parameter so that a deliberately broken builder can be checked to fail.
pub type MatrixBuilder = fn(&PhaseConfig) -> IterationMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Section {
    /// Binomial-weight and coefficient recursions of the polynomial form.
    Induction,
    /// Determinant, trace, trace bound, |β| and eigenvalue separation of M.
    Identities,
    /// Coupled, three-term, polynomial and sine-form amplitudes agree.
    Agreement,
    /// Corollary verdicts and the φ = 0, θ = 0 boundaries.
    Corollaries,
    /// Identical-angle optimal counts and the comparison with the original search.
    Table,
    Periods,
    /// Full simulation against the 2×2 model.
    StateVector,
    /// Worked examples with known closed-form answers.
    Examples,
}

impl Section {
    pub const ALL: [Section; 8] = [
        Section::Induction,
        Section::Identities,
        Section::Agreement,
        Section::Corollaries,
        Section::Table,
        Section::Periods,
        Section::StateVector,
        Section::Examples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Induction => "induction",
            Section::Identities => "identities",
            Section::Agreement => "agreement",
            Section::Corollaries => "corollaries",
            Section::Table => "table",
            Section::Periods => "periods",
            Section::StateVector => "statevector",
            Section::Examples => "examples",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Section {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Section::ALL.into_iter().find(|sec| sec.name() == s).ok_or_else(|| {
            let names: Vec<_> = Section::ALL.iter().map(|s| s.name()).collect();
            format!("unknown section `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub section: Section,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

/// Runs the suite with a configurable matrix builder.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    builder: MatrixBuilder,
    seed: u64,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier {
            builder: crate::operator::build_iteration_matrix,
            seed: 0x5eed,
        }
    }
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builder(mut self, builder: MatrixBuilder) -> Self {
        self.builder = builder;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn run(&self, sections: &[Section]) -> VerifyReport {
        let outcomes = sections.iter().flat_map(|&s| self.run_section(s)).collect();
        VerifyReport { outcomes }
    }

    pub fn run_all(&self) -> VerifyReport {
        self.run(&Section::ALL)
    }

    pub fn run_section(&self, section: Section) -> Vec<CheckOutcome> {
        let checks: Vec<(&'static str, Result<String>)> = match section {
            Section::Induction => vec![("coefficient-induction", induction_check())],
            Section::Identities => identity_checks(self.builder),
            Section::Agreement => vec![(
                "three-way-agreement",
                agreement_check(self.builder, &random_configs(self.seed, 200), 200),
            )],
            Section::Corollaries => corollary_checks(),
            Section::Table => table_checks(),
            Section::Periods => vec![("periods", periods_check())],
            Section::StateVector => vec![("plane-reduction", statevector_check(self.seed, &[2, 4, 6], 3, 100))],
            Section::Examples => example_checks(),
        };
        checks
            .into_iter()
            .map(|(name, r)| {
                let (passed, detail) = match r {
                    Ok(d) => (true, d),
                    Err(e) => (false, e.to_string()),
                };
                CheckOutcome {
                    section,
                    name,
                    passed,
                    detail,
                }
            })
            .collect()
    }
}

fn fail<T>(msg: String) -> Result<T> {
    Err(Error::CheckFailed(msg))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        fail(msg())
    }
}

fn induction_check() -> Result<String> {
    for k in 2..=MAX_POLY_STEP {
        ensure(coefficient_induction_check(k), || {
            format!("coefficient recursion fails at k = {k}")
        })?;
    }
    Ok(format!("k = 2..={MAX_POLY_STEP}"))
}

/// Odd multiples of π/count; for even count none is a zero of cos.
fn angle_grid(count: usize) -> impl Iterator<Item = f64> + Clone {
    (0..count).map(move |i| -PI + PI * (2 * i + 1) as f64 / count as f64)
}

fn identity_grid() -> Vec<PhaseConfig> {
    let ps: Vec<f64> = (0..20).map(|i| 0.025 + 0.05 * i as f64).collect();
    let mut out = Vec::with_capacity(24 * 24 * ps.len());
    for t in angle_grid(24) {
        for f in angle_grid(24) {
            for (j, &p) in ps.iter().enumerate() {
                let u = Complex64::from_polar(p, 0.37 * j as f64);
                out.push(PhaseConfig::new(t, f, u).expect("grid overlap in range"));
            }
        }
    }
    out
}

fn identity_checks(builder: MatrixBuilder) -> Vec<(&'static str, Result<String>)> {
    let grid = identity_grid();
    let n = grid.len();
    let mut det_err: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    let mut beta_err: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut bound_ok = true;
    for cfg in &grid {
        let m = builder(cfg);
        det_err = det_err.max((m.det() - det_closed_form(cfg)).norm());
        trace_err = trace_err.max((m.trace() - trace_closed_form(cfg)).norm());
        beta_err = beta_err.max((m.beta.norm() - cfg.beta_norm()).abs());
        bound_ok &= trace_magnitude_bound_check(cfg) && m.trace().norm() < 2.0;
        let (z1, z2) = eigenvalues(&m);
        min_gap = min_gap.min((z1 - z2).norm());
    }
    let within = |e: f64, what: &str| -> Result<String> {
        ensure(e <= 1e-12, || {
            format!("{what}: max deviation {e:e} over {n} grid points")
        })?;
        Ok(format!("max deviation {e:e} over {n} points"))
    };
    vec![
        ("determinant", within(det_err, "det M ≠ e^{i2(θ+φ)}")),
        ("trace", within(trace_err, "tr M ≠ 2x·e^{i(θ+φ)}")),
        (
            "trace-bound",
            ensure(bound_ok, || "|x| < 1 violated with cosθcosφ ≠ 0".to_string())
                .map(|_| format!("strict on {n} points")),
        ),
        ("beta-modulus", within(beta_err, "|β| ≠ 2p|cosφ|")),
        (
            "eigen-separation",
            ensure(min_gap > 1e-9, || format!("|z1 − z2| = {min_gap:e}"))
                .map(|_| format!("min |z1 − z2| = {min_gap:e}")),
        ),
    ]
}

/// Seeded non-degenerate configurations: θ, φ uniform on [−π, π), p in
/// [0.02, 0.98] and a uniform overlap phase; draws with |cos φ| < 0.01 are redrawn.
pub fn random_configs(seed: u64, count: usize) -> Vec<PhaseConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let theta = rng.random_range(-PI..PI);
        let phi = rng.random_range(-PI..PI);
        let p = rng.random_range(0.02..0.98);
        let w = rng.random_range(-PI..PI);
        if phi.cos().abs() < 0.01 {
            continue;
        }
        out.push(PhaseConfig::new(theta, phi, Complex64::from_polar(p, w)).expect("p in range"));
    }
    out
}

/// Largest |b_k| disagreements seen by [`agreement_deviation`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AgreementDeviation {
    /// Pairwise among coupled recurrence, three-term recurrence and sine form.
    pub recurrence_closed: f64,
    /// Polynomial form against the coupled recurrence, k ≤ 40.
    pub polynomial: f64,
}

/// Compares |b_k| across evaluators for k = 1..=k_max, using `builder` for the
/// matrix-based evaluators and the sine form as the matrix-free reference.
pub fn agreement_deviation(cfg: &PhaseConfig, builder: MatrixBuilder, k_max: u64) -> Result<AgreementDeviation> {
    let m = builder(cfg);
    let mut dev = AgreementDeviation::default();
    let steps = PairIter::new(m).skip(1).zip(ThreeTermIter::new(&m));
    for (pair, b3) in steps.take(k_max as usize) {
        let k = pair.k;
        let closed = amplitude_closed(cfg, k as f64)?.b_norm;
        let (coupled, three) = (pair.b.norm(), b3.norm());
        let worst = (coupled - three)
            .abs()
            .max((coupled - closed).abs())
            .max((three - closed).abs());
        dev.recurrence_closed = dev.recurrence_closed.max(worst);
        if k <= MAX_POLY_STEP {
            let poly = polynomial_b(&m, k)?.norm();
            dev.polynomial = dev.polynomial.max((poly - coupled).abs());
        }
    }
    Ok(dev)
}

pub fn agreement_check(builder: MatrixBuilder, configs: &[PhaseConfig], k_max: u64) -> Result<String> {
    let mut worst = AgreementDeviation::default();
    for cfg in configs {
        let d = agreement_deviation(cfg, builder, k_max)?;
        ensure(d.recurrence_closed <= 1e-10 && d.polynomial <= 1e-10, || {
            format!(
                "θ={}, φ={}, U={}: deviations {:e} / {:e}",
                cfg.theta(),
                cfg.phi(),
                cfg.u_tau_gamma(),
                d.recurrence_closed,
                d.polynomial
            )
        })?;
        worst.recurrence_closed = worst.recurrence_closed.max(d.recurrence_closed);
        worst.polynomial = worst.polynomial.max(d.polynomial);
    }
    Ok(format!(
        "{} configs, k ≤ {k_max}: max {:e}, polynomial max {:e}",
        configs.len(),
        worst.recurrence_closed,
        worst.polynomial
    ))
}

/// The direct condition on a grid against both corollaries.
fn corollary_grid_check() -> Result<String> {
    let (mut cor1_points, mut cor2_points) = (0usize, 0usize);
    for t in angle_grid(60) {
        for f in angle_grid(60) {
            for p in [0.05, 0.2, 0.45, 0.7, 0.9] {
                let cfg = PhaseConfig::with_p(t, f, p)?;
                let direct = check_condition(&cfg)?.satisfied;
                match corollary1_verdict(&cfg) {
                    Ok(v) => {
                        cor1_points += 1;
                        ensure(v == direct, || format!("corollary 1 disagrees at θ={t}, φ={f}, p={p}"))?;
                    }
                    Err(Error::HypothesisViolated(_) | Error::NumericalDomain { .. }) => {}
                    Err(e) => return Err(e),
                }
                match corollary2_excludes(&cfg) {
                    Ok(excludes) => {
                        cor2_points += 1;
                        ensure(!(excludes && direct), || {
                            format!("corollary 2 excludes a satisfied point θ={t}, φ={f}, p={p}")
                        })?;
                    }
                    Err(Error::HypothesisViolated(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(format!(
        "{cor1_points} points for corollary 1, {cor2_points} for corollary 2"
    ))
}

/// Root of `g` on [lo, hi] by bisection; `g(lo)` and `g(hi)` must differ.
fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> bool) -> f64 {
    let at_lo = g(lo);
    debug_assert_ne!(at_lo, g(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Where the direct condition switches along θ (φ = 0) or φ (θ = 0).
pub fn direct_boundary(vary_theta: bool, p: f64, lo: f64, hi: f64) -> Result<f64> {
    let satisfied = |x: f64| {
        let (t, f) = if vary_theta { (x, 0.0) } else { (0.0, x) };
        PhaseConfig::with_p(t, f, p)
            .and_then(|c| check_condition(&c))
            .map(|v| v.satisfied)
            .unwrap_or(false)
    };
    if satisfied(lo) == satisfied(hi) {
        return fail(format!("no boundary on [{lo}, {hi}] at p = {p}"));
    }
    Ok(bisect(lo, hi, satisfied))
}

fn boundary_check() -> Result<String> {
    let mut worst: f64 = 0.0;
    for p in [0.1f64, 0.2, 0.3, 0.4] {
        // φ = 0: |sin θ| = 2p²/|1 − 2p²|
        let formula = (2.0 * p * p / (1.0 - 2.0 * p * p)).asin();
        let direct = direct_boundary(true, p, 0.0, FRAC_PI_2)?;
        worst = worst.max((formula - direct).abs());
        ensure(
            special_phi_zero(formula - 1e-6, p) && !special_phi_zero(formula + 1e-6, p),
            || format!("φ = 0 formula does not switch at its boundary, p = {p}"),
        )?;

        // θ = 0: cos²φ = 1/(1 + 4p⁴)
        let formula = (1.0 / (1.0 + 4.0 * p.powi(4))).sqrt().acos();
        let direct = direct_boundary(false, p, 0.0, 1.2)?;
        worst = worst.max((formula - direct).abs());
        ensure(
            special_theta_zero(formula - 1e-6, p) && !special_theta_zero(formula + 1e-6, p),
            || format!("θ = 0 formula does not switch at its boundary, p = {p}"),
        )?;
    }
    ensure(worst <= 1e-9, || format!("boundary mismatch {worst:e}"))?;
    Ok(format!("max boundary mismatch {worst:e}"))
}

fn monotone_check() -> Result<String> {
    let mut count = 0;
    for t in angle_grid(16) {
        for f in angle_grid(16) {
            for p in [0.05, 0.3, 0.6] {
                let cfg = PhaseConfig::with_p(t, f, p)?;
                let v = check_condition(&cfg)?;
                let k_real = match v.k_opt_real {
                    Some(k) => k,
                    None => continue,
                };
                let peak = amplitude_closed(&cfg, k_real)?.b_norm;
                ensure((peak - 1.0).abs() <= 1e-10, || {
                    format!("|b(k_real)| = {peak} at θ={t}, φ={f}, p={p}")
                })?;
                ensure(monotone_window_check(&cfg)?, || {
                    format!("|b| not increasing before k_real at θ={t}, φ={f}, p={p}")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} satisfied grid points"))
}

fn corollary_checks() -> Vec<(&'static str, Result<String>)> {
    vec![
        ("corollary-grid", corollary_grid_check()),
        ("special-boundaries", boundary_check()),
        ("optimum-and-monotone", monotone_check()),
    ]
}

const TABLE_ANGLES: [f64; 6] = [0.0, PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0, PI];
const TABLE_FLOORS: [u64; 6] = [7, 8, 15, 15, 8, 7];

fn table_checks() -> Vec<(&'static str, Result<String>)> {
    let floors = || -> Result<String> {
        for (phi, want) in TABLE_ANGLES.iter().zip(TABLE_FLOORS) {
            let (_, from_condition) = optimal_k(&PhaseConfig::with_p(*phi, *phi, 0.1)?)?;
            let from_formula = identical_k(*phi, 0.1)?.floor() as u64;
            ensure(from_condition == want && from_formula == want, || {
                format!("φ = {phi}: got {from_condition} / {from_formula}, expected {want}")
            })?;
        }
        Ok(format!("floors {TABLE_FLOORS:?}"))
    };
    let comparison = || -> Result<String> {
        let grid: Vec<f64> = (0..50)
            .map(|i| PI * i as f64 / 49.0)
            .filter(|f| f.cos().abs() > 1e-3)
            .collect();
        let report = compare_grover_identical(0.1, &grid)?;
        ensure(report.holds(), || format!("comparison fails: {report:?}"))?;
        let k = grover_k(0.01)?;
        let gap = (k - grover_k_approx(0.01)?).abs() / k;
        ensure(gap < 0.01, || format!("π/4p gap {gap} at p = 0.01"))?;
        Ok(format!(
            "{} grid points, π/4p gap {gap:e} at p = 0.01",
            report.rows.len()
        ))
    };
    vec![("identical-floors", floors()), ("grover-comparison", comparison())]
}

fn periods_check() -> Result<String> {
    let cases = [
        (0.0, 0.1, 15.7, 0.05),
        (0.0, 0.01, 157.0, 0.5),
        (PI / 4.0, 0.1, 22.2, 0.05),
    ];
    let mut values = Vec::new();
    for (angle, p, want, tol) in cases {
        let t = period(&PhaseConfig::with_p(angle, angle, p)?)?;
        ensure((t - want).abs() <= tol, || {
            format!("T = {t} at angle {angle}, p = {p}; expected {want} ± {tol}")
        })?;
        values.push(format!("{t:.4}"));
    }
    Ok(format!("T = {}", values.join(", ")))
}

/// Simulates Walsh–Hadamard instances with seeded random (θ, φ) and checks
/// the extracted amplitudes, plane residual and norm drift against the model.
pub fn statevector_check(seed: u64, qubits: &[u32], draws: usize, k_max: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_plane: f64 = 0.0;
    for &n in qubits {
        let dim = 1usize << n;
        let mut done = 0;
        while done < draws {
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(-PI..PI);
            if phi.cos().abs() < 0.01 {
                continue;
            }
            let gamma = rng.random_range(0..dim);
            let tau = (gamma + rng.random_range(1..dim)) % dim;
            let inst = SearchInstance::new(n, gamma, tau, UnitarySpec::WalshHadamard, theta, phi)?;
            let trace = run_trace(&inst, k_max)?;
            for s in trace.samples() {
                let plane = s.plane_residual.unwrap_or(f64::INFINITY);
                let drift = s.norm_drift.unwrap_or(f64::INFINITY);
                ensure(s.residual < 1e-11 && plane < 1e-11 && drift < 1e-12, || {
                    format!(
                        "n={n}, θ={theta}, φ={phi}, k={}: residual {:e}, plane {plane:e}, drift {drift:e}",
                        s.k, s.residual
                    )
                })?;
                worst = worst.max(s.residual);
                worst_plane = worst_plane.max(plane);
            }
            done += 1;
        }
    }
    Ok(format!("max residual {worst:e}, max plane residual {worst_plane:e}"))
}

fn example_checks() -> Vec<(&'static str, Result<String>)> {
    let sine_rows = || -> Result<String> {
        for (phi, step) in [(0.0, FRAC_PI_2), (PI / 6.0, PI / 3.0)] {
            for p in [0.05, 0.1, 0.3] {
                let cfg = PhaseConfig::with_p(FRAC_PI_2, phi, p)?;
                for k in 0..=50 {
                    let got = amplitude_closed(&cfg, k as f64)?.b_norm;
                    let want = 2.0 * p * (k as f64 * step).sin().abs();
                    ensure((got - want).abs() <= 1e-12, || {
                        format!("φ={phi}, p={p}, k={k}: {got} vs {want}")
                    })?;
                }
            }
        }
        Ok("k = 0..=50".into())
    };
    let unit_step = || -> Result<String> {
        let cfg = PhaseConfig::with_p(PI / 3.0, 0.0, 0.5)?;
        let (k_real, k_int) = optimal_k(&cfg)?;
        let b = amplitude_closed(&cfg, k_real)?.b_norm;
        ensure(
            (k_real - 1.0).abs() <= 1e-9 && k_int == 1 && (b - 1.0).abs() <= 1e-10,
            || format!("k_real = {k_real}, |b| = {b}"),
        )?;
        Ok(format!("k_real = {k_real}"))
    };
    let unsatisfied = || -> Result<String> {
        let v = check_condition(&PhaseConfig::with_p(FRAC_PI_2, 0.0, 0.1)?)?;
        ensure(!v.satisfied && (v.ratio - 5.0).abs() < 1e-12, || {
            format!("ratio {}", v.ratio)
        })?;
        Ok("ratio 5".into())
    };
    vec![
        ("sine-rows", sine_rows()),
        ("single-step-optimum", unit_step()),
        ("decoupled-unsatisfied", unsatisfied()),
    ]
}
