//! The phase condition `sin Δ ≤ |β|` and everything derived from it: optimal
//! iteration counts, the two corollaries, the φ = 0 and θ = 0 special cases,
//! periodicity, monotonicity up to the optimum, and the comparison between
//! the original search and identical rotation angles.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::operator::build_iteration_matrix;
use crate::recurrence::ThreeTermIter;
use crate::spectral::{amplitude_closed, clamp_unit, spectral_decompose};
use crate::types::{PhaseConfig, DEGENERATE_COS_PHI};

/// Ratios up to `1 + CONDITION_SLACK` count as satisfied; configurations that
/// sit exactly on the boundary analytically land within a few ulps of 1.
pub const CONDITION_SLACK: f64 = 1e-12;

/// Tolerance used when taking the floor of the real optimum.
const FLOOR_SLACK: f64 = 1e-9;

/// Outcome of evaluating the phase condition for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVerdict {
    pub sin_delta: f64,
    /// |β| = 2p|cos φ|.
    pub beta_norm: f64,
    /// sin Δ / |β|.
    pub ratio: f64,
    pub satisfied: bool,
    /// `(1/Δ)·arcsin(sin Δ / |β|)`, where |b| reaches 1.
    pub k_opt_real: Option<f64>,
    /// `⌊k_opt_real⌋`.
    pub k_opt_int: Option<u64>,
    /// π/Δ.
    pub period: f64,
}

/// Evaluates the necessary and sufficient condition for some k to give |b_k| = 1.
pub fn check_condition(cfg: &PhaseConfig) -> Result<PhaseVerdict> {
    let spec = spectral_decompose(cfg)?;
    let beta_norm = cfg.beta_norm();
    let ratio = spec.sin_delta / beta_norm;
    let satisfied = ratio <= 1.0 + CONDITION_SLACK;

    debug_assert!(
        {
            let m = build_iteration_matrix(cfg);
            let matrix_sin = (1.0 - m.trace().norm_sqr() / 4.0).max(0.0).sqrt();
            let matrix_ratio = matrix_sin / m.beta.norm();
            (matrix_ratio - 1.0).abs() < 1e-8 || (matrix_ratio <= 1.0) == satisfied
        },
        "trace form of the condition disagrees"
    );

    let k_opt_real = satisfied.then(|| ratio.min(1.0).asin() / spec.delta);
    Ok(PhaseVerdict {
        sin_delta: spec.sin_delta,
        beta_norm,
        ratio,
        satisfied,
        k_opt_real,
        k_opt_int: k_opt_real.map(optimal_floor),
        period: spec.period(),
    })
}

/// `⌊k⌋` with a 1e-9 allowance, so optimal counts that are integers
/// analytically do not drop by one through rounding.
pub fn optimal_floor(k: f64) -> u64 {
    (k + FLOOR_SLACK).floor() as u64
}

/// The real optimum and its floor. Fails when the condition does not hold.
pub fn optimal_k(cfg: &PhaseConfig) -> Result<(f64, u64)> {
    let v = check_condition(cfg)?;
    match (v.k_opt_real, v.k_opt_int) {
        (Some(real), Some(int)) => Ok((real, int)),
        _ => Err(Error::ConditionUnsatisfied { ratio: v.ratio }),
    }
}

fn wrapped_difference(theta: f64, phi: f64) -> f64 {
    (theta - phi + PI).rem_euclid(2.0 * PI) - PI
}

fn same_quadrant(cfg: &PhaseConfig) -> bool {
    let (t, f) = (cfg.theta(), cfg.phi());
    t.cos() * f.cos() > 0.0 && t.sin() * f.sin() > 0.0
}

/// The arccos bound on |θ − φ| of the first corollary:
/// `arccos(2p²cosθcosφ + √(1 − 4p²cos²φ))`.
///
/// Requires θ and φ in the same quadrant, or |θ−φ| < π/2 with cosθcosφ < 0,
/// and additionally a positive trace scalar (the same-quadrant case with
/// p > 1/√2 can violate it, and the equivalence then fails).
pub fn corollary1_bound(cfg: &PhaseConfig) -> Result<f64> {
    let argument = corollary1_threshold(cfg)?;
    Ok(clamp_unit("corollary 1 arccos argument", argument)?.acos())
}

/// Verdict of the first corollary: `|θ − φ| ≤ bound`, with θ − φ wrapped to
/// (−π, π]. A threshold above 1 admits no angle difference at all.
pub fn corollary1_verdict(cfg: &PhaseConfig) -> Result<bool> {
    let threshold = corollary1_threshold(cfg)?;
    Ok(wrapped_difference(cfg.theta(), cfg.phi()).cos() >= threshold)
}

fn corollary1_threshold(cfg: &PhaseConfig) -> Result<f64> {
    let (t, f, p) = (cfg.theta(), cfg.phi(), cfg.p());
    let cos_product = t.cos() * f.cos();
    let near = wrapped_difference(t, f).abs() < FRAC_PI_2 && cos_product < 0.0;
    if !(same_quadrant(cfg) || near) {
        return Err(Error::HypothesisViolated(
            "corollary 1 needs θ, φ in one quadrant, or |θ−φ| < π/2 with cosθcosφ < 0",
        ));
    }
    if cfg.trace_scalar() <= 0.0 {
        return Err(Error::HypothesisViolated(
            "corollary 1 needs cos(θ−φ) − 2p²cosθcosφ > 0",
        ));
    }
    let radicand = 1.0 - 4.0 * p * p * f.cos() * f.cos();
    if radicand < 0.0 {
        return Err(Error::NumericalDomain {
            what: "corollary 1 radicand 1 − 4p²cos²φ",
            value: radicand,
        });
    }
    Ok(2.0 * p * p * cos_product + radicand.sqrt())
}

/// Second corollary: under its hypotheses `|sin(θ−φ)| > |β|` rules out
/// reaching the desired state with certainty. Returns whether it excludes.
pub fn corollary2_excludes(cfg: &PhaseConfig) -> Result<bool> {
    let (t, f) = (cfg.theta(), cfg.phi());
    let opposite = t.cos() * f.cos() < 0.0 && t.sin() * f.sin() < 0.0;
    if !(same_quadrant(cfg) || opposite) {
        return Err(Error::HypothesisViolated(
            "corollary 2 needs θ, φ in one quadrant, or cosθcosφ < 0 with sinθsinφ < 0",
        ));
    }
    Ok((t - f).sin().abs() > cfg.beta_norm())
}

/// With φ = 0 the condition reduces to `|sin θ| ≤ 2p²/|1 − 2p²|`.
/// At p = 1/√2 the right side is unbounded and every θ qualifies.
pub fn special_phi_zero(theta: f64, p: f64) -> bool {
    let denominator = (1.0 - 2.0 * p * p).abs();
    if denominator < 1e-12 {
        return true;
    }
    theta.sin().abs() <= 2.0 * p * p / denominator
}

/// With θ = 0 the condition reduces to `cos²φ ≥ 1/(1 + 4p⁴)`.
pub fn special_theta_zero(phi: f64, p: f64) -> bool {
    let c2 = phi.cos().powi(2);
    c2 >= 1.0 / (1.0 + 4.0 * p.powi(4))
}

/// The period `π/Δ` of |b_k| as a function of real k.
pub fn period(cfg: &PhaseConfig) -> Result<f64> {
    Ok(spectral_decompose(cfg)?.period())
}

/// Points of the dense real-k grid used by [`monotone_window_check`].
const WINDOW_GRID: usize = 2000;

/// Checks that |b_k| increases strictly from k = 0 to the optimum, both over
/// integer steps (three-term recurrence) and over a dense real grid (sine form).
pub fn monotone_window_check(cfg: &PhaseConfig) -> Result<bool> {
    let (k_real, _) = optimal_k(cfg)?;

    let m = build_iteration_matrix(cfg);
    let last = k_real.floor() as usize;
    let integer_norms: Vec<f64> = std::iter::once(0.0)
        .chain(ThreeTermIter::new(&m).map(|b| b.norm()))
        .take(last + 1)
        .collect();
    let integers_increase = integer_norms.windows(2).all(|w| w[0] < w[1]);

    let mut previous = -1.0;
    for i in 0..=WINDOW_GRID {
        let k = k_real * i as f64 / WINDOW_GRID as f64;
        let b = amplitude_closed(cfg, k)?.b_norm;
        if b <= previous {
            return Ok(false);
        }
        previous = b;
    }
    Ok(integers_increase)
}

fn check_overlap(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOverlap { p })
    }
}

/// Optimal iteration count of the original search:
/// `arcsin√(1−p²) / arcsin(2p√(1−p²))`.
pub fn grover_k(p: f64) -> Result<f64> {
    check_overlap(p)?;
    let q = (1.0 - p * p).sqrt();
    Ok(q.asin() / (2.0 * p * q).asin())
}

/// The first-order estimate π/(4p).
pub fn grover_k_approx(p: f64) -> Result<f64> {
    check_overlap(p)?;
    Ok(PI / (4.0 * p))
}

/// Optimal iteration count for identical rotation angles θ = φ:
/// `arcsin√(1−p²cos²φ) / arcsin(2p|cosφ|√(1−p²cos²φ))`.
pub fn identical_k(phi: f64, p: f64) -> Result<f64> {
    check_overlap(p)?;
    let c = phi.cos().abs();
    if c < DEGENERATE_COS_PHI {
        return Err(Error::DegeneratePhase);
    }
    let q = (1.0 - p * p * c * c).sqrt();
    Ok(q.asin() / (2.0 * p * c * q).asin())
}

/// One grid point of [`compare_grover_identical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub phi: f64,
    pub k_grover: f64,
    pub k_identical: f64,
    /// Central-difference derivative of k_identical in φ.
    pub slope: f64,
}

impl ComparisonRow {
    pub fn k_identical_floor(&self) -> u64 {
        optimal_floor(self.k_identical)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub p: f64,
    pub rows: Vec<ComparisonRow>,
    /// k_og ≤ k_ol at every grid point.
    pub grover_never_slower: bool,
    /// k_og = k_ol only where sin φ = 0.
    pub equality_only_at_endpoints: bool,
    /// k_ol increases on (0, π/2) and decreases on (π/2, π), judged by the
    /// sign of the finite-difference slope at the grid points there.
    pub slope_signs_hold: bool,
}

impl ComparisonReport {
    pub fn holds(&self) -> bool {
        self.grover_never_slower && self.equality_only_at_endpoints && self.slope_signs_hold
    }
}

/// Finite-difference step for the slope of k_ol(φ).
pub const SLOPE_STEP: f64 = 1e-4;

/// Compares the optimal counts of the original search and of identical
/// rotation angles over a φ grid at fixed p.
pub fn compare_grover_identical(p: f64, phi_grid: &[f64]) -> Result<ComparisonReport> {
    let k_grover = grover_k(p)?;
    let rows = phi_grid
        .iter()
        .map(|&phi| {
            let k_identical = identical_k(phi, p)?;
            let slope = (identical_k(phi + SLOPE_STEP, p)? - identical_k(phi - SLOPE_STEP, p)?) / (2.0 * SLOPE_STEP);
            Ok(ComparisonRow {
                phi,
                k_grover,
                k_identical,
                slope,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tied = |r: &ComparisonRow| (r.k_identical - r.k_grover).abs() <= 1e-12 * r.k_grover;
    let at_endpoint = |r: &ComparisonRow| r.phi.sin().abs() < 1e-12;
    let grover_never_slower = rows.iter().all(|r| r.k_grover <= r.k_identical || tied(r));
    let equality_only_at_endpoints = rows.iter().all(|r| tied(r) == at_endpoint(r));
    let slope_signs_hold = rows.iter().all(|r| {
        // fold φ into [0, π) so that the half-period sign rule applies
        let folded = r.phi.rem_euclid(PI);
        if folded <= SLOPE_STEP || (folded - FRAC_PI_2).abs() <= SLOPE_STEP || PI - folded <= SLOPE_STEP {
            true
        } else if folded < FRAC_PI_2 {
            r.slope > 0.0
        } else {
            r.slope < 0.0
        }
    });

    Ok(ComparisonReport {
        p,
        rows,
        grover_never_slower,
        equality_only_at_endpoints,
        slope_signs_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64, f: f64, p: f64) -> PhaseConfig {
        PhaseConfig::with_p(t, f, p).unwrap()
    }

    #[test]
    fn identical_angles_always_satisfy() {
        for phi in [0.0, 0.4, 1.2, 2.0, -2.9] {
            for p in [0.01, 0.1, 0.5, 0.9] {
                let v = check_condition(&cfg(phi, phi, p)).unwrap();
                let c = phi.cos();
                assert!(v.satisfied);
                assert!((v.ratio - (1.0 - p * p * c * c).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theta_half_pi_fails() {
        for phi in [0.0, 0.3, -1.0, 2.5] {
            let v = check_condition(&cfg(FRAC_PI_2, phi, 0.1)).unwrap();
            assert!((v.ratio - 5.0).abs() < 1e-12, "ratio {}", v.ratio);
            assert!(!v.satisfied);
            assert_eq!(v.k_opt_real, None);
        }
    }

    #[test]
    fn example_four() {
        let c = cfg(PI / 3.0, 0.0, 0.5);
        assert!(check_condition(&c).unwrap().satisfied);
        let (k_real, k_int) = optimal_k(&c).unwrap();
        assert!((k_real - 1.0).abs() < 1e-9);
        assert_eq!(k_int, 1);
        assert!((amplitude_closed(&c, k_real).unwrap().b_norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn table_entries_through_optimal_k() {
        assert_eq!(optimal_k(&cfg(0.0, 0.0, 0.1)).unwrap().1, 7);
        assert_eq!(optimal_k(&cfg(PI / 3.0, PI / 3.0, 0.1)).unwrap().1, 15);
    }

    #[test]
    fn unsatisfied_has_no_optimum() {
        assert!(matches!(
            optimal_k(&cfg(FRAC_PI_2, 0.0, 0.1)),
            Err(Error::ConditionUnsatisfied { .. })
        ));
        assert!(matches!(
            monotone_window_check(&cfg(FRAC_PI_2, 0.0, 0.1)),
            Err(Error::ConditionUnsatisfied { .. })
        ));
        assert_eq!(check_condition(&cfg(0.0, FRAC_PI_2, 0.1)), Err(Error::DegeneratePhase));
    }

    #[test]
    fn corollary1_identical_angles() {
        let c = cfg(0.7, 0.7, 0.2);
        assert!(corollary1_bound(&c).unwrap() >= 0.0);
        assert!(corollary1_verdict(&c).unwrap());
    }

    #[test]
    fn corollary1_hypotheses() {
        // second and fourth quadrant
        assert!(matches!(
            corollary1_bound(&cfg(2.0, -1.0, 0.1)),
            Err(Error::HypothesisViolated(_))
        ));
        // radicand negative
        assert!(matches!(
            corollary1_bound(&cfg(0.7227, 0.7227, 0.8)),
            Err(Error::NumericalDomain { .. })
        ));
        // same quadrant but negative trace scalar
        assert!(matches!(
            corollary1_bound(&cfg(0.013, 0.9495, 0.84)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn corollary2_examples() {
        let c = cfg(0.4, 0.4, 0.3);
        assert!(!corollary2_excludes(&c).unwrap());
        let c = cfg(FRAC_PI_2 - 0.01, 0.01, 0.05);
        assert!(corollary2_excludes(&c).unwrap());
        assert!(!check_condition(&c).unwrap().satisfied);
        assert!(matches!(
            corollary2_excludes(&cfg(2.0, 1.0, 0.1)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn special_cases() {
        assert!(special_phi_zero(PI / 3.0, 0.5));
        assert!(special_phi_zero(0.0, 0.05));
        assert!(special_phi_zero(1.3, std::f64::consts::FRAC_1_SQRT_2));
        assert!(special_theta_zero(0.0, 0.3));
        assert!(!special_theta_zero(FRAC_PI_2, 0.3));
    }

    #[test]
    fn special_cases_match_direct_condition() {
        let grid = (0..400).map(|i| -PI + 2.0 * PI * (i as f64 + 0.37) / 400.0);
        for x in grid {
            let direct = check_condition(&cfg(x, 0.0, 0.3)).unwrap().satisfied;
            assert_eq!(special_phi_zero(x, 0.3), direct, "theta = {x}");
            if x.cos().abs() > 1e-9 {
                let direct = check_condition(&cfg(0.0, x, 0.2)).unwrap().satisfied;
                assert_eq!(special_theta_zero(x, 0.2), direct, "phi = {x}");
            }
        }
        for t in [0.1, 0.7, 1.5, 2.9] {
            let p = std::f64::consts::FRAC_1_SQRT_2;
            assert!(check_condition(&cfg(t, 0.0, p)).unwrap().satisfied);
        }
    }

    #[test]
    fn periods() {
        let t = period(&cfg(0.0, 0.0, 0.1)).unwrap();
        assert!((t - 15.7).abs() <= 0.05, "{t}");
        let t = period(&cfg(0.0, 0.0, 0.01)).unwrap();
        assert!((t - 157.0).abs() <= 0.5, "{t}");
        let t = period(&cfg(PI / 4.0, PI / 4.0, 0.1)).unwrap();
        assert!((t - 22.2).abs() <= 0.05, "{t}");
    }

    #[test]
    fn period_shifts_amplitude() {
        let c = cfg(0.3, -0.8, 0.27);
        let t = period(&c).unwrap();
        for k in [0.0, 0.5, 1.7, 3.0, 11.25] {
            let b0 = amplitude_closed(&c, k).unwrap().b_norm;
            let b1 = amplitude_closed(&c, k + t).unwrap().b_norm;
            assert!((b0 - b1).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_windows() {
        assert!(monotone_window_check(&cfg(0.0, 0.0, 0.1)).unwrap());
        assert!(monotone_window_check(&cfg(PI / 3.0, 0.0, 0.5)).unwrap());
    }

    #[test]
    fn grover_counts() {
        // 40-digit reference: 7.340854384487761
        assert!((grover_k(0.1).unwrap() - 7.340854384487761).abs() < 1e-12);
        assert_eq!(grover_k(0.1).unwrap().floor(), 7.0);
        assert!((grover_k_approx(0.1).unwrap() - 7.853981633974483).abs() < 1e-15);
        for p in [0.01, 0.005, 0.001] {
            let k = grover_k(p).unwrap();
            assert!((k - grover_k_approx(p).unwrap()).abs() / k < 0.01);
        }
        let k = grover_k(0.001).unwrap();
        let gap = (k - grover_k_approx(0.001).unwrap()).abs() / k;
        // 40-digit reference 6.371921944e-4
        assert!((gap - 6.371921944299718e-4).abs() < 1e-9);
    }

    #[test]
    fn identical_counts() {
        let expected = [7, 8, 15, 15, 8, 7];
        let grid = [0.0, PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0, PI];
        for (phi, want) in grid.iter().zip(expected) {
            assert_eq!(identical_k(*phi, 0.1).unwrap().floor() as u64, want);
        }
        assert_eq!(identical_k(0.0, 0.37).unwrap(), grover_k(0.37).unwrap());
        // 40-digit reference 15.20141364125636
        assert!((identical_k(PI / 3.0, 0.1).unwrap() - 15.20141364125636).abs() < 1e-10);
        assert_eq!(identical_k(FRAC_PI_2, 0.1), Err(Error::DegeneratePhase));
    }

    #[test]
    fn identical_count_matches_optimum() {
        for phi in [0.2, 1.0, 1.4, 2.2, 3.0] {
            for p in [0.05, 0.1, 0.4] {
                let (k_real, _) = optimal_k(&cfg(phi, phi, p)).unwrap();
                assert!((identical_k(phi, p).unwrap() - k_real).abs() < 1e-10);
                assert!((identical_k(phi, p).unwrap() - identical_k(PI - phi, p).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn comparison_on_table_grid() {
        let grid = [0.0, PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0, PI];
        let report = compare_grover_identical(0.1, &grid).unwrap();
        assert!(report.holds());
        let floors: Vec<u64> = report.rows.iter().map(|r| r.k_identical_floor()).collect();
        assert_eq!(floors, [7, 8, 15, 15, 8, 7]);
    }

    #[test]
    fn comparison_at_pi_over_three() {
        for p in [0.01, 0.2, 0.6, 0.95] {
            assert!(identical_k(PI / 3.0, p).unwrap() > grover_k(p).unwrap());
        }
    }

    #[test]
    fn comparison_slope_positive_on_first_half() {
        let grid: Vec<f64> = (1..=50).map(|i| FRAC_PI_2 * i as f64 / 51.0).collect();
        let report = compare_grover_identical(0.05, &grid).unwrap();
        assert!(report.rows.iter().all(|r| r.slope > 0.0));
        assert!(report.holds());
    }

    #[test]
    fn comparison_rejects_degenerate_grid() {
        assert_eq!(
            compare_grover_identical(0.1, &[0.0, FRAC_PI_2]),
            Err(Error::DegeneratePhase)
        );
    }
}
