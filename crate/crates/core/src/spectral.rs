//! Spectral solution of the b-recurrence.
//!
//! The characteristic roots of M lie on the unit circle. Writing them as
//! `z_{1,2} = e^{i(χ ± Δ)}` with `Δ ∈ (0, π/2]` gives
//!
//! ```text
//! r_k = sin(kΔ)/sin(Δ) · e^{i(k−1)χ},      |b_k| = |β| |sin kΔ| / sin Δ
//! ```
//!
//! where `sin Δ = √(1 − x²)` and `x = cos(θ−φ) − 2p²cosθcosφ`. The centre
//! phase χ is θ+φ when x ≥ 0 and θ+φ+π when x < 0; both choices give
//! `z₁z₂ = e^{i2(θ+φ)}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::build_iteration_matrix;
use crate::types::{IterationMatrix, PhaseConfig};

/// Arguments of arcsin/arccos/sqrt this close outside their domain are clamped.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Eigen-structure of M expressed through its unit-circle eigenphases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    /// Larger eigenphase, χ + Δ.
    pub psi1: f64,
    /// Smaller eigenphase, χ − Δ.
    pub psi2: f64,
    /// Half the eigenphase gap, in (0, π/2].
    pub delta: f64,
    pub sin_delta: f64,
    /// θ + φ.
    pub sum_phase: f64,
    /// χ, the midpoint of the eigenphases: θ+φ, or θ+φ+π when the trace
    /// scalar is negative.
    pub center_phase: f64,
}

impl SpectralData {
    pub fn z1(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.psi1)
    }

    pub fn z2(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.psi2)
    }

    /// Half-period of `|sin kΔ|` in k.
    pub fn period(&self) -> f64 {
        PI / self.delta
    }
}

pub(crate) fn clamp_unit(what: &'static str, value: f64) -> Result<f64> {
    if value.abs() > 1.0 + DOMAIN_SLACK || value.is_nan() {
        return Err(Error::NumericalDomain { what, value });
    }
    Ok(value.clamp(-1.0, 1.0))
}

fn clamp_nonneg(what: &'static str, value: f64) -> Result<f64> {
    if value < -DOMAIN_SLACK || value.is_nan() {
        return Err(Error::NumericalDomain { what, value });
    }
    Ok(value.max(0.0))
}

/// Eigenphases and half-gap Δ of M, computed from the trace scalar.
pub fn spectral_decompose(cfg: &PhaseConfig) -> Result<SpectralData> {
    cfg.require_nondegenerate()?;
    let x = clamp_unit("trace scalar", cfg.trace_scalar())?;
    // 1 ∓ x written without the cancellation of forming x first
    let half = 0.5 * (cfg.theta() - cfg.phi());
    let coupling = 2.0 * cfg.p() * cfg.p() * cfg.theta().cos() * cfg.phi().cos();
    let one_minus = 2.0 * half.sin().powi(2) + coupling;
    let one_plus = 2.0 * half.cos().powi(2) - coupling;
    let sin_delta = clamp_nonneg("sin(delta) radicand", one_minus * one_plus)?.sqrt();
    if sin_delta == 0.0 {
        // only reachable when |cos φ| is barely above the degeneracy threshold
        return Err(Error::DegeneratePhase);
    }
    // atan2 is the arcsin(sin Δ) branch, without arcsin's loss near Δ = π/2
    let delta = sin_delta.atan2(x.abs());
    let sum_phase = cfg.theta() + cfg.phi();
    let center_phase = if x < 0.0 { sum_phase + PI } else { sum_phase };

    let data = SpectralData {
        psi1: center_phase + delta,
        psi2: center_phase - delta,
        delta,
        sin_delta,
        sum_phase,
        center_phase,
    };
    debug_assert!(
        eigenphases_match(&data, &build_iteration_matrix(cfg)),
        "spectral data disagrees with numeric eigenvalues"
    );
    Ok(data)
}

/// Roots of `z² − (α+δ)z + (αδ − βλ)` by the quadratic formula.
pub fn eigenvalues(m: &IterationMatrix) -> (Complex64, Complex64) {
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * m.det()).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

fn eigenphases_match(data: &SpectralData, m: &IterationMatrix) -> bool {
    let (e1, e2) = eigenvalues(m);
    let (z1, z2) = (data.z1(), data.z2());
    // eigenvalues of a near-defective matrix carry ~sqrt(eps) error
    let tol = 1e-6;
    ((e1 - z1).norm() < tol && (e2 - z2).norm() < tol) || ((e1 - z2).norm() < tol && (e2 - z1).norm() < tol)
}

/// Closed-form amplitude at (possibly non-integer) step k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedAmplitude {
    /// `r_k = sin(kΔ)/sin(Δ) · e^{i(k−1)χ}`.
    pub r: Complex64,
    /// `b_k = β r_k`.
    pub b: Complex64,
    /// `|β| |sin kΔ| / sin Δ`.
    pub b_norm: f64,
}

/// Evaluates r_k and |b_k| by the sine form.
pub fn amplitude_closed(cfg: &PhaseConfig, k: f64) -> Result<ClosedAmplitude> {
    let spec = spectral_decompose(cfg)?;
    let beta = build_iteration_matrix(cfg).beta;
    let ratio = (k * spec.delta).sin() / spec.sin_delta;
    let r = ratio * Complex64::from_polar(1.0, (k - 1.0) * spec.center_phase);
    let b_norm = cfg.beta_norm() * ratio.abs();
    Ok(ClosedAmplitude { r, b: beta * r, b_norm })
}

/// |b_k| with Δ taken as `arccos(|α+δ|²/2 − 1)/2`, using the trace of the
/// assembled matrix rather than the trace scalar.
pub fn b_norm_arccos_form(cfg: &PhaseConfig, k: f64) -> Result<f64> {
    cfg.require_nondegenerate()?;
    let m = build_iteration_matrix(cfg);
    let t2 = m.trace().norm_sqr();
    let gap = clamp_unit("arccos argument", t2 / 2.0 - 1.0)?.acos();
    let sin_delta = clamp_nonneg("sin(delta) radicand", 1.0 - t2 / 4.0)?.sqrt();
    Ok(m.beta.norm() * (k * gap / 2.0).sin().abs() / sin_delta)
}

/// |b_k| with Δ taken as `arcsin √(1 − |α+δ|²/4)`, using the assembled matrix.
pub fn b_norm_arcsin_form(cfg: &PhaseConfig, k: f64) -> Result<f64> {
    cfg.require_nondegenerate()?;
    let m = build_iteration_matrix(cfg);
    let sin_delta = clamp_nonneg("sin(delta) radicand", 1.0 - m.trace().norm_sqr() / 4.0)?.sqrt();
    let delta = clamp_unit("arcsin argument", sin_delta)?.asin();
    Ok(m.beta.norm() * (k * delta).sin().abs() / sin_delta)
}

fn check_overlap(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOverlap { p })
    }
}

/// |b_k| for the original search (θ = φ = 0):
/// `|sin(k·arcsin(2p√(1−p²)))| / √(1−p²)`.
pub fn grover_amplitude(p: f64, k: f64) -> Result<f64> {
    check_overlap(p)?;
    let q = (1.0 - p * p).sqrt();
    let value = (k * (2.0 * p * q).asin()).sin().abs() / q;

    debug_assert!(
        {
            // the two arccos forms; they match the arcsin form above at integer
            // k, and at every k when p ≤ 1/√2
            let xi = (1.0 - 2.0 * p * p).acos();
            let v1 = 2.0 * p * (k * xi).sin().abs() / xi.sin();
            let v2 = (k * xi).sin().abs() / q;
            (v1 - v2).abs() <= 1e-10 * v2.max(1.0)
        },
        "Grover amplitude forms disagree"
    );
    Ok(value)
}

/// |b_k| for identical rotation angles θ = φ:
/// `|sin(k·arcsin(2p|cosφ|√(1−p²cos²φ)))| / √(1−p²cos²φ)`.
pub fn identical_angle_amplitude(phi: f64, p: f64, k: f64) -> Result<f64> {
    check_overlap(p)?;
    let c = phi.cos().abs();
    if c < crate::types::DEGENERATE_COS_PHI {
        return Err(Error::DegeneratePhase);
    }
    let q = (1.0 - p * p * c * c).sqrt();
    Ok((k * (2.0 * p * c * q).asin()).sin().abs() / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{iterate_b, ThreeTermIter};

    fn cfg(t: f64, f: f64, p: f64) -> PhaseConfig {
        PhaseConfig::with_p(t, f, p).unwrap()
    }

    /// arccos(cos 2Δ) and arcsin(sin Δ) lose ~eps/sin(2Δ) of Δ; near Δ = π/2
    /// the loss saturates at ~sqrt(eps).
    fn version_tolerance(s: &SpectralData, k: f64) -> f64 {
        let conditioning = (2.0 * s.delta).sin().abs().max(1e-8);
        1e-10 + k * 10.0 * f64::EPSILON / conditioning
    }

    #[test]
    fn versions_agree_on_reference_grid() {
        for (t, f, p) in [
            (0.0, 0.0, 0.1),
            (PI / 4.0, PI / 4.0, 0.1),
            (PI / 3.0, 0.0, 0.5),
            (PI / 2.0, PI / 6.0, 0.2),
        ] {
            let c = cfg(t, f, p);
            for k in 0..=50 {
                let kf = k as f64;
                let v1 = amplitude_closed(&c, kf).unwrap().b_norm;
                assert!((b_norm_arccos_form(&c, kf).unwrap() - v1).abs() < 1e-10);
                assert!((b_norm_arcsin_form(&c, kf).unwrap() - v1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn grover_spectrum() {
        let s = spectral_decompose(&cfg(0.0, 0.0, 0.1)).unwrap();
        // arccos(0.98), evaluated with 40-digit arithmetic
        assert!((s.delta - 0.2003348423231196).abs() < 1e-15);
        assert!((s.psi1 + s.psi2).abs() < 1e-15);
        assert!((s.delta.cos() - 0.98).abs() < 1e-15);
    }

    #[test]
    fn degenerate_rejected() {
        assert_eq!(
            spectral_decompose(&cfg(PI / 2.0, PI / 2.0, 0.3)),
            Err(Error::DegeneratePhase)
        );
        assert_eq!(
            amplitude_closed(&cfg(0.3, PI / 2.0, 0.3), 2.0),
            Err(Error::DegeneratePhase)
        );
    }

    #[test]
    fn identical_quarter_pi_sin_delta() {
        let s = spectral_decompose(&cfg(PI / 4.0, PI / 4.0, 0.1)).unwrap();
        // 2p cos(π/4) √(1 − p² cos²(π/4)), 40-digit evaluation
        assert!((s.sin_delta - 0.14106735979665884).abs() < 1e-15);
        let (e1, e2) = eigenvalues(&build_iteration_matrix(&cfg(PI / 4.0, PI / 4.0, 0.1)));
        let gap = (e1.arg() - e2.arg()).abs() / 2.0;
        assert!((gap.sin() - s.sin_delta).abs() < 1e-12);
    }

    #[test]
    fn worked_examples() {
        let p = 0.05;
        for k in 0..=50 {
            let kf = k as f64;
            let ex1 = amplitude_closed(&cfg(PI / 2.0, 0.0, p), kf).unwrap().b_norm;
            assert!((ex1 - 2.0 * p * (kf * PI / 2.0).sin().abs()).abs() < 1e-12);
            let ex2 = amplitude_closed(&cfg(PI / 2.0, PI / 6.0, p), kf).unwrap().b_norm;
            assert!((ex2 - 2.0 * p * (kf * PI / 3.0).sin().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn first_step_is_beta() {
        for (t, f, p) in [(0.3, 1.0, 0.2), (2.0, -0.5, 0.8), (-1.0, 4.0, 0.01)] {
            let c = cfg(t, f, p);
            assert!((amplitude_closed(&c, 1.0).unwrap().b_norm - c.beta_norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_trace_scalar_uses_shifted_center() {
        // p > 1/√2 in the original search makes the trace scalar negative
        let c = cfg(0.0, 0.0, 0.9);
        assert!(c.trace_scalar() < 0.0);
        let m = build_iteration_matrix(&c);
        for (k, b) in (1..=60u64).zip(ThreeTermIter::new(&m)) {
            let closed = amplitude_closed(&c, k as f64).unwrap();
            assert!((closed.b - b).norm() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn grover_amplitude_cases() {
        assert!((grover_amplitude(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(grover_amplitude(0.3, 0.0).unwrap(), 0.0);
        let m = build_iteration_matrix(&cfg(0.0, 0.0, 0.1));
        assert!((grover_amplitude(0.1, 7.0).unwrap() - iterate_b(&m, 7).norm()).abs() < 1e-10);
        // 40-digit reference
        assert!((grover_amplitude(0.1, 7.0).unwrap() - 0.9908119150592).abs() < 1e-12);
        assert!(grover_amplitude(1.0, 1.0).is_err());
    }

    #[test]
    fn identical_angle_cases() {
        for k in [0.0, 1.0, 3.5, 9.0] {
            assert!(
                (identical_angle_amplitude(0.0, 0.2, k).unwrap() - grover_amplitude(0.2, k).unwrap()).abs() < 1e-15
            );
        }
        let general = amplitude_closed(&cfg(PI / 4.0, PI / 4.0, 0.1), 5.0).unwrap().b_norm;
        assert!((identical_angle_amplitude(PI / 4.0, 0.1, 5.0).unwrap() - general).abs() < 1e-12);
        assert_eq!(
            identical_angle_amplitude(PI / 2.0, 0.1, 2.0),
            Err(Error::DegeneratePhase)
        );
    }

    #[test]
    fn identical_angle_bound() {
        for phi in (0..20).map(|i| -1.5 + 0.15 * i as f64) {
            for p in [0.01, 0.1, 0.3, 0.6, 0.9] {
                let beta = 2.0 * p * phi.cos().abs();
                assert!((identical_angle_amplitude(phi, p, 1.0).unwrap() - beta).abs() < 1e-14);
                for k in 2..=50 {
                    assert!(identical_angle_amplitude(phi, p, k as f64).unwrap() < k as f64 * beta);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn config() -> impl Strategy<Value = PhaseConfig> {
            (-7.0f64..7.0, -7.0f64..7.0, 0.01f64..0.99, -PI..PI).prop_filter_map("cos φ too small", |(t, f, p, w)| {
                (f.cos().abs() > 1e-3).then(|| PhaseConfig::new(t, f, Complex64::from_polar(p, w)).unwrap())
            })
        }

        proptest! {
            #[test]
            fn spectral_invariants(c in config()) {
                let s = spectral_decompose(&c).unwrap();
                let m = build_iteration_matrix(&c);
                prop_assert!(s.psi1 > s.psi2);
                let wrap = ((s.psi1 + s.psi2 - 2.0 * c.theta() - 2.0 * c.phi()) / (2.0 * PI)).round();
                prop_assert!((s.psi1 + s.psi2 - 2.0 * (c.theta() + c.phi()) - wrap * 2.0 * PI).abs() < 1e-10);
                prop_assert!((s.sin_delta - (1.0 - m.trace().norm_sqr() / 4.0).sqrt()).abs() < 1e-10);
                prop_assert!(s.sin_delta > 0.0);
                prop_assert!(((s.z1() + s.z2()) - m.trace()).norm() < 1e-10);
                prop_assert!(((s.z1() * s.z2()) - m.det()).norm() < 1e-10);
                prop_assert!((s.z1() - s.z2()).norm() > 1e-9);
            }

            #[test]
            fn sine_form_matches_root_powers(c in config(), k in 1u32..200) {
                let s = spectral_decompose(&c).unwrap();
                let (z1, z2) = (s.z1(), s.z2());
                let roots = (z1.powu(k) - z2.powu(k)) / (z1 - z2);
                let closed = amplitude_closed(&c, k as f64).unwrap();
                prop_assert!((closed.r - roots).norm() < 1e-10 * (1.0 + 1.0 / s.sin_delta));
                // the sine ratio is real: the phase is (k−1)(θ+φ) up to π
                if closed.r.norm() > 1e-6 {
                    let offset = closed.r.arg() - (k as f64 - 1.0) * (c.theta() + c.phi());
                    let turns = offset / PI;
                    prop_assert!((turns - turns.round()).abs() < 1e-8);
                }
            }

            #[test]
            fn all_versions_agree(c in config(), k in 0.0f64..100.0) {
                let s = spectral_decompose(&c).unwrap();
                let v1 = amplitude_closed(&c, k).unwrap().b_norm;
                let tol = version_tolerance(&s, k);
                prop_assert!((b_norm_arccos_form(&c, k).unwrap() - v1).abs() < tol);
                prop_assert!((b_norm_arcsin_form(&c, k).unwrap() - v1).abs() < tol);
            }

            #[test]
            fn identical_matches_general(phi in -3.0f64..3.0, p in 0.01f64..0.99, k in 0.0f64..60.0) {
                prop_assume!(phi.cos().abs() > 1e-3);
                let c = cfg(phi, phi, p);
                let general = amplitude_closed(&c, k).unwrap().b_norm;
                // arcsin form, ill-conditioned near Δ = π/2
                let tol = version_tolerance(&spectral_decompose(&c).unwrap(), k);
                prop_assert!((identical_angle_amplitude(phi, p, k).unwrap() - general).abs() < tol);
            }

            #[test]
            fn grover_matches_general(p in 0.01f64..0.99, k in 0.0f64..60.0) {
                let c = cfg(0.0, 0.0, p);
                let general = amplitude_closed(&c, k).unwrap().b_norm;
                let tol = version_tolerance(&spectral_decompose(&c).unwrap(), k);
                prop_assert!((grover_amplitude(p, k).unwrap() - general).abs() < tol);
            }
        }
    }
}
