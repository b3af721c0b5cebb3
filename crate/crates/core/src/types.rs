//! Shared domain types: problem parameters, the 2×2 iteration matrix,
//! amplitude pairs and traces, plus the angle grammar used on the command line.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this |cos φ| the desired-state coupling β is treated as zero.
pub const DEGENERATE_COS_PHI: f64 = 1e-12;

/// Parses an angle in radians.
///
/// Accepts plain decimals (`0`, `-1.25`, `3e-2`) and rational multiples of π
/// written as `pi`, `-pi/6`, `2pi/3`, `0.5pi` (an optional `*` between the
/// coefficient and `pi` and the symbol `π` are also accepted).
pub fn parse_angle(text: &str) -> Result<f64> {
    let malformed = || Error::MalformedAngle(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(malformed());
    }

    let lower = s.to_ascii_lowercase();
    let split = lower
        .find("pi")
        .map(|i| (i, 2))
        .or_else(|| lower.find('π').map(|i| (i, 'π'.len_utf8())));
    let Some((at, width)) = split else {
        return parse_finite(s).ok_or_else(malformed);
    };

    let (head, tail) = (&lower[..at], &lower[at + width..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => parse_finite(h).ok_or_else(malformed)?,
    };
    let denominator = match tail {
        "" => 1.0,
        t => {
            let d = t.strip_prefix('/').and_then(parse_finite).ok_or_else(malformed)?;
            if d == 0.0 {
                return Err(malformed());
            }
            d
        }
    };
    Ok(coefficient * PI / denominator)
}

fn parse_finite(s: &str) -> Option<f64> {
    // f64::from_str accepts "inf" and "nan"; the grammar does not.
    if !s.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// A complex literal as it appears in JSON (`{"re": x, "im": y}`) or on the
/// command line (`re,im`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexLiteral {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexLiteral> for Complex64 {
    fn from(c: ComplexLiteral) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexLiteral {
    fn from(c: Complex64) -> Self {
        ComplexLiteral { re: c.re, im: c.im }
    }
}

impl FromStr for ComplexLiteral {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedComplex(s.to_string());
        let (re, im) = s.split_once(',').ok_or_else(malformed)?;
        Ok(ComplexLiteral {
            re: parse_finite(re.trim()).ok_or_else(malformed)?,
            im: parse_finite(im.trim()).ok_or_else(malformed)?,
        })
    }
}

/// Parameters of the generalized search operator `Q = -I_γ U⁻¹ I_τ U`.
///
/// `theta` rotates the initial state |γ⟩, `phi` rotates the desired state |τ⟩
/// and `u_tau_gamma` is the overlap ⟨τ|U|γ⟩. Angles are stored as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    theta: f64,
    phi: f64,
    u_tau_gamma: Complex64,
    p: f64,
    degenerate: bool,
}

impl PhaseConfig {
    /// Validates `0 < |u_tau_gamma| < 1` and flags `|cos φ| < 1e-12` as degenerate.
    pub fn new(theta: f64, phi: f64, u_tau_gamma: Complex64) -> Result<Self> {
        let p = u_tau_gamma.norm();
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidOverlap { p });
        }
        Ok(PhaseConfig {
            theta,
            phi,
            u_tau_gamma,
            p,
            degenerate: phi.cos().abs() < DEGENERATE_COS_PHI,
        })
    }

    /// Shorthand for a real, positive overlap `U_τγ = p`.
    pub fn with_p(theta: f64, phi: f64, p: f64) -> Result<Self> {
        Self::new(theta, phi, Complex64::new(p, 0.0))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn u_tau_gamma(&self) -> Complex64 {
        self.u_tau_gamma
    }

    /// |U_τγ|.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Fails with [`Error::DegeneratePhase`] when cos φ vanishes.
    pub fn require_nondegenerate(&self) -> Result<&Self> {
        if self.degenerate {
            Err(Error::DegeneratePhase)
        } else {
            Ok(self)
        }
    }

    /// |β| = 2p|cos φ|.
    pub fn beta_norm(&self) -> f64 {
        2.0 * self.p * self.phi.cos().abs()
    }

    /// The real factor `cos(θ−φ) − 2p²cosθcosφ` of the trace of M.
    ///
    /// Its modulus never exceeds 1 and half the trace equals this value times
    /// `e^{i(θ+φ)}`.
    pub fn trace_scalar(&self) -> f64 {
        let (t, f, p) = (self.theta, self.phi, self.p);
        (t - f).cos() - 2.0 * p * p * t.cos() * f.cos()
    }
}

/// The 2×2 matrix of Q on the plane spanned by |γ⟩ and U⁻¹|τ⟩:
/// `Q|γ⟩ = α|γ⟩ + β U⁻¹|τ⟩`, `Q U⁻¹|τ⟩ = λ|γ⟩ + δ U⁻¹|τ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationMatrix {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub lambda: Complex64,
    pub delta: Complex64,
    /// θ + φ.
    pub sum_phase: f64,
}

impl IterationMatrix {
    pub fn trace(&self) -> Complex64 {
        self.alpha + self.delta
    }

    pub fn det(&self) -> Complex64 {
        self.alpha * self.delta - self.beta * self.lambda
    }

    /// One application of Q to `a|γ⟩ + b U⁻¹|τ⟩`.
    pub fn step(&self, pair: AmplitudePair) -> AmplitudePair {
        AmplitudePair {
            a: self.alpha * pair.a + self.lambda * pair.b,
            b: self.beta * pair.a + self.delta * pair.b,
            k: pair.k + 1,
        }
    }
}

/// Amplitudes of `Q^k|γ⟩ = a|γ⟩ + b U⁻¹|τ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub a: Complex64,
    pub b: Complex64,
    pub k: u64,
}

impl AmplitudePair {
    /// The initial state |γ⟩.
    pub fn initial() -> Self {
        AmplitudePair {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            k: 0,
        }
    }

    /// Squared norm of the represented state. The basis is not orthogonal:
    /// ⟨γ|U⁻¹|τ⟩ = U_τγ*, so the cross term is `2 Re(a* b U_τγ*)`.
    pub fn state_norm_sqr(&self, u_tau_gamma: Complex64) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + 2.0 * (self.a.conj() * self.b * u_tau_gamma.conj()).re
    }
}

/// The evaluator that produced an amplitude estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Coupled (a, b) iteration of M.
    CoupledRecurrence,
    /// Decoupled three-term recurrence for b.
    ThreeTerm,
    /// Polynomial in βλ with binomial weights.
    Polynomial,
    /// Spectral sine form.
    ClosedForm,
    /// Full state-vector simulation.
    StateVector,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::CoupledRecurrence => "coupled",
            Method::ThreeTerm => "three_term",
            Method::Polynomial => "polynomial",
            Method::ClosedForm => "closed_form",
            Method::StateVector => "state_vector",
        };
        f.write_str(name)
    }
}

/// One method's estimate at a step. `a` is absent for evaluators that only
/// produce the desired-state amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub method: Method,
    pub a: Option<Complex64>,
    pub b: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub k: u64,
    pub estimates: Vec<Estimate>,
    /// |b_k| from the sine form, when the configuration admits it.
    pub b_closed: Option<f64>,
    /// Largest pairwise |b_i − b_j| among the complex estimates, and
    /// ||b_i| − b_closed| where available.
    pub residual: f64,
    /// Norm of the state component outside the invariant plane (simulation only).
    pub plane_residual: Option<f64>,
    /// |‖ψ‖² − 1| of the simulated state (simulation only).
    pub norm_drift: Option<f64>,
}

impl TraceSample {
    pub fn new(k: u64, estimates: Vec<Estimate>, b_closed: Option<f64>) -> Self {
        let mut residual: f64 = 0.0;
        for (i, x) in estimates.iter().enumerate() {
            for y in &estimates[i + 1..] {
                residual = residual.max((x.b - y.b).norm());
            }
            if let Some(c) = b_closed {
                residual = residual.max((x.b.norm() - c).abs());
            }
        }
        TraceSample {
            k,
            estimates,
            b_closed,
            residual,
            plane_residual: None,
            norm_drift: None,
        }
    }

    pub fn estimate(&self, method: Method) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.method == method)
    }
}

/// Per-step amplitudes from several evaluators, ordered by step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AmplitudeTrace {
    samples: Vec<TraceSample>,
}

impl AmplitudeTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample; steps must be strictly increasing and residuals finite.
    pub fn push(&mut self, sample: TraceSample) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if sample.k <= last.k {
                return Err(Error::IndexOutOfRange(format!(
                    "trace step {} does not follow step {}",
                    sample.k, last.k
                )));
            }
        }
        if !sample.residual.is_finite() {
            return Err(Error::NumericalDomain {
                what: "trace residual",
                value: sample.residual,
            });
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_grammar() {
        assert_eq!(parse_angle("pi/3").unwrap(), 1.0471975511965976);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0943951023931953);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/6").unwrap(), -PI / 6.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle(" -1.25 ").unwrap(), -1.25);
        assert_eq!(parse_angle("π/2").unwrap(), PI / 2.0);
    }

    #[test]
    fn angle_grammar_rejects_junk() {
        for bad in [
            "", "pie", "pi/", "pi/0", "x", "inf", "nan", "1/2", "pi/3/2", "--pi", "pi pi",
        ] {
            assert!(
                matches!(parse_angle(bad), Err(Error::MalformedAngle(_))),
                "accepted `{bad}`"
            );
        }
    }

    #[test]
    fn make_config_cases() {
        let cfg = PhaseConfig::with_p(0.0, 0.0, 0.1).unwrap();
        assert_eq!(cfg.p(), 0.1);
        assert!(!cfg.is_degenerate());

        let cfg = PhaseConfig::with_p(PI / 2.0, PI / 2.0, 0.1).unwrap();
        assert!(cfg.is_degenerate());
        assert_eq!(cfg.require_nondegenerate(), Err(Error::DegeneratePhase));

        assert!(matches!(
            PhaseConfig::with_p(0.0, 0.0, 1.5),
            Err(Error::InvalidOverlap { .. })
        ));
        assert!(PhaseConfig::with_p(0.0, 0.0, 0.0).is_err());
        assert!(PhaseConfig::with_p(0.0, 0.0, 1.0).is_err());
        assert!(PhaseConfig::with_p(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn complex_overlap_modulus() {
        let u = Complex64::from_polar(0.3, 1.1);
        let cfg = PhaseConfig::new(0.2, 0.4, u).unwrap();
        assert!((cfg.p() - 0.3).abs() < 1e-14);
        assert!((cfg.beta_norm() - 0.6 * 0.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn complex_literal_forms() {
        let c: ComplexLiteral = "0.3, -0.1".parse().unwrap();
        assert_eq!(c, ComplexLiteral { re: 0.3, im: -0.1 });
        let json: ComplexLiteral = serde_json::from_str(r#"{"re": 0.5, "im": 2}"#).unwrap();
        assert_eq!(Complex64::from(json), Complex64::new(0.5, 2.0));
        assert!("0.3".parse::<ComplexLiteral>().is_err());
    }

    #[test]
    fn trace_rejects_out_of_order_steps() {
        let mut trace = AmplitudeTrace::new();
        trace.push(TraceSample::new(1, vec![], None)).unwrap();
        assert!(trace.push(TraceSample::new(1, vec![], None)).is_err());
        let mut bad = TraceSample::new(2, vec![], None);
        bad.residual = f64::NAN;
        assert!(trace.push(bad).is_err());
    }

    #[test]
    fn residual_is_largest_disagreement() {
        let e = |method, b: f64| Estimate {
            method,
            a: None,
            b: Complex64::new(b, 0.0),
        };
        let s = TraceSample::new(
            3,
            vec![e(Method::ThreeTerm, 0.5), e(Method::CoupledRecurrence, 0.5 + 1e-9)],
            Some(0.5 - 2e-9),
        );
        assert!((s.residual - 3e-9).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn decimal_angles_round_trip(x in -1e6f64..1e6) {
                let back = parse_angle(&x.to_string()).unwrap();
                prop_assert!((back - x).abs() <= 1e-15 * x.abs().max(1.0));
            }

            #[test]
            fn stored_angles_keep_trig_values(t in -50.0f64..50.0, f in -50.0f64..50.0, p in 0.01f64..0.99) {
                let cfg = PhaseConfig::with_p(t, f, p).unwrap();
                prop_assert_eq!(cfg.theta().cos(), t.cos());
                prop_assert_eq!(cfg.phi().sin(), f.sin());
                prop_assert!((cfg.p() - p).abs() < 1e-14);
            }
        }
    }
}
