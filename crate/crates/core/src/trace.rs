//! Per-step amplitudes from every 2×2 evaluator side by side.

use crate::error::Result;
use crate::operator::build_iteration_matrix;
use crate::recurrence::{polynomial_b, PairIter, ThreeTermIter, MAX_POLY_STEP};
use crate::spectral::amplitude_closed;
use crate::types::{AmplitudeTrace, Estimate, Method, PhaseConfig, TraceSample};

/// Evaluates b_k for k = 1..=k_max with the coupled recurrence, the three-term
/// recurrence, the sine form and (for k ≤ 40) the polynomial expansion.
pub fn model_trace(cfg: &PhaseConfig, k_max: u64) -> Result<AmplitudeTrace> {
    cfg.require_nondegenerate()?;
    let m = build_iteration_matrix(cfg);
    let mut trace = AmplitudeTrace::new();

    let steps = PairIter::new(m).skip(1).zip(ThreeTermIter::new(&m));
    for (pair, b_three) in steps.take(k_max as usize) {
        let k = pair.k;
        let closed = amplitude_closed(cfg, k as f64)?;
        let mut estimates = vec![
            Estimate {
                method: Method::CoupledRecurrence,
                a: Some(pair.a),
                b: pair.b,
            },
            Estimate {
                method: Method::ThreeTerm,
                a: None,
                b: b_three,
            },
            Estimate {
                method: Method::ClosedForm,
                a: None,
                b: closed.b,
            },
        ];
        if k <= MAX_POLY_STEP {
            estimates.push(Estimate {
                method: Method::Polynomial,
                a: None,
                b: polynomial_b(&m, k)?,
            });
        }
        trace.push(TraceSample::new(k, estimates, Some(closed.b_norm)))?;
    }
    Ok(trace)
}
