//! Exact amplitudes and the phase condition for generalized quantum search
//! with arbitrary phase rotations, `Q = −I_γ U⁻¹ I_τ U`.
//!
//! On the plane spanned by |γ⟩ and U⁻¹|τ⟩ the operator acts as a 2×2 matrix M.
//! The crate builds M, evaluates `Q^k|γ⟩` by several independent routes, and
//! decides when some k drives the desired-state amplitude to modulus one.
//!
//! ```
//! use amplikit::{check_condition, PhaseConfig};
//!
//! let cfg = PhaseConfig::with_p(0.0, 0.0, 0.1).unwrap();
//! let verdict = check_condition(&cfg).unwrap();
//! assert!(verdict.satisfied);
//! assert_eq!(verdict.k_opt_int, Some(7));
//! ```

pub mod condition;
pub mod error;
mod exact;
pub mod operator;
pub mod recurrence;
pub mod spectral;
pub mod statevector;
pub mod trace;
pub mod types;
pub mod verify;

pub use num_complex::Complex64;

pub use condition::{
    check_condition, compare_grover_identical, corollary1_bound, corollary1_verdict, corollary2_excludes, grover_k,
    grover_k_approx, identical_k, monotone_window_check, optimal_k, period, special_phi_zero, special_theta_zero,
    ComparisonReport, ComparisonRow, PhaseVerdict,
};
pub use error::{Error, Result};
pub use operator::build_iteration_matrix;
pub use recurrence::{iterate_b, iterate_pair, polynomial_b};
pub use spectral::{amplitude_closed, spectral_decompose, ClosedAmplitude, SpectralData};
pub use statevector::{DenseUnitary, SearchInstance, StateVector, UnitarySpec};
pub use trace::model_trace;
pub use types::{
    parse_angle, AmplitudePair, AmplitudeTrace, ComplexLiteral, Estimate, IterationMatrix, Method, PhaseConfig,
    TraceSample,
};
