//! Construction of the iteration matrix M and its algebraic identities.

use num_complex::Complex64;

use crate::types::{IterationMatrix, PhaseConfig};

fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Builds M from the unit-modulus phase factors:
///
/// ```text
/// α = e^{i2θ} − (e^{i2θ}+1)(e^{i2φ}+1)p²
/// β = (e^{i2φ}+1) U_τγ
/// λ = −e^{i2φ}(e^{i2θ}+1) U_τγ*
/// δ = e^{i2φ}
/// ```
///
/// Degenerate configurations are accepted; only β vanishes for them.
pub fn build_iteration_matrix(cfg: &PhaseConfig) -> IterationMatrix {
    let one = Complex64::new(1.0, 0.0);
    let e_theta = cis(2.0 * cfg.theta());
    let e_phi = cis(2.0 * cfg.phi());
    let u = cfg.u_tau_gamma();
    let p2 = cfg.p() * cfg.p();

    let m = IterationMatrix {
        alpha: e_theta - (e_theta + one) * (e_phi + one) * p2,
        beta: (e_phi + one) * u,
        lambda: -e_phi * (e_theta + one) * u.conj(),
        delta: e_phi,
        sum_phase: cfg.theta() + cfg.phi(),
    };
    debug_assert!(
        entries_close(&m, &build_iteration_matrix_rotation_form(cfg), 1e-14),
        "the two entry forms of M disagree"
    );
    m
}

/// The same matrix written with the rotation factor `2cosθ·e^{iθ}` of the
/// phase operator `I − 2cosθ·e^{iθ}|x⟩⟨x|`. Kept as an independent route to M.
pub fn build_iteration_matrix_rotation_form(cfg: &PhaseConfig) -> IterationMatrix {
    let one = Complex64::new(1.0, 0.0);
    let (t, f) = (cfg.theta(), cfg.phi());
    let rot_theta = 2.0 * t.cos() * cis(t);
    let rot_phi = 2.0 * f.cos() * cis(f);
    let u = cfg.u_tau_gamma();
    let p2 = cfg.p() * cfg.p();

    IterationMatrix {
        alpha: -(one - rot_theta + rot_theta * rot_phi * p2),
        beta: rot_phi * u,
        lambda: rot_theta * (one - rot_phi) * u.conj(),
        delta: rot_phi - one,
        sum_phase: t + f,
    }
}

fn entries_close(x: &IterationMatrix, y: &IterationMatrix, tol: f64) -> bool {
    (x.alpha - y.alpha).norm() <= tol
        && (x.beta - y.beta).norm() <= tol
        && (x.lambda - y.lambda).norm() <= tol
        && (x.delta - y.delta).norm() <= tol
}

/// Closed form of the trace: `2(cos(θ−φ) − 2p²cosθcosφ) e^{i(θ+φ)}`.
pub fn trace_closed_form(cfg: &PhaseConfig) -> Complex64 {
    2.0 * cfg.trace_scalar() * cis(cfg.theta() + cfg.phi())
}

/// Closed form of the determinant: `e^{i2(θ+φ)}`.
pub fn det_closed_form(cfg: &PhaseConfig) -> Complex64 {
    cis(2.0 * (cfg.theta() + cfg.phi()))
}

/// Checks `|cos(θ−φ) − 2p²cosθcosφ| ≤ 1`, with strict inequality required
/// whenever cosθcosφ ≠ 0 (equality only when cosθ = cosφ = 0).
pub fn trace_magnitude_bound_check(cfg: &PhaseConfig) -> bool {
    let value = cfg.trace_scalar().abs();
    let cos_product = cfg.theta().cos() * cfg.phi().cos();
    // cos(π/2) evaluates to ~6e-17 rather than 0
    let on_equality_locus = cos_product.abs() < 1e-12;
    if on_equality_locus {
        value <= 1.0 + 1e-12
    } else {
        value < 1.0
    }
}
