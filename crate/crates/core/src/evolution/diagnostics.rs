use crate::domain::{trapezoid, MembranePair, Params};
use crate::elliptic::{gradient_energy, PotentialField};

/// `E = -½ ∫ (u - v - 1) dx`, which lies in `[0, 1)` whenever
/// `-1 ≤ v < u ≤ 0`.
pub fn gap_functional(state: &MembranePair) -> f64 {
    let integrand: Vec<f64> = state.gap().into_iter().map(|d| d - 1.0).collect();
    0.0 - 0.5 * trapezoid(&integrand, state.grid().hx())
}

/// `∫ (√(1 + ε² w_x²) - 1) dx`.
pub(crate) fn stretching(w: &[f64], h: f64, eps: f64) -> f64 {
    let d = crate::domain::function::first_difference(w, h);
    let vals: Vec<f64> = d
        .iter()
        .map(|s| {
            let t = eps * eps * s * s;
            // √(1+t) - 1 without cancellation for small slopes
            t / ((1.0 + t).sqrt() + 1.0)
        })
        .collect();
    trapezoid(&vals, h)
}

/// Tension ratio `λ/μ` weighting the lower membrane; taken as 1 when the
/// lower membrane is unforced.
pub(crate) fn tension_ratio(p: &Params) -> f64 {
    if p.mu > 0.0 {
        p.lambda / p.mu
    } else {
        1.0
    }
}

/// Dimensionless total energy
/// `λε² ∫|∇_ε φ|² + ∫(√(1+ε²u_x²)-1) + (λ/μ) ∫(√(1+ε²v_x²)-1)`.
pub fn total_energy(state: &MembranePair, phi: &PotentialField, p: &Params) -> f64 {
    let h = state.grid().hx();
    p.lambda * p.eps * p.eps * gradient_energy(phi, state, p)
        + stretching(state.u.values(), h, p.eps)
        + tension_ratio(p) * stretching(state.v.values(), h, p.eps)
}

/// Upper bound `‖u0 - v0‖_{L1} / (max(λ, μ) - 4/ε)` on the existence time,
/// or `None` when `max(λ, μ) ≤ 4/ε`.
pub fn touchdown_bound(initial: &MembranePair, p: &Params) -> Option<f64> {
    let lm = p.lambda.max(p.mu);
    let threshold = 4.0 / p.eps;
    if lm <= threshold {
        return None;
    }
    let abs_gap: Vec<f64> = initial.gap().into_iter().map(f64::abs).collect();
    Some(trapezoid(&abs_gap, initial.grid().hx()) / (lm - threshold))
}
