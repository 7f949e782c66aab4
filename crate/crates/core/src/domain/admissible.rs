use crate::domain::function::MembranePair;
use crate::domain::norm::discrete_norm;
use crate::domain::params::Params;
use serde::Serialize;

/// Membership of a state in `S_q(κ)` (strict) or its closure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub min_gap: f64,
    /// Discrete `W²_q` surrogate of `u`.
    pub norm_u: f64,
    /// Discrete `W²_q` surrogate of `v + 1`.
    pub norm_v: f64,
    pub boundary_ok: bool,
    pub in_s: bool,
    pub violated: Vec<String>,
}

impl AdmissibilityReport {
    /// Applies the membership rules to precomputed quantities.
    pub fn evaluate(
        min_gap: f64,
        norm_u: f64,
        norm_v: f64,
        boundary_ok: bool,
        kappa: f64,
        closure: bool,
    ) -> Self {
        let cap = 1.0 / kappa;
        let (gap_ok, u_ok, v_ok) = if closure {
            (min_gap >= 2.0 * kappa, norm_u <= cap, norm_v <= cap)
        } else {
            (min_gap > 2.0 * kappa, norm_u < cap, norm_v < cap)
        };
        let mut violated = Vec::new();
        if !gap_ok {
            violated.push("gap".to_string());
        }
        if !u_ok {
            violated.push("norm_u".to_string());
        }
        if !v_ok {
            violated.push("norm_v".to_string());
        }
        if !boundary_ok {
            violated.push("boundary".to_string());
        }
        Self {
            min_gap,
            norm_u,
            norm_v,
            boundary_ok,
            in_s: violated.is_empty(),
            violated,
        }
    }

    /// True when the geometric constraints hold, ignoring the clamped ends.
    pub fn geometry_ok(&self) -> bool {
        self.violated.iter().all(|v| v == "boundary")
    }
}

/// Checks `(u, v)` against `S_q(κ)`; `closure` selects the non-strict
/// inequalities of the closure.
pub fn admissible_check(m: &MembranePair, p: &Params, closure: bool) -> AdmissibilityReport {
    let norm_u = discrete_norm(&m.u, 2, p.q);
    let norm_v = discrete_norm(&m.v_hat(), 2, p.q);
    AdmissibilityReport::evaluate(
        m.min_gap(),
        norm_u,
        norm_v,
        m.boundary_ok(),
        p.kappa,
        closure,
    )
}
