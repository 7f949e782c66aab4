use crate::domain::grid::Grid;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Physical and numerical parameters.
///
/// `eps` is the aspect ratio, `lambda` and `mu` are the voltage-to-tension
/// ratios of the upper and lower membrane. `kappa` and `q` define the
/// admissible set used to gate the elliptic solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub eps: f64,
    pub lambda: f64,
    pub mu: f64,
    pub kappa: f64,
    pub q: f64,
    /// Time step; `None` selects `0.25 hx² / max(1, λ, μ)`.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Touchdown threshold on `min(u - v)`.
    pub gap_tol: f64,
    /// Relative residual required of every linear solve.
    pub linear_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            eps: 0.1,
            lambda: 1.0,
            mu: 1.0,
            kappa: 5e-4,
            q: 4.0,
            dt: None,
            t_end: 0.1,
            gap_tol: 1e-3,
            linear_tol: 1e-10,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}

impl Params {
    pub fn new(eps: f64, lambda: f64, mu: f64) -> Result<Self> {
        let p = Self {
            eps,
            lambda,
            mu,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(invalid("eps", format!("must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be ≥ 0, got {}", self.lambda)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(invalid("mu", format!("must be ≥ 0, got {}", self.mu)));
        }
        if !(self.kappa > 0.0 && self.kappa < 0.5) {
            return Err(invalid("kappa", format!("must lie in (0, 1/2), got {}", self.kappa)));
        }
        if !(self.q >= 2.0 && self.q.is_finite()) {
            return Err(invalid("q", format!("must lie in [2, ∞), got {}", self.q)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt", format!("must be > 0, got {dt}")));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be > 0, got {}", self.t_end)));
        }
        if !(self.gap_tol > 0.0 && self.gap_tol < 1.0) {
            return Err(invalid("gap_tol", format!("must lie in (0, 1), got {}", self.gap_tol)));
        }
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) {
            return Err(invalid(
                "linear_tol",
                format!("must lie in (0, 1), got {}", self.linear_tol),
            ));
        }
        Ok(())
    }

    pub fn with_lambda_mu(mut self, lambda: f64, mu: f64) -> Self {
        self.lambda = lambda;
        self.mu = mu;
        self
    }

    /// The configured step, or `0.25 hx² / max(1, λ, μ)`.
    pub fn time_step(&self, grid: &Grid) -> f64 {
        self.dt
            .unwrap_or_else(|| 0.25 * grid.hx() * grid.hx() / self.lambda.max(self.mu).max(1.0))
    }
}
