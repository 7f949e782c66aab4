use crate::domain::{MembranePair, Params};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, write_row};
use crate::steady::newton::{solve_steady, SteadyState};
use crate::steady::threshold::xi0;
use std::io::Write;

/// Maximum number of times a failed continuation step is halved.
pub const MAX_STEP_HALVINGS: u32 = 8;

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub lambda_values: Vec<f64>,
    pub states: Vec<SteadyState>,
    /// Largest `λ` with a converged state.
    pub fold_estimate: Option<f64>,
    /// `μ = ratio · λ` along the sweep.
    pub ratio: f64,
    /// The `λ` whose solve failed after all halvings, if any.
    pub failed_at: Option<f64>,
}

impl ContinuationResult {
    /// `fold_estimate ≤ ξ₀(ε) + tol`, measured on `max(λ, μ)`.
    pub fn below_threshold(&self, eps: f64, tol: f64) -> bool {
        self.fold_estimate
            .is_none_or(|l| l * self.ratio.max(1.0) <= xi0(eps) + tol)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write_row(
            &mut w,
            &["lambda", "residual", "min_gap", "newton_iters"].map(String::from),
        )?;
        for s in &self.states {
            write_row(
                &mut w,
                &[
                    fmt_f64(s.lambda),
                    fmt_f64(s.residual_norm),
                    fmt_f64(s.state.min_gap()),
                    s.newton_iters.to_string(),
                ],
            )?;
        }
        Ok(())
    }
}

/// Natural-parameter continuation in `λ` with `μ = ratio · λ`, warm-started
/// from the previous converged state. A failed step is halved up to
/// [`MAX_STEP_HALVINGS`] times before the sweep stops.
pub fn pullin_sweep(
    p: &Params,
    init: &MembranePair,
    lambda_grid: &[f64],
    ratio: f64,
) -> Result<ContinuationResult> {
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("lambda grid must be strictly increasing".into()));
    }
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidParam {
            name: "ratio",
            reason: format!("must be ≥ 0, got {ratio}"),
        });
    }
    let mut result = ContinuationResult {
        lambda_values: Vec::new(),
        states: Vec::new(),
        fold_estimate: None,
        ratio,
        failed_at: None,
    };
    let solve = |l: f64, from: &MembranePair| solve_steady(&p.with_lambda_mu(l, ratio * l), from);

    let mut current = init.clone();
    let mut last: Option<f64> = None;
    'grid: for &target in lambda_grid {
        let mut l = target;
        let mut halvings = 0;
        loop {
            match solve(l, &current) {
                Ok(s) => {
                    current = s.state.clone();
                    result.lambda_values.push(l);
                    result.states.push(s);
                    last = Some(l);
                    if l == target {
                        break;
                    }
                    l = target;
                    halvings = 0;
                }
                Err(Error::Newton { .. }) | Err(Error::NotAdmissible { .. }) | Err(Error::DomainCollapsed { .. }) => {
                    let Some(prev) = last else {
                        result.failed_at = Some(l);
                        break 'grid;
                    };
                    if halvings == MAX_STEP_HALVINGS {
                        result.failed_at = Some(l);
                        break 'grid;
                    }
                    halvings += 1;
                    l = prev + 0.5 * (l - prev);
                }
                Err(e) => return Err(e),
            }
        }
    }
    result.fold_estimate = last;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::make_grid;

    #[test]
    fn single_unforced_value() {
        let g = make_grid(17, 9).unwrap();
        let r = pullin_sweep(&Params::default(), &MembranePair::flat(g), &[0.0], 1.0).unwrap();
        assert_eq!(r.fold_estimate, Some(0.0));
        assert_eq!(r.states[0].state, MembranePair::flat(g));
    }

    #[test]
    fn rejects_unsorted_grid() {
        let g = make_grid(17, 9).unwrap();
        assert!(pullin_sweep(&Params::default(), &MembranePair::flat(g), &[0.2, 0.1], 1.0).is_err());
    }
}
