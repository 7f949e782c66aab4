use crate::domain::{admissible_check, MembranePair, Params};
use crate::elliptic::{solve_potential, PotentialField};
use crate::error::{Error, Result};
use crate::steady::residual::{pack, residual_from, unpack};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub const NEWTON_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERS: usize = 50;
pub const MAX_HALVINGS: u32 = 10;
/// Relative step of the central-difference Jacobians.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub state: MembranePair,
    pub phi: PotentialField,
    /// Max-norm of the stationary residual.
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub lambda: f64,
    pub mu: f64,
}

/// Central-difference Jacobian of `f` at `x`, step `FD_STEP · max(1, ‖x‖∞)`.
/// Columns are evaluated concurrently.
pub(crate) fn fd_jacobian<F>(f: F, x: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let h = FD_STEP * scale;
    let cols: Vec<Vec<f64>> = (0..x.len())
        .into_par_iter()
        .map(|k| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        })
        .collect::<Result<_>>()?;
    let m = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(m, x.len(), |i, j| cols[j][i]))
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Interior residual entries as one vector, with the potential used.
fn residual_vector(m: &MembranePair, p: &Params) -> Result<(Vec<f64>, PotentialField)> {
    let phi = solve_potential(m, p)?;
    let (r1, r2) = residual_from(m, p, &phi);
    let n = m.grid().nx();
    let r = r1.values()[1..n - 1]
        .iter()
        .chain(&r2.values()[1..n - 1])
        .copied()
        .collect();
    Ok((r, phi))
}

fn newton_failure(residual: f64, iterations: usize, reason: &str) -> Error {
    Error::Newton {
        residual,
        iterations,
        reason: reason.into(),
    }
}

/// Damped Newton on the stationary residual with a finite-difference
/// Jacobian. Steps are halved (down to `2⁻¹⁰`) until the residual decreases.
pub fn solve_steady(p: &Params, init: &MembranePair) -> Result<SteadyState> {
    p.validate()?;
    if !init.boundary_ok() {
        return Err(Error::InvalidParam {
            name: "init",
            reason: "boundary values must be u(±1)=0, v(±1)=-1".into(),
        });
    }
    let mut x = pack(init);
    let mut state = init.clone();
    let (mut r, mut phi) = residual_vector(&state, p)?;
    let mut norm = max_abs(&r);
    let mut iters = 0;
    while norm > NEWTON_TOL {
        if iters == MAX_NEWTON_ITERS {
            return Err(newton_failure(norm, iters, "iteration limit"));
        }
        let jac = fd_jacobian(|y| Ok(residual_vector(&unpack(y, init)?, p)?.0), &x)
            .map_err(|e| newton_failure(norm, iters, &format!("jacobian: {e}")))?;
        let Some(dx) = jac.lu().solve(&DVector::from_column_slice(&r)) else {
            return Err(newton_failure(norm, iters, "singular jacobian"));
        };
        iters += 1;
        let mut accepted = None;
        for k in 0..=MAX_HALVINGS {
            let t = 0.5f64.powi(k as i32);
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a - t * d).collect();
            let Ok(m) = unpack(&trial, init) else { continue };
            if let Ok((rt, phit)) = residual_vector(&m, p) {
                let nt = max_abs(&rt);
                if nt < norm {
                    accepted = Some((trial, m, rt, phit, nt));
                    break;
                }
            }
        }
        let Some((xn, mn, rn, phin, nn)) = accepted else {
            return Err(newton_failure(norm, iters, "step halving exhausted"));
        };
        x = xn;
        state = mn;
        r = rn;
        phi = phin;
        norm = nn;
    }
    let report = admissible_check(&state, p, true);
    if !report.geometry_ok() {
        return Err(Error::NotAdmissible {
            violated: report.violated,
        });
    }
    Ok(SteadyState {
        state,
        phi,
        residual_norm: norm,
        newton_iters: iters,
        lambda: p.lambda,
        mu: p.mu,
    })
}
