use crate::domain::function::first_difference;
use crate::domain::{GridFunction1D, MembranePair, Params, Role};
use crate::elliptic::{trace_forcing, TraceForcing};
use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;

/// `A(w1)w2 = -w2_xx / (1 + w1_x²)^{3/2}` at interior nodes; zero at the ends.
pub fn curvature_apply(w1: &GridFunction1D, w2: &GridFunction1D) -> Result<GridFunction1D> {
    if w1.grid() != w2.grid() {
        return Err(Error::GridMismatch("curvature operands".into()));
    }
    let g = *w1.grid();
    let c = curvature_factor(w1.values(), g.hx(), 1.0);
    let h2 = g.hx() * g.hx();
    let w = w2.values();
    let mut out = vec![0.0; w.len()];
    for i in 1..w.len() - 1 {
        out[i] = -c[i] * (w[i + 1] - 2.0 * w[i] + w[i - 1]) / h2;
    }
    GridFunction1D::new(g, out, Role::Residual)
}

/// `(1 + (scale·w_x)²)^{-3/2}` from central differences; the end values use
/// the one-sided slope and are never read by the interior stencil.
pub(crate) fn curvature_factor(w: &[f64], h: f64, scale: f64) -> Vec<f64> {
    first_difference(w, h)
        .into_iter()
        .map(|d| {
            let s = scale * d;
            (1.0 + s * s).powf(-1.5)
        })
        .collect()
}

/// Solves `(I + dt·A) y = rhs` where `A y = -c y_xx`, with `y = 0` at both
/// ends. `rhs` and `c` are full-length; only interior entries are used.
pub(crate) fn implicit_diffusion(c: &[f64], rhs: &[f64], h: f64, dt: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    let r = dt / (h * h);
    let m = n - 2;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    for k in 0..m {
        let w = r * c[k + 1];
        lower[k] = -w;
        diag[k] = 1.0 + 2.0 * w;
        upper[k] = -w;
    }
    let y = solve_tridiagonal(&lower, &diag, &upper, &rhs[1..n - 1])?;
    let mut out = vec![0.0; n];
    out[1..n - 1].copy_from_slice(&y);
    Ok(out)
}

/// One IMEX step with explicit forcing `fu` on `u` and `fv` on `v̂`:
///
/// `(I + dt A(s·u)) u¹ = u + dt·fu`, `(I + dt A(s·v̂)) v̂¹ = v̂ + dt·fv`.
///
/// `slope_scale = ε` gives the full model, `0` the narrow-gap model.
/// The returned state is not checked for an open gap.
pub(crate) fn imex_update(
    state: &MembranePair,
    fu: &[f64],
    fv: &[f64],
    slope_scale: f64,
    dt: f64,
) -> Result<MembranePair> {
    let g = *state.grid();
    let h = g.hx();
    let u = state.u.values();
    let vh = state.v_hat().into_values();

    let rhs_u: Vec<f64> = u.iter().zip(fu).map(|(a, f)| a + dt * f).collect();
    let rhs_v: Vec<f64> = vh.iter().zip(fv).map(|(a, f)| a + dt * f).collect();
    let cu = curvature_factor(u, h, slope_scale);
    let cv = curvature_factor(&vh, h, slope_scale);
    let u1 = implicit_diffusion(&cu, &rhs_u, h, dt)?;
    let vh1 = implicit_diffusion(&cv, &rhs_v, h, dt)?;

    let v1: Vec<f64> = vh1.iter().map(|w| w - 1.0).collect();
    let mut v1 = v1;
    let n = v1.len();
    v1[0] = -1.0;
    v1[n - 1] = -1.0;
    MembranePair::with_free_ends(
        GridFunction1D::new(g, u1, Role::Displacement)?,
        GridFunction1D::new(g, v1, Role::Displacement)?,
    )
}

/// Full-model step with the trace forcing already evaluated at `state`.
pub(crate) fn step_with_forcing(
    state: &MembranePair,
    forcing: &TraceForcing,
    p: &Params,
    dt: f64,
) -> Result<MembranePair> {
    let fu: Vec<f64> = forcing.g1.values().iter().map(|g| -p.lambda * g).collect();
    let fv: Vec<f64> = forcing.g2.values().iter().map(|g| p.mu * g).collect();
    imex_update(state, &fu, &fv, p.eps, dt)
}

/// One semi-implicit step of the full model: curvature coefficients frozen
/// at `state`, diffusion implicit, field forcing explicit.
pub fn step_imex(state: &MembranePair, p: &Params, dt: f64) -> Result<MembranePair> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParam {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let forcing = trace_forcing(state, p)?;
    let next = step_with_forcing(state, &forcing, p, dt)?;
    next.require_open_gap()?;
    Ok(next)
}
