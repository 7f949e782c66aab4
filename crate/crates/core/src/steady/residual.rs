use crate::domain::{GridFunction1D, MembranePair, Params, Role};
use crate::elliptic::{boundary_traces, solve_potential, PotentialField};
use crate::error::Result;
use crate::linalg::solve_tridiagonal;

/// Interior unknowns `(u_1..u_{n-2}, v̂_1..v̂_{n-2})`.
pub(crate) fn pack(m: &MembranePair) -> Vec<f64> {
    let n = m.grid().nx();
    let vh = m.v_hat();
    m.u.values()[1..n - 1]
        .iter()
        .chain(&vh.values()[1..n - 1])
        .copied()
        .collect()
}

pub(crate) fn unpack(x: &[f64], like: &MembranePair) -> Result<MembranePair> {
    let g = *like.grid();
    let n = g.nx();
    let k = n - 2;
    let mut u = vec![0.0; n];
    let mut v = vec![-1.0; n];
    u[1..n - 1].copy_from_slice(&x[..k]);
    for i in 0..k {
        v[i + 1] = x[k + i] - 1.0;
    }
    MembranePair::new(
        GridFunction1D::new(g, u, Role::Displacement)?,
        GridFunction1D::new(g, v, Role::Displacement)?,
    )
}

fn second_difference_interior(w: &[f64], h: f64) -> Vec<f64> {
    let n = w.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
    }
    d
}

/// `(1 + ε² w_x²)^{5/2} / (u - v)² · trace²` for both membranes.
fn field_terms(m: &MembranePair, p: &Params, phi: &PotentialField) -> (Vec<f64>, Vec<f64>) {
    let (t1, t0) = boundary_traces(phi);
    let e2 = p.eps * p.eps;
    let (ux, vx) = (m.u.dx(), m.v.dx());
    let gap = m.gap();
    let term = |slope: &[f64], tr: &[f64]| -> Vec<f64> {
        (0..gap.len())
            .map(|i| (1.0 + e2 * slope[i] * slope[i]).powf(2.5) / (gap[i] * gap[i]) * tr[i] * tr[i])
            .collect()
    };
    (term(&ux, t1.values()), term(&vx, t0.values()))
}

fn interior_only(mut w: Vec<f64>) -> Vec<f64> {
    let n = w.len();
    w[0] = 0.0;
    w[n - 1] = 0.0;
    w
}

/// Stationary residual at interior nodes (zero at the ends):
///
/// `r1 = u_xx - λ (1+ε²u_x²)^{5/2} / (u-v)² · |φ̃_{z'}(·,1)|²`,
/// `r2 = v_xx + μ (1+ε²v_x²)^{5/2} / (u-v)² · |φ̃_{z'}(·,0)|²`.
pub fn stationary_residual(m: &MembranePair, p: &Params) -> Result<(GridFunction1D, GridFunction1D)> {
    let phi = solve_potential(m, p)?;
    Ok(residual_from(m, p, &phi))
}

pub(crate) fn residual_from(
    m: &MembranePair,
    p: &Params,
    phi: &PotentialField,
) -> (GridFunction1D, GridFunction1D) {
    let g = *m.grid();
    let h = g.hx();
    let (h1, h2) = field_terms(m, p, phi);
    let uxx = second_difference_interior(m.u.values(), h);
    let vxx = second_difference_interior(m.v.values(), h);
    let r1 = interior_only((0..g.nx()).map(|i| uxx[i] - p.lambda * h1[i]).collect());
    let r2 = interior_only((0..g.nx()).map(|i| vxx[i] + p.mu * h2[i]).collect());
    (
        GridFunction1D::new(g, r1, Role::Residual).expect("finite residual"),
        GridFunction1D::new(g, r2, Role::Residual).expect("finite residual"),
    )
}

/// `A(0)⁻¹ w` with `A(0) = -∂²ₓ` and homogeneous Dirichlet data.
pub(crate) fn inverse_dirichlet_laplacian(w: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = w.len();
    let m = n - 2;
    let rhs: Vec<f64> = w[1..n - 1].iter().map(|x| x * h * h).collect();
    let y = solve_tridiagonal(&vec![-1.0; m], &vec![2.0; m], &vec![-1.0; m], &rhs)?;
    let mut out = vec![0.0; n];
    out[1..n - 1].copy_from_slice(&y);
    Ok(out)
}

/// `F(Λ, U) = (U₁ + Λ₁ A(0)⁻¹ h₁, Û₂ - Λ₂ A(0)⁻¹ h₂)` in offset form
/// `(u, v̂)`, where `h₁, h₂` are the field terms of the stationary
/// residual. Zeros of `F` are the steady states.
pub fn fixed_point_map(
    lambda: (f64, f64),
    m: &MembranePair,
    p: &Params,
) -> Result<(GridFunction1D, GridFunction1D)> {
    let phi = solve_potential(m, p)?;
    let (h1, h2) = field_terms(m, p, &phi);
    let g = *m.grid();
    let h = g.hx();
    let a1 = inverse_dirichlet_laplacian(&h1, h)?;
    let a2 = inverse_dirichlet_laplacian(&h2, h)?;
    let vh = m.v_hat();
    let f1: Vec<f64> = (0..g.nx()).map(|i| m.u.values()[i] + lambda.0 * a1[i]).collect();
    let f2: Vec<f64> = (0..g.nx()).map(|i| vh.values()[i] - lambda.1 * a2[i]).collect();
    Ok((
        GridFunction1D::new(g, f1, Role::Residual)?,
        GridFunction1D::new(g, f2, Role::Residual)?,
    ))
}
