use crate::domain::{Field2D, Grid, MembranePair, Params};
use crate::elliptic::operator::{assemble, TransformedOperator};
use crate::error::{Error, Result};
use crate::linalg::{bicgstab, norm2};

/// Solver used for the sparse transformed system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearBackend {
    /// Banded LU with partial pivoting.
    #[default]
    Direct,
    /// Jacobi-preconditioned BiCGSTAB, for grids too large to factor.
    BiCgStab { max_iter: usize },
}

/// Solution of the transformed potential problem.
#[derive(Debug, Clone)]
pub struct PotentialField {
    /// `φ̃ = ψ + z'`, equal to `z'` on `∂Ω`.
    pub phi_tilde: Field2D,
    /// `ψ`, vanishing on `∂Ω`.
    pub psi: Field2D,
}

impl PotentialField {
    pub fn grid(&self) -> &Grid {
        self.phi_tilde.grid()
    }
}

/// Solves `-Δ̃ψ = f` with `ψ = 0` on `∂Ω` and returns `φ̃ = ψ + z'`.
pub fn solve_potential(m: &MembranePair, p: &Params) -> Result<PotentialField> {
    solve_potential_with(m, p, LinearBackend::Direct)
}

pub fn solve_potential_with(
    m: &MembranePair,
    p: &Params,
    backend: LinearBackend,
) -> Result<PotentialField> {
    let op = assemble(m, p)?;
    let g = *m.grid();
    let mut rhs = vec![0.0; op.n_unknowns()];
    for i in 1..g.nx() - 1 {
        for j in 1..g.nz() - 1 {
            rhs[op.index(i, j)] = op.a_z.get(i, j);
        }
    }
    let psi = solve_interior(&op, &rhs, p.linear_tol, backend)?;
    let phi_tilde = Field2D::from_fn(g, |_, z| z);
    let mut phi_tilde = phi_tilde;
    for i in 1..g.nx() - 1 {
        for j in 1..g.nz() - 1 {
            let z = phi_tilde.get(i, j);
            phi_tilde.set(i, j, z + psi.get(i, j));
        }
    }
    Ok(PotentialField { phi_tilde, psi })
}

/// Solves `-Δ̃w = rhs` with homogeneous Dirichlet data. `rhs` holds the
/// interior values in unknown ordering (x-major, z' fastest).
pub fn solve_interior(
    op: &TransformedOperator,
    rhs: &[f64],
    tol: f64,
    backend: LinearBackend,
) -> Result<Field2D> {
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        return Ok(Field2D::zeros(*op.grid()));
    }
    let x = match backend {
        LinearBackend::Direct => {
            let lu = op.band_matrix().factor()?;
            let mut x = rhs.to_vec();
            lu.solve_in_place(&mut x);
            let mut rel = relative_residual(op, &x, rhs, bnorm);
            // one step of iterative refinement if the first solve falls short
            if rel > tol {
                let ax = op.apply_interior(&x);
                let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
                lu.solve_in_place(&mut r);
                for (xi, ri) in x.iter_mut().zip(&r) {
                    *xi += ri;
                }
                rel = relative_residual(op, &x, rhs, bnorm);
            }
            if rel > tol {
                return Err(Error::LinearSolve {
                    residual: rel,
                    iterations: 2,
                });
            }
            x
        }
        LinearBackend::BiCgStab { max_iter } => {
            let diag = op.diagonal();
            bicgstab(|y| op.apply_interior(y), &diag, rhs, None, tol, max_iter)?.0
        }
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("potential"));
    }
    Ok(op.embed(&x))
}

fn relative_residual(op: &TransformedOperator, x: &[f64], b: &[f64], bnorm: f64) -> f64 {
    let ax = op.apply_interior(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    norm2(&r) / bnorm
}
