use crate::domain::{admissible_check, Field2D, Grid, MembranePair, Params};
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;

/// Nodal coefficients of the transformed Laplacian
///
/// ```text
/// Δ̃w = a_xx w_{x'x'} + a_xz w_{x'z'} + a_zz w_{z'z'} + a_z w_{z'}
/// ```
///
/// with `s = z'(u_x - v_x) + v_x`, `d = u - v` and
/// `a_xx = ε²`, `a_xz = -2ε² s/d`, `a_zz = (1 + ε² s²)/d²`,
/// `a_z = ε² (2 (u_x - v_x) s / d² - (z'(u_xx - v_xx) + v_xx) / d)`.
#[derive(Debug, Clone)]
pub struct TransformedOperator {
    grid: Grid,
    pub a_xx: Field2D,
    pub a_xz: Field2D,
    pub a_zz: Field2D,
    pub a_z: Field2D,
}

/// Rejects states that are collapsed or outside the closure of `S_q(κ)`.
/// The clamped end values are not required here.
pub(crate) fn gate(m: &MembranePair, p: &Params) -> Result<()> {
    m.require_open_gap()?;
    let report = admissible_check(m, p, true);
    if !report.geometry_ok() {
        return Err(Error::NotAdmissible {
            violated: report.violated,
        });
    }
    Ok(())
}

pub fn assemble(m: &MembranePair, p: &Params) -> Result<TransformedOperator> {
    gate(m, p)?;
    Ok(assemble_unchecked(m, p.eps))
}

pub(crate) fn assemble_unchecked(m: &MembranePair, eps: f64) -> TransformedOperator {
    let g = *m.grid();
    let (ux, vx) = (m.u.dx(), m.v.dx());
    let (uxx, vxx) = (m.u.dxx(), m.v.dxx());
    let e2 = eps * eps;
    let mut op = TransformedOperator {
        grid: g,
        a_xx: Field2D::zeros(g),
        a_xz: Field2D::zeros(g),
        a_zz: Field2D::zeros(g),
        a_z: Field2D::zeros(g),
    };
    for i in 0..g.nx() {
        let d = m.u.values()[i] - m.v.values()[i];
        let dx = ux[i] - vx[i];
        let dxx = uxx[i] - vxx[i];
        for j in 0..g.nz() {
            let z = g.z(j);
            let s = z * dx + vx[i];
            op.a_xx.set(i, j, e2);
            op.a_xz.set(i, j, -2.0 * e2 * s / d);
            op.a_zz.set(i, j, (1.0 + e2 * s * s) / (d * d));
            op.a_z
                .set(i, j, e2 * (2.0 * dx * s / (d * d) - (z * dxx + vxx[i]) / d));
        }
    }
    op
}

/// `f = Δ̃ z'`, the source for `ψ = φ̃ - z'`. Since `z'` is linear the
/// difference stencils reproduce it exactly, leaving only the `a_z` term.
pub fn source_term(m: &MembranePair, p: &Params) -> Result<Field2D> {
    Ok(assemble(m, p)?.a_z.clone())
}

impl TransformedOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of interior unknowns.
    pub fn n_unknowns(&self) -> usize {
        (self.grid.nx() - 2) * (self.grid.nz() - 2)
    }

    #[inline]
    pub(crate) fn index(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.grid.nz() - 2) + (j - 1)
    }

    /// The nine stencil weights of `-Δ̃` at interior node `(i, j)`, ordered
    /// `[di][dj]` for offsets `-1, 0, +1`.
    fn stencil(&self, i: usize, j: usize) -> [[f64; 3]; 3] {
        let (hx, hz) = (self.grid.hx(), self.grid.hz());
        let axx = self.a_xx.get(i, j) / (hx * hx);
        let axz = self.a_xz.get(i, j) / (4.0 * hx * hz);
        let azz = self.a_zz.get(i, j) / (hz * hz);
        let az = self.a_z.get(i, j) / (2.0 * hz);
        let mut w = [[0.0; 3]; 3];
        w[0][1] = axx;
        w[2][1] = axx;
        w[1][1] = -2.0 * axx - 2.0 * azz;
        w[1][2] = azz + az;
        w[1][0] = azz - az;
        w[2][2] = axz;
        w[0][0] = axz;
        w[2][0] = -axz;
        w[0][2] = -axz;
        for row in &mut w {
            for c in row.iter_mut() {
                *c = -*c;
            }
        }
        w
    }

    /// Applies `-Δ̃` to a full field and returns the interior values in
    /// unknown ordering.
    pub fn apply_field(&self, w: &Field2D) -> Vec<f64> {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        let mut out = vec![0.0; self.n_unknowns()];
        for i in 1..nx - 1 {
            for j in 1..nz - 1 {
                let s = self.stencil(i, j);
                let mut acc = 0.0;
                for (di, row) in s.iter().enumerate() {
                    for (dj, c) in row.iter().enumerate() {
                        acc += c * w.get(i + di - 1, j + dj - 1);
                    }
                }
                out[self.index(i, j)] = acc;
            }
        }
        out
    }

    /// Applies `-Δ̃` with homogeneous Dirichlet data to interior unknowns.
    pub fn apply_interior(&self, x: &[f64]) -> Vec<f64> {
        self.apply_field(&self.embed(x))
    }

    pub(crate) fn embed(&self, x: &[f64]) -> Field2D {
        let mut w = Field2D::zeros(self.grid);
        for i in 1..self.grid.nx() - 1 {
            for j in 1..self.grid.nz() - 1 {
                w.set(i, j, x[self.index(i, j)]);
            }
        }
        w
    }

    pub(crate) fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_unknowns()];
        for i in 1..self.grid.nx() - 1 {
            for j in 1..self.grid.nz() - 1 {
                d[self.index(i, j)] = self.stencil(i, j)[1][1];
            }
        }
        d
    }

    /// Band matrix of `-Δ̃` on interior unknowns (z' fastest, bandwidth `nz - 1`).
    pub fn band_matrix(&self) -> BandMatrix {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        let bw = nz - 1;
        let mut a = BandMatrix::zeros(self.n_unknowns(), bw, bw);
        for i in 1..nx - 1 {
            for j in 1..nz - 1 {
                let row = self.index(i, j);
                let s = self.stencil(i, j);
                for (di, srow) in s.iter().enumerate() {
                    let ii = i + di - 1;
                    if ii == 0 || ii == nx - 1 {
                        continue;
                    }
                    for (dj, &c) in srow.iter().enumerate() {
                        let jj = j + dj - 1;
                        if jj == 0 || jj == nz - 1 || c == 0.0 {
                            continue;
                        }
                        a.add(row, self.index(ii, jj), c);
                    }
                }
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::make_grid;

    fn params(eps: f64) -> Params {
        Params {
            eps,
            kappa: 0.01,
            ..Params::default()
        }
    }

    #[test]
    fn flat_reduces_to_anisotropic_laplacian() {
        let g = make_grid(17, 17).unwrap();
        let op = assemble(&MembranePair::flat(g), &params(0.3)).unwrap();
        for i in 0..g.nx() {
            for j in 0..g.nz() {
                assert_eq!(op.a_xx.get(i, j), 0.3 * 0.3);
                assert_eq!(op.a_xz.get(i, j), 0.0);
                assert_eq!(op.a_zz.get(i, j), 1.0);
                assert_eq!(op.a_z.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn coefficient_parity_for_even_state() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::from_fn(
            g,
            |x| -0.2 * (1.0 - x * x) - 0.05 * (1.0 - x.powi(4)),
            |x| -1.0 + 0.15 * (1.0 - x * x),
        );
        let op = assemble(&m, &params(0.5)).unwrap();
        let nx = g.nx();
        for i in 0..nx {
            let k = nx - 1 - i;
            for j in 0..g.nz() {
                assert!((op.a_xx.get(i, j) - op.a_xx.get(k, j)).abs() < 1e-14);
                assert!((op.a_zz.get(i, j) - op.a_zz.get(k, j)).abs() < 1e-12);
                assert!((op.a_z.get(i, j) - op.a_z.get(k, j)).abs() < 1e-12);
                assert!((op.a_xz.get(i, j) + op.a_xz.get(k, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zz_coefficient_bounded_below() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::from_fn(
            g,
            |x| -0.3 * (1.0 - x * x) * (1.0 + 0.5 * x),
            |x| -1.0 + 0.2 * (1.0 - x * x) * (1.0 - 0.4 * x),
        );
        let op = assemble(&m, &params(0.7)).unwrap();
        let bound = 1.0 / (m.max_gap() * m.max_gap());
        for v in op.a_zz.values() {
            assert!(*v >= bound);
        }
        for v in op.a_xx.values() {
            assert_eq!(*v, 0.7 * 0.7);
        }
    }

    #[test]
    fn source_vanishes_for_flat_state() {
        let g = make_grid(17, 17).unwrap();
        let f = source_term(&MembranePair::flat(g), &params(0.5)).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn source_value_at_centre_top() {
        // u = -0.1(1-x²), v = -1, ε = 0.5: at x = 0, z' = 1,
        // f = ε² (0 - u_xx / (u - v)) = -0.25 · 0.2 / 0.9 = -1/18.
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::from_fn(g, |x| -0.1 * (1.0 - x * x), |_| -1.0);
        let f = source_term(&m, &params(0.5)).unwrap();
        assert!((f.get(16, 16) + 1.0 / 18.0).abs() < 1e-12, "{}", f.get(16, 16));
    }

    #[test]
    fn source_scales_with_eps_squared() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::from_fn(
            g,
            |x| -0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
            |x| -1.0 + 0.1 * (1.0 - x * x),
        );
        let f1 = source_term(&m, &params(0.2)).unwrap().max_abs();
        let f2 = source_term(&m, &params(0.1)).unwrap().max_abs();
        let f3 = source_term(&m, &params(0.05)).unwrap().max_abs();
        assert!((f1 / f2 - 4.0).abs() < 1e-9);
        assert!((f2 / f3 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_inadmissible_state() {
        let g = make_grid(17, 17).unwrap();
        let m = MembranePair::parabolic(g, 0.45);
        let p = Params {
            kappa: 0.25,
            ..Params::default()
        };
        let err = assemble(&m, &p).unwrap_err();
        assert!(err.to_string().contains("state outside S̄_q(κ)"));
    }

    #[test]
    fn band_matrix_matches_stencil_apply() {
        let g = make_grid(13, 11).unwrap();
        let m = MembranePair::from_fn(
            g,
            |x| -0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
            |x| -1.0 + 0.1 * (1.0 - x * x),
        );
        let op = assemble(&m, &params(0.6)).unwrap();
        let x: Vec<f64> = (0..op.n_unknowns()).map(|k| (k as f64 * 0.37).sin()).collect();
        let y1 = op.apply_interior(&x);
        let y2 = op.band_matrix().matvec(&x);
        for (a, b) in y1.iter().zip(&y2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
