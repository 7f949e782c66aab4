use crate::domain::function::first_difference;
use crate::domain::{trapezoid, MembranePair, Params};
use crate::elliptic::solve::PotentialField;

/// `∫_{Ω_{u,v}} |∇_ε φ|² dx dz`, evaluated on the fixed rectangle with the
/// Jacobian factor `u - v`:
///
/// `φ_z = φ̃_{z'} / d`, `φ_x = φ̃_{x'} - φ̃_{z'} s / d`,
/// `s = z'(u_x - v_x) + v_x`, `d = u - v`.
pub fn gradient_energy(phi: &PotentialField, m: &MembranePair, p: &Params) -> f64 {
    let g = *m.grid();
    let (nx, nz) = (g.nx(), g.nz());
    let f = &phi.phi_tilde;
    let (ux, vx) = (m.u.dx(), m.v.dx());
    let gap = m.gap();
    let e2 = p.eps * p.eps;

    let mut dz = vec![0.0; nx * nz];
    for i in 0..nx {
        let col = first_difference(f.column(i), g.hz());
        dz[i * nz..(i + 1) * nz].copy_from_slice(&col);
    }
    let mut dxp = vec![0.0; nx * nz];
    for j in 0..nz {
        let row: Vec<f64> = (0..nx).map(|i| f.get(i, j)).collect();
        for (i, d) in first_difference(&row, g.hx()).into_iter().enumerate() {
            dxp[i * nz + j] = d;
        }
    }

    let column_integrals: Vec<f64> = (0..nx)
        .map(|i| {
            let d = gap[i];
            let integrand: Vec<f64> = (0..nz)
                .map(|j| {
                    let s = g.z(j) * (ux[i] - vx[i]) + vx[i];
                    let pz = dz[i * nz + j] / d;
                    let px = dxp[i * nz + j] - dz[i * nz + j] * s / d;
                    (e2 * px * px + pz * pz) * d
                })
                .collect();
            trapezoid(&integrand, g.hz())
        })
        .collect();
    trapezoid(&column_integrals, g.hx())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridFunction1D, Role};
    use crate::elliptic::solve::solve_potential;

    fn params() -> Params {
        Params {
            eps: 0.3,
            kappa: 0.01,
            ..Params::default()
        }
    }

    #[test]
    fn flat_state_energy_is_area() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::flat(g);
        let phi = solve_potential(&m, &params()).unwrap();
        assert!((gradient_energy(&phi, &m, &params()) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn halving_gap_doubles_energy() {
        let g = make_grid(33, 17).unwrap();
        let u = GridFunction1D::zeros(g, Role::Displacement);
        let v = GridFunction1D::from_fn(g, Role::Displacement, |_| -0.5);
        let m = MembranePair::with_free_ends(u, v).unwrap();
        let phi = solve_potential(&m, &params()).unwrap();
        assert!((gradient_energy(&phi, &m, &params()) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn mirrored_state_same_energy() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::from_fn(
            g,
            |x| -0.3 * (1.0 - x * x),
            |x| -1.0 + 0.2 * (1.0 - x * x),
        );
        let p = params();
        let e1 = gradient_energy(&solve_potential(&m, &p).unwrap(), &m, &p);
        let mm = m.mirrored();
        let e2 = gradient_energy(&solve_potential(&mm, &p).unwrap(), &mm, &p);
        assert!((e1 - e2).abs() < 1e-10);
    }
}
