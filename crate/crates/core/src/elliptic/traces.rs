use crate::domain::{GridFunction1D, MembranePair, Params, Role};
use crate::elliptic::solve::{solve_potential, PotentialField};
use crate::error::Result;

/// `∂_{z'}φ̃` at `z' = 1` and `z' = 0` by three-point one-sided differences.
pub fn boundary_traces(phi: &PotentialField) -> (GridFunction1D, GridFunction1D) {
    let f = &phi.phi_tilde;
    let g = *f.grid();
    let (nz, hz) = (g.nz(), g.hz());
    let top = (0..g.nx())
        .map(|i| (3.0 * f.get(i, nz - 1) - 4.0 * f.get(i, nz - 2) + f.get(i, nz - 3)) / (2.0 * hz))
        .collect();
    let bottom = (0..g.nx())
        .map(|i| (-3.0 * f.get(i, 0) + 4.0 * f.get(i, 1) - f.get(i, 2)) / (2.0 * hz))
        .collect();
    (
        GridFunction1D::new(g, top, Role::Forcing).expect("finite trace"),
        GridFunction1D::new(g, bottom, Role::Forcing).expect("finite trace"),
    )
}

/// Squared normal field strength acting on each membrane.
#[derive(Debug, Clone)]
pub struct TraceForcing {
    /// `(1 + ε²u_x²) / (u - v)² · |∂_{z'}φ̃(·, 1)|²`, acting on `u`.
    pub g1: GridFunction1D,
    /// `(1 + ε²v_x²) / (u - v)² · |∂_{z'}φ̃(·, 0)|²`, acting on `v`.
    pub g2: GridFunction1D,
}

pub fn trace_forcing(m: &MembranePair, p: &Params) -> Result<TraceForcing> {
    let phi = solve_potential(m, p)?;
    Ok(trace_forcing_from(m, p, &phi))
}

/// Trace forcing for an already solved potential.
pub fn trace_forcing_from(m: &MembranePair, p: &Params, phi: &PotentialField) -> TraceForcing {
    let (t1, t0) = boundary_traces(phi);
    let e2 = p.eps * p.eps;
    let g = *m.grid();
    let (ux, vx) = (m.u.dx(), m.v.dx());
    let gap = m.gap();
    let build = |slope: &[f64], trace: &GridFunction1D| {
        let vals = (0..g.nx())
            .map(|i| {
                let tr = trace.values()[i];
                (1.0 + e2 * slope[i] * slope[i]) / (gap[i] * gap[i]) * (tr * tr)
            })
            .collect();
        GridFunction1D::new(g, vals, Role::Forcing).expect("finite forcing")
    };
    TraceForcing {
        g1: build(&ux, &t1),
        g2: build(&vx, &t0),
    }
}
