//! Change of variables between the moving domain `Ω_{u,v}` and the fixed
//! rectangle `Ω = I × (0, 1)`, `T(x, z) = (x, (z - v(x)) / (u(x) - v(x)))`.

use crate::domain::function::{Field2D, MembranePair};
use crate::domain::grid::Grid;
use crate::error::{Error, Result};

/// Samples on the physical box `I × [-1, 0]`, with `nz` uniform z-nodes
/// `z_j = -1 + j·hz`. Nodes outside `Ω_{u,v}` carry zero after a pull-back,
/// i.e. the field is the zero extension `w·1_{Ω_{u,v}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
    inside: Vec<bool>,
}

impl PhysicalField {
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let (nx, nz) = (grid.nx(), grid.nz());
        let mut values = Vec::with_capacity(nx * nz);
        for i in 0..nx {
            for j in 0..nz {
                values.push(f(grid.x(i), physical_z(&grid, j)));
            }
        }
        Self {
            grid,
            values,
            inside: vec![true; nx * nz],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nz() + j]
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.inside[i * self.grid.nz() + j]
    }

    pub fn z(&self, j: usize) -> f64 {
        physical_z(&self.grid, j)
    }
}

fn physical_z(grid: &Grid, j: usize) -> f64 {
    grid.z(j) - 1.0
}

/// Piecewise-linear interpolation of uniformly spaced samples starting at `x0`.
pub(crate) fn interp_uniform(values: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = values.len();
    let s = ((x - x0) / h).clamp(0.0, (n - 1) as f64);
    let k = (s.floor() as usize).min(n - 2);
    let t = s - k as f64;
    values[k] * (1.0 - t) + values[k + 1] * t
}

/// `θ_*`: composes a physical field with `T⁻¹`, producing a field on `Ω`.
pub fn push_forward(w: &PhysicalField, m: &MembranePair) -> Result<Field2D> {
    check(w.grid(), m)?;
    let g = *m.grid();
    let nz = g.nz();
    let mut out = Field2D::zeros(g);
    for i in 0..g.nx() {
        let (u, v) = (m.u.values()[i], m.v.values()[i]);
        let col = &w.values[i * nz..(i + 1) * nz];
        for j in 0..nz {
            let z = g.z(j) * (u - v) + v;
            out.set(i, j, interp_uniform(col, -1.0, g.hz(), z));
        }
    }
    Ok(out)
}

/// `θ^*`: composes a field on `Ω` with `T`, sampled on the physical box and
/// zero-extended outside `Ω_{u,v}`.
pub fn pull_back(w: &Field2D, m: &MembranePair) -> Result<PhysicalField> {
    check(w.grid(), m)?;
    let g = *m.grid();
    let (nx, nz) = (g.nx(), g.nz());
    let mut values = vec![0.0; nx * nz];
    let mut inside = vec![false; nx * nz];
    for i in 0..nx {
        let (u, v) = (m.u.values()[i], m.v.values()[i]);
        let col = w.column(i);
        for j in 0..nz {
            let z = physical_z(&g, j);
            if z >= v && z <= u {
                let zp = (z - v) / (u - v);
                values[i * nz + j] = interp_uniform(col, 0.0, g.hz(), zp);
                inside[i * nz + j] = true;
            }
        }
    }
    Ok(PhysicalField {
        grid: g,
        values,
        inside,
    })
}

fn check(grid: &Grid, m: &MembranePair) -> Result<()> {
    if grid != m.grid() {
        return Err(Error::GridMismatch("field and membranes differ".into()));
    }
    m.require_open_gap()
}
