use crate::domain::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Displacement,
    Forcing,
    Residual,
}

/// Nodal values on the x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction1D {
    grid: Grid,
    values: Vec<f64>,
    role: Role,
}

impl GridFunction1D {
    pub fn new(grid: Grid, values: Vec<f64>, role: Role) -> Result<Self> {
        if values.len() != grid.nx() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.nx(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid function"));
        }
        Ok(Self { grid, values, role })
    }

    pub fn from_fn(grid: Grid, role: Role, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.nx()).map(|i| f(grid.x(i))).collect();
        Self { grid, values, role }
    }

    pub fn zeros(grid: Grid, role: Role) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.nx()],
            role,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            role: self.role,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|f(x_i) - f(-x_i)|`.
    pub fn mirror_mismatch(&self) -> f64 {
        mirror_mismatch(&self.values)
    }

    pub fn mirrored(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
            role: self.role,
        }
    }

    pub fn dx(&self) -> Vec<f64> {
        first_difference(&self.values, self.grid.hx())
    }

    pub fn dxx(&self) -> Vec<f64> {
        second_difference(&self.values, self.grid.hx())
    }
}

pub(crate) fn mirror_mismatch(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n / 2)
        .map(|i| (values[i] - values[n - 1 - i]).abs())
        .fold(0.0, f64::max)
}

/// Central differences inside, second-order one-sided at the ends.
pub fn first_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Three-point second differences inside, second-order one-sided
/// four-point formulas at the ends.
pub fn second_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Values on the fixed rectangle `Ω = I × (0, 1)`, stored with z' fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.nx() * grid.nz()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for i in 0..grid.nx() {
            for j in 0..grid.nz() {
                out.values[i * grid.nz() + j] = f(grid.x(i), grid.z(j));
            }
        }
        out
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx() * grid.nz() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.nx() * grid.nz(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nz() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let nz = self.grid.nz();
        self.values[i * nz + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, i: usize) -> &[f64] {
        let nz = self.grid.nz();
        &self.values[i * nz..(i + 1) * nz]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest `|w(x', z') - w(-x', z')|` over all nodes.
    pub fn mirror_mismatch(&self) -> f64 {
        let (nx, nz) = (self.grid.nx(), self.grid.nz());
        let mut m: f64 = 0.0;
        for i in 0..nx / 2 {
            for j in 0..nz {
                m = m.max((self.get(i, j) - self.get(nx - 1 - i, j)).abs());
            }
        }
        m
    }
}

/// The free-boundary state: upper membrane `u` and lower membrane `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembranePair {
    pub u: GridFunction1D,
    pub v: GridFunction1D,
}

impl MembranePair {
    /// Builds a pair and checks the clamped ends `u(±1) = 0`, `v(±1) = -1`.
    pub fn new(u: GridFunction1D, v: GridFunction1D) -> Result<Self> {
        let pair = Self::with_free_ends(u, v)?;
        if !pair.boundary_ok() {
            return Err(Error::InvalidParam {
                name: "membrane",
                reason: "boundary values must be u(±1)=0, v(±1)=-1".into(),
            });
        }
        Ok(pair)
    }

    /// Builds a pair without enforcing the clamped ends. Used for
    /// x-independent test states.
    pub fn with_free_ends(u: GridFunction1D, v: GridFunction1D) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch("u and v live on different grids".into()));
        }
        if u.values().iter().chain(v.values()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("membrane pair"));
        }
        Ok(Self { u, v })
    }

    /// Samples `fu`, `fv` and pins the end nodes to the clamped values.
    pub fn from_fn(grid: Grid, fu: impl Fn(f64) -> f64, fv: impl Fn(f64) -> f64) -> Self {
        let mut u = GridFunction1D::from_fn(grid, Role::Displacement, fu);
        let mut v = GridFunction1D::from_fn(grid, Role::Displacement, fv);
        let n = grid.nx();
        for i in [0, n - 1] {
            u.values_mut()[i] = 0.0;
            v.values_mut()[i] = -1.0;
        }
        Self { u, v }
    }

    pub fn flat(grid: Grid) -> Self {
        Self::from_fn(grid, |_| 0.0, |_| -1.0)
    }

    /// `u = -a(1-x²)`, `v = -1 + a(1-x²)`; the gap at `x = 0` is `1 - 2a`.
    pub fn parabolic(grid: Grid, a: f64) -> Self {
        Self::from_fn(grid, |x| -a * (1.0 - x * x), |x| -1.0 + a * (1.0 - x * x))
    }

    /// Builds a pair from upper displacement and `v̂ = v + 1`.
    pub fn from_offset(u: GridFunction1D, v_hat: &GridFunction1D) -> Result<Self> {
        let v = v_hat.map(|w| w - 1.0);
        Self::with_free_ends(u, v)
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn boundary_ok(&self) -> bool {
        let n = self.grid().nx();
        let (u, v) = (self.u.values(), self.v.values());
        u[0] == 0.0 && u[n - 1] == 0.0 && v[0] == -1.0 && v[n - 1] == -1.0
    }

    pub fn gap(&self) -> Vec<f64> {
        self.u
            .values()
            .iter()
            .zip(self.v.values())
            .map(|(u, v)| u - v)
            .collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.gap().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        self.gap().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `v̂ = v + 1`, which carries zero Dirichlet data.
    pub fn v_hat(&self) -> GridFunction1D {
        self.v.map(|v| v + 1.0)
    }

    pub fn mirrored(&self) -> Self {
        Self {
            u: self.u.mirrored(),
            v: self.v.mirrored(),
        }
    }

    pub fn mirror_mismatch(&self) -> f64 {
        self.u.mirror_mismatch().max(self.v.mirror_mismatch())
    }

    /// Sup-norm distance over both membranes.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let du = self
            .u
            .values()
            .iter()
            .zip(other.u.values())
            .map(|(a, b)| (a - b).abs());
        let dv = self
            .v
            .values()
            .iter()
            .zip(other.v.values())
            .map(|(a, b)| (a - b).abs());
        du.chain(dv).fold(0.0, f64::max)
    }

    pub(crate) fn require_open_gap(&self) -> Result<()> {
        let min_gap = self.min_gap();
        if !(min_gap > 0.0) {
            return Err(Error::DomainCollapsed { min_gap });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::make_grid;

    #[test]
    fn differences_exact_on_quadratics() {
        let g = make_grid(17, 9).unwrap();
        let f = GridFunction1D::from_fn(g, Role::Displacement, |x| 3.0 * x * x - x + 2.0);
        for (i, d) in f.dx().iter().enumerate() {
            assert!((d - (6.0 * g.x(i) - 1.0)).abs() < 1e-12);
        }
        for d in f.dxx() {
            assert!((d - 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trapezoid_linear_exact() {
        let g = make_grid(9, 9).unwrap();
        let xs = g.xs();
        let vals: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((trapezoid(&vals, g.hx()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pair_boundaries_pinned() {
        let g = make_grid(9, 9).unwrap();
        let m = MembranePair::from_fn(g, |x| x, |x| x - 2.0);
        assert!(m.boundary_ok());
        let bad = GridFunction1D::zeros(g, Role::Displacement);
        assert!(MembranePair::new(bad.clone(), bad).is_err());
    }

    #[test]
    fn parabolic_gap() {
        let g = make_grid(9, 9).unwrap();
        let m = MembranePair::parabolic(g, 0.4);
        assert!((m.min_gap() - 0.2).abs() < 1e-15);
        assert_eq!(m.mirror_mismatch(), 0.0);
    }
}
