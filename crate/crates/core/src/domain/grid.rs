use crate::error::{Error, Result};

/// Uniform tensor grid on `I × [0, 1]` with `I = [-1, 1]`.
///
/// Both node counts are odd so that `x = 0` and `z' = 1/2` are nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    nz: usize,
    hx: f64,
    hz: f64,
}

pub const MIN_NODES: usize = 9;

impl Grid {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hz(&self) -> f64 {
        self.hz
    }

    /// x-coordinate of node `i`. The centre node is exactly zero and the
    /// grid is exactly mirror symmetric.
    pub fn x(&self, i: usize) -> f64 {
        let mid = (self.nx - 1) / 2;
        if i >= mid {
            (i - mid) as f64 * self.hx
        } else {
            -((mid - i) as f64 * self.hx)
        }
    }

    /// z'-coordinate of node `j` in the fixed rectangle.
    pub fn z(&self, j: usize) -> f64 {
        if j + 1 == self.nz {
            1.0
        } else {
            j as f64 * self.hz
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn zs(&self) -> Vec<f64> {
        (0..self.nz).map(|j| self.z(j)).collect()
    }

    /// Index of the node mirrored through `x = 0`.
    pub fn mirror(&self, i: usize) -> usize {
        self.nx - 1 - i
    }

    /// Number of interior x nodes (the membrane unknowns).
    pub fn n_interior_x(&self) -> usize {
        self.nx - 2
    }
}

pub fn make_grid(nx: usize, nz: usize) -> Result<Grid> {
    if nx < MIN_NODES || nx % 2 == 0 {
        return Err(Error::BadNx(nx));
    }
    if nz < MIN_NODES || nz % 2 == 0 {
        return Err(Error::BadNz(nz));
    }
    Ok(Grid {
        nx,
        nz,
        hx: 2.0 / (nx - 1) as f64,
        hz: 1.0 / (nz - 1) as f64,
    })
}
