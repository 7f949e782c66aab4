//! Shared oracles for the integration tests.

use mems_core::domain::{make_grid, Field2D, MembranePair, Params};
use mems_core::elliptic::{assemble, solve_interior, LinearBackend, PotentialField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Shape {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            a: rng.random_range(0.05..0.3),
            b: rng.random_range(-0.5..0.5),
            c: rng.random_range(0.05..0.3),
            d: rng.random_range(-0.5..0.5),
        }
    }

    pub fn pair(&self, nx: usize, nz: usize) -> MembranePair {
        let s = *self;
        MembranePair::from_fn(
            make_grid(nx, nz).unwrap(),
            move |x| -s.a * (1.0 - x * x) * (1.0 + s.b * x),
            move |x| -1.0 + s.c * (1.0 - x * x) * (1.0 + s.d * x),
        )
    }
}

/// Solves `-Δ̃ψ = F` with `F := -Δ̃ψ_ex`, `ψ_ex = sin(πx') sin(πz')`, and
/// returns the discrete L² error together with the solved potential.
pub fn manufactured(shape: Shape, n: usize, eps: f64) -> (f64, PotentialField) {
    let m = shape.pair(n, n);
    let p = Params {
        eps,
        kappa: 0.01,
        ..Params::default()
    };
    let op = assemble(&m, &p).unwrap();
    let g = *m.grid();
    let mut rhs = vec![0.0; op.n_unknowns()];
    let nzi = g.nz() - 2;
    for i in 1..g.nx() - 1 {
        for j in 1..g.nz() - 1 {
            let (x, z) = (g.x(i), g.z(j));
            let (sx, cx, sz, cz) = ((PI * x).sin(), (PI * x).cos(), (PI * z).sin(), (PI * z).cos());
            let pxx = -PI * PI * sx * sz;
            let pzz = -PI * PI * sx * sz;
            let pxz = PI * PI * cx * cz;
            let pz = PI * sx * cz;
            let l = op.a_xx.get(i, j) * pxx
                + op.a_xz.get(i, j) * pxz
                + op.a_zz.get(i, j) * pzz
                + op.a_z.get(i, j) * pz;
            rhs[(i - 1) * nzi + (j - 1)] = -l;
        }
    }
    let psi = solve_interior(&op, &rhs, 1e-10, LinearBackend::Direct).unwrap();
    let mut err2 = 0.0;
    for i in 0..g.nx() {
        for j in 0..g.nz() {
            let ex = (PI * g.x(i)).sin() * (PI * g.z(j)).sin();
            err2 += (psi.get(i, j) - ex).powi(2);
        }
    }
    let err = (err2 * g.hx() * g.hz()).sqrt();
    let phi_tilde = Field2D::from_fn(g, |_, z| z);
    let mut phi = phi_tilde;
    for i in 0..g.nx() {
        for j in 0..g.nz() {
            let z = phi.get(i, j);
            phi.set(i, j, z + psi.get(i, j));
        }
    }
    (err, PotentialField { phi_tilde: phi, psi })
}

