//! Comparison-function bounds on the physical potential.
//!
//! Two pairs are checked at the images `(x_i, v + z'_j (u - v))` of the
//! fixed-grid nodes, where the physical potential equals `φ̃` exactly:
//!
//! * `z - v(x) ≤ φ(x, z) ≤ 1 + z - u(x)`
//! * `x^n + z ≤ φ(x, z) ≤ 2 + z - x^n` for an even exponent `n`

use crate::domain::MembranePair;
use crate::elliptic::solve::PotentialField;
use serde::Serialize;

pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport {
    /// `min (φ - (z - v))`
    pub gap_lower: f64,
    /// `min ((1 + z - u) - φ)`
    pub gap_upper: f64,
    /// `min (φ - (x^n + z))`
    pub power_lower: f64,
    /// `min ((2 + z - x^n) - φ)`
    pub power_upper: f64,
    pub exponent: u32,
    /// Allowed negative margin, `10 h²` with `h = max(hx, hz)`.
    pub slack: f64,
}

impl BarrierReport {
    pub fn min_margin(&self) -> f64 {
        self.gap_lower
            .min(self.gap_upper)
            .min(self.power_lower)
            .min(self.power_upper)
    }

    pub fn passes(&self) -> bool {
        self.min_margin() >= -self.slack
    }
}

/// Smallest even `n ≤ 64` with `v(x) ≤ -x^n` and `u(x) ≥ x^n - 1` at every node.
pub fn choose_exponent(m: &MembranePair) -> Option<u32> {
    let g = m.grid();
    (1..=MAX_EXPONENT / 2).map(|k| 2 * k).find(|&n| {
        (0..g.nx()).all(|i| {
            let xn = g.x(i).powi(n as i32);
            m.v.values()[i] <= -xn && m.u.values()[i] >= xn - 1.0
        })
    })
}

/// Evaluates both bound pairs for exponent `n` (must be even).
pub fn barrier_check(m: &MembranePair, phi: &PotentialField, n: u32) -> BarrierReport {
    assert!(n % 2 == 0, "exponent must be even");
    let g = *m.grid();
    let h = g.hx().max(g.hz());
    let mut r = BarrierReport {
        gap_lower: f64::INFINITY,
        gap_upper: f64::INFINITY,
        power_lower: f64::INFINITY,
        power_upper: f64::INFINITY,
        exponent: n,
        slack: 10.0 * h * h,
    };
    for i in 0..g.nx() {
        let (u, v) = (m.u.values()[i], m.v.values()[i]);
        let xn = g.x(i).powi(n as i32);
        for j in 0..g.nz() {
            let z = v + g.z(j) * (u - v);
            let f = phi.phi_tilde.get(i, j);
            r.gap_lower = r.gap_lower.min(f - (z - v));
            r.gap_upper = r.gap_upper.min(1.0 + z - u - f);
            r.power_lower = r.power_lower.min(f - (xn + z));
            r.power_upper = r.power_upper.min(2.0 + z - xn - f);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, Params};
    use crate::elliptic::solve::solve_potential;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_state_equality_case() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::flat(g);
        let phi = solve_potential(&m, &Params::default()).unwrap();
        let r = barrier_check(&m, &phi, 2);
        assert!(r.gap_lower.abs() < 1e-12);
        assert!(r.gap_upper.abs() < 1e-12);
        // 1 - x² vanishes at |x| = 1 and is positive inside
        assert!(r.power_lower.abs() < 1e-12);
        assert!(r.power_upper.abs() < 1e-12);
        assert_eq!(choose_exponent(&m), Some(2));
    }

    #[test]
    fn random_even_states_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = make_grid(33, 33).unwrap();
        let p = Params {
            eps: 0.1,
            kappa: 0.01,
            ..Params::default()
        };
        let mut checked = 0;
        for _ in 0..6 {
            let a = rng.random_range(0.05..0.3);
            let b = rng.random_range(0.0..0.1);
            let c = rng.random_range(0.05..0.3);
            let m = MembranePair::from_fn(
                g,
                |x| -a * (1.0 - x * x) - b * (1.0 - x.powi(4)),
                |x| -1.0 + c * (1.0 - x * x),
            );
            let Some(n) = choose_exponent(&m) else {
                continue;
            };
            let phi = solve_potential(&m, &p).unwrap();
            let r = barrier_check(&m, &phi, n);
            assert!(r.passes(), "{r:?}");
            checked += 1;
        }
        assert!(checked >= 4);
    }
}
