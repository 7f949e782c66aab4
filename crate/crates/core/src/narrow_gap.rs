//! The narrow-gap limit: closed-form potential `φ = (z - v)/(u - v)`,
//! semilinear heat equations with forcing `∓λ, μ / (u - v)²`, and the
//! comparison of full-model runs against it as `ε → 0`.

use crate::domain::{trapezoid, Field2D, MembranePair, Params};
use crate::elliptic::solve_potential;
use crate::error::{Error, Result};
use crate::evolution::{evolve, imex_update, integrate, tension_ratio, Evaluation, SimConfig, Trajectory};
use crate::format::{fmt_f64, write_row};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// Potential sampled on the moving domain at the images of the fixed-grid
/// nodes: `z[i, j] = v + z'_j (u - v)` and `phi[i, j] = (z - v)/(u - v)`.
/// The top and bottom rows sit exactly on `u` and `v`.
#[derive(Debug, Clone)]
pub struct MovingSample {
    pub z: Field2D,
    pub phi: Field2D,
}

pub fn sar_potential(state: &MembranePair) -> Result<MovingSample> {
    state.require_open_gap()?;
    let g = *state.grid();
    let nz = g.nz();
    let mut z = Field2D::zeros(g);
    let mut phi = Field2D::zeros(g);
    for i in 0..g.nx() {
        let (u, v) = (state.u.values()[i], state.v.values()[i]);
        for j in 0..nz {
            let zj = match j {
                0 => v,
                _ if j == nz - 1 => u,
                _ => v + g.z(j) * (u - v),
            };
            z.set(i, j, zj);
            phi.set(i, j, (zj - v) / (u - v));
        }
    }
    Ok(MovingSample { z, phi })
}

fn inverse_square_gap(state: &MembranePair) -> Result<Vec<f64>> {
    state.require_open_gap()?;
    Ok(state.gap().into_iter().map(|d| 1.0 / (d * d)).collect())
}

/// `λ ∫ 1/(u - v) + ½ ∫ u_x² + (λ/μ) ½ ∫ v_x²`, the `ε → 0` limit of the
/// total energy divided by `ε²`.
pub fn sar_energy(state: &MembranePair, p: &Params) -> f64 {
    let h = state.grid().hx();
    let inv: Vec<f64> = state.gap().into_iter().map(|d| 1.0 / d).collect();
    let dirichlet = |w: &[f64]| {
        let d = crate::domain::function::first_difference(w, h);
        0.5 * trapezoid(&d.iter().map(|s| s * s).collect::<Vec<_>>(), h)
    };
    p.lambda * trapezoid(&inv, h)
        + dirichlet(state.u.values())
        + tension_ratio(p) * dirichlet(state.v.values())
}

/// One IMEX step of the narrow-gap model.
pub fn sar_step(state: &MembranePair, lambda: f64, mu: f64, dt: f64) -> Result<MembranePair> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParam {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let w = inverse_square_gap(state)?;
    let fu: Vec<f64> = w.iter().map(|w| -lambda * w).collect();
    let fv: Vec<f64> = w.iter().map(|w| mu * w).collect();
    let next = imex_update(state, &fu, &fv, 0.0, dt)?;
    next.require_open_gap()?;
    Ok(next)
}

/// Narrow-gap counterpart of [`evolve`]; `params.eps` is ignored.
pub fn sar_evolve(config: &SimConfig) -> Result<Trajectory> {
    let p = config.params;
    integrate(config, 0.0, |state| {
        let w = inverse_square_gap(state)?;
        let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Evaluation {
            fu: w.iter().map(|w| -p.lambda * w).collect(),
            fv: w.iter().map(|w| p.mu * w).collect(),
            energy: sar_energy(state, &p),
            g1_max: m,
            g2_max: m,
            barrier_margin: None,
        })
    })
}

/// `max` over common sample times of the sup-node distance.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let n = a.samples.len().min(b.samples.len());
    let mut d: f64 = 0.0;
    for (sa, sb) in a.samples[..n].iter().zip(&b.samples[..n]) {
        if sa.t != sb.t {
            return Err(Error::Config(format!(
                "sample times differ: {} vs {}",
                sa.t, sb.t
            )));
        }
        d = d.max(sa.state.sup_distance(&sb.state));
    }
    Ok(d)
}

/// `‖φ_a 1_{Ω_a} - φ_b 1_{Ω_b}‖` in `L²(I × (-1, 0))`. Each potential is given
/// by its values `φ̃` on the fixed rectangle and is taken piecewise linear
/// in `z` between the node images; the z-integral is exact for that
/// representation and the x-integral uses the trapezoid rule.
pub fn potential_l2_distance(
    a: &MembranePair,
    phi_a: &Field2D,
    b: &MembranePair,
    phi_b: &Field2D,
) -> Result<f64> {
    let g = *a.grid();
    if b.grid() != &g || phi_a.grid() != &g || phi_b.grid() != &g {
        return Err(Error::GridMismatch("potential comparison".into()));
    }
    a.require_open_gap()?;
    b.require_open_gap()?;
    let nz = g.nz();
    let column = |m: &MembranePair, i: usize| -> Vec<f64> {
        let (u, v) = (m.u.values()[i], m.v.values()[i]);
        (0..nz)
            .map(|j| match j {
                0 => v,
                _ if j == nz - 1 => u,
                _ => v + g.z(j) * (u - v),
            })
            .collect()
    };
    let per_column: Vec<f64> = (0..g.nx())
        .map(|i| {
            let (za, zb) = (column(a, i), column(b, i));
            let (fa, fb) = (phi_a.column(i), phi_b.column(i));
            let mut breaks: Vec<f64> = za.iter().chain(&zb).copied().collect();
            breaks.push(-1.0);
            breaks.push(0.0);
            breaks.retain(|z| (-1.0..=0.0).contains(z));
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            breaks
                .windows(2)
                .map(|w| {
                    let (lo, hi) = (w[0], w[1]);
                    let mid = 0.5 * (lo + hi);
                    let f = |z: f64| {
                        piece(&za, fa, mid, z) - piece(&zb, fb, mid, z)
                    };
                    let (f0, f1, f2) = (f(lo), f(mid), f(hi));
                    (hi - lo) / 6.0 * (f0 * f0 + 4.0 * f1 * f1 + f2 * f2)
                })
                .sum()
        })
        .collect();
    Ok(trapezoid(&per_column, g.hx()).sqrt())
}

/// Linear piece of the zero-extended interpolant that contains `at`,
/// evaluated at `z`.
fn piece(nodes: &[f64], vals: &[f64], at: f64, z: f64) -> f64 {
    let n = nodes.len();
    if at < nodes[0] || at > nodes[n - 1] {
        return 0.0;
    }
    let k = nodes.partition_point(|&zk| zk <= at).clamp(1, n - 1) - 1;
    let t = (z - nodes[k]) / (nodes[k + 1] - nodes[k]);
    vals[k] + t * (vals[k + 1] - vals[k])
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    /// Max over common sample times of the sup-node distance of the states.
    pub d_state: f64,
    /// `L²` distance of the zero-extended potentials at the last common time.
    pub d_potential: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Common horizon of all runs.
    pub tau: f64,
    /// Largest `u` over every step of every run.
    pub max_u: f64,
    /// Smallest `v` over every step of every run.
    pub min_v: f64,
}

impl ConvergenceTable {
    /// Both distances strictly decrease as `ε` decreases.
    pub fn strictly_decreasing(&self) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        rows.windows(2)
            .all(|w| w[1].d_state < w[0].d_state && w[1].d_potential < w[0].d_potential)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write_row(&mut w, &["eps", "d_state", "d_potential"].map(String::from))?;
        for r in &self.rows {
            write_row(&mut w, &[fmt_f64(r.eps), fmt_f64(r.d_state), fmt_f64(r.d_potential)])?;
        }
        Ok(())
    }
}

/// Runs the full model for each `ε` (concurrently) and the narrow-gap model
/// once, all from `config.init` on the same time grid, and tabulates their
/// distances.
pub fn compare_to_sar(eps_list: &[f64], config: &SimConfig) -> Result<ConvergenceTable> {
    if eps_list.is_empty() {
        return Err(Error::Config("empty eps list".into()));
    }
    let reference = sar_evolve(config)?;
    let runs: Vec<(f64, Trajectory)> = eps_list
        .par_iter()
        .map(|&eps| {
            let mut c = config.clone();
            c.params.eps = eps;
            evolve(&c).map(|(t, _)| (eps, t))
        })
        .collect::<Result<_>>()?;

    let common = runs
        .iter()
        .map(|(_, t)| t.samples.len())
        .chain([reference.samples.len()])
        .min()
        .unwrap_or(0);
    let last = common - 1;
    let tau = reference.samples[last].t;
    let star = &reference.samples[last].state;
    let phi_star = sar_potential(star)?.phi;

    let rows = runs
        .par_iter()
        .map(|(eps, traj)| {
            let d_state = trajectory_distance(traj, &reference)?;
            let state = &traj.samples[last].state;
            let mut p = config.params;
            p.eps = *eps;
            let phi = solve_potential(state, &p)?;
            let d_potential = potential_l2_distance(state, &phi.phi_tilde, star, &phi_star)?;
            Ok(ConvergenceRow {
                eps: *eps,
                d_state,
                d_potential,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all = runs.iter().map(|(_, t)| t).chain([&reference]);
    let max_u = all.clone().map(|t| t.max_u).fold(f64::NEG_INFINITY, f64::max);
    let min_v = all.map(|t| t.min_v).fold(f64::INFINITY, f64::min);
    Ok(ConvergenceTable {
        rows,
        tau,
        max_u,
        min_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_grid, GridFunction1D, Role};
    use crate::evolution::step_imex;
    use proptest::prelude::*;

    #[test]
    fn flat_potential() {
        let g = make_grid(17, 9).unwrap();
        let s = sar_potential(&MembranePair::flat(g)).unwrap();
        for i in 0..g.nx() {
            for j in 0..g.nz() {
                assert!((s.phi.get(i, j) - (s.z.get(i, j) + 1.0)).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn boundary_values_exact(a in 0.0..0.45f64, b in -0.5..0.5f64, c in 0.0..0.45f64) {
            let g = make_grid(17, 9).unwrap();
            let m = MembranePair::from_fn(
                g,
                |x| -a * (1.0 - x * x) * (1.0 + b * x),
                |x| -1.0 + c * (1.0 - x * x),
            );
            let s = sar_potential(&m).unwrap();
            for i in 0..g.nx() {
                prop_assert_eq!(s.phi.get(i, g.nz() - 1), 1.0);
                prop_assert_eq!(s.phi.get(i, 0), 0.0);
                prop_assert_eq!(s.z.get(i, g.nz() - 1), m.u.values()[i]);
            }
        }
    }

    #[test]
    fn flat_first_step_matches_unit_forcing() {
        let g = make_grid(33, 9).unwrap();
        let m = MembranePair::flat(g);
        let dt = 1e-4;
        let a = sar_step(&m, 2.0, 3.0, dt).unwrap();
        let zero = GridFunction1D::zeros(g, Role::Displacement);
        let au = crate::evolution::curvature_apply(&zero, &a.u).unwrap();
        let av = crate::evolution::curvature_apply(&zero, &a.v_hat()).unwrap();
        for i in 1..32 {
            assert!((a.u.values()[i] + dt * au.values()[i] + 2.0 * dt).abs() < 1e-12);
            assert!((a.v_hat().values()[i] + dt * av.values()[i] - 3.0 * dt).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_identity_each_step() {
        let g = make_grid(33, 9).unwrap();
        let mut m = MembranePair::from_fn(
            g,
            |x| -0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
            |x| -1.0 + 0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
        );
        for _ in 0..200 {
            m = sar_step(&m, 0.3, 0.3, 2e-4).unwrap();
            for (u, v) in m.u.values().iter().zip(m.v.values()) {
                assert!((u + 1.0 + v).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn full_model_step_approaches_narrow_gap() {
        let g = make_grid(33, 17).unwrap();
        let m = MembranePair::parabolic(g, 0.2);
        let dt = 1e-4;
        let star = sar_step(&m, 1.0, 1.0, dt).unwrap();
        let diffs: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&eps| {
                let p = Params::new(eps, 1.0, 1.0).unwrap();
                step_imex(&m, &p, dt).unwrap().sup_distance(&star)
            })
            .collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    }

    #[test]
    fn self_comparison_is_zero() {
        let g = make_grid(33, 17).unwrap();
        let p = Params {
            eps: 0.2,
            lambda: 0.5,
            mu: 0.5,
            t_end: 0.01,
            ..Params::default()
        };
        let c = SimConfig::new(p, MembranePair::flat(g));
        let (a, _) = evolve(&c).unwrap();
        assert_eq!(trajectory_distance(&a, &a).unwrap(), 0.0);
        let s = a.final_state();
        let phi = solve_potential(s, &p).unwrap().phi_tilde;
        assert_eq!(potential_l2_distance(s, &phi, s, &phi).unwrap(), 0.0);
    }

    #[test]
    fn l2_distance_of_shifted_domains() {
        // φ_a = z + 1 on (-1, 0); φ_b = (z + 1)/0.5 on (-1, -0.5), zero above.
        // ∫_{-1}^{-0.5} (s - 2s)² + ∫_{-0.5}^{0} (z+1)², s = z + 1:
        // 1/24 + (1 - 1/8)/3 = 1/24 + 7/24 = 1/3 per unit x, times |I| = 2.
        let g = make_grid(17, 9).unwrap();
        let a = MembranePair::flat(g);
        let b = MembranePair::with_free_ends(
            GridFunction1D::from_fn(g, Role::Displacement, |_| -0.5),
            GridFunction1D::from_fn(g, Role::Displacement, |_| -1.0),
        )
        .unwrap();
        let phi = Field2D::from_fn(g, |_, z| z);
        let d = potential_l2_distance(&a, &phi, &b, &phi).unwrap();
        assert!((d - (2.0f64 / 3.0).sqrt()).abs() < 1e-13, "{d}");
    }

    #[test]
    fn touchdown_under_strong_forcing() {
        let g = make_grid(33, 9).unwrap();
        let p = Params {
            lambda: 50.0,
            mu: 50.0,
            t_end: 1.0,
            ..Params::default()
        };
        let t = sar_evolve(&SimConfig::new(p, MembranePair::flat(g))).unwrap();
        assert_eq!(t.termination, crate::evolution::Termination::Touchdown);
        let p = Params {
            t_end: 0.1,
            ..p.with_lambda_mu(0.5, 0.5)
        };
        let t = sar_evolve(&SimConfig::new(p, MembranePair::flat(g))).unwrap();
        assert_eq!(t.termination, crate::evolution::Termination::Completed);
        assert!(t.samples.iter().all(|s| s.min_gap > 0.5));
    }
}
