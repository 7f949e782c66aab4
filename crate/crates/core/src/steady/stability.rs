use crate::domain::{GridFunction1D, MembranePair, Params};
use crate::elliptic::{solve_potential, trace_forcing_from};
use crate::error::{Error, Result};
use crate::evolution::{curvature_factor, evolve, SimConfig, Termination};
use crate::steady::newton::{fd_jacobian, SteadyState};
use crate::steady::residual::{pack, unpack};
use nalgebra::DMatrix;
use serde::Serialize;

fn interior_curvature(w: &[f64], h: f64, eps: f64) -> Vec<f64> {
    let c = curvature_factor(w, h, eps);
    (1..w.len() - 1)
        .map(|i| c[i] * (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h))
        .collect()
}

/// Right-hand side `Q(u, v̂) = (-A(εu)u - λ g1, -A(εv̂)v̂ + μ g2)` at the
/// interior nodes, as a function of the packed unknowns.
pub(crate) fn rhs_q(x: &[f64], like: &MembranePair, p: &Params) -> Result<Vec<f64>> {
    let m = unpack(x, like)?;
    let phi = solve_potential(&m, p)?;
    let f = trace_forcing_from(&m, p, &phi);
    let h = m.grid().hx();
    let n = m.grid().nx();
    let qu = interior_curvature(m.u.values(), h, p.eps);
    let qv = interior_curvature(m.v_hat().values(), h, p.eps);
    let g1 = &f.g1.values()[1..n - 1];
    let g2 = &f.g2.values()[1..n - 1];
    Ok(qu
        .iter()
        .zip(g1)
        .map(|(q, g)| q - p.lambda * g)
        .chain(qv.iter().zip(g2).map(|(q, g)| q + p.mu * g))
        .collect())
}

/// Dense finite-difference Jacobian `DQ` of size `2(nx-2)` at a steady state.
pub fn linearize(s: &SteadyState, p: &Params) -> Result<DMatrix<f64>> {
    let like = &s.state;
    fd_jacobian(|x| rhs_q(x, like, p), &pack(like))
}

/// `w ↦ w_xx (1 + ε² w_x²)^{-3/2}` at interior nodes, `w` zero at the ends.
pub fn curvature_map(w: &[f64], h: f64, eps: f64) -> Vec<f64> {
    interior_curvature(w, h, eps)
}

/// Exact Jacobian of [`curvature_map`] with respect to the interior values:
/// `δ(c u_xx) = c δu_xx - 3ε² u_x u_xx (1 + ε² u_x²)^{-5/2} δu_x`.
pub fn curvature_jacobian(w: &[f64], h: f64, eps: f64) -> DMatrix<f64> {
    let n = w.len();
    let k = n - 2;
    let e2 = eps * eps;
    let mut jac = DMatrix::zeros(k, k);
    for r in 0..k {
        let i = r + 1;
        let ux = (w[i + 1] - w[i - 1]) / (2.0 * h);
        let uxx = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
        let s = 1.0 + e2 * ux * ux;
        let c = s.powf(-1.5);
        let b = -3.0 * e2 * ux * uxx * s.powf(-2.5);
        jac[(r, r)] += -2.0 * c / (h * h);
        if r > 0 {
            jac[(r, r - 1)] += c / (h * h) - b / (2.0 * h);
        }
        if r + 1 < k {
            jac[(r, r + 1)] += c / (h * h) + b / (2.0 * h);
        }
    }
    jac
}

/// Largest real part of the eigenvalues.
pub fn spectral_abscissa(jac: &DMatrix<f64>) -> f64 {
    jac.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub lambda: f64,
    pub mu: f64,
    pub spectral_abscissa: f64,
    /// Minus the least-squares slope of `log(distance)` over the fit window;
    /// absent when the distance never leaves the round-off floor.
    pub fitted_decay_rate: Option<f64>,
    pub matrix_dim: usize,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub samples_fitted: usize,
    pub termination: Termination,
    /// Largest `u` over every step of the perturbed run.
    pub max_u: f64,
    /// Smallest `v` over every step of the perturbed run.
    pub min_v: f64,
}

/// Distances above this count as signal in the decay fit.
const FIT_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Least-squares slope of `log d` against `t` over the last half of the
/// samples with `d` above the floor.
pub(crate) fn fit_decay(times: &[f64], dist: &[f64]) -> Option<(f64, usize)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(dist)
        .filter(|(_, d)| **d > FIT_FLOOR)
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    let tail = &pts[pts.len() / 2..];
    if tail.len() < 3 {
        return None;
    }
    let n = tail.len() as f64;
    let mt = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| (-sxy / sxx, tail.len()))
}

/// Evolves from `S + perturbation` (given as `(δu, δv)`, zero at the ends)
/// and fits the decay of the sup-distance to `S`.
pub fn stability_experiment(
    s: &SteadyState,
    p: &Params,
    perturbation: (&GridFunction1D, &GridFunction1D),
    sample_every: usize,
) -> Result<StabilityReport> {
    let (du, dv) = perturbation;
    let g = *s.state.grid();
    if du.grid() != &g || dv.grid() != &g {
        return Err(Error::GridMismatch("perturbation".into()));
    }
    let n = g.nx();
    if [du.values()[0], du.values()[n - 1], dv.values()[0], dv.values()[n - 1]]
        .iter()
        .any(|&e| e != 0.0)
    {
        return Err(Error::InvalidParam {
            name: "perturbation",
            reason: "must vanish at x = ±1".into(),
        });
    }
    let jac = linearize(s, p)?;
    let abscissa = spectral_abscissa(&jac);

    let u = GridFunction1D::new(
        g,
        s.state.u.values().iter().zip(du.values()).map(|(a, b)| a + b).collect(),
        s.state.u.role(),
    )?;
    let v = GridFunction1D::new(
        g,
        s.state.v.values().iter().zip(dv.values()).map(|(a, b)| a + b).collect(),
        s.state.v.role(),
    )?;
    let mut config = SimConfig::new(*p, MembranePair::new(u, v)?);
    config.sample_every = sample_every;
    let (traj, _) = evolve(&config)?;
    let times = traj.times();
    let dist: Vec<f64> = traj
        .samples
        .iter()
        .map(|x| x.state.sup_distance(&s.state))
        .collect();
    // an unperturbed start only shows round-off drift, which has no rate
    let fit = if dist[0] > FIT_FLOOR {
        fit_decay(&times, &dist)
    } else {
        None
    };
    Ok(StabilityReport {
        lambda: p.lambda,
        mu: p.mu,
        spectral_abscissa: abscissa,
        fitted_decay_rate: fit.map(|f| f.0),
        matrix_dim: jac.nrows(),
        initial_distance: dist[0],
        final_distance: *dist.last().expect("non-empty trajectory"),
        samples_fitted: fit.map_or(0, |f| f.1),
        termination: traj.termination,
        max_u: traj.max_u,
        min_v: traj.min_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exponential() {
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.1).collect();
        let d: Vec<f64> = t.iter().map(|t| 0.3 * (-2.5 * t).exp()).collect();
        let (rate, used) = fit_decay(&t, &d).unwrap();
        assert!((rate - 2.5).abs() < 1e-10);
        assert_eq!(used, 20);
    }

    #[test]
    fn fit_skipped_at_floor() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        assert!(fit_decay(&t, &[0.0; 10]).is_none());
    }

    #[test]
    fn curvature_jacobian_linear_case() {
        // ε = 0: the map is the second-difference matrix.
        let w = vec![0.0, 0.3, -0.1, 0.2, 0.0];
        let j = curvature_jacobian(&w, 0.5, 0.0);
        let exact = DMatrix::from_row_slice(3, 3, &[-8.0, 4.0, 0.0, 4.0, -8.0, 4.0, 0.0, 4.0, -8.0]);
        assert!((j - exact).amax() < 1e-12);
    }
}
