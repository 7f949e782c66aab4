use crate::domain::{discrete_norm, Grid, MembranePair, Params};
use crate::elliptic::{barrier_check, choose_exponent, solve_potential, trace_forcing_from};
use crate::error::{Error, Result};
use crate::evolution::diagnostics::{gap_functional, total_energy, touchdown_bound};
use crate::evolution::scheme::imex_update;
use crate::format::{fmt_f64, fmt_opt, write_row};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Settings of a time integration run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: Params,
    pub init: MembranePair,
    /// Record diagnostics every this many steps.
    pub sample_every: usize,
    /// Stop when the `W²_q` surrogate of `u` or `v + 1` exceeds this.
    pub norm_cap: f64,
}

impl SimConfig {
    pub const DEFAULT_SAMPLE_EVERY: usize = 10;
    pub const DEFAULT_NORM_CAP: f64 = 1e3;

    pub fn new(params: Params, init: MembranePair) -> Self {
        Self {
            params,
            init,
            sample_every: Self::DEFAULT_SAMPLE_EVERY,
            norm_cap: Self::DEFAULT_NORM_CAP,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.init.grid()
    }

    pub fn time_step(&self) -> f64 {
        self.params.time_step(self.grid())
    }

    /// Requires clamped ends and `-1 ≤ v < u ≤ 0`.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.sample_every == 0 {
            return Err(Error::InvalidParam {
                name: "sample_every",
                reason: "must be ≥ 1".into(),
            });
        }
        if !(self.norm_cap > 0.0) {
            return Err(Error::InvalidParam {
                name: "norm_cap",
                reason: "must be > 0".into(),
            });
        }
        let m = &self.init;
        if !m.boundary_ok() {
            return Err(Error::InvalidParam {
                name: "init",
                reason: "boundary values must be u(±1)=0, v(±1)=-1".into(),
            });
        }
        let ordered = m
            .u
            .values()
            .iter()
            .zip(m.v.values())
            .all(|(&u, &v)| -1.0 <= v && v < u && u <= 0.0);
        if !ordered {
            return Err(Error::InvalidParam {
                name: "init",
                reason: "initial data must satisfy -1 ≤ v < u ≤ 0".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Touchdown,
    NormBlowup,
    SolverFailure,
}

/// State and diagnostics at one recorded time.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub state: MembranePair,
    pub min_gap: f64,
    pub e_t: f64,
    /// Missing when the potential could not be solved for this state.
    pub energy: Option<f64>,
    pub norm_u: f64,
    pub norm_v: f64,
    pub g1_max: Option<f64>,
    pub g2_max: Option<f64>,
    /// Smallest margin of the comparison-function bounds on the potential.
    /// Reported only; missing for the narrow-gap model, for unsolved states
    /// and when no admissible exponent exists.
    pub barrier_margin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Error message when `termination` is `SolverFailure`.
    pub failure: Option<String>,
    pub dt: f64,
    pub steps: usize,
    /// Largest `u` over every step, not only the recorded ones.
    pub max_u: f64,
    /// Smallest `v` over every step.
    pub min_v: f64,
    /// Smallest one-step change of the gap functional.
    pub min_e_t_increment: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn final_state(&self) -> &MembranePair {
        &self.last().state
    }

    pub fn min_barrier_margin(&self) -> Option<f64> {
        self.samples
            .iter()
            .filter_map(|s| s.barrier_margin)
            .reduce(f64::min)
    }

    pub fn max_mirror_mismatch(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.state.mirror_mismatch())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write_row(
            &mut w,
            &["t", "min_gap", "E_t", "energy", "norm_u", "norm_v", "g1_max", "g2_max"]
                .map(String::from),
        )?;
        for s in &self.samples {
            write_row(
                &mut w,
                &[
                    fmt_f64(s.t),
                    fmt_f64(s.min_gap),
                    fmt_f64(s.e_t),
                    fmt_opt(s.energy),
                    fmt_f64(s.norm_u),
                    fmt_f64(s.norm_v),
                    fmt_opt(s.g1_max),
                    fmt_opt(s.g2_max),
                ],
            )?;
        }
        Ok(())
    }

    /// Writes `state_NNNNN.csv` (columns `x,u,v`) per sample into `dir`.
    pub fn write_snapshots(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, s) in self.samples.iter().enumerate() {
            let mut w = BufWriter::new(File::create(dir.join(format!("state_{k:05}.csv")))?);
            write_row(&mut w, &["x", "u", "v"].map(String::from))?;
            let g = s.state.grid();
            for i in 0..g.nx() {
                write_row(
                    &mut w,
                    &[
                        fmt_f64(g.x(i)),
                        fmt_f64(s.state.u.values()[i]),
                        fmt_f64(s.state.v.values()[i]),
                    ],
                )?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TouchdownReport {
    /// `max(λ, μ) > 4/ε` and the initial data are even.
    pub bound_applicable: bool,
    pub analytic_bound: Option<f64>,
    pub observed_time: Option<f64>,
    pub min_gap_at_end: f64,
    pub dt: f64,
    pub termination: Termination,
}

impl TouchdownReport {
    /// `observed_time ≤ analytic_bound + dt` whenever both apply.
    pub fn consistent(&self) -> bool {
        match (self.bound_applicable, self.analytic_bound, self.observed_time) {
            (true, Some(b), Some(t)) => t <= b + self.dt,
            _ => true,
        }
    }
}

/// Explicit forcing of one model at a state, with the diagnostics that come
/// for free with it.
pub(crate) struct Evaluation {
    pub fu: Vec<f64>,
    pub fv: Vec<f64>,
    pub energy: f64,
    pub g1_max: f64,
    pub g2_max: f64,
    pub barrier_margin: Option<f64>,
}

/// Shared time loop for the full and the narrow-gap model.
pub(crate) fn integrate(
    config: &SimConfig,
    slope_scale: f64,
    eval: impl Fn(&MembranePair) -> Result<Evaluation>,
) -> Result<Trajectory> {
    config.validate()?;
    let p = &config.params;
    let dt = config.time_step();
    let n_steps = (p.t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let time = |n: usize| if n >= n_steps { p.t_end } else { n as f64 * dt };

    let sample = |t: f64, state: &MembranePair, ev: Option<&Evaluation>| Sample {
        t,
        state: state.clone(),
        min_gap: state.min_gap(),
        e_t: gap_functional(state),
        energy: ev.map(|e| e.energy),
        norm_u: discrete_norm(&state.u, 2, p.q),
        norm_v: discrete_norm(&state.v_hat(), 2, p.q),
        g1_max: ev.map(|e| e.g1_max),
        g2_max: ev.map(|e| e.g2_max),
        barrier_margin: ev.and_then(|e| e.barrier_margin),
    };

    let mut traj = Trajectory {
        samples: Vec::new(),
        termination: Termination::Completed,
        failure: None,
        dt,
        steps: 0,
        max_u: config.init.u.max(),
        min_v: config.init.v.min(),
        min_e_t_increment: f64::INFINITY,
    };
    let mut state = config.init.clone();
    let mut n = 0;
    loop {
        let t = time(n);
        let ev = match eval(&state) {
            Ok(ev) => ev,
            Err(e) => {
                traj.samples.push(sample(t, &state, None));
                traj.termination = Termination::SolverFailure;
                traj.failure = Some(e.to_string());
                break;
            }
        };
        if n % config.sample_every == 0 || n == n_steps {
            traj.samples.push(sample(t, &state, Some(&ev)));
        }
        if n == n_steps {
            break;
        }
        let h = time(n + 1) - t;
        let next = match imex_update(&state, &ev.fu, &ev.fv, slope_scale, h) {
            Ok(next) => next,
            Err(e) => {
                if n % config.sample_every != 0 {
                    traj.samples.push(sample(t, &state, Some(&ev)));
                }
                traj.termination = Termination::SolverFailure;
                traj.failure = Some(e.to_string());
                break;
            }
        };
        n += 1;
        traj.steps = n;
        traj.max_u = traj.max_u.max(next.u.max());
        traj.min_v = traj.min_v.min(next.v.min());
        traj.min_e_t_increment = traj
            .min_e_t_increment
            .min(gap_functional(&next) - gap_functional(&state));
        state = next;

        let stop = if state.min_gap() < p.gap_tol {
            Some(Termination::Touchdown)
        } else if discrete_norm(&state.u, 2, p.q) > config.norm_cap
            || discrete_norm(&state.v_hat(), 2, p.q) > config.norm_cap
        {
            Some(Termination::NormBlowup)
        } else {
            None
        };
        if let Some(term) = stop {
            let ev = if state.min_gap() > 0.0 { eval(&state).ok() } else { None };
            traj.samples.push(sample(time(n), &state, ev.as_ref()));
            traj.termination = term;
            break;
        }
    }
    Ok(traj)
}

fn touchdown_report(config: &SimConfig, traj: &Trajectory) -> TouchdownReport {
    let bound = touchdown_bound(&config.init, &config.params);
    TouchdownReport {
        bound_applicable: bound.is_some() && config.init.mirror_mismatch() <= 1e-12,
        analytic_bound: bound,
        observed_time: (traj.termination == Termination::Touchdown).then(|| traj.last().t),
        min_gap_at_end: traj.last().min_gap,
        dt: traj.dt,
        termination: traj.termination,
    }
}

/// Integrates the full model from `config.init` until `t_end`, touchdown
/// (`min(u - v) < gap_tol`) or norm blow-up.
pub fn evolve(config: &SimConfig) -> Result<(Trajectory, TouchdownReport)> {
    let p = config.params;
    let traj = integrate(config, p.eps, |state| {
        let phi = solve_potential(state, &p)?;
        let f = trace_forcing_from(state, &p, &phi);
        Ok(Evaluation {
            fu: f.g1.values().iter().map(|g| -p.lambda * g).collect(),
            fv: f.g2.values().iter().map(|g| p.mu * g).collect(),
            energy: total_energy(state, &phi, &p),
            g1_max: f.g1.max(),
            g2_max: f.g2.max(),
            barrier_margin: choose_exponent(state).map(|n| barrier_check(state, &phi, n).min_margin()),
        })
    })?;
    let report = touchdown_report(config, &traj);
    Ok((traj, report))
}
