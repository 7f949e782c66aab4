//! Command-line front end: `mems-sim <subcommand> [--config FILE] [overrides]`.

mod config;
mod selfcheck;

pub use config::{parse_config, parse_init, InitSpec, RunConfig};

use crate::domain::{GridFunction1D, MembranePair, Role};
use crate::error::{Error, Result};
use crate::evolution::{evolve, SimConfig, Termination};
use crate::narrow_gap::{compare_to_sar, sar_evolve};
use crate::steady::{pullin_sweep, solve_steady, stability_experiment, xi0};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mems-sim", version, about = "Two-membrane electrostatic actuator simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nz: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// One of flat, parabolic:a, file:path.
    #[arg(long)]
    init: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full model time integration.
    Evolve(Common),
    /// Narrow-gap model time integration.
    Sar(Common),
    /// Distance between full-model runs and the narrow-gap run over an ε sweep.
    SarCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05, 0.025])]
        eps_list: Vec<f64>,
    },
    /// Single steady-state solve.
    Steady(Common),
    /// Continuation in λ until Newton fails.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Largest λ of the grid (default 2/ε).
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        lambda_step: f64,
        /// μ = ratio · λ.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
    },
    /// Decay of a perturbed steady state against the linearisation.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Amplitude of the perturbation `∓ρ(1 - x²)`.
        #[arg(long, default_value_t = 0.01)]
        rho: f64,
    },
    /// Touchdown time against the analytic upper bound.
    BoundCheck(Common),
    /// Runs the invariant suite on small grids.
    Selfcheck(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Evolve(c)
            | Command::Sar(c)
            | Command::Steady(c)
            | Command::BoundCheck(c)
            | Command::Selfcheck(c) => c,
            Command::SarCompare { common, .. }
            | Command::Sweep { common, .. }
            | Command::Stability { common, .. } => common,
        }
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut c = match &common.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    let p = &mut c.params;
    if let Some(v) = common.eps {
        p.eps = v;
    }
    if let Some(v) = common.lambda {
        p.lambda = v;
    }
    if let Some(v) = common.mu {
        p.mu = v;
    }
    if let Some(v) = common.t_end {
        p.t_end = v;
    }
    if let Some(v) = common.dt {
        p.dt = Some(v);
    }
    if let Some(v) = common.nx {
        c.nx = v;
    }
    if let Some(v) = common.nz {
        c.nz = v;
    }
    if let Some(v) = &common.init {
        c.init = parse_init(v)?;
    }
    if let Some(v) = &common.output_dir {
        c.output_dir = v.clone();
    }
    c.validate()?;
    Ok(c)
}

fn sim_config(c: &RunConfig) -> Result<SimConfig> {
    let mut s = SimConfig::new(c.params, c.initial_state()?);
    s.sample_every = c.sample_every;
    Ok(s)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn write_state(dir: &Path, name: &str, m: &MembranePair) -> Result<()> {
    use crate::format::{fmt_f64, write_row};
    let mut w = create(dir, name)?;
    write_row(&mut w, &["x", "u", "v"].map(String::from))?;
    let g = m.grid();
    for i in 0..g.nx() {
        write_row(
            &mut w,
            &[fmt_f64(g.x(i)), fmt_f64(m.u.values()[i]), fmt_f64(m.v.values()[i])],
        )?;
    }
    w.flush()?;
    Ok(())
}

fn termination_code(t: Termination) -> i32 {
    if t == Termination::Completed {
        EXIT_OK
    } else {
        EXIT_MODEL
    }
}

fn execute(cmd: &Command) -> Result<i32> {
    let c = load(cmd.common())?;
    let out = c.output_dir.clone();
    match cmd {
        Command::Evolve(_) => {
            let (traj, report) = evolve(&sim_config(&c)?)?;
            traj.write_csv(create(&out, "trajectory.csv")?)?;
            traj.write_snapshots(&out.join("snapshots"))?;
            write_json(&out, "touchdown.json", &report)?;
            println!(
                "evolve: {:?} at t = {} after {} steps, min gap {}",
                traj.termination,
                traj.last().t,
                traj.steps,
                traj.last().min_gap
            );
            if let Some(m) = traj.min_barrier_margin() {
                println!("smallest potential bound margin {m}");
            }
            if let Some(msg) = &traj.failure {
                println!("solver failure: {msg}");
            }
            Ok(termination_code(traj.termination))
        }
        Command::Sar(_) => {
            let traj = sar_evolve(&sim_config(&c)?)?;
            traj.write_csv(create(&out, "sar_trajectory.csv")?)?;
            traj.write_snapshots(&out.join("sar_snapshots"))?;
            println!("sar: {:?} at t = {}", traj.termination, traj.last().t);
            Ok(termination_code(traj.termination))
        }
        Command::SarCompare { eps_list, .. } => {
            let table = compare_to_sar(eps_list, &sim_config(&c)?)?;
            table.write_csv(create(&out, "convergence.csv")?)?;
            for r in &table.rows {
                println!("eps {} d_state {} d_potential {}", r.eps, r.d_state, r.d_potential);
            }
            let ok = table.strictly_decreasing();
            println!("strictly decreasing: {ok}");
            Ok(if ok { EXIT_OK } else { EXIT_MODEL })
        }
        Command::Steady(_) => match solve_steady(&c.params, &c.initial_state()?) {
            Ok(s) => {
                write_state(&out, "steady.csv", &s.state)?;
                write_json(
                    &out,
                    "steady.json",
                    &serde_json::json!({
                        "lambda": s.lambda,
                        "mu": s.mu,
                        "residual_norm": s.residual_norm,
                        "newton_iters": s.newton_iters,
                        "min_gap": s.state.min_gap(),
                    }),
                )?;
                println!("steady: residual {} in {} iterations", s.residual_norm, s.newton_iters);
                Ok(EXIT_OK)
            }
            Err(e @ Error::Newton { .. }) => {
                println!("steady: {e}");
                Ok(EXIT_MODEL)
            }
            Err(e) => Err(e),
        },
        Command::Sweep {
            lambda_max,
            lambda_step,
            ratio,
            ..
        } => {
            if !(*lambda_step > 0.0) {
                return Err(Error::Config("lambda_step: must be > 0".into()));
            }
            let eps = c.params.eps;
            let top = lambda_max.unwrap_or(2.0 / eps);
            let n = (top / lambda_step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (0..=n).map(|k| k as f64 * lambda_step).collect();
            let r = pullin_sweep(&c.params, &c.initial_state()?, &grid, *ratio)?;
            r.write_csv(create(&out, "sweep.csv")?)?;
            let ok = r.below_threshold(eps, 1e-2);
            write_json(
                &out,
                "sweep.json",
                &serde_json::json!({
                    "eps": eps,
                    "ratio": ratio,
                    "fold_estimate": r.fold_estimate,
                    "failed_at": r.failed_at,
                    "xi0": xi0(eps),
                    "below_threshold": ok,
                }),
            )?;
            println!("sweep: fold estimate {:?}, xi0 {}", r.fold_estimate, xi0(eps));
            Ok(if ok { EXIT_OK } else { EXIT_MODEL })
        }
        Command::Stability { rho, .. } => {
            let s = match solve_steady(&c.params, &c.initial_state()?) {
                Ok(s) => s,
                Err(e @ Error::Newton { .. }) => {
                    println!("stability: no steady state: {e}");
                    return Ok(EXIT_MODEL);
                }
                Err(e) => return Err(e),
            };
            let g = *s.state.grid();
            let n = g.nx();
            let bump = |sign: f64| {
                let mut w = GridFunction1D::from_fn(g, Role::Displacement, |x| sign * rho * (1.0 - x * x));
                w.values_mut()[0] = 0.0;
                w.values_mut()[n - 1] = 0.0;
                w
            };
            let (du, dv) = (bump(-1.0), bump(1.0));
            let report = stability_experiment(&s, &c.params, (&du, &dv), c.sample_every)?;
            write_json(&out, "stability.json", &report)?;
            println!(
                "stability: spectral abscissa {}, fitted decay rate {:?}",
                report.spectral_abscissa, report.fitted_decay_rate
            );
            Ok(EXIT_OK)
        }
        Command::BoundCheck(_) => {
            let (traj, report) = evolve(&sim_config(&c)?)?;
            traj.write_csv(create(&out, "trajectory.csv")?)?;
            let consistent = report.consistent();
            write_json(
                &out,
                "bound_check.json",
                &serde_json::json!({ "report": report, "consistent": consistent }),
            )?;
            println!(
                "bound-check: bound {:?}, observed {:?}, consistent {consistent}",
                report.analytic_bound, report.observed_time
            );
            Ok(if consistent { EXIT_OK } else { EXIT_MODEL })
        }
        Command::Selfcheck(_) => {
            let results = selfcheck::run_all();
            selfcheck::write_csv(&results, create(&out, "selfcheck.csv")?)?;
            for r in &results {
                println!("{} {} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.value);
            }
            Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_MODEL })
        }
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::InvalidParam { .. } | Error::BadNx(_) | Error::BadNz(_) | Error::GridMismatch(_)
    )
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MEMS_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MEMS_SIM_THREADS: expected a positive integer, got `{raw}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_MODEL
            }
        }
    }
}
