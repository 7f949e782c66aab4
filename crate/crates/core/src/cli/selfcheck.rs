use crate::domain::{make_grid, GridFunction1D, MembranePair, Params};
use crate::elliptic::{barrier_check, choose_exponent, solve_potential, trace_forcing};
use crate::error::{Error, Result};
use crate::evolution::{evolve, touchdown_bound, SimConfig};
use crate::format::{fmt_f64, write_row};
use crate::narrow_gap::sar_step;
use crate::steady::{curvature_jacobian, curvature_map, fixed_point_map, j_fn, solve_steady, xi0};
use nalgebra::DMatrix;
use std::io::Write;

pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub passed: bool,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(f64, bool)>) -> CheckResult {
    match f() {
        Ok((value, passed)) => CheckResult { name, value, passed },
        Err(_) => CheckResult {
            name,
            value: f64::NAN,
            passed: false,
        },
    }
}

fn missing() -> Error {
    Error::Config("prerequisite run failed".into())
}

fn curvature_gradient_error(w: &[f64], h: f64, eps: f64) -> f64 {
    let k = w.len() - 2;
    let step = 1e-6;
    let fd = DMatrix::from_fn(k, k, |i, j| {
        let (mut wp, mut wm) = (w.to_vec(), w.to_vec());
        wp[j + 1] += step;
        wm[j + 1] -= step;
        (curvature_map(&wp, h, eps)[i] - curvature_map(&wm, h, eps)[i]) / (2.0 * step)
    });
    let an = curvature_jacobian(w, h, eps);
    (fd - &an).norm() / an.norm()
}

pub fn run_all() -> Vec<CheckResult> {
    let mut out = Vec::new();

    out.push(check("flat_potential", || {
        let g = make_grid(65, 65)?;
        let phi = solve_potential(&MembranePair::flat(g), &Params::default())?;
        let mut err: f64 = 0.0;
        for i in 0..g.nx() {
            for j in 0..g.nz() {
                err = err.max((phi.phi_tilde.get(i, j) - g.z(j)).abs());
            }
        }
        Ok((err, err <= 1e-10))
    }));

    out.push(check("flat_forcing", || {
        let g = make_grid(65, 65)?;
        let f = trace_forcing(&MembranePair::flat(g), &Params::default())?;
        let err = f
            .g1
            .values()
            .iter()
            .chain(f.g2.values())
            .fold(0.0f64, |a, v| a.max((v - 1.0).abs()));
        Ok((err, err <= 1e-8))
    }));

    out.push(check("j_closed_form", || {
        let err = (j_fn(1.0) - 5.0 / (6.0 * 2f64.sqrt())).abs();
        Ok((err, err <= 1e-12))
    }));

    out.push(check("xi0_small_eps", || {
        let err = (xi0(0.01) - 2.0).abs();
        Ok((err, err < 1e-3))
    }));

    out.push(check("touchdown_bound_formula", || {
        let g = make_grid(33, 9)?;
        let b = touchdown_bound(&MembranePair::flat(g), &Params::new(0.1, 100.0, 100.0)?).unwrap_or(f64::NAN);
        Ok((b, (b - 1.0 / 30.0).abs() < 1e-14))
    }));

    out.push(check("curvature_gradient", || {
        let g = make_grid(33, 9)?;
        let mut worst: f64 = 0.0;
        for k in 1..=5 {
            let a = 0.05 * k as f64;
            let w: Vec<f64> = (0..g.nx())
                .map(|i| {
                    let x = g.x(i);
                    -a * (1.0 - x * x) * (1.0 + 0.2 * k as f64 * x)
                })
                .collect();
            worst = worst.max(curvature_gradient_error(&w, g.hx(), 0.5));
        }
        Ok((worst, worst <= 1e-5))
    }));

    out.push(check("sar_mirror_identity", || {
        let g = make_grid(33, 9)?;
        let mut m = MembranePair::from_fn(
            g,
            |x| -0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
            |x| -1.0 + 0.2 * (1.0 - x * x) * (1.0 + 0.3 * x),
        );
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            m = sar_step(&m, 0.3, 0.3, 2e-4)?;
            for (u, v) in m.u.values().iter().zip(m.v.values()) {
                worst = worst.max((u + 1.0 + v).abs());
            }
        }
        Ok((worst, worst <= 1e-10))
    }));

    let run = (|| {
        let g = make_grid(33, 17)?;
        let init = MembranePair::from_fn(g, |x| -0.2 * (1.0 - x * x), |x| -1.0 + 0.1 * (1.0 - x.powi(4)));
        let p = Params {
            eps: 0.2,
            lambda: 2.0,
            mu: 1.0,
            t_end: 0.02,
            ..Params::default()
        };
        evolve(&SimConfig::new(p, init)).map(|r| r.0)
    })()
    .ok();
    out.push(check("evolution_evenness", || {
        let t = run.as_ref().ok_or_else(missing)?;
        let m = t.max_mirror_mismatch();
        Ok((m, m <= 1e-9))
    }));
    out.push(check("evolution_sign_bounds", || {
        let t = run.as_ref().ok_or_else(missing)?;
        let excess = t.max_u.max(-1.0 - t.min_v);
        Ok((excess, t.max_u <= 1e-8 && t.min_v >= -1.0 - 1e-8))
    }));

    out.push(check("fixed_point_origin", || {
        let g = make_grid(17, 9)?;
        let (f1, f2) = fixed_point_map((0.0, 0.0), &MembranePair::flat(g), &Params::default())?;
        let m = f1.values().iter().chain(f2.values()).fold(0.0f64, |a, v| a.max(v.abs()));
        Ok((m, m == 0.0))
    }));

    let steady = (|| {
        let g = make_grid(17, 17)?;
        solve_steady(&Params::new(0.1, 0.05, 0.05)?, &MembranePair::flat(g))
    })()
    .ok();
    out.push(check("steady_residual", || {
        let s = steady.as_ref().ok_or_else(missing)?;
        Ok((s.residual_norm, s.residual_norm <= 1e-10))
    }));
    out.push(check("steady_even_convex", || {
        let s = steady.as_ref().ok_or_else(missing)?;
        let uxx = second_interior(&s.state.u);
        let vxx = second_interior(&s.state.v);
        let worst = uxx.iter().map(|d| -d).chain(vxx.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
        let mm = s.state.mirror_mismatch();
        Ok((mm.max(worst), mm <= 1e-9 && worst <= 1e-8))
    }));
    out.push(check("steady_barrier", || {
        let s = steady.as_ref().ok_or_else(missing)?;
        let n = choose_exponent(&s.state).unwrap_or(64);
        let r = barrier_check(&s.state, &s.phi, n);
        Ok((r.min_margin(), r.passes()))
    }));
    out
}

fn second_interior(w: &GridFunction1D) -> Vec<f64> {
    let v = w.values();
    let h = w.grid().hx();
    (1..v.len() - 1)
        .map(|i| (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h))
        .collect()
}

pub fn write_csv<W: Write>(results: &[CheckResult], mut w: W) -> std::io::Result<()> {
    write_row(&mut w, &["name", "value", "passed"].map(String::from))?;
    for r in results {
        write_row(&mut w, &[r.name.to_string(), fmt_f64(r.value), r.passed.to_string()])?;
    }
    w.flush()
}

