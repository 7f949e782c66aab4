use mems_core::domain::{make_grid, MembranePair, Params};
use mems_core::evolution::{evolve, step_imex, touchdown_bound, SimConfig, Termination};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, nx: usize) -> MembranePair {
    let a = rng.random_range(0.05..0.25);
    let b = rng.random_range(-0.3..0.3);
    let c = rng.random_range(0.05..0.25);
    MembranePair::from_fn(
        make_grid(nx, 17).unwrap(),
        move |x| -a * (1.0 - x * x) * (1.0 + b * x),
        move |x| -1.0 + c * (1.0 - x * x) * (1.0 - 0.5 * x * x),
    )
}

#[test]
fn local_order_in_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = Params {
        eps: 0.3,
        lambda: 2.0,
        mu: 1.5,
        kappa: 0.01,
        ..Params::default()
    };
    for _ in 0..2 {
        let m = random_state(&mut rng, 33);
        let errs: Vec<f64> = [2e-4, 1e-4, 5e-5, 2.5e-5]
            .iter()
            .map(|&dt| {
                let one = step_imex(&m, &p, dt).unwrap();
                let half = step_imex(&m, &p, dt / 2.0).unwrap();
                let two = step_imex(&half, &p, dt / 2.0).unwrap();
                one.sup_distance(&two)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "errors {errs:?}");
        }
    }
}

#[test]
fn weak_forcing_runs_to_end() {
    let g = make_grid(33, 17).unwrap();
    let p = Params {
        lambda: 0.1,
        mu: 0.1,
        t_end: 0.05,
        ..Params::default()
    };
    let (traj, report) = evolve(&SimConfig::new(p, MembranePair::flat(g))).unwrap();
    assert_eq!(traj.termination, Termination::Completed);
    assert_eq!(traj.last().t, 0.05);
    assert!(traj.samples.iter().all(|s| s.min_gap > 0.9));
    assert!(report.observed_time.is_none() && !report.bound_applicable);
    let times = traj.times();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(traj.samples[0].state, MembranePair::flat(g));
    assert!(traj.samples[0].barrier_margin.unwrap().abs() < 1e-12);
    assert!(traj.samples.iter().all(|s| s.barrier_margin.is_some()));
    let h = g.hx().max(g.hz());
    assert!(traj.min_barrier_margin().unwrap() >= -10.0 * h * h);
}

#[test]
fn even_data_stay_even_and_signs_hold() {
    let g = make_grid(33, 17).unwrap();
    let init = MembranePair::from_fn(
        g,
        |x| -0.2 * (1.0 - x * x),
        |x| -1.0 + 0.1 * (1.0 - x.powi(4)),
    );
    let p = Params {
        eps: 0.2,
        lambda: 3.0,
        mu: 2.0,
        t_end: 0.05,
        ..Params::default()
    };
    let (traj, _) = evolve(&SimConfig::new(p, init)).unwrap();
    assert!(traj.max_mirror_mismatch() <= 1e-9);
    assert!(traj.max_u <= 1e-8 && traj.min_v >= -1.0 - 1e-8);
}

#[test]
fn strong_forcing_touches_down_before_bound() {
    let g = make_grid(33, 9).unwrap();
    let p = Params {
        eps: 0.5,
        lambda: 40.0,
        mu: 40.0,
        t_end: 1.0,
        ..Params::default()
    };
    let init = MembranePair::flat(g);
    let bound = touchdown_bound(&init, &p).unwrap();
    assert!((bound - 2.0 / 32.0).abs() < 1e-14);
    let (traj, report) = evolve(&SimConfig::new(p, init)).unwrap();
    assert_eq!(traj.termination, Termination::Touchdown);
    assert!(traj.last().min_gap < p.gap_tol);
    assert!(traj.samples[..traj.samples.len() - 1].iter().all(|s| s.min_gap >= p.gap_tol));
    assert!(report.bound_applicable && report.consistent(), "{report:?}");
    assert!(traj.min_e_t_increment >= -1e-8);
}
