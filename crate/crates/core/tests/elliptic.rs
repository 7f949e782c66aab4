mod common;

use common::{manufactured, Shape};
use mems_core::elliptic::boundary_traces;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn manufactured_solution_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..3 {
        let shape = Shape::random(&mut rng);
        let errs: Vec<f64> = [33, 65, 129]
            .iter()
            .map(|&n| manufactured(shape, n, 0.5).0)
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "{shape:?}: errors {errs:?}");
        }
    }
}

#[test]
fn manufactured_top_trace() {
    // φ̃ = ψ_ex + z' has ∂_{z'}φ̃(x', 1) = 1 - π sin(πx').
    let shape = Shape {
        a: 0.2,
        b: 0.1,
        c: 0.15,
        d: -0.2,
    };
    let mut prev: Option<f64> = None;
    for &n in &[33, 65, 129] {
        let (_, phi) = manufactured(shape, n, 0.5);
        let (t1, _) = boundary_traces(&phi);
        let g = *phi.grid();
        let err = (0..g.nx())
            .map(|i| (t1.values()[i] - (1.0 - PI * (PI * g.x(i)).sin())).abs())
            .fold(0.0, f64::max);
        if let Some(e) = prev {
            let order = (e / err).log2();
            assert!(order >= 1.8, "trace order {order}");
        }
        prev = Some(err);
    }
}
