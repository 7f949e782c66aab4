use crate::domain::function::{trapezoid, GridFunction1D};

/// Discrete `W^k_q(I)` surrogate: trapezoid quadrature of the `q`-th powers of
/// `|f|`, `|f'|`, `|f''|` up to `order`, combined as `(Σ ∫|f^{(m)}|^q)^{1/q}`.
///
/// Derivatives use central differences with second-order one-sided
/// formulas at the ends.
pub fn discrete_norm(f: &GridFunction1D, order: u8, q: f64) -> f64 {
    assert!(order <= 2, "order must be 0, 1 or 2");
    assert!(q >= 2.0 && q.is_finite(), "q must lie in [2, ∞)");
    let h = f.grid().hx();
    let lq = |vals: &[f64]| -> f64 {
        let powered: Vec<f64> = vals.iter().map(|v| v.abs().powf(q)).collect();
        trapezoid(&powered, h)
    };
    let mut total = lq(f.values());
    if order >= 1 {
        total += lq(&f.dx());
    }
    if order >= 2 {
        total += lq(&f.dxx());
    }
    total.powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::function::Role;
    use crate::domain::grid::make_grid;

    #[test]
    fn zero_function() {
        let g = make_grid(33, 9).unwrap();
        let f = GridFunction1D::zeros(g, Role::Displacement);
        assert_eq!(discrete_norm(&f, 2, 4.0), 0.0);
    }

    #[test]
    fn parabola_l2() {
        // ∫_{-1}^{1} (1-x²)² dx = 16/15
        let g = make_grid(2049, 9).unwrap();
        let f = GridFunction1D::from_fn(g, Role::Displacement, |x| 1.0 - x * x);
        let n = discrete_norm(&f, 0, 2.0);
        assert!((n - (16.0f64 / 15.0).sqrt()).abs() < 1e-4, "{n}");
    }

    #[test]
    fn parabola_w22() {
        // 16/15 + ∫4x² + ∫4 = 16/15 + 8/3 + 8 = 176/15
        let g = make_grid(2049, 9).unwrap();
        let f = GridFunction1D::from_fn(g, Role::Displacement, |x| 1.0 - x * x);
        let n = discrete_norm(&f, 2, 2.0);
        assert!((n - (176.0f64 / 15.0).sqrt()).abs() < 1e-5, "{n}");
    }

    #[test]
    fn constant_order_zero() {
        let g = make_grid(65, 9).unwrap();
        for &q in &[2.0, 3.0, 4.0, 7.5] {
            for &c in &[-2.5, 0.3, 1.0] {
                let f = GridFunction1D::from_fn(g, Role::Displacement, |_| c);
                let n = discrete_norm(&f, 0, q);
                assert!((n - c.abs() * 2f64.powf(1.0 / q)).abs() < 1e-12);
            }
        }
    }
}
