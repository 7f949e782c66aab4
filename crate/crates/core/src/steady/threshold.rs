/// `J(r) = ∫₀^r ds / (1 + s²)^{5/2} = r(2r² + 3) / (3(r² + 1)^{3/2})`.
pub fn j_fn(r: f64) -> f64 {
    let r2 = r * r;
    r * (2.0 * r2 + 3.0) / (3.0 * (r2 + 1.0).powf(1.5))
}

/// Voltage level above which no steady state exists:
/// `ξ₀(ε) = min(2J(ε)/ε, 2/(3ε))`.
pub fn xi0(eps: f64) -> f64 {
    (2.0 * j_fn(eps) / eps).min(2.0 / (3.0 * eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on the defining integral.
    fn j_quadrature(r: f64) -> f64 {
        let n = 2000;
        let h = r / n as f64;
        let f = |s: f64| (1.0 + s * s).powf(-2.5);
        let mut acc = f(0.0) + f(r);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn closed_form_matches_integral() {
        for &r in &[0.0, 0.3, 1.0, 2.5, 10.0] {
            assert!((j_fn(r) - j_quadrature(r)).abs() < 1e-12, "{r}");
        }
        assert_eq!(j_fn(0.0), 0.0);
    }

    #[test]
    fn reference_values() {
        assert!((j_fn(1.0) - 5.0 / (6.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((xi0(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((xi0(0.01) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn min_branch() {
        for k in 1..400 {
            let eps = k as f64 * 0.005;
            let a = 2.0 * j_fn(eps) / eps;
            let b = 2.0 / (3.0 * eps);
            assert_eq!(xi0(eps), if a >= b { b } else { a });
        }
    }
}
