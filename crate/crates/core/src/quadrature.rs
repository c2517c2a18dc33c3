//! Gauss-Legendre quadrature on the reference interval [0, 1].

use crate::error::{Error, Result};

/// A 1D Gauss-Legendre rule mapped to [0, 1].
///
/// A rule with `q` points integrates polynomials of degree up to `2q - 1`
/// exactly; tensor products of two rules integrate the corresponding
/// bivariate polynomials on a rectangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Integrates `f` over [0, 1].
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `q`-point Gauss-Legendre rule on [0, 1] for `1 <= q <= 20`.
///
/// Nodes are found by Newton iteration on the Legendre polynomial `P_q`,
/// started from the Chebyshev estimates; weights use the standard
/// `2 / ((1 - x^2) P_q'(x)^2)` formula before mapping to [0, 1].
pub fn gauss_rule(q: usize) -> Result<QuadratureRule> {
    if q < 1 || q > 20 {
        return Err(Error::QuadratureOrder {
            order: q,
            min: 1,
            max: 20,
        });
    }
    let mut points = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        // Chebyshev estimate for the i-th root of P_q on [-1, 1].
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(q, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(q, x);
        points[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok(QuadratureRule { points, weights })
}

/// Value and derivative of the Legendre polynomial `P_n` at `x` via the
/// three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_is_midpoint() {
        let r = gauss_rule(1).unwrap();
        assert_eq!(r.points(), &[0.5]);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_closed_form() {
        // 0.5 +- 1/(2 sqrt(3)), weights 0.5 each; check by integrating x^3 = 1/4.
        let r = gauss_rule(2).unwrap();
        let off = 0.5 / 3.0_f64.sqrt();
        assert!((r.points()[0] - (0.5 - off)).abs() < 1e-15);
        assert!((r.points()[1] - (0.5 + off)).abs() < 1e-15);
        assert!((r.weights()[0] - 0.5).abs() < 1e-15);
        assert!((r.weights()[1] - 0.5).abs() < 1e-15);
        assert!((r.integrate(|x| x * x * x) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn three_point_integrates_x5() {
        let r = gauss_rule(3).unwrap();
        assert!((r.integrate(|x| x.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one_and_rule_is_exact() {
        for q in 1..=20 {
            let r = gauss_rule(q).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-15, "q={q}: weight sum {s}");
            // Exactness for the top admissible monomial x^(2q-1).
            let deg = 2 * q - 1;
            let exact = 1.0 / (deg as f64 + 1.0);
            let got = r.integrate(|x| x.powi(deg as i32));
            assert!(
                (got - exact).abs() < 1e-14 * exact.max(1.0),
                "q={q}: got {got}, want {exact}"
            );
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(gauss_rule(0).is_err());
        assert!(gauss_rule(21).is_err());
    }
}
