//! Problem data: PDE coefficients, the built-in manufactured test problem
//! and the canonical layer templates used by the interpolation-rate suites.
//!
//! The PDE is
//!
//! ```text
//! -eps1 (u_xx + u_yy) + eps2 b(x) u_x + c(x) u = f(x, y)   on (0,1)^2,
//! u = 0 on the boundary,
//! ```
//!
//! with `b >= lambda > 0`, `c >= beta > 0` and
//! `c - eps2 b' / 2 >= gamma > 0`.

use crate::error::{Error, Result};
use crate::mesh::compute_mu;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Closed-form exact solution with first and second partials.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: Fn2,
    pub u_x: Fn2,
    pub u_y: Fn2,
    pub u_xx: Fn2,
    pub u_yy: Fn2,
}

impl ExactSolution {
    /// The zero function; measuring a grid function against it yields its
    /// plain norms.
    pub fn zero() -> Self {
        let z: Fn2 = Arc::new(|_, _| 0.0);
        ExactSolution {
            u: z.clone(),
            u_x: z.clone(),
            u_y: z.clone(),
            u_xx: z.clone(),
            u_yy: z,
        }
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution {..}")
    }
}

/// Coefficients, constants and (optionally) the exact solution of one
/// problem instance.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub eps1: f64,
    pub eps2: f64,
    pub b: Fn1,
    pub b_prime: Fn1,
    pub c: Fn1,
    pub f: Fn2,
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub b_star: f64,
    /// Layer decay rates; by default computed from `(b_star, lambda, beta)`
    /// but overridable for problems with their own closed forms.
    pub mu0: f64,
    pub mu1: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("eps1", &self.eps1)
            .field("eps2", &self.eps2)
            .field("mu0", &self.mu0)
            .field("mu1", &self.mu1)
            .finish()
    }
}

impl ProblemSpec {
    /// Samples the coefficient conditions on a 1001-point grid and checks
    /// that `f` vanishes at the four corners.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps1 > 0.0 && self.eps1 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps1 must lie in (0, 1], got {}",
                self.eps1
            )));
        }
        if !(self.eps2 >= 0.0 && self.eps2 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps2 must lie in [0, 1], got {}",
                self.eps2
            )));
        }
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let bv = (self.b)(x);
            let cv = (self.c)(x);
            if bv < self.lambda {
                return Err(Error::InvalidParameter(format!(
                    "b({x}) = {bv} < lambda = {}",
                    self.lambda
                )));
            }
            if cv < self.beta {
                return Err(Error::InvalidParameter(format!(
                    "c({x}) = {cv} < beta = {}",
                    self.beta
                )));
            }
            let g = cv - 0.5 * self.eps2 * (self.b_prime)(x);
            if g < self.gamma {
                return Err(Error::InvalidParameter(format!(
                    "c - eps2 b'/2 = {g} < gamma = {} at x = {x}",
                    self.gamma
                )));
            }
        }
        for (x, y) in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)] {
            let fv = (self.f)(x, y);
            if fv.abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "f({x}, {y}) = {fv:e} does not vanish at the corner"
                )));
            }
        }
        Ok(())
    }
}

/// One boundary-layer factor of a separable function.
#[derive(Debug, Clone, Copy)]
enum Factor {
    One,
    /// `e^{-rate * s}` decaying away from `s = 0`.
    DecayAtZero(f64),
    /// `e^{-rate * (1 - s)}` decaying away from `s = 1`.
    DecayAtOne(f64),
}

impl Factor {
    /// `d^m/ds^m` of the factor at `s`.
    fn partial(&self, m: usize, s: f64) -> f64 {
        match *self {
            Factor::One => {
                if m == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Factor::DecayAtZero(r) => (-r).powi(m as i32) * (-r * s).exp(),
            Factor::DecayAtOne(r) => r.powi(m as i32) * (-r * (1.0 - s)).exp(),
        }
    }
}

/// The nine components of the layer decomposition: the smooth part `S`, the
/// exponential layers `E10` (x=0), `E11` (x=1), the parabolic layers `E20`
/// (y=0), `E21` (y=1) and the four corner layers `E31`, `E32`, `E33`, `E34`
/// at (0,0), (1,0), (1,1), (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LayerKind {
    S,
    E10,
    E11,
    E20,
    E21,
    E31,
    E32,
    E33,
    E34,
}

impl LayerKind {
    pub const ALL: [LayerKind; 9] = [
        LayerKind::S,
        LayerKind::E10,
        LayerKind::E11,
        LayerKind::E20,
        LayerKind::E21,
        LayerKind::E31,
        LayerKind::E32,
        LayerKind::E33,
        LayerKind::E34,
    ];

    /// The eight pure layer kinds (everything except `S`).
    pub const LAYERS: [LayerKind; 8] = [
        LayerKind::E10,
        LayerKind::E11,
        LayerKind::E20,
        LayerKind::E21,
        LayerKind::E31,
        LayerKind::E32,
        LayerKind::E33,
        LayerKind::E34,
    ];

    /// Kinds whose interpolant is corrected near the `x = 1 - sigma_{x,1}`
    /// transition column.
    pub fn is_corrected(self) -> bool {
        matches!(self, LayerKind::E11 | LayerKind::E32 | LayerKind::E33)
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(LayerKind::S),
            "E10" => Ok(LayerKind::E10),
            "E11" => Ok(LayerKind::E11),
            "E20" => Ok(LayerKind::E20),
            "E21" => Ok(LayerKind::E21),
            "E31" => Ok(LayerKind::E31),
            "E32" => Ok(LayerKind::E32),
            "E33" => Ok(LayerKind::E33),
            "E34" => Ok(LayerKind::E34),
            other => Err(Error::UnknownLayerKind(other.to_string())),
        }
    }
}

/// Rates entering the canonical layer templates.
#[derive(Debug, Clone, Copy)]
pub struct LayerParams {
    pub mu0: f64,
    pub mu1: f64,
    pub eps1: f64,
    pub p: f64,
    pub delta: f64,
}

/// Canonical representative of one decomposition component, with exact
/// partial derivatives of every order.
///
/// The exponential kinds are products of at most one x factor and one y
/// factor (`E10 = e^{-p mu0 x}`, `E20 = e^{-delta y / sqrt(eps1)}`, corner
/// kinds are products); `S` is the fixed smooth function `x^2 y (1 - y)`.
#[derive(Debug, Clone, Copy)]
pub struct LayerTemplate {
    kind: LayerKind,
    xfac: Factor,
    yfac: Factor,
}

impl LayerTemplate {
    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.partial(0, 0, x, y)
    }

    /// `d^{i+j} / dx^i dy^j` at `(x, y)`.
    pub fn partial(&self, i: usize, j: usize, x: f64, y: f64) -> f64 {
        if self.kind == LayerKind::S {
            // S = x^2 * y * (1 - y)
            let px = match i {
                0 => x * x,
                1 => 2.0 * x,
                2 => 2.0,
                _ => 0.0,
            };
            let py = match j {
                0 => y * (1.0 - y),
                1 => 1.0 - 2.0 * y,
                2 => -2.0,
                _ => 0.0,
            };
            return px * py;
        }
        self.xfac.partial(i, x) * self.yfac.partial(j, y)
    }
}

/// Builds the canonical template for `kind`.
pub fn layer_template(kind: LayerKind, params: &LayerParams) -> LayerTemplate {
    let rx0 = params.p * params.mu0;
    let rx1 = params.p * params.mu1;
    let ry = params.delta / params.eps1.sqrt();
    let (xfac, yfac) = match kind {
        LayerKind::S => (Factor::One, Factor::One),
        LayerKind::E10 => (Factor::DecayAtZero(rx0), Factor::One),
        LayerKind::E11 => (Factor::DecayAtOne(rx1), Factor::One),
        LayerKind::E20 => (Factor::One, Factor::DecayAtZero(ry)),
        LayerKind::E21 => (Factor::One, Factor::DecayAtOne(ry)),
        LayerKind::E31 => (Factor::DecayAtZero(rx0), Factor::DecayAtZero(ry)),
        LayerKind::E32 => (Factor::DecayAtOne(rx1), Factor::DecayAtZero(ry)),
        LayerKind::E33 => (Factor::DecayAtOne(rx1), Factor::DecayAtOne(ry)),
        LayerKind::E34 => (Factor::DecayAtZero(rx0), Factor::DecayAtOne(ry)),
    };
    LayerTemplate { kind, xfac, yfac }
}

/// One separable factor pair `(g(s), g'(s), g''(s))`.
fn layer_factor(rate: f64, at_one: bool, s: f64) -> (f64, f64, f64) {
    // g = 1 - e^{-rate * d} with d the distance from the layer boundary.
    let d = if at_one { 1.0 - s } else { s };
    let e = (-rate * d).exp();
    let sign = if at_one { -1.0 } else { 1.0 };
    (1.0 - e, sign * rate * e, -rate * rate * e)
}

/// The built-in manufactured problem: coefficients `b = 2 - x`, `c = 1`
/// and the product-of-layers exact solution
///
/// ```text
/// u = 1/4 (1 - e^{-mu0 x}) (1 - e^{-mu1 (1-x)})
///         (1 - e^{-y/sqrt(eps1)}) (1 - e^{-(1-y)/sqrt(eps1)})
/// ```
///
/// with the forcing term obtained by applying the operator to `u` using
/// hand-derived closed-form derivatives of the product.
pub fn test_problem(eps1: f64, eps2: f64) -> Result<ProblemSpec> {
    let (mu0, mu1) = compute_mu(eps1, eps2, 2.0, 1.0, 1.0)?;
    let sy = 1.0 / eps1.sqrt();

    // X(x) = g0 g1, Y(y) = q0 q1; u = X Y / 4.
    let xparts = move |x: f64| {
        let (g0, g0p, g0pp) = layer_factor(mu0, false, x);
        let (g1, g1p, g1pp) = layer_factor(mu1, true, x);
        (
            g0 * g1,
            g0p * g1 + g0 * g1p,
            g0pp * g1 + 2.0 * g0p * g1p + g0 * g1pp,
        )
    };
    let yparts = move |y: f64| {
        let (q0, q0p, q0pp) = layer_factor(sy, false, y);
        let (q1, q1p, q1pp) = layer_factor(sy, true, y);
        (
            q0 * q1,
            q0p * q1 + q0 * q1p,
            q0pp * q1 + 2.0 * q0p * q1p + q0 * q1pp,
        )
    };

    let u: Fn2 = Arc::new(move |x, y| 0.25 * xparts(x).0 * yparts(y).0);
    let u_x: Fn2 = Arc::new(move |x, y| 0.25 * xparts(x).1 * yparts(y).0);
    let u_y: Fn2 = Arc::new(move |x, y| 0.25 * xparts(x).0 * yparts(y).1);
    let u_xx: Fn2 = Arc::new(move |x, y| 0.25 * xparts(x).2 * yparts(y).0);
    let u_yy: Fn2 = Arc::new(move |x, y| 0.25 * xparts(x).0 * yparts(y).2);

    let b: Fn1 = Arc::new(|x| 2.0 - x);
    let b_prime: Fn1 = Arc::new(|_| -1.0);
    let c: Fn1 = Arc::new(|_| 1.0);

    let f: Fn2 = {
        let (u, u_x, u_xx, u_yy) = (u.clone(), u_x.clone(), u_xx.clone(), u_yy.clone());
        Arc::new(move |x, y| {
            -eps1 * (u_xx(x, y) + u_yy(x, y)) + eps2 * (2.0 - x) * u_x(x, y) + u(x, y)
        })
    };

    let spec = ProblemSpec {
        name: "two-param".to_string(),
        eps1,
        eps2,
        b,
        b_prime,
        c,
        f,
        lambda: 1.0,
        beta: 1.0,
        // c - eps2 b' / 2 = 1 + eps2 / 2 >= 1.
        gamma: 1.0,
        b_star: 2.0,
        mu0,
        mu1,
        exact: Some(ExactSolution {
            u,
            u_x,
            u_y,
            u_xx,
            u_yy,
        }),
    };
    spec.validate()?;
    Ok(spec)
}

/// Names accepted by [`builtin`].
pub fn builtin_names() -> &'static [&'static str] {
    &["two-param"]
}

/// Looks up a built-in problem by name.
pub fn builtin(name: &str, eps1: f64, eps2: f64) -> Result<ProblemSpec> {
    match name {
        "two-param" => test_problem(eps1, eps2),
        other => Err(Error::UnknownProblem(
            other.to_string(),
            builtin_names().join(", "),
        )),
    }
}

/// Decomposition of the built-in problem's exact solution into the nine
/// layer kinds, summing to `u` exactly. Terms carrying the `x = 1` layer
/// factor are grouped under `E11`/`E32`/`E33` so that the corrected
/// interpolant treats exactly the part of `u` that decays away from the
/// outflow boundary.
pub fn product_solution_components(eps1: f64, eps2: f64) -> Result<Vec<(LayerKind, Fn2)>> {
    let (mu0, mu1) = compute_mu(eps1, eps2, 2.0, 1.0, 1.0)?;
    let sy = 1.0 / eps1.sqrt();
    let a = move |x: f64| (-mu0 * x).exp();
    let bb = move |x: f64| (-mu1 * (1.0 - x)).exp();
    let cc = move |y: f64| (-sy * y).exp();
    let d = move |y: f64| (-sy * (1.0 - y)).exp();

    let comps: Vec<(LayerKind, Fn2)> = vec![
        (LayerKind::S, Arc::new(|_, _| 0.25)),
        (LayerKind::E10, Arc::new(move |x, _| -0.25 * a(x))),
        (LayerKind::E20, Arc::new(move |_, y| -0.25 * cc(y))),
        (
            LayerKind::E21,
            Arc::new(move |x, y| -0.25 * d(y) * (1.0 - cc(y) * (1.0 - a(x)))),
        ),
        (LayerKind::E31, Arc::new(move |x, y| 0.25 * a(x) * cc(y))),
        (LayerKind::E34, Arc::new(move |x, y| 0.25 * a(x) * d(y))),
        (
            LayerKind::E11,
            Arc::new(move |x, _| -0.25 * bb(x) * (1.0 - a(x))),
        ),
        (
            LayerKind::E32,
            Arc::new(move |x, y| 0.25 * bb(x) * (1.0 - a(x)) * cc(y)),
        ),
        (
            LayerKind::E33,
            Arc::new(move |x, y| 0.25 * bb(x) * (1.0 - a(x)) * d(y) * (1.0 - cc(y))),
        ),
    ];
    Ok(comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn test_problem_roots_match_closed_forms() {
        let p = test_problem(1.0, 1.0).unwrap();
        assert!((p.mu0 - (2.0_f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((p.mu1 - (1.0 + 5.0_f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_solution_vanishes_on_boundary() {
        let p = test_problem(1e-4, 1e-4).unwrap();
        let u = &p.exact.as_ref().unwrap().u;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            for (x, y) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
                assert!(u(x, y).abs() < 1e-10, "u({x},{y}) = {:e}", u(x, y));
            }
        }
    }

    #[test]
    fn center_value_is_a_quarter() {
        // All four layer factors are 1 to machine precision at the center.
        let p = test_problem(1e-4, 1e-4).unwrap();
        let u = &p.exact.as_ref().unwrap().u;
        assert!((u(0.5, 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn manufactured_residual_vanishes() {
        // The operator applied to u (closed-form derivatives) minus f.
        for (eps1, eps2) in [
            (1.0, 1.0),
            (1e-2, 1e-4),
            (1e-4, 1e-4),
            (1e-6, 1e-8),
            (1e-8, 1.0),
            (1e-10, 1e-8),
        ] {
            let p = test_problem(eps1, eps2).unwrap();
            let e = p.exact.as_ref().unwrap();
            let mut state = 42u64;
            for _ in 0..10_000 {
                let x = splitmix(&mut state);
                let y = splitmix(&mut state);
                let lhs = -eps1 * ((e.u_xx)(x, y) + (e.u_yy)(x, y))
                    + eps2 * (p.b)(x) * (e.u_x)(x, y)
                    + (p.c)(x) * (e.u)(x, y);
                let fv = (p.f)(x, y);
                assert!(
                    (lhs - fv).abs() < 1e-8 * (1.0 + fv.abs()),
                    "residual {:e} at ({x}, {y}), eps=({eps1:e},{eps2:e})",
                    lhs - fv
                );
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = test_problem(1e-4, 1e-4).unwrap();
        let e = p.exact.as_ref().unwrap();
        let h = 1e-5;
        let mut state = 7u64;
        for _ in 0..500 {
            // Stay at distance > 1e-2 from the boundary layers.
            let x = 0.01 + 0.98 * splitmix(&mut state);
            let y = 0.01 + 0.98 * splitmix(&mut state);
            let fd_x = ((e.u)(x + h, y) - (e.u)(x - h, y)) / (2.0 * h);
            let fd_y = ((e.u)(x, y + h) - (e.u)(x, y - h)) / (2.0 * h);
            let fd_xx = ((e.u)(x + h, y) - 2.0 * (e.u)(x, y) + (e.u)(x - h, y)) / (h * h);
            let fd_yy = ((e.u)(x, y + h) - 2.0 * (e.u)(x, y) + (e.u)(x, y - h)) / (h * h);
            for (fd, ex) in [
                (fd_x, (e.u_x)(x, y)),
                (fd_y, (e.u_y)(x, y)),
                (fd_xx, (e.u_xx)(x, y)),
                (fd_yy, (e.u_yy)(x, y)),
            ] {
                assert!(
                    (fd - ex).abs() <= 1e-5 * (1.0 + ex.abs()),
                    "fd {fd:e} vs exact {ex:e} at ({x}, {y})"
                );
            }
        }
    }

    #[test]
    fn condition_three_has_unit_margin() {
        // c - eps2 b' / 2 = 1 + eps2 / 2 >= 1 for the built-in problem.
        let p = test_problem(1e-6, 1e-3).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let g = (p.c)(x) - 0.5 * p.eps2 * (p.b_prime)(x);
            assert!(g >= 1.0);
        }
    }

    #[test]
    fn layer_template_values() {
        let params = LayerParams {
            mu0: 99.0,
            mu1: 101.0,
            eps1: 1e-4,
            p: 0.5,
            delta: 0.25,
        };
        let e10 = layer_template(LayerKind::E10, &params);
        assert_eq!(e10.eval(0.0, 0.3), 1.0);
        assert!((e10.partial(1, 0, 0.0, 0.3) + params.p * params.mu0).abs() < 1e-12);

        let e31 = layer_template(LayerKind::E31, &params);
        assert_eq!(e31.eval(0.0, 0.0), 1.0);
        let want = (-params.p * params.mu0).exp() * (-params.delta / params.eps1.sqrt()).exp();
        assert!((e31.eval(1.0, 1.0) - want).abs() <= 1e-15 * want.abs());
    }

    #[test]
    fn mixed_partial_matches_finite_differences() {
        let params = LayerParams {
            mu0: 40.0,
            mu1: 55.0,
            eps1: 1e-2,
            p: 0.5,
            delta: 0.25,
        };
        let e32 = layer_template(LayerKind::E32, &params);
        let h = 1e-5;
        let mut state = 11u64;
        for _ in 0..100 {
            let x = 0.05 + 0.9 * splitmix(&mut state);
            let y = 0.05 + 0.9 * splitmix(&mut state);
            let fd = (e32.eval(x + h, y + h) - e32.eval(x + h, y - h) - e32.eval(x - h, y + h)
                + e32.eval(x - h, y - h))
                / (4.0 * h * h);
            let ex = e32.partial(1, 1, x, y);
            assert!(
                (fd - ex).abs() <= 1e-6 * (1.0 + ex.abs()),
                "fd {fd:e} vs {ex:e}"
            );
        }
    }

    #[test]
    fn decomposition_sums_to_exact_solution() {
        let (eps1, eps2) = (1e-6, 1e-4);
        let p = test_problem(eps1, eps2).unwrap();
        let u = &p.exact.as_ref().unwrap().u;
        let comps = product_solution_components(eps1, eps2).unwrap();
        let mut state = 3u64;
        for _ in 0..1000 {
            let x = splitmix(&mut state);
            let y = splitmix(&mut state);
            let sum: f64 = comps.iter().map(|(_, f)| f(x, y)).sum();
            assert!(
                (sum - u(x, y)).abs() < 1e-15,
                "sum {sum:e} vs u {:e}",
                u(x, y)
            );
        }
    }

    #[test]
    fn registry_lookup() {
        assert!(builtin("two-param", 1e-6, 1e-4).is_ok());
        assert!(matches!(
            builtin("nope", 1e-6, 1e-4),
            Err(Error::UnknownProblem(..))
        ));
        assert!(LayerKind::from_str("E33").is_ok());
        assert!(LayerKind::from_str("E99").is_err());
    }
}
