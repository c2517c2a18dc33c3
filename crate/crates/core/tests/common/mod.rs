//! Helpers shared by the integration suites.
#![allow(dead_code)]

use layerfem::analysis::CaseParams;
use layerfem::femspace::FemSpace;
use layerfem::linsolve::SolverConfig;
use layerfem::mesh::{build_mesh, compute_mu, MeshParams};
use layerfem::problem::{ExactSolution, Fn2, LayerTemplate};
use layerfem::ErrorReport;
use std::sync::Arc;

/// Deterministic splitmix64 stream mapped to [0, 1).
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Least-squares slope of `-ln e` against `ln N`.
pub fn ls_slope(ns: &[usize], errors: &[f64]) -> f64 {
    assert_eq!(ns.len(), errors.len());
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() {
        num += (xs[i] - xm) * (ys[i] - ym);
        den += (xs[i] - xm) * (xs[i] - xm);
    }
    -num / den
}

/// Mesh parameters for the built-in problem's layer rates.
pub fn graded_params(n: usize, eps1: f64, eps2: f64, tau: f64, delta: f64) -> MeshParams {
    let (mu0, mu1) = compute_mu(eps1, eps2, 2.0, 1.0, 1.0).unwrap();
    MeshParams::new(n, tau, 0.5, delta, mu0, mu1, eps1).unwrap()
}

pub fn graded_space(n: usize, k: usize, eps1: f64, eps2: f64, delta: f64) -> Arc<FemSpace> {
    let params = graded_params(n, eps1, eps2, (k + 1) as f64, delta);
    FemSpace::new(build_mesh(&params).unwrap(), k).unwrap()
}

/// Exact-solution view of a layer template (partials are closed-form).
pub fn template_exact(tpl: LayerTemplate) -> ExactSolution {
    ExactSolution {
        u: Arc::new(move |x, y| tpl.eval(x, y)) as Fn2,
        u_x: Arc::new(move |x, y| tpl.partial(1, 0, x, y)),
        u_y: Arc::new(move |x, y| tpl.partial(0, 1, x, y)),
        u_xx: Arc::new(move |x, y| tpl.partial(2, 0, x, y)),
        u_yy: Arc::new(move |x, y| tpl.partial(0, 2, x, y)),
    }
}

/// One table case with the conventions used for the convergence tables:
/// p = 0.5, delta = 0.5, tau = k + 1.
pub fn table_case(eps1: f64, eps2: f64, n: usize, k: usize) -> ErrorReport {
    let problem = layerfem::test_problem(eps1, eps2).unwrap();
    let mut params = CaseParams::new(n, k, (k + 1) as f64);
    params.delta = 0.5;
    layerfem::run_case(&problem, &params, &SolverConfig::default()).unwrap()
}
