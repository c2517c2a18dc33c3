//! Error measurement against exact solutions and the single-case pipeline
//! mesh -> space -> assemble -> solve -> norms.

use crate::assembly::assemble;
use crate::error::{Error, Result};
use crate::femspace::{lagrange_derivs, lagrange_values, FemSpace, GridFunction};
use crate::linsolve::{solve, SolveReport, SolverConfig};
use crate::mesh::{build_mesh, MeshParams, MeshWarning};
use crate::problem::{ExactSolution, ProblemSpec};
use crate::quadrature::{gauss_rule, QuadratureRule};
use serde::Serialize;

/// L2, H1-seminorm and energy norm of a measured difference, with the
/// directional pieces `h1^2 = h1x^2 + h1y^2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorNorms {
    pub energy: f64,
    pub l2: f64,
    pub h1: f64,
    pub h1x: f64,
    pub h1y: f64,
}

/// Element-wise quadrature of `(u - u_h)^2` and `|grad(u - u_h)|^2`;
/// `energy^2 = eps1 * h1^2 + l2^2` by construction.
///
/// The integrand is not polynomial, so the rule must have at least `k + 3`
/// points per direction.
pub fn energy_error(
    gf: &GridFunction,
    exact: &ExactSolution,
    eps1: f64,
    quad: &QuadratureRule,
) -> Result<ErrorNorms> {
    let space = gf.space();
    let k = space.degree();
    if quad.order() < k + 3 {
        return Err(Error::QuadratureTooLow {
            order: quad.order(),
            degree: k,
            needed: k + 3,
        });
    }
    let mesh = space.mesh();
    let q = quad.order();

    let mut basis_val = vec![0.0; q * (k + 1)];
    let mut basis_der = vec![0.0; q * (k + 1)];
    for (a, &xi) in quad.points().iter().enumerate() {
        lagrange_values(k, xi, &mut basis_val[a * (k + 1)..(a + 1) * (k + 1)]);
        lagrange_derivs(k, xi, &mut basis_der[a * (k + 1)..(a + 1) * (k + 1)]);
    }

    let coeffs = gf.coeffs();
    let mut l2_sq = 0.0;
    let mut h1x_sq = 0.0;
    let mut h1y_sq = 0.0;
    for j in 0..mesh.n_y() {
        let y0 = mesh.y[j];
        let hy = mesh.hy[j];
        for i in 0..mesh.n_x() {
            let x0 = mesh.x[i];
            let hx = mesh.hx[i];
            let jac = hx * hy;
            for b in 0..q {
                let yq = y0 + quad.points()[b] * hy;
                let wy = quad.weights()[b];
                for a in 0..q {
                    let xq = x0 + quad.points()[a] * hx;
                    let w = quad.weights()[a] * wy * jac;

                    let mut v = 0.0;
                    let mut dx = 0.0;
                    let mut dy = 0.0;
                    for t in 0..=k {
                        let gy = j * k + t;
                        let ly = basis_val[b * (k + 1) + t];
                        let dly = basis_der[b * (k + 1) + t] / hy;
                        for s in 0..=k {
                            let gx = i * k + s;
                            let c = coeffs[space.dof_index(gx, gy)];
                            let lx = basis_val[a * (k + 1) + s];
                            let dlx = basis_der[a * (k + 1) + s] / hx;
                            v += c * lx * ly;
                            dx += c * dlx * ly;
                            dy += c * lx * dly;
                        }
                    }

                    let ev = (exact.u)(xq, yq) - v;
                    let ex = (exact.u_x)(xq, yq) - dx;
                    let ey = (exact.u_y)(xq, yq) - dy;
                    l2_sq += w * ev * ev;
                    h1x_sq += w * ex * ex;
                    h1y_sq += w * ey * ey;
                }
            }
        }
    }
    let h1_sq = h1x_sq + h1y_sq;
    let l2 = l2_sq.sqrt();
    let h1 = h1_sq.sqrt();
    let energy = (eps1 * h1_sq + l2_sq).sqrt();
    Ok(ErrorNorms {
        energy,
        l2,
        h1,
        h1x: h1x_sq.sqrt(),
        h1y: h1y_sq.sqrt(),
    })
}

/// Norms of the grid function itself (measured against zero).
pub fn energy_norm(gf: &GridFunction, eps1: f64, quad: &QuadratureRule) -> Result<ErrorNorms> {
    energy_error(gf, &ExactSolution::zero(), eps1, quad)
}

/// Convergence rate between errors at `N` and `2N`:
/// `(ln e_N - ln e_2N) / ln 2`.
pub fn rate(e_n: f64, e_2n: f64) -> Result<f64> {
    if !(e_n > 0.0) || !(e_2n > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate needs positive errors, got {e_n:e}, {e_2n:e}"
        )));
    }
    Ok((e_n.ln() - e_2n.ln()) / std::f64::consts::LN_2)
}

/// Discretization inputs of one case.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CaseParams {
    pub n: usize,
    pub k: usize,
    pub tau: f64,
    pub p: f64,
    pub delta: f64,
    /// Per-direction assembly quadrature order; default `k + 2`.
    pub quad_assembly: Option<usize>,
    /// Per-direction error quadrature order; default `k + 3`.
    pub quad_error: Option<usize>,
}

impl CaseParams {
    pub fn new(n: usize, k: usize, tau: f64) -> Self {
        CaseParams {
            n,
            k,
            tau,
            p: 0.5,
            delta: 0.25,
            quad_assembly: None,
            quad_error: None,
        }
    }
}

/// Per-run record; one CSV row.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    pub k: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub tau: f64,
    pub p: f64,
    pub delta: f64,
    pub e_energy: f64,
    pub e_l2: f64,
    pub e_h1: f64,
    /// Filled by the study layer once the next refinement exists.
    pub rate_energy: Option<f64>,
    pub solve: SolveReport,
    pub warnings: Vec<MeshWarning>,
}

/// Runs the full pipeline for one `(problem, N, k)` case.
pub fn run_case(
    problem: &ProblemSpec,
    params: &CaseParams,
    solver: &SolverConfig,
) -> Result<ErrorReport> {
    let ctx = |e: Error| Error::Case {
        n: params.n,
        k: params.k,
        eps1: problem.eps1,
        eps2: problem.eps2,
        source: Box::new(e),
    };

    let exact = problem.exact.as_ref().ok_or_else(|| {
        ctx(Error::InvalidParameter(
            "problem has no exact solution".into(),
        ))
    })?;

    let mesh_params = MeshParams::new(
        params.n,
        params.tau,
        params.p,
        params.delta,
        problem.mu0,
        problem.mu1,
        problem.eps1,
    )
    .map_err(ctx)?;
    let mesh = build_mesh(&mesh_params).map_err(ctx)?;
    let warnings = mesh.warnings.clone();

    let space = FemSpace::new(mesh, params.k).map_err(ctx)?;
    let q_asm = params.quad_assembly.unwrap_or(params.k + 2);
    let q_err = params.quad_error.unwrap_or(params.k + 3);
    let system = assemble(&space, problem, &gauss_rule(q_asm).map_err(ctx)?).map_err(ctx)?;
    let (solution, solve_report) = solve(&system, solver).map_err(ctx)?;
    let gf = space.grid_function(solution).map_err(ctx)?;
    let norms =
        energy_error(&gf, exact, problem.eps1, &gauss_rule(q_err).map_err(ctx)?).map_err(ctx)?;

    Ok(ErrorReport {
        n: params.n,
        k: params.k,
        eps1: problem.eps1,
        eps2: problem.eps2,
        tau: params.tau,
        p: params.p,
        delta: params.delta,
        e_energy: norms.energy,
        e_l2: norms.l2,
        e_h1: norms.h1,
        rate_energy: None,
        solve: solve_report,
        warnings,
    })
}
