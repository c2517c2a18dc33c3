//! Bakhvalov-type graded tensor-product meshes on the unit square.
//!
//! The mesh resolves exponential layers at `x = 0`, `x = 1` (widths `1/mu0`,
//! `1/mu1`) and parabolic layers at `y = 0`, `y = 1` (width `sqrt(eps1)`).
//! Each axis is split into quarters: the outer quarters follow a logarithmic
//! grading function, the inner half is uniform. The transition points are
//!
//! ```text
//! sigma_{x,i} = (tau / (p * mu_i)) * ln(mu_i)      i = 0, 1
//! sigma_y     = (tau / delta) * sqrt(eps1) * ln(1 / sqrt(eps1))
//! ```
//!
//! When a formula value exceeds 1/4 the transition is capped at 1/4 and the
//! grading is compressed accordingly; when a layer is too weak to grade
//! (rate <= 1) the corresponding quarter falls back to uniform spacing.
//! Both situations are reported as warnings so that sweeps can tell which
//! parameter pairs left the fully graded regime.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Characteristic decay rates of the exponential layers at `x = 0` and
/// `x = 1`, i.e. the magnitudes of the two real roots of
/// `-eps1 g^2 + eps2 b g + c = 0` with `b = b_star` resp. `b = lambda`,
/// `c = beta`.
///
/// `mu0` uses the conjugate form `2 beta / (eps2 b* + sqrt(...))` which is
/// immune to cancellation as `eps1 -> 0`. Always returns `mu0 <= mu1`.
pub fn compute_mu(eps1: f64, eps2: f64, b_star: f64, lambda: f64, beta: f64) -> Result<(f64, f64)> {
    if !(eps1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps1 must be positive, got {eps1}"
        )));
    }
    if !(eps2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps2 must be nonnegative, got {eps2}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(lambda > 0.0) || !(b_star >= lambda) {
        return Err(Error::InvalidParameter(format!(
            "need b_star >= lambda > 0, got b_star={b_star}, lambda={lambda}"
        )));
    }
    let mu0 = 2.0 * beta / (eps2 * b_star + ((eps2 * b_star).powi(2) + 4.0 * eps1 * beta).sqrt());
    let mu1 = (eps2 * lambda + ((eps2 * lambda).powi(2) + 4.0 * eps1 * beta).sqrt()) / (2.0 * eps1);
    Ok((mu0, mu1))
}

/// Inputs of the mesh generator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshParams {
    /// Element count per direction; at least 8 and divisible by 4.
    pub n: usize,
    /// Grading exponent `tau >= 1` (at least `k + 1` for degree-`k` elements).
    pub tau: f64,
    /// Layer-strength parameter `p` in (0, 1).
    pub p: f64,
    /// Parabolic-layer parameter `delta > 0`.
    pub delta: f64,
    /// Decay rate of the layer at `x = 0`.
    pub mu0: f64,
    /// Decay rate of the layer at `x = 1`.
    pub mu1: f64,
    /// Diffusion parameter in (0, 1]; the parabolic layers have width
    /// `sqrt(eps1)`.
    pub eps1: f64,
}

impl MeshParams {
    pub fn new(
        n: usize,
        tau: f64,
        p: f64,
        delta: f64,
        mu0: f64,
        mu1: f64,
        eps1: f64,
    ) -> Result<Self> {
        if n < 8 || n % 4 != 0 {
            return Err(Error::InvalidParameter(format!(
                "N must be >= 8 and divisible by 4, got {n}"
            )));
        }
        if !(tau >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be >= 1, got {tau}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0, 1), got {p}"
            )));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if !(mu0 > 0.0 && mu1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mu0, mu1 must be positive, got {mu0}, {mu1}"
            )));
        }
        if !(eps1 > 0.0 && eps1 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps1 must lie in (0, 1], got {eps1}"
            )));
        }
        Ok(Self {
            n,
            tau,
            p,
            delta,
            mu0,
            mu1,
            eps1,
        })
    }

    /// Formula values of the x transition points (before any capping).
    pub fn sigma_x(&self) -> (f64, f64) {
        (
            self.tau / (self.p * self.mu0) * self.mu0.ln(),
            self.tau / (self.p * self.mu1) * self.mu1.ln(),
        )
    }

    /// Formula value of the y transition point (before any capping).
    pub fn sigma_y(&self) -> f64 {
        let s = self.eps1.sqrt();
        self.tau / self.delta * s * (1.0 / s).ln()
    }

    /// Whether `mu1^{-1} <= mu0^{-1} <= N^{-1}` holds.
    pub fn mu_ok(&self) -> bool {
        self.mu0 <= self.mu1 && self.mu0 >= self.n as f64
    }

    /// Whether all three transition-point formulas stay at or below 1/4.
    pub fn sigma_ok(&self) -> bool {
        let (s0, s1) = self.sigma_x();
        s0 <= 0.25 && s1 <= 0.25 && self.sigma_y() <= 0.25
    }
}

/// One graded side of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    XLeft,
    XRight,
    YBottom,
    YTop,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::XLeft => "x=0",
            Side::XRight => "x=1",
            Side::YBottom => "y=0",
            Side::YTop => "y=1",
        };
        write!(f, "{s}")
    }
}

/// Diagnostics recorded while building a mesh. None of these abort the
/// build; they flag parameter pairs outside the fully graded regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum MeshWarning {
    /// `mu0 < N`: the assumption `mu1^{-1} <= mu0^{-1} <= N^{-1}` fails.
    MuAssumption { mu0: f64, mu1: f64, n: usize },
    /// The transition-point formula exceeded 1/4 and was capped.
    TransitionCapped { side: Side, sigma: f64 },
    /// The layer rate is at (or within 1e-3 of) 1, so there is nothing to
    /// grade; the quarter is made uniform instead.
    WeakLayer { side: Side, rate: f64 },
}

impl fmt::Display for MeshWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshWarning::MuAssumption { mu0, mu1, n } => write!(
                f,
                "assumption mu1^-1 <= mu0^-1 <= N^-1 violated (mu0={mu0:.4e}, mu1={mu1:.4e}, N={n})"
            ),
            MeshWarning::TransitionCapped { side, sigma } => write!(
                f,
                "transition point at {side} capped at 1/4 (formula value {sigma:.4e})"
            ),
            MeshWarning::WeakLayer { side, rate } => write!(
                f,
                "layer at {side} too weak to grade (rate {rate:.4e} <= 1); quarter left uniform"
            ),
        }
    }
}

/// The tensor-product mesh: axis points, cell widths and build diagnostics.
#[derive(Debug, Clone)]
pub struct TensorMesh {
    /// Abscissae, `x[0] = 0`, `x[n_x] = 1`, strictly increasing.
    pub x: Vec<f64>,
    /// Ordinates, same layout.
    pub y: Vec<f64>,
    /// Cell widths `hx[i] = x[i+1] - x[i]`.
    pub hx: Vec<f64>,
    /// Cell widths `hy[j] = y[j+1] - y[j]`.
    pub hy: Vec<f64>,
    /// Warnings recorded during the build (empty for [`from_points`]).
    ///
    /// [`from_points`]: TensorMesh::from_points
    pub warnings: Vec<MeshWarning>,
}

impl TensorMesh {
    /// Number of cells in the x direction.
    pub fn n_x(&self) -> usize {
        self.x.len() - 1
    }

    /// Number of cells in the y direction.
    pub fn n_y(&self) -> usize {
        self.y.len() - 1
    }

    /// Wraps explicitly given axis points (must run from 0 to 1, strictly
    /// increasing). Useful for uniform or handcrafted meshes.
    pub fn from_points(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        for (axis, pts) in [("x", &x), ("y", &y)] {
            if pts.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "{axis} axis needs at least 2 points"
                )));
            }
            if pts[0] != 0.0 || *pts.last().unwrap() != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "{axis} axis must run from 0 to 1"
                )));
            }
            if pts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "{axis} axis points must be strictly increasing"
                )));
            }
        }
        let hx = widths(&x);
        let hy = widths(&y);
        Ok(Self {
            x,
            y,
            hx,
            hy,
            warnings: Vec::new(),
        })
    }

    /// Uniform `n x n` mesh on the unit square.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let pts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        Self::from_points(pts.clone(), pts)
    }

    /// Writes one axis as two-column plain text: `index coordinate`.
    pub fn write_axis_text(path: &Path, coords: &[f64]) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (i, c) in coords.iter().enumerate() {
            writeln!(f, "{i} {c:.17e}")?;
        }
        Ok(())
    }

    /// Writes `{"x": [...], "y": [...]}` for downstream tools.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct MeshJson<'a> {
            x: &'a [f64],
            y: &'a [f64],
        }
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(
            f,
            &MeshJson {
                x: &self.x,
                y: &self.y,
            },
        )
        .map_err(|e| Error::Config(format!("mesh json: {e}")))?;
        Ok(())
    }
}

fn widths(pts: &[f64]) -> Vec<f64> {
    pts.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Grading function `phi(t) = -ln(1 - 4 (1 - 1/rate) t)` used on the left
/// quarter; the right quarter uses `phi(1 - t)`.
fn phi(rate: f64, t: f64) -> f64 {
    -(1.0 - 4.0 * (1.0 - 1.0 / rate) * t).ln()
}

/// Effective transition point and point generator for one graded side.
struct SideSetup {
    /// Effective transition distance from the boundary (equals the formula
    /// value when that is in (0, 1/4], else 1/4).
    sigma: f64,
    /// Multiplier in front of `phi`; `None` means uniform fallback.
    scale: Option<f64>,
}

fn side_setup(coef: f64, rate: f64, side: Side, warnings: &mut Vec<MeshWarning>) -> SideSetup {
    // A rate at or barely above 1 means the "layer" spans the whole domain;
    // grading for it is meaningless and, for rate - 1 near roundoff, yields
    // cell widths that are equal up to noise. Fall back to uniform.
    if rate <= 1.0 + 1e-3 {
        warnings.push(MeshWarning::WeakLayer { side, rate });
        return SideSetup {
            sigma: 0.25,
            scale: None,
        };
    }
    let log_rate = rate.ln();
    let sigma_formula = coef / rate * log_rate;
    let sigma = if sigma_formula > 0.25 {
        warnings.push(MeshWarning::TransitionCapped {
            side,
            sigma: sigma_formula,
        });
        0.25
    } else {
        sigma_formula
    };
    SideSetup {
        sigma,
        scale: Some(sigma / log_rate),
    }
}

/// Builds one axis: graded on `[0, sigma0]` and `[1 - sigma1, 1]`, uniform
/// in between. `coef` is `tau/p` for the x axis and `tau/delta` for y;
/// `rate0`, `rate1` are the layer decay rates at the two ends.
fn graded_axis(
    n: usize,
    coef: f64,
    rate0: f64,
    rate1: f64,
    sides: (Side, Side),
    warnings: &mut Vec<MeshWarning>,
) -> Vec<f64> {
    let q = n / 4;
    let left = side_setup(coef, rate0, sides.0, warnings);
    let right = side_setup(coef, rate1, sides.1, warnings);

    let mut pts = vec![0.0; n + 1];
    // Junction values are assigned once so that pts[n/4] equals the
    // transition point bit-for-bit.
    pts[0] = 0.0;
    pts[q] = left.sigma;
    pts[3 * q] = 1.0 - right.sigma;
    pts[n] = 1.0;

    for i in 1..q {
        let t = i as f64 / n as f64;
        pts[i] = match left.scale {
            Some(s) => s * phi(rate0, t),
            None => t,
        };
    }
    let mid_width = 1.0 - left.sigma - right.sigma;
    for i in q + 1..3 * q {
        let t = i as f64 / n as f64;
        pts[i] = left.sigma + 2.0 * (t - 0.25) * mid_width;
    }
    for i in 3 * q + 1..n {
        let t = i as f64 / n as f64;
        pts[i] = match right.scale {
            Some(s) => 1.0 - s * phi(rate1, 1.0 - t),
            None => t,
        };
    }
    pts
}

/// Builds the Bakhvalov-type tensor mesh for the given parameters.
///
/// Fails only if the generated points are not strictly monotone, naming the
/// offending transition point. A violated `mu` assumption and capped or
/// degenerate transition points are recorded as warnings on the mesh.
pub fn build_mesh(params: &MeshParams) -> Result<TensorMesh> {
    let mut warnings = Vec::new();
    if !params.mu_ok() {
        warnings.push(MeshWarning::MuAssumption {
            mu0: params.mu0,
            mu1: params.mu1,
            n: params.n,
        });
    }

    let x = graded_axis(
        params.n,
        params.tau / params.p,
        params.mu0,
        params.mu1,
        (Side::XLeft, Side::XRight),
        &mut warnings,
    );
    // The parabolic layers at both y ends have the same rate 1/sqrt(eps1).
    let ry = 1.0 / params.eps1.sqrt();
    let y = graded_axis(
        params.n,
        params.tau / params.delta,
        ry,
        ry,
        (Side::YBottom, Side::YTop),
        &mut warnings,
    );

    for (axis, pts, sigma) in [("x", &x, x[params.n / 4]), ("y", &y, y[params.n / 4])] {
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotoneMesh { axis, sigma });
        }
    }

    let hx = widths(&x);
    let hy = widths(&y);
    Ok(TensorMesh {
        x,
        y,
        hx,
        hy,
        warnings,
    })
}

/// Ratio statistics and exact checks for the mesh-width bounds of the
/// graded axes. All quantities are pure diagnostics; the bounded-constant
/// assertions across sweeps live in the test suites.
#[derive(Debug, Clone, Serialize)]
pub struct AxisLemmaReport {
    /// `N^{-1} <= h <= 2 N^{-1}` on the uniform cells `N/4 .. 3N/4 - 1`,
    /// checked with exact comparisons.
    pub uniform_bounds_ok: bool,
    /// `h_0 <= h_1 <= ... <= h_{N/4-2}`.
    pub left_monotone: bool,
    /// `h_{3N/4+1} >= ... >= h_{N-1}`.
    pub right_monotone: bool,
    /// For `m = 0..=floor(tau)`: `max_i h_i^m e^{-rate * dist_i} * rate^m * N^m`
    /// over the left graded cells `0..=N/4-2`, where `dist_i` is the distance
    /// of the cell's near edge from the boundary.
    pub decay_ratios_left: Vec<f64>,
    /// Mirror statistic over the right graded cells `3N/4+1..=N-1`, using
    /// the far edge `x_{i+1}`.
    pub decay_ratios_right: Vec<f64>,
    /// `h_{3N/4} * rate^{1/2} * N^{1/2}` (transition-cell bound at eta = 1/2).
    pub transition_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub x: AxisLemmaReport,
    pub y: AxisLemmaReport,
}

fn axis_report(pts: &[f64], h: &[f64], tau: f64, rate0: f64, rate1: f64) -> AxisLemmaReport {
    let n = h.len();
    let q = n / 4;
    let nf = n as f64;

    let uniform_bounds_ok = (q..3 * q).all(|i| 1.0 / nf <= h[i] && h[i] <= 2.0 / nf);
    let left_monotone = (0..q.saturating_sub(2)).all(|i| h[i] <= h[i + 1]);
    let right_monotone = (3 * q + 1..n - 1).all(|i| h[i] >= h[i + 1]);

    let m_max = tau.floor() as usize;
    let mut decay_ratios_left = Vec::with_capacity(m_max + 1);
    let mut decay_ratios_right = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mi = m as i32;
        let mut worst = 0.0f64;
        for i in 0..=q.saturating_sub(2) {
            let v = h[i].powi(mi) * (-rate0 * pts[i]).exp() * rate0.powi(mi) * nf.powi(mi);
            worst = worst.max(v);
        }
        decay_ratios_left.push(worst);
        let mut worst = 0.0f64;
        for i in 3 * q + 1..n {
            let v =
                h[i].powi(mi) * (-rate1 * (1.0 - pts[i + 1])).exp() * rate1.powi(mi) * nf.powi(mi);
            worst = worst.max(v);
        }
        decay_ratios_right.push(worst);
    }

    let transition_ratio = h[3 * q] * rate1.sqrt() * nf.sqrt();

    AxisLemmaReport {
        uniform_bounds_ok,
        left_monotone,
        right_monotone,
        decay_ratios_left,
        decay_ratios_right,
        transition_ratio,
    }
}

/// Evaluates the mesh-width diagnostics for a mesh built from `params`.
///
/// The x axis uses the layer rates `p*mu0`, `p*mu1`; the y axis uses
/// `delta/sqrt(eps1)` at both ends.
pub fn verify_mesh_lemmas(mesh: &TensorMesh, params: &MeshParams) -> LemmaReport {
    let ry = params.delta / params.eps1.sqrt();
    LemmaReport {
        x: axis_report(
            &mesh.x,
            &mesh.hx,
            params.tau,
            params.p * params.mu0,
            params.p * params.mu1,
        ),
        y: axis_report(&mesh.y, &mesh.hy, params.tau, ry, ry),
    }
}
