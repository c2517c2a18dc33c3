//! Tensor-product Q_k nodal finite element space on a tensor mesh.
//!
//! Each cell `[x_i, x_{i+1}] x [y_j, y_{j+1}]` carries the `(k+1)^2`
//! Lagrange nodes `(x_i + (s/k) hx_i, y_j + (t/k) hy_j)`; shared edges share
//! nodes, giving `(k N_x + 1)(k N_y + 1)` global degrees of freedom.
//!
//! Dof ordering is lexicographic with x fastest:
//! `dof(gx, gy) = gy * (k N_x + 1) + gx`, which keeps the assembled matrix
//! banded with semi-bandwidth `k^2 N_x + k`. Points on a mesh line belong
//! to the cell on the right/above (values agree by continuity; derivatives
//! use the owner).

use crate::error::{Error, Result};
use crate::mesh::TensorMesh;
use crate::problem::LayerKind;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// The discrete space: mesh, degree and global node coordinates.
#[derive(Debug)]
pub struct FemSpace {
    mesh: TensorMesh,
    degree: usize,
    nodes_x: Vec<f64>,
    nodes_y: Vec<f64>,
}

impl FemSpace {
    pub fn new(mesh: TensorMesh, degree: usize) -> Result<Arc<Self>> {
        if degree < 1 || degree > 10 {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree must lie in 1..=10, got {degree}"
            )));
        }
        let nodes_x = axis_nodes(&mesh.x, degree);
        let nodes_y = axis_nodes(&mesh.y, degree);
        Ok(Arc::new(Self {
            mesh,
            degree,
            nodes_x,
            nodes_y,
        }))
    }

    pub fn mesh(&self) -> &TensorMesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Global node abscissae (length `k * N_x + 1`).
    pub fn nodes_x(&self) -> &[f64] {
        &self.nodes_x
    }

    pub fn nodes_y(&self) -> &[f64] {
        &self.nodes_y
    }

    pub fn n_nodes_x(&self) -> usize {
        self.nodes_x.len()
    }

    pub fn n_nodes_y(&self) -> usize {
        self.nodes_y.len()
    }

    pub fn dof_count(&self) -> usize {
        self.nodes_x.len() * self.nodes_y.len()
    }

    pub fn interior_dof_count(&self) -> usize {
        (self.nodes_x.len() - 2) * (self.nodes_y.len() - 2)
    }

    #[inline]
    pub fn dof_index(&self, gx: usize, gy: usize) -> usize {
        gy * self.nodes_x.len() + gx
    }

    #[inline]
    pub fn is_boundary(&self, gx: usize, gy: usize) -> bool {
        gx == 0 || gy == 0 || gx == self.nodes_x.len() - 1 || gy == self.nodes_y.len() - 1
    }

    /// Nodal interpolant of `v`.
    pub fn interpolate(self: &Arc<Self>, v: impl Fn(f64, f64) -> f64) -> GridFunction {
        let mut coeffs = vec![0.0; self.dof_count()];
        for (gy, &yn) in self.nodes_y.iter().enumerate() {
            for (gx, &xn) in self.nodes_x.iter().enumerate() {
                coeffs[self.dof_index(gx, gy)] = v(xn, yn);
            }
        }
        GridFunction {
            space: Arc::clone(self),
            coeffs,
        }
    }

    /// Grid function that is zero everywhere.
    pub fn zero(self: &Arc<Self>) -> GridFunction {
        GridFunction {
            space: Arc::clone(self),
            coeffs: vec![0.0; self.dof_count()],
        }
    }

    /// Wraps a full coefficient vector.
    pub fn grid_function(self: &Arc<Self>, coeffs: Vec<f64>) -> Result<GridFunction> {
        if coeffs.len() != self.dof_count() {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                self.dof_count()
            )));
        }
        Ok(GridFunction {
            space: Arc::clone(self),
            coeffs,
        })
    }

    /// Index of the first node column strictly right of the transition
    /// point `x_{3N/4}`, i.e. `gx = (3N/4) k + 1`.
    fn correction_column_start(&self) -> Result<usize> {
        let n = self.mesh.n_x();
        if n % 4 != 0 {
            return Err(Error::InvalidParameter(format!(
                "column operators need N divisible by 4, got {n}"
            )));
        }
        Ok(3 * n / 4 * self.degree + 1)
    }

    /// Nodal projection onto the transition column: the returned function
    /// carries the values of `v` at the nodes with x index
    /// `gx = (3N/4) k + s`, `s = 1..=k` (all rows, boundary included) and
    /// zero everywhere else.
    pub fn project_column(self: &Arc<Self>, v: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        let start = self.correction_column_start()?;
        let mut gf = self.zero();
        for s in 0..self.degree {
            let gx = start + s;
            let xn = self.nodes_x[gx];
            for (gy, &yn) in self.nodes_y.iter().enumerate() {
                gf.coeffs[self.dof_index(gx, gy)] = v(xn, yn);
            }
        }
        Ok(gf)
    }

    /// Boundary-row part of [`project_column`]: only the nodes on the two
    /// rows `y = 0` and `y = 1` (2k dofs).
    ///
    /// [`project_column`]: FemSpace::project_column
    pub fn corner_correction(
        self: &Arc<Self>,
        v: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        let start = self.correction_column_start()?;
        let mut gf = self.zero();
        let last_row = self.nodes_y.len() - 1;
        for s in 0..self.degree {
            let gx = start + s;
            let xn = self.nodes_x[gx];
            for gy in [0, last_row] {
                gf.coeffs[self.dof_index(gx, gy)] = v(xn, self.nodes_y[gy]);
            }
        }
        Ok(gf)
    }

    /// Corrected interpolant: interpolates every component, replacing plain
    /// interpolation by `I - P + Theta` for the kinds that decay away from
    /// `x = 1` (`E11`, `E32`, `E33`), and sums the results.
    pub fn corrected_interpolant(
        self: &Arc<Self>,
        components: &[(LayerKind, impl Fn(f64, f64) -> f64)],
    ) -> Result<GridFunction> {
        let mut total = self.zero();
        for (kind, f) in components {
            let interp = self.interpolate(f);
            total.add_assign(&interp);
            if kind.is_corrected() {
                let p = self.project_column(f)?;
                let theta = self.corner_correction(f)?;
                total.sub_assign(&p);
                total.add_assign(&theta);
            }
        }
        Ok(total)
    }
}

/// Global node coordinates of one axis: `x_i + (s/k) h_i` for each cell.
fn axis_nodes(pts: &[f64], k: usize) -> Vec<f64> {
    let n = pts.len() - 1;
    let mut nodes = Vec::with_capacity(k * n + 1);
    for i in 0..n {
        let h = pts[i + 1] - pts[i];
        for s in 0..k {
            nodes.push(pts[i] + (s as f64 / k as f64) * h);
        }
    }
    nodes.push(pts[n]);
    nodes
}

/// 1D Lagrange basis on the uniform reference nodes `0, 1/k, ..., 1`.
/// Returns the values of all `k + 1` functions at `xi` into `out`.
pub(crate) fn lagrange_values(k: usize, xi: f64, out: &mut [f64]) {
    // Exact delta property at the reference nodes themselves.
    for s in 0..=k {
        if xi == s as f64 / k as f64 {
            out[..=k].fill(0.0);
            out[s] = 1.0;
            return;
        }
    }
    for s in 0..=k {
        let xs = s as f64 / k as f64;
        let mut v = 1.0;
        for r in 0..=k {
            if r != s {
                let xr = r as f64 / k as f64;
                v *= (xi - xr) / (xs - xr);
            }
        }
        out[s] = v;
    }
}

/// Derivatives of the 1D Lagrange basis at `xi` (with respect to `xi`).
pub(crate) fn lagrange_derivs(k: usize, xi: f64, out: &mut [f64]) {
    for s in 0..=k {
        let xs = s as f64 / k as f64;
        let mut sum = 0.0;
        for m in 0..=k {
            if m == s {
                continue;
            }
            let xm = m as f64 / k as f64;
            let mut prod = 1.0 / (xs - xm);
            for r in 0..=k {
                if r != s && r != m {
                    let xr = r as f64 / k as f64;
                    prod *= (xi - xr) / (xs - xr);
                }
            }
            sum += prod;
        }
        out[s] = sum;
    }
}

/// Cell owning `x` under the half-open convention: cell `i` owns
/// `[x_i, x_{i+1})`, the last cell also owns `1`.
pub(crate) fn find_cell(pts: &[f64], x: f64) -> usize {
    let n = pts.len() - 1;
    match pts.partition_point(|&v| v <= x) {
        0 => 0,
        idx => (idx - 1).min(n - 1),
    }
}

/// A function in the discrete space, stored as nodal values.
#[derive(Debug, Clone)]
pub struct GridFunction {
    space: Arc<FemSpace>,
    coeffs: Vec<f64>,
}

impl GridFunction {
    pub fn space(&self) -> &Arc<FemSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn add_assign(&mut self, other: &GridFunction) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &GridFunction) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
    }

    /// Value and first partials at `(x, y)`.
    ///
    /// At a stored node this returns the nodal coefficient exactly; the
    /// local coordinate is snapped when `x` (resp. `y`) coincides bitwise
    /// with a node coordinate of the owning cell.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::OutOfDomain { x, y });
        }
        let sp = &self.space;
        let k = sp.degree;
        let i = find_cell(&sp.mesh.x, x);
        let j = find_cell(&sp.mesh.y, y);
        let hx = sp.mesh.hx[i];
        let hy = sp.mesh.hy[j];
        let xi = local_coordinate(&sp.nodes_x, k, i, sp.mesh.x[i], hx, x);
        let eta = local_coordinate(&sp.nodes_y, k, j, sp.mesh.y[j], hy, y);

        let mut lx = [0.0; 11];
        let mut ly = [0.0; 11];
        let mut dlx = [0.0; 11];
        let mut dly = [0.0; 11];
        lagrange_values(k, xi, &mut lx);
        lagrange_values(k, eta, &mut ly);
        lagrange_derivs(k, xi, &mut dlx);
        lagrange_derivs(k, eta, &mut dly);

        let mut v = 0.0;
        let mut dx = 0.0;
        let mut dy = 0.0;
        for t in 0..=k {
            let gy = j * k + t;
            for s in 0..=k {
                let gx = i * k + s;
                let c = self.coeffs[sp.dof_index(gx, gy)];
                v += c * lx[s] * ly[t];
                dx += c * dlx[s] * ly[t];
                dy += c * lx[s] * dly[t];
            }
        }
        Ok((v, dx / hx, dy / hy))
    }

    /// Maximum absolute nodal value on the domain boundary.
    pub fn boundary_max(&self) -> f64 {
        let sp = &self.space;
        let (nx, ny) = (sp.nodes_x.len(), sp.nodes_y.len());
        let mut worst = 0.0f64;
        for gx in 0..nx {
            worst = worst.max(self.coeffs[sp.dof_index(gx, 0)].abs());
            worst = worst.max(self.coeffs[sp.dof_index(gx, ny - 1)].abs());
        }
        for gy in 0..ny {
            worst = worst.max(self.coeffs[sp.dof_index(0, gy)].abs());
            worst = worst.max(self.coeffs[sp.dof_index(nx - 1, gy)].abs());
        }
        worst
    }

    /// Writes nodal values as CSV (`dof,value`), one row per dof in storage
    /// order.
    pub fn write_nodal_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "dof,value")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "{i},{c:.17e}")?;
        }
        Ok(())
    }

    /// Writes the JSON header describing the dump layout.
    pub fn write_header_json(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Header {
            n_x: usize,
            n_y: usize,
            k: usize,
            ordering: &'static str,
        }
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(
            f,
            &Header {
                n_x: self.space.mesh.n_x(),
                n_y: self.space.mesh.n_y(),
                k: self.space.degree,
                ordering: "lexicographic-x-fastest",
            },
        )
        .map_err(|e| Error::Config(format!("grid function header: {e}")))?;
        Ok(())
    }
}

/// Reference coordinate of `x` in cell `i`, snapped to `s/k` when `x` is
/// bitwise equal to the cell's node `i*k + s`.
#[inline]
fn local_coordinate(nodes: &[f64], k: usize, i: usize, x_left: f64, h: f64, x: f64) -> f64 {
    for s in 0..=k {
        if nodes[i * k + s] == x {
            return s as f64 / k as f64;
        }
    }
    (x - x_left) / h
}
