//! Element-wise assembly of the bilinear form
//! `a(u, v) = eps1 (grad u, grad v) + (eps2 b u_x + c u, v)` and the load
//! vector, with homogeneous Dirichlet rows and columns eliminated before
//! the solve.
//!
//! Assembly is deterministic: elements are visited in a fixed order, local
//! contributions are collected into a coordinate list and compressed with a
//! stable sort, so reruns produce bit-identical matrices.

use crate::error::{Error, Result};
use crate::femspace::{lagrange_derivs, lagrange_values, FemSpace};
use crate::problem::ProblemSpec;
use crate::quadrature::QuadratureRule;
use std::io::Write;
use std::path::Path;

/// Compressed sparse rows with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from unsorted triplets, summing duplicates. Triplets are
    /// sorted stably by (row, col), so the accumulation order is the
    /// insertion order and the result is reproducible bit-for-bit.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &mut Vec<(u32, u32, f64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for &(r, c, v) in triplets.iter() {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c as usize);
                values.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[i] = acc;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// Relative residual `||A x - b|| / ||b||` (or the absolute residual
    /// norm when `b = 0`).
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.n_rows];
        self.matvec(x, &mut ax);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n_rows {
            num += (ax[i] - b[i]) * (ax[i] - b[i]);
            den += b[i] * b[i];
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }

    /// Writes coordinate text format: one `row col value` line per entry.
    pub fn write_coo_text(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for i in 0..self.n_rows {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(f, "{} {} {:.17e}", i, self.col_idx[idx], self.values[idx])?;
            }
        }
        Ok(())
    }
}

/// The assembled linear system over interior dofs.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Interior index -> global dof.
    pub interior_to_global: Vec<usize>,
    /// Global dof -> interior index.
    pub global_to_interior: Vec<Option<usize>>,
    /// Total dof count of the space (interior + boundary).
    pub n_global: usize,
}

impl SparseSystem {
    pub fn n_interior(&self) -> usize {
        self.matrix.n_rows
    }

    /// Expands an interior vector to global dofs with zeros on the boundary.
    pub fn expand(&self, interior: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_global];
        for (i, &g) in self.interior_to_global.iter().enumerate() {
            full[g] = interior[i];
        }
        full
    }

    /// Restricts a global vector to the interior dofs.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior_to_global.iter().map(|&g| full[g]).collect()
    }
}

/// Assembles the Galerkin system for `problem` on `space`.
///
/// `quad` is applied per direction on every cell; its order must be at
/// least `k + 1`.
pub fn assemble(
    space: &FemSpace,
    problem: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<SparseSystem> {
    let k = space.degree();
    if quad.order() < k + 1 {
        return Err(Error::QuadratureTooLow {
            order: quad.order(),
            degree: k,
            needed: k + 1,
        });
    }

    let mesh = space.mesh();
    let (nx, ny) = (mesh.n_x(), mesh.n_y());
    let nloc = (k + 1) * (k + 1);
    let q = quad.order();

    // Interior dof numbering.
    let n_global = space.dof_count();
    let mut global_to_interior = vec![None; n_global];
    let mut interior_to_global = Vec::with_capacity(space.interior_dof_count());
    for gy in 0..space.n_nodes_y() {
        for gx in 0..space.n_nodes_x() {
            if !space.is_boundary(gx, gy) {
                let g = space.dof_index(gx, gy);
                global_to_interior[g] = Some(interior_to_global.len());
                interior_to_global.push(g);
            }
        }
    }
    let n_int = interior_to_global.len();

    // 1D basis tables at the quadrature points (element independent).
    let mut basis_val = vec![0.0; q * (k + 1)];
    let mut basis_der = vec![0.0; q * (k + 1)];
    for (a, &xi) in quad.points().iter().enumerate() {
        lagrange_values(k, xi, &mut basis_val[a * (k + 1)..(a + 1) * (k + 1)]);
        lagrange_derivs(k, xi, &mut basis_der[a * (k + 1)..(a + 1) * (k + 1)]);
    }

    let eps1 = problem.eps1;
    let eps2 = problem.eps2;
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
    let mut rhs = vec![0.0; n_int];
    let mut local = vec![0.0; nloc * nloc];
    let mut local_rhs = vec![0.0; nloc];
    // Per-point scratch: value, d/dx, d/dy of every local basis function.
    let mut theta = vec![0.0; nloc];
    let mut theta_x = vec![0.0; nloc];
    let mut theta_y = vec![0.0; nloc];

    for j in 0..ny {
        let y0 = mesh.y[j];
        let hy = mesh.hy[j];
        for i in 0..nx {
            let x0 = mesh.x[i];
            let hx = mesh.hx[i];
            let jac = hx * hy;
            local.fill(0.0);
            local_rhs.fill(0.0);

            for b in 0..q {
                let yq = y0 + quad.points()[b] * hy;
                let wy = quad.weights()[b];
                for a in 0..q {
                    let xq = x0 + quad.points()[a] * hx;
                    let w = quad.weights()[a] * wy * jac;
                    let bv = (problem.b)(xq);
                    let cv = (problem.c)(xq);
                    let fv = (problem.f)(xq, yq);

                    for t in 0..=k {
                        let ly = basis_val[b * (k + 1) + t];
                        let dly = basis_der[b * (k + 1) + t] / hy;
                        for s in 0..=k {
                            let m = t * (k + 1) + s;
                            let lx = basis_val[a * (k + 1) + s];
                            let dlx = basis_der[a * (k + 1) + s] / hx;
                            theta[m] = lx * ly;
                            theta_x[m] = dlx * ly;
                            theta_y[m] = lx * dly;
                        }
                    }

                    for m in 0..nloc {
                        local_rhs[m] += w * fv * theta[m];
                        let row = &mut local[m * nloc..(m + 1) * nloc];
                        for n in 0..nloc {
                            row[n] += w
                                * (eps1 * (theta_x[n] * theta_x[m] + theta_y[n] * theta_y[m])
                                    + (eps2 * bv * theta_x[n] + cv * theta[n]) * theta[m]);
                        }
                    }
                }
            }

            // Scatter, dropping boundary rows and columns (homogeneous
            // Dirichlet data contributes nothing to the right-hand side).
            for t in 0..=k {
                let gy = j * k + t;
                for s in 0..=k {
                    let gx = i * k + s;
                    let m = t * (k + 1) + s;
                    let Some(row) = global_to_interior[space.dof_index(gx, gy)] else {
                        continue;
                    };
                    rhs[row] += local_rhs[m];
                    for tt in 0..=k {
                        let gyn = j * k + tt;
                        for ss in 0..=k {
                            let gxn = i * k + ss;
                            let n = tt * (k + 1) + ss;
                            if let Some(col) = global_to_interior[space.dof_index(gxn, gyn)] {
                                triplets.push((row as u32, col as u32, local[m * nloc + n]));
                            }
                        }
                    }
                }
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(n_int, n_int, &mut triplets);
    Ok(SparseSystem {
        matrix,
        rhs,
        interior_to_global,
        global_to_interior,
        n_global,
    })
}
