//! Sparse CSR storage, triplet assembly and iterative solution of the
//! (generally nonsymmetric) finite-element systems.
//!
//! Everything here is deterministic: triplets are compressed with a stable
//! sort, matrix-vector products accumulate row-wise in index order, and the
//! Jacobi-preconditioned BiCGStab iteration has no randomized restarts.

use crate::error::SimError;
use crate::Result;

/// Accumulator for element contributions; duplicates are summed on
/// compression.
#[derive(Debug, Clone)]
pub struct TripletBuffer {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuffer {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        Self {
            dim,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Compresses into CSR, summing duplicate positions. Column indices come
    /// out sorted and unique within each row.
    pub fn compress(mut self) -> Result<SparseMatrix> {
        let n = self.dim;
        for &(r, c, _) in &self.entries {
            if r >= n || c >= n {
                return Err(SimError::IndexOutOfRange {
                    row: r,
                    col: c,
                    dim: n,
                });
            }
        }
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut it = self.entries.iter().peekable();
        for row in 0..n {
            while let Some(&&(r, c, v)) = it.peek() {
                if r != row {
                    break;
                }
                it.next();
                if col_idx.len() > row_ptr[row] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            dim: n,
            row_ptr,
            col_idx,
            values,
        })
    }
}

/// Square compressed-sparse-row matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entry accessor for tests and small-matrix inspection (O(row nnz)).
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Matrix-vector product. Panics on dimension mismatch.
    pub fn spmv(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "spmv dimension mismatch");
        let mut y = vec![0.0; self.dim];
        self.spmv_into(x, &mut y);
        y
    }

    fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        for row in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[row] = acc;
        }
    }

    /// Replaces each constrained row by an identity row and sets the
    /// right-hand side to the prescribed value. Column structure is kept.
    pub fn apply_dirichlet(&mut self, rhs: &mut [f64], constraints: &[(usize, f64)]) {
        for &(node, value) in constraints {
            for k in self.row_ptr[node]..self.row_ptr[node + 1] {
                self.values[k] = if self.col_idx[k] == node { 1.0 } else { 0.0 };
            }
            rhs[node] = value;
        }
    }

    /// Dense copy, for oracles and the direct fallback.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.dim]; self.dim];
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                a[row][self.col_idx[k]] = self.values[k];
            }
        }
        a
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    pub iterations: usize,
    /// Final relative 2-norm residual ||Ax-b||/||b||.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGStab for `A x = b`.
///
/// Returns the iterate and a report; a breakdown or hitting `max_iter`
/// yields `converged = false` and the caller escalates. `b = 0` returns the
/// zero vector immediately.
pub fn solve_bicgstab(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, SolveReport) {
    let n = a.dim();
    assert_eq!(b.len(), n, "rhs dimension mismatch");
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return (
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        );
    }

    let inv_diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.get(i, i);
            if d == 0.0 {
                1.0
            } else {
                1.0 / d
            }
        })
        .collect();
    let precond = |z: &mut Vec<f64>, r: &[f64]| {
        z.clear();
        z.extend(r.iter().zip(&inv_diag).map(|(x, d)| x * d));
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = Vec::with_capacity(n);
    let mut s_hat = Vec::with_capacity(n);
    let mut t = vec![0.0; n];

    let mut res = norm(&r) / b_norm;
    if res <= tol {
        return (
            x,
            SolveReport {
                iterations: 0,
                residual: res,
                converged: true,
            },
        );
    }

    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 {
            return (
                x,
                SolveReport {
                    iterations: it - 1,
                    residual: res,
                    converged: false,
                },
            );
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&mut p_hat, &p);
        a.spmv_into(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            return (
                x,
                SolveReport {
                    iterations: it - 1,
                    residual: res,
                    converged: false,
                },
            );
        }
        alpha = rho / denom;
        // s = r - alpha v, reusing r
        for i in 0..n {
            r[i] -= alpha * v[i];
        }
        let s_norm = norm(&r) / b_norm;
        if s_norm <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return (
                x,
                SolveReport {
                    iterations: it,
                    residual: s_norm,
                    converged: true,
                },
            );
        }
        precond(&mut s_hat, &r);
        a.spmv_into(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return (
                x,
                SolveReport {
                    iterations: it,
                    residual: s_norm,
                    converged: false,
                },
            );
        }
        omega = dot(&t, &r) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] -= omega * t[i];
        }
        res = norm(&r) / b_norm;
        if res <= tol {
            return (
                x,
                SolveReport {
                    iterations: it,
                    residual: res,
                    converged: true,
                },
            );
        }
        if omega == 0.0 {
            return (
                x,
                SolveReport {
                    iterations: it,
                    residual: res,
                    converged: false,
                },
            );
        }
    }
    (
        x,
        SolveReport {
            iterations: max_iter,
            residual: res,
            converged: false,
        },
    )
}

/// Direct elimination with partial pivoting, limited to small systems.
/// Serves as the independent oracle for the iterative path.
pub fn solve_dense(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > 200 {
        return Err(SimError::DimensionMismatch {
            what: format!("dense fallback limited to N <= 200, got {n}"),
        });
    }
    if b.len() != n {
        return Err(SimError::DimensionMismatch {
            what: format!("rhs length {} vs dimension {n}", b.len()),
        });
    }
    let mut m = a.to_dense();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot_row][col] == 0.0 {
            return Err(SimError::DimensionMismatch {
                what: format!("singular matrix at column {col}"),
            });
        }
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);
        let pivot = m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let upper = m[col][k];
                m[row][k] -= factor * upper;
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}
