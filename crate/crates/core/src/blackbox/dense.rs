//! Dense ground-truth oracles. Unmetered, cubic or quartic in `n`, and capped
//! at a configurable dimension (`CERTILIN_ORACLE_CAP`, default 64).

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::poly::{interpolate, Poly};

use super::SparseMatrix;

pub const DEFAULT_ORACLE_CAP: usize = 64;

/// Largest dimension the dense oracles accept.
pub fn oracle_cap() -> usize {
    std::env::var("CERTILIN_ORACLE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// Row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Fe>,
}

/// Result of [`DenseMatrix::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// `A x = b`; `kernel` is a non-zero null vector when `A` is singular.
    Solved { x: Vec<Fe>, kernel: Option<Vec<Fe>> },
    /// `y^T A = 0` and `y^T b != 0`.
    Inconsistent { witness: Vec<Fe> },
}

/// Reduced row echelon form with the pivot column of each non-zero row.
struct Echelon {
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

fn echelon(f: &Field, mut rows: Vec<Vec<Fe>>, ncols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let inv = f.inv(rows[r][c]).expect("pivot is non-zero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let m = rows[k][c];
                for j in 0..rows[k].len() {
                    let v = f.mul(m, rows[r][j]);
                    rows[k][j] = f.sub(rows[k][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    Echelon { rows, pivots }
}

/// Incremental basis of vectors, each remembered as a combination of the
/// vectors inserted so far. Used to find the first linear dependency in a
/// sequence of vectors.
struct DependencyTracker {
    basis: Vec<(usize, Vec<Fe>, Vec<Fe>)>,
}

impl DependencyTracker {
    /// Inserts the `k`-th vector of a sequence. Returns `Some(c)` with
    /// `Σ c_i x_i = 0`, `c_k = 1`, when `x_k` depends on earlier vectors.
    fn push(&mut self, f: &Field, k: usize, mut x: Vec<Fe>) -> Option<Vec<Fe>> {
        let mut combo = vec![Fe::ZERO; k + 1];
        combo[k] = Fe::ONE;
        for (pivot, row, rc) in &self.basis {
            let m = x[*pivot];
            if m.is_zero() {
                continue;
            }
            for (xj, &rj) in x.iter_mut().zip(row) {
                *xj = f.sub(*xj, f.mul(m, rj));
            }
            for (cj, &rj) in combo.iter_mut().zip(rc) {
                *cj = f.sub(*cj, f.mul(m, rj));
            }
        }
        match x.iter().position(|v| !v.is_zero()) {
            None => Some(combo),
            Some(pivot) => {
                let inv = f.inv(x[pivot]).expect("pivot is non-zero");
                for v in x.iter_mut() {
                    *v = f.mul(*v, inv);
                }
                for v in combo.iter_mut() {
                    *v = f.mul(*v, inv);
                }
                self.basis.push((pivot, x, combo));
                None
            }
        }
    }
}

impl DenseMatrix {
    pub fn from_rows(n: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Usage(format!("expected {} entries, got {}", n * n, data.len())));
        }
        let cap = oracle_cap();
        if n > cap {
            return Err(Error::OracleCap { n, cap });
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_sparse(m: &SparseMatrix) -> Result<Self> {
        let n = m.dim();
        let mut data = vec![Fe::ZERO; n * n];
        for &(r, c, v) in m.entries() {
            data[r * n + c] = v;
        }
        DenseMatrix::from_rows(n, data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.n + c]
    }

    fn rows(&self) -> Vec<Vec<Fe>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        (0..self.n).map(|r| f.dot(&self.data[r * self.n..(r + 1) * self.n], x)).collect()
    }

    pub fn mul(&self, f: &Field, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut data = vec![Fe::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] = f.add(data[i * n + j], f.mul(a, other.get(k, j)));
                }
            }
        }
        DenseMatrix { n, data }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let n = self.n;
        let mut data = vec![Fe::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        DenseMatrix { n, data }
    }

    /// Leading `(n-1) × (n-1)` principal submatrix.
    pub fn leading_minor(&self) -> DenseMatrix {
        let m = self.n.saturating_sub(1);
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(self.get(i, j));
            }
        }
        DenseMatrix { n: m, data }
    }

    /// `x·I - A`.
    pub fn shifted(&self, f: &Field, x: Fe) -> DenseMatrix {
        let n = self.n;
        let mut data: Vec<Fe> = self.data.iter().map(|&a| f.neg(a)).collect();
        for i in 0..n {
            data[i * n + i] = f.add(data[i * n + i], x);
        }
        DenseMatrix { n, data }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, params: FieldParams) -> Fe {
        let f = params.plain();
        let n = self.n;
        let mut a = self.rows();
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(k) = (c..n).find(|&k| !a[k][c].is_zero()) else {
                return Fe::ZERO;
            };
            if k != c {
                a.swap(k, c);
                det = f.neg(det);
            }
            det = f.mul(det, a[c][c]);
            let inv = f.inv(a[c][c]).expect("pivot is non-zero");
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let m = f.mul(a[r][c], inv);
                for j in c..n {
                    let v = f.mul(m, a[c][j]);
                    a[r][j] = f.sub(a[r][j], v);
                }
            }
        }
        det
    }

    pub fn rank(&self, params: FieldParams) -> usize {
        echelon(&params.plain(), self.rows(), self.n).pivots.len()
    }

    /// `det(λI - A)`, by evaluating at `n + 1` points and interpolating.
    pub fn charpoly(&self, params: FieldParams) -> Result<Poly> {
        let n = self.n;
        if params.modulus() <= n as u64 {
            return Err(Error::Usage("charpoly oracle needs p > n interpolation points".into()));
        }
        let f = params.plain();
        let xs: Vec<Fe> = (0..=n as u64).map(|i| params.from_u64(i)).collect();
        let ys: Vec<Fe> = xs.iter().map(|&x| self.shifted(&f, x).det(params)).collect();
        interpolate(&f, &xs, &ys)
    }

    /// Minimal polynomial: first linear dependency among `I, A, A², …`.
    pub fn minpoly(&self, params: FieldParams) -> Poly {
        let f = params.plain();
        let n = self.n;
        let mut tracker = DependencyTracker { basis: Vec::new() };
        let mut power = DenseMatrix {
            n,
            data: (0..n * n).map(|i| if i % (n + 1) == 0 { Fe::ONE } else { Fe::ZERO }).collect(),
        };
        for k in 0..=n {
            if let Some(c) = tracker.push(&f, k, power.data.clone()) {
                return Poly::from_coeffs(c);
            }
            power = power.mul(&f, self);
        }
        unreachable!("Cayley-Hamilton bounds the minimal polynomial degree by n")
    }

    /// Minimal polynomial of the Krylov sequence `v, Av, A²v, …`.
    pub fn krylov_minpoly(&self, params: FieldParams, v: &[Fe]) -> Poly {
        let f = params.plain();
        let mut tracker = DependencyTracker { basis: Vec::new() };
        let mut x = v.to_vec();
        for k in 0..=self.n {
            if let Some(c) = tracker.push(&f, k, x.clone()) {
                return Poly::from_coeffs(c);
            }
            x = self.mul_vec(&f, &x);
        }
        unreachable!("at most n independent Krylov vectors")
    }

    /// A non-zero null vector, or `None` when `A` is nonsingular. The free
    /// variable chosen is the first non-pivot column.
    pub fn kernel_vector(&self, params: FieldParams) -> Option<Vec<Fe>> {
        let f = params.plain();
        let n = self.n;
        let e = echelon(&f, self.rows(), n);
        let free = (0..n).find(|c| !e.pivots.contains(c))?;
        let mut w = vec![Fe::ZERO; n];
        w[free] = Fe::ONE;
        for (row, &pc) in e.rows.iter().zip(&e.pivots) {
            w[pc] = f.neg(row[free]);
        }
        Some(w)
    }

    /// Solves `A x = b`, or returns a certificate of inconsistency.
    pub fn solve(&self, params: FieldParams, b: &[Fe]) -> Result<SolveOutcome> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Usage("right-hand side has the wrong length".into()));
        }
        let f = params.plain();
        let aug: Vec<Vec<Fe>> = self
            .rows()
            .into_iter()
            .zip(b)
            .map(|(mut r, &bi)| {
                r.push(bi);
                r
            })
            .collect();
        let e = echelon(&f, aug, n + 1);
        if e.pivots.contains(&n) {
            let witness = self
                .transpose()
                .kernel_vector(params)
                .into_iter()
                .find(|y| !f.dot(y, b).is_zero())
                .or_else(|| self.left_witness(params, b))
                .ok_or_else(|| Error::Integrity("inconsistent system without a witness".into()))?;
            return Ok(SolveOutcome::Inconsistent { witness });
        }
        let mut x = vec![Fe::ZERO; n];
        for (row, &pc) in e.rows.iter().zip(&e.pivots) {
            x[pc] = row[n];
        }
        Ok(SolveOutcome::Solved {
            x,
            kernel: self.kernel_vector(params),
        })
    }

    /// Left null vector `y` with `y^T b != 0`, searched over a basis of the
    /// left kernel.
    fn left_witness(&self, params: FieldParams, b: &[Fe]) -> Option<Vec<Fe>> {
        let f = params.plain();
        let n = self.n;
        let at = self.transpose();
        let e = echelon(&f, at.rows(), n);
        (0..n).filter(|c| !e.pivots.contains(c)).find_map(|free| {
            let mut y = vec![Fe::ZERO; n];
            y[free] = Fe::ONE;
            for (row, &pc) in e.rows.iter().zip(&e.pivots) {
                y[pc] = f.neg(row[free]);
            }
            (!f.dot(&y, b).is_zero()).then_some(y)
        })
    }
}
