//! Black-box linear operators over Z_p.
//!
//! Every operator is only ever applied to vectors: compositions are applied
//! factor by factor and the structured preconditioners are stored by their
//! defining scalars.

mod dense;
mod sparse;

use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};

pub use dense::{oracle_cap, DenseMatrix, SolveOutcome, DEFAULT_ORACLE_CAP};
pub use sparse::{emit_sms, parse_sms, random_sparse, seeded_sparse, SparseMatrix};

/// `Γ(s, t)`: `t` on the diagonal, `-1` on the superdiagonal and `s` in the
/// bottom-left corner. For `n = 1` the single entry is `t + s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaMatrix {
    pub n: usize,
    pub s: Fe,
    pub t: Fe,
}

impl GammaMatrix {
    pub fn new(n: usize, s: Fe, t: Fe) -> Self {
        GammaMatrix { n, s, t }
    }

    /// `t^n + s` by square-and-multiply: at most `2⌈log2 n⌉ + 1` operations.
    pub fn det(&self, f: &Field) -> Fe {
        f.add(f.pow(self.t, self.n as u64), self.s)
    }

    fn apply(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        let n = self.n;
        let mut y = Vec::with_capacity(n);
        for i in 0..n - 1 {
            y.push(f.sub(f.mul(self.t, x[i]), x[i + 1]));
        }
        y.push(f.add(f.mul(self.s, x[0]), f.mul(self.t, x[n - 1])));
        y
    }
}

/// An `n × n` operator exposing only matrix-vector products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlackBox {
    Sparse(SparseMatrix),
    Diagonal(Vec<Fe>),
    Gamma(GammaMatrix),
    /// `left · right`.
    Product(Arc<BlackBox>, Arc<BlackBox>),
    /// `r·I - inner`.
    Shift(Fe, Arc<BlackBox>),
}

impl BlackBox {
    pub fn product(left: Arc<BlackBox>, right: Arc<BlackBox>) -> Result<BlackBox> {
        if left.dim() != right.dim() {
            return Err(Error::Usage(format!(
                "cannot compose {}x{} with {}x{}",
                left.dim(),
                left.dim(),
                right.dim(),
                right.dim()
            )));
        }
        Ok(BlackBox::Product(left, right))
    }

    pub fn shift(r: Fe, inner: Arc<BlackBox>) -> BlackBox {
        BlackBox::Shift(r, inner)
    }

    pub fn dim(&self) -> usize {
        match self {
            BlackBox::Sparse(m) => m.dim(),
            BlackBox::Diagonal(d) => d.len(),
            BlackBox::Gamma(g) => g.n,
            BlackBox::Product(l, _) => l.dim(),
            BlackBox::Shift(_, inner) => inner.dim(),
        }
    }

    /// `M·x`. Charges the field operations of every constituent and one
    /// black-box application.
    pub fn matvec(&self, f: &Field, x: &[Fe]) -> Result<Vec<Fe>> {
        if x.len() != self.dim() {
            return Err(Error::Usage(format!(
                "matvec dimension mismatch: operator is {}x{}, vector has length {}",
                self.dim(),
                self.dim(),
                x.len()
            )));
        }
        if let Some(m) = f.meter() {
            m.count_matvec();
        }
        Ok(self.apply(f, x))
    }

    fn apply(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        match self {
            BlackBox::Sparse(m) => m.apply(f, x),
            BlackBox::Diagonal(d) => d.iter().zip(x).map(|(&a, &b)| f.mul(a, b)).collect(),
            BlackBox::Gamma(g) => g.apply(f, x),
            BlackBox::Product(l, r) => {
                let y = r.apply(f, x);
                l.apply(f, &y)
            }
            BlackBox::Shift(r, inner) => {
                let y = inner.apply(f, x);
                x.iter().zip(y).map(|(&xi, yi)| f.sub(f.mul(*r, xi), yi)).collect()
            }
        }
    }

    /// Field operations charged by one [`BlackBox::matvec`]; for a sparse
    /// matrix this is `μ(A) = 2·nnz`.
    pub fn matvec_cost(&self) -> u64 {
        match self {
            BlackBox::Sparse(m) => 2 * m.nnz() as u64,
            BlackBox::Diagonal(d) => d.len() as u64,
            BlackBox::Gamma(g) => 2 * g.n as u64 + 1,
            BlackBox::Product(l, r) => l.matvec_cost() + r.matvec_cost(),
            BlackBox::Shift(_, inner) => inner.matvec_cost() + 2 * inner.dim() as u64,
        }
    }

    /// Materialises the operator column by column (unmetered). Subject to the
    /// dense oracle cap.
    pub fn to_dense(&self, params: FieldParams) -> Result<DenseMatrix> {
        let n = self.dim();
        let cap = oracle_cap();
        if n > cap {
            return Err(Error::OracleCap { n, cap });
        }
        let f = params.plain();
        let mut data = vec![Fe::ZERO; n * n];
        let mut e = vec![Fe::ZERO; n];
        for j in 0..n {
            e[j] = Fe::ONE;
            let col = self.apply(&f, &e);
            for (i, c) in col.into_iter().enumerate() {
                data[i * n + j] = c;
            }
            e[j] = Fe::ZERO;
        }
        DenseMatrix::from_rows(n, data)
    }

    /// Structural SHA-256 digest. A sparse matrix hashes its canonical SMS
    /// text, so the digest of a matrix file does not depend on entry order.
    pub fn digest(&self, params: FieldParams) -> [u8; 32] {
        let mut h = Sha256::new();
        match self {
            BlackBox::Sparse(m) => {
                return Sha256::digest(emit_sms(m, params).as_bytes()).into();
            }
            BlackBox::Diagonal(d) => {
                h.update(b"diag");
                h.update(params.modulus().to_le_bytes());
                h.update((d.len() as u64).to_le_bytes());
                for x in d {
                    h.update(x.to_le_bytes());
                }
            }
            BlackBox::Gamma(g) => {
                h.update(b"gamma");
                h.update(params.modulus().to_le_bytes());
                h.update((g.n as u64).to_le_bytes());
                h.update(g.s.to_le_bytes());
                h.update(g.t.to_le_bytes());
            }
            BlackBox::Product(l, r) => {
                h.update(b"product");
                h.update(l.digest(params));
                h.update(r.digest(params));
            }
            BlackBox::Shift(r, inner) => {
                h.update(b"shift");
                h.update(r.to_le_bytes());
                h.update(inner.digest(params));
            }
        }
        h.finalize().into()
    }
}

impl From<SparseMatrix> for BlackBox {
    fn from(m: SparseMatrix) -> Self {
        BlackBox::Sparse(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meter::CostMeter;

    fn p(x: u64) -> FieldParams {
        FieldParams::new(x).unwrap()
    }

    fn fe(params: FieldParams, xs: &[i64]) -> Vec<Fe> {
        xs.iter().map(|&x| params.reduce(x as i128)).collect()
    }

    #[test]
    fn identity_matvec() {
        let params = p(7);
        let id = BlackBox::from(SparseMatrix::identity(3));
        let x = fe(params, &[3, 5, 6]);
        assert_eq!(id.matvec(&params.plain(), &x).unwrap(), x);
    }

    #[test]
    fn gamma_matvec_example() {
        let params = p(7);
        let g = BlackBox::Gamma(GammaMatrix::new(2, params.from_u64(3), params.from_u64(2)));
        let y = g.matvec(&params.plain(), &fe(params, &[1, 1])).unwrap();
        assert_eq!(y, fe(params, &[1, 5]));
    }

    #[test]
    fn shift_by_zero_negates() {
        let params = p(101);
        let a = SparseMatrix::new(params, 2, vec![(0, 1, 4), (1, 0, 9), (1, 1, 2)]).unwrap();
        let a = Arc::new(BlackBox::from(a));
        let x = fe(params, &[5, 7]);
        let f = params.plain();
        let ax = a.matvec(&f, &x).unwrap();
        let neg: Vec<Fe> = ax.iter().map(|&y| f.neg(y)).collect();
        assert_eq!(BlackBox::shift(Fe::ZERO, a).matvec(&f, &x).unwrap(), neg);
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let params = p(7);
        let id = BlackBox::from(SparseMatrix::identity(3));
        assert!(matches!(id.matvec(&params.plain(), &[Fe::ONE]), Err(Error::Usage(_))));
        let d = Arc::new(BlackBox::Diagonal(vec![Fe::ONE; 2]));
        assert!(BlackBox::product(d, Arc::new(id)).is_err());
    }

    #[test]
    fn gamma_det_examples() {
        let params = p(7);
        let f = params.plain();
        let g = |n, s: i64, t: i64| GammaMatrix::new(n, params.reduce(s as i128), params.reduce(t as i128));
        assert_eq!(g(2, 5, 0).det(&f), params.from_u64(5));
        assert_eq!(g(3, 1, 2).det(&f), params.from_u64(2));
        assert_eq!(g(2, -1, 1).det(&f), Fe::ZERO);
    }

    #[test]
    fn meter_charges_per_variant() {
        let params = p(101);
        let a = SparseMatrix::new(params, 3, vec![(0, 0, 1), (0, 2, 3), (2, 1, 5)]).unwrap();
        let x = fe(params, &[1, 2, 3]);
        let boxes = [
            BlackBox::from(a.clone()),
            BlackBox::Diagonal(fe(params, &[1, 2, 3])),
            BlackBox::Gamma(GammaMatrix::new(3, Fe::ONE, Fe::ONE)),
            BlackBox::shift(Fe::ONE, Arc::new(BlackBox::from(a))),
        ];
        for bb in &boxes {
            let meter = CostMeter::new();
            bb.matvec(&params.metered(&meter), &x).unwrap();
            let r = meter.snapshot();
            assert_eq!(r.field_ops(), bb.matvec_cost(), "{bb:?}");
            assert_eq!(r.matvec, 1);
        }
        assert_eq!(boxes[0].matvec_cost(), 6);
        assert!(boxes[2].matvec_cost() <= 9);
    }

    #[test]
    fn digest_distinguishes_matrices() {
        let params = p(101);
        let a = BlackBox::from(SparseMatrix::identity(3));
        let b = BlackBox::from(SparseMatrix::new(params, 3, vec![(0, 0, 2)]).unwrap());
        assert_ne!(a.digest(params), b.digest(params));
        assert_eq!(a.digest(params), a.clone().digest(params));
        assert_ne!(a.digest(params), a.digest(p(103)));
    }
}
