//! Reference computations written directly over `u64` residues, sharing no
//! code with the library.

#![allow(dead_code)]

use std::sync::Arc;

use certilin::blackbox::{random_sparse, BlackBox, SparseMatrix};
use certilin::{Fe, FieldParams, Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const P: u64 = 1_000_003;

#[derive(Clone, Copy)]
pub struct Zp(pub u64);

impl Zp {
    pub fn add(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.0 as u128) as u64
    }
    pub fn sub(self, a: u64, b: u64) -> u64 {
        self.add(a, self.0 - b % self.0)
    }
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }
    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }
    pub fn inv(self, a: u64) -> u64 {
        assert!(a % self.0 != 0, "inverse of zero");
        self.pow(a, self.0 - 2)
    }
}

pub type Mat = Vec<Vec<u64>>;

pub fn dense(a: &SparseMatrix) -> Mat {
    let n = a.dim();
    let mut m = vec![vec![0; n]; n];
    for &(r, c, x) in a.entries() {
        m[r][c] = x.value();
    }
    m
}

/// Row echelon form in place; returns pivot columns and the determinant
/// factor accumulated from swaps and pivots.
fn eliminate(z: Zp, m: &mut Mat, cols: usize) -> (Vec<usize>, u64) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut det = 1;
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows).find(|&k| m[k][c] != 0) else {
            det = 0;
            continue;
        };
        if k != r {
            m.swap(k, r);
            det = z.sub(0, det);
        }
        det = z.mul(det, m[r][c]);
        let inv = z.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = z.mul(*x, inv);
        }
        for k in 0..rows {
            if k != r && m[k][c] != 0 {
                let f = m[k][c];
                for j in 0..cols {
                    let t = z.mul(f, m[r][j]);
                    m[k][j] = z.sub(m[k][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (pivots, det)
}

pub fn det(z: Zp, m: &Mat) -> u64 {
    let mut m = m.clone();
    let n = m.len();
    eliminate(z, &mut m, n).1
}

/// Leibniz expansion, for n ≤ 8.
pub fn det_leibniz(z: Zp, m: &Mat) -> u64 {
    fn go(z: Zp, m: &Mat, row: usize, used: &mut Vec<bool>, sign: bool, acc: u64, out: &mut u64) {
        let n = m.len();
        if row == n {
            *out = if sign { z.sub(*out, acc) } else { z.add(*out, acc) };
            return;
        }
        for c in 0..n {
            if used[c] || m[row][c] == 0 {
                continue;
            }
            let inversions = (c + 1..n).filter(|&j| used[j]).count();
            used[c] = true;
            go(z, m, row + 1, used, sign ^ (inversions % 2 == 1), z.mul(acc, m[row][c]), out);
            used[c] = false;
        }
    }
    let mut out = 0;
    go(z, m, 0, &mut vec![false; m.len()], false, 1, &mut out);
    out
}

/// Null space basis of the `rows × cols` matrix.
pub fn null_space(z: Zp, m: &Mat, cols: usize) -> Vec<Vec<u64>> {
    let mut m = m.clone();
    let (pivots, _) = eliminate(z, &mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0; cols];
            x[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = z.sub(0, m[r][f]);
            }
            x
        })
        .collect()
}

/// det(xI - A) at n+1 points, then Lagrange interpolation. Low-to-high.
pub fn charpoly(z: Zp, a: &Mat) -> Vec<u64> {
    let n = a.len();
    let xs: Vec<u64> = (0..=n as u64).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&x| {
            let mut m = a.iter().map(|r| r.iter().map(|&v| z.sub(0, v)).collect()).collect::<Mat>();
            for i in 0..n {
                m[i][i] = z.add(m[i][i], x);
            }
            det(z, &m)
        })
        .collect();
    let mut out = vec![0; n + 1];
    for (i, &xi) in xs.iter().enumerate() {
        let mut basis = vec![1u64];
        let mut denom = 1;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = z.add(next[k + 1], b);
                next[k] = z.sub(next[k], z.mul(b, xj));
            }
            basis = next;
            denom = z.mul(denom, z.sub(xi, xj));
        }
        let scale = z.mul(ys[i], z.inv(denom));
        for (k, b) in basis.iter().enumerate() {
            out[k] = z.add(out[k], z.mul(*b, scale));
        }
    }
    out
}

pub fn matmul(z: Zp, a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(0, |s, k| z.add(s, z.mul(a[i][k], b[k][j])))).collect())
        .collect()
}

/// First linear dependency among I, A, A², … as flattened vectors.
pub fn minpoly(z: Zp, a: &Mat) -> Vec<u64> {
    let n = a.len();
    let identity: Mat = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    let mut powers = vec![identity];
    loop {
        let k = powers.len();
        let cols: Mat = (0..n * n).map(|e| powers.iter().map(|p| p[e / n][e % n]).collect()).collect();
        let ns = null_space(z, &cols, k);
        if let Some(x) = ns.first() {
            let lead = z.inv(x[k - 1]);
            return x.iter().map(|&c| z.mul(c, lead)).collect();
        }
        let next = matmul(z, powers.last().unwrap(), a);
        powers.push(next);
    }
}

/// Minimal generator of a finite sequence: smallest `d` for which the
/// Hankel system `s[i+d] = -Σ c_j s[i+j]` over all available `i` is solvable.
pub fn hankel_generator(z: Zp, seq: &[u64]) -> Vec<u64> {
    for d in 0..=seq.len() {
        let rows = seq.len() - d;
        // Unknowns c_0..c_{d-1} and the constant column.
        let m: Mat = (0..rows).map(|i| (0..=d).map(|j| seq[i + j]).collect()).collect();
        for x in null_space(z, &m, d + 1) {
            if x[d] != 0 {
                let lead = z.inv(x[d]);
                return x.iter().map(|&c| z.mul(c, lead)).collect();
            }
        }
    }
    unreachable!("x^len always generates")
}

pub fn krylov_sequence(z: Zp, a: &Mat, u: &[u64], v: &[u64], len: usize) -> Vec<u64> {
    let n = a.len();
    let mut x = v.to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((0..n).fold(0, |s, i| z.add(s, z.mul(u[i], x[i]))));
        x = (0..n).map(|i| (0..n).fold(0, |s, k| z.add(s, z.mul(a[i][k], x[k])))).collect();
    }
    out
}

pub fn values(p: &Poly) -> Vec<u64> {
    p.coeffs().iter().map(|c| c.value()).collect()
}

pub fn fes(v: &[Fe]) -> Vec<u64> {
    v.iter().map(|c| c.value()).collect()
}

pub fn params() -> FieldParams {
    FieldParams::new(P).unwrap()
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Random sparse test matrix with about `3n` nonzeros. The stream is kept
/// apart from the ones that `rng(seed)` feeds to provers and challengers.
pub fn random_matrix(params: FieldParams, n: usize, seed: u64) -> SparseMatrix {
    let density = (3.0 / n as f64).min(1.0);
    random_sparse(params, n, density, &mut rng(seed ^ 0x6d61_7472_6978_0000)).unwrap()
}

pub fn nonsingular_matrix(params: FieldParams, n: usize, seed: u64) -> SparseMatrix {
    let z = Zp(params.modulus());
    (0..)
        .map(|k| random_matrix(params, n, seed.wrapping_mul(1_000).wrapping_add(k)))
        .find(|m| det(z, &dense(m)) != 0)
        .unwrap()
}

pub fn boxed(m: SparseMatrix) -> Arc<BlackBox> {
    Arc::new(BlackBox::Sparse(m))
}

/// Standard deviation of an empirical frequency around `q`.
pub fn sigma(q: f64, trials: usize) -> f64 {
    (q * (1.0 - q) / trials as f64).sqrt()
}

/// A random sparse matrix with a random non-zero diagonal added, redrawn
/// until the elimination oracle reports it invertible.
pub fn invertible_matrix(params: FieldParams, n: usize, seed: u64) -> SparseMatrix {
    use rand::Rng;
    let z = Zp(params.modulus());
    (0..)
        .map(|k| {
            let s = seed.wrapping_mul(7_919).wrapping_add(k);
            let base = random_matrix(params, n, s);
            let mut r = rng(s ^ 0x5eed);
            let diag: Vec<_> = (0..n).map(|i| (i, i, r.gen_range(1..params.modulus()) as i128)).collect();
            let triples = base.entries().iter().map(|&(i, j, x)| (i, j, x.value() as i128)).chain(diag);
            SparseMatrix::new(params, n, triples).unwrap()
        })
        .find(|m| det(z, &dense(m)) != 0)
        .unwrap()
}
