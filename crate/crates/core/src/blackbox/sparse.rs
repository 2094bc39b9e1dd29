use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};

/// Coordinate-format sparse matrix. Entries are sorted by `(row, col)`,
/// unique, and non-zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, Fe)>,
}

impl SparseMatrix {
    /// Builds an `n × n` matrix from 0-based triples. Values are reduced
    /// modulo p, duplicate coordinates are summed and zeros dropped.
    pub fn new<I>(params: FieldParams, n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, i128)>,
    {
        let f = params.plain();
        let mut acc: BTreeMap<(usize, usize), Fe> = BTreeMap::new();
        for (r, c, v) in triples {
            if r >= n || c >= n {
                return Err(Error::Usage(format!("entry ({r}, {c}) outside a {n}x{n} matrix")));
            }
            let slot = acc.entry((r, c)).or_insert(Fe::ZERO);
            *slot = f.add(*slot, params.reduce(v));
        }
        Ok(SparseMatrix {
            n,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            entries: (0..n).map(|i| (i, i, Fe::ONE)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        SparseMatrix { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Fe)] {
        &self.entries
    }

    /// One multiplication and one addition per stored entry.
    pub(crate) fn apply(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        let mut y = vec![Fe::ZERO; self.n];
        for &(r, c, v) in &self.entries {
            y[r] = f.add(y[r], f.mul(v, x[c]));
        }
        y
    }
}

/// Canonical SMS text: `"n n p"`, then 1-based `"i j v"` lines in row-major
/// order, then the `"0 0 0"` terminator. LF line endings.
pub fn emit_sms(m: &SparseMatrix, params: FieldParams) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", m.n, m.n, params.modulus());
    for &(r, c, v) in &m.entries {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, v);
    }
    out.push_str("0 0 0\n");
    out
}

/// Parses SMS text. Values may be any integers and are reduced modulo the
/// header's p; LF and CRLF are both accepted.
pub fn parse_sms(text: &str) -> Result<(SparseMatrix, FieldParams)> {
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| err(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(err(hline, "header must be \"n n p\""));
    }
    let rows: usize = h[0].parse().map_err(|_| err(hline, "non-integer dimension"))?;
    let cols: usize = h[1].parse().map_err(|_| err(hline, "non-integer dimension"))?;
    let p: u64 = h[2].parse().map_err(|_| err(hline, "non-integer modulus"))?;
    if rows != cols {
        return Err(err(hline, "matrix must be square"));
    }
    let params = FieldParams::new(p).map_err(|e| err(hline, &e.to_string()))?;

    let mut triples = Vec::new();
    let mut terminated = false;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if terminated {
            return Err(err(ln, "content after the 0 0 0 terminator"));
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(err(ln, "expected \"i j v\""));
        }
        let i: usize = t[0].parse().map_err(|_| err(ln, "non-integer row"))?;
        let j: usize = t[1].parse().map_err(|_| err(ln, "non-integer column"))?;
        let v: i128 = t[2].parse().map_err(|_| err(ln, "non-integer value"))?;
        if i == 0 && j == 0 {
            if v != 0 {
                return Err(err(ln, "malformed terminator"));
            }
            terminated = true;
            continue;
        }
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(err(ln, &format!("coordinates ({i}, {j}) out of range for {rows}x{cols}")));
        }
        triples.push((i - 1, j - 1, v));
    }
    if !terminated {
        return Err(err(text.lines().count().max(1), "missing 0 0 0 terminator"));
    }
    Ok((SparseMatrix::new(params, rows, triples)?, params))
}

/// Random sparse matrix: every position is occupied independently with
/// probability `density` by a uniform non-zero value.
pub fn random_sparse<R: Rng + ?Sized>(params: FieldParams, n: usize, density: f64, rng: &mut R) -> Result<SparseMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Usage(format!("density must lie in (0, 1], got {density}")));
    }
    let mut entries = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if rng.gen_bool(density) {
                let v = rng.gen_range(1..params.modulus());
                entries.push((r, c, params.from_u64(v)));
            }
        }
    }
    Ok(SparseMatrix { n, entries })
}

/// [`random_sparse`] drawn from a ChaCha20 stream reserved for matrices, so
/// the same `seed` can also drive provers and challengers independently.
pub fn seeded_sparse(params: FieldParams, n: usize, density: f64, seed: u64) -> Result<SparseMatrix> {
    random_sparse(params, n, density, &mut ChaCha20Rng::seed_from_u64(seed ^ 0x6d61_7472_6978_0000))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity() {
        let (m, params) = parse_sms("2 2 7\n1 1 1\n2 2 1\n0 0 0").unwrap();
        assert_eq!(params.modulus(), 7);
        assert_eq!(m, SparseMatrix::identity(2));
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let (m, _) = parse_sms("2 2 7\n1 1 3\n1 1 4\n0 0 0\n").unwrap();
        assert_eq!(m.nnz(), 0);
        let (m, _) = parse_sms("2 2 7\r\n1 2 -1\r\n2 1 15\r\n0 0 0\r\n").unwrap();
        let p7 = FieldParams::new(7).unwrap();
        assert_eq!(m.entries(), &[(0, 1, p7.from_u64(6)), (1, 0, p7.from_u64(1))]);
    }

    #[test]
    fn reports_line_numbers() {
        let cases = [
            ("2 3 7\n0 0 0\n", 1),
            ("2 2 8\n0 0 0\n", 1),
            ("2 2 7\n1 1 x\n0 0 0\n", 2),
            ("2 2 7\n1 1 1\n3 1 1\n0 0 0\n", 3),
            ("2 2 7\n1 1\n0 0 0\n", 2),
            ("2 2 7\n1 1 1\n", 2),
            ("2 2 7\n0 0 0\n1 1 1\n", 3),
        ];
        for (text, line) in cases {
            match parse_sms(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn emit_is_canonical() {
        let params = FieldParams::new(101).unwrap();
        let m = SparseMatrix::new(params, 3, vec![(2, 0, 5), (0, 1, -1)]).unwrap();
        assert_eq!(emit_sms(&m, params), "3 3 101\n1 2 100\n3 1 5\n0 0 0\n");
    }
}
