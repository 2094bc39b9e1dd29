//! Dense univariate polynomials over Z_p.
//!
//! Coefficients are stored low-to-high with trailing zeros stripped, so the
//! zero polynomial is the empty vector and its degree is `None`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// Builds a polynomial from low-to-high coefficients, stripping trailing
    /// zeros.
    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Convenience constructor from signed integers, reduced mod p.
    pub fn from_ints(params: FieldParams, coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| params.reduce(c as i128)).collect())
    }

    /// `λ - c`.
    pub fn linear_root(f: &Field, c: Fe) -> Self {
        Poly::from_coeffs(vec![f.unmetered().neg(c), Fe::ONE])
    }

    /// `c·λ^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    /// Coefficient of `λ^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Option<Fe> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Some(Fe::ONE)
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Comma-separated decimal coefficients, low to high.
    pub fn to_csv(&self) -> String {
        join_csv(&self.coeffs)
    }

    pub fn parse_csv(params: FieldParams, s: &str) -> Result<Self> {
        let coeffs = parse_csv_elems(params, s)?;
        if coeffs.last().is_some_and(|c| c.is_zero()) {
            return Err(Error::Usage(format!("polynomial has trailing zero coefficient: {s:?}")));
        }
        Ok(Poly { coeffs })
    }

    pub fn add(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, f: &Field, c: Fe) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Schoolbook product.
    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.len() + other.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, f: &Field, divisor: &Poly) -> Result<(Poly, Poly)> {
        let db = divisor.degree().ok_or(Error::Domain("division by the zero polynomial"))?;
        let lead_inv = f.inv(divisor.coeffs[db])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = rem[k + db];
            if c.is_zero() {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[k] = q;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(q, b));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Horner evaluation: `deg` multiplications and `deg` additions.
    pub fn eval(&self, f: &Field, x: Fe) -> Fe {
        let mut it = self.coeffs.iter().rev();
        let Some(&lead) = it.next() else {
            return Fe::ZERO;
        };
        it.fold(lead, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Scales to leading coefficient one; the zero polynomial stays zero.
    pub fn monic(&self, f: &Field) -> Result<Poly> {
        match self.lead() {
            None => Ok(Poly::zero()),
            Some(l) if l == Fe::ONE => Ok(self.clone()),
            Some(l) => Ok(self.scale(f, f.inv(l)?)),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

pub(crate) fn join_csv(xs: &[Fe]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&x.to_string());
    }
    s
}

pub(crate) fn parse_csv_elems(params: FieldParams, s: &str) -> Result<Vec<Fe>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|tok| params.parse_elem(tok)).collect()
}

/// Output of [`xgcd`]: `gcd = phi·a + psi·b` with `gcd` monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bezout {
    pub gcd: Poly,
    pub phi: Poly,
    pub psi: Poly,
}

/// Extended Euclid. When the gcd is one and `b` is non-zero the cofactors are
/// normalised so that `deg phi < deg b` and `deg psi < deg a`.
pub fn xgcd(f: &Field, a: &Poly, b: &Poly) -> Result<Bezout> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("gcd of two zero polynomials"));
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(f, &r1)?;
        let s2 = s0.sub(f, &q.mul(f, &s1));
        let t2 = t0.sub(f, &q.mul(f, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lc_inv = f.inv(r0.lead().expect("gcd is non-zero"))?;
    let gcd = r0.scale(f, lc_inv);
    let mut phi = s0.scale(f, lc_inv);
    let mut psi = t0.scale(f, lc_inv);

    if gcd == Poly::one() && !b.is_zero() {
        let (q, r) = phi.divrem(f, b)?;
        phi = r;
        psi = psi.add(f, &q.mul(f, a));
    }
    Ok(Bezout { gcd, phi, psi })
}

/// Monic gcd.
pub fn gcd(f: &Field, a: &Poly, b: &Poly) -> Result<Poly> {
    Ok(xgcd(f, a, b)?.gcd)
}

/// Minimal monic linear generator of `seq` (Berlekamp-Massey).
///
/// Returns `f` of degree `d` with `Σ_i f_i·seq[k+i] = 0` for every
/// `0 <= k <= len - 1 - d`, of least possible degree.
pub fn berlekamp_massey(f: &Field, seq: &[Fe]) -> Result<Poly> {
    if seq.is_empty() {
        return Err(Error::Usage("berlekamp_massey needs a non-empty sequence".into()));
    }
    // Connection polynomial c(x) = 1 + c_1 x + ... with
    // s_k + Σ c_i s_{k-i} = 0.
    let mut c = vec![Fe::ONE];
    let mut prev = vec![Fe::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Fe::ONE;

    for k in 0..seq.len() {
        let mut d = seq[k];
        for i in 1..=len.min(c.len() - 1) {
            d = f.add(d, f.mul(c[i], seq[k - i]));
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = f.mul(d, f.inv(prev_disc)?);
        let snapshot = c.clone();
        if c.len() < prev.len() + shift {
            c.resize(prev.len() + shift, Fe::ZERO);
        }
        for (i, &b) in prev.iter().enumerate() {
            c[i + shift] = f.sub(c[i + shift], f.mul(coef, b));
        }
        if 2 * len <= k {
            len = k + 1 - len;
            prev = snapshot;
            prev_disc = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    // Reverse: f(λ) = λ^len · c(1/λ).
    let gen = (0..=len).map(|i| c.get(len - i).copied().unwrap_or(Fe::ZERO)).collect();
    Ok(Poly::from_coeffs(gen))
}

/// Evaluations gathered by [`bezout_check_at`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BezoutCheck {
    pub holds: bool,
    pub f_at: Fe,
    pub h_at: Fe,
}

/// Evaluates `phi(r)·f(r) + psi(r)·h(r)` and compares it with one, keeping
/// `f(r)` and `h(r)` for reuse.
pub fn bezout_check_at(fld: &Field, f: &Poly, h: &Poly, phi: &Poly, psi: &Poly, r: Fe) -> BezoutCheck {
    let phi_at = phi.eval(fld, r);
    let f_at = f.eval(fld, r);
    let psi_at = psi.eval(fld, r);
    let h_at = h.eval(fld, r);
    let lhs = fld.add(fld.mul(phi_at, f_at), fld.mul(psi_at, h_at));
    BezoutCheck {
        holds: lhs == Fe::ONE,
        f_at,
        h_at,
    }
}

/// Verifier-side coprimality evidence: a single random evaluation of the
/// Bézout identity, never a full gcd.
pub fn is_coprime_certified(fld: &Field, f: &Poly, h: &Poly, phi: &Poly, psi: &Poly, r0: Fe) -> bool {
    bezout_check_at(fld, f, h, phi, psi, r0).holds
}

/// Lagrange interpolation through `(xs[i], ys[i])` with distinct `xs`.
pub fn interpolate(f: &Field, xs: &[Fe], ys: &[Fe]) -> Result<Poly> {
    if xs.len() != ys.len() {
        return Err(Error::Usage("interpolation needs as many values as points".into()));
    }
    let mut acc = Poly::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Poly::one();
        let mut denom = Fe::ONE;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(f, &Poly::linear_root(f, xj));
                denom = f.mul(denom, f.sub(xi, xj));
            }
        }
        let c = f.mul(yi, f.inv(denom).map_err(|_| Error::Domain("interpolation points must be distinct"))?);
        acc = acc.add(f, &basis.scale(f, c));
    }
    Ok(acc)
}
