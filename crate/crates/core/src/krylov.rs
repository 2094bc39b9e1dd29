//! Wiedemann machinery: projected Krylov sequences, minimal generators with
//! their residues, and black-box solutions of shifted systems.

use rand::Rng;

use crate::blackbox::{oracle_cap, BlackBox};
use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::poly::{berlekamp_massey, Poly};

/// Attempts at a random projection before the dense fallback in
/// [`vector_annihilator`].
pub const ANNIHILATOR_TRIES: usize = 8;

/// `(a_0, …, a_{len-1})` with `a_i = uᵀ Aⁱ v`, using `len - 1` matvecs.
pub fn wiedemann_sequence(f: &Field, a: &BlackBox, u: &[Fe], v: &[Fe], len: usize) -> Result<Vec<Fe>> {
    let n = a.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::Usage(format!(
            "projection lengths {} and {} do not match dimension {n}",
            u.len(),
            v.len()
        )));
    }
    if len == 0 {
        return Err(Error::Usage("sequence length must be at least 1".into()));
    }
    let mut seq = Vec::with_capacity(len);
    let mut x = v.to_vec();
    for i in 0..len {
        if i > 0 {
            x = a.matvec(f, &x)?;
        }
        seq.push(f.dot(u, &x));
    }
    Ok(seq)
}

/// The minimal generator `f` of a Wiedemann sequence together with its
/// residue `rho`, the polynomial part of `f(λ)·Σ a_i λ^{-1-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiedemannPair {
    pub f: Poly,
    pub rho: Poly,
}

/// `rho_j = Σ_{k > j} f_k · a_{k-1-j}` for `j < deg f`.
pub fn residue(f: &Field, gen: &Poly, seq: &[Fe]) -> Poly {
    let d = gen.degree().unwrap_or(0);
    let rho = (0..d)
        .map(|j| {
            (j + 1..=d).fold(Fe::ZERO, |acc, k| f.add(acc, f.mul(gen.coeff(k), seq[k - 1 - j])))
        })
        .collect();
    Poly::from_coeffs(rho)
}

/// Berlekamp-Massey over `2n` terms of `uᵀ Aⁱ v`, plus the residue.
pub fn minimal_generator_pair(f: &Field, a: &BlackBox, u: &[Fe], v: &[Fe]) -> Result<WiedemannPair> {
    let seq = wiedemann_sequence(f, a, u, v, 2 * a.dim().max(1))?;
    let gen = berlekamp_massey(f, &seq)?;
    let rho = residue(f, &gen, &seq);
    Ok(WiedemannPair { f: gen, rho })
}

/// `p(A)·v` by Horner, `deg p` matvecs.
pub fn apply_poly(f: &Field, a: &BlackBox, p: &Poly, v: &[Fe]) -> Result<Vec<Fe>> {
    let Some(d) = p.degree() else {
        return Ok(vec![Fe::ZERO; v.len()]);
    };
    let mut acc: Vec<Fe> = v.iter().map(|&x| f.mul(p.coeff(d), x)).collect();
    for i in (0..d).rev() {
        acc = a.matvec(f, &acc)?;
        let c = p.coeff(i);
        for (y, &x) in acc.iter_mut().zip(v) {
            *y = f.add(*y, f.mul(c, x));
        }
    }
    Ok(acc)
}

/// Solves `(r1·I - A)·w = v` given a monic annihilator `p` of the Krylov
/// vectors `Aⁱv`: `w = g(A)v / p(r1)` with `g = (p - p(r1)) / (λ - r1)`.
///
/// Fails with [`Error::BadShift`] when `p(r1) = 0` and with
/// [`Error::Integrity`] when the residual check shows `p` does not
/// annihilate `v`.
pub fn solve_shifted(f: &Field, a: &BlackBox, r1: Fe, v: &[Fe], p: &Poly) -> Result<Vec<Fe>> {
    let p_r1 = p.eval(f, r1);
    if p_r1.is_zero() {
        return Err(Error::BadShift);
    }
    // Synthetic division by λ - r1.
    let d = p.degree().unwrap_or(0);
    let mut g = vec![Fe::ZERO; d];
    if d > 0 {
        g[d - 1] = p.coeff(d);
        for i in (1..d).rev() {
            g[i - 1] = f.add(p.coeff(i), f.mul(r1, g[i]));
        }
    }
    let gv = apply_poly(f, a, &Poly::from_coeffs(g), v)?;
    let scale = f.inv(p_r1)?;
    let w: Vec<Fe> = gv.iter().map(|&x| f.mul(x, scale)).collect();

    let aw = a.matvec(f, &w)?;
    let consistent = w.iter().zip(&aw).zip(v).all(|((&wi, &ai), &vi)| f.sub(f.mul(r1, wi), ai) == vi);
    if !consistent {
        return Err(Error::Integrity("shifted solve residual is non-zero: polynomial does not annihilate v".into()));
    }
    Ok(w)
}

/// The minimal polynomial `f^{A,v}` of the Krylov vectors of `v`. Tries
/// random projections, accepting a generator once it annihilates `v`; after
/// [`ANNIHILATOR_TRIES`] failures falls back to the dense oracle.
pub fn vector_annihilator<R: Rng + ?Sized>(f: &Field, a: &BlackBox, v: &[Fe], rng: &mut R) -> Result<Poly> {
    let n = a.dim();
    let quiet = f.unmetered();
    for _ in 0..ANNIHILATOR_TRIES {
        let u = quiet.sample_vec(rng, n);
        let pair = minimal_generator_pair(f, a, &u, v)?;
        if apply_poly(f, a, &pair.f, v)?.iter().all(|x| x.is_zero()) {
            return Ok(pair.f);
        }
    }
    Ok(a.to_dense(f.params())?.krylov_minpoly(f.params(), v))
}

/// A non-zero null vector of `A`, or `None` when `A` is nonsingular.
///
/// Up to the dense oracle cap this is exact. Above it, the null vector is
/// read off a random Krylov space: if `f^{A,v} = λ^k·g` with `g(0) ≠ 0` then
/// the last non-zero vector of `g(A)v, A·g(A)v, …` lies in the kernel. That
/// route is Monte Carlo: a singular `A` is reported nonsingular only if every
/// one of the random `v` misses the kernel direction.
pub fn kernel_vector<R: Rng + ?Sized>(params: FieldParams, a: &BlackBox, rng: &mut R) -> Result<Option<Vec<Fe>>> {
    let n = a.dim();
    if n <= oracle_cap() {
        return Ok(a.to_dense(params)?.kernel_vector(params));
    }
    let f = params.plain();
    for _ in 0..2 {
        let v = f.sample_vec(rng, n);
        let ann = vector_annihilator(&f, a, &v, rng)?;
        let k = ann.coeffs().iter().take_while(|c| c.is_zero()).count();
        if k == 0 {
            continue;
        }
        let g = Poly::from_coeffs(ann.coeffs()[k..].to_vec());
        let mut y = apply_poly(&f, a, &g, &v)?;
        loop {
            let next = a.matvec(&f, &y)?;
            if next.iter().all(|x| x.is_zero()) {
                return Ok(Some(y));
            }
            y = next;
        }
    }
    Ok(None)
}
