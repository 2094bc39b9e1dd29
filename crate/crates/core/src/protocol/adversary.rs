//! Cheating Provers. Each strategy keeps its messages well-formed (monic,
//! within the degree bounds), so a rejection always comes from one of the
//! Verifier's probabilistic checks rather than the syntactic gate.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use super::prover::{bezout_pair, DetOpening, HonestProver, PrecondKind, Prover, Response, SimpleOpening};
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::{gcd, Poly};

/// Perturbation attempts when a lie must stay coprime.
const FORGE_TRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Commits a generator differing from the true one in a lower coefficient.
    WrongGenerator,
    /// Commits the true generator with a perturbed residue.
    WrongResidue,
    /// Commits `(f·(λ-c), ρ·(λ-c))`, which share a factor, together with the
    /// Bézout pair of `(f, ρ)`. Truthful when `deg f = n`.
    ForgedBezout,
    /// Answers challenges with a random vector.
    WrongSolution,
    /// Pads a deficient generator to a higher degree with a coprime residue.
    /// Truthful when `deg f = n`.
    DegreePad,
    /// Never admits singularity: commits a full-degree generator with a
    /// non-zero constant term instead. Truthful on nonsingular input.
    SingularDenial,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::WrongGenerator,
        Strategy::WrongResidue,
        Strategy::ForgedBezout,
        Strategy::WrongSolution,
        Strategy::DegreePad,
        Strategy::SingularDenial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::WrongGenerator => "wrong_generator",
            Strategy::WrongResidue => "wrong_residue",
            Strategy::ForgedBezout => "forged_bezout",
            Strategy::WrongSolution => "wrong_solution",
            Strategy::DegreePad => "degree_pad",
            Strategy::SingularDenial => "singular_denial",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy)]
enum Constant {
    Keep,
    Exact(Fe),
}

/// A Prover running `strategy` on top of the honest computation.
#[derive(Debug, Clone)]
pub struct AdversarialProver {
    strategy: Strategy,
    honest: HonestProver,
    committed: Option<(Poly, Poly)>,
    forged_bezout: Option<(Poly, Poly)>,
    /// Dimension of the operator behind the last commitment.
    n: usize,
    /// Determinant the adversary wants certified, with the preconditioner
    /// determinant it will be divided by.
    det_target: Option<(Fe, Fe)>,
    /// Lie sent as the characteristic polynomial.
    charpoly_lie: Option<Poly>,
    deviated: bool,
}

impl AdversarialProver {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        AdversarialProver {
            strategy,
            honest: HonestProver::new(seed),
            committed: None,
            forged_bezout: None,
            n: 0,
            det_target: None,
            charpoly_lie: None,
            deviated: false,
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn nonzero(&mut self, f: &Field) -> Fe {
        f.unmetered().sample_nonzero(self.honest.rng())
    }

    /// `p` with its coefficient `k` shifted by a random non-zero amount,
    /// coprime to `other`.
    fn perturb_coprime(&mut self, f: &Field, p: &Poly, k: usize, other: &Poly) -> Option<Poly> {
        let q = f.unmetered();
        for _ in 0..FORGE_TRIES {
            let delta = self.nonzero(f);
            let mut c = p.coeffs().to_vec();
            if c.len() <= k {
                c.resize(k + 1, Fe::ZERO);
            }
            c[k] = q.add(c[k], delta);
            let cand = Poly::from_coeffs(c);
            if gcd(&q, &cand, other).ok()? == Poly::one() {
                return Some(cand);
            }
        }
        None
    }

    /// A monic `H` of degree `deg` with a coprime residue, built from the
    /// honest pair `(f, ρ)` of degree `d ≤ deg` by multiplying in `(λ-c)`
    /// factors and adding a multiple of `f` to the residue.
    fn padded(&mut self, f: &Field, pair: (&Poly, &Poly), deg: usize, constant: Constant) -> Option<(Poly, Poly)> {
        let q = f.unmetered();
        let (gen, rho) = pair;
        let d = gen.degree().unwrap_or(0);
        for _ in 0..FORGE_TRIES {
            let c = self.nonzero(f);
            let mut big_h = gen.clone();
            let mut h = rho.clone();
            for _ in d..deg {
                let lin = Poly::linear_root(&q, c);
                big_h = big_h.mul(&q, &lin);
                h = h.mul(&q, &lin);
            }
            if d < deg {
                h = h.add(&q, &gen.scale(&q, self.nonzero(f)));
            }
            let mut coeffs = big_h.coeffs().to_vec();
            match constant {
                Constant::Exact(t) => coeffs[0] = t,
                Constant::Keep => {}
            }
            let big_h = Poly::from_coeffs(coeffs);
            if h.degree() < big_h.degree() && gcd(&q, &big_h, &h).ok()? == Poly::one() {
                return Some((big_h, h));
            }
        }
        None
    }

    fn forge_commitment(&mut self, f: &Field, gen: Poly, rho: Poly) -> (Poly, Poly) {
        let q = f.unmetered();
        let d = gen.degree().unwrap_or(0);
        if let Some((target, pre_det)) = self.det_target {
            // Constant term that makes the certified determinant equal the lie.
            let want = q.mul(q.mul(target, pre_det), f.params().sign(self.n));
            if gen.coeff(0) != want {
                if let Some(c) = self.padded(f, (&gen, &rho), self.n, Constant::Exact(want)) {
                    self.deviated = true;
                    return c;
                }
            }
        }
        match self.strategy {
            Strategy::WrongGenerator if d > 0 => {
                if let Some(big_h) = self.perturb_coprime(f, &gen, 0, &rho) {
                    self.deviated = true;
                    return (big_h, rho);
                }
            }
            Strategy::WrongGenerator => {
                // f = 1: claim a linear generator instead.
                let c = self.nonzero(f);
                self.deviated = true;
                return (Poly::linear_root(&q, c), Poly::one());
            }
            Strategy::WrongResidue if d > 0 => {
                // Leave the top coefficient alone so a monic residue stays monic.
                let k = self.honest.rng().gen_range(0..(d - 1).max(1));
                if let Some(h) = self.perturb_coprime(f, &rho, k, &gen) {
                    if h.degree() < gen.degree() {
                        self.deviated = true;
                        return (gen, h);
                    }
                }
            }
            Strategy::ForgedBezout if d < self.n => {
                let c = self.nonzero(f);
                let lin = Poly::linear_root(&q, c);
                if let Ok(bz) = bezout_pair(&q, &gen, &rho) {
                    self.forged_bezout = Some(bz);
                    self.deviated = true;
                    return (gen.mul(&q, &lin), rho.mul(&q, &lin));
                }
            }
            Strategy::DegreePad if d < self.n => {
                if let Some(c) = self.padded(f, (&gen, &rho), d + 1, Constant::Keep) {
                    self.deviated = true;
                    return c;
                }
            }
            _ => {}
        }
        (gen, rho)
    }
}

impl Prover for AdversarialProver {
    fn open_determinant(&mut self, f: &Field, a: &Arc<BlackBox>, kind: PrecondKind) -> Result<DetOpening> {
        self.det_target = None;
        let lie_target = match (&self.charpoly_lie, a.as_ref()) {
            (Some(c), BlackBox::Shift(lambda, _)) => Some(c.eval(&f.unmetered(), *lambda)),
            _ => None,
        };
        let denial = self.strategy == Strategy::SingularDenial;
        if !denial && lie_target.is_none() {
            return self.honest.open_determinant(f, a, kind);
        }
        if !denial {
            if let Some(w) = self.honest.singular_witness(f.params(), a)? {
                return Ok(DetOpening::Singular(w));
            }
        }
        let opening = self.honest.find_preconditioner(f, a, kind, false)?;
        let q = f.unmetered();
        let pre_det = match &opening {
            DetOpening::Diagonal { d, .. } => d.iter().fold(Fe::ONE, |acc, &x| q.mul(acc, x)),
            DetOpening::Gamma { s, t } => crate::blackbox::GammaMatrix::new(a.dim(), *s, *t).det(&q),
            DetOpening::Singular(_) => unreachable!("preconditioner search never opens as singular"),
        };
        let target = match lie_target {
            Some(t) => t,
            None => {
                // Claim some non-zero determinant; honest only if A is nonsingular.
                let honest_const = self.honest.pair().map(|p| p.f.coeff(0)).unwrap_or(Fe::ZERO);
                if !honest_const.is_zero() && self.honest.pair().and_then(|p| p.f.degree()) == Some(a.dim()) {
                    return Ok(opening);
                }
                self.nonzero(f)
            }
        };
        self.det_target = Some((target, pre_det));
        Ok(opening)
    }

    fn commit(&mut self, f: &Field, b: &BlackBox, u: &[Fe], v: &[Fe]) -> Result<(Poly, Poly)> {
        self.forged_bezout = None;
        self.n = b.dim();
        let (gen, rho) = self.honest.commit(f, b, u, v)?;
        let forged = self.forge_commitment(f, gen, rho);
        self.det_target = None;
        self.committed = Some(forged.clone());
        Ok(forged)
    }

    fn bezout(&mut self, f: &Field) -> Result<(Poly, Poly)> {
        if let Some(bz) = self.forged_bezout.clone() {
            return Ok(bz);
        }
        let (big_h, h) = self.committed.clone().ok_or(Error::Usage("bezout before commit".into()))?;
        bezout_pair(f, &big_h, &h)
    }

    fn respond(&mut self, f: &Field, r: Fe) -> Result<Response> {
        if self.strategy == Strategy::WrongSolution {
            self.deviated = true;
            let n = self.n.max(1);
            let w = f.unmetered().sample_vec(self.honest.rng(), n);
            return Ok(Response::Solution(w));
        }
        self.honest.respond(f, r)
    }

    fn secondary_projection(&mut self, f: &Field, a: &BlackBox, committed: &Poly) -> Result<Option<(Vec<Fe>, Vec<Fe>)>> {
        self.honest.secondary_projection(f, a, committed)
    }

    fn characteristic_polynomial(&mut self, f: &Field, a: &BlackBox) -> Result<Poly> {
        let c = self.honest.characteristic_polynomial(f, a)?;
        if self.strategy != Strategy::WrongGenerator {
            return Ok(c);
        }
        let lie = c.add(&f.unmetered(), &Poly::one());
        self.deviated = true;
        self.charpoly_lie = Some(lie.clone());
        Ok(lie)
    }

    fn open_simple(&mut self, f: &Field, a: &Arc<BlackBox>) -> Result<SimpleOpening> {
        self.n = a.dim();
        let opening = match (self.strategy, self.honest.open_simple(f, a)?) {
            (Strategy::SingularDenial, SimpleOpening::Singular(_)) => {
                // Pretend to be nonsingular: honest Γ charpolys with a lied constant term.
                let q = f.unmetered();
                let n = a.dim();
                let mut out = None;
                for _ in 0..FORGE_TRIES {
                    let s = q.sample(self.honest.rng());
                    let t = q.sample(self.honest.rng());
                    if crate::blackbox::GammaMatrix::new(n, s, t).det(&q).is_zero() {
                        continue;
                    }
                    let pre = super::message::Preconditioner::Gamma { s, t };
                    let b = super::prover::preconditioned(a, &pre)?;
                    let bd = b.to_dense(f.params())?;
                    let c_b = bd.charpoly(f.params())?;
                    let c_c = if n == 1 { Poly::one() } else { bd.leading_minor().charpoly(f.params())? };
                    if let Some(lie) = self.perturb_coprime(f, &c_b, 0, &c_c) {
                        self.honest.set_system(b, super::prover::unit(n, n - 1), c_b);
                        let c_b = lie;
                        self.deviated = true;
                        out = Some(SimpleOpening::CharPolys { s, t, c_b, c_c });
                        break;
                    }
                }
                out.ok_or_else(|| Error::Integrity("could not forge a nonsingular opening".into()))?
            }
            (Strategy::WrongGenerator, SimpleOpening::CharPolys { s, t, c_b, c_c }) => {
                match self.perturb_coprime(f, &c_b, 0, &c_c) {
                    Some(lie) => {
                        self.deviated = true;
                        SimpleOpening::CharPolys { s, t, c_b: lie, c_c }
                    }
                    None => SimpleOpening::CharPolys { s, t, c_b, c_c },
                }
            }
            (Strategy::WrongResidue, SimpleOpening::CharPolys { s, t, c_b, c_c }) if self.n > 1 => {
                match self.perturb_coprime(f, &c_c, 0, &c_b) {
                    Some(lie) => {
                        self.deviated = true;
                        SimpleOpening::CharPolys { s, t, c_b, c_c: lie }
                    }
                    None => SimpleOpening::CharPolys { s, t, c_b, c_c },
                }
            }
            (_, honest) => honest,
        };
        Ok(opening)
    }

    fn deviated(&self) -> bool {
        self.deviated
    }
}
