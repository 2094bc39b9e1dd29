//! The Prover side: the [`Prover`] trait and the honest implementation.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::message::Preconditioner;
use crate::blackbox::{BlackBox, GammaMatrix};
use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::krylov::{kernel_vector, minimal_generator_pair, solve_shifted, vector_annihilator, WiedemannPair};
use crate::poly::{xgcd, Poly};

/// Preconditioner attempts before the Prover gives up.
pub const PRECOND_TRIES: usize = 16;
/// Attempts at a full-degree secondary projection.
pub const SECONDARY_TRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondKind {
    Diagonal,
    Gamma,
}

/// First Prover message of a determinant certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DetOpening {
    Singular(Vec<Fe>),
    Diagonal { d: Vec<Fe>, u: Vec<Fe>, v: Vec<Fe> },
    Gamma { s: Fe, t: Fe },
}

/// First Prover message of the simple determinant certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleOpening {
    Singular(Vec<Fe>),
    CharPolys { s: Fe, t: Fe, c_b: Poly, c_c: Poly },
}

/// Answer to a point challenge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Solution(Vec<Fe>),
    BadShift,
}

/// The operator a determinant opening commits to.
pub fn preconditioned(a: &Arc<BlackBox>, pre: &Preconditioner) -> Result<BlackBox> {
    match pre {
        Preconditioner::Diagonal(d) => BlackBox::product(Arc::new(BlackBox::Diagonal(d.clone())), a.clone()),
        Preconditioner::Gamma { s, t } => {
            BlackBox::product(a.clone(), Arc::new(BlackBox::Gamma(GammaMatrix::new(a.dim(), *s, *t))))
        }
    }
}

/// A Prover. Calls arrive in protocol order; `f` charges the Prover's meter.
pub trait Prover {
    /// Singularity witness or preconditioner for a determinant certificate.
    fn open_determinant(&mut self, f: &Field, a: &Arc<BlackBox>, kind: PrecondKind) -> Result<DetOpening>;

    /// `(H, h)` for the sequence `uᵀBⁱv`.
    fn commit(&mut self, f: &Field, b: &BlackBox, u: &[Fe], v: &[Fe]) -> Result<(Poly, Poly)>;

    /// `(φ, ψ)` with `φH + ψh = 1` for the last commitment.
    fn bezout(&mut self, f: &Field) -> Result<(Poly, Poly)>;

    /// `w` with `(r·I - B)w = v` for the last commitment or charpoly pair.
    fn respond(&mut self, f: &Field, r: Fe) -> Result<Response>;

    /// After a minimal-polynomial certificate for `committed`: a projection
    /// with a generator of higher degree, if one exists.
    fn secondary_projection(&mut self, f: &Field, a: &BlackBox, committed: &Poly) -> Result<Option<(Vec<Fe>, Vec<Fe>)>>;

    /// The claimed characteristic polynomial of `a`.
    fn characteristic_polynomial(&mut self, f: &Field, a: &BlackBox) -> Result<Poly>;

    /// Opening of the simple determinant certificate.
    fn open_simple(&mut self, f: &Field, a: &Arc<BlackBox>) -> Result<SimpleOpening>;

    /// Whether this Prover has sent anything other than the honest message.
    fn deviated(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone)]
struct Commitment {
    b: BlackBox,
    u: Vec<Fe>,
    v: Vec<Fe>,
    pair: WiedemannPair,
}

/// Follows every protocol faithfully. Its own coins come from a seeded
/// ChaCha20 stream.
#[derive(Debug, Clone)]
pub struct HonestProver {
    rng: ChaCha20Rng,
    last: Option<Commitment>,
    /// Operator and annihilator used to answer challenges.
    system: Option<(BlackBox, Vec<Fe>, Poly)>,
}

impl HonestProver {
    pub fn new(seed: u64) -> Self {
        HonestProver {
            rng: ChaCha20Rng::seed_from_u64(seed),
            last: None,
            system: None,
        }
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// The honest generator pair of the last commitment.
    pub(crate) fn pair(&self) -> Option<&WiedemannPair> {
        self.last.as_ref().map(|c| &c.pair)
    }

    pub(crate) fn set_system(&mut self, b: BlackBox, v: Vec<Fe>, annihilator: Poly) {
        self.system = Some((b, v, annihilator));
    }

    pub(crate) fn singular_witness(&mut self, params: FieldParams, a: &BlackBox) -> Result<Option<Vec<Fe>>> {
        kernel_vector(params, a, &mut self.rng)
    }

    /// Samples preconditioners until the projected generator of the
    /// preconditioned matrix has full degree. Returns the best attempt when
    /// `require_full` is false and none succeeds.
    pub(crate) fn find_preconditioner(
        &mut self,
        f: &Field,
        a: &Arc<BlackBox>,
        kind: PrecondKind,
        require_full: bool,
    ) -> Result<DetOpening> {
        let n = a.dim();
        let mut best: Option<(usize, DetOpening, Commitment)> = None;
        for _ in 0..PRECOND_TRIES {
            let (opening, pre, u, v) = match kind {
                PrecondKind::Diagonal => {
                    let d: Vec<Fe> = (0..n).map(|_| f.sample_nonzero(&mut self.rng)).collect();
                    let u = f.sample_vec(&mut self.rng, n);
                    let v = f.sample_vec(&mut self.rng, n);
                    let pre = Preconditioner::Diagonal(d.clone());
                    (DetOpening::Diagonal { d, u: u.clone(), v: v.clone() }, pre, u, v)
                }
                PrecondKind::Gamma => {
                    let (s, t) = loop {
                        let s = f.sample(&mut self.rng);
                        let t = f.sample(&mut self.rng);
                        if !GammaMatrix::new(n, s, t).det(&f.unmetered()).is_zero() {
                            break (s, t);
                        }
                    };
                    let e1 = unit(n, 0);
                    (DetOpening::Gamma { s, t }, Preconditioner::Gamma { s, t }, e1.clone(), e1)
                }
            };
            let b = preconditioned(a, &pre)?;
            let pair = minimal_generator_pair(f, &b, &u, &v)?;
            let deg = pair.f.degree().unwrap_or(0);
            let commitment = Commitment { b, u, v, pair };
            if deg == n {
                self.last = Some(commitment);
                return Ok(opening);
            }
            if best.as_ref().is_none_or(|(d, _, _)| deg > *d) {
                best = Some((deg, opening, commitment));
            }
        }
        match best {
            Some((_, opening, commitment)) if !require_full => {
                self.last = Some(commitment);
                Ok(opening)
            }
            _ => Err(Error::Integrity(format!(
                "no full-degree preconditioner after {PRECOND_TRIES} tries; the field may be too small"
            ))),
        }
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<Fe> {
    let mut x = vec![Fe::ZERO; n];
    x[i] = Fe::ONE;
    x
}

/// Bézout cofactors in the degree ranges the Verifier checks.
pub(crate) fn bezout_pair(f: &Field, big_h: &Poly, h: &Poly) -> Result<(Poly, Poly)> {
    let b = xgcd(f, big_h, h)?;
    if b.gcd != Poly::one() {
        return Err(Error::Integrity("committed polynomials are not coprime".into()));
    }
    Ok((b.phi, b.psi))
}

impl Prover for HonestProver {
    fn open_determinant(&mut self, f: &Field, a: &Arc<BlackBox>, kind: PrecondKind) -> Result<DetOpening> {
        if let Some(w) = self.singular_witness(f.params(), a)? {
            return Ok(DetOpening::Singular(w));
        }
        self.find_preconditioner(f, a, kind, true)
    }

    fn commit(&mut self, f: &Field, b: &BlackBox, u: &[Fe], v: &[Fe]) -> Result<(Poly, Poly)> {
        let cached = self.last.as_ref().is_some_and(|c| c.u == u && c.v == v && &c.b == b);
        if !cached {
            let pair = minimal_generator_pair(f, b, u, v)?;
            self.last = Some(Commitment { b: b.clone(), u: u.to_vec(), v: v.to_vec(), pair });
        }
        let c = self.last.as_ref().expect("commitment present");
        self.system = Some((c.b.clone(), c.v.clone(), c.pair.f.clone()));
        Ok((c.pair.f.clone(), c.pair.rho.clone()))
    }

    fn bezout(&mut self, f: &Field) -> Result<(Poly, Poly)> {
        let pair = &self.last.as_ref().ok_or(Error::Usage("bezout before commit".into()))?.pair;
        bezout_pair(f, &pair.f, &pair.rho)
    }

    fn respond(&mut self, f: &Field, r: Fe) -> Result<Response> {
        let (b, v, ann) = self.system.clone().ok_or(Error::Usage("challenge before commit".into()))?;
        match solve_shifted(f, &b, r, &v, &ann) {
            Ok(w) => return Ok(Response::Solution(w)),
            Err(Error::BadShift | Error::Integrity(_)) => {}
            Err(e) => return Err(e),
        }
        // The projected generator can be a proper divisor of the one of the
        // Krylov vectors of v; only the latter decides solvability.
        let full = vector_annihilator(f, &b, &v, &mut self.rng)?;
        self.system = Some((b.clone(), v.clone(), full.clone()));
        match solve_shifted(f, &b, r, &v, &full) {
            Ok(w) => Ok(Response::Solution(w)),
            Err(Error::BadShift) => Ok(Response::BadShift),
            Err(e) => Err(e),
        }
    }

    fn secondary_projection(&mut self, f: &Field, a: &BlackBox, committed: &Poly) -> Result<Option<(Vec<Fe>, Vec<Fe>)>> {
        let params = f.params();
        let target = a.to_dense(params)?.minpoly(params);
        if committed.degree() >= target.degree() {
            return Ok(None);
        }
        let n = a.dim();
        for _ in 0..SECONDARY_TRIES {
            let u = f.sample_vec(&mut self.rng, n);
            let v = f.sample_vec(&mut self.rng, n);
            let pair = minimal_generator_pair(f, a, &u, &v)?;
            if pair.f == target {
                self.last = Some(Commitment { b: a.clone(), u: u.clone(), v: v.clone(), pair });
                return Ok(Some((u, v)));
            }
        }
        Ok(None)
    }

    fn characteristic_polynomial(&mut self, f: &Field, a: &BlackBox) -> Result<Poly> {
        a.to_dense(f.params())?.charpoly(f.params())
    }

    fn open_simple(&mut self, f: &Field, a: &Arc<BlackBox>) -> Result<SimpleOpening> {
        let params = f.params();
        let n = a.dim();
        let dense = a.to_dense(params)?;
        if let Some(w) = dense.kernel_vector(params) {
            return Ok(SimpleOpening::Singular(w));
        }
        for _ in 0..PRECOND_TRIES {
            let s = f.sample(&mut self.rng);
            let t = f.sample(&mut self.rng);
            if GammaMatrix::new(n, s, t).det(&f.unmetered()).is_zero() {
                continue;
            }
            let b = preconditioned(a, &Preconditioner::Gamma { s, t })?;
            let bd = b.to_dense(params)?;
            let c_b = bd.charpoly(params)?;
            let c_c = if n == 1 { Poly::one() } else { bd.leading_minor().charpoly(params)? };
            if xgcd(f, &c_b, &c_c)?.gcd == Poly::one() {
                self.system = Some((b, unit(n, n - 1), c_b.clone()));
                return Ok(SimpleOpening::CharPolys { s, t, c_b, c_c });
            }
        }
        Err(Error::Integrity(format!(
            "no coprime characteristic polynomial pair after {PRECOND_TRIES} tries"
        )))
    }
}
