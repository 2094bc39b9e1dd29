//! Session drivers: the Verifier's side of each certificate, interleaved with
//! calls into the Prover.

use std::sync::Arc;

use super::challenge::Challenger;
use super::message::{Encoding, Entry, Message, Preconditioner, Projection, Role};
use super::prover::{preconditioned, DetOpening, PrecondKind, Prover, Response, SimpleOpening};
use super::transcript::Transcript;
use super::{Certified, Outcome, ProtocolId};
use crate::blackbox::{BlackBox, GammaMatrix};
use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::meter::CostMeter;
use crate::poly::{bezout_check_at, xgcd, Poly};

/// Draws the simple determinant Verifier makes looking for a challenge that
/// is not a root of the committed characteristic polynomial.
pub const SIMPLE_RESAMPLES: usize = 64;

/// `Err` ends the session with that outcome.
type Flow<T> = std::result::Result<T, Outcome>;

fn from_prover<T>(r: Result<T>) -> Flow<T> {
    r.map_err(|_| Outcome::reject("prover-aborted"))
}

fn reject<T>(reason: &str) -> Flow<T> {
    Err(Outcome::reject(reason))
}

pub(crate) struct Session<'s> {
    params: FieldParams,
    vm: &'s CostMeter,
    pm: &'s CostMeter,
    challenger: &'s mut dyn Challenger,
    entries: Vec<Entry>,
    enc: Encoding,
}

impl<'s> Session<'s> {
    fn vf(&self) -> Field<'s> {
        self.params.metered(self.vm)
    }

    fn pf(&self) -> Field<'s> {
        self.params.metered(self.pm)
    }

    fn post(&mut self, role: Role, msg: Message) {
        let elements = msg.elements(self.enc);
        match role {
            Role::Prover => self.pm.count_sent(elements),
            Role::Verifier => self.vm.count_sent(elements),
            Role::Public => {}
        }
        let entry = Entry { role, msg };
        self.challenger.absorb(&entry);
        self.entries.push(entry);
    }

    fn draw(&mut self) -> Fe {
        let f = self.vf();
        self.challenger.draw(&f)
    }
}

/// Verifier-side shape constraints on a commitment.
#[derive(Debug, Clone, Copy, Default)]
struct Shape {
    /// `r0 = r1`.
    merged: bool,
    /// `deg H = n` is required.
    full_degree: bool,
    /// `h` must be monic of degree `n - 1`.
    monic_residue: bool,
}

fn deg(p: &Poly) -> i64 {
    p.degree().map_or(-1, |d| d as i64)
}

/// The generator certificate for `uᵀBⁱv`; returns the accepted `H`.
fn generator_flow(
    s: &mut Session,
    prover: &mut dyn Prover,
    b: &BlackBox,
    u: &Projection,
    v: &Projection,
    shape: Shape,
) -> Flow<Poly> {
    let n = b.dim();
    let (uv, vv) = (u.to_vec(n), v.to_vec(n));
    let (big_h, h) = from_prover(prover.commit(&s.pf(), b, &uv, &vv))?;
    s.post(Role::Prover, Message::Commitment { big_h: big_h.clone(), h: h.clone() });
    if !big_h.is_monic() || deg(&big_h) > n as i64 || deg(&h) >= deg(&big_h) {
        return reject("malformed-commitment");
    }
    if shape.full_degree && deg(&big_h) != n as i64 {
        return reject("degree-deficient");
    }
    if shape.monic_residue && (!h.is_monic() || deg(&h) != n as i64 - 1) {
        return reject("malformed-commitment");
    }

    let (phi, psi) = from_prover(prover.bezout(&s.pf()))?;
    s.post(Role::Prover, Message::Bezout { phi: phi.clone(), psi: psi.clone() });
    if deg(&phi) > (deg(&h) - 1).max(0) || deg(&psi) > deg(&big_h) - 1 {
        return reject("malformed-bezout");
    }

    let vf = s.vf();
    let r0 = s.draw();
    let check = bezout_check_at(&vf, &big_h, &h, &phi, &psi, r0);
    if !check.holds {
        return reject("bezout-check-failed");
    }
    let (r1, h_at, big_h_at) = if shape.merged {
        (r0, check.h_at, check.f_at)
    } else {
        let r1 = s.draw();
        (r1, h.eval(&vf, r1), big_h.eval(&vf, r1))
    };
    s.post(Role::Verifier, Message::Challenge(r1));

    let w = match from_prover(prover.respond(&s.pf(), r1))? {
        Response::BadShift => {
            s.post(Role::Prover, Message::BadShift);
            return Err(Outcome::BadChallenge("generator-vanishes-at-challenge".into()));
        }
        Response::Solution(w) => w,
    };
    s.post(Role::Prover, Message::Solution(w.clone()));
    if w.len() != n {
        return reject("malformed-solution");
    }
    let bw = b.matvec(&vf, &w).expect("length checked");
    let residual_ok = (0..n).all(|i| {
        let lhs = vf.sub(vf.mul(r1, w[i]), bw[i]);
        match v {
            Projection::Dense(x) => lhs == x[i],
            Projection::Unit(k) => lhs == if i == *k { Fe::ONE } else { Fe::ZERO },
        }
    });
    if !residual_ok {
        return reject("solution-residual");
    }
    let uw = u.dot(&vf, &w);
    if vf.mul(uw, big_h_at) != h_at {
        return reject("residue-check-failed");
    }
    Ok(big_h)
}

fn check_singular(s: &mut Session, a: &BlackBox, w: Vec<Fe>) -> Flow<Certified> {
    s.post(Role::Prover, Message::Singular(w.clone()));
    if w.len() != a.dim() || w.iter().all(|x| x.is_zero()) {
        return reject("bad-singular-witness");
    }
    let aw = a.matvec(&s.vf(), &w).expect("length checked");
    if aw.iter().any(|x| !x.is_zero()) {
        return reject("bad-singular-witness");
    }
    Ok(Certified::Singular(w))
}

/// `det A = (-1)ⁿ·c(0) / det(P)` where `c` is the characteristic polynomial
/// of the preconditioned matrix.
fn extract_det(vf: &Field, n: usize, c: &Poly, pre_det: Fe) -> Flow<Certified> {
    let c0 = c.coeff(0);
    let signed = if n % 2 == 1 { vf.neg(c0) } else { c0 };
    let inv = vf.inv(pre_det).map_err(|_| Outcome::reject("singular-preconditioner"))?;
    Ok(Certified::Determinant(vf.mul(signed, inv)))
}

fn det_flow(s: &mut Session, prover: &mut dyn Prover, a: &Arc<BlackBox>, kind: PrecondKind) -> Flow<Certified> {
    let n = a.dim();
    let opening = from_prover(prover.open_determinant(&s.pf(), a, kind))?;
    let vf = s.vf();
    match opening {
        DetOpening::Singular(w) => check_singular(s, a, w),
        DetOpening::Diagonal { d, u, v } => {
            let pre = Preconditioner::Diagonal(d.clone());
            s.post(Role::Prover, Message::Preconditioner(pre.clone()));
            let (u, v) = (Projection::Dense(u), Projection::Dense(v));
            s.post(Role::Prover, Message::Projection { u: u.clone(), v: v.clone() });
            if d.len() != n || !u.fits(n) || !v.fits(n) {
                return reject("malformed-preconditioner");
            }
            if d.iter().any(|x| x.is_zero()) {
                return reject("singular-preconditioner");
            }
            let b = preconditioned(a, &pre).expect("dimensions checked");
            let shape = Shape { merged: true, full_degree: true, monic_residue: false };
            let big_h = generator_flow(s, prover, &b, &u, &v, shape)?;
            let det_d = d[1..].iter().fold(d[0], |acc, &x| vf.mul(acc, x));
            extract_det(&vf, n, &big_h, det_d)
        }
        DetOpening::Gamma { s: sc, t } => {
            let pre = Preconditioner::Gamma { s: sc, t };
            s.post(Role::Prover, Message::Preconditioner(pre.clone()));
            let det_g = GammaMatrix::new(n, sc, t).det(&vf);
            if det_g.is_zero() {
                return reject("singular-preconditioner");
            }
            let b = preconditioned(a, &pre).expect("dimensions checked");
            let shape = Shape { merged: true, full_degree: true, monic_residue: true };
            let e1 = Projection::Unit(0);
            let big_h = generator_flow(s, prover, &b, &e1, &e1, shape)?;
            extract_det(&vf, n, &big_h, det_g)
        }
    }
}

fn simple_det_flow(s: &mut Session, prover: &mut dyn Prover, a: &Arc<BlackBox>) -> Flow<Certified> {
    let n = a.dim();
    let (sc, t, c_b, c_c) = match from_prover(prover.open_simple(&s.pf(), a))? {
        SimpleOpening::Singular(w) => return check_singular(s, a, w),
        SimpleOpening::CharPolys { s, t, c_b, c_c } => (s, t, c_b, c_c),
    };
    let pre = Preconditioner::Gamma { s: sc, t };
    s.post(Role::Prover, Message::Preconditioner(pre.clone()));
    s.post(Role::Prover, Message::CharPolys { c_b: c_b.clone(), c_c: c_c.clone() });
    let vf = s.vf();
    let det_g = GammaMatrix::new(n, sc, t).det(&vf);
    if det_g.is_zero() {
        return reject("singular-preconditioner");
    }
    if !c_b.is_monic() || deg(&c_b) != n as i64 || !c_c.is_monic() || deg(&c_c) != n as i64 - 1 {
        return reject("malformed-commitment");
    }
    if xgcd(&vf, &c_b, &c_c).map(|g| g.gcd) != Ok(Poly::one()) {
        return reject("not-coprime");
    }
    let mut admissible = None;
    for _ in 0..SIMPLE_RESAMPLES {
        let r = s.draw();
        let cb_r = c_b.eval(&vf, r);
        if !cb_r.is_zero() {
            admissible = Some((r, cb_r));
            break;
        }
    }
    let Some((r, cb_r)) = admissible else {
        return Err(Outcome::BadChallenge("no-admissible-challenge".into()));
    };
    s.post(Role::Verifier, Message::Challenge(r));
    let w = match from_prover(prover.respond(&s.pf(), r))? {
        Response::BadShift => {
            s.post(Role::Prover, Message::BadShift);
            return Err(Outcome::BadChallenge("generator-vanishes-at-challenge".into()));
        }
        Response::Solution(w) => w,
    };
    s.post(Role::Prover, Message::Solution(w.clone()));
    if w.len() != n {
        return reject("malformed-solution");
    }
    let b = preconditioned(a, &pre).expect("dimensions checked");
    let bw = b.matvec(&vf, &w).expect("length checked");
    let residual_ok = (0..n).all(|i| {
        let target = if i == n - 1 { Fe::ONE } else { Fe::ZERO };
        vf.sub(vf.mul(r, w[i]), bw[i]) == target
    });
    if !residual_ok {
        return reject("solution-residual");
    }
    if vf.mul(w[n - 1], cb_r) != c_c.eval(&vf, r) {
        return reject("cramer-check-failed");
    }
    extract_det(&vf, n, &c_b, det_g)
}

fn charpoly_flow(s: &mut Session, prover: &mut dyn Prover, a: &Arc<BlackBox>) -> Flow<Certified> {
    let n = a.dim();
    let c = from_prover(prover.characteristic_polynomial(&s.pf(), a))?;
    s.post(Role::Prover, Message::CharPoly(c.clone()));
    if !c.is_monic() || deg(&c) != n as i64 {
        return reject("malformed-charpoly");
    }
    let lambda = s.draw();
    s.post(Role::Verifier, Message::Challenge(lambda));
    let shifted = Arc::new(BlackBox::shift(lambda, a.clone()));
    let det = det_flow(s, prover, &shifted, PrecondKind::Gamma)?;
    let c_at = c.eval(&s.vf(), lambda);
    let consistent = match det {
        Certified::Determinant(d) => d == c_at,
        Certified::Singular(_) => c_at.is_zero(),
        Certified::Poly(_) => false,
    };
    if consistent {
        Ok(Certified::Poly(c))
    } else {
        reject("charpoly-mismatch")
    }
}

/// Options for [`cert_minpoly`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinPolyOptions {
    /// Let the Prover add a second projection of higher degree.
    pub perfectly_complete: bool,
    /// Use these projections instead of drawing them.
    pub projection: Option<(Vec<Fe>, Vec<Fe>)>,
}

fn minpoly_flow(s: &mut Session, prover: &mut dyn Prover, a: &Arc<BlackBox>, opts: &MinPolyOptions) -> Flow<Certified> {
    let n = a.dim();
    let (u, v) = match &opts.projection {
        Some((u, v)) => (u.clone(), v.clone()),
        None => {
            let u: Vec<Fe> = (0..n).map(|_| s.draw()).collect();
            let v: Vec<Fe> = (0..n).map(|_| s.draw()).collect();
            (u, v)
        }
    };
    let (u, v) = (Projection::Dense(u), Projection::Dense(v));
    s.post(Role::Verifier, Message::Projection { u: u.clone(), v: v.clone() });
    let merged = Shape { merged: true, ..Shape::default() };
    let first = generator_flow(s, prover, a, &u, &v, merged)?;
    if !opts.perfectly_complete {
        return Ok(Certified::Poly(first));
    }
    let secondary = from_prover(prover.secondary_projection(&s.pf(), a, &first))?;
    s.post(Role::Prover, Message::Secondary(secondary.clone()));
    let Some((u2, v2)) = secondary else {
        return Ok(Certified::Poly(first));
    };
    if u2.len() != n || v2.len() != n {
        return reject("malformed-secondary");
    }
    let second = generator_flow(s, prover, a, &Projection::Dense(u2), &Projection::Dense(v2), merged)?;
    Ok(Certified::Poly(if second.degree() > first.degree() { second } else { first }))
}

/// Runs `id` on `a` and returns the full transcript. `public` supplies the
/// projections of the protocols that take them as common input.
pub fn run(
    id: ProtocolId,
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
    public: Option<(Projection, Projection)>,
    opts: &MinPolyOptions,
) -> Result<Transcript> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Usage("the matrix must have dimension at least 1".into()));
    }
    id.check_field(n, params.modulus())?;
    let vm = CostMeter::new();
    let pm = CostMeter::new();
    let enc = match id {
        ProtocolId::Fauv | ProtocolId::FauvMerged | ProtocolId::MinPoly | ProtocolId::MinPolyPc => {
            Encoding { monic_h: false, output_h: true }
        }
        ProtocolId::DetGamma | ProtocolId::CharPoly => Encoding { monic_h: true, output_h: false },
        ProtocolId::DetDiag | ProtocolId::DetSimple => Encoding::default(),
    };
    let mut s = Session { params, vm: &vm, pm: &pm, challenger, entries: Vec::new(), enc };

    let flow = match id {
        ProtocolId::Fauv | ProtocolId::FauvMerged => {
            let (u, v) = public.ok_or_else(|| Error::Usage(format!("{id} needs public projections u and v")))?;
            if !u.fits(n) || !v.fits(n) {
                return Err(Error::Usage(format!("projections do not fit dimension {n}")));
            }
            s.post(Role::Public, Message::Projection { u: u.clone(), v: v.clone() });
            let shape = Shape { merged: id == ProtocolId::FauvMerged, ..Shape::default() };
            generator_flow(&mut s, prover, a, &u, &v, shape).map(Certified::Poly)
        }
        ProtocolId::MinPoly => minpoly_flow(&mut s, prover, a, &MinPolyOptions { perfectly_complete: false, ..opts.clone() }),
        ProtocolId::MinPolyPc => minpoly_flow(&mut s, prover, a, &MinPolyOptions { perfectly_complete: true, ..opts.clone() }),
        ProtocolId::DetDiag => det_flow(&mut s, prover, a, PrecondKind::Diagonal),
        ProtocolId::DetGamma => det_flow(&mut s, prover, a, PrecondKind::Gamma),
        ProtocolId::DetSimple => simple_det_flow(&mut s, prover, a),
        ProtocolId::CharPoly => charpoly_flow(&mut s, prover, a),
    };
    let outcome = match flow {
        Ok(c) => Outcome::Accept(c),
        Err(o) => o,
    };
    let entries = std::mem::take(&mut s.entries);
    drop(s);
    Ok(Transcript {
        id,
        params,
        n,
        matrix_digest: a.digest(params),
        entries,
        outcome,
        verifier_cost: vm.snapshot(),
        prover_cost: pm.snapshot(),
        prover_deviated: prover.deviated(),
    })
}

/// Certificate for `f_u^{A,v}` with independent Bézout and solution points.
pub fn cert_fauv(
    a: &Arc<BlackBox>,
    params: FieldParams,
    u: Projection,
    v: Projection,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::Fauv, a, params, prover, challenger, Some((u, v)), &MinPolyOptions::default())
}

/// Certificate for `f_u^{A,v}` with one shared evaluation point.
pub fn cert_fauv_merged(
    a: &Arc<BlackBox>,
    params: FieldParams,
    u: Projection,
    v: Projection,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::FauvMerged, a, params, prover, challenger, Some((u, v)), &MinPolyOptions::default())
}

/// Minimal polynomial certificate with Verifier-drawn projections.
pub fn cert_minpoly(
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
    opts: &MinPolyOptions,
) -> Result<Transcript> {
    let id = if opts.perfectly_complete { ProtocolId::MinPolyPc } else { ProtocolId::MinPoly };
    run(id, a, params, prover, challenger, None, opts)
}

pub fn cert_det_diag(
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::DetDiag, a, params, prover, challenger, None, &MinPolyOptions::default())
}

pub fn cert_det_gamma(
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::DetGamma, a, params, prover, challenger, None, &MinPolyOptions::default())
}

pub fn cert_simple_det(
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::DetSimple, a, params, prover, challenger, None, &MinPolyOptions::default())
}

pub fn cert_charpoly(
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    challenger: &mut dyn Challenger,
) -> Result<Transcript> {
    run(ProtocolId::CharPoly, a, params, prover, challenger, None, &MinPolyOptions::default())
}
