//! Non-interactive certificates: Fiat-Shamir proving and transcript replay.

use std::collections::VecDeque;
use std::sync::Arc;

use super::challenge::FiatShamir;
use super::message::{Message, Preconditioner, Projection, Role};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::prover::{DetOpening, HonestProver, PrecondKind, Prover, Response, SimpleOpening};
use super::session::{run, MinPolyOptions};
use super::transcript::{ParsedTranscript, Transcript};
use super::{Outcome, ProtocolId};
use crate::blackbox::BlackBox;
use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::meter::CostReport;
use crate::poly::Poly;

/// Runs `id` with challenges derived from the transcript hash.
pub fn fiat_shamir(
    id: ProtocolId,
    a: &Arc<BlackBox>,
    params: FieldParams,
    prover: &mut dyn Prover,
    public: Option<(Projection, Projection)>,
) -> Result<Transcript> {
    let mut challenger = FiatShamir::new(id, a.dim(), params.modulus(), &a.digest(params));
    run(id, a, params, prover, &mut challenger, public, &MinPolyOptions::default())
}

/// Public `(u, v)` for protocols that take them, drawn from `seed`.
pub fn seeded_projections(id: ProtocolId, n: usize, params: FieldParams, seed: u64) -> Option<(Projection, Projection)> {
    id.takes_public_projection().then(|| {
        let f = params.plain();
        let mut r = ChaCha20Rng::seed_from_u64(seed ^ 0x7072_6f6a_0000_0000);
        (Projection::Dense(f.sample_vec(&mut r, n)), Projection::Dense(f.sample_vec(&mut r, n)))
    })
}

/// Honest Fiat-Shamir certificate; `seed` drives the Prover and any public
/// projections.
pub fn prove(id: ProtocolId, a: &Arc<BlackBox>, params: FieldParams, seed: u64) -> Result<Transcript> {
    id.check_field(a.dim(), params.modulus())?;
    let public = seeded_projections(id, a.dim(), params, seed);
    fiat_shamir(id, a, params, &mut HonestProver::new(seed), public)
}

/// Result of [`verify_noninteractive`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub id: ProtocolId,
    pub outcome: Outcome,
    /// Meter of the replayed Verifier.
    pub verifier_cost: CostReport,
    /// Elements the recorded Prover sent.
    pub communication: u64,
}

/// Plays back recorded Prover messages in order.
struct ReplayProver {
    queue: VecDeque<Message>,
}

fn unexpected<T>() -> Result<T> {
    Err(Error::Integrity("recorded Prover message does not fit the protocol".into()))
}

impl ReplayProver {
    fn next(&mut self) -> Result<Message> {
        self.queue.pop_front().ok_or_else(|| Error::Integrity("transcript ends early".into()))
    }
}

impl Prover for ReplayProver {
    fn open_determinant(&mut self, _: &Field, _: &Arc<BlackBox>, kind: PrecondKind) -> Result<DetOpening> {
        match (self.next()?, kind) {
            (Message::Singular(w), _) => Ok(DetOpening::Singular(w)),
            (Message::Preconditioner(Preconditioner::Diagonal(d)), PrecondKind::Diagonal) => match self.next()? {
                Message::Projection { u: Projection::Dense(u), v: Projection::Dense(v) } => {
                    Ok(DetOpening::Diagonal { d, u, v })
                }
                _ => unexpected(),
            },
            (Message::Preconditioner(Preconditioner::Gamma { s, t }), PrecondKind::Gamma) => Ok(DetOpening::Gamma { s, t }),
            _ => unexpected(),
        }
    }

    fn commit(&mut self, _: &Field, _: &BlackBox, _: &[Fe], _: &[Fe]) -> Result<(Poly, Poly)> {
        match self.next()? {
            Message::Commitment { big_h, h } => Ok((big_h, h)),
            _ => unexpected(),
        }
    }

    fn bezout(&mut self, _: &Field) -> Result<(Poly, Poly)> {
        match self.next()? {
            Message::Bezout { phi, psi } => Ok((phi, psi)),
            _ => unexpected(),
        }
    }

    fn respond(&mut self, _: &Field, _: Fe) -> Result<Response> {
        match self.next()? {
            Message::Solution(w) => Ok(Response::Solution(w)),
            Message::BadShift => Ok(Response::BadShift),
            _ => unexpected(),
        }
    }

    fn secondary_projection(&mut self, _: &Field, _: &BlackBox, _: &Poly) -> Result<Option<(Vec<Fe>, Vec<Fe>)>> {
        match self.next()? {
            Message::Secondary(x) => Ok(x),
            _ => unexpected(),
        }
    }

    fn characteristic_polynomial(&mut self, _: &Field, _: &BlackBox) -> Result<Poly> {
        match self.next()? {
            Message::CharPoly(c) => Ok(c),
            _ => unexpected(),
        }
    }

    fn open_simple(&mut self, _: &Field, _: &Arc<BlackBox>) -> Result<SimpleOpening> {
        match self.next()? {
            Message::Singular(w) => Ok(SimpleOpening::Singular(w)),
            Message::Preconditioner(Preconditioner::Gamma { s, t }) => match self.next()? {
                Message::CharPolys { c_b, c_c } => Ok(SimpleOpening::CharPolys { s, t, c_b, c_c }),
                _ => unexpected(),
            },
            _ => unexpected(),
        }
    }
}

/// Checks a Fiat-Shamir transcript against the matrix it claims to be about.
///
/// Every challenge is recomputed and every Verifier check replayed; the
/// regenerated transcript must equal `text` byte for byte. Fails with
/// [`Error::DigestMismatch`] when the header names a different matrix or
/// field; malformed or inconsistent transcripts yield `Reject`.
pub fn verify_noninteractive(text: &str, a: &Arc<BlackBox>, params: FieldParams) -> Result<Verification> {
    let (id, n, tparams, digest) = ParsedTranscript::parse_header(text)?;
    if tparams != params || n != a.dim() || digest != a.digest(params) {
        return Err(Error::DigestMismatch);
    }
    let malformed = |reason: &str| Verification {
        id,
        outcome: Outcome::reject(reason),
        verifier_cost: CostReport::default(),
        communication: 0,
    };
    let Ok(parsed) = ParsedTranscript::parse(text) else {
        return Ok(malformed("malformed-transcript"));
    };
    let public = if id.takes_public_projection() {
        match parsed.entries.first() {
            Some(e) if e.role == Role::Public => match &e.msg {
                Message::Projection { u, v } if u.fits(n) && v.fits(n) => Some((u.clone(), v.clone())),
                _ => return Ok(malformed("malformed-transcript")),
            },
            _ => return Ok(malformed("malformed-transcript")),
        }
    } else {
        None
    };
    let queue = parsed.entries.into_iter().filter(|e| e.role == Role::Prover).map(|e| e.msg).collect();
    let mut prover = ReplayProver { queue };
    let replayed = fiat_shamir(id, a, params, &mut prover, public)?;
    let outcome = if replayed.to_text() == text {
        replayed.outcome.clone()
    } else {
        Outcome::reject("transcript-mismatch")
    };
    Ok(Verification {
        id,
        outcome,
        verifier_cost: replayed.verifier_cost,
        communication: replayed.prover_cost.elements_sent,
    })
}
