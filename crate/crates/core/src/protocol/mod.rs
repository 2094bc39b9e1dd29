//! Interactive certificates as Prover/Verifier sessions.
//!
//! A session alternates calls into a [`Prover`] with Verifier checks. Every
//! message is appended to a [`Transcript`] and shown to the [`Challenger`]
//! before the Verifier's next random draw, so the same code runs both the
//! interactive protocol (with [`RngChallenger`]) and its Fiat-Shamir version
//! (with [`FiatShamir`]). Each party charges its own [`CostMeter`].
//!
//! [`CostMeter`]: crate::meter::CostMeter

mod adversary;
mod challenge;
mod message;
mod prover;
mod replay;
mod session;
mod transcript;

use std::fmt;
use std::str::FromStr;

pub use adversary::{AdversarialProver, Strategy};
pub use challenge::{Challenger, FiatShamir, Recording, RngChallenger, ScriptedChallenger, DOMAIN};
pub use message::{Entry, Message, Preconditioner, Projection, Role};
pub use prover::{
    preconditioned, DetOpening, HonestProver, PrecondKind, Prover, Response, SimpleOpening, PRECOND_TRIES,
    SECONDARY_TRIES,
};
pub use replay::{fiat_shamir, prove, seeded_projections, verify_noninteractive, Verification};
pub use session::{
    cert_charpoly, cert_det_diag, cert_det_gamma, cert_fauv, cert_fauv_merged, cert_minpoly, cert_simple_det, run,
    MinPolyOptions, SIMPLE_RESAMPLES,
};
pub use transcript::{ParsedTranscript, Transcript};

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::poly::Poly;

/// The certificates this crate implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    /// `f_u^{A,v}` for public `u, v`, with independent `r0` and `r1`.
    Fauv,
    /// `f_u^{A,v}` with `r0 = r1`.
    FauvMerged,
    /// Minimal polynomial with Verifier-chosen projections.
    MinPoly,
    /// Minimal polynomial, perfectly complete: the Prover may add a second
    /// projection of higher degree.
    MinPolyPc,
    DetDiag,
    DetGamma,
    /// Determinant from two characteristic polynomials and Cramer's rule.
    DetSimple,
    CharPoly,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 8] = [
        ProtocolId::Fauv,
        ProtocolId::FauvMerged,
        ProtocolId::MinPoly,
        ProtocolId::MinPolyPc,
        ProtocolId::DetDiag,
        ProtocolId::DetGamma,
        ProtocolId::DetSimple,
        ProtocolId::CharPoly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::Fauv => "fauv",
            ProtocolId::FauvMerged => "fauv-merged",
            ProtocolId::MinPoly => "minpoly",
            ProtocolId::MinPolyPc => "minpoly-pc",
            ProtocolId::DetDiag => "det-diag",
            ProtocolId::DetGamma => "det-gamma",
            ProtocolId::DetSimple => "det-simple",
            ProtocolId::CharPoly => "charpoly",
        }
    }

    /// Smallest modulus the protocol accepts for dimension `n`.
    pub fn min_modulus(self, n: usize) -> u64 {
        let n = n as u64;
        let five = (5 * n).saturating_sub(2);
        match self {
            ProtocolId::Fauv => 3 * n,
            ProtocolId::FauvMerged | ProtocolId::MinPoly | ProtocolId::MinPolyPc => five,
            ProtocolId::DetDiag => (n * n.saturating_sub(1) / 2).max(five),
            ProtocolId::DetGamma | ProtocolId::DetSimple | ProtocolId::CharPoly => (n * n - n).max(five),
        }
    }

    pub fn check_field(self, n: usize, p: u64) -> Result<()> {
        let required = self.min_modulus(n);
        if p < required {
            return Err(Error::FieldTooSmall { protocol: self.as_str(), required, p });
        }
        Ok(())
    }

    /// Protocols whose projections are common input.
    pub fn takes_public_projection(self) -> bool {
        matches!(self, ProtocolId::Fauv | ProtocolId::FauvMerged)
    }

    pub fn is_determinant(self) -> bool {
        matches!(self, ProtocolId::DetDiag | ProtocolId::DetGamma | ProtocolId::DetSimple)
    }

    /// Verifier field operations allowed for an `n × n` operator whose matvec
    /// costs `mu`. `None` where no linear bound applies: the simple
    /// determinant Verifier runs a full gcd, and the composite protocols have
    /// no stated budget.
    pub fn verifier_budget(self, n: usize, mu: u64) -> Option<u64> {
        let n64 = n as u64;
        let log = (usize::BITS - n.saturating_sub(1).leading_zeros()) as u64;
        match self {
            ProtocolId::Fauv => Some(mu + 17 * n64),
            ProtocolId::FauvMerged | ProtocolId::MinPoly => Some(mu + 13 * n64),
            ProtocolId::DetDiag => Some(mu + 15 * n64 + 4 * log),
            ProtocolId::DetGamma => Some(mu + 13 * n64 + 4 * log),
            ProtocolId::MinPolyPc | ProtocolId::DetSimple | ProtocolId::CharPoly => None,
        }
    }

    /// Field elements the Prover may send, where a bound is stated.
    pub fn communication_budget(self, n: usize) -> Option<u64> {
        let n = n as u64;
        match self {
            ProtocolId::Fauv | ProtocolId::FauvMerged | ProtocolId::MinPoly => Some(4 * n),
            ProtocolId::DetDiag => Some(8 * n),
            ProtocolId::DetGamma => Some(5 * n),
            ProtocolId::MinPolyPc | ProtocolId::DetSimple | ProtocolId::CharPoly => None,
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown protocol {s:?}")))
    }
}

/// What an accepting Verifier has certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certified {
    /// A generator, minimal polynomial or characteristic polynomial.
    Poly(Poly),
    Determinant(Fe),
    /// `det = 0`, with the checked null vector.
    Singular(Vec<Fe>),
}

impl Certified {
    /// The determinant, if this is a determinant result.
    pub fn determinant(&self) -> Option<Fe> {
        match self {
            Certified::Determinant(d) => Some(*d),
            Certified::Singular(_) => Some(Fe::ZERO),
            Certified::Poly(_) => None,
        }
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Certified::Poly(p) => Some(p),
            _ => None,
        }
    }
}

/// Verdict of a session. `Reject` means the Prover was caught; `BadChallenge`
/// means the Verifier's randomness was unlucky.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accept(Certified),
    Reject(String),
    BadChallenge(String),
}

impl Outcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, Outcome::Accept(_))
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, Outcome::Reject(_))
    }

    pub fn is_bad_challenge(&self) -> bool {
        matches!(self, Outcome::BadChallenge(_))
    }

    pub fn certified(&self) -> Option<&Certified> {
        match self {
            Outcome::Accept(c) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn reject(reason: &str) -> Outcome {
        Outcome::Reject(reason.to_string())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accept(Certified::Poly(p)) => write!(f, "Accept poly={p}"),
            Outcome::Accept(Certified::Determinant(d)) => write!(f, "Accept det={d}"),
            Outcome::Accept(Certified::Singular(_)) => write!(f, "Accept det=0 singular"),
            Outcome::Reject(r) => write!(f, "Reject {r}"),
            Outcome::BadChallenge(d) => write!(f, "BadChallenge {d}"),
        }
    }
}
