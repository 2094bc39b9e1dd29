use std::fmt::Write as _;

use super::message::{Entry, Message, Role};
use super::{Outcome, ProtocolId};
use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::meter::CostReport;

/// A finished session: every message in order, the verdict, and both
/// parties' meters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub id: ProtocolId,
    pub params: FieldParams,
    pub n: usize,
    pub matrix_digest: [u8; 32],
    pub entries: Vec<Entry>,
    pub outcome: Outcome,
    pub verifier_cost: CostReport,
    pub prover_cost: CostReport,
    /// Whether the Prover deviated from the honest messages.
    pub prover_deviated: bool,
}

pub(crate) fn header(id: ProtocolId, n: usize, p: u64, digest: &[u8; 32]) -> String {
    format!("certilin/1 {id} n={n} p={p} matrix={}", hex::encode(digest))
}

impl Transcript {
    /// Canonical text form: header, one line per message, outcome line. LF
    /// terminated, single spaces, no trailing whitespace.
    pub fn to_text(&self) -> String {
        let mut out = header(self.id, self.n, self.params.modulus(), &self.matrix_digest);
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(out, "{e}");
        }
        let _ = writeln!(out, "outcome {}", self.outcome);
        out
    }

    /// Elements the Prover sent.
    pub fn communication(&self) -> u64 {
        self.prover_cost.elements_sent
    }

    /// Random field elements drawn by both parties.
    pub fn random_elements(&self) -> u64 {
        self.prover_cost.random_draws + self.verifier_cost.random_draws
    }
}

/// The parts of a transcript file that can be read without replaying it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTranscript {
    pub id: ProtocolId,
    pub n: usize,
    pub params: FieldParams,
    pub matrix_digest: [u8; 32],
    pub entries: Vec<Entry>,
    /// Payload of the final `outcome` line.
    pub outcome: String,
}

impl ParsedTranscript {
    /// Reads only the header line: protocol, dimension, field and digest.
    pub fn parse_header(text: &str) -> Result<(ProtocolId, usize, FieldParams, [u8; 32])> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let head = text.split('\n').next().unwrap_or("");
        let tok: Vec<&str> = head.split(' ').collect();
        if tok.len() != 5 || tok[0] != "certilin/1" {
            return Err(err("header must be \"certilin/1 <protocol> n=<n> p=<p> matrix=<digest>\"".into()));
        }
        let id: ProtocolId = tok[1].parse().map_err(|e: Error| err(e.to_string()))?;
        let field = |t: &'_ str, key: &str| -> Result<String> {
            t.strip_prefix(key).map(str::to_string).ok_or_else(|| err(format!("expected {key}...")))
        };
        let n: usize = field(tok[2], "n=")?.parse().map_err(|_| err("bad n".into()))?;
        let p: u64 = field(tok[3], "p=")?.parse().map_err(|_| err("bad p".into()))?;
        let params = FieldParams::new(p).map_err(|e| err(e.to_string()))?;
        let mut digest = [0u8; 32];
        hex::decode_to_slice(field(tok[4], "matrix=")?, &mut digest).map_err(|_| err("bad matrix digest".into()))?;
        Ok((id, n, params, digest))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let (id, n, params, matrix_digest) = Self::parse_header(text)?;
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l)).skip(1);

        let mut entries = Vec::new();
        let mut outcome = None;
        for (ln, line) in lines.by_ref() {
            if let Some(rest) = line.strip_prefix("outcome ") {
                outcome = Some((ln, rest.to_string()));
                break;
            }
            let mut parts = line.splitn(3, ' ');
            let role = match parts.next() {
                Some("public") => Role::Public,
                Some("prover") => Role::Prover,
                Some("verifier") => Role::Verifier,
                _ => return Err(err(ln, format!("unknown role in {line:?}"))),
            };
            let kind = parts.next().ok_or_else(|| err(ln, "missing message kind".into()))?;
            let payload = parts.next().unwrap_or("");
            let msg = Message::parse(params, kind, payload).map_err(|e| err(ln, e.to_string()))?;
            entries.push(Entry { role, msg });
        }
        let (ln, outcome) = outcome.ok_or_else(|| err(text.split('\n').count(), "missing outcome line".into()))?;
        let rest: Vec<(usize, &str)> = lines.collect();
        if rest.len() != 1 || !rest[0].1.is_empty() {
            return Err(err(ln, "outcome must be the last line, terminated by a newline".into()));
        }
        Ok(ParsedTranscript { id, n, params, matrix_digest, entries, outcome })
    }
}
