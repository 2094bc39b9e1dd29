use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldParams};
use crate::poly::{join_csv, parse_csv_elems, Poly};

/// Who produced a transcript entry. Public entries are common input and are
/// not counted as communication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Public,
    Prover,
    Verifier,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Public => "public",
            Role::Prover => "prover",
            Role::Verifier => "verifier",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Role::Public => 0,
            Role::Prover => 1,
            Role::Verifier => 2,
        }
    }
}

/// A projection vector, either dense or a unit vector `e_i` (0-based index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Dense(Vec<Fe>),
    Unit(usize),
}

impl Projection {
    pub fn len_hint(&self) -> Option<usize> {
        match self {
            Projection::Dense(x) => Some(x.len()),
            Projection::Unit(_) => None,
        }
    }

    pub fn fits(&self, n: usize) -> bool {
        match self {
            Projection::Dense(x) => x.len() == n,
            Projection::Unit(i) => *i < n,
        }
    }

    pub fn to_vec(&self, n: usize) -> Vec<Fe> {
        match self {
            Projection::Dense(x) => x.clone(),
            Projection::Unit(i) => {
                let mut x = vec![Fe::ZERO; n];
                x[*i] = Fe::ONE;
                x
            }
        }
    }

    /// `xᵀw`; free for unit vectors.
    pub fn dot(&self, f: &Field, w: &[Fe]) -> Fe {
        match self {
            Projection::Dense(x) => f.dot(x, w),
            Projection::Unit(i) => w[*i],
        }
    }

    /// Elements needed to communicate the vector.
    fn elements(&self) -> u64 {
        match self {
            Projection::Dense(x) => x.len() as u64,
            Projection::Unit(_) => 0,
        }
    }

    fn text(&self) -> String {
        match self {
            Projection::Dense(x) => join_csv(x),
            Projection::Unit(i) => format!("e{}", i + 1),
        }
    }

    fn parse(params: FieldParams, s: &str) -> Result<Self> {
        if let Some(idx) = s.strip_prefix('e') {
            let i: usize = idx.parse().map_err(|_| Error::Usage(format!("bad unit vector {s:?}")))?;
            if i == 0 {
                return Err(Error::Usage("unit vectors are 1-based".into()));
            }
            return Ok(Projection::Unit(i - 1));
        }
        Ok(Projection::Dense(parse_csv_elems(params, s)?))
    }

    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Projection::Dense(x) => encode_elems(out, x),
            Projection::Unit(i) => {
                out.push(0xff);
                out.extend_from_slice(&(*i as u64).to_le_bytes());
            }
        }
    }
}

/// Announced preconditioner of a determinant certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preconditioner {
    Diagonal(Vec<Fe>),
    Gamma { s: Fe, t: Fe },
}

/// A protocol message. Which party sends it is recorded next to it in the
/// transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Projection { u: Projection, v: Projection },
    Preconditioner(Preconditioner),
    /// `(H, h)`, the claimed generator and residue.
    Commitment { big_h: Poly, h: Poly },
    Bezout { phi: Poly, psi: Poly },
    Challenge(Fe),
    Solution(Vec<Fe>),
    /// The Prover reports that the challenge is a root of the generator.
    BadShift,
    Singular(Vec<Fe>),
    Secondary(Option<(Vec<Fe>, Vec<Fe>)>),
    CharPoly(Poly),
    /// Characteristic polynomials of `B` and of its leading minor.
    CharPolys { c_b: Poly, c_c: Poly },
}

/// Options that change how many elements a commitment costs to send.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Encoding {
    /// `h` is known to be monic, so its leading one is implicit.
    pub monic_h: bool,
    /// `H` is the certified output; it is not counted as communication.
    pub output_h: bool,
}

fn monic_elems(p: &Poly) -> u64 {
    if p.is_monic() {
        p.len() as u64 - 1
    } else {
        p.len() as u64
    }
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Projection { .. } => "projection",
            Message::Preconditioner(Preconditioner::Diagonal(_)) => "precond-diag",
            Message::Preconditioner(Preconditioner::Gamma { .. }) => "precond-gamma",
            Message::Commitment { .. } => "commit",
            Message::Bezout { .. } => "bezout",
            Message::Challenge(_) => "challenge",
            Message::Solution(_) => "solution",
            Message::BadShift => "bad-shift",
            Message::Singular(_) => "singular",
            Message::Secondary(_) => "secondary",
            Message::CharPoly(_) => "charpoly",
            Message::CharPolys { .. } => "charpolys",
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Message::Projection { .. } => 1,
            Message::Preconditioner(Preconditioner::Diagonal(_)) => 2,
            Message::Preconditioner(Preconditioner::Gamma { .. }) => 3,
            Message::Commitment { .. } => 4,
            Message::Bezout { .. } => 5,
            Message::Challenge(_) => 6,
            Message::Solution(_) => 7,
            Message::BadShift => 8,
            Message::Singular(_) => 9,
            Message::Secondary(_) => 10,
            Message::CharPoly(_) => 11,
            Message::CharPolys { .. } => 12,
        }
    }

    /// Field elements this message costs to send. Leading ones of monic
    /// polynomials are implicit.
    pub(crate) fn elements(&self, enc: Encoding) -> u64 {
        match self {
            Message::Projection { u, v } => u.elements() + v.elements(),
            Message::Preconditioner(Preconditioner::Diagonal(d)) => d.len() as u64,
            Message::Preconditioner(Preconditioner::Gamma { .. }) => 2,
            Message::Commitment { big_h, h } => {
                let hh = if enc.output_h { 0 } else { monic_elems(big_h) };
                let lo = if enc.monic_h { monic_elems(h) } else { h.len() as u64 };
                hh + lo
            }
            Message::Bezout { phi, psi } => (phi.len() + psi.len()) as u64,
            Message::Challenge(_) => 1,
            Message::Solution(w) | Message::Singular(w) => w.len() as u64,
            Message::BadShift => 0,
            Message::Secondary(None) => 0,
            Message::Secondary(Some((u, v))) => (u.len() + v.len()) as u64,
            Message::CharPoly(c) => monic_elems(c),
            Message::CharPolys { c_b, c_c } => monic_elems(c_b) + monic_elems(c_c),
        }
    }

    pub fn payload(&self) -> String {
        match self {
            Message::Projection { u, v } => format!("u={} v={}", u.text(), v.text()),
            Message::Preconditioner(Preconditioner::Diagonal(d)) => format!("D={}", join_csv(d)),
            Message::Preconditioner(Preconditioner::Gamma { s, t }) => format!("s={s} t={t}"),
            Message::Commitment { big_h, h } => format!("H={big_h} h={h}"),
            Message::Bezout { phi, psi } => format!("phi={phi} psi={psi}"),
            Message::Challenge(r) => format!("r={r}"),
            Message::Solution(w) | Message::Singular(w) => format!("w={}", join_csv(w)),
            Message::BadShift => String::new(),
            Message::Secondary(None) => "none".into(),
            Message::Secondary(Some((u, v))) => format!("u={} v={}", join_csv(u), join_csv(v)),
            Message::CharPoly(c) => format!("c={c}"),
            Message::CharPolys { c_b, c_c } => format!("cB={c_b} cC={c_c}"),
        }
    }

    pub fn parse(params: FieldParams, kind: &str, payload: &str) -> Result<Message> {
        let fields = Fields::split(payload)?;
        let poly = |k: &str| Poly::parse_csv(params, fields.get(k)?);
        let elems = |k: &str| parse_csv_elems(params, fields.get(k)?);
        let elem = |k: &str| params.parse_elem(fields.get(k)?);
        let msg = match kind {
            "projection" => Message::Projection {
                u: Projection::parse(params, fields.get("u")?)?,
                v: Projection::parse(params, fields.get("v")?)?,
            },
            "precond-diag" => Message::Preconditioner(Preconditioner::Diagonal(elems("D")?)),
            "precond-gamma" => Message::Preconditioner(Preconditioner::Gamma { s: elem("s")?, t: elem("t")? }),
            "commit" => Message::Commitment { big_h: poly("H")?, h: poly("h")? },
            "bezout" => Message::Bezout { phi: poly("phi")?, psi: poly("psi")? },
            "challenge" => Message::Challenge(elem("r")?),
            "solution" => Message::Solution(elems("w")?),
            "singular" => Message::Singular(elems("w")?),
            "bad-shift" => Message::BadShift,
            "secondary" if payload == "none" => Message::Secondary(None),
            "secondary" => Message::Secondary(Some((elems("u")?, elems("v")?))),
            "charpoly" => Message::CharPoly(poly("c")?),
            "charpolys" => Message::CharPolys { c_b: poly("cB")?, c_c: poly("cC")? },
            other => return Err(Error::Usage(format!("unknown message kind {other:?}"))),
        };
        if msg.payload() != payload {
            return Err(Error::Usage(format!("non-canonical payload for {kind}: {payload:?}")));
        }
        Ok(msg)
    }

    /// Canonical bytes absorbed by the Fiat-Shamir hash.
    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        out.push(self.tag());
        match self {
            Message::Projection { u, v } => {
                u.encode(out);
                v.encode(out);
            }
            Message::Preconditioner(Preconditioner::Diagonal(d)) => encode_elems(out, d),
            Message::Preconditioner(Preconditioner::Gamma { s, t }) => encode_elems(out, &[*s, *t]),
            Message::Commitment { big_h, h } => {
                encode_elems(out, big_h.coeffs());
                encode_elems(out, h.coeffs());
            }
            Message::Bezout { phi, psi } => {
                encode_elems(out, phi.coeffs());
                encode_elems(out, psi.coeffs());
            }
            Message::Challenge(r) => encode_elems(out, &[*r]),
            Message::Solution(w) | Message::Singular(w) => encode_elems(out, w),
            Message::BadShift | Message::Secondary(None) => {}
            Message::Secondary(Some((u, v))) => {
                encode_elems(out, u);
                encode_elems(out, v);
            }
            Message::CharPoly(c) => encode_elems(out, c.coeffs()),
            Message::CharPolys { c_b, c_c } => {
                encode_elems(out, c_b.coeffs());
                encode_elems(out, c_c.coeffs());
            }
        }
    }
}

fn encode_elems(out: &mut Vec<u8>, xs: &[Fe]) {
    out.extend_from_slice(&(xs.len() as u64).to_le_bytes());
    for x in xs {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

/// `key=value` pairs of a payload, in order.
struct Fields<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Fields<'a> {
    fn split(payload: &'a str) -> Result<Self> {
        if payload.is_empty() || payload == "none" {
            return Ok(Fields(Vec::new()));
        }
        payload
            .split(' ')
            .map(|tok| tok.split_once('=').ok_or_else(|| Error::Usage(format!("expected key=value, got {tok:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Fields)
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Usage(format!("missing field {key:?}")))
    }
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub role: Role,
    pub msg: Message,
}

impl Entry {
    pub(crate) fn encode(&self) -> Vec<u8> {
        let mut out = vec![self.role.tag()];
        self.msg.encode(&mut out);
        out
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let payload = self.msg.payload();
        if payload.is_empty() {
            write!(f, "{} {}", self.role.as_str(), self.msg.kind())
        } else {
            write!(f, "{} {} {}", self.role.as_str(), self.msg.kind(), payload)
        }
    }
}
