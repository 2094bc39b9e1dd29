//! Sources of Verifier randomness.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::message::Entry;
use super::ProtocolId;
use crate::field::{Fe, Field};

/// Domain separator of the Fiat-Shamir hash.
pub const DOMAIN: &[u8] = b"certilin/1";

/// Supplies the Verifier's random field elements. Every transcript entry is
/// shown to the challenger before the next draw.
pub trait Challenger {
    fn absorb(&mut self, entry: &Entry);

    /// Draws one element, charging one random draw to `f`'s meter.
    fn draw(&mut self, f: &Field) -> Fe;
}

/// Interactive Verifier: a seeded ChaCha20 stream; ignores the transcript.
#[derive(Debug, Clone)]
pub struct RngChallenger {
    rng: ChaCha20Rng,
}

impl RngChallenger {
    pub fn new(seed: u64) -> Self {
        RngChallenger { rng: ChaCha20Rng::seed_from_u64(seed) }
    }
}

impl Challenger for RngChallenger {
    fn absorb(&mut self, _entry: &Entry) {}

    fn draw(&mut self, f: &Field) -> Fe {
        f.sample(&mut self.rng)
    }
}

/// Challenges derived from SHA-256 of everything said so far.
///
/// The state starts as `H(DOMAIN ‖ id ‖ n ‖ p ‖ matrix digest)` and absorbs
/// each entry as `state ← H(state ‖ entry bytes)`. The `k`-th draw hashes
/// `state ‖ "challenge" ‖ k` and takes the first 64-bit little-endian chunk
/// below the largest multiple of p; if all four chunks are rejected, `k`
/// advances and the draw is retried.
#[derive(Debug, Clone)]
pub struct FiatShamir {
    state: [u8; 32],
    counter: u64,
}

impl FiatShamir {
    pub fn new(id: ProtocolId, n: usize, p: u64, matrix_digest: &[u8; 32]) -> Self {
        let mut h = Sha256::new();
        h.update(DOMAIN);
        h.update([0u8]);
        h.update(id.as_str().as_bytes());
        h.update([0u8]);
        h.update((n as u64).to_le_bytes());
        h.update(p.to_le_bytes());
        h.update(matrix_digest);
        FiatShamir { state: h.finalize().into(), counter: 0 }
    }
}

impl Challenger for FiatShamir {
    fn absorb(&mut self, entry: &Entry) {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update(entry.encode());
        self.state = h.finalize().into();
    }

    fn draw(&mut self, f: &Field) -> Fe {
        if let Some(m) = f.meter() {
            m.count_draw();
        }
        let p = f.modulus();
        let limit = (u64::MAX / p) * p;
        loop {
            let mut h = Sha256::new();
            h.update(self.state);
            h.update(b"challenge");
            h.update(self.counter.to_le_bytes());
            self.counter += 1;
            let digest: [u8; 32] = h.finalize().into();
            for chunk in digest.chunks_exact(8) {
                let x = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
                if x < limit {
                    return f.params().from_u64(x % p);
                }
            }
        }
    }
}

/// Replays a fixed list of challenges, then falls back to zero. Meant for
/// reproducing a run with known Verifier coins.
#[derive(Debug, Clone, Default)]
pub struct ScriptedChallenger {
    queue: VecDeque<Fe>,
}

impl ScriptedChallenger {
    pub fn new(values: impl IntoIterator<Item = Fe>) -> Self {
        ScriptedChallenger { queue: values.into_iter().collect() }
    }
}

impl Challenger for ScriptedChallenger {
    fn absorb(&mut self, _entry: &Entry) {}

    fn draw(&mut self, f: &Field) -> Fe {
        if let Some(m) = f.meter() {
            m.count_draw();
        }
        self.queue.pop_front().unwrap_or(Fe::ZERO)
    }
}

/// Records every draw of an inner challenger.
pub struct Recording<'c> {
    inner: &'c mut dyn Challenger,
    pub draws: Vec<Fe>,
}

impl<'c> Recording<'c> {
    pub fn new(inner: &'c mut dyn Challenger) -> Self {
        Recording { inner, draws: Vec::new() }
    }
}

impl Challenger for Recording<'_> {
    fn absorb(&mut self, entry: &Entry) {
        self.inner.absorb(entry);
    }

    fn draw(&mut self, f: &Field) -> Fe {
        let x = self.inner.draw(f);
        self.draws.push(x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use crate::protocol::message::{Message, Role};

    #[test]
    fn fiat_shamir_is_deterministic_and_domain_separated() {
        let params = FieldParams::new(1_000_003).unwrap();
        let f = params.plain();
        let entry = Entry { role: Role::Prover, msg: Message::Challenge(Fe::ONE) };
        let run = |digest: [u8; 32]| {
            let mut c = FiatShamir::new(ProtocolId::DetGamma, 4, params.modulus(), &digest);
            c.absorb(&entry);
            (0..5).map(|_| c.draw(&f)).collect::<Vec<_>>()
        };
        assert_eq!(run([1; 32]), run([1; 32]));
        assert_ne!(run([1; 32]), run([2; 32]));
        assert!(run([3; 32]).iter().all(|x| x.value() < params.modulus()));
    }

    #[test]
    fn fiat_shamir_draws_are_roughly_uniform_mod_small_p() {
        let params = FieldParams::new(7).unwrap();
        let f = params.plain();
        let mut c = FiatShamir::new(ProtocolId::Fauv, 2, 7, &[0; 32]);
        let mut counts = [0u32; 7];
        for _ in 0..7000 {
            counts[c.draw(&f).value() as usize] += 1;
        }
        assert!(counts.iter().all(|&k| (850..1150).contains(&k)), "{counts:?}");
    }
}
