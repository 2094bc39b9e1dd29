//! Matrix generation, soundness trials, budget benchmarks and the self-test.

use std::sync::Arc;

use anyhow::{bail, Result};
use certilin::blackbox::{oracle_cap, seeded_sparse, BlackBox, SparseMatrix};
use certilin::protocol::{
    fiat_shamir, prove, seeded_projections, AdversarialProver, Certified, Outcome, ProtocolId, Strategy,
};
use certilin::{Fe, FieldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

const DIAGONAL_STREAM: u64 = 0x6469_6167_0000_0000;

/// Seed of trial `k` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k)
}

pub fn default_density(n: usize) -> f64 {
    (3.0 / n as f64).min(1.0)
}

pub fn random_matrix(params: FieldParams, n: usize, density: f64, seed: u64) -> Result<SparseMatrix> {
    Ok(seeded_sparse(params, n, density, seed)?)
}

/// A random sparse matrix plus a random non-zero diagonal, redrawn while the
/// dense oracle (when within its cap) finds it singular.
pub fn invertible_matrix(params: FieldParams, n: usize, density: f64, seed: u64) -> Result<SparseMatrix> {
    for k in 0..64 {
        let s = trial_seed(seed, k);
        let base = random_matrix(params, n, density, s)?;
        let mut r = ChaCha20Rng::seed_from_u64(s ^ DIAGONAL_STREAM);
        let diag: Vec<_> = (0..n).map(|i| (i, i, r.gen_range(1..params.modulus()) as i128)).collect();
        let triples = base.entries().iter().map(|&(i, j, x)| (i, j, x.value() as i128)).chain(diag);
        let m = SparseMatrix::new(params, n, triples)?;
        if n > oracle_cap() || !BlackBox::Sparse(m.clone()).to_dense(params)?.det(params).is_zero() {
            return Ok(m);
        }
    }
    bail!("no invertible {n}x{n} matrix found over Z_{}", params.modulus())
}

/// A random matrix whose second row repeats the first.
pub fn singular_matrix(params: FieldParams, n: usize, density: f64, seed: u64) -> Result<SparseMatrix> {
    let base = random_matrix(params, n, density, seed)?;
    if n == 1 {
        return Ok(SparseMatrix::zero(1));
    }
    let row0: Vec<_> = base.entries().iter().filter(|e| e.0 == 0).map(|&(_, j, x)| (1, j, x.value() as i128)).collect();
    let triples = base.entries().iter().filter(|e| e.0 != 1).map(|&(i, j, x)| (i, j, x.value() as i128)).chain(row0);
    Ok(SparseMatrix::new(params, n, triples)?)
}


/// Lower bound on the probability that a deviating Prover is caught.
pub fn attack_bound(id: ProtocolId, strategy: Strategy, n: usize, p: u64) -> f64 {
    let (n, p) = (n as f64, p as f64);
    if strategy == Strategy::WrongSolution {
        return 1.0 - p.powf(-n);
    }
    let b = match id {
        ProtocolId::Fauv => (1.0 - (2.0 * n - 2.0) / p) * (1.0 - (3.0 * n - 1.0) / p),
        ProtocolId::DetSimple => 1.0 - (3.0 * n - 2.0) / (p - n),
        ProtocolId::CharPoly => 1.0 - 2.0 * n / p,
        _ => 1.0 - (5.0 * n - 3.0) / p,
    };
    b.max(0.0)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct AttackStats {
    pub trials: u64,
    /// Sessions where the Prover actually lied.
    pub deviated: u64,
    /// Deviating sessions the Verifier did not accept.
    pub caught: u64,
    pub bad_challenge: u64,
    /// Sessions accepted with a wrong result.
    pub wrong_accepts: u64,
}

fn is_truthful(id: ProtocolId, a: &BlackBox, params: FieldParams, outcome: &Outcome) -> Result<bool> {
    let Some(c) = outcome.certified() else { return Ok(true) };
    if a.dim() > oracle_cap() {
        return Ok(true);
    }
    let d = a.to_dense(params)?;
    Ok(match c {
        Certified::Determinant(x) => *x == d.det(params),
        Certified::Singular(w) => d.mul_vec(&params.plain(), w).iter().all(|x| x.is_zero()),
        Certified::Poly(f) => match id {
            ProtocolId::CharPoly => *f == d.charpoly(params)?,
            ProtocolId::MinPoly | ProtocolId::MinPolyPc => *f == d.minpoly(params),
            _ => true,
        },
    })
}

pub fn attack(id: ProtocolId, strategy: Strategy, n: usize, params: FieldParams, trials: u64, seed: u64) -> Result<AttackStats> {
    let runs: Vec<Result<AttackStats>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = trial_seed(seed, k);
            let density = default_density(n);
            let m = if strategy == Strategy::SingularDenial {
                singular_matrix(params, n, density, s)?
            } else {
                invertible_matrix(params, n, density, s)?
            };
            let a = Arc::new(BlackBox::Sparse(m));
            let mut prover = AdversarialProver::new(strategy, s);
            let public = seeded_projections(id, n, params, s);
            let t = fiat_shamir(id, &a, params, &mut prover, public)?;
            let dev = u64::from(t.prover_deviated);
            let accepted = t.outcome.is_accept();
            Ok(AttackStats {
                trials: 1,
                deviated: dev,
                caught: dev * u64::from(!accepted),
                bad_challenge: u64::from(t.outcome.is_bad_challenge()),
                wrong_accepts: u64::from(!is_truthful(id, &a, params, &t.outcome)?),
            })
        })
        .collect();
    let mut total = AttackStats::default();
    for r in runs {
        let r = r?;
        total.trials += r.trials;
        total.deviated += r.deviated;
        total.caught += r.caught;
        total.bad_challenge += r.bad_challenge;
        total.wrong_accepts += r.wrong_accepts;
    }
    Ok(total)
}

/// One honest session per size.
pub struct BenchRow {
    pub n: usize,
    pub nnz: usize,
    pub ops: u64,
    pub ops_budget: Option<u64>,
    pub sent: u64,
    pub comm_budget: Option<u64>,
    pub random: u64,
    pub outcome: Outcome,
}

impl BenchRow {
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.outcome.is_accept() {
            v.push("not-accepted");
        }
        if self.ops_budget.is_some_and(|b| self.ops > b) {
            v.push("ops");
        }
        if self.comm_budget.is_some_and(|b| self.sent > b) {
            v.push("communication");
        }
        v
    }
}

pub fn bench(id: ProtocolId, sizes: &[usize], params: FieldParams, seed: u64, density: Option<f64>, identity: bool) -> Result<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&n| {
            id.check_field(n, params.modulus())?;
            let m = if identity {
                SparseMatrix::identity(n)
            } else {
                invertible_matrix(params, n, density.unwrap_or_else(|| default_density(n)), trial_seed(seed, n as u64))?
            };
            let nnz = m.nnz();
            let a = Arc::new(BlackBox::Sparse(m));
            let t = prove(id, &a, params, seed)?;
            Ok(BenchRow {
                n,
                nnz,
                ops: t.verifier_cost.field_ops(),
                ops_budget: id.verifier_budget(n, a.matvec_cost()),
                sent: t.communication(),
                comm_budget: id.communication_budget(n),
                random: t.random_elements(),
                outcome: t.outcome,
            })
        })
        .collect()
}

/// Self-test tallies for one protocol.
#[derive(Debug, Default, Clone)]
pub struct SelfTestLine {
    pub sessions: u64,
    pub accepted: u64,
    pub mismatches: u64,
    pub rejects: u64,
    pub bad_challenge: u64,
    pub singular_ok: u64,
    pub singular_total: u64,
    /// Sizes skipped because the field is too small.
    pub skipped: Vec<usize>,
    /// Plain minpoly accepts of a proper divisor of the minimal polynomial:
    /// the projection missed part of it.
    pub deficient: u64,
    pub expected_deficient: f64,
    pub deficient_variance: f64,
    pub adversarial: u64,
    pub caught: u64,
    /// Sum of the catch-probability bounds over deviating sessions.
    pub expected_caught: f64,
    pub variance: f64,
}

impl SelfTestLine {
    pub fn passes(&self) -> bool {
        let soundness_ok = self.caught as f64 >= self.expected_caught - 3.0 * self.variance.sqrt() - 1e-9;
        let projection_ok =
            self.deficient as f64 <= self.expected_deficient + 3.0 * self.deficient_variance.sqrt() + 1e-9;
        self.mismatches == 0
            && self.rejects == 0
            && self.singular_ok == self.singular_total
            && soundness_ok
            && projection_ok
    }
}

fn matches_oracle(id: ProtocolId, a: &BlackBox, params: FieldParams, outcome: &Outcome) -> Result<bool> {
    if let Some(Certified::Singular(_)) = outcome.certified() {
        if !id.is_determinant() {
            return Ok(false);
        }
    }
    if let Some(Certified::Poly(f)) = outcome.certified() {
        if matches!(id, ProtocolId::Fauv | ProtocolId::FauvMerged) {
            let m = a.to_dense(params)?.minpoly(params);
            return Ok(m.divrem(&params.plain(), f)?.1.is_zero());
        }
    }
    is_truthful(id, a, params, outcome)
}

pub fn selftest(max_n: usize, seeds: u64, params: FieldParams, seed: u64) -> Result<Vec<(ProtocolId, SelfTestLine)>> {
    if max_n > oracle_cap() {
        bail!("--max-n {max_n} exceeds the dense oracle cap {}", oracle_cap());
    }
    ProtocolId::ALL
        .par_iter()
        .map(|&id| {
            let mut line = SelfTestLine::default();
            for n in 1..=max_n {
                if id.check_field(n, params.modulus()).is_err() {
                    line.skipped.push(n);
                    continue;
                }
                for k in 0..seeds {
                    let s = trial_seed(seed, (n as u64) << 32 | k);
                    let a = Arc::new(BlackBox::Sparse(random_matrix(params, n, default_density(n), s)?));
                    let t = prove(id, &a, params, s)?;
                    line.sessions += 1;
                    match &t.outcome {
                        Outcome::Accept(Certified::Poly(f)) if id == ProtocolId::MinPoly => {
                            line.accepted += 1;
                            let m = a.to_dense(params)?.minpoly(params);
                            let deg = m.degree().unwrap_or(0) as f64;
                            let q = 1.0 - (1.0 - deg / params.modulus() as f64).powi(2);
                            line.expected_deficient += q;
                            line.deficient_variance += q * (1.0 - q);
                            if *f != m {
                                if m.divrem(&params.plain(), f)?.1.is_zero() {
                                    line.deficient += 1;
                                } else {
                                    line.mismatches += 1;
                                }
                            }
                        }
                        Outcome::Accept(_) => {
                            line.accepted += 1;
                            line.mismatches += u64::from(!matches_oracle(id, &a, params, &t.outcome)?);
                        }
                        Outcome::Reject(_) => line.rejects += 1,
                        Outcome::BadChallenge(_) => line.bad_challenge += 1,
                    }

                    if id.is_determinant() && n > 1 {
                        let b = Arc::new(BlackBox::Sparse(singular_matrix(params, n, default_density(n), s)?));
                        let t = prove(id, &b, params, s)?;
                        line.singular_total += 1;
                        let ok = matches!(t.outcome.certified(), Some(Certified::Singular(_)))
                            && matches_oracle(id, &b, params, &t.outcome)?;
                        line.singular_ok += u64::from(ok);
                    }

                    let inv = Arc::new(BlackBox::Sparse(invertible_matrix(params, n, default_density(n), s)?));
                    for strategy in [Strategy::WrongGenerator, Strategy::WrongSolution] {
                        let mut prover = AdversarialProver::new(strategy, s);
                        let public = seeded_projections(id, n, params, s);
                        let t = fiat_shamir(id, &inv, params, &mut prover, public)?;
                        if t.prover_deviated {
                            let q = attack_bound(id, strategy, n, params.modulus());
                            line.adversarial += 1;
                            line.caught += u64::from(!t.outcome.is_accept());
                            line.expected_caught += q;
                            line.variance += q * (1.0 - q);
                        }
                    }
                }
            }
            Ok((id, line))
        })
        .collect()
}

/// Values printed for a certified result.
pub fn result_text(c: &Certified) -> String {
    match c {
        Certified::Poly(p) => p.to_string(),
        Certified::Determinant(d) => d.to_string(),
        Certified::Singular(w) => format!("0 (kernel vector {})", w.iter().map(Fe::to_string).collect::<Vec<_>>().join(",")),
    }
}
