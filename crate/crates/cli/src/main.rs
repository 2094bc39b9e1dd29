//! `certilin`: generate sparse matrices, produce and check Fiat-Shamir
//! certificates, and run the soundness, budget and self-test harnesses.
//!
//! Exit codes: 0 accept or pass, 1 reject, failure or internal error,
//! 2 bad challenge, 64 field too small, 65 transcript/matrix mismatch.

mod harness;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use certilin::blackbox::{emit_sms, parse_sms, BlackBox, SparseMatrix};
use certilin::protocol::{prove, verify_noninteractive, Outcome, ProtocolId, Strategy};
use certilin::{Error, FieldParams};
use clap::{Parser, Subcommand};

use harness::*;
use report::{table, Format, Report};

#[derive(Parser)]
#[command(name = "certilin", version, about = "Interactive certificates for sparse minimal polynomials and determinants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random sparse matrix in SMS format.
    Gen {
        #[arg(long)]
        n: usize,
        /// Probability that an entry is non-zero.
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 1_000_003)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a protocol non-interactively and write its transcript.
    Prove {
        #[arg(long)]
        protocol: ProtocolId,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        transcript: PathBuf,
        /// Reduce the matrix modulo this prime instead of the file's.
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Replay a transcript against a matrix.
    Verify {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a cheating Prover and report how often it is caught.
    Attack {
        #[arg(long)]
        protocol: ProtocolId,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1_000_003)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Verifier cost, communication and randomness of honest runs.
    Bench {
        #[arg(long, default_value = "det-gamma")]
        protocol: ProtocolId,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1_000_003)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Entry density; about 3n non-zeros if omitted.
        #[arg(long)]
        density: Option<f64>,
        /// Use the identity matrix instead of random ones.
        #[arg(long)]
        identity: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check every protocol against the dense oracles on random matrices.
    Selftest {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 1_000_003)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn outcome_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Accept(_) => 0,
        Outcome::Reject(_) => 1,
        Outcome::BadChallenge(_) => 2,
    }
}

fn load_matrix(path: &Path, modulus: Option<u64>) -> Result<(SparseMatrix, FieldParams)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (m, params) = parse_sms(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Some(p) = modulus.filter(|&p| p != params.modulus()) else {
        return Ok((m, params));
    };
    let params = FieldParams::new(p)?;
    let triples = m.entries().iter().map(|&(i, j, x)| (i, j, x.value() as i128));
    Ok((SparseMatrix::new(params, m.dim(), triples)?, params))
}

fn budget_text(used: u64, budget: Option<u64>) -> String {
    match budget {
        Some(b) if used <= b => format!("{used} <= {b} ok"),
        Some(b) => format!("{used} > {b} OVERRUN"),
        None => format!("{used} (no stated budget)"),
    }
}

fn gen(n: usize, density: f64, modulus: u64, seed: u64, out: Option<PathBuf>) -> Result<u8> {
    if n == 0 {
        bail!("--n must be positive");
    }
    let params = FieldParams::new(modulus)?;
    let text = emit_sms(&random_matrix(params, n, density, seed)?, params);
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn prove_cmd(id: ProtocolId, matrix: &Path, seed: u64, out: &Path, modulus: Option<u64>, format: Format) -> Result<u8> {
    let (m, params) = load_matrix(matrix, modulus)?;
    id.check_field(m.dim(), params.modulus())?;
    let nnz = m.nnz();
    let a = Arc::new(BlackBox::Sparse(m));
    let t = prove(id, &a, params, seed)?;
    fs::write(out, t.to_text()).with_context(|| format!("writing {}", out.display()))?;
    let mut r = Report::default();
    r.push("protocol", id)
        .push("n", t.n)
        .push("p", params.modulus())
        .push("nnz", nnz)
        .push("outcome", &t.outcome);
    if let Some(c) = t.outcome.certified() {
        r.push("result", result_text(c));
    }
    r.push("verifier_field_ops", t.verifier_cost.field_ops())
        .push("verifier_matvecs", t.verifier_cost.matvec)
        .push("prover_field_ops", t.prover_cost.field_ops())
        .push("prover_matvecs", t.prover_cost.matvec)
        .push("elements_sent", t.communication())
        .push("random_elements", t.random_elements())
        .push("transcript", out.display());
    print!("{}", r.render(format));
    Ok(outcome_code(&t.outcome))
}

fn verify_cmd(transcript: &Path, matrix: &Path, modulus: Option<u64>, format: Format) -> Result<u8> {
    let text = fs::read_to_string(transcript).with_context(|| format!("reading {}", transcript.display()))?;
    let (m, params) = load_matrix(matrix, modulus)?;
    let a = Arc::new(BlackBox::Sparse(m));
    let v = verify_noninteractive(&text, &a, params)?;
    let n = a.dim();
    let ops = v.verifier_cost.field_ops();
    let ops_budget = v.id.verifier_budget(n, a.matvec_cost());
    let comm_budget = v.id.communication_budget(n);
    let mut r = Report::default();
    r.push("protocol", v.id).push("n", n).push("p", params.modulus()).push("outcome", &v.outcome);
    r.push("verifier_field_ops", budget_text(ops, ops_budget))
        .push("verifier_matvecs", v.verifier_cost.matvec)
        .push("elements_sent", budget_text(v.communication, comm_budget));
    let overrun = ops_budget.is_some_and(|b| ops > b) || comm_budget.is_some_and(|b| v.communication > b);
    r.push("budget", if overrun { "OVERRUN" } else { "ok" });
    print!("{}", r.render(format));
    Ok(outcome_code(&v.outcome))
}

#[allow(clippy::too_many_arguments)]
fn attack_cmd(id: ProtocolId, strategy: Strategy, trials: u64, n: usize, modulus: u64, seed: u64, format: Format) -> Result<u8> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let params = FieldParams::new(modulus)?;
    id.check_field(n, modulus)?;
    let s = attack(id, strategy, n, params, trials, seed)?;
    let bound = attack_bound(id, strategy, n, modulus);
    let mut r = Report::default();
    r.push("protocol", id)
        .push("strategy", strategy)
        .push("n", n)
        .push("p", modulus)
        .push("trials", s.trials)
        .push("deviating", s.deviated)
        .push("caught", s.caught)
        .push("bad_challenge", s.bad_challenge)
        .push("accepted_wrong_result", s.wrong_accepts);
    let code = if s.deviated == 0 {
        r.push("rejection_rate", "n/a")
            .push("bound", format!("{bound:.6}"))
            .push("verdict", "non-exposing (the Prover never deviated; every session was truthful)");
        0
    } else {
        let rate = s.caught as f64 / s.deviated as f64;
        let sigma = (bound * (1.0 - bound) / s.deviated as f64).sqrt();
        let pass = rate >= bound - 3.0 * sigma;
        r.push("rejection_rate", format!("{rate:.6}"))
            .push("bound", format!("{bound:.6}"))
            .push("threshold", format!("{:.6}", bound - 3.0 * sigma))
            .push("verdict", if pass { "PASS" } else { "FAIL" });
        u8::from(!pass)
    };
    print!("{}", r.render(format));
    Ok(code)
}

fn opt(x: Option<u64>) -> String {
    x.map_or_else(|| "-".to_string(), |b| b.to_string())
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(id: ProtocolId, sizes: &[usize], modulus: u64, seed: u64, density: Option<f64>, identity: bool, format: Format) -> Result<u8> {
    if sizes.is_empty() {
        bail!("--sizes must list at least one dimension");
    }
    let params = FieldParams::new(modulus)?;
    let rows = bench(id, sizes, params, seed, density, identity)?;
    let mut any = false;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let v = r.violations();
            any |= !v.is_empty();
            vec![
                r.n.to_string(),
                r.nnz.to_string(),
                r.ops.to_string(),
                opt(r.ops_budget),
                r.sent.to_string(),
                opt(r.comm_budget),
                r.random.to_string(),
                if v.is_empty() { "none".to_string() } else { v.join("+") },
            ]
        })
        .collect();
    let header = ["n", "nnz", "verifier_ops", "ops_budget", "elements_sent", "comm_budget", "random_elements", "violations"];
    println!("{id}");
    print!("{}", table("bench", &header, &cells, format));
    Ok(u8::from(any))
}

fn selftest_cmd(max_n: usize, seeds: u64, modulus: u64, seed: u64, format: Format) -> Result<u8> {
    let params = FieldParams::new(modulus)?;
    let lines = selftest(max_n, seeds, params, seed)?;
    let mut all = true;
    let mut cells = Vec::new();
    let mut notes = Vec::new();
    for (id, l) in &lines {
        let pass = l.passes();
        all &= pass;
        if let (Some(lo), Some(hi)) = (l.skipped.first(), l.skipped.last()) {
            notes.push(format!(
                "{id}: n = {lo}..{hi} skipped, field too small (requires p >= {})",
                id.min_modulus(*hi)
            ));
        }
        cells.push(vec![
            id.to_string(),
            l.sessions.to_string(),
            l.accepted.to_string(),
            l.mismatches.to_string(),
            l.deficient.to_string(),
            l.rejects.to_string(),
            l.bad_challenge.to_string(),
            format!("{}/{}", l.singular_ok, l.singular_total),
            format!("{}/{}", l.caught, l.adversarial),
            if pass { "PASS" } else { "FAIL" }.to_string(),
        ]);
    }
    let header = ["protocol", "sessions", "accepted", "mismatches", "deficient", "rejects", "bad_challenge", "singular", "caught", "status"];
    print!("{}", table("selftest", &header, &cells, format));
    for note in notes {
        match format {
            Format::Text => println!("note: {note}"),
            Format::Kv => println!("note={note}"),
        }
    }
    match format {
        Format::Text => println!("selftest: {}", if all { "PASS" } else { "FAIL" }),
        Format::Kv => println!("selftest={}", if all { "PASS" } else { "FAIL" }),
    }
    Ok(u8::from(!all))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { n, density, modulus, seed, out } => gen(n, density, modulus, seed, out),
        Command::Prove { protocol, matrix, seed, transcript, modulus, format } => {
            prove_cmd(protocol, &matrix, seed, &transcript, modulus, format)
        }
        Command::Verify { transcript, matrix, modulus, format } => verify_cmd(&transcript, &matrix, modulus, format),
        Command::Attack { protocol, strategy, trials, n, modulus, seed, format } => {
            attack_cmd(protocol, strategy, trials, n, modulus, seed, format)
        }
        Command::Bench { protocol, sizes, modulus, seed, density, identity, format } => {
            bench_cmd(protocol, &sizes, modulus, seed, density, identity, format)
        }
        Command::Selftest { max_n, seeds, modulus, seed, format } => selftest_cmd(max_n, seeds, modulus, seed, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = match e.downcast_ref::<Error>() {
                Some(Error::FieldTooSmall { protocol, required, p }) => {
                    eprintln!("error: field too small for {protocol}: requires p ≥ {required}, got p = {p}");
                    return ExitCode::from(64);
                }
                Some(Error::DigestMismatch) => 65,
                _ => 1,
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
