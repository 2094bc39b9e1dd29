//! Python bindings: sparse matrices over Z_p, honest and adversarial sessions,
//! Fiat-Shamir certificates and their replay, plus the polynomial helpers the
//! protocols are built on.

use std::sync::Arc;

use certilin::blackbox::{emit_sms, parse_sms, seeded_sparse, BlackBox, SparseMatrix};
use certilin::poly::{berlekamp_massey as bm, xgcd as xgcd_core};
use certilin::protocol::{
    prove as prove_core, run, seeded_projections, verify_noninteractive, AdversarialProver, Certified, HonestProver,
    MinPolyOptions, Outcome, ProtocolId, Prover, RngChallenger, Strategy, Transcript,
};
use certilin::{Error, Fe, FieldParams, Poly};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(certilin, FieldTooSmall, PyValueError, "The modulus is below the protocol's field-size bound.");
create_exception!(certilin, DigestMismatch, PyValueError, "The transcript belongs to a different matrix.");

fn err(e: Error) -> PyErr {
    match e {
        Error::FieldTooSmall { .. } => FieldTooSmall::new_err(e.to_string()),
        Error::DigestMismatch => DigestMismatch::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn protocol(name: &str) -> PyResult<ProtocolId> {
    name.parse().map_err(err)
}

fn params(p: u64) -> PyResult<FieldParams> {
    FieldParams::new(p).map_err(err)
}

fn ints(xs: &[Fe]) -> Vec<u64> {
    xs.iter().map(|x| x.value()).collect()
}

fn poly(params: FieldParams, coeffs: &[u64]) -> Poly {
    Poly::from_coeffs(coeffs.iter().map(|&x| params.from_u64(x)).collect())
}

/// Square sparse matrix over Z_p.
#[pyclass(name = "Matrix", module = "certilin", frozen)]
pub struct Matrix {
    a: Arc<BlackBox>,
    m: SparseMatrix,
    params: FieldParams,
}

impl Matrix {
    fn wrap(m: SparseMatrix, params: FieldParams) -> Self {
        Matrix { a: Arc::new(BlackBox::Sparse(m.clone())), m, params }
    }
}

#[pymethods]
impl Matrix {
    /// `entries` are 0-based `(row, col, value)`; values are reduced mod p and
    /// repeated positions add up.
    #[new]
    #[pyo3(signature = (n, entries, modulus = 1_000_003))]
    pub fn new(n: usize, entries: Vec<(usize, usize, i64)>, modulus: u64) -> PyResult<Self> {
        let params = params(modulus)?;
        let m = SparseMatrix::new(params, n, entries.into_iter().map(|(i, j, x)| (i, j, x as i128))).map_err(err)?;
        Ok(Matrix::wrap(m, params))
    }

    #[staticmethod]
    pub fn from_sms(text: &str) -> PyResult<Self> {
        let (m, params) = parse_sms(text).map_err(err)?;
        Ok(Matrix::wrap(m, params))
    }

    /// Same matrix as `certilin gen` with these arguments.
    #[staticmethod]
    #[pyo3(signature = (n, density, modulus = 1_000_003, seed = 0))]
    pub fn random(n: usize, density: f64, modulus: u64, seed: u64) -> PyResult<Self> {
        let params = params(modulus)?;
        Ok(Matrix::wrap(seeded_sparse(params, n, density, seed).map_err(err)?, params))
    }

    #[staticmethod]
    #[pyo3(signature = (n, modulus = 1_000_003))]
    pub fn identity(n: usize, modulus: u64) -> PyResult<Self> {
        Ok(Matrix::wrap(SparseMatrix::identity(n), params(modulus)?))
    }

    #[getter]
    pub fn n(&self) -> usize {
        self.m.dim()
    }

    #[getter]
    pub fn nnz(&self) -> usize {
        self.m.nnz()
    }

    #[getter]
    pub fn modulus(&self) -> u64 {
        self.params.modulus()
    }

    pub fn entries(&self) -> Vec<(usize, usize, u64)> {
        self.m.entries().iter().map(|&(i, j, x)| (i, j, x.value())).collect()
    }

    pub fn to_sms(&self) -> String {
        emit_sms(&self.m, self.params)
    }

    /// SHA-256 digest that transcripts bind to, as hex.
    pub fn digest(&self) -> String {
        hex::encode(self.a.digest(self.params))
    }

    pub fn matvec(&self, x: Vec<u64>) -> PyResult<Vec<u64>> {
        let x: Vec<Fe> = x.into_iter().map(|v| self.params.from_u64(v)).collect();
        Ok(ints(&self.a.matvec(&self.params.plain(), &x).map_err(err)?))
    }

    /// Determinant by dense elimination.
    pub fn det(&self) -> PyResult<u64> {
        Ok(self.a.to_dense(self.params).map_err(err)?.det(self.params).value())
    }

    /// Minimal polynomial by dense computation, low degree first.
    pub fn minpoly(&self) -> PyResult<Vec<u64>> {
        Ok(ints(self.a.to_dense(self.params).map_err(err)?.minpoly(self.params).coeffs()))
    }

    /// Characteristic polynomial by dense computation, low degree first.
    pub fn charpoly(&self) -> PyResult<Vec<u64>> {
        let d = self.a.to_dense(self.params).map_err(err)?;
        Ok(ints(d.charpoly(self.params).map_err(err)?.coeffs()))
    }

    /// Honest Fiat-Shamir certificate; same transcript as `certilin prove`.
    #[pyo3(signature = (protocol_name, seed = 0))]
    pub fn prove(&self, protocol_name: &str, seed: u64) -> PyResult<Session> {
        let t = prove_core(protocol(protocol_name)?, &self.a, self.params, seed).map_err(err)?;
        Ok(Session { t })
    }

    /// Interactive session with a seeded Verifier, optionally against a
    /// cheating Prover.
    #[pyo3(signature = (protocol_name, seed = 0, strategy = None))]
    pub fn run(&self, protocol_name: &str, seed: u64, strategy: Option<&str>) -> PyResult<Session> {
        let id = protocol(protocol_name)?;
        id.check_field(self.n(), self.modulus()).map_err(err)?;
        let mut prover: Box<dyn Prover> = match strategy {
            None => Box::new(HonestProver::new(seed)),
            Some(s) => Box::new(AdversarialProver::new(s.parse::<Strategy>().map_err(err)?, seed)),
        };
        let public = seeded_projections(id, self.n(), self.params, seed);
        let mut challenger = RngChallenger::new(seed.wrapping_add(1));
        let t = run(id, &self.a, self.params, prover.as_mut(), &mut challenger, public, &MinPolyOptions::default())
            .map_err(err)?;
        Ok(Session { t })
    }

    /// Replays a transcript against this matrix.
    pub fn verify(&self, transcript: &str) -> PyResult<Verdict> {
        let v = verify_noninteractive(transcript, &self.a, self.params).map_err(err)?;
        Ok(Verdict {
            outcome: v.outcome,
            verifier_field_ops: v.verifier_cost.field_ops(),
            verifier_matvecs: v.verifier_cost.matvec,
            elements_sent: v.communication,
        })
    }

    fn __repr__(&self) -> String {
        format!("Matrix(n={}, nnz={}, p={})", self.n(), self.nnz(), self.modulus())
    }
}

fn status(o: &Outcome) -> &'static str {
    match o {
        Outcome::Accept(_) => "accept",
        Outcome::Reject(_) => "reject",
        Outcome::BadChallenge(_) => "bad_challenge",
    }
}

fn reason(o: &Outcome) -> Option<String> {
    match o {
        Outcome::Accept(_) => None,
        Outcome::Reject(r) | Outcome::BadChallenge(r) => Some(r.clone()),
    }
}

fn determinant(o: &Outcome) -> Option<u64> {
    o.certified().and_then(Certified::determinant).map(Fe::value)
}

fn polynomial(o: &Outcome) -> Option<Vec<u64>> {
    o.certified().and_then(Certified::poly).map(|f| ints(f.coeffs()))
}

fn kernel(o: &Outcome) -> Option<Vec<u64>> {
    match o.certified() {
        Some(Certified::Singular(w)) => Some(ints(w)),
        _ => None,
    }
}

/// A finished session with its transcript and meters.
#[pyclass(name = "Session", module = "certilin", frozen)]
pub struct Session {
    t: Transcript,
}

#[pymethods]
impl Session {
    #[getter]
    pub fn protocol(&self) -> &'static str {
        self.t.id.as_str()
    }

    /// `"accept"`, `"reject"` or `"bad_challenge"`.
    #[getter]
    pub fn status(&self) -> &'static str {
        status(&self.t.outcome)
    }

    #[getter]
    pub fn reason(&self) -> Option<String> {
        reason(&self.t.outcome)
    }

    /// Certified determinant (0 for a certified singular matrix).
    #[getter]
    pub fn determinant(&self) -> Option<u64> {
        determinant(&self.t.outcome)
    }

    /// Certified polynomial, low degree first.
    #[getter]
    pub fn polynomial(&self) -> Option<Vec<u64>> {
        polynomial(&self.t.outcome)
    }

    /// Null vector checked by the Verifier when singularity was certified.
    #[getter]
    pub fn kernel(&self) -> Option<Vec<u64>> {
        kernel(&self.t.outcome)
    }

    #[getter]
    pub fn verifier_field_ops(&self) -> u64 {
        self.t.verifier_cost.field_ops()
    }

    #[getter]
    pub fn verifier_matvecs(&self) -> u64 {
        self.t.verifier_cost.matvec
    }

    #[getter]
    pub fn prover_field_ops(&self) -> u64 {
        self.t.prover_cost.field_ops()
    }

    #[getter]
    pub fn prover_matvecs(&self) -> u64 {
        self.t.prover_cost.matvec
    }

    #[getter]
    pub fn elements_sent(&self) -> u64 {
        self.t.communication()
    }

    #[getter]
    pub fn random_elements(&self) -> u64 {
        self.t.random_elements()
    }

    #[getter]
    pub fn prover_deviated(&self) -> bool {
        self.t.prover_deviated
    }

    pub fn transcript(&self) -> String {
        self.t.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Session({}, {})", self.t.id, self.t.outcome)
    }
}

/// Result of replaying a transcript.
#[pyclass(name = "Verdict", module = "certilin", frozen)]
pub struct Verdict {
    outcome: Outcome,
    #[pyo3(get)]
    verifier_field_ops: u64,
    #[pyo3(get)]
    verifier_matvecs: u64,
    #[pyo3(get)]
    elements_sent: u64,
}

#[pymethods]
impl Verdict {
    #[getter]
    pub fn status(&self) -> &'static str {
        status(&self.outcome)
    }

    #[getter]
    pub fn reason(&self) -> Option<String> {
        reason(&self.outcome)
    }

    #[getter]
    pub fn determinant(&self) -> Option<u64> {
        determinant(&self.outcome)
    }

    #[getter]
    pub fn polynomial(&self) -> Option<Vec<u64>> {
        polynomial(&self.outcome)
    }

    fn __repr__(&self) -> String {
        format!("Verdict({})", self.outcome)
    }
}

#[pyfunction]
pub fn protocols() -> Vec<&'static str> {
    ProtocolId::ALL.iter().map(|p| p.as_str()).collect()
}

#[pyfunction]
pub fn strategies() -> Vec<&'static str> {
    Strategy::ALL.iter().map(|s| s.as_str()).collect()
}

/// Smallest modulus the protocol accepts for dimension `n`.
#[pyfunction]
pub fn min_modulus(protocol_name: &str, n: usize) -> PyResult<u64> {
    Ok(protocol(protocol_name)?.min_modulus(n))
}

#[pyfunction]
pub fn is_prime(n: u64) -> bool {
    certilin::field::is_prime(n)
}

/// `(g, phi, psi)` with `g = phi·a + psi·b` monic; coefficients low degree first.
#[pyfunction]
pub fn xgcd(modulus: u64, a: Vec<u64>, b: Vec<u64>) -> PyResult<(Vec<u64>, Vec<u64>, Vec<u64>)> {
    let params = params(modulus)?;
    let z = xgcd_core(&params.plain(), &poly(params, &a), &poly(params, &b)).map_err(err)?;
    Ok((ints(z.gcd.coeffs()), ints(z.phi.coeffs()), ints(z.psi.coeffs())))
}

/// Minimal generator of a linearly recurrent sequence.
#[pyfunction]
pub fn berlekamp_massey(modulus: u64, seq: Vec<u64>) -> PyResult<Vec<u64>> {
    let params = params(modulus)?;
    let s: Vec<Fe> = seq.into_iter().map(|x| params.from_u64(x)).collect();
    Ok(ints(bm(&params.plain(), &s).map_err(err)?.coeffs()))
}

#[pymodule]
#[pyo3(name = "certilin")]
fn certilin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Matrix>()?;
    m.add_class::<Session>()?;
    m.add_class::<Verdict>()?;
    m.add("FieldTooSmall", m.py().get_type::<FieldTooSmall>())?;
    m.add("DigestMismatch", m.py().get_type::<DigestMismatch>())?;
    for f in [
        wrap_pyfunction!(protocols, m)?,
        wrap_pyfunction!(strategies, m)?,
        wrap_pyfunction!(min_modulus, m)?,
        wrap_pyfunction!(is_prime, m)?,
        wrap_pyfunction!(xgcd, m)?,
        wrap_pyfunction!(berlekamp_massey, m)?,
    ] {
        m.add_function(f)?;
    }
    Ok(())
}
