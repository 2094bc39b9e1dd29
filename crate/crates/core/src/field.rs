//! Arithmetic in Z_p for a runtime prime p < 2^62.
//!
//! Elements are plain canonical residues ([`Fe`]); the modulus lives in
//! [`FieldParams`] and every operation goes through a [`Field`] handle, which
//! optionally charges a [`CostMeter`].

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::meter::CostMeter;

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

/// A field element: the canonical representative in `[0, p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// 8-byte little-endian form, used for transcript hashing.
    pub fn to_le_bytes(self) -> [u8; 8] {
        self.0.to_le_bytes()
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    p: u64,
}

impl FieldParams {
    /// Validates `p`: odd, `3 <= p < 2^62`, and prime (deterministic
    /// Miller-Rabin, exact for all 64-bit inputs).
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_MODULUS).contains(&p) || p % 2 == 0 || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(FieldParams { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Unmetered arithmetic handle.
    pub fn plain(&self) -> Field<'static> {
        Field {
            params: *self,
            meter: None,
        }
    }

    /// Arithmetic handle that charges `meter`.
    pub fn metered<'m>(&self, meter: &'m CostMeter) -> Field<'m> {
        Field {
            params: *self,
            meter: Some(meter),
        }
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(&self, x: i128) -> Fe {
        Fe(x.rem_euclid(self.p as i128) as u64)
    }

    pub fn from_u64(&self, x: u64) -> Fe {
        Fe(x % self.p)
    }

    /// Accepts `x` only if it already is a canonical residue.
    pub fn canonical(&self, x: u64) -> Result<Fe> {
        if x < self.p {
            Ok(Fe(x))
        } else {
            Err(Error::Usage(format!("{x} is not a residue modulo {}", self.p)))
        }
    }

    /// Parses the canonical decimal text form (digits only, no sign, no
    /// leading zeros, value < p).
    pub fn parse_elem(&self, s: &str) -> Result<Fe> {
        let bad = || Error::Usage(format!("not a canonical field element: {s:?}"));
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
            return Err(bad());
        }
        let v: u64 = s.parse().map_err(|_| bad())?;
        self.canonical(v).map_err(|_| bad())
    }

    pub fn from_le_bytes(&self, bytes: [u8; 8]) -> Result<Fe> {
        self.canonical(u64::from_le_bytes(bytes))
    }

    /// `-1` raised to `n`.
    pub fn sign(&self, n: usize) -> Fe {
        if n % 2 == 0 {
            Fe::ONE
        } else {
            Fe(self.p - 1)
        }
    }
}

/// Arithmetic handle: field parameters plus an optional cost meter.
#[derive(Clone, Copy)]
pub struct Field<'m> {
    params: FieldParams,
    meter: Option<&'m CostMeter>,
}

impl fmt::Debug for Field<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.params.p)
            .field("metered", &self.meter.is_some())
            .finish()
    }
}

impl<'m> Field<'m> {
    #[inline]
    pub fn params(&self) -> FieldParams {
        self.params
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.params.p
    }

    pub fn meter(&self) -> Option<&'m CostMeter> {
        self.meter
    }

    /// The same field without metering, for bookkeeping that is not part of
    /// the party's algorithm.
    pub fn unmetered(&self) -> Field<'static> {
        self.params.plain()
    }

    #[inline]
    fn debug_check(&self, a: Fe) {
        debug_assert!(a.0 < self.params.p, "element {} not reduced mod {}", a.0, self.params.p);
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.debug_check(a);
        self.debug_check(b);
        if let Some(m) = self.meter {
            m.count_add();
        }
        let s = a.0 + b.0;
        Fe(if s >= self.params.p { s - self.params.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.debug_check(a);
        self.debug_check(b);
        if let Some(m) = self.meter {
            m.count_add();
        }
        Fe(if a.0 >= b.0 { a.0 - b.0 } else { self.params.p - (b.0 - a.0) })
    }

    /// Negation, charged as one subtraction.
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.sub(Fe::ZERO, a)
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.debug_check(a);
        self.debug_check(b);
        if let Some(m) = self.meter {
            m.count_mul();
        }
        Fe(((a.0 as u128 * b.0 as u128) % self.params.p as u128) as u64)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// integers; charged as a single inversion.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        self.debug_check(a);
        if a.is_zero() {
            return Err(Error::Domain("zero has no inverse"));
        }
        if let Some(m) = self.meter {
            m.count_inv();
        }
        let p = self.params.p as i128;
        let (mut r0, mut r1) = (p, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fe(t0.rem_euclid(p) as u64))
    }

    /// Square-and-multiply; charges one multiplication per product taken.
    pub fn pow(&self, base: Fe, mut e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        let mut acc: Option<Fe> = None;
        let mut b = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => b,
                    Some(x) => self.mul(x, b),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            b = self.mul(b, b);
        }
        acc.unwrap_or(Fe::ONE)
    }

    /// Inner product, charged as `n` multiplications and `n` additions.
    pub fn dot(&self, u: &[Fe], v: &[Fe]) -> Fe {
        debug_assert_eq!(u.len(), v.len());
        u.iter()
            .zip(v)
            .fold(Fe::ZERO, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Uniform draw from the whole field.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        if let Some(m) = self.meter {
            m.count_draw();
        }
        Fe(rng.gen_range(0..self.params.p))
    }

    /// Uniform draw from the non-zero elements; one random element.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        if let Some(m) = self.meter {
            m.count_draw();
        }
        Fe(rng.gen_range(1..self.params.p))
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Fe> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for
/// every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn f(p: u64) -> Field<'static> {
        FieldParams::new(p).unwrap().plain()
    }

    #[test]
    fn small_examples() {
        let f7 = f(7);
        assert_eq!(f7.add(Fe(3), Fe(5)), Fe(1));
        for x in 0..7 {
            assert_eq!(f7.mul(Fe::ZERO, Fe(x)), Fe::ZERO);
        }
        assert_eq!(f7.inv(Fe(1)).unwrap(), Fe(1));
        assert_eq!(f7.inv(Fe(3)).unwrap(), Fe(5));
        assert_eq!(f(101).inv(Fe(2)).unwrap(), Fe(51));
        // 45 * 67 = 3015 = 29 * 101 + 86
        assert_eq!(f(101).mul(Fe(45), Fe(67)), Fe(86));
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        assert_eq!(f(7).inv(Fe::ZERO), Err(Error::Domain("zero has no inverse")));
    }

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 4, 9, 15, 561, 1 << 62, (1 << 62) + 1, 1_000_001] {
            assert!(FieldParams::new(p).is_err(), "{p}");
        }
        for p in [3, 7, 101, 1_000_003, 1_099_511_627_791, 4_611_686_018_427_387_847] {
            assert!(FieldParams::new(p).is_ok(), "{p}");
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        fn trial(n: u64) -> bool {
            n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
        }
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
    }

    #[test]
    fn metering_counts_each_operation() {
        let meter = CostMeter::new();
        let fm = FieldParams::new(101).unwrap().metered(&meter);
        fm.add(Fe(1), Fe(2));
        fm.sub(Fe(1), Fe(2));
        fm.mul(Fe(3), Fe(4));
        fm.inv(Fe(5)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        fm.sample(&mut rng);
        let r = meter.snapshot();
        assert_eq!((r.add, r.mul, r.inv, r.random_draws), (2, 1, 1, 1));
    }

    #[test]
    fn pow_charges_at_most_two_log_n() {
        for e in 1u64..200 {
            let meter = CostMeter::new();
            let fm = FieldParams::new(101).unwrap().metered(&meter);
            let x = fm.pow(Fe(3), e);
            assert_eq!(x, f(101).pow(Fe(3), e));
            let log = 64 - (e.leading_zeros() as u64);
            assert!(meter.snapshot().mul <= 2 * log, "e={e}");
        }
        assert_eq!(f(7).pow(Fe(3), 6), Fe(1));
    }

    #[test]
    fn sampling_is_deterministic_and_nearly_uniform() {
        let fp = f(7);
        let draws = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            fp.sample_vec(&mut rng, 50)
        };
        assert_eq!(draws(9), draws(9));

        // First two draws distinct with probability 6/7.
        let trials = 100_000;
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let distinct = (0..trials)
            .filter(|_| fp.sample(&mut rng) != fp.sample(&mut rng))
            .count();
        let rate = distinct as f64 / trials as f64;
        assert!((rate - 6.0 / 7.0).abs() < 0.02, "{rate}");

        // Each residue of Z_101 within 5 sigma of 1/101.
        let f101 = f(101);
        let n = 100_000usize;
        let mut counts = [0usize; 101];
        for _ in 0..n {
            counts[f101.sample(&mut rng).value() as usize] += 1;
        }
        let q = 1.0 / 101.0;
        let sigma = (n as f64 * q * (1.0 - q)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!((c as f64 - n as f64 * q).abs() < 5.0 * sigma, "residue {i}: {c}");
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - n as f64 * q).powi(2) / (n as f64 * q))
            .sum();
        // 100 degrees of freedom; 99.99th percentile is about 157.
        assert!(chi2 < 157.0, "chi2 = {chi2}");
    }

    #[test]
    fn text_and_byte_forms_are_canonical() {
        let p7 = FieldParams::new(7).unwrap();
        for x in 0..7 {
            let e = Fe(x);
            assert_eq!(p7.parse_elem(&e.to_string()).unwrap(), e);
            assert_eq!(p7.from_le_bytes(e.to_le_bytes()).unwrap(), e);
        }
        for bad in ["7", "-1", "+3", "03", "", "1.0", " 1"] {
            assert!(p7.parse_elem(bad).is_err(), "{bad:?}");
        }
        assert!(p7.from_le_bytes(7u64.to_le_bytes()).is_err());
        assert_eq!(p7.reduce(-1), Fe(6));
    }
}
