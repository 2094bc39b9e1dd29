//! Operation counters for one party of a protocol session.

use std::cell::Cell;
use std::fmt;

/// Counters for field operations, black-box applications, randomness and
/// communication. Owned by a single session party; not shared across threads.
#[derive(Debug, Default)]
pub struct CostMeter {
    mul: Cell<u64>,
    add: Cell<u64>,
    inv: Cell<u64>,
    matvec: Cell<u64>,
    random_draws: Cell<u64>,
    elements_sent: Cell<u64>,
}

fn bump(c: &Cell<u64>, by: u64) {
    c.set(c.get() + by);
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn count_mul(&self) {
        bump(&self.mul, 1);
    }

    /// Additions and subtractions share one counter.
    pub(crate) fn count_add(&self) {
        bump(&self.add, 1);
    }

    pub(crate) fn count_inv(&self) {
        bump(&self.inv, 1);
    }

    pub(crate) fn count_matvec(&self) {
        bump(&self.matvec, 1);
    }

    pub(crate) fn count_draw(&self) {
        bump(&self.random_draws, 1);
    }

    pub fn count_sent(&self, elements: u64) {
        bump(&self.elements_sent, elements);
    }

    pub fn snapshot(&self) -> CostReport {
        CostReport {
            mul: self.mul.get(),
            add: self.add.get(),
            inv: self.inv.get(),
            matvec: self.matvec.get(),
            random_draws: self.random_draws.get(),
            elements_sent: self.elements_sent.get(),
        }
    }
}

/// Immutable copy of a [`CostMeter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostReport {
    pub mul: u64,
    pub add: u64,
    pub inv: u64,
    pub matvec: u64,
    pub random_draws: u64,
    pub elements_sent: u64,
}

impl CostReport {
    /// Field operations: multiplications, additions/subtractions and inversions.
    pub fn field_ops(&self) -> u64 {
        self.mul + self.add + self.inv
    }

    pub fn since(&self, earlier: &CostReport) -> CostReport {
        CostReport {
            mul: self.mul - earlier.mul,
            add: self.add - earlier.add,
            inv: self.inv - earlier.inv,
            matvec: self.matvec - earlier.matvec,
            random_draws: self.random_draws - earlier.random_draws,
            elements_sent: self.elements_sent - earlier.elements_sent,
        }
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "field_ops={} mul={} add={} inv={} matvec={} random={} sent={}",
            self.field_ops(),
            self.mul,
            self.add,
            self.inv,
            self.matvec,
            self.random_draws,
            self.elements_sent
        )
    }
}
