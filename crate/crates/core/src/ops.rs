//! Arithmetic accounting for the DSP pipelines.
//!
//! Counters are bumped in bulk next to the loops that do the work, so the
//! numbers describe what the code executes rather than a separate model of it.
//! A complex MAC is one multiply-accumulate where at least one operand is
//! complex; its real multiplies and adds are also included in `muls`/`adds`.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub complex_macs: u64,
    pub muls: u64,
    pub adds: u64,
    pub transcendentals: u64,
    pub comparisons: u64,
}

impl OpCount {
    pub fn new() -> Self {
        Self::default()
    }

    /// All scalar operations, one per multiply, add, transcendental call or comparison.
    pub fn total(&self) -> u64 {
        self.muls + self.adds + self.transcendentals + self.comparisons
    }

    pub(crate) fn real_complex_macs(&mut self, n: u64) {
        self.complex_macs += n;
        self.muls += 2 * n;
        self.adds += 2 * n;
    }

    pub(crate) fn complex_muls(&mut self, n: u64) {
        self.muls += 4 * n;
        self.adds += 2 * n;
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(mut self, rhs: OpCount) -> OpCount {
        self += rhs;
        self
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.complex_macs += rhs.complex_macs;
        self.muls += rhs.muls;
        self.adds += rhs.adds;
        self.transcendentals += rhs.transcendentals;
        self.comparisons += rhs.comparisons;
    }
}
