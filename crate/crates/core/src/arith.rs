//! Arithmetic back-ends for the postprocessing kernels.
//!
//! Kernels are written once against [`Arith`]; running them with
//! [`Exact`] compiles down to plain floating-point ops, while
//! [`OpCounter`] tallies every multiplication and addition so operation
//! counts can be checked against the analytic cost model.

pub trait Arith {
    fn mul(&mut self, a: f64, b: f64) -> f64;
    fn add(&mut self, a: f64, b: f64) -> f64;
    /// Counted as an addition.
    fn sub(&mut self, a: f64, b: f64) -> f64;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Exact;

impl Arith for Exact {
    #[inline(always)]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }

    #[inline(always)]
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline(always)]
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub mul: u64,
    pub add: u64,
}

impl Arith for OpCounter {
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.mul += 1;
        a * b
    }

    fn add(&mut self, a: f64, b: f64) -> f64 {
        self.add += 1;
        a + b
    }

    fn sub(&mut self, a: f64, b: f64) -> f64 {
        self.add += 1;
        a - b
    }
}
