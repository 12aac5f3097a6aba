#![allow(dead_code)]

use colehopf::expr::{Expr, Laurent};
use colehopf::ode::CoeffFn;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Runner with a fixed seed so every run sees the same cases.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Polynomial coefficients (lowest first), degree ≤ `deg`, entries in `[-r, r]`.
pub fn coeffs(deg: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, 1..=deg + 1)
}

pub fn poly(c: &[f64]) -> Expr {
    Laurent::from_terms(c.iter().enumerate().map(|(i, v)| (i as i32, *v))).to_expr()
}

pub fn poly_at(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

pub fn sym(e: Expr) -> CoeffFn<f64> {
    CoeffFn::symbolic(e)
}

/// Shifts the constant term so the polynomial is at least `floor` on `[lo, hi]`.
pub fn lift_above(mut c: Vec<f64>, floor: f64, lo: f64, hi: f64) -> Vec<f64> {
    let min = (0..=400)
        .map(|i| poly_at(&c, lo + (hi - lo) * i as f64 / 400.0))
        .fold(f64::INFINITY, f64::min);
    if min < floor {
        c[0] += floor - min;
    }
    c
}
