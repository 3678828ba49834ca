//! Gamma function on non-pole reals and generalized binomial sequences.
//!
//! `b_u(a)` always denotes the coefficients of `(1 - x)^(-a)`, so that
//! `b_u(-a)` expands `(1 - x)^a`. Sign flips for `(1 + x)` are applied at
//! the call site as `(-1)^u`.

use crate::error::{Error, Result};

/// Γ(x) for real `x` away from the poles `0, -1, -2, ...`.
///
/// Negative arguments go through the reflection formula.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(x));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// 1/Γ(x), extended by zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// Leading coefficients of `(1 - x)^(-alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomSeq {
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

impl BinomSeq {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `b_0 .. b_{count-1}` of `(1 - x)^(-alpha)` by the recurrence
/// `b_{u+1} = b_u (alpha + u) / (u + 1)`.
pub fn binom_coeffs(alpha: f64, count: usize) -> Result<BinomSeq> {
    if count == 0 {
        return Err(Error::Domain("binomial sequence needs count >= 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite exponent {alpha}")));
    }
    Ok(BinomSeq {
        alpha,
        coeffs: BinomIter::new(alpha).take(count).collect(),
    })
}

/// Unbounded stream of `b_u(alpha)`.
#[derive(Debug, Clone)]
pub struct BinomIter {
    alpha: f64,
    u: u64,
    next: f64,
}

impl BinomIter {
    pub fn new(alpha: f64) -> Self {
        BinomIter { alpha, u: 0, next: 1.0 }
    }
}

impl Iterator for BinomIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let current = self.next;
        let u = self.u as f64;
        self.next = current * (self.alpha + u) / (u + 1.0);
        self.u += 1;
        Some(current)
    }
}

/// `b_n(alpha)` alone, by running the recurrence `n` steps.
pub fn binom_at(alpha: f64, n: u64) -> f64 {
    BinomIter::new(alpha).nth(n as usize).unwrap_or(0.0)
}
