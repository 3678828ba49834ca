use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::fft;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Two-sided trigonometric polynomial `Σ_{|n| ≤ M} c_n χ^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPoly {
    m: usize,
    coeffs: Vec<Complex64>,
}

impl FourierPoly {
    pub fn zeros(m: usize) -> Self {
        FourierPoly { m, coeffs: vec![ZERO; 2 * m + 1] }
    }

    /// `χ^j`, stored with degree bound `m ≥ |j|`.
    pub fn monomial(j: i64, m: usize) -> Result<Self> {
        if j.unsigned_abs() as usize > m {
            return domain(format!("monomial degree {j} exceeds storage bound {m}"));
        }
        let mut p = Self::zeros(m);
        p.set(j, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    /// Analytic polynomial with `c_n = coeffs[n]` for `n ≥ 0`.
    pub fn from_nonnegative(coeffs: &[Complex64], m: usize) -> Result<Self> {
        if coeffs.len() > m + 1 {
            return domain(format!("{} coefficients exceed storage bound {m}", coeffs.len()));
        }
        let mut p = Self::zeros(m);
        p.coeffs[m..m + coeffs.len()].copy_from_slice(coeffs);
        Ok(p)
    }

    pub fn from_fn(m: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mi = m as i64;
        FourierPoly { m, coeffs: (-mi..=mi).map(f).collect() }
    }

    /// Degree bound `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `c_n`, zero outside the stored range.
    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.m {
            ZERO
        } else {
            self.coeffs[(n + self.m as i64) as usize]
        }
    }

    /// Sets `c_n`; panics when `|n| > M`.
    pub fn set(&mut self, n: i64, value: Complex64) {
        assert!(n.unsigned_abs() as usize <= self.m, "index {n} outside degree bound {}", self.m);
        self.coeffs[(n + self.m as i64) as usize] = value;
    }

    /// `c_lo, ..., c_hi`.
    pub fn range(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        (lo..=hi).map(|n| self.get(n)).collect()
    }

    /// Keeps indices `≥ 0`.
    pub fn pi_plus(&self) -> Self {
        let mut p = self.clone();
        p.coeffs[..self.m].fill(ZERO);
        p
    }

    /// Keeps indices `< 0`.
    pub fn pi_minus(&self) -> Self {
        let mut p = self.clone();
        p.coeffs[self.m..].fill(ZERO);
        p
    }

    pub fn is_analytic(&self) -> bool {
        self.coeffs[..self.m].iter().all(|c| *c == ZERO)
    }

    pub fn is_coanalytic_strict(&self) -> bool {
        self.coeffs[self.m..].iter().all(|c| *c == ZERO)
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.m.max(other.m);
        Self::from_fn(m, |n| self.get(n) + other.get(n))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.m.max(other.m);
        Self::from_fn(m, |n| self.get(n) - other.get(n))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        FourierPoly { m: self.m, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Product, exact on `|n| ≤ M_p + M_q`, stored to `min(m_store, M_p + M_q)`.
    pub fn mul(&self, other: &Self, m_store: usize) -> Self {
        let full = fft::convolve(&self.coeffs, &other.coeffs);
        let m_full = self.m + other.m;
        let m_out = m_store.min(m_full);
        let start = m_full - m_out;
        FourierPoly { m: m_out, coeffs: full[start..start + 2 * m_out + 1].to_vec() }
    }

    /// `χ^k p`; the degree bound grows by `|k|`.
    pub fn shift(&self, k: i64) -> Self {
        let m = self.m + k.unsigned_abs() as usize;
        Self::from_fn(m, |n| self.get(n - k))
    }

    /// Coefficients of the pointwise conjugate `conj(p(θ))`, i.e. `conj(c_{-n})`.
    pub fn reflect_conj(&self) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c.conj()).collect();
        coeffs.reverse();
        FourierPoly { m: self.m, coeffs }
    }

    /// Re-stores with degree bound `m`, dropping coefficients beyond it.
    pub fn truncate(&self, m: usize) -> Self {
        Self::from_fn(m, |n| self.get(n))
    }

    /// `ℓ²` norm of the coefficients, equal to the `L²(dθ/2π)` norm.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
