//! Finite-section inversion through the Wiener–Hopf factorization `φ = g₁ g₂`.
//!
//! With `Φ_N = χ^{N+1} g₁/g₂`, `Φ̃_N = χ^{-N-1} g₂/g₁` and the Hankel maps
//! `H_Φ b = π₋(Φ_N b)`, `H_Φ̃ a = π₊(Φ̃_N a)`, the solution of `T_N(φ) x = Q` is
//!
//! ```text
//! x = g₁⁻¹ π₊(g₂⁻¹ Q) - g₁⁻¹ π₊(Φ_N (I - H_Φ̃ H_Φ)⁻¹ π₊(Φ̃_N π₊(g₂⁻¹ Q)))
//! ```
//!
//! restricted to degrees `0..=N`, whenever `‖H_Φ̃ H_Φ‖ < 1`. The inverse of
//! `I - H_Φ̃ H_Φ` is applied as a Neumann series.

mod poly;

use std::sync::OnceLock;

use num_complex::Complex64;

pub use poly::FourierPoly;

use crate::error::{domain, Error, Result};
use crate::fft;
use crate::specialfn::BinomIter;
use crate::symbol::{principal_pow, Variant};

/// Largest tail coefficient tolerated at the truncation degree.
pub const TAIL_TARGET: f64 = 1e-14;
/// Neumann iterates below this `ℓ²` norm end the series.
pub const NEUMANN_TOL: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Factors of the lower symbol `(1 - Rχ)^α (1 + Rχ̄)^α` or of the upper one,
/// truncated at degree `M`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub alpha: f64,
    pub r: f64,
    pub variant: Variant,
    m: usize,
    g1: FourierPoly,
    g2: FourierPoly,
    g1_inv: FourierPoly,
    g2_inv: FourierPoly,
    ratio: FourierPoly,
    ratio_tilde: FourierPoly,
}

/// Smallest `M ≥ max(4N, 256)` whose geometric tail `R^M (M+1)^{|α|+1}` is below `1e-16`.
pub fn default_truncation(alpha: f64, r: f64, n: usize) -> usize {
    let mut m = (4 * n).max(256);
    if r >= 1.0 {
        return m;
    }
    let bound = |m: usize| (m as f64) * r.ln() + (alpha.abs() + 1.0) * ((m + 1) as f64).ln();
    while bound(m) > (1e-16f64).ln() {
        m += 64;
    }
    m
}

fn one_sided(alpha: f64, step: f64, m: usize, negative: bool) -> FourierPoly {
    let mut p = FourierPoly::zeros(m);
    let mut power = 1.0;
    for (u, b) in BinomIter::new(alpha).take(m + 1).enumerate() {
        let idx = if negative { -(u as i64) } else { u as i64 };
        p.set(idx, Complex64::new(b * power, 0.0));
        power *= step;
    }
    p
}

/// Factorization of the lower symbol.
pub fn factor(alpha: f64, r: f64, m: usize) -> Result<Factorization> {
    factor_variant(alpha, r, m, Variant::Lower)
}

/// Factorization of the lower (`g₁ = (1-Rχ)^α`, `g₂ = (1+Rχ̄)^α`) or upper
/// (`g₁ = (1+Rχ)^α`, `g₂ = (1-Rχ̄)^α`) symbol.
pub fn factor_variant(alpha: f64, r: f64, m: usize, variant: Variant) -> Result<Factorization> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("factorization needs R in (0, 1), got {r}"));
    }
    if !alpha.is_finite() || alpha <= -0.5 {
        return domain(format!("factorization needs alpha > -1/2, got {alpha}"));
    }
    let (s1, s2) = match variant {
        Variant::Lower => (r, -r),
        Variant::Upper => (-r, r),
        Variant::Gl => return domain("the one-sided symbol needs no factorization"),
    };
    let g1 = one_sided(-alpha, s1, m, false);
    let g1_inv = one_sided(alpha, s1, m, false);
    let g2 = one_sided(-alpha, s2, m, true);
    let g2_inv = one_sided(alpha, s2, m, true);
    let mi = m as i64;
    let tail = [g1.get(mi), g1_inv.get(mi), g2.get(-mi), g2_inv.get(-mi)]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if tail >= TAIL_TARGET {
        return Err(Error::Truncation { m, tail, target: TAIL_TARGET });
    }
    let ratio = g1.mul(&g2_inv, m);
    let ratio_tilde = g2.mul(&g1_inv, m);
    Ok(Factorization { alpha, r, variant, m, g1, g2, g1_inv, g2_inv, ratio, ratio_tilde })
}

impl Factorization {
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn g1(&self) -> &FourierPoly {
        &self.g1
    }
    pub fn g2(&self) -> &FourierPoly {
        &self.g2
    }
    pub fn g1_inv(&self) -> &FourierPoly {
        &self.g1_inv
    }
    pub fn g2_inv(&self) -> &FourierPoly {
        &self.g2_inv
    }
    /// `g₁/g₂`, whose coefficient at `-k` is `γ_{1,-k}`.
    pub fn ratio(&self) -> &FourierPoly {
        &self.ratio
    }
    /// `g₂/g₁`, whose coefficient at `k` is `γ_{2,k}`.
    pub fn ratio_tilde(&self) -> &FourierPoly {
        &self.ratio_tilde
    }

    /// The Hankel pair for sections of size `N + 1`.
    pub fn section(&self, n: usize) -> Result<Section<'_>> {
        if n < 1 {
            return domain("section needs N >= 1");
        }
        let s = n as i64 + 1;
        Ok(Section {
            fac: self,
            n,
            phi: self.ratio.shift(s),
            phi_tilde: self.ratio_tilde.shift(-s),
            norm: OnceLock::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Phi,
    PhiTilde,
}

/// `Φ_N`, `Φ̃_N` and the operators built from them for one `N`.
pub struct Section<'a> {
    fac: &'a Factorization,
    n: usize,
    phi: FourierPoly,
    phi_tilde: FourierPoly,
    norm: OnceLock<f64>,
}

/// Result of [`Section::invert_apply`] on coefficient indices `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    /// `T_N⁻¹ Q`.
    pub coeffs: Vec<Complex64>,
    /// `g₁⁻¹ π₊(g₂⁻¹ Q)`, the product of triangular inverse sections applied to `Q`.
    pub leading: Vec<Complex64>,
    /// The Hankel term subtracted from `leading`.
    pub correction: Vec<Complex64>,
    /// Number of Neumann terms summed.
    pub terms: usize,
}

impl Section<'_> {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn phi(&self) -> &FourierPoly {
        &self.phi
    }
    pub fn phi_tilde(&self) -> &FourierPoly {
        &self.phi_tilde
    }

    /// `π₋(Φ_N p)` for analytic `p`, or `π₊(Φ̃_N p)` for `p` supported on negative indices.
    pub fn hankel_apply(&self, which: Which, p: &FourierPoly) -> Result<FourierPoly> {
        match which {
            Which::Phi => {
                if !p.is_analytic() {
                    return domain("H_Phi acts on polynomials with nonnegative indices");
                }
                Ok(self.h_phi(p))
            }
            Which::PhiTilde => {
                if !p.is_coanalytic_strict() {
                    return domain("H_Phi_tilde acts on polynomials with negative indices");
                }
                Ok(self.h_phi_tilde(p))
            }
        }
    }

    fn h_phi(&self, p: &FourierPoly) -> FourierPoly {
        self.phi.mul(p, self.fac.m).pi_minus()
    }

    fn h_phi_tilde(&self, p: &FourierPoly) -> FourierPoly {
        self.phi_tilde.mul(p, self.fac.m).pi_plus()
    }

    /// `H_Φ̃ H_Φ` on analytic polynomials.
    fn k_apply(&self, p: &FourierPoly) -> FourierPoly {
        self.h_phi_tilde(&self.h_phi(p))
    }

    /// Adjoint of `H_Φ̃ H_Φ`, i.e. `H_Φ* H_Φ̃*` with `H_Φ* a = π₊(conj(Φ_N) a)`.
    fn k_adjoint(&self, p: &FourierPoly) -> FourierPoly {
        let m = self.fac.m;
        let a = self.phi_tilde.reflect_conj().mul(p, m).pi_minus();
        self.phi.reflect_conj().mul(&a, m).pi_plus()
    }

    /// Spectral norm of `H_Φ̃ H_Φ` on analytic polynomials of degree `≤ M`, by power iteration on `K* K`.
    pub fn contraction_norm(&self) -> f64 {
        *self.norm.get_or_init(|| {
            let m = self.fac.m;
            let start: Vec<Complex64> = (0..=m).map(|j| Complex64::new(1.0 / (1.0 + j as f64), 0.0)).collect();
            let mut v = FourierPoly::from_nonnegative(&start, m).expect("start vector fits");
            v = v.scale(ONE / v.norm_l2());
            let mut lambda = 0.0;
            for _ in 0..5000 {
                let w = self.k_adjoint(&self.k_apply(&v));
                let next = w.norm_l2();
                if next == 0.0 {
                    return 0.0;
                }
                v = w.scale(ONE / next);
                let settled = (next - lambda).abs() <= 1e-12 * next;
                lambda = next;
                if settled {
                    break;
                }
            }
            lambda.sqrt()
        })
    }

    /// `T_N(φ)⁻¹ Q` for `Q` of degree `≤ N`.
    pub fn invert_apply(&self, q: &FourierPoly, max_terms: usize) -> Result<Inversion> {
        let n = self.n as i64;
        if !q.is_analytic() || (n + 1..=q.m() as i64).any(|j| q.get(j) != Complex64::new(0.0, 0.0)) {
            return domain(format!("right-hand side must have degree in 0..={n}"));
        }
        let norm = self.contraction_norm();
        if !(norm < 1.0) {
            return Err(Error::NonContraction(norm));
        }
        let m = self.fac.m;
        let b0 = q.mul(&self.fac.g2_inv, m).pi_plus();
        let c = self.phi_tilde.mul(&b0, m).pi_plus();
        let mut w = c.clone();
        let mut term = c;
        let mut terms = 1;
        while term.norm_l2() > NEUMANN_TOL {
            if terms >= max_terms {
                return Err(Error::NonConvergence(format!(
                    "Neumann series: iterate norm {:e} after {terms} terms",
                    term.norm_l2()
                )));
            }
            term = self.k_apply(&term);
            w = w.add(&term);
            terms += 1;
        }
        let leading = self.fac.g1_inv.mul(&b0, m);
        let correction = self.fac.g1_inv.mul(&self.phi.mul(&w, m).pi_plus(), m);
        let leading = leading.range(0, n);
        let correction = correction.range(0, n);
        let coeffs = leading.iter().zip(&correction).map(|(a, b)| a - b).collect();
        Ok(Inversion { coeffs, leading, correction, terms })
    }
}

/// `T_N⁻¹ Q` with a default truncation and a fresh factorization.
pub fn invert_apply(alpha: f64, r: f64, variant: Variant, q: &[Complex64], max_terms: usize) -> Result<Inversion> {
    if q.is_empty() {
        return domain("empty right-hand side");
    }
    let n = q.len() - 1;
    let m = default_truncation(alpha, r, n);
    let fac = factor_variant(alpha, r, m, variant)?;
    let sec = fac.section(n.max(1))?;
    let poly = FourierPoly::from_nonnegative(q, m)?;
    sec.invert_apply(&poly, max_terms)
}

fn ratio_values(alpha: f64, r: f64, variant: Variant, theta: f64) -> Result<Complex64> {
    let chi = Complex64::from_polar(1.0, theta);
    let (s1, s2) = match variant {
        Variant::Lower => (r, -r),
        Variant::Upper => (-r, r),
        Variant::Gl => return domain("gamma coefficients need the lower or upper symbol"),
    };
    let g1 = principal_pow(ONE - s1 * chi, alpha)?;
    let g2 = principal_pow(ONE - s2 * chi.conj(), alpha)?;
    Ok(g1 / g2)
}

/// `(γ_{1,-k}, γ_{2,k})` for `k = 1..=k_max`: the coefficient at `-k` of `g₁/g₂`
/// and at `k` of `g₂/g₁`, from one FFT of each ratio.
pub fn gamma_sequence(alpha: f64, r: f64, k_max: usize, variant: Variant) -> Result<Vec<(Complex64, Complex64)>> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("gamma coefficients need R in (0, 1), got {r}"));
    }
    if k_max < 1 {
        return domain("gamma coefficients need k >= 1");
    }
    let decay = (-80.0 / r.ln()).ceil() as usize;
    let size = (4 * k_max).max(decay).max(1 << 14).next_power_of_two();
    let step = 2.0 * std::f64::consts::PI / size as f64;
    let mut f1 = (0..size)
        .map(|j| ratio_values(alpha, r, variant, j as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    let mut f2: Vec<Complex64> = f1.iter().map(|z| ONE / z).collect();
    fft::forward(&mut f1);
    fft::forward(&mut f2);
    let scale = 1.0 / size as f64;
    Ok((1..=k_max).map(|k| (f1[size - k] * scale, f2[k] * scale)).collect())
}

/// `(γ_{1,-k}, γ_{2,k})` for a single `k ≥ 1`.
pub fn gamma_coeffs(alpha: f64, r: f64, k: usize, variant: Variant) -> Result<(Complex64, Complex64)> {
    Ok(*gamma_sequence(alpha, r, k, variant)?.last().expect("k >= 1"))
}
