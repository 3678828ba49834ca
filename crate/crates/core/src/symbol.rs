//! Generating symbols on the unit circle and their Fourier coefficients.
//!
//! With `χ = e^{iθ}` the three variants are
//!
//! * lower: `(1 - Rχ)^α (1 + Rχ̄)^α = ((1 - R²) - 2iR sin θ)^α`
//! * upper: `(1 + Rχ)^α (1 - Rχ̄)^α`, the lower symbol at `-θ`
//! * gl:    `(1 - Rχ)^α`, one-sided; `R = 1` gives the Grünwald–Letnikov weights
//!
//! Coefficients come from a binomial double series with an alternating tail
//! bound, or from an FFT of the sampled symbol as an independent check.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fft;
use crate::specialfn::{binom_at, gamma};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 1 << 14;
const MAX_TERMS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Lower,
    Upper,
    Gl,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Variant::Lower),
            "upper" => Ok(Variant::Upper),
            "gl" => Ok(Variant::Gl),
            other => domain(format!("unknown symbol variant '{other}'")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Lower => "lower",
            Variant::Upper => "upper",
            Variant::Gl => "gl",
        })
    }
}

/// One generating function `φ_{α,R}` of a given variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpec {
    pub alpha: f64,
    pub r: f64,
    pub variant: Variant,
}

impl SymbolSpec {
    pub fn new(alpha: f64, r: f64, variant: Variant) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -0.5 {
            return domain(format!("symbol exponent must exceed -1/2, got {alpha}"));
        }
        if !(r > 0.0 && r <= 1.0) {
            return domain(format!("symbol radius must lie in (0, 1], got {r}"));
        }
        Ok(SymbolSpec { alpha, r, variant })
    }

    pub fn lower(alpha: f64, r: f64) -> Result<Self> {
        Self::new(alpha, r, Variant::Lower)
    }

    pub fn upper(alpha: f64, r: f64) -> Result<Self> {
        Self::new(alpha, r, Variant::Upper)
    }

    pub fn gl(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, Variant::Gl)
    }

    /// The symbol whose Toeplitz matrix is the transpose of this one's.
    pub fn transposed(&self) -> Option<Self> {
        match self.variant {
            Variant::Lower => Some(SymbolSpec { variant: Variant::Upper, ..*self }),
            Variant::Upper => Some(SymbolSpec { variant: Variant::Lower, ..*self }),
            Variant::Gl => None,
        }
    }
}

/// `z^alpha` on the principal branch, with `0^alpha = 0` for `alpha > 0`.
pub(crate) fn principal_pow(z: Complex64, alpha: f64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return if alpha > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else if alpha == 0.0 {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            domain("negative power of zero")
        };
    }
    if alpha == alpha.round() && alpha.abs() < 64.0 {
        return Ok(z.powi(alpha as i32));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return domain(format!("branch cut: base {z} with non-integer exponent {alpha}"));
    }
    Ok(z.powf(alpha))
}

/// Symbol value at `theta`.
pub fn eval(spec: &SymbolSpec, theta: f64) -> Result<Complex64> {
    let r = spec.r;
    let base = match spec.variant {
        Variant::Lower => Complex64::new(1.0 - r * r, -2.0 * r * theta.sin()),
        Variant::Upper => Complex64::new(1.0 - r * r, 2.0 * r * theta.sin()),
        Variant::Gl => Complex64::new(1.0 - r * theta.cos(), -r * theta.sin()),
    };
    principal_pow(base, spec.alpha)
}

/// `Σ_v b_v(-α) b_{m+v}(-α) (-1)^v R^{m+2v}`, the lower-symbol coefficient at `m ≥ 0`.
///
/// Once `v > α` consecutive terms alternate and shrink, so the first omitted
/// term bounds the tail.
fn lower_nonnegative(alpha: f64, r: f64, m: u64, tol: f64) -> Result<f64> {
    let mut bv = 1.0;
    let mut bmv = binom_at(-alpha, m);
    let r2 = r * r;
    let mut rp = r.powf(m as f64);
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut v = 0u64;
    loop {
        sum += sign * bv * bmv * rp;
        let vf = v as f64;
        let mf = m as f64;
        bv *= (vf - alpha) / (vf + 1.0);
        bmv *= (mf + vf - alpha) / (mf + vf + 1.0);
        rp *= r2;
        sign = -sign;
        v += 1;
        let next = (bv * bmv * rp).abs();
        if (v as f64) > alpha + 1.0 && next < tol {
            return Ok(sum);
        }
        if v > MAX_TERMS {
            return Err(Error::NonConvergence(format!(
                "coefficient {m} at alpha={alpha}, R={r}: tail {next:e} after {v} terms"
            )));
        }
    }
}

/// Fourier coefficient `n` from the binomial double series, to absolute tolerance `tol`.
pub fn fourier_coeff_series(spec: &SymbolSpec, n: i64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return domain(format!("series tolerance must be positive, got {tol}"));
    }
    if spec.alpha <= -0.5 && spec.r == 1.0 {
        return Err(Error::NonConvergence(format!(
            "series not summable at R = 1 for alpha = {}",
            spec.alpha
        )));
    }
    let (alpha, r) = (spec.alpha, spec.r);
    let value = match spec.variant {
        Variant::Gl => {
            if n < 0 {
                0.0
            } else {
                binom_at(-alpha, n as u64) * r.powf(n as f64)
            }
        }
        Variant::Lower | Variant::Upper => {
            let signed = if spec.variant == Variant::Lower { n } else { -n };
            let m = signed.unsigned_abs();
            let s = lower_nonnegative(alpha, r, m, tol)?;
            if signed < 0 && m % 2 == 1 {
                -s
            } else {
                s
            }
        }
    };
    Ok(Complex64::new(value, 0.0))
}

/// Series coefficients for every index in `lo..=hi`.
pub fn fourier_coeffs_series(spec: &SymbolSpec, lo: i64, hi: i64, tol: f64) -> Result<Vec<Complex64>> {
    (lo..=hi).map(|n| fourier_coeff_series(spec, n, tol)).collect()
}

/// Coefficients from one FFT of the sampled symbol.
#[derive(Debug, Clone)]
pub struct FftCoeffs {
    coeffs: Vec<Complex64>,
}

impl FftCoeffs {
    pub fn grid_size(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest `|n|` honouring `grid_size ≥ 4 |n|`.
    pub fn max_index(&self) -> i64 {
        (self.coeffs.len() / 4) as i64
    }

    /// Approximation of `(1/2π) ∫ φ e^{-inθ} dθ`, aliased by coefficients at `n ± grid_size`.
    pub fn get(&self, n: i64) -> Result<Complex64> {
        if n.abs() > self.max_index() {
            return domain(format!(
                "index {n} beyond a quarter of the FFT grid {}",
                self.coeffs.len()
            ));
        }
        let len = self.coeffs.len() as i64;
        Ok(self.coeffs[n.rem_euclid(len) as usize])
    }
}

pub fn fourier_coeff_fft(spec: &SymbolSpec, grid_size: usize) -> Result<FftCoeffs> {
    if grid_size < 4 || !grid_size.is_power_of_two() {
        return domain(format!("FFT grid must be a power of two >= 4, got {grid_size}"));
    }
    let step = 2.0 * std::f64::consts::PI / grid_size as f64;
    let mut buf = (0..grid_size)
        .map(|j| eval(spec, j as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    fft::forward(&mut buf);
    let scale = 1.0 / grid_size as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(FftCoeffs { coeffs: buf })
}

/// Leading-order law `2^α/Γ(-α) |n|^{-α-1}`, times `(-1)^n` for `n < 0`.
pub fn asymptotic_coeff(alpha: f64, n: i64) -> Result<f64> {
    if n == 0 {
        return domain("asymptotic law needs n != 0");
    }
    if !alpha.is_finite() || alpha <= -0.5 {
        return domain(format!("asymptotic law needs alpha > -1/2, got {alpha}"));
    }
    let prefactor = 2f64.powf(alpha) / gamma(-alpha)?;
    let magnitude = prefactor * (n.unsigned_abs() as f64).powf(-alpha - 1.0);
    Ok(if n < 0 && n % 2 != 0 { -magnitude } else { magnitude })
}

/// Coefficient `n` along a sequence of radii, for watching the `R → 1` approach.
pub fn r_sweep(alpha: f64, variant: Variant, n: i64, radii: &[f64], tol: f64) -> Result<Vec<(f64, Complex64)>> {
    radii
        .iter()
        .map(|&r| {
            let spec = SymbolSpec::new(alpha, r, variant)?;
            Ok((r, fourier_coeff_series(&spec, n, tol)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lower(alpha: f64, r: f64) -> SymbolSpec {
        SymbolSpec::lower(alpha, r).unwrap()
    }

    #[test]
    fn eval_integer_cases() {
        let v = eval(&lower(1.0, 0.5), 0.0).unwrap();
        assert!((v - Complex64::new(0.75, 0.0)).norm() < 1e-15);
        for &theta in &[-3.0, -1.2, 0.0, 0.4, 1.5, 2.9] {
            let v = eval(&lower(2.0, 1.0), theta).unwrap();
            let expect = -4.0 * theta.sin().powi(2);
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eval_matches_direct_log() {
        let theta = 1.0f64;
        let base = Complex64::new(1.0 - 0.81, -1.8 * theta.sin());
        let expect = (0.5 * base.ln()).exp();
        assert!((eval(&lower(0.5, 0.9), theta).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn eval_factored_form_agrees() {
        // The closed base equals the product of the two principal-branch factors.
        for &(alpha, r) in &[(0.3, 0.9), (0.7, 1.0), (1.5, 0.5)] {
            for j in 0..32 {
                let theta = -3.1 + 0.2 * j as f64;
                let chi = Complex64::from_polar(1.0, theta);
                let f1 = (Complex64::new(1.0, 0.0) - r * chi).powf(alpha);
                let f2 = (Complex64::new(1.0, 0.0) + r * chi.conj()).powf(alpha);
                let v = eval(&lower(alpha, r), theta).unwrap();
                assert!((v - f1 * f2).norm() < 1e-13, "alpha={alpha} r={r} theta={theta}");
            }
        }
    }

    #[test]
    fn eval_gl_zero_at_origin() {
        let spec = SymbolSpec::gl(0.5).unwrap();
        assert_eq!(eval(&spec, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn series_linear_symbol() {
        let spec = lower(1.0, 0.7);
        let c = |n| fourier_coeff_series(&spec, n, 1e-14).unwrap().re;
        assert!((c(0) - 0.51).abs() < 1e-15);
        assert!((c(1) + 0.7).abs() < 1e-15);
        assert!((c(-1) - 0.7).abs() < 1e-15);
        for n in [2, -2, 5, -7] {
            assert_eq!(c(n), 0.0);
        }
    }

    #[test]
    fn series_vanishes_beyond_polynomial_support() {
        let spec = lower(2.0, 0.8);
        for n in [3i64, -3, 4, 10, -11] {
            assert_eq!(fourier_coeff_series(&spec, n, 1e-12).unwrap().re, 0.0);
        }
    }

    #[test]
    fn series_zero_exponent_is_delta() {
        let spec = lower(0.0, 0.9);
        assert_eq!(fourier_coeff_series(&spec, 0, 1e-12).unwrap().re, 1.0);
        assert_eq!(fourier_coeff_series(&spec, 3, 1e-12).unwrap().re, 0.0);
    }

    #[test]
    fn fft_reproduces_linear_symbol() {
        let c = fourier_coeff_fft(&lower(1.0, 0.7), 256).unwrap();
        assert!((c.get(0).unwrap() - Complex64::new(0.51, 0.0)).norm() < 1e-12);
        assert!((c.get(1).unwrap() - Complex64::new(-0.7, 0.0)).norm() < 1e-12);
        assert!((c.get(-1).unwrap() - Complex64::new(0.7, 0.0)).norm() < 1e-12);
        assert!(c.get(2).unwrap().norm() < 1e-12);
        let unit = fourier_coeff_fft(&lower(0.0, 0.7), 64).unwrap();
        assert!((unit.get(0).unwrap() - 1.0).norm() < 1e-15);
        assert!(unit.get(5).unwrap().norm() < 1e-15);
        assert!(unit.get(17).is_err());
    }

    #[test]
    fn series_matches_fft_inside_disc() {
        let spec = lower(0.5, 0.9);
        let fft = fourier_coeff_fft(&spec, DEFAULT_GRID).unwrap();
        for n in -20..=20 {
            let s = fourier_coeff_series(&spec, n, 1e-13).unwrap();
            assert!((s - fft.get(n).unwrap()).norm() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn fft_grid_refinement_is_stable_at_unit_radius() {
        let spec = lower(0.5, 1.0);
        let coarse = fourier_coeff_fft(&spec, 1 << 14).unwrap();
        let fine = fourier_coeff_fft(&spec, 1 << 15).unwrap();
        for n in (-512..=512).step_by(7) {
            assert!((coarse.get(n).unwrap() - fine.get(n).unwrap()).norm() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn gl_variant_is_one_sided() {
        let spec = SymbolSpec::gl(0.5).unwrap();
        let w: Vec<f64> = (0..4).map(|n| fourier_coeff_series(&spec, n, 1e-12).unwrap().re).collect();
        assert_eq!(w, vec![1.0, -0.5, -0.125, -0.0625]);
        assert_eq!(fourier_coeff_series(&spec, -3, 1e-12).unwrap().re, 0.0);
    }

    #[test]
    fn asymptotic_values() {
        assert!((asymptotic_coeff(0.5, 100).unwrap() + 3.989_422_8e-4).abs() < 1e-10);
        assert!((asymptotic_coeff(0.5, -100).unwrap() + 3.989_422_8e-4).abs() < 1e-10);
        assert!((asymptotic_coeff(0.5, -101).unwrap() - 0.398_942_28 * 101f64.powf(-1.5)).abs() < 1e-10);
        assert!((asymptotic_coeff(1.5, 100).unwrap() - 1.196_826_8e-5).abs() < 1e-11);
        assert_eq!(asymptotic_coeff(1.0, 10), Err(Error::Pole(-1.0)));
        assert!(asymptotic_coeff(0.5, 0).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SymbolSpec::lower(-0.6, 0.5).is_err());
        assert!(SymbolSpec::lower(0.5, 0.0).is_err());
        assert!(SymbolSpec::lower(0.5, 1.2).is_err());
        assert!(fourier_coeff_series(&lower(0.5, 0.5), 0, 0.0).is_err());
    }

    #[test]
    fn coefficient_sums_stay_bounded() {
        let spec = lower(0.5, 1.0);
        let coeffs = fourier_coeffs_series(&spec, -2048, 2048, 1e-10).unwrap();
        let partial = |n: i64| -> f64 {
            coeffs[(2048 - n) as usize..=(2048 + n) as usize].iter().map(|c| c.norm()).sum()
        };
        let (s512, s2048) = (partial(512), partial(2048));
        // |δ_n| ~ n^{-3/2}: the remaining mass beyond 512 is below 2·0.4·2/√512.
        assert!(s2048 - s512 < 0.08 && s2048 < 4.0, "{s512} {s2048}");
    }

    #[test]
    fn r_sweep_reports_each_radius() {
        let rows = r_sweep(0.5, Variant::Lower, 3, &[0.9, 0.99, 0.999], 1e-12).unwrap();
        assert_eq!(rows.len(), 3);
        let limit = fourier_coeff_series(&lower(0.5, 1.0), 3, 1e-12).unwrap().re;
        let gaps: Vec<f64> = rows.iter().map(|(_, c)| (c.re - limit).abs()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
    }

    proptest! {
        #[test]
        fn conjugate_flip(alpha in 0.05f64..2.0, r in 0.3f64..1.0, n in -40i64..40) {
            let lo = fourier_coeff_series(&lower(alpha, r), -n, 1e-13).unwrap();
            let up = fourier_coeff_series(&SymbolSpec::upper(alpha, r).unwrap(), n, 1e-13).unwrap();
            prop_assert_eq!(lo, up);
        }

        #[test]
        fn coefficients_are_real(alpha in 0.05f64..1.5, r in 0.5f64..0.95) {
            let fft = fourier_coeff_fft(&lower(alpha, r), 1 << 12).unwrap();
            for n in -10..=10 {
                prop_assert!(fft.get(n).unwrap().im.abs() < 1e-12);
            }
        }
    }
}
