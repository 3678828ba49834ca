//! Finite sections `T_N(h)` with entries `ĥ(k - l)`, `0 ≤ k, l ≤ N`.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fft;
use crate::specialfn::{gamma, BinomIter};
use crate::symbol::{fourier_coeff_series, SymbolSpec, Variant};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatvecMode {
    Direct,
    Fast,
}

/// Order-`(N+1)` Toeplitz operator stored by its diagonals `ĥ(-N..=N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzOperator {
    n: usize,
    coeffs: Vec<Complex64>,
    spec: Option<SymbolSpec>,
}

impl ToeplitzOperator {
    /// Section of size `N + 1` with coefficients from the binomial series.
    pub fn build(spec: &SymbolSpec, n: usize, tol: f64) -> Result<Self> {
        if n < 1 {
            return domain("Toeplitz section needs N >= 1");
        }
        let n_i = n as i64;
        let coeffs = (-n_i..=n_i)
            .map(|d| fourier_coeff_series(spec, d, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(ToeplitzOperator { n, coeffs, spec: Some(*spec) })
    }

    /// Operator from explicit diagonals `ĥ(-N), ..., ĥ(N)`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 || coeffs.len().is_multiple_of(2) {
            return domain(format!("need 2N+1 >= 3 diagonals, got {}", coeffs.len()));
        }
        let n = (coeffs.len() - 1) / 2;
        Ok(ToeplitzOperator { n, coeffs, spec: None })
    }

    /// The `N` of `T_N`; the matrix has `N + 1` rows.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.n + 1
    }

    pub fn spec(&self) -> Option<&SymbolSpec> {
        self.spec.as_ref()
    }

    /// `ĥ(d)` for `|d| ≤ N`.
    pub fn coeff(&self, d: i64) -> Complex64 {
        self.coeffs[(d + self.n as i64) as usize]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        self.coeff(k as i64 - l as i64)
    }

    /// Row `k`, i.e. `ĥ(k - l)` for `l = 0..=N`.
    pub fn row(&self, k: usize) -> Vec<Complex64> {
        (0..=self.n).map(|l| self.entry(k, l)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        ToeplitzOperator {
            n: self.n,
            coeffs,
            spec: self.spec.and_then(|s| s.transposed()),
        }
    }

    pub fn matvec(&self, v: &[Complex64], mode: MatvecMode) -> Result<Vec<Complex64>> {
        if v.len() != self.order() {
            return Err(Error::Dimension { expected: self.order(), actual: v.len() });
        }
        Ok(match mode {
            MatvecMode::Direct => (0..=self.n)
                .map(|k| (0..=self.n).map(|l| self.entry(k, l) * v[l]).sum())
                .collect(),
            MatvecMode::Fast => self.circulant_matvec(v),
        })
    }

    /// Embeds the section in a circulant of length `≥ 2(N+1)` and multiplies in Fourier space.
    fn circulant_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let len = (2 * self.order()).next_power_of_two();
        let mut c = vec![ZERO; len];
        for (d, slot) in c.iter_mut().enumerate().take(self.n + 1) {
            *slot = self.coeff(d as i64);
        }
        for d in 1..=self.n {
            c[len - d] = self.coeff(-(d as i64));
        }
        let mut x = vec![ZERO; len];
        x[..v.len()].copy_from_slice(v);
        fft::forward(&mut c);
        fft::forward(&mut x);
        for (a, b) in x.iter_mut().zip(&c) {
            *a *= b;
        }
        fft::inverse(&mut x);
        x.truncate(self.order());
        x
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.order(), self.order(), |k, l| self.entry(k, l))
    }

    pub fn factor(&self) -> Result<DenseLu> {
        DenseLu::new(self.to_dense())
    }

    /// `T x = rhs` by dense LU, with `‖T x - rhs‖∞ ≤ 1e-9 ‖rhs‖∞` enforced.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.factor()?.solve(rhs)
    }

    pub fn inverse(&self) -> Result<DMatrix<Complex64>> {
        self.factor()?.inverse()
    }
}

/// Partial-pivoting LU of a dense complex matrix.
pub struct DenseLu {
    matrix: DMatrix<Complex64>,
    lu: LU<Complex64, Dyn, Dyn>,
}

const RESIDUAL_BOUND: f64 = 1e-9;

impl DenseLu {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return domain(format!("LU needs a non-empty square matrix, got {}x{}", matrix.nrows(), matrix.ncols()));
        }
        let lu = matrix.clone().lu();
        Ok(DenseLu { matrix, lu })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: rhs.len() });
        }
        let b = DVector::from_column_slice(rhs);
        let Some(x) = self.lu.solve(&b) else {
            return Err(Error::Singular { cond: f64::INFINITY });
        };
        let residual = (&self.matrix * &x - &b).camax();
        let scale = b.camax();
        if !(residual <= RESIDUAL_BOUND * scale) && scale > 0.0 {
            return Err(Error::Singular { cond: self.condest_1() });
        }
        Ok(x.as_slice().to_vec())
    }

    pub fn inverse(&self) -> Result<DMatrix<Complex64>> {
        self.lu
            .try_inverse()
            .ok_or(Error::Singular { cond: f64::INFINITY })
    }

    /// Hager–Higham estimate of `‖A‖₁ ‖A⁻¹‖₁`.
    pub fn condest_1(&self) -> f64 {
        let n = self.dim();
        let norm_a = (0..n)
            .map(|j| self.matrix.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let adj = self.matrix.adjoint().lu();
        let mut x = DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut estimate = 0.0;
        for iter in 0..5 {
            let Some(y) = self.lu.solve(&x) else { return f64::INFINITY };
            estimate = y.iter().map(|z| z.norm()).sum::<f64>();
            let xi = y.map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) });
            let Some(z) = adj.solve(&xi) else { return f64::INFINITY };
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let zx = z.dotc(&x).re;
            if iter > 0 && zmax <= zx {
                break;
            }
            x = DVector::from_element(n, ZERO);
            x[j] = Complex64::new(1.0, 0.0);
        }
        estimate * norm_a
    }
}

fn check_t1_domain(alpha: f64, r: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("T1 needs alpha in (0, 1), got {alpha}"));
    }
    if !(r > 0.0 && r <= 1.0) {
        return domain(format!("T1 needs R in (0, 1], got {r}"));
    }
    Ok(())
}

/// Leading off-diagonal term of `(T_N(φ_{α,R})⁻¹)_{k,l}` for the lower symbol:
/// `R^{|d|} |d|^{α-1} / Γ(α) · (1 + R²)^{-α}` with `d = l - k`, carrying the
/// sign `(-1)^d` only above the diagonal.
pub fn t1_entry(alpha: f64, r: f64, k: i64, l: i64) -> Result<f64> {
    check_t1_domain(alpha, r)?;
    if k == l {
        return domain("T1 leading term is singular on the diagonal");
    }
    let d = l - k;
    let m = d.unsigned_abs() as f64;
    let magnitude = r.powf(m) * m.powf(alpha - 1.0) / gamma(alpha)? * (1.0 + r * r).powf(-alpha);
    Ok(if d > 0 && d % 2 == 1 { -magnitude } else { magnitude })
}

/// `T_N(g₁⁻¹) T_N(g₂⁻¹)`, the product of the triangular sections of the
/// inverse Wiener–Hopf factors; it differs from `T_N⁻¹` by the Hankel correction.
pub fn t1_matrix(spec: &SymbolSpec, n: usize) -> Result<DMatrix<f64>> {
    let (alpha, r) = (spec.alpha, spec.r);
    let (s1, s2) = match spec.variant {
        Variant::Lower => (r, -r),
        Variant::Upper => (-r, r),
        Variant::Gl => return domain("T1 product needs the lower or upper symbol"),
    };
    let b: Vec<f64> = BinomIter::new(alpha).take(n + 1).collect();
    let lower = DMatrix::from_fn(n + 1, n + 1, |k, j| if k >= j { b[k - j] * s1.powi((k - j) as i32) } else { 0.0 });
    let upper = DMatrix::from_fn(n + 1, n + 1, |j, l| if l >= j { b[l - j] * s2.powi((l - j) as i32) } else { 0.0 });
    Ok(lower * upper)
}
