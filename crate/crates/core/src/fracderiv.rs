//! Fractional derivative `D_α`: grid rows of the symbol's finite section,
//! the Marchaud closed form, Grünwald–Letnikov differences, endpoint values
//! and composition with integer derivatives.
//!
//! `D_α` is `2^α` times the classical Marchaud derivative; every quadrature
//! oracle here carries that factor.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_both_soft, integrate_left_soft};
use crate::specialfn::{binom_coeffs, gamma};
use crate::symbol::{fourier_coeffs_series, SymbolSpec, Variant};

pub use crate::functions::{FunctionSpec, GridFunction};

/// Series tolerance for grid-row coefficients.
pub const ROW_TOL: f64 = 1e-12;
/// Default absolute tolerance for the Marchaud quadratures.
pub const QUAD_TOL: f64 = 1e-10;
/// Smallest admissible grid for derivative rows.
pub const MIN_GRID: usize = 16;

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        domain(format!("order must lie in (0, 1), got {alpha}"))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        domain(format!("tolerance must be positive, got {tol}"))
    }
}

/// Row index `floor(N x)`, required to be interior.
pub fn grid_index(x: f64, n: usize) -> Result<usize> {
    if n < MIN_GRID {
        return domain(format!("grid needs N >= {MIN_GRID}, got {n}"));
    }
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("x must lie in (0, 1), got {x}"));
    }
    let k = (n as f64 * x).floor() as usize;
    if k < 1 || k > n - 1 {
        return domain(format!("x = {x} maps to boundary row {k} at N = {n}"));
    }
    Ok(k)
}

/// `N^s Σ_l δ(k - l) X_l` for the symbol of order `s = spec.alpha`.
///
/// Only the `N + 1` coefficients seen by row `k` are evaluated.
pub fn symbol_row_apply(spec: &SymbolSpec, grid: &GridFunction, k: usize, tol: f64) -> Result<Complex64> {
    let n = grid.n();
    if k > n {
        return Err(Error::Dimension { expected: n + 1, actual: k + 1 });
    }
    let k = k as i64;
    let deltas = fourier_coeffs_series(spec, k - n as i64, k, tol)?;
    // deltas[i] is δ(k - n + i), paired with X_{n - i}.
    let sum: Complex64 = deltas.iter().enumerate().map(|(i, d)| d * grid.samples[n - i]).sum();
    Ok(sum * (n as f64).powf(spec.alpha))
}

fn grid_row(f: &FunctionSpec, spec: &SymbolSpec, x: f64, n: usize) -> Result<Complex64> {
    let k = grid_index(x, n)?;
    if f.is_identically_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let grid = GridFunction::sample(f, 0.0, 1.0, n)?;
    symbol_row_apply(spec, &grid, k, ROW_TOL)
}

/// `N^α (T_N(φ_{α,R}) X_N)_k` with `k = floor(N x)`; no limit is taken.
pub fn dalpha_grid(f: &FunctionSpec, alpha: f64, x: f64, n: usize, r: f64) -> Result<Complex64> {
    check_order(alpha)?;
    grid_row(f, &SymbolSpec::lower(alpha, r)?, x, n)
}

/// Row of the upper-variant section; approximates the upper Marchaud derivative.
pub fn dalpha_grid_upper(f: &FunctionSpec, alpha: f64, x: f64, n: usize, r: f64) -> Result<Complex64> {
    check_order(alpha)?;
    grid_row(f, &SymbolSpec::upper(alpha, r)?, x, n)
}

/// `N^n/2^n (T_N(φ_n) X_N)_k` at `R = 1`, which tends to `f^{(n)}(x)`.
pub fn integer_symbol_action(f: &FunctionSpec, order: u32, x: f64, n: usize) -> Result<f64> {
    if order == 0 {
        return domain("integer order must be at least 1");
    }
    let spec = SymbolSpec::lower(order as f64, 1.0)?;
    let v = grid_row(f, &spec, x, n)?;
    Ok(v.re / 2f64.powi(order as i32))
}

/// `(2^α/Γ(-α)) (∫_a^x (x-u)^{-α-1}(f(u) - f(x)) du - f(x)(x-a)^{-α}/α)`.
///
/// The integrand is regularised by subtracting `f'(x)(u - x)`, whose
/// contribution is added back in closed form; the region
/// `x - u < 1e-6 (x - a)` uses the local quadratic model of `f`.
pub(crate) fn marchaud_core(
    value: &dyn Fn(f64) -> f64,
    slope: f64,
    alpha: f64,
    a: f64,
    x: f64,
    tol: f64,
) -> Result<f64> {
    check_order(alpha)?;
    check_tol(tol)?;
    if !(x > a) {
        return domain(format!("evaluation point {x} must exceed the lower limit {a}"));
    }
    let fx = value(x);
    if !fx.is_finite() {
        return domain(format!("function is not finite at x = {x}"));
    }
    let h = x - a;
    let c = if slope.is_finite() { slope } else { 0.0 };
    let remainder = |s: f64| value(x - s) - fx + c * s;

    let s0 = 1e-6 * h;
    let curvature = 2.0 * remainder(s0) / (s0 * s0);
    let head = if curvature.is_finite() { 0.5 * curvature * s0.powf(2.0 - alpha) / (2.0 - alpha) } else { 0.0 };
    let near = integrate_left_soft(|s| remainder(s) * s.powf(-alpha - 1.0), s0, 0.5 * h, tol / 3.0)?;
    let far = integrate_left_soft(
        |u| (value(u) - fx + c * (x - u)) * (x - u).powf(-alpha - 1.0),
        a,
        a + 0.5 * h,
        tol / 3.0,
    )?;
    let integral = head + near + far - c * h.powf(1.0 - alpha) / (1.0 - alpha);
    Ok(2f64.powf(alpha) / gamma(-alpha)? * (integral - fx * h.powf(-alpha) / alpha))
}

/// Lower derivative on `[a, x]` of a registry function.
pub(crate) fn marchaud_on(f: &FunctionSpec, alpha: f64, a: f64, x: f64, tol: f64) -> Result<f64> {
    if f.is_identically_zero() {
        check_order(alpha)?;
        return Ok(0.0);
    }
    marchaud_core(&|t| f.value(t), f.slope(x), alpha, a, x, tol)
}

/// Marchaud lower derivative `D_α f(x)` on `[0, 1]`.
pub fn marchaud_lower(f: &FunctionSpec, alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("x must lie in (0, 1), got {x}"));
    }
    marchaud_on(f, alpha, 0.0, x, tol)
}

/// Upper derivative: weight `(t-x)^{-α-1}` over `(x, 1)` and boundary term `f(x)(1-x)^{-α}/α`.
pub fn marchaud_upper(f: &FunctionSpec, alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("x must lie in (0, 1), got {x}"));
    }
    if f.is_identically_zero() {
        check_order(alpha)?;
        return Ok(0.0);
    }
    marchaud_core(&|u| f.value(1.0 - u), -f.slope(x), alpha, 0.0, 1.0 - x, tol)
}

/// Grünwald–Letnikov weights `w_m = w_{m-1}(m - 1 - α)/m`, `w_0 = 1`.
pub fn gl_weights(alpha: f64, count: usize) -> Result<Vec<f64>> {
    Ok(binom_coeffs(-alpha, count)?.coeffs)
}

/// `N^α Σ_{l=0}^{k} w_{k-l} f(l/N)` with `k = floor(N x)`.
pub fn gl_derivative(f: &FunctionSpec, alpha: f64, x: f64, n: usize) -> Result<f64> {
    check_order(alpha)?;
    if n == 0 || !(x > 0.0) {
        return domain(format!("need N >= 1 and x > 0, got N = {n}, x = {x}"));
    }
    let k = (n as f64 * x).floor() as usize;
    if k < 1 {
        return domain(format!("x = {x} maps to row 0 at N = {n}"));
    }
    let w = gl_weights(alpha, k + 1)?;
    let mut sum = 0.0;
    for l in 0..=k {
        let v = f.value(l as f64 / n as f64);
        let v = if v.is_finite() {
            v
        } else if l == 0 {
            0.0
        } else {
            return domain(format!("{f} is not finite at node {l}/{n}"));
        };
        sum += w[k - l] * v;
    }
    Ok(sum * (n as f64).powf(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

impl std::str::FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(Endpoint::Zero),
            "one" | "1" => Ok(Endpoint::One),
            _ => domain(format!("endpoint must be 'zero' or 'one', got '{s}'")),
        }
    }
}

/// Grid value at an endpoint row and the two candidate limits at `x = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointReport {
    pub grid: Complex64,
    /// `(2^α/Γ(-α)) ∫₀¹ t^{-α-1} f(t) dt`; `None` when divergent or at `x = 0`.
    pub stated: Option<f64>,
    /// `(2^α/Γ(-α)) ∫₀¹ (1-t)^{-α-1} f(t) dt`; `None` at `x = 0`.
    pub reflected: Option<f64>,
}

impl EndpointReport {
    pub fn residual_stated(&self) -> Option<f64> {
        self.stated.map(|s| (self.grid.re - s).abs())
    }

    pub fn residual_reflected(&self) -> Option<f64> {
        self.reflected.map(|s| (self.grid.re - s).abs())
    }
}

/// Row `0` or row `N` of the order-`α` section against the samples of `f`.
pub fn dalpha_endpoint(f: &FunctionSpec, alpha: f64, which: Endpoint, n: usize) -> Result<EndpointReport> {
    check_order(alpha)?;
    if n < MIN_GRID {
        return domain(format!("grid needs N >= {MIN_GRID}, got {n}"));
    }
    let zero_tol = 1e-12;
    let (k, edge) = match which {
        Endpoint::Zero => (0, 0.0),
        Endpoint::One => (n, 1.0),
    };
    let fe = f.value(edge);
    if !(fe.abs() <= zero_tol) {
        return domain(format!("{f} must vanish at t = {edge}, got {fe}"));
    }
    let spec = SymbolSpec::lower(alpha, 1.0)?;
    let grid = GridFunction::sample(f, 0.0, 1.0, n)?;
    let value = symbol_row_apply(&spec, &grid, k, ROW_TOL)?;
    if which == Endpoint::Zero {
        return Ok(EndpointReport { grid: value, stated: None, reflected: None });
    }
    let scale = 2f64.powf(alpha) / gamma(-alpha)?;
    let reflected = integrate_both_soft(|t| f.value(t) * (1.0 - t).powf(-alpha - 1.0), 0.0, 1.0, QUAD_TOL)
        .ok()
        .map(|v| scale * v);
    let stated = if f.value(0.0).abs() <= zero_tol {
        integrate_both_soft(|t| f.value(t) * t.powf(-alpha - 1.0), 0.0, 1.0, QUAD_TOL)
            .ok()
            .map(|v| scale * v)
    } else {
        None
    };
    Ok(EndpointReport { grid: value, stated, reflected })
}

fn split_order(alpha_total: f64) -> Result<(u32, f64)> {
    if !(alpha_total > 1.0 && alpha_total.is_finite()) {
        return domain(format!("composite order must exceed 1, got {alpha_total}"));
    }
    let n = alpha_total.floor();
    let frac = alpha_total - n;
    if frac < 1e-12 {
        return domain(format!("composite order {alpha_total} has no fractional part"));
    }
    Ok((n as u32, frac))
}

/// `n`-th derivative of `f` as a registry function, when available in closed form.
pub(crate) fn nth_derivative(f: &FunctionSpec, n: u32) -> Result<FunctionSpec> {
    if f.derivative(0.5, n).is_none() {
        return domain(format!("{f} has no closed-form derivative of order {n}"));
    }
    let (g, dg) = (f.clone(), f.clone());
    let d = FunctionSpec::custom(format!("d{n}[{f}]"), move |t| g.derivative(t, n).unwrap_or(f64::NAN));
    Ok(if f.derivative(0.5, n + 1).is_some() {
        d.with_derivative(move |t| dg.derivative(t, n + 1).unwrap_or(f64::NAN))
    } else {
        d
    })
}

/// `D^{α+n} f(x) = 2^n D_α(f^{(n)})(x)` by quadrature, for `f` vanishing with
/// its first `n - 1` derivatives at both ends.
pub fn dalpha_composite(f: &FunctionSpec, alpha_total: f64, x: f64, tol: f64) -> Result<f64> {
    let (n, frac) = split_order(alpha_total)?;
    for j in 0..n {
        for edge in [0.0, 1.0] {
            match f.derivative(edge, j) {
                Some(v) if v.abs() <= 1e-10 => {}
                Some(v) => return domain(format!("derivative {j} of {f} is {v} at t = {edge}, not 0")),
                None => return domain(format!("derivative {j} of {f} is unavailable at t = {edge}")),
            }
        }
    }
    let d = nth_derivative(f, n)?;
    Ok(2f64.powi(n as i32) * marchaud_lower(&d, frac, x, tol)?)
}

/// Row of the order-`alpha_total` symbol at `R = 1` against the samples of `f`.
pub fn dalpha_composite_grid(f: &FunctionSpec, alpha_total: f64, x: f64, n: usize) -> Result<Complex64> {
    split_order(alpha_total)?;
    let spec = SymbolSpec::new(alpha_total, 1.0, Variant::Lower)?;
    grid_row(f, &spec, x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t() -> FunctionSpec {
        FunctionSpec::parse("t").unwrap()
    }

    #[test]
    fn zero_function_gives_zero() {
        let z = FunctionSpec::Const(0.0);
        assert_eq!(dalpha_grid(&z, 0.5, 0.3, 64, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(marchaud_lower(&z, 0.5, 0.3, QUAD_TOL).unwrap(), 0.0);
        assert_eq!(marchaud_upper(&z, 0.5, 0.3, QUAD_TOL).unwrap(), 0.0);
        let e = dalpha_endpoint(&z, 0.5, Endpoint::One, 64).unwrap();
        assert_eq!(e.grid.re, 0.0);
    }

    #[test]
    fn marchaud_matches_power_rule() {
        let v = marchaud_lower(&t(), 0.5, 0.25, QUAD_TOL).unwrap();
        assert!((v - 0.797_884_560_802_865).abs() < 1e-9, "{v}");
        let sq = FunctionSpec::Poly(vec![0.0, 0.0, 1.0]);
        let v = marchaud_lower(&sq, 0.5, 0.5, QUAD_TOL).unwrap();
        assert!((v - 0.752_252_778_063_675).abs() < 1e-9, "{v}");
        for id in ["const:1", "bridge", "poly:1,-2,0,3", "pow:0.7", "pow:1.5"] {
            let f = FunctionSpec::parse(id).unwrap();
            for &alpha in &[0.2, 0.5, 0.8] {
                for &x in &[0.25, 0.5, 0.75] {
                    let q = marchaud_lower(&f, alpha, x, QUAD_TOL).unwrap();
                    let c = f.marchaud_closed_form(alpha, x).unwrap();
                    assert!((q - c).abs() < 1e-7 * (1.0 + c.abs()), "{id} a={alpha} x={x}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn constant_is_boundary_term_only() {
        let v = marchaud_lower(&FunctionSpec::Const(3.0), 0.5, 0.25, QUAD_TOL).unwrap();
        let expected = -2f64.sqrt() / gamma(-0.5).unwrap() * 3.0 * 0.25f64.powf(-0.5) / 0.5;
        assert!((v - expected).abs() < 1e-10);
    }

    #[test]
    fn upper_is_reflected_lower() {
        let f = FunctionSpec::parse("poly:0,1,0,-2").unwrap();
        let coeffs = f.poly_coeffs().unwrap();
        let g = FunctionSpec::custom("reflected", move |u: f64| {
            coeffs.iter().rev().fold(0.0, |acc, &c| acc * (1.0 - u) + c)
        });
        for &x in &[0.2, 0.5, 0.8] {
            let up = marchaud_upper(&f, 0.4, x, QUAD_TOL).unwrap();
            let lo = marchaud_lower(&g, 0.4, 1.0 - x, QUAD_TOL).unwrap();
            assert!((up - lo).abs() < 1e-8, "{up} vs {lo}");
        }
        let one_minus_t = FunctionSpec::Poly(vec![1.0, -1.0]);
        let v = marchaud_upper(&one_minus_t, 0.5, 0.75, QUAD_TOL).unwrap();
        assert!((v - 0.797_884_560_802_865).abs() < 1e-9);
    }

    #[test]
    fn grid_row_converges_to_marchaud() {
        let exact = 0.797_884_560_802_865;
        let errs: Vec<f64> = [256, 1024, 4096]
            .iter()
            .map(|&n| (dalpha_grid(&t(), 0.5, 0.25, n, 1.0).unwrap().re - exact).abs() / exact)
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(errs[2] < 0.05);

        let b = FunctionSpec::Bridge;
        let oracle = marchaud_lower(&b, 0.5, 0.5, QUAD_TOL).unwrap();
        let errs: Vec<f64> =
            [256, 1024, 4096].iter().map(|&n| (dalpha_grid(&b, 0.5, 0.5, n, 1.0).unwrap().re - oracle).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn upper_grid_row_tracks_upper_derivative() {
        let b = FunctionSpec::parse("poly:0,1,0,-1").unwrap();
        let oracle = marchaud_upper(&b, 0.5, 0.5, QUAD_TOL).unwrap();
        let v = dalpha_grid_upper(&b, 0.5, 0.5, 2048, 1.0).unwrap().re;
        assert!((v - oracle).abs() < 0.05 * oracle.abs(), "{v} vs {oracle}");
    }

    #[test]
    fn gl_weights_follow_recurrence() {
        let w = gl_weights(0.5, 4).unwrap();
        assert_eq!(w, vec![1.0, -0.5, -0.125, -0.0625]);
    }

    #[test]
    fn gl_limit_and_scale() {
        let gl = gl_derivative(&t(), 0.5, 0.25, 4096).unwrap();
        assert!((gl - 0.564_189_583_547_756).abs() < 1e-3, "{gl}");
        let ratio = dalpha_grid(&t(), 0.5, 0.5, 4096, 1.0).unwrap().re / gl_derivative(&t(), 0.5, 0.5, 4096).unwrap();
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn integer_action_recovers_derivatives() {
        let f = FunctionSpec::SinPi;
        for order in 1..=2u32 {
            let errs: Vec<f64> = [64, 256]
                .iter()
                .map(|&n| {
                    let node = (0.3 * n as f64).floor() / n as f64;
                    (integer_symbol_action(&f, order, 0.3, n).unwrap() - f.derivative(node, order).unwrap()).abs()
                })
                .collect();
            assert!(errs[1] < errs[0] && errs[1] < 1e-2, "order {order}: {errs:?}");
        }
    }

    #[test]
    fn endpoint_zero_tends_to_zero() {
        let b = FunctionSpec::Bridge;
        let v: Vec<f64> =
            [64, 256, 1024].iter().map(|&n| dalpha_endpoint(&b, 0.5, Endpoint::Zero, n).unwrap().grid.norm()).collect();
        assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
        assert!(dalpha_endpoint(&FunctionSpec::Const(1.0), 0.5, Endpoint::Zero, 64).is_err());
    }

    #[test]
    fn endpoint_one_follows_reflected_weight() {
        let f = FunctionSpec::Poly(vec![0.0, 0.0, 1.0, -1.0]);
        let r = dalpha_endpoint(&f, 0.5, Endpoint::One, 2048).unwrap();
        let (rs, rr) = (r.residual_stated().unwrap(), r.residual_reflected().unwrap());
        assert!(rr < rs, "stated {rs}, reflected {rr}");
        assert!(rr < 0.05 * r.reflected.unwrap().abs());
    }

    #[test]
    fn composite_matches_power_rule() {
        let f = FunctionSpec::Poly(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        let second = FunctionSpec::Poly(vec![2.0, -12.0, 12.0]);
        let oracle = 4.0 * second.marchaud_closed_form(0.5, 0.5).unwrap();
        assert!((oracle + 9.027_033_336_764).abs() < 1e-6, "{oracle}");
        let v = dalpha_composite(&f, 2.5, 0.5, QUAD_TOL).unwrap();
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
        assert!(dalpha_composite(&FunctionSpec::Bridge, 2.5, 0.5, QUAD_TOL).is_err());
    }

    #[test]
    fn composite_grid_two_routes() {
        let f = FunctionSpec::Poly(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        let direct = dalpha_composite_grid(&f, 2.5, 0.5, 1024).unwrap().re;
        let second = FunctionSpec::Poly(vec![2.0, -12.0, 12.0]);
        let via = 4.0 * dalpha_grid(&second, 0.5, 0.5, 1024, 1.0).unwrap().re;
        assert!((direct - via).abs() < 0.05 * via.abs(), "{direct} vs {via}");
    }

    #[test]
    fn preconditions_are_validated() {
        assert!(dalpha_grid(&t(), 1.5, 0.5, 64, 1.0).is_err());
        assert!(dalpha_grid(&t(), 0.5, 0.5, 8, 1.0).is_err());
        assert!(dalpha_grid(&t(), 0.5, 0.001, 64, 1.0).is_err());
        assert!(dalpha_grid(&t(), 0.5, 0.5, 64, 1.5).is_err());
        assert!(marchaud_lower(&t(), 0.5, 0.5, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn grid_row_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, x in 0.1..0.9f64) {
            let n = 128;
            let f = FunctionSpec::Bridge;
            let g = FunctionSpec::SinPi;
            let combo = FunctionSpec::custom("combo", move |t| a * t * (1.0 - t) + b * (std::f64::consts::PI * t).sin());
            let lhs = dalpha_grid(&combo, 0.5, x, n, 1.0).unwrap();
            let rhs = dalpha_grid(&f, 0.5, x, n, 1.0).unwrap() * a + dalpha_grid(&g, 0.5, x, n, 1.0).unwrap() * b;
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn grid_row_is_real_for_real_samples(x in 0.1..0.9f64, r in 0.5..1.0f64) {
            let v = dalpha_grid(&FunctionSpec::SinPi, 0.5, x, 64, r).unwrap();
            prop_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1.0));
        }
    }
}
