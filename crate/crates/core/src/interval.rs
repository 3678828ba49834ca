//! Operators transported to `[a, b]` by the affine pullback
//! `f_{a,b}(t) = f(a + t(b - a))`, and the whole-line operators obtained as
//! `b - a → ∞` limits.

use crate::error::{domain, Result};
use crate::fracderiv::{dalpha_grid, marchaud_on, FunctionSpec};
use crate::fracint::{rl_integral_function, rl_on};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMap {
    a: f64,
    b: f64,
}

impl IntervalMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return domain(format!("interval needs finite a < b, got [{a}, {b}]"));
        }
        Ok(IntervalMap { a, b })
    }

    pub fn unit() -> Self {
        IntervalMap { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// `t = (x - a)/(b - a)`.
    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.a) / self.len()
    }

    /// `x = a + t(b - a)`.
    pub fn from_unit(&self, t: f64) -> f64 {
        if t == 1.0 {
            self.b
        } else {
            self.a + t * self.len()
        }
    }

    /// `f_{a,b}`, with derivative `(b - a) f'(a + t(b - a))` when `f'` is known.
    pub fn pullback(&self, f: &FunctionSpec) -> FunctionSpec {
        let map = *self;
        let g = f.clone();
        let out = FunctionSpec::custom(format!("{f}@[{},{}]", self.a, self.b), move |t| g.value(map.from_unit(t)));
        let out = match f.support() {
            Some((lo, hi)) => out.with_support(self.to_unit(lo), self.to_unit(hi)),
            None => out,
        };
        let out = out.with_flags(f.flags());
        if f.derivative(self.from_unit(0.5), 1).is_none() {
            return out;
        }
        let g = f.clone();
        out.with_derivative(move |t| map.len() * g.derivative(map.from_unit(t), 1).unwrap_or(f64::NAN))
    }
}

/// Evaluation route for [`d_alpha_ab`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// Toeplitz row of the pulled-back samples.
    Grid { n: usize, r: f64 },
    /// Closed-form Marchaud integral on `[a, x]`.
    Quadrature { tol: f64 },
}

fn check_inside(map: &IntervalMap, x: f64, closed_right: bool) -> Result<()> {
    let ok = x > map.a && (x < map.b || (closed_right && x == map.b));
    if ok {
        Ok(())
    } else {
        domain(format!("x = {x} outside the interval [{}, {}]", map.a, map.b))
    }
}

/// `D_α(f_{a,b})((x - a)/(b - a))`.
pub fn d_alpha_ab(f: &FunctionSpec, alpha: f64, map: &IntervalMap, x: f64, backend: Backend) -> Result<f64> {
    check_inside(map, x, false)?;
    match backend {
        Backend::Quadrature { tol } => Ok(map.len().powf(alpha) * marchaud_on(f, alpha, map.a, x, tol)?),
        Backend::Grid { n, r } => Ok(dalpha_grid(&map.pullback(f), alpha, map.to_unit(x), n, r)?.re),
    }
}

/// `((b-a)^{-α}/(2^α Γ(α))) ∫_a^x f(u)(x-u)^{α-1} du`.
pub fn j_alpha_ab(f: &FunctionSpec, alpha: f64, map: &IntervalMap, x: f64, tol: f64) -> Result<f64> {
    check_inside(map, x, true)?;
    Ok(map.len().powf(-alpha) * rl_on(f, alpha, map.a, x, tol)?)
}

fn lower_bound(f: &FunctionSpec) -> Result<f64> {
    match f.support() {
        Some((lo, _)) if lo.is_finite() => Ok(lo),
        _ => domain(format!("{f} has no bounded support from below")),
    }
}

/// `(2^α/Γ(-α)) ∫_{-∞}^x (x-u)^{-α-1}(f(u) - f(x)) du`.
///
/// The integral is cut at the support's lower bound `L`; the part over
/// `(-∞, L)` equals `-f(x)(x-L)^{-α}/α` exactly.
pub fn d_alpha_inf(f: &FunctionSpec, alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if f.is_identically_zero() {
        return marchaud_on(f, alpha, x - 1.0, x, tol);
    }
    let lo = lower_bound(f)?;
    if x <= lo {
        return marchaud_on(&FunctionSpec::Const(0.0), alpha, x - 1.0, x, tol);
    }
    marchaud_on(f, alpha, lo, x, tol)
}

/// `(1/(2^α Γ(α))) ∫_{-∞}^x f(u)(x-u)^{α-1} du`.
pub fn j_alpha_inf(f: &FunctionSpec, alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if f.is_identically_zero() {
        return rl_on(f, alpha, x - 1.0, x, tol);
    }
    let lo = lower_bound(f)?;
    rl_on(f, alpha, lo, x, tol)
}

/// `x ↦ j_alpha_inf(f, alpha, x)` as a registry function supported on `[L, ∞)`.
pub fn j_alpha_inf_function(f: &FunctionSpec, alpha: f64, tol: f64) -> Result<FunctionSpec> {
    let lo = lower_bound(f)?;
    rl_integral_function(f, alpha, lo, tol)
}
