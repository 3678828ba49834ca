//! Test-function registry and uniform grid samples.
//!
//! Registry entries are parsed from short ids (`const:c`, `poly:c0,c1,...`,
//! `pow:beta`, `bridge`, `bump:center,width`, `tent:center,width`, `sinpi`,
//! plus the aliases `t` and `zero`) and carry derivatives and closed-form
//! fractional derivatives/integrals where these are known.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::specialfn::rgamma;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Function-class metadata used as caller-asserted hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassFlags {
    /// Lipschitz on every compact subinterval of the open domain.
    pub locally_contractive: bool,
    /// Worst endpoint blow-up exponent `γ` in `|f| ≲ t^{-γ}`; `0` when bounded.
    pub endpoint_blowup: f64,
}

impl ClassFlags {
    pub const SMOOTH: ClassFlags = ClassFlags { locally_contractive: true, endpoint_blowup: 0.0 };

    /// Membership in `L¹_{1-α}`: blow-up no worse than `t^{-(1-α)}`.
    pub fn in_l1_class(&self, alpha: f64) -> bool {
        self.endpoint_blowup <= 1.0 - alpha
    }
}

/// A user-supplied function with optional first derivative and support.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub value: RealFn,
    pub derivative: Option<RealFn>,
    pub support: Option<(f64, f64)>,
    pub flags: ClassFlags,
}

#[derive(Clone)]
pub enum FunctionSpec {
    Const(f64),
    /// `Σ c_j t^j`.
    Poly(Vec<f64>),
    /// `t^β` on `t ≥ 0`.
    Pow(f64),
    /// `t (1 - t)`.
    Bridge,
    /// `(1 - z²)²` for `|z| < 1`, `z = (t - center)/width`; zero elsewhere.
    Bump { center: f64, width: f64 },
    /// `1 - |z|` for `|z| < 1`; zero elsewhere.
    Tent { center: f64, width: f64 },
    /// `sin(πt)`.
    SinPi,
    Custom(CustomFn),
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionSpec({self})")
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Const(c) => write!(f, "const:{c}"),
            FunctionSpec::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            FunctionSpec::Pow(b) => write!(f, "pow:{b}"),
            FunctionSpec::Bridge => f.write_str("bridge"),
            FunctionSpec::Bump { center, width } => write!(f, "bump:{center},{width}"),
            FunctionSpec::Tent { center, width } => write!(f, "tent:{center},{width}"),
            FunctionSpec::SinPi => f.write_str("sinpi"),
            FunctionSpec::Custom(c) => f.write_str(&c.name),
        }
    }
}

fn parse_list(body: &str, what: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad number '{s}' in {what}")))
                .and_then(|v| if v.is_finite() { Ok(v) } else { domain(format!("non-finite value in {what}")) })
        })
        .collect()
}

fn falling(beta: f64, k: u32) -> f64 {
    (0..k).map(|i| beta - i as f64).product()
}

impl FunctionSpec {
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        let (head, body) = match id.split_once(':') {
            Some((h, b)) => (h, Some(b)),
            None => (id, None),
        };
        let spec = match (head, body) {
            ("zero", None) => FunctionSpec::Const(0.0),
            ("t", None) => FunctionSpec::Poly(vec![0.0, 1.0]),
            ("bridge", None) => FunctionSpec::Bridge,
            ("sinpi", None) => FunctionSpec::SinPi,
            ("const", Some(b)) => match parse_list(b, id)?.as_slice() {
                [c] => FunctionSpec::Const(*c),
                _ => return domain(format!("'{id}' needs exactly one value")),
            },
            ("poly", Some(b)) => FunctionSpec::Poly(parse_list(b, id)?),
            ("pow", Some(b)) => match parse_list(b, id)?.as_slice() {
                [beta] if *beta > -1.0 => FunctionSpec::Pow(*beta),
                [_] => return domain(format!("'{id}': exponent must exceed -1")),
                _ => return domain(format!("'{id}' needs exactly one exponent")),
            },
            ("bump", Some(b)) | ("tent", Some(b)) => match parse_list(b, id)?.as_slice() {
                [center, width] if *width > 0.0 => {
                    let (center, width) = (*center, *width);
                    if head == "bump" {
                        FunctionSpec::Bump { center, width }
                    } else {
                        FunctionSpec::Tent { center, width }
                    }
                }
                _ => return domain(format!("'{id}' needs center,width with width > 0")),
            },
            _ => return domain(format!("unknown function id '{id}'")),
        };
        Ok(spec)
    }

    pub fn custom(name: impl Into<String>, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FunctionSpec::Custom(CustomFn {
            name: name.into(),
            value: Arc::new(value),
            derivative: None,
            support: None,
            flags: ClassFlags::SMOOTH,
        })
    }

    /// Attaches a first derivative to a custom function; other variants are returned unchanged.
    pub fn with_derivative(self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        match self {
            FunctionSpec::Custom(mut c) => {
                c.derivative = Some(Arc::new(d));
                FunctionSpec::Custom(c)
            }
            other => other,
        }
    }

    /// Declares the support of a custom function; other variants are returned unchanged.
    pub fn with_support(self, lo: f64, hi: f64) -> Self {
        match self {
            FunctionSpec::Custom(mut c) => {
                c.support = Some((lo, hi));
                FunctionSpec::Custom(c)
            }
            other => other,
        }
    }

    pub fn with_flags(self, flags: ClassFlags) -> Self {
        match self {
            FunctionSpec::Custom(mut c) => {
                c.flags = flags;
                FunctionSpec::Custom(c)
            }
            other => other,
        }
    }

    /// Monomial coefficients when the function is a polynomial.
    pub fn poly_coeffs(&self) -> Option<Vec<f64>> {
        match self {
            FunctionSpec::Const(c) => Some(vec![*c]),
            FunctionSpec::Poly(c) => Some(c.clone()),
            FunctionSpec::Bridge => Some(vec![0.0, 1.0, -1.0]),
            _ => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.poly_coeffs().is_some_and(|c| c.iter().all(|&v| v == 0.0))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Const(c) => *c,
            FunctionSpec::Poly(c) => c.iter().rev().fold(0.0, |acc, &v| acc * t + v),
            FunctionSpec::Pow(b) => {
                if t == 0.0 && *b == 0.0 {
                    1.0
                } else {
                    t.powf(*b)
                }
            }
            FunctionSpec::Bridge => t * (1.0 - t),
            FunctionSpec::Bump { center, width } => {
                let z = (t - center) / width;
                if z.abs() < 1.0 {
                    (1.0 - z * z).powi(2)
                } else {
                    0.0
                }
            }
            FunctionSpec::Tent { center, width } => {
                let z = (t - center) / width;
                (1.0 - z.abs()).max(0.0)
            }
            FunctionSpec::SinPi => (PI * t).sin(),
            FunctionSpec::Custom(c) => (c.value)(t),
        }
    }

    /// `f^{(k)}(t)` when available in closed form.
    pub fn derivative(&self, t: f64, k: u32) -> Option<f64> {
        if k == 0 {
            return Some(self.value(t));
        }
        match self {
            FunctionSpec::Custom(c) => {
                if k == 1 {
                    c.derivative.as_ref().map(|d| d(t))
                } else {
                    None
                }
            }
            FunctionSpec::Pow(b) => Some(falling(*b, k) * t.powf(b - k as f64)),
            FunctionSpec::SinPi => Some(PI.powi(k as i32) * (PI * t + k as f64 * PI / 2.0).sin()),
            FunctionSpec::Bump { center, width } => {
                let z = (t - center) / width;
                if z.abs() >= 1.0 {
                    return Some(0.0);
                }
                // (1 - z²)² = 1 - 2z² + z⁴
                let poly = [1.0, 0.0, -2.0, 0.0, 1.0];
                Some(poly_derivative(&poly, z, k) / width.powi(k as i32))
            }
            FunctionSpec::Tent { center, width } => {
                let z = (t - center) / width;
                match k {
                    1 if z.abs() < 1.0 && z != 0.0 => Some(-z.signum() / width),
                    1 if z.abs() > 1.0 => Some(0.0),
                    1 => None,
                    _ => None,
                }
            }
            _ => {
                let c = self.poly_coeffs()?;
                Some(poly_derivative(&c, t, k))
            }
        }
    }

    /// Closed interval outside which the function vanishes, when bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            FunctionSpec::Bump { center, width } | FunctionSpec::Tent { center, width } => {
                Some((center - width, center + width))
            }
            FunctionSpec::Custom(c) => c.support,
            _ => None,
        }
    }

    pub fn flags(&self) -> ClassFlags {
        match self {
            FunctionSpec::Pow(b) => ClassFlags { locally_contractive: true, endpoint_blowup: (-b).max(0.0) },
            FunctionSpec::Custom(c) => c.flags,
            _ => ClassFlags::SMOOTH,
        }
    }

    fn power_terms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            FunctionSpec::Pow(b) => Some(vec![(1.0, *b)]),
            _ => self
                .poly_coeffs()
                .map(|c| c.iter().enumerate().map(|(j, &v)| (v, j as f64)).filter(|(v, _)| *v != 0.0).collect()),
        }
    }

    /// Lower derivative on `[0, 1]` by the power rule
    /// `t^β ↦ 2^α Γ(β+1)/Γ(β+1-α) x^{β-α}`, for polynomial and power entries.
    pub fn marchaud_closed_form(&self, alpha: f64, x: f64) -> Option<f64> {
        let terms = self.power_terms()?;
        Some(
            terms
                .iter()
                .map(|&(c, b)| c * 2f64.powf(alpha) * rgamma(b + 1.0 - alpha) / rgamma(b + 1.0) * x.powf(b - alpha))
                .sum(),
        )
    }

    /// Integral on `[0, 1]` by `t^β ↦ 2^{-α} Γ(β+1)/Γ(β+1+α) x^{β+α}`.
    pub fn rl_closed_form(&self, alpha: f64, x: f64) -> Option<f64> {
        let terms = self.power_terms()?;
        Some(
            terms
                .iter()
                .map(|&(c, b)| c * 2f64.powf(-alpha) * rgamma(b + 1.0 + alpha) / rgamma(b + 1.0) * x.powf(b + alpha))
                .sum(),
        )
    }

    /// `f'(t)`, by central differences when no closed form is registered.
    pub fn slope(&self, t: f64) -> f64 {
        if let Some(d) = self.derivative(t, 1) {
            if d.is_finite() {
                return d;
            }
        }
        let h = 1e-5 * t.abs().max(1.0);
        let d = (self.value(t + h) - self.value(t - h)) / (2.0 * h);
        if d.is_finite() {
            d
        } else {
            0.0
        }
    }
}

fn poly_derivative(c: &[f64], t: f64, k: u32) -> f64 {
    c.iter()
        .enumerate()
        .skip(k as usize)
        .map(|(j, &v)| v * falling(j as f64, k) * t.powi((j - k as usize) as i32))
        .sum()
}

/// Samples `X_j = f(a + j(b-a)/N)`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<Complex64>,
}

impl GridFunction {
    /// Samples `f`; a non-finite value at index `0` or `N` is replaced by zero.
    pub fn sample(f: &FunctionSpec, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a < b) || n < 1 {
            return domain(format!("grid needs a < b and N >= 1, got [{a}, {b}], N = {n}"));
        }
        let values = (0..=n)
            .map(|j| {
                let t = if j == n { b } else { a + j as f64 * (b - a) / n as f64 };
                let v = f.value(t);
                if v.is_finite() {
                    Ok(v)
                } else if j == 0 || j == n {
                    Ok(0.0)
                } else {
                    domain(format!("{f} is not finite at interior node {t}"))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self::from_real(a, b, values))
    }

    pub fn from_real(a: f64, b: f64, values: Vec<f64>) -> Self {
        GridFunction { a, b, samples: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn n(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.n() {
            self.b
        } else {
            self.a + j as f64 * (self.b - self.a) / self.n() as f64
        }
    }

    pub fn real(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }
}
