use num_complex::Complex64;

use super::table::{Cell, PlotSpec, Table};
use super::{
    CliError, CoeffsArgs, ConvergeArgs, ConvergeOp, DerivArgs, DerivMethod, IntegArgs, InvertArgs, LineArgs, ModeArg,
    Report, SolveArgs, VariantArg,
};
use crate::fracderiv::{
    dalpha_composite, dalpha_composite_grid, dalpha_grid, dalpha_grid_upper, gl_derivative, marchaud_lower,
    marchaud_upper, FunctionSpec,
};
use crate::fracint::{
    j_tilde_integral, j_tilde_literal, jalpha_grid, richardson, rl_integral, solve_dirichlet, QUAD_TOL,
};
use crate::interval::{d_alpha_ab, d_alpha_inf, j_alpha_inf, j_alpha_inf_function, Backend, IntervalMap};
use crate::symbol::{asymptotic_coeff, fourier_coeff_fft, fourier_coeff_series, SymbolSpec, Variant, DEFAULT_GRID};
use crate::toeplitz::{t1_matrix, MatvecMode, ToeplitzOperator};
use crate::wienerhopf::{default_truncation, factor, FourierPoly};

type Outcome = Result<Report, CliError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

fn parse_fn(id: &str) -> Result<FunctionSpec, CliError> {
    Ok(FunctionSpec::parse(id)?)
}

fn require_nonempty<T>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        invalid(format!("--{name} needs at least one value"))
    } else {
        Ok(())
    }
}

fn require_finite(name: &str, v: &[f64]) -> Result<(), CliError> {
    require_nonempty(name, v)?;
    match v.iter().find(|x| !x.is_finite()) {
        Some(x) => invalid(format!("--{name} has non-finite value {x}")),
        None => Ok(()),
    }
}

fn require_grid(v: &[usize], min: usize) -> Result<(), CliError> {
    require_nonempty("N", v)?;
    match v.iter().find(|&&n| n < min) {
        Some(n) => invalid(format!("--N values must be at least {min}, got {n}")),
        None => Ok(()),
    }
}

fn require_unit_order(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        invalid(format!("--alpha must lie in (0, 1), got {alpha}"))
    }
}

fn require_radius(r: f64) -> Result<(), CliError> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        invalid(format!("--R must lie in (0, 1], got {r}"))
    }
}

fn rel_error(value: f64, oracle: f64) -> f64 {
    if oracle == 0.0 {
        value.abs()
    } else {
        ((value - oracle) / oracle).abs()
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sorted_grid(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

pub fn coeffs(a: &CoeffsArgs) -> Outcome {
    if a.n_max == 0 || a.n_max > 1_000_000 {
        return invalid(format!("--n-max must lie in 1..=1000000, got {}", a.n_max));
    }
    let variant = match a.variant {
        VariantArg::Lower => Variant::Lower,
        VariantArg::Upper => Variant::Upper,
        VariantArg::Gl => Variant::Gl,
    };
    let spec = SymbolSpec::new(a.alpha, a.r, variant)?;
    let grid = a.grid.unwrap_or_else(|| DEFAULT_GRID.max((8 * a.n_max).next_power_of_two()));
    if grid < 4 * a.n_max {
        return invalid(format!("--grid {grid} must be at least 4 * n-max"));
    }
    let fft = fourier_coeff_fft(&spec, grid)?;
    let mut table = Table::new(["n", "re_series", "im_series", "re_fft", "im_fft", "asymptotic", "ratio"]);
    let mut worst: f64 = 0.0;
    let n_max = a.n_max as i64;
    for n in -n_max..=n_max {
        let s = fourier_coeff_series(&spec, n, a.tol)?;
        let f = fft.get(n)?;
        worst = worst.max((s - f).norm());
        let asym = match variant {
            _ if a.r < 1.0 || n == 0 => f64::NAN,
            Variant::Lower => asymptotic_coeff(a.alpha, n)?,
            Variant::Upper => asymptotic_coeff(a.alpha, -n)?,
            Variant::Gl => f64::NAN,
        };
        table.push(vec![n.into(), s.re.into(), s.im.into(), f.re.into(), f.im.into(), asym.into(), (s.re / asym).into()]);
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![2, 4], log_x: false, log_y: false },
        summary: vec![format!("max |series - fft| = {}", super::format_real(worst))],
    })
}

fn deriv_value(f: &FunctionSpec, a: &DerivArgs, x: f64, n: usize) -> Result<Complex64, CliError> {
    Ok(match a.method {
        DerivMethod::Grid if a.alpha > 1.0 => dalpha_composite_grid(f, a.alpha, x, n)?,
        DerivMethod::Grid => dalpha_grid(f, a.alpha, x, n, a.r)?,
        DerivMethod::Upper => dalpha_grid_upper(f, a.alpha, x, n, a.r)?,
        DerivMethod::Gl => Complex64::new(gl_derivative(f, a.alpha, x, n)?, 0.0),
    })
}

fn deriv_oracle(f: &FunctionSpec, alpha: f64, method: DerivMethod, x: f64, tol: f64) -> Result<f64, CliError> {
    let lower = |f: &FunctionSpec| -> Result<f64, CliError> {
        Ok(match f.marchaud_closed_form(alpha, x) {
            Some(v) => v,
            None => marchaud_lower(f, alpha, x, tol)?,
        })
    };
    Ok(match method {
        DerivMethod::Grid if alpha > 1.0 => dalpha_composite(f, alpha, x, tol)?,
        DerivMethod::Grid => lower(f)?,
        DerivMethod::Upper => marchaud_upper(f, alpha, x, tol)?,
        DerivMethod::Gl => lower(f)? / 2f64.powf(alpha),
    })
}

pub fn deriv(a: &DerivArgs) -> Outcome {
    if a.alpha > 1.0 {
        if a.method != DerivMethod::Grid {
            return invalid("orders above 1 are only available with --method grid");
        }
    } else {
        require_unit_order(a.alpha)?;
    }
    require_radius(a.r)?;
    require_finite("x", &a.x)?;
    require_grid(&a.n, 16)?;
    let f = parse_fn(&a.function)?;
    let mut table = Table::new(["N", "x", "re", "im", "oracle", "rel_error"]);
    for x in sorted(a.x.clone()) {
        let oracle = deriv_oracle(&f, a.alpha, a.method, x, a.tol)?;
        for &n in &sorted_grid(a.n.clone()) {
            let v = deriv_value(&f, a, x, n)?;
            table.push(vec![n.into(), x.into(), v.re.into(), v.im.into(), oracle.into(), rel_error(v.re, oracle).into()]);
        }
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![6], log_x: true, log_y: true },
        summary: Vec::new(),
    })
}

fn integ_oracle(f: &FunctionSpec, alpha: f64, x: f64, tol: f64) -> Result<f64, CliError> {
    Ok(match f.rl_closed_form(alpha, x) {
        Some(v) => v,
        None => rl_integral(f, alpha, x, tol)?,
    })
}

pub fn integ(a: &IntegArgs) -> Outcome {
    require_unit_order(a.alpha)?;
    require_finite("x", &a.x)?;
    require_finite("R", &a.r)?;
    for &r in &a.r {
        require_radius(r)?;
    }
    require_grid(&a.n, 16)?;
    let f = parse_fn(&a.function)?;
    let mut columns = vec!["N", "R", "x", "re", "im", "oracle", "rel_error"];
    if a.extrapolate {
        columns.push("richardson");
    }
    let mut table = Table::new(columns);
    for r in sorted(a.r.clone()) {
        for x in sorted(a.x.clone()) {
            let oracle = integ_oracle(&f, a.alpha, x, a.tol)?;
            let mut prev: Option<(usize, f64)> = None;
            for &n in &sorted_grid(a.n.clone()) {
                let v = jalpha_grid(&f, a.alpha, x, n, r)?;
                let mut row: Vec<Cell> =
                    vec![n.into(), r.into(), x.into(), v.re.into(), v.im.into(), oracle.into(), rel_error(v.re, oracle).into()];
                if a.extrapolate {
                    let ext = match prev {
                        Some((pn, pv)) if 2 * pn == n => richardson(pv, v.re, a.alpha),
                        _ => f64::NAN,
                    };
                    row.push(ext.into());
                }
                prev = Some((n, v.re));
                table.push(row);
            }
        }
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![7], log_x: true, log_y: true },
        summary: Vec::new(),
    })
}

pub fn invert_check(a: &InvertArgs) -> Outcome {
    require_finite("alpha", &a.alpha)?;
    require_finite("R", &a.r)?;
    require_grid(&a.n, 1)?;
    for &alpha in &a.alpha {
        require_unit_order(alpha)?;
    }
    if let Some(r) = a.r.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return invalid(format!("--R must lie in (0, 1) for the factorization, got {r}"));
    }
    let mut table =
        Table::new(["alpha", "R", "N", "max_abs_diff", "contraction_norm", "neumann_terms", "t1_remainder_scaled"]);
    let mut worst: f64 = 0.0;
    for alpha in sorted(a.alpha.clone()) {
        for r in sorted(a.r.clone()) {
            for &n in &sorted_grid(a.n.clone()) {
                let spec = SymbolSpec::lower(alpha, r)?;
                let inv = ToeplitzOperator::build(&spec, n, 1e-14)?.inverse()?;
                let fac = factor(alpha, r, default_truncation(alpha, r, n))?;
                let sec = fac.section(n)?;
                let mut diff: f64 = 0.0;
                let mut terms = 0;
                for j in 0..=n {
                    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
                    e[j] = Complex64::new(1.0, 0.0);
                    let out = sec.invert_apply(&FourierPoly::from_nonnegative(&e, fac.m())?, 200)?;
                    terms = terms.max(out.terms);
                    for (k, v) in out.coeffs.iter().enumerate() {
                        diff = diff.max((v - inv[(k, j)]).norm());
                    }
                }
                let t1 = t1_matrix(&spec, n)?;
                let (lo, hi) = ((n as f64 * 0.1).ceil() as usize, (n as f64 * 0.9).floor() as usize);
                let mut rem: f64 = 0.0;
                for k in lo..=hi {
                    for l in lo..=hi {
                        rem = rem.max((inv[(k, l)].re - t1[(k, l)]).abs());
                    }
                }
                worst = worst.max(diff);
                table.push(vec![
                    alpha.into(),
                    r.into(),
                    n.into(),
                    diff.into(),
                    sec.contraction_norm().into(),
                    terms.into(),
                    (rem * (n as f64).powf(1.0 - alpha)).into(),
                ]);
            }
        }
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 3, y_columns: vec![4, 5], log_x: true, log_y: true },
        summary: vec![format!("max |Wiener-Hopf - dense| = {}", super::format_real(worst))],
    })
}

pub fn solve(a: &SolveArgs) -> Outcome {
    if a.n < 16 {
        return invalid(format!("--N must be at least 16, got {}", a.n));
    }
    let psi = parse_fn(&a.function)?;
    let sol = solve_dirichlet(&psi, a.alpha, a.n)?;
    let mut columns = vec!["x", "y", "residual"];
    if a.literal {
        columns.extend(["integral_form", "literal_form"]);
    }
    let mut table = Table::new(columns);
    let residual = |x: f64| sol.residual.iter().find(|(rx, _)| *rx == x).map_or(f64::NAN, |(_, r)| *r);
    let mut direct_sup: f64 = 0.0;
    if a.mode == ModeArg::Direct {
        // Dense and FFT products of the section on the solution samples must agree.
        let frac = a.alpha - a.alpha.floor();
        let op = ToeplitzOperator::build(&SymbolSpec::lower(frac, 1.0)?, a.n, crate::fracint::ROW_TOL)?;
        let fast = op.matvec(&sol.y.samples, MatvecMode::Fast)?;
        let direct = op.matvec(&sol.y.samples, MatvecMode::Direct)?;
        direct_sup = fast.iter().zip(&direct).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    }
    for (j, v) in sol.y.samples.iter().enumerate() {
        let x = sol.y.node(j);
        let mut row: Vec<Cell> = vec![x.into(), v.re.into(), residual(x).into()];
        if a.literal {
            row.push(j_tilde_integral(&psi, a.alpha, x, QUAD_TOL)?.into());
            row.push(j_tilde_literal(&psi, a.alpha, x, QUAD_TOL)?.into());
        }
        table.push(row);
    }
    let mut summary = vec![
        format!("interior residual sup = {}", super::format_real(sol.residual_sup)),
        format!("N * max|y(1/N)|, |y(1-1/N)| = {}", super::format_real(sol.boundary_value * a.n as f64)),
    ];
    for (j, d) in sol.boundary_derivatives.iter().enumerate() {
        summary.push(format!("boundary derivative {} = {}", j + 1, super::format_real(*d)));
    }
    if a.mode == ModeArg::Direct {
        summary.push(format!("fast vs direct product gap = {}", super::format_real(direct_sup)));
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![2], log_x: false, log_y: false },
        summary,
    })
}

pub fn line(a: &LineArgs) -> Outcome {
    require_unit_order(a.alpha)?;
    require_finite("x", &a.x)?;
    if let Some(w) = a.a.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return invalid(format!("--A values must be positive, got {w}"));
    }
    let psi = parse_fn(&a.function)?;
    if psi.support().is_none() && !psi.is_identically_zero() {
        return invalid(format!("{psi} has unbounded support"));
    }
    let widths = sorted(a.a.clone());
    let mut columns: Vec<String> = ["x", "psi", "j_inf", "d_inf", "roundtrip"].iter().map(|s| s.to_string()).collect();
    columns.extend(widths.iter().map(|w| format!("d_ab_A{w}")));
    let mut table = Table::new(columns);
    let j = if psi.is_identically_zero() { None } else { Some(j_alpha_inf_function(&psi, a.alpha, 1e-13)?) };
    for x in sorted(a.x.clone()) {
        let d = d_alpha_inf(&psi, a.alpha, x, a.tol)?;
        let ji = j_alpha_inf(&psi, a.alpha, x, a.tol)?;
        let rt = match &j {
            Some(j) => d_alpha_inf(j, a.alpha, x, a.tol)?,
            None => 0.0,
        };
        let mut row: Vec<Cell> = vec![x.into(), psi.value(x).into(), ji.into(), d.into(), rt.into()];
        for &w in &widths {
            let map = IntervalMap::new(-w, w)?;
            let v = if x > -w && x < w {
                d_alpha_ab(&psi, a.alpha, &map, x, Backend::Quadrature { tol: a.tol })? / map.len().powf(a.alpha)
            } else {
                f64::NAN
            };
            row.push(v.into());
        }
        table.push(row);
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![2, 3, 4, 5], log_x: false, log_y: false },
        summary: Vec::new(),
    })
}

pub fn converge(a: &ConvergeArgs) -> Outcome {
    require_unit_order(a.alpha)?;
    require_finite("x", &a.x)?;
    require_grid(&a.n, 16)?;
    let f = parse_fn(&a.function)?;
    let mut table = Table::new(["N", "x", "value", "oracle", "abs_error", "observed_order"]);
    for x in sorted(a.x.clone()) {
        let oracle = match a.op {
            ConvergeOp::Deriv => deriv_oracle(&f, a.alpha, DerivMethod::Grid, x, a.tol)?,
            ConvergeOp::Gl => deriv_oracle(&f, a.alpha, DerivMethod::Gl, x, a.tol)?,
            ConvergeOp::Integ => integ_oracle(&f, a.alpha, x, a.tol)?,
        };
        let mut prev: Option<(usize, f64)> = None;
        for &n in &sorted_grid(a.n.clone()) {
            let value = match a.op {
                ConvergeOp::Deriv => dalpha_grid(&f, a.alpha, x, n, 1.0)?.re,
                ConvergeOp::Gl => gl_derivative(&f, a.alpha, x, n)?,
                ConvergeOp::Integ => jalpha_grid(&f, a.alpha, x, n, 1.0)?.re,
            };
            let err = (value - oracle).abs();
            let order = match prev {
                Some((pn, pe)) if pe > 0.0 && err > 0.0 => (pe / err).ln() / (n as f64 / pn as f64).ln(),
                _ => f64::NAN,
            };
            prev = Some((n, err));
            table.push(vec![n.into(), x.into(), value.into(), oracle.into(), err.into(), order.into()]);
        }
    }
    Ok(Report {
        table,
        plot: PlotSpec { x_column: 1, y_columns: vec![5], log_x: true, log_y: true },
        summary: Vec::new(),
    })
}
