use std::path::PathBuf;
use std::process::{Command, Output};

fn toepfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toepfrac")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toepfrac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn coeffs_table_layout() {
    let out = toepfrac(&["coeffs", "--alpha", "0.5", "--R", "1", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines[0], "n,re_series,im_series,re_fft,im_fft,asymptotic,ratio");
    assert_eq!(lines.len(), 17 + 2, "header, 17 rows, trailing empty field");
    assert!(!text.contains('\r'));
    let row: Vec<&str> = lines[9].split(',').collect();
    assert_eq!(row[0], "0");
    assert_eq!(row[5], "nan");
    // 12 significant digits in scientific notation.
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 12);
}

#[test]
fn deriv_rows_follow_closed_form() {
    let out = toepfrac(&["deriv", "--alpha", "0.5", "--fn", "t", "--x", "0.25", "--N", "256,1024"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0][4] - 0.797885).abs() < 1e-6);
    assert!(rows[1][5] < rows[0][5]);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        vec!["deriv", "--alpha", "1.0", "--fn", "t"],
        vec!["deriv", "--alpha", "0.5", "--fn", "unknown"],
        vec!["integ", "--alpha", "0.5", "--fn", "t", "--N", "4096"],
        vec!["invert-check", "--R", "1"],
        vec!["solve", "--alpha", "3.5"],
        vec!["line", "--alpha", "0.5", "--fn", "const:1"],
        vec!["coeffs", "--alpha", "0.5", "--gnuplot"],
        vec!["deriv", "--alpha"],
        vec!["no-such-command"],
    ] {
        let out = toepfrac(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_three() {
    let out = toepfrac(&["coeffs", "--alpha", "0.5", "--n-max", "2", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn writes_csv_and_gnuplot_script() {
    let csv = scratch("conv.csv");
    let path = csv.to_str().unwrap();
    let out = toepfrac(&["converge", "--alpha", "0.5", "--fn", "bridge", "--x", "0.5", "--N", "64,128", "--out", path, "--gnuplot"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("N,x,value,oracle,abs_error,observed_order\n"));
    let script = std::fs::read_to_string(csv.with_extension("plt")).unwrap();
    assert!(script.contains(&format!("'{path}' using 1:5")));
}

#[test]
fn solve_reports_residual() {
    let out = toepfrac(&["solve", "--alpha", "2.5", "--fn", "const:1", "--N", "64", "--paper-literal"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("x,y,residual,integral_form,literal_form\n"));
    assert_eq!(text.lines().count(), 66);
    assert!(String::from_utf8_lossy(&out.stderr).contains("interior residual sup"));
}

#[test]
fn line_and_integ_run() {
    let out = toepfrac(&["line", "--alpha", "0.5", "--x", "-0.5,0.5", "--A", "2,8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("x,psi,j_inf,d_inf,roundtrip,d_ab_A2,d_ab_A8\n"));
    let out = toepfrac(&["integ", "--alpha", "0.5", "--fn", "t", "--N", "64,128", "--extrapolate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(!last.ends_with(",nan"), "{last}");
}
