use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

/// Scientific notation with 12 significant digits; `-0` prints as `0`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v:.11e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) => format_real(*v),
        }
    }
}

/// Column-named table rendered as comma-separated text with `\n` line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row; the width must match the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Columns to draw in the companion gnuplot script (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x_column: usize,
    pub y_columns: Vec<usize>,
    pub log_x: bool,
    pub log_y: bool,
}

pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("plt")
}

pub fn gnuplot_script(csv: &Path, table: &Table, plot: &PlotSpec) -> String {
    let name = csv.display();
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel \"{}\"", table.columns[plot.x_column - 1]);
    if plot.log_x {
        let _ = writeln!(s, "set logscale x");
    }
    if plot.log_y {
        let _ = writeln!(s, "set logscale y");
    }
    let parts: Vec<String> = plot
        .y_columns
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let file = if i == 0 { format!("'{name}'") } else { "''".to_string() };
            format!("{file} using {}:{y} with linespoints", plot.x_column)
        })
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

pub fn write_files(table: &Table, out: Option<&Path>, gnuplot: Option<&PlotSpec>) -> std::io::Result<()> {
    let csv = table.to_csv();
    match out {
        Some(path) => {
            fs::write(path, csv)?;
            if let Some(plot) = gnuplot {
                fs::write(script_path(path), gnuplot_script(path, table, plot))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(csv.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e),
                _ => {}
            }
        }
    }
    Ok(())
}
