//! Text formats for experiment artifacts.
//!
//! All writers are deterministic: floats use 17 significant digits in
//! scientific notation with a `.` separator, lines end in `\n`, and complex
//! numbers are written as two real fields.
//!
//! * matrices: one line per row, `re,im` pairs in row-major order, no header;
//! * convergence records: header `n,t_re,t_im,err,mean_err,seconds`;
//! * trajectories: header `t,endpoint_re,endpoint_im,k,path_re,path_im`,
//!   one line per retained path point;
//! * symbol buffers: one symbol per line.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyperwalk::{DiscPoint, Trajectory};
use crate::matcore::Matrix;
use crate::renorm::ConvergenceRecord;
use crate::sequences::Symbol;

pub const RECORDS_HEADER: &str = "n,t_re,t_im,err,mean_err,seconds";
pub const TRAJECTORY_HEADER: &str = "t,endpoint_re,endpoint_im,k,path_re,path_im";

/// Formats `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, line: usize, name: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::parse(line, format!("{name}: `{field}` is not a number")))
}

fn parse_usize(field: &str, line: usize, name: &str) -> Result<usize> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("{name}: `{field}` is not a nonnegative integer")))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, e.to_string())
}

/// Reads records, checking the header when one is expected. Returns
/// `(line number, fields)` pairs.
fn read_rows(text: &str, header: Option<&str>) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(header.is_some()).flexible(header.is_none()).from_reader(text.as_bytes());
    if let Some(expected) = header {
        let got = reader.headers().map_err(csv_error)?;
        let got = got.iter().collect::<Vec<_>>().join(",");
        if got != expected {
            return Err(Error::parse(1, format!("expected header `{expected}`, got `{got}`")));
        }
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

pub fn write_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().flat_map(|z| [format_f64(z.re), format_f64(z.im)]).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let rows = read_rows(text, None)?;
    let dim = rows.len();
    if dim == 0 {
        return Err(Error::parse(1, "no matrix rows"));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (line, fields) in &rows {
        if fields.len() != 2 * dim {
            return Err(Error::parse(
                *line,
                format!("expected {} fields for a {dim}x{dim} matrix, got {}", 2 * dim, fields.len()),
            ));
        }
        for pair in fields.chunks(2) {
            let re = parse_f64(&pair[0], *line, "re")?;
            let im = parse_f64(&pair[1], *line, "im")?;
            entries.push(Complex64::new(re, im));
        }
    }
    Matrix::new(dim, entries).map_err(|e| Error::parse(1, e.to_string()))
}

pub fn write_records_csv(records: &[ConvergenceRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let mut out = String::with_capacity(32 + records.len() * 120);
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            format_f64(r.t.re),
            format_f64(r.t.im),
            format_f64(r.err),
            format_f64(r.mean_err),
            format_f64(r.seconds)
        );
    }
    Ok(out)
}

pub fn parse_records_csv(text: &str) -> Result<Vec<ConvergenceRecord>> {
    read_rows(text, Some(RECORDS_HEADER))?
        .into_iter()
        .map(|(line, f)| {
            if f.len() != 6 {
                return Err(Error::parse(line, format!("expected 6 fields, got {}", f.len())));
            }
            let record = ConvergenceRecord {
                n: parse_usize(&f[0], line, "n")?,
                t: Complex64::new(parse_f64(&f[1], line, "t_re")?, parse_f64(&f[2], line, "t_im")?),
                err: parse_f64(&f[3], line, "err")?,
                mean_err: parse_f64(&f[4], line, "mean_err")?,
                seconds: parse_f64(&f[5], line, "seconds")?,
            };
            if !(record.err >= 0.0) || !(record.mean_err >= 0.0) {
                return Err(Error::parse(line, "errors must be nonnegative"));
            }
            Ok(record)
        })
        .collect()
}

/// One line of a trajectory file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub endpoint: Complex64,
    pub k: usize,
    pub point: Complex64,
}

pub fn write_trajectories_csv(trajectories: &[Trajectory]) -> Result<String> {
    if trajectories.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for tr in trajectories {
        let t = format_f64(tr.t);
        let e = tr.endpoint.z();
        let (er, ei) = (format_f64(e.re), format_f64(e.im));
        for (k, p) in &tr.path {
            let z = p.z();
            let _ = writeln!(out, "{t},{er},{ei},{k},{},{}", format_f64(z.re), format_f64(z.im));
        }
    }
    Ok(out)
}

pub fn parse_trajectories_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    read_rows(text, Some(TRAJECTORY_HEADER))?
        .into_iter()
        .map(|(line, f)| {
            if f.len() != 6 {
                return Err(Error::parse(line, format!("expected 6 fields, got {}", f.len())));
            }
            let row = TrajectoryRow {
                t: parse_f64(&f[0], line, "t")?,
                endpoint: Complex64::new(
                    parse_f64(&f[1], line, "endpoint_re")?,
                    parse_f64(&f[2], line, "endpoint_im")?,
                ),
                k: parse_usize(&f[3], line, "k")?,
                point: Complex64::new(parse_f64(&f[4], line, "path_re")?, parse_f64(&f[5], line, "path_im")?),
            };
            DiscPoint::new(row.endpoint).map_err(|e| Error::parse(line, e.to_string()))?;
            DiscPoint::new(row.point).map_err(|e| Error::parse(line, e.to_string()))?;
            Ok(row)
        })
        .collect()
}

pub fn write_symbols(symbols: &[Symbol]) -> String {
    let mut out = String::with_capacity(symbols.len() * 2);
    for s in symbols {
        let _ = writeln!(out, "{s}");
    }
    out
}

/// Parses a one-symbol-per-line buffer. Blank lines are skipped.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let s: Symbol = line.parse().map_err(|_| Error::parse(i + 1, format!("`{line}` is not a symbol")))?;
        if s == 0 {
            return Err(Error::parse(i + 1, "symbols are 1-based"));
        }
        out.push(s);
    }
    Ok(out)
}
