//! Curve files: one curve per row, one grid point per column.
//!
//! Lines starting with `#` are comments. A comment of the form
//! `# grid: 0.05, 0.15, ...` fixes the evaluation points; otherwise the grid
//! is built from the column count and the requested policy. A first row that
//! does not parse as numbers is taken as a header and skipped.

use std::fs;
use std::io::Write;
use std::path::Path;

use specop_core::{FunctionalSample, Grid, GridPolicy};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub grid_policy: GridPolicy,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',', grid_policy: GridPolicy::Midpoint }
    }
}

fn parse_error(path: &Path, message: String) -> CliError {
    CliError::Parse { path: path.to_path_buf(), message }
}

fn grid_comment(text: &str) -> Option<&str> {
    text.lines().find_map(|line| {
        let body = line.trim_start().strip_prefix('#')?.trim_start();
        let rest = body.strip_prefix("grid")?.trim_start();
        rest.strip_prefix(':').or_else(|| rest.strip_prefix('=')).map(str::trim)
    })
}

fn parse_grid(path: &Path, spec: &str, delimiter: u8) -> CliResult<Grid> {
    let sep = if spec.contains(delimiter as char) { delimiter as char } else { ',' };
    let points = spec
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| parse_error(path, format!("grid comment: cannot parse {s:?} as a number"))))
        .collect::<CliResult<Vec<_>>>()?;
    Grid::new(points).map_err(|e| parse_error(path, format!("grid comment: {e}")))
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> CliResult<FunctionalSample> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let declared = grid_comment(&text).map(|g| parse_grid(path, g, opts.delimiter)).transpose()?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut values = Vec::new();
    let mut width: Option<usize> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.iter().any(|f| f.parse::<f64>().is_err()) {
                continue;
            }
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_error(path, format!("row {line}: expected {w} columns, found {}", record.len())));
            }
            _ => {}
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(path, format!("row {line}, column {}: cannot parse {field:?} as a number", col + 1)))?;
            if !v.is_finite() {
                return Err(parse_error(path, format!("row {line}, column {}: value {field:?} is not finite", col + 1)));
            }
            values.push(v);
        }
    }
    let k = width.ok_or_else(|| parse_error(path, "no data rows".into()))?;
    let grid = match declared {
        Some(g) if g.len() != k => {
            return Err(parse_error(path, format!("grid comment lists {} points but rows have {k} columns", g.len())));
        }
        Some(g) => g,
        None => Grid::equidistant(k, opts.grid_policy),
    };
    FunctionalSample::new(grid, values).map_err(|e| parse_error(path, e.to_string()))
}

/// Writes a sample in the format [`load_csv`] reads, with its grid comment.
pub fn write_csv<W: Write>(mut out: W, sample: &FunctionalSample) -> std::io::Result<()> {
    let grid: Vec<String> = sample.grid().points().iter().map(|p| format!("{p:.16e}")).collect();
    writeln!(out, "# grid: {}", grid.join(","))?;
    for row in sample.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, sample: &FunctionalSample) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), sample).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(text: &str) -> CliResult<FunctionalSample> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, text).unwrap();
        load_csv(&path, &CsvOptions::default())
    }

    #[test]
    fn header_and_comments_are_skipped() {
        let s = load_str("# comment\na,b\n1,2\n3,4\n5,6\n7,8\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.row(1), &[3.0, 4.0]);
        assert_eq!(s.grid().points(), &[0.25, 0.75]);
    }

    #[test]
    fn grid_comment_is_used() {
        let s = load_str("# grid: 0.1, 0.9\n1,2\n3,4\n5,6\n7,8\n").unwrap();
        assert_eq!(s.grid().points(), &[0.1, 0.9]);
    }

    #[test]
    fn errors_name_row_and_column() {
        let e = load_str("1,2\n3,x\n5,6\n7,8\n").unwrap_err().to_string();
        assert!(e.contains("row 2, column 2"), "{e}");
        let e = load_str("1,2\n3,4,5\n").unwrap_err().to_string();
        assert!(e.contains("row 2"), "{e}");
        let e = load_str("1,2\n3,nan\n5,6\n7,8\n").unwrap_err().to_string();
        assert!(e.contains("not finite"), "{e}");
    }

    #[test]
    fn round_trip_is_exact() {
        let s = FunctionalSample::new(Grid::midpoints(3), (0..15).map(|i| (i as f64).sin() / 3.0).collect()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &s).unwrap();
        let back = load_str(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.values(), s.values());
        assert_eq!(back.grid(), s.grid());
    }
}
