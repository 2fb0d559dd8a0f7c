//! CSV input and output. Floats are written in shortest round-trip form, so
//! a write / read cycle is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Norm, PointCloud};
use crate::neural::Matrix;

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input)
}

fn parse_row(record: &csv::StringRecord, row: usize) -> Result<Option<Vec<f64>>> {
    let fields: Vec<&str> = record.iter().collect();
    let mut out = Vec::with_capacity(fields.len());
    for f in &fields {
        match f.parse::<f64>() {
            Ok(v) => out.push(v),
            // a non-numeric first row is taken as a header
            Err(_) if row == 0 => return Ok(None),
            Err(_) => {
                return Err(Error::Parse(format!(
                    "row {}: cannot parse {f:?} as a number",
                    row + 1
                )))
            }
        }
    }
    Ok(Some(out))
}

/// Reads a numeric table. An optional non-numeric header row is skipped and
/// all rows must have the same width.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    read_rows_with(input, false)
}

/// As [`read_rows`]; `header` drops the first record unconditionally.
pub fn read_rows_with<R: Read>(input: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader(input).records().enumerate() {
        let record = record?;
        if header && i == 0 {
            continue;
        }
        if record.iter().all(str::is_empty) {
            continue;
        }
        let Some(values) = parse_row(&record, i)? else {
            continue;
        };
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: values.len(),
                    row: i + 1,
                });
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("row {}: non-finite value {v}", i + 1)));
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(rows)
}

pub fn read_matrix<R: Read>(input: R) -> Result<Matrix> {
    Matrix::from_rows(&read_rows(input)?)
}

pub fn read_cloud<R: Read>(input: R, norm: Norm) -> Result<PointCloud> {
    PointCloud::new(read_rows(input)?, norm)
}

/// Features with an integer class label in the last column.
pub fn read_labeled<R: Read>(input: R) -> Result<(Matrix, Vec<i64>)> {
    split_labels(read_rows(input)?)
}

fn split_labels(rows: Vec<Vec<f64>>) -> Result<(Matrix, Vec<i64>)> {
    if rows[0].len() < 2 {
        return Err(Error::Parse(
            "labeled data needs a feature and a label column".into(),
        ));
    }
    let mut labels = Vec::with_capacity(rows.len());
    let mut features = Vec::with_capacity(rows.len());
    for (i, mut row) in rows.into_iter().enumerate() {
        let l = row.pop().expect("non-empty row");
        if l.fract() != 0.0 || l.abs() > 2f64.powi(53) {
            return Err(Error::Parse(format!(
                "row {}: label {l} is not an integer",
                i + 1
            )));
        }
        labels.push(l as i64);
        features.push(row);
    }
    Ok((Matrix::from_rows(&features)?, labels))
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn read_matrix_file(path: &Path, header: bool) -> Result<Matrix> {
    Matrix::from_rows(&read_rows_with(open(path)?, header)?)
}

pub fn read_cloud_file(path: &Path, norm: Norm, header: bool) -> Result<PointCloud> {
    PointCloud::new(read_rows_with(open(path)?, header)?, norm)
}

pub fn read_labeled_file(path: &Path, header: bool) -> Result<(Matrix, Vec<i64>)> {
    split_labels(read_rows_with(open(path)?, header)?)
}

pub fn read_values_file(path: &Path) -> Result<Vec<f64>> {
    read_values(open(path)?)
}

/// Single-column list of numbers (scores).
pub fn read_values<R: Read>(input: R) -> Result<Vec<f64>> {
    let rows = read_rows(input)?;
    if rows[0].len() != 1 {
        return Err(Error::Parse(format!(
            "expected one value per line, found {}",
            rows[0].len()
        )));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

pub fn write_rows<W: Write>(
    output: W,
    header: Option<&[&str]>,
    rows: impl IntoIterator<Item = impl AsRef<[f64]>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(output);
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for row in rows {
        w.write_record(row.as_ref().iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(output: W, m: &Matrix, header: Option<&[&str]>) -> Result<()> {
    write_rows(output, header, (0..m.rows()).map(|r| m.row(r)))
}

pub fn write_cloud<W: Write>(output: W, cloud: &PointCloud) -> Result<()> {
    write_rows(output, None, cloud.points())
}
