//! Numeric CSV in and out. Values are written with 17 significant digits so
//! a write/read cycle reproduces every double exactly.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use stiefelgen::DMatrix;

#[derive(Debug)]
pub enum IoError {
    Io(String, io::Error),
    Parse { row: usize, column: usize, text: String },
    Ragged { row: usize, found: usize, expected: usize },
    Empty,
}

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IoError::Io(path, e) => write!(f, "{path}: {e}"),
            IoError::Parse { row, column, text } => {
                write!(f, "row {row}, column {column}: cannot parse {text:?} as a number")
            }
            IoError::Ragged { row, found, expected } => {
                write!(f, "row {row} has {found} fields, expected {expected}")
            }
            IoError::Empty => write!(f, "input contains no numeric rows"),
        }
    }
}

/// Reads a rectangular numeric table. A first row that does not parse as
/// numbers is treated as a header and skipped. Rows and columns in errors
/// are 1-based.
pub fn read_table(path: &Path) -> Result<DMatrix<f64>, IoError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| IoError::Io(path.display().to_string(), e))?;
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<DMatrix<f64>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Io("csv".into(), io::Error::other(e)))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(j, field)| field.parse::<f64>().map_err(|_| j))
            .collect();
        match parsed {
            Ok(values) => {
                if let Some(first) = rows.first() {
                    if values.len() != first.len() {
                        return Err(IoError::Ragged {
                            row: i + 1,
                            found: values.len(),
                            expected: first.len(),
                        });
                    }
                }
                rows.push(values);
            }
            Err(_) if i == 0 => continue,
            Err(j) => {
                return Err(IoError::Parse {
                    row: i + 1,
                    column: j + 1,
                    text: record[j].to_string(),
                })
            }
        }
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(IoError::Empty);
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

/// A table with a single row or column read as one series.
pub fn as_series(table: &DMatrix<f64>) -> Option<Vec<f64>> {
    match table.shape() {
        (_, 1) | (1, _) => Some(table.iter().copied().collect()),
        _ => None,
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Output destination: a file, or stdout when no path is given.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, IoError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| IoError::Io(p.display().to_string(), e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    pub fn new(out: Box<dyn Write>) -> Self {
        CsvOut {
            writer: csv::WriterBuilder::new().has_headers(false).from_writer(out),
        }
    }

    pub fn header(&mut self, names: &[String]) -> io::Result<()> {
        self.writer.write_record(names).map_err(io::Error::other)
    }

    /// Leading label fields followed by numeric fields.
    pub fn row(&mut self, labels: &[String], values: impl IntoIterator<Item = f64>) -> io::Result<()> {
        let fields: Vec<String> = labels.iter().cloned().chain(values.into_iter().map(format_value)).collect();
        self.writer.write_record(&fields).map_err(io::Error::other)
    }

    pub fn matrix(&mut self, m: &DMatrix<f64>) -> io::Result<()> {
        for r in m.row_iter() {
            self.row(&[], r.iter().copied())?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

pub fn write_json<T: serde::Serialize>(out: Box<dyn Write>, value: &T) -> io::Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::other)?;
    writeln!(out)?;
    out.flush()
}
