//! ASCII matrix / CSV ingestion.
//!
//! One file per session, one row per sample, columns are channels, with
//! an optional trailing label column. Whitespace-separated ASCII and
//! comma-separated CSV share the same layout.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Recording;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    /// Whitespace-separated numeric matrix.
    AsciiMatrix,
    Csv,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LoadOptions {
    pub format: FileFormat,
    pub fs: f64,
    /// Skip the first row (column names).
    #[serde(default)]
    pub has_header: bool,
    /// Zero-based column holding per-sample labels, if any.
    #[serde(default)]
    pub label_column: Option<usize>,
}

impl LoadOptions {
    pub fn new(format: FileFormat, fs: f64) -> Self {
        LoadOptions {
            format,
            fs,
            has_header: false,
            label_column: None,
        }
    }
}

pub fn load_recording(path: &Path, opts: &LoadOptions) -> Result<Recording> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut header: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let mut width = 0usize;
    let mut n_rows = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match opts.format {
            FileFormat::Csv => trimmed.split(',').map(str::trim).collect(),
            FileFormat::AsciiMatrix => trimmed.split_whitespace().collect(),
        };
        if opts.has_header && header.is_none() && n_rows == 0 {
            header = Some(fields.iter().map(|s| s.to_string()).collect());
            continue;
        }
        if width == 0 {
            width = fields.len();
            if let Some(lc) = opts.label_column {
                if lc >= width {
                    return Err(Error::MalformedInput {
                        path: path.to_path_buf(),
                        line: line_no,
                        reason: format!("label column {lc} out of range for {width} columns"),
                    });
                }
            }
            columns = vec![Vec::new(); width - opts.label_column.map_or(0, |_| 1)];
        } else if fields.len() != width {
            return Err(Error::MalformedInput {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("row has {} fields, expected {width}", fields.len()),
            });
        }
        let mut ch = 0usize;
        for (col, field) in fields.iter().enumerate() {
            if Some(col) == opts.label_column {
                let l: f64 = field.parse().map_err(|_| Error::MalformedInput {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("unparseable label {field:?}"),
                })?;
                if l < 0.0 || l.fract() != 0.0 {
                    return Err(Error::MalformedInput {
                        path: path.to_path_buf(),
                        line: line_no,
                        reason: format!("label {field:?} is not a non-negative integer"),
                    });
                }
                labels.push(l as u32);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::MalformedInput {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("unparseable value {field:?} in column {col}"),
                })?;
                columns[ch].push(v);
                ch += 1;
            }
        }
        n_rows += 1;
    }

    if n_rows == 0 {
        return Err(Error::MalformedInput {
            path: path.to_path_buf(),
            line: 0,
            reason: "file contains no data rows".into(),
        });
    }

    let channel_names = match header {
        Some(h) => h
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != opts.label_column)
            .map(|(_, s)| s.clone())
            .collect(),
        None => (0..columns.len()).map(|i| format!("ch{i}")).collect(),
    };
    let labels = opts.label_column.map(|_| labels);
    Recording::new(columns, opts.fs, channel_names, labels)
}

/// Write a recording in the layout `load_recording` reads back.
pub fn save_recording(path: &Path, rec: &Recording, format: FileFormat) -> Result<()> {
    let sep = match format {
        FileFormat::Csv => ",",
        FileFormat::AsciiMatrix => " ",
    };
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
    );
    for t in 0..rec.n_samples() {
        let mut fields: Vec<String> = rec
            .samples
            .iter()
            .map(|ch| format_f64(ch[t]))
            .collect();
        if let Some(l) = &rec.labels {
            fields.push(l[t].to_string());
        }
        writeln!(out, "{}", fields.join(sep)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Shortest representation that round-trips exactly through `parse`.
fn format_f64(v: f64) -> String {
    let mut s = format!("{v}");
    if s.parse::<f64>() != Ok(v) {
        s = format!("{v:e}");
    }
    s
}
