//! Data model, CSV ingestion and per-feature min-max normalization.
//!
//! Points are stored row-major in a single buffer. Labels, when present, are
//! positive integers remapped onto the contiguous range `1..=K` at
//! construction time, so every downstream consumer can rely on contiguity.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An `n x d` matrix of finite coordinates with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    n: usize,
    d: usize,
    labels: Option<Vec<usize>>,
    feature_names: Option<Vec<String>>,
}

/// Which CSV column, if any, holds the ground-truth labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Column with this header name.
    Name(String),
    /// The right-most column.
    Last,
}

impl LabelColumn {
    /// `"last"` selects the final column, anything else is a header name.
    pub fn parse(s: &str) -> Self {
        if s == "last" {
            LabelColumn::Last
        } else {
            LabelColumn::Name(s.to_owned())
        }
    }
}

impl Dataset {
    /// Builds a dataset from a row-major buffer.
    ///
    /// Labels must be integers `>= 1`; they are remapped to `1..=K` in
    /// increasing order of their original values.
    pub fn new(
        points: Vec<f64>,
        n: usize,
        d: usize,
        labels: Option<Vec<usize>>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidDataset(format!(
                "need n >= 1 and d >= 1, got n = {n}, d = {d}"
            )));
        }
        if points.len() != n * d {
            return Err(Error::InvalidDataset(format!(
                "buffer holds {} values, expected {n} x {d}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite coordinate at row {}, column {}",
                i / d + 1,
                i % d + 1
            )));
        }
        if let Some(names) = &feature_names {
            if names.len() != d {
                return Err(Error::InvalidDataset(format!(
                    "{} feature names for {d} columns",
                    names.len()
                )));
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: l.len(),
                    });
                }
                if let Some(row) = l.iter().position(|&v| v == 0) {
                    return Err(Error::InvalidLabel {
                        row: row + 1,
                        value: "0".into(),
                    });
                }
                Some(remap_contiguous(&l))
            }
            None => None,
        };
        Ok(Dataset {
            points,
            n,
            d,
            labels,
            feature_names,
        })
    }

    /// Convenience constructor from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut points = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: d,
                    found: r.len(),
                });
            }
            points.extend_from_slice(r);
        }
        Dataset::new(points, rows.len(), d, None, None)
    }

    /// Returns a copy with ground-truth labels attached.
    pub fn with_labels(self, labels: Vec<usize>) -> Result<Self> {
        Dataset::new(self.points, self.n, self.d, Some(labels), self.feature_names)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.d)
    }

    /// Row-major coordinate buffer.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Number of distinct ground-truth classes, if labels are present.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().unwrap_or(0))
    }

    /// Coordinate-wise mean of all points.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for r in self.rows() {
            for (acc, &x) in m.iter_mut().zip(r) {
                *acc += x;
            }
        }
        let n = self.n as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Writes the dataset in the same dialect [`load_csv`] reads: a header
    /// row, then one row per point, with a trailing `label` column when
    /// labels are present.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = match &self.feature_names {
            Some(names) => names.clone(),
            None => (1..=self.d).map(|j| format!("x{j}")).collect(),
        };
        if self.labels.is_some() {
            header.push("label".into());
        }
        w.write_record(&header)?;
        for (i, r) in self.rows().enumerate() {
            let mut rec: Vec<String> = r.iter().map(|v| format!("{v}")).collect();
            if let Some(l) = &self.labels {
                rec.push(l[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        self.write_csv(f)
    }
}

fn remap_contiguous(labels: &[usize]) -> Vec<usize> {
    let mut ids: BTreeMap<usize, usize> = labels.iter().map(|&l| (l, 0)).collect();
    for (next, v) in ids.values_mut().enumerate() {
        *v = next + 1;
    }
    labels.iter().map(|l| ids[l]).collect()
}

/// Reads a comma-separated file.
///
/// The first row is treated as a header when any of its cells fails to
/// parse as a number. Row numbers in errors count data rows from 1.
pub fn load_csv(path: &Path, label_column: Option<&LabelColumn>) -> Result<Dataset> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
    parse_csv(&text, label_column)
}

/// Parses CSV text; see [`load_csv`].
pub fn parse_csv(text: &str, label_column: Option<&LabelColumn>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::EmptyInput);
    };
    let width = first.len();
    let has_header = first.iter().any(|c| c.trim().parse::<f64>().is_err());
    let header: Option<Vec<String>> =
        has_header.then(|| first.iter().map(|c| c.trim().to_owned()).collect());
    let data = if has_header { &records[1..] } else { &records[..] };
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }

    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Last) => Some(width - 1),
        Some(LabelColumn::Name(name)) => {
            let idx = header
                .as_ref()
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::UnknownLabelColumn(name.clone()))?;
            Some(idx)
        }
    };
    let d = width - usize::from(label_idx.is_some());
    if d == 0 {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let mut points = Vec::with_capacity(data.len() * d);
    let mut labels = label_idx.map(|_| Vec::with_capacity(data.len()));
    for (r, rec) in data.iter().enumerate() {
        let row = r + 1;
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row,
                expected: width,
                found: rec.len(),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            if Some(j) == label_idx {
                let label = parse_label(cell).ok_or_else(|| Error::InvalidLabel {
                    row,
                    value: cell.to_owned(),
                })?;
                labels.as_mut().expect("label column").push(label);
            } else {
                let v = cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row,
                        column: j + 1,
                        value: cell.to_owned(),
                    })?;
                points.push(v);
            }
        }
    }
    let feature_names = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != label_idx)
            .map(|(_, s)| s)
            .collect()
    });
    Dataset::new(points, data.len(), d, labels, feature_names)
}

fn parse_label(cell: &str) -> Option<usize> {
    if let Ok(v) = cell.parse::<usize>() {
        return (v >= 1).then_some(v);
    }
    let v = cell.parse::<f64>().ok()?;
    (v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64).then_some(v as usize)
}

/// Rescales every column to `[0, 1]`. Constant columns become all zeros.
pub fn normalize(ds: &Dataset) -> Dataset {
    let (n, d) = (ds.n, ds.d);
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for r in ds.rows() {
        for j in 0..d {
            lo[j] = lo[j].min(r[j]);
            hi[j] = hi[j].max(r[j]);
        }
    }
    let mut points = Vec::with_capacity(n * d);
    for r in ds.rows() {
        for j in 0..d {
            let span = hi[j] - lo[j];
            points.push(if span > 0.0 { (r[j] - lo[j]) / span } else { 0.0 });
        }
    }
    Dataset {
        points,
        n,
        d,
        labels: ds.labels.clone(),
        feature_names: ds.feature_names.clone(),
    }
}
