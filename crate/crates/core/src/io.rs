//! File formats: JSON documents for frames, decompositions, matrices,
//! lattices, windows and distance tables; CSV for sequences and tables.
//!
//! Complex numbers are `[re, im]` pairs. JSON floats use the shortest
//! representation that parses back to the same `f64`; CSV floats use 17
//! significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::frame::{FrameSnapshot, FrameVector};
use crate::gabor::GaborLattice;
use crate::index::{DistanceTable, IndexDecomposition, Label, QuasiMetric};
use crate::operators::OperatorSnapshot;
use crate::{Error, Result, C64};

fn c64(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Index decomposition, explicit or generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecompositionFile {
    Explicit {
        labels: Vec<Label>,
        blocks: Vec<usize>,
    },
    /// `naturals:<depth>`, `integer_boxes:<depth>` or `square_boxes:<depth>`.
    Generated {
        generator: String,
    },
}

impl DecompositionFile {
    pub fn build(&self) -> Result<IndexDecomposition> {
        match self {
            DecompositionFile::Explicit { labels, blocks } => IndexDecomposition::new(labels.clone(), blocks.clone()),
            DecompositionFile::Generated { generator } => {
                let (kind, depth) = generator
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument(format!("bad generator {generator}")))?;
                let depth: usize = depth
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad depth in {generator}")))?;
                if depth == 0 {
                    return Err(Error::InvalidDecomposition("depth must be positive".into()));
                }
                match kind {
                    "naturals" => Ok(IndexDecomposition::naturals(depth)),
                    "integer_boxes" => Ok(IndexDecomposition::integer_boxes(depth)),
                    "square_boxes" => Ok(IndexDecomposition::square_boxes(depth)),
                    _ => Err(Error::InvalidArgument(format!("unknown generator {kind}"))),
                }
            }
        }
    }

    pub fn explicit(d: &IndexDecomposition) -> Self {
        DecompositionFile::Explicit {
            labels: d.labels().to_vec(),
            blocks: d.block_sizes().to_vec(),
        }
    }
}

/// A vector as dense `[re, im]` samples or sparse `[coord, re, im]` triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorFile {
    Dense(Vec<[f64; 2]>),
    Sparse { sparse: Vec<(usize, f64, f64)> },
}

impl VectorFile {
    fn build(&self) -> FrameVector {
        match self {
            VectorFile::Dense(v) => FrameVector::from_dense(&v.iter().map(|&p| c64(p)).collect::<Vec<_>>()),
            VectorFile::Sparse { sparse } => {
                FrameVector::from_entries(sparse.iter().map(|&(k, re, im)| (k, C64::new(re, im))).collect())
            }
        }
    }

    fn of(v: &FrameVector) -> Self {
        VectorFile::Sparse {
            sparse: v.entries().iter().map(|&(k, z)| (k, z.re, z.im)).collect(),
        }
    }

    fn len_issue(&self, dim: usize) -> Option<String> {
        match self {
            VectorFile::Dense(v) if v.len() != dim => Some(format!("has {} samples, expected {dim}", v.len())),
            VectorFile::Sparse { sparse } => sparse
                .iter()
                .find(|e| e.0 >= dim)
                .map(|e| format!("has coordinate {} outside dimension {dim}", e.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFile {
    pub dim: usize,
    pub decomposition: DecompositionFile,
    pub vectors: Vec<VectorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<VectorFile>>,
}

impl FrameFile {
    pub fn of(frame: &FrameSnapshot) -> Self {
        Self {
            dim: frame.ambient_dim(),
            decomposition: DecompositionFile::explicit(frame.decomp()),
            vectors: frame.vectors().iter().map(VectorFile::of).collect(),
            dual: frame.explicit_dual().map(|d| d.iter().map(VectorFile::of).collect()),
        }
    }

    pub fn build(&self) -> Result<FrameSnapshot> {
        let decomp = Arc::new(self.decomposition.build()?);
        let frame = FrameSnapshot::new(self.dim, self.vectors.iter().map(VectorFile::build).collect(), decomp)?;
        match &self.dual {
            Some(d) => frame.with_explicit_dual(d.iter().map(VectorFile::build).collect()),
            None => Ok(frame),
        }
    }
}

/// Outcome of [`validate_frame_file`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub vectors: usize,
    pub dim: usize,
    pub has_dual: bool,
}

/// Schema and invariant check of a frame document, reporting every problem
/// found rather than the first.
pub fn validate_frame_file(path: &Path) -> Result<ValidationReport> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    validate_frame_value(&value)
}

pub fn validate_frame_value(value: &Value) -> Result<ValidationReport> {
    let mut errors = Vec::new();
    let Some(obj) = value.as_object() else {
        return Err(Error::Schema(vec!["document is not an object".into()]));
    };
    let dim = match obj.get("dim").and_then(Value::as_u64) {
        Some(d) if d > 0 => Some(d as usize),
        _ => {
            errors.push("schema: `dim` must be a positive integer".into());
            None
        }
    };
    let decomp = match obj.get("decomposition") {
        None => {
            errors.push("schema: `decomposition` is missing".into());
            None
        }
        Some(v) => match serde_json::from_value::<DecompositionFile>(v.clone()) {
            Err(_) => {
                errors.push("schema: `decomposition` needs `labels` and `blocks`, or `generator`".into());
                None
            }
            Ok(d) => match d.build() {
                Ok(d) => Some(d),
                Err(e) => {
                    errors.push(format!("invariant: {e}"));
                    None
                }
            },
        },
    };
    let mut parse_vectors = |key: &str, required: bool| -> Option<Vec<VectorFile>> {
        let arr = match obj.get(key) {
            None if !required => return None,
            None => {
                errors.push(format!("schema: `{key}` is missing"));
                return None;
            }
            Some(v) => match v.as_array() {
                Some(a) => a,
                None => {
                    errors.push(format!("schema: `{key}` must be an array"));
                    return None;
                }
            },
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            match serde_json::from_value::<VectorFile>(v.clone()) {
                Ok(vf) => {
                    if let Some(d) = dim {
                        if let Some(issue) = vf.len_issue(d) {
                            errors.push(format!("schema: {key}[{i}] {issue}"));
                        }
                    }
                    out.push(vf);
                }
                Err(_) => errors.push(format!(
                    "schema: {key}[{i}] must be an array of [re, im] or {{\"sparse\": [[k, re, im], …]}}"
                )),
            }
        }
        Some(out)
    };
    let vectors = parse_vectors("vectors", true);
    let dual = parse_vectors("dual", false);
    if let (Some(d), Some(v)) = (&decomp, &vectors) {
        if v.len() != d.len() {
            errors.push(format!("invariant: {} vectors for {} labels", v.len(), d.len()));
        }
    }
    if let (Some(v), Some(du)) = (&vectors, &dual) {
        if du.len() != v.len() {
            errors.push(format!("invariant: {} dual vectors for {} vectors", du.len(), v.len()));
        }
    }
    if !errors.is_empty() {
        return Err(Error::Schema(errors));
    }
    Ok(ValidationReport {
        vectors: vectors.map_or(0, |v| v.len()),
        dim: dim.unwrap_or(0),
        has_dual: dual.is_some(),
    })
}

/// Validates, then builds the snapshot.
pub fn read_frame(path: &Path) -> Result<FrameSnapshot> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    validate_frame_value(&value)?;
    let file: FrameFile = serde_json::from_value(value)?;
    file.build()
}

pub fn write_frame(path: &Path, frame: &FrameSnapshot) -> Result<()> {
    write_json(path, &FrameFile::of(frame))
}

/// Dense complex matrix, rows of `[re, im]`, optionally with labels and a
/// metric key.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

impl MatrixFile {
    pub fn of(op: &OperatorSnapshot, metric: Option<String>) -> Self {
        let m = op.matrix();
        Self {
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
                .collect(),
            decomposition: Some(DecompositionFile::explicit(op.decomp())),
            metric,
        }
    }

    /// Without a decomposition the labels are `1..=dim` in singleton steps.
    pub fn build(&self) -> Result<OperatorSnapshot> {
        let mut errors = Vec::new();
        if self.entries.len() != self.dim {
            errors.push(format!("{} rows for dimension {}", self.entries.len(), self.dim));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                errors.push(format!("row {i} has {} entries, expected {}", row.len(), self.dim));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Schema(errors));
        }
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| c64(self.entries[i][j]));
        let decomp = match &self.decomposition {
            Some(d) => d.build()?,
            None => IndexDecomposition::naturals(self.dim),
        };
        let metric = self.metric.as_deref().map(QuasiMetric::from_key).transpose()?;
        OperatorSnapshot::new(m, Arc::new(decomp), metric)
    }
}

pub fn read_matrix(path: &Path) -> Result<OperatorSnapshot> {
    read_json::<MatrixFile>(path)?.build()
}

/// Gram matrix of a frame in the matrix format.
pub fn write_gram(path: &Path, frame: &FrameSnapshot, metric: Option<String>) -> Result<()> {
    let op = OperatorSnapshot::new(frame.gram(), frame.decomp().clone(), None)?;
    write_json(path, &MatrixFile::of(&op, metric))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(rename = "N")]
    pub modulus: Option<usize>,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<[f64; 2]>>,
}

impl LatticeFile {
    pub fn of(l: &GaborLattice) -> Self {
        Self {
            modulus: l.modulus(),
            points: l.points().to_vec(),
            phases: l.phases().map(|p| p.iter().map(|&z| pair(z)).collect()),
        }
    }

    pub fn build(&self) -> Result<GaborLattice> {
        GaborLattice::new(
            self.modulus,
            self.points.clone(),
            self.phases.as_ref().map(|p| p.iter().map(|&z| c64(z)).collect()),
        )
    }
}

pub fn read_lattice(path: &Path) -> Result<GaborLattice> {
    read_json::<LatticeFile>(path)?.build()
}

/// Window samples: JSON array of reals or `[re, im]` pairs.
pub fn read_window(path: &Path) -> Result<Vec<C64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Sample {
        Real(f64),
        Complex([f64; 2]),
    }
    let samples: Vec<Sample> = read_json(path)?;
    Ok(samples
        .into_iter()
        .map(|s| match s {
            Sample::Real(x) => C64::new(x, 0.0),
            Sample::Complex(p) => c64(p),
        })
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricTableFile {
    pub labels: Vec<Label>,
    pub dist: Vec<Vec<f64>>,
}

/// Distance table for the `custom:<file>` metric key.
pub fn read_metric_table(path: &Path) -> Result<QuasiMetric> {
    let t: MetricTableFile = read_json(path)?;
    Ok(QuasiMetric::Table(Arc::new(DistanceTable::new(t.labels, t.dist)?)))
}

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Mismatch(format!(
                "row has {} fields, header {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    write_csv(fs::File::create(path)?, header, rows)
}

/// Reads a column of floats from a CSV with a header row.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let k = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::InvalidArgument(format!("no column {column}")))?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(k).unwrap_or("");
        out.push(field.trim().parse().map_err(|_| Error::Parse {
            line: line + 2,
            column: k + 1,
            message: format!("`{field}` is not a number"),
        })?);
    }
    Ok(out)
}
