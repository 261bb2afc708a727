//! Finite truncations of frames and their spectral analysis.
//!
//! Vectors are stored sparsely so that frames living in very large ambient
//! spaces (only a few coordinates per vector) stay cheap. The analysis splits
//! the family into connected components of the "shares a coordinate" graph;
//! the frame operator `S` and the Gram operator `G` are block diagonal along
//! those components, so every spectral quantity is computed per component
//! from whichever of `S` or `G` is smaller.
//!
//! Inner products are linear in the first argument:
//! `⟨x, y⟩ = Σ_k x_k conj(y_k)`, and `G_ij = ⟨f_j, f_i⟩`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::exec::Execution;
use crate::index::IndexDecomposition;
use crate::linalg::{hermitian_eigen, CompensatedSum, UnionFind};
use crate::{Error, Result, C64};

/// Sparse complex vector: `(coordinate, value)` pairs sorted by coordinate,
/// no explicit zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameVector {
    entries: Vec<(usize, C64)>,
}

impl FrameVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_entries(mut entries: Vec<(usize, C64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, C64)> = Vec::with_capacity(entries.len());
        for (k, v) in entries {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += v,
                _ => out.push((k, v)),
            }
        }
        out.retain(|e| e.1 != C64::new(0.0, 0.0));
        Self { entries: out }
    }

    pub fn from_dense(values: &[C64]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                .map(|(k, v)| (k, *v))
                .collect(),
        }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        Self {
            entries: vec![(k, C64::new(1.0, 0.0))],
        }
    }

    pub fn entries(&self) -> &[(usize, C64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    /// `⟨self, other⟩`.
    pub fn inner(&self, other: &FrameVector) -> C64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = C64::new(0.0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1.conj();
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn scaled(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|&(k, v)| (k, v * c)).collect(),
        }
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            entries: self.entries.iter().map(|&(k, v)| (k + offset, v)).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for &(k, v) in &self.entries {
            out[k] = v;
        }
        out
    }

    pub fn max_coordinate(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }
}

/// Finite truncation of a frame: one vector per materialized label.
#[derive(Debug, Clone)]
pub struct FrameSnapshot {
    ambient_dim: usize,
    vectors: Vec<FrameVector>,
    decomp: Arc<IndexDecomposition>,
    explicit_dual: Option<Vec<FrameVector>>,
}

impl FrameSnapshot {
    pub fn new(ambient_dim: usize, vectors: Vec<FrameVector>, decomp: Arc<IndexDecomposition>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be positive".into()));
        }
        if vectors.len() != decomp.len() {
            return Err(Error::Mismatch(format!(
                "{} vectors for {} labels",
                vectors.len(),
                decomp.len()
            )));
        }
        check_coordinates(&vectors, ambient_dim)?;
        Ok(Self {
            ambient_dim,
            vectors,
            decomp,
            explicit_dual: None,
        })
    }

    pub fn from_dense(decomp: Arc<IndexDecomposition>, rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("rows have different lengths".into()));
        }
        Self::new(dim, rows.iter().map(|r| FrameVector::from_dense(r)).collect(), decomp)
    }

    /// Attaches a known dual family used as an oracle for the computed one.
    pub fn with_explicit_dual(mut self, dual: Vec<FrameVector>) -> Result<Self> {
        if dual.len() != self.vectors.len() {
            return Err(Error::Mismatch(format!(
                "{} dual vectors for {} frame vectors",
                dual.len(),
                self.vectors.len()
            )));
        }
        check_coordinates(&dual, self.ambient_dim)?;
        self.explicit_dual = Some(dual);
        Ok(self)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[FrameVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn decomp(&self) -> &Arc<IndexDecomposition> {
        &self.decomp
    }

    pub fn explicit_dual(&self) -> Option<&[FrameVector]> {
        self.explicit_dual.as_deref()
    }

    /// The first `depth` blocks of the snapshot.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        let decomp = Arc::new(self.decomp.prefix(depth)?);
        let n = decomp.len();
        Ok(Self {
            ambient_dim: self.ambient_dim,
            vectors: self.vectors[..n].to_vec(),
            explicit_dual: self.explicit_dual.as_ref().map(|d| d[..n].to_vec()),
            decomp,
        })
    }

    /// Dense Gram matrix `G_ij = ⟨f_j, f_i⟩`. Quadratic in the label count.
    pub fn gram(&self) -> DMatrix<C64> {
        let n = self.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.vectors[j].inner(&self.vectors[i]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }
}

fn check_coordinates(vectors: &[FrameVector], dim: usize) -> Result<()> {
    if let Some((i, c)) = vectors
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.max_coordinate().map(|c| (i, c)))
        .find(|&(_, c)| c >= dim)
    {
        return Err(Error::InvalidArgument(format!(
            "vector {i} has coordinate {c} outside ambient dimension {dim}"
        )));
    }
    Ok(())
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    /// Eigenvalues below `rank_tol · λ_max` of the frame operator are
    /// treated as zero.
    pub rank_tol: f64,
    pub exec: Execution,
}

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            exec: Execution::default(),
        }
    }
}

/// One connected component of the family with its retained spectral data:
/// orthonormal eigenvectors `u_k` of the frame operator restricted to the
/// component's coordinates, with eigenvalues `λ_k` above the threshold.
#[derive(Debug, Clone)]
pub struct SpectralBlock {
    /// Snapshot positions, increasing.
    pub labels: Vec<usize>,
    /// Ambient coordinates touched by the component, increasing.
    pub coords: Vec<usize>,
    /// Retained eigenvalues, decreasing.
    pub eigenvalues: Vec<f64>,
    /// `coords.len() × rank`, orthonormal columns.
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralBlock {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    fn local(&self, coord: usize) -> usize {
        self.coords.binary_search(&coord).expect("coordinate belongs to block")
    }

    /// `(u_k^* f)_k` for a vector supported on the block.
    fn coefficients(&self, f: &FrameVector) -> Vec<C64> {
        let mut c = vec![C64::new(0.0, 0.0); self.rank()];
        for &(coord, v) in f.entries() {
            let row = self.local(coord);
            for (k, ck) in c.iter_mut().enumerate() {
                *ck += self.eigenvectors[(row, k)].conj() * v;
            }
        }
        c
    }

    /// `Σ_k w(λ_k) u_k (u_k^* f)`.
    fn apply(&self, f: &FrameVector, weight: impl Fn(f64) -> f64) -> FrameVector {
        let c = self.coefficients(f);
        let mut entries = Vec::with_capacity(self.coords.len());
        for (row, &coord) in self.coords.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, ck) in c.iter().enumerate() {
                acc += self.eigenvectors[(row, k)] * ck * weight(self.eigenvalues[k]);
            }
            entries.push((coord, acc));
        }
        FrameVector::from_entries(entries)
    }

    /// Orthonormal basis of the range of the analysis operator restricted
    /// to this component: `Q_ik = ⟨u_k, f_i⟩ / √λ_k`, one row per label.
    pub fn range_basis(&self, frame: &FrameSnapshot) -> DMatrix<C64> {
        let mut q = DMatrix::zeros(self.labels.len(), self.rank());
        for (r, &pos) in self.labels.iter().enumerate() {
            let c = self.coefficients(&frame.vectors()[pos]);
            for k in 0..self.rank() {
                q[(r, k)] = c[k].conj() / self.eigenvalues[k].sqrt();
            }
        }
        q
    }
}

/// Spectral analysis of a snapshot.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    blocks: Vec<SpectralBlock>,
    /// Block index per label, `usize::MAX` for labels outside every block.
    label_block: Vec<usize>,
    diag_products: Vec<f64>,
    frame_bounds: (f64, f64),
    span_dim: usize,
    threshold: f64,
    warnings: Vec<String>,
}

impl FrameAnalysis {
    /// `⟨f_i, f̃_i⟩` per label; zero vectors get 0.
    pub fn diag_products(&self) -> &[f64] {
        &self.diag_products
    }

    /// Smallest and largest nonzero eigenvalue of `S` on the span.
    pub fn frame_bounds(&self) -> (f64, f64) {
        self.frame_bounds
    }

    pub fn span_dim(&self) -> usize {
        self.span_dim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn blocks(&self) -> &[SpectralBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.label_block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label_block.is_empty()
    }

    /// Index into [`Self::blocks`] for a label, if it carries any rank.
    pub fn block_of(&self, pos: usize) -> Option<usize> {
        let b = self.label_block[pos];
        (b != usize::MAX).then_some(b)
    }

    /// Canonical dual vector `f̃_i = S⁺ f_i`.
    pub fn dual_vector(&self, frame: &FrameSnapshot, pos: usize) -> FrameVector {
        match self.block_of(pos) {
            Some(b) => self.blocks[b].apply(&frame.vectors()[pos], |l| 1.0 / l),
            None => FrameVector::zero(),
        }
    }

    pub fn dual_vectors(&self, frame: &FrameSnapshot, exec: Execution) -> Vec<FrameVector> {
        exec.map_range(self.len(), |i| self.dual_vector(frame, i))
    }

    /// Associated Parseval vector `S^{-1/2} f_i` (pseudo-inverse on the span).
    pub fn parseval_vector(&self, frame: &FrameSnapshot, pos: usize) -> FrameVector {
        match self.block_of(pos) {
            Some(b) => self.blocks[b].apply(&frame.vectors()[pos], |l| 1.0 / l.sqrt()),
            None => FrameVector::zero(),
        }
    }

    pub fn parseval_vectors(&self, frame: &FrameSnapshot, exec: Execution) -> Vec<FrameVector> {
        exec.map_range(self.len(), |i| self.parseval_vector(frame, i))
    }

    /// Dense Gram projection `P = Q Q*` onto the range of `G`.
    /// Quadratic in the label count.
    pub fn gram_projection(&self, frame: &FrameSnapshot) -> DMatrix<C64> {
        let n = self.len();
        let mut p = DMatrix::zeros(n, n);
        for block in &self.blocks {
            let q = block.range_basis(frame);
            let pq = &q * q.adjoint();
            for (a, &i) in block.labels.iter().enumerate() {
                for (b, &j) in block.labels.iter().enumerate() {
                    p[(i, j)] = pq[(a, b)];
                }
            }
        }
        p
    }
}

enum RawSpectrum {
    /// Eigenpairs of the Gram block (labels × labels).
    Gram(Vec<f64>, DMatrix<C64>),
    /// Eigenpairs of the frame operator block (coords × coords).
    Operator(Vec<f64>, DMatrix<C64>),
}

struct RawBlock {
    labels: Vec<usize>,
    coords: Vec<usize>,
    spectrum: RawSpectrum,
}

impl RawBlock {
    fn eigenvalues(&self) -> &[f64] {
        match &self.spectrum {
            RawSpectrum::Gram(v, _) | RawSpectrum::Operator(v, _) => v,
        }
    }
}

fn components(frame: &FrameSnapshot) -> Vec<Vec<usize>> {
    let n = frame.len();
    let mut uf = UnionFind::new(n);
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, v) in frame.vectors().iter().enumerate() {
        for &(c, _) in v.entries() {
            match owner.get(&c) {
                Some(&j) => uf.union(i, j),
                None => {
                    owner.insert(c, i);
                }
            }
        }
    }
    uf.groups(|i| !frame.vectors()[i].is_zero())
}

fn raw_spectrum(frame: &FrameSnapshot, labels: Vec<usize>) -> RawBlock {
    let vecs = frame.vectors();
    let mut coords: Vec<usize> = labels
        .iter()
        .flat_map(|&i| vecs[i].entries().iter().map(|e| e.0))
        .collect();
    coords.sort_unstable();
    coords.dedup();

    if labels.len() == 1 {
        let f = &vecs[labels[0]];
        let norm = f.norm_sqr().sqrt();
        let u = DMatrix::from_fn(coords.len(), 1, |r, _| f.entries()[r].1 / norm);
        return RawBlock {
            labels,
            coords,
            spectrum: RawSpectrum::Operator(vec![norm * norm], u),
        };
    }

    if labels.len() <= coords.len() {
        let k = labels.len();
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let v = vecs[labels[b]].inner(&vecs[labels[a]]);
                g[(a, b)] = v;
                g[(b, a)] = v.conj();
            }
        }
        let (vals, v) = hermitian_eigen(g);
        RawBlock {
            labels,
            coords,
            spectrum: RawSpectrum::Gram(vals, v),
        }
    } else {
        let d = coords.len();
        let local: HashMap<usize, usize> = coords.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut s = DMatrix::<C64>::zeros(d, d);
        for &i in &labels {
            let e = vecs[i].entries();
            for &(ca, va) in e {
                let ra = local[&ca];
                for &(cb, vb) in e {
                    s[(ra, local[&cb])] += va * vb.conj();
                }
            }
        }
        let (vals, u) = hermitian_eigen(s);
        RawBlock {
            labels,
            coords,
            spectrum: RawSpectrum::Operator(vals, u),
        }
    }
}

fn retain(frame: &FrameSnapshot, raw: &RawBlock, threshold: f64) -> SpectralBlock {
    let vecs = frame.vectors();
    let keep = raw.eigenvalues().iter().take_while(|&&l| l > threshold).count();
    let (eigenvalues, eigenvectors) = match &raw.spectrum {
        RawSpectrum::Operator(vals, u) => (vals[..keep].to_vec(), u.columns(0, keep).into_owned()),
        RawSpectrum::Gram(vals, v) => {
            // u_k = T* v_k / √λ_k = Σ_j v_k[j] f_j / √λ_k
            let mut u = DMatrix::zeros(raw.coords.len(), keep);
            for k in 0..keep {
                let scale = 1.0 / vals[k].sqrt();
                for (a, &i) in raw.labels.iter().enumerate() {
                    let w = v[(a, k)] * scale;
                    for &(c, val) in vecs[i].entries() {
                        let row = raw.coords.binary_search(&c).expect("coordinate in block");
                        u[(row, k)] += val * w;
                    }
                }
            }
            (vals[..keep].to_vec(), u)
        }
    };
    SpectralBlock {
        labels: raw.labels.clone(),
        coords: raw.coords.clone(),
        eigenvalues,
        eigenvectors,
    }
}

/// Spectral analysis: canonical dual, frame bounds on the span, Gram
/// projection and diagonal products `⟨f_i, f̃_i⟩`.
pub fn analyze(frame: &FrameSnapshot, opts: &AnalyzeOptions) -> Result<FrameAnalysis> {
    let groups = components(frame);
    if groups.is_empty() {
        return Err(Error::EmptySpan);
    }
    let raw: Vec<RawBlock> = opts
        .exec
        .map_range(groups.len(), |g| raw_spectrum(frame, groups[g].clone()));
    let lambda_max = raw
        .iter()
        .filter_map(|b| b.eigenvalues().first().copied())
        .fold(0.0, f64::max);
    if !(lambda_max > 0.0) {
        return Err(Error::EmptySpan);
    }
    let threshold = opts.rank_tol * lambda_max;

    let mut warnings = Vec::new();
    let near = raw
        .iter()
        .flat_map(|b| b.eigenvalues().iter())
        .filter(|&&l| l > threshold / 10.0 && l < threshold * 10.0)
        .count();
    if near > 0 {
        warnings.push(format!(
            "ill-conditioned rank decision: {near} eigenvalue(s) within a factor 10 of the threshold {threshold:.3e}"
        ));
    }

    let blocks: Vec<SpectralBlock> = opts.exec.map(&raw, |b| retain(frame, b, threshold));

    let n = frame.len();
    let mut label_block = vec![usize::MAX; n];
    let per_block: Vec<Vec<f64>> = opts.exec.map(&blocks, |b| {
        b.labels
            .iter()
            .map(|&i| {
                let c = b.coefficients(&frame.vectors()[i]);
                c.iter()
                    .zip(&b.eigenvalues)
                    .map(|(ck, l)| ck.norm_sqr() / l)
                    .sum::<f64>()
            })
            .collect()
    });
    let mut diag_products = vec![0.0; n];
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut span_dim = 0;
    for (bi, (b, diag)) in blocks.iter().zip(per_block).enumerate() {
        for (&i, d) in b.labels.iter().zip(diag) {
            diag_products[i] = d;
            if b.rank() > 0 {
                label_block[i] = bi;
            }
        }
        span_dim += b.rank();
        if let (Some(&hi), Some(&lo)) = (b.eigenvalues.first(), b.eigenvalues.last()) {
            upper = upper.max(hi);
            lower = lower.min(lo);
        }
    }

    Ok(FrameAnalysis {
        blocks,
        label_block,
        diag_products,
        frame_bounds: (lower, upper),
        span_dim,
        threshold,
        warnings,
    })
}

/// How much of a truncated snapshot can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EdgePolicy {
    /// The snapshot is the whole object (finite models): every block is exact.
    Exact,
    /// Truncation of an infinite frame: recompute at half the depth and keep
    /// the blocks where both runs agree within `tol`.
    HalfDepth { tol: f64 },
}

impl Default for EdgePolicy {
    fn default() -> Self {
        EdgePolicy::HalfDepth { tol: 1e-9 }
    }
}

/// `a_n(F)` and `b_n(F) = |I_n| a_n(F)` per block, with stability flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSequence {
    pub block_sizes: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Blocks whose value survives the edge policy.
    pub stable: Vec<bool>,
    /// Decimal digits agreed between the two truncation depths (16 = exact).
    pub agreement_digits: Vec<f64>,
}

impl MeasureSequence {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Number of leading stable blocks.
    pub fn stable_prefix(&self) -> usize {
        self.stable.iter().take_while(|&&s| s).count()
    }

    /// The first `blocks` entries.
    pub fn prefix(&self, blocks: usize) -> MeasureSequence {
        let k = blocks.min(self.len());
        MeasureSequence {
            block_sizes: self.block_sizes[..k].to_vec(),
            a: self.a[..k].to_vec(),
            b: self.b[..k].to_vec(),
            stable: self.stable[..k].to_vec(),
            agreement_digits: self.agreement_digits[..k].to_vec(),
        }
    }

    /// `b` as a real sequence.
    pub fn b_sequence(&self) -> crate::seq::RealSequence {
        crate::seq::RealSequence::new(self.b.clone(), self.block_sizes.clone()).expect("aligned by construction")
    }
}

/// Block partial sums of the diagonal products, all blocks marked stable.
pub fn measure_sequence(analysis: &FrameAnalysis, decomp: &IndexDecomposition) -> Result<MeasureSequence> {
    if analysis.len() < decomp.len() {
        return Err(Error::InsufficientBlocks {
            needed: decomp.len(),
            available: analysis.len(),
        });
    }
    let diag = analysis.diag_products();
    let mut acc = CompensatedSum::default();
    let mut next = 0;
    let mut b = Vec::with_capacity(decomp.depth());
    for &size in decomp.block_sizes() {
        while next < size {
            acc.add(diag[next]);
            next += 1;
        }
        b.push(acc.value());
    }
    let sizes = decomp.block_sizes().to_vec();
    let a = b.iter().zip(&sizes).map(|(bn, &s)| bn / s as f64).collect();
    Ok(MeasureSequence {
        stable: vec![true; sizes.len()],
        agreement_digits: vec![16.0; sizes.len()],
        block_sizes: sizes,
        a,
        b,
    })
}

/// Measure sequence under an edge policy. Returns the full-depth analysis
/// alongside.
pub fn measure_with_policy(
    frame: &FrameSnapshot,
    opts: &AnalyzeOptions,
    policy: EdgePolicy,
) -> Result<(MeasureSequence, FrameAnalysis)> {
    match policy {
        EdgePolicy::Exact => {
            let analysis = analyze(frame, opts)?;
            let seq = measure_sequence(&analysis, frame.decomp())?;
            Ok((seq, analysis))
        }
        EdgePolicy::HalfDepth { tol } => {
            let depth = frame.decomp().depth();
            let half = (depth / 2).max(1);
            let short = frame.truncate(half)?;
            let (full, part) = opts.exec.join(
                || analyze(frame, opts),
                || analyze(&short, opts).map(|a| measure_sequence(&a, short.decomp())),
            );
            let analysis = full?;
            let mut seq = measure_sequence(&analysis, frame.decomp())?;
            let part = match part {
                Ok(p) => Some(p?),
                Err(Error::EmptySpan) => None,
                Err(e) => return Err(e),
            };
            for n in 0..seq.len() {
                let other = part.as_ref().and_then(|p| p.a.get(n).copied());
                match other {
                    Some(v) => {
                        let diff = (seq.a[n] - v).abs();
                        seq.stable[n] = diff <= tol;
                        seq.agreement_digits[n] = if diff == 0.0 {
                            16.0
                        } else {
                            (-diff.log10()).clamp(0.0, 16.0)
                        };
                    }
                    None => {
                        seq.stable[n] = false;
                        seq.agreement_digits[n] = 0.0;
                    }
                }
            }
            Ok((seq, analysis))
        }
    }
}

/// Measure sequence of a snapshot; an all-zero family has `b ≡ 0`.
pub fn measure_of(frame: &FrameSnapshot, opts: &AnalyzeOptions, policy: EdgePolicy) -> Result<MeasureSequence> {
    match measure_with_policy(frame, opts, policy) {
        Ok((seq, _)) => Ok(seq),
        Err(Error::EmptySpan) => {
            let sizes = frame.decomp().block_sizes().to_vec();
            let d = sizes.len();
            Ok(MeasureSequence {
                block_sizes: sizes,
                a: vec![0.0; d],
                b: vec![0.0; d],
                stable: vec![true; d],
                agreement_digits: vec![16.0; d],
            })
        }
        Err(e) => Err(e),
    }
}

/// Elementwise superset `{f_i ⊕ g_i}` in `H₁ ⊕ H₂`.
pub fn direct_sum(f1: &FrameSnapshot, f2: &FrameSnapshot) -> Result<FrameSnapshot> {
    if !Arc::ptr_eq(f1.decomp(), f2.decomp()) && f1.decomp() != f2.decomp() {
        return Err(Error::Mismatch("direct sum needs identical decompositions".into()));
    }
    let offset = f1.ambient_dim();
    let vectors = f1
        .vectors()
        .iter()
        .zip(f2.vectors())
        .map(|(a, b)| {
            let mut e = a.entries().to_vec();
            e.extend(b.shifted(offset).entries().iter().copied());
            FrameVector { entries: e }
        })
        .collect();
    FrameSnapshot::new(offset + f2.ambient_dim(), vectors, f1.decomp().clone())
}

/// `‖P₁ P₂‖` for the Gram projections of two families on the same labels.
///
/// When `label_limit` is set, only joint components lying entirely below
/// that position are considered (the trusted interior of a truncation).
pub fn projection_product_norm(
    f1: &FrameSnapshot,
    a1: &FrameAnalysis,
    f2: &FrameSnapshot,
    a2: &FrameAnalysis,
    label_limit: Option<usize>,
    exec: Execution,
) -> Result<f64> {
    if f1.len() != f2.len() {
        return Err(Error::Mismatch("families have different label counts".into()));
    }
    let n = f1.len();
    let mut uf = UnionFind::new(n);
    for a in [a1, a2] {
        for b in a.blocks() {
            for w in b.labels.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let in_any = |i: usize| a1.block_of(i).is_some() || a2.block_of(i).is_some();
    let joint = uf.groups(in_any);
    let limit = label_limit.unwrap_or(n);
    let joint: Vec<Vec<usize>> = joint
        .into_iter()
        .filter(|g| g.last().is_some_and(|&l| l < limit))
        .collect();
    let norms = exec.map(&joint, |group| {
        let stack = |f: &FrameSnapshot, a: &FrameAnalysis| -> DMatrix<C64> {
            let mut ids: Vec<usize> = group.iter().filter_map(|&i| a.block_of(i)).collect();
            ids.sort_unstable();
            ids.dedup();
            let rank: usize = ids.iter().map(|&b| a.blocks()[b].rank()).sum();
            let mut m = DMatrix::zeros(group.len(), rank);
            let mut col = 0;
            for b in ids {
                let block = &a.blocks()[b];
                let q = block.range_basis(f);
                for (r, &lab) in block.labels.iter().enumerate() {
                    let row = group.binary_search(&lab).expect("label in joint component");
                    for k in 0..block.rank() {
                        m[(row, col + k)] = q[(r, k)];
                    }
                }
                col += block.rank();
            }
            m
        };
        let q1 = stack(f1, a1);
        let q2 = stack(f2, a2);
        if q1.ncols() == 0 || q2.ncols() == 0 {
            return 0.0;
        }
        crate::linalg::spectral_norm(&(q1.adjoint() * q2))
    });
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Whether the coefficient ranges of two families are orthogonal
/// (`P₁ P₂ ≈ 0`, equivalently `Σ_i ⟨g, f¹_i⟩⟨f²_i, h⟩ = 0`).
pub fn is_orthogonal_supersets(f1: &FrameSnapshot, f2: &FrameSnapshot, tol: f64) -> Result<bool> {
    if f1.decomp() != f2.decomp() {
        return Err(Error::Mismatch("families have different decompositions".into()));
    }
    let opts = AnalyzeOptions::default();
    let a1 = analyze(f1, &opts)?;
    let a2 = analyze(f2, &opts)?;
    Ok(projection_product_norm(f1, &a1, f2, &a2, None, opts.exec)? <= tol)
}

/// `g_i = phase_i · f_{perm(i)}`. `perm` is a permutation of snapshot
/// positions.
pub fn apply_phases_and_permutation(frame: &FrameSnapshot, phases: &[C64], perm: &[usize]) -> Result<FrameSnapshot> {
    let n = frame.len();
    if phases.len() != n || perm.len() != n {
        return Err(Error::Mismatch(format!(
            "need {n} phases and permutation entries, got {} and {}",
            phases.len(),
            perm.len()
        )));
    }
    for (i, p) in phases.iter().enumerate() {
        let m = p.norm();
        if (m - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnimodularPhase { index: i, modulus: m });
        }
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "entry {p} is out of range or repeated"
            )));
        }
    }
    let vectors = (0..n).map(|i| frame.vectors()[perm[i]].scaled(phases[i])).collect();
    FrameSnapshot::new(frame.ambient_dim(), vectors, frame.decomp().clone())
}

/// First block after which `perm` is the identity.
pub fn permutation_support_block(perm: &[usize], decomp: &IndexDecomposition) -> usize {
    match perm.iter().enumerate().rev().find(|(i, &p)| *i != p) {
        Some((last, _)) => decomp.block_of(last),
        None => 0,
    }
}

/// Largest `|⟨f_i, h_i⟩ − ⟨f_i, f̃_i⟩|` over the first `limit` labels, where
/// `h_i` is the snapshot's explicit dual.
pub fn explicit_dual_agreement(frame: &FrameSnapshot, analysis: &FrameAnalysis, limit: usize) -> Option<f64> {
    let dual = frame.explicit_dual()?;
    Some(
        (0..limit.min(frame.len()))
            .map(|i| (frame.vectors()[i].inner(&dual[i]).re - analysis.diag_products()[i]).abs())
            .fold(0.0, f64::max),
    )
}
