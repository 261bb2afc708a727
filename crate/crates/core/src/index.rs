//! Index sets with nested block decompositions, quasi-metrics on labels and
//! bijective remappings between index sets.
//!
//! Blocks are numbered from 1: block `n` is the prefix of the first
//! `block_sizes[n - 1]` labels. Everything here is finite; the infinite
//! index set only ever exists through an explicitly materialized prefix.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::{Error, Result};

/// A point of the index set: an integer or a fixed-arity integer tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Tuple(Box<[i64]>),
}

impl Label {
    pub fn pair(a: i64, b: i64) -> Self {
        Label::Tuple(Box::new([a, b]))
    }

    pub fn coords(&self) -> &[i64] {
        match self {
            Label::Int(v) => std::slice::from_ref(v),
            Label::Tuple(t) => t,
        }
    }

    pub fn arity(&self) -> usize {
        self.coords().len()
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<(i64, i64)> for Label {
    fn from((a, b): (i64, i64)) -> Self {
        Label::pair(a, b)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(v) => write!(f, "{v}"),
            Label::Tuple(t) => {
                write!(f, "(")?;
                for (k, v) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Ordered labels with nested blocks `I_1 ⊂ I_2 ⊂ …`.
#[derive(Debug, Clone)]
pub struct IndexDecomposition {
    labels: Vec<Label>,
    block_sizes: Vec<usize>,
    positions: OnceLock<HashMap<Label, usize>>,
}

impl PartialEq for IndexDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.block_sizes == other.block_sizes && self.labels == other.labels
    }
}

impl IndexDecomposition {
    /// Validates nestedness, positivity and label uniqueness.
    pub fn new(labels: Vec<Label>, block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidDecomposition("no blocks".into()));
        }
        if block_sizes[0] == 0 {
            return Err(Error::InvalidDecomposition("block sizes must be positive".into()));
        }
        if let Some(k) = block_sizes.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidDecomposition(format!(
                "block sizes decrease at block {}",
                k + 2
            )));
        }
        let last = *block_sizes.last().unwrap();
        if last != labels.len() {
            return Err(Error::InvalidDecomposition(format!(
                "last block has {last} labels but {} are materialized",
                labels.len()
            )));
        }
        let mut sorted: Vec<&Label> = labels.iter().collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDecomposition(format!("label {} appears twice", w[0])));
        }
        Ok(Self {
            labels,
            block_sizes,
            positions: OnceLock::new(),
        })
    }

    /// `I_n = {1, …, n}` for `n = 1..=depth`.
    pub fn naturals(depth: usize) -> Self {
        Self::naturals_with_blocks((1..=depth).collect()).expect("valid by construction")
    }

    /// Labels `1..=last` with the given cumulative block sizes.
    pub fn naturals_with_blocks(block_sizes: Vec<usize>) -> Result<Self> {
        let last = block_sizes.last().copied().unwrap_or(0);
        let labels = (1..=last as i64).map(Label::Int).collect();
        Self::new(labels, block_sizes)
    }

    /// Symmetric integer intervals `I_n = [-n, n]`, `n = 1..=depth`.
    ///
    /// Labels are ordered `0, -1, 1, -2, 2, …`.
    pub fn integer_boxes(depth: usize) -> Self {
        let mut labels = vec![Label::Int(0)];
        let mut sizes = Vec::with_capacity(depth);
        for n in 1..=depth as i64 {
            labels.push(Label::Int(-n));
            labels.push(Label::Int(n));
            sizes.push(labels.len());
        }
        Self::new(labels, sizes).expect("valid by construction")
    }

    /// Square boxes `I_n = [-n, n]²` in `ℤ²`, `n = 1..=depth`, labels added
    /// ring by ring in lexicographic order within a ring.
    pub fn square_boxes(depth: usize) -> Self {
        let mut labels = vec![Label::pair(0, 0)];
        let mut sizes = Vec::with_capacity(depth);
        for n in 1..=depth as i64 {
            for a in -n..=n {
                for b in -n..=n {
                    if a.abs().max(b.abs()) == n {
                        labels.push(Label::pair(a, b));
                    }
                }
            }
            sizes.push(labels.len());
        }
        Self::new(labels, sizes).expect("valid by construction")
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, pos: usize) -> &Label {
        &self.labels[pos]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of materialized blocks.
    pub fn depth(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// `|I_n|` for 1-based `n`.
    pub fn block_size(&self, n: usize) -> usize {
        self.block_sizes[n - 1]
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.positions
            .get_or_init(|| self.labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect())
            .get(label)
            .copied()
    }

    pub fn require_position(&self, label: &Label) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// First block (1-based) containing the label at `pos`.
    pub fn block_of(&self, pos: usize) -> usize {
        self.block_sizes.partition_point(|&s| s <= pos) + 1
    }

    /// The first `depth` blocks.
    pub fn prefix(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::InsufficientBlocks {
                needed: depth.max(1),
                available: self.depth(),
            });
        }
        let size = self.block_sizes[depth - 1];
        Ok(Self {
            labels: self.labels[..size].to_vec(),
            block_sizes: self.block_sizes[..depth].to_vec(),
            positions: OnceLock::new(),
        })
    }

    fn check_block(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.depth() {
            return Err(Error::InsufficientBlocks {
                needed: n.max(1),
                available: self.depth(),
            });
        }
        Ok(())
    }
}

/// Explicit distance table over a finite label set.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    index: HashMap<Label, usize>,
    dist: Vec<Vec<f64>>,
}

impl DistanceTable {
    pub fn new(labels: Vec<Label>, dist: Vec<Vec<f64>>) -> Result<Self> {
        if dist.len() != labels.len() || dist.iter().any(|row| row.len() != labels.len()) {
            return Err(Error::Metric("distance table is not square".into()));
        }
        let index = labels.into_iter().enumerate().map(|(k, l)| (l, k)).collect();
        Ok(Self { index, dist })
    }
}

/// Quasi-distance on labels.
#[derive(Debug, Clone)]
pub enum QuasiMetric {
    /// `|i - j|` on integer labels.
    Abs,
    /// `max_k |i_k - j_k|`; integers are 1-tuples.
    Sup,
    /// Sup over coordinates of the cyclic distance modulo `moduli[k]`.
    CyclicSup {
        moduli: Vec<i64>,
    },
    Table(Arc<DistanceTable>),
}

impl QuasiMetric {
    /// Registry keys: `abs`, `sup`, `sup2d`, `cyclic:<N>` (applied to every
    /// coordinate). `custom:<file>` is resolved by [`crate::io`].
    pub fn from_key(key: &str) -> Result<Self> {
        match key {
            "abs" => Ok(QuasiMetric::Abs),
            "sup" | "sup2d" => Ok(QuasiMetric::Sup),
            _ => {
                if let Some(n) = key.strip_prefix("cyclic:") {
                    let n: i64 = n.parse().map_err(|_| Error::Metric(format!("bad modulus in {key}")))?;
                    if n <= 0 {
                        return Err(Error::Metric("modulus must be positive".into()));
                    }
                    Ok(QuasiMetric::CyclicSup { moduli: vec![n] })
                } else if let Some(path) = key.strip_prefix("custom:") {
                    crate::io::read_metric_table(std::path::Path::new(path))
                } else {
                    Err(Error::Metric(format!("unknown metric {key}")))
                }
            }
        }
    }

    pub fn dist(&self, a: &Label, b: &Label) -> Result<f64> {
        match self {
            QuasiMetric::Abs => match (a, b) {
                (Label::Int(x), Label::Int(y)) => Ok((x - y).abs() as f64),
                _ => Err(Error::Metric("abs metric needs integer labels".into())),
            },
            QuasiMetric::Sup => {
                let (x, y) = (a.coords(), b.coords());
                if x.len() != y.len() {
                    return Err(Error::Metric("label arity mismatch".into()));
                }
                Ok(x.iter().zip(y).map(|(p, q)| (p - q).abs()).max().unwrap_or(0) as f64)
            }
            QuasiMetric::CyclicSup { moduli } => {
                let (x, y) = (a.coords(), b.coords());
                if x.len() != y.len() {
                    return Err(Error::Metric("label arity mismatch".into()));
                }
                let mut best = 0i64;
                for (k, (p, q)) in x.iter().zip(y).enumerate() {
                    let m = moduli[k.min(moduli.len() - 1)];
                    let d = (p - q).rem_euclid(m);
                    best = best.max(d.min(m - d));
                }
                Ok(best as f64)
            }
            QuasiMetric::Table(t) => {
                let i = t.index.get(a).ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
                let j = t.index.get(b).ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
                Ok(t.dist[*i][*j])
            }
        }
    }

    /// Periodic metrics have complete balls around every center.
    pub fn is_periodic(&self) -> bool {
        matches!(self, QuasiMetric::CyclicSup { .. })
    }

    /// Checks symmetry, `d(i,i) = 0` and the triangle inequality on `samples`
    /// random triples of materialized labels.
    pub fn check_axioms(&self, decomp: &IndexDecomposition, samples: usize, seed: u64) -> Result<()> {
        let n = decomp.len();
        if n == 0 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (i, j, k) = (
                decomp.label(rng.random_range(0..n)),
                decomp.label(rng.random_range(0..n)),
                decomp.label(rng.random_range(0..n)),
            );
            let dij = self.dist(i, j)?;
            let dji = self.dist(j, i)?;
            if dij < 0.0 || (dij - dji).abs() > 1e-12 * (1.0 + dij.abs()) {
                return Err(Error::Metric(format!("asymmetric or negative at ({i}, {j})")));
            }
            if self.dist(i, i)? != 0.0 {
                return Err(Error::Metric(format!("d({i},{i}) != 0")));
            }
            if dij > self.dist(i, k)? + self.dist(k, j)? + 1e-12 * (1.0 + dij) {
                return Err(Error::Metric(format!("triangle inequality fails at ({i}, {k}, {j})")));
            }
        }
        Ok(())
    }
}

/// `B_R(center)` among materialized labels, in decomposition order.
pub fn ball(decomp: &IndexDecomposition, metric: &QuasiMetric, center: &Label, radius: f64) -> Result<Vec<Label>> {
    decomp.require_position(center)?;
    if !(radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} is negative")));
    }
    let mut out = Vec::new();
    for l in decomp.labels() {
        if metric.dist(l, center)? <= radius {
            out.push(l.clone());
        }
    }
    Ok(out)
}

/// Largest ball cardinality over all materialized centers.
pub fn max_ball_cardinality(decomp: &IndexDecomposition, metric: &QuasiMetric, radius: f64) -> Result<usize> {
    let mut best = 0;
    for c in decomp.labels() {
        best = best.max(ball(decomp, metric, c, radius)?.len());
    }
    Ok(best)
}

/// Number of blocks that must be materialized past block `n` to witness an
/// `R`-collar: `max(1, ⌈R⌉)`.
pub fn collar_blocks(radius: f64) -> usize {
    (radius.ceil() as usize).max(1)
}

/// `|{i ∈ I_n : d(i, I ∖ I_n) ≤ R}| / |I_n|`.
///
/// The complement is only known through materialized labels: every label
/// past block `n` is searched, and blocks `n + 1 ..= n + max(1, ⌈R⌉)` must
/// exist, otherwise the collar is reported as not witnessed.
pub fn boundary_fraction(decomp: &IndexDecomposition, metric: &QuasiMetric, n: usize, radius: f64) -> Result<f64> {
    decomp.check_block(n)?;
    if !(radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} is negative")));
    }
    let needed = n + collar_blocks(radius);
    if needed > decomp.depth() {
        return Err(Error::CollarNotWitnessed {
            block: n,
            radius,
            needed,
            available: decomp.depth(),
        });
    }
    let inner = decomp.block_size(n);
    let outer = decomp.len();
    let labels = decomp.labels();
    let flags = Execution::default().map_range(inner, |i| -> Result<bool> {
        for j in inner..outer {
            if metric.dist(&labels[i], &labels[j])? <= radius {
                return Ok(true);
            }
        }
        Ok(false)
    });
    let mut hits = 0usize;
    for f in flags {
        if f? {
            hits += 1;
        }
    }
    Ok(hits as f64 / inner as f64)
}

/// Extrapolated limit of a block sequence.
///
/// Fits `v_n ≈ limit + slope / |I_n|` by least squares over the last third
/// of the supplied points (at least two) and reports the worst fit residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTrend {
    pub limit: f64,
    pub slope: f64,
    pub max_residual: f64,
    pub points_used: usize,
}

impl TailTrend {
    pub fn fit(sizes: &[usize], values: &[f64]) -> Result<Self> {
        if sizes.len() != values.len() || sizes.len() < 2 {
            return Err(Error::TooFew {
                what: "blocks for a trend",
                needed: 2,
                got: sizes.len().min(values.len()),
            });
        }
        let len = sizes.len();
        let take = len.div_ceil(3).max(2);
        let xs: Vec<f64> = sizes[len - take..].iter().map(|&s| 1.0 / s as f64).collect();
        let ys = &values[len - take..];
        let k = take as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = if sxx > 1e-300 { sxy / sxx } else { 0.0 };
        let limit = my - slope * mx;
        let max_residual = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - limit - slope * x).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            limit,
            slope,
            max_residual,
            points_used: take,
        })
    }

    /// The limit lies within `tol` of `target` and the fit explains the tail
    /// to within `tol`.
    pub fn reaches(&self, target: f64, tol: f64) -> bool {
        (self.limit - target).abs() <= tol && self.max_residual <= tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRow {
    pub n: usize,
    pub block_size: usize,
    pub radius: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusVerdict {
    pub radius: f64,
    pub trend: TailTrend,
    pub consistent: bool,
}

/// Boundary fractions over a grid of blocks and radii with a trend verdict.
#[derive(Debug, Clone, Serialize)]
pub struct UniformMetricReport {
    pub rows: Vec<BoundaryRow>,
    pub per_radius: Vec<RadiusVerdict>,
    /// "consistent with uniform metric index set": a finite trend, not a proof.
    pub consistent: bool,
    pub tolerance: f64,
}

pub const DEFAULT_TREND_TOL: f64 = 1e-2;

pub fn uniform_metric_report(
    decomp: &IndexDecomposition,
    metric: &QuasiMetric,
    radii: &[f64],
    n_list: &[usize],
    tol: f64,
) -> Result<UniformMetricReport> {
    if n_list.len() < 2 {
        return Err(Error::TooFew {
            what: "blocks for a trend",
            needed: 2,
            got: n_list.len(),
        });
    }
    let mut rows = Vec::new();
    let mut per_radius = Vec::new();
    for &r in radii {
        let mut fractions = Vec::with_capacity(n_list.len());
        let mut sizes = Vec::with_capacity(n_list.len());
        for &n in n_list {
            let f = boundary_fraction(decomp, metric, n, r)?;
            rows.push(BoundaryRow {
                n,
                block_size: decomp.block_size(n),
                radius: r,
                fraction: f,
            });
            fractions.push(f);
            sizes.push(decomp.block_size(n));
        }
        let trend = TailTrend::fit(&sizes, &fractions)?;
        per_radius.push(RadiusVerdict {
            radius: r,
            consistent: trend.reaches(0.0, tol),
            trend,
        });
    }
    Ok(UniformMetricReport {
        consistent: per_radius.iter().all(|v| v.consistent),
        rows,
        per_radius,
        tolerance: tol,
    })
}

/// Bijection between the materialized labels of two decompositions.
#[derive(Debug, Clone)]
pub struct IndexRemap {
    forward: Vec<usize>,
    inverse: Vec<usize>,
    source: Arc<IndexDecomposition>,
    target: Arc<IndexDecomposition>,
}

impl IndexRemap {
    /// Builds the remap from a label function; it must hit every target
    /// label exactly once.
    pub fn from_fn<F>(source: Arc<IndexDecomposition>, target: Arc<IndexDecomposition>, f: F) -> Result<Self>
    where
        F: Fn(&Label) -> Label,
    {
        if source.len() != target.len() {
            return Err(Error::Mismatch(format!(
                "source has {} labels, target {}",
                source.len(),
                target.len()
            )));
        }
        let mut forward = Vec::with_capacity(source.len());
        let mut inverse = vec![usize::MAX; target.len()];
        for (p, l) in source.labels().iter().enumerate() {
            let img = f(l);
            let q = target.require_position(&img)?;
            if inverse[q] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("{img} is hit twice")));
            }
            inverse[q] = p;
            forward.push(q);
        }
        Ok(Self {
            forward,
            inverse,
            source,
            target,
        })
    }

    pub fn identity(decomp: Arc<IndexDecomposition>) -> Self {
        let n = decomp.len();
        Self {
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
            source: decomp.clone(),
            target: decomp,
        }
    }

    pub fn source(&self) -> &IndexDecomposition {
        &self.source
    }

    pub fn target(&self) -> &IndexDecomposition {
        &self.target
    }

    pub fn apply(&self, label: &Label) -> Result<&Label> {
        let p = self.source.require_position(label)?;
        Ok(self.target.label(self.forward[p]))
    }

    pub fn apply_inverse(&self, label: &Label) -> Result<&Label> {
        let q = self.target.require_position(label)?;
        Ok(self.source.label(self.inverse[q]))
    }

    /// Position-level table `source position → target position`.
    pub fn forward_positions(&self) -> &[usize] {
        &self.forward
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RemapRow {
    pub n: usize,
    /// `|a(I_n) ∩ J_n| / |I_n|`
    pub overlap_ratio: f64,
    /// `|J_n| / |I_n|`
    pub size_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemapMeasureReport {
    pub rows: Vec<RemapRow>,
    pub overlap_trend: TailTrend,
    pub size_trend: TailTrend,
    pub passes: bool,
    pub tolerance: f64,
}

/// Both ratio sequences of the remapping density condition and whether they
/// trend to 1 within `tol`.
pub fn remap_measure_condition(remap: &IndexRemap, n_list: &[usize], tol: f64) -> Result<RemapMeasureReport> {
    let max_n = n_list.iter().copied().max().unwrap_or(0);
    if max_n > remap.source.depth() || max_n > remap.target.depth() {
        return Err(Error::Mismatch(format!(
            "need {max_n} blocks, source has {}, target {}",
            remap.source.depth(),
            remap.target.depth()
        )));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    let mut sizes = Vec::with_capacity(n_list.len());
    for &n in n_list {
        remap.source.check_block(n)?;
        let src = remap.source.block_size(n);
        let tgt = remap.target.block_size(n);
        let overlap = remap.forward[..src].iter().filter(|&&q| q < tgt).count();
        rows.push(RemapRow {
            n,
            overlap_ratio: overlap as f64 / src as f64,
            size_ratio: tgt as f64 / src as f64,
        });
        sizes.push(src);
    }
    let overlaps: Vec<f64> = rows.iter().map(|r| r.overlap_ratio).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.size_ratio).collect();
    let overlap_trend = TailTrend::fit(&sizes, &overlaps)?;
    let size_trend = TailTrend::fit(&sizes, &ratios)?;
    Ok(RemapMeasureReport {
        passes: overlap_trend.reaches(1.0, tol) && size_trend.reaches(1.0, tol),
        rows,
        overlap_trend,
        size_trend,
        tolerance: tol,
    })
}

/// Empirical bound `r(u) = max{ d(a⁻¹j₁, a⁻¹j₂) : e(j₁, j₂) ≤ u }`.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEnvelope {
    /// `(u, r(u))` at every sampled target distance, `u` increasing.
    pub points: Vec<(f64, f64)>,
    /// Sampled pairs with `d(a⁻¹j₁, a⁻¹j₂) > candidate(e(j₁, j₂))`.
    pub violations: usize,
    /// Present when a candidate bound was supplied.
    pub passes: Option<bool>,
}

impl LipschitzEnvelope {
    /// Envelope value at `u` (0 below the smallest sample).
    pub fn eval(&self, u: f64) -> f64 {
        let k = self.points.partition_point(|p| p.0 <= u);
        if k == 0 {
            0.0
        } else {
            self.points[k - 1].1
        }
    }
}

/// Samples the remapping Lipschitz condition on pairs of target labels.
///
/// The candidate check is non-strict (`d ≤ r(e)`) so that the identity remap
/// passes with `r(u) = u`.
pub fn remap_lipschitz_condition(
    remap: &IndexRemap,
    metric_source: &QuasiMetric,
    metric_target: &QuasiMetric,
    sample_pairs: &[(Label, Label)],
    candidate: Option<&dyn Fn(f64) -> f64>,
) -> Result<LipschitzEnvelope> {
    if sample_pairs.is_empty() {
        return Err(Error::TooFew {
            what: "sample pairs",
            needed: 1,
            got: 0,
        });
    }
    let mut samples = Vec::with_capacity(sample_pairs.len());
    let mut violations = 0;
    for (j1, j2) in sample_pairs {
        let e = metric_target.dist(j1, j2)?;
        let d = metric_source.dist(remap.apply_inverse(j1)?, remap.apply_inverse(j2)?)?;
        if let Some(r) = candidate {
            if d > r(e) + 1e-12 {
                violations += 1;
            }
        }
        samples.push((e, d));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (e, d) in samples {
        running = running.max(d);
        match points.last_mut() {
            Some(last) if last.0 == e => last.1 = running,
            _ => points.push((e, running)),
        }
    }
    Ok(LipschitzEnvelope {
        points,
        violations,
        passes: candidate.map(|_| violations == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[Label]) -> Vec<i64> {
        v.iter()
            .map(|l| match l {
                Label::Int(x) => *x,
                _ => panic!("tuple"),
            })
            .collect()
    }

    #[test]
    fn decomposition_validation() {
        assert!(IndexDecomposition::new(vec![1.into(), 2.into()], vec![2, 1]).is_err());
        assert!(IndexDecomposition::new(vec![1.into(), 1.into()], vec![1, 2]).is_err());
        assert!(IndexDecomposition::new(vec![1.into(), 2.into()], vec![0, 2]).is_err());
        assert!(IndexDecomposition::new(vec![1.into(), 2.into()], vec![1]).is_err());
        let d = IndexDecomposition::new(vec![1.into(), 2.into(), 3.into()], vec![1, 1, 3]).unwrap();
        assert_eq!(d.block_of(0), 1);
        assert_eq!(d.block_of(1), 3);
        assert_eq!(d.prefix(2).unwrap().len(), 1);
    }

    #[test]
    fn integer_ball() {
        let d = IndexDecomposition::integer_boxes(5);
        let mut b = ints(&ball(&d, &QuasiMetric::Abs, &0.into(), 2.0).unwrap());
        b.sort();
        assert_eq!(b, vec![-2, -1, 0, 1, 2]);
        assert_eq!(
            ball(&d, &QuasiMetric::Abs, &3.into(), 0.0).unwrap(),
            vec![Label::Int(3)]
        );
        assert!(matches!(
            ball(&d, &QuasiMetric::Abs, &99.into(), 1.0),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn square_ball_has_nine_cells() {
        let d = IndexDecomposition::square_boxes(3);
        let b = ball(&d, &QuasiMetric::Sup, &Label::pair(0, 0), 1.0).unwrap();
        assert_eq!(b.len(), 9);
        assert_eq!(max_ball_cardinality(&d, &QuasiMetric::Sup, 1.0).unwrap(), 9);
    }

    #[test]
    fn boundary_fraction_on_integers() {
        let d = IndexDecomposition::integer_boxes(12);
        let f = boundary_fraction(&d, &QuasiMetric::Abs, 10, 1.0).unwrap();
        assert_eq!(f, 2.0 / 21.0);
        assert_eq!(boundary_fraction(&d, &QuasiMetric::Abs, 10, 0.0).unwrap(), 0.0);
        assert!(matches!(
            boundary_fraction(&d, &QuasiMetric::Abs, 12, 1.0),
            Err(Error::CollarNotWitnessed { .. })
        ));
        assert!(matches!(
            boundary_fraction(&d, &QuasiMetric::Abs, 10, 3.0),
            Err(Error::CollarNotWitnessed { .. })
        ));
    }

    #[test]
    fn boundary_fraction_on_square_boxes() {
        let d = IndexDecomposition::square_boxes(11);
        let f = boundary_fraction(&d, &QuasiMetric::Sup, 10, 1.0).unwrap();
        // Collar cells: the outer ring of the 21x21 box.
        assert_eq!(f, (21.0 * 21.0 - 19.0 * 19.0) / (21.0 * 21.0));
    }

    #[test]
    fn uniform_report_on_integer_boxes() {
        let d = IndexDecomposition::integer_boxes(102);
        let n_list: Vec<usize> = (10..=100).step_by(5).collect();
        let rep = uniform_metric_report(&d, &QuasiMetric::Abs, &[1.0, 2.0], &n_list, 1e-2).unwrap();
        assert!(rep.consistent);
        for row in &rep.rows {
            let expected = 2.0 * row.radius / (2.0 * row.n as f64 + 1.0);
            assert!((row.fraction - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn interleaved_decomposition_is_not_uniform() {
        // Blocks are the first n odd integers; the evens only enter in the
        // final block, so every odd label touches the complement.
        let k = 60i64;
        let mut labels: Vec<Label> = (0..k).map(|i| Label::Int(2 * i + 1)).collect();
        labels.extend((0..=k).map(|i| Label::Int(2 * i)));
        let mut sizes: Vec<usize> = (1..=k as usize).collect();
        sizes.push(labels.len());
        let d = IndexDecomposition::new(labels, sizes).unwrap();
        let n_list: Vec<usize> = (10..=50).step_by(4).collect();
        let rep = uniform_metric_report(&d, &QuasiMetric::Abs, &[1.0], &n_list, 1e-2).unwrap();
        assert!(!rep.consistent);
        assert!(rep.rows.iter().all(|r| r.fraction > 0.9));
    }

    #[test]
    fn uniform_report_needs_two_blocks() {
        let d = IndexDecomposition::integer_boxes(5);
        assert!(uniform_metric_report(&d, &QuasiMetric::Abs, &[1.0], &[2], 1e-2).is_err());
    }

    #[test]
    fn remap_identity_ratios_are_one() {
        let d = Arc::new(IndexDecomposition::integer_boxes(20));
        let rep = remap_measure_condition(&IndexRemap::identity(d), &[5, 10, 15, 20], 1e-2).unwrap();
        assert!(rep.rows.iter().all(|r| r.overlap_ratio == 1.0 && r.size_ratio == 1.0));
        assert!(rep.passes);
    }

    #[test]
    fn remap_shift_by_one() {
        let depth = 200i64;
        let d = Arc::new(IndexDecomposition::integer_boxes(depth as usize));
        let remap = IndexRemap::from_fn(d.clone(), d, |l| match l {
            Label::Int(x) if *x == depth => Label::Int(-depth),
            Label::Int(x) => Label::Int(x + 1),
            _ => unreachable!(),
        })
        .unwrap();
        let n_list: Vec<usize> = (10..=190).step_by(10).collect();
        let rep = remap_measure_condition(&remap, &n_list, 1e-2).unwrap();
        for r in &rep.rows {
            assert_eq!(r.overlap_ratio, (2 * r.n) as f64 / (2 * r.n + 1) as f64);
            assert_eq!(r.size_ratio, 1.0);
        }
        assert!(rep.passes);
    }

    #[test]
    fn remap_dyadic_reversal_oscillates() {
        // Reverse every dyadic block [2^k, 2^{k+1}) of ℕ.
        let max = (1usize << 12) - 1;
        let d = Arc::new(IndexDecomposition::naturals(max));
        let remap = IndexRemap::from_fn(d.clone(), d, |l| match l {
            Label::Int(i) => {
                let k = 63 - (*i as u64).leading_zeros() as i64;
                Label::Int((1 << k) + (1 << (k + 1)) - 1 - i)
            }
            _ => unreachable!(),
        })
        .unwrap();
        let n_list: Vec<usize> = (64..=max).step_by(37).collect();
        let rep = remap_measure_condition(&remap, &n_list, 1e-2).unwrap();
        let lo = rep.rows.iter().map(|r| r.overlap_ratio).fold(1.0, f64::min);
        assert!(lo < 0.75);
        assert!(!rep.passes);
        assert!(remap_measure_condition(&remap, &[max + 1], 1e-2).is_err());
    }

    #[test]
    fn lipschitz_envelopes() {
        let d = Arc::new(IndexDecomposition::integer_boxes(30));
        let pairs: Vec<(Label, Label)> = (-20..20)
            .flat_map(|i| (1..4).map(move |s| (Label::Int(i), Label::Int(i + s))))
            .collect();
        let id = IndexRemap::identity(d.clone());
        let env = remap_lipschitz_condition(&id, &QuasiMetric::Abs, &QuasiMetric::Abs, &pairs, Some(&|u| u)).unwrap();
        assert_eq!(env.passes, Some(true));
        for &(u, r) in &env.points {
            assert_eq!(u, r);
        }

        // Source labels 2i, target labels i: a⁻¹ doubles distances.
        let src_labels: Vec<Label> = d.labels().iter().map(|l| Label::Int(2 * l.coords()[0])).collect();
        let src = Arc::new(IndexDecomposition::new(src_labels, d.block_sizes().to_vec()).unwrap());
        let halve = IndexRemap::from_fn(src, d.clone(), |l| Label::Int(l.coords()[0] / 2)).unwrap();
        let env = remap_lipschitz_condition(&halve, &QuasiMetric::Abs, &QuasiMetric::Abs, &pairs, Some(&|u| 2.0 * u))
            .unwrap();
        assert_eq!(env.passes, Some(true));
        assert_eq!(env.eval(3.0), 6.0);

        // Send neighbours i, i+1 to far apart sources by reflecting odd labels.
        let wild = IndexRemap::from_fn(d.clone(), d.clone(), |l| {
            let x = l.coords()[0];
            if x % 2 != 0 {
                Label::Int(-x)
            } else {
                Label::Int(x)
            }
        })
        .unwrap();
        let env = remap_lipschitz_condition(
            &wild,
            &QuasiMetric::Abs,
            &QuasiMetric::Abs,
            &pairs,
            Some(&|u| 2.0 * u + 1.0),
        )
        .unwrap();
        assert_eq!(env.passes, Some(false));
        assert!(env.eval(1.0) >= 39.0);
        assert!(remap_lipschitz_condition(&wild, &QuasiMetric::Abs, &QuasiMetric::Abs, &[], None).is_err());
    }

    #[test]
    fn metric_registry_and_axioms() {
        let d = IndexDecomposition::square_boxes(4);
        let m = QuasiMetric::from_key("sup2d").unwrap();
        m.check_axioms(&d, 500, 7).unwrap();
        let c = QuasiMetric::from_key("cyclic:8").unwrap();
        assert_eq!(c.dist(&Label::pair(0, 0), &Label::pair(7, 1)).unwrap(), 1.0);
        assert!(QuasiMetric::from_key("bogus").is_err());
        assert!(QuasiMetric::Abs.dist(&Label::pair(0, 0), &Label::Int(1)).is_err());
    }

    proptest! {
        #[test]
        fn nested_blocks_and_monotone_balls(depth in 2usize..15, r1 in 0.0f64..5.0, extra in 0.0f64..5.0) {
            let d = IndexDecomposition::square_boxes(depth);
            for n in 1..depth {
                let inner: std::collections::HashSet<_> = d.labels()[..d.block_size(n)].iter().collect();
                prop_assert!(d.labels()[..d.block_size(n + 1)].iter().filter(|l| inner.contains(l)).count() == inner.len());
            }
            let small = ball(&d, &QuasiMetric::Sup, &Label::pair(0, 0), r1).unwrap();
            let big = ball(&d, &QuasiMetric::Sup, &Label::pair(0, 0), r1 + extra).unwrap();
            prop_assert!(small.iter().all(|l| big.contains(l)));
        }

        #[test]
        fn boundary_fraction_monotone_in_radius(n in 1usize..20, r in 0.0f64..4.0, dr in 0.0f64..2.0) {
            let d = IndexDecomposition::integer_boxes(30);
            let a = boundary_fraction(&d, &QuasiMetric::Abs, n, r).unwrap();
            let b = boundary_fraction(&d, &QuasiMetric::Abs, n, r + dr).unwrap();
            prop_assert!(a <= b);
        }
    }
}
