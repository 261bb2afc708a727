//! Operators on `ℓ²(I)` through their finite sections: the diagonal block
//! sums `b_op`, off-diagonal tail tables, the tracial residual and the
//! superframe checks built on Gram projections.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::frame::{
    analyze, direct_sum, measure_with_policy, projection_product_norm, AnalyzeOptions, EdgePolicy, FrameAnalysis,
    FrameSnapshot,
};
use crate::index::{collar_blocks, IndexDecomposition, QuasiMetric};
use crate::linalg::{hermitian_eigen, spectral_norm, CompensatedSum};
use crate::measure::{frame_measure, MeasureOptions, MeasureProfile};
use crate::seq::{certify, RealSequence};
use crate::{Error, Execution, Result, C64};

/// Square matrix indexed by the materialized labels of a decomposition.
#[derive(Debug, Clone)]
pub struct OperatorSnapshot {
    matrix: DMatrix<C64>,
    decomp: Arc<IndexDecomposition>,
    metric: Option<QuasiMetric>,
}

impl OperatorSnapshot {
    pub fn new(matrix: DMatrix<C64>, decomp: Arc<IndexDecomposition>, metric: Option<QuasiMetric>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Mismatch(format!(
                "matrix is {} × {}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != decomp.len() {
            return Err(Error::Mismatch(format!(
                "matrix dimension {} differs from {} labels",
                matrix.nrows(),
                decomp.len()
            )));
        }
        Ok(Self { matrix, decomp, metric })
    }

    /// Gram projection of a frame, carrying the frame's decomposition.
    pub fn gram_projection(
        frame: &FrameSnapshot,
        analysis: &FrameAnalysis,
        metric: Option<QuasiMetric>,
    ) -> Result<Self> {
        Self::new(analysis.gram_projection(frame), frame.decomp().clone(), metric)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn decomp(&self) -> &Arc<IndexDecomposition> {
        &self.decomp
    }

    pub fn metric(&self) -> Option<&QuasiMetric> {
        self.metric.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_metric(mut self, metric: QuasiMetric) -> Self {
        self.metric = Some(metric);
        self
    }

    /// `A*` on the same labels.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            decomp: self.decomp.clone(),
            metric: self.metric.clone(),
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() || *self.decomp != *other.decomp {
            return Err(Error::Mismatch("operators live on different decompositions".into()));
        }
        Ok(())
    }
}

/// Real and imaginary parts of `b_op(A)`, each certified, with `‖A‖`.
#[derive(Debug, Clone)]
pub struct BOp {
    pub re: RealSequence,
    pub im: RealSequence,
    pub norm: f64,
}

fn block_sums(diag: &[C64], sizes: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    let mut out_re = Vec::with_capacity(sizes.len());
    let mut out_im = Vec::with_capacity(sizes.len());
    let mut next = 0;
    for &s in sizes {
        for d in &diag[next..s] {
            re.add(d.re);
            im.add(d.im);
        }
        next = s;
        out_re.push(re.value());
        out_im.push(im.value());
    }
    (out_re, out_im)
}

/// `b_n(A) = Σ_{i ∈ I_n} ⟨A δ_i, δ_i⟩` split into real and imaginary parts.
/// The attached growth certificates never exceed `‖A‖`.
pub fn b_op(op: &OperatorSnapshot) -> Result<BOp> {
    let diag: Vec<C64> = op.matrix.diagonal().iter().copied().collect();
    let sizes = op.decomp.block_sizes().to_vec();
    let (re, im) = block_sums(&diag, &sizes);
    Ok(BOp {
        re: certify(&RealSequence::new(re, sizes.clone())?)?,
        im: certify(&RealSequence::new(im, sizes)?)?,
        norm: spectral_norm(&op.matrix),
    })
}

/// Worst-case tail energies outside metric balls, per radius.
#[derive(Debug, Clone, Serialize)]
pub struct NonExpansiveReport {
    pub radii: Vec<f64>,
    /// `max_i Σ_{d(i,j) > R} |A_ij|²` over interior centers.
    pub row_tail: Vec<f64>,
    /// Same for `A*`, i.e. over columns of `A`.
    pub col_tail: Vec<f64>,
    /// Number of interior centers used at each radius.
    pub centers: Vec<usize>,
    /// Centers skipped at each radius because their ball reaches past the
    /// materialized labels.
    pub excluded: Vec<usize>,
    pub interior_only: bool,
}

impl NonExpansiveReport {
    /// Smallest tabulated radius at which both tails are at most `eps`.
    pub fn radius_for(&self, eps: f64) -> Option<f64> {
        (0..self.radii.len())
            .find(|&k| self.row_tail[k] <= eps && self.col_tail[k] <= eps)
            .map(|k| self.radii[k])
    }

    /// Whether both tails are nonincreasing along the radii.
    pub fn is_monotone(&self) -> bool {
        let mono = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
        mono(&self.row_tail) && mono(&self.col_tail)
    }
}

/// Tail table of `A` and `A*`. Radii are sorted increasingly.
///
/// A center in block `b` counts as interior at radius `R` when blocks up to
/// `b + max(1, ⌈R⌉)` are materialized; periodic metrics make every center
/// interior.
pub fn nonexpansive_report(op: &OperatorSnapshot, radii: &[f64], exec: Execution) -> Result<NonExpansiveReport> {
    let metric = op
        .metric
        .as_ref()
        .ok_or_else(|| Error::Metric("tail report needs a metric".into()))?;
    if radii.is_empty() {
        return Err(Error::TooFew {
            what: "radii",
            needed: 1,
            got: 0,
        });
    }
    let mut radii = radii.to_vec();
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::InvalidArgument("radii must be nonnegative".into()));
    }
    radii.sort_by(f64::total_cmp);

    let n = op.dim();
    let labels = op.decomp.labels();
    let depth = op.decomp.depth();
    let dist: Vec<Vec<f64>> = exec
        .map_range(n, |i| {
            (0..n)
                .map(|j| metric.dist(&labels[i], &labels[j]))
                .collect::<Result<Vec<_>>>()
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let periodic = metric.is_periodic();
    let a = &op.matrix;

    let mut report = NonExpansiveReport {
        radii: radii.clone(),
        row_tail: Vec::with_capacity(radii.len()),
        col_tail: Vec::with_capacity(radii.len()),
        centers: Vec::with_capacity(radii.len()),
        excluded: Vec::with_capacity(radii.len()),
        interior_only: !periodic,
    };
    for &r in &radii {
        let interior: Vec<usize> = (0..n)
            .filter(|&i| periodic || op.decomp.block_of(i) + collar_blocks(r) <= depth)
            .collect();
        if interior.is_empty() {
            return Err(Error::InvalidArgument(format!("no interior center at radius {r}")));
        }
        // Plain left-to-right sums of nonnegative terms: a subset sum never
        // exceeds the full sum, so the table is exactly monotone.
        let tails = exec.map(&interior, |&i| {
            let (mut row, mut col) = (0.0, 0.0);
            for j in 0..n {
                if dist[i][j] > r {
                    row += a[(i, j)].norm_sqr();
                    col += a[(j, i)].norm_sqr();
                }
            }
            (row, col)
        });
        report.row_tail.push(tails.iter().map(|t| t.0).fold(0.0, f64::max));
        report.col_tail.push(tails.iter().map(|t| t.1).fold(0.0, f64::max));
        report.centers.push(interior.len());
        report.excluded.push(n - interior.len());
    }
    Ok(report)
}

/// `r_n = |b_n(T₁T₂) − b_n(T₂T₁)| / |I_n|`.
pub fn tracial_residual(t1: &OperatorSnapshot, t2: &OperatorSnapshot, exec: Execution) -> Result<RealSequence> {
    t1.same_shape(t2)?;
    let (a, b) = (&t1.matrix, &t2.matrix);
    let n = t1.dim();
    let diff: Vec<C64> = exec.map_range(n, |i| {
        let mut d = C64::new(0.0, 0.0);
        for k in 0..n {
            d += a[(i, k)] * b[(k, i)] - b[(i, k)] * a[(k, i)];
        }
        d
    });
    let sizes = t1.decomp.block_sizes();
    let (re, im) = block_sums(&diff, sizes);
    let values = re
        .iter()
        .zip(&im)
        .zip(sizes)
        .map(|((x, y), &s)| x.hypot(*y) / s as f64)
        .collect();
    RealSequence::new(values, sizes.to_vec())
}

#[derive(Debug, Clone, Copy)]
pub struct SuperframeOptions {
    pub analyze: AnalyzeOptions,
    pub policy: EdgePolicy,
    pub tol: f64,
}

impl Default for SuperframeOptions {
    fn default() -> Self {
        Self {
            analyze: AnalyzeOptions::default(),
            policy: EdgePolicy::default(),
            tol: 1e-9,
        }
    }
}

impl SuperframeOptions {
    pub fn exact() -> Self {
        Self {
            policy: EdgePolicy::Exact,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperframeReport {
    pub is_superframe: bool,
    pub p1p2_norm: f64,
    /// Frame bounds of `F₁ ⊕ F₂` on `span F₁ ⊕ span F₂`; the lower bound is
    /// 0 when the superset loses rank.
    pub combined_bounds: (f64, f64),
    pub rank_deficit: usize,
    /// Whether the lower-bound verdict agrees with `‖P₁P₂‖ < 1 − tol`.
    pub consistent: bool,
    pub interior_labels: usize,
}

/// Superframe verdict for `d` families on one index set.
#[derive(Debug, Clone, Serialize)]
pub struct MultiSuperframeReport {
    pub is_superframe: bool,
    /// Frame bounds of `F₁ ⊕ ⋯ ⊕ F_d` on `span F₁ ⊕ ⋯ ⊕ span F_d`.
    pub combined_bounds: (f64, f64),
    pub rank_deficit: usize,
    /// Largest `‖P_j P_k‖` over pairs `j < k`.
    pub max_pair_norm: f64,
    pub interior_labels: usize,
}

fn require_frame(a: &FrameAnalysis, which: usize, tol: f64) -> Result<()> {
    let (lo, _) = a.frame_bounds();
    if a.span_dim() == 0 || !(lo > tol) {
        return Err(Error::NotAFrame(format!("family {} has lower bound {lo}", which + 1)));
    }
    Ok(())
}

fn rank_on(a: &FrameAnalysis, labels: &[usize]) -> usize {
    let mut ids: Vec<usize> = labels.iter().filter_map(|&i| a.block_of(i)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.iter().map(|&b| a.blocks()[b].rank()).sum()
}

/// Decides whether `{f¹_i ⊕ ⋯ ⊕ f^d_i}` is a frame for the direct sum of the
/// spans.
///
/// Only components of the superset lying entirely in the trusted interior
/// enter: the labels of the blocks where every measure sequence survives
/// the edge policy (everything for [`EdgePolicy::Exact`]).
pub fn superframe_check_all(frames: &[FrameSnapshot], opts: &SuperframeOptions) -> Result<MultiSuperframeReport> {
    let first = frames.first().ok_or(Error::TooFew {
        what: "families",
        needed: 1,
        got: 0,
    })?;
    if frames.iter().any(|f| f.decomp() != first.decomp()) {
        return Err(Error::Mismatch(
            "superframe check needs identical decompositions".into(),
        ));
    }
    let exec = opts.analyze.exec;
    let measured = exec
        .map(frames, |f| measure_with_policy(f, &opts.analyze, opts.policy))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    for (k, (_, a)) in measured.iter().enumerate() {
        require_frame(a, k, opts.tol)?;
    }

    let stable = measured.iter().map(|(m, _)| m.stable_prefix()).min().unwrap_or(0);
    let bound = match stable {
        0 => 0,
        k => first.decomp().block_sizes()[k - 1],
    };
    let limit = (bound < first.len()).then_some(bound);
    let mut max_pair_norm = 0.0f64;
    for j in 0..frames.len() {
        for k in j + 1..frames.len() {
            let norm = projection_product_norm(&frames[j], &measured[j].1, &frames[k], &measured[k].1, limit, exec)?;
            max_pair_norm = max_pair_norm.max(norm);
        }
    }

    let mut sum = first.clone();
    for f in &frames[1..] {
        sum = direct_sum(&sum, f)?;
    }
    let asum = analyze(&sum, &opts.analyze)?;
    let (mut lo, mut hi, mut deficit) = (f64::INFINITY, 0.0f64, 0usize);
    for block in asum
        .blocks()
        .iter()
        .filter(|b| b.labels.last().is_some_and(|&l| l < bound))
    {
        let expected: usize = measured.iter().map(|(_, a)| rank_on(a, &block.labels)).sum();
        deficit += expected.saturating_sub(block.rank());
        if let (Some(&top), Some(&bottom)) = (block.eigenvalues.first(), block.eigenvalues.last()) {
            hi = hi.max(top);
            lo = lo.min(bottom);
        }
    }
    if !lo.is_finite() || deficit > 0 {
        lo = 0.0;
    }
    Ok(MultiSuperframeReport {
        is_superframe: lo > opts.tol,
        combined_bounds: (lo, hi),
        rank_deficit: deficit,
        max_pair_norm,
        interior_labels: bound,
    })
}

/// Two-family check, cross-validated against `‖P₁P₂‖ < 1`.
pub fn superframe_check(f1: &FrameSnapshot, f2: &FrameSnapshot, opts: &SuperframeOptions) -> Result<SuperframeReport> {
    let r = superframe_check_all(&[f1.clone(), f2.clone()], opts)?;
    Ok(SuperframeReport {
        is_superframe: r.is_superframe,
        p1p2_norm: r.max_pair_norm,
        combined_bounds: r.combined_bounds,
        rank_deficit: r.rank_deficit,
        consistent: r.is_superframe == (r.max_pair_norm < 1.0 - opts.tol),
        interior_labels: r.interior_labels,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    /// Profile of `a_n(F₁) + a_n(F₂)`.
    pub profile_sum: MeasureProfile,
    pub profile_direct_sum: MeasureProfile,
    /// `|a_n(F₁ ⊕ F₂) − a_n(F₁) − a_n(F₂)|` over the common stable blocks.
    pub residuals: Vec<f64>,
    /// Largest residual in the tail window.
    pub residual: f64,
    /// Largest residual over all common stable blocks.
    pub residual_all: f64,
    pub superframe: SuperframeReport,
}

/// Compares the measure of the superset with the sum of the measures.
pub fn superset_additivity_report(
    f1: &FrameSnapshot,
    f2: &FrameSnapshot,
    opts: &MeasureOptions,
) -> Result<AdditivityReport> {
    let sf_opts = SuperframeOptions {
        analyze: opts.analyze,
        policy: opts.policy,
        ..SuperframeOptions::default()
    };
    let superframe = superframe_check(f1, f2, &sf_opts)?;
    if !superframe.is_superframe {
        return Err(Error::NotSuperframe {
            p1p2_norm: superframe.p1p2_norm,
        });
    }
    let fg = direct_sum(f1, f2)?;
    let m1 = frame_measure(f1, opts)?;
    let m2 = frame_measure(f2, opts)?;
    let m12 = frame_measure(&fg, opts)?;
    let k = m1.stable_blocks.min(m2.stable_blocks).min(m12.stable_blocks);
    let sum: Vec<f64> = (0..k).map(|n| m1.sequence.a[n] + m2.sequence.a[n]).collect();
    let residuals: Vec<f64> = (0..k).map(|n| (m12.sequence.a[n] - sum[n]).abs()).collect();
    let profile_sum = crate::measure::profile(&sum, None, &opts.profile)?;
    let profile_direct_sum = crate::measure::profile(&m12.sequence.a[..k], None, &opts.profile)?;
    let (start, end) = profile_sum.tail_window;
    let residual = residuals[start - 1..end].iter().copied().fold(0.0, f64::max);
    Ok(AdditivityReport {
        residual,
        residual_all: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        profile_sum,
        profile_direct_sum,
        superframe,
    })
}

/// Rank of the projection onto `range(P₁ + P₂)` for Hermitian projections.
pub fn projection_join_rank(p1: &DMatrix<C64>, p2: &DMatrix<C64>, tol: f64) -> usize {
    let (eig, _) = hermitian_eigen(p1 + p2);
    eig.iter().filter(|&&l| l > tol).count()
}

/// Trace of a Hermitian projection rounded to the nearest integer.
pub fn projection_rank(p: &DMatrix<C64>) -> usize {
    p.trace().re.round().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::measure_sequence;
    use crate::models;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naturals(n: usize) -> Arc<IndexDecomposition> {
        Arc::new(IndexDecomposition::naturals(n))
    }

    fn identity(n: usize) -> OperatorSnapshot {
        OperatorSnapshot::new(DMatrix::identity(n, n), naturals(n), Some(QuasiMetric::Abs)).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_and_zero_bop() {
        let b = b_op(&identity(10)).unwrap();
        for (n, v) in b.re.values().iter().enumerate() {
            assert_eq!(*v, (n + 1) as f64);
        }
        assert!(b.im.values().iter().all(|v| *v == 0.0));
        assert!((b.norm - 1.0).abs() < 1e-12);
        let z = OperatorSnapshot::new(DMatrix::zeros(5, 5), naturals(5), None).unwrap();
        let b = b_op(&z).unwrap();
        assert!(b.re.values().iter().chain(b.im.values()).all(|v| *v == 0.0));
    }

    #[test]
    fn bop_certificate_within_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let op = OperatorSnapshot::new(random_matrix(&mut rng, 12), naturals(12), None).unwrap();
            let b = b_op(&op).unwrap();
            assert!(b.re.growth_certificate().unwrap() <= b.norm + 1e-12);
            assert!(b.im.growth_certificate().unwrap() <= b.norm + 1e-12);
        }
    }

    #[test]
    fn bop_of_gram_projection_is_b_of_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let decomp = naturals(9);
        let rows: Vec<Vec<C64>> = (0..9)
            .map(|_| (0..5).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0)).collect())
            .collect();
        let f = FrameSnapshot::from_dense(decomp.clone(), &rows).unwrap();
        let a = analyze(&f, &AnalyzeOptions::default()).unwrap();
        let op = OperatorSnapshot::gram_projection(&f, &a, None).unwrap();
        let b = b_op(&op).unwrap();
        let m = measure_sequence(&a, &decomp).unwrap();
        for (x, y) in b.re.values().iter().zip(&m.b) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!(b.im.values().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn diagonal_has_no_tails() {
        let op = identity(20);
        let r = nonexpansive_report(&op, &[0.0, 1.0, 2.0], Execution::Sequential).unwrap();
        assert!(r.row_tail.iter().chain(&r.col_tail).all(|t| *t == 0.0));
        assert!(r.interior_only);
        assert_eq!(r.excluded, vec![1, 1, 2]);
    }

    #[test]
    fn banded_tails_vanish_past_bandwidth() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let decomp = Arc::new(IndexDecomposition::integer_boxes(12));
        let op = models::random_banded_operator(&mut rng, decomp, 2).unwrap();
        let r = nonexpansive_report(&op, &[0.0, 1.0, 2.0, 3.0, 5.0], Execution::Sequential).unwrap();
        assert!(r.row_tail[0] > 0.0 && r.row_tail[1] > 0.0);
        assert_eq!(&r.row_tail[2..], &[0.0, 0.0, 0.0]);
        assert_eq!(&r.col_tail[2..], &[0.0, 0.0, 0.0]);
        assert_eq!(r.radius_for(0.0), Some(2.0));
        assert!(r.is_monotone());
    }

    #[test]
    fn tails_need_metric_and_interior() {
        let op = OperatorSnapshot::new(DMatrix::identity(3, 3), naturals(3), None).unwrap();
        assert!(nonexpansive_report(&op, &[1.0], Execution::Sequential).is_err());
        let op = identity(3);
        assert!(nonexpansive_report(&op, &[5.0], Execution::Sequential).is_err());
    }

    #[test]
    fn commuting_diagonals_are_tracial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d1 = DMatrix::from_fn(8, 8, |i, j| {
            if i == j {
                C64::new(rng.random(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let d2 = DMatrix::from_fn(8, 8, |i, j| {
            if i == j {
                C64::new(0.0, rng.random())
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let t1 = OperatorSnapshot::new(d1, naturals(8), None).unwrap();
        let t2 = OperatorSnapshot::new(d2, naturals(8), None).unwrap();
        let r = tracial_residual(&t1, &t2, Execution::Sequential).unwrap();
        assert!(r.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn banded_adjoint_residual_decays() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let decomp = Arc::new(IndexDecomposition::integer_boxes(64));
        let t = models::random_banded_operator(&mut rng, decomp, 3).unwrap();
        let r = tracial_residual(&t, &t.adjoint(), Execution::default()).unwrap();
        let v = r.values();
        // |tr_{I_n}[T, T*]| only sees the two ends of the interval.
        assert!(v[v.len() - 1] < 0.05);
        assert!(v[v.len() - 1] < v[7]);
    }

    #[test]
    fn superframe_of_orthogonal_blocks() {
        let d = IndexDecomposition::naturals(8);
        let even = models::parity_basis(&d, 0);
        let odd = models::parity_basis(&d, 1);
        let r = superframe_check(&even, &odd, &SuperframeOptions::exact()).unwrap();
        assert!(r.is_superframe && r.consistent);
        assert_eq!(r.p1p2_norm, 0.0);
        let rep = superset_additivity_report(&even, &odd, &MeasureOptions::exact()).unwrap();
        assert!(rep.residual_all <= 1e-9);
    }

    #[test]
    fn family_with_itself_is_not_superframe() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = models::random_riesz_basis(&mut rng, 6);
        let r = superframe_check(&f, &f, &SuperframeOptions::exact()).unwrap();
        assert!(!r.is_superframe && r.consistent);
        assert!((r.p1p2_norm - 1.0).abs() < 1e-9);
        assert_eq!(r.combined_bounds.0, 0.0);
        assert!(superset_additivity_report(&f, &f, &MeasureOptions::exact()).is_err());
    }

    #[test]
    fn zero_family_is_rejected() {
        let d = naturals(3);
        let z = FrameSnapshot::new(2, vec![crate::frame::FrameVector::zero(); 3], d).unwrap();
        let f = models::orthonormal_basis(IndexDecomposition::naturals(3));
        assert!(superframe_check(&z, &f, &SuperframeOptions::exact()).is_err());
    }

    #[test]
    fn nonadditive_pair_is_superframe() {
        let p = models::NonAdditivePair::new(models::NonAdditivePair::labels_for(12));
        let r = superframe_check(&p.f, &p.g, &SuperframeOptions::default()).unwrap();
        assert!(r.is_superframe && r.consistent, "{r:?}");
        assert!(r.p1p2_norm < 1.0);
    }

    fn random_projection(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DMatrix<C64> {
        let m = random_matrix(rng, n).columns(0, r).into_owned();
        let q = m.qr().q();
        &q * q.adjoint()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bop_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = naturals(7);
            let x = random_matrix(&mut rng, 7);
            let y = random_matrix(&mut rng, 7);
            let z = &x * C64::new(a, 0.0) + &y * C64::new(b, 0.0);
            let bx = b_op(&OperatorSnapshot::new(x, d.clone(), None).unwrap()).unwrap();
            let by = b_op(&OperatorSnapshot::new(y, d.clone(), None).unwrap()).unwrap();
            let bz = b_op(&OperatorSnapshot::new(z, d, None).unwrap()).unwrap();
            for n in 0..7 {
                let re = a * bx.re.values()[n] + b * by.re.values()[n];
                let im = a * bx.im.values()[n] + b * by.im.values()[n];
                prop_assert!((bz.re.values()[n] - re).abs() < 1e-12);
                prop_assert!((bz.im.values()[n] - im).abs() < 1e-12);
            }
        }

        #[test]
        fn tails_are_monotone(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = Arc::new(IndexDecomposition::integer_boxes(8));
            let op = OperatorSnapshot::new(random_matrix(&mut rng, d.len()), d, Some(QuasiMetric::Abs)).unwrap();
            let r = nonexpansive_report(&op, &[0.0, 0.5, 1.0, 2.0, 3.0, 4.0], Execution::Sequential).unwrap();
            prop_assert!(r.is_monotone());
        }

        #[test]
        fn join_rank_adds_when_angle_is_open(seed in any::<u64>(), r1 in 1usize..4, r2 in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p1 = random_projection(&mut rng, 8, r1);
            let p2 = random_projection(&mut rng, 8, r2);
            let norm = spectral_norm(&(&p1 * &p2));
            prop_assume!(norm < 1.0 - 1e-6);
            prop_assert_eq!(projection_join_rank(&p1, &p2, 1e-9), projection_rank(&p1) + projection_rank(&p2));
        }
    }
}
