//! Perpendicular-normal frames: families whose nonzero members are distinct
//! orthonormal vectors. They realize any integer frame compatible sequence
//! exactly and witness sums of sequences as supersets of frames.

use std::sync::Arc;

use serde::Serialize;

use crate::frame::{measure_of, AnalyzeOptions, EdgePolicy, FrameSnapshot, FrameVector};
use crate::index::IndexDecomposition;
use crate::seq::{self, RealSequence};
use crate::{Error, Result};

/// Slack used when flooring sequences produced by spectral sums.
pub const SNAP_TOL: f64 = 1e-9;

/// A perpendicular-normal frame with its support and basis assignment.
#[derive(Debug, Clone)]
pub struct PerpNormalFrame {
    snapshot: FrameSnapshot,
    /// Snapshot positions carrying a nonzero vector, increasing.
    support: Vec<usize>,
    /// Basis index of each support position.
    basis: Vec<usize>,
}

impl PerpNormalFrame {
    pub fn snapshot(&self) -> &FrameSnapshot {
        &self.snapshot
    }

    pub fn into_snapshot(self) -> FrameSnapshot {
        self.snapshot
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `(position, basis index)` pairs.
    pub fn basis_assignment(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.support.iter().copied().zip(self.basis.iter().copied())
    }

    /// All vectors are zero.
    pub fn is_degenerate(&self) -> bool {
        self.support.is_empty()
    }

    /// `b_n = |S ∩ I_n|`, counted exactly.
    pub fn b_counts(&self) -> Vec<i64> {
        let decomp = self.snapshot.decomp();
        let mut out = Vec::with_capacity(decomp.depth());
        let mut k = 0;
        for &size in decomp.block_sizes() {
            while k < self.support.len() && self.support[k] < size {
                k += 1;
            }
            out.push(k as i64);
        }
        out
    }

    pub fn b_sequence(&self) -> RealSequence {
        RealSequence::on(
            self.snapshot.decomp(),
            self.b_counts().into_iter().map(|v| v as f64).collect(),
        )
        .expect("aligned by construction")
    }
}

fn check_aligned(x: &RealSequence, decomp: &IndexDecomposition) -> Result<()> {
    if x.block_sizes() != decomp.block_sizes() {
        return Err(Error::Mismatch(
            "sequence and decomposition have different blocks".into(),
        ));
    }
    Ok(())
}

fn floor_counts(x: &RealSequence) -> Vec<i64> {
    x.values().iter().map(|v| v.floor() as i64).collect()
}

fn check_counts(counts: &[i64], decomp: &IndexDecomposition) -> Result<()> {
    let mut prev = (0i64, 0usize);
    for (n, (&c, &size)) in counts.iter().zip(decomp.block_sizes()).enumerate() {
        let d = c - prev.0;
        if d < 0 || d as usize > size - prev.1 {
            return Err(Error::NotFrameCompatible {
                block: n + 1,
                reason: format!("integer increment {d} outside [0, {}]", size - prev.1),
            });
        }
        prev = (c, size);
    }
    Ok(())
}

/// Places distinct basis vectors on the lowest-ordered labels of each block
/// increment so that `|S ∩ I_n| = counts[n]`. Ambient dimension is `|S|`
/// (at least 1), basis assigned in label order.
fn from_counts(decomp: Arc<IndexDecomposition>, counts: &[i64]) -> Result<PerpNormalFrame> {
    check_counts(counts, &decomp)?;
    let mut support = Vec::new();
    let mut prev = (0i64, 0usize);
    for (&c, &size) in counts.iter().zip(decomp.block_sizes()) {
        support.extend(prev.1..prev.1 + (c - prev.0) as usize);
        prev = (c, size);
    }
    let mut vectors = vec![FrameVector::zero(); decomp.len()];
    for (k, &pos) in support.iter().enumerate() {
        vectors[pos] = FrameVector::basis(k);
    }
    let basis = (0..support.len()).collect();
    let snapshot = FrameSnapshot::new(support.len().max(1), vectors, decomp)?;
    Ok(PerpNormalFrame {
        snapshot,
        support,
        basis,
    })
}

/// Perpendicular-normal frame `G^x` with `b(G^x) = ⌊x⌋`.
pub fn synth_perp_normal(x: &RealSequence, decomp: Arc<IndexDecomposition>) -> Result<PerpNormalFrame> {
    check_aligned(x, &decomp)?;
    seq::require_frame_compatible(x)?;
    from_counts(decomp, &floor_counts(x))
}

/// Result of [`split_superset`].
#[derive(Debug, Clone)]
pub struct SupersetSplit {
    /// `F^{x^k}`, all in the ambient space of `whole`.
    pub parts: Vec<PerpNormalFrame>,
    /// `F^z` with `b(F^z) = ⌊Σ x^k⌋`.
    pub whole: PerpNormalFrame,
    /// The integer sequences `b(F^{x^k})`.
    pub targets: Vec<Vec<i64>>,
}

/// The integer targets `x̃^k` of the superset split.
///
/// With budget `β = ⌊z⌋`, the first part follows
/// `x̃_1 = ⌊x_1⌋`, `x̃_i = min(x̃_{i−1} + β_i − β_{i−1}, ⌊x_i⌋)` and the
/// remainder `β − x̃` becomes the budget of the next part; the last part
/// takes the whole remaining budget.
pub fn split_targets(xs: &[RealSequence]) -> Result<Vec<Vec<i64>>> {
    let first = xs.first().ok_or(Error::TooFew {
        what: "sequences to split",
        needed: 1,
        got: 0,
    })?;
    let mut z = first.scale(0.0);
    for (k, x) in xs.iter().enumerate() {
        if let Some((block, reason)) = seq::frame_compatibility_violation(x, 0.0) {
            return Err(Error::NotFrameCompatible {
                block,
                reason: format!("part {}: {reason}", k + 1),
            });
        }
        z = z.add(x)?;
    }
    if let Some((block, reason)) = seq::frame_compatibility_violation(&z, 0.0) {
        return Err(Error::NotFrameCompatible {
            block,
            reason: format!("sum of parts: {reason}"),
        });
    }
    let mut budget = floor_counts(&z);
    let mut out = Vec::with_capacity(xs.len());
    for (k, x) in xs.iter().enumerate() {
        if k + 1 == xs.len() {
            out.push(budget.clone());
            break;
        }
        let fx = floor_counts(x);
        let mut t: Vec<i64> = Vec::with_capacity(fx.len());
        for i in 0..fx.len() {
            let v = if i == 0 {
                fx[0].min(budget[0])
            } else {
                (t[i - 1] + budget[i] - budget[i - 1]).min(fx[i])
            };
            t.push(v);
        }
        for (b, v) in budget.iter_mut().zip(&t) {
            *b -= v;
        }
        out.push(t);
    }
    Ok(out)
}

/// Splits `z = Σ x^k` into perpendicular-normal frames with
/// `F^z = ⊕_k F^{x^k}` (up to the isometry `f ↦ f ⊕ 0 ⊕ … ⊕ 0`, since each
/// label is carried by at most one part).
///
/// The support `T` of `F^z` is partitioned greedily in label order within
/// each block increment: the first `Δx̃¹` labels go to the first part, the
/// next `Δx̃²` to the second, and so on.
pub fn split_superset(xs: &[RealSequence], decomp: Arc<IndexDecomposition>) -> Result<SupersetSplit> {
    for x in xs {
        check_aligned(x, &decomp)?;
    }
    let targets = split_targets(xs)?;
    let total: Vec<i64> = (0..decomp.depth())
        .map(|i| targets.iter().map(|t| t[i]).sum())
        .collect();
    let whole = from_counts(decomp.clone(), &total)?;

    let mut owner = vec![usize::MAX; whole.support.len()];
    let mut cursor = 0;
    for i in 0..decomp.depth() {
        for (k, t) in targets.iter().enumerate() {
            let d = t[i] - if i == 0 { 0 } else { t[i - 1] };
            for _ in 0..d {
                owner[cursor] = k;
                cursor += 1;
            }
        }
    }
    debug_assert_eq!(cursor, whole.support.len());

    let dim = whole.snapshot.ambient_dim();
    let mut parts = Vec::with_capacity(xs.len());
    for k in 0..xs.len() {
        let mut vectors = vec![FrameVector::zero(); decomp.len()];
        let mut support = Vec::new();
        let mut basis = Vec::new();
        for (j, (&pos, &b)) in whole.support.iter().zip(&whole.basis).enumerate() {
            if owner[j] == k {
                vectors[pos] = whole.snapshot.vectors()[pos].clone();
                support.push(pos);
                basis.push(b);
            }
        }
        parts.push(PerpNormalFrame {
            snapshot: FrameSnapshot::new(dim, vectors, decomp.clone())?,
            support,
            basis,
        });
    }
    Ok(SupersetSplit { parts, whole, targets })
}

/// `⌊b(F)⌋` computed from the spectral diagonal, snapped onto integers
/// within [`SNAP_TOL`] first.
pub fn frame_b_floor(frame: &FrameSnapshot, opts: &AnalyzeOptions) -> Result<RealSequence> {
    let m = measure_of(frame, opts, EdgePolicy::Exact)?;
    Ok(seq::floor_seq(&seq::snapped(&m.b_sequence(), SNAP_TOL)))
}

fn lattice_witness(
    f1: &FrameSnapshot,
    f2: &FrameSnapshot,
    opts: &AnalyzeOptions,
    op: fn(&RealSequence, &RealSequence) -> Result<RealSequence>,
) -> Result<PerpNormalFrame> {
    if f1.decomp() != f2.decomp() {
        return Err(Error::Mismatch("frames have different decompositions".into()));
    }
    let b1 = frame_b_floor(f1, opts)?;
    let b2 = frame_b_floor(f2, opts)?;
    from_counts(f1.decomp().clone(), &floor_counts(&op(&b1, &b2)?))
}

/// A frame `F∧G` with `b(F∧G) ≈ b(F)∧b(G)`.
pub fn frame_wedge(f1: &FrameSnapshot, f2: &FrameSnapshot, opts: &AnalyzeOptions) -> Result<PerpNormalFrame> {
    lattice_witness(f1, f2, opts, seq::wedge)
}

/// A frame `F∨G` with `b(F∨G) ≈ b(F)∨b(G)`.
pub fn frame_vee(f1: &FrameSnapshot, f2: &FrameSnapshot, opts: &AnalyzeOptions) -> Result<PerpNormalFrame> {
    lattice_witness(f1, f2, opts, seq::vee)
}

/// Per-block check of the bound `⌊x_n⌋ − 1 ≤ x̃_n ≤ ⌊x_n⌋`.
#[derive(Debug, Clone, Serialize)]
pub struct SplitBoundReport {
    pub part: usize,
    pub violations: Vec<usize>,
}

pub fn split_bound_report(xs: &[RealSequence], targets: &[Vec<i64>]) -> Vec<SplitBoundReport> {
    xs.iter()
        .zip(targets)
        .enumerate()
        .map(|(k, (x, t))| SplitBoundReport {
            part: k,
            violations: floor_counts(x)
                .iter()
                .zip(t)
                .enumerate()
                .filter(|(_, (f, v))| **v < **f - 1 || **v > **f)
                .map(|(n, _)| n + 1)
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{analyze, direct_sum, measure_sequence};
    use crate::seq::{compare, random_frame_compatible, CompareOptions, ComparisonKind};
    use crate::C64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nat(d: usize) -> Arc<IndexDecomposition> {
        Arc::new(IndexDecomposition::naturals(d))
    }

    fn spectral_b(f: &FrameSnapshot) -> Vec<f64> {
        match analyze(f, &AnalyzeOptions::default()) {
            Ok(a) => measure_sequence(&a, f.decomp()).unwrap().b,
            Err(Error::EmptySpan) => vec![0.0; f.decomp().depth()],
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn identity_sequence_gives_basis() {
        let d = nat(6);
        let x = RealSequence::identity(d.block_sizes().to_vec()).unwrap();
        let g = synth_perp_normal(&x, d).unwrap();
        assert_eq!(g.support(), &[0, 1, 2, 3, 4, 5]);
        let a = analyze(g.snapshot(), &AnalyzeOptions::default()).unwrap();
        assert_eq!(a.frame_bounds(), (1.0, 1.0));
        assert_eq!(g.b_sequence(), x);
    }

    #[test]
    fn fractional_sequence_support() {
        let d = nat(3);
        let x = RealSequence::on(&d, vec![0.5, 1.5, 2.5]).unwrap();
        let g = synth_perp_normal(&x, d).unwrap();
        assert_eq!(g.support(), &[1, 2]);
        assert_eq!(g.b_counts(), vec![0, 1, 2]);
        assert_eq!(spectral_b(g.snapshot()), vec![0.0, 1.0, 2.0]);
        assert_eq!(g.basis_assignment().collect::<Vec<_>>(), vec![(1, 0), (2, 1)]);
    }

    #[test]
    fn zero_sequence_is_degenerate() {
        let d = nat(4);
        let g = synth_perp_normal(&RealSequence::on(&d, vec![0.0; 4]).unwrap(), d).unwrap();
        assert!(g.is_degenerate());
        assert_eq!(g.b_counts(), vec![0; 4]);
        assert_eq!(g.snapshot().ambient_dim(), 1);
    }

    #[test]
    fn incompatible_input_is_rejected() {
        let d = nat(3);
        let x = RealSequence::on(&d, vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            synth_perp_normal(&x, d),
            Err(Error::NotFrameCompatible { block: 2, .. })
        ));
    }

    #[test]
    fn split_halves_of_even_blocks() {
        let sizes: Vec<usize> = (1..=8).map(|n| 2 * n).collect();
        let d = Arc::new(IndexDecomposition::naturals_with_blocks(sizes.clone()).unwrap());
        let half = RealSequence::identity(sizes).unwrap().scale(0.5);
        let s = split_superset(&[half.clone(), half.clone()], d).unwrap();
        assert_eq!(s.whole.support().len(), 16);
        let expect: Vec<i64> = (1..=8).collect();
        assert_eq!(s.targets, vec![expect.clone(), expect]);
        // Greedy order: within each increment of two labels, the first goes
        // to the first part.
        assert_eq!(s.parts[0].support(), &[0, 2, 4, 6, 8, 10, 12, 14]);
    }

    #[test]
    fn split_with_zero_part() {
        let d = nat(7);
        let i = RealSequence::identity(d.block_sizes().to_vec()).unwrap();
        let s = split_superset(&[i.clone(), i.scale(0.0)], d).unwrap();
        assert_eq!(s.parts[0].support(), s.whole.support());
        assert!(s.parts[1].is_degenerate());
    }

    #[test]
    fn split_half_and_third() {
        let d = nat(60);
        let sizes = d.block_sizes().to_vec();
        let x = RealSequence::from_fn(sizes.clone(), |n, _| n as f64 / 2.0).unwrap();
        let y = RealSequence::from_fn(sizes, |n, _| n as f64 / 3.0).unwrap();
        let s = split_superset(&[x.clone(), y.clone()], d).unwrap();
        for n in 1..=60i64 {
            assert_eq!(s.whole.b_counts()[n as usize - 1], (5 * n) / 6);
        }
        let fx = floor_counts(&x);
        let fy = floor_counts(&y);
        for i in 0..60 {
            assert!(fx[i] - 1 <= s.targets[0][i] && s.targets[0][i] <= fx[i]);
            assert!(fy[i] <= s.targets[1][i] && s.targets[1][i] <= fy[i] + 1);
            assert_eq!(s.targets[0][i] + s.targets[1][i], s.whole.b_counts()[i]);
        }
        assert_eq!(s.parts[0].b_counts(), s.targets[0]);
        assert_eq!(s.parts[1].b_counts(), s.targets[1]);
    }

    #[test]
    fn split_direct_sum_reproduces_whole_gram_diagonal() {
        let d = nat(12);
        let sizes = d.block_sizes().to_vec();
        let x = RealSequence::from_fn(sizes.clone(), |n, _| 0.4 * n as f64).unwrap();
        let y = RealSequence::from_fn(sizes, |n, _| 0.35 * n as f64).unwrap();
        let s = split_superset(&[x, y], d).unwrap();
        let sum = direct_sum(s.parts[0].snapshot(), s.parts[1].snapshot()).unwrap();
        let g_sum = sum.gram();
        let g_whole = s.whole.snapshot().gram();
        assert_eq!(g_sum, g_whole);
        assert_eq!(spectral_b(&sum), spectral_b(s.whole.snapshot()));
    }

    #[test]
    fn split_three_parts_sums_exactly() {
        let d = nat(30);
        let sizes = d.block_sizes().to_vec();
        let xs: Vec<RealSequence> = [0.3, 0.25, 0.4]
            .iter()
            .map(|&c| RealSequence::from_fn(sizes.clone(), |n, _| c * n as f64).unwrap())
            .collect();
        let s = split_superset(&xs, d).unwrap();
        for i in 0..30 {
            let total: i64 = s.targets.iter().map(|t| t[i]).sum();
            assert_eq!(total, s.whole.b_counts()[i]);
        }
        for (p, t) in s.parts.iter().zip(&s.targets) {
            assert_eq!(&p.b_counts(), t);
        }
    }

    #[test]
    fn split_rejects_incompatible_sum() {
        let d = nat(3);
        let i = RealSequence::identity(d.block_sizes().to_vec()).unwrap();
        assert!(split_superset(&[i.clone(), i], d).is_err());
    }

    #[test]
    fn lattice_witnesses() {
        let d = nat(10);
        let onb = synth_perp_normal(&RealSequence::identity(d.block_sizes().to_vec()).unwrap(), d.clone()).unwrap();
        let half = synth_perp_normal(
            &RealSequence::from_fn(d.block_sizes().to_vec(), |n, _| (n / 2) as f64).unwrap(),
            d,
        )
        .unwrap();
        let opts = AnalyzeOptions::default();
        let w = frame_wedge(onb.snapshot(), half.snapshot(), &opts).unwrap();
        let v = frame_vee(onb.snapshot(), half.snapshot(), &opts).unwrap();
        assert_eq!(w.b_counts(), half.b_counts());
        assert_eq!(v.b_counts(), onb.b_counts());
        let ww = frame_wedge(half.snapshot(), half.snapshot(), &opts).unwrap();
        assert_eq!(ww.b_counts(), half.b_counts());
    }

    fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..5, 1..25).prop_map(|gs| {
            let mut acc = 0;
            gs.iter()
                .enumerate()
                .map(|(i, g)| {
                    acc += if i == 0 { g + 1 } else { *g };
                    acc
                })
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn synthesized_b_is_floor(sizes in sizes_strategy(), seed in any::<u64>()) {
            let d = Arc::new(IndexDecomposition::naturals_with_blocks(sizes.clone()).unwrap());
            let x = random_frame_compatible(&mut ChaCha8Rng::seed_from_u64(seed), sizes).unwrap();
            let g = synth_perp_normal(&x, d).unwrap();
            let fl = seq::floor_seq(&x);
            prop_assert_eq!(g.b_sequence(), fl.clone());
            prop_assert_eq!(spectral_b(g.snapshot()), fl.values().to_vec());
            if !g.is_degenerate() {
                let a = analyze(g.snapshot(), &AnalyzeOptions::default()).unwrap();
                prop_assert_eq!(a.frame_bounds(), (1.0, 1.0));
            }
        }

        #[test]
        fn split_parts_sum_to_floor_of_total(sizes in sizes_strategy(), seed in any::<u64>()) {
            let d = Arc::new(IndexDecomposition::naturals_with_blocks(sizes.clone()).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = random_frame_compatible(&mut rng, sizes).unwrap();
            let t: f64 = rng.random();
            let x = z.scale(t);
            let y = z.sub(&x).unwrap();
            prop_assume!(seq::is_frame_compatible(&y) && seq::is_frame_compatible(&x.add(&y).unwrap()));
            let s = split_superset(&[x.clone(), y.clone()], d).unwrap();
            let fz = floor_counts(&x.add(&y).unwrap());
            for (i, f) in fz.iter().enumerate() {
                prop_assert_eq!(s.targets[0][i] + s.targets[1][i], *f);
            }
            prop_assert!(split_bound_report(&[x], &s.targets[..1])[0].violations.is_empty());
        }

        #[test]
        fn round_trip_is_equivalent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = 40;
            let dim = rng.random_range(3..30);
            let rows: Vec<Vec<C64>> = (0..count)
                .map(|_| (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
                .collect();
            let f = FrameSnapshot::from_dense(nat(count), &rows).unwrap();
            let b = measure_of(&f, &AnalyzeOptions::default(), EdgePolicy::Exact).unwrap().b_sequence();
            let floor = frame_b_floor(&f, &AnalyzeOptions::default()).unwrap();
            let g = synth_perp_normal(&floor, f.decomp().clone()).unwrap();
            prop_assert_eq!(g.b_sequence(), floor);
            // |b_n − ⌊b_n⌋| / |I_n| < 1/|I_n|; over the last half the gaps are below 1/20.
            let v = compare(&b, &g.b_sequence(), CompareOptions { tol: 1.0 / 20.0, tail_fraction: 0.5 }).unwrap();
            prop_assert_eq!(v.kind, ComparisonKind::Equivalent);
        }
    }
}
