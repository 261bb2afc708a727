//! Measure profiles: the finite stand-in for every ultrafilter limit of a
//! normalized block sequence. Each such limit is an accumulation point of
//! the sequence, and liminf and limsup are attained, so a profile reports
//! the `[liminf, limsup]` envelope of a tail window together with the
//! clusters the tail accumulates at.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::frame::{analyze, measure_with_policy, AnalyzeOptions, EdgePolicy, FrameSnapshot, MeasureSequence};
use crate::index::Label;
use crate::linalg::hermitian_eigen;
use crate::seq::{compare, CompareOptions, ComparisonVerdict, RealSequence};
use crate::{Error, Result, C64};

pub const DEFAULT_CLUSTER_EPS: f64 = 1e-2;
pub const MIN_WINDOW: usize = 4;

/// Which blocks form the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailWindow {
    /// The last `ceil(fraction · len)` blocks, at least [`MIN_WINDOW`].
    LastFraction(f64),
    /// Blocks `start..=end`, 1-based.
    Blocks { start: usize, end: usize },
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow::LastFraction(0.25)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub window: TailWindow,
    pub cluster_eps: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            window: TailWindow::default(),
            cluster_eps: DEFAULT_CLUSTER_EPS,
        }
    }
}

/// Accumulation cluster of the tail: mean value and fraction of the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: f64,
    pub weight: f64,
}

impl Serialize for Cluster {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.center, self.weight).serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureProfile {
    pub liminf: f64,
    pub limsup: f64,
    pub clusters: Vec<Cluster>,
    pub converged: bool,
    /// 1-based inclusive block range.
    pub tail_window: (usize, usize),
    /// Digits agreed between truncation depths, per window block.
    pub stability: Vec<f64>,
    pub cluster_eps: f64,
}

impl MeasureProfile {
    /// Applies `v ↦ c·v` for `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.liminf *= c;
        out.limsup *= c;
        for cl in &mut out.clusters {
            cl.center *= c;
        }
        out
    }

    /// Midpoint of the envelope when converged.
    pub fn limit(&self) -> Option<f64> {
        self.converged.then_some(0.5 * (self.liminf + self.limsup))
    }
}

fn window_range(len: usize, window: TailWindow) -> Result<(usize, usize)> {
    let (start, end) = match window {
        TailWindow::LastFraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidArgument(format!("window fraction {f} outside (0, 1]")));
            }
            let w = ((len as f64 * f).ceil() as usize).max(MIN_WINDOW).min(len);
            (len - w, len)
        }
        TailWindow::Blocks { start, end } => {
            if start == 0 || end < start || end > len {
                return Err(Error::InvalidArgument(format!(
                    "window {start}..={end} outside 1..={len}"
                )));
            }
            (start - 1, end)
        }
    };
    if end - start < MIN_WINDOW {
        return Err(Error::WindowTooShort {
            needed: MIN_WINDOW,
            available: end - start,
        });
    }
    Ok((start, end))
}

fn oscillation(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Single-linkage groups of the sorted values at resolution `eps`.
fn clusters(values: &[f64], eps: f64) -> Vec<Cluster> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > eps {
            let group = &sorted[start..i];
            out.push(Cluster {
                center: group.iter().sum::<f64>() / group.len() as f64,
                weight: group.len() as f64 / total,
            });
            start = i;
        }
    }
    out
}

/// Profile of a normalized sequence `v_n` (for instance `a_n(F)`).
///
/// Converged means the window spread is at most `cluster_eps` and the
/// oscillation over the last quarter of the window does not exceed that of
/// the first quarter. Oscillation below `cluster_eps / 100` counts as
/// settled either way.
pub fn profile(values: &[f64], stability: Option<&[f64]>, opts: &ProfileOptions) -> Result<MeasureProfile> {
    if !(opts.cluster_eps > 0.0) {
        return Err(Error::InvalidArgument("cluster resolution must be positive".into()));
    }
    let (start, end) = window_range(values.len(), opts.window)?;
    let w = &values[start..end];
    let liminf = w.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let q = (w.len() / 4).max(1);
    let settled = opts.cluster_eps / 100.0;
    let shrinking = oscillation(&w[w.len() - q..]) <= oscillation(&w[..q]).max(settled);
    let converged = limsup - liminf <= opts.cluster_eps && shrinking;
    Ok(MeasureProfile {
        liminf,
        limsup,
        clusters: clusters(w, opts.cluster_eps),
        converged,
        tail_window: (start + 1, end),
        stability: match stability {
            Some(s) => s[start..end].to_vec(),
            None => vec![16.0; end - start],
        },
        cluster_eps: opts.cluster_eps,
    })
}

/// Profile of `x_n / |I_n|`.
pub fn profile_sequence(x: &RealSequence, opts: &ProfileOptions) -> Result<MeasureProfile> {
    profile(&x.normalized(), None, opts)
}

/// Profile of `a_n(F)` over the stable prefix of a measure sequence.
pub fn profile_measure(m: &MeasureSequence, opts: &ProfileOptions) -> Result<MeasureProfile> {
    let k = m.stable_prefix();
    profile(&m.a[..k], Some(&m.agreement_digits[..k]), opts)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureOptions {
    pub analyze: AnalyzeOptions,
    pub policy: EdgePolicy,
    pub profile: ProfileOptions,
}

impl MeasureOptions {
    /// Options for finite models where the snapshot is the whole frame.
    pub fn exact() -> Self {
        Self {
            policy: EdgePolicy::Exact,
            ..Self::default()
        }
    }
}

/// Profile of a frame together with the sequence it was computed from.
#[derive(Debug, Clone, Serialize)]
pub struct FrameMeasure {
    pub profile: MeasureProfile,
    pub sequence: MeasureSequence,
    pub stable_blocks: usize,
    pub warnings: Vec<String>,
}

/// Profile of `a(F)` under the edge policy: only the stable prefix enters.
pub fn frame_measure(frame: &FrameSnapshot, opts: &MeasureOptions) -> Result<FrameMeasure> {
    let (sequence, analysis) = measure_with_policy(frame, &opts.analyze, opts.policy)?;
    let profile = profile_measure(&sequence, &opts.profile)?;
    Ok(FrameMeasure {
        profile,
        stable_blocks: sequence.stable_prefix(),
        sequence,
        warnings: analysis.warnings().to_vec(),
    })
}

/// `F₁ ≈ F₂` / `F₁ ≦ F₂` through the windowed comparison of `b(F₁)` and
/// `b(F₂)` over the blocks stable for both.
pub fn frames_compare(
    f1: &FrameSnapshot,
    f2: &FrameSnapshot,
    opts: &MeasureOptions,
    cmp: CompareOptions,
) -> Result<ComparisonVerdict> {
    if f1.decomp() != f2.decomp() {
        return Err(Error::Mismatch("frames have different decompositions".into()));
    }
    let (m1, _) = measure_with_policy(f1, &opts.analyze, opts.policy)?;
    let (m2, _) = measure_with_policy(f2, &opts.analyze, opts.policy)?;
    let k = m1.stable_prefix().min(m2.stable_prefix());
    compare(&m1.prefix(k).b_sequence(), &m2.prefix(k).b_sequence(), cmp)
}

/// Redundancy interval `[1/limsup, 1/liminf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Redundancy {
    pub lower: f64,
    pub upper: f64,
    /// `liminf = 0`: the upper end is infinite.
    pub unbounded: bool,
}

pub fn redundancy(p: &MeasureProfile) -> Result<Redundancy> {
    if p.liminf < 0.0 {
        return Err(Error::InvalidArgument("profile has a negative liminf".into()));
    }
    let inv = |v: f64| if v > 0.0 { 1.0 / v } else { f64::INFINITY };
    Ok(Redundancy {
        lower: inv(p.limsup),
        upper: inv(p.liminf),
        unbounded: p.liminf == 0.0,
    })
}

/// Outcome of [`excess_probe`].
#[derive(Debug, Clone, Serialize)]
pub struct ExcessReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub removed_labels: Vec<Label>,
    pub removed_positions: Vec<usize>,
    pub original_bounds: (f64, f64),
    pub remaining_bounds: (f64, f64),
    /// `A (1 − ε − α)`.
    pub required_lower_bound: f64,
    pub claim_satisfied: bool,
    /// The measure is one: nothing is probed.
    pub trivial: bool,
}

pub const EXCESS_TOL: f64 = 1e-9;

/// Removes labels with `⟨f_i, f̃_i⟩ ≤ α` while keeping a frame for the same
/// span with lower bound at least `A (1 − ε − α)`.
///
/// Candidates are visited in label order; a candidate is dropped when its
/// connected component keeps its rank and its smallest nonzero eigenvalue
/// stays above the required bound. Zero vectors are always removable. The
/// remaining family is re-analyzed from scratch to decide `claim_satisfied`.
pub fn excess_probe(frame: &FrameSnapshot, alpha: f64, epsilon: f64, opts: &MeasureOptions) -> Result<ExcessReport> {
    if !(alpha > 0.0 && alpha < 1.0 && epsilon > 0.0 && epsilon < 1.0 - alpha) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < α < 1 and 0 < ε < 1 − α, got α = {alpha}, ε = {epsilon}"
        )));
    }
    let measured = frame_measure(frame, opts)?;
    let analysis = analyze(frame, &opts.analyze)?;
    let original_bounds = analysis.frame_bounds();
    let required = original_bounds.0 * (1.0 - epsilon - alpha);
    let mut report = ExcessReport {
        alpha,
        epsilon,
        removed_labels: Vec::new(),
        removed_positions: Vec::new(),
        original_bounds,
        remaining_bounds: original_bounds,
        required_lower_bound: required,
        claim_satisfied: true,
        trivial: false,
    };
    if measured.profile.limsup >= 1.0 - EXCESS_TOL {
        report.trivial = true;
        return Ok(report);
    }

    let diag = analysis.diag_products();
    let threshold = analysis.threshold();
    let vecs = frame.vectors();
    let mut removed = BTreeSet::new();
    let mut kept: Vec<Vec<usize>> = analysis.blocks().iter().map(|b| b.labels.clone()).collect();
    for i in 0..frame.len() {
        if diag[i] > alpha {
            continue;
        }
        let Some(b) = analysis.block_of(i) else {
            if vecs[i].is_zero() {
                removed.insert(i);
            }
            continue;
        };
        let rank = analysis.blocks()[b].rank();
        let trial: Vec<usize> = kept[b].iter().copied().filter(|&j| j != i).collect();
        if trial.is_empty() {
            continue;
        }
        let k = trial.len();
        let g = nalgebra::DMatrix::<C64>::from_fn(k, k, |r, c| vecs[trial[c]].inner(&vecs[trial[r]]));
        let (vals, _) = hermitian_eigen(g);
        let nonzero: Vec<f64> = vals.into_iter().filter(|&l| l > threshold).collect();
        if nonzero.len() == rank && nonzero.last().is_some_and(|&l| l >= required) {
            kept[b] = trial;
            removed.insert(i);
        }
    }

    let keep_positions: Vec<usize> = (0..frame.len()).filter(|i| !removed.contains(i)).collect();
    if keep_positions.iter().all(|&i| vecs[i].is_zero()) {
        return Err(Error::RemovalEmptiesSpan);
    }
    let rest = crate::frame::FrameSnapshot::new(
        frame.ambient_dim(),
        keep_positions.iter().map(|&i| vecs[i].clone()).collect(),
        std::sync::Arc::new(crate::index::IndexDecomposition::naturals(keep_positions.len())),
    )?;
    let rest_analysis = analyze(&rest, &opts.analyze)?;
    report.remaining_bounds = rest_analysis.frame_bounds();
    report.claim_satisfied =
        rest_analysis.span_dim() == analysis.span_dim() && report.remaining_bounds.0 >= required - EXCESS_TOL;
    report.removed_labels = removed.iter().map(|&i| frame.decomp().label(i).clone()).collect();
    report.removed_positions = removed.into_iter().collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{direct_sum, FrameVector};
    use crate::index::IndexDecomposition;
    use crate::models;
    use crate::seq::{random_convergent_compatible, vee, wedge, ComparisonKind};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn constant_sequence() {
        let p = profile(&[1.0; 20], None, &ProfileOptions::default()).unwrap();
        assert_eq!((p.liminf, p.limsup), (1.0, 1.0));
        assert_eq!(
            p.clusters,
            vec![Cluster {
                center: 1.0,
                weight: 1.0
            }]
        );
        assert!(p.converged);
        assert_eq!(p.tail_window, (16, 20));
    }

    #[test]
    fn two_cluster_sequence() {
        // x̃_1 = 0, x̃_{2n} = x̃_{2n−1} + |I_{2n} ∖ I_{2n−1}|, x̃_{2n+1} = x̃_{2n},
        // |I_n| = 2ⁿ.
        let sizes: Vec<usize> = (1..=20).map(|n| 1usize << n).collect();
        let mut x = vec![0.0; 20];
        for n in 2..=20 {
            x[n - 1] = if n % 2 == 0 {
                x[n - 2] + (sizes[n - 1] - sizes[n - 2]) as f64
            } else {
                x[n - 2]
            };
        }
        for n in 1..=10 {
            assert_eq!(x[2 * n - 1], 2.0 / 3.0 * (4f64.powi(n as i32) - 1.0));
        }
        let seq = RealSequence::new(x, sizes).unwrap();
        let p = profile_sequence(&seq, &ProfileOptions::default()).unwrap();
        assert!((p.liminf - 1.0 / 3.0).abs() < 1e-3);
        assert!((p.limsup - 2.0 / 3.0).abs() < 1e-3);
        assert_eq!(p.clusters.len(), 2);
        assert!(!p.converged);
    }

    #[test]
    fn damped_alternation_converges() {
        let v: Vec<f64> = (1..=1000)
            .map(|n| 0.5 + if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64)
            .collect();
        let p = profile(&v, None, &ProfileOptions::default()).unwrap();
        assert!(p.converged);
        assert_eq!(p.clusters.len(), 1);
        assert!((p.clusters[0].center - 0.5).abs() < 1e-3);
    }

    #[test]
    fn short_window_is_an_error() {
        assert!(matches!(
            profile(&[1.0; 3], None, &ProfileOptions::default()),
            Err(Error::WindowTooShort { .. })
        ));
        let opts = ProfileOptions {
            window: TailWindow::Blocks { start: 2, end: 4 },
            ..Default::default()
        };
        assert!(profile(&[1.0; 10], None, &opts).is_err());
    }

    #[test]
    fn redundancy_intervals() {
        let mut p = profile(&[1.0; 8], None, &ProfileOptions::default()).unwrap();
        assert_eq!(
            redundancy(&p).unwrap(),
            Redundancy {
                lower: 1.0,
                upper: 1.0,
                unbounded: false
            }
        );
        p.liminf = 1.0 / 3.0;
        p.limsup = 2.0 / 3.0;
        let r = redundancy(&p).unwrap();
        assert!((r.lower - 1.5).abs() < 1e-12 && (r.upper - 3.0).abs() < 1e-12);
        p.liminf = 0.0;
        assert!(redundancy(&p).unwrap().unbounded);
        p.limsup = 0.25;
        assert_eq!(redundancy(&p).unwrap().lower, 4.0);
    }

    #[test]
    fn frame_profiles() {
        let opts = MeasureOptions::default();
        let onb = models::orthonormal_basis(IndexDecomposition::naturals(40));
        let m = frame_measure(&onb, &opts).unwrap();
        assert!(m.profile.converged && m.profile.liminf == 1.0 && m.profile.limsup == 1.0);
        let double = models::interleaved_double_basis(40);
        let m = frame_measure(&double, &MeasureOptions::exact()).unwrap();
        assert!((m.profile.liminf - 0.5).abs() < 1e-12 && (m.profile.limsup - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frame_comparisons() {
        let d = Arc::new(IndexDecomposition::naturals(40));
        let onb = models::orthonormal_basis((*d).clone());
        let phases: Vec<C64> = (0..40).map(|i| C64::from_polar(1.0, 0.3 * i as f64)).collect();
        let id: Vec<usize> = (0..40).collect();
        let twisted = crate::frame::apply_phases_and_permutation(&onb, &phases, &id).unwrap();
        let opts = MeasureOptions::exact();
        let cmp = CompareOptions::default();
        assert_eq!(
            frames_compare(&onb, &twisted, &opts, cmp).unwrap().kind,
            ComparisonKind::Equivalent
        );
        let half = FrameSnapshot::new(
            20,
            (0..40)
                .map(|i| {
                    if i % 2 == 0 {
                        FrameVector::basis(i / 2)
                    } else {
                        FrameVector::zero()
                    }
                })
                .collect(),
            onb.decomp().clone(),
        )
        .unwrap();
        assert_eq!(
            frames_compare(&half, &onb, &opts, cmp).unwrap().kind,
            ComparisonKind::LeftDominated
        );
    }

    #[test]
    fn excess_on_basis_is_trivial() {
        let onb = models::orthonormal_basis(IndexDecomposition::naturals(16));
        let r = excess_probe(&onb, 0.6, 0.1, &MeasureOptions::default()).unwrap();
        assert!(r.trivial && r.removed_labels.is_empty());
    }

    #[test]
    fn excess_on_double_basis_removes_one_copy() {
        let f = models::interleaved_double_basis(20);
        let r = excess_probe(&f, 0.6, 0.1, &MeasureOptions::exact()).unwrap();
        assert!(!r.trivial);
        assert_eq!(r.removed_positions, (0..20).map(|k| 2 * k).collect::<Vec<_>>());
        assert!((r.original_bounds.0 - 2.0).abs() < 1e-12);
        assert!((r.remaining_bounds.0 - 1.0).abs() < 1e-12);
        assert!(r.claim_satisfied);
    }

    #[test]
    fn excess_on_zero_padded_basis_removes_zeros() {
        let pair = models::NonAdditivePair::new(8);
        let r = excess_probe(&pair.f, 0.1, 0.1, &MeasureOptions::exact()).unwrap();
        let odd: Vec<Label> = (1..=pair.f.len() as i64)
            .filter(|i| i % 2 == 1)
            .map(Label::Int)
            .collect();
        assert_eq!(r.removed_labels, odd);
        assert_eq!(r.remaining_bounds, r.original_bounds);
        assert!(r.claim_satisfied);
    }

    #[test]
    fn excess_rejects_bad_parameters() {
        let f = models::interleaved_double_basis(4);
        assert!(excess_probe(&f, 0.6, 0.5, &MeasureOptions::exact()).is_err());
    }

    #[test]
    fn orthogonal_superset_profiles_add() {
        let d = IndexDecomposition::naturals(400);
        let even = models::parity_basis(&d, 0);
        let odd = models::parity_basis(&d, 1);
        let opts = MeasureOptions::exact();
        let pe = frame_measure(&even, &opts).unwrap().profile;
        let po = frame_measure(&odd, &opts).unwrap().profile;
        let ps = frame_measure(&direct_sum(&even, &odd).unwrap(), &opts).unwrap().profile;
        assert!(pe.converged && po.converged && ps.converged);
        assert!((ps.limit().unwrap() - pe.limit().unwrap() - po.limit().unwrap()).abs() <= 2.0 * 1e-2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn wedge_and_vee_take_min_and_max(seed in any::<u64>(), lx in 0.0f64..=1.0, ly in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<usize> = (1..=400).map(|n| 50 * n).collect();
            let x = random_convergent_compatible(&mut rng, sizes.clone(), lx).unwrap();
            let y = random_convergent_compatible(&mut rng, sizes, ly).unwrap();
            let opts = ProfileOptions::default();
            let pw = profile_sequence(&wedge(&x, &y).unwrap(), &opts).unwrap();
            let pv = profile_sequence(&vee(&x, &y).unwrap(), &opts).unwrap();
            let px = profile_sequence(&x, &opts).unwrap();
            let py = profile_sequence(&y, &opts).unwrap();
            prop_assert!(px.converged && py.converged);
            let tol = 1e-4;
            prop_assert!((pw.limsup - px.limsup.min(py.limsup)).abs() < tol);
            prop_assert!((pv.liminf - px.liminf.max(py.liminf)).abs() < tol);
            prop_assert!(pw.limsup <= px.limsup + tol && pw.limsup <= py.limsup + tol);
            prop_assert!(pv.liminf >= px.liminf - tol && pv.liminf >= py.liminf - tol);
        }

        #[test]
        fn scaling_commutes_with_profile(seed in any::<u64>(), c in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_convergent_compatible(&mut rng, (1..=64).collect(), 0.4).unwrap();
            let opts = ProfileOptions::default();
            let p = profile_sequence(&x, &opts).unwrap().scaled(c);
            let q = profile_sequence(&x.scale(c), &opts).unwrap();
            prop_assert!((p.liminf - q.liminf).abs() <= 1e-12 * (1.0 + c));
            prop_assert!((p.limsup - q.limsup).abs() <= 1e-12 * (1.0 + c));
        }

        #[test]
        fn domination_orders_profiles(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<usize> = (1..=100).map(|n| 10 * n).collect();
            let x = random_convergent_compatible(&mut rng, sizes.clone(), 0.3).unwrap();
            let y = random_convergent_compatible(&mut rng, sizes, 0.6).unwrap();
            let v = compare(&x, &y, CompareOptions::default()).unwrap();
            prop_assert_eq!(v.kind, ComparisonKind::LeftDominated);
            let opts = ProfileOptions::default();
            let (px, py) = (profile_sequence(&x, &opts).unwrap(), profile_sequence(&y, &opts).unwrap());
            prop_assert!(px.limsup <= py.limsup + 1e-3 && px.liminf <= py.liminf + 1e-3);
        }
    }

    #[test]
    fn profile_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = crate::seq::random_frame_compatible(&mut rng, (1..=80).collect()).unwrap();
            let p = profile_sequence(&x, &ProfileOptions::default()).unwrap();
            assert!(0.0 <= p.liminf && p.liminf <= p.limsup && p.limsup <= 1.0);
            for c in &p.clusters {
                assert!(p.liminf <= c.center && c.center <= p.limsup);
            }
            if p.converged {
                assert_eq!(p.clusters.len(), 1);
            }
            let w: f64 = p.clusters.iter().map(|c| c.weight).sum();
            assert!((w - 1.0).abs() < 1e-12);
        }
    }
}
