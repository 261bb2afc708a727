//! Block sequences: frame compatible sequences, the windowed relations
//! `≈` and `≦`, lattice operations and the positive decomposition.
//!
//! A sequence is a finite prefix `x_1, …, x_D` aligned with the cumulative
//! block sizes `|I_1| ≤ … ≤ |I_D|` of an index decomposition.

use rand::Rng;
use serde::Serialize;

use crate::index::{IndexDecomposition, TailTrend};
use crate::{Error, Result};

/// Finite prefix of a real block sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealSequence {
    values: Vec<f64>,
    block_sizes: Vec<usize>,
    growth_certificate: Option<f64>,
}

impl RealSequence {
    pub fn new(values: Vec<f64>, block_sizes: Vec<usize>) -> Result<Self> {
        if values.len() != block_sizes.len() {
            return Err(Error::Mismatch(format!(
                "{} values for {} blocks",
                values.len(),
                block_sizes.len()
            )));
        }
        if block_sizes.first() == Some(&0) || block_sizes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDecomposition(
                "block sizes must be positive and nondecreasing".into(),
            ));
        }
        Ok(Self {
            values,
            block_sizes,
            growth_certificate: None,
        })
    }

    pub fn on(decomp: &IndexDecomposition, values: Vec<f64>) -> Result<Self> {
        Self::new(values, decomp.block_sizes().to_vec())
    }

    /// `x_n = f(n, |I_n|)` with 1-based `n`.
    pub fn from_fn(block_sizes: Vec<usize>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = block_sizes.iter().enumerate().map(|(i, &s)| f(i + 1, s)).collect();
        Self::new(values, block_sizes)
    }

    /// The sequence `𝐢 = (|I_1|, |I_2|, …)`.
    pub fn identity(block_sizes: Vec<usize>) -> Result<Self> {
        Self::from_fn(block_sizes, |_, s| s as f64)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn growth_certificate(&self) -> Option<f64> {
        self.growth_certificate
    }

    /// `x_n / |I_n|`.
    pub fn normalized(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.block_sizes)
            .map(|(x, &s)| x / s as f64)
            .collect()
    }

    /// Whether every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.fract() == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Block increment sizes `|I_1|, |I_2| − |I_1|, …`.
    pub fn block_increments(&self) -> Vec<usize> {
        increments_usize(&self.block_sizes)
    }

    /// Value increments `x_1, x_2 − x_1, …`.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&v| {
                let d = v - prev;
                prev = v;
                d
            })
            .collect()
    }

    /// The first `blocks` entries.
    pub fn prefix(&self, blocks: usize) -> Self {
        let k = blocks.min(self.len());
        Self {
            values: self.values[..k].to_vec(),
            block_sizes: self.block_sizes[..k].to_vec(),
            growth_certificate: self.growth_certificate,
        }
    }

    fn same_blocks(&self, other: &Self) -> Result<()> {
        if self.block_sizes != other.block_sizes {
            return Err(Error::Mismatch("sequences live on different decompositions".into()));
        }
        Ok(())
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            values,
            block_sizes: self.block_sizes.clone(),
            growth_certificate: None,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_blocks(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.with_values(self.values.iter().map(|v| c * v).collect())
    }
}

fn increments_usize(sizes: &[usize]) -> Vec<usize> {
    let mut prev = 0;
    sizes
        .iter()
        .map(|&s| {
            let d = s - prev;
            prev = s;
            d
        })
        .collect()
}

/// First violation of frame compatibility with slack `tol`, if any.
pub fn frame_compatibility_violation(x: &RealSequence, tol: f64) -> Option<(usize, String)> {
    let growth = x.block_increments();
    for (i, (d, &g)) in x.increments().iter().zip(&growth).enumerate() {
        if *d < -tol {
            return Some((i + 1, format!("increment {d} is negative")));
        }
        if *d > g as f64 + tol {
            return Some((i + 1, format!("increment {d} exceeds block growth {g}")));
        }
    }
    None
}

/// `0 ≤ x_1 ≤ |I_1|` and `0 ≤ x_i − x_{i−1} ≤ |I_i| − |I_{i−1}|`, exactly.
pub fn is_frame_compatible(x: &RealSequence) -> bool {
    frame_compatibility_violation(x, 0.0).is_none()
}

/// Frame compatibility up to an absolute slack on every increment.
pub fn is_frame_compatible_tol(x: &RealSequence, tol: f64) -> bool {
    frame_compatibility_violation(x, tol).is_none()
}

/// Errors with the first offending block unless `x` is frame compatible.
pub fn require_frame_compatible(x: &RealSequence) -> Result<()> {
    match frame_compatibility_violation(x, 0.0) {
        Some((block, reason)) => Err(Error::NotFrameCompatible { block, reason }),
        None => Ok(()),
    }
}

/// Entrywise greatest integer.
pub fn floor_seq(x: &RealSequence) -> RealSequence {
    x.with_values(x.values.iter().map(|v| v.floor()).collect())
}

/// Rounds entries lying within `tol` of an integer onto it. Used before
/// flooring sequences that come out of floating-point spectral sums.
pub fn snapped(x: &RealSequence, tol: f64) -> RealSequence {
    x.with_values(
        x.values
            .iter()
            .map(|&v| if (v - v.round()).abs() <= tol { v.round() } else { v })
            .collect(),
    )
}

/// Smallest `c` with `|x_1| ≤ c|I_1|` and `|x_i − x_{i−1}| ≤ c(|I_i| − |I_{i−1}|)`
/// over the stored prefix.
pub fn xr_membership(x: &RealSequence) -> Result<f64> {
    let growth = x.block_increments();
    let mut c: f64 = 0.0;
    for (i, (d, &g)) in x.increments().iter().zip(&growth).enumerate() {
        if g == 0 {
            if *d != 0.0 {
                return Err(Error::NoGrowthCertificate { block: i + 1 });
            }
            continue;
        }
        c = c.max(d.abs() / g as f64);
    }
    Ok(c)
}

/// Attaches the minimal growth certificate.
pub fn certify(x: &RealSequence) -> Result<RealSequence> {
    let c = xr_membership(x)?;
    let mut out = x.clone();
    out.growth_certificate = Some(c);
    Ok(out)
}

/// Splits `x` into `x⁺ − x⁻` with both parts nonnegative and nondecreasing:
/// positive increments go to `x⁺`, negative ones (negated) to `x⁻`.
pub fn decompose_positive(x: &RealSequence) -> Result<(RealSequence, RealSequence)> {
    let c = xr_membership(x)?;
    let mut plus = Vec::with_capacity(x.len());
    let mut minus = Vec::with_capacity(x.len());
    let (mut p, mut m) = (0.0, 0.0);
    for d in x.increments() {
        p += d.max(0.0);
        m += (-d).max(0.0);
        plus.push(p);
        minus.push(m);
    }
    let mut plus = x.with_values(plus);
    let mut minus = x.with_values(minus);
    plus.growth_certificate = Some(c);
    minus.growth_certificate = Some(c);
    Ok((plus, minus))
}

/// Entrywise minimum.
pub fn wedge(x: &RealSequence, y: &RealSequence) -> Result<RealSequence> {
    x.zip_with(y, f64::min)
}

/// Entrywise maximum.
pub fn vee(x: &RealSequence, y: &RealSequence) -> Result<RealSequence> {
    x.zip_with(y, f64::max)
}

/// Outcome of [`compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// `x ≈ y`.
    Equivalent,
    /// `x ≦ y`.
    LeftDominated,
    /// `y ≦ x`.
    RightDominated,
    /// Persistent gaps of both signs.
    Incomparable,
    /// The window does not settle the question at this tolerance.
    Undecided,
}

/// Windowed comparison of two sequences through `g_n = (y_n − x_n)/|I_n|`.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonVerdict {
    pub kind: ComparisonKind,
    /// Minimum of `g_n` over the window.
    pub liminf_gap: f64,
    /// Maximum of `g_n` over the window.
    pub limsup_gap: f64,
    /// Extrapolated limit of `g_n`.
    pub trend: TailTrend,
    pub blocks_used: usize,
    pub window_start: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    pub tol: f64,
    /// Fraction of the stored blocks, counted from the end, forming the
    /// tail window.
    pub tail_fraction: f64,
}

pub const DEFAULT_COMPARE_TOL: f64 = 1e-3;

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_COMPARE_TOL,
            tail_fraction: 0.5,
        }
    }
}

/// Decides `x ≈ y`, `x ≦ y` or `y ≦ x` on the tail window.
///
/// Equivalence holds when every gap in the window is within `tol`, or when
/// the gaps fit `limit + slope/|I_n|` with `|limit| ≤ tol` and residual
/// within `tol`. Domination is only defined for nonnegative sequences; a
/// non-equivalent pair with a negative entry is an error.
pub fn compare(x: &RealSequence, y: &RealSequence, opts: CompareOptions) -> Result<ComparisonVerdict> {
    x.same_blocks(y)?;
    if !(opts.tol > 0.0) || !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "tolerance must be positive and the tail fraction in (0, 1]".into(),
        ));
    }
    let len = x.len();
    let window = ((len as f64 * opts.tail_fraction).ceil() as usize).min(len);
    if window < 2 {
        return Err(Error::WindowTooShort {
            needed: 2,
            available: window,
        });
    }
    let start = len - window;
    let sizes = &x.block_sizes[start..];
    let gaps: Vec<f64> = (start..len)
        .map(|n| (y.values[n] - x.values[n]) / x.block_sizes[n] as f64)
        .collect();
    let liminf_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trend = TailTrend::fit(sizes, &gaps)?;
    let tol = opts.tol;

    let within = liminf_gap >= -tol && limsup_gap <= tol;
    let kind = if within || trend.reaches(0.0, tol) {
        ComparisonKind::Equivalent
    } else {
        if !x.is_nonnegative() || !y.is_nonnegative() {
            return Err(Error::NegativeSequence);
        }
        if liminf_gap >= -tol {
            ComparisonKind::LeftDominated
        } else if limsup_gap <= tol {
            ComparisonKind::RightDominated
        } else {
            let late = &gaps[gaps.len() / 2..];
            let pos = late.iter().any(|&g| g > tol);
            let neg = late.iter().any(|&g| g < -tol);
            if pos && neg {
                ComparisonKind::Incomparable
            } else {
                ComparisonKind::Undecided
            }
        }
    };
    Ok(ComparisonVerdict {
        kind,
        liminf_gap,
        limsup_gap,
        trend,
        blocks_used: window,
        window_start: start + 1,
        tol,
    })
}

/// Uniformly random frame compatible sequence: each increment is drawn from
/// `[0, |I_i| − |I_{i−1}|]`.
pub fn random_frame_compatible<R: Rng + ?Sized>(rng: &mut R, block_sizes: Vec<usize>) -> Result<RealSequence> {
    let mut acc = 0.0;
    let values = increments_usize(&block_sizes)
        .into_iter()
        .map(|g| {
            acc += rng.random::<f64>() * g as f64;
            acc
        })
        .collect();
    RealSequence::new(values, block_sizes)
}

/// Random frame compatible sequence with `x_n/|I_n| → limit`: increments are
/// `limit·(|I_i| − |I_{i−1}|)` perturbed by a bounded amount that stays
/// compatible. Requires `limit ∈ [0, 1]`.
pub fn random_convergent_compatible<R: Rng + ?Sized>(
    rng: &mut R,
    block_sizes: Vec<usize>,
    limit: f64,
) -> Result<RealSequence> {
    if !(0.0..=1.0).contains(&limit) {
        return Err(Error::InvalidArgument(format!("limit {limit} outside [0, 1]")));
    }
    let mut acc = 0.0;
    let mut debt = 0.0;
    let values = increments_usize(&block_sizes)
        .into_iter()
        .map(|g| {
            let g = g as f64;
            // Jitter the increment but pay it back so the offset stays bounded.
            let target = limit * g - debt;
            let jitter = rng.random_range(-0.5..=0.5);
            let d = (target + jitter).clamp(0.0, g);
            debt += d - limit * g;
            acc += d;
            acc
        })
        .collect();
    RealSequence::new(values, block_sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naturals(d: usize) -> Vec<usize> {
        (1..=d).collect()
    }

    fn seq(values: &[f64]) -> RealSequence {
        RealSequence::new(values.to_vec(), naturals(values.len())).unwrap()
    }

    #[test]
    fn compatibility_examples() {
        let i = RealSequence::identity(vec![2, 4, 7]).unwrap();
        assert!(is_frame_compatible(&i));
        assert!(!is_frame_compatible(
            &RealSequence::new(vec![3.0, 4.0, 5.0], vec![2, 4, 7]).unwrap()
        ));
        assert!(!is_frame_compatible(&seq(&[1.0, 0.5, 1.0])));
        assert!(matches!(
            require_frame_compatible(&seq(&[1.0, 0.5])),
            Err(Error::NotFrameCompatible { block: 2, .. })
        ));
        assert!(RealSequence::new(vec![1.0], vec![1, 2]).is_err());
    }

    #[test]
    fn floor_examples() {
        assert_eq!(floor_seq(&seq(&[0.5, 1.7, 2.0])).values(), &[0.0, 1.0, 2.0]);
        let ints = seq(&[0.0, 1.0, 1.0, 3.0]);
        assert_eq!(floor_seq(&ints), ints);
        assert_eq!(
            floor_seq(&snapped(&seq(&[0.9999999999999, 2.0]), 1e-9)).values()[0],
            1.0
        );
    }

    #[test]
    fn membership_examples() {
        assert_eq!(
            xr_membership(&RealSequence::identity(naturals(10)).unwrap()).unwrap(),
            1.0
        );
        let alt_sizes = RealSequence::from_fn(
            vec![1, 2, 4, 8, 16],
            |n, s| {
                if n % 2 == 0 {
                    s as f64
                } else {
                    -(s as f64)
                }
            },
        )
        .unwrap();
        // Doubling blocks: |±s_n ∓ s_{n−1}| = 3 s_{n−1} over growth s_{n−1}.
        assert_eq!(xr_membership(&alt_sizes).unwrap(), 3.0);
        let stuck = RealSequence::new(vec![1.0, 2.0], vec![2, 2]).unwrap();
        assert!(matches!(
            xr_membership(&stuck),
            Err(Error::NoGrowthCertificate { block: 2 })
        ));
        let flat = RealSequence::new(vec![1.0, 1.0], vec![2, 2]).unwrap();
        assert_eq!(xr_membership(&flat).unwrap(), 0.5);
    }

    #[test]
    fn alternating_signs() {
        // x_n = (−1)ⁿ on |I_n| = n: |x_1| = 1 and every later increment is ±2.
        let signed = RealSequence::from_fn(naturals(8), |n, _| if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        assert_eq!(xr_membership(&signed).unwrap(), 2.0);
        // x_n = (−1)ⁿ |I_n| on |I_n| = n has increments ±(2n − 1): the
        // certificate over a prefix of depth D is 2D − 1.
        let grows = RealSequence::from_fn(naturals(8), |n, s| if n % 2 == 0 { s as f64 } else { -(s as f64) }).unwrap();
        assert_eq!(xr_membership(&grows).unwrap(), 15.0);
    }

    #[test]
    fn decomposition_examples() {
        let x = seq(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let (p, m) = decompose_positive(&x).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        assert_eq!(m.values(), &[0.0, 1.0, 1.0, 2.0, 2.0, 3.0]);

        let mono = seq(&[0.5, 0.5, 2.0, 3.5]);
        let (p, m) = decompose_positive(&mono).unwrap();
        assert_eq!(p.values(), mono.values());
        assert!(m.values().iter().all(|&v| v == 0.0));

        let i = RealSequence::identity(naturals(5)).unwrap();
        let neg = i.sub(&i.scale(2.0)).unwrap();
        let (p, m) = decompose_positive(&neg).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
        assert_eq!(m.values(), i.values());
    }

    #[test]
    fn lattice_examples() {
        let i = RealSequence::identity(naturals(9)).unwrap();
        let third = i.scale(1.0 / 3.0);
        let half = i.scale(0.5);
        assert_eq!(wedge(&third, &half).unwrap(), third);
        assert_eq!(vee(&third, &half).unwrap(), half);
        assert_eq!(wedge(&i, &i).unwrap(), i);
        assert!(wedge(&i, &i.prefix(3)).is_err());
    }

    #[test]
    fn compare_examples() {
        let sizes: Vec<usize> = (1..=64).map(|n| 10 * n).collect();
        let i = RealSequence::identity(sizes.clone()).unwrap();
        let v = compare(&i, &i, CompareOptions::default()).unwrap();
        assert_eq!(v.kind, ComparisonKind::Equivalent);
        assert_eq!((v.liminf_gap, v.limsup_gap), (0.0, 0.0));
        assert_eq!(v.blocks_used, 32);

        let third = i.scale(1.0 / 3.0);
        let half = i.scale(0.5);
        let v = compare(&third, &half, CompareOptions::default()).unwrap();
        assert_eq!(v.kind, ComparisonKind::LeftDominated);
        assert!((v.liminf_gap - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(
            compare(&half, &third, CompareOptions::default()).unwrap().kind,
            ComparisonKind::RightDominated
        );

        let neg = i.scale(-1.0);
        assert!(matches!(
            compare(&neg, &i, CompareOptions::default()),
            Err(Error::NegativeSequence)
        ));
        assert_eq!(
            compare(&neg, &neg, CompareOptions::default()).unwrap().kind,
            ComparisonKind::Equivalent
        );
    }

    #[test]
    fn compare_floor_is_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sizes: Vec<usize> = (1..=40).map(|n| 100 * n).collect();
        let x = random_frame_compatible(&mut rng, sizes).unwrap();
        let v = compare(&x, &floor_seq(&x), CompareOptions::default()).unwrap();
        assert_eq!(v.kind, ComparisonKind::Equivalent);
        // The gap is at most 1/|I_n| and fluctuates with the fractional parts,
        // so the decision rests on the uniform bound.
        assert!(v.limsup_gap <= 1.0 / 2100.0);
    }

    #[test]
    fn compare_detects_crossing_sequences() {
        let sizes: Vec<usize> = (1..=40).collect();
        let a = RealSequence::from_fn(sizes.clone(), |n, s| s as f64 * if n % 2 == 0 { 0.8 } else { 0.2 }).unwrap();
        let b = RealSequence::from_fn(sizes, |_, s| 0.5 * s as f64).unwrap();
        assert_eq!(
            compare(&a, &b, CompareOptions::default()).unwrap().kind,
            ComparisonKind::Incomparable
        );
    }

    #[test]
    fn random_convergent_sequence_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sizes: Vec<usize> = (1..=200).map(|n| 5 * n).collect();
        let x = random_convergent_compatible(&mut rng, sizes, 0.37).unwrap();
        assert!(is_frame_compatible(&x));
        assert!((x.normalized().last().unwrap() - 0.37).abs() < 1.0 / 1000.0);
    }

    fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..6, 1..30).prop_map(|gs| {
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
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn floor_preserves_compatibility(sizes in sizes_strategy(), seed in any::<u64>()) {
            let x = random_frame_compatible(&mut ChaCha8Rng::seed_from_u64(seed), sizes).unwrap();
            prop_assert!(is_frame_compatible(&x));
            prop_assert!(is_frame_compatible(&floor_seq(&x)));
        }

        #[test]
        fn lattice_closure_and_absorption(sizes in sizes_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_frame_compatible(&mut rng, sizes.clone()).unwrap();
            let y = random_frame_compatible(&mut rng, sizes).unwrap();
            let w = wedge(&x, &y).unwrap();
            let v = vee(&x, &y).unwrap();
            prop_assert!(is_frame_compatible(&w));
            prop_assert!(is_frame_compatible(&v));
            prop_assert_eq!(vee(&x, &w).unwrap(), x.clone());
            prop_assert_eq!(wedge(&x, &v).unwrap(), x);
        }

        #[test]
        fn convex_combinations_stay_compatible(sizes in sizes_strategy(), seed in any::<u64>(), t in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_frame_compatible(&mut rng, sizes.clone()).unwrap();
            let y = random_frame_compatible(&mut rng, sizes).unwrap();
            let z = x.scale(t).add(&y.scale(1.0 - t)).unwrap();
            prop_assert!(is_frame_compatible_tol(&z, 1e-12));
        }

        #[test]
        fn decomposition_reassembles(values in prop::collection::vec(-50i32..50, 1..40)) {
            let x = RealSequence::new(values.iter().map(|&v| v as f64).collect(), naturals(values.len())).unwrap();
            let (p, m) = decompose_positive(&x).unwrap();
            let back = p.sub(&m).unwrap();
            prop_assert_eq!(back.values(), x.values());
            let c = xr_membership(&x).unwrap();
            for part in [&p, &m] {
                prop_assert!(part.is_nonnegative());
                for (d, full) in part.increments().iter().zip(x.increments()) {
                    prop_assert!(*d == 0.0 || *d == full.abs());
                }
                prop_assert!(is_frame_compatible_tol(&part.scale(1.0 / c.max(1.0)), 1e-12));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn order_sandwich(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<usize> = (1..=24).map(|n| 4 * n).collect();
            let x = random_frame_compatible(&mut rng, sizes.clone()).unwrap();
            let y = random_frame_compatible(&mut rng, sizes).unwrap();
            let w = wedge(&x, &y).unwrap();
            let v = vee(&x, &y).unwrap();
            for (lo, hi) in [(&w, &x), (&x, &v), (&w, &y), (&y, &v)] {
                let k = compare(lo, hi, CompareOptions::default()).unwrap().kind;
                prop_assert!(matches!(k, ComparisonKind::LeftDominated | ComparisonKind::Equivalent));
            }
        }
    }
}
