//! Finite Gabor systems on `ℓ²(ℤ_N)` and point-set densities over nested
//! skewed boxes.
//!
//! In the cyclic model the time-frequency plane `ℤ_N × ℤ_N` has `N²` points
//! for an `N`-dimensional space, so the density analogue of a point set is
//! `count / (vol / N)`: the full plane has density `N` and a set with as
//! many points as dimensions has density 1.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::frame::{FrameSnapshot, FrameVector};
use crate::index::{IndexDecomposition, Label, QuasiMetric};
use crate::measure::{frame_measure, profile, FrameMeasure, MeasureOptions, MeasureProfile, ProfileOptions};
use crate::operators::{superframe_check_all, MultiSuperframeReport, OperatorSnapshot, SuperframeOptions};
use crate::{Error, Execution, Result, C64};

const PHASE_TOL: f64 = 1e-12;

/// Multiset of time-frequency points, optionally with a phase per point.
#[derive(Debug, Clone)]
pub struct GaborLattice {
    modulus: Option<usize>,
    points: Vec<[f64; 2]>,
    phases: Option<Vec<C64>>,
    /// Steps `(a, b)` when built as `aℤ_N × bℤ_N`.
    regular: Option<(usize, usize)>,
}

impl GaborLattice {
    /// Finite-model points must be integers; they are reduced mod `N`.
    pub fn new(modulus: Option<usize>, points: Vec<[f64; 2]>, phases: Option<Vec<C64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyLattice);
        }
        let points = match modulus {
            Some(0) => return Err(Error::InvalidArgument("modulus must be positive".into())),
            Some(n) => points
                .into_iter()
                .map(|p| {
                    if p.iter().any(|c| c.fract() != 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "point ({}, {}) is not integral in the finite model",
                            p[0], p[1]
                        )));
                    }
                    Ok(p.map(|c| c.rem_euclid(n as f64)))
                })
                .collect::<Result<Vec<_>>>()?,
            None => {
                if points.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("point coordinates must be finite".into()));
                }
                points
            }
        };
        if let Some(ph) = &phases {
            if ph.len() != points.len() {
                return Err(Error::Mismatch(format!(
                    "{} phases for {} points",
                    ph.len(),
                    points.len()
                )));
            }
            if let Some((index, z)) = ph.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > PHASE_TOL) {
                return Err(Error::NonUnimodularPhase {
                    index,
                    modulus: z.norm(),
                });
            }
        }
        Ok(Self {
            modulus,
            points,
            phases,
            regular: None,
        })
    }

    /// `aℤ_N × bℤ_N`; `a` and `b` must divide `N`.
    pub fn regular(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || !n.is_multiple_of(a) || !n.is_multiple_of(b) {
            return Err(Error::InvalidArgument(format!("steps {a}, {b} must divide {n}")));
        }
        let points = (0..n / a)
            .flat_map(|i| (0..n / b).map(move |j| [(i * a) as f64, (j * b) as f64]))
            .collect();
        let mut out = Self::new(Some(n), points, None)?;
        out.regular = Some((a, b));
        Ok(out)
    }

    /// Every point of `ℤ_N × ℤ_N`.
    pub fn full(n: usize) -> Result<Self> {
        Self::regular(n, 1, 1)
    }

    /// `aℤ_N × bℤ_N` with each point moved by independent offsets in
    /// `0..=jitter` per coordinate. Point `k` is the jittered image of point
    /// `k` of [`Self::regular`].
    pub fn jittered<R: Rng + ?Sized>(rng: &mut R, n: usize, a: usize, b: usize, jitter: usize) -> Result<Self> {
        let base = Self::regular(n, a, b)?;
        let points = base
            .points
            .iter()
            .map(|p| {
                [
                    p[0] + rng.random_range(0..=jitter) as f64,
                    p[1] + rng.random_range(0..=jitter) as f64,
                ]
            })
            .collect();
        Self::new(Some(n), points, None)
    }

    /// `{A k : k ∈ ℤ², ‖A k‖_∞ ≤ radius}` in the plane.
    pub fn real_lattice(a: [[f64; 2]; 2], radius: f64) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::DegenerateSkew(det));
        }
        // ‖k‖_∞ ≤ ‖A⁻¹‖_∞ radius bounds the search.
        let inv_norm = ((a[1][1].abs() + a[0][1].abs()).max(a[1][0].abs() + a[0][0].abs())) / det.abs();
        let k = (inv_norm * radius).ceil() as i64 + 1;
        let mut points = Vec::new();
        for i in -k..=k {
            for j in -k..=k {
                let p = [
                    a[0][0] * i as f64 + a[0][1] * j as f64,
                    a[1][0] * i as f64 + a[1][1] * j as f64,
                ];
                if p[0].abs().max(p[1].abs()) <= radius {
                    points.push(p);
                }
            }
        }
        Self::new(None, points, None)
    }

    /// `ℤ²` in `[-radius, radius]²` with each point moved uniformly by less
    /// than `amount` per coordinate.
    pub fn real_jittered<R: Rng + ?Sized>(rng: &mut R, radius: i64, amount: f64) -> Result<Self> {
        let mut points = Vec::new();
        for i in -radius..=radius {
            for j in -radius..=radius {
                points.push([
                    i as f64 + rng.random_range(-amount..amount),
                    j as f64 + rng.random_range(-amount..amount),
                ]);
            }
        }
        Self::new(None, points, None)
    }

    /// Same points with independent uniform phases.
    pub fn with_random_phases<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        self.phases = Some(
            (0..self.points.len())
                .map(|_| C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
                .collect(),
        );
        self
    }

    pub fn modulus(&self) -> Option<usize> {
        self.modulus
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn phases(&self) -> Option<&[C64]> {
        self.phases.as_deref()
    }

    pub fn regular_steps(&self) -> Option<(usize, usize)> {
        self.regular
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn require_finite(&self) -> Result<usize> {
        self.modulus
            .ok_or_else(|| Error::InvalidArgument("operation needs the finite model".into()))
    }
}

/// Skewed tiles `M Q_n(O)`: `λ ∈ M Q_n(O)` iff `‖M⁻¹(λ − O)‖_∞ ≤ n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSpec {
    pub center: [f64; 2],
    pub skew: [[f64; 2]; 2],
}

impl Default for BoxSpec {
    fn default() -> Self {
        Self::centered([0.0, 0.0])
    }
}

impl BoxSpec {
    pub fn centered(center: [f64; 2]) -> Self {
        Self {
            center,
            skew: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn new(center: [f64; 2], skew: [[f64; 2]; 2]) -> Result<Self> {
        let b = Self { center, skew };
        let det = b.det();
        if !(det.abs() > 1e-14) || !det.is_finite() {
            return Err(Error::DegenerateSkew(det));
        }
        Ok(b)
    }

    pub fn det(&self) -> f64 {
        self.skew[0][0] * self.skew[1][1] - self.skew[0][1] * self.skew[1][0]
    }

    /// `det(M) · n²`.
    pub fn volume(&self, n: f64) -> f64 {
        self.det().abs() * n * n
    }

    fn at(&self, center: [f64; 2]) -> Self {
        Self { center, ..*self }
    }

    /// Sup norm of `M⁻¹(p − O)`, with `p − O` reduced to its centered cyclic
    /// representative when a modulus is given.
    fn radius_of(&self, p: [f64; 2], modulus: Option<usize>) -> f64 {
        let mut d = [p[0] - self.center[0], p[1] - self.center[1]];
        if let Some(n) = modulus {
            let n = n as f64;
            for c in &mut d {
                *c -= n * (*c / n).round();
            }
        }
        let m = &self.skew;
        let det = self.det();
        let x = (m[1][1] * d[0] - m[0][1] * d[1]) / det;
        let y = (-m[1][0] * d[0] + m[0][0] * d[1]) / det;
        x.abs().max(y.abs())
    }

    pub fn contains(&self, p: [f64; 2], modulus: Option<usize>, n: f64) -> bool {
        self.radius_of(p, modulus) <= n / 2.0
    }

    fn count(&self, lattice: &GaborLattice, n: f64) -> usize {
        lattice
            .points
            .iter()
            .filter(|&&p| self.contains(p, lattice.modulus, n))
            .count()
    }
}

/// Which volume normalizes a count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityNormalization {
    /// `count / vol`.
    Lebesgue,
    /// `count / (vol / N)` on `ℤ_N × ℤ_N`.
    Counting { modulus: usize },
}

impl DensityNormalization {
    fn of(lattice: &GaborLattice) -> Self {
        match lattice.modulus {
            Some(modulus) => DensityNormalization::Counting { modulus },
            None => DensityNormalization::Lebesgue,
        }
    }

    fn ratio(&self, count: usize, vol: f64) -> f64 {
        match self {
            DensityNormalization::Lebesgue => count as f64 / vol,
            DensityNormalization::Counting { modulus } => count as f64 * *modulus as f64 / vol,
        }
    }
}

/// Centers for the Beurling scan: a grid of step `n/4` over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterScan {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    pub sides: Vec<f64>,
    pub counts: Vec<usize>,
    pub ratios: Vec<f64>,
    pub profile: MeasureProfile,
    /// Per side, the largest and smallest ratio over the scanned centers.
    pub beurling_upper: Vec<f64>,
    pub beurling_lower: Vec<f64>,
    pub centers_scanned: Vec<usize>,
    pub normalization: DensityNormalization,
}

fn check_sides(sides: &[f64]) -> Result<()> {
    if sides.is_empty() {
        return Err(Error::TooFew {
            what: "box sides",
            needed: 1,
            got: 0,
        });
    }
    if sides.iter().any(|s| !(*s > 0.0)) || sides.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "box sides must be positive and increasing".into(),
        ));
    }
    Ok(())
}

/// Counts of `Λ ∩ M Q_n(O)` per side `n` and the normalized ratios, with a
/// Beurling scan over `scan` when given.
pub fn density_estimate(
    lattice: &GaborLattice,
    boxes: &BoxSpec,
    sides: &[f64],
    scan: Option<CenterScan>,
    profile_opts: &ProfileOptions,
    exec: Execution,
) -> Result<DensityEstimate> {
    if lattice.is_empty() {
        return Err(Error::EmptyLattice);
    }
    BoxSpec::new(boxes.center, boxes.skew)?;
    check_sides(sides)?;
    let norm = DensityNormalization::of(lattice);
    let counts: Vec<usize> = exec.map(sides, |&n| boxes.count(lattice, n));
    let ratios: Vec<f64> = counts
        .iter()
        .zip(sides)
        .map(|(&c, &n)| norm.ratio(c, boxes.volume(n)))
        .collect();
    let scans = exec.map(sides, |&n| {
        let Some(s) = scan else {
            let r = norm.ratio(boxes.count(lattice, n), boxes.volume(n));
            return (r, r, 1usize);
        };
        let step = n / 4.0;
        let grid = |lo: f64, hi: f64| -> Vec<f64> {
            let k = ((hi - lo) / step).floor().max(0.0) as usize;
            (0..=k).map(|i| lo + i as f64 * step).collect()
        };
        let (xs, ys) = (grid(s.lo[0], s.hi[0]), grid(s.lo[1], s.hi[1]));
        let (mut up, mut down) = (f64::NEG_INFINITY, f64::INFINITY);
        for &x in &xs {
            for &y in &ys {
                let r = norm.ratio(boxes.at([x, y]).count(lattice, n), boxes.volume(n));
                up = up.max(r);
                down = down.min(r);
            }
        }
        (up, down, xs.len() * ys.len())
    });
    Ok(DensityEstimate {
        profile: profile(&ratios, None, profile_opts)?,
        sides: sides.to_vec(),
        counts,
        ratios,
        beurling_upper: scans.iter().map(|s| s.0).collect(),
        beurling_lower: scans.iter().map(|s| s.1).collect(),
        centers_scanned: scans.iter().map(|s| s.2).collect(),
        normalization: norm,
    })
}

/// Window vectors by registry key: `delta`, `gaussian`, `gaussian:<sigma>`,
/// `file:<path>` (JSON array of reals or `[re, im]` pairs).
pub fn window_from_key(key: &str, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("window length must be positive".into()));
    }
    if key == "delta" {
        let mut g = vec![C64::new(0.0, 0.0); n];
        g[0] = C64::new(1.0, 0.0);
        return Ok(g);
    }
    if key == "gaussian" {
        return Ok(gaussian_window(n, (n as f64 / (2.0 * PI)).sqrt()));
    }
    if let Some(s) = key.strip_prefix("gaussian:") {
        let sigma: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad gaussian width in {key}")))?;
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument("gaussian width must be positive".into()));
        }
        return Ok(gaussian_window(n, sigma));
    }
    if let Some(path) = key.strip_prefix("file:") {
        let g = crate::io::read_window(Path::new(path))?;
        if g.len() != n {
            return Err(Error::Mismatch(format!(
                "window file has {} samples, expected {n}",
                g.len()
            )));
        }
        return Ok(g);
    }
    Err(Error::InvalidArgument(format!("unknown window {key}")))
}

/// `g[x] = exp(−d(x, 0)² / (2σ²))` with `d` the cyclic distance.
pub fn gaussian_window(n: usize, sigma: f64) -> Vec<C64> {
    (0..n)
        .map(|x| {
            let d = x.min(n - x) as f64;
            C64::new((-d * d / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect()
}

/// Finite Gabor system with its box decomposition.
#[derive(Debug, Clone)]
pub struct GaborFrame {
    pub frame: FrameSnapshot,
    pub lattice: GaborLattice,
    pub boxes: BoxSpec,
    pub sides: Vec<f64>,
    /// `order[p]` is the lattice point carried by snapshot position `p`.
    pub order: Vec<usize>,
}

impl GaborFrame {
    /// Sup of cyclic distances in time and frequency; the third label
    /// coordinate only separates repeated points.
    pub fn metric(&self) -> QuasiMetric {
        let n = self.lattice.modulus.expect("finite model") as i64;
        QuasiMetric::CyclicSup { moduli: vec![n, n, 1] }
    }

    /// Gram matrix on the lattice labels, with the lattice metric.
    pub fn gram_operator(&self) -> Result<OperatorSnapshot> {
        OperatorSnapshot::new(self.frame.gram(), self.frame.decomp().clone(), Some(self.metric()))
    }
}

/// Box decomposition of a finite lattice: labels `(t, ω, copy)` ordered by
/// the first box containing them, then by point index. Returns the
/// decomposition and the point carried by each position.
pub fn box_decomposition(
    lattice: &GaborLattice,
    boxes: &BoxSpec,
    sides: &[f64],
) -> Result<(Arc<IndexDecomposition>, Vec<usize>)> {
    lattice.require_finite()?;
    BoxSpec::new(boxes.center, boxes.skew)?;
    check_sides(sides)?;
    let mut first = Vec::with_capacity(lattice.len());
    for (k, &p) in lattice.points.iter().enumerate() {
        let r = boxes.radius_of(p, lattice.modulus);
        let b = sides.partition_point(|&n| n / 2.0 < r);
        if b == sides.len() {
            return Err(Error::InvalidArgument(format!(
                "point {k} ({}, {}) lies outside the largest box",
                p[0], p[1]
            )));
        }
        first.push(b);
    }
    let mut order: Vec<usize> = (0..lattice.len()).collect();
    order.sort_by_key(|&k| (first[k], k));
    let mut copies: std::collections::HashMap<(i64, i64), i64> = Default::default();
    let labels = order
        .iter()
        .map(|&k| {
            let p = lattice.points[k];
            let key = (p[0] as i64, p[1] as i64);
            let c = copies.entry(key).or_insert(0);
            *c += 1;
            Label::Tuple(Box::new([key.0, key.1, *c - 1]))
        })
        .collect();
    let mut sizes = vec![0usize; sides.len()];
    for &b in &first {
        sizes[b] += 1;
    }
    for i in 1..sizes.len() {
        sizes[i] += sizes[i - 1];
    }
    Ok((Arc::new(IndexDecomposition::new(labels, sizes)?), order))
}

/// `g_λ[x] = e^{iφ_λ} e^{2πiωx/N} g[x − t]` for one point.
fn gabor_vector(window: &[C64], p: [f64; 2], phase: C64) -> FrameVector {
    let n = window.len();
    let (t, w) = (p[0] as usize, p[1] as usize);
    let values: Vec<C64> = (0..n)
        .map(|x| {
            let angle = 2.0 * PI * ((w * x) % n) as f64 / n as f64;
            phase * C64::from_polar(1.0, angle) * window[(x + n - t) % n]
        })
        .collect();
    FrameVector::from_dense(&values)
}

fn check_window(window: &[C64], n: usize) -> Result<()> {
    if window.len() != n {
        return Err(Error::Mismatch(format!(
            "window has {} samples, expected {n}",
            window.len()
        )));
    }
    if window.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::ZeroWindow);
    }
    Ok(())
}

/// The Gabor system of `window` over a finite lattice, ordered by boxes.
pub fn gabor_system(window: &[C64], lattice: &GaborLattice, boxes: &BoxSpec, sides: &[f64]) -> Result<GaborFrame> {
    let n = lattice.require_finite()?;
    check_window(window, n)?;
    let (decomp, order) = box_decomposition(lattice, boxes, sides)?;
    let vectors = vectors_in_order(window, lattice, &order);
    Ok(GaborFrame {
        frame: FrameSnapshot::new(n, vectors, decomp)?,
        lattice: lattice.clone(),
        boxes: *boxes,
        sides: sides.to_vec(),
        order,
    })
}

fn vectors_in_order(window: &[C64], lattice: &GaborLattice, order: &[usize]) -> Vec<FrameVector> {
    let one = C64::new(1.0, 0.0);
    order
        .iter()
        .map(|&k| {
            let phase = lattice.phases.as_ref().map_or(one, |p| p[k]);
            gabor_vector(window, lattice.points[k], phase)
        })
        .collect()
}

/// A second system carried by the labels of `base`: position `p` holds the
/// element at point `remap[base.order[p]]` of `lattice` (identity when
/// `remap` is absent).
pub fn gabor_system_on(
    base: &GaborFrame,
    window: &[C64],
    lattice: &GaborLattice,
    remap: Option<&[usize]>,
) -> Result<FrameSnapshot> {
    let n = lattice.require_finite()?;
    if Some(n) != base.lattice.modulus {
        return Err(Error::Mismatch("systems live on different groups".into()));
    }
    check_window(window, n)?;
    if lattice.len() != base.lattice.len() {
        return Err(Error::Mismatch(format!(
            "{} points cannot be paired with {}",
            lattice.len(),
            base.lattice.len()
        )));
    }
    let order: Vec<usize> = match remap {
        None => base.order.clone(),
        Some(r) => {
            let mut seen = vec![false; r.len()];
            if r.len() != lattice.len() || r.iter().any(|&k| k >= r.len() || std::mem::replace(&mut seen[k], true)) {
                return Err(Error::InvalidPermutation(
                    "remap is not a permutation of the points".into(),
                ));
            }
            base.order.iter().map(|&k| r[k]).collect()
        }
    };
    FrameSnapshot::new(
        n,
        vectors_in_order(window, lattice, &order),
        base.frame.decomp().clone(),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureDensityReport {
    pub measure: MeasureProfile,
    pub density: MeasureProfile,
    /// `a_n · D_n` per block.
    pub products: Vec<f64>,
    /// Largest `|a_n D_n − 1|` over the tail window.
    pub product_residual: f64,
    /// Endpoint gap between `[liminf a, limsup a]` and `[1/limsup D, 1/liminf D]`.
    pub interval_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub normalization: DensityNormalization,
}

/// Compares the measure of a Gabor system with the reciprocal density of
/// its lattice on the same boxes.
pub fn measure_vs_density(
    g: &GaborFrame,
    estimate: &DensityEstimate,
    opts: &MeasureOptions,
    tol: f64,
) -> Result<MeasureDensityReport> {
    if estimate.sides != g.sides {
        return Err(Error::Mismatch("density estimate uses different boxes".into()));
    }
    let fm = frame_measure(&g.frame, opts)?;
    let k = fm.stable_blocks;
    let a = &fm.sequence.a[..k];
    let products: Vec<f64> = a.iter().zip(&estimate.ratios).map(|(x, d)| x * d).collect();
    let density = profile(&estimate.ratios[..k], None, &opts.profile)?;
    let (s, e) = fm.profile.tail_window;
    let product_residual = products[s - 1..e].iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
    let interval_residual = (fm.profile.liminf - 1.0 / density.limsup)
        .abs()
        .max((fm.profile.limsup - 1.0 / density.liminf).abs());
    Ok(MeasureDensityReport {
        pass: product_residual <= tol && interval_residual <= tol,
        measure: fm.profile,
        density,
        products,
        product_residual,
        interval_residual,
        tol,
        normalization: estimate.normalization,
    })
}

/// One system of a superframe candidate.
#[derive(Debug, Clone)]
pub struct GaborComponent {
    pub window: Vec<C64>,
    pub lattice: GaborLattice,
    /// Pairing with the first system's points; identity when absent.
    pub remap: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperframeDensityReport {
    pub measures: Vec<MeasureProfile>,
    /// `Σ_k limsup a(G_k)`.
    pub measure_sum: f64,
    /// `Σ_k ≤ 1 + tol`, necessary for a superframe.
    pub necessary_condition: bool,
    /// `a_k b_k / N` for regular lattices.
    pub det_analogues: Vec<Option<f64>>,
    pub det_sum: Option<f64>,
    pub superframe: MultiSuperframeReport,
    /// A passing superframe check with a violated necessary condition.
    pub contradiction: bool,
    pub tol: f64,
}

/// Builds the superset of `d` Gabor systems on the first system's boxes,
/// checks it, and reports the summed measures.
pub fn superframe_density_condition(
    systems: &[GaborComponent],
    boxes: &BoxSpec,
    sides: &[f64],
    opts: &MeasureOptions,
    tol: f64,
) -> Result<SuperframeDensityReport> {
    let first = systems.first().ok_or(Error::TooFew {
        what: "systems",
        needed: 1,
        got: 0,
    })?;
    if first.remap.is_some() {
        return Err(Error::InvalidArgument(
            "the first system defines the labels and takes no remap".into(),
        ));
    }
    let base = gabor_system(&first.window, &first.lattice, boxes, sides)?;
    let mut frames = vec![base.frame.clone()];
    for s in &systems[1..] {
        frames.push(gabor_system_on(&base, &s.window, &s.lattice, s.remap.as_deref())?);
    }
    let measures: Vec<FrameMeasure> = frames.iter().map(|f| frame_measure(f, opts)).collect::<Result<_>>()?;
    let measure_sum: f64 = measures.iter().map(|m| m.profile.limsup).sum();
    let n = base.lattice.modulus.expect("finite model") as f64;
    let det_analogues: Vec<Option<f64>> = systems
        .iter()
        .map(|s| s.lattice.regular.map(|(a, b)| (a * b) as f64 / n))
        .collect();
    let det_sum = det_analogues.iter().copied().sum::<Option<f64>>();
    let sf_opts = SuperframeOptions {
        analyze: opts.analyze,
        policy: opts.policy,
        ..SuperframeOptions::default()
    };
    let superframe = superframe_check_all(&frames, &sf_opts)?;
    let necessary_condition = measure_sum <= 1.0 + tol;
    Ok(SuperframeDensityReport {
        measures: measures.into_iter().map(|m| m.profile).collect(),
        measure_sum,
        necessary_condition,
        det_analogues,
        det_sum,
        contradiction: superframe.is_superframe && !necessary_condition,
        superframe,
        tol,
    })
}
