//! Named experiments with deterministic JSON/CSV artifacts.
//!
//! An [`ExperimentConfig`] selects a kind and overrides its defaults;
//! [`run`] produces an [`Outcome`] with one [`Check`] per verified claim and
//! [`run_experiment`] writes `summary.json` plus CSV tables into the output
//! directory. Failed checks are reported in the summary, never raised.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{self, ChannelOptions};
use crate::frame::{analyze, explicit_dual_agreement, AnalyzeOptions, EdgePolicy, FrameSnapshot, FrameVector};
use crate::gabor::{
    density_estimate, gabor_system, gabor_system_on, measure_vs_density, superframe_density_condition, window_from_key,
    BoxSpec, GaborComponent, GaborLattice,
};
use crate::index::IndexDecomposition;
use crate::io::{self, Cell};
use crate::measure::{excess_probe, frame_measure, profile_sequence, MeasureOptions, MeasureProfile, ProfileOptions};
use crate::models::{self, NonAdditivePair};
use crate::operators::{superframe_check, superset_additivity_report, tracial_residual, SuperframeOptions};
use crate::seq::{self, RealSequence};
use crate::synth::{frame_b_floor, split_bound_report, split_superset, synth_perp_normal};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PaperCounterexample,
    Riesz,
    OrthogonalAdditivity,
    TwoCluster,
    GaborRegular,
    GaborJittered,
    SuperframeAdditivity,
    Synthesis,
    LatticeLaws,
    Tracial,
    Channel,
    Excess,
    SuperframeDensity,
    FrameMeasure,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 14] = [
        ExperimentKind::PaperCounterexample,
        ExperimentKind::Riesz,
        ExperimentKind::OrthogonalAdditivity,
        ExperimentKind::TwoCluster,
        ExperimentKind::GaborRegular,
        ExperimentKind::GaborJittered,
        ExperimentKind::SuperframeAdditivity,
        ExperimentKind::Synthesis,
        ExperimentKind::LatticeLaws,
        ExperimentKind::Tracial,
        ExperimentKind::Channel,
        ExperimentKind::Excess,
        ExperimentKind::SuperframeDensity,
        ExperimentKind::FrameMeasure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PaperCounterexample => "paper-counterexample",
            ExperimentKind::Riesz => "riesz",
            ExperimentKind::OrthogonalAdditivity => "orthogonal-additivity",
            ExperimentKind::TwoCluster => "two-cluster",
            ExperimentKind::GaborRegular => "gabor-regular",
            ExperimentKind::GaborJittered => "gabor-jittered",
            ExperimentKind::SuperframeAdditivity => "superframe-additivity",
            ExperimentKind::Synthesis => "synthesis",
            ExperimentKind::LatticeLaws => "lattice-laws",
            ExperimentKind::Tracial => "tracial",
            ExperimentKind::Channel => "channel",
            ExperimentKind::Excess => "excess",
            ExperimentKind::SuperframeDensity => "superframe-density",
            ExperimentKind::FrameMeasure => "frame-measure",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// One-line description for listings.
    pub fn about(self) -> &'static str {
        match self {
            ExperimentKind::PaperCounterexample => {
                "non-additive pair F, G, F⊕G: profiles 1/2, 1/4, 1/2 and explicit dual"
            }
            ExperimentKind::Riesz => "random invertible images of an orthonormal basis have measure 1",
            ExperimentKind::OrthogonalAdditivity => "disjointly supported families add exactly",
            ExperimentKind::TwoCluster => "|I_n| = 2^n sequence with clusters 1/3 and 2/3",
            ExperimentKind::GaborRegular => "regular lattice on Z_N: measure times density is 1",
            ExperimentKind::GaborJittered => "jittered lattice on Z_N: measure times density near 1",
            ExperimentKind::SuperframeAdditivity => "regular and jittered Gabor superframe, residual over N",
            ExperimentKind::Synthesis => "perpendicular-normal synthesis and superset splitting",
            ExperimentKind::LatticeLaws => "wedge and vee of convergent compatible sequences",
            ExperimentKind::Tracial => "tracial residual of banded and dense operators",
            ExperimentKind::Channel => "noise channel on the Parseval frame of the pair's F",
            ExperimentKind::Excess => "excess probe on the interleaved double basis",
            ExperimentKind::SuperframeDensity => "summed measures of regular Gabor superframes on Z_12",
            ExperimentKind::FrameMeasure => "measure profile of a frame file",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One experiment. Unset fields take the kind's defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Group order `N` for Gabor kinds.
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub modulus: Option<usize>,
    /// Lattice steps `(a, b)` for Gabor kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Treat the input as a whole finite frame instead of a truncation.
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub sequential: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn of(kind: ExperimentKind) -> Self {
        Self {
            kind: Some(kind),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.kind
            .ok_or_else(|| Error::Schema(vec!["schema: missing field `kind`".into()]))
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.kind.is_none() {
            errs.push("schema: missing field `kind`".to_string());
        }
        for (what, v) in [
            ("tolerance", self.tolerance),
            ("alpha", self.alpha),
            ("epsilon", self.epsilon),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("invariant: {what} must be positive, got {v}"));
                }
            }
        }
        if let Some(d) = self.depth {
            if d < 4 {
                errs.push(format!("invariant: depth must be at least 4, got {d}"));
            }
        }
        if self.kind == Some(ExperimentKind::FrameMeasure) && self.inputs.is_empty() {
            errs.push("invariant: frame-measure needs one input frame".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Schema(errs))
        }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn analyze(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            exec: self.exec(),
            ..AnalyzeOptions::default()
        }
    }

    fn measure(&self, policy: EdgePolicy) -> MeasureOptions {
        MeasureOptions {
            analyze: self.analyze(),
            policy,
            ..MeasureOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value − expected| ≤ tolerance`.
    Within,
    /// `value ≤ expected`.
    AtMost,
    /// `value ≥ expected`.
    AtLeast,
    /// `value` is 1 when the property holds.
    Holds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Within,
            pass: (value - expected).abs() <= tolerance,
            value,
            expected,
            tolerance,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::AtMost,
            pass: value <= bound,
            value,
            expected: bound,
            tolerance: 0.0,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::AtLeast,
            pass: value >= bound,
            value,
            expected: bound,
            tolerance: 0.0,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Holds,
            value: if ok { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            pass: ok,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.relation {
            Relation::Within => write!(
                f,
                "{verdict} {}: {:.6e} vs {:.6e} (tol {:.1e})",
                self.name, self.value, self.expected, self.tolerance
            ),
            Relation::AtMost => write!(
                f,
                "{verdict} {}: {:.6e} <= {:.6e}",
                self.name, self.value, self.expected
            ),
            Relation::AtLeast => write!(
                f,
                "{verdict} {}: {:.6e} >= {:.6e}",
                self.name, self.value, self.expected
            ),
            Relation::Holds => write!(f, "{verdict} {}", self.name),
        }
    }
}

/// A CSV artifact.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub experiment: String,
    pub kind: ExperimentKind,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub data: Value,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub tables: BTreeMap<String, Table>,
}

impl Outcome {
    fn new(kind: ExperimentKind, checks: Vec<Check>, data: Value, tables: BTreeMap<String, Table>) -> Self {
        Self {
            experiment: kind.name().to_string(),
            kind,
            pass: checks.iter().all(|c| c.pass),
            artifacts: tables.keys().cloned().collect(),
            checks,
            data,
            tables,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the experiment and writes `summary.json` and its CSV tables to the
/// configured output directory (`out/<name>` by default).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let outcome = run(cfg)?;
    let dir = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(&outcome.experiment));
    write_outcome(&outcome, &dir)?;
    Ok(outcome)
}

pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (file, table) in &outcome.tables {
        io::write_csv_file(&dir.join(file), &table.header, &table.rows)?;
    }
    io::write_json(&dir.join("summary.json"), outcome)
}

/// Runs the experiment without touching the filesystem (except for inputs).
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let mut out = match kind {
        ExperimentKind::PaperCounterexample => paper_counterexample(cfg),
        ExperimentKind::Riesz => riesz(cfg),
        ExperimentKind::OrthogonalAdditivity => orthogonal_additivity(cfg),
        ExperimentKind::TwoCluster => two_cluster(cfg),
        ExperimentKind::GaborRegular => gabor_law(cfg, false),
        ExperimentKind::GaborJittered => gabor_law(cfg, true),
        ExperimentKind::SuperframeAdditivity => superframe_additivity(cfg),
        ExperimentKind::Synthesis => synthesis(cfg),
        ExperimentKind::LatticeLaws => lattice_laws(cfg),
        ExperimentKind::Tracial => tracial(cfg),
        ExperimentKind::Channel => channel_run(cfg),
        ExperimentKind::Excess => excess(cfg),
        ExperimentKind::SuperframeDensity => superframe_density(cfg),
        ExperimentKind::FrameMeasure => frame_measure_file(cfg),
    }?;
    if let Some(name) = &cfg.name {
        out.experiment = name.clone();
    }
    Ok(out)
}

fn profile_json(p: &MeasureProfile) -> Value {
    serde_json::to_value(p).expect("profiles serialize")
}

fn tables(items: impl IntoIterator<Item = (&'static str, Table)>) -> BTreeMap<String, Table> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Envelope of `p` against `target`: both ends within `tol`.
fn envelope_checks(prefix: &str, p: &MeasureProfile, target: f64, tol: f64) -> [Check; 2] {
    [
        Check::within(format!("{prefix}_liminf"), p.liminf, target, tol),
        Check::within(format!("{prefix}_limsup"), p.limsup, target, tol),
    ]
}

/// `depth` is `M`: the frames carry `2(M² + 1)` labels.
fn paper_counterexample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let m = cfg.depth.unwrap_or(1024);
    let tol = cfg.tolerance.unwrap_or(0.02);
    let opts = cfg.measure(EdgePolicy::default());
    let pair = NonAdditivePair::new(NonAdditivePair::labels_for(m));
    let mf = frame_measure(&pair.f, &opts)?;
    let mg = frame_measure(&pair.g, &opts)?;
    let mfg = frame_measure(&pair.fg, &opts)?;

    let mut checks = Vec::new();
    checks.extend(envelope_checks("F", &mf.profile, 0.5, tol));
    checks.extend(envelope_checks("G", &mg.profile, 0.25, tol));
    checks.extend(envelope_checks("FG", &mfg.profile, 0.5, tol));

    let afg = analyze(&pair.fg, &opts.analyze)?;
    let stable_labels = match mfg.stable_blocks {
        0 => 0,
        k => pair.fg.decomp().block_sizes()[k - 1],
    };
    let dual = explicit_dual_agreement(&pair.fg, &afg, stable_labels).unwrap_or(f64::INFINITY);
    checks.push(Check::at_most("explicit_dual_agreement", dual, 1e-8));

    let k = mf.stable_blocks.min(mg.stable_blocks).min(mfg.stable_blocks);
    let (s, e) = mg.profile.tail_window;
    let e = e.min(k);
    let residual = (s - 1..e)
        .map(|n| (mfg.sequence.a[n] - mf.sequence.a[n] - mg.sequence.a[n]).abs())
        .fold(0.0, f64::max);
    let residual_lo = (s - 1..e)
        .map(|n| (mfg.sequence.a[n] - mf.sequence.a[n] - mg.sequence.a[n]).abs())
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::within("additivity_residual_max", residual, 0.25, tol));
    checks.push(Check::within("additivity_residual_min", residual_lo, 0.25, tol));
    let sf = superframe_check(
        &pair.f,
        &pair.g,
        &SuperframeOptions {
            analyze: opts.analyze,
            policy: opts.policy,
            ..SuperframeOptions::default()
        },
    )?;
    checks.push(Check::holds("superframe", sf.is_superframe));

    let mut t = Table::new(&["n", "size", "a_F", "a_G", "a_FG", "residual"]);
    for n in 0..k {
        t.push(vec![
            (n + 1).into(),
            mf.sequence.block_sizes[n].into(),
            mf.sequence.a[n].into(),
            mg.sequence.a[n].into(),
            mfg.sequence.a[n].into(),
            (mfg.sequence.a[n] - mf.sequence.a[n] - mg.sequence.a[n]).abs().into(),
        ]);
    }
    let data = json!({
        "M": m,
        "labels": pair.f.len(),
        "stable_blocks": {"F": mf.stable_blocks, "G": mg.stable_blocks, "FG": mfg.stable_blocks},
        "profiles": {"F": profile_json(&mf.profile), "G": profile_json(&mg.profile), "FG": profile_json(&mfg.profile)},
        "superframe": sf,
    });
    Ok(Outcome::new(
        ExperimentKind::PaperCounterexample,
        checks,
        data,
        tables([("measures.csv", t)]),
    ))
}

/// `depth` is the dimension, `trials` the number of random bases.
fn riesz(cfg: &ExperimentConfig) -> Result<Outcome> {
    let d = cfg.depth.unwrap_or(64);
    let trials = cfg.trials.unwrap_or(10);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let opts = cfg.measure(EdgePolicy::Exact);
    let mut worst = 0.0f64;
    let mut t = Table::new(&["trial", "lower_bound", "upper_bound", "max_deviation"]);
    for trial in 0..trials {
        let f = models::random_riesz_basis(&mut rng, d);
        let fm = frame_measure(&f, &opts)?;
        let dev = fm.sequence.a.iter().map(|a| (a - 1.0).abs()).fold(0.0, f64::max);
        let (lo, hi) = analyze(&f, &opts.analyze)?.frame_bounds();
        worst = worst.max(dev);
        t.push(vec![trial.into(), lo.into(), hi.into(), dev.into()]);
    }
    let checks = vec![Check::within("max_deviation_from_one", worst, 0.0, tol)];
    Ok(Outcome::new(
        ExperimentKind::Riesz,
        checks,
        json!({"dimension": d, "trials": trials}),
        tables([("bases.csv", t)]),
    ))
}

/// Random split of `0..n` into two label sets.
fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

/// Family carried by the marked positions. With `redundancy = None` the
/// members are distinct orthonormal vectors; otherwise random dense vectors
/// in a space of dimension `⌈count / redundancy⌉`.
fn family_on(
    rng: &mut ChaCha8Rng,
    decomp: &Arc<IndexDecomposition>,
    marked: &[bool],
    redundancy: Option<f64>,
) -> Result<FrameSnapshot> {
    let count = marked.iter().filter(|&&m| m).count().max(1);
    let dim = match redundancy {
        None => count,
        Some(r) => ((count as f64 / r).ceil() as usize).max(1),
    };
    let mut k = 0;
    let vectors = marked
        .iter()
        .map(|&m| {
            if !m {
                return FrameVector::zero();
            }
            k += 1;
            match redundancy {
                None => FrameVector::basis(k - 1),
                Some(_) => FrameVector::from_dense(
                    &(0..dim)
                        .map(|_| crate::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect::<Vec<_>>(),
                ),
            }
        })
        .collect();
    FrameSnapshot::new(dim, vectors, decomp.clone())
}

/// `depth` is the number of labels, `trials` the number of random splits.
fn orthogonal_additivity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let labels = cfg.depth.unwrap_or(256);
    let trials = cfg.trials.unwrap_or(20);
    let tol = cfg.tolerance.unwrap_or(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let opts = cfg.measure(EdgePolicy::Exact);
    let decomp = Arc::new(IndexDecomposition::naturals(labels));
    let (mut perp, mut dense) = (0.0f64, 0.0f64);
    let mut t = Table::new(&["trial", "family", "max_residual"]);
    for trial in 0..trials {
        let marked = random_partition(&mut rng, labels);
        let rest: Vec<bool> = marked.iter().map(|m| !m).collect();
        for (family, redundancy) in [("perp_normal", None), ("dense", Some(1.5))] {
            let f1 = family_on(&mut rng, &decomp, &marked, redundancy)?;
            let f2 = family_on(&mut rng, &decomp, &rest, redundancy)?;
            let fs = crate::frame::direct_sum(&f1, &f2)?;
            let (m1, m2, ms) = (
                frame_measure(&f1, &opts)?,
                frame_measure(&f2, &opts)?,
                frame_measure(&fs, &opts)?,
            );
            let r = (0..labels)
                .map(|n| (ms.sequence.a[n] - m1.sequence.a[n] - m2.sequence.a[n]).abs())
                .fold(0.0, f64::max);
            if redundancy.is_none() {
                perp = perp.max(r);
            } else {
                dense = dense.max(r);
            }
            t.push(vec![trial.into(), Cell::Text(family.into()), r.into()]);
        }
    }
    let checks = vec![
        Check::within("perp_normal_residual", perp, 0.0, tol),
        Check::within("dense_residual", dense, 0.0, tol),
    ];
    Ok(Outcome::new(
        ExperimentKind::OrthogonalAdditivity,
        checks,
        json!({"labels": labels, "trials": trials}),
        tables([("residuals.csv", t)]),
    ))
}

/// `x_{2n} = x_{2n+1} = (2/3)(4ⁿ − 1)` on blocks of size `2ⁿ`.
pub fn two_cluster_sequence(depth: usize) -> Result<RealSequence> {
    let sizes: Vec<usize> = (1..=depth).map(|n| 1usize << n).collect();
    RealSequence::from_fn(sizes, |k, _| {
        let n = k / 2;
        2.0 * (4f64.powi(n as i32) - 1.0) / 3.0
    })
}

/// `depth` is the number of blocks.
fn two_cluster(cfg: &ExperimentConfig) -> Result<Outcome> {
    let depth = cfg.depth.unwrap_or(20);
    let tol = cfg.tolerance.unwrap_or(1e-3);
    let x = two_cluster_sequence(depth)?;
    let popts = ProfileOptions::default();
    let p = profile_sequence(&x, &popts)?;
    let mut checks = vec![
        Check::holds("frame_compatible", seq::is_frame_compatible(&x)),
        Check::within("liminf", p.liminf, 1.0 / 3.0, tol),
        Check::within("limsup", p.limsup, 2.0 / 3.0, tol),
        Check::within("cluster_count", p.clusters.len() as f64, 2.0, 0.0),
    ];
    let decomp = Arc::new(IndexDecomposition::naturals_with_blocks(x.block_sizes().to_vec())?);
    let frame = synth_perp_normal(&x, decomp)?;
    let fm = frame_measure(frame.snapshot(), &cfg.measure(EdgePolicy::Exact))?;
    checks.push(Check::within("frame_liminf", fm.profile.liminf, 1.0 / 3.0, tol));
    checks.push(Check::within("frame_limsup", fm.profile.limsup, 2.0 / 3.0, tol));

    let mut t = Table::new(&["n", "size", "x", "normalized", "frame_a"]);
    for (n, ((v, a), s)) in x.values().iter().zip(x.normalized()).zip(x.block_sizes()).enumerate() {
        t.push(vec![
            (n + 1).into(),
            (*s).into(),
            (*v).into(),
            a.into(),
            fm.sequence.a[n].into(),
        ]);
    }
    Ok(Outcome::new(
        ExperimentKind::TwoCluster,
        checks,
        json!({"depth": depth, "profile": profile_json(&p), "frame_profile": profile_json(&fm.profile)}),
        tables([("sequence.csv", t)]),
    ))
}

/// Sides `4, 8, …, N` of boxes centered at `(−½, −½)`. Each side-`4k` box
/// holds exactly `(2k)²` points of `2ℤ × 2ℤ` and of its unit jitters.
pub fn quarter_sides(n: usize) -> Vec<f64> {
    (1..=n / 4).map(|k| (4 * k) as f64).collect()
}

pub fn offset_box() -> BoxSpec {
    BoxSpec::centered([-0.5, -0.5])
}

/// `N` defaults to 16 (regular) or 64 (jittered), steps to `(2, 2)`.
fn gabor_law(cfg: &ExperimentConfig, jittered: bool) -> Result<Outcome> {
    let n = cfg.modulus.unwrap_or(if jittered { 64 } else { 16 });
    let [a, b] = cfg.steps.unwrap_or([2, 2]);
    let tol = cfg.tolerance.unwrap_or(if jittered { 1e-2 } else { 1e-9 });
    let lattice = if jittered {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
        GaborLattice::jittered(&mut rng, n, a, b, 1)?
    } else {
        GaborLattice::regular(n, a, b)?
    };
    let window = window_from_key("gaussian", n)?;
    let sides = quarter_sides(n);
    let boxes = offset_box();
    let g = gabor_system(&window, &lattice, &boxes, &sides)?;
    let opts = cfg.measure(EdgePolicy::Exact);
    let est = density_estimate(&lattice, &boxes, &sides, None, &opts.profile, opts.analyze.exec)?;
    let report = measure_vs_density(&g, &est, &opts, tol)?;

    let mut checks = Vec::new();
    if !jittered {
        let target = (a * b) as f64 / n as f64;
        checks.extend(envelope_checks("measure", &report.measure, target, tol));
    }
    checks.push(Check::within("product_residual", report.product_residual, 0.0, tol));
    checks.push(Check::within("interval_residual", report.interval_residual, 0.0, tol));

    let mut t = Table::new(&["n", "side", "count", "a", "density", "product"]);
    for (k, p) in report.products.iter().enumerate() {
        let a_k = if est.ratios[k] != 0.0 {
            p / est.ratios[k]
        } else {
            f64::NAN
        };
        t.push(vec![
            (k + 1).into(),
            sides[k].into(),
            est.counts[k].into(),
            a_k.into(),
            est.ratios[k].into(),
            (*p).into(),
        ]);
    }
    let kind = if jittered {
        ExperimentKind::GaborJittered
    } else {
        ExperimentKind::GaborRegular
    };
    Ok(Outcome::new(
        kind,
        checks,
        json!({"N": n, "steps": [a, b], "report": report}),
        tables([("measure_density.csv", t)]),
    ))
}

/// Regular `2ℤ × 2ℤ` and its unit jitter, both with the Gaussian window,
/// paired point by point on the regular system's boxes.
pub fn gabor_superframe_residual(
    n: usize,
    seed: u64,
    opts: &MeasureOptions,
) -> Result<crate::operators::AdditivityReport> {
    let window = window_from_key("gaussian", n)?;
    let regular = GaborLattice::regular(n, 2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jittered = GaborLattice::jittered(&mut rng, n, 2, 2, 1)?;
    let g1 = gabor_system(&window, &regular, &offset_box(), &quarter_sides(n))?;
    let f2 = gabor_system_on(&g1, &window, &jittered, None)?;
    superset_additivity_report(&g1.frame, &f2, opts)
}

/// `N` is the largest group order; orders double from 16.
fn superframe_additivity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let top = cfg.modulus.unwrap_or(64);
    let tol = cfg.tolerance.unwrap_or(0.03);
    let seed = cfg.seed.unwrap_or(0);
    let opts = cfg.measure(EdgePolicy::Exact);
    let mut ns = Vec::new();
    let mut n = 16;
    while n <= top {
        ns.push(n);
        n *= 2;
    }
    if ns.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "N = {top} leaves fewer than two orders from 16"
        )));
    }
    let mut t = Table::new(&["N", "residual", "residual_all", "p1p2_norm", "superframe"]);
    let mut residuals = Vec::new();
    let mut reports = Vec::new();
    for &n in &ns {
        let r = gabor_superframe_residual(n, seed, &opts)?;
        t.push(vec![
            n.into(),
            r.residual.into(),
            r.residual_all.into(),
            r.superframe.p1p2_norm.into(),
            r.superframe.is_superframe.into(),
        ]);
        residuals.push(r.residual);
        reports.push(json!({"N": n, "residual": r.residual, "superframe": r.superframe}));
    }
    let checks = vec![
        Check::holds("residual_decreasing", residuals.windows(2).all(|w| w[1] < w[0])),
        Check::at_most("residual_at_largest_N", *residuals.last().expect("nonempty"), tol),
    ];
    Ok(Outcome::new(
        ExperimentKind::SuperframeAdditivity,
        checks,
        json!({"orders": ns, "runs": reports}),
        tables([("residuals.csv", t)]),
    ))
}

fn floor_counts(x: &RealSequence) -> Vec<i64> {
    x.values().iter().map(|v| v.floor() as i64).collect()
}

fn random_blocks(rng: &mut ChaCha8Rng, depth: usize) -> Vec<usize> {
    let mut acc = 0;
    (0..depth)
        .map(|_| {
            acc += rng.random_range(1..=5);
            acc
        })
        .collect()
}

/// `trials` random sequences on `depth` random blocks.
fn synthesis(cfg: &ExperimentConfig) -> Result<Outcome> {
    let trials = cfg.trials.unwrap_or(1000);
    let depth = cfg.depth.unwrap_or(24);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let aopts = cfg.analyze();
    let (mut synth_exact, mut spectral_exact, mut whole_exact) = (0, 0, 0);
    let (mut parts_sum, mut parts_counts, mut first_bound, mut all_bounds) = (0, 0, 0, 0);
    // Trials where `Σ_k ⌊x^k_n⌋ < ⌊z_n⌋` for some `n`: there the per-part
    // upper bounds cannot add up to `⌊z⌋`.
    let mut floor_deficit = 0;
    let mut t = Table::new(&["trial", "parts", "labels", "bound_violations"]);
    for trial in 0..trials {
        let sizes = random_blocks(&mut rng, depth);
        let decomp = Arc::new(IndexDecomposition::naturals_with_blocks(sizes.clone())?);
        let x = seq::random_frame_compatible(&mut rng, sizes.clone())?;
        let f = synth_perp_normal(&x, decomp.clone())?;
        let floor = floor_counts(&x);
        synth_exact += usize::from(f.b_counts() == floor);
        let spectral = floor_counts(&frame_b_floor(f.snapshot(), &aopts)?);
        spectral_exact += usize::from(spectral == floor);

        let k = rng.random_range(2..=3);
        let xs: Vec<RealSequence> = (0..k)
            .map(|_| seq::random_frame_compatible(&mut rng, sizes.clone()).map(|x| x.scale(1.0 / k as f64)))
            .collect::<Result<_>>()?;
        let mut z = xs[0].clone();
        for x in &xs[1..] {
            z = z.add(x)?;
        }
        let split = split_superset(&xs, decomp)?;
        let zf = floor_counts(&z);
        let floors: Vec<Vec<i64>> = xs.iter().map(floor_counts).collect();
        floor_deficit += usize::from((0..depth).any(|n| floors.iter().map(|f| f[n]).sum::<i64>() < zf[n]));
        whole_exact += usize::from(split.whole.b_counts() == zf);
        let sum: Vec<i64> = (0..depth).map(|n| split.targets.iter().map(|t| t[n]).sum()).collect();
        parts_sum += usize::from(sum == zf);
        parts_counts += usize::from(split.parts.iter().zip(&split.targets).all(|(p, t)| p.b_counts() == *t));
        let bounds = split_bound_report(&xs, &split.targets);
        first_bound += usize::from(bounds[0].violations.is_empty());
        let violations: usize = bounds.iter().map(|b| b.violations.len()).sum();
        all_bounds += usize::from(violations == 0);
        t.push(vec![trial.into(), k.into(), sizes[depth - 1].into(), violations.into()]);
    }
    let all = trials as f64;
    let checks = vec![
        Check::within("synth_b_equals_floor", synth_exact as f64, all, 0.0),
        Check::within("synth_spectral_b_equals_floor", spectral_exact as f64, all, 0.0),
        Check::within("split_whole_equals_floor_z", whole_exact as f64, all, 0.0),
        Check::within("split_parts_sum_to_floor_z", parts_sum as f64, all, 0.0),
        Check::within("split_parts_realize_targets", parts_counts as f64, all, 0.0),
        Check::within("split_first_part_bound", first_bound as f64, all, 0.0),
        Check::within("split_every_part_bound", all_bounds as f64, all, 0.0),
    ];
    Ok(Outcome::new(
        ExperimentKind::Synthesis,
        checks,
        json!({"trials": trials, "depth": depth, "floor_deficit_trials": floor_deficit}),
        tables([("split.csv", t)]),
    ))
}

/// `trials` pairs on `depth` blocks of size `10⁶·n`.
fn lattice_laws(cfg: &ExperimentConfig) -> Result<Outcome> {
    let trials = cfg.trials.unwrap_or(500);
    let depth = cfg.depth.unwrap_or(64);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let sizes: Vec<usize> = (1..=depth).map(|n| n * 1_000_000).collect();
    let popts = ProfileOptions::default();
    let (mut wedge_err, mut vee_err) = (0.0f64, 0.0f64);
    let mut closed = true;
    let mut t = Table::new(&[
        "trial",
        "limit_x",
        "limit_y",
        "wedge_liminf",
        "wedge_limsup",
        "vee_liminf",
        "vee_limsup",
    ]);
    for trial in 0..trials {
        let lx = rng.random_range(0.05..0.95);
        let ly = rng.random_range(0.05..0.95);
        let x = seq::random_convergent_compatible(&mut rng, sizes.clone(), lx)?;
        let y = seq::random_convergent_compatible(&mut rng, sizes.clone(), ly)?;
        let w = seq::wedge(&x, &y)?;
        let v = seq::vee(&x, &y)?;
        closed &= seq::is_frame_compatible(&w) && seq::is_frame_compatible(&v);
        let pw = profile_sequence(&w, &popts)?;
        let pv = profile_sequence(&v, &popts)?;
        let (lo, hi) = (lx.min(ly), lx.max(ly));
        wedge_err = wedge_err.max((pw.liminf - lo).abs()).max((pw.limsup - lo).abs());
        vee_err = vee_err.max((pv.liminf - hi).abs()).max((pv.limsup - hi).abs());
        t.push(vec![
            trial.into(),
            lx.into(),
            ly.into(),
            pw.liminf.into(),
            pw.limsup.into(),
            pv.liminf.into(),
            pv.limsup.into(),
        ]);
    }
    let checks = vec![
        Check::within("wedge_profile_is_min", wedge_err, 0.0, tol),
        Check::within("vee_profile_is_max", vee_err, 0.0, tol),
        Check::holds("closure", closed),
    ];
    Ok(Outcome::new(
        ExperimentKind::LatticeLaws,
        checks,
        json!({"trials": trials, "depth": depth}),
        tables([("pairs.csv", t)]),
    ))
}

/// Tracial residuals `r_n` of `(T, T*)` on `I_n = [−n, n]`, `n ≤ depth`,
/// for an operator materialized on `[−depth − pad, depth + pad]`.
pub fn tracial_profile(depth: usize, pad: usize, dense: bool, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decomp = Arc::new(IndexDecomposition::integer_boxes(depth + pad));
    let t = if dense {
        models::random_dense_operator(&mut rng, decomp)?
    } else {
        models::random_banded_operator(&mut rng, decomp, 3)?
    };
    let r = tracial_residual(&t, &t.adjoint(), exec)?;
    Ok(r.values()[..depth].to_vec())
}

/// Largest value of the first and of the last quarter.
fn quarter_maxima(v: &[f64]) -> (f64, f64) {
    let q = (v.len() / 4).max(1);
    let max = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    (max(&v[..q]), max(&v[v.len() - q..]))
}

/// `depth` is the last box `[−n, n]`.
fn tracial(cfg: &ExperimentConfig) -> Result<Outcome> {
    let depth = cfg.depth.unwrap_or(256);
    let tol = cfg.tolerance.unwrap_or(0.05);
    let seed = cfg.seed.unwrap_or(0);
    let banded = tracial_profile(depth, 8, false, seed, cfg.exec())?;
    let dense = tracial_profile(depth, depth, true, seed, cfg.exec())?;
    let (first, last) = quarter_maxima(&banded);
    let checks = vec![
        Check::holds("banded_decreasing", last < first),
        Check::at_most("banded_last_block", banded[depth - 1], tol),
        Check::at_least("dense_last_block", dense[depth - 1], tol),
    ];
    let mut t = Table::new(&["n", "banded", "dense"]);
    for n in 0..depth {
        t.push(vec![(n + 1).into(), banded[n].into(), dense[n].into()]);
    }
    Ok(Outcome::new(
        ExperimentKind::Tracial,
        checks,
        json!({"depth": depth, "banded_first_quarter_max": first, "banded_last_quarter_max": last}),
        tables([("tracial.csv", t)]),
    ))
}

/// `depth` is the number of labels of the pair's `F`.
fn channel_run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let labels = cfg.depth.unwrap_or(2048);
    let opts = ChannelOptions {
        trials: cfg.trials.unwrap_or(10_000),
        seed: cfg.seed.unwrap_or(42),
        analyze: cfg.analyze(),
    };
    let f = NonAdditivePair::new(labels).f;
    let report = channel::simulate(&f, &opts)?;
    let other = Execution::Sequential;
    let again = channel::simulate(
        &f,
        &ChannelOptions {
            analyze: AnalyzeOptions {
                exec: if opts.analyze.exec == other {
                    Execution::Parallel
                } else {
                    other
                },
                ..opts.analyze
            },
            ..opts
        },
    )?;
    let identical = report
        .rows
        .iter()
        .zip(&again.rows)
        .all(|(x, y)| x.empirical.to_bits() == y.empirical.to_bits() && x.stderr.to_bits() == y.stderr.to_bits());
    let checks = vec![
        Check::at_least("fraction_within_4se", report.within_4se, 0.95),
        Check::holds("noise_selftest", report.selftest.pass()),
        Check::holds("bit_reproducible", identical),
    ];
    let mut t = Table::new(&["n", "analytic", "empirical", "stderr", "z"]);
    for r in &report.rows {
        t.push(vec![
            r.n.into(),
            r.analytic.into(),
            r.empirical.into(),
            r.stderr.into(),
            r.z.into(),
        ]);
    }
    Ok(Outcome::new(
        ExperimentKind::Channel,
        checks,
        json!({
            "labels": labels,
            "trials": report.trials,
            "seed": report.seed,
            "noise": report.noise,
            "within_4se": report.within_4se,
            "selftest": report.selftest,
        }),
        tables([("channel.csv", t)]),
    ))
}

/// `depth` is the dimension of the double basis.
fn excess(cfg: &ExperimentConfig) -> Result<Outcome> {
    let d = cfg.depth.unwrap_or(64);
    let alpha = cfg.alpha.unwrap_or(0.6);
    let epsilon = cfg.epsilon.unwrap_or(0.1);
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let f = models::interleaved_double_basis(d);
    let r = excess_probe(&f, alpha, epsilon, &cfg.measure(EdgePolicy::Exact))?;
    let checks = vec![
        Check::within(
            "removed_fraction",
            r.removed_positions.len() as f64 / f.len() as f64,
            0.5,
            0.0,
        ),
        Check::at_least(
            "remaining_lower_bound",
            r.remaining_bounds.0,
            r.required_lower_bound - tol,
        ),
        Check::holds("claim_satisfied", r.claim_satisfied),
    ];
    let mut t = Table::new(&["position", "label"]);
    for (p, l) in r.removed_positions.iter().zip(&r.removed_labels) {
        t.push(vec![(*p).into(), Cell::Text(l.to_string())]);
    }
    Ok(Outcome::new(
        ExperimentKind::Excess,
        checks,
        json!({"dimension": d, "report": r}),
        tables([("removed.csv", t)]),
    ))
}

/// Sides for `ℤ_12`: the last box covers the whole group.
const Z12_SIDES: [f64; 4] = [2.0, 6.0, 10.0, 13.0];

/// Superframe candidates of regular lattices on `ℤ_N`: every pair of
/// lattices with equal point counts, and two to four copies of one lattice,
/// each system with its own generic window; plus the violation of two
/// copies of `3ℤ × 3ℤ` with the same Gaussian window.
fn superframe_density(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = cfg.modulus.unwrap_or(12);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    if n != 12 {
        return Err(Error::InvalidArgument("superframe-density runs on Z_12".into()));
    }
    let opts = cfg.measure(EdgePolicy::Exact);
    let boxes = BoxSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let mut windows = vec![window_from_key("gaussian", n)?];
    for _ in 0..3 {
        windows.push(
            (0..n)
                .map(|_| crate::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
    }
    let steps = [1usize, 2, 3, 4, 6];
    let lattices: Vec<(usize, usize)> = steps.iter().flat_map(|&a| steps.iter().map(move |&b| (a, b))).collect();
    let component = |(a, b): (usize, usize), w: usize| -> Result<GaborComponent> {
        Ok(GaborComponent {
            window: windows[w].clone(),
            lattice: GaborLattice::regular(n, a, b)?,
            remap: None,
        })
    };
    let mut candidates: Vec<(String, Vec<GaborComponent>)> = Vec::new();
    for (j, &l1) in lattices.iter().enumerate() {
        for &l2 in &lattices[j + 1..] {
            if l1.0 * l1.1 == l2.0 * l2.1 {
                let label = format!("{}x{}+{}x{}", l1.0, l1.1, l2.0, l2.1);
                candidates.push((label, vec![component(l1, 0)?, component(l2, 1)?]));
            }
        }
        for d in 2..=4 {
            let label = vec![format!("{}x{}", l1.0, l1.1); d].join("+");
            candidates.push((label, (0..d).map(|w| component(l1, w)).collect::<Result<_>>()?));
        }
    }

    let mut t = Table::new(&["systems", "measure_sum", "det_sum", "superframe", "contradiction"]);
    let (mut passing, mut contradictions, mut max_sum) = (0usize, 0usize, 0.0f64);
    for (label, systems) in candidates {
        let r = superframe_density_condition(&systems, &boxes, &Z12_SIDES, &opts, tol)?;
        if r.superframe.is_superframe {
            passing += 1;
            max_sum = max_sum.max(r.measure_sum);
        }
        contradictions += usize::from(r.contradiction);
        t.push(vec![
            Cell::Text(label),
            r.measure_sum.into(),
            r.det_sum.unwrap_or(f64::NAN).into(),
            r.superframe.is_superframe.into(),
            r.contradiction.into(),
        ]);
    }
    let violation = superframe_density_condition(
        &[component((3, 3), 0)?, component((3, 3), 0)?],
        &boxes,
        &Z12_SIDES,
        &opts,
        tol,
    )?;
    let checks = vec![
        Check::at_least("passing_superframes", passing as f64, 1.0),
        Check::at_most("max_measure_sum_of_superframes", max_sum, 1.0 + tol),
        Check::within("contradictions", contradictions as f64, 0.0, 0.0),
        Check::within("violation_measure_sum", violation.measure_sum, 1.5, tol),
        Check::holds("violation_is_not_superframe", !violation.superframe.is_superframe),
    ];
    Ok(Outcome::new(
        ExperimentKind::SuperframeDensity,
        checks,
        json!({"N": n, "candidates": t.rows.len(), "passing": passing, "violation": violation}),
        tables([("candidates.csv", t)]),
    ))
}

/// Profile of `inputs[0]`, truncated to `depth` blocks when given.
fn frame_measure_file(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut frame = io::read_frame(&cfg.inputs[0])?;
    if let Some(d) = cfg.depth {
        frame = frame.truncate(d)?;
    }
    let policy = if cfg.exact {
        EdgePolicy::Exact
    } else {
        EdgePolicy::default()
    };
    let opts = cfg.measure(policy);
    let fm = frame_measure(&frame, &opts)?;
    let (lo, hi) = analyze(&frame, &opts.analyze)?.frame_bounds();
    let checks = vec![Check::at_least("stable_blocks", fm.stable_blocks as f64, 4.0)];
    let mut t = Table::new(&["n", "size", "a", "b", "stable", "digits"]);
    let s = &fm.sequence;
    for k in 0..s.len() {
        t.push(vec![
            (k + 1).into(),
            s.block_sizes[k].into(),
            s.a[k].into(),
            s.b[k].into(),
            s.stable[k].into(),
            s.agreement_digits[k].into(),
        ]);
    }
    Ok(Outcome::new(
        ExperimentKind::FrameMeasure,
        checks,
        json!({
            "input": cfg.inputs[0],
            "frame_bounds": [lo, hi],
            "profile": profile_json(&fm.profile),
            "redundancy": crate::measure::redundancy(&fm.profile).ok(),
            "warnings": fm.warnings,
        }),
        tables([("measure.csv", t)]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_bad_values() {
        let err = ExperimentConfig::from_json(r#"{"kind": "riesz", "tolerance": -1, "depth": 2}"#).unwrap_err();
        match err {
            Error::Schema(v) => assert_eq!(v.len(), 2),
            e => panic!("{e}"),
        }
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"kind": "riesz", "bogus": 1}"#),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            ExperimentConfig::from_json("{\"kind\": \"riesz\",\n  x"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::from_name(k.name()), Some(k));
            let v = serde_json::to_value(k).unwrap();
            assert_eq!(v, Value::String(k.name().into()));
        }
    }

    #[test]
    fn two_cluster_sequence_values() {
        let x = two_cluster_sequence(6).unwrap();
        assert_eq!(x.values(), &[0.0, 2.0, 2.0, 10.0, 10.0, 42.0]);
        assert!(seq::is_frame_compatible(&x));
    }

    #[test]
    fn small_runs_pass() {
        for (kind, depth) in [
            (ExperimentKind::Riesz, Some(8)),
            (ExperimentKind::TwoCluster, Some(16)),
            (ExperimentKind::Excess, Some(8)),
            (ExperimentKind::GaborRegular, None),
            (ExperimentKind::OrthogonalAdditivity, Some(32)),
        ] {
            let cfg = ExperimentConfig {
                depth,
                trials: Some(3),
                ..ExperimentConfig::of(kind)
            };
            let out = run(&cfg).unwrap();
            assert!(out.pass, "{kind}: {:#?}", out.checks);
        }
    }

    #[test]
    fn outcome_is_deterministic() {
        let cfg = ExperimentConfig {
            depth: Some(8),
            trials: Some(4),
            seed: Some(5),
            ..ExperimentConfig::of(ExperimentKind::Riesz)
        };
        let a = io::to_json(&run(&cfg).unwrap()).unwrap();
        let b = io::to_json(&run(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn summary_and_tables_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            depth: Some(16),
            output_dir: Some(dir.path().to_path_buf()),
            ..ExperimentConfig::of(ExperimentKind::TwoCluster)
        };
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.artifacts, vec!["sequence.csv".to_string()]);
        let summary: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["pass"], Value::Bool(true));
        assert_eq!(
            io::read_csv_column(&dir.path().join("sequence.csv"), "n")
                .unwrap()
                .len(),
            16
        );
    }
}
