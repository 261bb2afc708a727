//! `framekit` command line. Reports go to stdout as JSON (CSV where the
//! payload is a sequence); exit status is 0 on pass, 1 when a check fails
//! and 2 on input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use framekit::channel::{self, ChannelOptions};
use framekit::experiments::{self, ExperimentConfig, ExperimentKind};
use framekit::frame::{analyze, AnalyzeOptions, EdgePolicy, FrameSnapshot};
use framekit::gabor::{self, BoxSpec, CenterScan, GaborComponent, GaborLattice};
use framekit::index::IndexDecomposition;
use framekit::io::{self, Cell};
use framekit::measure::{self, MeasureOptions, ProfileOptions, TailWindow};
use framekit::operators::{self, SuperframeOptions};
use framekit::seq::{self, CompareOptions, RealSequence};
use framekit::{synth, Execution};

#[derive(Parser)]
#[command(name = "framekit", version, about = "Finite-truncation frame redundancy toolkit")]
struct Cli {
    /// Run inner loops sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frame compatible sequences (CSV with `size` and `value` columns).
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Frame files: validation, measure, Gram matrix.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Operators in the matrix format.
    #[command(subcommand)]
    Op(OpCmd),
    /// Supersets of two frames on one index set.
    #[command(subcommand)]
    Superframe(SuperframeCmd),
    /// Gabor systems on Z_N.
    #[command(subcommand)]
    Gabor(GaborCmd),
    /// Additive white noise channel.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Named experiments.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Args, Clone, Copy)]
struct ProfileArgs {
    /// Fraction of blocks, from the end, in the tail window.
    #[arg(long, default_value_t = 0.25)]
    window: f64,
    /// Resolution for clusters and convergence.
    #[arg(long, default_value_t = measure::DEFAULT_CLUSTER_EPS)]
    cluster_eps: f64,
}

impl ProfileArgs {
    fn options(self) -> ProfileOptions {
        ProfileOptions {
            window: TailWindow::LastFraction(self.window),
            cluster_eps: self.cluster_eps,
        }
    }
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Whether `0 ≤ x_n − x_{n−1} ≤ |I_n| − |I_{n−1}|` holds.
    Check { input: PathBuf },
    /// Profile of `x_n / |I_n|`.
    Profile {
        input: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Windowed comparison `x ≈ y`, `x ≦ y`.
    Compare {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = seq::DEFAULT_COMPARE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        tail_fraction: f64,
    },
    /// Perpendicular-normal frame with `b = ⌊x⌋`, written as a frame file.
    Synth {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Schema and invariant check.
    Validate { input: PathBuf },
    /// Measure profile and frame bounds.
    Measure {
        input: PathBuf,
        /// The file is the whole frame, not a truncation.
        #[arg(long)]
        exact: bool,
        /// Truncate to this many blocks first.
        #[arg(long)]
        depth: Option<usize>,
        /// Write `n, size, a, b, stable, digits` here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Gram matrix in the matrix format.
    Gram {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Metric key stored with the matrix.
        #[arg(long)]
        metric: Option<String>,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Block diagonal sums `b_n(A)`.
    Bmap { input: PathBuf },
    /// Off-diagonal tail energies outside metric balls.
    Tails {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Overrides the metric stored in the file.
        #[arg(long)]
        metric: Option<String>,
    },
    /// `|b_n(T1 T2) − b_n(T2 T1)| / |I_n|`.
    Tracial { t1: PathBuf, t2: PathBuf },
}

#[derive(Args)]
struct PairArgs {
    f1: PathBuf,
    f2: PathBuf,
    /// The files are whole frames, not truncations.
    #[arg(long)]
    exact: bool,
}

#[derive(Subcommand)]
enum SuperframeCmd {
    /// Whether `{f¹_i ⊕ f²_i}` is a frame for `span F1 ⊕ span F2`.
    Check(PairArgs),
    /// Measure of the superset against the sum of measures.
    Additivity(PairArgs),
}

#[derive(Args)]
struct LatticeArgs {
    /// Lattice file; otherwise a regular lattice from `--modulus` and `--steps`.
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Group order N.
    #[arg(long = "modulus", short = 'N')]
    modulus: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 2])]
    steps: Vec<usize>,
    /// Jitter each point by up to this many steps per coordinate.
    #[arg(long)]
    jitter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl LatticeArgs {
    fn build(&self) -> Result<GaborLattice> {
        if let Some(path) = &self.lattice {
            return Ok(io::read_lattice(path)?);
        }
        let Some(n) = self.modulus else {
            bail!(input("need --lattice or --modulus"));
        };
        let [a, b] = pair(&self.steps, "--steps")?;
        Ok(match self.jitter {
            Some(j) => GaborLattice::jittered(&mut ChaCha8Rng::seed_from_u64(self.seed), n, a, b, j)?,
            None => GaborLattice::regular(n, a, b)?,
        })
    }
}

#[derive(Args)]
struct BoxArgs {
    /// Box sides; defaults to 4, 8, …, N.
    #[arg(long, value_delimiter = ',')]
    sides: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_values_t = [-0.5f64, -0.5])]
    center: Vec<f64>,
}

impl BoxArgs {
    fn build(&self, n: Option<usize>) -> Result<(BoxSpec, Vec<f64>)> {
        let sides = match (&self.sides, n) {
            (Some(s), _) => s.clone(),
            (None, Some(n)) => experiments::quarter_sides(n),
            (None, None) => bail!(input("need --sides for a lattice without modulus")),
        };
        Ok((BoxSpec::centered(pair(&self.center, "--center")?), sides))
    }
}

#[derive(Subcommand)]
enum GaborCmd {
    /// Gabor system on the lattice boxes, written as a frame file.
    Build {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        boxes: BoxArgs,
        /// `delta`, `gaussian`, `gaussian:<sigma>` or `file:<path>`.
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Counts and normalized densities over boxes.
    Density {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        boxes: BoxArgs,
        /// Scan box centers over `[lo, hi]²` for Beurling bounds.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        scan: Option<Vec<f64>>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Measure of the system times the lattice density, per box.
    VerifyMeasure {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        boxes: BoxArgs,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Superset of regular systems `a,b,window` on Z_N with summed measures.
    Superframe {
        #[arg(long = "modulus", short = 'N')]
        modulus: usize,
        /// One `a,b,window` per system, e.g. `2,2,gaussian`.
        #[arg(long = "system", required = true)]
        systems: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0f64, 0.0])]
        center: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Per-block noise energy against `a_n`; CSV `n, analytic, empirical, stderr, z`.
    Sim {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary destination.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Mean, variance and lag-1 correlation of the noise generator.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Known experiment kinds.
    List,
    /// Runs experiment config files.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Parent directory for outputs without `output_dir`.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Runs kinds with their defaults; all kinds when none are given.
    Defaults {
        kinds: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Marks an error as caused by the input.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

enum Verdict {
    Pass,
    Fail,
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn pair<T: Copy>(v: &[T], flag: &str) -> Result<[T; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => bail!(input(format!(
            "{flag} takes two comma-separated values, got {}",
            v.len()
        ))),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    print!("{}", io::to_json(value)?);
    Ok(())
}

fn read_sequence(path: &Path) -> Result<RealSequence> {
    let sizes = io::read_csv_column(path, "size")?;
    let values = io::read_csv_column(path, "value")?;
    let sizes: Vec<usize> = sizes
        .iter()
        .map(|&s| {
            if s >= 0.0 && s.fract() == 0.0 {
                Ok(s as usize)
            } else {
                Err(input(format!(
                    "{}: block size {s} is not a nonnegative integer",
                    path.display()
                )))
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(RealSequence::new(values, sizes)?)
}

fn measure_options(exec: Execution, exact: bool, profile: ProfileOptions) -> MeasureOptions {
    MeasureOptions {
        analyze: AnalyzeOptions {
            exec,
            ..AnalyzeOptions::default()
        },
        policy: if exact {
            EdgePolicy::Exact
        } else {
            EdgePolicy::default()
        },
        profile,
    }
}

fn run_seq(cmd: SeqCmd) -> Result<Verdict> {
    match cmd {
        SeqCmd::Check { input } => {
            let x = read_sequence(&input)?;
            let violation = seq::frame_compatibility_violation(&x, 0.0);
            let ok = violation.is_none();
            print_json(&json!({
                "frame_compatible": ok,
                "violation": violation.map(|(block, reason)| json!({"block": block, "reason": reason})),
            }))?;
            Ok(verdict(ok))
        }
        SeqCmd::Profile { input, profile } => {
            let p = measure::profile_sequence(&read_sequence(&input)?, &profile.options())?;
            print_json(&p)?;
            Ok(Verdict::Pass)
        }
        SeqCmd::Compare {
            x,
            y,
            tol,
            tail_fraction,
        } => {
            let v = seq::compare(
                &read_sequence(&x)?,
                &read_sequence(&y)?,
                CompareOptions { tol, tail_fraction },
            )?;
            print_json(&v)?;
            Ok(Verdict::Pass)
        }
        SeqCmd::Synth { input, out } => {
            let x = read_sequence(&input)?;
            let decomp = Arc::new(IndexDecomposition::naturals_with_blocks(x.block_sizes().to_vec())?);
            let f = synth::synth_perp_normal(&x, decomp)?;
            io::write_frame(&out, f.snapshot())?;
            print_json(&json!({"labels": f.snapshot().len(), "b": f.b_counts()}))?;
            Ok(Verdict::Pass)
        }
    }
}

fn run_frame(cmd: FrameCmd, exec: Execution) -> Result<Verdict> {
    match cmd {
        FrameCmd::Validate { input } => {
            print_json(&io::validate_frame_file(&input)?)?;
            Ok(Verdict::Pass)
        }
        FrameCmd::Measure {
            input,
            exact,
            depth,
            csv,
            profile,
        } => {
            let mut frame = io::read_frame(&input)?;
            if let Some(d) = depth {
                frame = frame.truncate(d)?;
            }
            let opts = measure_options(exec, exact, profile.options());
            let fm = measure::frame_measure(&frame, &opts)?;
            let (lo, hi) = analyze(&frame, &opts.analyze)?.frame_bounds();
            if let Some(path) = csv {
                let s = &fm.sequence;
                let rows: Vec<Vec<Cell>> = (0..s.len())
                    .map(|k| {
                        vec![
                            (k + 1).into(),
                            s.block_sizes[k].into(),
                            s.a[k].into(),
                            s.b[k].into(),
                            s.stable[k].into(),
                            s.agreement_digits[k].into(),
                        ]
                    })
                    .collect();
                io::write_csv_file(&path, &["n", "size", "a", "b", "stable", "digits"], &rows)?;
            }
            print_json(&json!({
                "frame_bounds": [lo, hi],
                "stable_blocks": fm.stable_blocks,
                "profile": fm.profile,
                "redundancy": measure::redundancy(&fm.profile).ok(),
                "warnings": fm.warnings,
            }))?;
            Ok(Verdict::Pass)
        }
        FrameCmd::Gram { input, out, metric } => {
            let frame = io::read_frame(&input)?;
            io::write_gram(&out, &frame, metric)?;
            Ok(Verdict::Pass)
        }
    }
}

fn sequence_rows(x: &RealSequence) -> Vec<Vec<Cell>> {
    x.values()
        .iter()
        .zip(x.block_sizes())
        .enumerate()
        .map(|(k, (v, s))| vec![(k + 1).into(), (*s).into(), (*v).into()])
        .collect()
}

fn run_op(cmd: OpCmd, exec: Execution) -> Result<Verdict> {
    let stdout = std::io::stdout().lock();
    match cmd {
        OpCmd::Bmap { input } => {
            let b = operators::b_op(&io::read_matrix(&input)?)?;
            let rows: Vec<Vec<Cell>> = (0..b.re.len())
                .map(|k| {
                    vec![
                        (k + 1).into(),
                        b.re.block_sizes()[k].into(),
                        b.re.values()[k].into(),
                        b.im.values()[k].into(),
                    ]
                })
                .collect();
            io::write_csv(stdout, &["n", "size", "re", "im"], &rows)?;
        }
        OpCmd::Tails { input, radii, metric } => {
            let mut op = io::read_matrix(&input)?;
            if let Some(key) = metric {
                op = op.with_metric(framekit::index::QuasiMetric::from_key(&key)?);
            }
            let r = operators::nonexpansive_report(&op, &radii, exec)?;
            drop(stdout);
            print_json(&json!({"report": r, "monotone": r.is_monotone()}))?;
        }
        OpCmd::Tracial { t1, t2 } => {
            let r = operators::tracial_residual(&io::read_matrix(&t1)?, &io::read_matrix(&t2)?, exec)?;
            io::write_csv(stdout, &["n", "size", "residual"], &sequence_rows(&r))?;
        }
    }
    Ok(Verdict::Pass)
}

fn run_superframe(cmd: SuperframeCmd, exec: Execution) -> Result<Verdict> {
    let (args, additivity) = match cmd {
        SuperframeCmd::Check(a) => (a, false),
        SuperframeCmd::Additivity(a) => (a, true),
    };
    let f1 = io::read_frame(&args.f1)?;
    let f2 = io::read_frame(&args.f2)?;
    let opts = measure_options(exec, args.exact, ProfileOptions::default());
    if additivity {
        print_json(&operators::superset_additivity_report(&f1, &f2, &opts)?)?;
    } else {
        let sf = SuperframeOptions {
            analyze: opts.analyze,
            policy: opts.policy,
            ..SuperframeOptions::default()
        };
        print_json(&operators::superframe_check(&f1, &f2, &sf)?)?;
    }
    Ok(Verdict::Pass)
}

fn parse_system(spec: &str, n: usize) -> Result<GaborComponent> {
    let parts: Vec<&str> = spec.splitn(3, ',').collect();
    let [a, b, w] = parts[..] else {
        bail!(input(format!("system `{spec}` is not `a,b,window`")));
    };
    let step = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| input(format!("bad step `{s}` in `{spec}`")).into())
    };
    Ok(GaborComponent {
        window: gabor::window_from_key(w.trim(), n)?,
        lattice: GaborLattice::regular(n, step(a)?, step(b)?)?,
        remap: None,
    })
}

fn run_gabor(cmd: GaborCmd, exec: Execution) -> Result<Verdict> {
    match cmd {
        GaborCmd::Build {
            lattice,
            boxes,
            window,
            out,
        } => {
            let lat = lattice.build()?;
            let n = lat.modulus().context("Gabor systems need a finite lattice")?;
            let (spec, sides) = boxes.build(Some(n))?;
            let g = gabor::gabor_system(&gabor::window_from_key(&window, n)?, &lat, &spec, &sides)?;
            io::write_frame(&out, &g.frame)?;
            print_json(&json!({"N": n, "points": lat.len(), "blocks": g.frame.decomp().block_sizes()}))?;
            Ok(Verdict::Pass)
        }
        GaborCmd::Density {
            lattice,
            boxes,
            scan,
            profile,
        } => {
            let lat = lattice.build()?;
            let (spec, sides) = boxes.build(lat.modulus())?;
            let scan = scan
                .map(|s| pair(&s, "--scan"))
                .transpose()?
                .map(|[lo, hi]| CenterScan {
                    lo: [lo, lo],
                    hi: [hi, hi],
                });
            print_json(&gabor::density_estimate(
                &lat,
                &spec,
                &sides,
                scan,
                &profile.options(),
                exec,
            )?)?;
            Ok(Verdict::Pass)
        }
        GaborCmd::VerifyMeasure {
            lattice,
            boxes,
            window,
            tol,
        } => {
            let lat = lattice.build()?;
            let n = lat.modulus().context("Gabor systems need a finite lattice")?;
            let (spec, sides) = boxes.build(Some(n))?;
            let g = gabor::gabor_system(&gabor::window_from_key(&window, n)?, &lat, &spec, &sides)?;
            let opts = measure_options(exec, true, ProfileOptions::default());
            let est = gabor::density_estimate(&lat, &spec, &sides, None, &opts.profile, exec)?;
            let r = gabor::measure_vs_density(&g, &est, &opts, tol)?;
            print_json(&r)?;
            Ok(verdict(r.pass))
        }
        GaborCmd::Superframe {
            modulus,
            systems,
            sides,
            center,
            tol,
        } => {
            let comps: Vec<GaborComponent> = systems
                .iter()
                .map(|s| parse_system(s, modulus))
                .collect::<Result<_>>()?;
            let opts = measure_options(exec, true, ProfileOptions::default());
            let boxes = BoxSpec::centered(pair(&center, "--center")?);
            let r = gabor::superframe_density_condition(&comps, &boxes, &sides, &opts, tol)?;
            print_json(&r)?;
            Ok(verdict(!r.contradiction))
        }
    }
}

fn run_channel(cmd: ChannelCmd, exec: Execution) -> Result<Verdict> {
    match cmd {
        ChannelCmd::Sim {
            input,
            trials,
            seed,
            out,
            summary,
        } => {
            let frame: FrameSnapshot = io::read_frame(&input)?;
            let opts = ChannelOptions {
                trials,
                seed,
                analyze: AnalyzeOptions {
                    exec,
                    ..AnalyzeOptions::default()
                },
            };
            let r = channel::simulate(&frame, &opts)?;
            let rows: Vec<Vec<Cell>> = r
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.n.into(),
                        row.analytic.into(),
                        row.empirical.into(),
                        row.stderr.into(),
                        row.z.into(),
                    ]
                })
                .collect();
            let header = ["n", "analytic", "empirical", "stderr", "z"];
            match out {
                Some(p) => io::write_csv_file(&p, &header, &rows)?,
                None => io::write_csv(std::io::stdout().lock(), &header, &rows)?,
            }
            if let Some(p) = summary {
                io::write_json(
                    &p,
                    &json!({
                        "trials": r.trials,
                        "seed": r.seed,
                        "noise": r.noise,
                        "within_4se": r.within_4se,
                        "selftest": r.selftest,
                    }),
                )?;
            }
            Ok(verdict(r.within_4se >= 0.95 && r.selftest.pass()))
        }
        ChannelCmd::Selftest { seed, samples } => {
            let t = channel::noise_selftest(seed, samples)?;
            print_json(&t)?;
            Ok(verdict(t.pass()))
        }
    }
}

fn run_configs(configs: Vec<ExperimentConfig>, out: &Path, exec: Execution) -> Result<Verdict> {
    let mut all = true;
    for mut cfg in configs {
        cfg.sequential |= exec == Execution::Sequential;
        let kind = cfg.kind()?;
        if cfg.output_dir.is_none() {
            cfg.output_dir = Some(out.join(cfg.name.as_deref().unwrap_or(kind.name())));
        }
        let o = experiments::run_experiment(&cfg)?;
        println!("{} {}", if o.pass { "PASS" } else { "FAIL" }, o.experiment);
        for c in &o.checks {
            println!("  {c}");
        }
        all &= o.pass;
    }
    Ok(verdict(all))
}

fn run_suite(cmd: SuiteCmd, exec: Execution) -> Result<Verdict> {
    match cmd {
        SuiteCmd::List => {
            for k in ExperimentKind::ALL {
                println!("{:<24}{}", k.name(), k.about());
            }
            Ok(Verdict::Pass)
        }
        SuiteCmd::Run { configs, out } => {
            let cfgs = configs
                .iter()
                .map(|p| ExperimentConfig::read(p).with_context(|| format!("config {}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            run_configs(cfgs, &out, exec)
        }
        SuiteCmd::Defaults { kinds, out } => {
            let kinds: Vec<ExperimentKind> = if kinds.is_empty() {
                ExperimentKind::ALL
                    .into_iter()
                    .filter(|k| *k != ExperimentKind::FrameMeasure)
                    .collect()
            } else {
                kinds
                    .iter()
                    .map(|s| ExperimentKind::from_name(s).ok_or_else(|| input(format!("unknown experiment {s}"))))
                    .collect::<Result<_, _>>()?
            };
            run_configs(kinds.into_iter().map(ExperimentConfig::of).collect(), &out, exec)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("FRAMEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| input(format!("FRAMEKIT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<Verdict> {
    configure_threads()?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Seq(c) => run_seq(c),
        Command::Frame(c) => run_frame(c, exec),
        Command::Op(c) => run_op(c, exec),
        Command::Superframe(c) => run_superframe(c, exec),
        Command::Gabor(c) => run_gabor(c, exec),
        Command::Channel(c) => run_channel(c, exec),
        Command::Suite(c) => run_suite(c, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
