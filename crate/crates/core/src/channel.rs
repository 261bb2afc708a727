//! Monte Carlo additive white noise channel: coefficients `d_i = c_i + n_i`
//! are decoded with the associated Parseval frame, and the noise part
//! `ε_n = Σ_{i ∈ I_n} n_i f_i` is compared with `a_n = Σ ‖f_i‖² / |I_n|`.
//!
//! Noise is complex circular Gaussian with real and imaginary parts of
//! variance 1/2 each. Trial `t` draws from ChaCha8 seeded with `seed` on
//! stream `t`; trials are summed in fixed chunks, so results do not depend
//! on the execution mode.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::frame::{analyze, AnalyzeOptions, FrameSnapshot, FrameVector};
use crate::linalg::CompensatedSum;
use crate::{Error, Result, C64};

pub const MIN_TRIALS: usize = 100;
pub const MIN_SELFTEST_SAMPLES: usize = 10_000;
const CHUNK: usize = 64;
/// Stream reserved for the per-run noise self-test.
const SELFTEST_STREAM: u64 = u64::MAX;

pub const NOISE_CONVENTION: &str = "complex circular Gaussian, real and imaginary parts each of variance 1/2";

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, Copy)]
pub struct ChannelOptions {
    pub trials: usize,
    pub seed: u64,
    pub analyze: AnalyzeOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelRow {
    pub n: usize,
    pub size: usize,
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub trials: usize,
    pub seed: u64,
    pub noise: &'static str,
    pub rows: Vec<ChannelRow>,
    /// Fraction of blocks with `|z| ≤ 4`.
    pub within_4se: f64,
    pub selftest: NoiseSelftest,
}

/// Per-block `‖ε_n‖² / |I_n|` for one trial.
fn trial(vectors: &[FrameVector], sizes: &[usize], dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut eps = vec![C64::new(0.0, 0.0); dim];
    let mut norm = CompensatedSum::default();
    let mut out = Vec::with_capacity(sizes.len());
    let mut next = 0;
    for &s in sizes {
        for v in &vectors[next..s] {
            let noise = sample(rng);
            for &(c, z) in v.entries() {
                let old = eps[c].norm_sqr();
                eps[c] += noise * z;
                norm.add(eps[c].norm_sqr() - old);
            }
        }
        next = s;
        out.push(norm.value().max(0.0) / s as f64);
    }
    out
}

/// Runs the channel on the Parseval frame associated with `frame`.
pub fn simulate(frame: &FrameSnapshot, opts: &ChannelOptions) -> Result<ChannelReport> {
    if opts.trials < MIN_TRIALS {
        return Err(Error::TooFew {
            what: "trials",
            needed: MIN_TRIALS,
            got: opts.trials,
        });
    }
    let analysis = analyze(frame, &opts.analyze)?;
    let vectors = analysis.parseval_vectors(frame, opts.analyze.exec);
    let sizes = frame.decomp().block_sizes().to_vec();
    let dim = frame.ambient_dim();

    let mut analytic = Vec::with_capacity(sizes.len());
    let mut acc = CompensatedSum::default();
    let mut next = 0;
    for &s in &sizes {
        for v in &vectors[next..s] {
            acc.add(v.norm_sqr());
        }
        next = s;
        analytic.push(acc.value() / s as f64);
    }

    let chunks = opts.trials.div_ceil(CHUNK);
    let partial = opts.analyze.exec.map_range(chunks, |c| {
        let mut sum = vec![CompensatedSum::default(); sizes.len()];
        let mut sq = vec![CompensatedSum::default(); sizes.len()];
        for t in c * CHUNK..((c + 1) * CHUNK).min(opts.trials) {
            let mut rng = rng_for(opts.seed, t as u64);
            for (k, v) in trial(&vectors, &sizes, dim, &mut rng).into_iter().enumerate() {
                sum[k].add(v);
                sq[k].add(v * v);
            }
        }
        (
            sum.iter().map(CompensatedSum::value).collect::<Vec<_>>(),
            sq.iter().map(CompensatedSum::value).collect::<Vec<_>>(),
        )
    });
    let t = opts.trials as f64;
    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &size) in sizes.iter().enumerate() {
        let (mut s, mut q) = (CompensatedSum::default(), CompensatedSum::default());
        for (ps, pq) in &partial {
            s.add(ps[k]);
            q.add(pq[k]);
        }
        let mean = s.value() / t;
        let var = ((q.value() - t * mean * mean) / (t - 1.0)).max(0.0);
        let stderr = (var / t).sqrt();
        let diff = mean - analytic[k];
        let z = if stderr > 0.0 {
            diff / stderr
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        rows.push(ChannelRow {
            n: k + 1,
            size,
            analytic: analytic[k],
            empirical: mean,
            stderr,
            z,
        });
    }
    let within_4se = rows.iter().filter(|r| r.z.abs() <= 4.0).count() as f64 / rows.len() as f64;
    Ok(ChannelReport {
        trials: opts.trials,
        seed: opts.seed,
        noise: NOISE_CONVENTION,
        rows,
        within_4se,
        selftest: noise_selftest_stream(opts.seed, MIN_SELFTEST_SAMPLES, SELFTEST_STREAM)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSelftest {
    pub samples: usize,
    pub mean: (f64, f64),
    pub mean_stderr: f64,
    /// Mean of `|n_i|²`.
    pub variance: f64,
    pub variance_stderr: f64,
    /// Mean of `n_i n̄_{i+1}`.
    pub lag1: (f64, f64),
    pub lag1_stderr: f64,
    pub mean_ok: bool,
    pub variance_ok: bool,
    pub lag1_ok: bool,
}

impl NoiseSelftest {
    pub fn pass(&self) -> bool {
        self.mean_ok && self.variance_ok && self.lag1_ok
    }
}

/// Sample mean, variance and lag-1 correlation of the noise generator.
pub fn noise_selftest(seed: u64, samples: usize) -> Result<NoiseSelftest> {
    noise_selftest_stream(seed, samples, 0)
}

fn noise_selftest_stream(seed: u64, samples: usize, stream: u64) -> Result<NoiseSelftest> {
    if samples < MIN_SELFTEST_SAMPLES {
        return Err(Error::TooFew {
            what: "samples",
            needed: MIN_SELFTEST_SAMPLES,
            got: samples,
        });
    }
    let mut rng = rng_for(seed, stream);
    let xs: Vec<C64> = (0..samples).map(|_| sample(&mut rng)).collect();
    let s = samples as f64;
    let mean_of = |f: &dyn Fn(usize) -> f64, count: usize| -> (f64, f64) {
        let mut m = CompensatedSum::default();
        let mut q = CompensatedSum::default();
        for i in 0..count {
            let v = f(i);
            m.add(v);
            q.add(v * v);
        }
        let c = count as f64;
        let mean = m.value() / c;
        let var = ((q.value() - c * mean * mean) / (c - 1.0)).max(0.0);
        (mean, (var / c).sqrt())
    };
    let (mre, sre) = mean_of(&|i| xs[i].re, samples);
    let (mim, sim) = mean_of(&|i| xs[i].im, samples);
    let (var, var_se) = mean_of(&|i| xs[i].norm_sqr(), samples);
    let lag = |i: usize| xs[i] * xs[i + 1].conj();
    let (lre, lre_se) = mean_of(&|i| lag(i).re, samples - 1);
    let (lim, lim_se) = mean_of(&|i| lag(i).im, samples - 1);
    let mean_stderr = sre.hypot(sim);
    let lag1_stderr = lre_se.hypot(lim_se);
    Ok(NoiseSelftest {
        samples,
        mean: (mre, mim),
        mean_stderr,
        variance: var,
        variance_stderr: var_se,
        lag1: (lre, lim),
        lag1_stderr,
        mean_ok: mre.hypot(mim) < 4.0 / s.sqrt(),
        variance_ok: (var - 1.0).abs() <= 0.05,
        lag1_ok: lre.hypot(lim) <= 4.0 * lag1_stderr,
    })
}
