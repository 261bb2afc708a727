//! Finite-truncation numerics for frame redundancy.
//!
//! The crate works with frames indexed by a countable set that is exhausted
//! by nested finite blocks `I_1 ⊂ I_2 ⊂ …`. Every infinite-frame quantity is
//! replaced by what can be computed on a finite prefix of blocks:
//!
//! * [`frame`]: Gram operator, canonical dual, frame bounds, Gram projection
//!   and the measure sequences `a_n = b_n / |I_n|` with `b_n = Σ ⟨f_i, f̃_i⟩`.
//! * [`seq`]: frame compatible sequences, the windowed relations `≈` / `≦`,
//!   lattice operations and the positive decomposition of real sequences.
//! * [`synth`]: perpendicular-normal frames realizing `⌊x⌋` and the
//!   superset splitting of a sum of sequences.
//! * [`measure`]: accumulation-envelope profiles (liminf, limsup, clusters),
//!   frame comparison, excess probes and redundancy intervals.
//! * [`operators`]: block diagonal sums of matrices, off-diagonal tail
//!   energies, tracial residuals and superframe checks.
//! * [`gabor`]: exact Gabor systems on `ℓ²(ℤ_N)` and lattice densities over
//!   skewed boxes.
//! * [`channel`]: Monte Carlo realization of the additive white noise channel.
//! * [`io`] and [`experiments`]: file formats and reproducible suites;
//!   [`models`] holds the reference frames they use.
//!
//! Data-parallel inner loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and falls back to sequential iteration
//! otherwise.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod frame;
pub mod gabor;
pub mod index;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod models;
pub mod operators;
pub mod seq;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
