//! Ready-made frames used by suites, tests and benchmarks.

use std::sync::Arc;

use rand::Rng;

use nalgebra::DMatrix;

use crate::frame::{FrameSnapshot, FrameVector};
use crate::index::{IndexDecomposition, QuasiMetric};
use crate::operators::OperatorSnapshot;
use crate::{Result, C64};

/// `f_i = e_i` on every label.
pub fn orthonormal_basis(decomp: IndexDecomposition) -> FrameSnapshot {
    let n = decomp.len();
    FrameSnapshot::new(n, (0..n).map(FrameVector::basis).collect(), Arc::new(decomp)).expect("valid by construction")
}

/// Two interleaved copies of an orthonormal basis of `ℂ^d`: `f_i = e_{⌊i/2⌋}`
/// on `I_n = {1, …, n}`, `n ≤ 2d`.
pub fn interleaved_double_basis(d: usize) -> FrameSnapshot {
    let decomp = Arc::new(IndexDecomposition::naturals(2 * d));
    FrameSnapshot::new(d, (0..2 * d).map(|i| FrameVector::basis(i / 2)).collect(), decomp)
        .expect("valid by construction")
}

/// Perpendicular-normal frame carried by the positions with the given
/// parity; ambient dimension is the number of such positions.
pub fn parity_basis(decomp: &IndexDecomposition, parity: usize) -> FrameSnapshot {
    let n = decomp.len();
    let mut k = 0;
    let vectors = (0..n)
        .map(|i| {
            if i % 2 == parity % 2 {
                k += 1;
                FrameVector::basis(k - 1)
            } else {
                FrameVector::zero()
            }
        })
        .collect();
    FrameSnapshot::new(k.max(1), vectors, Arc::new(decomp.clone())).expect("valid by construction")
}

/// `f_i = T e_i` for a random complex `d × d` matrix `T`, resampled until
/// its smallest singular value exceeds `0.05`.
pub fn random_riesz_basis<R: Rng + ?Sized>(rng: &mut R, d: usize) -> FrameSnapshot {
    loop {
        let t = nalgebra::DMatrix::<C64>::from_fn(d, d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let smallest = t.clone().singular_values().min();
        if smallest > 0.05 {
            let rows: Vec<Vec<C64>> = (0..d).map(|j| t.column(j).iter().copied().collect()).collect();
            return FrameSnapshot::from_dense(Arc::new(IndexDecomposition::naturals(d)), &rows)
                .expect("valid by construction");
        }
    }
}

/// Random complex matrix with entries uniform in `[-1, 1]²` where
/// `d_sup(i, j) ≤ width` and zero elsewhere, carrying the sup metric.
pub fn random_banded_operator<R: Rng + ?Sized>(
    rng: &mut R,
    decomp: Arc<IndexDecomposition>,
    width: usize,
) -> Result<OperatorSnapshot> {
    let labels = decomp.labels();
    let n = labels.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if QuasiMetric::Sup.dist(&labels[i], &labels[j])? <= width as f64 {
                m[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
    }
    OperatorSnapshot::new(m, decomp, Some(QuasiMetric::Sup))
}

/// Random complex matrix with every entry uniform in `[-1, 1]²`.
pub fn random_dense_operator<R: Rng + ?Sized>(
    rng: &mut R,
    decomp: Arc<IndexDecomposition>,
) -> Result<OperatorSnapshot> {
    let n = decomp.len();
    let m = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    OperatorSnapshot::new(m, decomp, Some(QuasiMetric::Sup))
}

/// The pair `F`, `G` on `I_n = {1, …, n}` whose measure is not additive over
/// supersets, truncated to labels `1..=labels`.
///
/// `f_i = e_i` for even `i` and zero otherwise. For even `k`,
/// `g_k = g_{k²+1} = (e_k + e_{k²+1}) / 2`; all other `g_i` vanish. The
/// superset `F ⊕ G` carries its canonical dual as explicit oracle:
/// `h̃_k = e_k ⊕ 0` and `h̃_{k²+1} = −e_k ⊕ (e_k + e_{k²+1})` for even `k`,
/// zero elsewhere.
///
/// Basis vector `e_i` is coordinate `i − 1`. `G` keeps the partner
/// coordinate `k²` even when the partner label lies past the truncation, so
/// its ambient dimension grows like `labels²`; storage stays sparse.
#[derive(Debug, Clone)]
pub struct NonAdditivePair {
    pub f: FrameSnapshot,
    pub g: FrameSnapshot,
    pub fg: FrameSnapshot,
}

impl NonAdditivePair {
    /// Labels needed so that the pairs `(k, k² + 1)`, `k ≤ m`, are complete
    /// both at full and at half depth.
    pub fn labels_for(m: usize) -> usize {
        2 * (m * m + 1)
    }

    pub fn new(labels: usize) -> Self {
        let decomp = Arc::new(IndexDecomposition::naturals(labels));
        let one = C64::new(1.0, 0.0);
        let half = C64::new(0.5, 0.0);
        let is_partner = |i: usize| -> Option<usize> {
            // i = k² + 1 with k even and positive
            let k = (i.saturating_sub(1) as f64).sqrt().round() as usize;
            (k > 0 && k.is_multiple_of(2) && k * k + 1 == i).then_some(k)
        };

        let f_vecs: Vec<FrameVector> = (1..=labels)
            .map(|i| {
                if i % 2 == 0 {
                    FrameVector::basis(i - 1)
                } else {
                    FrameVector::zero()
                }
            })
            .collect();
        let f = FrameSnapshot::new(labels, f_vecs, decomp.clone()).expect("valid by construction");

        let last_even = labels - labels % 2;
        let g_dim = labels.max(last_even * last_even + 1);
        let g_vecs: Vec<FrameVector> = (1..=labels)
            .map(|i| {
                if i % 2 == 0 {
                    FrameVector::from_entries(vec![(i - 1, half), (i * i, half)])
                } else if let Some(k) = is_partner(i) {
                    FrameVector::from_entries(vec![(k - 1, half), (i - 1, half)])
                } else {
                    FrameVector::zero()
                }
            })
            .collect();
        let g = FrameSnapshot::new(g_dim, g_vecs, decomp.clone()).expect("valid by construction");

        let off = labels;
        let dual: Vec<FrameVector> = (1..=labels)
            .map(|i| {
                if i % 2 == 0 {
                    FrameVector::basis(i - 1)
                } else if let Some(k) = is_partner(i) {
                    FrameVector::from_entries(vec![(k - 1, -one), (off + k - 1, one), (off + i - 1, one)])
                } else {
                    FrameVector::zero()
                }
            })
            .collect();
        let fg = crate::frame::direct_sum(&f, &g)
            .expect("same decomposition")
            .with_explicit_dual(dual)
            .expect("valid by construction");
        Self { f, g, fg }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{analyze, explicit_dual_agreement, measure_sequence, AnalyzeOptions};
    use rand::SeedableRng;

    #[test]
    fn nonadditive_pair_diagonals() {
        let p = NonAdditivePair::new(20);
        let opts = AnalyzeOptions::default();
        let af = analyze(&p.f, &opts).unwrap();
        for (i, d) in af.diag_products().iter().enumerate() {
            let label = i + 1;
            assert_eq!(*d, if label % 2 == 0 { 1.0 } else { 0.0 });
        }
        let m = measure_sequence(&af, p.f.decomp()).unwrap();
        for n in 1..=20 {
            assert!((m.a[n - 1] - (n / 2) as f64 / n as f64).abs() < 1e-15);
        }
        let ag = analyze(&p.g, &opts).unwrap();
        // Pair (2, 5) and (4, 17) are complete, so those labels share a
        // vector and get 1/2; lone even labels get 1.
        for label in [2, 5, 4, 17] {
            assert!((ag.diag_products()[label - 1] - 0.5).abs() < 1e-12);
        }
        assert!((ag.diag_products()[5] - 1.0).abs() < 1e-12);
        let afg = analyze(&p.fg, &opts).unwrap();
        assert!(explicit_dual_agreement(&p.fg, &afg, 20).unwrap() < 1e-12);
    }

    #[test]
    fn riesz_basis_has_unit_diagonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let f = random_riesz_basis(&mut rng, 16);
        let a = analyze(&f, &AnalyzeOptions::default()).unwrap();
        assert!(a.diag_products().iter().all(|d| (d - 1.0).abs() < 1e-10));
    }

    #[test]
    fn parity_bases_are_disjoint() {
        let d = IndexDecomposition::naturals(7);
        let even = parity_basis(&d, 0);
        let odd = parity_basis(&d, 1);
        assert_eq!(even.ambient_dim(), 4);
        assert_eq!(odd.ambient_dim(), 3);
        assert!(even
            .vectors()
            .iter()
            .zip(odd.vectors())
            .all(|(a, b)| a.is_zero() != b.is_zero()));
    }
}
