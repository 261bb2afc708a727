//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::C64;

/// Eigenpairs of a Hermitian matrix, eigenvalues in decreasing order.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], DMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Largest singular value via a Hermitian eigensolve of the smaller normal
/// matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let normal = if r <= c { m * m.adjoint() } else { m.adjoint() * m };
    let (vals, _) = hermitian_eigen(normal);
    vals[0].max(0.0).sqrt()
}

/// Schur test bound `‖A‖ ≤ sqrt(‖A‖₁ ‖A‖_∞)`, cheap for large matrices.
pub fn schur_norm_bound(m: &DMatrix<C64>) -> f64 {
    let max_col = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let max_row = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    (max_col * max_row).sqrt()
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    /// Groups of elements sharing a root, each sorted, groups ordered by
    /// their smallest element.
    pub fn groups(&mut self, include: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if !include(x) {
                continue;
            }
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}
