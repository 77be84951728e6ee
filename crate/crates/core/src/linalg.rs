//! Dense complex linear algebra on top of `faer`.

use crate::error::{Error, Result};
use crate::C;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::solvers::Solve;
use faer::{Mat, Par};

/// Which space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Quantum space of an `N`-site chain, dimension `2^N`.
    Spin(usize),
    /// Auxiliary space times quantum space, dimension `2^{N+1}`.
    AuxSpin(usize),
    /// Two two-dimensional spaces, dimension 4.
    TwoAux,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Spin(n) => 1 << n,
            Space::AuxSpin(n) => 1 << (n + 1),
            Space::TwoAux => 4,
        }
    }
}

/// Square complex matrix tagged with the space it acts on.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub space: Space,
    pub mat: Mat<C>,
}

impl DenseOperator {
    pub fn new(space: Space, mat: Mat<C>) -> Self {
        assert_eq!(mat.nrows(), space.dim(), "operator size does not match {space:?}");
        assert_eq!(mat.ncols(), space.dim(), "operator size does not match {space:?}");
        Self { space, mat }
    }

    pub fn identity(space: Space) -> Self {
        Self::new(space, Mat::identity(space.dim(), space.dim()))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.space, rhs.space);
        Self::new(self.space, &self.mat * &rhs.mat)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.space, rhs.space);
        Self::new(self.space, &self.mat + &rhs.mat)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.space, rhs.space);
        Self::new(self.space, &self.mat - &rhs.mat)
    }

    pub fn scale(&self, k: C) -> Self {
        Self::new(self.space, faer::Scale(k) * &self.mat)
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }
}

/// Full spectral data with biorthonormal left/right eigenvectors.
///
/// Column `k` of `right` and row `k` of `left` belong to `values[k]`;
/// within each cluster `left · right` is the identity block.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<C>,
    pub right: Mat<C>,
    pub left: Mat<C>,
    pub clusters: Vec<Vec<usize>>,
    pub cluster_tol: f64,
}

impl EigenSystem {
    pub fn cluster_value(&self, c: usize) -> C {
        let idx = &self.clusters[c];
        idx.iter().map(|&k| self.values[k]).sum::<C>() / idx.len() as f64
    }

    pub fn multiplicity(&self, c: usize) -> usize {
        self.clusters[c].len()
    }

    /// Smallest distance between the mean values of two different clusters.
    pub fn min_cluster_gap(&self) -> f64 {
        let means: Vec<C> = (0..self.clusters.len()).map(|c| self.cluster_value(c)).collect();
        let mut gap = f64::INFINITY;
        for i in 0..means.len() {
            for j in i + 1..means.len() {
                gap = gap.min((means[i] - means[j]).norm());
            }
        }
        gap
    }

    /// Largest distance of a member from its cluster mean.
    pub fn max_cluster_spread(&self) -> f64 {
        (0..self.clusters.len())
            .flat_map(|c| {
                let mean = self.cluster_value(c);
                self.clusters[c].iter().map(move |&i| (self.values[i] - mean).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Right eigenvectors of a cluster, as columns.
    pub fn right_block(&self, c: usize) -> Mat<C> {
        let idx = &self.clusters[c];
        Mat::from_fn(self.right.nrows(), idx.len(), |i, j| self.right[(i, idx[j])])
    }

    /// Left eigenvectors of a cluster, as rows.
    pub fn left_block(&self, c: usize) -> Mat<C> {
        let idx = &self.clusters[c];
        Mat::from_fn(idx.len(), self.left.ncols(), |i, j| self.left[(idx[i], j)])
    }
}

pub fn eig(a: &Mat<C>, cluster_tol: f64) -> Result<EigenSystem> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut s = faer::diag::Diag::<C>::zeros(n);
    let mut ul = Mat::<C>::zeros(n, n);
    let mut ur = Mat::<C>::zeros(n, n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(evd::evd_scratch::<C>(
        n,
        ComputeEigenvectors::Yes,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::evd_cplx(
        a.as_ref(),
        s.as_mut(),
        Some(ul.as_mut()),
        Some(ur.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Eigen(format!("{e:?} (dimension {n})")))?;

    let values: Vec<C> = (0..n).map(|k| s[k]).collect();
    // faer returns u with u^H A = λ u^H; store the row vector conj(u)^T.
    let mut left = Mat::from_fn(n, n, |k, j| ul[(j, k)].conj());
    let clusters = cluster_values(&values, cluster_tol);

    for idx in &clusters {
        let k = idx.len();
        let g = Mat::from_fn(k, k, |i, j| (0..n).map(|m| left[(idx[i], m)] * ur[(m, idx[j])]).sum::<C>());
        let rows = Mat::from_fn(k, n, |i, j| left[(idx[i], j)]);
        let fixed = g.partial_piv_lu().solve(&rows);
        for (i, &r) in idx.iter().enumerate() {
            for j in 0..n {
                left[(r, j)] = fixed[(i, j)];
            }
        }
    }

    Ok(EigenSystem { values, right: ur, left, clusters, cluster_tol })
}

/// Single-linkage grouping of values closer than `tol` times the spectral radius.
fn cluster_values(values: &[C], tol: f64) -> Vec<Vec<usize>> {
    let radius = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol * radius {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

/// Value of `a` on the invariant subspace of cluster `c`, which must be scalar there.
pub fn cluster_eigenvalue(a: &Mat<C>, sys: &EigenSystem, c: usize) -> Result<C> {
    let r = sys.right_block(c);
    let l = sys.left_block(c);
    let lr = &l * &r;
    let lar = &l * &(a * &r);
    let k = lr.nrows();
    let block = &lar * &solve(&lr, &Mat::identity(k, k));
    let mu =
        if k == 1 { vec![block[(0, 0)]] } else { block.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))? };
    let mean = mu.iter().sum::<C>() / k as f64;
    let spread = mu.iter().map(|m| (m - mean).norm()).fold(0.0, f64::max);
    let scale = a.norm_l2().max(f64::MIN_POSITIVE);
    if spread > sys.cluster_tol * scale {
        return Err(Error::Degeneracy { cluster: c, spread: spread / scale });
    }
    Ok(mean)
}

pub fn det(a: &Mat<C>) -> C {
    if a.nrows() == 0 {
        return C::new(1.0, 0.0);
    }
    a.determinant()
}

pub fn solve(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    a.partial_piv_lu().solve(b)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Mat<C>) -> Result<Vec<f64>> {
    let mut s = a.singular_values().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Orthonormal basis (columns) of the numerical kernel: right singular
/// vectors whose singular value is below `rel_tol` times the largest one.
pub fn kernel(a: &Mat<C>, rel_tol: f64) -> Result<Mat<C>> {
    let svd = a.svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let smax = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
    let cols: Vec<usize> = (0..v.ncols()).filter(|&j| j >= s.nrows() || s[j].re <= rel_tol * smax).collect();
    Ok(Mat::from_fn(v.nrows(), cols.len(), |i, j| v[(i, cols[j])]))
}

pub fn vec_norm(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mat_vec(a: &Mat<C>, v: &[C]) -> Vec<C> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

pub fn vec_mat(v: &[C], a: &Mat<C>) -> Vec<C> {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| v[i] * a[(i, j)]).sum()).collect()
}
