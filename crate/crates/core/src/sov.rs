//! Separation-of-variables bases on the restricted space, the theta matrix
//! `Θ^(h)`, separate states and their determinant scalar products.
//!
//! The characteristic thetas `ϑ_j` live on the lattice `(1, 2w)` while
//! `θ(λ)` lives on `(π, πω)`. The two are matched by evaluating
//! `ϑ_j` with `w = ω/2` at `u = ξ̄/π`, where
//! `ξ̄_a^{(h)} = ξ_a^{(h)} + η/2 + π(N−1)/(2N) − (1/N)Σ_b ξ_b`.
//! With this matching `det Θ^(h)` is proportional to
//! `θ(Σ_a ξ̄_a^{(h_a)} − π(N−1)/2) Π_{a<b} θ(ξ_a^{(h_a)} − ξ_b^{(h_b)})`.

use crate::elliptic::{theta_char, ThetaContext};
use crate::error::{Error, Result};
use crate::linalg::{det, vec_mat};
use crate::operators::{c_op, sector_block, Block};
use crate::params::{bit, ChainParams};
use crate::spectrum::functional_residuals;
use crate::C;
use faer::Mat;
use rayon::prelude::*;
use std::f64::consts::PI;

const ONE: C = C::new(1.0, 0.0);
const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `ξ_a^{(h)}` together with its shifted image used as a `ϑ` argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SovPoint {
    pub a: usize,
    pub h: u8,
    pub value: C,
    pub shifted: C,
}

impl SovPoint {
    pub fn new(a: usize, h: u8, p: &ChainParams) -> Self {
        let nf = p.n as f64;
        let mean = p.xi.iter().sum::<C>() / nf;
        let value = p.xi_h(a, h);
        let shifted = value + p.eta / 2.0 + PI * (nf - 1.0) / (2.0 * nf) - mean;
        Self { a, h, value, shifted }
    }

    /// Argument of `ϑ_j` on its own unit-period lattice.
    pub fn char_arg(&self) -> C {
        self.shifted / PI
    }
}

fn char_ctx(p: &ChainParams) -> Result<ThetaContext> {
    p.ctx.with_omega(p.ctx.omega / 2.0)
}

/// `Θ^(h)_{ij} = ϑ_{i−1}(ξ̄_j^{(h_j)})`.
pub fn theta_matrix(k: usize, p: &ChainParams) -> Result<Mat<C>> {
    let ctx = char_ctx(p)?;
    let mut m = Mat::<C>::zeros(p.n, p.n);
    for j in 0..p.n {
        let u = SovPoint::new(j, bit(k, j), p).char_arg();
        for i in 0..p.n {
            m[(i, j)] = theta_char(i, u, p.n, &ctx)?;
        }
    }
    Ok(m)
}

pub fn theta_matrix_det(k: usize, p: &ChainParams) -> Result<C> {
    Ok(det(&theta_matrix(k, p)?))
}

/// `θ(Σ_a ξ̄_a^{(h_a)} − π(N−1)/2) Π_{a<b} θ(ξ_a^{(h_a)} − ξ_b^{(h_b)})`.
pub fn vandermonde_product(k: usize, p: &ChainParams) -> Result<C> {
    let pts: Vec<SovPoint> = (0..p.n).map(|a| SovPoint::new(a, bit(k, a), p)).collect();
    let sum: C = pts.iter().map(|s| s.shifted).sum();
    let mut out = p.theta(sum - PI * (p.n as f64 - 1.0) / 2.0)?;
    for a in 0..p.n {
        for b in a + 1..p.n {
            out *= p.theta(pts[a].value - pts[b].value)?;
        }
    }
    Ok(out)
}

/// Left (rows) and right (columns) SOV bases on the restricted space.
///
/// The common normalization `n` is fixed so that `⟨h|h⟩ det Θ^(h) = 1`;
/// `norm_sq` is the value of `n²` this required.
#[derive(Debug, Clone)]
pub struct SovBasis {
    pub left: Mat<C>,
    pub right: Mat<C>,
    pub theta_dets: Vec<C>,
    pub norm_sq: C,
}

/// Unnormalized states: `⟨0|Π(𝒞(ξ_n)/d(ξ_n−η))^{h_n}` and
/// `Π(𝒞(ξ_n−η)/d(ξ_n−η))^{1−h_n}|1⟩`, with the dynamical argument of every
/// `𝒞` displaced by `offset`.
pub fn raw_states(p: &ChainParams, offset: C) -> Result<(Mat<C>, Mat<C>)> {
    let dim = p.dim();
    let mut left_ops = Vec::with_capacity(p.n);
    let mut right_ops = Vec::with_capacity(p.n);
    for a in 0..p.n {
        let norm = ONE / p.d_fn(p.xi_h(a, 1))?;
        left_ops.push(faer::Scale(norm) * &c_op(p.xi_h(a, 0), offset, p)?);
        right_ops.push(faer::Scale(norm) * &c_op(p.xi_h(a, 1), offset, p)?);
    }

    let mut left: Vec<Vec<C>> = vec![Vec::new(); dim];
    left[0] = (0..dim).map(|i| if i == 0 { ONE } else { ZERO }).collect();
    for k in 1..dim {
        let low = k.trailing_zeros() as usize;
        left[k] = vec_mat(&left[k & (k - 1)], &left_ops[low]);
    }

    let full = dim - 1;
    let mut right: Vec<Vec<C>> = vec![Vec::new(); dim];
    right[full] = (0..dim).map(|i| if i == full { ONE } else { ZERO }).collect();
    for k in (0..full).rev() {
        let zeros = !k & full;
        let low = zeros.trailing_zeros() as usize;
        let prev = k | (1 << low);
        right[k] = crate::linalg::mat_vec(&right_ops[low], &right[prev]);
    }

    let l = Mat::from_fn(dim, dim, |i, j| left[i][j]);
    let r = Mat::from_fn(dim, dim, |i, j| right[j][i]);
    Ok((l, r))
}

impl SovBasis {
    pub fn new(p: &ChainParams) -> Result<Self> {
        let (mut left, mut right) = raw_states(p, ZERO)?;
        let theta_dets = (0..p.dim()).into_par_iter().map(|k| theta_matrix_det(k, p)).collect::<Result<Vec<_>>>()?;
        let pair0: C = (0..p.dim()).map(|i| left[(0, i)] * right[(i, 0)]).sum();
        let norm_sq = pair0 * theta_dets[0];
        if norm_sq.norm() == 0.0 || !norm_sq.re.is_finite() {
            return Err(Error::DegenerateMeasure(0));
        }
        let inv = ONE / norm_sq.sqrt();
        left = faer::Scale(inv) * &left;
        right = faer::Scale(inv) * &right;
        Ok(Self { left, right, theta_dets, norm_sq })
    }

    pub fn dim(&self) -> usize {
        self.right.nrows()
    }

    pub fn state(&self, k: usize, side: Side) -> Vec<C> {
        match side {
            Side::Left => (0..self.dim()).map(|j| self.left[(k, j)]).collect(),
            Side::Right => (0..self.dim()).map(|i| self.right[(i, k)]).collect(),
        }
    }

    /// Matrix of pairings `⟨h|k⟩`.
    pub fn pairing(&self) -> Mat<C> {
        &self.left * &self.right
    }

    /// `µ_h = 1/⟨h|h⟩`.
    pub fn measure(&self, k: usize) -> Result<C> {
        let g: C = (0..self.dim()).map(|i| self.left[(k, i)] * self.right[(i, k)]).sum();
        if g.norm() == 0.0 {
            return Err(Error::DegenerateMeasure(k));
        }
        Ok(ONE / g)
    }

    /// `Σ_h µ_h |h⟩⟨h|`.
    pub fn identity_decomposition(&self) -> Result<Mat<C>> {
        let dim = self.dim();
        let mut out = Mat::<C>::zeros(dim, dim);
        for k in 0..dim {
            let mu = self.measure(k)?;
            for i in 0..dim {
                let ri = self.right[(i, k)] * mu;
                for j in 0..dim {
                    out[(i, j)] += ri * self.left[(k, j)];
                }
            }
        }
        Ok(out)
    }
}

/// One SOV basis state (see [`SovBasis`] for the normalization).
pub fn sov_state(k: usize, side: Side, p: &ChainParams) -> Result<Vec<C>> {
    Ok(SovBasis::new(p)?.state(k, side))
}

/// `d_h(λ) = Π_n θ(λ − ξ_n^{(h_n)})`.
pub fn d_h(k: usize, lambda: C, p: &ChainParams) -> Result<C> {
    (0..p.n).try_fold(ONE, |acc, a| Ok(acc * p.theta(lambda - p.xi_h(a, bit(k, a)))?))
}

/// `θ(t_h + η)/θ(t_1 + η) · d_h(λ)`, the right pseudo-eigenvalue of `D`.
pub fn d_right(k: usize, lambda: C, p: &ChainParams) -> Result<C> {
    let (t1, th) = (p.t_h(p.dim() - 1), p.t_h(k));
    Ok(p.theta(th + p.eta)? / p.theta(t1 + p.eta)? * d_h(k, lambda, p)?)
}

/// `D(λ|τ + offset)` on the restricted space.
pub fn d_op(lambda: C, offset: C, p: &ChainParams) -> Result<Mat<C>> {
    sector_block(Block::D, lambda, offset, p)
}

/// State with factorized SOV coefficients `coeffs[a][h] = α_a(ξ_a^{(h)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparateState {
    pub side: Side,
    pub coeffs: Vec<[C; 2]>,
}

fn product_weights(coeffs: &[[C; 2]], dim: usize) -> Vec<C> {
    let mut w = vec![ONE; dim];
    for (k, wk) in w.iter_mut().enumerate() {
        for (a, c) in coeffs.iter().enumerate() {
            *wk *= c[bit(k, a) as usize];
        }
    }
    w
}

/// `Σ_h Π_a α_a(ξ_a^{(h_a)}) det Θ^(h) |h⟩` (or the covector analogue).
pub fn separate_vector(st: &SeparateState, basis: &SovBasis) -> Vec<C> {
    let dim = basis.dim();
    let w: Vec<C> = product_weights(&st.coeffs, dim).iter().zip(&basis.theta_dets).map(|(x, d)| x * d).collect();
    match st.side {
        Side::Right => crate::linalg::mat_vec(&basis.right, &w),
        Side::Left => vec_mat(&w, &basis.left),
    }
}

/// `det_N F` with `F_{a,b} = Σ_h α_a(ξ_a^{(h)}) β_a(ξ_a^{(h)}) ϑ_{b−1}(ξ̄_a^{(h)})`.
pub fn scalar_product_det(alpha: &SeparateState, beta: &SeparateState, p: &ChainParams) -> Result<C> {
    if alpha.side != Side::Left || beta.side != Side::Right {
        return Err(Error::Invalid("scalar product pairs a left state with a right state".into()));
    }
    let ctx = char_ctx(p)?;
    let mut f = Mat::<C>::zeros(p.n, p.n);
    for a in 0..p.n {
        for h in 0..2u8 {
            let u = SovPoint::new(a, h, p).char_arg();
            let w = alpha.coeffs[a][h as usize] * beta.coeffs[a][h as usize];
            for b in 0..p.n {
                f[(a, b)] += w * theta_char(b, u, p.n, &ctx)?;
            }
        }
    }
    Ok(det(&f))
}

/// Brute-force `Σ_h det Θ^(h) Π_a α_a β_a` over all `2^N` configurations.
pub fn scalar_product_sum(alpha: &SeparateState, beta: &SeparateState, basis: &SovBasis) -> C {
    let dim = basis.dim();
    let wa = product_weights(&alpha.coeffs, dim);
    let wb = product_weights(&beta.coeffs, dim);
    (0..dim).map(|k| wa[k] * wb[k] * basis.theta_dets[k]).sum()
}

/// Separate state whose coefficients are the Q-ratios of an eigenvalue:
/// `Q(ξ_a) = 1` and `Q(ξ_a − η) = t(ξ_a)/d(ξ_a − η)` on the right,
/// `t(ξ_a)/a(ξ_a)` on the left.
pub fn eigen_coefficients(t_at_xi: &[C], side: Side, p: &ChainParams) -> Result<SeparateState> {
    let coeffs = (0..p.n)
        .map(|a| {
            let den = match side {
                Side::Right => p.d_fn(p.xi_h(a, 1))?,
                Side::Left => p.a_fn(p.xi_h(a, 0))?,
            };
            Ok([ONE, t_at_xi[a] / den])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparateState { side, coeffs })
}

/// Transfer-matrix eigenstate built from its eigenvalue at the `ξ` points.
pub fn eigenstate(t_at_xi: &[C], side: Side, basis: &SovBasis, p: &ChainParams) -> Result<Vec<C>> {
    let worst = functional_residuals(t_at_xi, p)?.into_iter().fold(0.0, f64::max);
    if worst > 1e-6 {
        return Err(Error::NotEigenvalue(worst));
    }
    Ok(separate_vector(&eigen_coefficients(t_at_xi, side, p)?, basis))
}
