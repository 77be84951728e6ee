//! R-matrices, monodromy and transfer matrices of the dynamical 6-vertex
//! (antiperiodic, on the restricted space) and 8-vertex (periodic) chains.
//!
//! Local 4×4 matrices act on two spaces `(x, y)` with row/column index
//! `2·s_x + s_y`, spin up being 0. Operators on the auxiliary space times the
//! chain use the index `α·2^N + k` with the auxiliary spin `α` most significant.

use crate::elliptic::ThetaContext;
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, Space};
use crate::params::{bit, partial_spin, spin_sum, ChainParams};
use crate::C;
use faer::Mat;
use rayon::prelude::*;

pub type Local = [[C; 4]; 4];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn pole_check(p: &ChainParams, value: C, what: impl FnOnce() -> String) -> Result<C> {
    if value.norm() < 1e-12 * p.theta_scale()? {
        return Err(Error::Pole(what()));
    }
    Ok(value)
}

/// `b(λ|τ) = θ(λ)θ(τ+η)/θ(τ)`.
pub fn weight_b(lambda: C, tau: C, p: &ChainParams) -> Result<C> {
    let th_tau = pole_check(p, p.theta(tau)?, || format!("theta(tau) vanishes at tau = {tau}"))?;
    Ok(p.theta(lambda)? * p.theta(tau + p.eta)? / th_tau)
}

/// `c(λ|τ) = θ(η)θ(τ+λ)/θ(τ)`.
pub fn weight_c(lambda: C, tau: C, p: &ChainParams) -> Result<C> {
    let th_tau = pole_check(p, p.theta(tau)?, || format!("theta(tau) vanishes at tau = {tau}"))?;
    Ok(p.theta(p.eta)? * p.theta(tau + lambda)? / th_tau)
}

pub fn r6vd_local(lambda: C, tau: C, p: &ChainParams) -> Result<Local> {
    let a = p.theta(lambda + p.eta)?;
    let (b, c) = (weight_b(lambda, tau, p)?, weight_c(lambda, tau, p)?);
    let (bm, cm) = (weight_b(lambda, -tau, p)?, weight_c(lambda, -tau, p)?);
    Ok([[a, ZERO, ZERO, ZERO], [ZERO, b, c, ZERO], [ZERO, cm, bm, ZERO], [ZERO, ZERO, ZERO, a]])
}

pub fn r6vd(lambda: C, tau: C, p: &ChainParams) -> Result<DenseOperator> {
    Ok(local_operator(&r6vd_local(lambda, tau, p)?))
}

/// Boltzmann weights `(a, b, c, d)` of the 8-vertex R-matrix.
pub fn r8v_weights(lambda: C, ctx: &ThetaContext, eta: C) -> Result<[C; 4]> {
    let t = |k, z| ctx.th2w(k, z);
    let k = C::new(2.0, 0.0) / (ctx.th(2, ZERO)? * t(4, ZERO)?);
    let (t4e, t1e) = (t(4, eta)?, t(1, eta)?);
    let (t1l, t4l) = (t(1, lambda)?, t(4, lambda)?);
    let (t1le, t4le) = (t(1, lambda + eta)?, t(4, lambda + eta)?);
    Ok([k * t4e * t1le * t4l, k * t4e * t1l * t4le, k * t1e * t4l * t4le, k * t1e * t1le * t1l])
}

pub fn r8v_local(lambda: C, p: &ChainParams) -> Result<Local> {
    let [a, b, c, d] = r8v_weights(lambda, &p.ctx, p.eta)?;
    Ok([[a, ZERO, ZERO, d], [ZERO, b, c, ZERO], [ZERO, c, b, ZERO], [d, ZERO, ZERO, a]])
}

pub fn r8v(lambda: C, p: &ChainParams) -> Result<DenseOperator> {
    Ok(local_operator(&r8v_local(lambda, p)?))
}

fn local_operator(r: &Local) -> DenseOperator {
    DenseOperator::new(Space::TwoAux, Mat::from_fn(4, 4, |i, j| r[i][j]))
}

/// Local factors along the chain. `tables[n][j]` is the R-matrix of site `n`
/// when the preceding sites carry total spin `2j − n`.
struct ChainTables {
    tables: Vec<Vec<Local>>,
}

impl ChainTables {
    fn six_vertex(lambda: C, tau: C, p: &ChainParams) -> Result<Self> {
        let mut tables = Vec::with_capacity(p.n);
        for n in 0..p.n {
            let row = (0..=n)
                .map(|j| {
                    let s = 2 * j as i32 - n as i32;
                    let arg = tau + p.eta * s as f64;
                    r6vd_local(lambda - p.xi[n], arg, p).map_err(|e| match e {
                        Error::Pole(_) => {
                            Error::Pole(format!("site {} in the sector with partial spin {s} (tau = {arg})", n + 1))
                        }
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            tables.push(row);
        }
        Ok(Self { tables })
    }

    fn eight_vertex(lambda: C, p: &ChainParams) -> Result<Self> {
        let tables = (0..p.n).map(|n| Ok(vec![r8v_local(lambda - p.xi[n], p)?; n + 1])).collect::<Result<Vec<_>>>()?;
        Ok(Self { tables })
    }

    fn local(&self, site: usize, k: usize) -> &Local {
        let s = partial_spin(k, site);
        &self.tables[site][((s + site as i32) / 2) as usize]
    }

    /// Applies `R_{0N} ··· R_{01}` to a vector on aux ⊗ chain.
    fn apply(&self, v: &mut Vec<C>, scratch: &mut Vec<C>) {
        let dim = v.len() / 2;
        for site in 0..self.tables.len() {
            let m = 1usize << site;
            scratch.iter_mut().for_each(|x| *x = ZERO);
            for k0 in (0..dim).filter(|k| k & m == 0) {
                let k1 = k0 | m;
                let r = self.local(site, k0);
                let input = [v[k0], v[k1], v[dim + k0], v[dim + k1]];
                let targets = [k0, k1, dim + k0, dim + k1];
                for (row, &t) in targets.iter().enumerate() {
                    scratch[t] = (0..4).map(|col| r[row][col] * input[col]).sum();
                }
            }
            std::mem::swap(v, scratch);
        }
    }

    fn full(&self, n: usize) -> Mat<C> {
        let size = 2usize << n;
        let cols: Vec<Vec<C>> = (0..size)
            .into_par_iter()
            .map(|j| {
                let mut v = vec![ZERO; size];
                let mut scratch = vec![ZERO; size];
                v[j] = ONE;
                self.apply(&mut v, &mut scratch);
                v
            })
            .collect();
        Mat::from_fn(size, size, |i, j| cols[j][i])
    }
}

/// The four auxiliary-space blocks of a monodromy matrix.
#[derive(Debug, Clone)]
pub struct Monodromy {
    pub a: Mat<C>,
    pub b: Mat<C>,
    pub c: Mat<C>,
    pub d: Mat<C>,
}

impl Monodromy {
    fn from_full(m: &Mat<C>) -> Self {
        let dim = m.nrows() / 2;
        let blk = |r0: usize, c0: usize| Mat::from_fn(dim, dim, |i, j| m[(r0 + i, c0 + j)]);
        Self { a: blk(0, 0), b: blk(0, dim), c: blk(dim, 0), d: blk(dim, dim) }
    }

    pub fn block(&self, which: Block) -> &Mat<C> {
        match which {
            Block::A => &self.a,
            Block::B => &self.b,
            Block::C => &self.c,
            Block::D => &self.d,
        }
    }

    pub fn to_aux_spin(&self) -> Mat<C> {
        let dim = self.a.nrows();
        Mat::from_fn(2 * dim, 2 * dim, |i, j| {
            let blk = match (i >= dim, j >= dim) {
                (false, false) => &self.a,
                (false, true) => &self.b,
                (true, false) => &self.c,
                (true, true) => &self.d,
            };
            blk[(i % dim, j % dim)]
        })
    }

    pub fn trace(&self) -> Mat<C> {
        &self.a + &self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    C,
    D,
}

impl Block {
    /// (input, output) auxiliary spins.
    fn aux(self) -> (usize, usize) {
        match self {
            Block::A => (0, 0),
            Block::B => (1, 0),
            Block::C => (0, 1),
            Block::D => (1, 1),
        }
    }
}

/// `M(λ|τ) = R_{0N}(λ−ξ_N|τ+ηΣ_{a<N}σ_a^z) ··· R_{01}(λ−ξ_1|τ)` at a numeric `τ`.
pub fn monodromy_6vd(lambda: C, tau: C, p: &ChainParams) -> Result<Monodromy> {
    Ok(Monodromy::from_full(&ChainTables::six_vertex(lambda, tau, p)?.full(p.n)))
}

pub fn monodromy_8v(lambda: C, p: &ChainParams) -> Result<Monodromy> {
    Ok(Monodromy::from_full(&ChainTables::eight_vertex(lambda, p)?.full(p.n)))
}

pub fn transfer_8v(lambda: C, p: &ChainParams) -> Result<DenseOperator> {
    Ok(DenseOperator::new(Space::Spin(p.n), monodromy_8v(lambda, p)?.trace()))
}

/// One monodromy block on the restricted space: column `k` is
/// `X(λ | t_k + offset) |k⟩`.
pub fn sector_block(which: Block, lambda: C, offset: C, p: &ChainParams) -> Result<Mat<C>> {
    let dim = p.dim();
    let (src, dst) = which.aux();
    let by_spin: Vec<ChainTables> = (0..=p.n)
        .map(|j| {
            let s = p.n as i32 - 2 * j as i32;
            ChainTables::six_vertex(lambda, -p.eta * s as f64 / 2.0 + offset, p)
        })
        .collect::<Result<_>>()?;
    let cols: Vec<Vec<C>> = (0..dim)
        .into_par_iter()
        .map(|k| {
            let tables = &by_spin[k.count_ones() as usize];
            let mut v = vec![ZERO; 2 * dim];
            let mut scratch = vec![ZERO; 2 * dim];
            v[src * dim + k] = ONE;
            tables.apply(&mut v, &mut scratch);
            v[dst * dim..(dst + 1) * dim].to_vec()
        })
        .collect();
    Ok(Mat::from_fn(dim, dim, |i, j| cols[j][i]))
}

/// `𝒞(λ) = C(λ|τ)T_τ^+` on the restricted space (`τ ↦ t_k − η` for column `k`),
/// with an extra uniform dynamical offset.
pub fn c_op(lambda: C, offset: C, p: &ChainParams) -> Result<Mat<C>> {
    sector_block(Block::C, lambda, offset - p.eta, p)
}

/// `𝓑(λ) = B(λ|τ)T_τ^−` on the restricted space (`τ ↦ t_k + η` for column `k`).
pub fn b_op(lambda: C, offset: C, p: &ChainParams) -> Result<Mat<C>> {
    sector_block(Block::B, lambda, offset + p.eta, p)
}

/// Antiperiodic transfer matrix `𝓑(λ) + 𝒞(λ)` on the restricted space.
pub fn transfer_6vd_bar(lambda: C, p: &ChainParams) -> Result<DenseOperator> {
    let m = &b_op(lambda, ZERO, p)? + &c_op(lambda, ZERO, p)?;
    Ok(DenseOperator::new(Space::Spin(p.n), m))
}

/// Diagonal of `θ(τ + ηS)/θ(τ)` on the chain.
fn dynamical_ratio(tau: C, p: &ChainParams) -> Result<Vec<C>> {
    let th = pole_check(p, p.theta(tau)?, || format!("theta(tau) vanishes at tau = {tau}"))?;
    let by_spin: Vec<C> =
        (0..=p.n).map(|j| Ok(p.theta(tau + p.eta * (p.n as f64 - 2.0 * j as f64))? / th)).collect::<Result<_>>()?;
    Ok((0..p.dim()).map(|k| by_spin[k.count_ones() as usize]).collect())
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

fn abs(m: &Mat<C>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].norm())
}

/// Frobenius norm of `Σ |X_k|·|Y_k|` (entrywise moduli): the scale on which
/// rounding in `Σ X_k Y_k` is measured.
fn product_scale(terms: &[(&Mat<C>, &Mat<C>)]) -> f64 {
    let (r, c) = (terms[0].0.nrows(), terms[0].1.ncols());
    let mut acc = Mat::<f64>::zeros(r, c);
    for (x, y) in terms {
        acc += abs(x) * abs(y);
    }
    acc.norm_l2()
}

/// Residual of
/// `θ(τ+ηS)/θ(τ)·(A(λ|τ)D(λ−η|τ+η) − B(λ|τ)C(λ−η|τ−η)) = a(λ)d(λ−η)`
/// relative to the size of the two products.
pub fn qdet_6vd_residual(lambda: C, tau: C, p: &ChainParams) -> Result<f64> {
    let m0 = monodromy_6vd(lambda, tau, p)?;
    let mp = monodromy_6vd(lambda - p.eta, tau + p.eta, p)?;
    let mm = monodromy_6vd(lambda - p.eta, tau - p.eta, p)?;
    let ratio = dynamical_ratio(tau, p)?;
    let row = |m: &Mat<C>| Mat::from_fn(p.dim(), p.dim(), |i, j| ratio[i] * m[(i, j)]);
    let (ra, rb) = (row(&m0.a), row(&m0.b));
    let lhs = &(&ra * &mp.d) - &(&rb * &mm.c);
    let q = p.qdet(lambda)?;
    let rhs = faer::Scale(q) * Mat::<C>::identity(p.dim(), p.dim());
    Ok(rel((&lhs - &rhs).norm_l2(), product_scale(&[(&ra, &mp.d), (&rb, &mm.c)])))
}

/// Residual of the right inverse of the dynamical monodromy,
/// `M(λ|τ)·[[D(λ−η|τ+η), −B(λ−η|τ+η)], [−C(λ−η|τ−η), A(λ−η|τ−η)]]·θ(τ+ηS)/(θ(τ) det_q) = Id`,
/// relative to the size of the product.
pub fn inversion_residual(lambda: C, tau: C, p: &ChainParams) -> Result<f64> {
    let m0 = monodromy_6vd(lambda, tau, p)?.to_aux_spin();
    let mp = monodromy_6vd(lambda - p.eta, tau + p.eta, p)?;
    let mm = monodromy_6vd(lambda - p.eta, tau - p.eta, p)?;
    let dim = p.dim();
    let ratio = dynamical_ratio(tau, p)?;
    let q = p.qdet(lambda)?;
    let inv = Mat::from_fn(2 * dim, 2 * dim, |i, j| {
        let (ii, jj) = (i % dim, j % dim);
        let v = match (i >= dim, j >= dim) {
            (false, false) => mp.d[(ii, jj)],
            (false, true) => -mp.b[(ii, jj)],
            (true, false) => -mm.c[(ii, jj)],
            (true, true) => mm.a[(ii, jj)],
        };
        v * ratio[jj] / q
    });
    let prod = &m0 * &inv;
    let id = Mat::<C>::identity(2 * dim, 2 * dim);
    Ok(rel((&prod - &id).norm_l2(), product_scale(&[(&m0, &inv)])))
}

/// Residual of `A(λ)D(λ−η) − B(λ)C(λ−η) = a(λ)d(λ−η)` for the 8-vertex
/// chain, relative to the size of the two products.
pub fn qdet_8v_residual(lambda: C, p: &ChainParams) -> Result<f64> {
    let m0 = monodromy_8v(lambda, p)?;
    let m1 = monodromy_8v(lambda - p.eta, p)?;
    let lhs = &(&m0.a * &m1.d) - &(&m0.b * &m1.c);
    let rhs = faer::Scale(p.qdet(lambda)?) * Mat::<C>::identity(p.dim(), p.dim());
    Ok(rel((&lhs - &rhs).norm_l2(), product_scale(&[(&m0.a, &m1.d), (&m0.b, &m1.c)])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    SixVertexDynamical,
    EightVertex,
}

/// Embeds a local matrix acting on spaces `(x, y)` of a three-space product
/// (index `4s_0 + 2s_1 + s_2`); `local` receives the spin (±1) of space `dep`.
fn embed3(x: usize, y: usize, dep: Option<usize>, local: impl Fn(i32) -> Result<Local>) -> Result<Mat<C>> {
    let spin = |state: usize, space: usize| (state >> (2 - space)) & 1;
    let tables = [local(1)?, local(-1)?];
    Ok(Mat::from_fn(8, 8, |i, j| {
        let other = 3 - x - y;
        if spin(i, other) != spin(j, other) {
            return ZERO;
        }
        let t = match dep {
            Some(d) => &tables[spin(j, d)],
            None => &tables[0],
        };
        t[2 * spin(i, x) + spin(i, y)][2 * spin(j, x) + spin(j, y)]
    }))
}

/// Relative Frobenius residual of the (dynamical) Yang–Baxter equation on
/// spaces `(1, 2, a)`.
pub fn ybe_residual(model: Model, l1: C, l2: C, tau: C, p: &ChainParams) -> Result<f64> {
    let eta = p.eta;
    let (lhs, rhs) = match model {
        Model::SixVertexDynamical => {
            let r = |lam: C, shift: C| r6vd_local(lam, shift, p);
            let lhs = &(&embed3(0, 1, Some(2), |s| r(l1 - l2, tau + eta * s as f64))?
                * &embed3(0, 2, None, |_| r(l1, tau))?)
                * &embed3(1, 2, Some(0), |s| r(l2, tau + eta * s as f64))?;
            let rhs = &(&embed3(1, 2, None, |_| r(l2, tau))?
                * &embed3(0, 2, Some(1), |s| r(l1, tau + eta * s as f64))?)
                * &embed3(0, 1, None, |_| r(l1 - l2, tau))?;
            (lhs, rhs)
        }
        Model::EightVertex => {
            let r = |lam: C| r8v_local(lam, p);
            let lhs = &(&embed3(0, 1, None, |_| r(l1 - l2))? * &embed3(0, 2, None, |_| r(l1))?)
                * &embed3(1, 2, None, |_| r(l2))?;
            let rhs = &(&embed3(1, 2, None, |_| r(l2))? * &embed3(0, 2, None, |_| r(l1))?)
                * &embed3(0, 1, None, |_| r(l1 - l2))?;
            (lhs, rhs)
        }
    };
    Ok(rel((&lhs - &rhs).norm_l2(), lhs.norm_l2()))
}

/// `X` acting on site `site` (zero-based) of the chain.
pub fn embed_local(x: [[C; 2]; 2], site: usize, n: usize) -> Mat<C> {
    let m = 1usize << site;
    Mat::from_fn(1 << n, 1 << n, |i, j| {
        if (i & !m) != (j & !m) {
            ZERO
        } else {
            x[bit(i, site) as usize][bit(j, site) as usize]
        }
    })
}

fn aux_trace(m: &Monodromy, x: [[C; 2]; 2]) -> Mat<C> {
    let mut out = faer::Scale(x[0][0]) * &m.a;
    out += faer::Scale(x[1][0]) * &m.b;
    out += faer::Scale(x[0][1]) * &m.c;
    out += faer::Scale(x[1][1]) * &m.d;
    out
}

/// Local operator rebuilt from the 8-vertex monodromy:
/// `X_n = Π_{b<n} T(ξ_b) tr₀(M(ξ_n)X₀) Π_{b≤n} T(ξ_b − η)/det_q(ξ_b)`.
pub fn reconstruct_local(site: usize, x: [[C; 2]; 2], p: &ChainParams) -> Result<Mat<C>> {
    let dim = p.dim();
    let mut left = Mat::<C>::identity(dim, dim);
    for b in 0..site {
        left = &left * &transfer_8v(p.xi_h(b, 0), p)?.mat;
    }
    let mut right = Mat::<C>::identity(dim, dim);
    for b in 0..=site {
        let t1 = transfer_8v(p.xi_h(b, 1), p)?.mat;
        right = &right * &(faer::Scale(ONE / p.qdet(p.xi_h(b, 0))?) * &t1);
    }
    let mid = aux_trace(&monodromy_8v(p.xi_h(site, 0), p)?, x);
    Ok(&(&left * &mid) * &right)
}

/// The alternative reconstruction through `M(ξ_n − η)` and `σ^y X^t σ^y`.
pub fn reconstruct_local_alt(site: usize, x: [[C; 2]; 2], p: &ChainParams) -> Result<Mat<C>> {
    let dim = p.dim();
    let mut left = Mat::<C>::identity(dim, dim);
    for b in 0..=site {
        left = &left * &transfer_8v(p.xi_h(b, 0), p)?.mat;
    }
    let mut right = Mat::<C>::identity(dim, dim);
    for b in 0..site {
        let t1 = transfer_8v(p.xi_h(b, 1), p)?.mat;
        right = &right * &(faer::Scale(ONE / p.qdet(p.xi_h(b, 0))?) * &t1);
    }
    // σ^y X^t σ^y = [[x22, −x12], [−x21, x11]]
    let y = [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]];
    let mid = faer::Scale(ONE / p.qdet(p.xi_h(site, 0))?) * &aux_trace(&monodromy_8v(p.xi_h(site, 1), p)?, y);
    Ok(&(&left * &mid) * &right)
}

/// Spin sector bookkeeping for a restricted-space matrix: true when every
/// nonzero entry `(i, j)` satisfies `s_i − s_j ∈ allowed`.
pub fn respects_sectors(m: &Mat<C>, n: usize, allowed: &[i32], tol: f64) -> bool {
    (0..m.nrows()).all(|i| {
        (0..m.ncols()).all(|j| m[(i, j)].norm() <= tol || allowed.contains(&(spin_sum(i, n) - spin_sum(j, n))))
    })
}
