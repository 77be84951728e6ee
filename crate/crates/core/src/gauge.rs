//! Vertex–face gauge transformation between the 8-vertex and dynamical
//! 6-vertex chains, the pure-spin operator `S_q^R` and the lift of
//! antiperiodic eigenvectors to periodic 8-vertex eigenvectors.

use crate::error::Result;
use crate::linalg::{kernel, mat_vec, singular_values, vec_norm};
use crate::operators::{
    b_op, c_op, monodromy_6vd, monodromy_8v, r6vd_local, r8v_local, transfer_6vd_bar, transfer_8v, Local,
};
use crate::params::{bit, partial_spin, spin_sum, ChainParams};
use crate::sov::{eigenstate, Side, SovBasis};
use crate::spectrum::interpolate;
use crate::C;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

pub type Local2 = [[C; 2]; 2];

/// `S(λ|τ) = [[θ₂(−λ+τ|2ω), θ₂(λ+τ|2ω)], [θ₃(−λ+τ|2ω), θ₃(λ+τ|2ω)]]`.
pub fn s_local(lambda: C, tau: C, p: &ChainParams) -> Result<Local2> {
    let t = |k, z| p.ctx.th2w(k, z);
    Ok([[t(2, tau - lambda)?, t(2, tau + lambda)?], [t(3, tau - lambda)?, t(3, tau + lambda)?]])
}

fn column(m: &Local2, h: u8) -> [C; 2] {
    [m[0][h as usize], m[1][h as usize]]
}

fn product_state(factors: &[[C; 2]]) -> Vec<C> {
    let dim = 1usize << factors.len();
    (0..dim).map(|i| factors.iter().enumerate().map(|(n, f)| f[bit(i, n) as usize]).product()).collect()
}

/// Spin operator whose column `k` is `⊗_n S(ξ_n | arg(n, k))[:, h_n]`.
fn product_columns(p: &ChainParams, arg: impl Fn(usize, usize) -> C) -> Result<Mat<C>> {
    let dim = p.dim();
    let cols = (0..dim)
        .map(|k| {
            let factors = (0..p.n)
                .map(|n| Ok(column(&s_local(p.xi[n], arg(n, k), p)?, bit(k, n))))
                .collect::<Result<Vec<_>>>()?;
            Ok(product_state(&factors))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_fn(dim, dim, |i, j| cols[j][i]))
}

/// `S_q(τ) = S_1(ξ_1|τ) ··· S_N(ξ_N|τ + ηΣ_{a<N}σ_a^z)`.
pub fn s_q(tau: C, p: &ChainParams) -> Result<Mat<C>> {
    product_columns(p, |n, k| tau + p.eta * partial_spin(k, n) as f64)
}

/// Dynamical argument of factor `n` of `S_q^R` on the basis state `k`:
/// `(η/2)(Σ_{a<n} σ_a^z − Σ_{a≥n} σ_a^z)`.
fn s_q_r_arg(n: usize, k: usize, p: &ChainParams) -> C {
    let before = partial_spin(k, n);
    let after = spin_sum(k, p.n) - before;
    p.eta * (before - after) as f64 / 2.0
}

/// `S_q^R` with every dynamical argument read on the input basis state.
pub fn s_q_r(p: &ChainParams) -> Result<Mat<C>> {
    product_columns(p, |n, k| s_q_r_arg(n, k, p))
}

/// `S_q^R` as the ordered operator product `F_1 ··· F_N`, each factor
/// reading the spins of the state it is applied to.
pub fn s_q_r_sequential(p: &ChainParams) -> Result<Mat<C>> {
    let dim = p.dim();
    let mut out = Mat::<C>::identity(dim, dim);
    for n in (0..p.n).rev() {
        let m = 1usize << n;
        let mut f = Mat::<C>::zeros(dim, dim);
        for k in 0..dim {
            let col = column(&s_local(p.xi[n], s_q_r_arg(n, k, p), p)?, bit(k, n));
            f[(k & !m, k)] = col[0];
            f[(k | m, k)] = col[1];
        }
        out = &f * &out;
    }
    Ok(out)
}

/// The coordinate map from the restricted space to the pure-spin space;
/// in this representation the dynamical label is implicit.
pub fn project(v: &[C]) -> Vec<C> {
    v.to_vec()
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

/// Relative residual of
/// `M^{8V}(λ)S₀(λ|τ)S_q(τ+ησ₀^z) = S_q(τ)S₀(λ|τ+ηS)M^{6VD}(λ|τ)` on aux ⊗ chain.
pub fn gauge_monodromy_residual(lambda: C, tau: C, p: &ChainParams) -> Result<f64> {
    let dim = p.dim();
    let m8 = monodromy_8v(lambda, p)?.to_aux_spin();
    let m6 = monodromy_6vd(lambda, tau, p)?.to_aux_spin();
    let s0 = s_local(lambda, tau, p)?;
    let s0_aux = Mat::from_fn(2 * dim, 2 * dim, |i, j| if i % dim == j % dim { s0[i / dim][j / dim] } else { ZERO });
    let sq = [s_q(tau + p.eta, p)?, s_q(tau - p.eta, p)?];
    let sq_dyn =
        Mat::from_fn(2 * dim, 2 * dim, |i, j| if i / dim == j / dim { sq[i / dim][(i % dim, j % dim)] } else { ZERO });
    let sq0 = s_q(tau, p)?;
    let sq_left =
        Mat::from_fn(2 * dim, 2 * dim, |i, j| if i / dim == j / dim { sq0[(i % dim, j % dim)] } else { ZERO });
    let by_spin = (0..=p.n)
        .map(|j| s_local(lambda, tau + p.eta * (p.n as f64 - 2.0 * j as f64), p))
        .collect::<Result<Vec<_>>>()?;
    let s0_spin = Mat::from_fn(2 * dim, 2 * dim, |i, j| {
        let (k, l) = (i % dim, j % dim);
        if k != l {
            ZERO
        } else {
            by_spin[k.count_ones() as usize][i / dim][j / dim]
        }
    });
    let lhs = &(&m8 * &s0_aux) * &sq_dyn;
    let rhs = &(&sq_left * &s0_spin) * &m6;
    Ok(rel((&lhs - &rhs).norm_l2(), lhs.norm_l2()))
}

/// Relative residual of the 4×4 relation
/// `R^{8V}(λ₁₂)S₀(λ₁|τ)S_a(λ₂|τ+ησ₀^z) = S_a(λ₂|τ)S₀(λ₁|τ+ησ_a^z)R^{6VD}(λ₁₂|τ)`,
/// indices `2s_0 + s_a`.
pub fn gauge_r_residual(l1: C, l2: C, tau: C, p: &ChainParams) -> Result<f64> {
    let eta = p.eta;
    let r8: Local = r8v_local(l1 - l2, p)?;
    let r6: Local = r6vd_local(l1 - l2, tau, p)?;
    let s0 = s_local(l1, tau, p)?;
    let sa_dyn = [s_local(l2, tau + eta, p)?, s_local(l2, tau - eta, p)?];
    let sa = s_local(l2, tau, p)?;
    let s0_dyn = [s_local(l1, tau + eta, p)?, s_local(l1, tau - eta, p)?];
    let m = |f: &dyn Fn(usize, usize, usize, usize) -> C| Mat::from_fn(4, 4, |i, j| f(i / 2, i % 2, j / 2, j % 2));
    let r8m = m(&|a, b, c, d| r8[2 * a + b][2 * c + d]);
    let r6m = m(&|a, b, c, d| r6[2 * a + b][2 * c + d]);
    let s0m = m(&|a, b, c, d| if b == d { s0[a][c] } else { ZERO });
    // S_a(λ₂|τ+ησ₀^z): σ₀ is read on the auxiliary input, which it does not change.
    let sa_dyn_m = m(&|a, b, c, d| if a == c { sa_dyn[c][b][d] } else { ZERO });
    let sam = m(&|a, b, c, d| if a == c { sa[b][d] } else { ZERO });
    let s0_dyn_m = m(&|a, b, c, d| if b == d { s0_dyn[d][a][c] } else { ZERO });
    let lhs = &(&r8m * &s0m) * &sa_dyn_m;
    let rhs = &(&sam * &s0_dyn_m) * &r6m;
    Ok(rel((&lhs - &rhs).norm_l2(), lhs.norm_l2()))
}

/// Relative residual of `T^{8V}(λ)S_q(t_h)|h⟩ = [S_q(t_h−η)C(λ|t_h−η) + S_q(t_h+η)B(λ|t_h+η)]|h⟩`
/// over all basis states `h`.
pub fn right_action_residual(lambda: C, p: &ChainParams) -> Result<f64> {
    let dim = p.dim();
    let t8 = transfer_8v(lambda, p)?.mat;
    let c = c_op(lambda, ZERO, p)?;
    let b = b_op(lambda, ZERO, p)?;
    let sq_at = |s: i32| s_q(-p.eta * s as f64 / 2.0, p);
    // S_q(t_h + mη) for total spin s_h is S_q at spin s_h − 2m.
    let cache =
        (-(p.n as i32) - 2..=p.n as i32 + 2).step_by(2).map(|s| Ok((s, sq_at(s)?))).collect::<Result<Vec<_>>>()?;
    let get = |s: i32| &cache.iter().find(|(t, _)| *t == s).expect("spin in range").1;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for h in 0..dim {
        let s = spin_sum(h, p.n);
        let col: Vec<C> = (0..dim).map(|i| get(s)[(i, h)]).collect();
        let lhs = mat_vec(&t8, &col);
        let cv: Vec<C> = (0..dim).map(|i| c[(i, h)]).collect();
        let bv: Vec<C> = (0..dim).map(|i| b[(i, h)]).collect();
        let r1 = mat_vec(get(s + 2), &cv);
        let r2 = mat_vec(get(s - 2), &bv);
        let d: Vec<C> = (0..dim).map(|i| lhs[i] - r1[i] - r2[i]).collect();
        diff = diff.max(vec_norm(&d));
        scale = scale.max(vec_norm(&lhs));
    }
    Ok(rel(diff, scale))
}

/// Relative residual of `T^{8V}(λ) S P̄ = S P̄ T̄(λ)` for a given `S` (normally `S_q^R`).
pub fn intertwining_residual_with(s: &Mat<C>, lambda: C, p: &ChainParams) -> Result<f64> {
    let t8 = transfer_8v(lambda, p)?.mat;
    let tb = transfer_6vd_bar(lambda, p)?.mat;
    let lhs = &t8 * s;
    let rhs = s * &tb;
    Ok(rel((&lhs - &rhs).norm_l2(), lhs.norm_l2().max(rhs.norm_l2())))
}

pub fn intertwining_residual(lambda: C, p: &ChainParams) -> Result<f64> {
    intertwining_residual_with(&s_q_r(p)?, lambda, p)
}

/// Relative residual of `P̄ S_q(t_h)|h⟩ = S_q^R P̄|h⟩` over all `h`.
pub fn projector_residual(p: &ChainParams) -> Result<f64> {
    let r = s_q_r(p)?;
    let mut diff: f64 = 0.0;
    for h in 0..p.dim() {
        let sq = s_q(p.t_h(h), p)?;
        for i in 0..p.dim() {
            diff = diff.max((sq[(i, h)] - r[(i, h)]).norm());
        }
    }
    Ok(rel(diff, r.norm_max()))
}

/// Basis states of the witness family: `Σ_{a<N} h_a = (N−1)/2`, listed by
/// the index of the `h_N = 0` member.
pub fn witness_configs(n: usize) -> Vec<usize> {
    let half = (n as u32 - 1) / 2;
    (0..1usize << (n - 1)).filter(|k| k.count_ones() == half).collect()
}

/// `|h_1 … h_{N−1}⟩ ⊗ (|1⟩ − |0⟩)`.
pub fn witness_vector(k: usize, n: usize) -> Vec<C> {
    let mut v = vec![ZERO; 1 << n];
    v[k | 1 << (n - 1)] = ONE;
    v[k] = -ONE;
    v
}

#[derive(Debug, Clone)]
pub struct KernelReport {
    pub dimension: usize,
    pub basis: Mat<C>,
    pub singular_values: Vec<f64>,
    /// `(config, ‖S_q^R w‖/σ_max)` for each witness vector.
    pub witness_norms: Vec<(usize, f64)>,
    pub contains_witnesses: bool,
}

pub const KERNEL_TOL: f64 = 1e-9;

pub fn kernel_analysis_of(s: &Mat<C>, n: usize) -> Result<KernelReport> {
    let sv = singular_values(s)?;
    let smax = sv.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let basis = kernel(s, KERNEL_TOL)?;
    let witness_norms: Vec<(usize, f64)> =
        witness_configs(n).into_iter().map(|k| (k, vec_norm(&mat_vec(s, &witness_vector(k, n))) / smax)).collect();
    let contains_witnesses = witness_norms.iter().all(|(_, r)| *r < 1e-10);
    Ok(KernelReport { dimension: basis.ncols(), basis, singular_values: sv, witness_norms, contains_witnesses })
}

pub fn kernel_analysis(p: &ChainParams) -> Result<KernelReport> {
    kernel_analysis_of(&s_q_r(p)?, p.n)
}

#[derive(Debug, Clone)]
pub struct Lift {
    pub vector: Vec<C>,
    /// `max_λ ‖T^{8V}(λ)w − t(λ)w‖ / (‖w‖·‖T^{8V}(λ)‖_F/√dim)` over five random `λ`.
    pub residual: f64,
}

/// `S_q^R P̄ |t⟩` when it is nonzero, with its 8-vertex eigen-residual.
pub fn lift_to_8v(t_at_xi: &[C], basis: &SovBasis, p: &ChainParams, seed: u64) -> Result<Option<Lift>> {
    let s = s_q_r(p)?;
    let v = project(&eigenstate(t_at_xi, Side::Right, basis, p)?);
    lift_vector(&s, &v, t_at_xi, p, seed)
}

pub fn lift_vector(s: &Mat<C>, v: &[C], t_at_xi: &[C], p: &ChainParams, seed: u64) -> Result<Option<Lift>> {
    let w = mat_vec(s, v);
    let smax = singular_values(s)?.first().copied().unwrap_or(0.0);
    if vec_norm(&w) <= 1e-8 * vec_norm(v) * smax {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual: f64 = 0.0;
    for _ in 0..5 {
        let lambda = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3));
        let t8 = transfer_8v(lambda, p)?.mat;
        let tl = interpolate(t_at_xi, lambda, p)?;
        let tw = mat_vec(&t8, &w);
        let d: Vec<C> = tw.iter().zip(&w).map(|(a, b)| a - tl * b).collect();
        let scale = t8.norm_l2() / (p.dim() as f64).sqrt();
        residual = residual.max(vec_norm(&d) / (vec_norm(&w) * scale));
    }
    Ok(Some(Lift { vector: w, residual }))
}
