//! Transfer-matrix spectra: the quadratic system for `t(ξ_n)`, its Newton
//! solver, dense diagonalization, elliptic interpolation and the comparison
//! of the dynamical 6-vertex and 8-vertex spectra.

use crate::error::{Error, Result};
use crate::linalg::{cluster_eigenvalue, eig, mat_vec, solve, vec_norm};
use crate::operators::{transfer_6vd_bar, transfer_8v};
use crate::params::ChainParams;
use crate::C;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

const ONE: C = C::new(1.0, 0.0);

/// `x_n (Σ_a J_{n,a} x_a) − q_n = 0` for `x_n = t(ξ_n)`.
#[derive(Debug, Clone)]
pub struct QuadraticSystem {
    pub j: Mat<C>,
    pub q: Vec<C>,
    pub params: ChainParams,
}

impl QuadraticSystem {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn residual(&self, x: &[C]) -> Vec<C> {
        let jx = mat_vec(&self.j, x);
        (0..self.n()).map(|k| x[k] * jx[k] - self.q[k]).collect()
    }

    /// Largest per-equation residual relative to `|q_n|`.
    pub fn relative_residual(&self, x: &[C]) -> f64 {
        self.residual(x).iter().zip(&self.q).map(|(r, q)| r.norm() / q.norm()).fold(0.0, f64::max)
    }

    /// `diag(Jx) + diag(x) J`.
    pub fn jacobian(&self, x: &[C]) -> Mat<C> {
        let jx = mat_vec(&self.j, x);
        Mat::from_fn(self.n(), self.n(), |r, c| {
            let diag = if r == c { jx[r] } else { C::new(0.0, 0.0) };
            diag + x[r] * self.j[(r, c)]
        })
    }
}

/// `J_{n,a} = θ(t₀ − ξ_n + ξ_a + η)/θ(t₀) Π_{b≠a} θ(ξ_n − ξ_b − η)/θ(ξ_a − ξ_b)`,
/// `q_n = a(ξ_n) d(ξ_n − η)`.
pub fn build_system(p: &ChainParams) -> Result<QuadraticSystem> {
    let t0 = p.t0();
    let th_t0 = p.theta(t0)?;
    if th_t0.norm() < 1e-12 * p.theta_scale()? {
        return Err(Error::Pole(format!("theta(t0) vanishes at t0 = {t0}")));
    }
    let mut j = Mat::<C>::zeros(p.n, p.n);
    for n in 0..p.n {
        for a in 0..p.n {
            let mut v = p.theta(t0 - p.xi[n] + p.xi[a] + p.eta)? / th_t0;
            for b in (0..p.n).filter(|&b| b != a) {
                v *= p.theta(p.xi[n] - p.xi[b] - p.eta)? / p.theta(p.xi[a] - p.xi[b])?;
            }
            j[(n, a)] = v;
        }
    }
    let q = (0..p.n).map(|n| p.qdet(p.xi[n])).collect::<Result<Vec<_>>>()?;
    Ok(QuadraticSystem { j, q, params: p.clone() })
}

/// Damped Newton iteration that stops at `tol`. An iterate that stalls
/// above `tol` is still accepted below `ACCEPT_TOL`, since rounding limits the
/// attainable residual when the components span many orders of magnitude.
/// `None` if it fails to converge.
pub fn newton(sys: &QuadraticSystem, x0: &[C], tol: f64, max_iter: usize) -> Option<Vec<C>> {
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        let f = sys.residual(&x);
        if sys.relative_residual(&x) < tol {
            return Some(x);
        }
        let rhs = Mat::from_fn(sys.n(), 1, |i, _| f[i]);
        let dx = solve(&sys.jacobian(&x), &rhs);
        let step: Vec<C> = (0..sys.n()).map(|i| dx[(i, 0)]).collect();
        if step.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return None;
        }
        let before = vec_norm(&f);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<C> = x.iter().zip(&step).map(|(xi, s)| xi - s * alpha).collect();
            if vec_norm(&sys.residual(&trial)) < before || alpha < 1e-4 {
                x = trial;
                break;
            }
            alpha /= 2.0;
        }
    }
    (sys.relative_residual(&x) < tol.max(ACCEPT_TOL)).then_some(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Total-degree homotopy from `x_n² = 1` with a random `γ` drawn from
    /// `seed`. Lost paths are retracked with new `γ`, then backfilled by the
    /// multistart search.
    Homotopy { seed: u64 },
    /// Newton from `200·2^N` random starts.
    NewtonMultistart { seed: u64 },
    /// Newton polish of the given tuples (normally diagonalization output).
    Seeded(Vec<Vec<C>>),
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Solutions in `Z₂`-paired order: entry `2i+1` is `−` entry `2i`.
    pub solutions: Vec<Vec<C>>,
    pub seeds_used: usize,
    pub complete: bool,
}

const NEWTON_TOL: f64 = 1e-13;
const ACCEPT_TOL: f64 = 1e-9;
/// Fresh `γ` draws before falling back to the multistart search.
const HOMOTOPY_ATTEMPTS: u64 = 4;
/// A path that stalls beyond this `t` is finished by Newton on the target.
const STALL_T: f64 = 0.9;
const DEDUP_TOL: f64 = 1e-6;

fn tuple_distance(x: &[C], y: &[C]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn tuple_scale(x: &[C]) -> f64 {
    x.iter().map(|a| a.norm()).fold(1.0, f64::max)
}

fn same_tuple(x: &[C], y: &[C], tol: f64) -> bool {
    tuple_distance(x, y) <= tol * tuple_scale(x).max(tuple_scale(y))
}

fn insert_unique(found: &mut Vec<Vec<C>>, x: Vec<C>) {
    if !found.iter().any(|y| same_tuple(y, &x, DEDUP_TOL)) {
        found.push(x);
    }
}

/// Canonical representative of `{x, −x}`: the first non-negligible
/// component has positive real part.
fn z2_representative(x: &[C]) -> Vec<C> {
    let scale = tuple_scale(x);
    let lead = x.iter().find(|z| z.norm() > 1e-9 * scale).copied().unwrap_or(ONE);
    let positive = lead.re > 0.0 || (lead.re == 0.0 && lead.im > 0.0);
    x.iter().map(|z| if positive { *z } else { -z }).collect()
}

fn z2_paired(found: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let mut reps: Vec<Vec<C>> = Vec::new();
    for x in &found {
        insert_unique(&mut reps, z2_representative(x));
    }
    reps.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    reps.into_iter().flat_map(|x| [x.clone(), x.iter().map(|z| -z).collect()]).collect()
}

pub fn solve_system(sys: &QuadraticSystem, strategy: &Strategy) -> SolveOutcome {
    let target = 1usize << sys.n();
    let mut found: Vec<Vec<C>> = Vec::new();
    let seeds_used;
    match strategy {
        Strategy::Seeded(seeds) => {
            seeds_used = seeds.len();
            let polished: Vec<Option<Vec<C>>> = seeds.par_iter().map(|s| newton(sys, s, NEWTON_TOL, 50)).collect();
            for x in polished.into_iter().flatten() {
                insert_unique(&mut found, x.iter().map(|z| -z).collect());
                insert_unique(&mut found, x);
            }
        }
        Strategy::Homotopy { seed } => {
            let mut used = 0;
            for attempt in 0..HOMOTOPY_ATTEMPTS {
                let (paths, tracked) = homotopy(sys, seed.wrapping_add(attempt));
                used += tracked;
                for x in paths {
                    insert_unique(&mut found, x.iter().map(|z| -z).collect());
                    insert_unique(&mut found, x);
                }
                if found.len() >= target {
                    break;
                }
            }
            if found.len() < target {
                used += multistart(sys, *seed, &mut found);
            }
            seeds_used = used;
        }
        Strategy::NewtonMultistart { seed } => {
            seeds_used = multistart(sys, *seed, &mut found);
        }
    }
    let complete = found.len() == target;
    SolveOutcome { solutions: z2_paired(found), seeds_used, complete }
}

fn multistart(sys: &QuadraticSystem, seed: u64, found: &mut Vec<Vec<C>>) -> usize {
    let target = 1usize << sys.n();
    let budget = 200 * target;
    let scale: Vec<f64> = sys.q.iter().map(|q| q.norm().sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<C>> = (0..budget)
        .map(|_| {
            scale
                .iter()
                .map(|s| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C::new(re, im) * *s
                })
                .collect()
        })
        .collect();
    let mut used = 0;
    for chunk in starts.chunks(64) {
        used += chunk.len();
        let results: Vec<Option<Vec<C>>> = chunk.par_iter().map(|s| newton(sys, s, NEWTON_TOL, 100)).collect();
        for x in results.into_iter().flatten() {
            insert_unique(found, x.iter().map(|z| -z).collect());
            insert_unique(found, x);
        }
        if found.len() >= target {
            break;
        }
    }
    used
}

/// `H(y, t) = (1 − t) γ (y_n² − 1) + t F̃_n(y)` where `F̃` is the system in
/// the rescaled variable `y = x/σ`, each equation divided by `|q_n|`.
struct Homotopy {
    scaled: QuadraticSystem,
    gamma: C,
}

impl Homotopy {
    fn value(&self, y: &[C], t: f64) -> Vec<C> {
        let f = self.scaled.residual(y);
        y.iter().zip(f).map(|(yi, fi)| self.gamma * (1.0 - t) * (yi * yi - ONE) + fi * t).collect()
    }

    fn dy(&self, y: &[C], t: f64) -> Mat<C> {
        let mut m = self.scaled.jacobian(y);
        for r in 0..y.len() {
            for c in 0..y.len() {
                m[(r, c)] *= t;
            }
            m[(r, r)] += self.gamma * (1.0 - t) * y[r] * 2.0;
        }
        m
    }

    fn dt(&self, y: &[C]) -> Vec<C> {
        let f = self.scaled.residual(y);
        y.iter().zip(f).map(|(yi, fi)| fi - self.gamma * (yi * yi - ONE)).collect()
    }

    fn velocity(&self, y: &[C], t: f64) -> Option<Vec<C>> {
        let rhs = self.dt(y);
        let v = solve(&self.dy(y, t), &Mat::from_fn(y.len(), 1, |i, _| -rhs[i]));
        let v: Vec<C> = (0..y.len()).map(|i| v[(i, 0)]).collect();
        v.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(v)
    }

    fn correct(&self, y: &[C], t: f64) -> Option<Vec<C>> {
        let mut y = y.to_vec();
        for _ in 0..4 {
            let h = self.value(&y, t);
            let d = solve(&self.dy(&y, t), &Mat::from_fn(y.len(), 1, |i, _| h[i]));
            let step: Vec<C> = (0..y.len()).map(|i| d[(i, 0)]).collect();
            y.iter_mut().zip(&step).for_each(|(a, s)| *a -= s);
            let size = vec_norm(&step);
            if !size.is_finite() {
                return None;
            }
            if size < 1e-10 * (1.0 + vec_norm(&y)) {
                return Some(y);
            }
        }
        None
    }

    /// RK4 predictor with Newton corrector and adaptive step. Returns the
    /// last point reached and its `t`, which is below 1 for a stalled path.
    fn track(&self, start: Vec<C>) -> Option<(Vec<C>, f64)> {
        let (mut y, mut t, mut h) = (start, 0.0f64, 0.02f64);
        let mut streak = 0;
        let add = |a: &[C], b: &[C], s: f64| -> Vec<C> { a.iter().zip(b).map(|(x, v)| x + v * s).collect() };
        while t < 1.0 {
            h = h.min(1.0 - t);
            let step = (|| {
                let k1 = self.velocity(&y, t)?;
                let k2 = self.velocity(&add(&y, &k1, h / 2.0), t + h / 2.0)?;
                let k3 = self.velocity(&add(&y, &k2, h / 2.0), t + h / 2.0)?;
                let k4 = self.velocity(&add(&y, &k3, h), t + h)?;
                let pred: Vec<C> =
                    (0..y.len()).map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0)).collect();
                let corr = self.correct(&pred, t + h)?;
                (vec_norm(&add(&corr, &pred, -1.0)) < 1e-5 * (1.0 + vec_norm(&pred))).then_some(corr)
            })();
            match step {
                Some(next) => {
                    y = next;
                    t += h;
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(0.05);
                        streak = 0;
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                    if h < 1e-12 {
                        return Some((y, t));
                    }
                }
            }
            if vec_norm(&y) > 1e8 {
                return None;
            }
        }
        Some((y, t))
    }
}

/// Tracks one path per `Z₂` orbit of start points and returns the polished
/// endpoints with the number of paths.
fn homotopy(sys: &QuadraticSystem, seed: u64) -> (Vec<Vec<C>>, usize) {
    let n = sys.n();
    let mean_q = sys.q.iter().map(|q| q.norm()).sum::<f64>() / n as f64;
    let (sum_j, count_j) = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| sys.j[(r, c)].norm())
        .filter(|v| *v > 0.0)
        .fold((0.0, 0usize), |(s, k), v| (s + v, k + 1));
    let sigma = if count_j == 0 { 1.0 } else { (mean_q / (sum_j / count_j as f64)).sqrt() };
    let scaled = QuadraticSystem {
        j: Mat::from_fn(n, n, |r, c| sys.j[(r, c)] * (sigma * sigma / sys.q[r].norm())),
        q: sys.q.iter().map(|q| q / q.norm()).collect(),
        params: sys.params.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = C::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let hom = Homotopy { scaled, gamma };
    let paths = 1usize << (n - 1);
    let ends: Vec<Option<Vec<C>>> = (0..paths)
        .into_par_iter()
        .map(|k| {
            let start: Vec<C> = (0..n).map(|i| if i > 0 && (k >> (i - 1)) & 1 == 1 { -ONE } else { ONE }).collect();
            let (y, t) = hom.track(start)?;
            if t < STALL_T {
                return None;
            }
            let x: Vec<C> = y.iter().map(|v| v * sigma).collect();
            newton(sys, &x, NEWTON_TOL, if t < 1.0 { 100 } else { 20 })
        })
        .collect();
    (ends.into_iter().flatten().collect(), paths)
}

/// `t(λ) = Σ_a θ(t₀ − λ + ξ_a)/θ(t₀) Π_{b≠a} θ(λ − ξ_b)/θ(ξ_a − ξ_b) t(ξ_a)`.
pub fn interpolate(t_at_xi: &[C], lambda: C, p: &ChainParams) -> Result<C> {
    if t_at_xi.len() != p.n {
        return Err(Error::Invalid(format!("{} values for a {}-site chain", t_at_xi.len(), p.n)));
    }
    let t0 = p.t0();
    let th_t0 = p.theta(t0)?;
    if th_t0.norm() < 1e-12 * p.theta_scale()? {
        return Err(Error::Pole(format!("theta(t0) vanishes at t0 = {t0}")));
    }
    let mut out = C::new(0.0, 0.0);
    for (a, &t) in t_at_xi.iter().enumerate() {
        let mut term = p.theta(t0 - lambda + p.xi[a])? / th_t0 * t;
        for b in (0..p.n).filter(|&b| b != a) {
            term *= p.theta(lambda - p.xi[b])? / p.theta(p.xi[a] - p.xi[b])?;
        }
        out += term;
    }
    Ok(out)
}

/// `|t(ξ_a)t(ξ_a − η) − a(ξ_a)d(ξ_a − η)| / |a(ξ_a)d(ξ_a − η)|` per site.
pub fn functional_residuals(t_at_xi: &[C], p: &ChainParams) -> Result<Vec<f64>> {
    (0..p.n)
        .map(|a| {
            let shifted = interpolate(t_at_xi, p.xi_h(a, 1), p)?;
            let q = p.qdet(p.xi[a])?;
            Ok((t_at_xi[a] * shifted - q).norm() / q.norm())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferModel {
    SixVertexBar,
    EightVertex,
}

impl TransferModel {
    pub fn transfer(self, lambda: C, p: &ChainParams) -> Result<Mat<C>> {
        Ok(match self {
            TransferModel::SixVertexBar => transfer_6vd_bar(lambda, p)?.mat,
            TransferModel::EightVertex => transfer_8v(lambda, p)?.mat,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            TransferModel::SixVertexBar => "6vd",
            TransferModel::EightVertex => "8v",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Diagonalization,
    SystemSolver,
    Both,
}

#[derive(Debug, Clone)]
pub struct SpectrumRecord {
    pub model: TransferModel,
    pub t_at_xi: Vec<C>,
    pub multiplicity: usize,
    pub source: Source,
    /// Worst per-site functional-equation residual.
    pub functional_residual: f64,
    /// `max ‖T(λ₀)v − t(λ₀)v‖/‖v‖` over the cluster's right eigenvectors.
    pub eigen_residual: Option<f64>,
}

impl SpectrumRecord {
    pub fn from_solution(model: TransferModel, x: Vec<C>, p: &ChainParams) -> Result<Self> {
        let worst = functional_residuals(&x, p)?.into_iter().fold(0.0, f64::max);
        Ok(Self {
            model,
            t_at_xi: x,
            multiplicity: 1,
            source: Source::SystemSolver,
            functional_residual: worst,
            eigen_residual: None,
        })
    }

    /// `Q(ξ_a − η)/Q(ξ_a) = t(ξ_a)/d(ξ_a − η)` for the right SOV eigenstate.
    pub fn q_ratios(&self, p: &ChainParams) -> Result<Vec<C>> {
        (0..p.n).map(|a| Ok(self.t_at_xi[a] / p.d_fn(p.xi_h(a, 1))?)).collect()
    }
}

pub const CLUSTER_TOL: f64 = 1e-7;

/// Diagonalizes the transfer matrix at `λ₀` and reads `t(ξ_n)` on every
/// eigenvalue cluster through the commuting family.
pub fn spectrum_via_diagonalization(model: TransferModel, p: &ChainParams, lambda0: C) -> Result<Vec<SpectrumRecord>> {
    let t = model.transfer(lambda0, p)?;
    let sys = eig(&t, CLUSTER_TOL)?;
    let at_xi = p.xi.par_iter().map(|&x| model.transfer(x, p)).collect::<Result<Vec<_>>>()?;
    (0..sys.clusters.len())
        .map(|c| {
            let t_at_xi = at_xi.iter().map(|m| cluster_eigenvalue(m, &sys, c)).collect::<Result<Vec<_>>>()?;
            let mu = sys.cluster_value(c);
            let r = sys.right_block(c);
            let tr = &t * &r;
            let eigen = (0..r.ncols())
                .map(|k| {
                    let v: Vec<C> = (0..r.nrows()).map(|i| r[(i, k)]).collect();
                    let diff: Vec<C> = (0..r.nrows()).map(|i| tr[(i, k)] - mu * v[i]).collect();
                    vec_norm(&diff) / vec_norm(&v)
                })
                .fold(0.0, f64::max);
            let worst = functional_residuals(&t_at_xi, p)?.into_iter().fold(0.0, f64::max);
            Ok(SpectrumRecord {
                model,
                t_at_xi,
                multiplicity: sys.multiplicity(c),
                source: Source::Diagonalization,
                functional_residual: worst,
                eigen_residual: Some(eigen),
            })
        })
        .collect()
}

/// Draws `λ₀` from `[0.1, 1.1] + i[h/5, h]` with `h = min(0.35, π·Im ω/4)`,
/// retrying up to eleven times while two clusters sit closer than
/// `10·CLUSTER_TOL` or a cluster spreads wider than `1e-4·CLUSTER_TOL`, both
/// relative to the spectral radius. If no draw clears both bounds, the best
/// separated one is returned.
pub fn generic_lambda0(model: TransferModel, p: &ChainParams, seed: u64) -> Result<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = (PI * p.ctx.omega.im / 4.0).min(0.35);
    let mut best = (f64::NEG_INFINITY, C::new(0.6, 0.5 * h));
    for _ in 0..12 {
        let lambda = C::new(rng.gen_range(0.1..1.1), rng.gen_range(0.2 * h..h));
        let t = model.transfer(lambda, p)?;
        let sys = eig(&t, CLUSTER_TOL)?;
        let radius = sys.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let gap = sys.min_cluster_gap() / radius;
        let spread = sys.max_cluster_spread() / radius;
        if gap >= 10.0 * CLUSTER_TOL && spread <= 1e-4 * CLUSTER_TOL {
            return Ok(lambda);
        }
        let score = gap.min(10.0 * CLUSTER_TOL) - spread;
        if score > best.0 {
            best = (score, lambda);
        }
    }
    Ok(best.1)
}

pub fn diagonalize(model: TransferModel, p: &ChainParams, seed: u64) -> Result<Vec<SpectrumRecord>> {
    spectrum_via_diagonalization(model, p, generic_lambda0(model, p, seed)?)
}

/// Polishes diagonalization tuples by Newton steps on the quadratic system,
/// which both models share. A tuple is replaced only when Newton converges
/// within `1e-3` (relative) of it to a root no other record has taken.
/// Returns the number of replaced tuples.
pub fn refine(records: &mut [SpectrumRecord], p: &ChainParams) -> Result<usize> {
    let sys = build_system(p)?;
    let polished: Vec<Option<Vec<C>>> = records
        .par_iter()
        .map(|r| {
            newton(&sys, &r.t_at_xi, NEWTON_TOL, 30)
                .filter(|x| tuple_distance(x, &r.t_at_xi) <= 1e-3 * tuple_scale(&r.t_at_xi))
        })
        .collect();
    let mut replaced = 0;
    for (k, x) in polished.iter().enumerate() {
        let Some(x) = x else { continue };
        let clash =
            polished.iter().enumerate().any(|(j, y)| j != k && y.as_ref().is_some_and(|y| same_tuple(x, y, DEDUP_TOL)));
        if clash {
            continue;
        }
        let worst = functional_residuals(x, p)?.into_iter().fold(0.0, f64::max);
        if worst < records[k].functional_residual {
            records[k].t_at_xi = x.clone();
            records[k].functional_residual = worst;
            replaced += 1;
        }
    }
    Ok(replaced)
}

/// Merges solver output into diagonalization records, marking shared tuples.
pub fn merge_sources(
    diag: &mut [SpectrumRecord],
    solutions: &[Vec<C>],
    p: &ChainParams,
) -> Result<Vec<SpectrumRecord>> {
    let mut extra = Vec::new();
    for x in solutions {
        match diag.iter_mut().find(|r| same_tuple(&r.t_at_xi, x, DEDUP_TOL)) {
            Some(r) => r.source = Source::Both,
            None => extra.push(SpectrumRecord::from_solution(TransferModel::SixVertexBar, x.clone(), p)?),
        }
    }
    Ok(extra)
}

/// Largest componentwise distance between two tuple sets matched greedily
/// by nearest neighbour; `None` if the sizes differ.
pub fn set_distance(a: &[Vec<C>], b: &[Vec<C>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for x in a {
        let d = b.iter().map(|y| tuple_distance(x, y)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    for y in b {
        let d = a.iter().map(|x| tuple_distance(x, y)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Some(worst)
}

/// Minimal componentwise distance between distinct tuples.
pub fn min_pairwise_distance(tuples: &[Vec<C>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..tuples.len() {
        for j in i + 1..tuples.len() {
            best = best.min(tuple_distance(&tuples[i], &tuples[j]));
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct InclusionEntry {
    pub eight: usize,
    pub nearest_six: usize,
    pub distance: f64,
    pub multiplicity: usize,
    /// Index of the 6VD tuple `−t` paired with the matched one.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectrumComparison {
    pub inclusion: Vec<InclusionEntry>,
    pub max_inclusion_distance: f64,
    /// `min_{a,b} ‖z^{(a)} + z^{(b)}‖` over the 8V tuples.
    pub eight_z2_gap: f64,
    pub six_unmatched: Vec<usize>,
    pub six_min_distance: f64,
}

pub fn compare_spectra(six: &[SpectrumRecord], eight: &[SpectrumRecord]) -> SpectrumComparison {
    let six_tuples: Vec<Vec<C>> = six.iter().map(|r| r.t_at_xi.clone()).collect();
    let mut matched = vec![false; six.len()];
    let inclusion: Vec<InclusionEntry> = eight
        .iter()
        .enumerate()
        .map(|(e, rec)| {
            let (nearest, distance) = six_tuples
                .iter()
                .enumerate()
                .map(|(k, x)| (k, tuple_distance(x, &rec.t_at_xi)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((usize::MAX, f64::INFINITY));
            if nearest != usize::MAX {
                matched[nearest] = true;
            }
            let partner = (nearest != usize::MAX)
                .then(|| {
                    let neg: Vec<C> = six_tuples[nearest].iter().map(|z| -z).collect();
                    six_tuples.iter().position(|y| same_tuple(y, &neg, DEDUP_TOL))
                })
                .flatten();
            InclusionEntry { eight: e, nearest_six: nearest, distance, multiplicity: rec.multiplicity, partner }
        })
        .collect();
    let max_inclusion_distance = inclusion.iter().map(|i| i.distance).fold(0.0, f64::max);
    let mut eight_z2_gap = f64::INFINITY;
    for x in eight {
        for y in eight {
            let d = x.t_at_xi.iter().zip(&y.t_at_xi).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max);
            eight_z2_gap = eight_z2_gap.min(d);
        }
    }
    SpectrumComparison {
        inclusion,
        max_inclusion_distance,
        eight_z2_gap,
        six_unmatched: (0..six.len()).filter(|&k| !matched[k]).collect(),
        six_min_distance: min_pairwise_distance(&six_tuples),
    }
}
