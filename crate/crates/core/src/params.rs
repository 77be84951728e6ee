//! Chain parameters and spin-basis bookkeeping.
//!
//! A basis state is a tuple `h ∈ {0,1}^N` (`h_a = 0` is spin up) stored as
//! the integer `k = Σ_a 2^{a−1} h_a`, so site 1 is the least significant bit.

use crate::elliptic::ThetaContext;
use crate::error::{Error, Result};
use crate::C;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub n: usize,
    pub xi: Vec<C>,
    pub eta: C,
    pub ctx: ThetaContext,
}

impl ChainParams {
    pub fn new(xi: Vec<C>, eta: C, ctx: ThetaContext) -> Result<Self> {
        let n = xi.len();
        if n == 0 {
            return Err(Error::Invalid("at least one site is required".into()));
        }
        if n.is_multiple_of(2) {
            return Err(Error::EvenChain(n));
        }
        if n > 12 {
            return Err(Error::Invalid(format!("N = {n} exceeds the dense limit of 12 sites")));
        }
        if xi.iter().chain(std::iter::once(&eta)).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite inhomogeneity or coupling".into()));
        }
        let p = Self { n, xi, eta, ctx };
        if p.lattice_distance(eta) < 1e-8 {
            return Err(Error::Invalid("eta lies on the period lattice".into()));
        }
        if let Some((a, b, shift, d)) = p.closest_pair() {
            if d < 1e-8 {
                return Err(Error::Invalid(format!(
                    "inhomogeneities {} and {} are not generic (shift {shift} eta)",
                    a + 1,
                    b + 1
                )));
            }
        }
        Ok(p)
    }

    /// Pair `(a, b, shift)` minimizing the lattice distance of
    /// `ξ_a − ξ_b + shift·η`, with that distance.
    fn closest_pair(&self) -> Option<(usize, usize, f64, f64)> {
        let mut best: Option<(usize, usize, f64, f64)> = None;
        for a in 0..self.n {
            for b in (0..self.n).filter(|&b| b != a) {
                for shift in [-1.0, 0.0, 1.0] {
                    let d = self.lattice_distance(self.xi[a] - self.xi[b] + self.eta * shift);
                    if best.is_none_or(|x| d < x.3) {
                        best = Some((a, b, shift, d));
                    }
                }
            }
        }
        best
    }

    /// Distance of the parameters from the non-generic set: the smallest
    /// lattice distance of `ξ_a − ξ_b` and `ξ_a − ξ_b ± η` (and of `η`).
    /// Spectra and SOV bases lose accuracy as this approaches zero.
    pub fn generic_margin(&self) -> f64 {
        let pairs = self.closest_pair().map_or(f64::INFINITY, |x| x.3);
        pairs.min(self.lattice_distance(self.eta))
    }

    /// Real parameters as in the appendix tables: `(ξ, η, nome t)`.
    pub fn real(xi: &[f64], eta: f64, nome: f64) -> Result<Self> {
        let ctx = ThetaContext::from_nome(C::new(nome, 0.0))?;
        Self::new(xi.iter().map(|&x| C::new(x, 0.0)).collect(), C::new(eta, 0.0), ctx)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Distance from `z` to the nearest point of `πZ + πωZ` (approximate for skew lattices).
    pub fn lattice_distance(&self, z: C) -> f64 {
        let w = self.ctx.omega;
        let b = (z.im / (PI * w.im)).round();
        let a = ((z.re - b * PI * w.re) / PI).round();
        (z - PI * a - PI * w * b).norm()
    }

    pub fn t0(&self) -> C {
        -self.eta * self.n as f64 / 2.0
    }

    /// `ξ_a^{(h)} = ξ_a − ηh`, with `a` zero-based.
    pub fn xi_h(&self, a: usize, h: u8) -> C {
        self.xi[a] - self.eta * h as f64
    }

    /// `θ(λ) = θ₁(λ|ω)`.
    pub fn theta(&self, z: C) -> Result<C> {
        self.ctx.th(1, z)
    }

    /// `a(λ) = Π_n θ(λ − ξ_n + η)`.
    pub fn a_fn(&self, lambda: C) -> Result<C> {
        self.xi.iter().try_fold(C::new(1.0, 0.0), |acc, &x| Ok(acc * self.theta(lambda - x + self.eta)?))
    }

    /// `d(λ) = a(λ − η) = Π_n θ(λ − ξ_n)`.
    pub fn d_fn(&self, lambda: C) -> Result<C> {
        self.a_fn(lambda - self.eta)
    }

    /// Quantum determinant value `a(λ) d(λ − η)`.
    pub fn qdet(&self, lambda: C) -> Result<C> {
        Ok(self.a_fn(lambda)? * self.d_fn(lambda - self.eta)?)
    }

    /// Magnitude used to decide whether a theta value is a numerical zero.
    pub fn theta_scale(&self) -> Result<f64> {
        Ok(self.ctx.th(2, C::new(0.0, 0.0))?.norm().max(1e-300))
    }

    /// `t_h = −(η/2) s_h` for the basis state `k`.
    pub fn t_h(&self, k: usize) -> C {
        -self.eta * spin_sum(k, self.n) as f64 / 2.0
    }
}

/// `h_a` of basis state `k` (zero-based site).
#[inline]
pub fn bit(k: usize, a: usize) -> u8 {
    ((k >> a) & 1) as u8
}

/// `s_h = Σ_a (1 − 2h_a)`.
pub fn spin_sum(k: usize, n: usize) -> i32 {
    n as i32 - 2 * (k.count_ones() as i32)
}

/// `Σ_{a<site} (1 − 2h_a)` over the sites preceding `site` (zero-based).
pub fn partial_spin(k: usize, site: usize) -> i32 {
    let mask = (1usize << site) - 1;
    site as i32 - 2 * ((k & mask).count_ones() as i32)
}

pub fn config(k: usize, n: usize) -> Vec<u8> {
    (0..n).map(|a| bit(k, a)).collect()
}

pub fn index(h: &[u8]) -> usize {
    h.iter().enumerate().map(|(a, &x)| (x as usize) << a).sum()
}
