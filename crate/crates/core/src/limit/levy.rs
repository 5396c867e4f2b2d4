//! Brownian motion with parabolic drift, thinned Lévy processes and the
//! `tau` in (2, 3) jump process, all sampled on a uniform grid.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use super::path::LimitPath;
use crate::degrees::Pmf;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

fn grid_len<T: Scalar>(horizon: T, dt: T) -> Result<usize> {
    if !(horizon > T::zero() && dt > T::zero() && horizon.is_finite()) {
        return Err(invalid("horizon and grid step must be positive"));
    }
    let steps = (horizon / dt).round().to_usize().ok_or_else(|| invalid("grid too long"))?;
    Ok(steps.max(1) + 1)
}

/// `(sqrt(kappa)/mu) B(t) + lambda t - kappa t^2 / (2 mu^3)`: Gaussian
/// increments of variance `(kappa/mu^2) dt` plus the exact drift.
pub fn simulate_bm_parabolic<T: Scalar, R: Rng + ?Sized>(
    mu: T,
    kappa: T,
    lambda: T,
    horizon: T,
    dt: T,
    rng: &mut R,
) -> Result<LimitPath<T>> {
    if !(mu > T::zero() && kappa >= T::zero()) {
        return Err(invalid("need mu > 0 and kappa >= 0"));
    }
    let len = grid_len(horizon, dt)?;
    let sd = (kappa * dt).sqrt() / mu;
    let mu3 = mu * mu * mu;
    let mut b = T::zero();
    let mut values = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 {
            let z: f64 = StandardNormal.sample(rng);
            b = b + sd * T::lit(z);
        }
        let t = T::from_count(i) * dt;
        values.push(b + lambda * t - kappa * t * t / (T::lit(2.0) * mu3));
    }
    LimitPath::new(dt, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaClass {
    /// summable cubes, non-summable squares (`tau` in (3, 4))
    L3NotL2,
    /// summable squares, non-summable entries (`tau` in (2, 3))
    L2NotL1,
    Other,
}

/// Nonincreasing positive weights `theta_1 >= ... >= theta_K`, with
/// estimates of the power sums of the dropped tail `i > K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSequence<T> {
    values: Vec<T>,
    class: ThetaClass,
    /// `sum_{i > K} theta_i^2` (infinite when divergent)
    tail_sq: T,
    /// `sum_{i > K} theta_i^3`
    tail_cube: T,
}

impl<T: Scalar> ThetaSequence<T> {
    /// Explicit finite sequence; the tail is empty.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("theta sequence"));
        }
        if values.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
            return Err(invalid("theta entries must be positive and finite"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("theta must be nonincreasing"));
        }
        Ok(Self { values, class: ThetaClass::Other, tail_sq: T::zero(), tail_cube: T::zero() })
    }

    /// `theta_i = c_F i^{-alpha}`, `alpha = 1/(tau - 1)`, truncated at `K`.
    /// Tail sums use `int_{K+1/2}^inf x^{-p alpha} dx`.
    pub fn power_law(tau: T, c_f: T, k: usize) -> Result<Self> {
        if k == 0 || !(c_f > T::zero()) || !(tau > T::lit(2.0) && tau < T::lit(4.0)) || tau == T::lit(3.0) {
            return Err(invalid("need K >= 1, c_F > 0 and tau in (2, 3) or (3, 4)"));
        }
        let alpha = T::one() / (tau - T::one());
        let values = (1..=k).map(|i| c_f * T::from_count(i).powf(-alpha)).collect();
        let edge = T::from_count(k) + T::lit(0.5);
        let tail = |p: T| {
            let e = p * alpha;
            if e <= T::one() {
                T::infinity()
            } else {
                c_f.powf(p) * edge.powf(T::one() - e) / (e - T::one())
            }
        };
        let class = if tau < T::lit(3.0) { ThetaClass::L2NotL1 } else { ThetaClass::L3NotL2 };
        Ok(Self { values, class, tail_sq: tail(T::lit(2.0)), tail_cube: tail(T::lit(3.0)) })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn truncation(&self) -> usize {
        self.values.len()
    }

    pub fn class(&self) -> ThetaClass {
        self.class
    }

    pub fn tail_sq(&self) -> T {
        self.tail_sq
    }

    pub fn tail_cube(&self) -> T {
        self.tail_cube
    }

    /// `sum_{i <= K} theta_i^2`.
    pub fn head_sq(&self) -> T {
        self.values.iter().map(|&x| x * x).sum()
    }

    /// Full `||theta||_2^2` including the tail estimate.
    pub fn norm_sq(&self) -> T {
        self.head_sq() + self.tail_sq
    }
}

/// Standard deviation bound of the dropped compensated tail at time `t`
/// for the thinned Lévy process:
/// `Var <= sum_{i>K} theta_i^3 t / (mu nu^{3/2})`.
pub fn levy_tail_bound<T: Scalar>(theta: &ThetaSequence<T>, mu: T, nu: T, t: T) -> T {
    (theta.tail_cube() * t / (mu * nu * nu.sqrt())).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyPair<T> {
    /// `S(t)`: each `i` jumps at most once
    pub thinned: LimitPath<T>,
    /// `L(t)`: same first jumps, continued as Poisson processes
    pub levy: LimitPath<T>,
    pub tail_bound: T,
}

fn accumulate<T: Scalar>(len: usize, dt: T, drift: T, jumps: &[(T, T)]) -> Vec<T> {
    let mut inc = vec![T::zero(); len];
    for &(t, size) in jumps {
        let cell = (t / dt).ceil().to_usize().unwrap_or(len).min(len);
        if cell < len {
            inc[cell] = inc[cell] + size;
        }
    }
    let mut acc = T::zero();
    (0..len)
        .map(|i| {
            acc = acc + inc[i];
            acc + drift * T::from_count(i) * dt
        })
        .collect()
}

fn check_levy<T: Scalar>(theta: &ThetaSequence<T>, mu: T, nu: T, horizon: T, tol: Option<T>) -> Result<T> {
    if !(mu > T::zero() && nu > T::zero()) {
        return Err(invalid("need mu > 0 and nu > 0"));
    }
    let bound = levy_tail_bound(theta, mu, nu, horizon);
    if let Some(tol) = tol {
        if bound > tol {
            return Err(invalid(format!(
                "truncation K = {} leaves tail bound {bound} above tolerance {tol}",
                theta.truncation()
            )));
        }
    }
    log::debug!("thinned Levy truncation K = {}, tail bound {bound}", theta.truncation());
    Ok(bound)
}

/// `S(t) = sum_i (theta_i/sqrt(nu)) (1{xi_i <= t} - theta_i t/(mu sqrt(nu))) + lambda t`
/// with `xi_i ~ Exp(theta_i/(mu sqrt(nu)))`, together with the Lévy
/// process that replaces each indicator by a Poisson counter started from
/// the same `xi_i`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_levy_pair<T: Scalar, R: Rng + ?Sized>(
    theta: &ThetaSequence<T>,
    mu: T,
    nu: T,
    lambda: T,
    horizon: T,
    dt: T,
    tol: Option<T>,
    rng: &mut R,
) -> Result<LevyPair<T>> {
    let tail_bound = check_levy(theta, mu, nu, horizon, tol)?;
    let len = grid_len(horizon, dt)?;
    let sn = nu.sqrt();
    let h = horizon.as_f64();
    let mut first = Vec::new();
    let mut all = Vec::new();
    let mut comp = T::zero();
    for &th in theta.values() {
        comp = comp + th * th;
        let rate = (th / (mu * sn)).as_f64();
        let exp = Exp::new(rate).map_err(|e| invalid(e.to_string()))?;
        let size = th / sn;
        let mut t = exp.sample(rng);
        if t <= h {
            first.push((T::lit(t), size));
        }
        while t <= h {
            all.push((T::lit(t), size));
            t += exp.sample(rng);
        }
    }
    let drift = lambda - comp / (mu * nu);
    let thinned = LimitPath::with_jumps(dt, accumulate(len, dt, drift, &first), first.iter().map(|j| j.0).collect())?;
    let levy = LimitPath::with_jumps(dt, accumulate(len, dt, drift, &all), all.iter().map(|j| j.0).collect())?;
    Ok(LevyPair { thinned, levy, tail_bound })
}

pub fn simulate_thinned_levy<T: Scalar, R: Rng + ?Sized>(
    theta: &ThetaSequence<T>,
    mu: T,
    nu: T,
    lambda: T,
    horizon: T,
    dt: T,
    rng: &mut R,
) -> Result<LimitPath<T>> {
    Ok(simulate_levy_pair(theta, mu, nu, lambda, horizon, dt, None, rng)?.thinned)
}

/// `S(t) = (lambda mu/||theta||^2) sum_i theta_i 1{xi_i <= t} - t`,
/// `xi_i ~ Exp(theta_i/mu)`; `||theta||^2` includes the tail estimate.
pub fn simulate_tau23_process<T: Scalar, R: Rng + ?Sized>(
    theta: &ThetaSequence<T>,
    mu: T,
    lambda: T,
    horizon: T,
    dt: T,
    rng: &mut R,
) -> Result<LimitPath<T>> {
    if !(lambda > T::zero() && mu > T::zero()) {
        return Err(invalid("need lambda > 0 and mu > 0"));
    }
    let norm = theta.norm_sq();
    if !norm.is_finite() {
        return Err(invalid("theta must be square summable"));
    }
    let len = grid_len(horizon, dt)?;
    let h = horizon.as_f64();
    let scale = lambda * mu / norm;
    let mut jumps = Vec::new();
    for &th in theta.values() {
        let exp = Exp::new((th / mu).as_f64()).map_err(|e| invalid(e.to_string()))?;
        let t = exp.sample(rng);
        if t <= h {
            jumps.push((T::lit(t), scale * th));
        }
    }
    LimitPath::with_jumps(dt, accumulate(len, dt, -T::one(), &jumps), jumps.iter().map(|j| j.0).collect())
}

/// Mark intensity `(lambda mu^2)^{-1} ||theta||^2` of the `tau` in (2, 3)
/// process.
pub fn tau23_mark_scale<T: Scalar>(theta: &ThetaSequence<T>, mu: T, lambda: T) -> T {
    theta.norm_sq() / (lambda * mu * mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmParameters<T> {
    pub mu: T,
    pub kappa: T,
    pub beta: T,
}

/// `mu = E[D]`, `kappa = E[D^3] E[D] - E[D^2]^2`, `beta = 1/mu` for the
/// percolated degree law `D`.
pub fn bm_parameters<T: Scalar>(p: &Pmf<T>) -> Result<BmParameters<T>> {
    let mu = p.mean();
    if !(mu > T::zero()) {
        return Err(invalid("percolated degree law has zero mean"));
    }
    let (m2, m3) = (p.moment(2), p.moment(3));
    if !m3.is_finite() {
        return Err(invalid("infinite third moment"));
    }
    Ok(BmParameters { mu, kappa: m3 * mu - m2 * m2, beta: T::one() / mu })
}
