//! Bond percolation, the explosion construction, critical windows and
//! critical values.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::degrees::{nu_of, size_biased_distribution, DegreeSequence, Pmf};
use crate::error::{invalid, Error, Result};
use crate::generators::pair_half_edges;
use crate::graph::MultiGraph;
use crate::scalar::Scalar;

fn check_pi<T: Scalar>(pi: T) -> Result<()> {
    if !(T::zero()..=T::one()).contains(&pi) {
        return Err(invalid(format!("retention probability {pi} outside [0, 1]")));
    }
    Ok(())
}

/// Keeps every edge copy (parallel copies and self-loops included)
/// independently with probability `pi`.
pub fn percolate<T: Scalar, R: Rng + ?Sized>(g: &MultiGraph, pi: T, rng: &mut R) -> Result<MultiGraph> {
    check_pi(pi)?;
    let p = pi.as_f64();
    let edges = g.edges().iter().copied().filter(|_| rng.random::<f64>() < p).collect();
    Ok(MultiGraph::from_edges_unchecked(g.vertex_count(), edges))
}

/// Percolation driven by one uniform per edge: edge `i` is kept iff
/// `uniforms[i] < pi`. Sharing the uniforms couples all `pi` monotonically.
pub fn percolate_coupled<T: Scalar>(g: &MultiGraph, pi: T, uniforms: &[f64]) -> Result<MultiGraph> {
    check_pi(pi)?;
    if uniforms.len() < g.edge_count() {
        return Err(Error::InsufficientSamples { need: g.edge_count(), got: uniforms.len() });
    }
    let p = pi.as_f64();
    let edges = g.edges().iter().zip(uniforms).filter(|(_, &u)| u < p).map(|(&e, _)| e).collect();
    Ok(MultiGraph::from_edges_unchecked(g.vertex_count(), edges))
}

/// How the retention probability is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime<T> {
    /// `pi` given directly
    Fixed,
    /// `(1 + lambda n^{-1/3}) / nu_n`
    FiniteThird,
    /// `(1 + lambda / c_n) / nu_n` with `c_n = n^{(tau-3)/(tau-1)}`
    Heavy { tau: T },
    /// `lambda / nu_n`
    Tau23,
    /// `lambda n^{-(3-tau)/2}`
    SingleEdge { tau: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams<T> {
    pub pi: T,
    pub regime: Regime<T>,
    pub lambda: T,
}

impl<T: Scalar> PercolationParams<T> {
    pub fn fixed(pi: T) -> Result<Self> {
        check_pi(pi)?;
        Ok(Self { pi, regime: Regime::Fixed, lambda: T::zero() })
    }

    /// Resolves a window regime for a graph on `n` vertices with
    /// `nu_n = nu`. `nu` is ignored by the single-edge window.
    pub fn window(regime: Regime<T>, lambda: T, n: usize, nu: T) -> Result<Self> {
        let pi = match regime {
            Regime::Fixed => return Err(invalid("fixed regime has no window formula")),
            Regime::FiniteThird => pi_from_nu(nu, T::one() + lambda * T::from_count(n).powf(-T::lit(1.0 / 3.0)))?,
            Regime::Heavy { tau } => {
                let c = scaling_constants(n, tau)?.c_n;
                if !(tau > T::lit(3.0) && tau < T::lit(4.0)) {
                    return Err(invalid(format!("heavy-tail window needs tau in (3, 4), got {tau}")));
                }
                pi_from_nu(nu, T::one() + lambda / c)?
            }
            Regime::Tau23 => {
                if !(lambda > T::zero()) {
                    return Err(invalid("tau23 window needs lambda > 0"));
                }
                pi_from_nu(nu, lambda)?
            }
            Regime::SingleEdge { tau } => single_edge_raw(n, tau, lambda)?,
        };
        Ok(Self { pi: clamp_pi(pi), regime, lambda })
    }
}

fn pi_from_nu<T: Scalar>(nu: T, numerator: T) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(invalid("nu_n must be positive"));
    }
    Ok(numerator / nu)
}

/// Clamps a window value into `[0, 1]`, warning when it had to.
pub fn clamp_pi<T: Scalar>(pi: T) -> T {
    if pi < T::zero() || pi > T::one() {
        log::warn!("window value {pi} clamped to [0, 1]");
    }
    pi.max(T::zero()).min(T::one())
}

pub fn pi_window_finite_third<T: Scalar>(d: &DegreeSequence, lambda: T) -> Result<T> {
    Ok(PercolationParams::window(Regime::FiniteThird, lambda, d.len(), d.nu_n())?.pi)
}

pub fn pi_window_heavy<T: Scalar>(d: &DegreeSequence, lambda: T, tau: T) -> Result<T> {
    Ok(PercolationParams::window(Regime::Heavy { tau }, lambda, d.len(), d.nu_n())?.pi)
}

pub fn pi_window_tau23<T: Scalar>(d: &DegreeSequence, lambda: T) -> Result<T> {
    Ok(PercolationParams::window(Regime::Tau23, lambda, d.len(), d.nu_n())?.pi)
}

pub fn pi_window_single_edge<T: Scalar>(n: usize, tau: T, lambda: T) -> Result<T> {
    Ok(clamp_pi(single_edge_raw(n, tau, lambda)?))
}

fn single_edge_raw<T: Scalar>(n: usize, tau: T, lambda: T) -> Result<T> {
    if !(tau > T::lit(2.0) && tau < T::lit(3.0)) {
        return Err(invalid(format!("single-edge window needs tau in (2, 3), got {tau}")));
    }
    if !(lambda > T::zero()) {
        return Err(invalid("single-edge window needs lambda > 0"));
    }
    let eta_s = (T::lit(3.0) - tau) / T::lit(2.0);
    Ok(lambda * T::from_count(n).powf(-eta_s))
}

/// Power-law scaling exponents and sequences with trivial slowly varying
/// part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants<T> {
    pub alpha: T,
    pub rho: T,
    pub eta: T,
    pub a_n: T,
    pub b_n: T,
    pub c_n: T,
}

pub fn scaling_constants<T: Scalar>(n: usize, tau: T) -> Result<ScalingConstants<T>> {
    if !(tau > T::lit(2.0) && tau < T::lit(4.0)) {
        return Err(invalid(format!("tau = {tau} outside (2, 4)")));
    }
    let t1 = tau - T::one();
    let alpha = T::one() / t1;
    let rho = (tau - T::lit(2.0)) / t1;
    let eta = (tau - T::lit(3.0)) / t1;
    let nn = T::from_count(n);
    Ok(ScalingConstants { alpha, rho, eta, a_n: nn.powf(alpha), b_n: nn.powf(rho), c_n: nn.powf(eta) })
}

/// Degrees after the explosion step: vertices `0..n` carry their retained
/// half-edges, vertices `n..n + red` are red degree-1 vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplodedDegrees {
    pub n: usize,
    pub degrees: Vec<usize>,
}

impl ExplodedDegrees {
    pub fn red_count(&self) -> usize {
        self.degrees.len() - self.n
    }

    pub fn is_red(&self, v: usize) -> bool {
        v >= self.n
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Keeps each half-edge of `v` with probability `sqrt(pi)`; every removed
/// half-edge becomes its own red vertex of degree 1.
pub fn janson_explode<T: Scalar, R: Rng + ?Sized>(d: &DegreeSequence, pi: T, rng: &mut R) -> Result<ExplodedDegrees> {
    check_pi(pi)?;
    let q = pi.sqrt().as_f64();
    let n = d.len();
    let mut degrees = Vec::with_capacity(n);
    let mut red = 0;
    for &dv in d.as_slice() {
        let kept = Binomial::new(dv as u64, q).map_err(|e| invalid(e.to_string()))?.sample(rng) as usize;
        red += dv - kept;
        degrees.push(kept);
    }
    degrees.extend(std::iter::repeat_n(1, red));
    Ok(ExplodedDegrees { n, degrees })
}

/// Percolated configuration model via explosion: pair the exploded degrees
/// uniformly, then delete the red vertices with their edges.
pub fn janson_percolate<T: Scalar, R: Rng + ?Sized>(d: &DegreeSequence, pi: T, rng: &mut R) -> Result<MultiGraph> {
    let ex = janson_explode(d, pi, rng)?;
    Ok(restrict_exploded(&ex, &pair_half_edges(&ex.degrees, rng)?))
}

/// Drops every edge with a red endpoint and returns the graph on the
/// original vertices.
pub fn restrict_exploded(ex: &ExplodedDegrees, g: &MultiGraph) -> MultiGraph {
    let edges = g.edges().iter().copied().filter(|&(u, v)| !ex.is_red(u) && !ex.is_red(v)).collect();
    MultiGraph::from_edges_unchecked(ex.n, edges)
}

pub const THETA_TOL: f64 = 1e-12;
const THETA_MAX_ITER: usize = 50_000_000;

/// Survival probability of the percolated unimodular branching process
/// with root offspring `D` and later offspring `D* - 1`.
///
/// Iterates `eta <- g*(1 - pi + pi eta)` from 0 until the change drops
/// below `tol`; `eta` increases to the extinction probability of a
/// half-edge. Returns `1 - g_D(1 - pi + pi eta)`.
pub fn theta_survival<T: Scalar>(p: &Pmf<T>, pi: T, tol: T) -> Result<T> {
    check_pi(pi)?;
    let star = size_biased_distribution(p)?;
    if pi * p.nu() <= T::one() {
        return Ok(T::zero());
    }
    // pgf of D* - 1
    let shifted: Vec<T> = star.masses().iter().skip(1).copied().collect();
    let g_star = |s: T| shifted.iter().rev().fold(T::zero(), |acc, &pk| acc * s + pk);
    let keep = |eta: T| T::one() - pi + pi * eta;
    let mut eta = T::zero();
    for _ in 0..THETA_MAX_ITER {
        let next = g_star(keep(eta));
        let done = (next - eta).abs() < tol;
        eta = next;
        if done {
            return Ok((T::one() - p.pgf(keep(eta))).max(T::zero()));
        }
    }
    Err(Error::NoConvergence { what: "branching-process extinction probability", iterations: THETA_MAX_ITER })
}

/// `1 / nu_n`.
pub fn cm_pi_c<T: Scalar>(d: &DegreeSequence) -> Result<T> {
    let nu: T = nu_of(d.as_slice())?;
    if nu == T::zero() {
        return Err(invalid("nu_n = 0: no finite critical value"));
    }
    Ok(T::one() / nu)
}

/// Critical value of affine preferential attachment with `a = 1`.
pub fn pa_pi_c<T: Scalar>(m: usize, delta: T) -> Result<T> {
    let mm = T::from_count(m);
    if m == 0 || delta <= -mm {
        return Err(invalid(format!("pa_pi_c needs m >= 1 and delta > -m, got m = {m}, delta = {delta}")));
    }
    if delta <= T::zero() {
        return Ok(T::zero());
    }
    let root = (mm * (mm - T::one()) * (mm + delta) * (mm + T::one() + delta)).sqrt();
    Ok(delta / (T::lit(2.0) * (mm * (mm + delta) + root)))
}

/// Critical value of uniform attachment with `m = 2`: `(2 - sqrt 2) / 4`.
pub fn ua_pi_c<T: Scalar>() -> T {
    (T::lit(2.0) - T::SQRT_2()) / T::lit(4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    BarelySubcritical,
    CriticalWindow,
    BarelySupercritical,
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegimeLabel::BarelySubcritical => "barely-subcritical",
            RegimeLabel::CriticalWindow => "critical-window",
            RegimeLabel::BarelySupercritical => "barely-supercritical",
        })
    }
}

/// Classification thresholds on `r = |C_sec| / |C_max|`: the sample is
/// supercritical when at least `mass` of it has `r < low`, subcritical
/// when at least `mass` has `r > high`, critical otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub low: f64,
    pub high: f64,
    pub mass: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { low: 0.1, high: 0.9, mass: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    pub frac_below_low: f64,
    pub frac_above_high: f64,
    pub frac_between: f64,
}

pub fn regime_diagnostic(samples: &[(usize, usize)], th: RegimeThresholds) -> Result<RegimeReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: samples.len() });
    }
    let ratios: Vec<f64> =
        samples.iter().map(|&(max, sec)| if max == 0 { 0.0 } else { sec as f64 / max as f64 }).collect();
    let k = ratios.len() as f64;
    let frac = |f: &dyn Fn(f64) -> bool| ratios.iter().filter(|&&r| f(r)).count() as f64 / k;
    let frac_below_low = frac(&|r| r < th.low);
    let frac_above_high = frac(&|r| r > th.high);
    let label = if frac_below_low >= th.mass {
        RegimeLabel::BarelySupercritical
    } else if frac_above_high >= th.mass {
        RegimeLabel::BarelySubcritical
    } else {
        RegimeLabel::CriticalWindow
    };
    Ok(RegimeReport {
        label,
        mean_ratio: ratios.iter().sum::<f64>() / k,
        frac_between: 1.0 - frac_below_low - frac_above_high,
        frac_below_low,
        frac_above_high,
        ratios,
    })
}
