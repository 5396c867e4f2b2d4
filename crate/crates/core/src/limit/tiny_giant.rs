//! Limit objects of the single-edge rank-1 graph with `tau` in (2, 3):
//! the critical value, the hub graph on the positive integers, and the
//! tiny-giant size.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::quad::integrate;
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::scalar::Scalar;

fn quad_tol<T: Scalar>() -> T {
    T::lit(1e-13).max(T::epsilon() * T::lit(64.0))
}

/// `tau` in (2, 3), `c_F > 0` and the mean weight `mu > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TinyGiantParams<T> {
    pub tau: T,
    pub c_f: T,
    pub mu: T,
}

impl<T: Scalar> TinyGiantParams<T> {
    pub fn new(tau: T, c_f: T, mu: T) -> Result<Self> {
        if !(tau > T::lit(2.0) && tau < T::lit(3.0)) {
            return Err(invalid(format!("tau = {tau} outside (2, 3)")));
        }
        if !(c_f > T::zero() && mu > T::zero()) {
            return Err(invalid("c_F and mu must be positive"));
        }
        Ok(Self { tau, c_f, mu })
    }

    /// Uses the mean of the weights `c_F (n/v)^alpha`, `c_F / (1 - alpha)`.
    pub fn with_weight_mean(tau: T, c_f: T) -> Result<Self> {
        let alpha = T::one() / (tau - T::one());
        Self::new(tau, c_f, c_f / (T::one() - alpha))
    }

    pub fn alpha(&self) -> T {
        T::one() / (self.tau - T::one())
    }

    /// `theta_v = c_F v^{-alpha} / mu`, `v >= 1`.
    pub fn theta(&self, v: usize) -> T {
        self.c_f * T::from_count(v).powf(-self.alpha()) / self.mu
    }

    /// `kappa(u, v) = 1 - exp(-c_F^2 (uv)^{-alpha} / mu)`.
    pub fn kappa(&self, u: T, v: T) -> T {
        -(-(self.c_f * self.c_f) * (u * v).powf(-self.alpha()) / self.mu).exp_m1()
    }
}

/// `A = int_0^inf (1 - e^{-z}) z^{-(tau - 1)} dz`.
///
/// On `[0, 1]` the substitution `z = u^{1/(3 - tau)}` removes the
/// singularity; on `[1, inf)` the integral of `z^{-(tau-1)}` is exact and
/// the exponential part is integrated up to 50.
pub fn a_alpha<T: Scalar>(tau: T) -> Result<T> {
    if !(tau > T::lit(2.0) && tau < T::lit(3.0)) {
        return Err(invalid(format!("tau = {tau} outside (2, 3)")));
    }
    let s = tau - T::one();
    let k = T::one() / (T::lit(2.0) - s);
    let g = |z: T| if z == T::zero() { T::one() } else { -(-z).exp_m1() / z };
    let tol = quad_tol::<T>();
    let head = integrate(|u: T| g(u.powf(k)), T::zero(), T::one(), tol, tol)?.value * k;
    let tail_exp = integrate(|z: T| (-z).exp() * z.powf(-s), T::one(), T::lit(50.0), tol, tol)?.value;
    Ok(head + T::one() / (s - T::one()) - tail_exp)
}

/// `(c_F^{-1/alpha} / 2) sqrt((3 - tau) mu^{1/alpha} / A)`.
pub fn lambda_c<T: Scalar>(tau: T, c_f: T, mu: T) -> Result<T> {
    let p = TinyGiantParams::new(tau, c_f, mu)?;
    let inv_alpha = tau - T::one();
    let a = a_alpha(tau)?;
    Ok(p.c_f.powf(-inv_alpha) / T::lit(2.0) * ((T::lit(3.0) - tau) * p.mu.powf(inv_alpha) / a).sqrt())
}

/// `int_0^inf (1 - e^{-a x^{-alpha}})(1 - e^{-b x^{-alpha}}) dx`.
///
/// With `y = x^{-alpha}` and `s = 1/alpha` this is
/// `s int_0^inf (1 - e^{-ay})(1 - e^{-by}) y^{-s-1} dy`; the part over
/// `[0, 1]` is made regular by `y = u^{1/(2-s)}`, the part over `[1, inf)`
/// by `y = 1/w`.
pub fn overlap_integral<T: Scalar>(a: T, b: T, alpha: T) -> Result<T> {
    let s = T::one() / alpha;
    let k = T::one() / (T::lit(2.0) - s);
    let tol = quad_tol::<T>();
    let q = |y: T| {
        if y == T::zero() {
            a * b
        } else {
            (-a * y).exp_m1() * (-b * y).exp_m1() / (y * y)
        }
    };
    let head = integrate(|u: T| q(u.powf(k)), T::zero(), T::one(), tol, tol)?.value * k;
    let tail = integrate(
        |w: T| (-a / w).exp_m1() * (-b / w).exp_m1() * w.powf(s - T::one()),
        T::zero(),
        T::one(),
        tol,
        tol,
    )?
    .value;
    Ok(s * (head + tail))
}

/// `lambda_uv = lambda^2 int Theta_u Theta_v dx` with
/// `Theta_v(x) = 1 - exp(-c_F theta_v x^{-alpha})`; `u, v >= 1`.
pub fn lambda_uv<T: Scalar>(p: &TinyGiantParams<T>, lambda: T, u: usize, v: usize) -> Result<T> {
    if u == 0 || v == 0 {
        return Err(invalid("hub labels start at 1"));
    }
    let (a, b) = (p.c_f * p.theta(u), p.c_f * p.theta(v));
    Ok(lambda * lambda * overlap_integral(a, b, p.alpha())?)
}

/// Hub graph truncated to vertices `1..=V` (stored 0-based): Poisson
/// `lambda_uv` parallel edges between each pair.
pub fn tiny_giant_graph<T: Scalar, R: Rng + ?Sized>(
    p: &TinyGiantParams<T>,
    lambda: T,
    vertices: usize,
    rng: &mut R,
) -> Result<MultiGraph> {
    if vertices == 0 {
        return Err(invalid("need at least one vertex"));
    }
    let mut edges = Vec::new();
    if lambda == T::zero() {
        return Ok(MultiGraph::empty(vertices));
    }
    for u in 1..=vertices {
        for v in u + 1..=vertices {
            let rate = lambda_uv(p, lambda, u, v)?.as_f64();
            if rate > 0.0 {
                let k = Poisson::new(rate).map_err(|e| invalid(e.to_string()))?.sample(rng) as usize;
                edges.extend(std::iter::repeat_n((u - 1, v - 1), k));
            }
        }
    }
    Ok(MultiGraph::from_edges_unchecked(vertices, edges))
}

/// Log-spaced grid from `10^{-6} min(a, 1)` to `a` with `points_per_six`
/// points per six decades (at least that many overall), and quadrature
/// weights for `int_{v_0}^a g(v) dv`: composite Simpson in `log v` (3/8
/// rule on the last three panels when the panel count is odd).
fn log_grid<T: Scalar>(a: T, points_per_six: usize) -> (Vec<T>, Vec<T>) {
    let lo = (a.min(T::one()) * T::lit(1e-6)).ln();
    let hi = a.ln();
    let decades = (hi - lo) / T::lit(10f64.ln());
    let points = (T::from_count(points_per_six) * decades / T::lit(6.0))
        .ceil()
        .to_usize()
        .unwrap_or(points_per_six)
        .max(points_per_six);
    let panels = points - 1;
    let h = (hi - lo) / T::from_count(panels);
    let grid: Vec<T> = (0..points).map(|i| (lo + h * T::from_count(i)).exp()).collect();
    let mut w = vec![T::zero(); points];
    if panels == 1 {
        w[0] = h / T::lit(2.0);
        w[1] = h / T::lit(2.0);
    } else {
        let simpson_panels = if panels % 2 == 0 { panels } else { panels - 3 };
        for i in (0..simpson_panels).step_by(2) {
            w[i] = w[i] + h / T::lit(3.0);
            w[i + 1] = w[i + 1] + T::lit(4.0) * h / T::lit(3.0);
            w[i + 2] = w[i + 2] + h / T::lit(3.0);
        }
        if panels % 2 == 1 {
            let i = simpson_panels;
            let c = T::lit(3.0) * h / T::lit(8.0);
            w[i] = w[i] + c;
            w[i + 1] = w[i + 1] + T::lit(3.0) * c;
            w[i + 2] = w[i + 2] + T::lit(3.0) * c;
            w[i + 3] = w[i + 3] + c;
        }
    }
    // dv = v d(log v)
    for (wi, &v) in w.iter_mut().zip(&grid) {
        *wi = *wi * v;
    }
    (grid, w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSolution<T> {
    pub a: T,
    pub grid: Vec<T>,
    pub rho: Vec<T>,
    pub weights: Vec<T>,
    pub iterations: usize,
}

/// Grid points per six decades of `u`.
pub const RHO_GRID: usize = 512;
const RHO_MAX_ITER: usize = 20_000;

/// Maximal solution of `rho(u) = 1 - exp(-lambda int_0^a kappa(u, v)
/// rho(v) dv)`, iterated downward from `rho = 1` until the sup-change is
/// below `tol`.
pub fn rho_fixed_point<T: Scalar>(
    p: &TinyGiantParams<T>,
    a: T,
    lambda: T,
    grid_size: usize,
    tol: T,
) -> Result<RhoSolution<T>> {
    if !(a > T::zero()) || grid_size < 2 {
        return Err(invalid("need a > 0 and at least two grid points"));
    }
    if lambda < T::zero() {
        return Err(invalid("lambda must be nonnegative"));
    }
    let (grid, weights) = log_grid(a, grid_size);
    let m = grid.len();
    if lambda == T::zero() {
        return Ok(RhoSolution { a, grid, rho: vec![T::zero(); m], weights, iterations: 0 });
    }
    // row-major lambda * kappa(u_i, v_j) * w_j; the column of v_0 also
    // carries int_0^{v_0} kappa(u_i, v) dv, with rho taken constant there
    let v0 = grid[0];
    let tol_q = quad_tol::<T>();
    let mut kernel = Vec::with_capacity(m * m);
    for &u in &grid {
        let left = integrate(|v: T| p.kappa(u, v), T::zero(), v0, tol_q * v0, tol_q)?.value;
        for (j, (&v, &w)) in grid.iter().zip(&weights).enumerate() {
            let extra = if j == 0 { left } else { T::zero() };
            kernel.push(lambda * (p.kappa(u, v) * w + extra));
        }
    }
    let mut rho = vec![T::one(); m];
    let mut next = vec![T::zero(); m];
    for it in 1..=RHO_MAX_ITER {
        let mut change = T::zero();
        for i in 0..m {
            let row = &kernel[i * m..(i + 1) * m];
            let s: T = row.iter().zip(&rho).map(|(&k, &r)| k * r).sum();
            next[i] = -(-s).exp_m1();
            change = change.max((next[i] - rho[i]).abs());
        }
        std::mem::swap(&mut rho, &mut next);
        if change < tol {
            return Ok(RhoSolution { a, grid, rho, weights, iterations: it });
        }
    }
    Err(Error::NoConvergence { what: "tiny-giant survival fixed point", iterations: RHO_MAX_ITER })
}

/// `zeta_a = lambda int_0^a c_F u^{-alpha} rho(u) du`; the piece over
/// `(0, u_0)` uses `int_0^{u_0} u^{-alpha} du` exactly with `rho(u_0)`.
pub fn zeta_from_rho<T: Scalar>(p: &TinyGiantParams<T>, lambda: T, sol: &RhoSolution<T>) -> T {
    let alpha = p.alpha();
    let u0 = sol.grid[0];
    let mut s = p.c_f * u0.powf(T::one() - alpha) / (T::one() - alpha) * sol.rho[0];
    for (i, (&u, &w)) in sol.grid.iter().zip(&sol.weights).enumerate() {
        s = s + w * p.c_f * u.powf(-alpha) * sol.rho[i];
    }
    lambda * s
}

pub fn zeta_a<T: Scalar>(p: &TinyGiantParams<T>, a: T, lambda: T, grid_size: usize, tol: T) -> Result<T> {
    if lambda == T::zero() {
        return Ok(T::zero());
    }
    let sol = rho_fixed_point(p, a, lambda, grid_size, tol)?;
    Ok(zeta_from_rho(p, lambda, &sol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaLimit<T> {
    pub value: T,
    /// `(a, zeta_a)` along the doubling sequence
    pub sequence: Vec<(T, T)>,
    pub converged: bool,
}

/// `lim_{a -> inf} zeta_a`: doubles `a` from 1, extrapolating with the
/// tail `zeta - zeta_a ~ a^{1 - 2 alpha}`, until successive extrapolations
/// differ by less than `tol` relative (or absolutely below `tol`). At least
/// `2^16` is reached first: near `lambda_c` the truncated value stays
/// zero for small `a`.
pub fn zeta_limit<T: Scalar>(p: &TinyGiantParams<T>, lambda: T, tol: T) -> Result<ZetaLimit<T>> {
    const MIN_DOUBLINGS: usize = 16;
    const MAX_DOUBLINGS: usize = 40;
    let fixed_tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
    let r = T::lit(2.0).powf(T::one() - T::lit(2.0) * p.alpha());
    let mut a = T::one();
    let mut sequence = vec![(a, zeta_a(p, a, lambda, RHO_GRID, fixed_tol)?)];
    let mut last_extrapolated: Option<T> = None;
    for k in 1..=MAX_DOUBLINGS {
        a = a * T::lit(2.0);
        let z = zeta_a(p, a, lambda, RHO_GRID, fixed_tol)?;
        let prev = sequence.last().expect("nonempty").1;
        sequence.push((a, z));
        let extrapolated = z + (z - prev) * r / (T::one() - r);
        if let Some(last) = last_extrapolated.filter(|_| k >= MIN_DOUBLINGS) {
            let diff = (extrapolated - last).abs();
            if diff <= tol * extrapolated.abs() || diff <= tol {
                return Ok(ZetaLimit { value: extrapolated.max(T::zero()), sequence, converged: true });
            }
        }
        last_extrapolated = Some(extrapolated);
    }
    let value = last_extrapolated.unwrap_or(T::zero()).max(T::zero());
    log::warn!("zeta limit not converged after {MAX_DOUBLINGS} doublings");
    Ok(ZetaLimit { value, sequence, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn a_alpha_closed_form() {
        assert!((a_alpha(2.5f64).unwrap() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
        for tau in [2.2, 2.5, 2.8, 2.95] {
            let oracle = gamma(3.0 - tau) / (tau - 2.0);
            assert!((a_alpha(tau).unwrap() - oracle).abs() < 1e-8 * oracle.max(1.0), "{tau}");
        }
        assert!(a_alpha(2.9f64).unwrap() < a_alpha(2.95).unwrap());
        assert!(a_alpha(3.0f64).is_err());
        assert!((a_alpha(2.5f32).unwrap() - 3.544_907_7).abs() < 1e-4);
    }

    #[test]
    fn lambda_c_scaling() {
        let base = lambda_c(2.5f64, 1.0, 1.0).unwrap();
        let expect = 0.5 * (0.5 / (2.0 * std::f64::consts::PI.sqrt())).sqrt();
        assert!((base - expect).abs() < 1e-12);
        let doubled = lambda_c(2.5f64, 1.0, 2.0).unwrap();
        assert!((doubled / base - 2f64.powf(0.75)).abs() < 1e-12);
        assert!(lambda_c(2.2f64, 0.5, 3.0).unwrap() > 0.0);
    }

    fn closed_overlap(a: f64, b: f64, alpha: f64) -> f64 {
        // s Gamma(-s) ((a+b)^s - a^s - b^s), Gamma(-s) = Gamma(2-s)/(s(s-1))
        let s = 1.0 / alpha;
        let g = gamma(2.0 - s) / (s * (s - 1.0));
        s * g * ((a + b).powf(s) - a.powf(s) - b.powf(s))
    }

    #[test]
    fn overlap_against_closed_form() {
        for &(a, b, alpha) in &[(1.0, 1.0, 2.0 / 3.0), (0.3, 2.0, 2.0 / 3.0), (0.05, 0.8, 0.55), (5.0, 0.1, 0.9)] {
            let q = overlap_integral(a, b, alpha).unwrap();
            let c = closed_overlap(a, b, alpha);
            assert!((q - c).abs() < 1e-9 * c.max(1.0), "{a} {b} {alpha}: {q} vs {c}");
        }
    }

    #[test]
    fn lambda_uv_against_riemann_sum() {
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        let (a, b) = (p.c_f * p.theta(1), p.c_f * p.theta(3));
        let alpha = p.alpha();
        // midpoint rule in t = log x on [-40, 60], 10^6 panels, plus the
        // leading-order tail int_X^inf a b x^{-2 alpha} dx
        let (lo, hi, panels) = (-40.0f64, 60.0f64, 1_000_000);
        let h = (hi - lo) / f64::from(panels);
        let mut sum = 0.0;
        for i in 0..panels {
            let x = (lo + (f64::from(i) + 0.5) * h).exp();
            let th = |c: f64| -(-c * x.powf(-alpha)).exp_m1();
            sum += th(a) * th(b) * x * h;
        }
        sum += a * b * hi.exp().powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
        let lambda = 0.7;
        let q = lambda_uv(&p, lambda, 1, 3).unwrap();
        assert!((q - lambda * lambda * sum).abs() < 1e-6, "{q} vs {}", lambda * lambda * sum);
    }

    #[test]
    fn lambda_uv_monotone_symmetric() {
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        let l = |u, v| lambda_uv(&p, 1.0, u, v).unwrap();
        assert!((l(2, 5) - l(5, 2)).abs() < 1e-14);
        assert!(l(1, 2) > l(1, 3) && l(1, 3) > l(2, 3) && l(2, 3) > l(2, 4));
    }

    #[test]
    fn hub_graph_basics() {
        use rand::SeedableRng;
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        assert_eq!(tiny_giant_graph(&p, 0.0, 10, &mut r).unwrap().edge_count(), 0);
        let g = tiny_giant_graph(&p, 1.0, 20, &mut r).unwrap();
        assert_eq!(g.self_loop_count(), 0);
        assert_eq!(g.vertex_count(), 20);
    }

    #[test]
    fn rho_properties() {
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        let zero = rho_fixed_point(&p, 4.0, 0.0, 64, 1e-12).unwrap();
        assert!(zero.rho.iter().all(|&x| x == 0.0));
        let sol = rho_fixed_point(&p, 4.0, 1.0, 128, 1e-12).unwrap();
        assert!(sol.rho.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(sol.rho.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn zeta_monotone_in_a_and_refinement() {
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        let lambda = 2.0 * lambda_c(p.tau, p.c_f, p.mu).unwrap();
        let z: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&a| zeta_a(&p, a, lambda, 512, 1e-12).unwrap()).collect();
        assert!(z.windows(2).all(|w| w[1] >= w[0]), "{z:?}");
        let tol = 1e-6;
        let coarse = zeta_a(&p, 4.0, lambda, 512, tol).unwrap();
        let fine = zeta_a(&p, 4.0, lambda, 1023, tol).unwrap();
        assert!((coarse - fine).abs() < 10.0 * tol, "{coarse} vs {fine}");
    }

    #[test]
    fn zeta_phases() {
        let p = TinyGiantParams::with_weight_mean(2.5f64, 1.0).unwrap();
        let lc = lambda_c(p.tau, p.c_f, p.mu).unwrap();
        let above = zeta_limit(&p, 2.0 * lc, 1e-4).unwrap();
        assert!(above.value > 0.0 && above.value.is_finite());
        let below = zeta_limit(&p, 0.5 * lc, 1e-4).unwrap();
        assert!(below.value < 1e-3, "{below:?}");
    }
}
