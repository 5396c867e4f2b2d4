//! Susceptibility dynamics of percolated attachment graphs grown one vertex
//! at a time, and the closed forms of uniform attachment with `m = 2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::{preferential_attachment, yule_arrival_times_from, PASpec};
use crate::graph::{ComponentDecomposition, UnionFind};
use crate::percolation::ua_pi_c;
use crate::scalar::Scalar;

/// `n^{-1} sum_C |C|^k`, isolated vertices counted as they appear in `dec`.
pub fn susceptibility<T: Scalar>(dec: &ComponentDecomposition, k: u32) -> Result<T> {
    if k < 2 {
        return Err(invalid("susceptibility order must be at least 2"));
    }
    if dec.vertex_count() == 0 {
        return Err(Error::Empty("decomposition"));
    }
    let s: u128 = dec.sizes().iter().map(|&c| (c as u128).pow(k)).sum();
    Ok(T::lit(s as f64) / T::from_count(dec.vertex_count()))
}

/// `8 pi^2 - 8 pi + 1`; near `pi_c` the factored form
/// `8 (pi - pi_c)(pi - pi_c')` is used so that it vanishes exactly there.
fn discriminant<T: Scalar>(pi: T) -> T {
    let pc = ua_pi_c::<T>();
    if (pi - pc).abs() < T::lit(1e-3) {
        let pc2 = (T::lit(2.0) + T::SQRT_2()) / T::lit(4.0);
        T::lit(8.0) * (pi - pc) * (pi - pc2)
    } else {
        T::lit(8.0) * pi * pi - T::lit(8.0) * pi + T::one()
    }
}

fn check_subcritical<T: Scalar>(pi: T) -> Result<T> {
    if !(pi >= T::zero()) {
        return Err(invalid(format!("pi = {pi} must be nonnegative")));
    }
    if pi > ua_pi_c::<T>() {
        return Err(Error::Supercritical(format!("pi = {pi} above (2 - sqrt 2)/4")));
    }
    Ok(discriminant(pi))
}

/// `F(s) = 2 pi^2 s^2 + (4 pi - 1) s + 1`.
pub fn drift_f<T: Scalar>(s: T, pi: T) -> T {
    T::lit(2.0) * pi * pi * s * s + (T::lit(4.0) * pi - T::one()) * s + T::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport<T> {
    pub lambda1: T,
    pub lambda2: T,
    /// `F'(lambda1) < 0`
    pub stable1: bool,
    /// `F'(lambda2) > 0`
    pub unstable2: bool,
}

/// Roots `lambda1 <= lambda2` of `F`; `lambda1` is the stable one.
pub fn fixed_points<T: Scalar>(pi: T) -> Result<FixedPointReport<T>> {
    let d = check_subcritical(pi)?;
    if pi == T::zero() {
        return Err(invalid("F is linear at pi = 0"));
    }
    let sd = d.sqrt();
    let b = T::lit(4.0) * pi * pi;
    let lambda1 = T::lit(2.0) / (T::one() - T::lit(4.0) * pi + sd);
    let lambda2 = (T::one() - T::lit(4.0) * pi + sd) / b;
    let fp = |s: T| T::lit(4.0) * pi * pi * s + T::lit(4.0) * pi - T::one();
    Ok(FixedPointReport { lambda1, lambda2, stable1: fp(lambda1) < T::zero(), unstable2: fp(lambda2) > T::zero() })
}

/// `s_2(inf) = (1 - 4 pi - sqrt(8 pi^2 - 8 pi + 1)) / (4 pi^2)`, evaluated as
/// `2 / (1 - 4 pi + sqrt(...))`.
pub fn s2_infinity<T: Scalar>(pi: T) -> Result<T> {
    let d = check_subcritical(pi)?;
    Ok(T::lit(2.0) / (T::one() - T::lit(4.0) * pi + d.sqrt()))
}

/// `alpha(pi) = (1 - sqrt(8 pi^2 - 8 pi + 1)) / 2`.
pub fn alpha<T: Scalar>(pi: T) -> Result<T> {
    let d = check_subcritical(pi)?;
    Ok((T::one() - d.sqrt()) / T::lit(2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthModel {
    Uniform { m: usize },
    Preferential(PASpec),
}

impl GrowthModel {
    pub fn m(&self) -> usize {
        match self {
            GrowthModel::Uniform { m } => *m,
            GrowthModel::Preferential(s) => s.m,
        }
    }
}

/// Powers of two from 4 up to `n_max`, then `n_max` itself.
pub fn log_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(4usize), |&x| x.checked_mul(2)).take_while(|&x| x <= n_max).collect();
    if out.last() != Some(&n_max) && n_max >= 2 {
        out.push(n_max);
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackOptions {
    pub track_s4: bool,
    /// record every `n` instead of only the checkpoints
    pub every_step: bool,
    /// run on Yule arrival times and record the vertex-one martingale
    /// (uniform attachment only)
    pub martingale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackRow {
    pub n: usize,
    pub s2: f64,
    pub s3: f64,
    pub s4: Option<f64>,
    pub cmax: usize,
    pub c1: usize,
    pub time: Option<f64>,
    pub martingale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityTrack {
    pub pi: f64,
    pub model: GrowthModel,
    pub rows: Vec<TrackRow>,
}

impl SusceptibilityTrack {
    /// Columns `n,s2,s3,Cmax,C1`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,s2,s3,Cmax,C1")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{}", r.n, r.s2, r.s3, r.cmax, r.c1)?;
        }
        Ok(())
    }

    pub fn last(&self) -> Option<&TrackRow> {
        self.rows.last()
    }
}

/// Union-find with running power sums `sum_C |C|^k`, `k = 2, 3, 4`.
struct PowerSums {
    uf: UnionFind,
    p2: u128,
    p3: u128,
    p4: u128,
    cmax: usize,
}

impl PowerSums {
    fn new() -> Self {
        Self { uf: UnionFind::new(0), p2: 0, p3: 0, p4: 0, cmax: 0 }
    }

    fn push(&mut self) {
        self.uf.push();
        self.p2 += 1;
        self.p3 += 1;
        self.p4 += 1;
        self.cmax = self.cmax.max(1);
    }

    fn join(&mut self, u: usize, v: usize) {
        let (x, y) = (self.uf.set_size(u) as u128, self.uf.set_size(v) as u128);
        if let Some(root) = self.uf.union(u, v) {
            let z = x + y;
            self.p2 = self.p2 + z * z - x * x - y * y;
            self.p3 = self.p3 + z.pow(3) - x.pow(3) - y.pow(3);
            self.p4 = self.p4 + z.pow(4) - x.pow(4) - y.pow(4);
            self.cmax = self.cmax.max(self.uf.size(root));
        }
    }

    fn row(&mut self, track_s4: bool) -> TrackRow {
        let n = self.uf.len();
        let nf = n as f64;
        TrackRow {
            n,
            s2: self.p2 as f64 / nf,
            s3: self.p3 as f64 / nf,
            s4: track_s4.then(|| self.p4 as f64 / nf),
            cmax: self.cmax,
            c1: self.uf.set_size(0),
            time: None,
            martingale: None,
        }
    }
}

/// Grows the model to `n_max` vertices, keeping each edge with probability
/// `pi` when it arrives, and records the susceptibilities, `|C_max|` and
/// the component of the first vertex at every checkpoint.
///
/// With the martingale option, vertex `k` arrives at the Yule time at which
/// the population grows from `k` to `k + 1` (two vertices at time 0), and
/// `M(t) = |C_1(t)| exp(-int_0^t (2 pi^2 s_2(u) + 2 pi) du)` is recorded;
/// `s_2` is piecewise constant, so the integral is a finite sum.
pub fn track_growth<R: Rng + ?Sized>(
    model: &GrowthModel,
    pi: f64,
    n_max: usize,
    checkpoints: &[usize],
    options: TrackOptions,
    rng: &mut R,
) -> Result<SusceptibilityTrack> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(invalid(format!("pi = {pi} outside [0, 1]")));
    }
    let m = model.m();
    if n_max < 2 || m == 0 {
        return Err(invalid("growth needs n_max >= 2 and m >= 1"));
    }
    if options.martingale && !matches!(model, GrowthModel::Uniform { .. }) {
        return Err(invalid("the vertex-one martingale is defined for uniform attachment"));
    }
    let mut marks: Vec<usize> = checkpoints.iter().copied().filter(|&c| (2..=n_max).contains(&c)).collect();
    marks.sort_unstable();
    marks.dedup();
    let pa_targets = match model {
        GrowthModel::Preferential(spec) => Some(preferential_attachment(n_max, spec, rng)?.1),
        GrowthModel::Uniform { .. } => None,
    };
    let times = options.martingale.then(|| yule_arrival_times_from(2, n_max + 1, rng));
    let mut ps = PowerSums::new();
    ps.push();
    ps.push();
    for _ in 0..m {
        if rng.random::<f64>() < pi {
            ps.join(0, 1);
        }
    }
    let mut rows = Vec::new();
    let mut integral = 0.0f64;
    let mut next_mark = 0;
    for n in 2..=n_max {
        // n vertices present
        let record = options.every_step || marks.get(next_mark) == Some(&n);
        if marks.get(next_mark) == Some(&n) {
            next_mark += 1;
        }
        let s2_now = ps.p2 as f64 / n as f64;
        if record {
            let mut row = ps.row(options.track_s4);
            if let Some(t) = &times {
                row.time = Some(t[n - 1].max(0.0));
                row.martingale = Some(row.c1 as f64 * (-integral).exp());
            }
            rows.push(row);
        }
        if n == n_max {
            break;
        }
        if let Some(t) = &times {
            // from the arrival of vertex n-1 (time of growth to n) to that of vertex n
            let t0 = if n == 2 { 0.0 } else { t[n - 1] };
            integral += (2.0 * pi * pi * s2_now + 2.0 * pi) * (t[n] - t0);
        }
        ps.push();
        let v = n;
        for j in 0..m {
            let u = match &pa_targets {
                Some(tr) => tr.targets_of(v)[j],
                None => rng.random_range(0..v),
            };
            if rng.random::<f64>() < pi {
                ps.join(v, u);
            }
        }
    }
    Ok(SusceptibilityTrack { pi, model: *model, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaReport {
    pub steps: usize,
    /// mean and standard error of `xi_{n+1} = (n+1) ds_2 - F(s_2) - R_n`
    pub mean_xi: f64,
    pub stderr_xi: f64,
    /// fitted `K` in `|R_n| <= K s_4 / n`
    pub k_remainder: f64,
    /// fitted `K` in `E[xi^2] <= K s_3^2`
    pub k_noise: f64,
}

/// One-step residuals of the stochastic-approximation recursion for
/// uniform attachment with `m = 2`, from a track recorded at every step
/// with `s_4`. `R_n = -2 pi^2 (s_3 + s_4) / n` accounts for both edges
/// landing in the same component.
pub fn sa_residual_check(track: &SusceptibilityTrack) -> Result<SaReport> {
    if track.model != (GrowthModel::Uniform { m: 2 }) {
        return Err(invalid("the recursion is stated for uniform attachment with m = 2"));
    }
    let pi = track.pi;
    let mut xis = Vec::new();
    let (mut k_rem, mut sum_sq3) = (0.0f64, 0.0);
    for w in track.rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.n != a.n + 1 {
            return Err(invalid("track must be recorded at every step"));
        }
        let s4 = a.s4.ok_or_else(|| invalid("track must include s4"))?;
        let n = a.n as f64;
        let r = -2.0 * pi * pi * (a.s3 + s4) / n;
        xis.push((n + 1.0) * (b.s2 - a.s2) - drift_f(a.s2, pi) - r);
        k_rem = k_rem.max(r.abs() * n / s4);
        sum_sq3 += a.s3 * a.s3;
    }
    if xis.len() < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: xis.len() });
    }
    let k = xis.len() as f64;
    let mean = xis.iter().sum::<f64>() / k;
    let var = xis.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let mean_sq = xis.iter().map(|x| x * x).sum::<f64>() / k;
    Ok(SaReport {
        steps: xis.len(),
        mean_xi: mean,
        stderr_xi: (var / k).sqrt(),
        k_remainder: k_rem,
        k_noise: mean_sq / (sum_sq3 / k),
    })
}
