//! Breadth-first exploration of the configuration model.
//!
//! The pairing is built while exploring: half-edges are alive until paired,
//! a component is started from the owner of a uniformly chosen alive
//! half-edge (a vertex chosen proportionally to its degree), and the first
//! active half-edge of the earliest discovered active vertex is paired
//! with a uniform other alive half-edge.
//!
//! Step convention: starting a component is a step of its own (`J = 1`,
//! the start vertex's degree added, then 2 subtracted), and each pairing is
//! one step. A component with `e` edges therefore spans `e + 1` steps and
//! the process drops by exactly 2 over it, so `tau_k - tau_{k-1} - 1` is
//! the edge count and the `J = 0` steps are exactly the surplus edges.

use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degrees::{size_biased_reordering, DegreeSequence};
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::limit::LimitPath;
use crate::scalar::Scalar;

/// Source of uniform choices in `0..k`.
pub trait Chooser {
    fn choose(&mut self, k: usize) -> usize;
}

pub struct RngChooser<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> Chooser for RngChooser<'_, R> {
    fn choose(&mut self, k: usize) -> usize {
        self.0.random_range(0..k)
    }
}

/// Replays a fixed list of choices and records the range of each one, so
/// that every branch of the exploration can be enumerated.
#[derive(Debug, Default, Clone)]
pub struct ReplayChooser {
    pub script: Vec<usize>,
    pub ranges: Vec<usize>,
}

impl Chooser for ReplayChooser {
    fn choose(&mut self, k: usize) -> usize {
        let i = self.ranges.len();
        self.ranges.push(k);
        self.script.get(i).copied().unwrap_or(0)
    }
}

impl ReplayChooser {
    /// Odometer step to the next script; `false` when all were visited.
    pub fn advance(&mut self) -> bool {
        let mut script: Vec<usize> = self.script.clone();
        script.resize(self.ranges.len(), 0);
        while let Some(last) = script.pop() {
            let k = self.ranges[script.len()];
            if last + 1 < k {
                script.push(last + 1);
                self.script = script;
                self.ranges.clear();
                return true;
            }
        }
        false
    }

    /// Probability of the branch just replayed.
    pub fn weight(&self) -> f64 {
        self.ranges.iter().map(|&k| 1.0 / k as f64).product()
    }

    /// The branch's probability as `1 / denominator`.
    pub fn denominator(&self) -> u128 {
        self.ranges.iter().map(|&k| k as u128).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub l: usize,
    #[serde(rename = "S")]
    pub s: i64,
    #[serde(rename = "J")]
    pub j: bool,
    pub d_new: usize,
    pub surplus_mark: bool,
    /// vertex discovered at this step
    #[serde(skip)]
    pub vertex: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationTrace {
    pub steps: Vec<Step>,
    /// `tau_k`, the first step with `S = -2k`
    pub boundaries: Vec<usize>,
}

impl ExplorationTrace {
    /// Discovery order of the vertices.
    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().filter_map(|s| s.vertex).collect()
    }

    pub fn value(&self, l: usize) -> i64 {
        if l == 0 {
            0
        } else {
            self.steps[l - 1].s
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,S,J,d_new,surplus_mark")?;
        for s in &self.steps {
            writeln!(w, "{},{},{},{},{}", s.l, s.s, u8::from(s.j), s.d_new, u8::from(s.surplus_mark))?;
        }
        Ok(())
    }
}

/// Explores a configuration model on `d`, building its pairing on the way.
pub fn explore_cm<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<(ExplorationTrace, MultiGraph)> {
    explore_with(d.as_slice(), &mut RngChooser(rng))
}

/// Exploration driven by an arbitrary [`Chooser`]. Zero degrees are
/// allowed; such vertices are never discovered.
pub fn explore_with<C: Chooser + ?Sized>(d: &[usize], chooser: &mut C) -> Result<(ExplorationTrace, MultiGraph)> {
    let total: usize = d.iter().sum();
    if total % 2 == 1 {
        return Err(Error::OddTotalDegree(total));
    }
    let n = d.len();
    let mut first = Vec::with_capacity(n + 1);
    let mut owner = Vec::with_capacity(total);
    first.push(0);
    for (v, &dv) in d.iter().enumerate() {
        owner.extend(std::iter::repeat_n(v, dv));
        first.push(owner.len());
    }
    // alive half-edges with O(1) removal and uniform sampling
    let mut alive: Vec<usize> = (0..total).collect();
    let mut pos: Vec<usize> = (0..total).collect();
    let remove = |alive: &mut Vec<usize>, pos: &mut Vec<usize>, h: usize| {
        let i = pos[h];
        let last = *alive.last().expect("nonempty");
        alive.swap_remove(i);
        if last != h {
            pos[last] = i;
        }
    };
    let mut discovered = vec![false; n];
    let mut cursor = first.clone();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut steps = Vec::with_capacity(total / 2 + n);
    let mut boundaries = Vec::new();
    let mut edges = Vec::with_capacity(total / 2);
    let mut s: i64 = 0;
    let mut active = 0usize;
    let is_alive = |pos: &Vec<usize>, alive: &Vec<usize>, h: usize| pos[h] < alive.len() && alive[pos[h]] == h;

    while !alive.is_empty() {
        if active == 0 {
            let h = alive[chooser.choose(alive.len())];
            let v = owner[h];
            discovered[v] = true;
            active += d[v];
            queue.push_back(v);
            s += d[v] as i64 - 2;
            steps.push(Step { l: steps.len() + 1, s, j: true, d_new: d[v], surplus_mark: false, vertex: Some(v) });
            continue;
        }
        // earliest discovered vertex with an active half-edge
        let (v, e) = loop {
            let v = *queue.front().expect("active half-edges have an owner in the queue");
            while cursor[v] < first[v + 1] && !is_alive(&pos, &alive, cursor[v]) {
                cursor[v] += 1;
            }
            if cursor[v] < first[v + 1] {
                break (v, cursor[v]);
            }
            queue.pop_front();
        };
        remove(&mut alive, &mut pos, e);
        let f = alive[chooser.choose(alive.len())];
        remove(&mut alive, &mut pos, f);
        let w = owner[f];
        edges.push((v, w));
        active -= 1;
        let mut step = Step { l: steps.len() + 1, s: 0, j: false, d_new: 0, surplus_mark: false, vertex: None };
        if discovered[w] {
            active -= 1;
            step.surplus_mark = true;
            s -= 2;
        } else {
            discovered[w] = true;
            queue.push_back(w);
            active += d[w] - 1;
            step.j = true;
            step.d_new = d[w];
            step.vertex = Some(w);
            s += d[w] as i64 - 2;
        }
        step.s = s;
        steps.push(step);
        if active == 0 {
            boundaries.push(steps.len());
            queue.clear();
        }
    }
    Ok((ExplorationTrace { steps, boundaries }, MultiGraph::from_edges_unchecked(n, edges)))
}

/// Checks the boundary structure: `tau_k` strictly increasing, `S(tau_k) =
/// -2k`, and `S > -2k` strictly before `tau_k` inside component `k`.
pub fn validate_boundaries(t: &ExplorationTrace) -> Result<()> {
    let mut prev = 0;
    for (k, &tau) in t.boundaries.iter().enumerate() {
        let level = -2 * (k as i64 + 1);
        if tau <= prev || tau > t.steps.len() {
            return Err(Error::MalformedTrace(format!("boundary {tau} not increasing or out of range")));
        }
        if t.value(tau) != level {
            return Err(Error::MalformedTrace(format!("S({tau}) = {} differs from {level}", t.value(tau))));
        }
        if (prev + 1..tau).any(|l| t.value(l) <= level) {
            return Err(Error::MalformedTrace(format!("S reaches {level} before step {tau}")));
        }
        prev = tau;
    }
    if prev != t.steps.len() {
        return Err(Error::MalformedTrace("trailing steps after the last boundary".into()));
    }
    Ok(())
}

/// `(size, surplus)` of each explored component, in exploration order.
pub fn components_from_trace(t: &ExplorationTrace) -> Result<Vec<(usize, usize)>> {
    validate_boundaries(t)?;
    let mut out = Vec::with_capacity(t.boundaries.len());
    let mut prev = 0;
    for &tau in &t.boundaries {
        let block = &t.steps[prev..tau];
        let size = block.iter().filter(|s| s.j).count();
        out.push((size, block.len() - size));
        prev = tau;
    }
    Ok(out)
}

/// Number of `J = 0` steps in each component.
pub fn surplus_from_trace(t: &ExplorationTrace) -> Result<Vec<usize>> {
    Ok(components_from_trace(t)?.into_iter().map(|(_, sp)| sp).collect())
}

/// `tau_k - tau_{k-1} - 1` for each component.
pub fn edges_from_trace(t: &ExplorationTrace) -> Vec<usize> {
    let mut prev = 0;
    t.boundaries
        .iter()
        .map(|&tau| {
            let e = tau - prev - 1;
            prev = tau;
            e
        })
        .collect()
}

/// Checks, at every step, both `S(l) = S(l-1) + d_(l) J_l - 2` and
/// `S(l) = sum of degrees of discovered vertices - 2l`.
pub fn rewritten_process_check(t: &ExplorationTrace, d: &[usize]) -> bool {
    let mut prev = 0i64;
    let mut discovered_sum = 0i64;
    for (i, st) in t.steps.iter().enumerate() {
        if st.l != i + 1 || st.j != st.vertex.is_some() || (!st.j && st.d_new != 0) {
            return false;
        }
        let jump = if st.j { st.d_new as i64 } else { 0 };
        if st.s != prev + jump - 2 {
            return false;
        }
        if let Some(v) = st.vertex {
            match d.get(v) {
                Some(&dv) if dv == st.d_new => discovered_sum += dv as i64,
                _ => return false,
            }
        }
        if st.s != discovered_sum - 2 * st.l as i64 {
            return false;
        }
        prev = st.s;
    }
    true
}

/// Step path `t -> S(ceil(t * time_scale)) / space_scale` on a grid of
/// step `dt` covering the whole trace.
pub fn rescaled_path<T: Scalar>(t: &ExplorationTrace, time_scale: T, space_scale: T, dt: T) -> Result<LimitPath<T>> {
    if !(time_scale > T::zero() && space_scale > T::zero() && dt > T::zero()) {
        return Err(invalid("scales and grid step must be positive"));
    }
    let horizon = T::from_count(t.steps.len()) / time_scale;
    let points = (horizon / dt).floor().to_usize().unwrap_or(0) + 1;
    let values = (0..points)
        .map(|i| {
            let l = (T::from_count(i) * dt * time_scale).ceil().to_usize().unwrap_or(0).min(t.steps.len());
            T::from(t.value(l)).expect("integer path value") / space_scale
        })
        .collect();
    LimitPath::new(dt, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftPoint {
    pub t: f64,
    pub step: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `n^{-1/3} (lambda_n - t (sigma_3 - 2 sigma_2) / mu^2)` with
    /// `lambda_n = (nu_n - 1) n^{1/3}`
    pub predicted: f64,
}

/// Monte Carlo mean of `d_(ceil(t n^{2/3})) - 2` over size-biased
/// reorderings, with the asymptotic prediction alongside.
pub fn drift_estimate<R: Rng + ?Sized>(
    d: &DegreeSequence,
    grid: &[f64],
    replicas: usize,
    rng: &mut R,
) -> Result<Vec<DriftPoint>> {
    if replicas < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: replicas });
    }
    let n = d.len() as f64;
    let steps: Vec<usize> = grid.iter().map(|&t| ((t * n.powf(2.0 / 3.0)).ceil() as usize).clamp(1, d.len())).collect();
    let mut sum = vec![0.0; grid.len()];
    let mut sq = vec![0.0; grid.len()];
    for _ in 0..replicas {
        let order = size_biased_reordering(d, rng);
        for (k, &l) in steps.iter().enumerate() {
            let x = d.as_slice()[order[l - 1]] as f64 - 2.0;
            sum[k] += x;
            sq[k] += x * x;
        }
    }
    let mu: f64 = d.empirical_moment(1);
    let (s2, s3): (f64, f64) = (d.empirical_moment(2), d.empirical_moment(3));
    let lambda_n = (d.nu_n::<f64>() - 1.0) * n.cbrt();
    let r = replicas as f64;
    Ok(grid
        .iter()
        .zip(&steps)
        .enumerate()
        .map(|(k, (&t, &step))| {
            let mean = sum[k] / r;
            let var = ((sq[k] - r * mean * mean) / (r - 1.0)).max(0.0);
            DriftPoint {
                t,
                step,
                mean,
                stderr: (var / r).sqrt(),
                predicted: (lambda_n - t * (s3 - 2.0 * s2) / (mu * mu)) / n.cbrt(),
            }
        })
        .collect())
}
