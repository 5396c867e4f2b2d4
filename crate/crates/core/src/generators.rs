//! Random graph constructors.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1};
use serde::{Deserialize, Serialize};

use crate::degrees::{DegreeSequence, WeightSequence};
use crate::error::{invalid, Error, Result};
use crate::graph::MultiGraph;
use crate::scalar::Scalar;

/// Configuration model: the half-edges are shuffled uniformly and paired as
/// consecutive entries. Self-loops and multi-edges are kept.
pub fn configuration_model<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<MultiGraph> {
    pair_half_edges(d.as_slice(), rng)
}

/// Configuration model on a raw degree slice; zero degrees are allowed.
pub fn pair_half_edges<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<MultiGraph> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::OddTotalDegree(total));
    }
    let mut half_edges = Vec::with_capacity(total);
    for (v, &dv) in degrees.iter().enumerate() {
        half_edges.extend(std::iter::repeat_n(v, dv));
    }
    half_edges.shuffle(rng);
    let edges = half_edges.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(MultiGraph::from_edges_unchecked(degrees.len(), edges))
}

/// Edge-probability rule of a rank-1 inhomogeneous random graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank1Kind {
    /// `1 - exp(-w_u w_v / l_n)`
    NorrosReittu,
    /// `min(w_u w_v / l_n, 1)`
    ChungLu,
    /// `w_u w_v / (l_n + w_u w_v)`
    Generalized,
}

impl Rank1Kind {
    pub fn edge_probability<T: Scalar>(self, wu: T, wv: T, total: T) -> T {
        let x = wu * wv / total;
        match self {
            Rank1Kind::NorrosReittu => -(-x).exp_m1(),
            Rank1Kind::ChungLu => x.min(T::one()),
            Rank1Kind::Generalized => x / (T::one() + x),
        }
    }
}

/// Simple rank-1 graph in which each pair `u != v` is present independently
/// with probability `retain * p_uv`.
///
/// All three rules are nondecreasing in each weight, so after sorting the
/// vertices by weight the probabilities along a row are nonincreasing and
/// absent pairs can be skipped geometrically. Expected cost is
/// `O(n + edges)`.
pub fn rank1_graph<T: Scalar, R: Rng + ?Sized>(
    w: &WeightSequence<T>,
    kind: Rank1Kind,
    retain: T,
    rng: &mut R,
) -> Result<MultiGraph> {
    if !(T::zero()..=T::one()).contains(&retain) {
        return Err(invalid(format!("retention probability {retain} outside [0, 1]")));
    }
    let total = w.total().as_f64();
    let retain = retain.as_f64();
    let weights: Vec<f64> = w.as_slice().iter().map(|x| x.as_f64()).collect();
    let mut edges = Vec::new();
    skip_sample(&weights, |a, b| retain * kind.edge_probability(a, b, total), rng, |u, v, _| {
        edges.push((u, v));
    });
    Ok(MultiGraph::from_edges_unchecked(w.len(), edges))
}

pub fn nr_graph<T: Scalar, R: Rng + ?Sized>(w: &WeightSequence<T>, rng: &mut R) -> Result<MultiGraph> {
    rank1_graph(w, Rank1Kind::NorrosReittu, T::one(), rng)
}

pub fn chung_lu<T: Scalar, R: Rng + ?Sized>(w: &WeightSequence<T>, rng: &mut R) -> Result<MultiGraph> {
    rank1_graph(w, Rank1Kind::ChungLu, T::one(), rng)
}

pub fn grg<T: Scalar, R: Rng + ?Sized>(w: &WeightSequence<T>, rng: &mut R) -> Result<MultiGraph> {
    rank1_graph(w, Rank1Kind::Generalized, T::one(), rng)
}

/// Multigraph version of the Norros-Reittu model: `Poisson(w_u w_v / l_n)`
/// parallel edges between each pair `u < v`, no self-loops.
pub fn nr_multigraph<T: Scalar, R: Rng + ?Sized>(w: &WeightSequence<T>, rng: &mut R) -> Result<MultiGraph> {
    let total = w.total().as_f64();
    let weights: Vec<f64> = w.as_slice().iter().map(|x| x.as_f64()).collect();
    let mut edges = Vec::new();
    // presence of at least one copy, then a zero-truncated Poisson count
    skip_sample(
        &weights,
        |a, b| Rank1Kind::NorrosReittu.edge_probability(a, b, total),
        rng,
        |u, v, rng| {
            let rate = weights[u] * weights[v] / total;
            let k = zero_truncated_poisson(rate, rng);
            edges.extend(std::iter::repeat_n((u, v), k));
        },
    );
    Ok(MultiGraph::from_edges_unchecked(w.len(), edges))
}

fn zero_truncated_poisson<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> usize {
    // inversion over k >= 1 of P(K = k) = e^{-r} r^k / (k! (1 - e^{-r}))
    let norm = -(-rate).exp_m1();
    let u: f64 = rng.random::<f64>() * norm;
    let mut term = (-rate).exp() * rate;
    let mut cum = term;
    let mut k = 1;
    while cum < u && k < 10_000 {
        k += 1;
        term *= rate / k as f64;
        cum += term;
    }
    k
}

/// Visits each pair `u < v` (in original labels) independently with
/// probability `prob(w_u, w_v)`, which must be nondecreasing in both
/// weights and lie in `[0, 1]`.
fn skip_sample<R, P, F>(weights: &[f64], prob: P, rng: &mut R, mut emit: F)
where
    R: Rng + ?Sized,
    P: Fn(f64, f64) -> f64,
    F: FnMut(usize, usize, &mut R),
{
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    for i in 0..n {
        let u = order[i];
        let wu = weights[u];
        let mut j = i + 1;
        if j >= n {
            break;
        }
        let mut p = prob(wu, weights[order[j]]).clamp(0.0, 1.0);
        while j < n && p > 0.0 {
            if p < 1.0 {
                let r: f64 = rng.random();
                let skip = (r.ln() / (-p).ln_1p()).floor();
                if !skip.is_finite() || skip >= (n - j) as f64 {
                    break;
                }
                j += skip as usize;
            }
            let q = prob(wu, weights[order[j]]).clamp(0.0, 1.0);
            if rng.random::<f64>() < q / p {
                let v = order[j];
                emit(u.min(v), u.max(v), rng);
            }
            p = q;
            j += 1;
        }
    }
}

/// Initial two-vertex graph of an attachment model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialGraph {
    /// parallel edges between vertices 1 and 2
    pub between: usize,
    pub loops_first: usize,
    pub loops_second: usize,
}

impl InitialGraph {
    /// Two vertices joined by `m` parallel edges.
    pub fn parallel(m: usize) -> Self {
        Self { between: m, loops_first: 0, loops_second: 0 }
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.between + 2 * self.loops_first, self.between + 2 * self.loops_second)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = vec![(0, 1); self.between];
        e.extend(std::iter::repeat_n((0, 0), self.loops_first));
        e.extend(std::iter::repeat_n((1, 1), self.loops_second));
        e
    }
}

/// Affine preferential attachment with attachment function `f(x) = a x + delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PASpec {
    pub m: usize,
    pub delta: f64,
    pub a: f64,
    pub init: InitialGraph,
}

impl PASpec {
    pub fn new(m: usize, delta: f64, a: f64) -> Result<Self> {
        Self { m, delta, a, init: InitialGraph::parallel(m) }.validated()
    }

    pub fn uniform(m: usize) -> Self {
        Self { m, delta: 1.0, a: 0.0, init: InitialGraph::parallel(m) }
    }

    pub fn with_init(mut self, init: InitialGraph) -> Result<Self> {
        self.init = init;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return Err(invalid(format!("a = {} outside [0, 1]", self.a)));
        }
        let (d1, d2) = self.init.degrees();
        if d1.min(d2) > self.m {
            return Err(invalid("one initial vertex must have degree at most m"));
        }
        // every existing vertex must carry a nonnegative weight and the
        // normalizer must be positive; later vertices have degree >= m
        let min_initial = self.a * d1.min(d2) as f64 + self.delta;
        if min_initial < 0.0 || self.a * self.m as f64 + self.delta <= 0.0 {
            return Err(invalid(format!(
                "attachment weights a d + delta negative for m = {}, delta = {}, a = {}",
                self.m, self.delta, self.a
            )));
        }
        if self.normalizer(3, 1) <= 0.0 {
            return Err(invalid("nonpositive attachment normalizer"));
        }
        Ok(self)
    }

    /// Normalizing constant for edge `j` (1-based) of vertex `v` (1-based,
    /// `v >= 3`): `a d_[2] + 2 delta + (2 a m + delta)(v - 3) + a (j - 1)`.
    pub fn normalizer(&self, v: usize, j: usize) -> f64 {
        let (d1, d2) = self.init.degrees();
        self.a * (d1 + d2) as f64
            + 2.0 * self.delta
            + (2.0 * self.a * self.m as f64 + self.delta) * (v - 3) as f64
            + self.a * (j - 1) as f64
    }

    pub fn attachment_weight(&self, degree: usize) -> f64 {
        self.a * degree as f64 + self.delta
    }
}

/// Targets chosen by each arriving vertex, in order of its edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub m: usize,
    /// `targets[(v - 2) * m + (j - 1)]` is the target of edge `j` of the
    /// vertex with 0-based label `v >= 2`.
    pub targets: Vec<usize>,
    pub arrival_times: Option<Vec<f64>>,
}

impl GrowthTrace {
    pub fn targets_of(&self, v: usize) -> &[usize] {
        &self.targets[(v - 2) * self.m..(v - 1) * self.m]
    }

    pub fn arrivals(&self) -> usize {
        self.targets.len() / self.m
    }
}

/// Fenwick tree over nonnegative weights supporting prefix-sum search.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0.0; n + 1] }
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`, clamped
    /// to `limit - 1`.
    fn search(&self, mut target: f64, limit: usize) -> usize {
        let mut pos = 0;
        let mut step = self.tree.len().next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(limit - 1)
    }
}

/// Grows an attachment graph to `n` vertices. For vertex `v` and edge `j`
/// the target `u < v` is chosen with probability
/// `(a d_u(v, j - 1) + delta) / c_{v,j}`; degrees are updated after every
/// edge, and the new vertex is never its own target.
pub fn preferential_attachment<R: Rng + ?Sized>(
    n: usize,
    spec: &PASpec,
    rng: &mut R,
) -> Result<(MultiGraph, GrowthTrace)> {
    let spec = spec.validated()?;
    if n < 2 {
        return Err(invalid("attachment models need n >= 2"));
    }
    let m = spec.m;
    let mut degree = vec![0usize; n];
    let (d1, d2) = spec.init.degrees();
    degree[0] = d1;
    degree[1] = d2;
    let mut fen = Fenwick::new(n);
    fen.add(0, spec.attachment_weight(d1));
    fen.add(1, spec.attachment_weight(d2));
    let mut edges = spec.init.edges();
    edges.reserve(m * n.saturating_sub(2));
    let mut targets = Vec::with_capacity(m * n.saturating_sub(2));
    for v in 2..n {
        for j in 1..=m {
            let c = spec.normalizer(v + 1, j);
            if c <= 0.0 {
                return Err(invalid(format!("nonpositive normalizer at vertex {}, edge {j}", v + 1)));
            }
            let u = fen.search(rng.random::<f64>() * c, v);
            edges.push((v, u));
            targets.push(u);
            degree[u] += 1;
            fen.add(u, spec.a);
            degree[v] += 1;
        }
        fen.add(v, spec.attachment_weight(degree[v]));
    }
    Ok((MultiGraph::from_edges_unchecked(n, edges), GrowthTrace { m, targets, arrival_times: None }))
}

/// Uniform attachment: each of the `m` edges of vertex `v` goes to a uniform
/// earlier vertex. Starts from two vertices joined by `m` edges.
pub fn uniform_attachment<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<(MultiGraph, GrowthTrace)> {
    if n < 2 || m == 0 {
        return Err(invalid("uniform attachment needs n >= 2 and m >= 1"));
    }
    let mut edges = InitialGraph::parallel(m).edges();
    let mut targets = Vec::with_capacity(m * (n - 2));
    for v in 2..n {
        for _ in 0..m {
            let u = rng.random_range(0..v);
            edges.push((v, u));
            targets.push(u);
        }
    }
    Ok((MultiGraph::from_edges_unchecked(n, edges), GrowthTrace { m, targets, arrival_times: None }))
}

/// Birth times of a Yule process started from one individual at time 0:
/// `t[0] = 0` and `t[k] - t[k - 1] ~ Exp(k)`.
pub fn yule_arrival_times<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    yule_arrival_times_from(1, n, rng)
}

/// Yule birth times when the population starts at `initial` at time 0. The
/// first `initial` entries are 0; entry `k >= initial` is the time at which
/// the population grows from `k` to `k + 1`.
pub fn yule_arrival_times_from<R: Rng + ?Sized>(initial: usize, n: usize, rng: &mut R) -> Vec<f64> {
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for k in 0..n {
        if k >= initial.max(1) {
            let e: f64 = Exp1.sample(rng);
            t += e / k as f64;
        }
        times.push(t);
    }
    times
}

/// Exponential waiting time with the given rate.
pub fn exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    Ok(Exp::new(rate).map_err(|e| invalid(e.to_string()))?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degrees::{power_law_weights, PowerLawSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn cm_single_edge() {
        let d = DegreeSequence::new(vec![1, 1]).unwrap();
        let mut r = rng(1);
        for _ in 0..10 {
            assert_eq!(configuration_model(&d, &mut r).unwrap().canonical_edges(), vec![(0, 1)]);
        }
    }

    #[test]
    fn cm_odd_total_rejected() {
        let d = DegreeSequence::new(vec![1, 2]).unwrap();
        assert!(matches!(configuration_model(&d, &mut rng(1)), Err(Error::OddTotalDegree(3))));
    }

    #[test]
    fn cm_path_versus_loop() {
        // d = (2,1,1): 3 matchings, two give the path 2-1-3, one the loop
        let d = DegreeSequence::new(vec![2, 1, 1]).unwrap();
        let mut r = rng(2);
        let trials = 60_000;
        let mut path = 0;
        for _ in 0..trials {
            let g = configuration_model(&d, &mut r).unwrap();
            assert_eq!(g.degrees(), vec![2, 1, 1]);
            if g.self_loop_count() == 0 {
                assert_eq!(g.canonical_edges(), vec![(0, 1), (0, 2)]);
                path += 1;
            } else {
                assert_eq!(g.canonical_edges(), vec![(0, 0), (1, 2)]);
            }
        }
        let p = 2.0 / 3.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((path as f64 - p * trials as f64).abs() < 4.0 * sigma);
    }

    #[test]
    fn cm_preserves_degrees() {
        let d = DegreeSequence::new(vec![5, 3, 1, 1, 2, 4]).unwrap();
        let mut r = rng(3);
        for _ in 0..100 {
            assert_eq!(configuration_model(&d, &mut r).unwrap().degrees(), d.as_slice());
        }
    }

    #[test]
    fn edge_probability_rules() {
        let (nr, cl, grg) = (Rank1Kind::NorrosReittu, Rank1Kind::ChungLu, Rank1Kind::Generalized);
        assert!((nr.edge_probability(1.0f64, 1.0, 2.0) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((nr.edge_probability(1.0f64, 1.0, 2.0) - 0.3935).abs() < 1e-4);
        assert_eq!(cl.edge_probability(3.0, 3.0, 4.0), 1.0);
        assert!((grg.edge_probability(1.0f64, 1.0, 2.0) - 1.0 / 3.0).abs() < 1e-15);
        let x = 1e-4;
        for kind in [nr, cl, grg] {
            let p: f64 = kind.edge_probability(1.0, x, 1.0);
            assert!((p - x).abs() < 2.0 * x * x);
        }
    }

    #[test]
    fn nr_multigraph_mean_multiplicity() {
        let w = WeightSequence::new(vec![2.0, 1.0, 1.0]).unwrap();
        let mut r = rng(4);
        let trials = 100_000;
        let rate = 2.0 * 1.0 / 4.0;
        let mut total = 0usize;
        for _ in 0..trials {
            let g = nr_multigraph(&w, &mut r).unwrap();
            assert_eq!(g.self_loop_count(), 0);
            total += g.multiplicity(0, 1);
        }
        let mean = total as f64 / trials as f64;
        let se = (rate / trials as f64).sqrt();
        assert!((mean - rate).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn nr_graph_matches_collapsed_multigraph() {
        // n = 3: presence pattern law of the simple graph equals that of
        // "at least one Poisson copy"
        let w = WeightSequence::<f64>::new(vec![2.0, 1.0, 0.5]).unwrap();
        let total = 3.5;
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let probs: Vec<f64> =
            pairs.iter().map(|&(u, v)| 1.0 - (-w.as_slice()[u] * w.as_slice()[v] / total).exp()).collect();
        let trials = 80_000;
        let mut simple = [0usize; 8];
        let mut collapsed = [0usize; 8];
        let mut r = rng(5);
        let pattern = |g: &MultiGraph| {
            pairs.iter().enumerate().fold(0, |acc, (i, &(u, v))| acc | (usize::from(g.multiplicity(u, v) > 0) << i))
        };
        for _ in 0..trials {
            let g = nr_graph(&w, &mut r).unwrap();
            assert!(pairs.iter().all(|&(u, v)| g.multiplicity(u, v) <= 1));
            simple[pattern(&g)] += 1;
            collapsed[pattern(&nr_multigraph(&w, &mut r).unwrap())] += 1;
        }
        for mask in 0..8 {
            let p: f64 = (0..3).map(|i| if mask >> i & 1 == 1 { probs[i] } else { 1.0 - probs[i] }).product();
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            for counts in [&simple, &collapsed] {
                assert!((counts[mask] as f64 - p * trials as f64).abs() < 4.0 * sigma + 1.0);
            }
        }
    }

    #[test]
    fn nr_graph_pairs_independent() {
        // covariance of presence indicators of disjoint and overlapping
        // pairs on four vertices
        let w = WeightSequence::new(vec![3.0, 2.0, 1.5, 1.0]).unwrap();
        let mut r = rng(6);
        let trials = 100_000;
        let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
        for _ in 0..trials {
            let g = nr_graph(&w, &mut r).unwrap();
            let x = f64::from(u8::from(g.multiplicity(0, 1) > 0));
            let y = f64::from(u8::from(g.multiplicity(0, 2) > 0));
            a += x;
            b += y;
            ab += x * y;
        }
        let t = trials as f64;
        let cov = ab / t - (a / t) * (b / t);
        assert!(cov.abs() < 4.0 * 0.5 / t.sqrt(), "cov {cov}");
    }

    #[test]
    fn rank1_edge_frequencies() {
        let w = WeightSequence::new(vec![4.0, 3.0, 2.0, 1.0, 1.0, 0.5]).unwrap();
        let total = w.total();
        let trials = 40_000;
        for kind in [Rank1Kind::NorrosReittu, Rank1Kind::ChungLu, Rank1Kind::Generalized] {
            let mut counts = vec![vec![0usize; 6]; 6];
            let mut r = rng(7);
            for _ in 0..trials {
                for &(u, v) in rank1_graph(&w, kind, 0.7, &mut r).unwrap().edges() {
                    counts[u][v] += 1;
                }
            }
            for u in 0..6 {
                for v in u + 1..6 {
                    let p = 0.7 * kind.edge_probability(w.as_slice()[u], w.as_slice()[v], total);
                    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
                    let got = counts[u][v] as f64;
                    assert!((got - p * trials as f64).abs() < 4.5 * sigma + 1.0, "{kind:?} {u} {v}");
                }
            }
        }
    }

    #[test]
    fn rank1_large_graph_edge_count() {
        let spec = PowerLawSpec::new(2.5, 1.0).unwrap();
        let w = power_law_weights(20_000, &spec).unwrap();
        let g = nr_graph(&w, &mut rng(8)).unwrap();
        assert_eq!(g.self_loop_count(), 0);
        let m = g.edge_count() as f64;
        // sum over pairs of p_uv is a bit below l_n / 2
        let half = w.total() / 2.0;
        assert!(m < half * 1.05 && m > half * 0.6, "edges {m} vs {half}");
    }

    #[test]
    fn pa_normalizer_and_validity() {
        let spec = PASpec::new(2, 1.0, 1.0).unwrap();
        // v = 3, j = 1: a d_[2] + 2 delta
        assert_eq!(spec.normalizer(3, 1), 4.0 + 2.0);
        assert!(PASpec::new(2, -2.0, 1.0).is_err());
        assert!(PASpec::new(0, 1.0, 1.0).is_err());
        assert!(PASpec::new(2, 0.0, 1.5).is_err());
    }

    #[test]
    fn pa_normalizer_equals_weight_sum() {
        let mut r = rng(9);
        for (m, delta, a) in [(1, 0.0, 1.0), (2, 0.5, 1.0), (3, -1.5, 1.0), (2, 1.0, 0.0), (2, 0.3, 0.4)] {
            let spec = PASpec::new(m, delta, a).unwrap();
            let (g, trace) = preferential_attachment(30, &spec, &mut r).unwrap();
            // replay, checking sum_{u<v} f(d_u) = c_{v,j} at each step
            let (d1, d2) = spec.init.degrees();
            let mut deg = vec![0usize; 30];
            deg[0] = d1;
            deg[1] = d2;
            for v in 2..30 {
                for (j, &u) in trace.targets_of(v).iter().enumerate() {
                    let s: f64 = (0..v).map(|x| spec.attachment_weight(deg[x])).sum();
                    assert!((s - spec.normalizer(v + 1, j + 1)).abs() < 1e-9);
                    assert!(u < v);
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
            assert_eq!(deg, g.degrees());
        }
    }

    #[test]
    fn pa_out_degree() {
        let spec = PASpec::new(3, 0.0, 1.0).unwrap();
        let (g, trace) = preferential_attachment(200, &spec, &mut rng(10)).unwrap();
        assert_eq!(g.edge_count(), 3 + 3 * 198);
        assert_eq!(trace.arrivals(), 198);
        for v in 2..200 {
            assert_eq!(g.edges().iter().filter(|&&(a, _)| a == v).count(), 3);
        }
    }

    #[test]
    fn pa_third_vertex_even_split() {
        let spec = PASpec::new(1, 0.0, 1.0).unwrap();
        let mut r = rng(11);
        let trials = 100_000;
        let to_first = (0..trials)
            .filter(|_| preferential_attachment(3, &spec, &mut r).unwrap().1.targets[0] == 0)
            .count();
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((to_first as f64 - trials as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn pa_four_vertex_law() {
        // a = 1, m = 2, delta = 0, init = two vertices with two parallel
        // edges (d = (2, 2)). Hand enumeration of the 2 x 2 target choices
        // of vertex 3 and the law of vertex 4's first target.
        let spec = PASpec::new(2, 0.0, 1.0).unwrap();
        // vertex 3 edge 1: c = 4, P(u=1) = 2/4. edge 2: c = 5 with the
        // chosen vertex now of degree 3: P(same) = 3/5, P(other) = 2/5.
        let mut expect = std::collections::HashMap::new();
        expect.insert(vec![0, 0], 0.5 * 0.6);
        expect.insert(vec![0, 1], 0.5 * 0.4);
        expect.insert(vec![1, 0], 0.5 * 0.4);
        expect.insert(vec![1, 1], 0.5 * 0.6);
        let mut r = rng(12);
        let trials = 100_000;
        let mut counts = std::collections::HashMap::new();
        let mut first_of_4_to_3 = 0;
        for _ in 0..trials {
            let (_, t) = preferential_attachment(4, &spec, &mut r).unwrap();
            *counts.entry(t.targets_of(2).to_vec()).or_insert(0usize) += 1;
            if t.targets_of(3)[0] == 2 {
                first_of_4_to_3 += 1;
            }
        }
        for (k, p) in expect {
            let got = counts.get(&k).copied().unwrap_or(0) as f64;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((got - p * trials as f64).abs() < 4.0 * sigma, "{k:?}");
        }
        // vertex 3 has degree 2 when vertex 4 arrives, total degree 8:
        // c_{4,1} = 4 + 0 + 4 = 8, P = 2/8
        let p = 0.25;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((first_of_4_to_3 as f64 - p * trials as f64).abs() < 4.0 * sigma);
    }

    #[test]
    fn ua_targets_uniform_and_in_degree() {
        let mut r = rng(13);
        let trials = 20_000;
        let n = 40;
        let mut in_first = 0usize;
        let mut to_first_at_3 = 0usize;
        for _ in 0..trials {
            let (_, t) = uniform_attachment(n, 2, &mut r).unwrap();
            assert_eq!(t.targets.len(), 2 * (n - 2));
            in_first += t.targets.iter().filter(|&&u| u == 0).count();
            to_first_at_3 += t.targets_of(2).iter().filter(|&&u| u == 0).count();
        }
        let p = 0.5;
        let sigma = (2.0 * trials as f64 * p * p).sqrt();
        assert!((to_first_at_3 as f64 - trials as f64).abs() < 4.0 * sigma);
        // harmonic oracle: sum over arrivals v = 3..n (1-based) of m / (v - 1)
        let expect: f64 = (3..=n).map(|v| 2.0 / (v - 1) as f64).sum();
        let mean = in_first as f64 / trials as f64;
        let var: f64 = (3..=n).map(|v| 2.0 * (1.0 / (v - 1) as f64) * (1.0 - 1.0 / (v - 1) as f64)).sum();
        assert!((mean - expect).abs() < 4.0 * (var / trials as f64).sqrt(), "{mean} vs {expect}");
    }

    #[test]
    fn yule_times_and_growth() {
        let mut r = rng(14);
        let t = yule_arrival_times(50, &mut r);
        assert_eq!(t[0], 0.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        // mean increment t[k+1] - t[k] = 1/(k+1) with population k+1
        let reps = 20_000;
        let mut gap = 0.0;
        for _ in 0..reps {
            let t = yule_arrival_times(4, &mut r);
            gap += t[3] - t[2];
        }
        let mean = gap / reps as f64;
        assert!((mean - 1.0 / 3.0).abs() < 4.0 * (1.0 / 3.0) / (reps as f64).sqrt());
        // N(t) e^{-t} has mean 1
        let horizon = 3.0;
        let reps = 5_000;
        let mut acc = Vec::with_capacity(reps);
        for _ in 0..reps {
            let t = yule_arrival_times(2_000, &mut r);
            let count = t.iter().filter(|&&x| x <= horizon).count();
            assert!(count < 2_000);
            acc.push(count as f64 * (-horizon).exp());
        }
        let m = acc.iter().sum::<f64>() / reps as f64;
        let sd = (acc.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        assert!((m - 1.0).abs() < 3.0 * sd / (reps as f64).sqrt(), "mean {m}");
    }
}
