//! Exact laws on tiny instances by full enumeration, used as test oracles.
//!
//! Probabilities are generic over [`Weight`], so the same enumeration runs
//! in `f64` or in exact rationals.

use std::collections::BTreeMap;

use crate::graph::{IsolatedVertices, MultiGraph};
use crate::scalar::Weight;

/// Sorted (descending) component sizes, isolated vertices included.
pub type SizeMultiset = Vec<usize>;

/// Law over canonical edge lists.
pub type GraphLaw<W> = BTreeMap<Vec<(usize, usize)>, W>;

/// Law over component-size multisets.
pub type SizeLaw<W> = BTreeMap<SizeMultiset, W>;

fn pow<W: Weight>(x: &W, k: usize) -> W {
    (0..k).fold(W::one(), |acc, _| acc * x.clone())
}

fn binomial_coeff(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Calls `f` with the edge list of every perfect matching of the
/// half-edges of `d` (owner pairs in matching order).
pub fn for_each_matching(d: &[usize], mut f: impl FnMut(&[(usize, usize)])) {
    let owners: Vec<usize> = d.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
    let mut used = vec![false; owners.len()];
    let mut edges = Vec::with_capacity(owners.len() / 2);
    fn rec(
        owners: &[usize],
        used: &mut [bool],
        edges: &mut Vec<(usize, usize)>,
        f: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        let Some(i) = used.iter().position(|&u| !u) else {
            f(edges);
            return;
        };
        used[i] = true;
        for j in i + 1..owners.len() {
            if !used[j] {
                used[j] = true;
                edges.push((owners[i], owners[j]));
                rec(owners, used, edges, f);
                edges.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    if owners.len() % 2 == 0 {
        rec(&owners, &mut used, &mut edges, &mut f);
    }
}

/// Number of perfect matchings of `l` half-edges, `(l - 1)!!`.
pub fn matching_count(l: usize) -> u64 {
    if l % 2 == 1 {
        return 0;
    }
    (1..l).step_by(2).map(|k| k as u64).product()
}

/// Law of the configuration model as a multigraph (canonical edge list).
pub fn cm_multigraph_law<W: Weight>(d: &[usize]) -> GraphLaw<W> {
    let total: usize = d.iter().sum();
    let p = W::one() / W::from_count(matching_count(total));
    let mut law = GraphLaw::new();
    for_each_matching(d, |edges| {
        let g = MultiGraph::from_edges_unchecked(d.len(), edges.to_vec());
        let e = law.entry(g.canonical_edges()).or_insert_with(W::zero);
        *e = e.clone() + p.clone();
    });
    law
}

fn size_multiset(n: usize, edges: &[(usize, usize)]) -> SizeMultiset {
    MultiGraph::from_edges_unchecked(n, edges.to_vec()).components_with(IsolatedVertices::Include).sizes()
}

/// Component-size law of the percolated configuration model, enumerated
/// over matchings and kept-edge subsets.
pub fn percolated_cm_size_law<W: Weight>(d: &[usize], pi: &W) -> SizeLaw<W> {
    let total: usize = d.iter().sum();
    let p = W::one() / W::from_count(matching_count(total));
    let q = W::one() - pi.clone();
    let mut law = SizeLaw::new();
    for_each_matching(d, |edges| {
        let m = edges.len();
        for mask in 0u32..(1 << m) {
            let kept: Vec<(usize, usize)> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
            let k = kept.len();
            let w = p.clone() * pow(pi, k) * pow(&q, m - k);
            let e = law.entry(size_multiset(d.len(), &kept)).or_insert_with(W::zero);
            *e = e.clone() + w;
        }
    });
    law
}

/// Component-size law of the explosion construction with half-edge
/// retention `q = sqrt(pi)`: binomial thinning of every degree, uniform
/// matching of the exploded degrees, removal of the red vertices.
pub fn janson_size_law<W: Weight>(d: &[usize], q: &W) -> SizeLaw<W> {
    let n = d.len();
    let one_minus = W::one() - q.clone();
    let mut law = SizeLaw::new();
    let mut kept = vec![0usize; n];
    fn rec<W: Weight>(
        v: usize,
        d: &[usize],
        kept: &mut Vec<usize>,
        weight: W,
        q: &W,
        one_minus: &W,
        law: &mut SizeLaw<W>,
    ) {
        if v == d.len() {
            let n = d.len();
            let red: usize = d.iter().zip(kept.iter()).map(|(a, b)| a - b).sum();
            let mut ex = kept.clone();
            ex.extend(std::iter::repeat_n(1, red));
            let total: usize = ex.iter().sum();
            let p = weight / W::from_count(matching_count(total));
            for_each_matching(&ex, |edges| {
                let inner: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| a < n && b < n).collect();
                let e = law.entry(size_multiset(n, &inner)).or_insert_with(W::zero);
                *e = e.clone() + p.clone();
            });
            return;
        }
        for j in 0..=d[v] {
            kept[v] = j;
            let w = weight.clone()
                * W::from_count(binomial_coeff(d[v], j))
                * pow(q, j)
                * pow(one_minus, d[v] - j);
            rec(v + 1, d, kept, w, q, one_minus, law);
        }
    }
    rec(0, d, &mut kept, W::one(), q, &one_minus, &mut law);
    law
}

/// Total-variation distance between two laws on the same key space.
pub fn tv_distance<K: Ord + Clone>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys.iter().map(|k| (a.get(*k).copied().unwrap_or(0.0) - b.get(*k).copied().unwrap_or(0.0)).abs()).sum::<f64>()
}

/// Empirical law of a sample of keys.
pub fn empirical_law<K: Ord + Clone>(samples: impl IntoIterator<Item = K>) -> BTreeMap<K, f64> {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    let mut total = 0usize;
    for k in samples {
        *counts.entry(k).or_default() += 1;
        total += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

pub fn to_f64_law<K: Ord + Clone, W: Weight>(law: &BTreeMap<K, W>) -> BTreeMap<K, f64> {
    law.iter().map(|(k, w)| (k.clone(), w.to_f64_lossy())).collect()
}
