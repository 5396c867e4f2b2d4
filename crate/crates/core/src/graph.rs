//! Multigraph storage, union-find and component decomposition.
//!
//! Vertices are `0..n` in memory. The edge-list text format is 1-indexed.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected multigraph on `0..n`. Parallel edges and self-loops are kept
/// with their exact multiplicity; a self-loop contributes 2 to its vertex's
/// degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Builds a graph from 0-indexed endpoint pairs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Internal constructor for generators that guarantee valid endpoints.
    pub(crate) fn from_edges_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < n && v < n));
        Self { n, edges }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        self.edges.push((u, v));
        Ok(())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// Number of copies of the unordered pair `{u, v}`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| (a == u && b == v) || (a == v && b == u))
            .count()
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|&&(u, v)| u == v).count()
    }

    /// Edge multiset in canonical form (each pair as `(min, max)`, sorted).
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        e.sort_unstable();
        e
    }

    pub fn components(&self) -> ComponentDecomposition {
        self.components_with(IsolatedVertices::Include)
    }

    /// Component decomposition sorted by size descending, ties broken by the
    /// smallest vertex label in the component.
    pub fn components_with(&self, isolated: IsolatedVertices) -> ComponentDecomposition {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        let mut edge_count = vec![0usize; self.n];
        for &(u, _) in &self.edges {
            edge_count[uf.find(u)] += 1;
        }
        let mut min_vertex = vec![usize::MAX; self.n];
        for v in 0..self.n {
            let r = uf.find(v);
            if min_vertex[r] == usize::MAX {
                min_vertex[r] = v;
            }
        }
        let mut entries = Vec::new();
        for v in 0..self.n {
            if uf.find(v) != v {
                continue;
            }
            let size = uf.size(v);
            let edges = edge_count[v];
            if size == 1 && edges == 0 && isolated == IsolatedVertices::Exclude {
                continue;
            }
            entries.push(Component {
                size,
                surplus: edges + 1 - size,
                edges,
                min_vertex: min_vertex[v],
            });
        }
        entries.sort_unstable_by(|a, b| b.size.cmp(&a.size).then(a.min_vertex.cmp(&b.min_vertex)));
        ComponentDecomposition { n: self.n, entries }
    }

    /// Reads the edge-list format: a header `n <count>`, then one 1-indexed
    /// `u v` pair per line. Blank lines and `#` comments are skipped.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut graph: Option<MultiGraph> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Parse { line: line_no, message: format!("expected two fields, got {trimmed:?}") })
                }
            };
            match graph.as_mut() {
                None => {
                    if a != "n" {
                        return Err(Error::Parse { line: line_no, message: "missing `n <count>` header".into() });
                    }
                    let n = parse_field(b, line_no)?;
                    graph = Some(MultiGraph::empty(n));
                }
                Some(g) => {
                    let u: usize = parse_field(a, line_no)?;
                    let v: usize = parse_field(b, line_no)?;
                    if u == 0 || v == 0 {
                        return Err(Error::Parse { line: line_no, message: "vertices are 1-indexed".into() });
                    }
                    g.add_edge(u - 1, v - 1)?;
                }
            }
        }
        graph.ok_or(Error::Parse { line: 0, message: "empty edge list".into() })
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n {}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{} {}", u + 1, v + 1)?;
        }
        Ok(())
    }
}

fn parse_field(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("not a nonnegative integer: {s:?}") })
}

/// Whether vertices without any incident edge are reported as size-1
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolatedVertices {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub size: usize,
    pub surplus: usize,
    pub edges: usize,
    pub min_vertex: usize,
}

/// Components ordered by size (descending), smallest vertex label first on
/// ties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    n: usize,
    entries: Vec<Component>,
}

impl ComponentDecomposition {
    pub fn new(n: usize, mut entries: Vec<Component>) -> Self {
        entries.sort_unstable_by(|a, b| b.size.cmp(&a.size).then(a.min_vertex.cmp(&b.min_vertex)));
        Self { n, entries }
    }

    /// Vertex count of the underlying graph (including excluded isolated
    /// vertices).
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Component] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn size_surplus_pairs(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|c| (c.size, c.surplus)).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.entries.iter().map(|c| c.size).collect()
    }

    /// Size of the `j`-th largest component (0-based), or 0 if absent.
    pub fn size(&self, j: usize) -> usize {
        self.entries.get(j).map_or(0, |c| c.size)
    }

    pub fn largest(&self) -> usize {
        self.size(0)
    }

    pub fn second_largest(&self) -> usize {
        self.size(1)
    }

    pub fn surplus_of_largest(&self) -> usize {
        self.entries.first().map_or(0, |c| c.surplus)
    }

    pub fn total_edges(&self) -> usize {
        self.entries.iter().map(|c| c.edges).sum()
    }
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a new singleton and returns its index.
    pub fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    /// Size of the set whose root is `root`.
    pub fn size(&self, root: usize) -> usize {
        self.size[root]
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Merges the sets of `x` and `y`; returns the new root if they were
    /// distinct.
    pub fn union(&mut self, x: usize, y: usize) -> Option<usize> {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return None;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        Some(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dfs_components(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            let mut verts = 0;
            let mut edge_ids = std::collections::HashSet::new();
            while let Some(x) = stack.pop() {
                verts += 1;
                for &(y, e) in &adj[x] {
                    edge_ids.insert(e);
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            out.push((verts, edge_ids.len() + 1 - verts));
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    #[test]
    fn triangle() {
        let g = MultiGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert_eq!(g.components().size_surplus_pairs(), vec![(3, 1)]);
    }

    #[test]
    fn self_loop_counts_twice() {
        let g = MultiGraph::from_edges(1, [(0, 0)]).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.components().size_surplus_pairs(), vec![(1, 1)]);
        // a looped vertex is not isolated
        assert_eq!(g.components_with(IsolatedVertices::Exclude).len(), 1);
    }

    #[test]
    fn parallel_edges() {
        let g = MultiGraph::from_edges(4, [(0, 1), (0, 1)]).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.multiplicity(1, 0), 2);
        let c = g.components();
        assert_eq!(c.size_surplus_pairs(), vec![(2, 1), (1, 0), (1, 0)]);
        let c = g.components_with(IsolatedVertices::Exclude);
        assert_eq!(c.size_surplus_pairs(), vec![(2, 1)]);
    }

    #[test]
    fn two_disjoint_edges() {
        let g = MultiGraph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let c = g.components();
        assert_eq!(c.size_surplus_pairs(), vec![(2, 0), (2, 0)]);
        assert_eq!(c.entries()[0].min_vertex, 0);
    }

    #[test]
    fn endpoint_out_of_range() {
        let err = MultiGraph::from_edges(3, [(0, 3)]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { vertex: 3, n: 3 }));
    }

    #[test]
    fn random_graphs_match_dfs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let m = rng.random_range(0..=10);
            let edges: Vec<_> = (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            let g = MultiGraph::from_edges(n, edges.iter().copied()).unwrap();
            let mut ours = g.components().size_surplus_pairs();
            ours.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(ours, dfs_components(n, &edges));
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = MultiGraph::from_edges(4, [(0, 1), (0, 1), (3, 3)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n 4\n1 2\n1 2\n4 4\n");
        let h = MultiGraph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn edge_list_rejects_zero_index() {
        let err = MultiGraph::read_edge_list(&b"n 2\n0 1\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
