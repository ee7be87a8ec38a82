//! Undirected simple graphs over dense `0..n` vertex ids.

use std::collections::VecDeque;

use thiserror::Error;

pub type Vertex = usize;

/// Distance reported by [`bfs_distances`] for vertices that were not reached.
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
}

/// Adjacency-list graph. Neighbor lists are sorted and symmetric; there are
/// no self-loops and no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = if u < w[0] { (u, w[0]) } else { (w[0], u) };
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { adj, m })
    }

    /// Builds a graph from edges already known to be valid.
    ///
    /// Panics on invalid input; meant for generators and tests.
    pub fn from_edges_unchecked<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        Self::from_edges(n, edges).expect("invalid edge list")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges_unchecked(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::from_edges_unchecked(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges_unchecked(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges_unchecked(leaves + 1, (1..=leaves).map(|v| (0, v)))
    }

    /// `width x height` grid, row-major: vertex `y * width + x`.
    pub fn grid(width: usize, height: usize) -> Self {
        let id = |x: usize, y: usize| y * width + x;
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < height {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        Self::from_edges_unchecked(width * height, edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Closed neighborhood `N[v]` in ascending order.
    pub fn closed_neighborhood(&self, v: Vertex) -> Vec<Vertex> {
        let nbrs = &self.adj[v];
        let at = nbrs.partition_point(|&w| w < v);
        let mut out = Vec::with_capacity(nbrs.len() + 1);
        out.extend_from_slice(&nbrs[..at]);
        out.push(v);
        out.extend_from_slice(&nbrs[at..]);
        out
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        bfs_distances(self, 0, None).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.m + 1 == self.n() && self.is_connected()
    }

    /// Subgraph induced by `vertices`, relabeled `0..vertices.len()` in the
    /// given order. Returns the graph and the new-to-old id map.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut new_id = vec![UNREACHABLE; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            new_id[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = new_id[w];
                if j != UNREACHABLE && i < j {
                    edges.push((i, j));
                }
            }
        }
        (Self::from_edges_unchecked(vertices.len(), edges), vertices.to_vec())
    }
}

/// Breadth-first distances from `src`. With `cap = Some(c)` the search stops
/// expanding at depth `c`, so every vertex farther than `c` is [`UNREACHABLE`].
pub fn bfs_distances(g: &Graph, src: Vertex, cap: Option<usize>) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; g.n()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        if cap.is_some_and(|c| dv >= c) {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// The communication graph: `uv` is an edge iff `1 <= dist_g(u, v) <= d`.
pub fn power_graph(g: &Graph, d: usize) -> Graph {
    assert!(d >= 1, "communication range must be positive");
    let mut edges = Vec::new();
    for u in 0..g.n() {
        let dist = bfs_distances(g, u, Some(d));
        edges.extend(dist.iter().enumerate().filter(|&(v, &dv)| v > u && dv != UNREACHABLE).map(|(v, _)| (u, v)));
    }
    Graph::from_edges_unchecked(g.n(), edges)
}

/// Precomputed "within distance `d`" relation, stored as a bit matrix.
///
/// Solvers test d-connectivity of the same small sets over and over; this
/// turns each pair test into a bit lookup.
#[derive(Debug, Clone)]
pub struct RangeMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl RangeMatrix {
    pub fn new(g: &Graph, d: usize) -> Self {
        let n = g.n();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for u in 0..n {
            for (v, &dv) in bfs_distances(g, u, Some(d)).iter().enumerate() {
                if dv != UNREACHABLE {
                    bits[u * words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        RangeMatrix { n, words, bits }
    }

    /// True iff `dist(u, v) <= d` (including `u == v`).
    #[inline]
    pub fn within(&self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(u < self.n && v < self.n);
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Connectivity of `set` in the power graph, by a flood fill over the set.
    pub fn connects(&self, set: &[Vertex]) -> bool {
        let k = set.len();
        if k <= 1 {
            return true;
        }
        let mut seen = 1u128;
        let mut stack = [0usize; 128];
        if k > 128 {
            return self.connects_large(set);
        }
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let i = stack[top];
            for j in 0..k {
                if seen >> j & 1 == 0 && self.within(set[i], set[j]) {
                    seen |= 1 << j;
                    stack[top] = j;
                    top += 1;
                }
            }
        }
        seen.count_ones() as usize == k
    }

    fn connects_large(&self, set: &[Vertex]) -> bool {
        let mut seen = vec![false; set.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for j in 0..set.len() {
                if !seen[j] && self.within(set[i], set[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(Graph::from_edges(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::from_edges(2, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(Graph::from_edges(2, [(0, 2)]), Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 }));
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(bfs_distances(&Graph::path(3), 0, None), vec![0, 1, 2]);
        assert_eq!(bfs_distances(&Graph::complete(3), 0, None), vec![0, 1, 1]);
        assert_eq!(bfs_distances(&Graph::grid(4, 4), 0, None)[15], 6);
        let capped = bfs_distances(&Graph::path(4), 0, Some(1));
        assert_eq!(capped, vec![0, 1, UNREACHABLE, UNREACHABLE]);
    }

    #[test]
    fn power_graph_examples() {
        let p = Graph::path(3);
        assert_eq!(power_graph(&p, 1), p);
        assert_eq!(power_graph(&p, 2), Graph::complete(3));
        let sq = power_graph(&Graph::grid(4, 4), 2);
        assert_eq!(sq.neighbors(0), &[1, 2, 4, 5, 8]);
    }

    #[test]
    fn closed_neighborhood_is_sorted() {
        let g = Graph::star(3);
        assert_eq!(g.closed_neighborhood(0), vec![0, 1, 2, 3]);
        assert_eq!(g.closed_neighborhood(2), vec![0, 2]);
    }

    #[test]
    fn range_matrix_matches_power_graph() {
        let g = Graph::grid(3, 4);
        for d in 1..4 {
            let pw = power_graph(&g, d);
            let rm = RangeMatrix::new(&g, d);
            for u in 0..g.n() {
                for v in 0..g.n() {
                    assert_eq!(rm.within(u, v), u == v || pw.has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn trees_and_induced_subgraphs() {
        assert!(Graph::star(4).is_tree());
        assert!(!Graph::cycle(4).is_tree());
        assert!(!Graph::empty(2).is_tree());
        let (sub, map) = Graph::path(5).induced_subgraph(&[1, 2, 3]);
        assert_eq!(sub, Graph::path(3));
        assert_eq!(map, vec![1, 2, 3]);
    }
}
