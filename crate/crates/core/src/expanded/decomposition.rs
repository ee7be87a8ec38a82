//! Tree decompositions: validity, a min-fill upper bound, and the lift from
//! a decomposition of `G` to one of `G_I`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{paths_to_schedule, PathsWitness, TimeExpandedGraph};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted vertex sets, one per node.
    pub bags: Vec<Vec<usize>>,
    /// Parent node; `None` for the root only.
    pub parent: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("decomposition nodes do not form a rooted tree")]
    NotATree,
    #[error("vertex {0} appears in no bag")]
    VertexNotCovered(usize),
    #[error("bag holds vertex {0}, which is out of range")]
    VertexOutOfRange(usize),
    #[error("edge {0}-{1} is contained in no bag")]
    EdgeNotCovered(usize, usize),
    #[error("bags containing vertex {0} are not connected")]
    NotConnected(usize),
    #[error("witness rejected: {0}")]
    InvalidWitness(String),
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Checks the decomposition against a graph on `0..n` given by its
    /// endpoint pairs (loops allowed).
    pub fn validate(
        &self,
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(), DecompositionError> {
        let nodes = self.bags.len();
        if nodes == 0 || self.parent.len() != nodes {
            return Err(DecompositionError::NotATree);
        }
        if self.parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(DecompositionError::NotATree);
        }
        for start in 0..nodes {
            let mut x = start;
            let mut steps = 0;
            while let Some(p) = self.parent[x] {
                if p >= nodes || steps > nodes {
                    return Err(DecompositionError::NotATree);
                }
                x = p;
                steps += 1;
            }
        }

        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (x, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(DecompositionError::VertexOutOfRange(v));
                }
                holders[v].push(x);
            }
        }
        if let Some(v) = (0..n).find(|&v| holders[v].is_empty()) {
            return Err(DecompositionError::VertexNotCovered(v));
        }
        for (u, v) in pairs {
            let shared = holders[u].iter().any(|x| holders[v].binary_search(x).is_ok());
            if !shared {
                return Err(DecompositionError::EdgeNotCovered(u, v));
            }
        }
        // In a rooted tree, a node set is connected iff exactly one member
        // has its parent outside the set.
        for (v, list) in holders.iter().enumerate() {
            let tops = list.iter().filter(|&&x| self.parent[x].is_none_or(|p| list.binary_search(&p).is_err())).count();
            if tops != 1 {
                return Err(DecompositionError::NotConnected(v));
            }
        }
        Ok(())
    }

    pub fn is_valid_decomposition(&self, n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> bool {
        self.validate(n, pairs).is_ok()
    }

    pub fn is_valid_for(&self, g: &Graph) -> bool {
        self.is_valid_decomposition(g.n(), g.edges())
    }
}

/// Min-fill elimination: repeatedly eliminate the vertex whose neighbors
/// need the fewest fill edges (lowest id on ties).
pub fn treewidth_upper_bound(g: &Graph) -> (usize, TreeDecomposition) {
    let n = g.n();
    if n == 0 {
        let td = TreeDecomposition { bags: vec![Vec::new()], parent: vec![None] };
        return (0, td);
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut eliminated = vec![false; n];
    let mut position = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n).filter(|&v| !eliminated[v]).min_by_key(|&v| (fill_in(&adj, v), v)).expect("a vertex remains");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push((bag, nbrs));
        eliminated[v] = true;
        position[v] = step;
        order.push(v);
    }
    let parent = bags
        .iter()
        .enumerate()
        .map(|(x, (_, nbrs))| match nbrs.iter().map(|&w| position[w]).min() {
            Some(p) => Some(p),
            None if x + 1 < n => Some(x + 1),
            None => None,
        })
        .collect();
    let td = TreeDecomposition { bags: bags.into_iter().map(|(b, _)| b).collect(), parent };
    (td.width(), td)
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Replaces every vertex by its `ell + 1` copies, then adds both agent
/// terminals to every bag that meets the agent's path.
pub fn lift_tree_decomposition(
    td: &TreeDecomposition,
    gi: &TimeExpandedGraph,
    w: &PathsWitness,
) -> Result<TreeDecomposition, DecompositionError> {
    let inst = gi.instance();
    let g = inst.graph();
    td.validate(g.n(), g.edges())?;
    paths_to_schedule(gi, w).map_err(|e| DecompositionError::InvalidWitness(e.to_string()))?;

    let ell = gi.ell();
    let mut owner = vec![None; gi.vertex_count()];
    for (a, p) in w.paths.iter().enumerate() {
        for &x in p {
            owner[x] = Some(a);
        }
    }
    let bags = td
        .bags
        .iter()
        .map(|bag| {
            let mut lifted: BTreeSet<usize> =
                bag.iter().flat_map(|&v| (0..=ell).map(move |i| gi.vertex(v, i))).collect();
            let agents: BTreeSet<usize> = lifted.iter().filter_map(|&x| owner[x]).collect();
            for a in agents {
                let agent = inst.agents()[a];
                lifted.insert(gi.vertex(agent.start, 0));
                lifted.insert(gi.vertex(agent.target, ell));
            }
            lifted.into_iter().collect()
        })
        .collect();
    let lifted = TreeDecomposition { bags, parent: td.parent.clone() };
    debug_assert!(lifted.is_valid_decomposition(gi.vertex_count(), (0..gi.pair_count()).map(|p| gi.pair(p))));
    Ok(lifted)
}
