//! Seeded instance generators for tests and benchmarks.
//!
//! Every generator takes the RNG explicitly; callers seed a
//! [`rand_chacha::ChaCha8Rng`] so runs are reproducible.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{bfs_distances, Graph, Vertex, UNREACHABLE};
use crate::model::{Agent, Instance};

/// The RNG used by every seeded entry point.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random tree on `n` vertices. A few hubs attract most attachments, so
/// high-degree vertices (the interesting case for pruning) are common.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    assert!(n >= 1);
    let hubs = 1 + n / 12;
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let parent = if rng.gen_bool(0.6) { rng.gen_range(0..v.min(hubs)) } else { rng.gen_range(0..v) };
        edges.push((parent, v));
    }
    Graph::from_edges_unchecked(n, edges)
}

/// Random connected graph: a random tree plus `extra` further edges
/// (fewer if the graph becomes complete).
pub fn random_connected_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let tree = random_tree(n, rng);
    let mut edges: BTreeSet<(Vertex, Vertex)> = tree.edges().collect();
    let mut missing: Vec<(Vertex, Vertex)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|e| !edges.contains(e)).collect();
    missing.shuffle(rng);
    edges.extend(missing.into_iter().take(extra));
    Graph::from_edges_unchecked(n, edges)
}

/// `k` distinct vertices forming a d-connected set, grown one vertex at a
/// time from a random seed vertex. `None` if the component is too small.
pub fn connected_placement<R: Rng>(g: &Graph, k: usize, d: usize, rng: &mut R) -> Option<Vec<Vertex>> {
    let first = rng.gen_range(0..g.n());
    let mut chosen = vec![first];
    let mut near: BTreeSet<Vertex> = BTreeSet::new();
    let absorb = |v: Vertex, chosen: &[Vertex], near: &mut BTreeSet<Vertex>| {
        for (w, &dw) in bfs_distances(g, v, Some(d)).iter().enumerate() {
            if dw != UNREACHABLE && !chosen.contains(&w) {
                near.insert(w);
            }
        }
    };
    absorb(first, &chosen, &mut near);
    while chosen.len() < k {
        near.retain(|w| !chosen.contains(w));
        if near.is_empty() {
            return None;
        }
        let pool: Vec<Vertex> = near.iter().copied().collect();
        let v = pool[rng.gen_range(0..pool.len())];
        chosen.push(v);
        absorb(v, &chosen, &mut near);
    }
    Some(chosen)
}

/// Instance with d-connected starts and d-connected targets (each placed
/// independently), or `None` if no placement fits.
pub fn random_instance<R: Rng>(g: Graph, k: usize, d: usize, ell: usize, rng: &mut R) -> Option<Instance> {
    let starts = connected_placement(&g, k, d, rng)?;
    let targets = connected_placement(&g, k, d, rng)?;
    let agents = starts.into_iter().zip(targets).map(|(start, target)| Agent { start, target }).collect();
    Instance::new(g, agents, d, ell).ok()
}

/// Random instance whose starts are not required to be d-connected.
pub fn random_loose_instance<R: Rng>(g: Graph, k: usize, d: usize, ell: usize, rng: &mut R) -> Instance {
    assert!(k <= g.n());
    let mut vs: Vec<Vertex> = (0..g.n()).collect();
    vs.shuffle(rng);
    let starts = vs[..k].to_vec();
    vs.shuffle(rng);
    let agents = starts.into_iter().zip(vs).map(|(start, target)| Agent { start, target }).collect();
    Instance::new(g, agents, d, ell).expect("distinct placements")
}

/// Every connected graph on `n` vertices, one per isomorphism class, in a
/// fixed order (by canonical adjacency code).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=6).contains(&n), "exhaustive enumeration is for tiny n");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let g = Graph::from_edges_unchecked(n, edges.iter().copied());
        if !g.is_connected() {
            continue;
        }
        let code = perms
            .iter()
            .map(|p| {
                let mut relabeled: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                relabeled.sort_unstable();
                relabeled
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(code.clone()) {
            out.push(code);
        }
    }
    out.sort();
    out.into_iter().map(|edges| Graph::from_edges_unchecked(n, edges)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap(&mut p, n, &mut out);
    out
}

fn heap(p: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
    if m <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..m {
        heap(p, m - 1, out);
        let j = if m.is_multiple_of(2) { i } else { 0 };
        p.swap(j, m - 1);
    }
}

/// The four-lane ladder: a 4x4 vertex array (row-major ids) with every
/// row a path and only the two outer columns joined vertically.
pub fn ladder_graph() -> Graph {
    let mut edges = Vec::new();
    for row in 0..4 {
        for col in 0..3 {
            edges.push((4 * row + col, 4 * row + col + 1));
        }
    }
    for row in 0..3 {
        edges.push((4 * row, 4 * row + 4));
        edges.push((4 * row + 3, 4 * row + 7));
    }
    Graph::from_edges(16, edges).expect("valid ladder")
}

/// Four agents crossing the ladder from the left column to the right one.
pub fn ladder_instance(d: usize, ell: usize) -> Instance {
    Instance::from_pairs(ladder_graph(), &[(0, 3), (4, 7), (8, 11), (12, 15)], d, ell).expect("valid ladder instance")
}
