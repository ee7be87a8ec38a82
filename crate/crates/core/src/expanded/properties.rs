//! The eight set conditions on `(S, X_0..X_ell)` that characterize a
//! solution, evaluated directly on the structure of `G_I`.
//!
//! Readings that differ from a word-for-word transcription:
//! - (4) also asks that every endpoint vertex touches an agent edge.
//!   Without it, `S` may contain extra paths whose vertices act as relays
//!   for (8), and the characterization breaks.
//! - (4) and (6) for `ell = 0`: a path is a single vertex, so endpoints have
//!   S-degree 0 and an agent loop `s(a)_0 = t(a)_0` is satisfied by its
//!   vertex lying in `X_0` (for `ell >= 1` the path through S forces this
//!   via (5); with S empty nothing else would).
//! - (7) orients the two edges: `u1, u2` in layer `i-1`, `v1, v2` in layer
//!   `i`, `u1 != u2`. Unoriented, a single copy edge (or an agent resting
//!   over three layers) already matches the forbidden pattern.
//! - (8) treats the empty and singleton sets as connected.

use std::collections::BTreeSet;

use super::{EdgeLabel, EdgeRef, TimeExpandedGraph};
use crate::dsu::UnionFind;
use crate::model::is_d_connected;

pub const PROPERTY_COUNT: usize = 8;

pub fn check_properties(
    gi: &TimeExpandedGraph,
    s: &BTreeSet<EdgeRef>,
    x: &[BTreeSet<usize>],
    d: usize,
) -> [bool; PROPERTY_COUNT] {
    let ell = gi.ell();
    let total = gi.vertex_count();
    assert_eq!(x.len(), ell + 1, "one X set per layer");
    assert!(s.iter().all(|&e| gi.contains(e)), "S must be a set of edges of G_I");
    assert!(x.iter().flatten().all(|&v| v < total), "X sets must hold vertices of G_I");

    let mut deg = vec![0usize; total];
    let mut s_adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for &e in s {
        let (a, b) = gi.pair(e.pair);
        deg[a] += 1;
        if a != b {
            deg[b] += 1;
            s_adj[a].push(b);
            s_adj[b].push(a);
        }
    }
    let in_x = |i: usize, v: usize| x.get(i).is_some_and(|set| set.contains(&v));

    let p1 = x.iter().enumerate().all(|(i, set)| set.iter().all(|&v| gi.layer(v) == i));

    let p2 = s.iter().all(|e| matches!(e.label, EdgeLabel::Copy | EdgeLabel::Cross));

    let p3 = (1..ell).all(|i| {
        x[i].iter().all(|&v| {
            deg[v] == 2 && s_adj[v].iter().any(|&u| in_x(i - 1, u)) && s_adj[v].iter().any(|&w| in_x(i + 1, w))
        })
    });

    let end_degree = ell.min(1);
    let touches_agent_edge = |v: usize| gi.incident(v).any(|e| e.label == EdgeLabel::Agent);
    let p4 = x[0].iter().chain(x[ell].iter()).all(|&v| deg[v] == end_degree && touches_agent_edge(v));

    let covered: BTreeSet<usize> = x.iter().flatten().copied().collect();
    let p5 = (0..total).all(|v| covered.contains(&v) || deg[v] == 0);

    // A subset T with odd degree exactly at the two endpoints and degree at
    // most two elsewhere exists iff the endpoints are joined by a path in S.
    let mut uf = UnionFind::new(total);
    for &e in s {
        let (a, b) = gi.pair(e.pair);
        uf.union(a, b);
    }
    let p6 = gi.edges().filter(|e| e.label == EdgeLabel::Agent).all(|e| {
        let (a, b) = gi.pair(e.pair);
        if a == b {
            x[0].contains(&a)
        } else {
            uf.same(a, b)
        }
    });

    let p7 = !s.iter().any(|&e1| {
        let Some((u1, v1)) = rising(gi, e1) else {
            return false;
        };
        s.iter().any(|&e2| {
            let Some((u2, v2)) = rising(gi, e2) else {
                return false;
            };
            u1 != u2
                && gi.layer(u1) == gi.layer(u2)
                && gi.joined(u1, v2, EdgeLabel::Copy)
                && gi.joined(u2, v1, EdgeLabel::Copy)
        })
    });

    let p8 = x.iter().all(|set| layer_set_connected(gi, set, d));

    [p1, p2, p3, p4, p5, p6, p7, p8]
}

/// Endpoints of `e` ordered lower layer first, if they lie in consecutive
/// layers.
fn rising(gi: &TimeExpandedGraph, e: EdgeRef) -> Option<(usize, usize)> {
    let (a, b) = gi.pair(e.pair);
    let (la, lb) = (gi.layer(a), gi.layer(b));
    if lb == la + 1 {
        Some((a, b))
    } else if la == lb + 1 {
        Some((b, a))
    } else {
        None
    }
}

/// Communication edges never leave a layer, so a set spread over several
/// layers is disconnected; within one layer the distances are those of `G`.
fn layer_set_connected(gi: &TimeExpandedGraph, set: &BTreeSet<usize>, d: usize) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let layer = gi.layer(*set.first().expect("non-empty"));
    if set.iter().any(|&v| gi.layer(v) != layer) || d == 0 {
        return false;
    }
    let bases: Vec<usize> = set.iter().map(|&v| gi.base(v)).collect();
    is_d_connected(gi.instance().graph(), d, &bases).expect("non-empty set, positive range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expanded::{build_time_expanded, schedule_to_paths, PathsWitness};
    use crate::graph::Graph;
    use crate::model::Instance;
    use crate::search::{solve_bfs, SearchOptions};

    fn witness(inst: &Instance) -> (TimeExpandedGraph, PathsWitness) {
        let gi = build_time_expanded(inst);
        let s = solve_bfs(inst, &SearchOptions::default()).outcome.feasible().unwrap();
        let w = schedule_to_paths(&gi, &s).unwrap();
        (gi, w)
    }

    #[test]
    fn valid_witness_satisfies_everything() {
        let inst = Instance::from_pairs(Graph::grid(3, 2), &[(0, 2), (3, 5)], 1, 4).unwrap();
        let (gi, w) = witness(&inst);
        let a = w.assignment(&gi);
        assert_eq!(check_properties(&gi, &a.s, &a.x, 1), [true; 8]);
    }

    #[test]
    fn dropping_an_inner_vertex_breaks_three_and_five() {
        let inst = Instance::from_pairs(Graph::path(4), &[(0, 3)], 1, 3).unwrap();
        let (gi, w) = witness(&inst);
        let mut a = w.assignment(&gi);
        let v = *a.x[1].first().unwrap();
        a.x[1].remove(&v);
        let p = check_properties(&gi, &a.s, &a.x, 1);
        assert!(!p[2] && !p[4], "{p:?}");
    }

    #[test]
    fn one_edge_swap_breaks_seven() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 1), (1, 0)], 1, 1).unwrap();
        let gi = build_time_expanded(&inst);
        let w = PathsWitness { paths: vec![vec![0, 3], vec![1, 2]] };
        let a = w.assignment(&gi);
        assert_eq!(check_properties(&gi, &a.s, &a.x, 1), [true, true, true, true, true, true, false, true]);
    }

    #[test]
    fn resting_agent_is_not_a_swap() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 0)], 1, 3).unwrap();
        let gi = build_time_expanded(&inst);
        let w = PathsWitness { paths: vec![vec![0, 2, 4, 6]] };
        let a = w.assignment(&gi);
        assert_eq!(check_properties(&gi, &a.s, &a.x, 1), [true; 8]);
    }

    #[test]
    fn ghost_path_is_rejected() {
        // Agents 0->0 and 3->3 on a path of five vertices are 3 apart; a
        // third path resting on vertex 1 or 2 would bridge them for d = 2.
        let inst = Instance::from_pairs(Graph::path(5), &[(0, 0), (3, 3)], 2, 1).unwrap();
        let gi = build_time_expanded(&inst);
        let real = PathsWitness { paths: vec![vec![0, 5], vec![3, 8]] };
        let a = real.assignment(&gi);
        assert!(!check_properties(&gi, &a.s, &a.x, 2)[7]);
        let ghost = PathsWitness { paths: vec![vec![0, 5], vec![3, 8], vec![1, 6]] };
        let a = ghost.assignment(&gi);
        let p = check_properties(&gi, &a.s, &a.x, 2);
        assert!(p[7], "the ghost relays layer connectivity");
        assert!(!p[3], "endpoint condition must reject the ghost");
    }

    #[test]
    fn zero_budget_loops() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 0), (1, 1)], 1, 0).unwrap();
        let gi = build_time_expanded(&inst);
        let x = vec![BTreeSet::from([0, 1])];
        assert_eq!(check_properties(&gi, &BTreeSet::new(), &x, 1), [true; 8]);
        let partial = vec![BTreeSet::from([0])];
        assert!(!check_properties(&gi, &BTreeSet::new(), &partial, 1)[5]);
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 1)], 1, 0).unwrap();
        let gi = build_time_expanded(&inst);
        let x = vec![BTreeSet::from([0])];
        assert!(!check_properties(&gi, &BTreeSet::new(), &x, 1)[5]);
    }
}
