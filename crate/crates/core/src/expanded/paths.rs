//! Exact search for the disjoint-paths witness, one layer at a time.
//!
//! All `k` paths are extended from layer `j` to `j + 1` together. A partial
//! extension is cut as soon as two paths meet (3, 5), two paths cross one
//! edge in opposite directions (7), or a path can no longer reach its
//! terminal `t(a)_ell` (6); the finished layer must be d-connected (8).
//! Makespans `0, 1, ..` are tried in turn, padding the paths with copy edges
//! at the targets, so the witness read as a schedule has minimum makespan.
//! Failed `(steps left, positions)` pairs are remembered across rounds.

use std::collections::HashSet;

use super::{build_time_expanded, lift_tree_decomposition, treewidth_upper_bound, PathsWitness, TimeExpandedGraph};
use crate::dsu::UnionFind;
use crate::graph::{bfs_distances, Graph, Vertex, UNREACHABLE};
use crate::model::Instance;
use crate::search::{Infeasibility, Outcome, SearchOptions, SearchStats};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathsResult {
    pub outcome: Outcome<PathsWitness>,
    pub stats: SearchStats,
}

pub fn solve_disjoint_paths(inst: &Instance, opts: &SearchOptions) -> PathsResult {
    let gi = build_time_expanded(inst);
    solve_on(&gi, opts)
}

fn solve_on(gi: &TimeExpandedGraph, opts: &SearchOptions) -> PathsResult {
    let inst = gi.instance();
    let g = inst.graph();
    let dist: Vec<Vec<usize>> = (0..g.n()).map(|v| bfs_distances(g, v, None)).collect();
    let mut search = Layered {
        gi,
        d: inst.d(),
        dist: &dist,
        targets: inst.agents().iter().map(|a| a.target).collect(),
        failed: HashSet::new(),
        budget: opts.node_budget,
        stats: SearchStats::default(),
    };
    let starts: Vec<Vertex> = inst.agents().iter().map(|a| a.start).collect();
    let done = |outcome, stats| PathsResult { outcome, stats };

    if !search.connected(&starts) {
        return done(Outcome::Infeasible(Infeasibility::StartDisconnected), search.stats);
    }
    let reach = |(a, &s): (usize, &Vertex)| dist[s][search.targets[a]];
    if starts.iter().enumerate().map(reach).any(|r| r == UNREACHABLE || r > gi.ell()) {
        return done(Outcome::Infeasible(Infeasibility::TargetOutOfReach), search.stats);
    }
    for makespan in 0..=gi.ell() {
        let mut layers = vec![starts.clone()];
        match search.extend(&mut layers, makespan) {
            Step::Found => {
                while layers.len() <= gi.ell() {
                    layers.push(search.targets.clone());
                }
                let paths =
                    (0..starts.len()).map(|a| (0..=gi.ell()).map(|i| gi.vertex(layers[i][a], i)).collect()).collect();
                return done(Outcome::Feasible(PathsWitness { paths }), search.stats);
            }
            Step::Budget => return done(Outcome::BudgetExceeded, search.stats),
            Step::NotFound => {}
        }
    }
    done(Outcome::Infeasible(Infeasibility::Exhausted), search.stats)
}

enum Step {
    Found,
    NotFound,
    Budget,
}

struct Layered<'a> {
    gi: &'a TimeExpandedGraph,
    d: usize,
    dist: &'a [Vec<usize>],
    targets: Vec<Vertex>,
    failed: HashSet<(usize, Vec<Vertex>)>,
    budget: Option<u64>,
    stats: SearchStats,
}

impl Layered<'_> {
    fn connected(&self, set: &[Vertex]) -> bool {
        let mut uf = UnionFind::new(set.len());
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                if self.dist[set[i]][set[j]] <= self.d {
                    uf.union(i, j);
                }
            }
        }
        uf.components() == 1
    }

    /// Extends the last layer until `left` more layers are placed.
    fn extend(&mut self, layers: &mut Vec<Vec<Vertex>>, left: usize) -> Step {
        let current = layers.last().expect("layer 0 present").clone();
        if left == 0 {
            return if current == self.targets { Step::Found } else { Step::NotFound };
        }
        if self.failed.contains(&(left, current.clone())) {
            return Step::NotFound;
        }
        self.stats.expanded_nodes += 1;
        if self.budget.is_some_and(|b| self.stats.expanded_nodes > b) {
            return Step::Budget;
        }
        self.stats.max_frontier = self.stats.max_frontier.max(layers.len() as u64);

        let layer = layers.len() - 1;
        let options: Vec<Vec<Vertex>> = current
            .iter()
            .enumerate()
            .map(|(a, &v)| {
                self.gi
                    .forward(self.gi.vertex(v, layer))
                    .into_iter()
                    .map(|y| self.gi.base(y))
                    .filter(|&w| self.dist[w][self.targets[a]] < left)
                    .collect()
            })
            .collect();
        let mut next = Vec::with_capacity(current.len());
        match self.place(layers, &current, &options, &mut next, left) {
            Step::NotFound => {
                self.failed.insert((left, current));
                Step::NotFound
            }
            other => other,
        }
    }

    fn place(
        &mut self,
        layers: &mut Vec<Vec<Vertex>>,
        current: &[Vertex],
        options: &[Vec<Vertex>],
        next: &mut Vec<Vertex>,
        left: usize,
    ) -> Step {
        let a = next.len();
        if a == current.len() {
            if !self.connected(next) {
                return Step::NotFound;
            }
            self.stats.generated_nodes += 1;
            layers.push(next.clone());
            let step = self.extend(layers, left - 1);
            if !matches!(step, Step::Found) {
                layers.pop();
            }
            return step;
        }
        for &w in &options[a] {
            let clash = (0..a).any(|b| next[b] == w || (w != current[a] && next[b] == current[a] && current[b] == w));
            if clash {
                continue;
            }
            next.push(w);
            let step = self.place(layers, current, options, next, left);
            next.pop();
            if !matches!(step, Step::NotFound) {
                return step;
            }
        }
        Step::NotFound
    }
}

#[derive(Debug, Clone)]
pub struct ExpandedSolve {
    pub result: PathsResult,
    /// Min-fill width of `G`.
    pub base_width: usize,
    /// `3 (ell + 1) (base_width + 1) - 1`.
    pub width_bound: usize,
    /// Min-fill width of `G_I` itself (agent edges included).
    pub expanded_width: usize,
    /// Width of the lifted decomposition, when a witness was found.
    pub lifted_width: Option<usize>,
}

impl ExpandedSolve {
    /// The width test that would reject the instance outright. Advisory:
    /// the heuristic may overestimate, so it never overrides the search.
    pub fn gate_exceeded(&self) -> bool {
        self.expanded_width > self.width_bound
    }
}

/// The treewidth pipeline: decompose `G`, build `G_I`, search for the
/// witness, and lift the decomposition along it.
pub fn solve_expanded(inst: &Instance, opts: &SearchOptions) -> ExpandedSolve {
    let gi = build_time_expanded(inst);
    let (base_width, td) = treewidth_upper_bound(inst.graph());
    let width_bound = 3 * (inst.ell() + 1) * (base_width + 1) - 1;
    let edges = (0..gi.pair_count()).map(|p| gi.pair(p)).filter(|(a, b)| a != b);
    let expanded = Graph::from_edges_unchecked(gi.vertex_count(), edges);
    let (expanded_width, _) = treewidth_upper_bound(&expanded);
    let result = solve_on(&gi, opts);
    let lifted_width = result
        .outcome
        .as_feasible()
        .map(|w| lift_tree_decomposition(&td, &gi, w).expect("solver witnesses are valid").width());
    ExpandedSolve { result, base_width, width_bound, expanded_width, lifted_width }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expanded::{check_properties, paths_to_schedule};
    use crate::model::validate_schedule;

    fn witness_ok(inst: &Instance) -> usize {
        let r = solve_disjoint_paths(inst, &SearchOptions::default());
        let w = r.outcome.feasible().expect("feasible");
        let gi = build_time_expanded(inst);
        let a = w.assignment(&gi);
        assert_eq!(check_properties(&gi, &a.s, &a.x, inst.d()), [true; 8]);
        let s = paths_to_schedule(&gi, &w).unwrap();
        assert!(validate_schedule(inst, &s).unwrap().accepted());
        s.trimmed().makespan()
    }

    #[test]
    fn short_walks() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 2)], 1, 4).unwrap();
        assert_eq!(witness_ok(&inst), 2);
        let inst = Instance::from_pairs(Graph::path(3), &[(1, 1)], 1, 2).unwrap();
        assert_eq!(witness_ok(&inst), 0);
    }

    #[test]
    fn convoy_on_a_cycle() {
        let inst = Instance::from_pairs(Graph::cycle(6), &[(0, 3), (1, 4)], 1, 4).unwrap();
        assert_eq!(witness_ok(&inst), 3);
    }

    #[test]
    fn swap_is_infeasible() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 1), (1, 0)], 1, 6).unwrap();
        let r = solve_disjoint_paths(&inst, &SearchOptions::default());
        assert_eq!(r.outcome, Outcome::Infeasible(Infeasibility::Exhausted));
    }

    #[test]
    fn early_rejections() {
        let inst = Instance::from_pairs(Graph::path(5), &[(0, 0), (4, 4)], 1, 3).unwrap();
        let r = solve_disjoint_paths(&inst, &SearchOptions::default());
        assert_eq!(r.outcome, Outcome::Infeasible(Infeasibility::StartDisconnected));
        let inst = Instance::from_pairs(Graph::path(5), &[(0, 4)], 1, 3).unwrap();
        let r = solve_disjoint_paths(&inst, &SearchOptions::default());
        assert_eq!(r.outcome, Outcome::Infeasible(Infeasibility::TargetOutOfReach));
    }

    #[test]
    fn budget_is_reported() {
        let inst = Instance::from_pairs(Graph::grid(3, 3), &[(0, 8), (1, 7)], 1, 8).unwrap();
        let r = solve_disjoint_paths(&inst, &SearchOptions::with_budget(2));
        assert_eq!(r.outcome, Outcome::BudgetExceeded);
    }

    #[test]
    fn pipeline_reports_widths() {
        let inst = Instance::from_pairs(Graph::path(4), &[(0, 3)], 1, 3).unwrap();
        let r = solve_expanded(&inst, &SearchOptions::default());
        assert_eq!(r.base_width, 1);
        assert_eq!(r.width_bound, 3 * 4 * 2 - 1);
        assert!(r.lifted_width.unwrap() <= r.width_bound);
        assert!(!r.gate_exceeded());
    }
}
