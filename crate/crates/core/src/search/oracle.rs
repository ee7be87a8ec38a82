//! Ground-truth solver: iterative deepening over raw joint moves.
//!
//! Shares no successor logic with the BFS. Joint moves are the full
//! cartesian product of closed neighborhoods, filtered by pairwise collision
//! and swap checks and a flood fill over an explicit power graph. The only
//! pruning is "not already on the current path" and "every agent can still
//! reach its target in the remaining depth".

use super::{Infeasibility, Outcome};
use crate::graph::{bfs_distances, power_graph, Graph, Vertex, UNREACHABLE};
use crate::model::{Configuration, Instance, Schedule};

pub fn oracle_solve(inst: &Instance, node_budget: Option<u64>) -> Outcome<Schedule> {
    let g = inst.graph();
    let comm = power_graph(g, inst.d());
    let start: Vec<Vertex> = inst.agents().iter().map(|a| a.start).collect();
    let target: Vec<Vertex> = inst.agents().iter().map(|a| a.target).collect();
    if !flood_connected(&comm, &start) {
        return Outcome::Infeasible(Infeasibility::StartDisconnected);
    }
    let dist: Vec<Vec<usize>> = target.iter().map(|&t| bfs_distances(g, t, None)).collect();

    let mut search =
        Deepening { g, comm: &comm, target: &target, dist: &dist, budget: node_budget, nodes: 0, path: vec![start] };
    for limit in 0..=inst.ell() {
        match search.dfs(limit) {
            Step::Found => {
                let steps = search.path.iter().cloned().map(Configuration).collect();
                return Outcome::Feasible(Schedule::new(steps).expect("non-empty"));
            }
            Step::Budget => return Outcome::BudgetExceeded,
            Step::NotFound => {}
        }
    }
    Outcome::Infeasible(Infeasibility::Exhausted)
}

enum Step {
    Found,
    NotFound,
    Budget,
}

struct Deepening<'a> {
    g: &'a Graph,
    comm: &'a Graph,
    target: &'a [Vertex],
    dist: &'a [Vec<usize>],
    budget: Option<u64>,
    nodes: u64,
    path: Vec<Vec<Vertex>>,
}

impl Deepening<'_> {
    fn dfs(&mut self, remaining: usize) -> Step {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return Step::Budget;
        }
        let current = self.path.last().expect("path starts non-empty").clone();
        if current == self.target {
            return Step::Found;
        }
        if remaining == 0 {
            return Step::NotFound;
        }
        let choices: Vec<Vec<Vertex>> = current
            .iter()
            .enumerate()
            .map(|(a, &from)| {
                (0..self.g.n())
                    .filter(|&v| v == from || self.g.has_edge(from, v))
                    .filter(|&v| self.dist[a][v] != UNREACHABLE && self.dist[a][v] < remaining)
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            return Step::NotFound;
        }
        let k = current.len();
        let mut odometer = vec![0usize; k];
        loop {
            let next: Vec<Vertex> = (0..k).map(|a| choices[a][odometer[a]]).collect();
            if self.legal(&current, &next) && !self.path.contains(&next) {
                self.path.push(next);
                match self.dfs(remaining - 1) {
                    Step::NotFound => {
                        self.path.pop();
                    }
                    other => return other,
                }
            }
            // Advance the odometer; the last agent varies fastest.
            let mut a = k;
            loop {
                if a == 0 {
                    return Step::NotFound;
                }
                a -= 1;
                odometer[a] += 1;
                if odometer[a] < choices[a].len() {
                    break;
                }
                odometer[a] = 0;
            }
        }
    }

    fn legal(&self, prev: &[Vertex], next: &[Vertex]) -> bool {
        let k = next.len();
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                if next[a] == next[b] {
                    return false;
                }
                let exchanged = next[a] == prev[b] && next[b] == prev[a];
                if exchanged && self.g.has_edge(prev[a], prev[b]) {
                    return false;
                }
            }
        }
        flood_connected(self.comm, next)
    }
}

/// Connectivity of the subgraph of `comm` induced by `set`.
fn flood_connected(comm: &Graph, set: &[Vertex]) -> bool {
    let mut reached = vec![false; set.len()];
    reached[0] = true;
    let mut stack = vec![set[0]];
    while let Some(v) = stack.pop() {
        for (i, &w) in set.iter().enumerate() {
            if !reached[i] && comm.has_edge(v, w) {
                reached[i] = true;
                stack.push(w);
            }
        }
    }
    reached.iter().all(|&r| r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_agent_walk() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 2)], 1, 2).unwrap();
        let s = oracle_solve(&inst, None).feasible().unwrap();
        assert_eq!(s.makespan(), 2);
    }

    #[test]
    fn swap_only_route_is_infeasible() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 1), (1, 0)], 1, 10).unwrap();
        assert_eq!(oracle_solve(&inst, None), Outcome::Infeasible(Infeasibility::Exhausted));
    }

    #[test]
    fn budget_is_reported() {
        let inst = Instance::from_pairs(Graph::grid(3, 3), &[(0, 8), (1, 7)], 1, 8).unwrap();
        assert_eq!(oracle_solve(&inst, Some(3)), Outcome::BudgetExceeded);
    }
}
