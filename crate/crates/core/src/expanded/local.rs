//! Solving inside a ball around the first agent.
//!
//! Every agent stays within `(k-1)d` of the first agent, which moves at most
//! `ell`, so a solution never leaves `N^{kd+ell}[s(a_1)]`, and distances up
//! to `d` between agent positions are the same inside the ball as in `G`.

use super::{build_time_expanded, paths_to_schedule, solve_disjoint_paths};
use crate::graph::{bfs_distances, Graph, Vertex, UNREACHABLE};
use crate::model::{validate_schedule, Agent, Instance, Schedule};
use crate::search::{solve_bfs, Infeasibility, Outcome, SearchOptions, SearchStats};

/// Subgraph induced by the vertices within `radius` of `center`, with the
/// (ascending) new-to-old id map.
pub fn extract_ball(g: &Graph, center: Vertex, radius: usize) -> (Graph, Vec<Vertex>) {
    let dist = bfs_distances(g, center, Some(radius));
    let inside: Vec<Vertex> = (0..g.n()).filter(|&v| dist[v] != UNREACHABLE).collect();
    g.induced_subgraph(&inside)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalSolver {
    #[default]
    Bfs,
    DisjointPaths,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSolve {
    pub outcome: Outcome<Schedule>,
    pub stats: SearchStats,
    pub radius: usize,
    /// Vertices of the ball, in original ids.
    pub ball: Vec<Vertex>,
}

pub fn solve_local(inst: &Instance, solver: LocalSolver, opts: &SearchOptions) -> LocalSolve {
    let radius = inst.k() * inst.d() + inst.ell();
    let (sub, ball) = extract_ball(inst.graph(), inst.agents()[0].start, radius);
    let mut new_id = vec![UNREACHABLE; inst.graph().n()];
    for (i, &v) in ball.iter().enumerate() {
        new_id[v] = i;
    }
    let finish = |outcome, stats| LocalSolve { outcome, stats, radius, ball: ball.clone() };

    // A start outside the ball means the start is not d-connected; a target
    // outside it is farther than ell from its own start.
    if inst.agents().iter().any(|a| new_id[a.start] == UNREACHABLE) {
        return finish(Outcome::Infeasible(Infeasibility::StartDisconnected), SearchStats::default());
    }
    if inst.agents().iter().any(|a| new_id[a.target] == UNREACHABLE) {
        return finish(Outcome::Infeasible(Infeasibility::TargetOutOfReach), SearchStats::default());
    }
    let agents = inst.agents().iter().map(|a| Agent { start: new_id[a.start], target: new_id[a.target] });
    let local = Instance::new(sub, agents.collect(), inst.d(), inst.ell())
        .expect("translation keeps starts and targets distinct");

    let (outcome, stats) = match solver {
        LocalSolver::Bfs => {
            let r = solve_bfs(&local, opts);
            (r.outcome, r.stats)
        }
        LocalSolver::DisjointPaths => {
            let r = solve_disjoint_paths(&local, opts);
            let gi = build_time_expanded(&local);
            let outcome = r.outcome.map(|w| paths_to_schedule(&gi, &w).expect("solver witnesses are valid").trimmed());
            (outcome, r.stats)
        }
    };
    let outcome = outcome.map(|s| {
        let lifted = s.map_vertices(&ball);
        let report = validate_schedule(inst, &lifted).expect("well-formed schedule");
        assert!(report.accepted(), "schedule found in the ball must be valid in G");
        lifted
    });
    finish(outcome, stats)
}
