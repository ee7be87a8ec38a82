//! Degree reduction for tree instances.
//!
//! For a hub `u` of degree above `3k`, only the neighbors of `u` that lie on
//! the tree path from some start to `u` or from `u` to some target matter
//! (`V_u`, at most `2k` of them). The component `T_u` of `u` after deleting
//! `V_u` can be cut back to `u` plus `k` leaf neighbors without changing the
//! answer. Repeating this until no vertex exceeds degree `3k` leaves a tree
//! small enough for configuration search.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Graph, Vertex, UNREACHABLE};
use crate::model::{validate_schedule, Agent, Instance, ModelError, Violation};
use crate::search::{solve_bfs, Outcome, SearchOptions, SearchResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("input graph is not a tree; use the general configuration search instead")]
    NotATree,
    #[error("vertex {vertex} has degree {degree}, which does not exceed 3k = {bound}")]
    DegreeWithinBound { vertex: Vertex, degree: usize, bound: usize },
    #[error("vertex {0} is not in the tree")]
    NoSuchVertex(Vertex),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("schedule from the pruned tree fails on the original tree: {0:?}")]
    LiftRejected(Vec<Violation>),
}

/// One pruning step, in the vertex ids of the tree it was applied to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneStep {
    pub hub: Vertex,
    pub removed: Vec<Vertex>,
    pub kept_neighbors: Vec<Vertex>,
}

/// Every step of an exhaustive prune, in ORIGINAL vertex ids, plus the
/// pruned-to-original id map (ascending, so relabeling preserves order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneTrace {
    pub steps: Vec<PruneStep>,
    pub kept: Vec<Vertex>,
}

#[derive(Debug, Clone)]
pub struct Pruned {
    pub tree: Graph,
    pub step: PruneStep,
    /// New-to-old id map for `tree`.
    pub kept: Vec<Vertex>,
}

fn check_tree(tree: &Graph) -> Result<(), TreeError> {
    if tree.is_tree() {
        Ok(())
    } else {
        Err(TreeError::NotATree)
    }
}

/// For every vertex, the neighbor of `u` through which it is reached from
/// `u` (`UNREACHABLE` for `u` itself).
fn branches(tree: &Graph, u: Vertex) -> Vec<Vertex> {
    let mut branch = vec![UNREACHABLE; tree.n()];
    let mut queue = VecDeque::new();
    for &w in tree.neighbors(u) {
        branch[w] = w;
        queue.push_back(w);
    }
    while let Some(v) = queue.pop_front() {
        for &w in tree.neighbors(v) {
            if w != u && branch[w] == UNREACHABLE {
                branch[w] = branch[v];
                queue.push_back(w);
            }
        }
    }
    branch
}

/// `V_u`: neighbors of `u` on a tree path between `u` and some agent's start
/// or target. Ascending.
pub fn relevant_neighbors(tree: &Graph, inst: &Instance, u: Vertex) -> Result<Vec<Vertex>, TreeError> {
    check_tree(tree)?;
    if u >= tree.n() {
        return Err(TreeError::NoSuchVertex(u));
    }
    let branch = branches(tree, u);
    let mut out: Vec<Vertex> =
        inst.agents().iter().flat_map(|a| [a.start, a.target]).filter(|&x| x != u).map(|x| branch[x]).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Cuts `T_u` back to `u` and its `k` lowest-id neighbors inside `T_u`.
pub fn prune_once(tree: &Graph, inst: &Instance, u: Vertex) -> Result<Pruned, TreeError> {
    check_tree(tree)?;
    if u >= tree.n() {
        return Err(TreeError::NoSuchVertex(u));
    }
    let bound = 3 * inst.k();
    if tree.degree(u) <= bound {
        return Err(TreeError::DegreeWithinBound { vertex: u, degree: tree.degree(u), bound });
    }
    let relevant = relevant_neighbors(tree, inst, u)?;
    let branch = branches(tree, u);
    let kept_neighbors: Vec<Vertex> =
        tree.neighbors(u).iter().copied().filter(|w| relevant.binary_search(w).is_err()).take(inst.k()).collect();
    let removed: Vec<Vertex> = (0..tree.n())
        .filter(|&v| v != u && relevant.binary_search(&branch[v]).is_err())
        .filter(|v| !kept_neighbors.contains(v))
        .collect();
    let kept: Vec<Vertex> = (0..tree.n()).filter(|v| removed.binary_search(v).is_err()).collect();
    let (pruned, kept) = tree.induced_subgraph(&kept);
    let step = PruneStep { hub: u, removed, kept_neighbors };
    Ok(Pruned { tree: pruned, step, kept })
}

/// Re-expresses `inst` on a subgraph given by a new-to-old id map.
fn restrict(inst: &Instance, sub: Graph, kept: &[Vertex]) -> Result<Instance, TreeError> {
    let mut new_id = vec![UNREACHABLE; inst.graph().n()];
    for (i, &v) in kept.iter().enumerate() {
        new_id[v] = i;
    }
    let agents = inst.agents().iter().map(|a| Agent { start: new_id[a.start], target: new_id[a.target] }).collect();
    Ok(Instance::new(sub, agents, inst.d(), inst.ell())?)
}

/// Applies [`prune_once`] to the lowest-id vertex of degree above `3k` until
/// none remains.
pub fn prune(tree: &Graph, inst: &Instance) -> Result<(Graph, PruneTrace), TreeError> {
    check_tree(tree)?;
    let bound = 3 * inst.k();
    let mut current = tree.clone();
    let mut current_inst = Instance::new(tree.clone(), inst.agents().to_vec(), inst.d(), inst.ell())?;
    let mut to_original: Vec<Vertex> = (0..tree.n()).collect();
    let mut steps = Vec::new();
    while let Some(hub) = (0..current.n()).find(|&v| current.degree(v) > bound) {
        let Pruned { tree: next, step, kept } = prune_once(&current, &current_inst, hub)?;
        steps.push(PruneStep {
            hub: to_original[step.hub],
            removed: step.removed.iter().map(|&v| to_original[v]).collect(),
            kept_neighbors: step.kept_neighbors.iter().map(|&v| to_original[v]).collect(),
        });
        current_inst = restrict(&current_inst, next.clone(), &kept)?;
        to_original = kept.iter().map(|&v| to_original[v]).collect();
        current = next;
    }
    assert!(current.max_degree() <= bound, "pruned tree must have max degree <= 3k");
    Ok((current, PruneTrace { steps, kept: to_original }))
}

#[derive(Debug, Clone)]
pub struct TreeSolve {
    /// Result on the original tree (schedule already mapped back).
    pub result: SearchResult,
    pub pruned: Instance,
    pub trace: PruneTrace,
}

/// Prunes the tree and runs configuration search on the pruned instance.
///
/// For `d = 1` the pruning argument needs `ell` to be the optimal makespan;
/// the search always returns a minimum-makespan schedule, which is what
/// makes the decision valid for every budget.
pub fn solve_tree(inst: &Instance, opts: &SearchOptions) -> Result<TreeSolve, TreeError> {
    let (pruned_tree, trace) = prune(inst.graph(), inst)?;
    let pruned = restrict(inst, pruned_tree, &trace.kept)?;
    let SearchResult { outcome, stats } = solve_bfs(&pruned, opts);
    let outcome = match outcome {
        Outcome::Feasible(s) => {
            let lifted = s.map_vertices(&trace.kept);
            let report = validate_schedule(inst, &lifted)?;
            if !report.accepted() {
                return Err(TreeError::LiftRejected(report.violations));
            }
            Outcome::Feasible(lifted)
        }
        other => other,
    };
    Ok(TreeSolve { result: SearchResult { outcome, stats }, pruned, trace })
}
