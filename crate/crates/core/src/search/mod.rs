//! Exact search over the configuration network: one node per injective,
//! d-connected placement, one arc per legal one-turn transition.
//!
//! The network is never materialized. [`solve_bfs`] generates successors
//! lazily and stops at the first level that contains the target placement,
//! so the schedule it returns has minimum makespan.

mod connected_sets;
mod oracle;

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

pub use connected_sets::count_connected_sets;
pub use oracle::oracle_solve;

use crate::graph::{Graph, RangeMatrix, Vertex, UNREACHABLE};
use crate::model::{Configuration, Instance, Schedule};

/// Environment variable consulted by front ends for a default node budget.
pub const NODE_BUDGET_ENV: &str = "MAPFCC_NODE_BUDGET";

/// Canonical byte encoding of a configuration: big-endian vertex ids of a
/// fixed width, in agent order. Byte order therefore agrees with the
/// lexicographic order of position vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigKey(Box<[u8]>);

impl ConfigKey {
    /// Bytes per vertex id for a graph with `n` vertices.
    pub fn width_for(n: usize) -> usize {
        match n {
            0..=0x100 => 1,
            0x101..=0x1_0000 => 2,
            0x1_0001..=0x100_0000 => 3,
            _ => 4,
        }
    }

    pub fn encode(positions: &[Vertex], width: usize) -> Self {
        let mut bytes = Vec::with_capacity(positions.len() * width);
        for &v in positions {
            let be = (v as u32).to_be_bytes();
            bytes.extend_from_slice(&be[4 - width..]);
        }
        ConfigKey(bytes.into_boxed_slice())
    }

    pub fn decode(&self, width: usize) -> Configuration {
        let positions =
            self.0.chunks(width).map(|chunk| chunk.iter().fold(0usize, |acc, &b| acc << 8 | b as usize)).collect();
        Configuration(positions)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded_nodes: u64,
    pub generated_nodes: u64,
    pub max_frontier: u64,
    /// Number of connected vertex sets of size `min(k*d, n)` around the first
    /// agent's start, when requested.
    pub connected_set_estimate: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Upper bound on expanded nodes. Exceeding it yields
    /// [`Outcome::BudgetExceeded`].
    pub node_budget: Option<u64>,
    pub connected_set_estimate: bool,
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> Self {
        SearchOptions { node_budget: Some(budget), ..Default::default() }
    }
}

/// Why a solver answered "no".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// The start placement is not d-connected.
    StartDisconnected,
    /// Some agent's target lies farther than `ell` from its start.
    TargetOutOfReach,
    /// Exhaustive search found no schedule of makespan at most `ell`.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Feasible(T),
    Infeasible(Infeasibility),
    BudgetExceeded,
}

impl<T> Outcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }

    pub fn feasible(self) -> Option<T> {
        match self {
            Outcome::Feasible(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_feasible(&self) -> Option<&T> {
        match self {
            Outcome::Feasible(t) => Some(t),
            _ => None,
        }
    }

    /// `Some(answer)` unless the budget ran out.
    pub fn decision(&self) -> Option<bool> {
        match self {
            Outcome::Feasible(_) => Some(true),
            Outcome::Infeasible(_) => Some(false),
            Outcome::BudgetExceeded => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Feasible(t) => Outcome::Feasible(f(t)),
            Outcome::Infeasible(r) => Outcome::Infeasible(r),
            Outcome::BudgetExceeded => Outcome::BudgetExceeded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: Outcome<Schedule>,
    pub stats: SearchStats,
}

/// Joint-move generator shared by [`successors`] and [`solve_bfs`].
///
/// Agents are assigned in index order by backtracking over closed
/// neighborhoods (ascending), with collision and swap checks as each agent is
/// placed and one d-connectivity check per complete joint move. Emission
/// order is therefore lexicographic in the position vector.
pub(crate) struct MoveGenerator<'a> {
    graph: &'a Graph,
    range: RangeMatrix,
    closed: Vec<Vec<Vertex>>,
    /// `[agent][vertex]` distance to the agent's target, for budget pruning.
    target_dist: Option<Vec<Vec<usize>>>,
}

impl<'a> MoveGenerator<'a> {
    pub(crate) fn new(inst: &'a Instance, prune_by_distance: bool) -> Self {
        let graph = inst.graph();
        MoveGenerator {
            graph,
            range: RangeMatrix::new(graph, inst.d()),
            closed: (0..graph.n()).map(|v| graph.closed_neighborhood(v)).collect(),
            target_dist: prune_by_distance.then(|| inst.target_distances()),
        }
    }

    /// Calls `emit` on every legal successor of `current`. When distance
    /// pruning is enabled, only placements from which every agent can still
    /// reach its target within `remaining` further turns are emitted.
    pub(crate) fn for_each(&self, current: &[Vertex], remaining: usize, emit: &mut dyn FnMut(&[Vertex])) {
        let k = current.len();
        let mut occupant = HashMap::with_capacity(k);
        for (a, &v) in current.iter().enumerate() {
            occupant.insert(v, a);
        }
        let mut next = vec![usize::MAX; k];
        let mut used: Vec<Vertex> = Vec::with_capacity(k);
        self.assign(current, &occupant, remaining, 0, &mut next, &mut used, emit);
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        current: &[Vertex],
        occupant: &HashMap<Vertex, usize>,
        remaining: usize,
        agent: usize,
        next: &mut Vec<Vertex>,
        used: &mut Vec<Vertex>,
        emit: &mut dyn FnMut(&[Vertex]),
    ) {
        if agent == current.len() {
            if self.range.connects(next) {
                debug_assert!(self.graph.n() > 0);
                emit(next);
            }
            return;
        }
        let from = current[agent];
        for &to in &self.closed[from] {
            if let Some(dist) = &self.target_dist {
                let d = dist[agent][to];
                if d == UNREACHABLE || d > remaining {
                    continue;
                }
            }
            if used.contains(&to) {
                continue;
            }
            // `to` was held by an earlier agent that moved onto our vertex.
            if to != from {
                if let Some(&other) = occupant.get(&to) {
                    if other < agent && next[other] == from {
                        continue;
                    }
                }
            }
            next[agent] = to;
            used.push(to);
            self.assign(current, occupant, remaining, agent + 1, next, used, emit);
            used.pop();
        }
        next[agent] = usize::MAX;
    }
}

/// All configurations reachable from `c` in one turn, in lexicographic order.
pub fn successors(inst: &Instance, c: &Configuration) -> Vec<Configuration> {
    let generator = MoveGenerator::new(inst, false);
    let mut out = Vec::new();
    generator.for_each(c.positions(), usize::MAX, &mut |next| {
        debug_assert!(emission_is_legal(inst, c.positions(), next));
        out.push(Configuration(next.to_vec()));
    });
    out
}

fn emission_is_legal(inst: &Instance, prev: &[Vertex], next: &[Vertex]) -> bool {
    let g = inst.graph();
    let injective = Configuration(next.to_vec()).is_injective();
    let moves = prev.iter().zip(next).all(|(&a, &b)| a == b || g.has_edge(a, b));
    let no_swap = (0..prev.len()).all(|a| (a + 1..prev.len()).all(|b| !(next[a] == prev[b] && next[b] == prev[a])));
    let connected = crate::model::is_d_connected(g, inst.d(), next).unwrap_or(false);
    injective && moves && no_swap && connected
}

/// Breadth-first search from the start placement to the target placement.
///
/// Returns a minimum-makespan schedule when that minimum is at most `ell`.
/// Ties among shortest schedules go to the first discoverer under the
/// deterministic successor order.
pub fn solve_bfs(inst: &Instance, opts: &SearchOptions) -> SearchResult {
    let mut stats = SearchStats {
        connected_set_estimate: opts.connected_set_estimate.then(|| connected_set_estimate(inst)),
        ..Default::default()
    };
    let start = inst.starts();
    let target = inst.targets();

    if !inst.start_is_connected() {
        return SearchResult { outcome: Outcome::Infeasible(Infeasibility::StartDisconnected), stats };
    }
    if start == target {
        return SearchResult { outcome: Outcome::Feasible(Schedule::new(vec![start]).expect("non-empty")), stats };
    }
    if inst.target_out_of_reach() {
        return SearchResult { outcome: Outcome::Infeasible(Infeasibility::TargetOutOfReach), stats };
    }

    let k = inst.k();
    let width = ConfigKey::width_for(inst.graph().n());
    let generator = MoveGenerator::new(inst, true);
    let target_key = ConfigKey::encode(target.positions(), width);

    // Arena of discovered nodes: positions flattened, parent index, depth.
    let mut positions: Vec<Vertex> = start.positions().to_vec();
    let mut parent: Vec<u32> = vec![u32::MAX];
    let mut depth: Vec<u32> = vec![0];
    let mut visited: HashMap<ConfigKey, u32> = HashMap::new();
    visited.insert(ConfigKey::encode(start.positions(), width), 0);
    let mut frontier = VecDeque::from([0u32]);
    stats.max_frontier = 1;

    while let Some(node) = frontier.pop_front() {
        let node_depth = depth[node as usize] as usize;
        if node_depth >= inst.ell() {
            continue;
        }
        if opts.node_budget.is_some_and(|b| stats.expanded_nodes >= b) {
            stats.max_frontier = stats.max_frontier.max(frontier.len() as u64 + 1);
            return SearchResult { outcome: Outcome::BudgetExceeded, stats };
        }
        stats.expanded_nodes += 1;
        let current: Vec<Vertex> = positions[node as usize * k..(node as usize + 1) * k].to_vec();
        let remaining = inst.ell() - node_depth - 1;
        let mut found = None;
        generator.for_each(&current, remaining, &mut |next| {
            if found.is_some() {
                return;
            }
            stats.generated_nodes += 1;
            let key = ConfigKey::encode(next, width);
            let is_target = key == target_key;
            if let Entry::Vacant(slot) = visited.entry(key) {
                let id = parent.len() as u32;
                slot.insert(id);
                positions.extend_from_slice(next);
                parent.push(node);
                depth.push(node_depth as u32 + 1);
                frontier.push_back(id);
                if is_target {
                    found = Some(id);
                }
            }
        });
        stats.max_frontier = stats.max_frontier.max(frontier.len() as u64);
        if let Some(goal) = found {
            let schedule = reconstruct(&positions, &parent, k, goal);
            return SearchResult { outcome: Outcome::Feasible(schedule), stats };
        }
    }
    SearchResult { outcome: Outcome::Infeasible(Infeasibility::Exhausted), stats }
}

fn reconstruct(positions: &[Vertex], parent: &[u32], k: usize, goal: u32) -> Schedule {
    let mut steps = Vec::new();
    let mut node = goal;
    loop {
        let i = node as usize;
        steps.push(Configuration(positions[i * k..(i + 1) * k].to_vec()));
        if parent[i] == u32::MAX {
            break;
        }
        node = parent[i];
    }
    steps.reverse();
    Schedule::new(steps).expect("non-empty")
}

fn connected_set_estimate(inst: &Instance) -> u64 {
    let g = inst.graph();
    let size = (inst.k() * inst.d()).min(g.n()).max(1);
    count_connected_sets(g, inst.agents()[0].start, size)
}
