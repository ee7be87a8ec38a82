//! Problem model: instances, configurations, schedules and the feasibility
//! validator.
//!
//! A schedule `s_0, ..., s_mu` is feasible when
//! 1. every agent stays or moves to a neighbor each turn,
//! 2. no two agents share a vertex,
//! 3. the occupied set is d-connected at every turn `1..=mu`,
//! 4. the last configuration places every agent on its target,
//!
//! and no two adjacent agents exchange positions within one turn.

use std::fmt;

use thiserror::Error;

use crate::dsu::UnionFind;
use crate::graph::{bfs_distances, Graph, GraphError, RangeMatrix, Vertex, UNREACHABLE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("communication range must be at least 1")]
    ZeroRange,
    #[error("duplicate start: agents {0} and {1} both start on vertex {2}")]
    DuplicateStart(usize, usize, Vertex),
    #[error("duplicate target: agents {0} and {1} both target vertex {2}")]
    DuplicateTarget(usize, usize, Vertex),
    #[error("d-connectivity of an empty vertex set is undefined")]
    EmptySet,
    #[error("turn {turn} has {found} agents, instance has {expected}")]
    AgentCountMismatch { turn: usize, expected: usize, found: usize },
    #[error("schedule has no configurations")]
    EmptySchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Agent {
    pub start: Vertex,
    pub target: Vertex,
}

/// `<G, agents, d, ell>`. Immutable once built; [`Instance::new`] enforces
/// distinct starts, distinct targets and in-range ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    agents: Vec<Agent>,
    d: usize,
    ell: usize,
}

impl Instance {
    pub fn new(graph: Graph, agents: Vec<Agent>, d: usize, ell: usize) -> Result<Self, ModelError> {
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if d == 0 {
            return Err(ModelError::ZeroRange);
        }
        let n = graph.n();
        let mut start_of = vec![usize::MAX; n];
        let mut target_of = vec![usize::MAX; n];
        for (i, a) in agents.iter().enumerate() {
            for v in [a.start, a.target] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
                }
            }
            if start_of[a.start] != usize::MAX {
                return Err(ModelError::DuplicateStart(start_of[a.start], i, a.start));
            }
            start_of[a.start] = i;
            if target_of[a.target] != usize::MAX {
                return Err(ModelError::DuplicateTarget(target_of[a.target], i, a.target));
            }
            target_of[a.target] = i;
        }
        Ok(Instance { graph, agents, d, ell })
    }

    /// Convenience constructor from `(start, target)` pairs.
    pub fn from_pairs(graph: Graph, pairs: &[(Vertex, Vertex)], d: usize, ell: usize) -> Result<Self, ModelError> {
        let agents = pairs.iter().map(|&(start, target)| Agent { start, target }).collect();
        Self::new(graph, agents, d, ell)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn k(&self) -> usize {
        self.agents.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn starts(&self) -> Configuration {
        Configuration(self.agents.iter().map(|a| a.start).collect())
    }

    pub fn targets(&self) -> Configuration {
        Configuration(self.agents.iter().map(|a| a.target).collect())
    }

    /// Same graph and agents with a different makespan budget.
    pub fn with_ell(&self, ell: usize) -> Instance {
        Instance { ell, ..self.clone() }
    }

    pub fn with_d(&self, d: usize) -> Result<Instance, ModelError> {
        if d == 0 {
            return Err(ModelError::ZeroRange);
        }
        Ok(Instance { d, ..self.clone() })
    }

    /// Whether the start placement is d-connected. Solvers treat instances
    /// failing this as infeasible.
    pub fn start_is_connected(&self) -> bool {
        RangeMatrix::new(&self.graph, self.d).connects(&self.starts().0)
    }

    /// BFS distance from every vertex to each agent's target, indexed
    /// `[agent][vertex]`.
    pub fn target_distances(&self) -> Vec<Vec<usize>> {
        self.agents.iter().map(|a| bfs_distances(&self.graph, a.target, None)).collect()
    }

    /// True if some agent cannot reach its target within `ell` moves even
    /// ignoring every other agent.
    pub fn target_out_of_reach(&self) -> bool {
        self.target_distances()
            .iter()
            .zip(&self.agents)
            .any(|(dist, a)| dist[a.start] == UNREACHABLE || dist[a.start] > self.ell)
    }
}

/// Agent-indexed placement `s_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(pub Vec<Vertex>);

impl Configuration {
    pub fn positions(&self) -> &[Vertex] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_injective(&self) -> bool {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// `{s_i(a) | a in A}`, ascending.
    pub fn occupied_set(&self) -> Vec<Vertex> {
        let mut set = self.0.clone();
        set.sort_unstable();
        set.dedup();
        set
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `s_0, ..., s_mu`; the makespan is `steps.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    steps: Vec<Configuration>,
}

impl Schedule {
    pub fn new(steps: Vec<Configuration>) -> Result<Self, ModelError> {
        let Some(first) = steps.first() else {
            return Err(ModelError::EmptySchedule);
        };
        let k = first.k();
        if let Some((turn, c)) = steps.iter().enumerate().find(|(_, c)| c.k() != k) {
            return Err(ModelError::AgentCountMismatch { turn, expected: k, found: c.k() });
        }
        Ok(Schedule { steps })
    }

    pub fn steps(&self) -> &[Configuration] {
        &self.steps
    }

    pub fn makespan(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn k(&self) -> usize {
        self.steps[0].k()
    }

    /// Extends the schedule to `makespan` turns by repeating the last
    /// configuration.
    pub fn padded(&self, makespan: usize) -> Schedule {
        let mut steps = self.steps.clone();
        while steps.len() < makespan + 1 {
            steps.push(steps.last().expect("non-empty").clone());
        }
        Schedule { steps }
    }

    /// Drops trailing turns in which nobody moved.
    pub fn trimmed(&self) -> Schedule {
        let mut steps = self.steps.clone();
        while steps.len() >= 2 && steps[steps.len() - 1] == steps[steps.len() - 2] {
            steps.pop();
        }
        Schedule { steps }
    }

    /// Rewrites every vertex id through `map`.
    pub fn map_vertices(&self, map: &[Vertex]) -> Schedule {
        let steps = self.steps.iter().map(|c| Configuration(c.0.iter().map(|&v| map[v]).collect())).collect();
        Schedule { steps }
    }
}

/// Connectivity of `set` in the d-th power of `g`.
///
/// Pairs of `set` within distance `d` are found by a truncated BFS from each
/// member and merged in a union-find.
pub fn is_d_connected(g: &Graph, d: usize, set: &[Vertex]) -> Result<bool, ModelError> {
    if set.is_empty() {
        return Err(ModelError::EmptySet);
    }
    if d == 0 {
        return Err(ModelError::ZeroRange);
    }
    let n = g.n();
    let mut index = vec![usize::MAX; n];
    let mut members = Vec::with_capacity(set.len());
    for &v in set {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
        }
        if index[v] == usize::MAX {
            index[v] = members.len();
            members.push(v);
        }
    }
    let mut uf = UnionFind::new(members.len());
    for (i, &w) in members.iter().enumerate() {
        let dist = bfs_distances(g, w, Some(d));
        for (j, &u) in members.iter().enumerate().skip(i + 1) {
            if dist[u] != UNREACHABLE {
                uf.union(i, j);
            }
        }
    }
    Ok(uf.components() == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    NonMove,
    Collision,
    Disconnected,
    Swap,
    WrongTarget,
    WrongStart,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::NonMove => "NonMove",
            ViolationKind::Collision => "Collision",
            ViolationKind::Disconnected => "Disconnected",
            ViolationKind::Swap => "Swap",
            ViolationKind::WrongTarget => "WrongTarget",
            ViolationKind::WrongStart => "WrongStart",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub turn: usize,
    pub kind: ViolationKind,
    pub agents: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "turn {}: {} (agents", self.turn, self.kind)?;
        for a in &self.agents {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationWarning {
    /// `s_0` is not d-connected. Condition 3 only constrains turns `1..=mu`,
    /// so this does not make the schedule invalid.
    InitialDisconnected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<ValidationWarning>,
    pub within_budget: bool,
    pub makespan: usize,
}

impl ValidationReport {
    fn from_parts(violations: Vec<Violation>, warnings: Vec<ValidationWarning>, makespan: usize, ell: usize) -> Self {
        ValidationReport { ok: violations.is_empty(), violations, warnings, within_budget: makespan <= ell, makespan }
    }

    /// Feasible and no longer than the instance budget.
    pub fn accepted(&self) -> bool {
        self.ok && self.within_budget
    }
}

pub fn validate_schedule(inst: &Instance, sched: &Schedule) -> Result<ValidationReport, ModelError> {
    let k = inst.k();
    let n = inst.graph().n();
    for (turn, c) in sched.steps().iter().enumerate() {
        if c.k() != k {
            return Err(ModelError::AgentCountMismatch { turn, expected: k, found: c.k() });
        }
        if let Some(&v) = c.0.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
        }
    }
    let g = inst.graph();
    let steps = sched.steps();
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let wrong_start: Vec<usize> = (0..k).filter(|&a| steps[0].0[a] != inst.agents()[a].start).collect();
    if !wrong_start.is_empty() {
        violations.push(Violation { turn: 0, kind: ViolationKind::WrongStart, agents: wrong_start });
    }
    if !is_d_connected(g, inst.d(), &steps[0].0)? {
        warnings.push(ValidationWarning::InitialDisconnected);
    }

    for turn in 1..steps.len() {
        let (prev, cur) = (&steps[turn - 1].0, &steps[turn].0);
        for a in 0..k {
            if prev[a] != cur[a] && !g.has_edge(prev[a], cur[a]) {
                violations.push(Violation { turn, kind: ViolationKind::NonMove, agents: vec![a] });
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                if cur[a] == cur[b] {
                    violations.push(Violation { turn, kind: ViolationKind::Collision, agents: vec![a, b] });
                }
                if cur[a] == prev[b] && cur[b] == prev[a] && g.has_edge(prev[a], prev[b]) {
                    violations.push(Violation { turn, kind: ViolationKind::Swap, agents: vec![a, b] });
                }
            }
        }
        if !is_d_connected(g, inst.d(), cur)? {
            let range = RangeMatrix::new(g, inst.d());
            let cut = agents_outside_first_component(&range, cur);
            violations.push(Violation { turn, kind: ViolationKind::Disconnected, agents: cut });
        }
    }

    let last = steps.len() - 1;
    let wrong_target: Vec<usize> = (0..k).filter(|&a| steps[last].0[a] != inst.agents()[a].target).collect();
    if !wrong_target.is_empty() {
        violations.push(Violation { turn: last, kind: ViolationKind::WrongTarget, agents: wrong_target });
    }
    Ok(ValidationReport::from_parts(violations, warnings, sched.makespan(), inst.ell()))
}

/// Agents not reachable from agent 0 in the communication graph.
fn agents_outside_first_component(range: &RangeMatrix, positions: &[Vertex]) -> Vec<usize> {
    let k = positions.len();
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for b in 0..k {
            if !seen[b] && range.within(positions[a], positions[b]) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    (0..k).filter(|&a| !seen[a]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[usize]) -> Configuration {
        Configuration(v.to_vec())
    }

    #[test]
    fn instance_invariants() {
        let g = Graph::path(3);
        assert_eq!(Instance::from_pairs(g.clone(), &[(0, 1), (0, 2)], 1, 2), Err(ModelError::DuplicateStart(0, 1, 0)));
        assert_eq!(Instance::from_pairs(g.clone(), &[(0, 2), (1, 2)], 1, 2), Err(ModelError::DuplicateTarget(0, 1, 2)));
        assert_eq!(Instance::from_pairs(g.clone(), &[], 1, 2), Err(ModelError::NoAgents));
        assert_eq!(Instance::from_pairs(g.clone(), &[(0, 1)], 0, 2), Err(ModelError::ZeroRange));
        assert!(Instance::from_pairs(g, &[(0, 3)], 1, 2).is_err());
    }

    #[test]
    fn d_connectivity_examples() {
        let p = Graph::path(3);
        assert!(!is_d_connected(&p, 1, &[0, 2]).unwrap());
        assert!(is_d_connected(&p, 2, &[0, 2]).unwrap());
        assert_eq!(is_d_connected(&p, 1, &[]), Err(ModelError::EmptySet));
        let grid = Graph::grid(4, 4);
        assert!(is_d_connected(&grid, 1, &[4, 8, 9, 12]).unwrap());
    }

    #[test]
    fn single_agent_walk_is_valid() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 2)], 1, 2).unwrap();
        let s = Schedule::new(vec![cfg(&[0]), cfg(&[1]), cfg(&[2])]).unwrap();
        let r = validate_schedule(&inst, &s).unwrap();
        assert!(r.ok && r.within_budget, "{r:?}");
        let short = inst.with_ell(1);
        let r = validate_schedule(&short, &s).unwrap();
        assert!(r.ok && !r.within_budget);
    }

    #[test]
    fn swap_is_reported() {
        let inst = Instance::from_pairs(Graph::path(2), &[(0, 1), (1, 0)], 1, 3).unwrap();
        let s = Schedule::new(vec![cfg(&[0, 1]), cfg(&[1, 0])]).unwrap();
        let r = validate_schedule(&inst, &s).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations, vec![Violation { turn: 1, kind: ViolationKind::Swap, agents: vec![0, 1] }]);
    }

    #[test]
    fn jump_is_non_move() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 2)], 1, 2).unwrap();
        let s = Schedule::new(vec![cfg(&[0]), cfg(&[2])]).unwrap();
        let r = validate_schedule(&inst, &s).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::NonMove);
    }

    #[test]
    fn start_target_collision_and_disconnection() {
        let inst = Instance::from_pairs(Graph::path(4), &[(0, 3), (1, 2)], 1, 5).unwrap();
        let s = Schedule::new(vec![cfg(&[1, 0]), cfg(&[1, 1]), cfg(&[0, 3])]).unwrap();
        let r = validate_schedule(&inst, &s).unwrap();
        let kinds: Vec<_> = r.violations.iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            vec![
                ViolationKind::WrongStart,
                ViolationKind::Collision,
                ViolationKind::NonMove,
                ViolationKind::Disconnected,
                ViolationKind::WrongTarget,
            ]
        );
    }

    #[test]
    fn disconnected_start_is_only_a_warning() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 0), (2, 1)], 1, 1).unwrap();
        let s = Schedule::new(vec![cfg(&[0, 2]), cfg(&[0, 1])]).unwrap();
        let r = validate_schedule(&inst, &s).unwrap();
        assert!(r.ok);
        assert_eq!(r.warnings, vec![ValidationWarning::InitialDisconnected]);
    }

    #[test]
    fn mismatched_agent_count_is_an_error() {
        let inst = Instance::from_pairs(Graph::path(3), &[(0, 2)], 1, 2).unwrap();
        let s = Schedule::new(vec![cfg(&[0, 1])]).unwrap();
        assert!(matches!(validate_schedule(&inst, &s), Err(ModelError::AgentCountMismatch { .. })));
        assert_eq!(Schedule::new(vec![]), Err(ModelError::EmptySchedule));
    }

    #[test]
    fn padding_and_trimming() {
        let s = Schedule::new(vec![cfg(&[0]), cfg(&[1])]).unwrap();
        let p = s.padded(3);
        assert_eq!(p.makespan(), 3);
        assert_eq!(p.trimmed(), s);
    }
}
