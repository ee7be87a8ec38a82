//! The labeled time-expanded graph `G_I` and everything built on it.
//!
//! `G_I` has one copy of `G` per turn `0..=ell` (vertex `v` in layer `i` has
//! id `i * n + v`). Edges carry labels: `copy` joins `v_{i-1}v_i`,
//! `communication` copies each edge of `G` inside a layer, `cross` joins
//! `u_{i-1}v_i` for each edge `uv`, and `agent` joins `s(a)_0` to `t(a)_ell`.
//! A schedule is the same thing as `k` vertex-disjoint layer-monotone paths
//! using copy and cross edges, with no swap and d-connected layers.
//!
//! Two labels can land on the same endpoint pair (e.g. `ell = 1` and
//! `s(a) = t(a)` makes an agent edge parallel to a copy edge). Pairs are
//! stored once with a label set, and edge sets are sets of
//! [`EdgeRef`] = (pair, label) incidences.

mod decomposition;
mod formula;
mod local;
mod paths;
mod properties;

pub use decomposition::{lift_tree_decomposition, treewidth_upper_bound, DecompositionError, TreeDecomposition};
pub use formula::{dist_k_unrolled, emit_mso_structure, evaluate_formula, FormulaResult};
pub use local::{extract_ball, solve_local, LocalSolve, LocalSolver};
pub use paths::{solve_disjoint_paths, solve_expanded, ExpandedSolve, PathsResult};
pub use properties::{check_properties, PROPERTY_COUNT};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::graph::Vertex;
use crate::model::{is_d_connected, validate_schedule, Configuration, Instance, ModelError, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Copy,
    Communication,
    Cross,
    Agent,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 4] = [EdgeLabel::Copy, EdgeLabel::Communication, EdgeLabel::Cross, EdgeLabel::Agent];

    pub fn name(self) -> &'static str {
        match self {
            EdgeLabel::Copy => "copy",
            EdgeLabel::Communication => "communication",
            EdgeLabel::Cross => "cross",
            EdgeLabel::Agent => "agent",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One labeled edge of `G_I`: an endpoint pair (by index) and a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub pair: usize,
    pub label: EdgeLabel,
}

/// A set of labeled edges together with `X_0..X_ell`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub s: BTreeSet<EdgeRef>,
    pub x: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone)]
pub struct TimeExpandedGraph {
    inst: Instance,
    n: usize,
    ell: usize,
    /// Endpoint pairs, `a <= b` (equal only for an agent loop when `ell = 0`).
    pairs: Vec<(usize, usize)>,
    labels: Vec<u8>,
    /// Agent edges beyond the first on one pair. Only possible for `ell = 0`
    /// with two agents swapping endpoints; the properties depend on agent
    /// edges through their endpoints only, so one edge ref stands for both.
    parallel_agents: usize,
    index: HashMap<(usize, usize), usize>,
    /// Pair indices incident to each vertex, ascending.
    incident: Vec<Vec<usize>>,
}

impl TimeExpandedGraph {
    pub fn build(inst: &Instance) -> Self {
        let g = inst.graph();
        let (n, ell) = (g.n(), inst.ell());
        let mut gi = TimeExpandedGraph {
            inst: inst.clone(),
            n,
            ell,
            pairs: Vec::new(),
            labels: Vec::new(),
            parallel_agents: 0,
            index: HashMap::new(),
            incident: vec![Vec::new(); n * (ell + 1)],
        };
        for i in 1..=ell {
            for v in 0..n {
                gi.add(gi.vertex(v, i - 1), gi.vertex(v, i), EdgeLabel::Copy);
            }
        }
        for i in 0..=ell {
            for (u, v) in g.edges() {
                gi.add(gi.vertex(u, i), gi.vertex(v, i), EdgeLabel::Communication);
            }
        }
        for i in 1..=ell {
            for (u, v) in g.edges() {
                gi.add(gi.vertex(u, i - 1), gi.vertex(v, i), EdgeLabel::Cross);
                gi.add(gi.vertex(v, i - 1), gi.vertex(u, i), EdgeLabel::Cross);
            }
        }
        for a in inst.agents() {
            gi.add(gi.vertex(a.start, 0), gi.vertex(a.target, ell), EdgeLabel::Agent);
        }
        for list in &mut gi.incident {
            list.sort_unstable();
        }

        let (m, k) = (g.m(), inst.k());
        assert_eq!(gi.label_count(EdgeLabel::Copy), n * ell);
        assert_eq!(gi.label_count(EdgeLabel::Communication), m * (ell + 1));
        assert_eq!(gi.label_count(EdgeLabel::Cross), 2 * m * ell);
        assert_eq!(gi.label_count(EdgeLabel::Agent), k);
        gi
    }

    fn add(&mut self, a: usize, b: usize, label: EdgeLabel) {
        let key = (a.min(b), a.max(b));
        let idx = match self.index.get(&key) {
            Some(&i) => i,
            None => {
                let i = self.pairs.len();
                self.pairs.push(key);
                self.labels.push(0);
                self.index.insert(key, i);
                self.incident[key.0].push(i);
                if key.1 != key.0 {
                    self.incident[key.1].push(i);
                }
                i
            }
        };
        if label == EdgeLabel::Agent && self.labels[idx] & label.bit() != 0 {
            self.parallel_agents += 1;
            return;
        }
        assert_eq!(self.labels[idx] & label.bit(), 0, "label added twice to one pair");
        self.labels[idx] |= label.bit();
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    /// Vertices of the source graph.
    pub fn base_n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn vertex_count(&self) -> usize {
        self.n * (self.ell + 1)
    }

    pub fn vertex(&self, v: Vertex, layer: usize) -> usize {
        debug_assert!(v < self.n && layer <= self.ell);
        layer * self.n + v
    }

    pub fn layer(&self, x: usize) -> usize {
        x / self.n
    }

    pub fn base(&self, x: usize) -> Vertex {
        x % self.n
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    pub fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn has_label(&self, idx: usize, label: EdgeLabel) -> bool {
        self.labels[idx] & label.bit() != 0
    }

    pub fn pair_labels(&self, idx: usize) -> impl Iterator<Item = EdgeLabel> + '_ {
        EdgeLabel::ALL.into_iter().filter(move |&l| self.has_label(idx, l))
    }

    /// True iff an edge with this label joins `a` and `b`.
    pub fn joined(&self, a: usize, b: usize, label: EdgeLabel) -> bool {
        self.pair_index(a, b).is_some_and(|i| self.has_label(i, label))
    }

    /// All labeled edges, ordered by pair index then label.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        (0..self.pairs.len()).flat_map(move |pair| self.pair_labels(pair).map(move |label| EdgeRef { pair, label }))
    }

    pub fn edge_count(&self) -> usize {
        self.labels.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Edges with this label, counted with multiplicity.
    pub fn label_count(&self, label: EdgeLabel) -> usize {
        let parallel = if label == EdgeLabel::Agent { self.parallel_agents } else { 0 };
        parallel + (0..self.pairs.len()).filter(|&i| self.has_label(i, label)).count()
    }

    pub fn contains(&self, e: EdgeRef) -> bool {
        e.pair < self.pairs.len() && self.has_label(e.pair, e.label)
    }

    /// Labeled edges incident to `x`.
    pub fn incident(&self, x: usize) -> impl Iterator<Item = EdgeRef> + '_ {
        self.incident[x].iter().flat_map(move |&pair| self.pair_labels(pair).map(move |label| EdgeRef { pair, label }))
    }

    pub fn is_incident(&self, x: usize, e: EdgeRef) -> bool {
        let (a, b) = self.pairs[e.pair];
        a == x || b == x
    }

    /// The endpoint of `e` other than `x` (`x` itself for a loop).
    pub fn other_end(&self, e: EdgeRef, x: usize) -> usize {
        let (a, b) = self.pairs[e.pair];
        if a == x {
            b
        } else {
            a
        }
    }

    /// Layer-`(i+1)` vertices reachable from `x` by a copy or cross edge,
    /// ascending.
    pub fn forward(&self, x: usize) -> Vec<usize> {
        let layer = self.layer(x);
        let mut out: Vec<usize> = self.incident[x]
            .iter()
            .filter(|&&p| self.has_label(p, EdgeLabel::Copy) || self.has_label(p, EdgeLabel::Cross))
            .map(|&p| {
                let (a, b) = self.pairs[p];
                if a == x {
                    b
                } else {
                    a
                }
            })
            .filter(|&y| self.layer(y) == layer + 1)
            .collect();
        out.sort_unstable();
        out
    }

    /// The copy or cross edge joining consecutive-layer vertices.
    pub fn step_edge(&self, from: usize, to: usize) -> Option<EdgeRef> {
        let pair = self.pair_index(from, to)?;
        if self.layer(to) != self.layer(from) + 1 {
            return None;
        }
        let label = if self.base(from) == self.base(to) { EdgeLabel::Copy } else { EdgeLabel::Cross };
        self.has_label(pair, label).then_some(EdgeRef { pair, label })
    }
}

/// One path per agent, one vertex of `G_I` per layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathsWitness {
    pub paths: Vec<Vec<usize>>,
}

impl PathsWitness {
    /// `S`: the copy/cross edges used by the paths. Steps that are not edges
    /// of `G_I` are skipped.
    pub fn edge_set(&self, gi: &TimeExpandedGraph) -> BTreeSet<EdgeRef> {
        self.paths.iter().flat_map(|p| p.windows(2).filter_map(|w| gi.step_edge(w[0], w[1]))).collect()
    }

    /// `X_i`: the vertices the paths visit in layer `i`.
    pub fn layer_sets(&self, gi: &TimeExpandedGraph) -> Vec<BTreeSet<usize>> {
        let mut x = vec![BTreeSet::new(); gi.ell() + 1];
        for p in &self.paths {
            for &v in p {
                let layer = gi.layer(v);
                if layer <= gi.ell() {
                    x[layer].insert(v);
                }
            }
        }
        x
    }

    pub fn assignment(&self, gi: &TimeExpandedGraph) -> Assignment {
        Assignment { s: self.edge_set(gi), x: self.layer_sets(gi) }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExpandedError {
    #[error("schedule is not feasible for the instance: {0}")]
    InfeasibleSchedule(String),
    #[error("schedule makespan {makespan} exceeds ell = {ell}")]
    TooLong { makespan: usize, ell: usize },
    #[error("condition {condition} violated: {detail}")]
    Condition { condition: u8, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn condition(condition: u8, detail: String) -> ExpandedError {
    ExpandedError::Condition { condition, detail }
}

pub fn build_time_expanded(inst: &Instance) -> TimeExpandedGraph {
    TimeExpandedGraph::build(inst)
}

/// Reads a feasible schedule as paths in `G_I`, padding with copy edges at
/// the targets up to `ell`.
pub fn schedule_to_paths(gi: &TimeExpandedGraph, sched: &Schedule) -> Result<PathsWitness, ExpandedError> {
    let report = validate_schedule(gi.instance(), sched)?;
    if !report.accepted() {
        let detail = report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>();
        return Err(ExpandedError::InfeasibleSchedule(detail.join("; ")));
    }
    // Layer 0 is constrained here, unlike in the schedule validator.
    if !report.warnings.is_empty() {
        return Err(ExpandedError::InfeasibleSchedule("initial configuration is not d-connected".into()));
    }
    if sched.makespan() > gi.ell() {
        return Err(ExpandedError::TooLong { makespan: sched.makespan(), ell: gi.ell() });
    }
    let padded = sched.padded(gi.ell());
    let paths = (0..sched.k())
        .map(|a| padded.steps().iter().enumerate().map(|(i, c)| gi.vertex(c.0[a], i)).collect())
        .collect();
    Ok(PathsWitness { paths })
}

/// Checks the four path conditions and reads the schedule off the layers.
pub fn paths_to_schedule(gi: &TimeExpandedGraph, w: &PathsWitness) -> Result<Schedule, ExpandedError> {
    let inst = gi.instance();
    let ell = gi.ell();
    if w.paths.len() != inst.k() {
        return Err(condition(2, format!("{} paths for {} agents", w.paths.len(), inst.k())));
    }
    let mut owner = HashMap::new();
    for (a, p) in w.paths.iter().enumerate() {
        if p.len() != ell + 1 {
            return Err(condition(1, format!("path {a} has {} vertices, expected {}", p.len(), ell + 1)));
        }
        for (i, &x) in p.iter().enumerate() {
            if x >= gi.vertex_count() || gi.layer(x) != i {
                return Err(condition(1, format!("path {a} position {i} is not in layer {i}")));
            }
            if let Some(b) = owner.insert(x, a) {
                return Err(condition(1, format!("paths {b} and {a} share vertex {x}")));
            }
        }
        if let Some(i) = (1..=ell).find(|&i| gi.step_edge(p[i - 1], p[i]).is_none()) {
            return Err(condition(1, format!("path {a} has no edge between layers {} and {i}", i - 1)));
        }
    }
    for (a, (p, agent)) in w.paths.iter().zip(inst.agents()).enumerate() {
        if p[0] != gi.vertex(agent.start, 0) || p[ell] != gi.vertex(agent.target, ell) {
            return Err(condition(2, format!("path {a} does not join s({a})_0 and t({a})_{ell}")));
        }
    }
    for i in 1..=ell {
        for a in 0..w.paths.len() {
            for b in a + 1..w.paths.len() {
                let (pa, pb) = (&w.paths[a], &w.paths[b]);
                let (ua, va) = (gi.base(pa[i - 1]), gi.base(pa[i]));
                let (ub, vb) = (gi.base(pb[i - 1]), gi.base(pb[i]));
                if ua != va && ua == vb && va == ub {
                    return Err(condition(3, format!("paths {a} and {b} swap along an edge at layer {i}")));
                }
            }
        }
    }
    let steps: Vec<Configuration> =
        (0..=ell).map(|i| Configuration(w.paths.iter().map(|p| gi.base(p[i])).collect())).collect();
    for (i, c) in steps.iter().enumerate() {
        if !is_d_connected(inst.graph(), inst.d(), c.positions())? {
            return Err(condition(4, format!("layer {i} is not {}-connected", inst.d())));
        }
    }
    Ok(Schedule::new(steps)?)
}
