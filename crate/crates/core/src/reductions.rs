//! Multicolored clique to MAPFCC with `d = 1`, `ell = 3`.
//!
//! Classes, class members and gadget indices are 0-based here: class `i`
//! in `0..k`, member `p` in `0..n`, and `j` in `0..k` with `j != i`.
//!
//! Layout of the produced graph, in id order:
//! - per class `i`: the spine `a^i_j` (ascending `j`), then the member paths
//!   `v^i_{p,j}` (by `p`, then `j`);
//! - per class pair `l < m` (lexicographic): one top `u^{l,m}` and one
//!   bottom `u^{m,l}` vertex per H-edge between the classes, edges ordered by
//!   `(p, q)`;
//! - the clique `Q` of terminals `t^i_j`, ordered by `(i, j)`.
//!
//! Agent `alpha^i_j` starts at `a^i_j`, targets `t^i_j`, and agents are
//! numbered in `(i, j)` order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{bfs_distances, Graph, Vertex};
use crate::model::{Agent, Instance};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("vertex {0} is in no class")]
    Uncovered(Vertex),
    #[error("vertex {0} is in more than one class")]
    Overlap(Vertex),
    #[error("vertex {0} is out of range")]
    OutOfRange(Vertex),
    #[error("edge {0}-{1} lies inside one class")]
    InnerEdge(Vertex, Vertex),
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("class index out of range or not ordered: ({0}, {1})")]
    BadClassPair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MccInstance {
    h: Graph,
    classes: Vec<Vec<Vertex>>,
    class_of: Vec<usize>,
    position: Vec<usize>,
}

impl MccInstance {
    /// Classes must partition `V(H)` into independent sets. Unequal class
    /// sizes are padded with isolated vertices appended to `H`.
    pub fn new(h: Graph, classes: Vec<Vec<Vertex>>) -> Result<Self, ReductionError> {
        if classes.len() < 2 {
            return Err(ReductionError::TooFewClasses(classes.len()));
        }
        let mut class_of = vec![usize::MAX; h.n()];
        let mut position = vec![0; h.n()];
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(ReductionError::EmptyClass(i));
            }
            for (p, &v) in class.iter().enumerate() {
                if v >= h.n() {
                    return Err(ReductionError::OutOfRange(v));
                }
                if class_of[v] != usize::MAX {
                    return Err(ReductionError::Overlap(v));
                }
                class_of[v] = i;
                position[v] = p;
            }
        }
        if let Some(v) = (0..h.n()).find(|&v| class_of[v] == usize::MAX) {
            return Err(ReductionError::Uncovered(v));
        }
        if let Some((u, v)) = h.edges().find(|&(u, v)| class_of[u] == class_of[v]) {
            return Err(ReductionError::InnerEdge(u, v));
        }

        let size = classes.iter().map(Vec::len).max().expect("k >= 2");
        let mut classes = classes;
        let mut n = h.n();
        for (i, class) in classes.iter_mut().enumerate() {
            while class.len() < size {
                class_of.push(i);
                position.push(class.len());
                class.push(n);
                n += 1;
            }
        }
        let h = if n == h.n() { h } else { Graph::from_edges_unchecked(n, h.edges()) };
        Ok(MccInstance { h, classes, class_of, position })
    }

    pub fn graph(&self) -> &Graph {
        &self.h
    }

    pub fn classes(&self) -> &[Vec<Vertex>] {
        &self.classes
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// Common class size after padding.
    pub fn class_size(&self) -> usize {
        self.classes[0].len()
    }

    /// `(class, position)` of an H-vertex.
    pub fn locate(&self, v: Vertex) -> (usize, usize) {
        (self.class_of[v], self.position[v])
    }

    /// H-edges between classes `l < m` as `(p, q)` member positions, sorted.
    pub fn class_edges(&self, l: usize, m: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .h
            .edges()
            .filter_map(|(u, v)| {
                let (cu, pu) = self.locate(u);
                let (cv, pv) = self.locate(v);
                if (cu, cv) == (l, m) {
                    Some((pu, pv))
                } else if (cv, cu) == (l, m) {
                    Some((pv, pu))
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// One E-gadget edge for H-edge `v^l_p v^m_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetEdge {
    pub p: usize,
    pub q: usize,
    /// `u^{l,m}_p`, joined to `v^l_{p,m}`.
    pub top: Vertex,
    /// `u^{m,l}_q`, joined to `v^m_{q,l}`.
    pub bottom: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetLayout {
    pub k: usize,
    pub n: usize,
    /// `spine[i][j] = a^i_j` (`None` for `j == i`).
    pub spine: Vec<Vec<Option<Vertex>>>,
    /// `path[i][p][j] = v^i_{p,j}` (`None` for `j == i`).
    pub path: Vec<Vec<Vec<Option<Vertex>>>>,
    /// Gadget edges per class pair `(l, m)`, `l < m`.
    pub edge_gadgets: BTreeMap<(usize, usize), Vec<GadgetEdge>>,
    /// `clique[i][j] = t^i_j`.
    pub clique: Vec<Vec<Option<Vertex>>>,
    /// `agent[i][j]` = index of `alpha^i_j`.
    pub agent: Vec<Vec<Option<usize>>>,
    pub vertex_count: usize,
}

impl GadgetLayout {
    pub fn new(mcc: &MccInstance) -> Self {
        let (k, n) = (mcc.k(), mcc.class_size());
        let mut next = 0;
        let mut fresh = || {
            next += 1;
            next - 1
        };
        let mut spine = vec![vec![None; k]; k];
        let mut path = vec![vec![vec![None; k]; n]; k];
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                spine[i][j] = Some(fresh());
            }
            for member in path[i].iter_mut() {
                for j in (0..k).filter(|&j| j != i) {
                    member[j] = Some(fresh());
                }
            }
        }
        let mut edge_gadgets = BTreeMap::new();
        for l in 0..k {
            for m in l + 1..k {
                let edges = mcc
                    .class_edges(l, m)
                    .into_iter()
                    .map(|(p, q)| GadgetEdge { p, q, top: fresh(), bottom: fresh() })
                    .collect();
                edge_gadgets.insert((l, m), edges);
            }
        }
        let mut clique = vec![vec![None; k]; k];
        let mut agent = vec![vec![None; k]; k];
        let mut count = 0;
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                clique[i][j] = Some(fresh());
                agent[i][j] = Some(count);
                count += 1;
            }
        }
        GadgetLayout { k, n, spine, path, edge_gadgets, clique, agent, vertex_count: next }
    }

    fn others(&self, i: usize) -> impl Iterator<Item = usize> {
        (0..self.k).filter(move |&j| j != i)
    }

    fn first_index(&self, i: usize) -> usize {
        self.others(i).next().expect("k >= 2")
    }

    fn last_index(&self, i: usize) -> usize {
        self.others(i).last().expect("k >= 2")
    }

    fn v(&self, i: usize, p: usize, j: usize) -> Vertex {
        self.path[i][p][j].expect("j != i")
    }

    fn a(&self, i: usize, j: usize) -> Vertex {
        self.spine[i][j].expect("j != i")
    }

    /// Top vertices of `V_i`: first path vertex of every member path.
    pub fn vertex_tops(&self, i: usize) -> Vec<Vertex> {
        let j = self.first_index(i);
        (0..self.n).map(|p| self.v(i, p, j)).collect()
    }

    pub fn vertex_bottoms(&self, i: usize) -> Vec<Vertex> {
        let j = self.last_index(i);
        (0..self.n).map(|p| self.v(i, p, j)).collect()
    }

    pub fn clique_vertices(&self) -> Vec<Vertex> {
        self.clique.iter().flatten().flatten().copied().collect()
    }
}

/// Spine path, member paths and spokes of `V_i`.
pub fn build_vertex_gadget(
    i: usize,
    mcc: &MccInstance,
    layout: &GadgetLayout,
) -> Result<Vec<(Vertex, Vertex)>, ReductionError> {
    let k = mcc.k();
    if k < 2 {
        return Err(ReductionError::TooFewClasses(k));
    }
    if i >= k {
        return Err(ReductionError::BadClassPair(i, i));
    }
    let idx: Vec<usize> = layout.others(i).collect();
    let mut edges = Vec::new();
    for w in idx.windows(2) {
        edges.push((layout.a(i, w[0]), layout.a(i, w[1])));
    }
    for p in 0..layout.n {
        for w in idx.windows(2) {
            edges.push((layout.v(i, p, w[0]), layout.v(i, p, w[1])));
        }
        for &j in &idx {
            edges.push((layout.a(i, j), layout.v(i, p, j)));
        }
    }
    Ok(edges)
}

/// One edge per H-edge between classes `l < m`.
pub fn build_edge_gadget(
    l: usize,
    m: usize,
    mcc: &MccInstance,
    layout: &GadgetLayout,
) -> Result<Vec<(Vertex, Vertex)>, ReductionError> {
    if l >= m || m >= mcc.k() {
        return Err(ReductionError::BadClassPair(l, m));
    }
    Ok(layout.edge_gadgets[&(l, m)].iter().map(|e| (e.top, e.bottom)).collect())
}

pub fn reduce_mcc(mcc: &MccInstance) -> Result<(Instance, GadgetLayout), ReductionError> {
    let k = mcc.k();
    if k < 2 {
        return Err(ReductionError::TooFewClasses(k));
    }
    let layout = GadgetLayout::new(mcc);
    let mut edges = Vec::new();
    for i in 0..k {
        edges.extend(build_vertex_gadget(i, mcc, &layout)?);
    }
    let pairs: Vec<(usize, usize)> = layout.edge_gadgets.keys().copied().collect();
    for &(l, m) in &pairs {
        edges.extend(build_edge_gadget(l, m, mcc, &layout)?);
    }

    for i in 0..k - 1 {
        for &b in &layout.vertex_bottoms(i) {
            for &t in &layout.vertex_tops(i + 1) {
                edges.push((b, t));
            }
        }
        edges.push((layout.a(i, layout.last_index(i)), layout.a(i + 1, layout.first_index(i + 1))));
    }
    for (&(l, m), gadget) in &layout.edge_gadgets {
        for e in gadget {
            edges.push((e.top, layout.v(l, e.p, m)));
            edges.push((e.bottom, layout.v(m, e.q, l)));
        }
    }
    // The gadgets form one chain in lexicographic pair order.
    for w in pairs.windows(2) {
        for b in &layout.edge_gadgets[&w[0]] {
            for t in &layout.edge_gadgets[&w[1]] {
                edges.push((b.bottom, t.top));
            }
        }
    }
    let q = layout.clique_vertices();
    for (x, &a) in q.iter().enumerate() {
        for &b in &q[x + 1..] {
            edges.push((a, b));
        }
    }
    for gadget in layout.edge_gadgets.values() {
        for e in gadget {
            for &t in &q {
                edges.push((e.top, t));
                edges.push((e.bottom, t));
            }
        }
    }

    let g = Graph::from_edges(layout.vertex_count, edges).expect("gadget edges are simple");
    let mut agents = Vec::new();
    for i in 0..k {
        for j in layout.others(i) {
            agents.push(Agent { start: layout.a(i, j), target: layout.clique[i][j].expect("j != i") });
        }
    }
    let inst = Instance::new(g, agents, 1, 3).expect("distinct terminals");
    Ok((inst, layout))
}

/// A multicolored clique (one H-vertex per class), by exhaustive search.
pub fn brute_clique(mcc: &MccInstance) -> Option<Vec<Vertex>> {
    fn extend(mcc: &MccInstance, chosen: &mut Vec<Vertex>) -> bool {
        let i = chosen.len();
        if i == mcc.k() {
            return true;
        }
        for &v in &mcc.classes()[i] {
            if chosen.iter().all(|&u| mcc.graph().has_edge(u, v)) {
                chosen.push(v);
                if extend(mcc, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    extend(mcc, &mut chosen).then_some(chosen)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Start-target distances, per agent.
    pub distances: Vec<usize>,
    /// Whether every class pair has at least one H-edge. Only then can every
    /// agent reach its target in three moves.
    pub all_pairs_present: bool,
    pub clique_size: usize,
    pub agent_count: usize,
    pub edge_gadgets_match: bool,
    pub layout_injective: bool,
}

impl AuditReport {
    /// Distances are exactly 3 when all class pairs are present and larger
    /// otherwise (for the agents of a missing pair).
    pub fn passed(&self, k: usize) -> bool {
        let distances_ok = if self.all_pairs_present {
            self.distances.iter().all(|&x| x == 3)
        } else {
            self.distances.iter().all(|&x| x >= 3) && self.distances.iter().any(|&x| x > 3)
        };
        distances_ok
            && self.clique_size == k * (k - 1)
            && self.agent_count == k * (k - 1)
            && self.edge_gadgets_match
            && self.layout_injective
    }
}

pub fn audit_reduction(mcc: &MccInstance, inst: &Instance, layout: &GadgetLayout) -> AuditReport {
    let g = inst.graph();
    let distances = inst.agents().iter().map(|a| bfs_distances(g, a.start, None)[a.target]).collect();
    let k = mcc.k();
    let all_pairs_present = layout.edge_gadgets.values().all(|e| !e.is_empty());
    let edge_gadgets_match = layout.edge_gadgets.iter().all(|(&(l, m), e)| e.len() == mcc.class_edges(l, m).len());

    let mut ids: Vec<Vertex> = layout.spine.iter().flatten().flatten().copied().collect();
    ids.extend(layout.path.iter().flatten().flatten().flatten().copied());
    for e in layout.edge_gadgets.values().flatten() {
        ids.extend([e.top, e.bottom]);
    }
    ids.extend(layout.clique_vertices());
    let total = ids.len();
    ids.sort_unstable();
    ids.dedup();
    let layout_injective = ids.len() == total && total == g.n();

    AuditReport {
        distances,
        all_pairs_present,
        clique_size: layout.clique_vertices().len(),
        agent_count: inst.k(),
        edge_gadgets_match,
        layout_injective: layout_injective && k >= 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{solve_bfs, SearchOptions};

    fn singleton_classes(h: Graph) -> MccInstance {
        let k = h.n();
        MccInstance::new(h, (0..k).map(|v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn vertex_gadget_counts() {
        // Three classes of two, middle class (index 1).
        let h = Graph::empty(6);
        let mcc = MccInstance::new(h, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let layout = GadgetLayout::new(&mcc);
        let edges = build_vertex_gadget(1, &mcc, &layout).unwrap();
        // 2 member paths of one edge, a one-edge spine, 4 spokes.
        assert_eq!(edges.len(), 2 + 1 + 4);
        let mut vs: Vec<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.sort_unstable();
        vs.dedup();
        assert_eq!(vs.len(), (2 + 1) * (3 - 1));
        // First class: tops use index 1, the smallest surviving one.
        assert_eq!(layout.vertex_tops(0), vec![layout.v(0, 0, 1), layout.v(0, 1, 1)]);
    }

    #[test]
    fn smallest_vertex_gadget() {
        let mcc = MccInstance::new(Graph::empty(2), vec![vec![0], vec![1]]).unwrap();
        let layout = GadgetLayout::new(&mcc);
        let edges = build_vertex_gadget(0, &mcc, &layout).unwrap();
        assert_eq!(edges, vec![(layout.a(0, 1), layout.v(0, 0, 1))]);
    }

    #[test]
    fn edge_gadgets() {
        let h = Graph::from_edges_unchecked(4, [(0, 2), (0, 3), (1, 2), (1, 3)]);
        let mcc = MccInstance::new(h, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let layout = GadgetLayout::new(&mcc);
        let e = build_edge_gadget(0, 1, &mcc, &layout).unwrap();
        assert_eq!(e.len(), 4);
        let mut vs: Vec<Vertex> = e.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.sort_unstable();
        vs.dedup();
        assert_eq!(vs.len(), 8);

        let empty = MccInstance::new(Graph::empty(4), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let layout = GadgetLayout::new(&empty);
        assert!(build_edge_gadget(0, 1, &empty, &layout).unwrap().is_empty());
    }

    #[test]
    fn single_edge_maps_to_its_positions() {
        // v^1_2 v^k_1 with k = 3 (0-based: class 0 position 1, class 2 position 0).
        let h = Graph::from_edges_unchecked(6, [(1, 4)]);
        let mcc = MccInstance::new(h, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let layout = GadgetLayout::new(&mcc);
        let gadget = &layout.edge_gadgets[&(0, 2)];
        assert_eq!(gadget.len(), 1);
        assert_eq!((gadget[0].p, gadget[0].q), (1, 0));
    }

    #[test]
    fn triangle_is_yes_and_path_is_no() {
        let yes = singleton_classes(Graph::complete(3));
        assert!(brute_clique(&yes).is_some());
        let (inst, layout) = reduce_mcc(&yes).unwrap();
        let audit = audit_reduction(&yes, &inst, &layout);
        assert!(audit.passed(3), "{audit:?}");
        assert!(solve_bfs(&inst, &SearchOptions::default()).outcome.is_feasible());

        let no = singleton_classes(Graph::path(3));
        assert!(brute_clique(&no).is_none());
        let (inst, layout) = reduce_mcc(&no).unwrap();
        assert!(audit_reduction(&no, &inst, &layout).passed(3));
        assert!(!solve_bfs(&inst, &SearchOptions::default()).outcome.is_feasible());
    }

    #[test]
    fn padding_and_validation() {
        let mcc = MccInstance::new(Graph::from_edges_unchecked(3, [(0, 1)]), vec![vec![0, 2], vec![1]]).unwrap();
        assert_eq!(mcc.class_size(), 2);
        assert_eq!(mcc.graph().n(), 4);
        assert!(brute_clique(&mcc).is_some());
        assert_eq!(MccInstance::new(Graph::path(2), vec![vec![0, 1]]).unwrap_err(), ReductionError::TooFewClasses(1));
        assert_eq!(
            MccInstance::new(Graph::path(3), vec![vec![0, 1], vec![2]]).unwrap_err(),
            ReductionError::InnerEdge(0, 1)
        );
        assert!(brute_clique(&MccInstance::new(Graph::empty(2), vec![vec![0], vec![1]]).unwrap()).is_none());
    }
}
