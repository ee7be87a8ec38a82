//! The MSO sentence over `G_I`: a direct evaluator for a fixed assignment of
//! its set variables, and a textual emitter for external solvers.
//!
//! The evaluator follows the formulas clause by clause, using the
//! incidence relation and the label predicates only. The two inner
//! set quantifiers are decided by constructing the only candidate that can
//! work and then checking the quantified body on it: for the agent-edge
//! formula, T is a shortest endpoint-to-endpoint path in S; for
//! `connected_k`, A is the dist_k-closure of one member of X.
//!
//! # `msogi 1` format
//!
//! ```text
//! msogi 1
//! n <n> ell <ell> d <d> k <k>
//! vertices <count>
//! v <id> vertex_<layer>                one line per vertex, ascending
//! edges <count>
//! e <a> <b> <label>                    one line per labeled edge, a <= b
//! define (<name> <args>) <body>        helper predicates
//! formula phi<j> <body>                the eight conjuncts
//! sentence <body>
//! ```
//!
//! Bodies are s-expressions. Element quantifiers are `(forall x y .. body)`
//! and `(exists x y .. body)`; set quantifiers are `(exists-set S T .. body)`.
//! Connectives are `and`, `or`, `not`, `implies`, `iff`; `(and)` is true.
//! Atoms are `(inc v e)`, `(in x X)`, `(= x y)`, `(copy e)`, `(cross e)`,
//! `(communication e)`, `(agent e)` and `(vertex_<i> v)`. Names bound by
//! `define` or `formula` may be used as atoms afterwards.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use super::{EdgeLabel, EdgeRef, TimeExpandedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaResult {
    pub holds: bool,
    /// Name of the first conjunct (`phi1`..`phi8`) that is false.
    pub failed: Option<&'static str>,
}

const NAMES: [&str; 8] = ["phi1", "phi2", "phi3", "phi4", "phi5", "phi6", "phi7", "phi8"];

pub fn evaluate_formula(
    gi: &TimeExpandedGraph,
    s: &BTreeSet<EdgeRef>,
    x: &[BTreeSet<usize>],
    d: usize,
) -> FormulaResult {
    assert_eq!(x.len(), gi.ell() + 1, "one X set per layer");
    let mut ev = Evaluator { gi, s, x, d, universe: gi.vertex_count(), reach: HashMap::new() };
    for (j, name) in NAMES.iter().enumerate() {
        let holds = match j {
            0 => ev.phi1(),
            1 => ev.phi2(),
            2 => ev.phi3(),
            3 => ev.phi4(),
            4 => ev.phi5(),
            5 => ev.phi6(),
            6 => ev.phi7(),
            _ => ev.phi8(),
        };
        if !holds {
            return FormulaResult { holds: false, failed: Some(name) };
        }
    }
    FormulaResult { holds: true, failed: None }
}

struct Evaluator<'a> {
    gi: &'a TimeExpandedGraph,
    s: &'a BTreeSet<EdgeRef>,
    x: &'a [BTreeSet<usize>],
    d: usize,
    universe: usize,
    /// Vertices within communication distance `d`, per source.
    reach: HashMap<usize, BTreeSet<usize>>,
}

impl Evaluator<'_> {
    fn inc(&self, v: usize, e: EdgeRef) -> bool {
        self.gi.is_incident(v, e)
    }

    /// `e = uv`
    fn joins(&self, e: EdgeRef, u: usize, v: usize) -> bool {
        self.inc(u, e) && self.inc(v, e) && u != v
    }

    fn deg0<'f>(&self, v: usize, f: impl IntoIterator<Item = &'f EdgeRef>) -> bool {
        !f.into_iter().any(|&e| self.inc(v, e))
    }

    fn deg1(&self, v: usize, f: &BTreeSet<EdgeRef>) -> bool {
        f.iter().any(|&e| self.inc(v, e) && f.iter().all(|&g| !self.inc(v, g) || g == e))
    }

    fn deg2(&self, v: usize, f: &BTreeSet<EdgeRef>) -> bool {
        f.iter().any(|&e1| {
            f.iter().any(|&e2| {
                self.inc(v, e1)
                    && self.inc(v, e2)
                    && e1 != e2
                    && f.iter().all(|&g| !self.inc(v, g) || g == e1 || g == e2)
            })
        })
    }

    fn vertex_label(&self, v: usize, i: usize) -> bool {
        self.gi.layer(v) == i
    }

    fn phi1(&mut self) -> bool {
        (0..=self.gi.ell()).all(|i| (0..self.universe).all(|v| !self.x[i].contains(&v) || self.vertex_label(v, i)))
    }

    fn phi2(&mut self) -> bool {
        self.s.iter().all(|e| e.label == EdgeLabel::Copy || e.label == EdgeLabel::Cross)
    }

    fn phi3(&mut self) -> bool {
        let ell = self.gi.ell();
        (1..ell).all(|i| {
            self.x[i].iter().all(|&v| {
                self.deg2(v, self.s)
                    && self.x[i - 1].iter().any(|&u| self.s.iter().any(|&e| self.joins(e, u, v)))
                    && self.x[i + 1].iter().any(|&w| self.s.iter().any(|&f| self.joins(f, v, w)))
            })
        })
    }

    fn phi4(&mut self) -> bool {
        let ell = self.gi.ell();
        (0..self.universe).all(|v| {
            let endpoint = self.x[0].contains(&v) || self.x[ell].contains(&v);
            let degree_ok = if ell == 0 { self.deg0(v, self.s) } else { self.deg1(v, self.s) };
            let agent = self.gi.edges().any(|e| e.label == EdgeLabel::Agent && self.inc(v, e));
            !endpoint || (degree_ok && agent)
        })
    }

    fn phi5(&mut self) -> bool {
        (0..self.universe).all(|v| self.x.iter().any(|set| set.contains(&v)) || self.deg0(v, self.s))
    }

    fn phi6(&mut self) -> bool {
        let agent_edges: Vec<EdgeRef> = self.gi.edges().filter(|e| e.label == EdgeLabel::Agent).collect();
        agent_edges.into_iter().all(|e| {
            let (u, v) = self.gi.pair(e.pair);
            if u == v {
                // An agent that never moves under ell = 0.
                return self.gi.ell() == 0 && self.x[0].contains(&u);
            }
            let Some(t) = self.path_in_s(u, v) else {
                return false;
            };
            self.joins(e, u, v)
                && t.is_subset(self.s)
                && self.deg1(u, &t)
                && self.deg1(v, &t)
                && (0..self.universe).all(|w| self.deg0(w, &t) || self.deg2(w, &t) || w == u || w == v)
        })
    }

    /// Edges of a shortest `u`-`v` path using S-edges only.
    fn path_in_s(&self, u: usize, v: usize) -> Option<BTreeSet<EdgeRef>> {
        let mut via: HashMap<usize, EdgeRef> = HashMap::new();
        let mut queue = VecDeque::from([u]);
        while let Some(a) = queue.pop_front() {
            if a == v {
                let mut t = BTreeSet::new();
                let mut c = v;
                while c != u {
                    let e = via[&c];
                    t.insert(e);
                    c = self.gi.other_end(e, c);
                }
                return Some(t);
            }
            for &e in self.s.iter().filter(|&&e| self.inc(a, e)) {
                let b = self.gi.other_end(e, a);
                if b != u && !via.contains_key(&b) {
                    via.insert(b, e);
                    queue.push_back(b);
                }
            }
        }
        None
    }

    fn phi7(&mut self) -> bool {
        let ends = |e: EdgeRef| {
            let (a, b) = self.gi.pair(e.pair);
            [(a, b), (b, a)]
        };
        let copy_between =
            |a: usize, b: usize| self.gi.incident(a).any(|f| f.label == EdgeLabel::Copy && self.joins(f, a, b));
        let oriented = |u1: usize, v1: usize, u2: usize, v2: usize| {
            (1..=self.gi.ell()).any(|i| {
                self.vertex_label(u1, i - 1)
                    && self.vertex_label(u2, i - 1)
                    && self.vertex_label(v1, i)
                    && self.vertex_label(v2, i)
            })
        };
        !self.s.iter().any(|&e1| {
            self.s.iter().any(|&e2| {
                ends(e1).into_iter().any(|(u1, v1)| {
                    ends(e2).into_iter().any(|(u2, v2)| {
                        self.joins(e1, u1, v1)
                            && self.joins(e2, u2, v2)
                            && u1 != u2
                            && oriented(u1, v1, u2, v2)
                            && copy_between(u1, v2)
                            && copy_between(u2, v1)
                    })
                })
            })
        })
    }

    fn phi8(&mut self) -> bool {
        (0..self.x.len()).all(|i| self.connected(i))
    }

    fn dist(&mut self, u: usize, v: usize) -> bool {
        if !self.reach.contains_key(&u) {
            let r = communication_ball(self.gi, u, self.d);
            self.reach.insert(u, r);
        }
        self.reach[&u].contains(&v)
    }

    /// `connected_d(X_i)`: no split of X_i into two non-empty parts that are
    /// pairwise farther than d apart.
    fn connected(&mut self, i: usize) -> bool {
        let set: Vec<usize> = self.x[i].iter().copied().collect();
        let Some(&first) = set.first() else {
            return true;
        };
        let mut a = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(u) = stack.pop() {
            for &v in &set {
                if !a.contains(&v) && self.dist(u, v) {
                    a.insert(v);
                    stack.push(v);
                }
            }
        }
        let b: Vec<usize> = set.iter().copied().filter(|v| !a.contains(v)).collect();
        if b.is_empty() {
            return true;
        }
        let separated = a.iter().all(|&u| b.iter().all(|&v| !self.dist(u, v)));
        !separated
    }
}

/// Vertices within `k` communication edges of `u`.
fn communication_ball(gi: &TimeExpandedGraph, u: usize, k: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([u]);
    let mut frontier = vec![u];
    for _ in 0..k {
        let mut next = Vec::new();
        for &a in &frontier {
            for e in gi.incident(a).filter(|e| e.label == EdgeLabel::Communication) {
                let b = gi.other_end(e, a);
                if seen.insert(b) {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// `dist_k(u, v)` by expanding the inductive definition literally.
/// Exponential in `k`; meant for checking the BFS reading on tiny graphs.
pub fn dist_k_unrolled(gi: &TimeExpandedGraph, k: usize, u: usize, v: usize) -> bool {
    if k == 0 {
        return u == v;
    }
    dist_k_unrolled(gi, k - 1, u, v)
        || (0..gi.vertex_count()).any(|w| {
            dist_k_unrolled(gi, k - 1, u, w)
                && gi.edges().any(|e| {
                    e.label == EdgeLabel::Communication && gi.is_incident(w, e) && gi.is_incident(v, e) && w != v
                })
        })
}

/// Deterministic `msogi 1` dump of `G_I` and the sentence.
pub fn emit_mso_structure(gi: &TimeExpandedGraph, d: usize) -> String {
    let ell = gi.ell();
    let mut out = String::new();
    let _ = writeln!(out, "msogi 1");
    let _ = writeln!(out, "n {} ell {} d {} k {}", gi.base_n(), ell, d, gi.instance().k());
    let _ = writeln!(out, "vertices {}", gi.vertex_count());
    for v in 0..gi.vertex_count() {
        let _ = writeln!(out, "v {} vertex_{}", v, gi.layer(v));
    }
    let mut edges: Vec<(usize, usize, EdgeLabel)> = gi
        .edges()
        .map(|e| {
            let (a, b) = gi.pair(e.pair);
            (a, b, e.label)
        })
        .collect();
    edges.sort_unstable();
    let _ = writeln!(out, "edges {}", edges.len());
    for (a, b, label) in edges {
        let _ = writeln!(out, "e {a} {b} {label}");
    }
    for line in definitions(d) {
        let _ = writeln!(out, "{line}");
    }
    for (name, body) in NAMES.iter().zip(conjuncts(ell)) {
        let _ = writeln!(out, "formula {name} {body}");
    }
    let sets: Vec<String> = std::iter::once("S".to_string()).chain((0..=ell).map(|i| format!("X{i}"))).collect();
    let _ = writeln!(out, "sentence (exists-set {} (and {}))", sets.join(" "), NAMES.join(" "));
    out
}

fn definitions(d: usize) -> Vec<String> {
    let mut defs = vec![
        "define (joins e u v) (and (inc u e) (inc v e) (not (= u v)))".to_string(),
        "define (deg0 v F) (not (exists e (and (in e F) (inc v e))))".to_string(),
        "define (deg1 v F) (exists e (and (in e F) (inc v e) \
         (forall f (implies (and (in f F) (inc v f)) (= f e)))))"
            .to_string(),
        "define (deg2 v F) (exists e1 e2 (and (in e1 F) (in e2 F) (inc v e1) (inc v e2) \
         (not (= e1 e2)) (forall f (implies (and (in f F) (inc v f)) (or (= f e1) (= f e2))))))"
            .to_string(),
        "define (dist0 u v) (= u v)".to_string(),
    ];
    for j in 1..=d {
        defs.push(format!(
            "define (dist{j} u v) (or (dist{p} u v) \
             (exists w e (and (dist{p} u w) (communication e) (joins e w v))))",
            p = j - 1
        ));
    }
    defs.push(format!(
        "define (connected X) (not (exists-set A B (and (exists a (in a A)) (exists b (in b B)) \
         (forall v (iff (in v X) (or (in v A) (in v B)))) (forall v (not (and (in v A) (in v B)))) \
         (forall u v (implies (and (in u A) (in v B)) (not (dist{d} u v)))))))"
    ));
    defs
}

fn and(parts: impl IntoIterator<Item = String>) -> String {
    let parts: Vec<String> = parts.into_iter().collect();
    if parts.is_empty() {
        "(and)".to_string()
    } else {
        format!("(and {})", parts.join(" "))
    }
}

fn conjuncts(ell: usize) -> Vec<String> {
    let phi1 = and((0..=ell).map(|i| format!("(forall v (implies (in v X{i}) (vertex_{i} v)))")));
    let phi2 = "(forall e (implies (in e S) (or (copy e) (cross e))))".to_string();
    let phi3 = and((1..ell).map(|i| {
        format!(
            "(forall v (implies (in v X{i}) (exists u w e f (and (deg2 v S) (in u X{p}) (in w X{q}) \
             (in e S) (in f S) (joins e u v) (joins f v w)))))",
            p = i - 1,
            q = i + 1
        )
    }));
    let end_degree = if ell == 0 { "deg0" } else { "deg1" };
    let phi4 = format!(
        "(forall v (implies (or (in v X0) (in v X{ell})) (and ({end_degree} v S) \
         (exists e (and (agent e) (inc v e))))))"
    );
    let phi5 = format!("(forall v (implies {} (deg0 v S)))", and((0..=ell).map(|i| format!("(not (in v X{i}))"))));
    let path = "(exists u v (exists-set T (and (forall t (implies (in t T) (in t S))) (joins e u v) \
                (deg1 u T) (deg1 v T) (forall w (or (deg0 w T) (deg2 w T) (= w u) (= w v))))))";
    let phi6 = if ell == 0 {
        format!("(forall e (implies (agent e) (or (and (not (exists u v (joins e u v))) (forall u (implies (inc u e) (in u X0)))) {path})))")
    } else {
        format!("(forall e (implies (agent e) {path}))")
    };
    let layers = (1..=ell)
        .map(|i| format!("(and (vertex_{p} u1) (vertex_{p} u2) (vertex_{i} v1) (vertex_{i} v2))", p = i - 1))
        .collect::<Vec<_>>();
    let layered = if layers.is_empty() { "(or)".to_string() } else { format!("(or {})", layers.join(" ")) };
    let phi7 = format!(
        "(not (exists u1 v1 u2 v2 e1 e2 f1 f2 (and (joins e1 u1 v1) (joins e2 u2 v2) \
         (joins f1 u1 v2) (joins f2 u2 v1) (in e1 S) (in e2 S) (copy f1) (copy f2) \
         (not (= u1 u2)) {layered})))"
    );
    let phi8 = and((0..=ell).map(|i| format!("(connected X{i})")));
    vec![phi1, phi2, phi3, phi4, phi5, phi6, phi7, phi8]
}
