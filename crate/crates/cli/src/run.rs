//! Strategy dispatch and plan rendering.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use mapfcc_core::expanded::{
    build_time_expanded, extract_ball, paths_to_schedule, solve_expanded, solve_local, LocalSolver,
};
use mapfcc_core::search::{oracle_solve, solve_bfs, Infeasibility, Outcome, SearchOptions, SearchStats};
use mapfcc_core::treeprune::{solve_tree, TreeError};
use mapfcc_core::{validate_schedule, Instance, Schedule};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Strategy {
    /// Tree pruning on trees, the local ball when it is a strict subgraph,
    /// plain configuration search otherwise.
    Auto,
    Bfs,
    Tree,
    Expanded,
    Local,
    Oracle,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Bfs => "bfs",
            Strategy::Tree => "tree",
            Strategy::Expanded => "expanded",
            Strategy::Local => "local",
            Strategy::Oracle => "oracle",
        }
    }

    /// What `auto` runs on this instance.
    pub fn resolve(self, inst: &Instance) -> Strategy {
        if self != Strategy::Auto {
            return self;
        }
        let g = inst.graph();
        if g.is_tree() {
            return Strategy::Tree;
        }
        let radius = inst.k() * inst.d() + inst.ell();
        if extract_ball(g, inst.agents()[0].start, radius).1.len() < g.n() {
            Strategy::Local
        } else {
            Strategy::Bfs
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Plan,
    JsonLines,
    DotFrames,
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub strategy: Strategy,
    pub outcome: Outcome<Schedule>,
    /// `None` for the oracle, which keeps no statistics.
    pub stats: Option<SearchStats>,
    pub elapsed: Duration,
}

impl Solved {
    pub fn expanded_nodes(&self) -> Option<u64> {
        self.stats.as_ref().map(|s| s.expanded_nodes)
    }
}

pub fn solve(inst: &Instance, strategy: Strategy, opts: &SearchOptions) -> Result<Solved, TreeError> {
    let strategy = strategy.resolve(inst);
    let clock = Instant::now();
    let (outcome, stats) = match strategy {
        Strategy::Auto => unreachable!("resolved above"),
        Strategy::Bfs => {
            let r = solve_bfs(inst, opts);
            (r.outcome, Some(r.stats))
        }
        Strategy::Tree => {
            let r = solve_tree(inst, opts)?;
            (r.result.outcome, Some(r.result.stats))
        }
        Strategy::Expanded => {
            let r = solve_expanded(inst, opts);
            let gi = build_time_expanded(inst);
            let outcome =
                r.result.outcome.map(|w| paths_to_schedule(&gi, &w).expect("solver witnesses are valid").trimmed());
            (outcome, Some(r.result.stats))
        }
        Strategy::Local => {
            let r = solve_local(inst, LocalSolver::Bfs, opts);
            (r.outcome, Some(r.stats))
        }
        Strategy::Oracle => (oracle_solve(inst, opts.node_budget), None),
    };
    Ok(Solved { strategy, outcome, stats, elapsed: clock.elapsed() })
}

pub fn reason(r: Infeasibility) -> &'static str {
    match r {
        Infeasibility::StartDisconnected => "start configuration is not d-connected",
        Infeasibility::TargetOutOfReach => "some target is farther than ell from its start",
        Infeasibility::Exhausted => "no schedule within ell turns",
    }
}

fn reason_tag(r: Infeasibility) -> &'static str {
    match r {
        Infeasibility::StartDisconnected => "start_disconnected",
        Infeasibility::TargetOutOfReach => "target_out_of_reach",
        Infeasibility::Exhausted => "exhausted",
    }
}

/// Exit status for a solver outcome.
pub fn exit_code<T>(outcome: &Outcome<T>) -> i32 {
    match outcome {
        Outcome::Feasible(_) => 0,
        Outcome::Infeasible(_) => 1,
        Outcome::BudgetExceeded => 2,
    }
}

/// Refuses to hand out a schedule that does not validate.
pub fn checked(inst: &Instance, sched: &Schedule) -> Result<(), String> {
    let report = validate_schedule(inst, sched).map_err(|e| e.to_string())?;
    if report.accepted() && report.warnings.is_empty() {
        Ok(())
    } else {
        Err(format!("solver produced an invalid schedule: {:?}", report.violations))
    }
}

pub fn render_plan(solved: &Solved) -> String {
    match &solved.outcome {
        Outcome::Feasible(s) => {
            let nodes = solved.expanded_nodes().map_or("-".to_string(), |n| n.to_string());
            format!(
                "# strategy {}, makespan {}, expanded {}\n{}",
                solved.strategy.name(),
                s.makespan(),
                nodes,
                crate::format::print_plan(s)
            )
        }
        Outcome::Infeasible(r) => format!("infeasible: {}\n", reason(*r)),
        Outcome::BudgetExceeded => format!(
            "budget exceeded after {} expanded nodes\n",
            solved.expanded_nodes().map_or("?".to_string(), |n| n.to_string())
        ),
    }
}

pub fn render_json_lines(solved: &Solved, timing: bool) -> String {
    let mut out = String::new();
    let (decision, why, makespan) = match &solved.outcome {
        Outcome::Feasible(s) => {
            for (turn, c) in s.steps().iter().enumerate() {
                writeln!(out, "{}", json!({"type": "turn", "turn": turn, "positions": c.positions()})).unwrap();
            }
            ("feasible", None, Some(s.makespan()))
        }
        Outcome::Infeasible(r) => ("infeasible", Some(reason_tag(*r)), None),
        Outcome::BudgetExceeded => ("budget_exceeded", None, None),
    };
    let mut stats = json!({
        "type": "stats",
        "strategy": solved.strategy.name(),
        "decision": decision,
        "reason": why,
        "makespan": makespan,
        "expanded_nodes": solved.stats.as_ref().map(|s| s.expanded_nodes),
        "generated_nodes": solved.stats.as_ref().map(|s| s.generated_nodes),
        "max_frontier": solved.stats.as_ref().map(|s| s.max_frontier),
    });
    if timing {
        stats["wall_ms"] = json!(solved.elapsed.as_secs_f64() * 1e3);
    }
    writeln!(out, "{stats}").unwrap();
    out
}

/// One undirected `dot` graph per turn. Occupied vertices are filled and
/// carry the agent index; targets are drawn as double circles.
pub fn dot_frames(inst: &Instance, sched: &Schedule) -> Vec<String> {
    let g = inst.graph();
    sched
        .steps()
        .iter()
        .enumerate()
        .map(|(turn, c)| {
            let mut out = format!("graph turn_{turn} {{\n  label=\"turn {turn}\";\n");
            for v in 0..g.n() {
                let mut attrs = Vec::new();
                let mut label = v.to_string();
                if let Some(a) = c.positions().iter().position(|&p| p == v) {
                    label.push_str(&format!("\\na{a}"));
                    attrs.push("style=filled".to_string());
                    attrs.push("fillcolor=lightblue".to_string());
                }
                if let Some(a) = inst.agents().iter().position(|ag| ag.target == v) {
                    label.push_str(&format!("\\nt{a}"));
                    attrs.push("shape=doublecircle".to_string());
                }
                attrs.insert(0, format!("label=\"{label}\""));
                writeln!(out, "  {v} [{}];", attrs.join(", ")).unwrap();
            }
            for (u, v) in g.edges() {
                writeln!(out, "  {u} -- {v};").unwrap();
            }
            out.push_str("}\n");
            out
        })
        .collect()
}
