//! Seeded head-to-head runs. Every strategy must reach the same decision
//! (and, when feasible, the same makespan) on every row; the first
//! disagreement stops the run.

use std::fmt::Write as _;

use clap::ValueEnum;
use mapfcc_core::gen::{random_instance, random_tree, seeded_rng};
use mapfcc_core::search::SearchOptions;
use mapfcc_core::{Graph, Instance};
use rand::Rng;
use serde_json::json;

use crate::run::{checked, solve, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Random trees with `2..=max-n` vertices, `k <= 3`, `d <= 2`, `ell <= 6`.
    Trees,
    /// 3x3 up to 4x4 grids, `k <= 3`, `d <= 2`, `ell <= 4`.
    Grids,
}

impl Suite {
    pub fn strategies(self) -> &'static [Strategy] {
        match self {
            Suite::Trees => &[Strategy::Bfs, Strategy::Tree, Strategy::Expanded, Strategy::Local, Strategy::Oracle],
            Suite::Grids => &[Strategy::Bfs, Strategy::Expanded, Strategy::Local, Strategy::Oracle],
        }
    }

    /// The instance for one seed. Placements that do not fit are redrawn
    /// from the same stream, so the mapping seed -> instance is fixed.
    pub fn instance(self, seed: u64, max_n: usize) -> Instance {
        let mut rng = seeded_rng(seed);
        loop {
            let (g, ell) = match self {
                Suite::Trees => (random_tree(rng.gen_range(2..=max_n.max(2)), &mut rng), rng.gen_range(0..=6)),
                Suite::Grids => (Graph::grid(rng.gen_range(3..=4), rng.gen_range(3..=4)), rng.gen_range(0..=4)),
            };
            let k = rng.gen_range(1..=3.min(g.n()));
            let d = rng.gen_range(1..=2);
            if let Some(inst) = random_instance(g, k, d, ell, &mut rng) {
                return inst;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub suite: Suite,
    pub first_seed: u64,
    pub seeds: u64,
    pub max_n: usize,
    pub node_budget: Option<u64>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub strategy: Strategy,
    pub decision: Option<bool>,
    pub makespan: Option<usize>,
    pub nodes: Option<u64>,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub ell: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
pub struct Disagreement {
    pub seed: u64,
    pub instance: Instance,
    pub row: Row,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<Row>,
    pub disagreement: Option<Disagreement>,
}

pub fn run_bench(cfg: &BenchConfig) -> BenchReport {
    let opts = SearchOptions { node_budget: cfg.node_budget, ..Default::default() };
    let mut rows = Vec::new();
    for seed in cfg.first_seed..cfg.first_seed + cfg.seeds {
        let inst = cfg.suite.instance(seed, cfg.max_n);
        let cells: Vec<Cell> = cfg
            .suite
            .strategies()
            .iter()
            .map(|&strategy| {
                let r = solve(&inst, strategy, &opts).expect("suite instances fit every strategy");
                if let Some(s) = r.outcome.as_feasible() {
                    checked(&inst, s).expect("bench schedules validate");
                }
                Cell {
                    strategy,
                    decision: r.outcome.decision(),
                    makespan: r.outcome.as_feasible().map(|s| s.makespan()),
                    nodes: r.expanded_nodes(),
                    millis: r.elapsed.as_secs_f64() * 1e3,
                }
            })
            .collect();
        let g = inst.graph();
        let row = Row { seed, n: g.n(), m: g.m(), k: inst.k(), d: inst.d(), ell: inst.ell(), cells };
        // Budget-limited cells carry no decision and are not compared.
        let decided: Vec<&Cell> = row.cells.iter().filter(|c| c.decision.is_some()).collect();
        let agree = decided.windows(2).all(|w| w[0].decision == w[1].decision && w[0].makespan == w[1].makespan);
        rows.push(row.clone());
        if !agree {
            return BenchReport { rows, disagreement: Some(Disagreement { seed, instance: inst, row }) };
        }
    }
    BenchReport { rows, disagreement: None }
}

fn cell_text(c: &Cell) -> String {
    let decision = match c.decision {
        Some(true) => "yes",
        Some(false) => "no",
        None => "budget",
    };
    let span = c.makespan.map_or("-".to_string(), |m| m.to_string());
    let nodes = c.nodes.map_or("-".to_string(), |n| n.to_string());
    format!("{decision}/{span}/{nodes}")
}

/// Fixed-width table; each strategy column reads `decision/makespan/nodes`.
pub fn render_table(suite: Suite, rows: &[Row], timing: bool) -> String {
    let mut out = String::new();
    let mut header = format!("{:>6} {:>4} {:>4} {:>2} {:>2} {:>3}", "seed", "n", "m", "k", "d", "ell");
    for s in suite.strategies() {
        write!(header, " {:>18}", s.name()).unwrap();
        if timing {
            write!(header, " {:>9}", "ms").unwrap();
        }
    }
    writeln!(out, "{header}").unwrap();
    for r in rows {
        write!(out, "{:>6} {:>4} {:>4} {:>2} {:>2} {:>3}", r.seed, r.n, r.m, r.k, r.d, r.ell).unwrap();
        for c in &r.cells {
            write!(out, " {:>18}", cell_text(c)).unwrap();
            if timing {
                write!(out, " {:>9.3}", c.millis).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// One JSON object per row.
pub fn render_json(rows: &[Row], timing: bool) -> String {
    let mut out = String::new();
    for r in rows {
        let cells: Vec<_> = r
            .cells
            .iter()
            .map(|c| {
                let mut v = json!({
                    "strategy": c.strategy.name(),
                    "decision": c.decision,
                    "makespan": c.makespan,
                    "expanded_nodes": c.nodes,
                });
                if timing {
                    v["wall_ms"] = json!(c.millis);
                }
                v
            })
            .collect();
        let row = json!({"seed": r.seed, "n": r.n, "m": r.m, "k": r.k, "d": r.d, "ell": r.ell, "cells": cells});
        writeln!(out, "{row}").unwrap();
    }
    out
}
