//! The `mapfcc` command line: file formats, strategy selection, plan
//! rendering, reduction and benchmarking.
//!
//! Exit codes: 0 feasible / valid / done, 1 infeasible / invalid plan,
//! 2 node budget exceeded, 3 input error, 4 solver disagreement in `bench`.

pub mod bench;
pub mod format;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mapfcc_core::expanded::{build_time_expanded, emit_mso_structure, treewidth_upper_bound, EdgeLabel};
use mapfcc_core::reductions::{audit_reduction, reduce_mcc};
use mapfcc_core::search::SearchOptions;
use mapfcc_core::{validate_schedule, ValidationWarning};

use bench::{render_json, render_table, run_bench, BenchConfig, Suite};
use run::{checked, dot_frames, exit_code, render_json_lines, render_plan, solve, OutputFormat, Strategy};

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

/// Default node budget when `--budget` is not given.
pub const BUDGET_ENV: &str = "MAPFCC_NODE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "mapfcc", version, about = "Multiagent path finding under a communication constraint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the plan.
    #[command(alias = "run")]
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        /// Expanded-node budget (default: $MAPFCC_NODE_BUDGET, else unlimited).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plan)]
        format: OutputFormat,
        /// Directory for `dot-frames` output (default: all frames on stdout).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Include wall-clock time in the output.
        #[arg(long)]
        timing: bool,
    },
    /// Check a plan against an instance.
    Validate { instance: PathBuf, plan: PathBuf },
    /// Reduce a multicolored-clique input to an instance with d = 1, ell = 3.
    Reduce {
        mcc: PathBuf,
        /// Prefix the output with the structural audit as comments.
        #[arg(long)]
        audit: bool,
    },
    /// Describe the time-expanded graph.
    Expand {
        instance: PathBuf,
        /// Print the labeled structure and the sentence (`msogi 1`).
        #[arg(long)]
        emit_mso: bool,
    },
    /// Run all strategies on seeded instances and compare decisions.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::Trees)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// Largest tree size in the tree suite.
        #[arg(long, default_value_t = 40)]
        max_n: usize,
        #[arg(long)]
        budget: Option<u64>,
        /// One JSON object per row instead of the table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        timing: bool,
        /// Where to write the counterexample instance on disagreement.
        #[arg(long)]
        repro: Option<PathBuf>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn input_error(msg: impl std::fmt::Display) -> Self {
        Output { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

fn read(path: &Path) -> Result<String, Output> {
    std::fs::read_to_string(path).map_err(|e| Output::input_error(format!("{}: {e}", path.display())))
}

fn budget(flag: Option<u64>, env: Option<String>) -> Result<Option<u64>, Output> {
    let value = match (flag, env) {
        (Some(b), _) => Some(b),
        (None, Some(s)) => Some(
            s.trim().parse::<u64>().map_err(|_| Output::input_error(format!("{BUDGET_ENV}={s} is not a number")))?,
        ),
        (None, None) => None,
    };
    if value == Some(0) {
        return Err(Output::input_error("node budget must be positive"));
    }
    Ok(value)
}

pub fn execute(cli: Cli) -> Output {
    let env_budget = std::env::var(BUDGET_ENV).ok();
    let result = match cli.command {
        Command::Solve { instance, strategy, budget: b, format, out_dir, timing } => {
            cmd_solve(&instance, strategy, budget(b, env_budget), format, out_dir.as_deref(), timing)
        }
        Command::Validate { instance, plan } => cmd_validate(&instance, &plan),
        Command::Reduce { mcc, audit } => cmd_reduce(&mcc, audit),
        Command::Expand { instance, emit_mso } => cmd_expand(&instance, emit_mso),
        Command::Bench { suite, seed, seeds, max_n, budget: b, json, timing, repro } => {
            budget(b, env_budget).and_then(|node_budget| {
                let cfg = BenchConfig { suite, first_seed: seed, seeds, max_n, node_budget, timing };
                cmd_bench(&cfg, json, repro.as_deref())
            })
        }
    };
    result.unwrap_or_else(|e| e)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Output::ok(0, text)
            } else {
                Output { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn cmd_solve(
    path: &Path,
    strategy: Strategy,
    budget: Result<Option<u64>, Output>,
    format: OutputFormat,
    out_dir: Option<&Path>,
    timing: bool,
) -> Result<Output, Output> {
    let node_budget = budget?;
    let inst = format::parse_instance(&read(path)?).map_err(Output::input_error)?;
    let opts = SearchOptions { node_budget, ..Default::default() };
    let solved = solve(&inst, strategy, &opts).map_err(Output::input_error)?;
    if let Some(s) = solved.outcome.as_feasible() {
        checked(&inst, s).map_err(|e| Output { code: EXIT_INPUT, stdout: String::new(), stderr: e })?;
    }
    let code = exit_code(&solved.outcome);
    let text = match format {
        OutputFormat::Plan => render_plan(&solved),
        OutputFormat::JsonLines => render_json_lines(&solved, timing),
        OutputFormat::DotFrames => match solved.outcome.as_feasible() {
            None => render_plan(&solved),
            Some(s) => {
                let frames = dot_frames(&inst, s);
                match out_dir {
                    None => frames.concat(),
                    Some(dir) => {
                        std::fs::create_dir_all(dir)
                            .map_err(|e| Output::input_error(format!("{}: {e}", dir.display())))?;
                        let mut listing = String::new();
                        for (turn, frame) in frames.iter().enumerate() {
                            let file = dir.join(format!("turn_{turn:03}.dot"));
                            std::fs::write(&file, frame)
                                .map_err(|e| Output::input_error(format!("{}: {e}", file.display())))?;
                            listing.push_str(&format!("{}\n", file.display()));
                        }
                        listing
                    }
                }
            }
        },
    };
    let text = if timing && format == OutputFormat::Plan {
        format!("{text}# wall {:.3} ms\n", solved.elapsed.as_secs_f64() * 1e3)
    } else {
        text
    };
    Ok(Output::ok(code, text))
}

fn cmd_validate(inst_path: &Path, plan_path: &Path) -> Result<Output, Output> {
    let inst = format::parse_instance(&read(inst_path)?).map_err(Output::input_error)?;
    let plan = format::parse_plan(&read(plan_path)?).map_err(Output::input_error)?;
    let report = validate_schedule(&inst, &plan).map_err(Output::input_error)?;
    let mut out = String::new();
    for v in &report.violations {
        out.push_str(&format!("{v}\n"));
    }
    for w in &report.warnings {
        match w {
            ValidationWarning::InitialDisconnected => {
                out.push_str("warning: initial configuration is not d-connected\n")
            }
        }
    }
    if !report.within_budget {
        out.push_str(&format!("makespan {} exceeds ell {}\n", report.makespan, inst.ell()));
    }
    if report.accepted() {
        out.push_str(&format!("valid, makespan {}\n", report.makespan));
        Ok(Output::ok(EXIT_FEASIBLE, out))
    } else {
        out.push_str("invalid\n");
        Ok(Output::ok(EXIT_INFEASIBLE, out))
    }
}

fn cmd_reduce(path: &Path, audit: bool) -> Result<Output, Output> {
    let mcc = format::parse_mcc(&read(path)?).map_err(Output::input_error)?;
    let (inst, layout) = reduce_mcc(&mcc).map_err(Output::input_error)?;
    let mut out = String::new();
    if audit {
        let a = audit_reduction(&mcc, &inst, &layout);
        out.push_str(&format!("# classes {}, class size {}\n", mcc.k(), mcc.class_size()));
        out.push_str(&format!("# agents {}, clique {}\n", a.agent_count, a.clique_size));
        let dist: Vec<String> = a.distances.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("# start-target distances {}\n", dist.join(" ")));
        out.push_str(&format!("# audit {}\n", if a.passed(mcc.k()) { "pass" } else { "FAIL" }));
    }
    out.push_str(&format::print_instance(&inst));
    Ok(Output::ok(EXIT_FEASIBLE, out))
}

fn cmd_expand(path: &Path, emit_mso: bool) -> Result<Output, Output> {
    let inst = format::parse_instance(&read(path)?).map_err(Output::input_error)?;
    let gi = build_time_expanded(&inst);
    if emit_mso {
        return Ok(Output::ok(EXIT_FEASIBLE, emit_mso_structure(&gi, inst.d())));
    }
    let mut out = format!("vertices {}\n", gi.vertex_count());
    for label in EdgeLabel::ALL {
        out.push_str(&format!("{} {}\n", label.name(), gi.label_count(label)));
    }
    let (w, _) = treewidth_upper_bound(inst.graph());
    out.push_str(&format!("base width {w}\n"));
    out.push_str(&format!("lifted width bound {}\n", 3 * (inst.ell() + 1) * (w + 1) - 1));
    Ok(Output::ok(EXIT_FEASIBLE, out))
}

fn cmd_bench(cfg: &BenchConfig, json: bool, repro: Option<&Path>) -> Result<Output, Output> {
    let report = run_bench(cfg);
    let stdout =
        if json { render_json(&report.rows, cfg.timing) } else { render_table(cfg.suite, &report.rows, cfg.timing) };
    let Some(bad) = report.disagreement else {
        return Ok(Output::ok(EXIT_FEASIBLE, stdout));
    };
    let counterexample = format::print_instance(&bad.instance);
    let mut stderr = format!("strategies disagree on seed {}\n", bad.seed);
    if let Some(path) = repro {
        std::fs::write(path, &counterexample).map_err(|e| Output::input_error(format!("{}: {e}", path.display())))?;
        stderr.push_str(&format!("counterexample written to {}\n", path.display()));
    }
    stderr.push_str(&counterexample);
    Ok(Output { code: EXIT_DISAGREEMENT, stdout, stderr })
}
