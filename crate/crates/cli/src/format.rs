//! Text formats: instances (`mapfcc 1`), multicolored-clique inputs
//! (`mcc k`) and plans (`plan 1`).
//!
//! All three are line based. `#` starts a comment, blank lines are ignored
//! and tokens are separated by any whitespace.
//!
//! ```text
//! mapfcc 1
//! grid 4 4          # or: graph n m, then m lines `u v`
//! agents 2
//! 0 3
//! 4 7
//! d 1
//! ell 9
//! ```
//!
//! ```text
//! mcc 3             # number of classes
//! class 0 1         # one line per class: its H-vertices
//! class 2
//! class 3
//! edge 0 2          # H-edges, any number
//! ```
//!
//! A plan lists one configuration per line, agent positions in agent order:
//!
//! ```text
//! plan 1
//! k 2
//! 0 4
//! 1 5
//! ```

use std::fmt::Write as _;

use mapfcc_core::reductions::{MccInstance, ReductionError};
use mapfcc_core::{Agent, Configuration, Graph, GraphError, Instance, ModelError, Schedule};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Eof(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = body.split_whitespace().collect();
                (!tokens.is_empty()).then_some((i + 1, tokens))
            })
            .collect();
        Lines { lines, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        let line = self.lines.get(self.pos).cloned().ok_or_else(|| ParseError::Eof(format!("expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, t)| t[0])
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.lines.get(self.pos) {
            Some((line, tokens)) => Err(syntax(*line, format!("unexpected trailing line `{}`", tokens.join(" ")))),
            None => Ok(()),
        }
    }

    /// A line `keyword a b ..` with exactly `arity` integer arguments.
    fn keyword(&mut self, keyword: &str, arity: usize) -> Result<(usize, Vec<usize>), ParseError> {
        let (line, tokens) = self.next(&format!("`{keyword}`"))?;
        if tokens[0] != keyword {
            return Err(syntax(line, format!("expected `{keyword}`, found `{}`", tokens[0])));
        }
        let args = numbers(line, &tokens[1..])?;
        if args.len() != arity {
            return Err(syntax(line, format!("`{keyword}` takes {arity} argument(s), found {}", args.len())));
        }
        Ok((line, args))
    }

    fn pair(&mut self, what: &str) -> Result<(usize, usize, usize), ParseError> {
        let (line, tokens) = self.next(what)?;
        let v = numbers(line, &tokens)?;
        if v.len() != 2 {
            return Err(syntax(line, format!("expected two integers ({what}), found {}", v.len())));
        }
        Ok((line, v[0], v[1]))
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn numbers(line: usize, tokens: &[&str]) -> Result<Vec<usize>, ParseError> {
    tokens
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| syntax(line, format!("`{t}` is not a non-negative integer"))))
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let (line, version) = lines.keyword("mapfcc", 1)?;
    if version[0] != 1 {
        return Err(syntax(line, format!("unsupported format version {}", version[0])));
    }

    let graph = match lines.peek_keyword() {
        Some("grid") => {
            let (line, v) = lines.keyword("grid", 2)?;
            if v[0] == 0 || v[1] == 0 {
                return Err(syntax(line, "grid dimensions must be positive"));
            }
            Graph::grid(v[0], v[1])
        }
        _ => {
            let (line, v) = lines.keyword("graph", 2)?;
            let (n, m) = (v[0], v[1]);
            if n == 0 {
                return Err(syntax(line, "graph needs at least one vertex"));
            }
            let mut edges = Vec::with_capacity(m);
            for _ in 0..m {
                let (line, u, v) = lines.pair("edge")?;
                if u >= n || v >= n {
                    return Err(syntax(line, format!("edge {u}-{v} has an endpoint outside 0..{n}")));
                }
                if u == v {
                    return Err(syntax(line, format!("self-loop on vertex {u}")));
                }
                edges.push((u, v));
            }
            Graph::from_edges(n, edges)?
        }
    };

    let (line, v) = lines.keyword("agents", 1)?;
    if v[0] == 0 {
        return Err(syntax(line, "instance needs at least one agent"));
    }
    let mut agents = Vec::with_capacity(v[0]);
    for _ in 0..v[0] {
        let (line, start, target) = lines.pair("start target")?;
        if start >= graph.n() || target >= graph.n() {
            return Err(syntax(line, format!("agent {start}->{target} leaves the graph")));
        }
        agents.push(Agent { start, target });
    }
    let (_, d) = lines.keyword("d", 1)?;
    let (_, ell) = lines.keyword("ell", 1)?;
    lines.finish()?;
    Ok(Instance::new(graph, agents, d[0], ell[0])?)
}

/// Always uses the explicit `graph` form, so grids print as edge lists.
pub fn print_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut out = String::new();
    writeln!(out, "mapfcc 1").unwrap();
    writeln!(out, "graph {} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    writeln!(out, "agents {}", inst.k()).unwrap();
    for a in inst.agents() {
        writeln!(out, "{} {}", a.start, a.target).unwrap();
    }
    writeln!(out, "d {}", inst.d()).unwrap();
    writeln!(out, "ell {}", inst.ell()).unwrap();
    out
}

pub fn parse_mcc(text: &str) -> Result<MccInstance, ParseError> {
    let mut lines = Lines::new(text);
    let (_, k) = lines.keyword("mcc", 1)?;
    let mut classes = Vec::with_capacity(k[0]);
    for _ in 0..k[0] {
        let (line, tokens) = lines.next("`class`")?;
        if tokens[0] != "class" {
            return Err(syntax(line, format!("expected `class`, found `{}`", tokens[0])));
        }
        classes.push(numbers(line, &tokens[1..])?);
    }
    let n = classes.iter().flatten().copied().max().map_or(0, |v| v + 1);
    let mut edges = Vec::new();
    while lines.peek_keyword().is_some() {
        let (line, v) = lines.keyword("edge", 2)?;
        if v[0] >= n || v[1] >= n {
            return Err(syntax(line, format!("edge {}-{} names a vertex in no class", v[0], v[1])));
        }
        edges.push((v[0], v[1]));
    }
    Ok(MccInstance::new(Graph::from_edges(n, edges)?, classes)?)
}

pub fn print_plan(sched: &Schedule) -> String {
    let mut out = format!("plan 1\nk {}\n", sched.k());
    for c in sched.steps() {
        let row: Vec<String> = c.positions().iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn parse_plan(text: &str) -> Result<Schedule, ParseError> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.keyword("plan", 1)?;
    if v[0] != 1 {
        return Err(syntax(line, format!("unsupported plan version {}", v[0])));
    }
    let (_, k) = lines.keyword("k", 1)?;
    let mut steps = Vec::new();
    while lines.peek_keyword().is_some() {
        let (line, tokens) = lines.next("configuration")?;
        let row = numbers(line, &tokens)?;
        if row.len() != k[0] {
            return Err(syntax(line, format!("configuration has {} positions, expected {}", row.len(), k[0])));
        }
        steps.push(Configuration(row));
    }
    Ok(Schedule::new(steps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LADDER_ISH: &str = "mapfcc 1\n# four lanes\ngrid 4 4\nagents 4\n0 3\n4 7\n8 11\n12 15\nd 1\nell 9\n";

    #[test]
    fn grid_shorthand() {
        let inst = parse_instance(LADDER_ISH).unwrap();
        assert_eq!(inst.graph().n(), 16);
        assert_eq!(inst.graph().m(), 24);
        assert_eq!(inst.k(), 4);
        assert_eq!((inst.d(), inst.ell()), (1, 9));
        assert_eq!(parse_instance(&print_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn errors_are_specific() {
        let dup = "mapfcc 1\ngrid 2 2\nagents 2\n0 1\n0 2\nd 1\nell 2\n";
        assert!(parse_instance(dup).unwrap_err().to_string().contains("duplicate start"));
        let none = "mapfcc 1\ngrid 2 2\nagents 0\nd 1\nell 2\n";
        assert!(parse_instance(none).unwrap_err().to_string().contains("at least one agent"));
        let loop_ = "mapfcc 1\ngraph 2 1\n1 1\nagents 1\n0 1\nd 1\nell 1\n";
        assert_eq!(parse_instance(loop_).unwrap_err().to_string(), "line 3: self-loop on vertex 1");
        let dup_edge = "mapfcc 1\ngraph 2 2\n0 1\n1 0\nagents 1\n0 1\nd 1\nell 1\n";
        assert!(parse_instance(dup_edge).unwrap_err().to_string().contains("duplicate edge"));
        let short = "mapfcc 1\ngraph 3 2\n0 1\n";
        assert!(matches!(parse_instance(short), Err(ParseError::Eof(_))));
        let junk = "mapfcc 1\ngrid 2 1\nagents 1\n0 1\nd 1\nell x\n";
        assert_eq!(parse_instance(junk).unwrap_err().to_string(), "line 6: `x` is not a non-negative integer");
    }

    #[test]
    fn mcc_and_plans() {
        let mcc = parse_mcc("mcc 3\nclass 0\nclass 1\nclass 2\nedge 0 1\nedge 1 2\nedge 0 2\n").unwrap();
        assert_eq!(mcc.k(), 3);
        assert_eq!(mcc.graph().m(), 3);
        assert!(parse_mcc("mcc 2\nclass 0 1\nclass 2\nedge 0 1\n").is_err());

        let plan = parse_plan("plan 1\nk 2\n0 1\n1 2 # moved\n").unwrap();
        assert_eq!(plan.makespan(), 1);
        assert_eq!(parse_plan(&print_plan(&plan)).unwrap(), plan);
        assert!(parse_plan("plan 1\nk 2\n0\n").is_err());
    }
}
