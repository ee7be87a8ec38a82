//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines always reach stdout; any FAIL makes the process exit 1.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use mapfcc_core::expanded::{
    build_time_expanded, check_properties, evaluate_formula, lift_tree_decomposition, paths_to_schedule,
    schedule_to_paths, solve_disjoint_paths, treewidth_upper_bound, Assignment, EdgeRef, PathsWitness, PROPERTY_COUNT,
};
use mapfcc_core::gen::{connected_graphs, ladder_instance, random_instance, random_tree, seeded_rng};
use mapfcc_core::reductions::{audit_reduction, brute_clique, reduce_mcc, MccInstance};
use mapfcc_core::search::{oracle_solve, solve_bfs, Outcome, SearchOptions};
use mapfcc_core::treeprune::solve_tree;
use mapfcc_core::{validate_schedule, Graph, Instance, Schedule};
use rand::seq::SliceRandom;
use rand::Rng;

/// Feasible schedules gathered by criteria 1-3 for the witness checks.
type Pool = Vec<(Instance, Schedule)>;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn valid(inst: &Instance, s: &Schedule) -> bool {
    validate_schedule(inst, s).is_ok_and(|r| r.accepted())
}

fn criterion1(pool: &mut Pool) -> Verdict {
    let mut slowest = Duration::ZERO;
    let mut run = |inst: &Instance| {
        let clock = Instant::now();
        let r = solve_bfs(inst, &SearchOptions::default());
        slowest = slowest.max(clock.elapsed());
        r.outcome
    };
    let tight = ladder_instance(1, 3);
    let loose = ladder_instance(1, 9);
    let wide = ladder_instance(6, 3);
    let a = run(&tight);
    let b = run(&loose);
    let c = run(&wide);

    let mut ok = matches!(a, Outcome::Infeasible(_));
    let mut detail = format!("(d=1,ell=3) {}", if ok { "infeasible" } else { "NOT infeasible" });
    match b.feasible() {
        Some(s) if valid(&loose, &s) => {
            detail += &format!("; (d=1,ell=9) makespan {}", s.makespan());
            pool.push((loose, s));
        }
        _ => {
            ok = false;
            detail += "; (d=1,ell=9) no valid schedule";
        }
    }
    match c.feasible() {
        Some(s) if valid(&wide, &s) && s.makespan() == 3 => {
            detail += "; (d=6,ell=3) makespan 3";
            pool.push((wide, s));
        }
        other => {
            ok = false;
            detail += &format!("; (d=6,ell=3) got {:?}", other.map(|s| s.makespan()));
        }
    }
    ok &= slowest < Duration::from_secs(10);
    verdict(ok, format!("{detail}; slowest run {:.1} ms", slowest.as_secs_f64() * 1e3))
}

/// Every ordered placement of `k` distinct starts and `k` distinct targets.
fn placements(n: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..n).filter(|v| !t.contains(v)).map(|v| [t.clone(), vec![v]].concat()).collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }
    let all = tuples(n, k);
    let mut out = Vec::new();
    for s in &all {
        for t in &all {
            out.push(s.iter().copied().zip(t.iter().copied()).collect());
        }
    }
    out
}

struct Criterion2 {
    verdict: Verdict,
    /// Feasible cases with the disjoint-paths witness, for criterion 5.
    witnesses: Vec<(Instance, PathsWitness)>,
}

fn criterion2(pool: &mut Pool) -> Criterion2 {
    const CAP: usize = 200;
    let clock = Instant::now();
    let opts = SearchOptions::default();
    let mut rng = seeded_rng(2);
    let (mut cases, mut feasible, mut failures) = (0usize, 0usize, Vec::new());
    let mut witnesses = Vec::new();
    let mut graphs = 0;
    for n in 1..=5 {
        for g in connected_graphs(n) {
            graphs += 1;
            let mut place: Vec<Vec<(usize, usize)>> = (1..=2.min(n)).flat_map(|k| placements(n, k)).collect();
            if place.len() > CAP {
                place = place.choose_multiple(&mut rng, CAP).cloned().collect();
                place.sort();
            }
            for p in &place {
                for d in 1..=2 {
                    for ell in 0..=4 {
                        let inst = Instance::from_pairs(g.clone(), p, d, ell).expect("distinct placement");
                        cases += 1;
                        let bfs = solve_bfs(&inst, &opts).outcome;
                        let paths = solve_disjoint_paths(&inst, &opts).outcome;
                        let oracle = oracle_solve(&inst, None);
                        let decisions = [bfs.decision(), paths.decision(), oracle.decision()];
                        if decisions.iter().any(Option::is_none) || decisions.iter().any(|x| *x != decisions[0]) {
                            failures.push(format!("decisions {decisions:?} on {inst:?}"));
                            continue;
                        }
                        let (Some(b), Some(w), Some(o)) = (bfs.feasible(), paths.feasible(), oracle.feasible()) else {
                            continue;
                        };
                        feasible += 1;
                        let gi = build_time_expanded(&inst);
                        let Ok(from_paths) = paths_to_schedule(&gi, &w) else {
                            failures.push(format!("bad witness on {inst:?}"));
                            continue;
                        };
                        let from_paths = from_paths.trimmed();
                        let spans = [b.makespan(), from_paths.makespan(), o.makespan()];
                        let clean = valid(&inst, &b) && valid(&inst, &from_paths) && valid(&inst, &o);
                        if !clean || spans.iter().any(|&s| s != spans[0]) {
                            failures.push(format!("makespans {spans:?} (valid {clean}) on {inst:?}"));
                        }
                        pool.push((inst.clone(), b));
                        witnesses.push((inst, w));
                    }
                }
            }
        }
    }
    let elapsed = clock.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(300);
    let mut detail = format!(
        "{graphs} graphs, {cases} cases, {feasible} feasible, {} disagreements, {:.1} s",
        failures.len(),
        elapsed.as_secs_f64()
    );
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    Criterion2 { verdict: verdict(ok, detail), witnesses }
}

fn criterion3(pool: &mut Pool) -> Verdict {
    let mut rng = seeded_rng(3);
    let (mut done, mut pruned, mut feasible, mut failures) = (0, 0, 0, Vec::new());
    while done < 300 {
        let n = rng.gen_range(2..=40);
        let tree = random_tree(n, &mut rng);
        let k = rng.gen_range(1..=3.min(n));
        let d = rng.gen_range(1..=2);
        let ell = rng.gen_range(0..=6);
        let Some(inst) = random_instance(tree, k, d, ell, &mut rng) else { continue };
        done += 1;
        let r = match solve_tree(&inst, &SearchOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{e} on {inst:?}"));
                continue;
            }
        };
        if r.pruned.graph().n() < n {
            pruned += 1;
        }
        let oracle = oracle_solve(&inst, None);
        if r.pruned.graph().max_degree() > 3 * k {
            failures.push(format!("degree {} > 3k on {inst:?}", r.pruned.graph().max_degree()));
        }
        if r.result.outcome.decision() != oracle.decision() || oracle.decision().is_none() {
            failures.push(format!(
                "tree {:?} vs oracle {:?} on {inst:?}",
                r.result.outcome.decision(),
                oracle.decision()
            ));
        }
        if let Outcome::Feasible(s) = r.result.outcome {
            feasible += 1;
            pool.push((inst, s));
        }
    }
    let mut detail = format!("300 trees, {pruned} pruned, {feasible} feasible, {} disagreements", failures.len());
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    verdict(failures.is_empty(), detail)
}

/// Deletes or moves one element of the witness.
fn mutate(inst: &Instance, a: &Assignment, rng: &mut impl Rng) -> (Assignment, &'static str) {
    let gi = build_time_expanded(inst);
    let mut m = a.clone();
    let s: Vec<EdgeRef> = a.s.iter().copied().collect();
    let nonempty: Vec<usize> = (0..a.x.len()).filter(|&i| !a.x[i].is_empty()).collect();
    loop {
        match rng.gen_range(0..4) {
            0 if !s.is_empty() => {
                m.s.remove(s.choose(rng).unwrap());
                return (m, "delete edge");
            }
            1 => {
                let i = *nonempty.choose(rng).expect("witness layers are occupied");
                let v = *a.x[i].iter().collect::<Vec<_>>().choose(rng).unwrap();
                m.x[i].remove(v);
                return (m, "delete vertex");
            }
            2 => {
                let i = *nonempty.choose(rng).unwrap();
                let v = *a.x[i].iter().collect::<Vec<_>>().choose(rng).unwrap();
                let free: Vec<usize> =
                    (0..inst.graph().n()).map(|b| gi.vertex(b, i)).filter(|w| !a.x[i].contains(w)).collect();
                let Some(&w) = free.choose(rng) else { continue };
                m.x[i].remove(v);
                m.x[i].insert(w);
                return (m, "move vertex");
            }
            3 if !s.is_empty() => {
                let outside: Vec<EdgeRef> = gi.edges().filter(|e| !a.s.contains(e)).collect();
                let Some(&f) = outside.choose(rng) else { continue };
                m.s.remove(s.choose(rng).unwrap());
                m.s.insert(f);
                return (m, "move edge");
            }
            _ => {}
        }
    }
}

fn criterion4(pool: &Pool) -> Verdict {
    let mut failures = Vec::new();
    let mut assignments = Vec::with_capacity(pool.len());
    for (inst, sched) in pool {
        let gi = build_time_expanded(inst);
        let back = schedule_to_paths(&gi, sched).and_then(|w| Ok((paths_to_schedule(&gi, &w)?, w)));
        match back {
            Ok((s, w)) => {
                if s != sched.padded(inst.ell()) {
                    failures.push(format!("round trip changed the schedule on {inst:?}"));
                }
                let a = w.assignment(&gi);
                if check_properties(&gi, &a.s, &a.x, inst.d()) != [true; PROPERTY_COUNT] {
                    failures.push(format!("witness fails a property on {inst:?}"));
                }
                assignments.push(a);
            }
            Err(e) => failures.push(format!("{e} on {inst:?}")),
        }
    }
    let round_trips = pool.len();

    let mut rng = seeded_rng(4);
    let (mut unflipped, mut disagree) = (0, 0);
    let mut kinds: BTreeSet<&str> = BTreeSet::new();
    for _ in 0..1000 {
        let idx = rng.gen_range(0..pool.len());
        let (inst, a) = (&pool[idx].0, &assignments[idx]);
        let (m, kind) = mutate(inst, a, &mut rng);
        kinds.insert(kind);
        let gi = build_time_expanded(inst);
        let props = check_properties(&gi, &m.s, &m.x, inst.d());
        let formula = evaluate_formula(&gi, &m.s, &m.x, inst.d());
        if props.iter().all(|&p| p) {
            unflipped += 1;
        }
        let first_false = props.iter().position(|&p| !p).map(|i| i + 1);
        let formula_first = formula.failed.map(|name| name[3..].parse::<usize>().unwrap());
        if formula.holds != props.iter().all(|&p| p) || first_false != formula_first {
            disagree += 1;
            if failures.len() < 3 {
                failures.push(format!("{kind}: properties {props:?}, formula {formula:?}"));
            }
        }
    }
    let ok = failures.is_empty() && unflipped == 0 && disagree == 0 && !pool.is_empty();
    let mut detail = format!(
        "{round_trips} round trips; 1000 mutations ({}), {unflipped} unflipped, {disagree} formula disagreements",
        kinds.into_iter().collect::<Vec<_>>().join(", ")
    );
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    verdict(ok, detail)
}

fn criterion5(witnesses: &[(Instance, PathsWitness)]) -> Verdict {
    let (mut failures, mut max_slack) = (Vec::new(), usize::MAX);
    for (inst, w) in witnesses {
        let gi = build_time_expanded(inst);
        let (wh, td) = treewidth_upper_bound(inst.graph());
        let bound = 3 * (inst.ell() + 1) * (wh + 1) - 1;
        match lift_tree_decomposition(&td, &gi, w) {
            Ok(lifted) => {
                let pairs = (0..gi.pair_count()).map(|p| gi.pair(p));
                if let Err(e) = lifted.validate(gi.vertex_count(), pairs) {
                    failures.push(format!("{e} on {inst:?}"));
                } else if lifted.width() > bound {
                    failures.push(format!("width {} > {bound} on {inst:?}", lifted.width()));
                } else {
                    max_slack = max_slack.min(bound - lifted.width());
                }
            }
            Err(e) => failures.push(format!("{e} on {inst:?}")),
        }
    }
    let mut detail = format!("{} lifts, {} failures, tightest slack {max_slack}", witnesses.len(), failures.len());
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    verdict(failures.is_empty() && !witnesses.is_empty(), detail)
}

/// Classes `0..sizes[0]`, then the next `sizes[1]` ids, and so on; bit `b` of
/// `mask` selects the `b`-th cross-class pair in lexicographic order.
fn mcc_from_mask(sizes: &[usize], mask: u64) -> MccInstance {
    let mut classes = Vec::new();
    let mut next = 0;
    for &s in sizes {
        classes.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let class_of = |v: usize| classes.iter().position(|c| c.contains(&v)).unwrap();
    let pairs: Vec<(usize, usize)> = (0..next)
        .flat_map(|u| (u + 1..next).map(move |v| (u, v)))
        .filter(|&(u, v)| class_of(u) != class_of(v))
        .collect();
    let edges = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e);
    MccInstance::new(Graph::from_edges_unchecked(next, edges), classes.clone()).expect("valid classes")
}

fn cross_pairs(sizes: &[usize]) -> usize {
    (0..sizes.len()).flat_map(|i| (i + 1..sizes.len()).map(move |j| (i, j))).map(|(i, j)| sizes[i] * sizes[j]).sum()
}

fn criterion6() -> Verdict {
    const CAP: usize = 500;
    let clock = Instant::now();
    let mut cases: Vec<MccInstance> = Vec::new();
    // Classes are interchangeable, so sorted size triples suffice.
    'outer: for sizes in [[1, 1, 1], [1, 1, 2], [1, 2, 2], [2, 2, 2]] {
        for mask in 0..1u64 << cross_pairs(&sizes) {
            if cases.len() == CAP {
                break 'outer;
            }
            cases.push(mcc_from_mask(&sizes, mask));
        }
    }
    let exhaustive = cases.len();
    let mut rng = seeded_rng(6);
    for _ in 0..100 {
        let p = rng.gen_range(0.2..0.8);
        let mask = (0..27).filter(|_| rng.gen_bool(p)).fold(0u64, |m, b| m | 1 << b);
        cases.push(mcc_from_mask(&[3, 3, 3], mask));
    }

    let (mut yes, mut failures) = (0, Vec::new());
    for mcc in &cases {
        let (inst, layout) = reduce_mcc(mcc).expect("k = 3");
        let audit = audit_reduction(mcc, &inst, &layout);
        if !audit.passed(3) || audit.clique_size != 6 || audit.agent_count != 6 {
            failures.push(format!("audit {audit:?}"));
        }
        let clique = brute_clique(mcc).is_some();
        let solved = solve_bfs(&inst, &SearchOptions::default()).outcome;
        yes += clique as usize;
        if solved.decision() != Some(clique) {
            failures.push(format!("clique {clique}, solver {:?} on {mcc:?}", solved.decision()));
        }
        if let Some(s) = solved.as_feasible() {
            if !valid(&inst, s) || s.makespan() != 3 {
                failures.push(format!("bad schedule on {mcc:?}"));
            }
        }
    }
    let elapsed = clock.elapsed();
    let mut detail = format!(
        "{exhaustive} exhaustive + 100 random, {yes} with a clique, {} failures, {:.1} s",
        failures.len(),
        elapsed.as_secs_f64()
    );
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    verdict(failures.is_empty() && elapsed < Duration::from_secs(600), detail)
}

fn criterion7() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_mapfcc");
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../instances");
    let dir = std::env::temp_dir().join(format!("mapfcc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let reduced = dir.join("triangle.mapfcc");
    let out = Command::new(bin).args(["reduce", &format!("{root}/triangle.mcc")]).output().unwrap();
    std::fs::write(&reduced, &out.stdout).unwrap();
    let reduced = reduced.to_str().unwrap().to_string();

    let ladder = format!("{root}/ladder.mapfcc");
    let runs: Vec<Vec<String>> = [
        vec!["solve", &ladder],
        vec!["solve", &ladder, "--format", "json-lines"],
        vec!["solve", &ladder, "--format", "dot-frames"],
        vec!["solve", &ladder, "--strategy", "expanded"],
        vec!["solve", &format!("{root}/ladder_ell3.mapfcc")],
        vec!["solve", &reduced],
        vec!["validate", &format!("{root}/swap.mapfcc"), &format!("{root}/swap.plan")],
        vec!["reduce", "--audit", &format!("{root}/triangle.mcc")],
        vec!["expand", "--emit-mso", &format!("{root}/ladder_ell3.mapfcc")],
        vec!["bench", "--suite", "trees", "--seeds", "30"],
        vec!["bench", "--suite", "grids", "--seeds", "15", "--json"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let mut failures = Vec::new();
    for args in &runs {
        let outputs: Vec<_> = (0..2).map(|_| Command::new(bin).args(args).output().unwrap()).collect();
        let same = outputs[0].stdout == outputs[1].stdout && outputs[0].status.code() == outputs[1].status.code();
        if !same || outputs[0].stdout.is_empty() {
            failures.push(args.join(" "));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let mut detail = format!("{} subcommand runs repeated, {} differed", runs.len(), failures.len());
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    verdict(failures.is_empty(), detail)
}

fn main() {
    let mut pool = Pool::new();
    let mut results = Vec::new();
    let mut record = |n: usize, v: Verdict| {
        println!("criterion {n}: {} - {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        results.push(v.ok);
    };
    record(1, criterion1(&mut pool));
    let c2 = criterion2(&mut pool);
    record(2, c2.verdict);
    record(3, criterion3(&mut pool));
    record(4, criterion4(&pool));
    record(5, criterion5(&c2.witnesses));
    record(6, criterion6());
    record(7, criterion7());
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
