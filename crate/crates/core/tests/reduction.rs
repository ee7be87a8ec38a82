use mapfcc_core::gen::seeded_rng;
use mapfcc_core::reductions::{audit_reduction, brute_clique, reduce_mcc, MccInstance};
use mapfcc_core::search::{solve_bfs, SearchOptions};
use mapfcc_core::Graph;
use rand::Rng;

fn random_mcc(k: usize, size: usize, p: f64, rng: &mut impl Rng) -> MccInstance {
    let classes: Vec<Vec<usize>> = (0..k).map(|i| (i * size..(i + 1) * size).collect()).collect();
    let mut edges = Vec::new();
    for u in 0..k * size {
        for v in u + 1..k * size {
            if u / size != v / size && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    MccInstance::new(Graph::from_edges_unchecked(k * size, edges), classes).unwrap()
}

#[test]
fn biconditional_on_random_instances() {
    let mut rng = seeded_rng(11);
    let mut yes = 0;
    for _ in 0..30 {
        let size = rng.gen_range(1..=3);
        let mcc = random_mcc(3, size, 0.5, &mut rng);
        let (inst, layout) = reduce_mcc(&mcc).unwrap();
        assert!(audit_reduction(&mcc, &inst, &layout).passed(3));
        let expected = brute_clique(&mcc).is_some();
        let got = solve_bfs(&inst, &SearchOptions::default()).outcome;
        assert_eq!(got.decision(), Some(expected), "{mcc:?}");
        yes += expected as usize;
    }
    assert!(yes > 0);
}
