use crate::graph::{Graph, Vertex};

/// Number of vertex sets `U` with `|U| = size`, `u in U` and `G[U]` connected.
///
/// Each set is produced exactly once by include/exclude branching on an
/// extension frontier: a candidate is either added (its unseen neighbors join
/// the frontier) or banned for the rest of the branch.
pub fn count_connected_sets(g: &Graph, u: Vertex, size: usize) -> u64 {
    assert!(size >= 1 && size <= g.n(), "size must be in 1..=n");
    let mut state = vec![State::Free; g.n()];
    state[u] = State::InSet;
    let mut frontier = Vec::new();
    for &w in g.neighbors(u) {
        state[w] = State::Frontier;
        frontier.push(w);
    }
    let mut count = 0;
    grow(g, &mut state, &mut frontier, 1, size, &mut count);
    count
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Free,
    Frontier,
    InSet,
    Banned,
}

fn grow(g: &Graph, state: &mut [State], frontier: &mut Vec<Vertex>, len: usize, size: usize, count: &mut u64) {
    if len == size {
        *count += 1;
        return;
    }
    let Some(v) = frontier.pop() else {
        return;
    };

    // Branch 1: take v.
    state[v] = State::InSet;
    let mut added = Vec::new();
    for &w in g.neighbors(v) {
        if state[w] == State::Free {
            state[w] = State::Frontier;
            frontier.push(w);
            added.push(w);
        }
    }
    grow(g, state, frontier, len + 1, size, count);
    for &w in &added {
        state[w] = State::Free;
    }
    frontier.truncate(frontier.len() - added.len());

    // Branch 2: ban v.
    state[v] = State::Banned;
    grow(g, state, frontier, len, size, count);

    state[v] = State::Frontier;
    frontier.push(v);
}
