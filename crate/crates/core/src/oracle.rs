//! Deterministic ground-truth minimum cuts.

use crate::error::{Error, Result};
use crate::graph::{cut_from_side, ContractionState, Cut, WeightedGraph};

pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Enumerates every proper side containing vertex 0. Ties go to the
/// lexicographically smallest side.
pub fn brute_force_min_cut(g: &WeightedGraph) -> Result<Cut> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLargeForBruteForce(n));
    }
    let full: u32 = (1u32 << (n - 1)) - 1;
    let side_of = |rest: u32| -> Vec<usize> {
        std::iter::once(0).chain((1..n).filter(|&v| rest & (1 << (v - 1)) != 0)).collect()
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    // bit (v-1) of `rest` marks vertex v on vertex 0's side
    for rest in 0..full {
        let inside = |v: usize| v == 0 || rest & (1 << (v - 1)) != 0;
        let w: f64 = g.edges().iter().filter(|e| inside(e.u) != inside(e.v)).map(|e| e.w).sum();
        let better = match &best {
            None => true,
            Some((bw, bs)) => w < *bw || (w == *bw && side_of(rest) < *bs),
        };
        if better {
            best = Some((w, side_of(rest)));
        }
    }
    let (_, side) = best.expect("n >= 2 gives at least one side");
    cut_from_side(g, &side)
}

/// Stoer–Wagner on the merged simple graph with dense arrays, `O(n^3)`.
///
/// A disconnected graph yields the component of vertex 0 as a weight-0
/// cut.
pub fn stoer_wagner(g: &WeightedGraph) -> Result<Cut> {
    let comps = g.components();
    if comps.components() > 1 {
        let root = comps.find(0);
        let side: Vec<usize> = (0..g.n()).filter(|&v| comps.find(v) == root).collect();
        return cut_from_side(g, &side);
    }
    let simple = ContractionState::new(g).induced_simple_graph()?.graph;
    let n = simple.n();
    let mut adj = vec![0.0f64; n * n];
    for e in simple.edges() {
        adj[e.u * n + e.v] += e.w;
        adj[e.v * n + e.u] += e.w;
    }
    // groups[v]: original vertices merged into v
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut key = vec![0.0f64; n];
    let mut added = vec![false; n];

    while active.len() > 1 {
        for &v in &active {
            key[v] = 0.0;
            added[v] = false;
        }
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let mut sel = usize::MAX;
            for &v in &active {
                if !added[v] && (sel == usize::MAX || key[v] > key[sel]) {
                    sel = v;
                }
            }
            added[sel] = true;
            if step + 1 == active.len() {
                prev = last;
                last = sel;
                break;
            }
            prev = last;
            last = sel;
            for &v in &active {
                if !added[v] {
                    key[v] += adj[sel * n + v];
                }
            }
        }
        let phase = key[last];
        if best.as_ref().map_or(true, |(w, _)| phase < *w) {
            best = Some((phase, groups[last].clone()));
        }
        // merge last into prev
        for &v in &active {
            if v != prev && v != last {
                adj[prev * n + v] += adj[last * n + v];
                adj[v * n + prev] = adj[prev * n + v];
            }
        }
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        active.retain(|&v| v != last);
    }
    let (_, side) = best.expect("n >= 2 runs at least one phase");
    Ok(cut_from_side(g, &side)?.normalized(g.n()))
}
