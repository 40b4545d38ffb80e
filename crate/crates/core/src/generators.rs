//! Synthetic instance families. Parallel edges are merged into integer
//! weights, so every generated graph is simple.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Default)]
struct Multigraph {
    mult: BTreeMap<(usize, usize), u64>,
}

impl Multigraph {
    fn add(&mut self, u: usize, v: usize) {
        *self.mult.entry((u.min(v), u.max(v))).or_insert(0) += 1;
    }

    fn remove(&mut self, u: usize, v: usize) {
        let key = (u.min(v), u.max(v));
        let m = self.mult.get_mut(&key).expect("edge present");
        *m -= 1;
        if *m == 0 {
            self.mult.remove(&key);
        }
    }

    fn add_cycle(&mut self, cycle: &[usize]) {
        for i in 0..cycle.len() {
            self.add(cycle[i], cycle[(i + 1) % cycle.len()]);
        }
    }

    fn build(self, n: usize) -> Result<WeightedGraph> {
        let triples: Vec<_> = self.mult.into_iter().map(|((u, v), m)| (u, v, m as f64)).collect();
        WeightedGraph::from_triples(n, &triples)
    }
}

fn bad(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

/// Union of `k` random perfect matchings between `{0..n/2}` and
/// `{n/2..n}`, then `l` of vertex 0's `k` matching edges removed.
pub fn bipartite_matchings<R: Rng + ?Sized>(n: usize, k: usize, l: usize, rng: &mut R) -> Result<WeightedGraph> {
    if n < 4 || n % 2 != 0 {
        return Err(bad(format!("bipartite_matchings needs an even n >= 4, got {n}")));
    }
    let half = n / 2;
    if !(1 <= l && l < k && k <= half) {
        return Err(bad(format!("bipartite_matchings needs 1 <= l < k <= n/2, got k={k}, l={l}, n={n}")));
    }
    let mut g = Multigraph::default();
    let mut right: Vec<usize> = (half..n).collect();
    // partner of vertex 0 in each matching
    let mut zero_partner = Vec::with_capacity(k);
    for _ in 0..k {
        right.shuffle(rng);
        for (u, &v) in right.iter().enumerate() {
            g.add(u, v);
        }
        zero_partner.push(right[0]);
    }
    for j in rand::seq::index::sample(rng, k, l) {
        g.remove(0, zero_partner[j]);
    }
    g.build(n)
}

/// `k` Hamiltonian cycles crossing `(S, T)` exactly twice, `k` Hamiltonian
/// cycles inside each of `S = {0..n/2}` and `T = {n/2..n}`, and
/// `floor(eps * k)` shorter cycles each inside `S` or `T`.
pub fn cycle_union<R: Rng + ?Sized>(n: usize, k: usize, eps: f64, rng: &mut R) -> Result<WeightedGraph> {
    if n < 6 || n % 2 != 0 {
        return Err(bad(format!("cycle_union needs an even n >= 6, got {n}")));
    }
    if k == 0 {
        return Err(bad("cycle_union needs k >= 1".into()));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(bad(format!("cycle_union needs a finite eps >= 0, got {eps}")));
    }
    let half = n / 2;
    let mut s: Vec<usize> = (0..half).collect();
    let mut t: Vec<usize> = (half..n).collect();
    let mut g = Multigraph::default();
    for _ in 0..k {
        s.shuffle(rng);
        t.shuffle(rng);
        let cycle: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
        g.add_cycle(&cycle);
    }
    for _ in 0..k {
        s.shuffle(rng);
        g.add_cycle(&s);
        t.shuffle(rng);
        g.add_cycle(&t);
    }
    let max_len = (half - 1).max(3);
    let small = (eps * k as f64).floor() as usize;
    for _ in 0..small {
        let len = rng.gen_range(3..=max_len);
        let side = if rng.gen_bool(0.5) { &mut s } else { &mut t };
        let (picked, _) = side.partial_shuffle(rng, len);
        g.add_cycle(picked);
    }
    g.build(n)
}

/// Two unit-weight cliques on `{0..c}` and `{c..2c}` joined by the bridge
/// `(c-1, c)`. The bridge is the unique minimum cut.
pub fn dumbbell(clique_size: usize, bridge_weight: f64) -> Result<WeightedGraph> {
    let c = clique_size;
    if c < 3 {
        return Err(bad(format!("dumbbell needs clique_size >= 3, got {c}")));
    }
    if !(bridge_weight > 0.0 && bridge_weight < (c - 1) as f64) {
        return Err(bad(format!("dumbbell bridge weight {bridge_weight} must lie in (0, {})", c - 1)));
    }
    let mut triples = Vec::with_capacity(c * (c - 1) + 1);
    for base in [0, c] {
        for u in 0..c {
            for v in u + 1..c {
                triples.push((base + u, base + v, 1.0));
            }
        }
    }
    triples.push((c - 1, c, bridge_weight));
    WeightedGraph::from_triples(2 * c, &triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cut_from_side;
    use crate::oracle::{brute_force_min_cut, stoer_wagner};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bipartite_small_example() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = bipartite_matchings(4, 2, 1, &mut rng).unwrap();
        let deg = g.degrees();
        assert_eq!(deg[0], 1.0);
        // vertex 0's surviving partner lost nothing; the removed edge's
        // other endpoint drops to 1 as well
        assert_eq!(deg.iter().filter(|&&d| d == 1.0).count(), 2);
        assert_eq!(deg.iter().sum::<f64>(), 2.0 * 3.0);
        assert_eq!(stoer_wagner(&g).unwrap().weight, 1.0);
    }

    #[test]
    fn bipartite_totals_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(n, k, l) in &[(10, 3, 1), (20, 5, 2), (600, 100, 10)] {
            let g = bipartite_matchings(n, k, l, &mut rng).unwrap();
            assert_eq!(g.total_weight(), (k * n / 2 - l) as f64);
            assert!(g.is_integral());
            assert_eq!(cut_from_side(&g, &[0]).unwrap().weight, (k - l) as f64);
            if n == 600 {
                assert!(stoer_wagner(&g).unwrap().weight <= 90.0);
            }
        }
    }

    #[test]
    fn bipartite_isolating_zero_is_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, k, l) in &[(40, 8, 2), (200, 30, 5), (100, 20, 3)] {
            let g = bipartite_matchings(n, k, l, &mut rng).unwrap();
            assert_eq!(stoer_wagner(&g).unwrap().weight, (k - l) as f64);
        }
    }

    #[test]
    fn bipartite_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(bipartite_matchings(4, 1, 0, &mut rng).is_err());
        assert!(bipartite_matchings(5, 2, 1, &mut rng).is_err());
        assert!(bipartite_matchings(8, 5, 1, &mut rng).is_err());
        assert!(bipartite_matchings(8, 2, 2, &mut rng).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = bipartite_matchings(30, 6, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = bipartite_matchings(30, 6, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let a = cycle_union(30, 4, 0.5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = cycle_union(30, 4, 0.5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cycle_union_partition_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(n, k, eps) in &[(6, 1, 0.0), (6, 3, 1.0), (40, 5, 0.5), (500, 50, 0.5)] {
            let g = cycle_union(n, k, eps, &mut rng).unwrap();
            let s: Vec<usize> = (0..n / 2).collect();
            assert_eq!(cut_from_side(&g, &s).unwrap().weight, 2.0 * k as f64);
            assert!(g.is_connected());
            let small = (eps * k as f64).floor();
            let deg = g.degrees();
            assert!(deg.iter().all(|&d| d >= 4.0 * k as f64));
            if eps == 0.0 {
                assert_eq!(g.total_weight(), 2.0 * (k * n) as f64);
            } else {
                let extra = g.total_weight() - 2.0 * (k * n) as f64;
                assert!(extra >= 3.0 * small && extra <= small * ((n / 2 - 1).max(3)) as f64);
            }
        }
    }

    #[test]
    fn cycle_union_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(cycle_union(4, 1, 0.0, &mut rng).is_err());
        assert!(cycle_union(7, 1, 0.0, &mut rng).is_err());
        assert!(cycle_union(8, 0, 0.0, &mut rng).is_err());
        assert!(cycle_union(8, 1, -1.0, &mut rng).is_err());
    }

    #[test]
    fn dumbbell_examples() {
        let g = dumbbell(4, 1.0).unwrap();
        assert_eq!((g.n(), g.m()), (8, 13));
        let c = brute_force_min_cut(&g).unwrap();
        assert_eq!((c.weight, c.side.clone()), (1.0, vec![0, 1, 2, 3]));
        assert_eq!(brute_force_min_cut(&dumbbell(3, 0.5).unwrap()).unwrap().weight, 0.5);
        assert!(dumbbell(4, 3.0).is_err());
        assert!(dumbbell(2, 0.5).is_err());
        assert!(dumbbell(4, 0.0).is_err());
    }

    #[test]
    fn dumbbell_minimum_is_unique() {
        let g = dumbbell(4, 1.0).unwrap();
        let n = g.n();
        let minima = (0u32..1 << (n - 1))
            .filter(|&mask| {
                let side: Vec<usize> = std::iter::once(0).chain((1..n).filter(|v| mask >> (v - 1) & 1 == 1)).collect();
                side.len() < n && cut_from_side(&g, &side).unwrap().weight == 1.0
            })
            .count();
        assert_eq!(minima, 1);
    }
}
