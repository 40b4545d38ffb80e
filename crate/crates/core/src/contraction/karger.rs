//! Kruskal-style Karger: contract edges in exponential-clock order with a
//! union-find, stopping when the target number of metavertices remains.

use std::time::Instant;

use rand::Rng;

use super::{boosted_weights, TrialStats};
use crate::error::{Error, Result};
use crate::graph::{cut_from_side, ContractionState, Cut, WeightedGraph};
use crate::prediction::Prediction;
use crate::sampler::exponential_clock_order;

fn contract_until<R: Rng + ?Sized>(
    state: &mut ContractionState<'_>,
    weights: &[f64],
    stop_at: usize,
    rng: &mut R,
    stats: &mut TrialStats,
) -> Result<()> {
    if state.live_count() <= stop_at {
        return Ok(());
    }
    let order = match exponential_clock_order(weights, rng) {
        Ok(o) => o,
        // every cut weighs 0; any contraction order is as good as another
        Err(Error::AllZeroWeights) => (0..weights.len()).collect(),
        Err(e) => return Err(e),
    };
    for i in order {
        stats.edge_samples += 1;
        if state.is_live_edge(i) {
            state.contract_edge(i)?;
            stats.contractions += 1;
            if state.live_count() == stop_at {
                break;
            }
        }
    }
    Ok(())
}

/// One Karger trial: contract until two metavertices remain and return
/// the cut between them.
pub fn karger_trial<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<(Cut, TrialStats)> {
    let start = Instant::now();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut stats = TrialStats::default();
    let mut state = ContractionState::new(g);
    contract_until(&mut state, &g.weights(), 2, rng, &mut stats)?;
    let cut = state.two_way_cut()?;
    stats.wall_time = start.elapsed();
    Ok((cut, stats))
}

/// First phase of Boosted Karger: contract by `w_B` until `threshold`
/// metavertices remain (no-op when `threshold >= n`).
pub fn boosted_phase_one<'g, R: Rng + ?Sized>(
    g: &'g WeightedGraph,
    pred: &Prediction,
    boost: f64,
    threshold: usize,
    rng: &mut R,
) -> Result<(ContractionState<'g>, TrialStats)> {
    let weights = boosted_weights(g, pred, boost)?;
    if threshold < 2 {
        return Err(Error::InvalidParameter(format!("threshold t={threshold} below 2")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut stats = TrialStats::default();
    let mut state = ContractionState::new(g);
    contract_until(&mut state, &weights, threshold, rng, &mut stats)?;
    Ok((state, stats))
}

/// Boosted Karger: the boosted first phase down to `threshold`
/// metavertices, then plain Karger with the original weights on the
/// induced simple graph.
pub fn boosted_karger_trial<R: Rng + ?Sized>(
    g: &WeightedGraph,
    pred: &Prediction,
    boost: f64,
    threshold: usize,
    rng: &mut R,
) -> Result<(Cut, TrialStats)> {
    let start = Instant::now();
    let (state, mut stats) = boosted_phase_one(g, pred, boost, threshold, rng)?;
    stats.phase_switch_vertices = state.live_count();
    let cut = if state.live_count() == 2 {
        state.two_way_cut()?
    } else {
        let induced = state.induced_simple_graph()?;
        let (meta_cut, s2) = karger_trial(&induced.graph, rng)?;
        stats.edge_samples += s2.edge_samples;
        stats.contractions += s2.contractions;
        cut_from_side(g, &induced.lift_side(&meta_cut.side))?.normalized(g.n())
    };
    stats.wall_time = start.elapsed();
    Ok((cut, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::dumbbell;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_triples(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn sigma3(p: f64, n: f64) -> f64 {
        3.0 * (p * (1.0 - p) / n).sqrt()
    }

    #[test]
    fn two_vertices_single_edge() {
        let g = WeightedGraph::from_triples(2, &[(0, 1, 2.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (c, s) = karger_trial(&g, &mut rng).unwrap();
        assert_eq!((c.side, c.weight, s.contractions), (vec![0], 2.5, 0));
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = WeightedGraph::from_triples(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(karger_trial(&g, &mut rng).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn triangle_cuts_are_uniform() {
        let g = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 30_000;
        let mut counts = [0usize; 3];
        for _ in 0..trials {
            let (c, _) = karger_trial(&g, &mut rng).unwrap();
            assert!(c.is_valid_for(&g));
            // the singleton block identifies the cut
            let single = if c.side.len() == 1 { c.side[0] } else { (0..3).find(|v| !c.contains(*v)).unwrap() };
            counts[single] += 1;
        }
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 1.0 / 3.0).abs() <= sigma3(1.0 / 3.0, trials as f64), "{f}");
        }
    }

    #[test]
    fn dumbbell_meets_classical_bound() {
        let g = dumbbell(4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 20_000;
        let hits = (0..trials).filter(|_| karger_trial(&g, &mut rng).unwrap().0.weight == 1.0).count();
        let p = 1.0 / 28.0;
        assert!(hits as f64 / trials as f64 >= p - sigma3(p, trials as f64));
    }

    #[test]
    fn perfect_prediction_boost_finds_bridge() {
        let g = dumbbell(5, 1.0).unwrap();
        let bridge = g.edges().iter().position(|e| e.u < 5 && e.v >= 5).unwrap();
        let pred = Prediction::from_edges(&g, [bridge]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let runs = 1000;
        let hits = (0..runs)
            .filter(|_| boosted_karger_trial(&g, &pred, 10.0, 2, &mut rng).unwrap().0.weight == 1.0)
            .count();
        assert!(hits as f64 / runs as f64 >= 0.9, "{hits}");
    }

    #[test]
    fn threshold_above_n_runs_phase_two_only() {
        let g = dumbbell(4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (c, s) = boosted_karger_trial(&g, &Prediction::new(), 8.0, 50, &mut rng).unwrap();
        assert!(c.is_valid_for(&g));
        assert_eq!(s.phase_switch_vertices, 8);
        assert!(boosted_karger_trial(&g, &Prediction::new(), 0.5, 2, &mut rng).is_err());
    }

    #[test]
    fn phase_one_stops_at_threshold() {
        let g = dumbbell(6, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (state, s) = boosted_phase_one(&g, &Prediction::new(), 4.0, 5, &mut rng).unwrap();
        assert_eq!(state.live_count(), 5);
        assert_eq!(s.contractions, 7);
    }
}
