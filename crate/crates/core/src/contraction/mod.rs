//! Randomized contraction algorithms: Karger, Boosted Karger, FPZ and
//! Boosted FPZ, plus the repeat-until-success driver.

mod fpz;
mod karger;
mod schedule;

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{weight_at_most, Cut, WeightedGraph};
use crate::prediction::Prediction;

pub use fpz::{boosted_fpz, fpz};
pub use karger::{boosted_karger_trial, boosted_phase_one, karger_trial};
pub use schedule::{survival_lower_bound, unboosted_q, QSchedule};

/// Operation counters for one trial (or a sum over trials).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialStats {
    /// Weighted draws, including redraws of edges that had become loops.
    pub edge_samples: u64,
    pub contractions: u64,
    /// Coin flips that triggered the extra same-size recursion.
    pub branch_events: u64,
    /// The subset of `branch_events` taken above the threshold.
    pub phase1_branch_events: u64,
    /// Live metavertices when the second phase began (0 if it never did).
    pub phase_switch_vertices: usize,
    pub wall_time: Duration,
}

impl TrialStats {
    pub fn accumulate(&mut self, other: &TrialStats) {
        self.edge_samples += other.edge_samples;
        self.contractions += other.contractions;
        self.branch_events += other.branch_events;
        self.phase1_branch_events += other.phase1_branch_events;
        self.phase_switch_vertices = self.phase_switch_vertices.max(other.phase_switch_vertices);
        self.wall_time += other.wall_time;
    }
}

/// `w_B(e) = (1 + (B - 1)(1 - p_e)) w(e)` for every edge.
pub fn boosted_weights(g: &WeightedGraph, pred: &Prediction, boost: f64) -> Result<Vec<f64>> {
    if !(boost >= 1.0) || !boost.is_finite() {
        return Err(Error::BoostBelowOne(boost));
    }
    Ok(g.edges().iter().map(|e| (1.0 + (boost - 1.0) * (1.0 - pred.get(e.u, e.v))) * e.w).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Karger,
    BoostedKarger { boost: f64, threshold: usize },
    Fpz,
    BoostedFpz { schedule: QSchedule },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Karger => "karger",
            Algorithm::BoostedKarger { .. } => "boosted-karger",
            Algorithm::Fpz => "fpz",
            Algorithm::BoostedFpz { .. } => "boosted-fpz",
        }
    }

    pub fn is_boosted(&self) -> bool {
        matches!(self, Algorithm::BoostedKarger { .. } | Algorithm::BoostedFpz { .. })
    }

    /// Runs one trial.
    pub fn run<R: rand::Rng>(&self, g: &WeightedGraph, pred: Option<&Prediction>, rng: &mut R) -> Result<(Cut, TrialStats)> {
        let need_pred = || pred.ok_or_else(|| Error::InvalidParameter(format!("{} needs a prediction", self.name())));
        match *self {
            Algorithm::Karger => karger_trial(g, rng),
            Algorithm::BoostedKarger { boost, threshold } => boosted_karger_trial(g, need_pred()?, boost, threshold, rng),
            Algorithm::Fpz => fpz(g, rng),
            Algorithm::BoostedFpz { ref schedule } => boosted_fpz(g, need_pred()?, schedule, rng),
        }
    }
}

/// Independent stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct RepeatOutcome {
    /// 1-based index of the first trial reaching the target, if any.
    pub trials: Option<u64>,
    pub trials_run: u64,
    pub best: Cut,
    pub stats: TrialStats,
}

/// Runs independent trials (trial `i` on stream `trial_rng(seed, i)`)
/// until one returns a cut of weight at most `target_weight` or
/// `max_trials` have run.
pub fn repeat_until(
    algorithm: &Algorithm,
    g: &WeightedGraph,
    pred: Option<&Prediction>,
    target_weight: f64,
    max_trials: u64,
    seed: u64,
) -> Result<RepeatOutcome> {
    if max_trials == 0 {
        return Err(Error::InvalidParameter("max_trials must be at least 1".into()));
    }
    let mut stats = TrialStats::default();
    let mut best: Option<Cut> = None;
    for i in 0..max_trials {
        let mut rng = trial_rng(seed, i);
        let (cut, s) = algorithm.run(g, pred, &mut rng)?;
        stats.accumulate(&s);
        let hit = weight_at_most(cut.weight, target_weight);
        if best.as_ref().map_or(true, |b| cut.weight < b.weight) {
            best = Some(cut);
        }
        if hit {
            return Ok(RepeatOutcome { trials: Some(i + 1), trials_run: i + 1, best: best.unwrap(), stats });
        }
    }
    Ok(RepeatOutcome { trials: None, trials_run: max_trials, best: best.unwrap(), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::dumbbell;
    use crate::oracle::stoer_wagner;

    #[test]
    fn infinite_target_needs_one_trial() {
        let g = dumbbell(4, 1.0).unwrap();
        let out = repeat_until(&Algorithm::Karger, &g, None, f64::INFINITY, 10, 1).unwrap();
        assert_eq!(out.trials, Some(1));
    }

    #[test]
    fn boosted_without_prediction_errors() {
        let g = dumbbell(4, 1.0).unwrap();
        let algo = Algorithm::BoostedKarger { boost: 4.0, threshold: 2 };
        assert!(matches!(repeat_until(&algo, &g, None, 1.0, 1, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = dumbbell(5, 1.0).unwrap();
        let target = stoer_wagner(&g).unwrap().weight;
        let pred = Prediction::new();
        for algo in [
            Algorithm::Karger,
            Algorithm::Fpz,
            Algorithm::BoostedKarger { boost: 3.0, threshold: 4 },
            Algorithm::BoostedFpz { schedule: QSchedule::new(3.0, 0.0, 1.0, 5).unwrap() },
        ] {
            let a = repeat_until(&algo, &g, Some(&pred), target, 500, 42).unwrap();
            let b = repeat_until(&algo, &g, Some(&pred), target, 500, 42).unwrap();
            assert_eq!(a.trials, b.trials);
            assert_eq!(a.best, b.best);
            let (mut sa, mut sb) = (a.stats, b.stats);
            sa.wall_time = Duration::ZERO;
            sb.wall_time = Duration::ZERO;
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn boosted_weights_formula() {
        let g = WeightedGraph::from_triples(3, &[(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let mut p = Prediction::new();
        p.set(0, 1, 0.25).unwrap();
        assert_eq!(boosted_weights(&g, &p, 5.0).unwrap(), vec![(1.0 + 4.0 * 0.75) * 2.0, 5.0]);
        assert!(boosted_weights(&g, &p, 0.9).is_err());
    }
}
