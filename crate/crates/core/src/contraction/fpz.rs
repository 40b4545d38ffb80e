//! FPZ and Boosted FPZ.
//!
//! Both recursions are walked depth first over a single mutable state:
//! each level checkpoints, contracts one sampled edge, recurses, and rolls
//! back before deciding (with probability `1 - q`) whether to run the
//! same-size call again. The returned cut is the lightest leaf, the
//! earliest one winning ties, which is what repeatedly keeping `C1` over
//! an equal `C2` yields.
//!
//! The first (boosted) phase works on the base multigraph through a
//! [`PrefixWeightIndex`] over `w_B` and a [`RollbackDsu`]; edges drawn
//! after their endpoints merged are deleted and redrawn. At the threshold
//! the live edges are pruned into a dense simple graph on at most `t`
//! metavertices, and plain FPZ runs there on the original weights.

use std::time::Instant;

use rand::Rng;

use super::schedule::{unboosted_q, QSchedule};
use super::{boosted_weights, TrialStats};
use crate::dsu::RollbackDsu;
use crate::error::{Error, Result};
use crate::graph::{cut_from_side, Cut, WeightedGraph};
use crate::prediction::Prediction;
use crate::sampler::PrefixWeightIndex;

/// Lightest leaf seen so far, as a side over original vertices.
struct Best {
    weight: f64,
    side: Vec<usize>,
}

impl Best {
    fn offer(&mut self, weight: f64, side: impl FnOnce() -> Vec<usize>) {
        if weight < self.weight {
            self.weight = weight;
            self.side = side();
        }
    }
}

/// Dense simple graph on `k0` metavertices with LIFO contraction.
struct DenseFpz {
    k0: usize,
    adj: Vec<f64>,
    // degree of each live vertex; sampling a vertex by degree then a
    // neighbour by weight picks each edge proportionally to its weight
    degrees: PrefixWeightIndex,
    live: Vec<usize>,
    pos: Vec<usize>,
    dsu: RollbackDsu,
    adj_log: Vec<(usize, f64)>,
    // (adj log length, removed vertex, its slot in `live`)
    frames: Vec<(usize, usize, usize)>,
    members: Vec<Vec<usize>>,
}

impl DenseFpz {
    fn new(k0: usize, adj: Vec<f64>, members: Vec<Vec<usize>>) -> Result<Self> {
        let degrees: Vec<f64> = (0..k0).map(|a| adj[a * k0..(a + 1) * k0].iter().sum()).collect();
        Ok(Self {
            k0,
            adj,
            degrees: PrefixWeightIndex::new(&degrees)?,
            live: (0..k0).collect(),
            pos: (0..k0).collect(),
            dsu: RollbackDsu::new(k0),
            adj_log: Vec::new(),
            frames: Vec::new(),
            members,
        })
    }

    fn from_graph(g: &WeightedGraph) -> Result<Self> {
        let k0 = g.n();
        let mut adj = vec![0.0; k0 * k0];
        for e in g.edges() {
            adj[e.u * k0 + e.v] += e.w;
            adj[e.v * k0 + e.u] += e.w;
        }
        Self::new(k0, adj, (0..k0).map(|v| vec![v]).collect())
    }

    fn side_of(&self, a: usize) -> Vec<usize> {
        let root = self.dsu.find(a);
        let mut side: Vec<usize> = (0..self.k0)
            .filter(|&i| self.dsu.find(i) == root)
            .flat_map(|i| self.members[i].iter().copied())
            .collect();
        side.sort_unstable();
        side
    }

    /// Samples an edge and contracts it. Returns false when no positive
    /// weight is left among the live vertices.
    fn contract_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        if self.degrees.total() <= 0.0 {
            return Ok(false);
        }
        let a = self.degrees.sample(rng)?;
        let row = &self.adj[a * self.k0..(a + 1) * self.k0];
        let deg = self.degrees.weight(a);
        let mut u = rng.gen::<f64>() * deg;
        let mut b = usize::MAX;
        for &c in &self.live {
            let w = row[c];
            if c == a || w <= 0.0 {
                continue;
            }
            b = c;
            if u < w {
                break;
            }
            u -= w;
        }
        debug_assert!(b != usize::MAX);
        self.merge(a, b);
        Ok(true)
    }

    /// Merges `b` into `a`.
    fn merge(&mut self, a: usize, b: usize) {
        let k0 = self.k0;
        let slot = self.pos[b];
        self.frames.push((self.adj_log.len(), b, slot));
        let last = self.live.pop().expect("live list nonempty");
        if last != b {
            self.live[slot] = last;
            self.pos[last] = slot;
        }
        let mut deg = 0.0;
        for i in 0..self.live.len() {
            let c = self.live[i];
            if c == a {
                continue;
            }
            let add = self.adj[b * k0 + c];
            if add != 0.0 {
                self.adj_log.push((a * k0 + c, self.adj[a * k0 + c]));
                self.adj_log.push((c * k0 + a, self.adj[c * k0 + a]));
                let w = self.adj[a * k0 + c] + add;
                self.adj[a * k0 + c] = w;
                self.adj[c * k0 + a] = w;
            }
            deg += self.adj[a * k0 + c];
        }
        self.degrees.update(a, deg).expect("finite degree");
        self.degrees.delete(b).expect("index in range");
        self.dsu.union(a, b);
    }

    fn checkpoint(&mut self) -> (crate::dsu::DsuMark, crate::sampler::SamplerMark, usize) {
        (self.dsu.checkpoint(), self.degrees.checkpoint(), self.frames.len())
    }

    fn rollback(&mut self, mark: (crate::dsu::DsuMark, crate::sampler::SamplerMark, usize)) -> Result<()> {
        let (dm, sm, frames) = mark;
        while self.frames.len() > frames {
            let (log_len, b, slot) = self.frames.pop().expect("frame above mark");
            while self.adj_log.len() > log_len {
                let (i, old) = self.adj_log.pop().expect("log above frame");
                self.adj[i] = old;
            }
            if slot == self.live.len() {
                self.live.push(b);
            } else {
                let moved = self.live[slot];
                self.live.push(moved);
                self.pos[moved] = self.live.len() - 1;
                self.live[slot] = b;
            }
            self.pos[b] = slot;
        }
        self.degrees.rollback(sm)?;
        self.dsu.rollback(dm)
    }

    fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, best: &mut Best, stats: &mut TrialStats) -> Result<()> {
        let k = self.live.len();
        if k == 2 {
            let (a, b) = (self.live[0], self.live[1]);
            let w = self.adj[a * self.k0 + b];
            best.offer(w, || self.side_of(a));
            return Ok(());
        }
        let q = unboosted_q(k);
        loop {
            let mark = self.checkpoint();
            stats.edge_samples += 1;
            if !self.contract_random(rng)? {
                // no edges left between live metavertices: a weight-0 cut
                let a = self.live[0];
                best.offer(0.0, || self.side_of(a));
                self.rollback(mark)?;
                return Ok(());
            }
            stats.contractions += 1;
            self.run(rng, best, stats)?;
            self.rollback(mark)?;
            if rng.gen::<f64>() < q {
                return Ok(());
            }
            stats.branch_events += 1;
        }
    }
}

fn finish(g: &WeightedGraph, best: Best) -> Result<Cut> {
    Ok(cut_from_side(g, &best.side)?.normalized(g.n()))
}

/// FPZ: contract one edge sampled proportionally to weight and recurse;
/// with probability `2/n` also recurse again on the uncontracted graph,
/// keeping the lighter cut.
pub fn fpz<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<(Cut, TrialStats)> {
    let start = Instant::now();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut stats = TrialStats { phase_switch_vertices: g.n(), ..Default::default() };
    let mut engine = DenseFpz::from_graph(g)?;
    let mut best = Best { weight: f64::INFINITY, side: Vec::new() };
    engine.run(rng, &mut best, &mut stats)?;
    stats.wall_time = start.elapsed();
    Ok((finish(g, best)?, stats))
}

struct BoostedRun<'a, R: ?Sized> {
    g: &'a WeightedGraph,
    schedule: &'a QSchedule,
    dsu: RollbackDsu,
    sampler: PrefixWeightIndex,
    rng: &'a mut R,
    stats: TrialStats,
    best: Best,
    // scratch for the phase switch
    dense_index: Vec<usize>,
}

impl<R: Rng + ?Sized> BoostedRun<'_, R> {
    /// Draws until an edge between two metavertices comes up, deleting
    /// loops on the way, then contracts it.
    fn contract_random(&mut self) -> Result<bool> {
        while self.sampler.total() > 0.0 {
            let i = self.sampler.sample(self.rng)?;
            self.stats.edge_samples += 1;
            let e = self.g.edge(i);
            self.sampler.delete(i)?;
            if self.dsu.union(e.u, e.v) {
                self.stats.contractions += 1;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn zero_leaf(&mut self) {
        let root = self.dsu.find(0);
        let dsu = &self.dsu;
        let n = self.g.n();
        self.best.offer(0.0, || (0..n).filter(|&v| dsu.find(v) == root).collect());
    }

    /// Prunes the live edges into a dense simple graph and runs FPZ on it
    /// with the original weights.
    fn phase_switch(&mut self) -> Result<()> {
        let n = self.g.n();
        let k = self.dsu.components();
        if self.stats.phase_switch_vertices == 0 {
            self.stats.phase_switch_vertices = k;
        }
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(k);
        self.dense_index.iter_mut().for_each(|x| *x = usize::MAX);
        let mut label = vec![0usize; n];
        for v in 0..n {
            let r = self.dsu.find(v);
            if self.dense_index[r] == usize::MAX {
                self.dense_index[r] = members.len();
                members.push(Vec::new());
            }
            label[v] = self.dense_index[r];
            members[label[v]].push(v);
        }
        let mut adj = vec![0.0; k * k];
        for (i, e) in self.g.edges().iter().enumerate() {
            // deleted entries are loops already
            if self.sampler.weight(i) <= 0.0 {
                continue;
            }
            let (a, b) = (label[e.u], label[e.v]);
            if a != b {
                adj[a * k + b] += e.w;
                adj[b * k + a] += e.w;
            }
        }
        let mut dense = DenseFpz::new(k, adj, members)?;
        dense.run(self.rng, &mut self.best, &mut self.stats)
    }

    fn run(&mut self) -> Result<()> {
        let k = self.dsu.components();
        if k <= self.schedule.threshold() || k == 2 {
            return self.phase_switch();
        }
        let q = self.schedule.value(k);
        loop {
            let dm = self.dsu.checkpoint();
            let sm = self.sampler.checkpoint();
            if !self.contract_random()? {
                self.zero_leaf();
                self.sampler.rollback(sm)?;
                self.dsu.rollback(dm)?;
                return Ok(());
            }
            self.run()?;
            self.sampler.rollback(sm)?;
            self.dsu.rollback(dm)?;
            if self.rng.gen::<f64>() < q {
                return Ok(());
            }
            self.stats.branch_events += 1;
            self.stats.phase1_branch_events += 1;
        }
    }
}

/// Boosted FPZ. Above the schedule's threshold `t`, edges are sampled by
/// `w_B` and the extra same-size recursion happens with probability
/// `1 - q(k)`; at `t` or fewer metavertices it switches to [`fpz`] on the
/// pruned graph with the original weights.
pub fn boosted_fpz<R: Rng + ?Sized>(
    g: &WeightedGraph,
    pred: &Prediction,
    schedule: &QSchedule,
    rng: &mut R,
) -> Result<(Cut, TrialStats)> {
    let start = Instant::now();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let weights = boosted_weights(g, pred, schedule.boost())?;
    let mut run = BoostedRun {
        g,
        schedule,
        dsu: RollbackDsu::new(g.n()),
        sampler: PrefixWeightIndex::new(&weights)?,
        rng,
        stats: TrialStats::default(),
        best: Best { weight: f64::INFINITY, side: Vec::new() },
        dense_index: vec![usize::MAX; g.n()],
    };
    run.run()?;
    let mut stats = run.stats;
    let cut = finish(g, run.best)?;
    stats.wall_time = start.elapsed();
    Ok((cut, stats))
}
