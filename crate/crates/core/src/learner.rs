//! Learning predictions from sample instances.
//!
//! For a budget `b`, the surrogate
//! `U^b(G, p) = n^(2 eta(G,p)) * ((b - <w*, p>) / w(C*))^2`
//! is convex over `K_b = {p in [0,1]^d : sum p <= b}`, so projected online
//! gradient descent with iterate averaging minimizes it. [`learn`] runs
//! that for every `b` on a grid and keeps the `b` whose averaged
//! prediction scores best on held-out samples.
//!
//! Vectors are indexed by vertex pairs `(u, v)`, `u < v`, in
//! lexicographic order (see [`pair_index`]).

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::oracle::stoer_wagner;
use crate::prediction::Prediction;

/// Number of vertex pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of pair `{u, v}` in the lexicographic pair order.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = (u.min(v), u.max(v));
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Largest merged pair weight, the quantity pre-scaling divides by.
pub fn max_pair_weight(g: &WeightedGraph) -> f64 {
    let mut w = vec![0.0; pair_count(g.n())];
    for e in g.edges() {
        w[pair_index(g.n(), e.u, e.v)] += e.w;
    }
    w.into_iter().fold(0.0, f64::max)
}

/// One sample graph as seen by the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateContext {
    n: usize,
    /// scaled pair weights of the graph
    weights: Vec<f64>,
    /// scaled pair weights restricted to the minimum cut
    w_star: Vec<f64>,
    cut_weight: f64,
}

impl SurrogateContext {
    /// Builds the context from the Stoer–Wagner cut of `g`, with all
    /// weights divided by `scale`.
    pub fn new(g: &WeightedGraph, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("weight scale {scale} must be positive")));
        }
        let n = g.n();
        let cut = stoer_wagner(g)?;
        if !(cut.weight > 0.0) {
            return Err(Error::ZeroWeightCut);
        }
        let mut weights = vec![0.0; pair_count(n)];
        let mut w_star = vec![0.0; pair_count(n)];
        for (i, e) in g.edges().iter().enumerate() {
            let k = pair_index(n, e.u, e.v);
            weights[k] += e.w / scale;
            if cut.crossing_edges.binary_search(&i).is_ok() {
                w_star[k] += e.w / scale;
            }
        }
        if weights.iter().any(|&w| w > 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "pair weight above 1 after dividing by {scale}; scale by the largest pair weight"
            )));
        }
        Ok(Self { n, weights, w_star, cut_weight: cut.weight / scale })
    }

    /// Context for a graph whose weights already lie in `[0, 1]`, or are
    /// scaled down by its largest pair weight otherwise.
    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        Self::new(g, max_pair_weight(g).max(1.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.w_star.len()
    }

    pub fn w_star(&self) -> &[f64] {
        &self.w_star
    }

    pub fn cut_weight(&self) -> f64 {
        self.cut_weight
    }

    /// Number of pairs crossing the minimum cut.
    pub fn cut_pairs(&self) -> usize {
        self.w_star.iter().filter(|&&w| w > 0.0).count()
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::InvalidParameter(format!("prediction has {} entries, expected {}", p.len(), self.dim())));
        }
        match p.iter().position(|x| !(0.0..=1.0).contains(x)) {
            Some(index) => Err(Error::OutsideBox { index, value: p[index] }),
            None => Ok(()),
        }
    }

    fn dot(&self, p: &[f64]) -> f64 {
        self.w_star.iter().zip(p).map(|(w, x)| w * x).sum()
    }

    /// `eta(G, p) = 1 - <w*, p> / w(C*)`.
    pub fn eta(&self, p: &[f64]) -> Result<f64> {
        self.check(p)?;
        Ok(1.0 - self.dot(p) / self.cut_weight)
    }

    /// `rho(G, p)`: predicted weight outside the cut over the cut weight.
    pub fn rho(&self, p: &[f64]) -> Result<f64> {
        self.check(p)?;
        let outside: f64 =
            self.weights.iter().zip(&self.w_star).zip(p).map(|((w, ws), x)| if *ws > 0.0 { 0.0 } else { w * x }).sum();
        Ok(outside / self.cut_weight)
    }

    /// `rho~(G, p) = (1 - w*)^T p / w(C*)`, an upper bound on `rho`.
    pub fn rho_tilde(&self, p: &[f64]) -> Result<f64> {
        self.check(p)?;
        Ok(self.w_star.iter().zip(p).map(|(w, x)| (1.0 - w) * x).sum::<f64>() / self.cut_weight)
    }

    fn scale(&self, p: &[f64]) -> f64 {
        let eta = 1.0 - self.dot(p) / self.cut_weight;
        (self.n as f64).powf(2.0 * eta)
    }

    /// `U^b(G, p)`.
    pub fn surrogate_value(&self, b: f64, p: &[f64]) -> Result<f64> {
        self.check(p)?;
        let r = (b - self.dot(p)) / self.cut_weight;
        Ok(self.scale(p) * r * r)
    }

    /// `grad U^b = -(2 n^(2 eta) / w(C*)) (ln n * r^2 + r) w*` with
    /// `r = (b - <w*, p>) / w(C*)`.
    pub fn surrogate_gradient(&self, b: f64, p: &[f64]) -> Result<Vec<f64>> {
        self.check(p)?;
        let r = (b - self.dot(p)) / self.cut_weight;
        let c = -2.0 * self.scale(p) / self.cut_weight * ((self.n as f64).ln() * r * r + r);
        Ok(self.w_star.iter().map(|w| c * w).collect())
    }

    /// The non-convex `U(G, p) = n^(2 eta) rho~^2`; evaluation only.
    pub fn surrogate_u(&self, p: &[f64]) -> Result<f64> {
        let rt = self.rho_tilde(p)?;
        Ok(self.scale(p) * rt * rt)
    }

    /// Converts a pair vector into a [`Prediction`].
    pub fn to_prediction(&self, p: &[f64]) -> Result<Prediction> {
        self.check(p)?;
        let mut pred = Prediction::new();
        let mut k = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                pred.set(u, v, p[k])?;
                k += 1;
            }
        }
        Ok(pred)
    }
}

/// Euclidean projection onto `K_b`: `y_i = clip(p_i - lambda, 0, 1)` with
/// `lambda >= 0` found by bisection so that `sum y <= b`.
pub fn project_kb(p: &[f64], b: f64) -> Vec<f64> {
    let clip = |lambda: f64| -> Vec<f64> { p.iter().map(|x| (x - lambda).clamp(0.0, 1.0)).collect() };
    let total = |y: &[f64]| -> f64 { y.iter().sum() };
    let y = clip(0.0);
    if total(&y) <= b {
        return y;
    }
    if b <= 0.0 {
        return vec![0.0; p.len()];
    }
    // sum is nonincreasing in lambda and reaches 0 at max(p)
    let (mut lo, mut hi) = (0.0, p.iter().fold(0.0f64, |a, &x| a.max(x)));
    let mut best = clip(hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let y = clip(mid);
        let s = total(&y);
        if s > b {
            lo = mid;
        } else {
            hi = mid;
            let done = b - s <= 1e-10;
            best = y;
            if done {
                break;
            }
        }
    }
    best
}

/// Step-size rule for projected gradient descent, `eta_t = D / (Q sqrt t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `Q` is the running maximum of observed gradient norms and
    /// `D = sqrt(min(d, 2b))`, the diameter of `K_b`.
    Practical,
    /// Fixed worst-case constants.
    Theory { q: f64, d: f64 },
}

/// Worst-case constants for `n` vertices, accuracy `epsilon`, confidence
/// `delta` and minimum cut weight `c_min` (after scaling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    /// `2 n^7 ln n / c_min^3`
    pub q: f64,
    /// `n`
    pub d: f64,
    /// `n^6 / c_min^2`, the range of the surrogate
    pub m: f64,
    /// `n^6 / (epsilon c_min^2)`
    pub grid_size: f64,
    /// `(m / epsilon)^2 ln(grid_size / delta)`
    pub validation_samples: f64,
}

impl TheoryConstants {
    pub fn new(n: usize, epsilon: f64, delta: f64, c_min: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(c_min > 0.0) || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "theory constants need n >= 2, epsilon > 0, 0 < delta < 1, c_min > 0 (got {n}, {epsilon}, {delta}, {c_min})"
            )));
        }
        let nf = n as f64;
        let m = nf.powi(6) / (c_min * c_min);
        let grid_size = m / epsilon;
        Ok(Self {
            q: 2.0 * nf.powi(7) * nf.ln() / c_min.powi(3),
            d: nf,
            m,
            grid_size,
            validation_samples: (m / epsilon).powi(2) * (grid_size / delta).ln(),
        })
    }

    pub fn step_rule(&self) -> StepRule {
        StepRule::Theory { q: self.q, d: self.d }
    }
}

/// Averaged iterate of one gradient-descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct OgdOutcome {
    pub b: f64,
    pub average: Vec<f64>,
    /// `U^b(G_t, p_t)` at every step, before the update.
    pub values: Vec<f64>,
}

/// Projected online gradient descent on `U^b(G_t, .)` over the samples in
/// order, starting from the projection of the zero vector. Returns the
/// average of the iterates `p_1..p_T`.
pub fn ogd_for_b(samples: &[SurrogateContext], b: f64, rule: StepRule) -> Result<OgdOutcome> {
    let Some(first) = samples.first() else {
        return Err(Error::NoSamples);
    };
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("budget b={b} must be finite and nonnegative")));
    }
    let d = first.dim();
    if samples.iter().any(|s| s.dim() != d) {
        return Err(Error::InvalidParameter("samples have different vertex counts".into()));
    }
    let (q_fixed, diameter) = match rule {
        StepRule::Practical => (None, (d as f64).min(2.0 * b).sqrt()),
        StepRule::Theory { q, d } => (Some(q), d),
    };
    let mut p = project_kb(&vec![0.0; d], b);
    let mut sum = vec![0.0; d];
    let mut values = Vec::with_capacity(samples.len());
    let mut q_run = 0.0f64;
    for (t, ctx) in samples.iter().enumerate() {
        for (s, x) in sum.iter_mut().zip(&p) {
            *s += x;
        }
        values.push(ctx.surrogate_value(b, &p)?);
        let grad = ctx.surrogate_gradient(b, &p)?;
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        q_run = q_run.max(norm);
        let q = q_fixed.unwrap_or(q_run);
        if q == 0.0 {
            continue;
        }
        let step = diameter / (q * ((t + 1) as f64).sqrt());
        let moved: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
        p = project_kb(&moved, b);
    }
    let t = samples.len() as f64;
    Ok(OgdOutcome { b, average: sum.into_iter().map(|s| s / t).collect(), values })
}

/// Grid of budgets.
#[derive(Debug, Clone, PartialEq)]
pub enum BudgetGrid {
    Explicit(Vec<f64>),
    /// `points` values evenly spaced over `[0, upper]`, where `upper` is
    /// twice the mean number of minimum-cut pairs over the training
    /// samples, or `n(n-1)/2` when `full` is set.
    Uniform { points: usize, full: bool },
}

impl BudgetGrid {
    fn resolve(&self, train: &[SurrogateContext]) -> Result<Vec<f64>> {
        match self {
            BudgetGrid::Explicit(v) if v.is_empty() => Err(Error::InvalidParameter("empty budget grid".into())),
            BudgetGrid::Explicit(v) => Ok(v.clone()),
            BudgetGrid::Uniform { points: 0, .. } => Err(Error::InvalidParameter("empty budget grid".into())),
            &BudgetGrid::Uniform { points, full } => {
                let upper = if full {
                    train[0].dim() as f64
                } else {
                    2.0 * train.iter().map(|c| c.cut_pairs() as f64).sum::<f64>() / train.len() as f64
                };
                if points == 1 {
                    return Ok(vec![upper]);
                }
                Ok((0..points).map(|i| upper * i as f64 / (points - 1) as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub rule: StepRule,
    pub grid: BudgetGrid,
    /// Training samples per budget, `T`.
    pub horizon: usize,
    /// Validation samples, `T'`.
    pub validation: usize,
    /// Lower bound on the scaled minimum cut weight of every sample.
    pub c_min: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            rule: StepRule::Practical,
            grid: BudgetGrid::Uniform { points: 20, full: false },
            horizon: 500,
            validation: 100,
            c_min: 0.0,
        }
    }
}

/// Source of i.i.d. sample graphs.
pub trait SampleSource {
    fn sample(&mut self, rng: &mut dyn rand::RngCore) -> Result<WeightedGraph>;
}

/// Always the same graph.
#[derive(Debug, Clone)]
pub struct PointMass(pub WeightedGraph);

impl SampleSource for PointMass {
    fn sample(&mut self, _rng: &mut dyn rand::RngCore) -> Result<WeightedGraph> {
        Ok(self.0.clone())
    }
}

/// A finite mixture; each draw picks a graph with probability
/// proportional to its weight.
#[derive(Debug, Clone)]
pub struct Mixture(pub Vec<(WeightedGraph, f64)>);

impl SampleSource for Mixture {
    fn sample(&mut self, rng: &mut dyn rand::RngCore) -> Result<WeightedGraph> {
        let total: f64 = self.0.iter().map(|(_, w)| w).sum();
        if self.0.is_empty() || !(total > 0.0) {
            return Err(Error::NoSamples);
        }
        let mut u = rng.gen::<f64>() * total;
        for (g, w) in &self.0 {
            if u < *w {
                return Ok(g.clone());
            }
            u -= w;
        }
        Ok(self.0.last().expect("nonempty").0.clone())
    }
}

/// Replays a fixed list in order, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct Cycled {
    graphs: Vec<WeightedGraph>,
    next: usize,
}

impl Cycled {
    pub fn new(graphs: Vec<WeightedGraph>) -> Self {
        Self { graphs, next: 0 }
    }
}

impl SampleSource for Cycled {
    fn sample(&mut self, _rng: &mut dyn rand::RngCore) -> Result<WeightedGraph> {
        if self.graphs.is_empty() {
            return Err(Error::NoSamples);
        }
        let g = self.graphs[self.next % self.graphs.len()].clone();
        self.next += 1;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub b: f64,
    /// Mean `U^b` of the averaged prediction on the validation samples;
    /// `None` when validation was skipped.
    pub mean_value: Option<f64>,
    pub chosen: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutcome {
    /// Learned pair vector.
    pub p: Vec<f64>,
    pub prediction: Prediction,
    pub b: f64,
    /// The factor all sample weights were divided by.
    pub scale: f64,
    pub report: Vec<BudgetReport>,
    /// Scaled contexts of the validation samples.
    pub validation: Vec<SurrogateContext>,
}

/// Builds contexts for samples sharing one scale, checking `c_min`.
pub fn contexts(graphs: &[WeightedGraph], scale: f64, c_min: f64) -> Result<Vec<SurrogateContext>> {
    let n = graphs.first().ok_or(Error::NoSamples)?.n();
    graphs
        .iter()
        .enumerate()
        .map(|(index, g)| {
            if g.n() != n {
                return Err(Error::InvalidParameter(format!("sample {index} has {} vertices, expected {n}", g.n())));
            }
            let ctx = SurrogateContext::new(g, scale)?;
            if ctx.cut_weight < c_min {
                return Err(Error::BelowCmin { index, weight: ctx.cut_weight, c_min });
            }
            Ok(ctx)
        })
        .collect()
}

/// Learns from pre-drawn training and validation graphs. Weights of all
/// samples are divided by the largest pair weight seen (when above 1).
pub fn learn_from(train: &[WeightedGraph], validation: &[WeightedGraph], cfg: &LearnerConfig) -> Result<LearnOutcome> {
    if train.is_empty() {
        return Err(Error::NoSamples);
    }
    let scale = train.iter().chain(validation).map(max_pair_weight).fold(1.0, f64::max);
    let train_ctx = contexts(train, scale, cfg.c_min)?;
    let val_ctx = if validation.is_empty() { Vec::new() } else { contexts(validation, scale, cfg.c_min)? };
    if val_ctx.first().is_some_and(|v| v.dim() != train_ctx[0].dim()) {
        return Err(Error::InvalidParameter("validation samples have a different vertex count".into()));
    }
    let grid = cfg.grid.resolve(&train_ctx)?;
    let runs: Vec<OgdOutcome> =
        grid.par_iter().map(|&b| ogd_for_b(&train_ctx, b, cfg.rule)).collect::<Result<Vec<_>>>()?;
    let skip = grid.len() == 1 || val_ctx.is_empty();
    let means: Vec<Option<f64>> = if skip {
        vec![None; grid.len()]
    } else {
        runs.par_iter()
            .map(|r| {
                let total = val_ctx.iter().map(|c| c.surrogate_value(r.b, &r.average)).sum::<Result<f64>>()?;
                Ok(Some(total / val_ctx.len() as f64))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut chosen = 0;
    for (i, m) in means.iter().enumerate() {
        if let (Some(m), Some(best)) = (m, means[chosen]) {
            if *m < best {
                chosen = i;
            }
        }
    }
    let report = grid
        .iter()
        .zip(&means)
        .enumerate()
        .map(|(i, (&b, &mean_value))| BudgetReport { b, mean_value, chosen: i == chosen })
        .collect();
    let p = runs[chosen].average.clone();
    Ok(LearnOutcome {
        prediction: train_ctx[0].to_prediction(&p)?,
        p,
        b: grid[chosen],
        scale,
        report,
        validation: val_ctx,
    })
}

/// Draws `cfg.horizon` training and `cfg.validation` validation samples
/// from `source` and learns from them.
pub fn learn<R: Rng>(source: &mut dyn SampleSource, cfg: &LearnerConfig, rng: &mut R) -> Result<LearnOutcome> {
    if cfg.horizon == 0 {
        return Err(Error::NoSamples);
    }
    let train = (0..cfg.horizon).map(|_| source.sample(rng)).collect::<Result<Vec<_>>>()?;
    let validation = (0..cfg.validation).map(|_| source.sample(rng)).collect::<Result<Vec<_>>>()?;
    learn_from(&train, &validation, cfg)
}
