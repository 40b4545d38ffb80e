//! Experiment runner: generates or loads instances, computes ground
//! truth, builds predictions, runs repeat-until-success for every
//! algorithm and writes one CSV row per run.
//!
//! Configs are JSON:
//!
//! ```json
//! {
//!   "instances": [{"family": "bipartite", "n": 200, "k": 30, "l": 5}],
//!   "algorithms": ["karger", "boosted-karger"],
//!   "predictions": {"kind": "synthesized", "eta": [0.0, 0.5], "rho": [0.0, 10.0]},
//!   "repetitions": 10,
//!   "max_trials": 100000,
//!   "seed": 7
//! }
//! ```
//!
//! Rows come out in a fixed order (instance, algorithm, prediction cell,
//! repetition) whatever the thread count, and every random choice is
//! seeded from the master seed, so reruns reproduce the CSV except for
//! the `elapsed_ms` column.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contraction::{repeat_until, Algorithm, QSchedule};
use crate::error::{Error, Result};
use crate::generators::{bipartite_matchings, cycle_union, dumbbell};
use crate::graph::{cut_from_side, weights_equal, Cut, WeightedGraph};
use crate::oracle::{brute_force_min_cut, stoer_wagner};
use crate::prediction::{heuristic_predict, measure, synthesize, Prediction};

pub const CSV_HEADER: &str = "instance,algo,eta_target,eta,rho_target,rho_raw,B,t,seed,trial_count,found_weight,true_weight,edge_samples,contractions,branch_events,elapsed_ms";

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "PREDCUT_THREADS";

/// Instances up to this size are also solved by brute force.
const CROSS_CHECK_MAX_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSpec {
    Bipartite { n: usize, k: usize, l: usize },
    Cycles { n: usize, k: usize, eps: f64 },
    Dumbbell { clique: usize, bridge: f64 },
    File { path: PathBuf },
}

impl InstanceSpec {
    pub fn id(&self) -> String {
        match self {
            InstanceSpec::Bipartite { n, k, l } => format!("bipartite-{n}-{k}-{l}"),
            InstanceSpec::Cycles { n, k, eps } => format!("cycles-{n}-{k}-{eps}"),
            InstanceSpec::Dumbbell { clique, bridge } => format!("dumbbell-{clique}-{bridge}"),
            InstanceSpec::File { path } => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into())
            }
        }
    }

    /// Deterministic in `seed`; file instances ignore it.
    pub fn build(&self, seed: u64) -> Result<WeightedGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            &InstanceSpec::Bipartite { n, k, l } => bipartite_matchings(n, k, l, &mut rng),
            &InstanceSpec::Cycles { n, k, eps } => cycle_union(n, k, eps, &mut rng),
            &InstanceSpec::Dumbbell { clique, bridge } => dumbbell(clique, bridge),
            InstanceSpec::File { path } => WeightedGraph::read_file(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    Karger,
    BoostedKarger,
    Fpz,
    BoostedFpz,
}

impl AlgorithmName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Karger => "karger",
            AlgorithmName::BoostedKarger => "boosted-karger",
            AlgorithmName::Fpz => "fpz",
            AlgorithmName::BoostedFpz => "boosted-fpz",
        }
    }

    pub fn is_boosted(&self) -> bool {
        matches!(self, AlgorithmName::BoostedKarger | AlgorithmName::BoostedFpz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PredictionSpec {
    /// One cell per `(eta, rho)` pair.
    Synthesized { eta: Vec<f64>, rho: Vec<f64> },
    /// Sampled-Karger heuristic with `k` runs.
    Heuristic { k: usize },
    /// A fixed prediction file; only meaningful with file instances.
    File { path: PathBuf },
}

/// Algorithm parameters; unset values take the documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    /// Boost scalar `B`; default `n`.
    pub boost: Option<f64>,
    /// Boosted Karger threshold; default 2.
    pub karger_threshold: Option<usize>,
    /// Boosted FPZ threshold; default `max(5, ceil(sqrt m))`.
    pub fpz_threshold: Option<usize>,
    /// `eta` used by the boosted FPZ schedule; default the measured value.
    pub schedule_eta: Option<f64>,
    /// `rho` used by the boosted FPZ schedule; default the measured value.
    pub schedule_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<AlgorithmName>,
    #[serde(default)]
    pub predictions: Option<PredictionSpec>,
    #[serde(default)]
    pub parameters: Parameters,
    pub repetitions: usize,
    pub max_trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config; relative paths inside it resolve against the
    /// config file's directory.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for inst in &mut cfg.instances {
            if let InstanceSpec::File { path } = inst {
                fix(path);
            }
        }
        if let Some(PredictionSpec::File { path }) = &mut cfg.predictions {
            fix(path);
        }
        if let Some(out) = &mut cfg.output {
            fix(out);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.instances.is_empty() {
            return bad("no instances".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.max_trials == 0 {
            return bad("max_trials must be at least 1".into());
        }
        if self.algorithms.iter().any(|a| a.is_boosted()) && self.predictions.is_none() {
            return bad("boosted algorithms need a `predictions` section".into());
        }
        for inst in &self.instances {
            if let InstanceSpec::File { path } = inst {
                if !path.is_file() {
                    return bad(format!("instance file {} does not exist", path.display()));
                }
            }
            if inst.id().contains([',', '"', '\n']) {
                return bad(format!("instance id `{}` must not contain commas or quotes", inst.id()));
            }
        }
        match &self.predictions {
            Some(PredictionSpec::File { path }) if !path.is_file() => {
                return bad(format!("prediction file {} does not exist", path.display()))
            }
            Some(PredictionSpec::Synthesized { eta, rho }) => {
                if eta.is_empty() || rho.is_empty() {
                    return bad("synthesized predictions need nonempty eta and rho lists".into());
                }
                if let Some(e) = eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                    return bad(format!("eta target {e} outside [0,1]"));
                }
                if let Some(r) = rho.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
                    return bad(format!("rho target {r} must be finite and nonnegative"));
                }
            }
            Some(PredictionSpec::Heuristic { k: 0 }) => return bad("heuristic k must be at least 1".into()),
            _ => {}
        }
        let p = &self.parameters;
        if p.boost.is_some_and(|b| !(b >= 1.0)) {
            return bad("boost must be at least 1".into());
        }
        if p.karger_threshold.is_some_and(|t| t < 2) || p.fpz_threshold.is_some_and(|t| t < 2) {
            return bad("thresholds must be at least 2".into());
        }
        Ok(())
    }
}

/// Outcome of one repeat-until-success run.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialCount {
    Found(u64),
    NotFound,
    /// The cell could not run; the message went to the error list.
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub algo: String,
    pub eta_target: Option<f64>,
    pub eta: Option<f64>,
    pub rho_target: Option<f64>,
    pub rho_raw: Option<f64>,
    pub boost: Option<f64>,
    pub threshold: Option<usize>,
    pub seed: u64,
    pub trial_count: TrialCount,
    pub found_weight: Option<f64>,
    pub true_weight: f64,
    pub edge_samples: u64,
    pub contractions: u64,
    pub branch_events: u64,
    pub elapsed_ms: f64,
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl ResultRow {
    /// CSV line without the trailing newline. With `timing` unset the
    /// elapsed column is left empty.
    pub fn to_csv(&self, timing: bool) -> String {
        let trials = match self.trial_count {
            TrialCount::Found(t) => t.to_string(),
            TrialCount::NotFound => "NOT_FOUND".into(),
            TrialCount::Error => "ERROR".into(),
        };
        let elapsed = if timing { format!("{:.3}", self.elapsed_ms) } else { String::new() };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.algo,
            opt(&self.eta_target),
            opt(&self.eta),
            opt(&self.rho_target),
            opt(&self.rho_raw),
            opt(&self.boost),
            opt(&self.threshold),
            self.seed,
            trials,
            opt(&self.found_weight),
            self.true_weight,
            self.edge_samples,
            self.contractions,
            self.branch_events,
            elapsed
        )
    }
}

pub fn to_csv(rows: &[ResultRow], timing: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.to_csv(timing));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    /// Per-cell failures, `(instance, algorithm, message)`, in row order.
    pub errors: Vec<(String, String, String)>,
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(domain, cell, repetition)` under `master`.
pub fn derive_seed(master: u64, domain: u64, cell: u64, repetition: u64) -> u64 {
    mix(mix(mix(master ^ domain.wrapping_mul(0xA24B_AED4_963E_E407)) ^ cell) ^ repetition)
}

const DOMAIN_GRAPH: u64 = 1;
const DOMAIN_PREDICTION: u64 = 2;
const DOMAIN_TRIALS: u64 = 3;

/// Worker count: the explicit value, else the environment variable, else
/// rayon's default.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return if t == 0 { Err(Error::Config("--threads must be at least 1".into())) } else { Ok(Some(t)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::Config(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

struct Truth {
    graph: WeightedGraph,
    cut: Cut,
}

/// Prediction of one cell with its targets and measured profile.
struct PredCell {
    eta_target: Option<f64>,
    rho_target: Option<f64>,
    pred: Result<(Prediction, f64, f64)>,
}

fn ground_truth(id: &str, g: WeightedGraph) -> Result<Truth> {
    let cut = stoer_wagner(&g)?;
    if g.n() <= CROSS_CHECK_MAX_N {
        let brute = brute_force_min_cut(&g)?;
        if !weights_equal(brute.weight, cut.weight) {
            return Err(Error::OracleMismatch { instance: id.to_string(), sw: cut.weight, brute: brute.weight });
        }
    }
    Ok(Truth { graph: g, cut })
}

fn prediction_cells(spec: &Option<PredictionSpec>) -> Vec<(Option<f64>, Option<f64>)> {
    match spec {
        Some(PredictionSpec::Synthesized { eta, rho }) => {
            eta.iter().flat_map(|&e| rho.iter().map(move |&r| (Some(e), Some(r)))).collect()
        }
        Some(_) => vec![(None, None)],
        None => Vec::new(),
    }
}

fn build_prediction(spec: &PredictionSpec, truth: &Truth, target: (Option<f64>, Option<f64>), seed: u64) -> Result<(Prediction, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &truth.graph;
    let pred = match spec {
        PredictionSpec::Synthesized { .. } => {
            synthesize(g, &truth.cut, target.0.unwrap_or(0.0), target.1.unwrap_or(0.0), &mut rng)?
        }
        PredictionSpec::Heuristic { k } => heuristic_predict(g, *k, &mut rng)?,
        PredictionSpec::File { path } => Prediction::read_file(path, g.n())?,
    };
    let profile = measure(g, &truth.cut, &pred)?;
    Ok((pred, profile.eta, profile.rho_raw))
}

fn algorithm_for(name: AlgorithmName, params: &Parameters, g: &WeightedGraph, eta: f64, rho: f64) -> Result<Algorithm> {
    let boost = params.boost.unwrap_or(g.n() as f64);
    Ok(match name {
        AlgorithmName::Karger => Algorithm::Karger,
        AlgorithmName::Fpz => Algorithm::Fpz,
        AlgorithmName::BoostedKarger => {
            Algorithm::BoostedKarger { boost, threshold: params.karger_threshold.unwrap_or(2) }
        }
        AlgorithmName::BoostedFpz => {
            let t = params.fpz_threshold.unwrap_or_else(|| ((g.m() as f64).sqrt().ceil() as usize).max(5));
            let eta = params.schedule_eta.unwrap_or(eta).clamp(0.0, 1.0);
            let rho = params.schedule_rho.unwrap_or(rho);
            Algorithm::BoostedFpz { schedule: QSchedule::new(boost, eta, rho, t)? }
        }
    })
}

struct Job {
    instance: usize,
    algo: AlgorithmName,
    pred_cell: Option<usize>,
    rep: usize,
    cell: u64,
}

/// Runs the experiment on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let reps = cfg.repetitions;
    // instances and ground truth, one per (instance, repetition)
    let truth_jobs: Vec<(usize, usize)> =
        (0..cfg.instances.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
    let truths: Vec<Truth> = truth_jobs
        .par_iter()
        .map(|&(i, r)| {
            let spec = &cfg.instances[i];
            let g = spec.build(derive_seed(cfg.seed, DOMAIN_GRAPH, i as u64, r as u64))?;
            ground_truth(&spec.id(), g)
        })
        .collect::<Result<_>>()?;
    let truth = |i: usize, r: usize| &truths[i * reps + r];

    let cells = prediction_cells(&cfg.predictions);
    let pred_jobs: Vec<(usize, usize, usize)> = (0..cfg.instances.len())
        .flat_map(|i| (0..cells.len()).flat_map(move |c| (0..reps).map(move |r| (i, c, r))))
        .collect();
    let preds: Vec<PredCell> = pred_jobs
        .par_iter()
        .map(|&(i, c, r)| {
            let spec = cfg.predictions.as_ref().expect("cells imply a prediction spec");
            let cell = (i * cells.len() + c) as u64;
            let seed = derive_seed(cfg.seed, DOMAIN_PREDICTION, cell, r as u64);
            PredCell {
                eta_target: cells[c].0,
                rho_target: cells[c].1,
                pred: build_prediction(spec, truth(i, r), cells[c], seed),
            }
        })
        .collect();
    let pred = |i: usize, c: usize, r: usize| &preds[(i * cells.len() + c) * reps + r];

    let mut jobs = Vec::new();
    let mut cell = 0u64;
    for i in 0..cfg.instances.len() {
        for &algo in &cfg.algorithms {
            let pcs: Vec<Option<usize>> = if algo.is_boosted() { (0..cells.len()).map(Some).collect() } else { vec![None] };
            for pc in pcs {
                for rep in 0..reps {
                    jobs.push(Job { instance: i, algo, pred_cell: pc, rep, cell });
                }
                cell += 1;
            }
        }
    }

    let results: Vec<(ResultRow, Option<String>)> = jobs
        .par_iter()
        .map(|job| {
            let t = truth(job.instance, job.rep);
            let seed = derive_seed(cfg.seed, DOMAIN_TRIALS, job.cell, job.rep as u64);
            let mut row = ResultRow {
                instance: cfg.instances[job.instance].id(),
                algo: job.algo.as_str().into(),
                eta_target: None,
                eta: None,
                rho_target: None,
                rho_raw: None,
                boost: None,
                threshold: None,
                seed,
                trial_count: TrialCount::Error,
                found_weight: None,
                true_weight: t.cut.weight,
                edge_samples: 0,
                contractions: 0,
                branch_events: 0,
                elapsed_ms: 0.0,
            };
            let err = run_job(cfg, job, t, job.pred_cell.map(|c| pred(job.instance, c, job.rep)), &mut row).err();
            (row, err.map(|e| e.to_string()))
        })
        .collect();

    let mut out = ExperimentOutput { rows: Vec::with_capacity(results.len()), errors: Vec::new() };
    for (row, err) in results {
        if let Some(msg) = err {
            out.errors.push((row.instance.clone(), row.algo.clone(), msg));
        }
        out.rows.push(row);
    }
    Ok(out)
}

fn run_job(cfg: &ExperimentConfig, job: &Job, t: &Truth, cell: Option<&PredCell>, row: &mut ResultRow) -> Result<()> {
    let g = &t.graph;
    let (pred, eta, rho) = match cell {
        Some(c) => {
            row.eta_target = c.eta_target;
            row.rho_target = c.rho_target;
            let (p, eta, rho) = c.pred.as_ref().map_err(Clone::clone)?;
            row.eta = Some(*eta);
            row.rho_raw = Some(*rho);
            (Some(p), *eta, *rho)
        }
        None => (None, 0.0, 0.0),
    };
    let algo = algorithm_for(job.algo, &cfg.parameters, g, eta, rho)?;
    match algo {
        Algorithm::BoostedKarger { boost, threshold } => {
            row.boost = Some(boost);
            row.threshold = Some(threshold);
        }
        Algorithm::BoostedFpz { schedule } => {
            row.boost = Some(schedule.boost());
            row.threshold = Some(schedule.threshold());
        }
        _ => {}
    }
    let start = Instant::now();
    let out = repeat_until(&algo, g, pred, t.cut.weight, cfg.max_trials, row.seed)?;
    row.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    // the reported weight must match a recomputation from the side
    let recomputed = cut_from_side(g, &out.best.side)?;
    if !weights_equal(recomputed.weight, out.best.weight) || out.best.weight < t.cut.weight - 1e-9 {
        return Err(Error::OracleMismatch { instance: row.instance.clone(), sw: t.cut.weight, brute: out.best.weight });
    }
    row.trial_count = out.trials.map_or(TrialCount::NotFound, TrialCount::Found);
    row.found_weight = Some(out.best.weight);
    row.edge_samples = out.stats.edge_samples;
    row.contractions = out.stats.contractions;
    row.branch_events = out.stats.branch_events;
    Ok(())
}

/// Runs with an optional dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    match threads {
        None => run_experiment(cfg),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| run_experiment(cfg)),
    }
}
