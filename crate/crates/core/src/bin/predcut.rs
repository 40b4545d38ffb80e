use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use predcut::contraction::{trial_rng, Algorithm, QSchedule, TrialStats};
use predcut::error::{Error, Result};
use predcut::experiment::{resolve_threads, run_with_threads, to_csv, ExperimentConfig};
use predcut::generators::{bipartite_matchings, cycle_union, dumbbell};
use predcut::learner::{learn_from, BudgetGrid, LearnerConfig};
use predcut::oracle::{brute_force_min_cut, stoer_wagner};
use predcut::prediction::{heuristic_predict, measure, synthesize, Prediction};
use predcut::{Cut, WeightedGraph};

/// Minimum cuts with learned or synthetic edge predictions.
#[derive(Parser)]
#[command(name = "predcut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance.
    Gen(GenArgs),
    /// Build or measure predictions.
    #[command(subcommand)]
    Predict(PredictCommand),
    /// Compute a cut with one algorithm.
    Cut(CutArgs),
    /// Run an experiment config and write the result CSV.
    Experiment(ExperimentArgs),
    /// Learn a prediction from a directory of sample graphs.
    Learn(LearnArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bipartite,
    Cycles,
    Dumbbell,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Vertex count (for dumbbell: both cliques together).
    #[arg(long)]
    n: usize,
    /// Matchings (bipartite) or cycles per group (cycles).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Edges removed at vertex 0 (bipartite).
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Small-cycle ratio (cycles).
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Bridge weight (dumbbell).
    #[arg(long, default_value_t = 1.0)]
    bridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Synthesize a binary prediction with target error (eta, rho)
    /// relative to the Stoer–Wagner cut.
    Synth {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sampled-Karger heuristic prediction.
    Heuristic {
        #[arg(long)]
        graph: PathBuf,
        /// Karger runs on the sampled subgraph.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print eta and rho_raw of a prediction against the Stoer–Wagner cut.
    Measure {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    StoerWagner,
    Brute,
    Karger,
    BoostedKarger,
    Fpz,
    BoostedFpz,
}

#[derive(Args)]
struct CutArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Prediction file (boosted algorithms).
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Boost scalar B; default n.
    #[arg(long)]
    boost: Option<f64>,
    /// Phase-switch threshold t; default 2 for boosted Karger and
    /// max(5, ceil(sqrt m)) for boosted FPZ.
    #[arg(long)]
    threshold: Option<usize>,
    /// eta for the boosted FPZ schedule; default the measured value.
    #[arg(long)]
    eta: Option<f64>,
    /// rho for the boosted FPZ schedule; default the measured value.
    #[arg(long)]
    rho: Option<f64>,
    /// Independent trials; the lightest cut is reported.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; defaults to the config's `output`, else stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads (overrides PREDCUT_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct LearnArgs {
    /// Directory of graph files, all on the same vertex set.
    #[arg(long)]
    dir: PathBuf,
    /// Use the last N files (by name) for validation instead of the
    /// odd-indexed ones.
    #[arg(long)]
    holdout: Option<usize>,
    /// Budget grid size.
    #[arg(long, default_value_t = 20)]
    grid_points: usize,
    /// Span the grid over all n(n-1)/2 pairs.
    #[arg(long)]
    full_grid: bool,
    /// Gradient steps per budget; training files are cycled.
    #[arg(long, default_value_t = 500)]
    steps: usize,
    /// Lower bound on every sample's (scaled) minimum cut weight.
    #[arg(long, default_value_t = 0.0)]
    c_min: f64,
    /// Learned prediction file.
    #[arg(short, long)]
    output: PathBuf,
    /// Per-budget validation report (CSV).
    #[arg(long)]
    report: Option<PathBuf>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn gen(a: GenArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let g = match a.family {
        Family::Bipartite => bipartite_matchings(a.n, a.k, a.l, &mut rng)?,
        Family::Cycles => cycle_union(a.n, a.k, a.eps, &mut rng)?,
        Family::Dumbbell => {
            if a.n % 2 != 0 {
                return Err(Error::InvalidParameter(format!("dumbbell needs an even n, got {}", a.n)));
            }
            dumbbell(a.n / 2, a.bridge)?
        }
    };
    g.write_file(&a.output)
}

fn predict(cmd: PredictCommand) -> Result<()> {
    match cmd {
        PredictCommand::Synth { graph, eta, rho, seed, output } => {
            let g = WeightedGraph::read_file(graph)?;
            let cut = stoer_wagner(&g)?;
            let p = synthesize(&g, &cut, eta, rho, &mut ChaCha8Rng::seed_from_u64(seed))?;
            p.write_file(output)
        }
        PredictCommand::Heuristic { graph, k, seed, output } => {
            let g = WeightedGraph::read_file(graph)?;
            heuristic_predict(&g, k, &mut ChaCha8Rng::seed_from_u64(seed))?.write_file(output)
        }
        PredictCommand::Measure { graph, pred } => {
            let g = WeightedGraph::read_file(graph)?;
            let p = Prediction::read_file(pred, g.n())?;
            let prof = measure(&g, &stoer_wagner(&g)?, &p)?;
            println!("eta={} rho_raw={}", prof.eta, prof.rho_raw);
            Ok(())
        }
    }
}

fn print_cut(cut: &Cut) {
    println!("weight={}", cut.weight);
    let side: Vec<String> = cut.side.iter().map(|v| v.to_string()).collect();
    println!("side={}", side.join(" "));
}

fn cut(a: CutArgs) -> Result<()> {
    let g = WeightedGraph::read_file(&a.graph)?;
    let pred = a.pred.as_ref().map(|p| Prediction::read_file(p, g.n())).transpose()?;
    let boost = a.boost.unwrap_or(g.n() as f64);
    let need_pred = || pred.as_ref().ok_or_else(|| Error::InvalidParameter("boosted algorithms need --pred".into()));
    let algo = match a.algo {
        AlgoArg::StoerWagner => return Ok(print_cut(&stoer_wagner(&g)?)),
        AlgoArg::Brute => return Ok(print_cut(&brute_force_min_cut(&g)?)),
        AlgoArg::Karger => Algorithm::Karger,
        AlgoArg::Fpz => Algorithm::Fpz,
        AlgoArg::BoostedKarger => {
            need_pred()?;
            Algorithm::BoostedKarger { boost, threshold: a.threshold.unwrap_or(2) }
        }
        AlgoArg::BoostedFpz => {
            let p = need_pred()?;
            let (eta, rho) = match (a.eta, a.rho) {
                (Some(e), Some(r)) => (e, r),
                (e, r) => {
                    let prof = measure(&g, &stoer_wagner(&g)?, p)?;
                    (e.unwrap_or(prof.eta), r.unwrap_or(prof.rho_raw))
                }
            };
            let t = a.threshold.unwrap_or_else(|| ((g.m() as f64).sqrt().ceil() as usize).max(5));
            Algorithm::BoostedFpz { schedule: QSchedule::new(boost, eta.clamp(0.0, 1.0), rho, t)? }
        }
    };
    if a.trials == 0 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }
    let mut best: Option<Cut> = None;
    let mut stats = TrialStats::default();
    for i in 0..a.trials {
        let (c, s) = algo.run(&g, pred.as_ref(), &mut trial_rng(a.seed, i))?;
        stats.accumulate(&s);
        if best.as_ref().map_or(true, |b| c.weight < b.weight) {
            best = Some(c);
        }
    }
    print_cut(&best.expect("at least one trial"));
    println!("edge_samples={} contractions={} branch_events={}", stats.edge_samples, stats.contractions, stats.branch_events);
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig::read_file(&a.config)?;
    let threads = resolve_threads(a.threads)?;
    let out = run_with_threads(&cfg, threads)?;
    for (inst, algo, msg) in &out.errors {
        eprintln!("warning: {inst} / {algo}: {msg}");
    }
    let csv = to_csv(&out.rows, true);
    match a.output.or(cfg.output) {
        Some(path) => write_text(&path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn learn(a: LearnArgs) -> Result<()> {
    let dir_err = |e: std::io::Error| Error::Io { path: a.dir.clone(), message: e.to_string() };
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.dir)
        .map_err(dir_err)?
        .map(|e| e.map(|e| e.path()).map_err(dir_err))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let graphs = files.iter().map(WeightedGraph::read_file).collect::<Result<Vec<_>>>()?;
    let (train, validation): (Vec<WeightedGraph>, Vec<WeightedGraph>) = match a.holdout {
        Some(h) => {
            if h >= graphs.len() {
                return Err(Error::InvalidParameter(format!("--holdout {h} leaves no training files")));
            }
            let cut = graphs.len() - h;
            (graphs[..cut].to_vec(), graphs[cut..].to_vec())
        }
        None => {
            let (even, odd): (Vec<_>, Vec<_>) = graphs.into_iter().enumerate().partition(|(i, _)| i % 2 == 0);
            (even.into_iter().map(|x| x.1).collect(), odd.into_iter().map(|x| x.1).collect())
        }
    };
    if train.is_empty() {
        return Err(Error::NoSamples);
    }
    let steps: Vec<WeightedGraph> = train.iter().cycle().take(a.steps.max(1)).cloned().collect();
    let cfg = LearnerConfig {
        grid: BudgetGrid::Uniform { points: a.grid_points, full: a.full_grid },
        horizon: steps.len(),
        validation: validation.len(),
        c_min: a.c_min,
        ..Default::default()
    };
    let out = learn_from(&steps, &validation, &cfg)?;
    out.prediction.write_file(&a.output)?;
    if let Some(path) = a.report {
        let mut csv = String::from("b,mean_u,chosen\n");
        for r in &out.report {
            let mean = r.mean_value.map(|m| m.to_string()).unwrap_or_default();
            csv.push_str(&format!("{},{},{}\n", r.b, mean, r.chosen));
        }
        write_text(&path, &csv)?;
    }
    println!("b={} scale={}", out.b, out.scale);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Predict(c) => predict(c),
        Command::Cut(a) => cut(a),
        Command::Experiment(a) => experiment(a),
        Command::Learn(a) => learn(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
