//! C ABI over `predcut`.
//!
//! Graphs, predictions and cuts are opaque heap handles created by
//! `pc_*_new`/`pc_*_read`/algorithm calls and released with the matching
//! `pc_*_free`. Every fallible call returns a [`PcStatus`]; on failure
//! `pc_last_error()` describes the error for the calling thread. Panics
//! never cross the boundary: they become `PC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use predcut::contraction::{repeat_until, trial_rng, Algorithm, QSchedule};
use predcut::graph::{Cut, Edge, WeightedGraph};
use predcut::oracle::{brute_force_min_cut, stoer_wagner};
use predcut::prediction::{measure, Prediction};
use predcut::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    Disconnected = 4,
    TooLarge = 5,
    Io = 6,
    Parse = 7,
    InvalidPrediction = 8,
    Panic = 9,
}

/// Algorithms accepted by `pc_trials_until`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcAlgorithm {
    Karger = 0,
    BoostedKarger = 1,
    Fpz = 2,
    BoostedFpz = 3,
}

/// Opaque weighted graph.
pub struct PcGraph(WeightedGraph);

/// Opaque edge prediction.
pub struct PcPrediction(Prediction);

/// Opaque cut: a vertex side and its weight.
pub struct PcCut(Cut);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PcStatus {
    match err {
        Error::TooFewVertices(_)
        | Error::SelfLoop { .. }
        | Error::VertexOutOfRange { .. }
        | Error::NegativeWeight { .. }
        | Error::NonFiniteWeight { .. } => PcStatus::InvalidGraph,
        Error::Disconnected => PcStatus::Disconnected,
        Error::TooLargeForBruteForce(_) => PcStatus::TooLarge,
        Error::Io { .. } => PcStatus::Io,
        Error::Parse { .. } => PcStatus::Parse,
        Error::PredictionOutOfRange { .. } | Error::ZeroWeightCut => PcStatus::InvalidPrediction,
        _ => PcStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PcStatus, String)>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            PcStatus::Panic
        }
    }
}

fn lib(err: Error) -> (PcStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (PcStatus, String) {
    (PcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (PcStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, (PcStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| (PcStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next `pc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on `n` vertices from `m` edges `(us[i], vs[i], ws[i])`.
///
/// # Safety
/// `us`, `vs` and `ws` must each point to `m` readable elements (they may
/// be NULL when `m == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    m: usize,
    out: *mut *mut PcGraph,
) -> PcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let mut edges = Vec::with_capacity(m);
        if m > 0 {
            if us.is_null() || vs.is_null() || ws.is_null() {
                return Err(null("edge array"));
            }
            let (us, vs, ws) =
                (std::slice::from_raw_parts(us, m), std::slice::from_raw_parts(vs, m), std::slice::from_raw_parts(ws, m));
            for i in 0..m {
                edges.push(Edge { u: us[i], v: vs[i], w: ws[i] });
            }
        }
        *out = boxed(PcGraph(WeightedGraph::new(n, edges).map_err(lib)?));
        Ok(())
    })
}

/// Reads a graph file (`n m` header, then `u v w` lines).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_graph_read(path: *const c_char, out: *mut *mut PcGraph) -> PcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        *out = boxed(PcGraph(WeightedGraph::read_file(path_arg(path)?).map_err(lib)?));
        Ok(())
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pc_graph_free(g: *mut PcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn pc_graph_n(g: *const PcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn pc_graph_m(g: *const PcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// Empty prediction (every pair reads 0).
#[no_mangle]
pub extern "C" fn pc_prediction_new() -> *mut PcPrediction {
    boxed(PcPrediction(Prediction::new()))
}

/// Sets `p` for pair `{u, v}`.
///
/// # Safety
/// `pred` must be a live prediction handle.
#[no_mangle]
pub unsafe extern "C" fn pc_prediction_set(pred: *mut PcPrediction, u: usize, v: usize, p: f64) -> PcStatus {
    guard(|| {
        let pred = out_ptr(pred, "pred")?;
        pred.0.set(u, v, p).map_err(lib)
    })
}

/// Reads a prediction file (`u v p` lines) for a graph on `n` vertices.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_prediction_read(path: *const c_char, n: usize, out: *mut *mut PcPrediction) -> PcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        *out = boxed(PcPrediction(Prediction::read_file(path_arg(path)?, n).map_err(lib)?));
        Ok(())
    })
}

/// # Safety
/// `pred` must be NULL or a live prediction handle.
#[no_mangle]
pub unsafe extern "C" fn pc_prediction_free(pred: *mut PcPrediction) {
    if !pred.is_null() {
        drop(Box::from_raw(pred));
    }
}

/// Measures a prediction against the Stoer–Wagner cut of `g`.
///
/// # Safety
/// Handles must be live; `eta` and `rho_raw` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_measure(g: *const PcGraph, pred: *const PcPrediction, eta: *mut f64, rho_raw: *mut f64) -> PcStatus {
    guard(|| {
        let (g, pred) = (deref(g, "graph")?, deref(pred, "pred")?);
        let (eta, rho_raw) = (out_ptr(eta, "eta")?, out_ptr(rho_raw, "rho_raw")?);
        let cut = stoer_wagner(&g.0).map_err(lib)?;
        let prof = measure(&g.0, &cut, &pred.0).map_err(lib)?;
        *eta = prof.eta;
        *rho_raw = prof.rho_raw;
        Ok(())
    })
}

unsafe fn cut_call(
    g: *const PcGraph,
    out: *mut *mut PcCut,
    f: impl FnOnce(&WeightedGraph) -> predcut::Result<Cut>,
) -> PcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let g = deref(g, "graph")?;
        *out = boxed(PcCut(f(&g.0).map_err(lib)?));
        Ok(())
    })
}

/// Exact minimum cut by Stoer–Wagner.
///
/// # Safety
/// `g` must be live; `out` writable. Free the result with `pc_cut_free`.
#[no_mangle]
pub unsafe extern "C" fn pc_stoer_wagner(g: *const PcGraph, out: *mut *mut PcCut) -> PcStatus {
    cut_call(g, out, stoer_wagner)
}

/// Exact minimum cut by enumeration (n <= 20).
///
/// # Safety
/// As `pc_stoer_wagner`.
#[no_mangle]
pub unsafe extern "C" fn pc_brute_force(g: *const PcGraph, out: *mut *mut PcCut) -> PcStatus {
    cut_call(g, out, brute_force_min_cut)
}

/// One Karger trial on stream `seed`.
///
/// # Safety
/// As `pc_stoer_wagner`.
#[no_mangle]
pub unsafe extern "C" fn pc_karger_trial(g: *const PcGraph, seed: u64, out: *mut *mut PcCut) -> PcStatus {
    cut_call(g, out, |g| Algorithm::Karger.run(g, None, &mut trial_rng(seed, 0)).map(|r| r.0))
}

/// One FPZ trial on stream `seed`.
///
/// # Safety
/// As `pc_stoer_wagner`.
#[no_mangle]
pub unsafe extern "C" fn pc_fpz_trial(g: *const PcGraph, seed: u64, out: *mut *mut PcCut) -> PcStatus {
    cut_call(g, out, |g| Algorithm::Fpz.run(g, None, &mut trial_rng(seed, 0)).map(|r| r.0))
}

/// One Boosted Karger trial.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_boosted_karger_trial(
    g: *const PcGraph,
    pred: *const PcPrediction,
    boost: f64,
    threshold: usize,
    seed: u64,
    out: *mut *mut PcCut,
) -> PcStatus {
    let Some(pred) = pred.as_ref() else {
        set_error("pred is null".into());
        return PcStatus::NullPointer;
    };
    let algo = Algorithm::BoostedKarger { boost, threshold };
    cut_call(g, out, |g| algo.run(g, Some(&pred.0), &mut trial_rng(seed, 0)).map(|r| r.0))
}

/// One Boosted FPZ trial with schedule parameters `(boost, eta, rho,
/// threshold)`.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_boosted_fpz_trial(
    g: *const PcGraph,
    pred: *const PcPrediction,
    boost: f64,
    eta: f64,
    rho: f64,
    threshold: usize,
    seed: u64,
    out: *mut *mut PcCut,
) -> PcStatus {
    let Some(pred) = pred.as_ref() else {
        set_error("pred is null".into());
        return PcStatus::NullPointer;
    };
    cut_call(g, out, |g| {
        let algo = Algorithm::BoostedFpz { schedule: QSchedule::new(boost, eta, rho, threshold)? };
        algo.run(g, Some(&pred.0), &mut trial_rng(seed, 0)).map(|r| r.0)
    })
}

/// Runs trials (trial `i` on stream `(seed, i)`) until one returns weight
/// at most `target` or `max_trials` have run. Writes the 1-based index of
/// the first hit to `trials`, or 0 if none hit. `pred` may be NULL for
/// unboosted algorithms; `eta` and `rho` are used by Boosted FPZ only.
///
/// # Safety
/// `g` must be live, `pred` NULL or live, `trials` writable.
#[no_mangle]
pub unsafe extern "C" fn pc_trials_until(
    g: *const PcGraph,
    pred: *const PcPrediction,
    algorithm: PcAlgorithm,
    boost: f64,
    eta: f64,
    rho: f64,
    threshold: usize,
    target: f64,
    max_trials: u64,
    seed: u64,
    trials: *mut u64,
) -> PcStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let trials = out_ptr(trials, "trials")?;
        let pred = pred.as_ref().map(|p| &p.0);
        let algo = match algorithm {
            PcAlgorithm::Karger => Algorithm::Karger,
            PcAlgorithm::Fpz => Algorithm::Fpz,
            PcAlgorithm::BoostedKarger => Algorithm::BoostedKarger { boost, threshold },
            PcAlgorithm::BoostedFpz => {
                Algorithm::BoostedFpz { schedule: QSchedule::new(boost, eta, rho, threshold).map_err(lib)? }
            }
        };
        let out = repeat_until(&algo, &g.0, pred, target, max_trials, seed).map_err(lib)?;
        *trials = out.trials.unwrap_or(0);
        Ok(())
    })
}

/// Cut weight, or NaN for NULL.
///
/// # Safety
/// `cut` must be NULL or a live cut handle.
#[no_mangle]
pub unsafe extern "C" fn pc_cut_weight(cut: *const PcCut) -> f64 {
    cut.as_ref().map_or(f64::NAN, |c| c.0.weight)
}

/// Number of vertices on the cut's side (the side containing vertex 0).
///
/// # Safety
/// `cut` must be NULL or a live cut handle.
#[no_mangle]
pub unsafe extern "C" fn pc_cut_side_len(cut: *const PcCut) -> usize {
    cut.as_ref().map_or(0, |c| c.0.side.len())
}

/// Copies the sorted side into `buf`, which must hold `len` entries;
/// `len` below `pc_cut_side_len` is an error.
///
/// # Safety
/// `cut` must be live and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn pc_cut_side(cut: *const PcCut, buf: *mut usize, len: usize) -> PcStatus {
    guard(|| {
        let cut = deref(cut, "cut")?;
        let side = &cut.0.side;
        if len < side.len() {
            return Err((PcStatus::InvalidArgument, format!("buffer holds {len} entries, side has {}", side.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        std::slice::from_raw_parts_mut(buf, side.len()).copy_from_slice(side);
        Ok(())
    })
}

/// # Safety
/// `cut` must be NULL or a live cut handle.
#[no_mangle]
pub unsafe extern "C" fn pc_cut_free(cut: *mut PcCut) {
    if !cut.is_null() {
        drop(Box::from_raw(cut));
    }
}
