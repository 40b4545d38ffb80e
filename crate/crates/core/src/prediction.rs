//! Edge predictions: representation, measurement, synthesis and the
//! sampled-Karger heuristic.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::contraction::karger_trial;
use crate::error::{Error, Result};
use crate::graph::{Cut, Edge, WeightedGraph};

fn pair(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Per-pair values `p in [0,1]`; pairs not stored read as 0. Parallel
/// edges of one pair share a value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Prediction {
    values: BTreeMap<(usize, usize), f64>,
}

impl Prediction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, u: usize, v: usize, p: f64) -> Result<()> {
        if u == v {
            return Err(Error::BadVertex(u));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::PredictionOutOfRange { u, v, p });
        }
        if p == 0.0 {
            self.values.remove(&pair(u, v));
        } else {
            self.values.insert(pair(u, v), p);
        }
        Ok(())
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values.get(&pair(u, v)).copied().unwrap_or(0.0)
    }

    /// Binary prediction marking the given edges of `g`.
    pub fn from_edges(g: &WeightedGraph, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::new();
        for i in edges {
            let e = g.edge(i);
            p.values.insert(pair(e.u, e.v), 1.0);
        }
        p
    }

    /// `p_e` for every edge of `g`, in edge order.
    pub fn edge_values(&self, g: &WeightedGraph) -> Vec<f64> {
        g.edges().iter().map(|e| self.get(e.u, e.v)).collect()
    }

    /// Stored (nonzero) entries in pair order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.values.values().all(|&p| p == 1.0)
    }

    /// Text format: one `u v p` line per pair, `#` comments allowed.
    /// Pairs must name vertices below `n`.
    pub fn parse(text: &str, n: usize, origin: &Path) -> Result<Self> {
        let mut p = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |message: String| Error::Parse { path: origin.to_path_buf(), line: i + 1, message };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr(format!("expected `u v p`, got {} fields", f.len())));
            }
            let u: usize = f[0].parse().map_err(|_| perr(format!("bad vertex `{}`", f[0])))?;
            let v: usize = f[1].parse().map_err(|_| perr(format!("bad vertex `{}`", f[1])))?;
            let val: f64 = f[2].parse().map_err(|_| perr(format!("bad value `{}`", f[2])))?;
            if u >= n || v >= n {
                return Err(perr(format!("pair ({u},{v}) out of range for n={n}")));
            }
            p.set(u, v, val).map_err(|e| perr(e.to_string()))?;
        }
        Ok(p)
    }

    pub fn read_file(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, n, path)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for ((u, v), p) in self.iter() {
            let _ = writeln!(s, "{u} {v} {p}");
        }
        s
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// False-negative and false-positive mass of a prediction relative to a
/// reference cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProfile {
    pub eta: f64,
    pub rho_raw: f64,
    /// `max(1, rho_raw)`
    pub rho: f64,
    pub cut_weight: f64,
}

pub fn measure(g: &WeightedGraph, cut: &Cut, pred: &Prediction) -> Result<ErrorProfile> {
    if !(cut.weight > 0.0) {
        return Err(Error::ZeroWeightCut);
    }
    let mask = cut.mask(g.n());
    let (mut missed, mut extra) = (0.0, 0.0);
    for e in g.edges() {
        let p = pred.get(e.u, e.v);
        if mask[e.u] != mask[e.v] {
            missed += (1.0 - p) * e.w;
        } else {
            extra += p * e.w;
        }
    }
    let rho_raw = extra / cut.weight;
    Ok(ErrorProfile { eta: missed / cut.weight, rho_raw, rho: rho_raw.max(1.0), cut_weight: cut.weight })
}

struct PairWeight {
    u: usize,
    v: usize,
    w: f64,
    crossing: bool,
}

fn merged_pairs(g: &WeightedGraph, cut: &Cut) -> Vec<PairWeight> {
    let mask = cut.mask(g.n());
    let mut by_pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        *by_pair.entry(pair(e.u, e.v)).or_insert(0.0) += e.w;
    }
    by_pair
        .into_iter()
        .map(|((u, v), w)| PairWeight { u, v, w, crossing: mask[u] != mask[v] })
        .collect()
}

/// Random greedy fill: walk a shuffled candidate list and keep each
/// positive-weight item that does not push the sum past `target`.
fn greedy_fill<R: Rng + ?Sized>(candidates: &mut [&PairWeight], target: f64, rng: &mut R) -> Vec<(usize, usize)> {
    candidates.shuffle(rng);
    let slack = 1e-12 * target.abs().max(1.0);
    let mut sum = 0.0;
    let mut chosen = Vec::new();
    for c in candidates.iter() {
        if sum >= target - slack {
            break;
        }
        if c.w > 0.0 && sum + c.w <= target + slack {
            sum += c.w;
            chosen.push((c.u, c.v));
        }
    }
    chosen
}

/// Binary prediction `(C* \ C_eta) ∪ C_rho` with `w(C_eta) ≈ eta·w(C*)`
/// and `w(C_rho) ≈ rho·w(C*)`, each within one pair's weight.
pub fn synthesize<R: Rng + ?Sized>(
    g: &WeightedGraph,
    cut: &Cut,
    eta_target: f64,
    rho_target: f64,
    rng: &mut R,
) -> Result<Prediction> {
    if !(0.0..=1.0).contains(&eta_target) {
        return Err(Error::EtaOutOfRange(eta_target));
    }
    if !(cut.weight > 0.0) {
        return Err(Error::ZeroWeightCut);
    }
    let pairs = merged_pairs(g, cut);
    let outside: f64 = pairs.iter().filter(|p| !p.crossing).map(|p| p.w).sum();
    let max = outside / cut.weight;
    if !(rho_target >= 0.0) || rho_target > max * (1.0 + 1e-12) {
        return Err(Error::RhoInfeasible { target: rho_target, max });
    }
    let mut inside_c: Vec<&PairWeight> = pairs.iter().filter(|p| p.crossing).collect();
    let mut outside_c: Vec<&PairWeight> = pairs.iter().filter(|p| !p.crossing).collect();
    let dropped = greedy_fill(&mut inside_c, eta_target * cut.weight, rng);
    let added = greedy_fill(&mut outside_c, rho_target * cut.weight, rng);

    let mut pred = Prediction::new();
    for p in pairs.iter().filter(|p| p.crossing) {
        pred.values.insert((p.u, p.v), 1.0);
    }
    for key in dropped {
        pred.values.remove(&key);
    }
    for key in added {
        pred.values.insert(key, 1.0);
    }
    Ok(pred)
}

/// Sampled-Karger heuristic: keep each edge with probability 1/2, run `k`
/// Karger trials on the largest connected component of the sample, and
/// predict the union of the returned cuts.
pub fn heuristic_predict<R: Rng + ?Sized>(g: &WeightedGraph, k: usize, rng: &mut R) -> Result<Prediction> {
    if k == 0 {
        return Err(Error::InvalidParameter("heuristic needs k >= 1".into()));
    }
    for _ in 0..10 {
        let kept: Vec<usize> = (0..g.m()).filter(|_| rng.gen_bool(0.5)).collect();
        let mut comps = crate::dsu::RollbackDsu::new(g.n());
        for &i in &kept {
            let e = g.edge(i);
            comps.union(e.u, e.v);
        }
        let labels = comps.labels();
        let mut size = vec![0usize; g.n()];
        for &l in &labels {
            size[l] += 1;
        }
        // largest component, lowest root on ties
        let (root, &big) = size.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).unwrap();
        if big < 2 {
            continue;
        }
        let mut local = vec![usize::MAX; g.n()];
        let mut count = 0;
        for v in 0..g.n() {
            if labels[v] == root {
                local[v] = count;
                count += 1;
            }
        }
        let mut sub_edges = Vec::new();
        let mut origin = Vec::new();
        for &i in &kept {
            let e = g.edge(i);
            if labels[e.u] == root {
                sub_edges.push(Edge { u: local[e.u], v: local[e.v], w: e.w });
                origin.push(i);
            }
        }
        let sub = WeightedGraph::new(count, sub_edges)?;
        let mut predicted = Vec::new();
        for _ in 0..k {
            let (cut, _) = karger_trial(&sub, rng)?;
            predicted.extend(cut.crossing_edges.iter().map(|&j| origin[j]));
        }
        return Ok(Prediction::from_edges(g, predicted));
    }
    Err(Error::HeuristicSampleFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::dumbbell;
    use crate::graph::cut_from_side;
    use crate::oracle::stoer_wagner;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_prediction_has_no_error() {
        let g = dumbbell(4, 1.0).unwrap();
        let c = stoer_wagner(&g).unwrap();
        let p = Prediction::from_edges(&g, c.crossing_edges.iter().copied());
        let prof = measure(&g, &c, &p).unwrap();
        assert_eq!((prof.eta, prof.rho_raw, prof.rho), (0.0, 0.0, 1.0));
    }

    #[test]
    fn hand_evaluated_profile() {
        // C* = {(0,2), (1,3)} between {0,1} and {2,3}; (0,1) is outside
        let g = WeightedGraph::from_triples(4, &[(0, 2, 1.0), (1, 3, 1.0), (0, 1, 2.0), (2, 3, 5.0)]).unwrap();
        let c = cut_from_side(&g, &[0, 1]).unwrap();
        let mut p = Prediction::new();
        p.set(0, 2, 1.0).unwrap();
        p.set(0, 1, 0.5).unwrap();
        let prof = measure(&g, &c, &p).unwrap();
        assert_eq!((prof.eta, prof.rho_raw), (0.5, 0.5));
    }

    #[test]
    fn binary_form_matches_set_definitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = crate::generators::bipartite_matchings(12, 4, 2, &mut rng).unwrap();
            let c = stoer_wagner(&g).unwrap();
            let chosen: Vec<usize> = (0..g.m()).filter(|_| rng.gen_bool(0.3)).collect();
            let p = Prediction::from_edges(&g, chosen.iter().copied());
            let prof = measure(&g, &c, &p).unwrap();
            let in_c = |i: usize| c.crossing_edges.contains(&i);
            let missed: f64 = (0..g.m()).filter(|&i| in_c(i) && !chosen.contains(&i)).map(|i| g.edge(i).w).sum();
            let extra: f64 = (0..g.m()).filter(|&i| !in_c(i) && chosen.contains(&i)).map(|i| g.edge(i).w).sum();
            assert!((prof.eta - missed / c.weight).abs() < 1e-12);
            assert!((prof.rho_raw - extra / c.weight).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_reference_rejected() {
        let g = WeightedGraph::from_triples(3, &[(0, 1, 0.0), (1, 2, 1.0)]).unwrap();
        let c = cut_from_side(&g, &[0]).unwrap();
        assert_eq!(measure(&g, &c, &Prediction::new()), Err(Error::ZeroWeightCut));
    }

    #[test]
    fn measure_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = crate::generators::bipartite_matchings(16, 5, 2, &mut rng).unwrap();
        let c = stoer_wagner(&g).unwrap();
        let p = synthesize(&g, &c, 0.4, 2.0, &mut rng).unwrap();
        let scaled = WeightedGraph::new(
            g.n(),
            g.edges().iter().map(|e| Edge { w: e.w * 3.7, ..*e }).collect(),
        )
        .unwrap();
        let cs = cut_from_side(&scaled, &c.side).unwrap();
        let (a, b) = (measure(&g, &c, &p).unwrap(), measure(&scaled, &cs, &p).unwrap());
        assert!((a.eta - b.eta).abs() <= 1e-12 * a.eta.max(1e-300));
        assert!((a.rho_raw - b.rho_raw).abs() <= 1e-12 * a.rho_raw);
    }

    #[test]
    fn synthesize_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = dumbbell(5, 1.0).unwrap();
        let c = stoer_wagner(&g).unwrap();
        let exact = synthesize(&g, &c, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(exact, Prediction::from_edges(&g, c.crossing_edges.iter().copied()));
        assert!(synthesize(&g, &c, 1.0, 0.0, &mut rng).unwrap().is_empty());
        assert!(matches!(synthesize(&g, &c, 0.0, 1e6, &mut rng), Err(Error::RhoInfeasible { .. })));
        assert!(matches!(synthesize(&g, &c, 1.5, 0.0, &mut rng), Err(Error::EtaOutOfRange(_))));
    }

    #[test]
    fn synthesize_unweighted_is_exact() {
        // vertex 0 joined to every vertex of a K90
        let n = 91;
        let mut t: Vec<(usize, usize, f64)> = (1..n).map(|v| (0, v, 1.0)).collect();
        for u in 1..n {
            for v in u + 1..n {
                t.push((u, v, 1.0));
            }
        }
        let g = WeightedGraph::from_triples(n, &t).unwrap();
        let c = cut_from_side(&g, &[0]).unwrap();
        assert_eq!(c.crossing_edges.len(), 90);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = synthesize(&g, &c, 0.5, 3.0, &mut rng).unwrap();
        let kept = c.crossing_edges.iter().filter(|&&i| p.get(g.edge(i).u, g.edge(i).v) == 1.0).count();
        assert_eq!(kept, 45);
        let prof = measure(&g, &c, &p).unwrap();
        assert_eq!((prof.eta, prof.rho_raw), (0.5, 3.0));
    }

    #[test]
    fn heuristic_on_single_edge() {
        let g = WeightedGraph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // half the draws drop the only edge; 10 retries all failing has p = 2^-10
        let p = heuristic_predict(&g, 1, &mut rng).unwrap();
        assert_eq!(p.get(0, 1), 1.0);
        assert!(p.is_binary());
    }

    #[test]
    fn prediction_file_round_trip() {
        let mut p = Prediction::new();
        p.set(3, 1, 0.25).unwrap();
        p.set(0, 2, 1.0).unwrap();
        let back = Prediction::parse(&p.to_text(), 4, Path::new("p")).unwrap();
        assert_eq!(back, p);
        assert!(Prediction::parse("0 1 1.5\n", 4, Path::new("p")).is_err());
        assert!(Prediction::parse("0 9 0.5\n", 4, Path::new("p")).is_err());
        assert_eq!(p.set(0, 1, -0.1), Err(Error::PredictionOutOfRange { u: 0, v: 1, p: -0.1 }));
    }
}
