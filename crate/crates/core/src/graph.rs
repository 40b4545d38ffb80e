//! Weighted undirected multigraphs, cuts, and contraction state.

use std::fmt::Write as _;
use std::path::Path;

use crate::dsu::{DsuMark, RollbackDsu};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected weighted multigraph over vertices `0..n`.
///
/// Parallel edges are allowed; self-loops, out-of-range endpoints and
/// negative or non-finite weights are rejected at construction. The graph
/// is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        for (index, e) in edges.iter().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(Error::VertexOutOfRange { index, vertex, n });
                }
            }
            if e.u == e.v {
                return Err(Error::SelfLoop { index, vertex: e.u });
            }
            if !e.w.is_finite() {
                return Err(Error::NonFiniteWeight { index, weight: e.w });
            }
            if e.w < 0.0 {
                return Err(Error::NegativeWeight { index, weight: e.w });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, triples.iter().map(|&(u, v, w)| Edge { u, v, w }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.w).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(0.0, f64::max)
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        d
    }

    pub fn is_integral(&self) -> bool {
        self.edges.iter().all(|e| e.w.fract() == 0.0)
    }

    /// Connected components (ignoring weights) as a union-find.
    pub fn components(&self) -> RollbackDsu {
        let mut d = RollbackDsu::new(self.n);
        for e in &self.edges {
            d.union(e.u, e.v);
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        self.components().components() == 1
    }

    /// Parses the text graph format: a header line `n m`, then `m` lines
    /// `u v w`. Lines starting with `#` and blank lines are skipped.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_field(it.next(), "n").map_err(|m| perr(hline, m))?;
        let m: usize = parse_field(it.next(), "m").map_err(|m| perr(hline, m))?;
        let mut edges = Vec::with_capacity(m);
        for (lno, line) in lines {
            let mut f = line.split_whitespace();
            let u = parse_field(f.next(), "u").map_err(|m| perr(lno, m))?;
            let v = parse_field(f.next(), "v").map_err(|m| perr(lno, m))?;
            let w = parse_field(f.next(), "w").map_err(|m| perr(lno, m))?;
            if f.next().is_some() {
                return Err(perr(lno, "trailing fields".into()));
            }
            edges.push(Edge { u, v, w });
        }
        if edges.len() != m {
            return Err(perr(hline, format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::new(n, edges)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
        }
        s
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> std::result::Result<T, String> {
    let raw = field.ok_or_else(|| format!("missing field `{name}`"))?;
    raw.parse().map_err(|_| format!("bad value `{raw}` for `{name}`"))
}

/// Compares cut weights: exactly when both are integers, otherwise with a
/// relative tolerance of 1e-9.
pub fn weights_equal(a: f64, b: f64) -> bool {
    if a.fract() == 0.0 && b.fract() == 0.0 {
        return a == b;
    }
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` under the same tolerance rule as [`weights_equal`].
pub fn weight_at_most(a: f64, b: f64) -> bool {
    a <= b || weights_equal(a, b)
}

/// A bipartition `(side, V \ side)` with its crossing edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Sorted, deduplicated vertex ids of one block.
    pub side: Vec<usize>,
    /// Indices into the base graph's edge list, ascending.
    pub crossing_edges: Vec<usize>,
    pub weight: f64,
}

impl Cut {
    /// Builds the cut whose block is every vertex with `in_side[v]`.
    pub fn from_mask(g: &WeightedGraph, in_side: &[bool]) -> Result<Self> {
        let side: Vec<usize> = (0..g.n()).filter(|&v| in_side[v]).collect();
        if side.is_empty() || side.len() == g.n() {
            return Err(Error::ImproperSide);
        }
        let mut crossing_edges = Vec::new();
        let mut weight = 0.0;
        for (i, e) in g.edges().iter().enumerate() {
            if in_side[e.u] != in_side[e.v] {
                crossing_edges.push(i);
                weight += e.w;
            }
        }
        Ok(Cut { side, crossing_edges, weight })
    }

    /// The same bipartition described by the block containing vertex 0.
    pub fn normalized(mut self, n: usize) -> Self {
        if self.side.first() != Some(&0) {
            let mut mask = vec![true; n];
            for &v in &self.side {
                mask[v] = false;
            }
            self.side = (0..n).filter(|&v| mask[v]).collect();
        }
        self
    }

    pub fn contains(&self, v: usize) -> bool {
        self.side.binary_search(&v).is_ok()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.side {
            m[v] = true;
        }
        m
    }

    /// Recomputes the crossing set and weight and checks them.
    pub fn is_valid_for(&self, g: &WeightedGraph) -> bool {
        if self.side.iter().any(|&v| v >= g.n()) || self.side.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        match Cut::from_mask(g, &self.mask(g.n())) {
            Ok(c) => c.crossing_edges == self.crossing_edges && weights_equal(c.weight, self.weight),
            Err(_) => false,
        }
    }
}

pub fn cut_from_side(g: &WeightedGraph, side: &[usize]) -> Result<Cut> {
    let mut mask = vec![false; g.n()];
    for &v in side {
        if v >= g.n() {
            return Err(Error::BadVertex(v));
        }
        mask[v] = true;
    }
    Cut::from_mask(g, &mask)
}

/// A simple graph on the current metavertices plus the mapping back to
/// original vertices.
#[derive(Debug, Clone)]
pub struct InducedGraph {
    pub graph: WeightedGraph,
    /// Original vertices of each metavertex, ascending.
    pub members: Vec<Vec<usize>>,
}

impl InducedGraph {
    /// Maps a side over metavertices back to original vertices.
    pub fn lift_side(&self, meta_side: &[usize]) -> Vec<usize> {
        let mut side: Vec<usize> = meta_side.iter().flat_map(|&m| self.members[m].iter().copied()).collect();
        side.sort_unstable();
        side
    }

    pub fn lift_cut(&self, base: &WeightedGraph, meta_cut: &Cut) -> Result<Cut> {
        cut_from_side(base, &self.lift_side(&meta_cut.side))
    }
}

/// Contraction state over a borrowed base graph.
///
/// Metavertices are tracked by a [`RollbackDsu`]; parallel edges stay in
/// the base edge list and become self-loops implicitly once their
/// endpoints merge.
#[derive(Debug, Clone)]
pub struct ContractionState<'g> {
    base: &'g WeightedGraph,
    dsu: RollbackDsu,
}

impl<'g> ContractionState<'g> {
    pub fn new(base: &'g WeightedGraph) -> Self {
        Self { base, dsu: RollbackDsu::new(base.n()) }
    }

    pub fn base(&self) -> &'g WeightedGraph {
        self.base
    }

    pub fn live_count(&self) -> usize {
        self.dsu.components()
    }

    pub fn metavertex(&self, v: usize) -> usize {
        self.dsu.find(v)
    }

    pub fn dsu(&self) -> &RollbackDsu {
        &self.dsu
    }

    pub fn contract(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.base.n();
        if u >= n {
            return Err(Error::BadVertex(u));
        }
        if v >= n {
            return Err(Error::BadVertex(v));
        }
        if !self.dsu.union(u, v) {
            return Err(Error::SameMetavertex(u, v));
        }
        Ok(())
    }

    /// Contracts base edge `i`.
    pub fn contract_edge(&mut self, i: usize) -> Result<()> {
        let e = self.base.edges().get(i).ok_or(Error::BadEdgeIndex(i))?;
        self.contract(e.u, e.v)
    }

    /// Whether base edge `i` still joins two different metavertices.
    pub fn is_live_edge(&self, i: usize) -> bool {
        let e = self.base.edge(i);
        !self.dsu.same(e.u, e.v)
    }

    pub fn checkpoint(&mut self) -> DsuMark {
        self.dsu.checkpoint()
    }

    pub fn rollback(&mut self, mark: DsuMark) -> Result<()> {
        self.dsu.rollback(mark)
    }

    /// When exactly two metavertices remain, the cut between them.
    pub fn two_way_cut(&self) -> Result<Cut> {
        if self.live_count() != 2 {
            return Err(Error::InvalidParameter(format!(
                "two_way_cut needs 2 live metavertices, have {}",
                self.live_count()
            )));
        }
        let root = self.dsu.find(0);
        let mask: Vec<bool> = (0..self.base.n()).map(|v| self.dsu.find(v) == root).collect();
        Cut::from_mask(self.base, &mask)
    }

    /// Simple graph on the live metavertices: self-loops dropped and
    /// parallel edges merged by summing weights. Metavertices are numbered
    /// by their smallest original vertex.
    pub fn induced_simple_graph(&self) -> Result<InducedGraph> {
        let k = self.live_count();
        if k < 2 {
            return Err(Error::InvalidParameter("induced graph needs 2+ metavertices".into()));
        }
        let n = self.base.n();
        let mut index_of_root = vec![usize::MAX; n];
        let mut label = vec![0usize; n];
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(k);
        for v in 0..n {
            let r = self.dsu.find(v);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = members.len();
                members.push(Vec::new());
            }
            label[v] = index_of_root[r];
            members[label[v]].push(v);
        }
        let mut pairs: Vec<(usize, usize, f64)> = self
            .base
            .edges()
            .iter()
            .filter_map(|e| {
                let (a, b) = (label[e.u], label[e.v]);
                (a != b).then(|| (a.min(b), a.max(b), e.w))
            })
            .collect();
        pairs.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut edges: Vec<Edge> = Vec::new();
        for (a, b, w) in pairs {
            match edges.last_mut() {
                Some(last) if last.u == a && last.v == b => last.w += w,
                _ => edges.push(Edge { u: a, v: b, w }),
            }
        }
        Ok(InducedGraph { graph: WeightedGraph::new(k, edges)?, members })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn appendix_graph() -> WeightedGraph {
        WeightedGraph::from_triples(3, &[(0, 1, 0.6), (1, 2, 0.7)]).unwrap()
    }

    fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> WeightedGraph {
        let mut edges = Vec::new();
        for _ in 0..m {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            edges.push(Edge { u, v, w: rng.gen_range(1..5) as f64 });
        }
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn builds_appendix_graph() {
        let g = appendix_graph();
        assert_eq!((g.n(), g.m()), (3, 2));
        let g = WeightedGraph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn construction_errors_name_the_edge() {
        assert_eq!(
            WeightedGraph::from_triples(3, &[(0, 0, 1.0)]),
            Err(Error::SelfLoop { index: 0, vertex: 0 })
        );
        assert_eq!(
            WeightedGraph::from_triples(3, &[(0, 1, 1.0), (0, 3, 1.0)]),
            Err(Error::VertexOutOfRange { index: 1, vertex: 3, n: 3 })
        );
        assert!(matches!(
            WeightedGraph::from_triples(3, &[(0, 1, -1.0)]),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
        assert!(matches!(
            WeightedGraph::from_triples(3, &[(0, 1, 1.0), (1, 2, f64::NAN)]),
            Err(Error::NonFiniteWeight { index: 1, .. })
        ));
        assert_eq!(WeightedGraph::from_triples(1, &[]), Err(Error::TooFewVertices(1)));
    }

    #[test]
    fn cut_weights() {
        assert_eq!(cut_from_side(&appendix_graph(), &[0]).unwrap().weight, 0.6);
        let cycle = WeightedGraph::from_triples(5, &[(0, 1, 1.), (1, 2, 1.), (2, 3, 1.), (3, 4, 1.), (4, 0, 1.)])
            .unwrap();
        for v in 0..5 {
            assert_eq!(cut_from_side(&cycle, &[v]).unwrap().weight, 2.0);
        }
        assert_eq!(cut_from_side(&cycle, &[]), Err(Error::ImproperSide));
        assert_eq!(cut_from_side(&cycle, &[0, 1, 2, 3, 4]), Err(Error::ImproperSide));
    }

    #[test]
    fn contract_merges_and_rejects_repeat() {
        let g = appendix_graph();
        let mut s = ContractionState::new(&g);
        s.contract(0, 1).unwrap();
        assert_eq!(s.live_count(), 2);
        assert_eq!(s.metavertex(0), s.metavertex(1));
        assert_eq!(s.contract(1, 0), Err(Error::SameMetavertex(1, 0)));
    }

    #[test]
    fn path_contracts_to_two() {
        let n = 9;
        let t: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        let g = WeightedGraph::from_triples(n, &t).unwrap();
        let mut s = ContractionState::new(&g);
        for i in 0..n - 2 {
            s.contract_edge(i).unwrap();
        }
        assert_eq!(s.live_count(), 2);
        assert_eq!(s.two_way_cut().unwrap().weight, 1.0);
    }

    #[test]
    fn contraction_avoiding_cut_reproduces_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_multigraph(&mut rng, 8, 20);
            let side: Vec<usize> = (0..8).filter(|_| rng.gen_bool(0.5)).collect();
            let Ok(target) = cut_from_side(&g, &side) else { continue };
            let mask = target.mask(8);
            let mut s = ContractionState::new(&g);
            // merge within each block only
            for block in [true, false] {
                let vs: Vec<usize> = (0..8).filter(|&v| mask[v] == block).collect();
                for w in vs.windows(2) {
                    s.contract(w[0], w[1]).unwrap();
                }
            }
            let c = s.two_way_cut().unwrap();
            assert_eq!(c.weight, target.weight);
            assert_eq!(c.crossing_edges, target.crossing_edges);
        }
    }

    #[test]
    fn induced_graph_merges_parallel_edges() {
        let tri = WeightedGraph::from_triples(3, &[(0, 1, 1.), (1, 2, 1.), (0, 2, 1.)]).unwrap();
        let mut s = ContractionState::new(&tri);
        let ident = s.induced_simple_graph().unwrap();
        // edges come out sorted by endpoints
        assert_eq!(ident.graph.edges(), &[Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 0, v: 2, w: 1.0 }, Edge { u: 1, v: 2, w: 1.0 }]);
        s.contract(0, 1).unwrap();
        let ind = s.induced_simple_graph().unwrap();
        assert_eq!(ind.graph.n(), 2);
        assert_eq!(ind.graph.edges(), &[Edge { u: 0, v: 1, w: 2.0 }]);
        assert_eq!(ind.members, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn induced_graph_preserves_every_lifted_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let g = random_multigraph(&mut rng, 10, 30);
            let mut s = ContractionState::new(&g);
            let mut done = 0;
            while done < 5 {
                let i = rng.gen_range(0..g.m());
                if s.is_live_edge(i) {
                    s.contract_edge(i).unwrap();
                    done += 1;
                }
            }
            let ind = s.induced_simple_graph().unwrap();
            let k = ind.graph.n();
            assert!(ind.graph.m() <= k * (k - 1) / 2);
            for mask in 1u32..(1 << (k - 1)) {
                let meta_side: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
                let meta = cut_from_side(&ind.graph, &meta_side).unwrap();
                let lifted = ind.lift_cut(&g, &meta).unwrap();
                assert!(weights_equal(meta.weight, lifted.weight));
            }
        }
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let text = "# demo\n3 2\n0 1 0.6\n\n1 2 0.7\n";
        let g = WeightedGraph::parse(text, Path::new("x")).unwrap();
        assert_eq!(g, appendix_graph());
        assert_eq!(WeightedGraph::parse(&g.to_text(), Path::new("x")).unwrap(), g);
        assert!(matches!(
            WeightedGraph::parse("3 2\n0 1 0,6\n1 2 1\n", Path::new("x")),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(WeightedGraph::parse("3 3\n0 1 1\n", Path::new("x")), Err(Error::Parse { .. })));
    }

    #[test]
    fn tolerance_rule() {
        assert!(weights_equal(3.0, 3.0));
        assert!(!weights_equal(3.0, 4.0));
        assert!(!weights_equal(3.0, 3.001));
        assert!(weights_equal(0.1 + 0.2, 0.3));
    }
}
