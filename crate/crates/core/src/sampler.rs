//! Dynamic weighted sampling over edge indices.
//!
//! [`PrefixWeightIndex`] is a complete binary sum tree over a fixed number
//! of leaves. Every internal node is recomputed as the sum of its two
//! children on each update, so rolling back the leaves restores the whole
//! tree bit for bit.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerMark(usize);

#[derive(Debug, Clone)]
pub struct PrefixWeightIndex {
    len: usize,
    // leaves live at tree[base..base + len]
    base: usize,
    tree: Vec<f64>,
    log: Vec<(u32, f64)>,
    marks: Vec<usize>,
}

fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadWeight(w))
    }
}

impl PrefixWeightIndex {
    pub fn new(weights: &[f64]) -> Result<Self> {
        for &w in weights {
            check_weight(w)?;
        }
        let len = weights.len();
        let base = len.max(1).next_power_of_two();
        let mut tree = vec![0.0; 2 * base];
        tree[base..base + len].copy_from_slice(weights);
        for i in (1..base).rev() {
            tree[i] = tree[2 * i] + tree[2 * i + 1];
        }
        Ok(Self { len, base, tree, log: Vec::new(), marks: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.tree[self.base + e]
    }

    fn set(&mut self, e: usize, w: f64) {
        let mut i = self.base + e;
        if !self.marks.is_empty() {
            self.log.push((e as u32, self.tree[i]));
        }
        self.tree[i] = w;
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1];
        }
    }

    pub fn update(&mut self, e: usize, w: f64) -> Result<()> {
        if e >= self.len {
            return Err(Error::BadEdgeIndex(e));
        }
        check_weight(w)?;
        self.set(e, w);
        Ok(())
    }

    /// Zeroes the leaf; deleted indices are never sampled.
    pub fn delete(&mut self, e: usize) -> Result<()> {
        self.update(e, 0.0)
    }

    /// Draws an index with probability `weight(e) / total()`. One uniform
    /// `u` in `[0, total)` selects the leaf whose half-open prefix interval
    /// contains it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::EmptySampler);
        }
        let mut u = rng.gen::<f64>() * total;
        let mut i = 1;
        while i < self.base {
            let (left, right) = (self.tree[2 * i], self.tree[2 * i + 1]);
            if (u < left && left > 0.0) || right <= 0.0 {
                i = 2 * i;
            } else {
                u -= left;
                i = 2 * i + 1;
            }
        }
        Ok(i - self.base)
    }

    pub fn checkpoint(&mut self) -> SamplerMark {
        self.marks.push(self.log.len());
        SamplerMark(self.marks.len() - 1)
    }

    pub fn rollback(&mut self, mark: SamplerMark) -> Result<()> {
        if mark.0 + 1 != self.marks.len() {
            return Err(Error::NonLifoRollback { mark: mark.0 });
        }
        let len = self.marks.pop().expect("mark checked above");
        while self.log.len() > len {
            let (e, old) = self.log.pop().expect("log longer than mark");
            let mut i = self.base + e as usize;
            self.tree[i] = old;
            while i > 1 {
                i /= 2;
                self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1];
            }
        }
        if self.marks.is_empty() {
            self.log.clear();
        }
        Ok(())
    }
}

/// Orders indices by exponential clocks: index `e` gets key `X_e / w_e`
/// with `X_e ~ Exp(1)`, and the result is sorted by ascending key.
/// Zero-weight indices get key `+inf` and trail in index order. The order
/// is distributed as sequential weighted sampling without replacement.
pub fn exponential_clock_order<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    for &w in weights {
        check_weight(w)?;
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::AllZeroWeights);
    }
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let x = -(1.0 - rng.gen::<f64>()).ln();
            (if w > 0.0 { x / w } else { f64::INFINITY }, i)
        })
        .collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}
