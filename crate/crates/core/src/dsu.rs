//! Union-find with LIFO checkpoint/rollback.
//!
//! Union by rank without path compression keeps every `find` at
//! `O(log n)` and every union at no more than two undo entries, so the
//! depth-first recursion of the FPZ family can share one structure and
//! unwind it level by level.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
enum Undo {
    Parent { index: u32, old: u32 },
    Rank { index: u32, old: u8 },
}

/// Opaque checkpoint handle returned by [`RollbackDsu::checkpoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsuMark(usize);

#[derive(Debug, Clone)]
pub struct RollbackDsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
    log: Vec<Undo>,
    // (log length, component count) at each open checkpoint
    marks: Vec<(usize, usize)>,
}

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "vertex count exceeds u32 range");
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
            log: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            v = self.parent[v] as usize;
        }
        v
    }

    #[inline]
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.find(u) == self.find(v)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Merges the sets of `u` and `v`; returns whether a merge happened.
    pub fn union(&mut self, u: usize, v: usize) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        let (root, child) = match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Greater => (a, b),
            std::cmp::Ordering::Less => (b, a),
            std::cmp::Ordering::Equal => (a.min(b), a.max(b)),
        };
        self.log.push(Undo::Parent { index: child as u32, old: self.parent[child] });
        self.parent[child] = root as u32;
        if self.rank[a] == self.rank[b] {
            self.log.push(Undo::Rank { index: root as u32, old: self.rank[root] });
            self.rank[root] += 1;
        }
        self.components -= 1;
        true
    }

    pub fn checkpoint(&mut self) -> DsuMark {
        self.marks.push((self.log.len(), self.components));
        DsuMark(self.marks.len() - 1)
    }

    /// Restores the exact state at `mark`, which must be the innermost
    /// open checkpoint. The checkpoint is consumed.
    pub fn rollback(&mut self, mark: DsuMark) -> Result<()> {
        if mark.0 + 1 != self.marks.len() {
            return Err(Error::NonLifoRollback { mark: mark.0 });
        }
        let (len, components) = self.marks.pop().expect("mark checked above");
        while self.log.len() > len {
            match self.log.pop().expect("log longer than mark") {
                Undo::Parent { index, old } => self.parent[index as usize] = old,
                Undo::Rank { index, old } => self.rank[index as usize] = old,
            }
        }
        self.components = components;
        Ok(())
    }

    /// Component label for every vertex (the root id).
    pub fn labels(&self) -> Vec<usize> {
        (0..self.len()).map(|v| self.find(v)).collect()
    }

    #[cfg(test)]
    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while self.parent[v] as usize != v {
            v = self.parent[v] as usize;
            d += 1;
        }
        d
    }
}
