//! Column supports and lexicographic enumeration of k-combinations.
//!
//! Enumeration order is lexicographic over strictly increasing index lists,
//! so the combination space of size `C(n, k)` maps one-to-one onto the ranks
//! `0..C(n, k)`. [`unrank`] jumps to an arbitrary rank, which is what lets the
//! certification sweeps split the space into contiguous ranges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing set of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Validates that `indices` is strictly increasing and bounded by `n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Argument(format!(
                    "support indices must be strictly increasing, got {indices:?}"
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::Range(format!("index {last} >= {n}")));
            }
        }
        Ok(SupportSet { indices })
    }

    /// Sorts and deduplicates arbitrary indices before validating the bound.
    pub fn from_unsorted(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices, n)
    }

    /// `{0, 1, ..., k-1}`.
    pub fn first(k: usize) -> Self {
        SupportSet {
            indices: (0..k).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::first(n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Set union of two supports.
    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut merged: Vec<usize> = self
            .indices
            .iter()
            .chain(other.indices.iter())
            .copied()
            .collect();
        merged.sort_unstable();
        merged.dedup();
        SupportSet { indices: merged }
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.indices
    }
}

/// Outcome of advancing a combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Successor {
    Next(SupportSet),
    Exhausted,
}

/// Lexicographic successor of the k-combination `c` of `{0..n-1}`.
pub fn next_combination(c: &SupportSet, n: usize) -> Result<Successor> {
    if c.indices.last().is_some_and(|&last| last >= n) {
        return Err(Error::Argument(format!(
            "combination {:?} is not a subset of 0..{n}",
            c.indices
        )));
    }
    let mut next = c.indices.clone();
    if advance(&mut next, n) {
        Ok(Successor::Next(SupportSet { indices: next }))
    } else {
        Ok(Successor::Exhausted)
    }
}

/// In-place lexicographic advance. Returns `false` once `c` was the last
/// combination `{n-k, ..., n-1}`; `c` is left unspecified in that case.
pub(crate) fn advance(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The combination with lexicographic rank `rank` among k-subsets of `0..n`.
pub fn unrank(rank: u64, n: usize, k: usize) -> Result<SupportSet> {
    let total = binomial(n, k);
    if rank >= total {
        return Err(Error::Range(format!("rank {rank} >= C({n},{k}) = {total}")));
    }
    let mut out = Vec::with_capacity(k);
    let mut rank = rank;
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        let mut v = next;
        loop {
            let block = binomial(n - v - 1, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
        next = v + 1;
    }
    Ok(SupportSet { indices: out })
}

/// Iterator over all k-combinations of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut succ = out.clone();
        if !succ.is_empty() && advance(&mut succ, self.n) {
            self.current = Some(succ);
        }
        Some(out)
    }
}
