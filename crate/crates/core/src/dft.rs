//! Guaranteed-unique sparsity for DFT-sparse signals with missing samples.
//!
//! For a signal of length `N = 2^r` with `Q` missing samples at positions
//! `q in N_Q`, the closed-form limit accepts sparsity `K` when
//!
//! ```text
//! K < N - max_{h = 0..r-1} 2^h (Q_{2^h} - 1) - K
//! ```
//!
//! where `Q_{2^h}` is the largest number of missing positions sharing one
//! residue class modulo `2^h`. The brute-force oracle checks the underlying
//! rank condition directly on the partial inverse DFT matrix and is the
//! ground truth: on some patterns (e.g. `N = 16`, missing `{0,2,7,8,10}`,
//! `K = 3`) it finds colliding spectra the closed form accepts.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::has_full_column_rank;
use crate::matrix::MeasurementMatrix;
use crate::support::binomial;
use crate::sweep::{self, DEFAULT_CHUNK};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingSamplePattern {
    n: usize,
    missing: Vec<usize>,
}

impl MissingSamplePattern {
    /// Missing positions may be given in any order; duplicates are rejected.
    pub fn new(n: usize, mut missing: Vec<usize>) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("N must be a power of two, got {n}")));
        }
        missing.sort_unstable();
        if let Some(w) = missing.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Argument(format!("duplicate missing position {}", w[0])));
        }
        if let Some(&p) = missing.last().filter(|&&p| p >= n) {
            return Err(Error::Range(format!("missing position {p} >= N={n}")));
        }
        Ok(MissingSamplePattern { n, missing })
    }

    /// Pattern file: first line `N`, second line comma-separated missing
    /// positions (absent or empty when nothing is missing).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let first = lines
            .next()
            .ok_or_else(|| Error::Shape("empty pattern file".into()))?;
        let n = first.parse::<usize>().map_err(|_| Error::Parse {
            row: 1,
            col: 1,
            field: first.to_string(),
        })?;
        let missing = match lines.next() {
            Some(line) => parse_positions(line).map_err(|(col, field)| Error::Parse {
                row: 2,
                col,
                field,
            })?,
            None => Vec::new(),
        };
        if lines.next().is_some() {
            return Err(Error::Shape("pattern file has more than two lines".into()));
        }
        Self::new(n, missing)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_file_string(&self) -> String {
        let list: Vec<String> = self.missing.iter().map(usize::to_string).collect();
        format!("{}\n{}\n", self.n, list.join(","))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn log2_len(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    pub fn missing_count(&self) -> usize {
        self.missing.len()
    }

    pub fn available(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|p| self.missing.binary_search(p).is_err())
            .collect()
    }

    /// Every missing position moved by `shift` modulo `N`.
    pub fn circular_shift(&self, shift: usize) -> Self {
        let missing = self.missing.iter().map(|&q| (q + shift) % self.n).collect();
        Self::new(self.n, missing).expect("shift preserves validity")
    }

    pub fn with_missing(&self, position: usize) -> Result<Self> {
        let mut missing = self.missing.clone();
        missing.push(position);
        Self::new(self.n, missing)
    }
}

/// Splits a comma-separated index list; errors carry the 1-based field and its text.
pub fn parse_positions(line: &str) -> std::result::Result<Vec<usize>, (usize, String)> {
    if line.trim().is_empty() {
        return Ok(Vec::new());
    }
    line.split(',')
        .enumerate()
        .map(|(i, f)| f.trim().parse::<usize>().map_err(|_| (i + 1, f.to_string())))
        .collect()
}

/// One row of the derivation table, for modulus `2^h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrideRow {
    pub h: u32,
    pub modulus: usize,
    /// Count of missing positions per residue `b = 0..2^h-1`.
    pub residue_counts: Vec<usize>,
    /// `Q_{2^h}`.
    pub count: usize,
    /// Smallest residue attaining `count`.
    pub argmax_residue: usize,
    /// `2^h (Q_{2^h} - 1)`, zero when nothing is missing.
    pub term: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DftUniquenessResult {
    pub n: usize,
    pub missing: Vec<usize>,
    /// `h -> Q_{2^h}`.
    pub stride_counts: BTreeMap<u32, usize>,
    pub penalty: usize,
    pub k_max: usize,
    pub derivation: Vec<StrideRow>,
}

fn stride_row(p: &MissingSamplePattern, h: u32) -> StrideRow {
    let modulus = 1usize << h;
    let mut residue_counts = vec![0usize; modulus];
    for &q in &p.missing {
        residue_counts[q % modulus] += 1;
    }
    let (argmax_residue, count) = residue_counts
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0), |best, (b, c)| if c > best.1 { (b, c) } else { best });
    StrideRow {
        h,
        modulus,
        residue_counts,
        count,
        argmax_residue,
        term: modulus * count.saturating_sub(1),
    }
}

/// `Q_{2^h}`: the largest number of missing positions congruent modulo `2^h`.
pub fn stride_count(p: &MissingSamplePattern, h: u32) -> Result<usize> {
    if h >= p.log2_len() {
        return Err(Error::Argument(format!(
            "h must lie in 0..{}, got {h}",
            p.log2_len()
        )));
    }
    Ok(stride_row(p, h).count)
}

pub fn dft_sparsity_limit(p: &MissingSamplePattern) -> DftUniquenessResult {
    let derivation: Vec<StrideRow> = (0..p.log2_len()).map(|h| stride_row(p, h)).collect();
    let penalty = derivation.iter().map(|r| r.term).max().unwrap_or(0);
    let k_max = if p.missing.is_empty() {
        // full DFT is invertible
        p.n
    } else {
        // largest K with 2K < N - penalty; each term is at most N - 2^h < N
        (p.n - penalty - 1) / 2
    };
    DftUniquenessResult {
        n: p.n,
        missing: p.missing.clone(),
        stride_counts: derivation.iter().map(|r| (r.h, r.count)).collect(),
        penalty,
        k_max,
        derivation,
    }
}

fn oracle_setup(p: &MissingSamplePattern, k: usize) -> Result<Option<(MeasurementMatrix, usize)>> {
    if k == 0 {
        return Err(Error::Argument("sparsity K must be at least 1".into()));
    }
    // two K-sparse spectra differ on at most min(2K, N) coefficients
    let width = (2 * k).min(p.n);
    let available = p.available();
    if width > available.len() {
        return Ok(None);
    }
    let a = MeasurementMatrix::build_partial_idft(p.n, &available, true)?;
    Ok(Some((a, width)))
}

/// Exhaustive check that every `min(2K, N)`-column submatrix of the partial
/// inverse DFT matrix on the available samples has full column rank.
pub fn dft_uniqueness_oracle(p: &MissingSamplePattern, k: usize) -> Result<bool> {
    let Some((a, width)) = oracle_setup(p, k)? else {
        return Ok(false);
    };
    let dense = a.as_dense();
    let total = binomial(p.n, width);
    Ok(sweep::all(p.n, width, total, DEFAULT_CHUNK, |c| {
        has_full_column_rank(&dense.select_columns(c))
    }))
}

/// Randomized variant for sizes where exhaustive enumeration is out of
/// reach: checks `samples` uniformly drawn column subsets. A `true` result
/// means no counterexample was found.
pub fn dft_uniqueness_sampled(
    p: &MissingSamplePattern,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    let Some((a, width)) = oracle_setup(p, k)? else {
        return Ok(false);
    };
    let dense = a.as_dense();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut cols = index::sample(&mut rng, p.n, width).into_vec();
        cols.sort_unstable();
        if !has_full_column_rank(&dense.select_columns(&cols)) {
            return Ok(false);
        }
    }
    Ok(true)
}
