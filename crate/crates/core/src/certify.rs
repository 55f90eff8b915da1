//! Spark, mutual coherence, Welch bound and restricted isometry constants,
//! and the guaranteed-unique sparsity limits they imply.
//!
//! Spark and RIP constants are computed by exhaustive enumeration of column
//! subsets. Both sweeps honour a single evaluation budget per call: when the
//! budget runs out the result is a lower bound and is flagged `exact: false`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{extreme_eigenvalues, has_full_column_rank};
use crate::matrix::{MatrixKind, MeasurementMatrix};
use crate::support::binomial;
use crate::sweep::{self, DEFAULT_CHUNK};

pub use crate::support::{next_combination, Successor};

/// Common sufficient threshold on `delta_2K` for l1/l0 equivalence.
pub const L1_THRESHOLD_SQRT2: f64 = std::f64::consts::SQRT_2 - 1.0;
/// Sharper threshold on `delta_2K` for l1/l0 equivalence.
pub const L1_THRESHOLD_0493: f64 = 0.493;

pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparkResult {
    /// `None` when no set of columns is dependent (possible only for `N <= M`).
    pub value: Option<usize>,
    pub exact: bool,
    pub evaluated: u64,
}

pub fn spark(a: &MeasurementMatrix, budget: u64) -> SparkResult {
    spark_partitioned(a, budget, DEFAULT_CHUNK)
}

/// [`spark`] with an explicit chunk size for the range partition.
pub fn spark_partitioned(a: &MeasurementMatrix, budget: u64, chunk: u64) -> SparkResult {
    let (m, n) = (a.rows(), a.cols());
    let dense = a.as_dense();
    let mut evaluated = 0u64;
    for k in 1..=m.min(n) {
        let total = binomial(n, k);
        let count = total.min(budget - evaluated);
        let dependent = sweep::find_first(n, k, count, chunk, |c| {
            !has_full_column_rank(&dense.select_columns(c))
        });
        match dependent {
            Some(rank) => {
                return SparkResult {
                    value: Some(k),
                    exact: true,
                    evaluated: evaluated + rank + 1,
                }
            }
            None if count < total => {
                return SparkResult {
                    value: Some(k),
                    exact: false,
                    evaluated: evaluated + count,
                }
            }
            None => evaluated += count,
        }
    }
    // every min(M, N) columns are independent
    SparkResult {
        value: (n > m).then_some(m + 1),
        exact: true,
        evaluated,
    }
}

/// Pairs within this absolute distance of the maximum count as tied.
pub const COHERENCE_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    pub mu: f64,
    /// Lexicographically smallest maximizing pair.
    pub pair: (usize, usize),
    /// Every pair attaining the maximum within [`COHERENCE_TIE_TOLERANCE`].
    pub ties: Vec<(usize, usize)>,
}

/// Largest normalized absolute inner product between two distinct columns.
pub fn coherence(a: &MeasurementMatrix) -> Result<Coherence> {
    let n = a.cols();
    if n < 2 {
        return Err(Error::Argument("coherence needs at least two columns".into()));
    }
    let gram = a.gram();
    let g = gram.as_dense();
    let norms: Vec<f64> = (0..n).map(|j| g[(j, j)].re.sqrt()).collect();
    if let Some(j) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::DegenerateColumn { index: j });
    }
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for m in 0..n {
        for k in m + 1..n {
            values.push(((m, k), g[(m, k)].norm() / (norms[m] * norms[k])));
        }
    }
    let mu = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let ties: Vec<(usize, usize)> = values
        .iter()
        .filter(|v| v.1 >= mu - COHERENCE_TIE_TOLERANCE)
        .map(|v| v.0)
        .collect();
    Ok(Coherence {
        mu,
        pair: ties[0],
        ties,
    })
}

/// Lower bound `sqrt((N-M) / (M (N-1)))` on the coherence of any M x N matrix.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m == 0 || m > n || n < 2 {
        return Err(Error::Argument(format!(
            "Welch bound needs 1 <= M <= N and N >= 2, got M={m}, N={n}"
        )));
    }
    Ok(((n - m) as f64 / (m as f64 * (n - 1) as f64)).sqrt())
}

/// Bound `(1 + delta) / (1 - delta)` on the condition number of a Gram
/// submatrix whose order satisfies the RIP with constant `delta`.
pub fn condition_number_bound(delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok((1.0 + delta) / (1.0 - delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipConstant {
    pub order: usize,
    pub delta: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub exact: bool,
    pub evaluated: u64,
}

pub fn rip_constant(a: &MeasurementMatrix, order: usize, budget: u64) -> Result<RipConstant> {
    rip_constant_partitioned(a, order, budget, DEFAULT_CHUNK)
}

pub fn rip_constant_partitioned(
    a: &MeasurementMatrix,
    order: usize,
    budget: u64,
    chunk: u64,
) -> Result<RipConstant> {
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let (m, n) = (a.rows(), a.cols());
    if order == 0 || order > m.min(n) {
        return Err(Error::Argument(format!(
            "RIP order must lie in 1..={}, got {order}",
            m.min(n)
        )));
    }
    let gram = a.gram();
    Ok(rip_from_gram(gram.as_dense(), order, budget, chunk))
}

fn rip_from_gram(g: &DMatrix<Complex64>, order: usize, budget: u64, chunk: u64) -> RipConstant {
    let n = g.nrows();
    let total = binomial(n, order);
    let count = total.min(budget);
    let (lambda_min, lambda_max) = sweep::fold(
        n,
        order,
        count,
        chunk,
        || (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), c| {
            let sub = DMatrix::from_fn(c.len(), c.len(), |i, j| g[(c[i], c[j])]);
            let (l, h) = extreme_eigenvalues(&sub);
            (lo.min(l), hi.max(h))
        },
        |a, b| (a.0.min(b.0), a.1.max(b.1)),
    );
    let delta = if count == 0 {
        0.0
    } else {
        (1.0 - lambda_min).max(lambda_max - 1.0).max(0.0)
    };
    RipConstant {
        order,
        delta,
        lambda_min,
        lambda_max,
        exact: count == total,
        evaluated: count,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipOrder {
    pub order: usize,
    pub delta: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipProfile {
    pub orders: Vec<RipOrder>,
    pub budget_used: u64,
}

impl RipProfile {
    pub fn delta(&self, order: usize) -> Option<f64> {
        self.get(order).map(|o| o.delta)
    }

    pub fn get(&self, order: usize) -> Option<&RipOrder> {
        order
            .checked_sub(1)
            .and_then(|i| self.orders.get(i))
            .filter(|o| o.order == order)
    }

    /// Largest K such that `delta_2j` is exact and below `threshold` for
    /// every `j <= K`.
    pub fn sparsity_limit(&self, threshold: f64) -> usize {
        let mut k = 0;
        while let Some(o) = self.get(2 * (k + 1)) {
            if !(o.exact && o.delta < threshold) {
                break;
            }
            k += 1;
        }
        k
    }
}

/// RIP constants of orders `1..=k_max` sharing one evaluation budget.
///
/// Orders computed only partially report `max(own lower bound, previous
/// delta)`, which is still a valid lower bound since `delta_K` is
/// nondecreasing in `K`.
pub fn rip_profile(a: &MeasurementMatrix, k_max: usize, budget: u64) -> Result<RipProfile> {
    rip_profile_partitioned(a, k_max, budget, DEFAULT_CHUNK)
}

pub fn rip_profile_partitioned(
    a: &MeasurementMatrix,
    k_max: usize,
    budget: u64,
    chunk: u64,
) -> Result<RipProfile> {
    if !a.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let limit = a.rows().min(a.cols());
    if k_max > limit {
        return Err(Error::Argument(format!(
            "k_max must not exceed min(M, N) = {limit}, got {k_max}"
        )));
    }
    let gram = a.gram();
    let mut used = 0;
    let mut orders: Vec<RipOrder> = Vec::with_capacity(k_max);
    for order in 1..=k_max {
        let r = rip_from_gram(gram.as_dense(), order, budget - used, chunk);
        used += r.evaluated;
        let prev = orders.last().map_or(0.0, |o| o.delta);
        let delta = if r.exact { r.delta } else { r.delta.max(prev) };
        orders.push(RipOrder {
            order,
            delta,
            exact: r.exact,
        });
    }
    Ok(RipProfile {
        orders,
        budget_used: used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub k_max: usize,
    pub budget: u64,
    pub chunk: u64,
}

impl CertifyOptions {
    /// `k_max = min(M, 5)` and the default budget.
    pub fn for_matrix(a: &MeasurementMatrix) -> Self {
        CertifyOptions {
            k_max: a.rows().min(a.cols()).min(5),
            budget: DEFAULT_BUDGET,
            chunk: DEFAULT_CHUNK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondBound {
    pub order: usize,
    pub bound: f64,
}

/// Everything [`certify`] learns about a matrix. Reals are rounded to 12
/// significant digits so the JSON form is stable and round-trips exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub rows: usize,
    pub cols: usize,
    pub kind: MatrixKind,
    /// `null` when all columns are linearly independent.
    pub spark: Option<usize>,
    pub spark_exact: bool,
    /// Largest K with `K < spark / 2`.
    pub spark_limit: usize,
    pub coherence: f64,
    pub coherence_pair: (usize, usize),
    /// All maximizing pairs, in lexicographic order.
    pub coherence_ties: Vec<(usize, usize)>,
    /// `(1 + 1/mu) / 2`; `null` for orthogonal columns.
    pub coherence_threshold: Option<f64>,
    pub coherence_limit: usize,
    pub spark_lower_bound_from_mu: Option<f64>,
    pub welch: f64,
    /// `(1 + 1/welch) / 2`, the best coherence limit any M x N matrix could certify.
    pub welch_threshold: Option<f64>,
    pub rip: RipProfile,
    pub rip_unique_limit: usize,
    pub l1_equiv_limit_sqrt2: usize,
    pub l1_equiv_limit_0493: usize,
    pub cond_bounds: Vec<CondBound>,
    /// Total submatrix evaluations across the spark and RIP sweeps.
    pub budget_used: u64,
}

impl CertificationReport {
    /// True when every enumeration finished within the budget.
    pub fn is_exact(&self) -> bool {
        self.spark_exact && self.rip.orders.iter().all(|o| o.exact)
    }
}

pub fn certify(a: &MeasurementMatrix, options: &CertifyOptions) -> Result<CertificationReport> {
    let (m, n) = (a.rows(), a.cols());
    let coh = coherence(a)?;
    let welch = welch_bound(m.min(n), n)?;

    let sp = spark_partitioned(a, options.budget, options.chunk);
    let remaining = options.budget - sp.evaluated;
    let rip = rip_profile_partitioned(a, options.k_max, remaining, options.chunk)?;

    let spark_limit = match sp.value {
        Some(s) => (s - 1) / 2,
        None => n,
    };
    let threshold = |mu: f64| (mu > 0.0).then(|| 0.5 * (1.0 + 1.0 / mu));
    let coherence_threshold = threshold(coh.mu);
    let coherence_limit = match coherence_threshold {
        Some(t) => (strict_floor(t)).min(n),
        None => n,
    };

    let cond_bounds = rip
        .orders
        .iter()
        .filter_map(|o| {
            condition_number_bound(o.delta)
                .ok()
                .map(|b| CondBound { order: o.order, bound: round_sig(b) })
        })
        .collect();

    let rounded_rip = RipProfile {
        orders: rip
            .orders
            .iter()
            .map(|o| RipOrder {
                delta: round_sig(o.delta),
                ..o.clone()
            })
            .collect(),
        budget_used: rip.budget_used,
    };

    Ok(CertificationReport {
        rows: m,
        cols: n,
        kind: a.kind(),
        spark: sp.value,
        spark_exact: sp.exact,
        spark_limit,
        coherence: round_sig(coh.mu),
        coherence_pair: coh.pair,
        coherence_ties: coh.ties.clone(),
        coherence_threshold: coherence_threshold.map(round_sig),
        coherence_limit,
        spark_lower_bound_from_mu: (coh.mu > 0.0).then(|| round_sig(1.0 + 1.0 / coh.mu)),
        welch: round_sig(welch),
        welch_threshold: threshold(welch).map(round_sig),
        rip_unique_limit: rip.sparsity_limit(1.0),
        l1_equiv_limit_sqrt2: rip.sparsity_limit(L1_THRESHOLD_SQRT2),
        l1_equiv_limit_0493: rip.sparsity_limit(L1_THRESHOLD_0493),
        rip: rounded_rip,
        cond_bounds,
        budget_used: sp.evaluated + rip.budget_used,
    })
}

/// Largest integer strictly below `t` (for `t > 0`).
fn strict_floor(t: f64) -> usize {
    (t.ceil() as usize).saturating_sub(1)
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
