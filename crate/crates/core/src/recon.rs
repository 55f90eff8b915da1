//! Reconstruction harness: planted sparse signals, noiseless measurements,
//! least squares on a support, orthogonal matching pursuit, and Monte-Carlo
//! recovery experiments.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RANK_TOLERANCE;
use crate::matrix::{format_complex, MatrixKind, MeasurementMatrix};
use crate::support::SupportSet;

/// Relative l2 error at or below which a reconstruction counts as exact.
pub const DEFAULT_RECOVERY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    length: usize,
    support: SupportSet,
    values: Vec<Complex64>,
}

impl SparseVector {
    pub fn new(length: usize, support: SupportSet, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::Shape(format!(
                "{} values for a support of size {}",
                values.len(),
                support.len()
            )));
        }
        if support.indices().last().is_some_and(|&i| i >= length) {
            return Err(Error::Range(format!("support exceeds length {length}")));
        }
        Ok(SparseVector {
            length,
            support,
            values,
        })
    }

    pub fn zeros(length: usize) -> Self {
        SparseVector {
            length,
            support: SupportSet::first(0),
            values: Vec::new(),
        }
    }

    /// Spike of amplitude `value` at `index`.
    pub fn spike(length: usize, index: usize, value: Complex64) -> Result<Self> {
        Self::new(length, SupportSet::new(vec![index], length)?, vec![value])
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of stored (nonzero) coefficients.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.length];
        for (&i, &v) in self.support.indices().iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }

    /// `||self - other||_2 / ||other||_2`, or the absolute error when `other` is zero.
    pub fn relative_error(&self, other: &SparseVector) -> f64 {
        let a = self.to_dense();
        let b = other.to_dense();
        let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let base: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        if base == 0.0 {
            diff.sqrt()
        } else {
            (diff / base).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub values: Vec<Complex64>,
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Accepts a single column or a single row in the matrix CSV grammar.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let m = MeasurementMatrix::parse_csv(text)?;
        if m.cols() != 1 && m.rows() != 1 {
            return Err(Error::Shape(format!(
                "measurements must be a single row or column, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(MeasurementVector {
            values: m.as_dense().iter().copied().collect(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for &z in &self.values {
            let _ = writeln!(out, "{}", format_complex(z));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeLaw {
    /// Unit modulus with uniform random phase.
    #[default]
    UnitPhase,
    /// Circular complex normal with unit variance.
    ComplexNormal,
}

pub fn generate_sparse_signal(
    n: usize,
    k: usize,
    seed: u64,
    law: AmplitudeLaw,
) -> Result<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sparse_signal_with(&mut rng, n, k, law)
}

fn sparse_signal_with<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    law: AmplitudeLaw,
) -> Result<SparseVector> {
    if k == 0 || k > n {
        return Err(Error::Argument(format!("need 1 <= K <= N, got K={k}, N={n}")));
    }
    let mut idx = index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    let values = (0..k)
        .map(|_| match law {
            AmplitudeLaw::UnitPhase => {
                Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
            }
            AmplitudeLaw::ComplexNormal => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
        })
        .collect();
    SparseVector::new(n, SupportSet::new(idx, n)?, values)
}

/// `y = A x`.
pub fn measure(a: &MeasurementMatrix, x: &SparseVector) -> Result<MeasurementVector> {
    if a.cols() != x.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns, vector has length {}",
            a.cols(),
            x.len()
        )));
    }
    let dense = a.as_dense();
    let mut y = DVector::from_element(a.rows(), Complex64::new(0.0, 0.0));
    for (&j, &v) in x.support.indices().iter().zip(&x.values) {
        y.axpy(v, &dense.column(j), Complex64::new(1.0, 0.0));
    }
    Ok(MeasurementVector {
        values: y.iter().copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsSolution {
    pub vector: SparseVector,
    /// `||y - A x||_2`.
    pub residual: f64,
}

/// Least squares restricted to the columns in `support`.
pub fn ls_on_support(
    a: &MeasurementMatrix,
    y: &MeasurementVector,
    support: &SupportSet,
) -> Result<LsSolution> {
    if y.len() != a.rows() {
        return Err(Error::Shape(format!(
            "matrix has {} rows, measurements have length {}",
            a.rows(),
            y.len()
        )));
    }
    if support.indices().last().is_some_and(|&i| i >= a.cols()) {
        return Err(Error::Range(format!("support exceeds {} columns", a.cols())));
    }
    let rhs = DVector::from_column_slice(&y.values);
    if support.is_empty() {
        return Ok(LsSolution {
            vector: SparseVector::zeros(a.cols()),
            residual: rhs.norm(),
        });
    }
    if support.len() > a.rows() {
        return Err(Error::DegenerateSupport {
            support: support.indices().to_vec(),
        });
    }
    let sub = a.as_dense().select_columns(support.indices());
    let svd = sub.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= RANK_TOLERANCE * smax {
        return Err(Error::DegenerateSupport {
            support: support.indices().to_vec(),
        });
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Argument(e.to_string()))?;
    let residual = (&rhs - &sub * &coef).norm();
    Ok(LsSolution {
        vector: SparseVector::new(a.cols(), support.clone(), coef.iter().copied().collect())?,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmpResult {
    pub vector: SparseVector,
    pub residual: f64,
    pub iterations: usize,
}

/// Orthogonal matching pursuit.
///
/// Each iteration adds the unselected column with the largest normalized
/// `|a_j^H r|` (smallest index on ties) and refits by least squares. Stops
/// after `k_target` atoms, once `||r|| <= residual_tol`, or when the next
/// refit would be rank deficient.
pub fn omp(
    a: &MeasurementMatrix,
    y: &MeasurementVector,
    k_target: usize,
    residual_tol: f64,
) -> Result<OmpResult> {
    if y.len() != a.rows() {
        return Err(Error::Shape(format!(
            "matrix has {} rows, measurements have length {}",
            a.rows(),
            y.len()
        )));
    }
    let dense = a.as_dense();
    let norms = a.column_norms();
    let k_target = k_target.min(a.rows()).min(a.cols());
    let target = DVector::from_column_slice(&y.values);

    let mut chosen: Vec<usize> = Vec::new();
    let mut best = LsSolution {
        vector: SparseVector::zeros(a.cols()),
        residual: target.norm(),
    };
    let mut r = target.clone();
    let mut iterations = 0;
    while chosen.len() < k_target && best.residual > residual_tol {
        iterations += 1;
        let mut pick: Option<(usize, f64)> = None;
        for (j, &nj) in norms.iter().enumerate() {
            if nj == 0.0 || chosen.contains(&j) {
                continue;
            }
            let c = dense.column(j).dotc(&r).norm() / nj;
            if pick.is_none_or(|(_, b)| c > b) {
                pick = Some((j, c));
            }
        }
        let Some((j, _)) = pick else { break };
        let mut trial = chosen.clone();
        trial.push(j);
        let support = SupportSet::from_unsorted(trial.clone(), a.cols())?;
        match ls_on_support(a, y, &support) {
            Ok(sol) => {
                chosen = trial;
                let fit = dense.select_columns(sol.vector.support.indices())
                    * DVector::from_column_slice(sol.vector.values());
                r = &target - fit;
                best = sol;
            }
            Err(Error::DegenerateSupport { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(OmpResult {
        vector: best.vector,
        residual: best.residual,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityOutcome {
    pub k: usize,
    pub successes: usize,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: usize,
    pub cols: usize,
    pub kind: MatrixKind,
    pub trials: usize,
    pub seed: u64,
    pub amplitude_law: AmplitudeLaw,
    pub recovery_tol: f64,
    pub outcomes: Vec<SparsityOutcome>,
}

impl ExperimentReport {
    pub fn success_rate(&self, k: usize) -> Option<f64> {
        self.outcomes.iter().find(|o| o.k == k).map(|o| o.success_rate)
    }

    /// `k,success_rate` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,success_rate\n");
        for o in &self.outcomes {
            let _ = writeln!(out, "{},{}", o.k, o.success_rate);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOptions {
    pub trials: usize,
    pub seed: u64,
    pub recovery_tol: f64,
    pub amplitude_law: AmplitudeLaw,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            trials: 200,
            seed: 0,
            recovery_tol: DEFAULT_RECOVERY_TOL,
            amplitude_law: AmplitudeLaw::UnitPhase,
        }
    }
}

/// RNG for one trial. The stream index depends only on `(k, trial)`, so
/// results do not depend on how trials are scheduled.
fn trial_rng(seed: u64, k: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | trial as u64);
    rng
}

fn run_trial(
    a: &MeasurementMatrix,
    k: usize,
    trial: usize,
    opts: &ExperimentOptions,
) -> Result<bool> {
    let mut rng = trial_rng(opts.seed, k, trial);
    let x = sparse_signal_with(&mut rng, a.cols(), k, opts.amplitude_law)?;
    let y = measure(a, &x)?;
    let got = omp(a, &y, k, 1e-12 * y.norm())?;
    Ok(got.vector.relative_error(&x) <= opts.recovery_tol)
}

/// Plants `trials` K-sparse signals for every K in `ks`, measures them
/// without noise and counts exact OMP recoveries.
pub fn monte_carlo(
    a: &MeasurementMatrix,
    ks: &[usize],
    opts: &ExperimentOptions,
) -> Result<ExperimentReport> {
    if opts.trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let mut outcomes = Vec::with_capacity(ks.len());
    for &k in ks {
        let successes = (0..opts.trials)
            .into_par_iter()
            .map(|t| run_trial(a, k, t, opts).map(usize::from))
            .try_reduce(|| 0, |x, y| Ok(x + y))?;
        outcomes.push(SparsityOutcome {
            k,
            successes,
            success_rate: successes as f64 / opts.trials as f64,
        });
    }
    Ok(ExperimentReport {
        rows: a.rows(),
        cols: a.cols(),
        kind: a.kind(),
        trials: opts.trials,
        seed: opts.seed,
        amplitude_law: opts.amplitude_law,
        recovery_tol: opts.recovery_tol,
        outcomes,
    })
}
