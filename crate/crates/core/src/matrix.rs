//! Measurement matrices: construction, CSV I/O, normalization, column
//! selection and Gram products.
//!
//! Everything is stored as complex `f64`; real matrices simply carry zero
//! imaginary parts.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::support::SupportSet;

/// Relative tolerance on column norms for the `normalized` flag.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Loaded,
    Gaussian,
    PartialIdft,
    RandomPartialFourier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    data: DMatrix<Complex64>,
    kind: MatrixKind,
    normalized: bool,
}

impl MeasurementMatrix {
    /// Wraps a dense matrix, measuring column norms to set the normalized flag.
    pub fn from_dense(data: DMatrix<Complex64>, kind: MatrixKind) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Shape(format!(
                "matrix must be at least 1x1, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let normalized = columns_are_unit(&data);
        Ok(MeasurementMatrix {
            data,
            kind,
            normalized,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {} has {} fields, expected {n}",
                i + 1,
                r.len()
            )));
        }
        let data = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::from_dense(data, MatrixKind::Loaded)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text)
    }

    /// Parses headerless CSV text. Blank lines are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .enumerate()
                .map(|(col, field)| {
                    parse_complex(field).ok_or_else(|| Error::Parse {
                        row: lineno + 1,
                        col: col + 1,
                        field: field.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Shape("empty matrix file".into()));
        }
        Self::from_rows(&rows)
    }

    /// CSV rendering with shortest round-trip float formatting and a trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format_complex(self.data[(i, j)]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Rows of the inverse DFT matrix at `positions`.
    ///
    /// Entry `(m, k)` is `exp(j 2 pi n_m k / N) * s`, with `s = 1/N` for the
    /// plain inverse transform and `s = 1/sqrt(M)` when `normalize` is set.
    pub fn build_partial_idft(n: usize, positions: &[usize], normalize: bool) -> Result<Self> {
        let m = positions.len();
        if n == 0 || m == 0 || m > n {
            return Err(Error::Argument(format!(
                "need 1 <= M <= N, got M={m}, N={n}"
            )));
        }
        if let Some(&p) = positions.iter().find(|&&p| p >= n) {
            return Err(Error::Range(format!("sample position {p} >= N={n}")));
        }
        let mut seen = vec![false; n];
        for &p in positions {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Argument(format!("duplicate sample position {p}")));
            }
        }
        let scale = if normalize {
            1.0 / (m as f64).sqrt()
        } else {
            1.0 / n as f64
        };
        let data = DMatrix::from_fn(m, n, |i, k| {
            // reduce n*k mod N first so the phase stays exact for large products
            let phase = 2.0 * PI * ((positions[i] * k) % n) as f64 / n as f64;
            Complex64::from_polar(scale, phase)
        });
        Self::from_dense(data, MatrixKind::PartialIdft)
    }

    /// Fourier rows at arbitrary instants `t_m` in `[0, period)`.
    pub fn build_random_partial_fourier(
        n: usize,
        period: f64,
        times: &[f64],
        normalize: bool,
    ) -> Result<Self> {
        if times.is_empty() || n == 0 {
            return Err(Error::Argument("need at least one instant and one harmonic".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Argument(format!("period must be positive, got {period}")));
        }
        if let Some(&t) = times.iter().find(|&&t| !(0.0..period).contains(&t)) {
            return Err(Error::Range(format!("instant {t} outside [0, {period})")));
        }
        let scale = if normalize {
            1.0 / (times.len() as f64).sqrt()
        } else {
            1.0
        };
        let data = DMatrix::from_fn(times.len(), n, |i, k| {
            Complex64::from_polar(scale, 2.0 * PI * times[i] * k as f64 / period)
        });
        Self::from_dense(data, MatrixKind::RandomPartialFourier)
    }

    /// I.i.d. standard normal entries scaled by `1/sqrt(M)`.
    ///
    /// Draws come from ChaCha8 seeded with `seed`, consumed in row-major
    /// order, so the matrix is reproducible across platforms.
    pub fn build_gaussian(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Argument(format!("need M, N >= 1, got {m}x{n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (m as f64).sqrt();
        let mut row_major = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            let x: f64 = StandardNormal.sample(&mut rng);
            row_major.push(Complex64::new(x * scale, 0.0));
        }
        let data = DMatrix::from_row_slice(m, n, &row_major);
        Self::from_dense(data, MatrixKind::Gaussian)
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_dense(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.data.column_iter().map(|c| c.norm()).collect()
    }

    pub fn normalize_columns(&self) -> Result<Self> {
        let mut data = self.data.clone();
        for (j, mut col) in data.column_iter_mut().enumerate() {
            let norm = col.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateColumn { index: j });
            }
            col.unscale_mut(norm);
        }
        Ok(MeasurementMatrix {
            data,
            kind: self.kind,
            normalized: true,
        })
    }

    pub fn gram(&self) -> HermitianGram {
        HermitianGram(self.data.adjoint() * &self.data)
    }

    pub fn select_columns(&self, support: &SupportSet) -> Result<Self> {
        if let Some(&bad) = support.indices().iter().find(|&&j| j >= self.cols()) {
            return Err(Error::Range(format!(
                "column {bad} >= N={}",
                self.cols()
            )));
        }
        if support.is_empty() {
            return Err(Error::Argument("cannot select an empty support".into()));
        }
        let data = self.data.select_columns(support.indices());
        Ok(MeasurementMatrix {
            data,
            kind: self.kind,
            normalized: self.normalized,
        })
    }
}

fn columns_are_unit(data: &DMatrix<Complex64>) -> bool {
    data.column_iter()
        .all(|c| (c.norm() - 1.0).abs() <= NORM_TOLERANCE)
}

/// Hermitian Gram matrix `A^H A`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianGram(DMatrix<Complex64>);

impl HermitianGram {
    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dense(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn principal_submatrix(&self, support: &SupportSet) -> HermitianGram {
        let idx = support.indices();
        HermitianGram(DMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            self.0[(idx[i], idx[j])]
        }))
    }
}

/// Parses `x`, `a+bi`, `a-bi` or `bi`. Whitespace around the field is ignored.
pub fn parse_complex(field: &str) -> Option<Complex64> {
    let s = field.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not the sign of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (body[..p].trim().parse::<f64>().ok()?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    let mut s = format!("{}", z.re);
    if z.im != 0.0 {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        let _ = write!(s, "{sign}{}i", z.im.abs());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_cell_grammar() {
        assert_eq!(parse_complex("1.0"), Some(c(1.0, 0.0)));
        assert_eq!(parse_complex(" -0.7 "), Some(c(-0.7, 0.0)));
        assert_eq!(parse_complex("1.5+2i"), Some(c(1.5, 2.0)));
        assert_eq!(parse_complex("1.5-2.25i"), Some(c(1.5, -2.25)));
        assert_eq!(parse_complex("-3i"), Some(c(0.0, -3.0)));
        assert_eq!(parse_complex("1e-3-2E+2i"), Some(c(1e-3, -200.0)));
        assert_eq!(parse_complex("-1e-3+i"), Some(c(-1e-3, 1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
        assert_eq!(parse_complex("1+2j"), None);
    }

    #[test]
    fn single_cell_is_normalized() {
        let a = MeasurementMatrix::parse_csv("1.0\n").unwrap();
        assert_eq!((a.rows(), a.cols()), (1, 1));
        assert!(a.is_normalized());
        assert_eq!(a.kind(), MatrixKind::Loaded);
    }

    #[test]
    fn ragged_rows_are_a_shape_error() {
        let err = MeasurementMatrix::parse_csv("1,2,3\n4,5,6,7\n").unwrap_err();
        assert!(matches!(err, Error::Shape(_)), "{err}");
    }

    #[test]
    fn malformed_field_names_row_and_column() {
        let err = MeasurementMatrix::parse_csv("1,2\n3,x\n").unwrap_err();
        match err {
            Error::Parse { row, col, .. } => assert_eq!((row, col), (2, 2)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn csv_round_trip_keeps_complex_entries() {
        let a = MeasurementMatrix::build_partial_idft(8, &[1, 3, 6], true).unwrap();
        let text = a.to_csv();
        assert!(text.ends_with('\n'));
        let b = MeasurementMatrix::parse_csv(&text).unwrap();
        assert_eq!(a.as_dense(), b.as_dense());
    }

    #[test]
    fn idft_zero_row() {
        let a = MeasurementMatrix::build_partial_idft(4, &[0], false).unwrap();
        for k in 0..4 {
            assert!(close(a.entry(0, k), c(0.25, 0.0), 1e-15));
        }
    }

    #[test]
    fn full_idft_inverts_forward_dft() {
        let n = 8;
        let a = MeasurementMatrix::build_partial_idft(n, &(0..n).collect::<Vec<_>>(), false)
            .unwrap();
        let forward = DMatrix::from_fn(n, n, |k, m| {
            Complex64::from_polar(1.0, -2.0 * PI * (k * m) as f64 / n as f64)
        });
        let prod = a.as_dense() * forward;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!(close(prod[(i, j)], want, 1e-9));
            }
        }
    }

    #[test]
    fn idft_entries_share_one_modulus() {
        let a = MeasurementMatrix::build_partial_idft(16, &[0, 5, 9, 11], true).unwrap();
        assert!(a.is_normalized());
        for z in a.as_dense().iter() {
            assert!((z.norm() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn idft_argument_errors() {
        assert!(matches!(
            MeasurementMatrix::build_partial_idft(4, &[1, 1], false),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            MeasurementMatrix::build_partial_idft(4, &[4], false),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn uniform_grid_fourier_equals_partial_idft() {
        let n = 8;
        let positions = [0usize, 2, 3, 7];
        let times: Vec<f64> = positions.iter().map(|&p| p as f64 * 2.0 / n as f64).collect();
        let a = MeasurementMatrix::build_random_partial_fourier(n, 2.0, &times, true).unwrap();
        let b = MeasurementMatrix::build_partial_idft(n, &positions, true).unwrap();
        for (x, y) in a.as_dense().iter().zip(b.as_dense().iter()) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn fourier_at_zero_is_all_ones() {
        let a = MeasurementMatrix::build_random_partial_fourier(2, 1.0, &[0.0], false).unwrap();
        assert_eq!(a.entry(0, 0), c(1.0, 0.0));
        assert_eq!(a.entry(0, 1), c(1.0, 0.0));
        assert!(matches!(
            MeasurementMatrix::build_random_partial_fourier(2, 1.0, &[1.0], false),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn gaussian_is_deterministic() {
        let a = MeasurementMatrix::build_gaussian(5, 8, 42).unwrap();
        let b = MeasurementMatrix::build_gaussian(5, 8, 42).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let c = MeasurementMatrix::build_gaussian(5, 8, 43).unwrap();
        assert_ne!(a.to_csv(), c.to_csv());
        assert!(a.is_real());
    }

    #[test]
    fn tall_gaussian_column_has_unit_energy() {
        // energy is chi^2_1000 / 1000 with standard deviation sqrt(2/1000) ~ 0.045
        let a = MeasurementMatrix::build_gaussian(1000, 1, 7).unwrap();
        let energy = a.column_norms()[0].powi(2);
        assert!((0.9..=1.1).contains(&energy), "energy {energy}");
    }

    #[test]
    fn normalize_three_four_five() {
        let a = MeasurementMatrix::from_real_rows(&[vec![3.0], vec![4.0]]).unwrap();
        assert!(!a.is_normalized());
        let b = a.normalize_columns().unwrap();
        assert!(close(b.entry(0, 0), c(0.6, 0.0), 1e-15));
        assert!(close(b.entry(1, 0), c(0.8, 0.0), 1e-15));
        assert!(b.is_normalized());
    }

    #[test]
    fn zero_column_cannot_be_normalized() {
        let a = MeasurementMatrix::from_real_rows(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(
            a.normalize_columns(),
            Err(Error::DegenerateColumn { index: 1 })
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let a = MeasurementMatrix::build_gaussian(4, 6, 3).unwrap();
        let once = a.normalize_columns().unwrap();
        let twice = once.normalize_columns().unwrap();
        for (x, y) in once.as_dense().iter().zip(twice.as_dense().iter()) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn gram_of_single_column() {
        let s = 1.0 / 2f64.sqrt();
        let a = MeasurementMatrix::from_real_rows(&[vec![s], vec![s]]).unwrap();
        let g = a.gram();
        assert_eq!(g.order(), 1);
        assert!(close(g.entry(0, 0), c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn gram_of_orthonormal_columns_is_identity() {
        let a = MeasurementMatrix::build_partial_idft(4, &[0, 1, 2, 3], true).unwrap();
        let g = a.gram();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(g.entry(i, j), c(want, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn select_columns_preserves_order_and_checks_range() {
        let a = MeasurementMatrix::build_gaussian(3, 5, 1).unwrap();
        let s = SupportSet::new(vec![1, 4], 5).unwrap();
        let sub = a.select_columns(&s).unwrap();
        for i in 0..3 {
            assert_eq!(sub.entry(i, 0), a.entry(i, 1));
            assert_eq!(sub.entry(i, 1), a.entry(i, 4));
        }
        let full = a.select_columns(&SupportSet::full(5)).unwrap();
        assert_eq!(full.as_dense(), a.as_dense());
        let wide = SupportSet::new(vec![0, 7], 8).unwrap();
        assert!(matches!(a.select_columns(&wide), Err(Error::Range(_))));
    }
}
