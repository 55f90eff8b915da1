//! Reference inputs with published certification values.

use crate::dft::MissingSamplePattern;
use crate::matrix::MeasurementMatrix;

/// The 5 x 8 column-normalized real matrix with spark 6 and coherence 0.49.
pub const PAPER_MATRIX_ROWS: [[f64; 8]; 5] = [
    [0.1, 0.1, 0.3, -0.7, 0.7, -0.1, 0.1, 0.3],
    [0.4, -0.8, -0.4, -0.1, 0.3, 0.3, 0.3, -0.5],
    [0.3, 0.5, -0.5, 0.4, 0.5, -0.7, 0.1, -0.4],
    [-0.7, -0.3, 0.1, 0.3, 0.4, -0.5, 0.5, -0.7],
    [-0.5, 0.1, -0.7, -0.5, -0.1, -0.4, -0.8, -0.1],
];

pub fn paper_matrix() -> MeasurementMatrix {
    let rows: Vec<Vec<f64>> = PAPER_MATRIX_ROWS.iter().map(|r| r.to_vec()).collect();
    MeasurementMatrix::from_real_rows(&rows).expect("fixture is well formed")
}

/// Missing positions of the N = 32 worked example.
pub const PAPER_MISSING: [usize; 9] = [2, 3, 8, 13, 19, 22, 23, 28, 30];

pub fn paper_pattern() -> MissingSamplePattern {
    MissingSamplePattern::new(32, PAPER_MISSING.to_vec()).expect("fixture is well formed")
}
