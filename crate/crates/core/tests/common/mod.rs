//! Test-only oracles that avoid the library's SVD and eigensolver paths.

#![allow(dead_code)]

use cscert::{Complex64, MeasurementMatrix};

/// Rank by Gaussian elimination with partial pivoting. A pivot counts when
/// its modulus exceeds `tol` times the largest entry of the input.
pub fn elimination_rank(cols: &[Vec<Complex64>], tol: f64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = cols[0].len();
    let n = cols.len();
    let mut a: Vec<Vec<Complex64>> = (0..m).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    let scale = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let (piv, best) = (rank..m)
            .map(|i| (i, a[i][col].norm()))
            .fold((rank, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if best <= tol * scale {
            continue;
        }
        a.swap(rank, piv);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut().take(m - rank - 1) {
            let f = row[col] / pivot_row[col];
            for (x, &p) in row[col..n].iter_mut().zip(&pivot_row[col..n]) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

pub fn columns(a: &MeasurementMatrix, idx: &[usize]) -> Vec<Vec<Complex64>> {
    idx.iter()
        .map(|&j| (0..a.rows()).map(|i| a.entry(i, j)).collect())
        .collect()
}

/// All k-subsets of 0..n by recursion, independent of the library enumerator.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Smallest number of dependent columns, by brute force over subsets.
pub fn brute_spark(a: &MeasurementMatrix, tol: f64) -> Option<usize> {
    (1..=a.cols().min(a.rows() + 1)).find(|&k| {
        subsets(a.cols(), k)
            .iter()
            .any(|s| elimination_rank(&columns(a, s), tol) < k)
    })
}

pub fn normalized_gaussian(m: usize, n: usize, seed: u64) -> MeasurementMatrix {
    MeasurementMatrix::build_gaussian(m, n, seed)
        .unwrap()
        .normalize_columns()
        .unwrap()
}
