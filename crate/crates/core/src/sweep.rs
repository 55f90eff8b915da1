//! Range-partitioned sweeps over the k-combinations of `0..n`.
//!
//! The rank interval `[0, count)` is cut into contiguous chunks. Each chunk
//! unranks its first combination and walks forward with the lexicographic
//! successor; chunk results are combined with an associative,
//! order-insensitive merge, so the outcome does not depend on how rayon
//! schedules the chunks or on the chunk size.

use rayon::prelude::*;

use crate::support::{advance, unrank};

pub const DEFAULT_CHUNK: u64 = 2048;

fn chunks(count: u64, chunk: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let chunk = chunk.max(1);
    let nchunks = count.div_ceil(chunk);
    // rayon indexes u64 ranges only through usize
    (0..nchunks as usize).into_par_iter().map(move |c| {
        let start = c as u64 * chunk;
        (start, (start + chunk).min(count))
    })
}

/// Folds `visit` over the first `count` combinations and merges chunk results.
pub(crate) fn fold<A, I, V, M>(
    n: usize,
    k: usize,
    count: u64,
    chunk: u64,
    init: I,
    visit: V,
    merge: M,
) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(A, &[usize]) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    chunks(count, chunk)
        .map(|(start, end)| {
            let mut acc = init();
            let mut c = unrank(start, n, k)
                .expect("chunk start lies inside the combination space")
                .into_vec();
            for rank in start..end {
                acc = visit(acc, &c);
                if rank + 1 < end {
                    advance(&mut c, n);
                }
            }
            acc
        })
        .reduce(&init, &merge)
}

/// Lexicographic rank of the first combination among the first `count`
/// satisfying `pred`.
pub(crate) fn find_first<P>(n: usize, k: usize, count: u64, chunk: u64, pred: P) -> Option<u64>
where
    P: Fn(&[usize]) -> bool + Sync + Send,
{
    chunks(count, chunk)
        .filter_map(|(start, end)| {
            let mut c = unrank(start, n, k)
                .expect("chunk start lies inside the combination space")
                .into_vec();
            for rank in start..end {
                if pred(&c) {
                    return Some(rank);
                }
                if rank + 1 < end {
                    advance(&mut c, n);
                }
            }
            None
        })
        .min()
}

/// True iff `pred` holds for every one of the first `count` combinations.
pub(crate) fn all<P>(n: usize, k: usize, count: u64, chunk: u64, pred: P) -> bool
where
    P: Fn(&[usize]) -> bool + Sync + Send,
{
    find_first(n, k, count, chunk, |c| !pred(c)).is_none()
}
