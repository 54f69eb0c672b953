//! Deterministic reductions.
//!
//! Sums are evaluated as a balanced binary tree whose split points depend
//! only on the slice length, so the result is bit-identical whatever the
//! number of worker threads.

use crate::Real;

const LEAF: usize = 64;
const PAR_LEAF: usize = 1 << 14;

/// Pairwise (tree) sum, split at `len / 2`.
pub fn tree_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    let (lo, hi) = xs.split_at(mid);
    if xs.len() >= PAR_LEAF {
        let (a, b) = rayon::join(|| tree_sum(lo), || tree_sum(hi));
        a + b
    } else {
        tree_sum(lo) + tree_sum(hi)
    }
}

/// Tree sum of `f(i)` for `i` in `0..n` without materialising the terms.
pub fn tree_sum_by<T: Real, F>(n: usize, f: &F) -> T
where
    F: Fn(usize) -> T + Sync,
{
    fn go<T: Real, F: Fn(usize) -> T + Sync>(lo: usize, hi: usize, f: &F) -> T {
        let len = hi - lo;
        if len <= LEAF {
            return (lo..hi).fold(T::zero(), |acc, i| acc + f(i));
        }
        let mid = lo + len / 2;
        if len >= PAR_LEAF {
            let (a, b) = rayon::join(|| go(lo, mid, f), || go(mid, hi, f));
            a + b
        } else {
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, f)
}
