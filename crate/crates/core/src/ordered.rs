//! Ordered sequence spaces: nonincreasing square-summable sequences and
//! size/surplus pair vectors with their metrics.
//!
//! Finite vectors stand for infinite sequences padded with zeros.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Sequence of `(x_i, y_i)` pairs, `x_i` a nonnegative real and `y_i` a
/// nonnegative count, kept in the canonical order produced by [`ord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedPairVector<T> {
    pairs: Vec<(T, u64)>,
}

impl<T: Scalar> OrderedPairVector<T> {
    pub fn pairs(&self) -> &[(T, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Drops trailing `(0, 0)` entries so that equal elements have equal
    /// representations.
    pub fn trimmed(mut self) -> Self {
        while matches!(self.pairs.last(), Some(&(x, 0)) if x == T::zero()) {
            self.pairs.pop();
        }
        self
    }

    /// Checks the ordering invariants: `x` nonincreasing, `y_i = 0` whenever
    /// `x_i = 0`, and `y` nonincreasing within runs of equal `x`.
    pub fn is_canonical(&self) -> bool {
        let zero_ok = self.pairs.iter().all(|&(x, y)| x >= T::zero() && (x > T::zero() || y == 0));
        zero_ok
            && self.pairs.windows(2).all(|w| {
                let ((x1, y1), (x2, y2)) = (w[0], w[1]);
                x1 > x2 || (x1 == x2 && y1 >= y2)
            })
    }

    pub fn xs(&self) -> Vec<T> {
        self.pairs.iter().map(|p| p.0).collect()
    }
}

/// Orders an arbitrary pair sequence: `x` descending, ties by `y`
/// descending.
pub fn ord<T: Scalar>(z: impl IntoIterator<Item = (T, u64)>) -> OrderedPairVector<T> {
    let mut pairs: Vec<(T, u64)> = z.into_iter().collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(b.1.cmp(&a.1)));
    OrderedPairVector { pairs }
}

/// `sqrt(sum (x_i - y_i)^2)` with the shorter sequence padded by zeros.
pub fn l2_distance<T: Scalar>(x: &[T], y: &[T]) -> T {
    let len = x.len().max(y.len());
    let get = |s: &[T], i: usize| s.get(i).copied().unwrap_or_else(T::zero);
    (0..len).map(|i| (get(x, i) - get(y, i)).powi(2)).sum::<T>().sqrt()
}

/// Metric on size/surplus vectors: the l2 distance of the sizes plus the l1
/// distance of the products `x_i y_i`.
pub fn u0_distance<T: Scalar>(a: &OrderedPairVector<T>, b: &OrderedPairVector<T>) -> T {
    let l2 = l2_distance(&a.xs(), &b.xs());
    let len = a.len().max(b.len());
    let prod = |v: &OrderedPairVector<T>, i: usize| {
        v.pairs.get(i).map_or(T::zero(), |&(x, y)| x * T::from_u64(y).expect("count conversion"))
    };
    let l1: T = (0..len).map(|i| (prod(a, i) - prod(b, i)).abs()).sum();
    l2 + l1
}
