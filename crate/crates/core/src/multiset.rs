//! Lexicographic enumeration of the distinct arrangements of a multiset.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::combinatorics::{binomial_exact, ProblemSize};

/// Rearranges `seq` into the next permutation in lexicographic order and
/// returns `true`; on the last permutation it restores ascending order and
/// returns `false`. Repeated values are handled, so starting from the sorted
/// sequence every distinct arrangement is visited exactly once.
pub fn next_permutation<T: Ord>(seq: &mut [T]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        seq.reverse();
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// The sorted rank sequence `1^k 2^k ... n^k`.
pub fn sorted_ranks(size: ProblemSize) -> Vec<u32> {
    (1..=size.n() as u32)
        .flat_map(|r| core::iter::repeat_n(r, size.k() as usize))
        .collect()
}

/// Number of distinct arrangements, `(kn)! / (k!)^n`.
pub fn arrangement_count(size: ProblemSize) -> BigUint {
    let k = size.k();
    (1..=size.n()).fold(BigUint::one(), |acc, r| acc * binomial_exact(r * k, k))
}

/// Iterator over the distinct arrangements of `{1^k, ..., n^k}` in
/// lexicographic order.
pub struct Arrangements {
    current: Vec<u32>,
    done: bool,
}

impl Arrangements {
    pub fn new(size: ProblemSize) -> Self {
        Arrangements {
            current: sorted_ranks(size),
            done: false,
        }
    }

    /// Streams each arrangement to `f` without allocating per item.
    pub fn for_each_ref(mut self, mut f: impl FnMut(&[u32])) {
        while !self.done {
            f(&self.current);
            self.done = !next_permutation(&mut self.current);
        }
    }
}

impl Iterator for Arrangements {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_permutation(&mut self.current);
        Some(out)
    }
}
