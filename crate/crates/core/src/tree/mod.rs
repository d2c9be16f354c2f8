//! The layout-independent Fenwick tree contract, the implicit parent/child
//! arithmetic of its three traversal trees, and a naive reference
//! implementation used as the oracle for every storage layout.
//!
//! A Fenwick tree represents a list of `n` bounded naturals `v[1..=n]`
//! through partial sums: node `j` stores the sum of the values with index in
//! `(j - 2^rho(j), j]`. Three parent relations over the same node set drive
//! the operations: the search tree (predecessor search), the interrogation
//! tree (prefix sums, parent `j & (j-1)`) and the update tree (point
//! updates, parent `j + (j & -j)`).

use crate::bits::{lambda, rho};
use crate::error::{Error, Result};

pub mod classical;
pub mod level;

mod backend;
pub use backend::{AnyFenwick, BackendKind, ALL_BACKENDS};
pub(crate) use backend::with_backend_type;

/// Result of a predecessor search: the longest prefix whose (possibly
/// complemented) sum does not exceed the searched value, and the leftover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FindResult {
    /// Prefix length `p`.
    pub pos: usize,
    /// Searched value minus the (complemented) sum of the returned prefix.
    pub excess: u64,
}

/// A list of `n` naturals in `[0, bound]`, indexed from 1, exposed through
/// prefix sums, predecessor searches and point updates.
///
/// All implementations are observationally equivalent; they differ only in
/// memory layout and compression. Out-of-range indices panic.
pub trait FenwickTree {
    /// Number of elements currently stored.
    fn len(&self) -> usize;

    /// Upper bound `B` on every element value.
    fn bound(&self) -> u64;

    /// Sum of the first `p` elements (`0 <= p <= len`).
    fn prefix(&self, p: usize) -> u64;

    /// Longest prefix with sum at most `x`, plus the excess `x - prefix(p)`.
    ///
    /// When `x >= prefix(len)` the result is `(len, x - prefix(len))`.
    fn find(&self, x: u64) -> FindResult;

    /// Longest prefix `p` with `p * bound - prefix(p) <= x`, plus the excess.
    ///
    /// The complemented sum is non-decreasing in `p` because every element
    /// is at most `bound`.
    fn find_complement(&self, x: u64) -> FindResult;

    /// Add `delta` to element `j` (`1 <= j <= len`).
    ///
    /// The new value must stay within `[0, bound]`; compressed layouts check
    /// this only in debug builds.
    fn add(&mut self, j: usize, delta: i64);

    /// Value of element `j` (`1 <= j <= len`).
    fn get(&self, j: usize) -> u64;

    /// Append a new element with value `v <= bound`.
    fn push(&mut self, v: u64);

    /// Remove the last element. Panics on an empty tree.
    fn pop(&mut self);

    /// Exact size of the backing storage in bits, including any alignment
    /// holes and per-level rounding.
    fn storage_bits(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of all elements.
    fn total(&self) -> u64 {
        self.prefix(self.len())
    }
}

/// Construction entry points shared by every layout.
pub trait FenwickInit: FenwickTree + Sized {
    /// An empty tree accepting values in `[0, bound]`.
    fn with_bound(bound: u64) -> Result<Self>;

    /// Bulk-build from `values`, all of which must be within the bound.
    fn from_values(values: &[u64], bound: u64) -> Result<Self> {
        let mut tree = Self::with_bound(bound)?;
        for &v in values {
            tree.push(v);
        }
        Ok(tree)
    }
}

/// Parent of `j` in the interrogation tree: `j` with its lowest set bit
/// cleared. The root is the implicit node 0.
#[inline(always)]
pub fn interrogation_parent(j: usize) -> usize {
    j & (j - 1)
}

/// Parent of `j` in the update tree: `j` plus its lowest set bit.
#[inline(always)]
pub fn update_parent(j: usize) -> usize {
    j + (j & j.wrapping_neg())
}

/// Bottom-up interrogation path from node `j`, excluding the root 0.
pub fn interrogation_path(j: usize) -> Vec<usize> {
    assert!(j >= 1, "node indices start at 1");
    let mut path = Vec::with_capacity(16);
    let mut j = j;
    while j != 0 {
        path.push(j);
        j = interrogation_parent(j);
    }
    path
}

/// Bottom-up update path from node `j`, stopping before the first index
/// beyond `n`.
pub fn update_path(j: usize, n: usize) -> Vec<usize> {
    assert!(1 <= j && j <= n, "node {j} out of range 1..={n}");
    let mut path = Vec::with_capacity(16);
    let mut j = j;
    while j <= n {
        path.push(j);
        j = update_parent(j);
    }
    path
}

/// Top-down interrogation path towards leaf `p`: starting from the implicit
/// root 0, repeatedly set the highest bit in which the current node differs
/// from `p`. Exactly the reverse of [`interrogation_path`].
pub fn interrogation_path_topdown(p: usize) -> Vec<usize> {
    assert!(p >= 1, "node indices start at 1");
    let mut path = Vec::with_capacity(16);
    let mut j = 0usize;
    while j != p {
        j |= 1 << lambda((j ^ p) as u64);
        path.push(j);
    }
    path
}

/// Top-down update path towards leaf `p` in a tree of `n` nodes: the scan
/// runs entirely on negated indices, mirroring the interrogation descent
/// through the duality `interrogation_parent(-j) = -update_parent(j)`.
/// Exactly the reverse of [`update_path`].
pub fn update_path_topdown(p: usize, n: usize) -> Vec<usize> {
    assert!(1 <= p && p <= n, "node {p} out of range 1..={n}");
    // The start node keeps the bits of n above the highest bit in which n
    // differs from p with its lowest bit cleared; that argument is nonzero
    // because p & (p - 1) < p <= n.
    let diff = (n ^ (p & (p - 1))) as u64;
    let mut j = (n as u64) & (u64::MAX << lambda(diff));
    let mut path = Vec::with_capacity(16);
    path.push(j as usize);
    let neg_p = (p as u64).wrapping_neg();
    while j != p as u64 {
        let neg_j = j.wrapping_neg();
        j = (neg_j ^ (1u64 << lambda(neg_j ^ neg_p))).wrapping_neg();
        path.push(j as usize);
    }
    path
}

/// Shared argument checks for trait implementations.
#[inline]
pub(crate) fn check_prefix_range(p: usize, n: usize) {
    assert!(p <= n, "prefix length {p} out of range 0..={n}");
}

#[inline]
pub(crate) fn check_node_range(j: usize, n: usize) {
    assert!(1 <= j && j <= n, "node {j} out of range 1..={n}");
}

pub(crate) fn check_bound(bound: u64) -> Result<()> {
    if bound == 0 {
        return Err(Error::ZeroBound);
    }
    Ok(())
}

/// Reference implementation: stores the plain value list and answers every
/// query by scanning. It is the single source of truth the layout
/// implementations are tested against, and it enforces the value bound
/// unconditionally.
#[derive(Clone, Debug)]
pub struct NaiveFenwick {
    values: Vec<u64>,
    bound: u64,
}

impl NaiveFenwick {
    /// The stored values, 0-indexed.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

impl FenwickInit for NaiveFenwick {
    fn with_bound(bound: u64) -> Result<Self> {
        check_bound(bound)?;
        Ok(Self { values: Vec::new(), bound })
    }
}

impl FenwickTree for NaiveFenwick {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn prefix(&self, p: usize) -> u64 {
        check_prefix_range(p, self.values.len());
        self.values[..p].iter().sum()
    }

    fn find(&self, x: u64) -> FindResult {
        let mut rest = x;
        for (i, &v) in self.values.iter().enumerate() {
            if rest < v {
                return FindResult { pos: i, excess: rest };
            }
            rest -= v;
        }
        FindResult { pos: self.values.len(), excess: rest }
    }

    fn find_complement(&self, x: u64) -> FindResult {
        let mut rest = x;
        for (i, &v) in self.values.iter().enumerate() {
            let complement = self.bound - v;
            if rest < complement {
                return FindResult { pos: i, excess: rest };
            }
            rest -= complement;
        }
        FindResult { pos: self.values.len(), excess: rest }
    }

    fn add(&mut self, j: usize, delta: i64) {
        check_node_range(j, self.values.len());
        let v = &mut self.values[j - 1];
        let updated = v
            .checked_add_signed(delta)
            .filter(|&u| u <= self.bound)
            .unwrap_or_else(|| panic!("add({j}, {delta}) leaves value out of [0, {}]", self.bound));
        *v = updated;
    }

    fn get(&self, j: usize) -> u64 {
        check_node_range(j, self.values.len());
        self.values[j - 1]
    }

    fn push(&mut self, v: u64) {
        assert!(v <= self.bound, "push value {v} exceeds bound {}", self.bound);
        self.values.push(v);
    }

    fn pop(&mut self) {
        assert!(!self.values.is_empty(), "pop on an empty tree");
        self.values.pop();
    }

    fn storage_bits(&self) -> u64 {
        64 * self.values.len() as u64
    }
}

/// Descent shared by every layout's `find`: `read` returns the partial sum
/// of a stored node.
#[inline]
pub(crate) fn find_by_descent(n: usize, x: u64, read: impl Fn(usize) -> u64) -> FindResult {
    if n == 0 {
        return FindResult { pos: 0, excess: x };
    }
    let mut p = 0usize;
    let mut q = 1usize << lambda(n as u64);
    let mut rest = x;
    while q != 0 {
        if p + q <= n {
            let m = read(p + q);
            if rest >= m {
                p += q;
                rest -= m;
            }
        }
        q >>= 1;
    }
    FindResult { pos: p, excess: rest }
}

/// Complemented descent: compares against `bound * 2^rho(p + q) - f[p + q]`,
/// where inside the loop `rho(p + q)` is the level of `q` because `p` is
/// always a multiple of `2q`. Sums are widened to 128 bits so large bounds
/// cannot overflow.
#[inline]
pub(crate) fn find_complement_by_descent(
    n: usize,
    bound: u64,
    x: u64,
    read: impl Fn(usize) -> u64,
) -> FindResult {
    if n == 0 {
        return FindResult { pos: 0, excess: x };
    }
    let mut p = 0usize;
    let mut q = 1usize << lambda(n as u64);
    let mut rest = x as u128;
    while q != 0 {
        if p + q <= n {
            let m = (bound as u128) * (q as u128) - read(p + q) as u128;
            if rest >= m {
                p += q;
                rest -= m;
            }
        }
        q >>= 1;
    }
    FindResult { pos: p, excess: rest as u64 }
}

/// Value of the partial sum a freshly appended node `n` must store:
/// the new value plus the sums of the nodes it absorbs as left subtree.
#[inline]
pub(crate) fn pushed_node_sum(n: usize, v: u64, read: impl Fn(usize) -> u64) -> u64 {
    let mut sum = v;
    let stop = n & (n - 1);
    let mut m = n - 1;
    while m > stop {
        sum += read(m);
        m &= m - 1;
    }
    sum
}

/// `v[j]` recovered from partial sums alone: `f[j]` minus the sums on the
/// interrogation path from `j - 1` down to `j`'s interrogation parent.
#[inline]
pub(crate) fn get_by_telescoping(j: usize, read: impl Fn(usize) -> u64) -> u64 {
    let mut value = read(j);
    let stop = j & (j - 1);
    let mut m = j - 1;
    while m > stop {
        value -= read(m);
        m &= m - 1;
    }
    value
}

/// Maximum partial sum storable at node `j` given the element bound.
#[inline]
pub(crate) fn node_capacity(bound: u64, j: usize) -> u128 {
    (bound as u128) << rho(j as u64)
}

/// Partial-sum storage behind a concrete layout. The whole Fenwick contract
/// is derived from these eight methods by a blanket implementation, so every
/// layout shares one tested copy of the traversal logic.
pub(crate) trait NodeStore {
    fn node_count(&self) -> usize;
    fn element_bound(&self) -> u64;
    /// Partial sum stored at node `j` (`1 <= j <= node_count`).
    fn read_node(&self, j: usize) -> u64;
    /// Overwrite the partial sum at node `j`.
    fn write_node(&mut self, j: usize, value: u64);
    /// Append node `j == node_count + 1` holding `value`, growing storage.
    fn append_node(&mut self, j: usize, value: u64);
    /// Drop the last node, shrinking storage.
    fn remove_last_node(&mut self);
    fn backing_bits(&self) -> u64;
}

/// Derives the full [`FenwickTree`] impl from a type's [`NodeStore`] impl,
/// so all layouts share one copy of the traversal logic.
macro_rules! impl_fenwick_for_node_store {
    ($ty:ty) => {
        impl $crate::tree::FenwickTree for $ty {
            fn len(&self) -> usize {
                $crate::tree::NodeStore::node_count(self)
            }

            fn bound(&self) -> u64 {
                self.element_bound()
            }

            fn prefix(&self, p: usize) -> u64 {
                $crate::tree::check_prefix_range(p, self.node_count());
                let mut sum = 0u64;
                let mut j = p;
                while j != 0 {
                    sum += self.read_node(j);
                    j &= j - 1;
                }
                sum
            }

            fn find(&self, x: u64) -> $crate::tree::FindResult {
                $crate::tree::find_by_descent(self.node_count(), x, |m| self.read_node(m))
            }

            fn find_complement(&self, x: u64) -> $crate::tree::FindResult {
                $crate::tree::find_complement_by_descent(
                    self.node_count(),
                    self.element_bound(),
                    x,
                    |m| self.read_node(m),
                )
            }

            fn add(&mut self, j: usize, delta: i64) {
                let n = self.node_count();
                $crate::tree::check_node_range(j, n);
                #[cfg(debug_assertions)]
                {
                    let old = $crate::tree::get_by_telescoping(j, |m| self.read_node(m)) as i128;
                    let new = old + delta as i128;
                    debug_assert!(
                        new >= 0 && new <= self.element_bound() as i128,
                        "add({j}, {delta}) leaves value {new} out of [0, {}]",
                        self.element_bound()
                    );
                }
                let mut j = j;
                while j <= n {
                    let updated = self.read_node(j).wrapping_add_signed(delta);
                    self.write_node(j, updated);
                    j += j & j.wrapping_neg();
                }
            }

            fn get(&self, j: usize) -> u64 {
                $crate::tree::check_node_range(j, self.node_count());
                $crate::tree::get_by_telescoping(j, |m| self.read_node(m))
            }

            fn push(&mut self, v: u64) {
                assert!(
                    v <= self.element_bound(),
                    "push value {v} exceeds bound {}",
                    self.element_bound()
                );
                let j = self.node_count() + 1;
                let sum = $crate::tree::pushed_node_sum(j, v, |m| self.read_node(m));
                self.append_node(j, sum);
            }

            fn pop(&mut self) {
                assert!(self.node_count() > 0, "pop on an empty tree");
                self.remove_last_node();
            }

            fn storage_bits(&self) -> u64 {
                self.backing_bits()
            }
        }
    };
}

pub(crate) use impl_fenwick_for_node_store;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interrogation_path_examples() {
        assert_eq!(interrogation_path(3), vec![3, 2]);
        assert_eq!(interrogation_path(11), vec![11, 10, 8]);
        assert_eq!(interrogation_path(8), vec![8]);
    }

    #[test]
    fn update_path_examples() {
        assert_eq!(update_path(3, 11), vec![3, 4, 8]);
        assert_eq!(update_path(9, 11), vec![9, 10]);
        assert_eq!(update_path(11, 11), vec![11]);
    }

    #[test]
    fn topdown_interrogation_examples() {
        assert_eq!(interrogation_path_topdown(11), vec![8, 10, 11]);
        assert_eq!(interrogation_path_topdown(1), vec![1]);
        assert_eq!(interrogation_path_topdown(8), vec![8]);
    }

    #[test]
    fn topdown_update_examples() {
        assert_eq!(update_path_topdown(3, 11), vec![8, 4, 3]);
        assert_eq!(update_path_topdown(11, 11), vec![11]);
        assert_eq!(update_path_topdown(7, 7), vec![7]);
    }

    #[test]
    fn topdown_paths_reverse_bottom_up_small() {
        for n in 1usize..=512 {
            for p in 1..=n {
                let mut up = interrogation_path(p);
                up.reverse();
                assert_eq!(interrogation_path_topdown(p), up, "interrogation p={p}");
                let mut up = update_path(p, n);
                up.reverse();
                assert_eq!(update_path_topdown(p, n), up, "update p={p} n={n}");
            }
        }
    }

    /// interrogation_parent(-j) = -update_parent(j) in two's complement.
    #[test]
    fn parent_duality_exhaustive() {
        for j in 1u64..=1 << 20 {
            let neg = j.wrapping_neg();
            assert_eq!(
                neg & neg.wrapping_sub(1),
                (j + (j & j.wrapping_neg())).wrapping_neg()
            );
        }
    }

    #[test]
    fn oracle_find_examples() {
        let t = NaiveFenwick::from_values(&[1, 0, 2, 0, 3], 3).unwrap();
        assert_eq!(t.find(3), FindResult { pos: 4, excess: 0 });
        assert_eq!(t.find(100), FindResult { pos: 5, excess: 94 });
        let ones = NaiveFenwick::from_values(&[1, 1, 1], 1).unwrap();
        assert_eq!(ones.find(0), FindResult { pos: 0, excess: 0 });
    }

    #[test]
    fn oracle_find_complement_examples() {
        let t = NaiveFenwick::from_values(&[1, 0, 2], 2).unwrap();
        // complemented sums: 0, 1, 3, 3
        assert_eq!(t.find_complement(2), FindResult { pos: 1, excess: 1 });
        assert_eq!(t.find_complement(0), FindResult { pos: 0, excess: 0 });
        assert_eq!(t.find_complement(3), FindResult { pos: 3, excess: 0 });
    }

    #[test]
    fn oracle_prefix_and_add() {
        let mut t = NaiveFenwick::from_values(&[1, 2, 3, 4, 5], 1024).unwrap();
        assert_eq!(t.prefix(5), 15);
        assert_eq!(t.prefix(0), 0);
        t.add(2, 7);
        assert_eq!(t.prefix(5), 22);
    }

    #[test]
    #[should_panic(expected = "out of")]
    fn oracle_add_checks_bound() {
        let mut t = NaiveFenwick::from_values(&[1], 1).unwrap();
        t.add(1, 1);
    }

    #[test]
    #[should_panic(expected = "pop on an empty tree")]
    fn oracle_pop_underflow() {
        let mut t = NaiveFenwick::with_bound(1).unwrap();
        t.pop();
    }
}
