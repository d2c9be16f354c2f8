//! Level-order layouts: partial sums stored level by level (root first),
//! one independently grown storage unit per level.
//!
//! During a predecessor search the two candidate children of a node sit at
//! adjacent indices of the level below, so consecutive probes stay on the
//! same cache line and prefetchers guess right. Within a level all nodes
//! have the same width, which keeps addressing a single multiply.
//!
//! Traversals run on classical node indices and convert on the fly — node
//! `j` lives at level `rho(j)`, index `j >> (1 + rho(j))` — because the
//! per-iteration conversion is cheaper than reformulating the parent rules;
//! the direct level-space parent formulas are still provided as utilities.

use crate::bits::{lambda, rho};
use crate::bitstore::BitStore;
use crate::error::Result;
use crate::tree::{check_bound, impl_fenwick_for_node_store, FenwickInit, NodeStore};

use super::classical::value_width;

/// Position of a node in the level-order layout: `level` is the node's
/// height (leaves are level 0), `index` counts nodes within the level from
/// zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelPos {
    pub level: u32,
    pub index: usize,
}

impl LevelPos {
    pub fn new(level: u32, index: usize) -> Self {
        Self { level, index }
    }
}

/// Level-order position of classical node `j`.
#[inline]
pub fn to_level(j: usize) -> LevelPos {
    debug_assert!(j >= 1);
    let level = rho(j as u64);
    LevelPos { level, index: j >> (level + 1) }
}

/// Classical index of a level-order position.
#[inline]
pub fn from_level(pos: LevelPos) -> usize {
    (2 * pos.index + 1) << pos.level
}

/// Number of nodes a tree of `n` elements stores at `level`.
#[inline]
pub fn level_len(n: usize, level: u32) -> usize {
    ((n >> level) + 1) >> 1
}

/// Number of levels a tree of `n` elements uses.
#[inline]
pub fn level_count(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        lambda(n as u64) as usize + 1
    }
}

/// Parent in the interrogation tree, in level space.
///
/// Defined for `0 < index <= n >> (level + 1)`; the root region (index 0)
/// has the implicit root 0 as parent, signalled by `None`.
pub fn level_parent_interrogation(pos: LevelPos) -> Option<LevelPos> {
    if pos.index == 0 {
        return None;
    }
    let r = rho(pos.index as u64);
    Some(LevelPos {
        level: pos.level + 1 + r,
        index: pos.index >> (1 + r),
    })
}

/// Parent in the update tree, in level space. Always defined; whether the
/// parent exists in a given tree depends on its size.
pub fn level_parent_update(pos: LevelPos) -> LevelPos {
    let r = rho(!(pos.index as u64));
    LevelPos {
        level: pos.level + 1 + r,
        index: pos.index >> (1 + r),
    }
}

/// Children of a node in the sideways heap, in level space. The second
/// child may fall beyond the tree.
pub fn level_children(pos: LevelPos) -> Option<(LevelPos, LevelPos)> {
    if pos.level == 0 {
        return None;
    }
    Some((
        LevelPos { level: pos.level - 1, index: 2 * pos.index },
        LevelPos { level: pos.level - 1, index: 2 * pos.index + 1 },
    ))
}

/// Per-level storage: every node in a level has the same width.
trait LevelStorage: Default {
    fn read(&self, width: u32, k: usize) -> u64;
    fn write(&mut self, width: u32, k: usize, value: u64);
    /// Append node `k` (equal to the current node count of the level).
    fn append(&mut self, width: u32, k: usize, value: u64);
    fn remove_last(&mut self, width: u32);
    fn bits(&self) -> u64;
}

impl LevelStorage for Vec<u64> {
    #[inline]
    fn read(&self, _width: u32, k: usize) -> u64 {
        self[k]
    }

    #[inline]
    fn write(&mut self, _width: u32, k: usize, value: u64) {
        self[k] = value;
    }

    fn append(&mut self, _width: u32, k: usize, value: u64) {
        debug_assert_eq!(k, self.len());
        self.push(value);
    }

    fn remove_last(&mut self, _width: u32) {
        self.pop();
    }

    fn bits(&self) -> u64 {
        64 * self.len() as u64
    }
}

impl LevelStorage for Vec<u8> {
    #[inline]
    fn read(&self, width: u32, k: usize) -> u64 {
        let size = width as usize;
        let off = k * size;
        let mut buf = [0u8; 8];
        buf[..size].copy_from_slice(&self[off..off + size]);
        u64::from_le_bytes(buf)
    }

    #[inline]
    fn write(&mut self, width: u32, k: usize, value: u64) {
        let size = width as usize;
        debug_assert!(size == 8 || value >> (8 * size) == 0);
        let off = k * size;
        self[off..off + size].copy_from_slice(&value.to_le_bytes()[..size]);
    }

    fn append(&mut self, width: u32, k: usize, value: u64) {
        debug_assert_eq!(k * width as usize, self.len());
        self.resize((k + 1) * width as usize, 0);
        self.write(width, k, value);
    }

    fn remove_last(&mut self, width: u32) {
        self.truncate(self.len() - width as usize);
    }

    fn bits(&self) -> u64 {
        8 * self.len() as u64
    }
}

impl LevelStorage for BitStore {
    #[inline]
    fn read(&self, width: u32, k: usize) -> u64 {
        self.read_bits(k * width as usize, width)
    }

    #[inline]
    fn write(&mut self, width: u32, k: usize, value: u64) {
        self.write_bits(k * width as usize, width, value);
    }

    fn append(&mut self, width: u32, k: usize, value: u64) {
        self.grow((k + 1) * width as usize);
        self.write(width, k, value);
    }

    fn remove_last(&mut self, width: u32) {
        self.truncate(self.len_bits() - width as usize);
    }

    fn bits(&self) -> u64 {
        self.len_bits() as u64
    }
}

/// Width discipline of a level-order variant.
trait LevelWidth {
    /// Bits (for [`BitStore`]) or bytes (for `Vec<u8>`) or ignored (for
    /// `Vec<u64>`) per node at `level` given element width `s`.
    fn width(s: u32, level: u32) -> u32;
}

macro_rules! level_tree {
    ($(#[$doc:meta])* $name:ident, $storage:ty, $width:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub struct $name {
            levels: Vec<$storage>,
            n: usize,
            bound: u64,
            s: u32,
        }

        impl $name {
            #[inline]
            fn node_width(&self, level: u32) -> u32 {
                let width: fn(u32, u32) -> u32 = $width;
                width(self.s, level)
            }

            /// Nodes currently stored at each level.
            pub fn level_lens(&self) -> Vec<usize> {
                (0..self.levels.len() as u32)
                    .map(|l| level_len(self.n, l))
                    .collect()
            }
        }

        impl FenwickInit for $name {
            fn with_bound(bound: u64) -> Result<Self> {
                check_bound(bound)?;
                Ok(Self { levels: Vec::new(), n: 0, bound, s: value_width(bound) })
            }
        }

        impl NodeStore for $name {
            fn node_count(&self) -> usize {
                self.n
            }

            fn element_bound(&self) -> u64 {
                self.bound
            }

            #[inline]
            fn read_node(&self, j: usize) -> u64 {
                let level = rho(j as u64);
                self.levels[level as usize].read(self.node_width(level), j >> (level + 1))
            }

            #[inline]
            fn write_node(&mut self, j: usize, value: u64) {
                let level = rho(j as u64);
                let width = self.node_width(level);
                self.levels[level as usize].write(width, j >> (level + 1), value);
            }

            fn append_node(&mut self, j: usize, value: u64) {
                let level = rho(j as u64);
                if level as usize == self.levels.len() {
                    // j is a power of two: it opens a new top level.
                    self.levels.push(Default::default());
                }
                let width = self.node_width(level);
                assert!(
                    width <= 64,
                    "level {level} needs {width}-bit nodes at bound {}; the tree cannot grow further",
                    self.bound
                );
                self.levels[level as usize].append(width, j >> (level + 1), value);
                self.n = j;
            }

            fn remove_last_node(&mut self) {
                let j = self.n;
                let level = rho(j as u64);
                if j == 1 << level {
                    // sole node of the top level
                    self.levels.pop();
                } else {
                    let width = self.node_width(level);
                    self.levels[level as usize].remove_last(width);
                }
                self.n -= 1;
            }

            fn backing_bits(&self) -> u64 {
                self.levels.iter().map(|l| l.bits()).sum()
            }
        }

        impl_fenwick_for_node_store!($name);
    };
}

level_tree!(
    /// Level-order layout, one full word per node.
    LevelFixed,
    Vec<u64>,
    |_s, _level| 64
);

level_tree!(
    /// Level-order layout with per-level byte compression: nodes at `level`
    /// take `ceil((S + level) / 8)` bytes. No three-size scheme is needed
    /// because offsets within a level are a single multiplication.
    LevelByte,
    Vec<u8>,
    |s, level| ((s + level).div_ceil(8)).min(8)
);

level_tree!(
    /// Level-order layout with per-level bit compression: nodes at `level`
    /// take `S + level` bits.
    LevelBit,
    BitStore,
    |s, level| s + level
);

/// Bits (not bytes) a node of the given variant-family occupies at `level`;
/// used by the analytic space accounting.
pub(crate) fn level_node_bits(kind_bits: LevelBits, s: u32, level: u32) -> u64 {
    match kind_bits {
        LevelBits::Fixed => 64,
        LevelBits::Byte => 8 * u64::from((s + level).div_ceil(8).min(8)),
        LevelBits::Bit => u64::from(s + level),
    }
}

#[derive(Clone, Copy)]
pub(crate) enum LevelBits {
    Fixed,
    Byte,
    Bit,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{interrogation_parent, update_parent, FenwickTree};

    #[test]
    fn bijection_examples() {
        assert_eq!(to_level(12), LevelPos::new(2, 1));
        assert_eq!(from_level(LevelPos::new(2, 1)), 12);
        for k in 0..100 {
            assert_eq!(to_level(2 * k + 1), LevelPos::new(0, k));
            assert_eq!(from_level(LevelPos::new(0, k)), 2 * k + 1);
        }
    }

    #[test]
    fn bijection_roundtrips_exhaustive() {
        for j in 1usize..=1 << 20 {
            assert_eq!(from_level(to_level(j)), j);
        }
        for level in 0u32..20 {
            for index in 0..(1usize << (19 - level.min(19))) {
                let pos = LevelPos::new(level, index);
                assert_eq!(to_level(from_level(pos)), pos);
            }
        }
    }

    #[test]
    fn parent_formula_examples() {
        // classical node 11 = <0, 5>
        assert_eq!(
            level_parent_interrogation(LevelPos::new(0, 5)),
            Some(LevelPos::new(1, 2))
        );
        assert_eq!(level_parent_update(LevelPos::new(0, 5)), LevelPos::new(2, 1));
        assert_eq!(
            level_children(LevelPos::new(2, 1)),
            Some((LevelPos::new(1, 2), LevelPos::new(1, 3)))
        );
        assert_eq!(level_children(LevelPos::new(0, 3)), None);
    }

    #[test]
    fn parent_formulas_agree_with_classical_rules() {
        let n = 1usize << 14;
        for j in 1..=n {
            let pos = to_level(j);
            let up = interrogation_parent(j);
            if pos.index > 0 {
                assert_eq!(level_parent_interrogation(pos), Some(to_level(up)), "j={j}");
            } else {
                assert_eq!(up, 0);
                assert_eq!(level_parent_interrogation(pos), None);
            }
            if pos.index < n >> (pos.level + 1) {
                assert_eq!(level_parent_update(pos), to_level(update_parent(j)), "j={j}");
            }
            if let Some((left, right)) = level_children(pos) {
                let offset = 1usize << (pos.level - 1);
                assert_eq!(from_level(left), j - offset);
                assert_eq!(from_level(right), j + offset);
            }
        }
    }

    #[test]
    fn per_level_counts_sum_to_n() {
        for n in 0usize..=4096 {
            let total: usize = (0..level_count(n) as u32).map(|l| level_len(n, l)).sum();
            assert_eq!(total, n, "n={n}");
        }
    }

    #[test]
    fn push_opens_and_pop_closes_levels() {
        let mut t = LevelByte::with_bound(64).unwrap();
        for i in 0..32 {
            t.push(i % 5);
        }
        assert_eq!(t.level_lens(), vec![16, 8, 4, 2, 1, 1]);
        let before: Vec<u64> = (0..=31).map(|p| t.prefix(p)).collect();
        t.push(3);
        for (p, &expected) in before.iter().enumerate() {
            assert_eq!(t.prefix(p), expected);
        }
        t.pop();
        t.pop();
        assert_eq!(t.len(), 31);
        assert_eq!(t.level_lens(), vec![16, 8, 4, 2, 1]);
    }

    #[test]
    fn find_probes_adjacent_siblings() {
        // children of any node sit at 2k and 2k+1 in the level below
        for j in 1usize..=512 {
            if let Some((l, r)) = level_children(to_level(j)) {
                assert_eq!(l.index + 1, r.index);
            }
        }
    }
}
