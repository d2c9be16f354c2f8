//! Classical (Fenwick-order) layouts: fixed-width, byte-compressed and
//! bit-compressed storage of the partial sums, all with optional alignment
//! holes.
//!
//! Frequently accessed nodes (those with many trailing zeros in their index)
//! naturally land at addresses sharing the same residue modulo small powers
//! of two, which makes multi-way caches map them all to one way. All three
//! variants therefore insert a word-sized hole every `2^hole_log` nodes
//! (default `2^14`), spreading hot nodes across cache ways at a space cost
//! below one per thousand. Holes are exactly one word wide so the aligned
//! single-word read guarantee of the bit-compressed layout is preserved.
//!
//! Deployment note: for trees well beyond cache size, enabling transparent
//! huge pages substantially reduces TLB pressure and is worth configuring on
//! hosts running large instances.

use crate::bits::{nu, rho};
use crate::bitstore::BitStore;
use crate::error::{Error, Result};
use crate::tree::{check_bound, impl_fenwick_for_node_store, FenwickInit, NodeStore};

/// Hole interval exponent used by default: one word-sized hole every 2^14
/// nodes.
pub const DEFAULT_HOLE_LOG: u32 = 14;

/// Hole interval exponent that disables holes entirely.
pub const NO_HOLES: u32 = u32::MAX;

/// Width in bits of element values under bound `B`: `ceil(log2(B + 1))`.
#[inline]
pub fn value_width(bound: u64) -> u32 {
    64 - bound.leading_zeros()
}

#[inline]
fn holes_before(j: usize, hole_log: u32) -> usize {
    if hole_log >= 64 {
        0
    } else {
        j >> hole_log
    }
}

/// Width in bits of node `j`'s partial sum in the bit-compressed layout.
#[inline]
pub fn bit_node_width(s: u32, j: usize) -> u32 {
    s + rho(j as u64)
}

/// First bit of node `j`'s field in the bit-compressed layout.
///
/// The packing leaves bit 0 unused (every field is shifted one bit right),
/// which is what makes fields ending on a word multiple single-word
/// readable.
#[inline]
pub fn bit_node_offset(s: u32, j: usize, hole_log: u32) -> usize {
    j * (s as usize + 1) - nu(j as u64) as usize - bit_node_width(s, j) as usize
        + 1
        + 64 * holes_before(j, hole_log)
}

/// Total bits used by the first `n` nodes of the bit-compressed layout,
/// including the leading shift bit and any holes.
#[inline]
pub fn bit_storage_end(s: u32, n: usize, hole_log: u32) -> usize {
    if n == 0 {
        0
    } else {
        n * (s as usize + 1) - nu(n as u64) as usize + 1 + 64 * holes_before(n, hole_log)
    }
}

/// Sizes used by the byte-compressed layout: a node takes the base size
/// `b = ceil(S/8)` bytes, one extra byte, or a full word, depending on how
/// far its index's ruler value exceeds the `d = 8b - S` spare bits.
#[derive(Clone, Copy, Debug)]
pub struct ByteLayout {
    /// Base node size in bytes.
    pub base: u32,
    /// Spare bits in the base size: nodes with `rho(j) <= d` fit in it.
    pub spare: u32,
}

impl ByteLayout {
    pub fn for_width(s: u32) -> Self {
        let base = s.div_ceil(8).max(1);
        Self { base, spare: 8 * base - s }
    }

    /// Size in bytes of node `j`.
    #[inline]
    pub fn node_size(&self, j: usize) -> u32 {
        if self.base >= 8 {
            return 8;
        }
        let r = rho(j as u64);
        if r <= self.spare {
            self.base
        } else if r <= self.spare + 8 {
            self.base + 1
        } else {
            8
        }
    }

    /// First byte of node `j`'s field: the total size of the preceding
    /// `j - 1` nodes plus any hole bytes.
    #[inline]
    pub fn node_offset(&self, j: usize, hole_log: u32) -> usize {
        let m = j - 1;
        self.prefix_size(m) + 8 * holes_before(m, hole_log)
    }

    /// Total bytes taken by the first `m` nodes, holes excluded.
    #[inline]
    fn prefix_size(&self, m: usize) -> usize {
        if self.base >= 8 {
            return 8 * m;
        }
        m * self.base as usize
            + (m >> (self.spare + 1))
            + (m >> (self.spare + 9)) * (8 - self.base as usize - 1)
    }

    /// Total bytes used by the first `n` nodes including holes.
    #[inline]
    pub fn storage_end(&self, n: usize, hole_log: u32) -> usize {
        self.prefix_size(n) + 8 * holes_before(n.saturating_sub(1), hole_log)
    }
}

/// Classical layout, one full word per node. Word 0 is reserved so node `j`
/// maps to word `j + (j >> hole_log)` without adjustment.
#[derive(Clone, Debug)]
pub struct ClassicalFixed {
    words: Vec<u64>,
    n: usize,
    bound: u64,
    hole_log: u32,
}

impl ClassicalFixed {
    pub fn with_bound_and_holes(bound: u64, hole_log: u32) -> Result<Self> {
        check_bound(bound)?;
        Ok(Self { words: vec![0], n: 0, bound, hole_log })
    }

    #[inline]
    fn word_index(&self, j: usize) -> usize {
        j + holes_before(j, self.hole_log)
    }
}

impl FenwickInit for ClassicalFixed {
    fn with_bound(bound: u64) -> Result<Self> {
        Self::with_bound_and_holes(bound, DEFAULT_HOLE_LOG)
    }
}

impl NodeStore for ClassicalFixed {
    fn node_count(&self) -> usize {
        self.n
    }

    fn element_bound(&self) -> u64 {
        self.bound
    }

    #[inline]
    fn read_node(&self, j: usize) -> u64 {
        self.words[self.word_index(j)]
    }

    #[inline]
    fn write_node(&mut self, j: usize, value: u64) {
        let w = self.word_index(j);
        self.words[w] = value;
    }

    fn append_node(&mut self, j: usize, value: u64) {
        let w = self.word_index(j);
        self.words.resize(w + 1, 0);
        self.words[w] = value;
        self.n = j;
    }

    fn remove_last_node(&mut self) {
        self.n -= 1;
        self.words.truncate(self.word_index(self.n) + 1);
    }

    fn backing_bits(&self) -> u64 {
        64 * self.words.len() as u64
    }
}

impl_fenwick_for_node_store!(ClassicalFixed);

/// Classical layout with three-size byte compression: most nodes take the
/// minimum whole-byte size for the element width, nodes covering longer
/// ranges take one extra byte, and the rare remainder is stored
/// uncompressed.
#[derive(Clone, Debug)]
pub struct ClassicalByte {
    bytes: Vec<u8>,
    n: usize,
    bound: u64,
    layout: ByteLayout,
    hole_log: u32,
}

impl ClassicalByte {
    pub fn with_bound_and_holes(bound: u64, hole_log: u32) -> Result<Self> {
        check_bound(bound)?;
        Ok(Self {
            bytes: Vec::new(),
            n: 0,
            bound,
            layout: ByteLayout::for_width(value_width(bound)),
            hole_log,
        })
    }

    pub fn layout(&self) -> ByteLayout {
        self.layout
    }
}

impl FenwickInit for ClassicalByte {
    fn with_bound(bound: u64) -> Result<Self> {
        Self::with_bound_and_holes(bound, DEFAULT_HOLE_LOG)
    }
}

impl NodeStore for ClassicalByte {
    fn node_count(&self) -> usize {
        self.n
    }

    fn element_bound(&self) -> u64 {
        self.bound
    }

    #[inline]
    fn read_node(&self, j: usize) -> u64 {
        let off = self.layout.node_offset(j, self.hole_log);
        let size = self.layout.node_size(j) as usize;
        let mut buf = [0u8; 8];
        buf[..size].copy_from_slice(&self.bytes[off..off + size]);
        u64::from_le_bytes(buf)
    }

    #[inline]
    fn write_node(&mut self, j: usize, value: u64) {
        let off = self.layout.node_offset(j, self.hole_log);
        let size = self.layout.node_size(j) as usize;
        debug_assert!(
            size == 8 || value >> (8 * size) == 0,
            "node {j}: value {value} wider than {size} bytes"
        );
        self.bytes[off..off + size].copy_from_slice(&value.to_le_bytes()[..size]);
    }

    fn append_node(&mut self, j: usize, value: u64) {
        let end = self.layout.node_offset(j, self.hole_log) + self.layout.node_size(j) as usize;
        self.bytes.resize(end, 0);
        self.n = j;
        self.write_node(j, value);
    }

    fn remove_last_node(&mut self) {
        let end = self.layout.node_offset(self.n, self.hole_log);
        self.bytes.truncate(end);
        self.n -= 1;
    }

    fn backing_bits(&self) -> u64 {
        8 * self.bytes.len() as u64
    }
}

impl_fenwick_for_node_store!(ClassicalByte);

/// Classical layout with bit compression: node `j` takes exactly
/// `S + rho(j)` bits, packed contiguously with a one-bit leading shift.
///
/// The shift makes every field whose index satisfies `j(S+1) = 0 (mod 64)`
/// land inside a single word-aligned word, so the hottest nodes are read
/// with one aligned access; all other fields are read with a general
/// two-word access. Guaranteeing that even the unaligned reads stay within
/// one byte-anchored word would require `S <= 55`, hence the constructor
/// bound check.
#[derive(Clone, Debug)]
pub struct ClassicalBit {
    store: BitStore,
    n: usize,
    bound: u64,
    s: u32,
    hole_log: u32,
}

impl ClassicalBit {
    pub fn with_bound_and_holes(bound: u64, hole_log: u32) -> Result<Self> {
        check_bound(bound)?;
        if bound >= (1u64 << 55) - 1 {
            return Err(Error::BoundTooWide(bound));
        }
        Ok(Self {
            store: BitStore::new(),
            n: 0,
            bound,
            s: value_width(bound),
            hole_log,
        })
    }

    /// Element width `S` in bits.
    pub fn width(&self) -> u32 {
        self.s
    }

    #[inline]
    fn field(&self, j: usize) -> (usize, u32) {
        (
            bit_node_offset(self.s, j, self.hole_log),
            bit_node_width(self.s, j),
        )
    }
}

impl FenwickInit for ClassicalBit {
    fn with_bound(bound: u64) -> Result<Self> {
        Self::with_bound_and_holes(bound, DEFAULT_HOLE_LOG)
    }
}

impl NodeStore for ClassicalBit {
    fn node_count(&self) -> usize {
        self.n
    }

    fn element_bound(&self) -> u64 {
        self.bound
    }

    #[inline]
    fn read_node(&self, j: usize) -> u64 {
        let (off, width) = self.field(j);
        if (j * (self.s as usize + 1)) % 64 == 0 {
            self.store.read_bits_aligned(off, width)
        } else {
            self.store.read_bits(off, width)
        }
    }

    #[inline]
    fn write_node(&mut self, j: usize, value: u64) {
        let (off, width) = self.field(j);
        self.store.write_bits(off, width, value);
    }

    fn append_node(&mut self, j: usize, value: u64) {
        let width = bit_node_width(self.s, j);
        assert!(
            width <= 64,
            "node {j} needs {width} bits at bound {}; the tree cannot grow further",
            self.bound
        );
        self.store.grow(bit_storage_end(self.s, j, self.hole_log));
        self.n = j;
        self.write_node(j, value);
    }

    fn remove_last_node(&mut self) {
        self.n -= 1;
        self.store
            .truncate(bit_storage_end(self.s, self.n, self.hole_log));
    }

    fn backing_bits(&self) -> u64 {
        self.store.len_bits() as u64
    }
}

impl_fenwick_for_node_store!(ClassicalBit);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::FenwickTree;

    #[test]
    fn bit_offsets_match_direct_summation() {
        let s = 7;
        // node 6: preceding widths sum to 7+8+7+9+7 = 38, shift adds 1
        assert_eq!(bit_node_offset(s, 6, NO_HOLES), 39);
        assert_eq!(bit_node_width(s, 6), 8);
        assert_eq!(bit_node_offset(s, 1, NO_HOLES), 1);
        assert_eq!(bit_node_width(s, 1), s);

        for s in [1u32, 7, 11, 55] {
            let mut end = 1usize; // leading shift bit
            for j in 1..=4096usize {
                assert_eq!(bit_node_offset(s, j, NO_HOLES), end, "s={s} j={j}");
                end += bit_node_width(s, j) as usize;
                assert_eq!(bit_storage_end(s, j, NO_HOLES), end, "s={s} j={j}");
            }
        }
    }

    #[test]
    fn bit_offset_includes_hole() {
        let s = 7;
        let j = 1 << 14;
        assert_eq!(
            bit_node_offset(s, j, DEFAULT_HOLE_LOG),
            bit_node_offset(s, j, NO_HOLES) + 64
        );
        assert_eq!(bit_node_offset(s, j - 1, DEFAULT_HOLE_LOG), bit_node_offset(s, j - 1, NO_HOLES));
    }

    #[test]
    fn byte_sizes_match_direct_summation() {
        // S = 7: base 1 byte with 1 spare bit; first 8 nodes take
        // 1+1+1+2+1+1+1+2 = 10 bytes.
        let layout = ByteLayout::for_width(7);
        assert_eq!(layout.base, 1);
        assert_eq!(layout.spare, 1);
        let sizes: Vec<u32> = (1..=8).map(|j| layout.node_size(j)).collect();
        assert_eq!(sizes, [1, 1, 1, 2, 1, 1, 1, 2]);
        assert_eq!(layout.node_offset(9, NO_HOLES), 10);

        // S = 8: base 1 byte, no spare; node 1 takes the base size.
        let layout = ByteLayout::for_width(8);
        assert_eq!(layout.spare, 0);
        assert_eq!(layout.node_size(1), 1);

        for s in [1u32, 7, 8, 11, 23, 55, 64] {
            let layout = ByteLayout::for_width(s);
            let mut total = 0usize;
            for j in 1..=4096usize {
                assert_eq!(layout.node_offset(j, NO_HOLES), total, "s={s} j={j}");
                total += layout.node_size(j) as usize;
                assert_eq!(layout.storage_end(j, NO_HOLES), total, "s={s} j={j}");
            }
        }
    }

    #[test]
    fn byte_extra_byte_density_approaches_quarter() {
        // S = 7 has one spare bit, so the extra byte appears exactly on
        // indices divisible by four.
        let layout = ByteLayout::for_width(7);
        let n = 1usize << 20;
        let extra = (1..=n).filter(|&j| layout.node_size(j) == 2).count();
        let expected = n / 4 - n / (1 << 10);
        assert_eq!(extra, expected);
        assert!((extra as f64 / n as f64 - 0.25).abs() < 0.001);
    }

    #[test]
    fn bit_variant_rejects_wide_bounds() {
        assert!(matches!(
            ClassicalBit::with_bound((1 << 55) - 1),
            Err(Error::BoundTooWide(_))
        ));
        // S = 56 would be required for this bound.
        assert!(ClassicalBit::with_bound((1 << 56) - 2).is_err());
        assert!(ClassicalBit::with_bound((1 << 55) - 2).is_ok());
    }

    #[test]
    fn fixed_reserves_word_zero_and_inserts_holes() {
        let mut t = ClassicalFixed::with_bound(64).unwrap();
        for _ in 0..100 {
            t.push(1);
        }
        assert_eq!(t.storage_bits(), 64 * 101);
        assert_eq!(t.prefix(100), 100);
    }

    #[test]
    fn roundtrip_random_values_all_variants() {
        let mut state = 0xC0FF_EE11_2233_4455u64;
        let mut next = move || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let bound = 1024u64;
        let values: Vec<u64> = (0..65_536).map(|_| next() % (bound + 1)).collect();
        let fixed = ClassicalFixed::from_values(&values, bound).unwrap();
        let byte = ClassicalByte::from_values(&values, bound).unwrap();
        let bit = ClassicalBit::from_values(&values, bound).unwrap();
        for (i, &v) in values.iter().enumerate() {
            assert_eq!(fixed.get(i + 1), v);
            assert_eq!(byte.get(i + 1), v);
            assert_eq!(bit.get(i + 1), v);
        }
    }
}
