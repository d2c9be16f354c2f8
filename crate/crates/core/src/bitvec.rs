//! Dynamic bit vector with rank and select over ones and zeros.
//!
//! The bits live in a plain word array partitioned into blocks of
//! `block_words` words (`q = 64 * block_words` bits). A Fenwick tree with
//! one leaf per block, bounded by `q`, tracks the per-block popcounts:
//! rank is a tree prefix sum plus an in-block count, select is a tree
//! predecessor search whose excess is then located inside one block by a
//! linear word scan — sequential enough that prefetching keeps it faster
//! than anything cleverer at this size. Selection on zeros runs the
//! complemented search and flips words while scanning.
//!
//! The final partial block is stored zero-padded, so counting loops never
//! branch on the vector length.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::bits::{nu, select_in_word, select_zero_in_word};
use crate::error::{Error, Result};
use crate::tree::{AnyFenwick, BackendKind, FenwickInit, FenwickTree};

const MAGIC: [u8; 8] = *b"CFENWDBV";
const FORMAT_VERSION: u32 = 1;

/// Words per block when none is specified: one or two cache lines of bits,
/// which keeps the tree a small fraction of the payload.
pub const DEFAULT_BLOCK_WORDS: usize = 16;

/// Growable bit sequence with logarithmic rank, select and update.
///
/// Generic over the Fenwick backend so all layout/compression variants can
/// index the same payload; defaults to the runtime-dispatched backend.
#[derive(Clone, Debug)]
pub struct DynBitVec<T: FenwickTree = AnyFenwick> {
    words: Vec<u64>,
    len: usize,
    block_words: usize,
    ones: u64,
    tree: T,
}

impl<T: FenwickTree + FenwickInit> DynBitVec<T> {
    /// An empty vector with blocks of `block_words` words.
    pub fn new(block_words: usize) -> Result<Self> {
        check_block_words(block_words)?;
        let tree = T::with_bound(64 * block_words as u64)?;
        Ok(Self { words: Vec::new(), len: 0, block_words, ones: 0, tree })
    }

    /// Build from raw little-endian words holding `len` bits. Bits at
    /// positions `>= len` in the last word are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize, block_words: usize) -> Result<Self> {
        check_block_words(block_words)?;
        if words.len() < len.div_ceil(64) {
            return Err(Error::InvalidConfig(format!(
                "{} words cannot hold {len} bits",
                words.len()
            )));
        }
        words.truncate(len.div_ceil(64));
        if len % 64 != 0 {
            let last = words.len() - 1;
            words[last] &= u64::MAX >> (64 - len % 64);
        }
        let blocks = len.div_ceil(64 * block_words);
        words.resize(blocks * block_words, 0);

        let q = 64 * block_words as u64;
        let mut tree = T::with_bound(q)?;
        let mut ones = 0u64;
        for b in 0..blocks {
            let count: u64 = words[b * block_words..(b + 1) * block_words]
                .iter()
                .map(|&w| nu(w) as u64)
                .sum();
            tree.push(count);
            ones += count;
        }
        Ok(Self { words, len, block_words, ones, tree })
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>, block_words: usize) -> Result<Self> {
        let mut v = Self::new(block_words)?;
        for b in bits {
            v.push(b);
        }
        Ok(v)
    }
}

impl DynBitVec<AnyFenwick> {
    /// An empty vector indexed by the given tree variant.
    pub fn with_backend(kind: BackendKind, block_words: usize) -> Result<Self> {
        check_block_words(block_words)?;
        let tree = AnyFenwick::new(kind, 64 * block_words as u64)?;
        Ok(Self { words: Vec::new(), len: 0, block_words, ones: 0, tree })
    }

    pub fn backend(&self) -> BackendKind {
        self.tree.kind()
    }

    /// Serialize as a fixed header (magic, version, backend tag, block
    /// words, length) followed by the raw little-endian payload words.
    /// The output is byte-identical for equal contents.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&self.tree.kind().code().to_le_bytes())?;
        out.write_all(&(self.block_words as u32).to_le_bytes())?;
        out.write_all(&[0u8; 4])?;
        out.write_all(&(self.len as u64).to_le_bytes())?;
        for &w in &self.words {
            out.write_all(&w.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.save(File::create(path)?)
    }

    /// Deserialize a vector written by [`DynBitVec::save`]; the tree is
    /// rebuilt from the payload.
    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 32];
        input.read_exact(&mut header)?;
        if header[..8] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let field = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        let version = field(8);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let kind = BackendKind::from_code(field(12))
            .ok_or_else(|| Error::Format(format!("unknown backend code {}", field(12))))?;
        let block_words = field(16) as usize;
        check_block_words(block_words)?;
        let len = u64::from_le_bytes(header[24..32].try_into().unwrap()) as usize;

        let expected_words = len.div_ceil(64 * block_words) * block_words;
        let mut words = vec![0u64; expected_words];
        let mut buf = [0u8; 8];
        for w in words.iter_mut() {
            input.read_exact(&mut buf)?;
            *w = u64::from_le_bytes(buf);
        }

        let q = 64 * block_words as u64;
        let mut tree = AnyFenwick::new(kind, q)?;
        let mut ones = 0u64;
        for b in 0..len.div_ceil(64 * block_words) {
            let count: u64 = words[b * block_words..(b + 1) * block_words]
                .iter()
                .map(|&w| nu(w) as u64)
                .sum();
            tree.push(count);
            ones += count;
        }
        let v = Self { words, len, block_words, ones, tree };
        v.check_padding()?;
        Ok(v)
    }

    pub fn load_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::load(File::open(path)?)
    }

    fn check_padding(&self) -> Result<()> {
        if self.len % 64 != 0 {
            let w = self.words[self.len / 64];
            if w >> (self.len % 64) != 0 {
                return Err(Error::Format("set bits beyond the vector length".into()));
            }
        }
        for &w in &self.words[self.len.div_ceil(64)..] {
            if w != 0 {
                return Err(Error::Format("set bits beyond the vector length".into()));
            }
        }
        Ok(())
    }
}

fn check_block_words(block_words: usize) -> Result<()> {
    if block_words == 0 {
        return Err(Error::InvalidConfig("block_words must be at least 1".into()));
    }
    Ok(())
}

impl<T: FenwickTree> DynBitVec<T> {
    /// Bits per block.
    #[inline]
    pub fn block_bits(&self) -> usize {
        64 * self.block_words
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> u64 {
        self.len as u64 - self.ones
    }

    pub fn block_words(&self) -> usize {
        self.block_words
    }

    /// Number of ones strictly before position `p` (`0 <= p <= len`).
    pub fn rank(&self, p: usize) -> u64 {
        assert!(p <= self.len, "rank position {p} out of range 0..={}", self.len);
        let block = p / self.block_bits();
        let mut count = self.tree.prefix(block);
        let word = p / 64;
        for w in &self.words[block * self.block_words..word] {
            count += nu(*w) as u64;
        }
        let rem = p % 64;
        if rem != 0 {
            count += nu(self.words[word] & (u64::MAX >> (64 - rem))) as u64;
        }
        count
    }

    /// Number of zeros strictly before position `p`.
    #[inline]
    pub fn rank0(&self, p: usize) -> u64 {
        p as u64 - self.rank(p)
    }

    /// Position of the `(k+1)`-th one (`k` zero-based). Panics if
    /// `k >= count_ones()`.
    pub fn select(&self, k: u64) -> usize {
        assert!(
            k < self.ones,
            "select rank {k} out of range (vector has {} ones)",
            self.ones
        );
        let hit = self.tree.find(k);
        let base = hit.pos * self.block_words;
        let mut rest = hit.excess;
        for (i, &w) in self.words[base..base + self.block_words].iter().enumerate() {
            let c = nu(w) as u64;
            if rest < c {
                return (base + i) * 64 + select_in_word(w, rest as u32) as usize;
            }
            rest -= c;
        }
        unreachable!("tree leaf disagrees with block popcount");
    }

    /// Position of the `(k+1)`-th zero (`k` zero-based). Panics if
    /// `k >= count_zeros()`.
    pub fn select0(&self, k: u64) -> usize {
        assert!(
            k < self.count_zeros(),
            "select0 rank {k} out of range (vector has {} zeros)",
            self.count_zeros()
        );
        let hit = self.tree.find_complement(k);
        let base = hit.pos * self.block_words;
        let mut rest = hit.excess;
        for (i, &w) in self.words[base..base + self.block_words].iter().enumerate() {
            let z = 64 - nu(w) as u64;
            if rest < z {
                return (base + i) * 64 + select_zero_in_word(w, rest as u32) as usize;
            }
            rest -= z;
        }
        unreachable!("tree leaf disagrees with block popcount");
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Set bit `i`; a no-op when it is already set.
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        let mask = 1u64 << (i % 64);
        if self.words[i / 64] & mask == 0 {
            self.words[i / 64] |= mask;
            self.tree.add(i / self.block_bits() + 1, 1);
            self.ones += 1;
        }
    }

    /// Clear bit `i`; a no-op when it is already clear.
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        let mask = 1u64 << (i % 64);
        if self.words[i / 64] & mask != 0 {
            self.words[i / 64] &= !mask;
            self.tree.add(i / self.block_bits() + 1, -1);
            self.ones -= 1;
        }
    }

    /// Flip bit `i`, returning its previous value so callers can maintain
    /// external counters without a prior read.
    pub fn flip(&mut self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        let mask = 1u64 << (i % 64);
        let was_set = self.words[i / 64] & mask != 0;
        self.words[i / 64] ^= mask;
        if was_set {
            self.tree.add(i / self.block_bits() + 1, -1);
            self.ones -= 1;
        } else {
            self.tree.add(i / self.block_bits() + 1, 1);
            self.ones += 1;
        }
        was_set
    }

    /// Append a bit, opening a fresh zeroed block (and tree leaf) when the
    /// last one is full.
    pub fn push(&mut self, bit: bool) {
        if self.len == self.tree.len() * self.block_bits() {
            self.tree.push(0);
            self.words.resize(self.tree.len() * self.block_words, 0);
        }
        let i = self.len;
        self.len += 1;
        if bit {
            self.words[i / 64] |= 1u64 << (i % 64);
            self.tree.add(i / self.block_bits() + 1, 1);
            self.ones += 1;
        }
    }

    /// Remove and return the last bit, dropping the final block when it
    /// empties. Panics on an empty vector.
    pub fn pop(&mut self) -> bool {
        assert!(self.len > 0, "pop on an empty bit vector");
        self.len -= 1;
        let i = self.len;
        let mask = 1u64 << (i % 64);
        let bit = self.words[i / 64] & mask != 0;
        if bit {
            self.words[i / 64] &= !mask;
            self.tree.add(i / self.block_bits() + 1, -1);
            self.ones -= 1;
        }
        if self.len % self.block_bits() == 0 {
            self.tree.pop();
            self.words.truncate(self.tree.len() * self.block_words);
        }
        bit
    }

    /// Exact storage in bits: payload words (padded to whole blocks) plus
    /// the index tree.
    pub fn storage_bits(&self) -> u64 {
        64 * self.words.len() as u64 + self.tree.storage_bits()
    }

    /// Verify every tree leaf equals its block's popcount by full recount.
    pub fn check_tree_consistency(&self) {
        assert_eq!(self.tree.len(), self.len.div_ceil(self.block_bits()));
        let mut total = 0u64;
        for b in 0..self.tree.len() {
            let count: u64 = self.words[b * self.block_words..(b + 1) * self.block_words]
                .iter()
                .map(|&w| nu(w) as u64)
                .sum();
            assert_eq!(self.tree.get(b + 1), count, "leaf {b} disagrees with block popcount");
            total += count;
        }
        assert_eq!(total, self.ones);
        assert_eq!(self.tree.prefix(self.tree.len()), self.ones);
    }

    /// The backing words, padded to whole blocks.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}
