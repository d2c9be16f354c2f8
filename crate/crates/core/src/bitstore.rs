//! Bit-addressable growable storage backing the compressed tree layouts.
//!
//! Fields of 1..=64 bits can be read and written at arbitrary bit offsets;
//! an unaligned access touches at most two consecutive words. When the
//! layout math guarantees a field is contained in a single word-aligned
//! word, [`BitStore::read_bits_aligned`] retrieves it with one access.
//!
//! Bit `i` of the store is bit `i % 64` of word `i / 64` (little-endian bit
//! order within a word), which matches the shift/mask arithmetic used
//! throughout the crate.

/// Growable sequence of bits stored in 64-bit words.
///
/// Backing words are zero-initialized and growth over-allocates through the
/// underlying `Vec`, so repeated small extensions are amortized-constant.
#[derive(Clone, Debug, Default)]
pub struct BitStore {
    words: Vec<u64>,
    len_bits: usize,
}

#[inline(always)]
fn field_mask(width: u32) -> u64 {
    debug_assert!((1..=64).contains(&width));
    u64::MAX >> (64 - width)
}

impl BitStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store of `len_bits` zero bits.
    pub fn with_len(len_bits: usize) -> Self {
        Self {
            words: vec![0; len_bits.div_ceil(64)],
            len_bits,
        }
    }

    #[inline]
    pub fn len_bits(&self) -> usize {
        self.len_bits
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Number of backing words currently addressable.
    pub fn word_len(&self) -> usize {
        self.len_bits.div_ceil(64)
    }

    /// Extend the store to `new_len_bits` zero-filled bits.
    ///
    /// Previously written fields are unchanged. Panics if the store would
    /// shrink; use [`BitStore::truncate`] for that.
    pub fn grow(&mut self, new_len_bits: usize) {
        assert!(
            new_len_bits >= self.len_bits,
            "grow cannot shrink the store ({} -> {new_len_bits} bits)",
            self.len_bits
        );
        self.words.resize(new_len_bits.div_ceil(64), 0);
        self.len_bits = new_len_bits;
    }

    /// Shrink the store to `new_len_bits`, zeroing the vacated bits so a
    /// later [`BitStore::grow`] re-exposes them as zeros.
    pub fn truncate(&mut self, new_len_bits: usize) {
        assert!(new_len_bits <= self.len_bits, "truncate cannot grow the store");
        let keep_words = new_len_bits.div_ceil(64);
        for w in &mut self.words[keep_words..] {
            *w = 0;
        }
        let spare = keep_words * 64 - new_len_bits;
        if spare > 0 {
            self.words[keep_words - 1] &= u64::MAX >> spare;
        }
        self.len_bits = new_len_bits;
    }

    /// The `width`-bit unsigned value stored at bits `[offset, offset+width)`.
    ///
    /// Touches at most two consecutive words; no width/offset combination
    /// within bounds is rejected.
    #[inline]
    pub fn read_bits(&self, offset: usize, width: u32) -> u64 {
        assert!(
            width >= 1 && width as usize <= 64 && offset + width as usize <= self.len_bits,
            "read_bits out of range: offset {offset}, width {width}, len {}",
            self.len_bits
        );
        let word = offset >> 6;
        let shift = (offset & 63) as u32;
        let mut value = self.words[word] >> shift;
        if shift + width > 64 {
            value |= self.words[word + 1] << (64 - shift);
        }
        value & field_mask(width)
    }

    /// Same value as [`BitStore::read_bits`] via exactly one aligned word
    /// access.
    ///
    /// The field must lie within a single 64-bit-aligned word; that
    /// precondition comes from the caller's layout math and is checked in
    /// debug builds.
    #[inline]
    pub fn read_bits_aligned(&self, offset: usize, width: u32) -> u64 {
        debug_assert!(
            (offset & 63) + width as usize <= 64,
            "read_bits_aligned: field [{offset}, {}) straddles a word boundary",
            offset + width as usize
        );
        debug_assert!(offset + width as usize <= self.len_bits);
        let shift = (offset & 63) as u32;
        (self.words[offset >> 6] >> shift) & field_mask(width)
    }

    /// Store `value` in the `width`-bit field at `offset`.
    ///
    /// Panics if `value` does not fit in `width` bits or the field is out of
    /// bounds.
    #[inline]
    pub fn write_bits(&mut self, offset: usize, width: u32, value: u64) {
        assert!(
            width >= 1 && width as usize <= 64 && offset + width as usize <= self.len_bits,
            "write_bits out of range: offset {offset}, width {width}, len {}",
            self.len_bits
        );
        let mask = field_mask(width);
        assert!(
            value <= mask,
            "write_bits: value {value} wider than {width} bits"
        );
        let word = offset >> 6;
        let shift = (offset & 63) as u32;
        self.words[word] = (self.words[word] & !(mask << shift)) | (value << shift);
        if shift + width > 64 {
            let taken = 64 - shift;
            self.words[word + 1] =
                (self.words[word + 1] & !(mask >> taken)) | (value >> taken);
        }
    }

    /// Raw backing words (including any zero padding after `len_bits`).
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_basic() {
        let mut s = BitStore::with_len(128);
        s.write_bits(3, 8, 0xAB);
        assert_eq!(s.read_bits(3, 8), 0xAB);
    }

    #[test]
    fn full_word_roundtrip() {
        let mut s = BitStore::with_len(64);
        s.write_bits(0, 64, 0xDEAD_BEEF_0123_4567);
        assert_eq!(s.read_bits(0, 64), 0xDEAD_BEEF_0123_4567);
    }

    #[test]
    fn adjacent_fields_do_not_clobber() {
        let mut s = BitStore::with_len(64);
        s.write_bits(5, 7, 0x55);
        s.write_bits(12, 7, 0x2A);
        assert_eq!(s.read_bits(5, 7), 0x55);
        assert_eq!(s.read_bits(12, 7), 0x2A);
    }

    #[test]
    fn cross_word_field() {
        let mut s = BitStore::with_len(192);
        s.write_bits(60, 40, 0xF0_F0F0_F0F0);
        assert_eq!(s.read_bits(60, 40), 0xF0_F0F0_F0F0);
        // neighbors untouched
        assert_eq!(s.read_bits(0, 60), 0);
        assert_eq!(s.read_bits(100, 64), 0);
    }

    #[test]
    fn grow_preserves_and_zero_fills() {
        let mut s = BitStore::with_len(40);
        s.write_bits(1, 16, 0xBEEF);
        s.grow(4096);
        assert_eq!(s.read_bits(1, 16), 0xBEEF);
        assert_eq!(s.read_bits(40, 64), 0);
        assert_eq!(s.read_bits(4096 - 64, 64), 0);
    }

    #[test]
    fn truncate_zeroes_vacated_bits() {
        let mut s = BitStore::with_len(256);
        s.write_bits(100, 64, u64::MAX);
        s.truncate(110);
        s.grow(256);
        assert_eq!(s.read_bits(100, 10), 0x3FF);
        assert_eq!(s.read_bits(110, 54), 0);
    }

    #[test]
    #[should_panic(expected = "wider than")]
    fn rejects_wide_value() {
        let mut s = BitStore::with_len(64);
        s.write_bits(0, 8, 256);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rejects_out_of_bounds_read() {
        let s = BitStore::with_len(64);
        s.read_bits(60, 8);
    }

    #[test]
    fn aligned_read_agrees_with_general_read() {
        let mut s = BitStore::with_len(64 * 1024);
        let mut state = 0xFEED_5EEDu64;
        let mut next = move || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        for i in 0..s.word_len() {
            let v = next();
            s.write_bits(i * 64, 64, v);
        }
        for _ in 0..100_000 {
            let r = next();
            let width = (r % 64 + 1) as u32;
            let word = (next() as usize) % s.word_len();
            let slack = 64 - width as usize;
            let shift = if slack == 0 { 0 } else { (next() as usize) % (slack + 1) };
            let offset = word * 64 + shift;
            assert_eq!(s.read_bits_aligned(offset, width), s.read_bits(offset, width));
        }
    }

    /// Reference model: one bool per bit.
    #[derive(Default)]
    struct Model {
        bits: Vec<bool>,
    }

    impl Model {
        fn grow(&mut self, n: usize) {
            self.bits.resize(n, false);
        }
        fn write(&mut self, offset: usize, width: u32, value: u64) {
            for i in 0..width as usize {
                self.bits[offset + i] = (value >> i) & 1 == 1;
            }
        }
        fn read(&self, offset: usize, width: u32) -> u64 {
            let mut v = 0u64;
            for i in (0..width as usize).rev() {
                v = (v << 1) | self.bits[offset + i] as u64;
            }
            v
        }
    }

    #[derive(Debug, Clone)]
    enum Op {
        Write { offset: usize, width: u32, value: u64 },
        Read { offset: usize, width: u32 },
        Grow { extra: usize },
    }

    fn op_strategy() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..8192, 1u32..=64, any::<u64>()).prop_map(|(offset, width, value)| {
                Op::Write { offset, width, value }
            }),
            (0usize..8192, 1u32..=64).prop_map(|(offset, width)| Op::Read { offset, width }),
            (1usize..512).prop_map(|extra| Op::Grow { extra }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn matches_reference_model(ops in proptest::collection::vec(op_strategy(), 10_000)) {
            let mut store = BitStore::with_len(1024);
            let mut model = Model::default();
            model.grow(1024);
            for op in ops {
                match op {
                    Op::Write { offset, width, value } => {
                        if offset + width as usize <= store.len_bits() {
                            let value = value & field_mask(width);
                            store.write_bits(offset, width, value);
                            model.write(offset, width, value);
                        }
                    }
                    Op::Read { offset, width } => {
                        if offset + width as usize <= store.len_bits() {
                            prop_assert_eq!(store.read_bits(offset, width), model.read(offset, width));
                        }
                    }
                    Op::Grow { extra } => {
                        let new_len = store.len_bits() + extra;
                        store.grow(new_len);
                        model.grow(new_len);
                    }
                }
            }
            for chunk in 0..store.len_bits() / 61 {
                let offset = chunk * 61;
                prop_assert_eq!(store.read_bits(offset, 61), model.read(offset, 61));
            }
        }
    }
}
