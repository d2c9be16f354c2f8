//! Word-level primitives: ruler function, most significant bit, sideways sum,
//! and in-word selection for ones and zeros.
//!
//! Every other module builds on these. All functions operate on 64-bit words.
//! `select_in_word` has a hardware fast path (PDEP on x86-64 with BMI2,
//! chosen by a one-time runtime capability check) and a portable broadword
//! fallback that never needs special instructions; both are exposed so they
//! can be tested against each other.

/// Machine word size in bits.
pub const WORD_BITS: u32 = 64;

/// Index of the lowest set bit of `x` (the ruler function).
///
/// Returns [`WORD_BITS`] (64) for `x = 0`: callers treat "no set bit" as
/// "above the top level", which keeps their loops branch-free.
#[inline(always)]
pub fn rho(x: u64) -> u32 {
    x.trailing_zeros()
}

/// Index of the highest set bit of `x`, i.e. `floor(log2(x))`.
///
/// Panics for `x = 0`; callers that need a "minus one" convention for zero
/// must handle that case explicitly before calling.
#[inline(always)]
pub fn lambda(x: u64) -> u32 {
    assert!(x > 0, "lambda is undefined for 0");
    63 - x.leading_zeros()
}

/// Number of bits set in `x` (the sideways sum, a.k.a. population count).
#[inline(always)]
pub fn nu(x: u64) -> u32 {
    x.count_ones()
}

/// Portable sideways sum using only shifts, masks and one multiplication.
#[inline]
pub fn nu_portable(x: u64) -> u32 {
    let mut s = x - ((x >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    (s.wrapping_mul(0x0101_0101_0101_0101) >> 56) as u32
}

/// Position of the `(k+1)`-th set bit of `x` (`k` is zero-based).
///
/// Panics if `k >= nu(x)`.
#[inline]
pub fn select_in_word(x: u64, k: u32) -> u32 {
    assert!(
        k < nu(x),
        "select_in_word: rank {k} out of range (word has {} ones)",
        nu(x)
    );
    #[cfg(target_arch = "x86_64")]
    if hw::bmi2_available() {
        // SAFETY: bmi2_available() verified PDEP support at runtime.
        return unsafe { hw::select_pdep(x, k) };
    }
    select_broadword(x, k)
}

/// Portable implementation of [`select_in_word`]; same contract.
#[inline]
pub fn select_in_word_portable(x: u64, k: u32) -> u32 {
    assert!(
        k < nu_portable(x),
        "select_in_word_portable: rank {k} out of range"
    );
    select_broadword(x, k)
}

/// Position of the `(k+1)`-th zero bit of `x` (`k` is zero-based).
///
/// Panics if `k >= 64 - nu(x)`.
#[inline]
pub fn select_zero_in_word(x: u64, k: u32) -> u32 {
    assert!(
        k < WORD_BITS - nu(x),
        "select_zero_in_word: rank {k} out of range (word has {} zeros)",
        WORD_BITS - nu(x)
    );
    select_in_word(!x, k)
}

const ONES_STEP_8: u64 = 0x0101_0101_0101_0101;
const MSBS_STEP_8: u64 = 0x8080_8080_8080_8080;

/// Broadword selection: locate the byte holding the target bit via parallel
/// cumulative byte popcounts, then finish with a short scan inside the byte.
fn select_broadword(x: u64, k: u32) -> u32 {
    debug_assert!(k < nu_portable(x));
    let mut s = x - ((x >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    // byte_sums holds, in byte i, the number of ones in bytes 0..=i of x.
    let byte_sums = s.wrapping_mul(ONES_STEP_8);

    // Mark every byte whose cumulative sum is <= k; the count of marked
    // bytes times eight is the bit offset of the byte containing the answer.
    let k_step_8 = (k as u64) * ONES_STEP_8;
    let geq = ((k_step_8 | MSBS_STEP_8) - byte_sums) & MSBS_STEP_8;
    let place = nu_portable(geq) * 8;

    let byte_rank = k as u64 - (((byte_sums << 8) >> place) & 0xFF);
    let mut byte = (x >> place) & 0xFF;
    let mut remaining = byte_rank;
    let mut bit = 0;
    loop {
        if byte & 1 == 1 {
            if remaining == 0 {
                return place + bit;
            }
            remaining -= 1;
        }
        byte >>= 1;
        bit += 1;
    }
}

#[cfg(target_arch = "x86_64")]
mod hw {
    use std::sync::atomic::{AtomicU8, Ordering};

    static BMI2: AtomicU8 = AtomicU8::new(0);

    #[inline]
    pub fn bmi2_available() -> bool {
        match BMI2.load(Ordering::Relaxed) {
            1 => true,
            2 => false,
            _ => {
                let has = std::arch::is_x86_feature_detected!("bmi2");
                BMI2.store(if has { 1 } else { 2 }, Ordering::Relaxed);
                has
            }
        }
    }

    /// Deposit a single bit at rank `k` into the mask `x`; the position of
    /// the deposited bit is the answer.
    #[target_feature(enable = "bmi2")]
    pub unsafe fn select_pdep(x: u64, k: u32) -> u32 {
        core::arch::x86_64::_pdep_u64(1u64 << k, x).trailing_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn splitmix64(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(12), 2);
        assert_eq!(rho(1), 0);
        assert_eq!(rho(0), 64);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(12), 3);
        assert_eq!(lambda(1), 0);
        assert_eq!(lambda(1 << 63), 63);
    }

    #[test]
    #[should_panic(expected = "lambda is undefined for 0")]
    fn lambda_rejects_zero() {
        lambda(0);
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(12), 2);
        assert_eq!(nu(0), 0);
        assert_eq!(nu(u64::MAX), 64);
    }

    #[test]
    fn select_examples() {
        // set bits of 0b10110100 are {2, 4, 5, 7}
        assert_eq!(select_in_word(0b1011_0100, 2), 5);
        for k in 0..64 {
            assert_eq!(select_in_word(u64::MAX, k), k);
        }
        assert_eq!(select_in_word(1, 0), 0);
    }

    #[test]
    fn select_zero_examples() {
        assert_eq!(select_zero_in_word(0b1010, 1), 2);
        for k in 0..64 {
            assert_eq!(select_zero_in_word(0, k), k);
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn select_zero_rejects_full_word() {
        select_zero_in_word(u64::MAX, 0);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn select_rejects_rank_at_popcount() {
        select_in_word(0b101, 2);
    }

    /// nu(x) + rho(x) <= lambda(x) + 1: the ruler value is bounded by the
    /// number of zeros below the highest set bit.
    #[test]
    fn sideways_sum_ruler_inequality_exhaustive() {
        for x in 1u64..=1 << 20 {
            assert!(rho(x) <= lambda(x));
            assert!(nu(x) + rho(x) <= lambda(x) + 1, "violated at {x}");
        }
    }

    #[test]
    fn low_bit_identities_random() {
        let mut state = 0x1234_5678_9ABC_DEF0u64;
        for _ in 0..1_000_000 {
            let x = splitmix64(&mut state);
            if x == 0 {
                continue;
            }
            let low = x & x.wrapping_neg();
            assert_eq!(low, 1u64 << rho(x));
            assert_eq!(x & (x - 1), x ^ low);
        }
    }

    #[test]
    fn select_defines_rank() {
        let mut state = 42u64;
        for _ in 0..100_000 {
            let x = splitmix64(&mut state);
            if x == 0 {
                continue;
            }
            let k = (splitmix64(&mut state) % nu(x) as u64) as u32;
            let p = select_in_word(x, k);
            assert_eq!(nu(x & ((1u64 << p) - 1)), k);
            assert_eq!((x >> p) & 1, 1);
        }
    }

    #[test]
    fn portable_and_fast_paths_agree() {
        let mut state = 7u64;
        for _ in 0..1_000_000 {
            let x = splitmix64(&mut state) | 1;
            let k = (splitmix64(&mut state) % nu(x) as u64) as u32;
            assert_eq!(select_in_word(x, k), select_in_word_portable(x, k));
            assert_eq!(nu(x), nu_portable(x));
        }
    }
}
