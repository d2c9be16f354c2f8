//! Backend tags naming the six layout/compression combinations, plus a
//! dispatching tree type for callers that pick the backend at runtime.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::classical::{
    bit_storage_end, value_width, ByteLayout, ClassicalBit, ClassicalByte, ClassicalFixed,
    DEFAULT_HOLE_LOG,
};
use crate::tree::level::{level_count, level_len, level_node_bits, LevelBit, LevelBits, LevelByte, LevelFixed};
use crate::tree::{FenwickInit, FenwickTree, FindResult};

/// One of the six tree variants: {fixed, byte, bit} storage in {classical
/// Fenwick, level} order. Tags render as `fixed[F]`, `bit[l]`, etc., with
/// `F` for the classical Fenwick layout and `l` for level order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    ClassicalFixed,
    ClassicalByte,
    ClassicalBit,
    LevelFixed,
    LevelByte,
    LevelBit,
}

/// All six variants, in the canonical reporting order.
pub const ALL_BACKENDS: [BackendKind; 6] = [
    BackendKind::ClassicalFixed,
    BackendKind::ClassicalByte,
    BackendKind::ClassicalBit,
    BackendKind::LevelFixed,
    BackendKind::LevelByte,
    BackendKind::LevelBit,
];

impl BackendKind {
    pub fn tag(self) -> &'static str {
        match self {
            BackendKind::ClassicalFixed => "fixed[F]",
            BackendKind::ClassicalByte => "byte[F]",
            BackendKind::ClassicalBit => "bit[F]",
            BackendKind::LevelFixed => "fixed[l]",
            BackendKind::LevelByte => "byte[l]",
            BackendKind::LevelBit => "bit[l]",
        }
    }

    /// Stable numeric code used in file headers.
    pub fn code(self) -> u32 {
        match self {
            BackendKind::ClassicalFixed => 0,
            BackendKind::ClassicalByte => 1,
            BackendKind::ClassicalBit => 2,
            BackendKind::LevelFixed => 3,
            BackendKind::LevelByte => 4,
            BackendKind::LevelBit => 5,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        ALL_BACKENDS.get(code as usize).copied()
    }

    pub fn is_level_order(self) -> bool {
        matches!(
            self,
            BackendKind::LevelFixed | BackendKind::LevelByte | BackendKind::LevelBit
        )
    }

    /// Exact storage, in bits, a tree of this variant uses for `n` elements
    /// under `bound`, computed from the layout arithmetic alone (no tree is
    /// built). Classical variants account for their default holes.
    pub fn storage_bits_for(self, n: usize, bound: u64) -> u128 {
        let s = value_width(bound);
        let hole_words = if n == 0 { 0 } else { (n >> DEFAULT_HOLE_LOG) as u128 };
        match self {
            BackendKind::ClassicalFixed => 64 * (n as u128 + 1 + hole_words),
            BackendKind::ClassicalByte => {
                8 * ByteLayout::for_width(s).storage_end(n, DEFAULT_HOLE_LOG) as u128
            }
            BackendKind::ClassicalBit => bit_storage_end(s, n, DEFAULT_HOLE_LOG) as u128,
            BackendKind::LevelFixed | BackendKind::LevelByte | BackendKind::LevelBit => {
                let bits = match self {
                    BackendKind::LevelFixed => LevelBits::Fixed,
                    BackendKind::LevelByte => LevelBits::Byte,
                    _ => LevelBits::Bit,
                };
                (0..level_count(n) as u32)
                    .map(|l| level_len(n, l) as u128 * level_node_bits(bits, s, l) as u128)
                    .sum()
            }
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    /// Accepts the canonical tags (`bit[F]`, `byte[l]`, ...) and the
    /// separator-free spellings `bit-f`, `byte_l`, `fixedf`, case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "fixedf" => BackendKind::ClassicalFixed,
            "bytef" => BackendKind::ClassicalByte,
            "bitf" => BackendKind::ClassicalBit,
            "fixedl" => BackendKind::LevelFixed,
            "bytel" => BackendKind::LevelByte,
            "bitl" => BackendKind::LevelBit,
            _ => return Err(Error::UnknownBackend(s.to_string())),
        })
    }
}

/// Runs `$body` with `$T` bound to the concrete tree type named by `$kind`.
macro_rules! with_backend_type {
    ($kind:expr, $T:ident, $body:block) => {
        match $kind {
            $crate::tree::BackendKind::ClassicalFixed => {
                type $T = $crate::tree::classical::ClassicalFixed;
                $body
            }
            $crate::tree::BackendKind::ClassicalByte => {
                type $T = $crate::tree::classical::ClassicalByte;
                $body
            }
            $crate::tree::BackendKind::ClassicalBit => {
                type $T = $crate::tree::classical::ClassicalBit;
                $body
            }
            $crate::tree::BackendKind::LevelFixed => {
                type $T = $crate::tree::level::LevelFixed;
                $body
            }
            $crate::tree::BackendKind::LevelByte => {
                type $T = $crate::tree::level::LevelByte;
                $body
            }
            $crate::tree::BackendKind::LevelBit => {
                type $T = $crate::tree::level::LevelBit;
                $body
            }
        }
    };
}

pub(crate) use with_backend_type;

/// A tree whose variant is chosen at runtime; dispatches every operation to
/// the selected concrete type.
#[derive(Clone, Debug)]
pub enum AnyFenwick {
    ClassicalFixed(ClassicalFixed),
    ClassicalByte(ClassicalByte),
    ClassicalBit(ClassicalBit),
    LevelFixed(LevelFixed),
    LevelByte(LevelByte),
    LevelBit(LevelBit),
}

macro_rules! dispatch {
    ($self:expr, $t:ident => $e:expr) => {
        match $self {
            AnyFenwick::ClassicalFixed($t) => $e,
            AnyFenwick::ClassicalByte($t) => $e,
            AnyFenwick::ClassicalBit($t) => $e,
            AnyFenwick::LevelFixed($t) => $e,
            AnyFenwick::LevelByte($t) => $e,
            AnyFenwick::LevelBit($t) => $e,
        }
    };
}

impl AnyFenwick {
    pub fn new(kind: BackendKind, bound: u64) -> Result<Self> {
        Ok(match kind {
            BackendKind::ClassicalFixed => {
                AnyFenwick::ClassicalFixed(ClassicalFixed::with_bound(bound)?)
            }
            BackendKind::ClassicalByte => {
                AnyFenwick::ClassicalByte(ClassicalByte::with_bound(bound)?)
            }
            BackendKind::ClassicalBit => AnyFenwick::ClassicalBit(ClassicalBit::with_bound(bound)?),
            BackendKind::LevelFixed => AnyFenwick::LevelFixed(LevelFixed::with_bound(bound)?),
            BackendKind::LevelByte => AnyFenwick::LevelByte(LevelByte::with_bound(bound)?),
            BackendKind::LevelBit => AnyFenwick::LevelBit(LevelBit::with_bound(bound)?),
        })
    }

    pub fn from_values(kind: BackendKind, values: &[u64], bound: u64) -> Result<Self> {
        let mut tree = Self::new(kind, bound)?;
        for &v in values {
            tree.push(v);
        }
        Ok(tree)
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            AnyFenwick::ClassicalFixed(_) => BackendKind::ClassicalFixed,
            AnyFenwick::ClassicalByte(_) => BackendKind::ClassicalByte,
            AnyFenwick::ClassicalBit(_) => BackendKind::ClassicalBit,
            AnyFenwick::LevelFixed(_) => BackendKind::LevelFixed,
            AnyFenwick::LevelByte(_) => BackendKind::LevelByte,
            AnyFenwick::LevelBit(_) => BackendKind::LevelBit,
        }
    }
}

impl FenwickTree for AnyFenwick {
    fn len(&self) -> usize {
        dispatch!(self, t => t.len())
    }

    fn bound(&self) -> u64 {
        dispatch!(self, t => t.bound())
    }

    fn prefix(&self, p: usize) -> u64 {
        dispatch!(self, t => t.prefix(p))
    }

    fn find(&self, x: u64) -> FindResult {
        dispatch!(self, t => t.find(x))
    }

    fn find_complement(&self, x: u64) -> FindResult {
        dispatch!(self, t => t.find_complement(x))
    }

    fn add(&mut self, j: usize, delta: i64) {
        dispatch!(self, t => t.add(j, delta))
    }

    fn get(&self, j: usize) -> u64 {
        dispatch!(self, t => t.get(j))
    }

    fn push(&mut self, v: u64) {
        dispatch!(self, t => t.push(v))
    }

    fn pop(&mut self) {
        dispatch!(self, t => t.pop())
    }

    fn storage_bits(&self) -> u64 {
        dispatch!(self, t => t.storage_bits())
    }
}
