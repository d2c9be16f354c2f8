//! Measurement harness for tree and bit-vector primitives.
//!
//! Two safeguards keep the numbers honest. Results accumulate into a sink
//! that is handed to `std::hint::black_box`, so the compiler cannot
//! dead-code-eliminate the measured calls. And each iteration's argument is
//! xored with the lowest bit of the previous result, creating a data
//! dependency between consecutive calls that prevents unrealistic
//! speculative overlap; operations without a return value chain on the
//! position they touched. Arguments are pre-generated (timing loops never
//! allocate) and drawn from a slightly interior range so the one-bit
//! perturbation cannot leave the operation's domain.
//!
//! Timings are wall-clock means over `queries` calls after a warmup pass of
//! a tenth of the queries; no further statistics are attempted. Space
//! reports are computed from the layout arithmetic alone, so they are exact
//! at any size without building the structure.
//!
//! Deployment note: on hosts with transparent huge pages available, enabling
//! them noticeably reduces TLB misses for structures beyond a few megabytes.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::bitvec::DynBitVec;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tree::{with_backend_type, BackendKind, FenwickInit, FenwickTree};

/// What a benchmark run measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchTarget {
    Fenwick,
    BitVec,
}

impl FromStr for BenchTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fenwick" | "tree" => Ok(BenchTarget::Fenwick),
            "bitvec" | "bitvector" => Ok(BenchTarget::BitVec),
            _ => Err(Error::InvalidConfig(format!("unknown target `{s}`"))),
        }
    }
}

/// A measurable primitive. Tree targets accept `prefix`, `find`, `findc`
/// and `add`; bit-vector targets accept `rank`, `rank0`, `select`,
/// `select0` and `update` (a bit flip).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchOp {
    Prefix,
    Find,
    FindComplement,
    Add,
    Rank,
    Rank0,
    Select,
    Select0,
    Update,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Prefix => "prefix",
            BenchOp::Find => "find",
            BenchOp::FindComplement => "findc",
            BenchOp::Add => "add",
            BenchOp::Rank => "rank",
            BenchOp::Rank0 => "rank0",
            BenchOp::Select => "select",
            BenchOp::Select0 => "select0",
            BenchOp::Update => "update",
        }
    }

    pub fn target(self) -> BenchTarget {
        match self {
            BenchOp::Prefix | BenchOp::Find | BenchOp::FindComplement | BenchOp::Add => {
                BenchTarget::Fenwick
            }
            _ => BenchTarget::BitVec,
        }
    }

    /// The default experiment matrix per target; complemented and zero-side
    /// operations are selectable but excluded by default.
    pub fn defaults(target: BenchTarget) -> Vec<BenchOp> {
        match target {
            BenchTarget::Fenwick => vec![BenchOp::Prefix, BenchOp::Find, BenchOp::Add],
            BenchTarget::BitVec => vec![BenchOp::Rank, BenchOp::Select, BenchOp::Update],
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prefix" => Ok(BenchOp::Prefix),
            "find" => Ok(BenchOp::Find),
            "findc" | "find_complement" | "findcomplement" => Ok(BenchOp::FindComplement),
            "add" => Ok(BenchOp::Add),
            "rank" => Ok(BenchOp::Rank),
            "rank0" => Ok(BenchOp::Rank0),
            "select" => Ok(BenchOp::Select),
            "select0" => Ok(BenchOp::Select0),
            "update" | "flip" => Ok(BenchOp::Update),
            _ => Err(Error::UnknownOp(s.to_string())),
        }
    }
}

/// One benchmark request: the cross product of variants, operations and
/// sizes is measured.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub target: BenchTarget,
    pub variants: Vec<BackendKind>,
    pub ops: Vec<BenchOp>,
    /// Element counts (trees) or bit counts (bit vectors); each must be at
    /// least 64.
    pub sizes: Vec<usize>,
    /// Words per bit-vector block; ignored for tree targets.
    pub block_words: usize,
    /// Timed calls per combination.
    pub queries: usize,
    /// Element bound for tree content.
    pub bound: u64,
    pub seed: u64,
    /// When false the sink is a plain variable; results are identical, only
    /// timing may differ. Used to validate the sink plumbing.
    pub sink_enabled: bool,
}

impl BenchConfig {
    pub fn new(target: BenchTarget) -> Self {
        Self {
            target,
            variants: crate::tree::ALL_BACKENDS.to_vec(),
            ops: BenchOp::defaults(target),
            sizes: ladder_sizes(26),
            block_words: crate::bitvec::DEFAULT_BLOCK_WORDS,
            queries: 100_000,
            bound: 64,
            seed: 0x5EED,
            sink_enabled: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.iter().any(|&n| n < 64) {
            return Err(Error::InvalidConfig("sizes must be at least 64".into()));
        }
        if self.sizes.is_empty() || self.queries == 0 || self.variants.is_empty() || self.ops.is_empty()
        {
            return Err(Error::InvalidConfig(
                "sizes, queries, variants and ops must all be nonempty".into(),
            ));
        }
        if self.block_words == 0 {
            return Err(Error::InvalidConfig("block_words must be at least 1".into()));
        }
        if let Some(op) = self.ops.iter().find(|op| op.target() != self.target) {
            return Err(Error::UnknownOp(format!("{op} is not a {:?} operation", self.target)));
        }
        Ok(())
    }
}

/// The default size ladder: powers of four from 2^10 up to 2^max_exp.
/// Larger exponents reproduce the original large-scale runs and are opt-in.
pub fn ladder_sizes(max_exp: u32) -> Vec<usize> {
    (10..=max_exp).step_by(2).map(|e| 1usize << e).collect()
}

/// One measurement row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub variant: BackendKind,
    pub op: BenchOp,
    pub n: usize,
    /// Words per block for bit-vector rows; 0 for tree rows.
    pub block_words: usize,
    pub ns_per_op: f64,
    /// Wrapping sum of all results; not part of the CSV. Equal runs produce
    /// equal checksums regardless of the sink setting.
    pub checksum: u64,
}

/// The timed loop: applies `op` to each pre-generated argument xored with
/// the low bit of the previous result, accumulating results into the sink.
pub fn chained_loop(
    args: &[u64],
    sink_enabled: bool,
    mut op: impl FnMut(u64) -> u64,
) -> (u64, Duration) {
    let mut sink = 0u64;
    let mut carry = 0u64;
    let start = Instant::now();
    for &a in args {
        let result = op(a ^ carry);
        carry = result & 1;
        sink = sink.wrapping_add(result);
    }
    let elapsed = start.elapsed();
    if sink_enabled {
        sink = std::hint::black_box(sink);
    }
    (sink, elapsed)
}

fn measure(
    args: &[u64],
    warmup: usize,
    sink_enabled: bool,
    mut op: impl FnMut(u64) -> u64,
) -> (u64, Duration) {
    let warmup = warmup.min(args.len());
    chained_loop(&args[..warmup], sink_enabled, &mut op);
    chained_loop(args, sink_enabled, op)
}

/// Arguments for one (op, content) combination, pre-generated so the timed
/// loop only reads them. Deterministic in the seed.
fn gen_args(rng: &mut SplitMix64, count: usize, range: u64) -> Vec<u64> {
    (0..count).map(|_| rng.below(range.max(1))).collect()
}

fn bench_tree<T: FenwickTree + FenwickInit>(
    cfg: &BenchConfig,
    op: BenchOp,
    n: usize,
    variant: BackendKind,
) -> Result<BenchRecord> {
    let mut rng = SplitMix64::new(cfg.seed ^ (n as u64).wrapping_mul(0x9E37_79B9));
    let values: Vec<u64> = (0..n).map(|_| rng.below(cfg.bound + 1)).collect();
    let mut tree = T::from_values(&values, cfg.bound)?;
    let total = tree.total();
    let q = cfg.queries;
    let warmup = q / 10;

    let (checksum, elapsed) = match op {
        BenchOp::Prefix => {
            let args = gen_args(&mut rng, q, (n - 1) as u64);
            measure(&args, warmup, cfg.sink_enabled, |a| tree.prefix(a as usize))
        }
        BenchOp::Find => {
            let args = gen_args(&mut rng, q, total);
            measure(&args, warmup, cfg.sink_enabled, |a| tree.find(a).pos as u64)
        }
        BenchOp::FindComplement => {
            let complement_total =
                ((n as u128 * cfg.bound as u128 - total as u128).min(u64::MAX as u128)) as u64;
            let args = gen_args(&mut rng, q, complement_total);
            measure(&args, warmup, cfg.sink_enabled, |a| {
                tree.find_complement(a).pos as u64
            })
        }
        BenchOp::Add => {
            // Zero deltas traverse and rewrite the full update path exactly
            // like any other delta while keeping bounded layouts in range
            // over arbitrarily long runs; the position serves as the
            // chained result.
            let args: Vec<u64> = (0..q).map(|_| 2 + rng.below((n - 3) as u64)).collect();
            measure(&args, warmup, cfg.sink_enabled, |a| {
                tree.add(a as usize, 0);
                a
            })
        }
        _ => unreachable!("validated against target"),
    };

    Ok(BenchRecord {
        variant,
        op,
        n,
        block_words: 0,
        ns_per_op: elapsed.as_nanos() as f64 / q as f64,
        checksum,
    })
}

fn bench_bitvec<T: FenwickTree + FenwickInit>(
    cfg: &BenchConfig,
    op: BenchOp,
    n: usize,
    variant: BackendKind,
) -> Result<BenchRecord> {
    let mut rng = SplitMix64::new(cfg.seed ^ (n as u64).wrapping_mul(0xBF58_476D));
    let words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    let mut v: DynBitVec<T> = DynBitVec::from_words(words, n, cfg.block_words)?;
    // Unbiased random content has plenty of both bit values at these sizes,
    // but the select ranges must never be empty.
    if v.count_ones() < 2 {
        v.set(0);
        v.set(1);
    }
    if v.count_zeros() < 2 {
        v.clear(n - 1);
        v.clear(n - 2);
    }
    let q = cfg.queries;
    let warmup = q / 10;

    let (checksum, elapsed) = match op {
        BenchOp::Rank => {
            let args = gen_args(&mut rng, q, (n - 1) as u64);
            measure(&args, warmup, cfg.sink_enabled, |a| v.rank(a as usize))
        }
        BenchOp::Rank0 => {
            let args = gen_args(&mut rng, q, (n - 1) as u64);
            measure(&args, warmup, cfg.sink_enabled, |a| v.rank0(a as usize))
        }
        BenchOp::Select => {
            let args = gen_args(&mut rng, q, v.count_ones() - 1);
            measure(&args, warmup, cfg.sink_enabled, |a| v.select(a) as u64)
        }
        BenchOp::Select0 => {
            let args = gen_args(&mut rng, q, v.count_zeros() - 1);
            measure(&args, warmup, cfg.sink_enabled, |a| v.select0(a) as u64)
        }
        BenchOp::Update => {
            let args = gen_args(&mut rng, q, (n - 1) as u64);
            measure(&args, warmup, cfg.sink_enabled, |a| v.flip(a as usize) as u64)
        }
        _ => unreachable!("validated against target"),
    };

    Ok(BenchRecord {
        variant,
        op,
        n,
        block_words: cfg.block_words,
        ns_per_op: elapsed.as_nanos() as f64 / q as f64,
        checksum,
    })
}

/// Run every (size, variant, op) combination of the config, in config
/// order. Strictly single-threaded.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let mut records = Vec::new();
    for &n in &cfg.sizes {
        for &variant in &cfg.variants {
            for &op in &cfg.ops {
                let record = match cfg.target {
                    BenchTarget::Fenwick => {
                        with_backend_type!(variant, T, {
                            bench_tree::<T>(cfg, op, n, variant)?
                        })
                    }
                    BenchTarget::BitVec => {
                        with_backend_type!(variant, T, {
                            bench_bitvec::<T>(cfg, op, n, variant)?
                        })
                    }
                };
                records.push(record);
            }
        }
    }
    Ok(records)
}

/// Write records as CSV with the fixed header
/// `variant,op,n,block_words,ns_per_op`, one row per record in order.
pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "variant,op,n,block_words,ns_per_op")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.3}",
            r.variant, r.op, r.n, r.block_words, r.ns_per_op
        )?;
    }
    Ok(())
}

pub fn write_csv_path<P: AsRef<Path>>(records: &[BenchRecord], path: P) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| {
        Error::Io(io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    write_csv(records, io::BufWriter::new(file))?;
    Ok(())
}

/// Parse a CSV produced by [`write_csv`]; used for round-trip checks.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "variant,op,n,block_words,ns_per_op" {
        return Err(Error::Format(format!("unexpected CSV header `{header}`")));
    }
    let mut records = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Format(format!("malformed CSV row `{line}`")));
        }
        let parse_err = |what: &str| Error::Format(format!("bad {what} in `{line}`"));
        records.push(BenchRecord {
            variant: fields[0].parse()?,
            op: fields[1].parse()?,
            n: fields[2].parse().map_err(|_| parse_err("n"))?,
            block_words: fields[3].parse().map_err(|_| parse_err("block_words"))?,
            ns_per_op: fields[4].parse().map_err(|_| parse_err("ns_per_op"))?,
            checksum: 0,
        });
    }
    Ok(records)
}

/// Exact storage accounting for one variant at one size, computed
/// analytically.
#[derive(Clone, Copy, Debug)]
pub struct SpaceReport {
    pub variant: BackendKind,
    /// Elements (tree reports) or payload bits (bit-vector reports).
    pub n: usize,
    /// 0 for tree reports.
    pub block_words: usize,
    pub storage_bits: u128,
    /// Storage bits per element (tree) or per payload bit (bit vector,
    /// payload included).
    pub bits_per_unit: f64,
}

/// Space used by a tree of `n` elements under `bound`.
pub fn fenwick_space_report(variant: BackendKind, n: usize, bound: u64) -> SpaceReport {
    let storage_bits = variant.storage_bits_for(n, bound);
    SpaceReport {
        variant,
        n,
        block_words: 0,
        storage_bits,
        bits_per_unit: storage_bits as f64 / n as f64,
    }
}

/// Total space (payload blocks plus index tree) per payload bit for a bit
/// vector of `payload_bits` with the given block size.
pub fn bitvec_space_report(
    variant: BackendKind,
    payload_bits: usize,
    block_words: usize,
) -> SpaceReport {
    let q = 64 * block_words;
    let blocks = payload_bits.div_ceil(q);
    let storage_bits = (blocks * q) as u128 + variant.storage_bits_for(blocks, q as u64);
    SpaceReport {
        variant,
        n: payload_bits,
        block_words,
        storage_bits,
        bits_per_unit: storage_bits as f64 / payload_bits as f64,
    }
}
