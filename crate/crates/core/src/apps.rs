//! Applications: counting the transpositions that generate a permutation,
//! and preferential-attachment graph generation.

use crate::bitvec::DynBitVec;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tree::{with_backend_type, BackendKind, FenwickInit, FenwickTree};

/// A permutation of `[0, n)`, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates bijectivity: every value in `[0, n)` appears exactly once.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &x in &mapping {
            if x >= n {
                return Err(Error::InvalidPermutation(format!(
                    "value {x} out of range 0..{n}"
                )));
            }
            if seen[x] {
                return Err(Error::InvalidPermutation(format!("value {x} repeated")));
            }
            seen[x] = true;
        }
        Ok(Self(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Uniform random permutation via a seeded Fisher-Yates shuffle.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        let mut rng = SplitMix64::new(seed);
        for i in (1..n).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            mapping.swap(i, j);
        }
        Self(mapping)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }
}

/// Number of transpositions generating `pi` (its inversion count), computed
/// with the given bit-vector backend.
///
/// Scans the inverse permutation left to right over a vector of `n` ones:
/// each element contributes its current rank (the number of surviving
/// smaller-indexed elements a bubble sort would swap it with), after which
/// its bit is cleared.
pub fn count_transpositions(
    pi: &Permutation,
    kind: BackendKind,
    block_words: usize,
) -> Result<u64> {
    with_backend_type!(kind, T, { count_transpositions_with::<T>(pi, block_words) })
}

/// Monomorphized form of [`count_transpositions`].
pub fn count_transpositions_with<T: FenwickTree + FenwickInit>(
    pi: &Permutation,
    block_words: usize,
) -> Result<u64> {
    let n = pi.len();
    let inverse = pi.inverse();
    let mut alive: DynBitVec<T> =
        DynBitVec::from_bits(std::iter::repeat_n(true, n), block_words)?;
    let mut total = 0u64;
    for &x in inverse.as_slice() {
        total += alive.rank(x);
        alive.clear(x);
    }
    Ok(total)
}

/// Configuration for preferential-attachment generation: grow to `n`
/// vertices, attaching each new vertex to `d` existing ones, starting from
/// `d0 >= d` seed vertices that carry a self-loop.
#[derive(Clone, Copy, Debug)]
pub struct PaConfig {
    pub n: usize,
    pub d: usize,
    pub d0: usize,
    pub seed: u64,
}

impl PaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidConfig("d must be at least 1".into()));
        }
        if self.d > self.d0 {
            return Err(Error::InvalidConfig(format!(
                "d ({}) must not exceed d0 ({})",
                self.d, self.d0
            )));
        }
        if self.d0 > self.n {
            return Err(Error::InvalidConfig(format!(
                "d0 ({}) must not exceed n ({})",
                self.d0, self.n
            )));
        }
        Ok(())
    }

    /// Final number of edges: one self-loop per seed vertex plus `d` per
    /// grown vertex.
    pub fn edge_count(&self) -> usize {
        self.d0 + (self.n - self.d0) * self.d
    }
}

/// Edges of a preferential-attachment graph, in generation order.
pub type EdgeList = Vec<(u64, u64)>;

/// Generate a preferential-attachment graph.
///
/// A Fenwick tree holds every vertex's degree; sampling a vertex
/// proportionally to degree is a predecessor search at a uniform point of
/// `[0, 2m)`, where `m` counts edges so far. Each draw immediately bumps
/// the chosen vertex's degree, so within one new vertex later draws see
/// earlier ones; duplicate targets (multi-edges) are allowed. The output is
/// deterministic in the seed and identical across backends.
pub fn generate_pa(cfg: &PaConfig, kind: BackendKind) -> Result<EdgeList> {
    with_backend_type!(kind, T, { generate_pa_with::<T>(cfg) })
}

/// Monomorphized form of [`generate_pa`]. Returns the edge list; the
/// degree tree is discarded.
pub fn generate_pa_with<T: FenwickTree + FenwickInit>(cfg: &PaConfig) -> Result<EdgeList> {
    Ok(generate_pa_with_tree::<T>(cfg)?.0)
}

/// [`generate_pa_with`], also returning the degree tree for verification.
pub fn generate_pa_with_tree<T: FenwickTree + FenwickInit>(
    cfg: &PaConfig,
) -> Result<(EdgeList, T)> {
    cfg.validate()?;
    // Degrees never exceed twice the final edge count; doubling the exact
    // bound keeps the leaf width safe for any draw order.
    let bound = 2 * (cfg.d as u64) * (cfg.n as u64).max(1);
    let mut degrees = T::with_bound(bound)?;
    let mut edges = Vec::with_capacity(cfg.edge_count());
    let mut rng = SplitMix64::new(cfg.seed);

    // Seed vertices: a self-loop contributes 2 to its endpoint's degree, so
    // the tree total stays at twice the edge count from the start.
    for v in 0..cfg.d0 as u64 {
        edges.push((v, v));
        degrees.push(2);
    }
    let mut edge_count = cfg.d0 as u64;

    for v in cfg.d0 as u64..cfg.n as u64 {
        for _ in 0..cfg.d {
            let x = rng.below(2 * edge_count);
            let target = degrees.find(x).pos;
            edges.push((v, target as u64));
            degrees.add(target + 1, 1);
        }
        degrees.push(cfg.d as u64);
        edge_count += cfg.d as u64;
    }
    Ok((edges, degrees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::classical::ClassicalByte;
    use crate::tree::ALL_BACKENDS;

    fn brute_force_inversions(pi: &Permutation) -> u64 {
        let v = pi.as_slice();
        let mut count = 0u64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![1, 2, 0]).is_ok());
        assert!(matches!(
            Permutation::new(vec![0, 0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn inverse_examples() {
        let id = Permutation::identity(5);
        assert_eq!(id.inverse(), id);
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(pi.inverse().as_slice(), &[2, 0, 1]);
        let pi = Permutation::random(257, 9);
        assert_eq!(pi.inverse().inverse(), pi);
    }

    #[test]
    fn transposition_examples() {
        let kind = BackendKind::ClassicalFixed;
        assert_eq!(count_transpositions(&Permutation::identity(64), kind, 1).unwrap(), 0);
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(count_transpositions(&pi, kind, 1).unwrap(), 2);
        for n in [2usize, 3, 10, 100] {
            let reversal = Permutation::new((0..n).rev().collect()).unwrap();
            assert_eq!(
                count_transpositions(&reversal, kind, 4).unwrap(),
                (n * (n - 1) / 2) as u64
            );
        }
    }

    #[test]
    fn transpositions_match_brute_force() {
        for seed in 0..20 {
            let pi = Permutation::random(400, seed);
            let expected = brute_force_inversions(&pi);
            assert_eq!(
                count_transpositions(&pi, BackendKind::LevelByte, 2).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn pa_seed_only_graph() {
        let cfg = PaConfig { n: 3, d: 2, d0: 3, seed: 1 };
        let edges = generate_pa(&cfg, BackendKind::ClassicalFixed).unwrap();
        assert_eq!(edges, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn pa_counts_and_degrees() {
        let cfg = PaConfig { n: 10, d: 2, d0: 3, seed: 42 };
        let (edges, tree) = generate_pa_with_tree::<ClassicalByte>(&cfg).unwrap();
        assert_eq!(edges.len(), 17);
        assert_eq!(cfg.edge_count(), 17);
        // total degree is twice the edge count
        assert_eq!(tree.total(), 34);

        // recount degrees from the edge list (self-loops count twice)
        let mut degree = vec![0u64; cfg.n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        for (i, &d) in degree.iter().enumerate() {
            assert_eq!(tree.get(i + 1), d, "vertex {i}");
        }
        // every edge points backwards
        for &(u, v) in &edges {
            assert!(v <= u);
        }
    }

    #[test]
    fn pa_identical_across_backends() {
        let cfg = PaConfig { n: 200, d: 3, d0: 5, seed: 7 };
        let reference = generate_pa(&cfg, ALL_BACKENDS[0]).unwrap();
        for kind in &ALL_BACKENDS[1..] {
            assert_eq!(generate_pa(&cfg, *kind).unwrap(), reference, "{kind}");
        }
    }

    #[test]
    fn pa_rejects_bad_configs() {
        assert!(PaConfig { n: 10, d: 3, d0: 2, seed: 0 }.validate().is_err());
        assert!(PaConfig { n: 1, d: 1, d0: 2, seed: 0 }.validate().is_err());
        assert!(PaConfig { n: 10, d: 0, d0: 2, seed: 0 }.validate().is_err());
    }
}
