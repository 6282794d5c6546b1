//! A small hand-rolled splitmix64 generator. Seeds fully determine every
//! random instance, independent of platform and of any external crate's
//! stream stability, which is what makes verify runs byte-for-byte
//! reproducible.

use crate::hypergraph::Hypergraph;
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// A child generator for stream `index`, decorrelated from the parent.
    pub fn derive(&self, index: u64) -> SplitMix64 {
        let mut child = SplitMix64 { state: self.state ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15) };
        child.next_u64();
        child
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0), by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform in the inclusive range.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// A size-`k` subset of `0..n`, sorted.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut picked = BTreeSet::new();
        while picked.len() < k {
            picked.insert(self.below(n as u64) as usize);
        }
        picked.into_iter().collect()
    }

    /// A duplicate-free vertex sequence of length `k` (order random).
    pub fn sequence(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let pos = self.below(pool.len() as u64) as usize;
            out.push(pool.remove(pos));
        }
        out
    }
}

/// Options for random hypergraph generation.
#[derive(Clone, Debug)]
pub struct InstanceShape {
    pub min_n: usize,
    pub max_n: usize,
    pub max_edges: usize,
    pub min_arity: usize,
    pub max_arity: usize,
    /// Force at least one hyperedge of arity >= 3 when possible.
    pub require_hyperedge: bool,
}

impl Default for InstanceShape {
    fn default() -> InstanceShape {
        InstanceShape {
            min_n: 2,
            max_n: 6,
            max_edges: 8,
            min_arity: 2,
            max_arity: 4,
            require_hyperedge: false,
        }
    }
}

/// A random hypergraph drawn from the shape. Edge sets are distinct; the
/// edge count is capped by the number of available hyperedges.
pub fn random_hypergraph(rng: &mut SplitMix64, shape: &InstanceShape) -> Hypergraph {
    let n = rng.range(shape.min_n, shape.max_n);
    let max_arity = shape.max_arity.min(n);
    let min_arity = shape.min_arity.clamp(2, max_arity);
    let mut available: usize = 0;
    for size in min_arity..=max_arity {
        available += binomial(n, size);
    }
    let m = rng.range(0, shape.max_edges.min(available));
    let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    if shape.require_hyperedge && n >= 3 && max_arity >= 3 && m > 0 {
        let size = rng.range(3, max_arity);
        edges.insert(rng.subset(n, size));
    }
    let mut attempts = 0;
    while edges.len() < m && attempts < 10_000 {
        let size = rng.range(min_arity, max_arity);
        edges.insert(rng.subset(n, size));
        attempts += 1;
    }
    Hypergraph::new(n, edges.into_iter().collect()).expect("generated edges are valid")
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derived_streams_differ() {
        let root = SplitMix64::new(7);
        let mut c0 = root.derive(0);
        let mut c1 = root.derive(1);
        assert_ne!(c0.next_u64(), c1.next_u64());
    }

    #[test]
    fn generated_hypergraphs_respect_shape() {
        let mut rng = SplitMix64::new(2024);
        let shape = InstanceShape { min_n: 2, max_n: 5, max_edges: 6, require_hyperedge: true, ..Default::default() };
        for _ in 0..50 {
            let g = random_hypergraph(&mut rng, &shape);
            assert!(g.vertex_count() >= 2 && g.vertex_count() <= 5);
            assert!(g.edge_count() <= 6);
            for e in g.edges() {
                assert!(e.len() >= 2 && e.len() <= 4);
            }
        }
    }

    #[test]
    fn same_seed_same_hypergraph() {
        let shape = InstanceShape::default();
        let g1 = random_hypergraph(&mut SplitMix64::new(99), &shape);
        let g2 = random_hypergraph(&mut SplitMix64::new(99), &shape);
        assert_eq!(g1, g2);
    }
}
