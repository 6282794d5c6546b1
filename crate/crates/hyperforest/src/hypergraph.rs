//! Hypergraphs, component analysis, hyperforest classification and the
//! brute-force weighted sums over spanning subhypergraphs.
//!
//! Everything here is enumeration: edge subsets are visited in ascending
//! bitmask order, components come from union-find, and a subset is a
//! hyperforest iff every component has zero cyclomatic excess
//! `sum_A (|A|-1) - |V_c| + 1`. These sums are the combinatorial side of the
//! identity checks; they never touch the Grassmann engine.

use crate::ring::{names, Polynomial, Symbol};
use std::collections::BTreeSet;
use std::fmt;

/// Subsets of the edge list as bitmasks; enumeration is capped well below 32.
pub type EdgeMask = u32;

/// Default cap on the edge count for subset enumeration (2^24 subsets).
pub const DEFAULT_EDGE_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypergraphError {
    EdgeTooSmall { edge: Vec<usize> },
    VertexOutOfRange { vertex: usize, n: usize },
    DuplicateEdge { edge: Vec<usize> },
    CapExceeded { edges: usize, cap: usize },
    OverlappingBlocks,
    LengthMismatch { left: usize, right: usize },
    DuplicateVertices,
}

impl fmt::Display for HypergraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypergraphError::EdgeTooSmall { edge } => {
                write!(f, "hyperedge must have >= 2 vertices, got {:?}", edge)
            }
            HypergraphError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {} out of range for {} vertices", vertex, n)
            }
            HypergraphError::DuplicateEdge { edge } => {
                write!(f, "duplicate hyperedge {:?}", edge)
            }
            HypergraphError::CapExceeded { edges, cap } => {
                write!(f, "edge count {} exceeds enumeration cap {}", edges, cap)
            }
            HypergraphError::OverlappingBlocks => {
                f.write_str("constraint blocks must be pairwise disjoint")
            }
            HypergraphError::LengthMismatch { left, right } => {
                write!(f, "vertex sequences have different lengths {} and {}", left, right)
            }
            HypergraphError::DuplicateVertices => {
                f.write_str("vertex sequence contains a repeated vertex")
            }
        }
    }
}

impl std::error::Error for HypergraphError {}

/// A hypergraph on vertices `0..n`: a set of hyperedges, each a sorted vertex
/// set of size >= 2, plus a weight symbol per edge (defaulting to
/// `w_{i,j,...}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    weight_syms: Vec<Symbol>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Hypergraph, HypergraphError> {
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(edges.len());
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for edge in edges {
            let mut e = edge.clone();
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 || e.len() < edge.len() {
                return Err(HypergraphError::EdgeTooSmall { edge });
            }
            for &v in &e {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if !seen.insert(e.clone()) {
                return Err(HypergraphError::DuplicateEdge { edge: e });
            }
            canon.push(e);
        }
        let weight_syms = canon.iter().map(|e| names::w(e)).collect();
        Ok(Hypergraph { n, edges: canon, weight_syms })
    }

    /// The complete graph on `n` vertices.
    pub fn complete_graph(n: usize) -> Hypergraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push(vec![i, j]);
            }
        }
        Hypergraph::new(n, edges).expect("complete graph is valid")
    }

    /// The path 0 - 1 - ... - (n-1).
    pub fn path_graph(n: usize) -> Hypergraph {
        let edges = (0..n.saturating_sub(1)).map(|i| vec![i, i + 1]).collect();
        Hypergraph::new(n, edges).expect("path graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_graph(&self) -> bool {
        self.edges.iter().all(|e| e.len() == 2)
    }

    /// All edges have the same cardinality `k`; returns it.
    pub fn uniform_arity(&self) -> Option<usize> {
        let k = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    pub fn weight_symbols(&self) -> &[Symbol] {
        &self.weight_syms
    }

    pub fn set_weight_symbols(&mut self, syms: Vec<Symbol>) {
        assert_eq!(syms.len(), self.edges.len());
        self.weight_syms = syms;
    }

    /// The per-edge weight symbols as polynomials.
    pub fn weight_polys(&self) -> Vec<Polynomial> {
        self.weight_syms.iter().map(|s| Polynomial::var(*s)).collect()
    }

    /// Partition of the vertices into connected components of the spanning
    /// subhypergraph selected by `mask`. Blocks are sorted by their minimum
    /// vertex; isolated vertices are singleton blocks.
    pub fn components(&self, mask: EdgeMask) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for (idx, edge) in self.edges.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                for w in &edge[1..] {
                    uf.union(edge[0], *w);
                }
            }
        }
        uf.blocks()
    }

    pub fn component_count(&self, mask: EdgeMask) -> usize {
        let mut uf = UnionFind::new(self.n);
        for (idx, edge) in self.edges.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                for w in &edge[1..] {
                    uf.union(edge[0], *w);
                }
            }
        }
        uf.count()
    }

    /// Component analysis plus the hyperforest / unicyclic classification of
    /// the spanning subhypergraph selected by `mask`.
    pub fn classify(&self, mask: EdgeMask) -> ForestRecord {
        let blocks = self.components(mask);
        let mut components = Vec::with_capacity(blocks.len());
        for vertices in blocks {
            let mut edge_indices = Vec::new();
            let mut size_sum: i64 = 0;
            for (idx, edge) in self.edges.iter().enumerate() {
                if mask & (1 << idx) != 0 && vertices.binary_search(&edge[0]).is_ok() {
                    edge_indices.push(idx);
                    size_sum += edge.len() as i64 - 1;
                }
            }
            let excess = size_sum - vertices.len() as i64 + 1;
            components.push(ComponentInfo { vertices, edges: edge_indices, excess });
        }
        let class = if components.iter().all(|c| c.excess == 0) {
            SubgraphClass::Hyperforest
        } else if components.iter().all(|c| c.excess <= 1) {
            SubgraphClass::UnicyclicMix
        } else {
            SubgraphClass::Other
        };
        ForestRecord { edge_mask: mask, components, class }
    }

    pub fn is_hyperforest(&self, mask: EdgeMask) -> bool {
        self.classify(mask).class == SubgraphClass::Hyperforest
    }

    /// A spanning hypertree: connected and acyclic.
    pub fn is_spanning_hypertree(&self, mask: EdgeMask) -> bool {
        let record = self.classify(mask);
        record.class == SubgraphClass::Hyperforest && record.components.len() == 1
    }

    fn check_cap(&self, cap: usize) -> Result<(), HypergraphError> {
        if self.edges.len() > cap {
            return Err(HypergraphError::CapExceeded { edges: self.edges.len(), cap });
        }
        Ok(())
    }

    /// All spanning hyperforests in ascending edge-mask order.
    pub fn enumerate_spanning_hyperforests(&self) -> Result<Vec<ForestRecord>, HypergraphError> {
        self.check_cap(DEFAULT_EDGE_CAP)?;
        let mut out = Vec::new();
        for mask in 0..(1u64 << self.edges.len()) {
            let record = self.classify(mask as EdgeMask);
            if record.class == SubgraphClass::Hyperforest {
                out.push(record);
            }
        }
        Ok(out)
    }

    /// The weighted hyperforest sum with per-component factor
    /// `sum_{i in V_c} t_i - sum_{A in E_c} (|A|-1) lam_A`.
    ///
    /// With all `t_i = lam` and `lam_A = lam` the factor collapses to one
    /// power of `lam` per component; with `lam_A = 0` it is the rooted form
    /// `sum t_i`.
    pub fn forest_weight_sum(
        &self,
        w: &[Polynomial],
        t: &[Polynomial],
        lam: &[Polynomial],
    ) -> Result<Polynomial, HypergraphError> {
        assert_eq!(w.len(), self.edges.len());
        assert_eq!(t.len(), self.n);
        assert_eq!(lam.len(), self.edges.len());
        let forests = self.enumerate_spanning_hyperforests()?;
        let mut total = Polynomial::zero();
        for record in forests {
            let mut term = Polynomial::one();
            for c in &record.components {
                term = term.mul(&component_factor(self, c, t, lam));
            }
            for idx in record.edge_indices() {
                term = term.mul(&w[idx]);
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Hyperforests that avoid the constraint blocks as hyperedges and stay
    /// acyclic when the blocks are adjoined, weighted
    /// `prod w_A * lam^(k(F) - sum (|C|-1))`.
    pub fn constrained_forest_sum(
        &self,
        w: &[Polynomial],
        lam: &Polynomial,
        blocks: &[Vec<usize>],
    ) -> Result<Polynomial, HypergraphError> {
        assert_eq!(w.len(), self.edges.len());
        let mut seen = vec![false; self.n];
        let mut shift: i64 = 0;
        let mut canon_blocks: Vec<Vec<usize>> = Vec::new();
        for b in blocks {
            let mut c = b.clone();
            c.sort_unstable();
            c.dedup();
            if c.len() < b.len() {
                return Err(HypergraphError::OverlappingBlocks);
            }
            for &v in &c {
                if v >= self.n {
                    return Err(HypergraphError::VertexOutOfRange { vertex: v, n: self.n });
                }
                if seen[v] {
                    return Err(HypergraphError::OverlappingBlocks);
                }
                seen[v] = true;
            }
            shift += c.len() as i64 - 1;
            if c.len() >= 2 {
                canon_blocks.push(c);
            }
        }
        let forests = self.enumerate_spanning_hyperforests()?;
        let mut total = Polynomial::zero();
        'forest: for record in forests {
            let indices = record.edge_indices();
            for idx in &indices {
                if canon_blocks.iter().any(|b| b == &self.edges[*idx]) {
                    continue 'forest;
                }
            }
            if !self.stays_forest_with(&record, &canon_blocks) {
                continue;
            }
            let k = record.components.len() as i64;
            let exponent = k - shift;
            debug_assert!(exponent > 0, "adjoined forest keeps at least one component");
            let mut term = lam.pow(exponent as u32);
            for idx in indices {
                term = term.mul(&w[idx]);
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// True if the hyperforest `record` stays acyclic when the given blocks
    /// are adjoined as extra hyperedges.
    fn stays_forest_with(&self, record: &ForestRecord, blocks: &[Vec<usize>]) -> bool {
        // Contract each existing component, then adjoin blocks one at a time;
        // acyclicity means every block must connect |block| distinct
        // components.
        let mut uf = UnionFind::new(self.n);
        for c in &record.components {
            for w in &c.vertices[1..] {
                uf.union(c.vertices[0], *w);
            }
        }
        for b in blocks {
            let roots: BTreeSet<usize> = b.iter().map(|&v| uf.find(v)).collect();
            if roots.len() < b.len() {
                return false;
            }
            for w in &b[1..] {
                uf.union(b[0], *w);
            }
        }
        true
    }

    /// The properly-matched hyperforest sum of the correlation-function
    /// expansion: components must pair one `I`-vertex with one `J`-vertex or
    /// contain neither, matched components contribute 1, the rest contribute
    /// the usual component factor, and the whole forest carries the sign of
    /// the induced pairing.
    pub fn matched_forest_sum(
        &self,
        w: &[Polynomial],
        t: &[Polynomial],
        lam: &[Polynomial],
        i_seq: &[usize],
        j_seq: &[usize],
    ) -> Result<Polynomial, HypergraphError> {
        if i_seq.len() != j_seq.len() {
            return Err(HypergraphError::LengthMismatch { left: i_seq.len(), right: j_seq.len() });
        }
        for seq in [i_seq, j_seq] {
            let set: BTreeSet<usize> = seq.iter().copied().collect();
            if set.len() != seq.len() {
                return Err(HypergraphError::DuplicateVertices);
            }
            if let Some(&v) = seq.iter().find(|&&v| v >= self.n) {
                return Err(HypergraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let forests = self.enumerate_spanning_hyperforests()?;
        let mut total = Polynomial::zero();
        for record in forests {
            if let Some(term) = matched_forest_term(self, &record, w, t, lam, i_seq, j_seq) {
                total = total.add(&term);
            }
        }
        Ok(total)
    }

    /// A greedy construction sequence of the spanning subhypergraph selected
    /// by `mask`: an edge order in which every prefix is connected. Returns
    /// the order and the running intersection sizes, or None if the selected
    /// edges do not form a connected subhypergraph on their covered vertices.
    pub fn greedy_construction(&self, mask: EdgeMask) -> Option<(Vec<usize>, Vec<usize>)> {
        let selected: Vec<usize> =
            (0..self.edges.len()).filter(|i| mask & (1 << i) != 0).collect();
        if selected.is_empty() {
            return Some((Vec::new(), Vec::new()));
        }
        let mut order = vec![selected[0]];
        let mut inter_sizes = vec![0usize];
        let mut covered: BTreeSet<usize> = self.edges[selected[0]].iter().copied().collect();
        let mut remaining: Vec<usize> = selected[1..].to_vec();
        while !remaining.is_empty() {
            let pos = remaining.iter().position(|&idx| {
                self.edges[idx].iter().any(|v| covered.contains(v))
            })?;
            let idx = remaining.remove(pos);
            let inter = self.edges[idx].iter().filter(|v| covered.contains(v)).count();
            covered.extend(self.edges[idx].iter().copied());
            order.push(idx);
            inter_sizes.push(inter);
        }
        Some((order, inter_sizes))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut weights = serde_json::Map::new();
        for (idx, sym) in self.weight_syms.iter().enumerate() {
            weights.insert(idx.to_string(), serde_json::Value::from(sym.name()));
        }
        serde_json::json!({ "n": self.n, "edges": self.edges, "weights": weights })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Hypergraph, String> {
        let n = value
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| "hypergraph JSON must have an integer \"n\"".to_owned())?
            as usize;
        let edges_json = value
            .get("edges")
            .and_then(|v| v.as_array())
            .ok_or_else(|| "hypergraph JSON must have an \"edges\" array".to_owned())?;
        let mut edges = Vec::with_capacity(edges_json.len());
        for e in edges_json {
            let arr = e.as_array().ok_or_else(|| "each edge must be an array".to_owned())?;
            let mut edge = Vec::with_capacity(arr.len());
            for v in arr {
                edge.push(
                    v.as_u64().ok_or_else(|| "edge entries must be integers".to_owned())? as usize,
                );
            }
            edges.push(edge);
        }
        let mut g = Hypergraph::new(n, edges).map_err(|e| e.to_string())?;
        if let Some(weights) = value.get("weights").and_then(|v| v.as_object()) {
            let mut syms = g.weight_syms.clone();
            for (key, name) in weights {
                let idx: usize = key.parse().map_err(|_| format!("bad weight key {:?}", key))?;
                if idx >= syms.len() {
                    return Err(format!("weight key {} out of range", idx));
                }
                let name = name.as_str().ok_or_else(|| "weight values must be strings".to_owned())?;
                syms[idx] = Symbol::new(name);
            }
            g.weight_syms = syms;
        }
        Ok(g)
    }
}

/// Per-component factor of the hyperforest expansion.
fn component_factor(
    g: &Hypergraph,
    c: &ComponentInfo,
    t: &[Polynomial],
    lam: &[Polynomial],
) -> Polynomial {
    let mut factor = Polynomial::zero();
    for &v in &c.vertices {
        factor = factor.add(&t[v]);
    }
    for &idx in &c.edges {
        let size = g.edges()[idx].len() as i64;
        factor = factor.sub(&lam[idx].scale_int(size - 1));
    }
    factor
}

fn matched_forest_term(
    g: &Hypergraph,
    record: &ForestRecord,
    w: &[Polynomial],
    t: &[Polynomial],
    lam: &[Polynomial],
    i_seq: &[usize],
    j_seq: &[usize],
) -> Option<Polynomial> {
    let k = i_seq.len();
    let mut pairing = vec![usize::MAX; k];
    let mut term = Polynomial::one();
    for c in &record.components {
        let i_hits: Vec<usize> =
            (0..k).filter(|&r| c.vertices.binary_search(&i_seq[r]).is_ok()).collect();
        let j_hits: Vec<usize> =
            (0..k).filter(|&s| c.vertices.binary_search(&j_seq[s]).is_ok()).collect();
        match (i_hits.len(), j_hits.len()) {
            (0, 0) => term = term.mul(&component_factor(g, c, t, lam)),
            (1, 1) => pairing[i_hits[0]] = j_hits[0],
            _ => return None, // not properly matched
        }
    }
    let sign = permutation_sign(&pairing);
    for idx in record.edge_indices() {
        term = term.mul(&w[idx]);
    }
    Some(if sign > 0 { term } else { term.neg() })
}

/// Sign of a permutation given as the image vector.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for a in 0..perm.len() {
        for b in (a + 1)..perm.len() {
            if perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgraphClass {
    Hyperforest,
    UnicyclicMix,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    /// Sorted vertex set of the component.
    pub vertices: Vec<usize>,
    /// Indices of the selected edges inside the component.
    pub edges: Vec<usize>,
    /// Cyclomatic excess `sum (|A|-1) - |V_c| + 1`.
    pub excess: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestRecord {
    pub edge_mask: EdgeMask,
    pub components: Vec<ComponentInfo>,
    pub class: SubgraphClass,
}

impl ForestRecord {
    pub fn edge_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for c in &self.components {
            out.extend(c.edges.iter().copied());
        }
        out.sort_unstable();
        out
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    pub fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }

    /// Blocks sorted by minimum vertex, each block sorted.
    pub fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].push(v);
        }
        let mut blocks: Vec<Vec<usize>> = by_root.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }
}

/// Every possible hyperedge (size >= 2) on `0..n`, in ascending mask order.
/// Handy for exhaustive sweeps at small `n`.
pub fn all_hyperedges(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() >= 2 {
            out.push((0..n).filter(|&v| mask & (1 << v) != 0).collect());
        }
    }
    out
}
