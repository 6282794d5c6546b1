//! Determinants over the polynomial ring (and the even Grassmann subalgebra),
//! the minor-expansion and digraph representations of determinants, classical
//! and two-matrix matrix-tree oracles, the k-uniform Laplacian tensor, and
//! the generalized action with its oriented-configuration enumerator.
//!
//! The enumerator walks edge subsets and decorates every component with
//! exactly one root structure (root vertex, root hyperedge, source-to-sink
//! dashed path, or a cycle summed over its two orientations); all remaining
//! hyperedges are oriented toward the structure by a coverage argument: each
//! pointing hyperedge covers all of its vertices except the outgoing one, and
//! every vertex must be covered exactly once. That saturation rule is what
//! the Berezin integral on the other route enforces field by field.

use crate::grassmann::GrassmannElement;
use crate::hypergraph::{permutation_sign, EdgeMask, Hypergraph, HypergraphError};
use crate::operators::tau;
use crate::ring::{names, Polynomial};
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Leibniz expansion cap: k! permutations.
pub const DET_SIZE_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixTreeError {
    SizeCap { size: usize, cap: usize },
    SizeMismatch,
    NonCommutingEntries,
    NotAGraph,
    NotUniform,
    CapExceeded { edges: usize, cap: usize },
    EmptyMatrix,
}

impl fmt::Display for MatrixTreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixTreeError::SizeCap { size, cap } => {
                write!(f, "matrix size {} exceeds Leibniz cap {}", size, cap)
            }
            MatrixTreeError::SizeMismatch => f.write_str("matrices must have equal size"),
            MatrixTreeError::NonCommutingEntries => {
                f.write_str("Grassmann determinant entries must be even")
            }
            MatrixTreeError::NotAGraph => f.write_str("hypergraph is not 2-uniform"),
            MatrixTreeError::NotUniform => f.write_str("hypergraph is not k-uniform"),
            MatrixTreeError::CapExceeded { edges, cap } => {
                write!(f, "edge count {} exceeds enumeration cap {}", edges, cap)
            }
            MatrixTreeError::EmptyMatrix => f.write_str("determinant of an empty matrix"),
        }
    }
}

impl std::error::Error for MatrixTreeError {}

// ---- Leibniz determinants ----

trait RingEntry: Clone {
    fn zero_like(&self) -> Self;
    fn add_to(&self, other: &Self) -> Self;
    fn mul_by(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
}

impl RingEntry for Polynomial {
    fn zero_like(&self) -> Polynomial {
        Polynomial::zero()
    }
    fn add_to(&self, other: &Polynomial) -> Polynomial {
        self.add(other)
    }
    fn mul_by(&self, other: &Polynomial) -> Polynomial {
        self.mul(other)
    }
    fn negate(&self) -> Polynomial {
        self.neg()
    }
}

impl RingEntry for GrassmannElement {
    fn zero_like(&self) -> GrassmannElement {
        GrassmannElement::zero(self.vertex_count())
    }
    fn add_to(&self, other: &GrassmannElement) -> GrassmannElement {
        self.add(other)
    }
    fn mul_by(&self, other: &GrassmannElement) -> GrassmannElement {
        self.mul(other)
    }
    fn negate(&self) -> GrassmannElement {
        self.neg()
    }
}

/// All permutations of `0..k` with their signs.
pub fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    heap_permute(&mut perm, k, &mut out);
    out
}

fn heap_permute(perm: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, i32)>) {
    if k == 1 {
        out.push((perm.clone(), permutation_sign(perm)));
        return;
    }
    for i in 0..k {
        heap_permute(perm, k - 1, out);
        if k.is_multiple_of(2) {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

fn det_generic<T: RingEntry>(m: &[Vec<T>]) -> Result<T, MatrixTreeError> {
    let k = m.len();
    if k == 0 {
        return Err(MatrixTreeError::EmptyMatrix);
    }
    if k > DET_SIZE_CAP {
        return Err(MatrixTreeError::SizeCap { size: k, cap: DET_SIZE_CAP });
    }
    if m.iter().any(|row| row.len() != k) {
        return Err(MatrixTreeError::SizeMismatch);
    }
    let mut acc = m[0][0].zero_like();
    for (perm, sign) in permutations_with_sign(k) {
        let mut prod = m[0][perm[0]].clone();
        for (i, &pi) in perm.iter().enumerate().skip(1) {
            prod = prod.mul_by(&m[i][pi]);
        }
        if sign < 0 {
            prod = prod.negate();
        }
        acc = acc.add_to(&prod);
    }
    Ok(acc)
}

pub fn det_poly(m: &[Vec<Polynomial>]) -> Result<Polynomial, MatrixTreeError> {
    det_generic(m)
}

/// Determinant with even Grassmann entries; odd entries are rejected rather
/// than ordered arbitrarily.
pub fn det_grassmann(m: &[Vec<GrassmannElement>]) -> Result<GrassmannElement, MatrixTreeError> {
    if m.iter().flatten().any(|e| !e.is_even()) {
        return Err(MatrixTreeError::NonCommutingEntries);
    }
    det_generic(m)
}

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize == size {
            out.push((0..k).filter(|&i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

fn minor(m: &[Vec<Polynomial>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Polynomial>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect()
}

/// Verifies the minor expansion of `det(A+B)`:
/// `det(A+B) = sum over |I|=|J| of eps(I,J) det A_IJ det B_I^cJ^c` with
/// `eps(I,J) = (-1)^(sum I + sum J)`.
pub fn det_sum_expansion_check(
    a: &[Vec<Polynomial>],
    b: &[Vec<Polynomial>],
) -> Result<bool, MatrixTreeError> {
    let k = a.len();
    if b.len() != k {
        return Err(MatrixTreeError::SizeMismatch);
    }
    if k == 0 || k > 6 {
        return Err(MatrixTreeError::SizeCap { size: k, cap: 6 });
    }
    let sum: Vec<Vec<Polynomial>> = (0..k)
        .map(|i| (0..k).map(|j| a[i][j].add(&b[i][j])).collect())
        .collect();
    let lhs = det_poly(&sum)?;
    let mut rhs = Polynomial::zero();
    for size in 0..=k {
        for rows in subsets_of_size(k, size) {
            for cols in subsets_of_size(k, size) {
                let rows_c: Vec<usize> = (0..k).filter(|i| !rows.contains(i)).collect();
                let cols_c: Vec<usize> = (0..k).filter(|j| !cols.contains(j)).collect();
                let det_a = if size == 0 {
                    Polynomial::one()
                } else {
                    det_poly(&minor(a, &rows, &cols))?
                };
                let det_b = if size == k {
                    Polynomial::one()
                } else {
                    det_poly(&minor(b, &rows_c, &cols_c))?
                };
                let eps_exp: usize = rows.iter().sum::<usize>() + cols.iter().sum::<usize>();
                let term = det_a.mul(&det_b);
                rhs = if eps_exp.is_multiple_of(2) { rhs.add(&term) } else { rhs.sub(&term) };
            }
        }
    }
    Ok(lhs == rhs)
}

// ---- digraph representations of determinants ----

fn count_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
        }
    }
    cycles
}

/// `sum over permutation digraphs of (-1)^(#cycles) prod c_(i, pi(i))`.
pub fn perm_digraph_sum(c: &[Vec<Polynomial>]) -> Result<Polynomial, MatrixTreeError> {
    let k = c.len();
    if k == 0 {
        return Err(MatrixTreeError::EmptyMatrix);
    }
    if k > DET_SIZE_CAP {
        return Err(MatrixTreeError::SizeCap { size: k, cap: DET_SIZE_CAP });
    }
    let mut acc = Polynomial::zero();
    for (perm, _) in permutations_with_sign(k) {
        let mut prod = Polynomial::one();
        for (i, &pi) in perm.iter().enumerate() {
            prod = prod.mul(&c[i][pi]);
        }
        if count_cycles(&perm) % 2 == 1 {
            prod = prod.neg();
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

fn ordered_sequences(items: &[usize], len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (pos, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(pos);
        for mut tail in ordered_sequences(&rest, len - 1) {
            let mut seq = vec![x];
            seq.append(&mut tail);
            out.push(seq);
        }
    }
    out
}

/// `sum over digraphs (one directed path + cycles) of
/// (-1)^(#cycles) b_source a_sink prod c_(i,j)`.
pub fn path_digraph_sum(
    c: &[Vec<Polynomial>],
    a: &[Polynomial],
    b: &[Polynomial],
) -> Result<Polynomial, MatrixTreeError> {
    let k = c.len();
    if k == 0 {
        return Err(MatrixTreeError::EmptyMatrix);
    }
    if k > 6 {
        return Err(MatrixTreeError::SizeCap { size: k, cap: 6 });
    }
    let all: Vec<usize> = (0..k).collect();
    let mut acc = Polynomial::zero();
    for path_size in 1..=k {
        for path in ordered_sequences(&all, path_size) {
            let mut prod = b[path[0]].mul(&a[*path.last().unwrap()]);
            for w in path.windows(2) {
                prod = prod.mul(&c[w[0]][w[1]]);
            }
            let rest: Vec<usize> = all.iter().copied().filter(|v| !path.contains(v)).collect();
            // permutation digraphs on the complement, with cycle signs
            let mut rest_sum = Polynomial::zero();
            if rest.is_empty() {
                rest_sum = Polynomial::one();
            } else {
                for (perm, _) in permutations_with_sign(rest.len()) {
                    let mut p = Polynomial::one();
                    for (pos, &target) in perm.iter().enumerate() {
                        p = p.mul(&c[rest[pos]][rest[target]]);
                    }
                    if count_cycles(&perm) % 2 == 1 {
                        p = p.neg();
                    }
                    rest_sum = rest_sum.add(&p);
                }
            }
            acc = acc.add(&prod.mul(&rest_sum));
        }
    }
    Ok(acc)
}

/// Sum over all `k!` vertex orderings of the path products `prod c_(v_i, v_(i+1))`,
/// generically over the entry ring. This is the right-hand side of the
/// cycle-free determinant expansion of `det(E - C)`.
pub fn hamiltonian_path_sum_poly(c: &[Vec<Polynomial>]) -> Result<Polynomial, MatrixTreeError> {
    let k = c.len();
    if k == 0 || k > DET_SIZE_CAP {
        return Err(MatrixTreeError::SizeCap { size: k, cap: DET_SIZE_CAP });
    }
    let all: Vec<usize> = (0..k).collect();
    let mut acc = Polynomial::zero();
    for path in ordered_sequences(&all, k) {
        let mut prod = Polynomial::one();
        for w in path.windows(2) {
            prod = prod.mul(&c[w[0]][w[1]]);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

pub fn hamiltonian_path_sum_grassmann(
    c: &[Vec<GrassmannElement>],
    n: usize,
) -> Result<GrassmannElement, MatrixTreeError> {
    let k = c.len();
    if k == 0 || k > DET_SIZE_CAP {
        return Err(MatrixTreeError::SizeCap { size: k, cap: DET_SIZE_CAP });
    }
    let all: Vec<usize> = (0..k).collect();
    let mut acc = GrassmannElement::zero(n);
    for path in ordered_sequences(&all, k) {
        let mut prod = GrassmannElement::one(n);
        for w in path.windows(2) {
            prod = prod.mul(&c[w[0]][w[1]]);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

/// Runs the two graphical determinant identities on the given symbolic data:
/// `det(-C)` against the permutation-digraph sum, and `det(a b^T - C)`
/// against `det(-C)` plus the path-digraph sum.
pub fn graphical_det_checks(
    c: &[Vec<Polynomial>],
    a: &[Polynomial],
    b: &[Polynomial],
) -> Result<bool, MatrixTreeError> {
    let k = c.len();
    if k == 0 {
        return Err(MatrixTreeError::EmptyMatrix);
    }
    if k > 5 {
        return Err(MatrixTreeError::SizeCap { size: k, cap: 5 });
    }
    if a.len() != k || b.len() != k || c.iter().any(|row| row.len() != k) {
        return Err(MatrixTreeError::SizeMismatch);
    }
    let neg_c: Vec<Vec<Polynomial>> = c
        .iter()
        .map(|row| row.iter().map(|e| e.neg()).collect())
        .collect();
    let det_neg_c = det_poly(&neg_c)?;
    if det_neg_c != perm_digraph_sum(c)? {
        return Ok(false);
    }
    let abt_minus_c: Vec<Vec<Polynomial>> = (0..k)
        .map(|i| (0..k).map(|j| a[i].mul(&b[j]).sub(&c[i][j])).collect())
        .collect();
    let lhs = det_poly(&abt_minus_c)?;
    let rhs = det_neg_c.add(&path_digraph_sum(c, a, b)?);
    Ok(lhs == rhs)
}

// ---- classical Laplacian oracles ----

/// Weighted graph Laplacian: `L_ij = -w_ij` on edges, row sums zero.
pub fn laplacian_graph(
    g: &Hypergraph,
    w: &[Polynomial],
) -> Result<Vec<Vec<Polynomial>>, MatrixTreeError> {
    if !g.is_graph() {
        return Err(MatrixTreeError::NotAGraph);
    }
    let n = g.vertex_count();
    let mut l = vec![vec![Polynomial::zero(); n]; n];
    for (idx, e) in g.edges().iter().enumerate() {
        let (i, j) = (e[0], e[1]);
        l[i][j] = l[i][j].sub(&w[idx]);
        l[j][i] = l[j][i].sub(&w[idx]);
        l[i][i] = l[i][i].add(&w[idx]);
        l[j][j] = l[j][j].add(&w[idx]);
    }
    Ok(l)
}

/// Determinant of the Laplacian with the root rows and columns deleted: the
/// generating polynomial of spanning forests rooted at `roots` (each
/// component contains exactly one root).
pub fn principal_minor_forests(
    g: &Hypergraph,
    w: &[Polynomial],
    roots: &[usize],
) -> Result<Polynomial, MatrixTreeError> {
    let l = laplacian_graph(g, w)?;
    let keep: Vec<usize> = (0..g.vertex_count()).filter(|v| !roots.contains(v)).collect();
    if keep.is_empty() {
        return Ok(Polynomial::one());
    }
    let m = minor(&l, &keep, &keep);
    det_poly(&m)
}

/// Spanning-tree count of a graph by direct enumeration, as an independent
/// cross-check of the determinant route.
pub fn count_spanning_trees_enumeration(g: &Hypergraph) -> Result<u64, MatrixTreeError> {
    let m = g.edge_count();
    if m > crate::hypergraph::DEFAULT_EDGE_CAP {
        return Err(MatrixTreeError::CapExceeded { edges: m, cap: crate::hypergraph::DEFAULT_EDGE_CAP });
    }
    let n = g.vertex_count();
    let mut count = 0u64;
    for mask in 0..(1u64 << m) {
        if (mask.count_ones() as usize) != n.saturating_sub(1) {
            continue;
        }
        if g.is_spanning_hypertree(mask as EdgeMask) {
            count += 1;
        }
    }
    Ok(count)
}

// ---- the k-uniform Laplacian tensor ----

/// Entry of the weighted Laplacian tensor for a k-uniform hypergraph:
/// `-w` on all-distinct index tuples that form an edge, the degree-style
/// compensating sum (divided by k-1) on tuples with exactly one coincident
/// pair, zero otherwise.
pub fn laplacian_tensor_entry(g: &Hypergraph, w: &[Polynomial], tuple: &[usize]) -> Polynomial {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in tuple {
        *counts.entry(v).or_insert(0) += 1;
    }
    let k = tuple.len();
    let edge_index = |set: &[usize]| -> Option<usize> {
        g.edges().iter().position(|e| e == set)
    };
    if counts.len() == k {
        // all distinct
        let mut sorted = tuple.to_vec();
        sorted.sort_unstable();
        match edge_index(&sorted) {
            Some(idx) => w[idx].neg(),
            None => Polynomial::zero(),
        }
    } else if counts.len() == k - 1 && counts.values().all(|&c| c <= 2) {
        // exactly one coincident pair: drop one copy, sum over replacements
        let repeated = *counts.iter().find(|(_, &c)| c == 2).unwrap().0;
        let mut base: Vec<usize> = counts.keys().copied().collect();
        debug_assert!(base.contains(&repeated));
        let mut acc = Polynomial::zero();
        for x in 0..g.vertex_count() {
            if base.contains(&x) {
                continue;
            }
            base.push(x);
            base.sort_unstable();
            if let Some(idx) = edge_index(&base) {
                acc = acc.add(&w[idx]);
            }
            base.retain(|&v| v != x);
        }
        acc.scale(&BigRational::new(1.into(), (k as i64 - 1).into()))
    } else {
        Polynomial::zero()
    }
}

/// Assembles the tensor action
/// `sum_tuples L/(k-2)! [pb_{i1} p_{i2} tau_{i3..ik} + (lam/k) tau_{i1..ik}]`
/// for a k-uniform hypergraph with k >= 2.
pub fn laplacian_tensor_action(
    g: &Hypergraph,
    w: &[Polynomial],
    lam: &Polynomial,
) -> Result<GrassmannElement, MatrixTreeError> {
    let k = g.uniform_arity().ok_or(MatrixTreeError::NotUniform)?;
    if k < 2 {
        return Err(MatrixTreeError::NotUniform);
    }
    let n = g.vertex_count();
    let mut factorial: i64 = 1;
    for i in 2..=(k as i64 - 2) {
        factorial *= i;
    }
    let inv_fact = BigRational::new(1.into(), factorial.into());
    let lam_over_k = lam.scale(&BigRational::new(1.into(), (k as i64).into()));
    let mut acc = GrassmannElement::zero(n);
    let mut tuple = vec![0usize; k];
    loop {
        let l = laplacian_tensor_entry(g, w, &tuple);
        if !l.is_zero() {
            let mut mono = GrassmannElement::psibar(tuple[0], n)
                .mul(&GrassmannElement::psi(tuple[1], n));
            for &v in &tuple[2..] {
                mono = mono.mul(&tau(&[v], n));
            }
            let full = tuple_tau(&tuple, n);
            let contribution = mono.add(&full.scale(&lam_over_k)).scale(&l).scale_ratio(&inv_fact);
            acc = acc.add(&contribution);
        }
        // advance the k-dimensional odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(acc);
            }
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

fn tuple_tau(tuple: &[usize], n: usize) -> GrassmannElement {
    let mut e = GrassmannElement::one(n);
    for &v in tuple {
        e = e.mul(&tau(&[v], n));
    }
    e
}

/// The partial row-sum rule: `sum_{i_k} L_{i_1..i_k} = 0` whenever
/// `i_1..i_(k-1)` are all distinct.
pub fn laplacian_tensor_partial_sums_vanish(g: &Hypergraph, w: &[Polynomial]) -> Result<bool, MatrixTreeError> {
    let k = g.uniform_arity().ok_or(MatrixTreeError::NotUniform)?;
    let n = g.vertex_count();
    let prefixes = ordered_sequences(&(0..n).collect::<Vec<_>>(), k - 1);
    for prefix in prefixes {
        let mut sum = Polynomial::zero();
        let mut tuple = prefix.clone();
        tuple.push(0);
        for last in 0..n {
            *tuple.last_mut().unwrap() = last;
            sum = sum.add(&laplacian_tensor_entry(g, w, &tuple));
        }
        if !sum.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- the generalized action and its configuration expansion ----

/// Per-hyperedge weights of the generalized action: the full-monomial weight
/// `w*_A`, pointing weights `w_(A;i)` and dashed weights `w_(A;ij)` for
/// ordered pairs, plus per-vertex mass terms.
#[derive(Clone, Debug)]
pub struct GeneralAction {
    pub t: Vec<Polynomial>,
    pub star: Vec<Polynomial>,
    pub point: Vec<BTreeMap<usize, Polynomial>>,
    pub dash: Vec<BTreeMap<(usize, usize), Polynomial>>,
}

impl GeneralAction {
    /// Fully symbolic action: every parameter its own symbol.
    pub fn symbolic(g: &Hypergraph) -> GeneralAction {
        let t = (0..g.vertex_count()).map(|i| Polynomial::var(names::t(i))).collect();
        let mut star = Vec::new();
        let mut point = Vec::new();
        let mut dash = Vec::new();
        for e in g.edges() {
            star.push(Polynomial::var(names::w_star(e)));
            let mut p = BTreeMap::new();
            let mut d = BTreeMap::new();
            for &i in e {
                p.insert(i, Polynomial::var(names::w_point(e, i)));
                for &j in e {
                    if i != j {
                        d.insert((i, j), Polynomial::var(names::w_dash(e, i, j)));
                    }
                }
            }
            point.push(p);
            dash.push(d);
        }
        GeneralAction { t, star, point, dash }
    }

    /// The hyperedge-symmetric specialization recovering the hyperforest
    /// action: `w_(A;i) = w_(A;ij) = w_A`, `w*_A = -lam_A (|A|-1) w_A`.
    pub fn symmetric(g: &Hypergraph, w: &[Polynomial], lam: &[Polynomial]) -> GeneralAction {
        let t = (0..g.vertex_count()).map(|i| Polynomial::var(names::t(i))).collect();
        let mut star = Vec::new();
        let mut point = Vec::new();
        let mut dash = Vec::new();
        for (idx, e) in g.edges().iter().enumerate() {
            star.push(lam[idx].scale_int(-(e.len() as i64 - 1)).mul(&w[idx]));
            let mut p = BTreeMap::new();
            let mut d = BTreeMap::new();
            for &i in e {
                p.insert(i, w[idx].clone());
                for &j in e {
                    if i != j {
                        d.insert((i, j), w[idx].clone());
                    }
                }
            }
            point.push(p);
            dash.push(d);
        }
        GeneralAction { t, star, point, dash }
    }

    /// `w-hat*_A`: for 2-edges the cross terms of `exp(S_A)` fold into the
    /// full-monomial weight as `w* + w_(A;i) w_(A;j) - w_(A;ij) w_(A;ji)`.
    pub fn hat_star(&self, g: &Hypergraph, idx: usize) -> Polynomial {
        let e = &g.edges()[idx];
        if e.len() == 2 {
            let (i, j) = (e[0], e[1]);
            self.star[idx]
                .add(&self.point[idx][&i].mul(&self.point[idx][&j]))
                .sub(&self.dash[idx][&(i, j)].mul(&self.dash[idx][&(j, i)]))
        } else {
            self.star[idx].clone()
        }
    }

    /// The hyperedge term `S_A` as a Grassmann element, with `w*` replaceable
    /// so the same builder serves both `S_A` and `S-hat_A`.
    fn edge_element(&self, g: &Hypergraph, idx: usize, star: &Polynomial) -> GrassmannElement {
        let n = g.vertex_count();
        let e = &g.edges()[idx];
        let mut acc = tau(e, n).scale(star);
        for &i in e {
            let rest: Vec<usize> = e.iter().copied().filter(|&v| v != i).collect();
            acc = acc.add(&tau(&rest, n).scale(&self.point[idx][&i]));
        }
        for &i in e {
            for &j in e {
                if i == j {
                    continue;
                }
                let rest: Vec<usize> = e.iter().copied().filter(|&v| v != i && v != j).collect();
                let term = GrassmannElement::psi(i, n)
                    .mul(&GrassmannElement::psibar(j, n))
                    .mul(&tau(&rest, n));
                acc = acc.add(&term.scale(&self.dash[idx][&(i, j)]));
            }
        }
        acc
    }

    pub fn s_edge(&self, g: &Hypergraph, idx: usize) -> GrassmannElement {
        self.edge_element(g, idx, &self.star[idx].clone())
    }

    pub fn s_hat_edge(&self, g: &Hypergraph, idx: usize) -> GrassmannElement {
        self.edge_element(g, idx, &self.hat_star(g, idx))
    }
}

fn validate_sequences(
    g: &Hypergraph,
    i_seq: &[usize],
    j_seq: &[usize],
) -> Result<(), HypergraphError> {
    if i_seq.len() != j_seq.len() {
        return Err(HypergraphError::LengthMismatch { left: i_seq.len(), right: j_seq.len() });
    }
    for seq in [i_seq, j_seq] {
        let set: BTreeSet<usize> = seq.iter().copied().collect();
        if set.len() != seq.len() {
            return Err(HypergraphError::DuplicateVertices);
        }
        if let Some(&v) = seq.iter().find(|&&v| v >= g.vertex_count()) {
            return Err(HypergraphError::VertexOutOfRange { vertex: v, n: g.vertex_count() });
        }
    }
    Ok(())
}

/// The Grassmann route: `int D O_(I,J) prod_i (1 + t_i pb_i p_i)
/// prod_A (1 + S-hat_A)` by direct expansion and Berezin integration.
pub fn general_action_integral(
    g: &Hypergraph,
    act: &GeneralAction,
    i_seq: &[usize],
    j_seq: &[usize],
) -> Result<Polynomial, HypergraphError> {
    validate_sequences(g, i_seq, j_seq)?;
    let n = g.vertex_count();
    let mut integrand = GrassmannElement::one(n);
    for (r, &i) in i_seq.iter().enumerate() {
        let j = j_seq[r];
        integrand = integrand
            .mul(&GrassmannElement::psibar(i, n))
            .mul(&GrassmannElement::psi(j, n));
    }
    for idx in 0..g.edge_count() {
        integrand = integrand.mul(&GrassmannElement::one(n).add(&act.s_hat_edge(g, idx)));
    }
    Ok(integrand.integrate_all(&act.t))
}

/// The combinatorial route: a sum over rooted oriented spanning
/// subhypergraphs built from per-component root structures. Must equal
/// [`general_action_integral`] term by term.
pub fn oriented_config_sum(
    g: &Hypergraph,
    act: &GeneralAction,
    i_seq: &[usize],
    j_seq: &[usize],
) -> Result<Polynomial, HypergraphError> {
    validate_sequences(g, i_seq, j_seq)?;
    let m = g.edge_count();
    if m > crate::hypergraph::DEFAULT_EDGE_CAP {
        return Err(HypergraphError::CapExceeded { edges: m, cap: crate::hypergraph::DEFAULT_EDGE_CAP });
    }
    let k = i_seq.len();
    let mut total = Polynomial::zero();
    'mask: for mask in 0..(1u64 << m) {
        let mask = mask as EdgeMask;
        let blocks = g.components(mask);
        let mut pairing = vec![usize::MAX; k];
        let mut factor = Polynomial::one();
        for block in &blocks {
            let edge_idxs: Vec<usize> = (0..m)
                .filter(|&idx| mask & (1 << idx) != 0 && block.binary_search(&g.edges()[idx][0]).is_ok())
                .collect();
            let i_hits: Vec<usize> =
                (0..k).filter(|&r| block.binary_search(&i_seq[r]).is_ok()).collect();
            let j_hits: Vec<usize> =
                (0..k).filter(|&s| block.binary_search(&j_seq[s]).is_ok()).collect();
            let sum = match (i_hits.len(), j_hits.len()) {
                (0, 0) => unmatched_component_sum(g, act, block, &edge_idxs),
                (1, 1) => {
                    pairing[i_hits[0]] = j_hits[0];
                    matched_component_sum(g, act, &edge_idxs, i_seq[i_hits[0]], j_seq[j_hits[0]])
                }
                _ => continue 'mask,
            };
            if sum.is_zero() {
                continue 'mask;
            }
            factor = factor.mul(&sum);
        }
        if permutation_sign(&pairing) < 0 {
            factor = factor.neg();
        }
        total = total.add(&factor);
    }
    Ok(total)
}

/// Orient every listed hyperedge toward the already-covered set `covered`:
/// an edge becomes processable when it meets the covered set in exactly one
/// vertex (its outgoing vertex) and then covers the rest. Returns the factor
/// `prod w_(A;i(A))`, or None when saturation fails.
fn orient_toward(
    g: &Hypergraph,
    act: &GeneralAction,
    covered_init: &BTreeSet<usize>,
    edge_idxs: &[usize],
) -> Option<Polynomial> {
    let mut covered = covered_init.clone();
    let mut remaining: Vec<usize> = edge_idxs.to_vec();
    let mut factor = Polynomial::one();
    while !remaining.is_empty() {
        let pos = remaining
            .iter()
            .position(|&idx| g.edges()[idx].iter().any(|v| covered.contains(v)))?;
        let idx = remaining.remove(pos);
        let touching: Vec<usize> = g.edges()[idx]
            .iter()
            .copied()
            .filter(|v| covered.contains(v))
            .collect();
        if touching.len() != 1 {
            return None;
        }
        let outgoing = touching[0];
        factor = factor.mul(&act.point[idx][&outgoing]);
        for &v in &g.edges()[idx] {
            if v != outgoing {
                covered.insert(v);
            }
        }
    }
    Some(factor)
}

fn unmatched_component_sum(
    g: &Hypergraph,
    act: &GeneralAction,
    block: &[usize],
    edge_idxs: &[usize],
) -> Polynomial {
    let mut sum = Polynomial::zero();
    // root vertices
    for &r in block {
        let covered: BTreeSet<usize> = std::iter::once(r).collect();
        if let Some(factor) = orient_toward(g, act, &covered, edge_idxs) {
            sum = sum.add(&act.t[r].mul(&factor));
        }
    }
    // root hyperedges
    for &root in edge_idxs {
        let covered: BTreeSet<usize> = g.edges()[root].iter().copied().collect();
        let rest: Vec<usize> = edge_idxs.iter().copied().filter(|&i| i != root).collect();
        if let Some(factor) = orient_toward(g, act, &covered, &rest) {
            sum = sum.add(&act.hat_star(g, root).mul(&factor));
        }
    }
    // cycles, each summed over its two orientations
    for cycle in enumerate_cycles(g, edge_idxs) {
        let covered: BTreeSet<usize> = cycle
            .iter()
            .flat_map(|&(_, e)| g.edges()[e].iter().copied())
            .collect();
        // the cycle saturates its union exactly when the interiors and the
        // link vertices tile it: sum (|A|-1) = |union|
        let slots: usize = cycle.iter().map(|&(_, e)| g.edges()[e].len() - 1).sum();
        if slots != covered.len() {
            continue;
        }
        let rest: Vec<usize> = edge_idxs
            .iter()
            .copied()
            .filter(|i| !cycle.iter().any(|&(_, e)| e == *i))
            .collect();
        if let Some(factor) = orient_toward(g, act, &covered, &rest) {
            let fwd = oriented_cycle_weight(act, &cycle);
            let rev = oriented_cycle_weight(act, &reverse_cycle(&cycle));
            sum = sum.add(&fwd.add(&rev).mul(&factor));
        }
    }
    sum
}

fn matched_component_sum(
    g: &Hypergraph,
    act: &GeneralAction,
    edge_idxs: &[usize],
    source: usize,
    sink: usize,
) -> Polynomial {
    if source == sink {
        // the shared vertex roots its tree; the root factor is supplied by
        // the correlator fields, not by t
        let covered: BTreeSet<usize> = std::iter::once(source).collect();
        return match orient_toward(g, act, &covered, edge_idxs) {
            Some(factor) => factor,
            None => Polynomial::zero(),
        };
    }
    let mut sum = Polynomial::zero();
    for path in enumerate_paths(g, edge_idxs, source, sink) {
        let mut weight = Polynomial::one();
        for leg in &path {
            weight = weight.mul(&act.dash[leg.edge][&(leg.from, leg.to)]);
        }
        let covered: BTreeSet<usize> = path
            .iter()
            .flat_map(|leg| g.edges()[leg.edge].iter().copied())
            .collect();
        // path edges must tile their union (interiors, links, endpoints):
        // sum (|A|-1) + 1 = |union|, i.e. they form a hypertree
        let slots: usize = path.iter().map(|leg| g.edges()[leg.edge].len() - 1).sum();
        if !path.is_empty() && slots + 1 != covered.len() {
            continue;
        }
        let rest: Vec<usize> = edge_idxs
            .iter()
            .copied()
            .filter(|i| !path.iter().any(|leg| leg.edge == *i))
            .collect();
        if let Some(factor) = orient_toward(g, act, &covered, &rest) {
            sum = sum.add(&weight.mul(&factor));
        }
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PathLeg {
    from: usize,
    edge: usize,
    to: usize,
}

/// Simple paths from `source` to `sink`: alternating distinct vertices and
/// distinct hyperedges.
fn enumerate_paths(
    g: &Hypergraph,
    edge_idxs: &[usize],
    source: usize,
    sink: usize,
) -> Vec<Vec<PathLeg>> {
    let mut out = Vec::new();
    let mut legs = Vec::new();
    let mut used_edges = BTreeSet::new();
    let mut used_vertices: BTreeSet<usize> = std::iter::once(source).collect();
    path_dfs(g, edge_idxs, source, sink, &mut legs, &mut used_edges, &mut used_vertices, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn path_dfs(
    g: &Hypergraph,
    edge_idxs: &[usize],
    at: usize,
    sink: usize,
    legs: &mut Vec<PathLeg>,
    used_edges: &mut BTreeSet<usize>,
    used_vertices: &mut BTreeSet<usize>,
    out: &mut Vec<Vec<PathLeg>>,
) {
    if at == sink {
        out.push(legs.clone());
        return;
    }
    for &idx in edge_idxs {
        if used_edges.contains(&idx) || !g.edges()[idx].contains(&at) {
            continue;
        }
        for &next in &g.edges()[idx] {
            if next == at || used_vertices.contains(&next) {
                continue;
            }
            used_edges.insert(idx);
            used_vertices.insert(next);
            legs.push(PathLeg { from: at, edge: idx, to: next });
            path_dfs(g, edge_idxs, next, sink, legs, used_edges, used_vertices, out);
            legs.pop();
            used_vertices.remove(&next);
            used_edges.remove(&idx);
        }
    }
}

/// A directed cycle as `[(v_0, e_1), (v_1, e_2), ..., (v_(l-1), e_l)]`:
/// traverse `e_(a+1)` from `v_a` to `v_(a+1 mod l)`.
type DirectedCycle = Vec<(usize, usize)>;

fn rotations_and_reflections(cycle: &DirectedCycle) -> Vec<DirectedCycle> {
    let l = cycle.len();
    let mut variants = Vec::with_capacity(2 * l);
    for r in 0..l {
        let mut rot: DirectedCycle = Vec::with_capacity(l);
        for a in 0..l {
            rot.push(cycle[(r + a) % l]);
        }
        variants.push(rot);
    }
    let rev = reverse_cycle(cycle);
    for r in 0..l {
        let mut rot: DirectedCycle = Vec::with_capacity(l);
        for a in 0..l {
            rot.push(rev[(r + a) % l]);
        }
        variants.push(rot);
    }
    variants
}

fn reverse_cycle(cycle: &DirectedCycle) -> DirectedCycle {
    let l = cycle.len();
    let mut rev = Vec::with_capacity(l);
    // reversed traversal visits the same vertices backwards; the edge leaving
    // v_a backwards is the edge that entered it forwards
    for a in 0..l {
        let v = cycle[(l - a) % l].0;
        let e = cycle[(l - a - 1) % l].1;
        rev.push((v, e));
    }
    rev
}

/// All undirected cycles through the given edges, one canonical directed
/// representative each. Cycles alternate >= 2 distinct hyperedges and as many
/// distinct vertices.
fn enumerate_cycles(g: &Hypergraph, edge_idxs: &[usize]) -> Vec<DirectedCycle> {
    let mut canon: BTreeSet<DirectedCycle> = BTreeSet::new();
    let vertices: BTreeSet<usize> = edge_idxs
        .iter()
        .flat_map(|&e| g.edges()[e].iter().copied())
        .collect();
    for &start in &vertices {
        let mut legs: Vec<(usize, usize)> = Vec::new();
        let mut used_edges = BTreeSet::new();
        let mut used_vertices: BTreeSet<usize> = std::iter::once(start).collect();
        cycle_dfs(
            g,
            edge_idxs,
            start,
            start,
            &mut legs,
            &mut used_edges,
            &mut used_vertices,
            &mut canon,
        );
    }
    canon.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn cycle_dfs(
    g: &Hypergraph,
    edge_idxs: &[usize],
    start: usize,
    at: usize,
    legs: &mut Vec<(usize, usize)>,
    used_edges: &mut BTreeSet<usize>,
    used_vertices: &mut BTreeSet<usize>,
    canon: &mut BTreeSet<DirectedCycle>,
) {
    for &idx in edge_idxs {
        if used_edges.contains(&idx) || !g.edges()[idx].contains(&at) {
            continue;
        }
        for &next in &g.edges()[idx] {
            if next == at {
                continue;
            }
            if next == start {
                if !legs.is_empty() {
                    // close the cycle: length >= 2 edges
                    let mut cycle: DirectedCycle = legs.clone();
                    cycle.push((at, idx));
                    if cycle.len() >= 2 {
                        let best = rotations_and_reflections(&cycle).into_iter().min().unwrap();
                        canon.insert(best);
                    }
                }
                continue;
            }
            if used_vertices.contains(&next) {
                continue;
            }
            used_edges.insert(idx);
            used_vertices.insert(next);
            legs.push((at, idx));
            cycle_dfs(g, edge_idxs, start, next, legs, used_edges, used_vertices, canon);
            legs.pop();
            used_vertices.remove(&next);
            used_edges.remove(&idx);
        }
    }
}

/// Weight of one oriented cycle: the pointing product minus the dashed
/// product.
fn oriented_cycle_weight(act: &GeneralAction, cycle: &DirectedCycle) -> Polynomial {
    let l = cycle.len();
    let mut bosonic = Polynomial::one();
    let mut fermionic = Polynomial::one();
    for a in 0..l {
        let (from, edge) = cycle[a];
        let to = cycle[(a + 1) % l].0;
        bosonic = bosonic.mul(&act.point[edge][&to]);
        fermionic = fermionic.mul(&act.dash[edge][&(from, to)]);
    }
    bosonic.sub(&fermionic)
}

/// The two-matrix specialization for 2-uniform hypergraphs with
/// `w* = 0`: `M_ii = t_i + sum_k w_({i,k};k)`, `M_ij = -w_({i,j};ji)`.
pub fn moon_matrix(g: &Hypergraph, act: &GeneralAction) -> Result<Vec<Vec<Polynomial>>, MatrixTreeError> {
    if !g.is_graph() {
        return Err(MatrixTreeError::NotAGraph);
    }
    let n = g.vertex_count();
    let mut m = vec![vec![Polynomial::zero(); n]; n];
    for i in 0..n {
        m[i][i] = act.t[i].clone();
    }
    for (idx, e) in g.edges().iter().enumerate() {
        let (i, j) = (e[0], e[1]);
        m[i][i] = m[i][i].add(&act.point[idx][&j]);
        m[j][j] = m[j][j].add(&act.point[idx][&i]);
        m[i][j] = act.dash[idx][&(j, i)].neg();
        m[j][i] = act.dash[idx][&(i, j)].neg();
    }
    Ok(m)
}
