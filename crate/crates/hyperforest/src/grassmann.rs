//! Finite Grassmann algebra over pairs of generators per vertex, with exact
//! Berezin integration.
//!
//! Vertex `i` owns the pair `pb{i}` (psi-bar) and `p{i}` (psi). The canonical
//! generator order interleaves them: `pb0 p0 pb1 p1 ...`. A term is a bitmask
//! over that sequence (bit `2i` = psi-bar, bit `2i+1` = psi) together with a
//! [`Polynomial`] coefficient. Keeping each `pb{i} p{i}` pair adjacent makes
//! the pair an even block, so tau products and Berezin stripping never pick up
//! signs; all remaining signs are computed by one merge-count in [`GrassmannElement::mul`].
//!
//! Berezin normalization is the convention `int dp{i} dpb{i} pb{i} p{i} = 1`;
//! it is pinned by a unit test below, not assumed elsewhere.

use crate::ring::Polynomial;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;

/// Hard cap on the vertex count; keys are 32-bit masks.
pub const MAX_VERTICES: usize = 16;

pub type GeneratorKey = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrassmannError {
    DimensionMismatch { left: usize, right: usize },
    OddInput,
    ConstantTerm,
    TooManyVertices { n: usize },
}

impl fmt::Display for GrassmannError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrassmannError::DimensionMismatch { left, right } => {
                write!(f, "elements live over {} and {} vertices", left, right)
            }
            GrassmannError::OddInput => f.write_str("element has terms of odd parity"),
            GrassmannError::ConstantTerm => f.write_str("element has a nonzero constant term"),
            GrassmannError::TooManyVertices { n } => {
                write!(f, "vertex count {} exceeds the cap of {}", n, MAX_VERTICES)
            }
        }
    }
}

impl std::error::Error for GrassmannError {}

/// Which family of generators a derivative acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivKind {
    Psi,
    PsiBar,
}

/// A single vertex or the sum over all vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivTarget {
    Vertex(usize),
    Sum,
}

/// Sign of moving the generators of `b` into a sorted merge with `a`
/// (masks must be disjoint).
fn merge_sign(a: GeneratorKey, b: GeneratorKey) -> i32 {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let p = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of `a` strictly above position p
        inversions += (a >> (p + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// An element of the Grassmann algebra over `n` vertices.
/// Invariant: no stored coefficient polynomial is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct GrassmannElement {
    n: usize,
    terms: BTreeMap<GeneratorKey, Polynomial>,
}

impl GrassmannElement {
    pub fn zero(n: usize) -> GrassmannElement {
        assert!(n <= MAX_VERTICES, "vertex count {} exceeds cap {}", n, MAX_VERTICES);
        GrassmannElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> GrassmannElement {
        GrassmannElement::scalar(n, Polynomial::one())
    }

    pub fn scalar(n: usize, p: Polynomial) -> GrassmannElement {
        let mut e = GrassmannElement::zero(n);
        e.add_term(0, p);
        e
    }

    /// The generator psi_i.
    pub fn psi(i: usize, n: usize) -> GrassmannElement {
        assert!(i < n);
        let mut e = GrassmannElement::zero(n);
        e.add_term(1 << (2 * i + 1), Polynomial::one());
        e
    }

    /// The generator psi-bar_i.
    pub fn psibar(i: usize, n: usize) -> GrassmannElement {
        assert!(i < n);
        let mut e = GrassmannElement::zero(n);
        e.add_term(1 << (2 * i), Polynomial::one());
        e
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (GeneratorKey, &Polynomial)> {
        self.terms.iter().map(|(k, p)| (*k, p))
    }

    pub fn coefficient(&self, key: GeneratorKey) -> Polynomial {
        self.terms.get(&key).cloned().unwrap_or_else(Polynomial::zero)
    }

    /// Parity of one term: number of generators mod 2.
    pub fn key_parity(key: GeneratorKey) -> u32 {
        key.count_ones() % 2
    }

    /// True if every term has even parity.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|k| k.count_ones() % 2 == 0)
    }

    /// True if every term has odd parity.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|k| k.count_ones() % 2 == 1)
    }

    fn add_term(&mut self, key: GeneratorKey, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&p);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &GrassmannElement) -> GrassmannElement {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_term(*k, p.clone());
        }
        out
    }

    pub fn neg(&self) -> GrassmannElement {
        GrassmannElement {
            n: self.n,
            terms: self.terms.iter().map(|(k, p)| (*k, p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &GrassmannElement) -> GrassmannElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, p: &Polynomial) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(*k, c.mul(p));
        }
        out
    }

    pub fn scale_ratio(&self, r: &BigRational) -> GrassmannElement {
        self.scale(&Polynomial::constant(r.clone()))
    }

    pub fn try_mul(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        if self.n != other.n {
            return Err(GrassmannError::DimensionMismatch { left: self.n, right: other.n });
        }
        let mut out = GrassmannElement::zero(self.n);
        for (ka, pa) in &self.terms {
            for (kb, pb) in &other.terms {
                if ka & kb != 0 {
                    continue; // repeated generator
                }
                let sign = merge_sign(*ka, *kb);
                let coef = if sign == 1 { pa.mul(pb) } else { pa.mul(pb).neg() };
                out.add_term(ka | kb, coef);
            }
        }
        Ok(out)
    }

    /// Product; panics on dimension mismatch (use [`Self::try_mul`] at the API
    /// boundary).
    pub fn mul(&self, other: &GrassmannElement) -> GrassmannElement {
        self.try_mul(other).expect("dimension mismatch")
    }

    /// exp of an even element with no constant term. The series terminates
    /// because such an element is nilpotent.
    pub fn exp(&self) -> Result<GrassmannElement, GrassmannError> {
        if !self.is_even() {
            return Err(GrassmannError::OddInput);
        }
        if !self.coefficient(0).is_zero() {
            return Err(GrassmannError::ConstantTerm);
        }
        let mut acc = GrassmannElement::one(self.n);
        let mut power = GrassmannElement::one(self.n);
        let mut k = 1u64;
        loop {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            power = power.scale_ratio(&BigRational::new(1.into(), k.into()));
            acc = acc.add(&power);
            k += 1;
        }
        Ok(acc)
    }

    /// Product form `prod (1 + a)` over the given summands. Equals
    /// `exp(sum a)` when the summands are even, order-2 nilpotent and
    /// commuting, which is the only way it is used; agreement with the series
    /// is covered by tests.
    pub fn product_one_plus(n: usize, summands: &[GrassmannElement]) -> GrassmannElement {
        let mut acc = GrassmannElement::one(n);
        for a in summands {
            acc = acc.mul(&GrassmannElement::one(n).add(a));
        }
        acc
    }

    /// Left fermionic derivative.
    pub fn deriv(&self, kind: DerivKind, target: DerivTarget) -> GrassmannElement {
        match target {
            DerivTarget::Vertex(i) => self.deriv_at(kind, i),
            DerivTarget::Sum => {
                let mut acc = GrassmannElement::zero(self.n);
                for i in 0..self.n {
                    acc = acc.add(&self.deriv_at(kind, i));
                }
                acc
            }
        }
    }

    fn deriv_at(&self, kind: DerivKind, i: usize) -> GrassmannElement {
        assert!(i < self.n);
        let bit = match kind {
            DerivKind::Psi => 2 * i + 1,
            DerivKind::PsiBar => 2 * i,
        };
        let mask = 1u32 << bit;
        let mut out = GrassmannElement::zero(self.n);
        for (k, p) in &self.terms {
            if k & mask == 0 {
                continue;
            }
            let below = (k & (mask - 1)).count_ones();
            let coef = if below.is_multiple_of(2) { p.clone() } else { p.neg() };
            out.add_term(k & !mask, coef);
        }
        out
    }

    /// Berezin integration over the listed vertices against the measure
    /// `prod_i dp_i dpb_i exp(t_i pb_i p_i)`: terms carrying the full pair at
    /// vertex i are stripped, terms free of vertex i pick up `t_i`, unpaired
    /// terms vanish. `t` is indexed by vertex and must cover the algebra.
    pub fn berezin(&self, vertices: &[usize], t: &[Polynomial]) -> GrassmannElement {
        assert!(t.len() >= self.n, "t must assign a weight to every vertex");
        let mut current = self.clone();
        for &i in vertices {
            assert!(i < self.n);
            let pb = 1u32 << (2 * i);
            let ps = 1u32 << (2 * i + 1);
            let mut next = GrassmannElement::zero(self.n);
            for (k, p) in &current.terms {
                let has_pb = k & pb != 0;
                let has_ps = k & ps != 0;
                match (has_pb, has_ps) {
                    (true, true) => next.add_term(k & !(pb | ps), p.clone()),
                    (false, false) => next.add_term(*k, p.mul(&t[i])),
                    _ => {}
                }
            }
            current = next;
        }
        current
    }

    /// Full-measure Berezin integral over all vertices, as a scalar.
    pub fn integrate_all(&self, t: &[Polynomial]) -> Polynomial {
        let all: Vec<usize> = (0..self.n).collect();
        let reduced = self.berezin(&all, t);
        for (k, _) in reduced.terms() {
            debug_assert_eq!(k, 0);
        }
        reduced.coefficient(0)
    }
}

impl fmt::Display for GrassmannElement {
    /// Stable rendering: terms in canonical key order, each as
    /// `(coefficient)·pb0 p0 ...`, joined by ` + `. Zero renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, p) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})", p)?;
            if *k != 0 {
                f.write_str("\u{b7}")?;
                let mut sep = false;
                for bit in 0..(2 * self.n) {
                    if k & (1 << bit) != 0 {
                        if sep {
                            f.write_str(" ")?;
                        }
                        sep = true;
                        let v = bit / 2;
                        if bit % 2 == 0 {
                            write!(f, "pb{}", v)?;
                        } else {
                            write!(f, "p{}", v)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{names, Symbol};
    use proptest::prelude::*;

    fn t_polys(n: usize) -> Vec<Polynomial> {
        (0..n).map(|i| Polynomial::var(names::t(i))).collect()
    }

    #[test]
    fn generators_are_nilpotent() {
        let p0 = GrassmannElement::psi(0, 2);
        assert!(p0.mul(&p0).is_zero());
        let pb0 = GrassmannElement::psibar(0, 2);
        assert!(pb0.mul(&pb0).is_zero());
    }

    #[test]
    fn generators_anticommute() {
        let n = 3;
        let gens: Vec<GrassmannElement> = (0..n)
            .flat_map(|i| [GrassmannElement::psibar(i, n), GrassmannElement::psi(i, n)])
            .collect();
        for a in &gens {
            for b in &gens {
                let anti = a.mul(b).add(&b.mul(a));
                if a == b {
                    assert!(a.mul(b).is_zero());
                } else {
                    assert!(anti.is_zero(), "{} and {} do not anticommute", a, b);
                }
            }
        }
    }

    #[test]
    fn cross_pair_sign() {
        // pb0 p1 times pb1 p0 sorts to minus pb0 p0 pb1 p1.
        let n = 2;
        let a = GrassmannElement::psibar(0, n).mul(&GrassmannElement::psi(1, n));
        let b = GrassmannElement::psibar(1, n).mul(&GrassmannElement::psi(0, n));
        let prod = a.mul(&b);
        let tau01: GeneratorKey = 0b1111;
        assert_eq!(prod.terms().count(), 1);
        assert_eq!(prod.coefficient(tau01), Polynomial::from_int(-1));
    }

    #[test]
    fn deriv_defining_relations() {
        let n = 2;
        let psi0 = GrassmannElement::psi(0, n);
        let d = psi0.deriv(DerivKind::Psi, DerivTarget::Vertex(0));
        assert_eq!(d, GrassmannElement::one(n));
        assert!(psi0.deriv(DerivKind::PsiBar, DerivTarget::Vertex(0)).is_zero());
        let psibar0 = GrassmannElement::psibar(0, n);
        assert!(psibar0.deriv(DerivKind::Psi, DerivTarget::Vertex(0)).is_zero());
        assert_eq!(
            psibar0.deriv(DerivKind::PsiBar, DerivTarget::Vertex(0)),
            GrassmannElement::one(n)
        );
    }

    #[test]
    fn derivs_anticommute_pairwise() {
        let n = 3;
        let e = GrassmannElement::psibar(0, n)
            .mul(&GrassmannElement::psi(1, n))
            .mul(&GrassmannElement::psi(2, n))
            .add(&GrassmannElement::psibar(2, n).mul(&GrassmannElement::psi(0, n)));
        for i in 0..n {
            for j in 0..n {
                let di_dj = e
                    .deriv(DerivKind::Psi, DerivTarget::Vertex(j))
                    .deriv(DerivKind::Psi, DerivTarget::Vertex(i));
                let dj_di = e
                    .deriv(DerivKind::Psi, DerivTarget::Vertex(i))
                    .deriv(DerivKind::Psi, DerivTarget::Vertex(j));
                assert!(di_dj.add(&dj_di).is_zero(), "i={} j={}", i, j);
            }
        }
    }

    #[test]
    fn deriv_squares_to_zero() {
        let n = 3;
        // a messy element
        let e = GrassmannElement::psibar(0, n)
            .mul(&GrassmannElement::psi(1, n))
            .add(&GrassmannElement::psi(0, n).mul(&GrassmannElement::psi(2, n)))
            .add(&GrassmannElement::one(n));
        let d2 = e
            .deriv(DerivKind::Psi, DerivTarget::Sum)
            .deriv(DerivKind::Psi, DerivTarget::Sum);
        assert!(d2.is_zero());
        let db2 = e
            .deriv(DerivKind::PsiBar, DerivTarget::Sum)
            .deriv(DerivKind::PsiBar, DerivTarget::Sum);
        assert!(db2.is_zero());
    }

    #[test]
    fn berezin_normalization_is_plus_one() {
        // int dp0 dpb0 e^{t0 pb0 p0} pb0 p0 = 1 pins the sign convention.
        let n = 1;
        let pair = GrassmannElement::psibar(0, n).mul(&GrassmannElement::psi(0, n));
        let out = pair.berezin(&[0], &t_polys(n));
        assert_eq!(out, GrassmannElement::one(n));
    }

    #[test]
    fn berezin_of_unit_picks_up_t() {
        let n = 1;
        let out = GrassmannElement::one(n).berezin(&[0], &t_polys(n));
        assert_eq!(out, GrassmannElement::scalar(n, Polynomial::var(names::t(0))));
    }

    #[test]
    fn berezin_drops_unpaired_generators() {
        let n = 2;
        let e = GrassmannElement::psibar(0, n).mul(&GrassmannElement::psi(1, n));
        let out = e.berezin(&[0], &t_polys(n));
        assert!(out.is_zero());
    }

    #[test]
    fn full_measure_of_unit_is_t_power_n() {
        let n = 4;
        let t = Symbol::new("t");
        let ts: Vec<Polynomial> = (0..n).map(|_| Polynomial::var(t)).collect();
        let got = GrassmannElement::one(n).integrate_all(&ts);
        assert_eq!(got, Polynomial::var(t).pow(n as u32));
    }

    #[test]
    fn full_measure_of_odd_element_vanishes() {
        let n = 3;
        let odd = GrassmannElement::psi(0, n)
            .add(&GrassmannElement::psibar(2, n))
            .add(
                &GrassmannElement::psi(1, n)
                    .mul(&GrassmannElement::psibar(1, n))
                    .mul(&GrassmannElement::psi(2, n)),
            );
        assert!(odd.is_odd());
        assert!(odd.integrate_all(&t_polys(n)).is_zero());
    }

    #[test]
    fn exp_of_zero_is_one() {
        let n = 2;
        assert_eq!(GrassmannElement::zero(n).exp().unwrap(), GrassmannElement::one(n));
    }

    #[test]
    fn exp_of_pair_truncates() {
        let n = 1;
        let t = Polynomial::var(Symbol::new("t"));
        let pair = GrassmannElement::psibar(0, n)
            .mul(&GrassmannElement::psi(0, n))
            .scale(&t);
        let e = pair.exp().unwrap();
        assert_eq!(e, GrassmannElement::one(n).add(&pair));
    }

    #[test]
    fn exp_rejects_odd_and_constant() {
        let n = 1;
        assert_eq!(
            GrassmannElement::psi(0, n).exp().unwrap_err(),
            GrassmannError::OddInput
        );
        assert_eq!(
            GrassmannElement::one(n).exp().unwrap_err(),
            GrassmannError::ConstantTerm
        );
    }

    #[test]
    fn exp_series_matches_product_form() {
        // sum of commuting order-2 nilpotents over 3 vertices
        let n = 3;
        let w1 = Polynomial::var(Symbol::new("a"));
        let w2 = Polynomial::var(Symbol::new("b"));
        let s1 = GrassmannElement::psibar(0, n)
            .mul(&GrassmannElement::psi(0, n))
            .scale(&w1);
        let s2 = GrassmannElement::psibar(1, n)
            .mul(&GrassmannElement::psi(1, n))
            .mul(&GrassmannElement::psibar(2, n))
            .mul(&GrassmannElement::psi(2, n))
            .scale(&w2);
        let sum = s1.add(&s2);
        assert_eq!(
            sum.exp().unwrap(),
            GrassmannElement::product_one_plus(n, &[s1, s2])
        );
    }

    #[test]
    fn try_mul_rejects_dimension_mismatch() {
        let a = GrassmannElement::one(2);
        let b = GrassmannElement::one(3);
        assert!(matches!(
            a.try_mul(&b),
            Err(GrassmannError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn display_is_stable() {
        let n = 2;
        let t0 = Polynomial::var(names::t(0));
        let lam = Polynomial::var(names::lambda());
        let e = GrassmannElement::one(n).add(
            &GrassmannElement::psibar(1, n)
                .mul(&GrassmannElement::psi(1, n))
                .scale(&t0.sub(&lam)),
        );
        assert_eq!(format!("{}", e), "(1) + (-lambda + t_0)\u{b7}pb1 p1");
    }

    // random sparse elements for property tests
    fn arb_element(n: usize) -> impl Strategy<Value = GrassmannElement> {
        let keys = 0u32..(1 << (2 * n));
        prop::collection::vec((keys, -3i64..4), 0..5).prop_map(move |pairs| {
            let mut e = GrassmannElement::zero(n);
            for (k, c) in pairs {
                let mut t = GrassmannElement::zero(n);
                t.add_term(k, Polynomial::from_int(c));
                e = e.add(&t);
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mul_is_associative(a in arb_element(3), b in arb_element(3), c in arb_element(3)) {
            let left = a.mul(&b).mul(&c);
            let right = a.mul(&b.mul(&c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn mul_distributes(a in arb_element(3), b in arb_element(3), c in arb_element(3)) {
            let left = a.mul(&b.add(&c));
            let right = a.mul(&b).add(&a.mul(&c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn even_elements_commute(a in arb_element(3), b in arb_element(3)) {
            let ae: GrassmannElement = {
                let mut e = GrassmannElement::zero(3);
                for (k, p) in a.terms() {
                    if k.count_ones() % 2 == 0 { e.add_term(k, p.clone()); }
                }
                e
            };
            prop_assert_eq!(ae.mul(&b), b.mul(&ae));
        }
    }
}
