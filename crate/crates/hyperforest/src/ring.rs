//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Symbols are interned strings; a monomial maps symbols to positive
//! exponents; a polynomial maps monomials to nonzero `BigRational`
//! coefficients. Both maps are `BTreeMap`s, so the representation is
//! canonical: equal polynomials compare equal, and iteration order is the
//! documented term order (lexicographic on the sorted (symbol, exponent)
//! sequence, constant term first).
//!
//! Exponents are non-negative only. Identities involving negative powers of
//! a symbol are verified in cleared form by the callers; [`Polynomial::div_exact`]
//! makes the clearing explicit and fails loudly when a factor is missing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::RwLock;

static REGISTRY: RwLock<Option<HashSet<&'static str>>> = RwLock::new(None);

/// An interned symbol name. Two symbols with the same name are the same
/// symbol; ordering and equality follow the name string, so every derived
/// ordering in the crate is reproducible across runs.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(&'static str);

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        {
            let guard = REGISTRY.read().unwrap();
            if let Some(set) = guard.as_ref() {
                if let Some(s) = set.get(name) {
                    return Symbol(s);
                }
            }
        }
        let mut guard = REGISTRY.write().unwrap();
        let set = guard.get_or_insert_with(HashSet::new);
        if let Some(s) = set.get(name) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        set.insert(leaked);
        Symbol(leaked)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

/// A power product of symbols. No zero exponents are stored; the empty map
/// is the unit monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: BTreeMap<Symbol, u32>,
}

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial::default()
    }

    pub fn var(sym: Symbol) -> Monomial {
        Monomial::var_pow(sym, 1)
    }

    pub fn var_pow(sym: Symbol, exp: u32) -> Monomial {
        let mut exps = BTreeMap::new();
        if exp > 0 {
            exps.insert(sym, exp);
        }
        Monomial { exps }
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, sym: Symbol) -> u32 {
        self.exps.get(&sym).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.exps.iter().map(|(s, e)| (*s, *e))
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.values().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (s, e) in &other.exps {
            *exps.entry(*s).or_insert(0) += e;
        }
        Monomial { exps }
    }

    /// Exact quotient, `None` if some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        for (s, e) in &other.exps {
            let have = exps.get_mut(s)?;
            if *have < *e {
                return None;
            }
            *have -= e;
            if *have == 0 {
                exps.remove(s);
            }
        }
        Some(Monomial { exps })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (s, e) in &self.exps {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{}", s)?;
            } else {
                write!(f, "{}^{}", s, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    /// `div_exact` hit a term not divisible by the requested monomial.
    NotDivisible { term: String },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::NotDivisible { term } => {
                write!(f, "term {} is not divisible by the requested monomial", term)
            }
        }
    }
}

impl std::error::Error for RingError {}

/// A sparse multivariate polynomial with `BigRational` coefficients.
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::from_int(1)
    }

    pub fn from_int(n: i64) -> Polynomial {
        Polynomial::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Polynomial {
        Polynomial::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn constant(c: BigRational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Polynomial { terms }
    }

    pub fn var(sym: Symbol) -> Polynomial {
        Polynomial::term(Monomial::var(sym), BigRational::one())
    }

    pub fn term(mono: Monomial, coef: BigRational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(mono, coef);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Coefficient of an exact monomial (zero if absent).
    pub fn coefficient(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::unit())
    }

    fn insert_term(terms: &mut BTreeMap<Monomial, BigRational>, mono: Monomial, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Polynomial { terms }
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Self::insert_term(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        Polynomial { terms }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Polynomial {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Simultaneous substitution of symbols by polynomials. Symbols without a
    /// binding are left alone; the empty binding map returns `self` unchanged.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Polynomial>) -> Polynomial {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut acc = Polynomial::zero();
        for (mono, coef) in &self.terms {
            let mut kept = Monomial::unit();
            let mut factor = Polynomial::one();
            for (sym, exp) in mono.iter() {
                match bindings.get(&sym) {
                    Some(replacement) => factor = factor.mul(&replacement.pow(exp)),
                    None => kept = kept.mul(&Monomial::var_pow(sym, exp)),
                }
            }
            acc = acc.add(&factor.mul(&Polynomial::term(kept, coef.clone())));
        }
        acc
    }

    /// Exact division by a monomial; every term must be divisible.
    pub fn div_exact(&self, mono: &Monomial) -> Result<Polynomial, RingError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            match m.div(mono) {
                Some(q) => {
                    terms.insert(q, c.clone());
                }
                None => {
                    return Err(RingError::NotDivisible { term: m.to_string() });
                }
            }
        }
        Ok(Polynomial { terms })
    }

    /// Collects the coefficient of `sym^exp` as a polynomial in the remaining
    /// symbols (the exponent of `sym` is removed from matching terms).
    pub fn coefficient_of_power(&self, sym: Symbol, exp: u32) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.exponent(sym) == exp {
                let stripped = m.div(&Monomial::var_pow(sym, exp)).expect("exponent checked");
                terms.insert(stripped, c.clone());
            }
        }
        Polynomial { terms }
    }

    /// Largest exponent of `sym` appearing in any term (zero for the zero
    /// polynomial).
    pub fn max_degree_in(&self, sym: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(sym)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, sym: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(sym)).min().unwrap_or(0)
    }

    /// Evaluate at `sym = 0`, i.e. keep the terms free of `sym`.
    pub fn eval_at_zero(&self, sym: Symbol) -> Polynomial {
        self.coefficient_of_power(sym, 0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if first {
                first = false;
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let a = c.abs();
            if m.is_unit() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", a, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

// ---- JSON form ----
//
// {"terms": [{"coef": "-3/2", "monomial": {"lambda": 2, "w_{0,1}": 1}}]}
// Terms appear in the crate-wide term order (the BTreeMap order above).

impl Polynomial {
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mono = serde_json::Map::new();
                for (s, e) in m.iter() {
                    mono.insert(s.name().to_owned(), serde_json::Value::from(e));
                }
                serde_json::json!({ "coef": c.to_string(), "monomial": mono })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Polynomial, String> {
        let terms = value
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| "polynomial JSON must have a \"terms\" array".to_owned())?;
        let mut acc = Polynomial::zero();
        for t in terms {
            let coef = t
                .get("coef")
                .and_then(|c| c.as_str())
                .ok_or_else(|| "term is missing a string \"coef\"".to_owned())?;
            let coef = parse_rational(coef)?;
            let mut mono = Monomial::unit();
            if let Some(obj) = t.get("monomial").and_then(|m| m.as_object()) {
                for (name, exp) in obj {
                    let exp = exp
                        .as_u64()
                        .ok_or_else(|| format!("exponent of {} must be a non-negative integer", name))?;
                    mono = mono.mul(&Monomial::var_pow(Symbol::new(name), exp as u32));
                }
            }
            acc = acc.add(&Polynomial::term(mono, coef));
        }
        Ok(acc)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>().map_err(|_| format!("bad integer: {}", t))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err("zero denominator".to_owned());
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Canonical symbol names used throughout the crate.
pub mod names {
    use super::Symbol;

    pub fn lambda() -> Symbol {
        Symbol::new("lambda")
    }

    pub fn lambda_prime() -> Symbol {
        Symbol::new("lambda_prime")
    }

    pub fn q() -> Symbol {
        Symbol::new("q")
    }

    pub fn t(i: usize) -> Symbol {
        Symbol::new(&format!("t_{}", i))
    }

    fn vertex_list(vertices: &[usize]) -> String {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Hyperedge weight `w_{i,j,...}`, vertex indices sorted ascending.
    pub fn w(vertices: &[usize]) -> Symbol {
        Symbol::new(&format!("w_{{{}}}", vertex_list(vertices)))
    }

    /// Potts hyperedge weight `v_{i,j,...}`.
    pub fn v(vertices: &[usize]) -> Symbol {
        Symbol::new(&format!("v_{{{}}}", vertex_list(vertices)))
    }

    /// Per-hyperedge lambda `lam_{i,j,...}`.
    pub fn lam_edge(vertices: &[usize]) -> Symbol {
        Symbol::new(&format!("lam_{{{}}}", vertex_list(vertices)))
    }

    /// General-action hyperedge weight `ws_{i,j,...}` (the coefficient of the
    /// full hyperedge monomial).
    pub fn w_star(vertices: &[usize]) -> Symbol {
        Symbol::new(&format!("ws_{{{}}}", vertex_list(vertices)))
    }

    /// General-action pointing weight `w_{A};i`.
    pub fn w_point(vertices: &[usize], i: usize) -> Symbol {
        Symbol::new(&format!("w_{{{}}};{}", vertex_list(vertices), i))
    }

    /// General-action dashed weight `w_{A};i,j` for the ordered pair (i, j).
    pub fn w_dash(vertices: &[usize], i: usize, j: usize) -> Symbol {
        Symbol::new(&format!("w_{{{}}};{},{}", vertex_list(vertices), i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(name: &str) -> Polynomial {
        Polynomial::var(Symbol::new(name))
    }

    #[test]
    fn interning_yields_identical_symbols() {
        let a = Symbol::new("lambda");
        let b = Symbol::new("lambda");
        assert_eq!(a, b);
        assert!(std::ptr::eq(a.name(), b.name()));
    }

    #[test]
    fn difference_of_squares() {
        let lam = sym("lambda");
        let lhs = lam.add(&Polynomial::one()).mul(&lam.sub(&Polynomial::one()));
        let rhs = lam.mul(&lam).sub(&Polynomial::one());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mul_by_zero_annihilates() {
        let p = sym("t_0").add(&sym("w_{0,1}").scale_int(-3));
        assert!(p.mul(&Polynomial::zero()).is_zero());
    }

    #[test]
    fn binomial_square() {
        let t0 = sym("t_0");
        let t1 = sym("t_1");
        let s = t0.add(&t1);
        let sq = s.mul(&s);
        let expected = t0
            .mul(&t0)
            .add(&t0.mul(&t1).scale_int(2))
            .add(&t1.mul(&t1));
        assert_eq!(sq, expected);
    }

    #[test]
    fn substitute_at_zero() {
        let q = Symbol::new("q");
        let w = sym("w_{0,1}");
        let p = Polynomial::var(q).mul(&w);
        let mut bind = BTreeMap::new();
        bind.insert(q, Polynomial::zero());
        assert!(p.substitute(&bind).is_zero());
    }

    #[test]
    fn substitute_monomial() {
        let v = Symbol::new("v_{0,1}");
        let p = Polynomial::var(v).pow(2);
        let mut bind = BTreeMap::new();
        bind.insert(v, sym("q").mul(&sym("w_{0,1}")));
        let got = p.substitute(&bind);
        let expected = sym("q").pow(2).mul(&sym("w_{0,1}").pow(2));
        assert_eq!(got, expected);
    }

    #[test]
    fn substitute_round_trip_with_fresh_symbols() {
        let x = Symbol::new("fresh_x");
        let y = Symbol::new("fresh_y");
        let p = Polynomial::var(x)
            .pow(3)
            .add(&Polynomial::var(x).scale_int(2))
            .add(&Polynomial::from_int(7));
        let mut xy = BTreeMap::new();
        xy.insert(x, Polynomial::var(y));
        let mut yx = BTreeMap::new();
        yx.insert(y, Polynomial::var(x));
        assert_eq!(p.substitute(&xy).substitute(&yx), p);
    }

    #[test]
    fn fk_k2_substitution_route() {
        // Z for the 2-vertex 1-edge graph is q^2 + q v; substituting
        // v -> q w, dividing by q^2 and setting q = 0 leaves w, which is the
        // hyperforest polynomial 1 + w minus its constant term.
        let q = Symbol::new("q");
        let v = Symbol::new("v_{0,1}");
        let w = Symbol::new("w_{0,1}");
        let z = Polynomial::var(q).pow(2).add(&Polynomial::var(q).mul(&Polynomial::var(v)));
        let mut bind = BTreeMap::new();
        bind.insert(v, Polynomial::var(q).mul(&Polynomial::var(w)));
        let scaled = z.substitute(&bind);
        let cleared = scaled.div_exact(&Monomial::var_pow(q, 2)).unwrap();
        let f_g = cleared.eval_at_zero(q);
        assert_eq!(f_g, Polynomial::var(w).add(&Polynomial::one()));
    }

    #[test]
    fn div_exact_clears_lambda_factors() {
        let lam = Symbol::new("lambda");
        let w = sym("w_{0,1}");
        let p = Polynomial::var(lam).pow(2).mul(&w);
        let q = p.div_exact(&Monomial::var(lam)).unwrap();
        assert_eq!(q, Polynomial::var(lam).mul(&w));

        let p2 = Polynomial::var(lam).pow(3).add(&Polynomial::var(lam).pow(2));
        let q2 = p2.div_exact(&Monomial::var_pow(lam, 2)).unwrap();
        assert_eq!(q2, Polynomial::var(lam).add(&Polynomial::one()));
    }

    #[test]
    fn div_exact_reports_missing_factor() {
        let lam = Symbol::new("lambda");
        let p = Polynomial::var(lam).add(&Polynomial::one());
        assert!(matches!(
            p.div_exact(&Monomial::var(lam)),
            Err(RingError::NotDivisible { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_term_order() {
        let lam = Symbol::new("lambda");
        let w = Symbol::new("w_{0,1}");
        let p = Polynomial::term(
            Monomial::var_pow(lam, 2).mul(&Monomial::var(w)),
            BigRational::new(BigInt::from(-3), BigInt::from(2)),
        )
        .add(&Polynomial::from_int(5));
        let json = p.to_json();
        let terms = json["terms"].as_array().unwrap();
        // Constant term sorts first.
        assert_eq!(terms[0]["coef"], "5");
        assert_eq!(terms[1]["coef"], "-3/2");
        let back = Polynomial::from_json(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn no_zero_coefficients_survive() {
        let t = sym("t_0");
        let p = t.sub(&t);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        let q = t.add(&t.neg()).add(&Polynomial::one());
        assert_eq!(q.num_terms(), 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = Polynomial> {
            let vars = prop::sample::select(vec!["lambda", "t_0", "t_1", "w_{0,1}"]);
            prop::collection::vec((vars, 0u32..3, -4i64..5), 0..5).prop_map(|terms| {
                let mut acc = Polynomial::zero();
                for (name, exp, coef) in terms {
                    let mono = Monomial::var_pow(Symbol::new(name), exp);
                    acc = acc.add(&Polynomial::term(
                        mono,
                        BigRational::from_integer(coef.into()),
                    ));
                }
                acc
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mul_is_associative_and_commutative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                prop_assert_eq!(a.mul(&b), b.mul(&a));
            }

            #[test]
            fn mul_distributes_over_add(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            }

            #[test]
            fn no_operation_leaves_zero_coefficients(a in arb_poly(), b in arb_poly()) {
                for p in [a.add(&b), a.sub(&b), a.mul(&b)] {
                    prop_assert!(p.terms().all(|(_, c)| !c.is_zero()));
                }
            }
        }
    }
}
