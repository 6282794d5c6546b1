//! The tau / f-operator layer: the even elements whose products encode
//! hyperforest structure, the supersphere scalar products built from them,
//! and the Gram-determinant identity.
//!
//! `f_A` is linear in its lambda parameter, so weighted averages with an
//! integer denominator stay inside the rational-coefficient ring; no
//! identity here ever needs division by a polynomial.

use crate::grassmann::{DerivKind, DerivTarget, GrassmannElement};
use crate::matrixtree;
use crate::ring::Polynomial;
use num_rational::BigRational;

/// `tau_A = prod_{i in A} psibar_i psi_i`; `tau_∅ = 1`.
pub fn tau(a: &[usize], n: usize) -> GrassmannElement {
    let mut e = GrassmannElement::one(n);
    for &i in a {
        e = e
            .mul(&GrassmannElement::psibar(i, n))
            .mul(&GrassmannElement::psi(i, n));
    }
    e
}

/// The even element
/// `lam (1-|A|) tau_A + sum_i tau_{A\i} - sum_{i!=j} psibar_i psi_j tau_{A\{i,j}}`.
pub fn f_lambda(a: &[usize], lam: &Polynomial, n: usize) -> GrassmannElement {
    let k = a.len() as i64;
    let mut e = tau(a, n).scale(&lam.scale_int(1 - k));
    for (pos, _) in a.iter().enumerate() {
        let rest: Vec<usize> = a
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != pos)
            .map(|(_, &v)| v)
            .collect();
        e = e.add(&tau(&rest, n));
    }
    for (pi, &i) in a.iter().enumerate() {
        for (pj, &j) in a.iter().enumerate() {
            if pi == pj {
                continue;
            }
            let rest: Vec<usize> = a
                .iter()
                .enumerate()
                .filter(|(q, _)| *q != pi && *q != pj)
                .map(|(_, &v)| v)
                .collect();
            let term = GrassmannElement::psibar(i, n)
                .mul(&GrassmannElement::psi(j, n))
                .mul(&tau(&rest, n));
            e = e.sub(&term);
        }
    }
    e
}

/// The derivative form `(lam (1-|A|) + d dbar) tau_A`; must agree with
/// [`f_lambda`] and is kept as an independent construction for tests.
pub fn f_lambda_deriv(a: &[usize], lam: &Polynomial, n: usize) -> GrassmannElement {
    let k = a.len() as i64;
    let t = tau(a, n);
    let ddbar = t
        .deriv(DerivKind::PsiBar, DerivTarget::Sum)
        .deriv(DerivKind::Psi, DerivTarget::Sum);
    t.scale(&lam.scale_int(1 - k)).add(&ddbar)
}

/// Weighted average of two lambda parameters joined along a one-vertex
/// overlap: `((|A|-1) lam + (|B|-1) lam') / (|A u B| - 1)`. The denominator
/// is an integer, so the result is an ordinary polynomial.
pub fn lambda_pair_average(
    a_len: usize,
    b_len: usize,
    union_len: usize,
    lam_a: &Polynomial,
    lam_b: &Polynomial,
) -> Polynomial {
    let num = lam_a
        .scale_int(a_len as i64 - 1)
        .add(&lam_b.scale_int(b_len as i64 - 1));
    num.scale(&BigRational::new(1.into(), (union_len as i64 - 1).into()))
}

/// Weighted average over a hyperedge family: `sum (|A|-1) lam_A / sum (|A|-1)`.
pub fn lambda_star(edges: &[Vec<usize>], lams: &[Polynomial]) -> Polynomial {
    let mut num = Polynomial::zero();
    let mut den: i64 = 0;
    for (e, lam) in edges.iter().zip(lams) {
        num = num.add(&lam.scale_int(e.len() as i64 - 1));
        den += e.len() as i64 - 1;
    }
    assert!(den > 0, "lambda_star needs at least one real hyperedge");
    num.scale(&BigRational::new(1.into(), den.into()))
}

/// Supersphere scalar product `n_i . n_j` in the purely fermionic form:
/// `1 - lam (pb_i - pb_j)(p_i - p_j) + lam^2 pb_i p_i pb_j p_j` for `i != j`,
/// and exactly 1 for `i = j`.
pub fn scalar_product(i: usize, j: usize, lam: &Polynomial, n: usize) -> GrassmannElement {
    if i == j {
        return GrassmannElement::one(n);
    }
    let diff_bar = GrassmannElement::psibar(i, n).sub(&GrassmannElement::psibar(j, n));
    let diff = GrassmannElement::psi(i, n).sub(&GrassmannElement::psi(j, n));
    GrassmannElement::one(n)
        .sub(&diff_bar.mul(&diff).scale(lam))
        .add(&tau(&[i, j], n).scale(&lam.mul(lam)))
}

/// The quartic relation, identically zero in the algebra:
/// `lam f_{abcd} - f_{bcd} - f_{acd} - f_{abd} - f_{abc}
/// + f_{ab} f_{cd} + f_{ac} f_{bd} + f_{ad} f_{bc}`.
pub fn r_abcd(a: usize, b: usize, c: usize, d: usize, lam: &Polynomial, n: usize) -> GrassmannElement {
    let f = |set: &[usize]| f_lambda(set, lam, n);
    f(&[a, b, c, d])
        .scale(lam)
        .sub(&f(&[b, c, d]))
        .sub(&f(&[a, c, d]))
        .sub(&f(&[a, b, d]))
        .sub(&f(&[a, b, c]))
        .add(&f(&[a, b]).mul(&f(&[c, d])))
        .add(&f(&[a, c]).mul(&f(&[b, d])))
        .add(&f(&[a, d]).mul(&f(&[b, c])))
}

/// Gram matrix of scalar products over the vertex list `a`.
pub fn gram_matrix(a: &[usize], lam: &Polynomial, n: usize) -> Vec<Vec<GrassmannElement>> {
    a.iter()
        .map(|&i| a.iter().map(|&j| scalar_product(i, j, lam, n)).collect())
        .collect()
}

/// Checks `det M = k! lam^(k-1) f_A` with `M` the Gram matrix of `A`,
/// the determinant expanded by the Leibniz sum inside the algebra.
pub fn gram_det_check(a: &[usize], lam: &Polynomial, n: usize) -> bool {
    let k = a.len();
    assert!(k >= 1);
    let m = gram_matrix(a, lam, n);
    let det = matrixtree::det_grassmann(&m).expect("Gram entries are even");
    let mut factorial: i64 = 1;
    for i in 2..=k as i64 {
        factorial *= i;
    }
    let rhs = f_lambda(a, lam, n)
        .scale(&lam.pow(k as u32 - 1))
        .scale(&Polynomial::from_int(factorial));
    det == rhs
}
