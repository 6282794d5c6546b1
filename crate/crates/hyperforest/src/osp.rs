//! The orthosymplectic generators in the purely fermionic representation and
//! the invariance checks of the f-operators, the scalar products and the
//! integration measure.
//!
//! The odd generators are used in the rescaled form
//! `Qt_± = sum_i (1 - lam pb_i p_i) (d_i or dbar_i)`, which is polynomial in
//! lam; every algebra relation below is the corresponding cleared form, so a
//! square root of lam never enters the ring.

use crate::grassmann::{DerivKind, DerivTarget, GrassmannElement};
use crate::operators::{f_lambda, scalar_product, tau};
use crate::ring::{names, Polynomial};
use crate::rng::SplitMix64;
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OspOperator {
    X0,
    XPlus,
    XMinus,
    QTildePlus,
    QTildeMinus,
}

/// Linear action of a generator on an element of the algebra.
pub fn apply(op: OspOperator, lam: &Polynomial, a: &GrassmannElement) -> GrassmannElement {
    let n = a.vertex_count();
    let mut acc = GrassmannElement::zero(n);
    for i in 0..n {
        let term = match op {
            OspOperator::X0 => {
                let bar = GrassmannElement::psibar(i, n)
                    .mul(&a.deriv(DerivKind::PsiBar, DerivTarget::Vertex(i)));
                let plain = GrassmannElement::psi(i, n)
                    .mul(&a.deriv(DerivKind::Psi, DerivTarget::Vertex(i)));
                bar.sub(&plain)
            }
            OspOperator::XPlus => GrassmannElement::psibar(i, n)
                .mul(&a.deriv(DerivKind::Psi, DerivTarget::Vertex(i))),
            OspOperator::XMinus => GrassmannElement::psi(i, n)
                .mul(&a.deriv(DerivKind::PsiBar, DerivTarget::Vertex(i))),
            OspOperator::QTildePlus => sigma_factor(i, lam, n)
                .mul(&a.deriv(DerivKind::Psi, DerivTarget::Vertex(i))),
            OspOperator::QTildeMinus => sigma_factor(i, lam, n)
                .mul(&a.deriv(DerivKind::PsiBar, DerivTarget::Vertex(i))),
        };
        acc = acc.add(&term);
    }
    acc
}

/// `sigma_i = 1 - lam pb_i p_i`.
fn sigma_factor(i: usize, lam: &Polynomial, n: usize) -> GrassmannElement {
    GrassmannElement::one(n).sub(&tau(&[i], n).scale(lam))
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub relation: String,
    pub ok: bool,
}

type BasisCheck<'a> = Box<dyn Fn(&GrassmannElement) -> bool + 'a>;

fn all_basis_monomials(n: usize) -> Vec<GrassmannElement> {
    let mut out = Vec::with_capacity(1 << (2 * n));
    for key in 0u32..(1 << (2 * n)) {
        let mut e = GrassmannElement::one(n);
        for bit in 0..(2 * n) {
            if key & (1 << bit) != 0 {
                let v = bit / 2;
                let gen = if bit % 2 == 0 {
                    GrassmannElement::psibar(v, n)
                } else {
                    GrassmannElement::psi(v, n)
                };
                e = e.mul(&gen);
            }
        }
        out.push(e);
    }
    out
}

/// Verifies the commutation/anticommutation relations of the algebra as
/// operator identities on the full monomial basis, in cleared form:
/// `{Qt_±, Qt_±} = ±2 lam X_±`, `{Qt_+, Qt_-} = lam X_0` and so on.
pub fn check_osp_relations(n: usize, lam: &Polynomial) -> Vec<RelationReport> {
    let basis = all_basis_monomials(n);
    let x0 = |a: &GrassmannElement| apply(OspOperator::X0, lam, a);
    let xp = |a: &GrassmannElement| apply(OspOperator::XPlus, lam, a);
    let xm = |a: &GrassmannElement| apply(OspOperator::XMinus, lam, a);
    let qp = |a: &GrassmannElement| apply(OspOperator::QTildePlus, lam, a);
    let qm = |a: &GrassmannElement| apply(OspOperator::QTildeMinus, lam, a);

    let commutator = |f: &dyn Fn(&GrassmannElement) -> GrassmannElement,
                      g: &dyn Fn(&GrassmannElement) -> GrassmannElement,
                      m: &GrassmannElement| f(&g(m)).sub(&g(&f(m)));
    let anticommutator = |f: &dyn Fn(&GrassmannElement) -> GrassmannElement,
                          g: &dyn Fn(&GrassmannElement) -> GrassmannElement,
                          m: &GrassmannElement| f(&g(m)).add(&g(&f(m)));

    let mut checks: Vec<(String, BasisCheck<'_>)> = Vec::new();
    checks.push((
        "[X0, X+] = 2 X+".into(),
        Box::new(move |m| commutator(&x0, &xp, m) == xp(m).scale_ratio(&BigRational::from_integer(2.into()))),
    ));
    checks.push((
        "[X0, X-] = -2 X-".into(),
        Box::new(move |m| commutator(&x0, &xm, m) == xm(m).scale_ratio(&BigRational::from_integer((-2).into()))),
    ));
    checks.push((
        "[X+, X-] = X0".into(),
        Box::new(move |m| commutator(&xp, &xm, m) == x0(m)),
    ));
    {
        let lam = lam.clone();
        checks.push((
            "{Qt+, Qt+} = 2 lam X+".into(),
            Box::new(move |m| anticommutator(&qp, &qp, m) == xp(m).scale(&lam.scale_int(2))),
        ));
    }
    {
        let lam = lam.clone();
        checks.push((
            "{Qt-, Qt-} = -2 lam X-".into(),
            Box::new(move |m| anticommutator(&qm, &qm, m) == xm(m).scale(&lam.scale_int(-2))),
        ));
    }
    {
        let lam = lam.clone();
        checks.push((
            "{Qt+, Qt-} = lam X0".into(),
            Box::new(move |m| anticommutator(&qp, &qm, m) == x0(m).scale(&lam)),
        ));
    }
    checks.push((
        "[X0, Qt+] = Qt+".into(),
        Box::new(move |m| commutator(&x0, &qp, m) == qp(m)),
    ));
    checks.push((
        "[X0, Qt-] = -Qt-".into(),
        Box::new(move |m| commutator(&x0, &qm, m) == qm(m).neg()),
    ));
    checks.push((
        "[X+, Qt+] = 0".into(),
        Box::new(move |m| commutator(&xp, &qp, m).is_zero()),
    ));
    checks.push((
        "[X-, Qt-] = 0".into(),
        Box::new(move |m| commutator(&xm, &qm, m).is_zero()),
    ));
    checks.push((
        "[X+, Qt-] = -Qt+".into(),
        Box::new(move |m| commutator(&xp, &qm, m) == qp(m).neg()),
    ));
    checks.push((
        "[X-, Qt+] = -Qt-".into(),
        Box::new(move |m| commutator(&xm, &qp, m) == qm(m).neg()),
    ));

    checks
        .into_iter()
        .map(|(relation, check)| RelationReport {
            ok: basis.iter().all(&check),
            relation,
        })
        .collect()
}

/// Invariance sweep: the f-operators, their disjoint products and the scalar
/// products are annihilated by the whole algebra; the measure kills exact
/// variations at the supersymmetric point; tau is rebuilt into f by the odd
/// generators.
pub fn check_invariance(n: usize, lam: &Polynomial, rng: &mut SplitMix64, trials: usize) -> Vec<RelationReport> {
    let mut reports = Vec::new();

    let subsets = |n: usize| (0u32..(1 << n)).map(move |m| (0..n).filter(|&v| m & (1 << v) != 0).collect::<Vec<_>>());

    let mut f_killed = true;
    let mut rebuilt = true;
    for a in subsets(n) {
        let f = f_lambda(&a, lam, n);
        for op in [OspOperator::QTildePlus, OspOperator::QTildeMinus, OspOperator::X0, OspOperator::XPlus, OspOperator::XMinus] {
            if !apply(op, lam, &f).is_zero() {
                f_killed = false;
            }
        }
        let t = tau(&a, n);
        let built = t.scale(lam).add(&apply(
            OspOperator::QTildePlus,
            lam,
            &apply(OspOperator::QTildeMinus, lam, &t),
        ));
        if built != f {
            rebuilt = false;
        }
    }
    reports.push(RelationReport { relation: "Qt and X annihilate every f_A".into(), ok: f_killed });
    reports.push(RelationReport { relation: "f_A = lam tau_A + Qt+ Qt- tau_A".into(), ok: rebuilt });

    let mut scalars_killed = true;
    for i in 0..n {
        for j in 0..n {
            let s = scalar_product(i, j, lam, n);
            if !apply(OspOperator::QTildePlus, lam, &s).is_zero()
                || !apply(OspOperator::QTildeMinus, lam, &s).is_zero()
            {
                scalars_killed = false;
            }
        }
    }
    reports.push(RelationReport { relation: "Qt annihilates every n_i.n_j".into(), ok: scalars_killed });

    // products over random disjoint blocks
    let mut products_killed = true;
    for _ in 0..trials {
        let blocks = random_disjoint_blocks(rng, n);
        let mut prod = GrassmannElement::one(n);
        for b in &blocks {
            prod = prod.mul(&f_lambda(b, lam, n));
        }
        if !apply(OspOperator::QTildePlus, lam, &prod).is_zero()
            || !apply(OspOperator::QTildeMinus, lam, &prod).is_zero()
        {
            products_killed = false;
        }
    }
    reports.push(RelationReport {
        relation: "Qt annihilates products of f over disjoint blocks".into(),
        ok: products_killed,
    });

    // measure invariance at t = lam, for arbitrary (odd and even) elements
    let t_lam = vec![lam.clone(); n];
    let mut measure_ok = true;
    for _ in 0..trials {
        let f = random_element(rng, n);
        for op in [OspOperator::QTildePlus, OspOperator::QTildeMinus] {
            if !apply(op, lam, &f).integrate_all(&t_lam).is_zero() {
                measure_ok = false;
            }
        }
    }
    reports.push(RelationReport {
        relation: "measure kills Qt variations at t = lam".into(),
        ok: measure_ok,
    });

    reports
}

/// The measure is not invariant away from `t = lam`: integrating the
/// variation of `psi_0` against a measure with an independent `t_0` leaves
/// `(t_0 - lam) prod_(i>0) t_i`. Returns the witness and whether it is
/// nonzero as required.
pub fn noninvariance_witness(n: usize, lam: &Polynomial) -> (serde_json::Value, bool) {
    assert!(n >= 1);
    let mut t: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(names::t(i))).collect();
    for ti in t.iter_mut().skip(1) {
        *ti = lam.clone();
    }
    let varied = apply(OspOperator::QTildePlus, lam, &GrassmannElement::psi(0, n));
    let integral = varied.integrate_all(&t);
    let expected = Polynomial::var(names::t(0)).sub(lam).mul(&lam.pow(n as u32 - 1));
    let witness = serde_json::json!({
        "element": "p0",
        "operator": "Qt+",
        "t": "t_0 free, t_i = lambda elsewhere",
        "integral": integral.to_json(),
    });
    (witness, !integral.is_zero() && integral == expected)
}

fn random_disjoint_blocks(rng: &mut SplitMix64, n: usize) -> Vec<Vec<usize>> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();
    while pool.len() >= 2 {
        if rng.below(3) == 0 {
            break;
        }
        let size = rng.range(2, pool.len().min(4));
        let mut block = Vec::with_capacity(size);
        for _ in 0..size {
            let pos = rng.below(pool.len() as u64) as usize;
            block.push(pool.remove(pos));
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

fn random_element(rng: &mut SplitMix64, n: usize) -> GrassmannElement {
    let mut e = GrassmannElement::zero(n);
    let terms = rng.range(1, 6);
    let basis = 1u64 << (2 * n);
    for _ in 0..terms {
        let key = rng.below(basis) as u32;
        let coef = rng.range(1, 9) as i64 - 4;
        let mut mono = GrassmannElement::one(n);
        for bit in 0..(2 * n) {
            if key & (1 << bit) != 0 {
                let v = bit / 2;
                let gen = if bit % 2 == 0 {
                    GrassmannElement::psibar(v, n)
                } else {
                    GrassmannElement::psi(v, n)
                };
                mono = mono.mul(&gen);
            }
        }
        e = e.add(&mono.scale(&Polynomial::from_int(coef)));
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam() -> Polynomial {
        Polynomial::var(names::lambda())
    }

    #[test]
    fn x_plus_kills_tau() {
        let n = 3;
        for mask in 0u32..(1 << n) {
            let a: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            assert!(apply(OspOperator::XPlus, &lam(), &tau(&a, n)).is_zero());
        }
    }

    #[test]
    fn q_minus_on_tau_is_bare_derivative() {
        let n = 3;
        let a = vec![0, 2];
        let t = tau(&a, n);
        let got = apply(OspOperator::QTildeMinus, &lam(), &t);
        let expected = t.deriv(DerivKind::PsiBar, DerivTarget::Sum);
        assert_eq!(got, expected);
    }

    #[test]
    fn x0_grades_generators() {
        let n = 1;
        let pb = GrassmannElement::psibar(0, n);
        let p = GrassmannElement::psi(0, n);
        assert_eq!(apply(OspOperator::X0, &lam(), &pb), pb);
        assert_eq!(apply(OspOperator::X0, &lam(), &p), p.neg());
    }

    #[test]
    fn x_plus_x_minus_on_psi() {
        let n = 1;
        let p = GrassmannElement::psi(0, n);
        let x0 = apply(OspOperator::XPlus, &lam(), &apply(OspOperator::XMinus, &lam(), &p)).sub(
            &apply(OspOperator::XMinus, &lam(), &apply(OspOperator::XPlus, &lam(), &p)),
        );
        assert_eq!(x0, p.neg());
    }

    #[test]
    fn relations_hold_on_small_bases() {
        for n in 1..=3usize {
            for report in check_osp_relations(n, &lam()) {
                assert!(report.ok, "n = {}: {}", n, report.relation);
            }
        }
    }

    #[test]
    fn anticommutator_example_on_two_psibars() {
        let n = 2;
        let m = GrassmannElement::psibar(0, n).mul(&GrassmannElement::psibar(1, n));
        let qp = |a: &GrassmannElement| apply(OspOperator::QTildePlus, &lam(), a);
        let lhs = qp(&qp(&m)).scale_ratio(&BigRational::from_integer(2.into()));
        let rhs = apply(OspOperator::XPlus, &lam(), &m).scale(&lam().scale_int(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn invariance_sweep_passes() {
        let mut rng = SplitMix64::new(11);
        for report in check_invariance(4, &lam(), &mut rng, 25) {
            assert!(report.ok, "{}", report.relation);
        }
    }

    #[test]
    fn q_plus_kills_f_pair_explicitly() {
        let n = 2;
        let f = f_lambda(&[0, 1], &lam(), n);
        assert!(apply(OspOperator::QTildePlus, &lam(), &f).is_zero());
    }

    #[test]
    fn witness_shows_noninvariance_away_from_lambda() {
        let (_, ok) = noninvariance_witness(3, &lam());
        assert!(ok);
    }
}
