//! The q-state Potts model on a hypergraph: brute-force spin sums, the
//! random-cluster polynomial, and the q -> 0 limit extractions.
//!
//! Limits are never taken numerically. Scaling substitutions are made with a
//! fresh symbol, the guaranteed power is divided out exactly (a failure there
//! would contradict the excess inequality, so it aborts loudly), and the
//! surviving coefficient is extracted.

use crate::hypergraph::{EdgeMask, Hypergraph};
use crate::ring::{names, Monomial, Polynomial};
use std::collections::BTreeMap;
use std::fmt;

/// Brute-force caps: number of colorings and vertex count.
pub const MAX_COLORINGS: u64 = 10_000_000;
pub const MAX_BRUTE_VERTICES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PottsError {
    CapExceeded { detail: String },
}

impl fmt::Display for PottsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PottsError::CapExceeded { detail } => write!(f, "cap exceeded: {}", detail),
        }
    }
}

impl std::error::Error for PottsError {}

/// Partition function by summing over all q^n colorings:
/// `sum_sigma prod_A (1 + v_A delta_A(sigma))`.
pub fn potts_bruteforce(g: &Hypergraph, q: u64, v: &[Polynomial]) -> Result<Polynomial, PottsError> {
    let n = g.vertex_count();
    if q == 0 {
        return Err(PottsError::CapExceeded { detail: "q must be >= 1".into() });
    }
    if n > MAX_BRUTE_VERTICES {
        return Err(PottsError::CapExceeded {
            detail: format!("{} vertices exceeds brute-force cap {}", n, MAX_BRUTE_VERTICES),
        });
    }
    let colorings = (q as f64).powi(n as i32);
    if colorings > MAX_COLORINGS as f64 {
        return Err(PottsError::CapExceeded {
            detail: format!("q^n = {} exceeds {}", colorings, MAX_COLORINGS),
        });
    }
    let mut total = Polynomial::zero();
    let mut coloring = vec![0u64; n];
    loop {
        let mut term = Polynomial::one();
        for (idx, edge) in g.edges().iter().enumerate() {
            let mono = edge.iter().all(|&i| coloring[i] == coloring[edge[0]]);
            if mono {
                term = term.mul(&Polynomial::one().add(&v[idx]));
            }
        }
        total = total.add(&term);
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(total);
            }
            coloring[pos] += 1;
            if coloring[pos] < q {
                break;
            }
            coloring[pos] = 0;
            pos += 1;
        }
    }
}

/// The random-cluster form `sum_{E' <= E} q^k(E') prod v_A`, a polynomial in
/// `q` and the edge weights; this is the definition of the partition function
/// for noninteger q.
pub fn fk_polynomial(g: &Hypergraph, q: &Polynomial, v: &[Polynomial]) -> Result<Polynomial, PottsError> {
    let m = g.edge_count();
    if m > crate::hypergraph::DEFAULT_EDGE_CAP {
        return Err(PottsError::CapExceeded {
            detail: format!("{} edges exceeds subset cap", m),
        });
    }
    let mut total = Polynomial::zero();
    for mask in 0..(1u64 << m) {
        let mask = mask as EdgeMask;
        let k = g.component_count(mask) as u32;
        let mut term = q.pow(k);
        for idx in 0..m {
            if mask & (1 << idx) != 0 {
                term = term.mul(&v[idx]);
            }
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// The three q -> 0 companions of the random-cluster polynomial.
pub struct QLimits {
    /// Maximally connected spanning subhypergraphs, weighted by `v`.
    pub connected: Polynomial,
    /// Spanning hyperforests, weighted by `w`.
    pub forests: Polynomial,
    /// Spanning hypertrees, weighted by `w`.
    pub trees: Polynomial,
}

pub fn q_limits(g: &Hypergraph, v: &[Polynomial], w: &[Polynomial]) -> Result<QLimits, PottsError> {
    let m = g.edge_count();
    if m > crate::hypergraph::DEFAULT_EDGE_CAP {
        return Err(PottsError::CapExceeded {
            detail: format!("{} edges exceeds subset cap", m),
        });
    }
    let k_min = g.component_count(((1u64 << m) - 1) as EdgeMask);
    let mut connected = Polynomial::zero();
    let mut forests = Polynomial::zero();
    let mut trees = Polynomial::zero();
    for mask in 0..(1u64 << m) {
        let mask = mask as EdgeMask;
        let record = g.classify(mask);
        let indices = record.edge_indices();
        if record.component_count() == k_min {
            let mut term = Polynomial::one();
            for &idx in &indices {
                term = term.mul(&v[idx]);
            }
            connected = connected.add(&term);
        }
        if record.class == crate::hypergraph::SubgraphClass::Hyperforest {
            let mut term = Polynomial::one();
            for &idx in &indices {
                term = term.mul(&w[idx]);
            }
            forests = forests.add(&term.clone());
            if record.component_count() == 1 {
                trees = trees.add(&term);
            }
        }
    }
    Ok(QLimits { connected, forests, trees })
}

/// The forest limit as a substitution: substitute `v_A -> q^(|A|-1) w_A` in
/// `Z(q, v)`, divide by `q^|V|` exactly, and read off the q-free part. Equals
/// the direct hyperforest enumeration.
pub fn forest_polynomial_via_limit(
    g: &Hypergraph,
    w: &[Polynomial],
) -> Result<Polynomial, PottsError> {
    let q = names::q();
    let v: Vec<Polynomial> = g.edges().iter().map(|e| Polynomial::var(names::v(e))).collect();
    let z = fk_polynomial(g, &Polynomial::var(q), &v)?;
    let mut bind: BTreeMap<crate::ring::Symbol, Polynomial> = BTreeMap::new();
    for (idx, e) in g.edges().iter().enumerate() {
        let power = Polynomial::var(q).pow(e.len() as u32 - 1);
        bind.insert(names::v(e), power.mul(&w[idx]));
    }
    let scaled = z.substitute(&bind);
    let cleared = scaled
        .div_exact(&Monomial::var_pow(q, g.vertex_count() as u32))
        .unwrap_or_else(|e|

            panic!("excess inequality violated while clearing q^|V|: {}", e)
        );
    Ok(cleared.eval_at_zero(q))
}

/// The hypertree limit out of the connected polynomial: rebuild `C_G` with
/// every weight scaled by `mu^(|A|-1)` and extract the coefficient of
/// `mu^(|V|-1)`. Meaningful only for connected hypergraphs, where the excess
/// inequality makes that the lowest power; for disconnected input the scaling
/// limit does not exist and the extracted coefficient is not `T_G`.
pub fn tree_polynomial_from_connected(g: &Hypergraph, v: &[Polynomial]) -> Result<Polynomial, PottsError> {
    let mu = crate::ring::Symbol::new("mu_scaling");
    let scaled_v = scale_weights(g, v, mu);
    let limits = q_limits(g, &scaled_v, &scaled_v)?;
    Ok(limits.connected.coefficient_of_power(mu, g.vertex_count() as u32 - 1))
}

/// The hypertree limit out of the forest polynomial: same scaling, now the
/// top coefficient `mu^(|V|-1)` of `F_G`.
pub fn tree_polynomial_from_forests(g: &Hypergraph, w: &[Polynomial]) -> Result<Polynomial, PottsError> {
    let mu = crate::ring::Symbol::new("mu_scaling");
    let scaled_w = scale_weights(g, w, mu);
    let limits = q_limits(g, &scaled_w, &scaled_w)?;
    Ok(limits.forests.coefficient_of_power(mu, g.vertex_count() as u32 - 1))
}

fn scale_weights(g: &Hypergraph, weights: &[Polynomial], mu: crate::ring::Symbol) -> Vec<Polynomial> {
    g.edges()
        .iter()
        .zip(weights)
        .map(|(e, w)| Polynomial::var(mu).pow(e.len() as u32 - 1).mul(w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Symbol;

    fn q_poly() -> Polynomial {
        Polynomial::var(names::q())
    }

    #[test]
    fn k2_bruteforce_two_states() {
        let k2 = Hypergraph::complete_graph(2);
        let v = vec![Polynomial::var(Symbol::new("v"))];
        let z = potts_bruteforce(&k2, 2, &v).unwrap();
        let expected = Polynomial::from_int(4).add(&v[0].scale_int(2));
        assert_eq!(z, expected);
    }

    #[test]
    fn k3_two_states_unit_weights_is_28() {
        let k3 = Hypergraph::complete_graph(3);
        let v = vec![Polynomial::one(); 3];
        assert_eq!(potts_bruteforce(&k3, 2, &v).unwrap(), Polynomial::from_int(28));
    }

    #[test]
    fn edgeless_counts_colorings() {
        let g = Hypergraph::new(2, vec![]).unwrap();
        assert_eq!(potts_bruteforce(&g, 3, &[]).unwrap(), Polynomial::from_int(9));
    }

    #[test]
    fn fk_k2() {
        let k2 = Hypergraph::complete_graph(2);
        let v = vec![Polynomial::var(Symbol::new("v"))];
        let z = fk_polynomial(&k2, &q_poly(), &v).unwrap();
        let expected = q_poly().pow(2).add(&q_poly().mul(&v[0]));
        assert_eq!(z, expected);
    }

    #[test]
    fn fk_single_hyperedge() {
        let g = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let v = vec![Polynomial::var(Symbol::new("v"))];
        let z = fk_polynomial(&g, &q_poly(), &v).unwrap();
        let expected = q_poly().pow(3).add(&q_poly().mul(&v[0]));
        assert_eq!(z, expected);
    }

    #[test]
    fn fk_matches_bruteforce_on_k3() {
        let k3 = Hypergraph::complete_graph(3);
        let v = vec![Polynomial::one(); 3];
        let fk = fk_polynomial(&k3, &Polynomial::from_int(2), &v).unwrap();
        assert_eq!(fk, Polynomial::from_int(28));
    }

    #[test]
    fn q_limit_values_on_k3() {
        let k3 = Hypergraph::complete_graph(3);
        let unit = vec![Polynomial::one(); 3];
        let limits = q_limits(&k3, &unit, &unit).unwrap();
        assert_eq!(limits.forests, Polynomial::from_int(7));
        assert_eq!(limits.trees, Polynomial::from_int(3));
        assert_eq!(limits.connected, Polynomial::from_int(4));
    }

    #[test]
    fn hypertree_divisibility_obstruction() {
        // a 3-hyperedge on 4 vertices: k-1 = 2 does not divide n-1 = 3
        let g = Hypergraph::new(4, vec![vec![0, 1, 2]]).unwrap();
        let v = vec![Polynomial::one()];
        let limits = q_limits(&g, &v, &v).unwrap();
        assert!(limits.trees.is_zero());
    }

    #[test]
    fn edgeless_limits() {
        let g = Hypergraph::new(3, vec![]).unwrap();
        let limits = q_limits(&g, &[], &[]).unwrap();
        assert_eq!(limits.forests, Polynomial::one());
        assert!(limits.trees.is_zero());
        assert_eq!(limits.connected, Polynomial::one());
    }

    #[test]
    fn forest_limit_by_substitution_matches_enumeration() {
        let g = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3], vec![0, 2]]).unwrap();
        let w = g.weight_polys();
        let via_limit = forest_polynomial_via_limit(&g, &w).unwrap();
        let direct = q_limits(&g, &w, &w).unwrap().forests;
        assert_eq!(via_limit, direct);
    }

    #[test]
    fn unrooted_forest_sum_carries_the_power_normalization() {
        // sum_F prod (lam^(|A|-1) w_A) lam^k(F) = lam^|V| F_G(w): the
        // power-normalized form of the unrooted forest sum
        let g = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3], vec![0, 3]]).unwrap();
        let lam = Polynomial::var(crate::ring::names::lambda());
        let w = g.weight_polys();
        let scaled: Vec<Polynomial> = g
            .edges()
            .iter()
            .zip(&w)
            .map(|(e, wa)| lam.pow(e.len() as u32 - 1).mul(wa))
            .collect();
        let lhs = g
            .forest_weight_sum(&scaled, &vec![lam.clone(); 4], &vec![lam.clone(); 3])
            .unwrap();
        let f_g = q_limits(&g, &w, &w).unwrap().forests;
        assert_eq!(lhs, lam.pow(4).mul(&f_g));
    }

    #[test]
    fn tree_limits_agree_both_ways() {
        let g = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 4], vec![1, 3]]).unwrap();
        let w = g.weight_polys();
        let direct = q_limits(&g, &w, &w).unwrap().trees;
        assert_eq!(tree_polynomial_from_connected(&g, &w).unwrap(), direct);
        assert_eq!(tree_polynomial_from_forests(&g, &w).unwrap(), direct);
    }
}
