//! Left-hand sides: the partition function and unnormalized correlators by
//! direct Grassmann expansion and Berezin integration, plus the harness that
//! equates them with the purely combinatorial sums from the hypergraph
//! module.
//!
//! The two routes share nothing but the coefficient ring: the left side
//! multiplies operator factors inside the algebra and integrates; the right
//! side enumerates edge subsets. An identity report carries both polynomials
//! so a failure is replayable.

use crate::grassmann::{GrassmannElement, MAX_VERTICES};
use crate::hypergraph::{EdgeMask, Hypergraph, HypergraphError};
use crate::operators::f_lambda;
use crate::ring::{names, Polynomial};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegralsError {
    CapExceeded { detail: String },
    LengthMismatch { left: usize, right: usize },
    DuplicateVertices,
    UnknownIdentity { name: String },
    BadInstance { detail: String },
}

impl fmt::Display for IntegralsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralsError::CapExceeded { detail } => write!(f, "cap exceeded: {}", detail),
            IntegralsError::LengthMismatch { left, right } => {
                write!(f, "I and J have different lengths {} and {}", left, right)
            }
            IntegralsError::DuplicateVertices => {
                f.write_str("vertex sequence contains a repeated vertex")
            }
            IntegralsError::UnknownIdentity { name } => write!(f, "unknown identity {:?}", name),
            IntegralsError::BadInstance { detail } => write!(f, "bad instance: {}", detail),
        }
    }
}

impl std::error::Error for IntegralsError {}

impl From<HypergraphError> for IntegralsError {
    fn from(e: HypergraphError) -> IntegralsError {
        match e {
            HypergraphError::LengthMismatch { left, right } => {
                IntegralsError::LengthMismatch { left, right }
            }
            HypergraphError::DuplicateVertices => IntegralsError::DuplicateVertices,
            HypergraphError::CapExceeded { edges, cap } => IntegralsError::CapExceeded {
                detail: format!("{} edges exceeds cap {}", edges, cap),
            },
            other => IntegralsError::BadInstance { detail: other.to_string() },
        }
    }
}

/// Everything the partition function depends on: per-vertex mass terms,
/// per-edge weights and per-edge lambda parameters.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    pub g: Hypergraph,
    pub t: Vec<Polynomial>,
    pub w: Vec<Polynomial>,
    pub lam: Vec<Polynomial>,
}

impl ActionSpec {
    /// Fully symbolic: `t_i`, `w_A` and a separate `lam_A` per hyperedge.
    pub fn symbolic(g: Hypergraph) -> ActionSpec {
        let t = (0..g.vertex_count()).map(|i| Polynomial::var(names::t(i))).collect();
        let w = g.weight_polys();
        let lam = g.edges().iter().map(|e| Polynomial::var(names::lam_edge(e))).collect();
        ActionSpec { g, t, w, lam }
    }

    /// The supersymmetric point: all `t_i` and all `lam_A` equal the global
    /// lambda; weights symbolic.
    pub fn unrooted(g: Hypergraph) -> ActionSpec {
        let lam = Polynomial::var(names::lambda());
        let t = vec![lam.clone(); g.vertex_count()];
        let w = g.weight_polys();
        let lams = vec![lam; g.edge_count()];
        ActionSpec { g, t, w, lam: lams }
    }

    /// The rooted point: `lam_A = 0`, symbolic `t_i`.
    pub fn rooted(g: Hypergraph) -> ActionSpec {
        let t = (0..g.vertex_count()).map(|i| Polynomial::var(names::t(i))).collect();
        let w = g.weight_polys();
        let lam = vec![Polynomial::zero(); g.edge_count()];
        ActionSpec { g, t, w, lam }
    }

    fn check_caps(&self) -> Result<(), IntegralsError> {
        if self.g.vertex_count() > MAX_VERTICES {
            return Err(IntegralsError::CapExceeded {
                detail: format!("{} vertices exceeds the Grassmann cap {}", self.g.vertex_count(), MAX_VERTICES),
            });
        }
        Ok(())
    }

    /// `prod_A (1 + w_A f_A^(lam_A))`, the expanded Boltzmann factor.
    fn boltzmann(&self) -> GrassmannElement {
        let n = self.g.vertex_count();
        let factors: Vec<GrassmannElement> = self
            .g
            .edges()
            .iter()
            .enumerate()
            .map(|(idx, e)| f_lambda(e, &self.lam[idx], n).scale(&self.w[idx]))
            .collect();
        GrassmannElement::product_one_plus(n, &factors)
    }
}

/// `int D_(V,t) exp(sum w_A f_A)` as a scalar polynomial.
pub fn z_partition(spec: &ActionSpec) -> Result<Polynomial, IntegralsError> {
    spec.check_caps()?;
    Ok(spec.boltzmann().integrate_all(&spec.t))
}

/// The operator `psibar_(i1) psi_(j1) ... psibar_(ik) psi_(jk)` in exactly
/// that order.
pub fn correlator_operator(
    n: usize,
    i_seq: &[usize],
    j_seq: &[usize],
) -> Result<GrassmannElement, IntegralsError> {
    if i_seq.len() != j_seq.len() {
        return Err(IntegralsError::LengthMismatch { left: i_seq.len(), right: j_seq.len() });
    }
    for seq in [i_seq, j_seq] {
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seq.len() {
            return Err(IntegralsError::DuplicateVertices);
        }
    }
    let mut o = GrassmannElement::one(n);
    for (r, &i) in i_seq.iter().enumerate() {
        o = o
            .mul(&GrassmannElement::psibar(i, n))
            .mul(&GrassmannElement::psi(j_seq[r], n));
    }
    Ok(o)
}

/// `int D_(V,t) O_(I,J) exp(sum w_A f_A)`, unnormalized.
pub fn corr_unnormalized(
    spec: &ActionSpec,
    i_seq: &[usize],
    j_seq: &[usize],
) -> Result<Polynomial, IntegralsError> {
    spec.check_caps()?;
    let n = spec.g.vertex_count();
    let o = correlator_operator(n, i_seq, j_seq)?;
    Ok(o.mul(&spec.boltzmann()).integrate_all(&spec.t))
}

/// Outcome of one identity check: both sides, exact equality, and the
/// serialized instance sufficient to replay it.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub identity: String,
    pub instance: serde_json::Value,
    pub equal: bool,
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    pub millis: u128,
}

impl IdentityReport {
    /// Canonical JSON form. Timing is deliberately excluded so equal seeds
    /// produce byte-identical output; use [`Self::to_json_with_timing`] for
    /// human consumption.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identity": self.identity,
            "instance": self.instance,
            "equal": self.equal,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
        })
    }

    pub fn to_json_with_timing(&self) -> serde_json::Value {
        let mut v = self.to_json();
        v["millis"] = serde_json::Value::from(self.millis as u64);
        v
    }
}

/// One named instance for [`verify_identity`]: the hypergraph plus whatever
/// vertex data the identity consumes (correlator sequences, constraint
/// blocks).
#[derive(Clone, Debug, Default)]
pub struct IdentityInstance {
    pub g: Option<Hypergraph>,
    pub i_seq: Vec<usize>,
    pub j_seq: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl IdentityInstance {
    pub fn for_graph(g: Hypergraph) -> IdentityInstance {
        IdentityInstance { g: Some(g), ..Default::default() }
    }

    fn graph(&self) -> Result<&Hypergraph, IntegralsError> {
        self.g.as_ref().ok_or_else(|| IntegralsError::BadInstance {
            detail: "identity needs a hypergraph instance".to_owned(),
        })
    }

    fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::Map::new();
        if let Some(g) = &self.g {
            v.insert("hypergraph".into(), g.to_json());
        }
        if !self.i_seq.is_empty() || !self.j_seq.is_empty() {
            v.insert("I".into(), serde_json::json!(self.i_seq));
            v.insert("J".into(), serde_json::json!(self.j_seq));
        }
        if !self.blocks.is_empty() {
            v.insert("blocks".into(), serde_json::json!(self.blocks));
        }
        serde_json::Value::Object(v)
    }
}

/// Computes both routes of a named identity and reports exact equality.
///
/// Names: `forest-sum`, `unrooted`, `rooted`, `constrained`, `matched`, `matched-unrooted`,
/// `matched-rooted`, `two-point`.
pub fn verify_identity(
    name: &str,
    instance: &IdentityInstance,
) -> Result<IdentityReport, IntegralsError> {
    let started = std::time::Instant::now();
    let (lhs, rhs) = match name {
        "forest-sum" => {
            let spec = ActionSpec::symbolic(instance.graph()?.clone());
            let lhs = z_partition(&spec)?;
            let rhs = spec.g.forest_weight_sum(&spec.w, &spec.t, &spec.lam)?;
            (lhs, rhs)
        }
        "unrooted" => {
            let spec = ActionSpec::unrooted(instance.graph()?.clone());
            let lhs = z_partition(&spec)?;
            // sum over forests of prod w * lambda^k(F)
            let lam = Polynomial::var(names::lambda());
            let mut rhs = Polynomial::zero();
            for record in spec.g.enumerate_spanning_hyperforests()? {
                let mut term = lam.pow(record.component_count() as u32);
                for idx in record.edge_indices() {
                    term = term.mul(&spec.w[idx]);
                }
                rhs = rhs.add(&term);
            }
            (lhs, rhs)
        }
        "rooted" => {
            let spec = ActionSpec::rooted(instance.graph()?.clone());
            let lhs = z_partition(&spec)?;
            let rhs = spec.g.forest_weight_sum(&spec.w, &spec.t, &spec.lam)?;
            (lhs, rhs)
        }
        "constrained" => {
            let g = instance.graph()?.clone();
            let lam = Polynomial::var(names::lambda());
            let n = g.vertex_count();
            let spec = ActionSpec::unrooted(g);
            let mut integrand = spec.boltzmann();
            for block in &instance.blocks {
                integrand = integrand.mul(&f_lambda(block, &lam, n));
            }
            let lhs = integrand.integrate_all(&spec.t);
            let rhs = spec.g.constrained_forest_sum(&spec.w, &lam, &instance.blocks)?;
            (lhs, rhs)
        }
        "matched" => {
            let spec = ActionSpec::symbolic(instance.graph()?.clone());
            let lhs = corr_unnormalized(&spec, &instance.i_seq, &instance.j_seq)?;
            let rhs = spec.g.matched_forest_sum(
                &spec.w,
                &spec.t,
                &spec.lam,
                &instance.i_seq,
                &instance.j_seq,
            )?;
            (lhs, rhs)
        }
        "matched-unrooted" => {
            let spec = ActionSpec::unrooted(instance.graph()?.clone());
            let lhs = corr_unnormalized(&spec, &instance.i_seq, &instance.j_seq)?;
            let rhs = spec.g.matched_forest_sum(
                &spec.w,
                &spec.t,
                &spec.lam,
                &instance.i_seq,
                &instance.j_seq,
            )?;
            (lhs, rhs)
        }
        "matched-rooted" => {
            let spec = ActionSpec::rooted(instance.graph()?.clone());
            let lhs = corr_unnormalized(&spec, &instance.i_seq, &instance.j_seq)?;
            let rhs = spec.g.matched_forest_sum(
                &spec.w,
                &spec.t,
                &spec.lam,
                &instance.i_seq,
                &instance.j_seq,
            )?;
            (lhs, rhs)
        }
        "two-point" => {
            // lam * [psibar_i psi_j] = sum over forests joining i and j of
            // prod w * lam^k(F), at the supersymmetric point t = lam.
            if instance.i_seq.len() != 1 || instance.j_seq.len() != 1 {
                return Err(IntegralsError::BadInstance {
                    detail: "two-point takes exactly one source and one sink vertex".to_owned(),
                });
            }
            let spec = ActionSpec::unrooted(instance.graph()?.clone());
            let lam = Polynomial::var(names::lambda());
            let lhs = corr_unnormalized(&spec, &instance.i_seq, &instance.j_seq)?.mul(&lam);
            let (i, j) = (instance.i_seq[0], instance.j_seq[0]);
            let mut rhs = Polynomial::zero();
            for record in spec.g.enumerate_spanning_hyperforests()? {
                let joined = record
                    .components
                    .iter()
                    .any(|c| c.vertices.binary_search(&i).is_ok() && c.vertices.binary_search(&j).is_ok());
                if !joined {
                    continue;
                }
                let mut term = lam.pow(record.component_count() as u32);
                for idx in record.edge_indices() {
                    term = term.mul(&spec.w[idx]);
                }
                rhs = rhs.add(&term);
            }
            (lhs, rhs)
        }
        _ => return Err(IntegralsError::UnknownIdentity { name: name.to_owned() }),
    };
    Ok(IdentityReport {
        identity: name.to_owned(),
        instance: instance.to_json(),
        equal: lhs == rhs,
        lhs,
        rhs,
        millis: started.elapsed().as_millis(),
    })
}

/// Spanning subhypergraph masks where `i` and `j` end up connected; used by
/// tests as a reference for the two-point identity.
pub fn masks_joining(g: &Hypergraph, i: usize, j: usize) -> Vec<EdgeMask> {
    (0..(1u64 << g.edge_count()))
        .map(|m| m as EdgeMask)
        .filter(|&m| {
            g.components(m)
                .iter()
                .any(|c| c.binary_search(&i).is_ok() && c.binary_search(&j).is_ok())
        })
        .collect()
}
