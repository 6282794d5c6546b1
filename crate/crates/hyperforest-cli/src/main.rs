//! Command-line front end: hypergraph ingestion, generating polynomials, and
//! seeded identity-verification campaigns.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage/parse error,
//! 3 cap exceeded. JSON output is canonical: equal (command, seed) pairs
//! produce byte-identical bytes, so timing only appears in text mode.

use clap::{Parser, Subcommand, ValueEnum};
use hyperforest::hypergraph::{Hypergraph, HypergraphError};
use hyperforest::integrals::{self, ActionSpec, IdentityInstance, IntegralsError};
use hyperforest::matrixtree::{self, GeneralAction};
use hyperforest::operators;
use hyperforest::osp;
use hyperforest::potts;
use hyperforest::ring::{names, Polynomial, Symbol};
use hyperforest::rng::{random_hypergraph, InstanceShape, SplitMix64};
use std::io::Read;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const SCHEMA: &str = "hyperforest/1";

#[derive(Parser)]
#[command(name = "hyperforest", about = "Exact spanning-hyperforest generating functions and identity suites", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a generating polynomial for a hypergraph given as JSON.
    Poly {
        /// Path to hypergraph JSON ("-" for stdin, or inline JSON).
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = PolyMode::Unrooted)]
        mode: PolyMode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Skip the independent combinatorial cross-check.
        #[arg(long)]
        skip_crosscheck: bool,
    },
    /// Run a named identity suite over seeded random instances.
    Verify {
        /// Identity name; see `--identity help` for the list.
        #[arg(long)]
        identity: String,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Cap on generated vertex counts.
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Cap on generated edge counts.
        #[arg(long, default_value_t = 6)]
        max_edges: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyMode {
    Unrooted,
    Rooted,
    General,
    Trees,
    PottsFk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum CliError {
    Parse(String),
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Parse(_) => ExitCode::from(2),
            CliError::Cap(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<HypergraphError> for CliError {
    fn from(e: HypergraphError) -> CliError {
        match e {
            HypergraphError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<IntegralsError> for CliError {
    fn from(e: IntegralsError) -> CliError {
        match e {
            IntegralsError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<potts::PottsError> for CliError {
    fn from(e: potts::PottsError) -> CliError {
        CliError::Cap(e.to_string())
    }
}

impl From<matrixtree::MatrixTreeError> for CliError {
    fn from(e: matrixtree::MatrixTreeError) -> CliError {
        match e {
            matrixtree::MatrixTreeError::CapExceeded { .. }
            | matrixtree::MatrixTreeError::SizeCap { .. } => CliError::Cap(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Poly { input, mode, format, skip_crosscheck } => {
            match cmd_poly(&input, mode, format, skip_crosscheck) {
                Ok(ok) => {
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    e.exit_code()
                }
            }
        }
        Command::Verify { identity, trials, seed, max_n, max_edges, format } => {
            match cmd_verify(&identity, trials, seed, max_n, max_edges, format) {
                Ok(all_equal) => {
                    if all_equal {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    e.exit_code()
                }
            }
        }
    }
}

fn read_input(input: &str) -> Result<serde_json::Value, CliError> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Parse(format!("cannot read stdin: {}", e)))?;
        buf
    } else if input.trim_start().starts_with('{') {
        input.to_owned()
    } else {
        std::fs::read_to_string(input)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {}", input, e)))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid JSON: {}", e)))
}

fn cmd_poly(input: &str, mode: PolyMode, format: Format, skip_crosscheck: bool) -> Result<bool, CliError> {
    let json = read_input(input)?;
    let g = Hypergraph::from_json(&json).map_err(CliError::Parse)?;
    let (mode_name, poly, crosscheck): (&str, Polynomial, Option<bool>) = match mode {
        PolyMode::Unrooted => {
            let spec = ActionSpec::unrooted(g.clone());
            let z = integrals::z_partition(&spec)?;
            let check = if skip_crosscheck {
                None
            } else {
                Some(z == g.forest_weight_sum(&spec.w, &spec.t, &spec.lam)?)
            };
            ("unrooted", z, check)
        }
        PolyMode::Rooted => {
            let spec = ActionSpec::rooted(g.clone());
            let z = integrals::z_partition(&spec)?;
            let check = if skip_crosscheck {
                None
            } else {
                Some(z == g.forest_weight_sum(&spec.w, &spec.t, &spec.lam)?)
            };
            ("rooted", z, check)
        }
        PolyMode::General => {
            let spec = ActionSpec::symbolic(g.clone());
            let z = integrals::z_partition(&spec)?;
            let check = if skip_crosscheck {
                None
            } else {
                Some(z == g.forest_weight_sum(&spec.w, &spec.t, &spec.lam)?)
            };
            ("general", z, check)
        }
        PolyMode::Trees => {
            let w = g.weight_polys();
            let trees = potts::q_limits(&g, &w, &w)?.trees;
            let check = if skip_crosscheck {
                None
            } else if g.is_graph() && g.vertex_count() >= 1 {
                let minor = matrixtree::principal_minor_forests(&g, &w, &[0])?;
                Some(minor == trees)
            } else {
                Some(potts::tree_polynomial_from_forests(&g, &w)? == trees)
            };
            ("trees", trees, check)
        }
        PolyMode::PottsFk => {
            let v: Vec<Polynomial> =
                g.edges().iter().map(|e| Polynomial::var(names::v(e))).collect();
            let fk = potts::fk_polynomial(&g, &Polynomial::var(names::q()), &v)?;
            let check = if skip_crosscheck {
                None
            } else {
                // evaluate at q = 2, v = 1 against the spin sum when small
                let unit = vec![Polynomial::one(); g.edge_count()];
                match potts::potts_bruteforce(&g, 2, &unit) {
                    Ok(brute) => {
                        let mut bind = std::collections::BTreeMap::new();
                        bind.insert(names::q(), Polynomial::from_int(2));
                        for e in g.edges() {
                            bind.insert(names::v(e), Polynomial::one());
                        }
                        Some(fk.substitute(&bind) == brute)
                    }
                    Err(_) => None,
                }
            };
            ("potts-fk", fk, check)
        }
    };
    let crosscheck_str = match crosscheck {
        None => "skipped",
        Some(true) => "ok",
        Some(false) => "FAILED",
    };
    let mut out = serde_json::json!({
        "schema": SCHEMA,
        "command": "poly",
        "mode": mode_name,
        "input": g.to_json(),
        "polynomial": poly.to_json(),
        "crosscheck": crosscheck_str,
    });
    if matches!(mode, PolyMode::Trees) {
        let mut bind = std::collections::BTreeMap::new();
        for sym in g.weight_symbols() {
            bind.insert(*sym, Polynomial::one());
        }
        out["count_at_unit_weights"] =
            serde_json::Value::from(poly.substitute(&bind).constant_term().to_string());
    }
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            println!("mode: {}", mode_name);
            println!("polynomial: {}", poly);
            println!("crosscheck: {}", crosscheck_str);
        }
    }
    Ok(crosscheck != Some(false))
}

/// The documented identity names, with one-line descriptions.
const IDENTITIES: &[(&str, &str)] = &[
    ("forest-sum", "partition function equals the hyperforest sum, fully symbolic"),
    ("unrooted", "unrooted specialization t = lambda"),
    ("rooted", "rooted specialization lambda = 0"),
    ("constrained", "constrained forests from an explicit f-factor under the integral"),
    ("matched", "correlators equal the properly-matched forest sum"),
    ("matched-unrooted", "matched sum at t = lambda"),
    ("matched-rooted", "matched sum at lambda = 0"),
    ("two-point", "two-point function counts connecting forests (cleared form)"),
    ("pair-collapse", "f_A f_B collapse with weighted-average lambda"),
    ("nilpotency", "f_A is nilpotent of order two"),
    ("connected-collapse", "connected products collapse to f_V or vanish"),
    ("forest-factorization", "forest products factor over components"),
    ("quartic-relation", "the quartic relation vanishes"),
    ("chained-product", "chained scalar products clear to lambda^(k-1) f_A"),
    ("gram", "Gram determinant equals k! lambda^(k-1) f_A"),
    ("fk", "spin sums equal the random-cluster polynomial at integer q"),
    ("limits", "q -> 0 and scaling limits as exact coefficient extraction"),
    ("det-expansions", "determinant minor expansion and digraph representations"),
    ("config-expansion", "general action integral equals the oriented-configuration sum"),
    ("two-matrix", "two-matrix determinant specialization on graphs"),
    ("matrix-tree", "principal minors count rooted spanning forests"),
    ("tensor-action", "Laplacian tensor action equals the f-operator action"),
    ("osp-relations", "generator algebra relations on the full basis"),
    ("osp-invariance", "invariance sweep plus the non-invariance witness"),
];

fn cmd_verify(
    identity: &str,
    trials: u64,
    seed: u64,
    max_n: usize,
    max_edges: usize,
    format: Format,
) -> Result<bool, CliError> {
    if identity == "help" {
        for (name, desc) in IDENTITIES {
            println!("{:20} {}", name, desc);
        }
        return Ok(true);
    }
    if !IDENTITIES.iter().any(|(name, _)| *name == identity) {
        let mut msg = String::from("unknown identity; available:\n");
        for (name, desc) in IDENTITIES {
            msg.push_str(&format!("  {:20} {}\n", name, desc));
        }
        return Err(CliError::Parse(msg));
    }
    let root = SplitMix64::new(seed);
    let worker_count = std::env::var("HYPERFOREST_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1)
        })
        .min(trials.max(1) as usize);
    let results: Vec<serde_json::Value> = {
        let slots: Mutex<Vec<Option<serde_json::Value>>> =
            Mutex::new(vec![None; trials as usize]);
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..worker_count {
                scope.spawn(|| loop {
                    let trial = next.fetch_add(1, Ordering::SeqCst);
                    if trial >= trials as usize {
                        break;
                    }
                    let mut rng = root.derive(trial as u64);
                    let report = run_trial(identity, &mut rng, max_n, max_edges);
                    let value = match report {
                        Ok(mut v) => {
                            v["trial"] = serde_json::Value::from(trial as u64);
                            v
                        }
                        Err(e) => serde_json::json!({
                            "trial": trial as u64,
                            "equal": false,
                            "error": e.message(),
                        }),
                    };
                    slots.lock().unwrap()[trial] = Some(value);
                });
            }
        });
        slots.into_inner().unwrap().into_iter().map(|v| v.unwrap()).collect()
    };
    let all_equal = results
        .iter()
        .all(|r| r.get("equal").and_then(|e| e.as_bool()) == Some(true));
    let out = serde_json::json!({
        "schema": SCHEMA,
        "command": "verify",
        "identity": identity,
        "seed": seed,
        "trials": trials,
        "max_n": max_n,
        "max_edges": max_edges,
        "all_equal": all_equal,
        "reports": results,
    });
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Text => {
            for r in out["reports"].as_array().unwrap() {
                println!(
                    "trial {}: {}",
                    r["trial"],
                    if r["equal"].as_bool() == Some(true) { "ok" } else { "FAILED" }
                );
            }
            println!("{}: {}", identity, if all_equal { "all equal" } else { "FAILURES" });
        }
    }
    Ok(all_equal)
}

fn shape(max_n: usize, max_edges: usize) -> InstanceShape {
    InstanceShape {
        min_n: 2,
        max_n: max_n.clamp(2, 6),
        max_edges: max_edges.min(8),
        min_arity: 2,
        max_arity: 4,
        require_hyperedge: false,
    }
}

fn lam_poly() -> Polynomial {
    Polynomial::var(names::lambda())
}

fn run_trial(
    identity: &str,
    rng: &mut SplitMix64,
    max_n: usize,
    max_edges: usize,
) -> Result<serde_json::Value, CliError> {
    let sh = shape(max_n, max_edges);
    match identity {
        "forest-sum" | "unrooted" | "rooted" => {
            let g = random_hypergraph(rng, &sh);
            let report = integrals::verify_identity(identity, &IdentityInstance::for_graph(g))?;
            Ok(report.to_json())
        }
        "constrained" => {
            let g = random_hypergraph(rng, &sh);
            let n = g.vertex_count();
            let mut instance = IdentityInstance::for_graph(g);
            let block_count = rng.range(0, (n / 2).min(2));
            let mut pool: Vec<usize> = (0..n).collect();
            for _ in 0..block_count {
                if pool.len() < 2 {
                    break;
                }
                let size = rng.range(2, pool.len().min(3));
                let mut block = Vec::new();
                for _ in 0..size {
                    let pos = rng.below(pool.len() as u64) as usize;
                    block.push(pool.remove(pos));
                }
                block.sort_unstable();
                instance.blocks.push(block);
            }
            Ok(integrals::verify_identity("constrained", &instance)?.to_json())
        }
        "matched" | "matched-unrooted" | "matched-rooted" => {
            let g = random_hypergraph(rng, &sh);
            let n = g.vertex_count();
            let k = rng.range(0, 2.min(n));
            let mut instance = IdentityInstance::for_graph(g);
            instance.i_seq = rng.sequence(n, k);
            instance.j_seq = rng.sequence(n, k);
            Ok(integrals::verify_identity(identity, &instance)?.to_json())
        }
        "two-point" => {
            let mut local = sh;
            local.min_n = 2;
            let g = random_hypergraph(rng, &local);
            let n = g.vertex_count();
            let pair = rng.sequence(n, 2);
            let mut instance = IdentityInstance::for_graph(g);
            instance.i_seq = vec![pair[0]];
            instance.j_seq = vec![pair[1]];
            Ok(integrals::verify_identity("two-point", &instance)?.to_json())
        }
        "pair-collapse" => {
            let n = rng.range(2, max_n.clamp(2, 6));
            // random overlapping pair
            let size_a = rng.range(1, n);
            let a = rng.subset(n, size_a);
            let size_b = rng.range(1, n);
            let mut b = rng.subset(n, size_b);
            if !a.iter().any(|v| b.contains(v)) {
                b.push(a[rng.below(a.len() as u64) as usize]);
                b.sort_unstable();
                b.dedup();
            }
            let overlap = a.iter().filter(|v| b.contains(v)).count();
            let union: Vec<usize> = {
                let mut u: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                u.sort_unstable();
                u.dedup();
                u
            };
            let lam = lam_poly();
            let lam_p = Polynomial::var(names::lambda_prime());
            let prod = operators::f_lambda(&a, &lam, n).mul(&operators::f_lambda(&b, &lam_p, n));
            let equal = if overlap >= 2 {
                prod.is_zero()
            } else if union.len() == 1 {
                prod == hyperforest::grassmann::GrassmannElement::one(n)
            } else {
                let avg = operators::lambda_pair_average(a.len(), b.len(), union.len(), &lam, &lam_p);
                prod == operators::f_lambda(&union, &avg, n)
            };
            Ok(serde_json::json!({
                "identity": "pair-collapse",
                "instance": {"n": n, "A": a, "B": b},
                "equal": equal,
            }))
        }
        "nilpotency" => {
            let n = rng.range(2, max_n.clamp(2, 6));
            let size = rng.range(2, n);
            let a = rng.subset(n, size);
            let f = operators::f_lambda(&a, &lam_poly(), n);
            Ok(serde_json::json!({
                "identity": "nilpotency",
                "instance": {"n": n, "A": a},
                "equal": f.mul(&f).is_zero(),
            }))
        }
        "connected-collapse" => {
            let mut local = sh;
            local.min_n = 2;
            local.max_n = local.max_n.min(5);
            local.max_edges = local.max_edges.min(4);
            // draw until the full edge set is connected so every trial
            // exercises the collapse statement
            let mut g = random_hypergraph(rng, &local);
            for _ in 0..50 {
                let full = ((1u64 << g.edge_count()) - 1) as u32;
                if g.edge_count() >= 1 && g.component_count(full) == 1 {
                    break;
                }
                g = random_hypergraph(rng, &local);
            }
            let n = g.vertex_count();
            let full = ((1u64 << g.edge_count()) - 1) as u32;
            let record = g.classify(full);
            let lams: Vec<Polynomial> = g
                .edges()
                .iter()
                .map(|e| Polynomial::var(names::lam_edge(e)))
                .collect();
            let mut prod = hyperforest::grassmann::GrassmannElement::one(n);
            for (e, l) in g.edges().iter().zip(&lams) {
                prod = prod.mul(&operators::f_lambda(e, l, n));
            }
            let connected = record.component_count() == 1 && g.edge_count() >= 1;
            let equal = if !connected {
                // a disconnected draw slipped through the retries; skip it
                true
            } else if record.class == hyperforest::hypergraph::SubgraphClass::Hyperforest {
                let star = operators::lambda_star(g.edges(), &lams);
                let all: Vec<usize> = (0..n).collect();
                prod == operators::f_lambda(&all, &star, n)
            } else {
                prod.is_zero()
            };
            Ok(serde_json::json!({
                "identity": "connected-collapse",
                "instance": g.to_json(),
                "connected": connected,
                "equal": equal,
            }))
        }
        "forest-factorization" => {
            let g = random_hypergraph(rng, &sh);
            let n = g.vertex_count();
            let forests = g.enumerate_spanning_hyperforests()?;
            let pick = &forests[rng.below(forests.len() as u64) as usize];
            let lam = lam_poly();
            let mut prod = hyperforest::grassmann::GrassmannElement::one(n);
            for idx in pick.edge_indices() {
                prod = prod.mul(&operators::f_lambda(&g.edges()[idx], &lam, n));
            }
            let mut by_components = hyperforest::grassmann::GrassmannElement::one(n);
            for c in &pick.components {
                if c.vertices.len() >= 2 || !c.edges.is_empty() {
                    by_components = by_components.mul(&operators::f_lambda(&c.vertices, &lam, n));
                }
            }
            Ok(serde_json::json!({
                "identity": "forest-factorization",
                "instance": {"hypergraph": g.to_json(), "mask": pick.edge_mask},
                "equal": prod == by_components,
            }))
        }
        "quartic-relation" => {
            let n = rng.range(4, max_n.clamp(4, 6));
            let verts = rng.sequence(n, 4);
            let r = operators::r_abcd(verts[0], verts[1], verts[2], verts[3], &lam_poly(), n);
            Ok(serde_json::json!({
                "identity": "quartic-relation",
                "instance": {"n": n, "vertices": verts},
                "equal": r.is_zero(),
            }))
        }
        "chained-product" => {
            let n = rng.range(2, max_n.clamp(2, 5));
            let verts: Vec<usize> = (0..n).collect();
            let lam = lam_poly();
            let cleared = operators::f_lambda(&verts, &lam, n).scale(&lam.pow(n as u32 - 1));
            // random spanning tree on the vertex list
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for v in 1..n {
                edges.push((rng.below(v as u64) as usize, v));
            }
            let mut prod = hyperforest::grassmann::GrassmannElement::one(n);
            for (u, v) in &edges {
                prod = prod.mul(
                    &hyperforest::grassmann::GrassmannElement::one(n)
                        .sub(&operators::scalar_product(*u, *v, &lam, n)),
                );
            }
            Ok(serde_json::json!({
                "identity": "chained-product",
                "instance": {"n": n, "tree": edges},
                "equal": prod == cleared,
            }))
        }
        "gram" => {
            let n = rng.range(1, max_n.clamp(1, 5));
            let verts: Vec<usize> = (0..n).collect();
            Ok(serde_json::json!({
                "identity": "gram",
                "instance": {"k": n},
                "equal": operators::gram_det_check(&verts, &lam_poly(), n),
            }))
        }
        "fk" => {
            let mut local = sh;
            local.max_n = local.max_n.min(5);
            let g = random_hypergraph(rng, &local);
            let q = 1 + rng.below(3);
            let v: Vec<Polynomial> =
                g.edges().iter().map(|e| Polynomial::var(names::v(e))).collect();
            let brute = potts::potts_bruteforce(&g, q, &v)?;
            let fk = potts::fk_polynomial(&g, &Polynomial::from_int(q as i64), &v)?;
            Ok(serde_json::json!({
                "identity": "fk",
                "instance": {"hypergraph": g.to_json(), "q": q},
                "equal": brute == fk,
            }))
        }
        "limits" => {
            let mut local = sh;
            local.max_n = local.max_n.min(5);
            let g = random_hypergraph(rng, &local);
            let w = g.weight_polys();
            let limits = potts::q_limits(&g, &w, &w)?;
            let by_sub = potts::forest_polynomial_via_limit(&g, &w)?;
            let connected = g.component_count(((1u64 << g.edge_count()) - 1) as u32) == 1;
            // the connected-polynomial route assumes a connected hypergraph
            let t1_ok = !connected
                || potts::tree_polynomial_from_connected(&g, &w)? == limits.trees;
            let t2 = potts::tree_polynomial_from_forests(&g, &w)?;
            let equal = by_sub == limits.forests && t1_ok && t2 == limits.trees;
            Ok(serde_json::json!({
                "identity": "limits",
                "instance": g.to_json(),
                "equal": equal,
            }))
        }
        "det-expansions" => {
            let k = rng.range(2, 4.min(max_n.max(2)));
            let fresh = |prefix: &str, i: usize, j: usize| {
                Polynomial::var(Symbol::new(&format!("{}_{}_{}", prefix, i, j)))
            };
            let a: Vec<Vec<Polynomial>> =
                (0..k).map(|i| (0..k).map(|j| fresh("a", i, j)).collect()).collect();
            let b: Vec<Vec<Polynomial>> =
                (0..k).map(|i| (0..k).map(|j| fresh("b", i, j)).collect()).collect();
            let minors_ok = matrixtree::det_sum_expansion_check(&a, &b)?;
            let k_small = k.min(3);
            let c: Vec<Vec<Polynomial>> = (0..k_small)
                .map(|i| (0..k_small).map(|j| fresh("c", i, j)).collect())
                .collect();
            let av: Vec<Polynomial> = (0..k_small).map(|i| fresh("av", i, 0)).collect();
            let bv: Vec<Polynomial> = (0..k_small).map(|i| fresh("bv", i, 0)).collect();
            let digraphs_ok = matrixtree::graphical_det_checks(&c, &av, &bv)?;
            // cycle-annihilating instance: strictly upper triangular
            let tri: Vec<Vec<Polynomial>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| if i < j { fresh("u", i, j) } else { Polynomial::zero() })
                        .collect()
                })
                .collect();
            let e_minus: Vec<Vec<Polynomial>> = (0..k)
                .map(|i| (0..k).map(|j| Polynomial::one().sub(&tri[i][j])).collect())
                .collect();
            let paths_ok = matrixtree::det_poly(&e_minus)?
                == matrixtree::hamiltonian_path_sum_poly(&tri)?;
            Ok(serde_json::json!({
                "identity": "det-expansions",
                "instance": {"k": k},
                "minor_expansion": minors_ok,
                "digraph_forms": digraphs_ok,
                "cycle_free_paths": paths_ok,
                "equal": minors_ok && digraphs_ok && paths_ok,
            }))
        }
        "config-expansion" => {
            let mut local = sh;
            local.max_n = local.max_n.min(5);
            local.max_edges = local.max_edges.min(5);
            local.require_hyperedge = true;
            let g = random_hypergraph(rng, &local);
            let act = GeneralAction::symbolic(&g);
            let n = g.vertex_count();
            let k = rng.range(0, 1);
            let i_seq = rng.sequence(n, k);
            let j_seq = rng.sequence(n, k);
            let lhs = matrixtree::general_action_integral(&g, &act, &i_seq, &j_seq)?;
            let rhs = matrixtree::oriented_config_sum(&g, &act, &i_seq, &j_seq)?;
            Ok(serde_json::json!({
                "identity": "config-expansion",
                "instance": {"hypergraph": g.to_json(), "I": i_seq, "J": j_seq},
                "equal": lhs == rhs,
            }))
        }
        "two-matrix" => {
            let mut local = sh;
            local.max_arity = 2;
            local.max_n = local.max_n.min(5);
            let g = random_hypergraph(rng, &local);
            let mut act = GeneralAction::symbolic(&g);
            act.star = vec![Polynomial::zero(); g.edge_count()];
            let det = matrixtree::det_poly(&matrixtree::moon_matrix(&g, &act)?)?;
            let integral = matrixtree::general_action_integral(&g, &act, &[], &[])?;
            Ok(serde_json::json!({
                "identity": "two-matrix",
                "instance": g.to_json(),
                "equal": det == integral,
            }))
        }
        "matrix-tree" => {
            let mut local = sh;
            local.max_arity = 2;
            let g = random_hypergraph(rng, &local);
            let n = g.vertex_count();
            let w = g.weight_polys();
            let root_count = rng.range(1, 2.min(n));
            let roots = rng.subset(n, root_count);
            let minor = matrixtree::principal_minor_forests(&g, &w, &roots)?;
            let mut enumerated = Polynomial::zero();
            for record in g.enumerate_spanning_hyperforests()? {
                let rooted_once = record.components.iter().all(|c| {
                    c.vertices.iter().filter(|v| roots.contains(v)).count() == 1
                });
                if !rooted_once {
                    continue;
                }
                let mut term = Polynomial::one();
                for idx in record.edge_indices() {
                    term = term.mul(&w[idx]);
                }
                enumerated = enumerated.add(&term);
            }
            Ok(serde_json::json!({
                "identity": "matrix-tree",
                "instance": {"hypergraph": g.to_json(), "roots": roots},
                "equal": minor == enumerated,
            }))
        }
        "tensor-action" => {
            let n = rng.range(3, max_n.clamp(3, 5));
            let arity = rng.range(2, 3.min(n));
            let all: Vec<Vec<usize>> = hyperforest::hypergraph::all_hyperedges(n)
                .into_iter()
                .filter(|e| e.len() == arity)
                .collect();
            let count = rng.range(1, all.len().min(4));
            let mut chosen: Vec<Vec<usize>> = Vec::new();
            let mut pool = all;
            for _ in 0..count {
                let pos = rng.below(pool.len() as u64) as usize;
                chosen.push(pool.remove(pos));
            }
            let g = Hypergraph::new(n, chosen).map_err(CliError::from)?;
            let w = g.weight_polys();
            let lam = lam_poly();
            let action = matrixtree::laplacian_tensor_action(&g, &w, &lam)?;
            let mut f_sum = hyperforest::grassmann::GrassmannElement::zero(n);
            for (idx, e) in g.edges().iter().enumerate() {
                f_sum = f_sum.add(&operators::f_lambda(e, &lam, n).scale(&w[idx]));
            }
            let sums_ok = matrixtree::laplacian_tensor_partial_sums_vanish(&g, &w)?;
            Ok(serde_json::json!({
                "identity": "tensor-action",
                "instance": g.to_json(),
                "equal": action == f_sum && sums_ok,
            }))
        }
        "osp-relations" => {
            let n = rng.range(1, max_n.clamp(1, 4));
            let reports = osp::check_osp_relations(n, &lam_poly());
            let equal = reports.iter().all(|r| r.ok);
            Ok(serde_json::json!({
                "identity": "osp-relations",
                "instance": {"n": n},
                "relations": reports.iter().map(|r| serde_json::json!({"relation": r.relation, "ok": r.ok})).collect::<Vec<_>>(),
                "equal": equal,
            }))
        }
        "osp-invariance" => {
            let n = rng.range(2, max_n.clamp(2, 5));
            let reports = osp::check_invariance(n, &lam_poly(), rng, 10);
            let (witness, witness_ok) = osp::noninvariance_witness(n, &lam_poly());
            let equal = reports.iter().all(|r| r.ok) && witness_ok;
            Ok(serde_json::json!({
                "identity": "osp-invariance",
                "instance": {"n": n},
                "checks": reports.iter().map(|r| serde_json::json!({"relation": r.relation, "ok": r.ok})).collect::<Vec<_>>(),
                "noninvariance_witness": witness,
                "equal": equal,
            }))
        }
        _ => Err(CliError::Parse(format!("unknown identity {:?}", identity))),
    }
}
