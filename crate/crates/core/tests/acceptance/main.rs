//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#[path = "../common/mod.rs"]
mod common;
mod embed;
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{random_at_alpha, v};
use hyperdetach::constructors::baranyai::baranyai_connected;
use hyperdetach::verify::{verify_detachment, verify_factorization, ClassSpec, CompleteTarget};
use hyperdetach::{build_families, detach, fair_split, fair_split_bruteforce, Hypergraph, SplitRequest, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(failures: &[String], summary: String) -> Self {
        match failures.first() {
            None => Outcome { pass: true, detail: summary },
            Some(first) => Outcome {
                pass: false,
                detail: format!("{summary}; {} failures, first: {first}", failures.len()),
            },
        }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 7] = [
    Criterion { id: 1, name: "fair-split exactness", budget: Duration::from_secs(120), run: fair_split_exactness },
    Criterion { id: 2, name: "detachment full check", budget: Duration::from_secs(180), run: detachment_full_check },
    Criterion { id: 3, name: "connected Baranyai", budget: Duration::from_secs(180), run: connected_baranyai },
    Criterion { id: 4, name: "graph embedding sweep", budget: Duration::from_secs(300), run: embed::graph_sweep },
    Criterion { id: 5, name: "hypergraph embeddings", budget: Duration::from_secs(600), run: embed::hypergraph_embeddings },
    Criterion { id: 6, name: "non-uniform factorization", budget: Duration::from_secs(180), run: nonuniform::criterion },
    Criterion { id: 7, name: "mutation detection", budget: Duration::from_secs(600), run: mutation_detection },
];

fn main() -> ExitCode {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all = true;
    for c in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let in_time = took <= c.budget;
        let pass = out.pass && in_time;
        all &= pass;
        println!(
            "criterion {} {}: {} ({}; {:.1}s of {}s budget)",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fair_split_exactness() -> Outcome {
    let mut r = rng(1);
    let mut failures = Vec::new();
    let (mut requests, mut compared) = (0, 0);
    while requests < 1000 {
        let vertices = r.gen_range(1..=8);
        let k = r.gen_range(1..=4);
        let g = random_at_alpha(&mut r, vertices, 20, k, 4, 2);
        let fam = build_families(&g, v(0)).unwrap();
        let req = SplitRequest {
            ground: fam.ground,
            family_a: fam.a,
            family_b: fam.b,
            divisor: r.gen_range(1..=5),
        };
        requests += 1;
        let found = match fair_split(&req) {
            Ok(z) => {
                if let Err(e) = oracle::check_split(&req, &z) {
                    failures.push(format!("request {requests}: {e}"));
                }
                true
            }
            Err(e) => {
                failures.push(format!("request {requests}: fair_split failed: {e}"));
                false
            }
        };
        if req.ground.len() <= 14 {
            compared += 1;
            match fair_split_bruteforce(&req) {
                Ok(Some(z)) if found => {
                    if let Err(e) = oracle::check_split(&req, &z) {
                        failures.push(format!("request {requests}: brute-force split: {e}"));
                    }
                }
                Ok(None) if !found => {}
                other => failures.push(format!("request {requests}: existence disagrees ({other:?} vs {found})")),
            }
        }
    }
    Outcome::new(&failures, format!("{requests} requests, {compared} compared with exhaustive search"))
}

/// Random hypergraph meeting the detachment hypothesis at vertex 0.
fn detachment_input(r: &mut ChaCha8Rng, n: u32) -> Hypergraph {
    let vertices = r.gen_range(1..=6);
    let k = r.gen_range(1..=3);
    let g = random_at_alpha(r, vertices, 10, k, 3, n.max(1));
    assert!(g.edges().iter().all(|e| e.edge.multiplicity(v(0)) <= n));
    g
}

fn detachment_full_check() -> Outcome {
    let mut r = rng(2);
    let mut failures = Vec::new();
    let mut connected_checks = 0;
    for i in 0..500 {
        let n = r.gen_range(1..=5);
        let g = detachment_input(&mut r, n);
        let out = match detach(&g, v(0), n, false) {
            Ok(out) => out,
            Err(e) => {
                failures.push(format!("case {i}: detach failed: {e}"));
                continue;
            }
        };
        match verify_detachment(&g, &out.hypergraph, &out.parts, &out.psi) {
            Ok(rep) if rep.passed() => connected_checks += rep.connectivity.classes.len(),
            Ok(rep) => failures.push(format!("case {i}: {:?}", rep.fairness.violations.first())),
            Err(e) => failures.push(format!("case {i}: verifier error {e}")),
        }
        if let Err(e) = oracle::check_detachment_shape(&g, &out.hypergraph, &out.parts) {
            failures.push(format!("case {i}: {e}"));
        }
    }
    Outcome::new(&failures, format!("500 detachments, {connected_checks} class connectivity checks"))
}

/// A random composition of `total` into positive parts.
fn random_sizes(r: &mut ChaCha8Rng, total: u64, max_parts: u64) -> Vec<u64> {
    let parts = r.gen_range(1..=total.min(max_parts));
    let mut cuts: BTreeSet<u64> = BTreeSet::new();
    while (cuts.len() as u64) < parts - 1 {
        cuts.insert(r.gen_range(1..total));
    }
    let mut sizes = Vec::new();
    let mut last = 0;
    for c in cuts.into_iter().chain([total]) {
        sizes.push(c - last);
        last = c;
    }
    sizes
}

fn connected_baranyai() -> Outcome {
    let mut r = rng(3);
    let mut failures = Vec::new();
    let (mut runs, mut connected, mut split) = (0, 0, 0);
    for n in 3..=9u32 {
        for h in 2..n {
            for lambda in 1..=2u64 {
                let total = lambda * oracle::binom(n as u64, h as u64);
                for _ in 0..20 {
                    runs += 1;
                    let sizes = random_sizes(&mut r, total, 2 * n as u64);
                    let tag = format!("n = {n}, h = {h}, lambda = {lambda}, sizes = {sizes:?}");
                    let g = match baranyai_connected(n, h, lambda, &sizes) {
                        Ok(c) => c.hypergraph,
                        Err(e) => {
                            failures.push(format!("{tag}: {e}"));
                            continue;
                        }
                    };
                    let spec = ClassSpec::AlmostRegular { h: h as u64, sizes: sizes.clone() };
                    let rep = verify_factorization(&g, &CompleteTarget::uniform(h, lambda), &spec);
                    if !rep.passed() {
                        failures.push(format!("{tag}: {:?}", rep.violations.first()));
                    }
                    for (j, &a) in sizes.iter().enumerate() {
                        let color = j as u32 + 1;
                        let (lo, hi) = ((h as u64 * a) / n as u64, (h as u64 * a).div_ceil(n as u64));
                        if g.vertices().iter().any(|&x| {
                            let d = oracle::degree(&g, x, color);
                            d < lo || d > hi
                        }) {
                            failures.push(format!("{tag}: class {color} degree outside [{lo}, {hi}]"));
                        }
                        let want = a * (h as u64 - 1) >= n as u64 - 1;
                        let is = oracle::components(&g, Some(color)) == 1;
                        if want != is {
                            failures.push(format!("{tag}: class {color} connected {is}, expected {want}"));
                        }
                        if is {
                            connected += 1;
                        } else {
                            split += 1;
                        }
                    }
                }
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{runs} decompositions, {connected} connected and {split} disconnected classes as predicted"),
    )
}

/// Applies the `kind`-th corruption to one hinge of a part, or returns
/// `None` when the chosen edge does not allow it.
fn corrupt(
    r: &mut ChaCha8Rng,
    f: &Hypergraph,
    parts: &[VertexId],
    kind: usize,
) -> Option<(Hypergraph, &'static str)> {
    let part_set: BTreeSet<VertexId> = parts.iter().copied().collect();
    let others: Vec<VertexId> = f.vertices().iter().copied().filter(|x| !part_set.contains(x)).collect();
    let holders: Vec<usize> = (0..f.edge_count())
        .filter(|&p| f.edges()[p].edge.support().any(|x| part_set.contains(&x)))
        .collect();
    let p = holders[r.gen_range(0..holders.len())];
    let mut g = f.clone();
    let edge = &mut g.edges_mut()[p].edge;
    let inside: Vec<VertexId> = edge.support().filter(|x| part_set.contains(x)).collect();
    let x = inside[r.gen_range(0..inside.len())];
    let label = match kind {
        0 => {
            let y = *others.get(r.gen_range(0..others.len().max(1)))?;
            edge.remove(x, 1);
            edge.add(y, 1);
            "hinge moved off the parts"
        }
        1 => {
            if edge.size() < 2 {
                return None;
            }
            edge.remove(x, 1);
            "hinge deleted"
        }
        2 => {
            edge.add(x, 1);
            "hinge duplicated"
        }
        3 => {
            let absent: Vec<VertexId> = parts.iter().copied().filter(|y| !edge.contains(*y)).collect();
            let y = *absent.get(r.gen_range(0..absent.len().max(1)))?;
            edge.add(y, 1);
            "hinge added"
        }
        _ => {
            let present: Vec<VertexId> = inside.iter().copied().filter(|&y| y != x).collect();
            let y = *present.get(r.gen_range(0..present.len().max(1)))?;
            edge.remove(x, 1);
            edge.add(y, 1);
            "hinge moved onto a part already in the edge"
        }
    };
    Some((g, label))
}

fn mutation_detection() -> Outcome {
    let mut r = rng(7);
    let mut failures = Vec::new();
    let mut by_kind: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut mutants = 0;
    while mutants < 100 {
        let n = r.gen_range(2..=5);
        let g = detachment_input(&mut r, n);
        if g.degree(v(0), None).unwrap() == 0 {
            continue;
        }
        let out = detach(&g, v(0), n, false).unwrap();
        if !verify_detachment(&g, &out.hypergraph, &out.parts, &out.psi).unwrap().passed() {
            failures.push("base detachment does not pass".into());
            continue;
        }
        let Some((bad, label)) = corrupt(&mut r, &out.hypergraph, &out.parts, mutants % 5) else {
            continue;
        };
        mutants += 1;
        *by_kind.entry(label).or_insert(0) += 1;
        if let Ok(rep) = verify_detachment(&g, &bad, &out.parts, &out.psi) {
            if rep.passed() {
                failures.push(format!("mutant {mutants} ({label}) passed verification"));
            }
        }
    }
    let kinds: Vec<String> = by_kind.iter().map(|(k, c)| format!("{c} {k}")).collect();
    Outcome::new(&failures, format!("{mutants} mutants: {}", kinds.join(", ")))
}
