//! Criteria 4 and 5: extension and completion constructions against
//! condition oracles computed from the input.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hyperdetach::constructors::baranyai::baranyai_connected;
use hyperdetach::constructors::partial::{embed_partial_r, PartialProblem, H3_THRESHOLD, H4_THRESHOLD, H5_THRESHOLD, R2_BRANCH};
use hyperdetach::constructors::pieces::{
    embed_friendly, embed_minus_v, PiecesProblem, CLASS_SIZE, COMPONENT_BOUND, NO_UNIFORM_COMPONENT, REGULAR_CLASSES,
    R_AT_LEAST_TWO,
};
use hyperdetach::constructors::regular::{
    embed_r_to_s, RegularProblem, GROWTH, H4_RANGE, H5_RANGE, OLD_EDGE_SHARE, RATIO, VERTEX_RANGE,
};
use hyperdetach::constructors::{
    Construction, ADMISSIBLE, EDGE_COUNT_WINDOW, INPUT_SHAPE, NO_REGULAR_COMPONENT, PARTIAL_FACTORIZATION,
};
use hyperdetach::verify::{verify_extension, verify_factorization, verify_friendly, ClassSpec, CompleteTarget};
use hyperdetach::{ColorId, Edge, Hypergraph, Result, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::common::subsets;
use crate::oracle::{admissible, binom, class_shape, keeps_edges, ClassShape};
use crate::{rng, Outcome};

/// Refusal witnesses kept per condition.
const WITNESS_CAP: usize = 20;

/// Verdicts of one theorem's sweep.
struct Tally {
    name: &'static str,
    /// Stop building once this many outputs verified; `None` builds all.
    target: Option<usize>,
    /// Also run candidates that break several conditions.
    run_multi: bool,
    built: Vec<String>,
    witnesses: BTreeMap<&'static str, usize>,
    refusals: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, target: Option<usize>, run_multi: bool) -> Self {
        Tally {
            name,
            target,
            run_multi,
            built: Vec::new(),
            witnesses: BTreeMap::new(),
            refusals: 0,
            failures: Vec::new(),
        }
    }

    fn full(&self) -> bool {
        self.target.is_some_and(|t| self.built.len() >= t)
    }

    /// Whether a candidate with these failed conditions should be run.
    fn wants(&self, failed: &[&'static str]) -> bool {
        match failed {
            [] => !self.full(),
            [one] => self.run_multi || self.witnesses.get(one).copied().unwrap_or(0) < WITNESS_CAP,
            _ => self.run_multi,
        }
    }

    fn judge<T>(
        &mut self,
        tag: String,
        failed: Vec<&'static str>,
        run: impl FnOnce() -> Result<T>,
        verify: impl FnOnce(&T) -> std::result::Result<(), String>,
    ) {
        if !self.wants(&failed) {
            return;
        }
        match (run(), failed.as_slice()) {
            (Ok(out), []) => match verify(&out) {
                Ok(()) => self.built.push(tag),
                Err(e) => self.failures.push(format!("{}: {tag}: {e}", self.name)),
            },
            (Err(e), []) => self.failures.push(format!("{}: {tag}: conditions hold but got {e}", self.name)),
            (Ok(_), _) => self.failures.push(format!("{}: {tag}: built although {failed:?} fail", self.name)),
            (Err(e), _) => match e.condition() {
                Some(c) if failed.contains(&c) => {
                    self.refusals += 1;
                    if let [one] = failed.as_slice() {
                        *self.witnesses.entry(one).or_insert(0) += 1;
                    }
                }
                _ => self.failures.push(format!("{}: {tag}: expected refusal for {failed:?}, got {e}", self.name)),
            },
        }
    }

    fn summary(&self, conditions: &[&'static str]) -> String {
        let missing: Vec<&str> = conditions.iter().copied().filter(|c| !self.witnesses.contains_key(c)).collect();
        let mut s = format!(
            "{}: {} built, {} refusals, {} single-condition witnesses",
            self.name,
            self.built.len(),
            self.refusals,
            self.witnesses.values().sum::<usize>()
        );
        if !missing.is_empty() {
            s.push_str(&format!(" (none for: {})", missing.join("; ")));
        }
        s
    }
}

fn failed(conditions: Vec<(&'static str, bool)>) -> Vec<&'static str> {
    conditions.into_iter().filter(|c| !c.1).map(|c| c.0).collect()
}

/// Class shapes of the used colors, plus the shape of an unused class when
/// some color in `1..=k` is unused.
fn class_table(g: &Hypergraph, k: u64, r: u64, h: u32) -> Vec<ClassShape> {
    let used: BTreeSet<ColorId> = g.edges().iter().map(|e| e.color).collect();
    let mut out: Vec<ClassShape> = used.iter().map(|&c| class_shape(g, c, r, h)).collect();
    if (used.len() as u64) < k || used.iter().any(|&c| c == 0 || c as u64 > k) {
        out.push(ClassShape {
            components: g.vertex_count() as u64,
            ..ClassShape::default()
        });
    }
    out
}

fn colors_in_range(g: &Hypergraph, k: u64) -> bool {
    g.edges().iter().all(|e| e.color >= 1 && e.color as u64 <= k)
}

fn regular_output(out: &Hypergraph, n: u64, h: u32, lambda: u64, degrees: Vec<u64>) -> std::result::Result<(), String> {
    if out.vertex_count() as u64 != n {
        return Err(format!("{} vertices, expected {n}", out.vertex_count()));
    }
    let rep = verify_factorization(out, &CompleteTarget::uniform(h, lambda), &ClassSpec::Regular(degrees));
    if !rep.passed() {
        return Err(format!("not a factorization: {:?}", rep.violations.first()));
    }
    if !rep.all_connected() {
        return Err("some class is disconnected".into());
    }
    Ok(())
}

fn extends(g: &Hypergraph, out: &Hypergraph) -> std::result::Result<(), String> {
    let rep = verify_extension(g, out);
    if !rep.ok {
        return Err(format!("not an extension: {:?}", rep.unmatched.first()));
    }
    if !keeps_edges(g, out) {
        return Err("an input edge changed".into());
    }
    Ok(())
}

/// `lambda K_m^h` on `0..m` with edge `i` (in lexicographic order) colored
/// by `color(i)`.
fn colored_complete(m: u32, h: usize, lambda: u64, k: u64, color: impl Fn(usize) -> ColorId) -> Hypergraph {
    let mut g = Hypergraph::with_vertices(k.max(1) as u32, (0..m).map(VertexId));
    let mut i = 0;
    for s in subsets(m, h) {
        for _ in 0..lambda {
            g.add_edge(Edge::from_vertices(s.iter().copied()), color(i)).unwrap();
            i += 1;
        }
    }
    g
}

/// Conditions for extending a partial `r`-factorization of `lambda K_m^h`.
fn partial_conditions(g: &Hypergraph, n: u64, r: u64, lambda: u64, h: u64) -> Vec<(&'static str, bool)> {
    let m = g.vertex_count() as u64;
    let mut out = vec![(INPUT_SHAPE, n > m && (h == 2 || m > h))];
    let ok = admissible(n, r, lambda, h);
    out.push((ADMISSIBLE, ok));
    let k = lambda * binom(n - 1, h - 1) / r;
    let classes = if ok { class_table(g, k, r, h as u32) } else { Vec::new() };
    if ok {
        out.push((PARTIAL_FACTORIZATION, colors_in_range(g, k) && classes.iter().all(|c| c.max_degree <= r)));
        out.push((NO_REGULAR_COMPONENT, classes.iter().all(|c| !c.regular_component)));
    }
    let (nf, mf) = (n as f64, m as f64);
    let gamma = (8.0 * mf * mf - 16.0 * mf - 7.0).max(0.0).sqrt();
    match h {
        2 => {
            if ok {
                let window = classes.iter().all(|c| {
                    let e = c.edges as f64;
                    let lo = (r * m) as f64 - (r * n) as f64 / 2.0;
                    let hi = (r * n) as f64 / 2.0 - (n - m + c.components - 1) as f64;
                    lo <= e && e <= hi
                });
                out.push((EDGE_COUNT_WINDOW, window));
            }
        }
        3 => {
            out.push((H3_THRESHOLD, nf > 2.0 * mf + (gamma - 1.0) / 2.0));
            if r == 2 && ok {
                let few = classes.iter().all(|c| c.components as f64 <= (2.0 * mf + gamma) / 5.0 + 1.0);
                out.push((R2_BRANCH, nf >= 3.5 * mf - 3.0 || few));
            }
        }
        4 => out.push((H4_THRESHOLD, nf >= 4.847323 * mf)),
        _ => out.push((H5_THRESHOLD, nf >= 6.285214 * mf)),
    }
    out
}

fn check_partial_output(g: &Hypergraph, c: &Construction, n: u64, r: u64, lambda: u64, h: u64) -> std::result::Result<(), String> {
    let k = lambda * binom(n - 1, h - 1) / r;
    regular_output(&c.hypergraph, n, h as u32, lambda, vec![r; k as usize])?;
    extends(g, &c.hypergraph)
}

/// A random partial `r`-factorization of `lambda K_m` with colors in `1..=k`,
/// drawing colors from a random subset first so that some classes fill up.
fn random_partial_graph(rng: &mut ChaCha8Rng, m: u32, lambda: u64, k: u64, r: u64) -> Option<Hypergraph> {
    let mut pairs: Vec<Vec<VertexId>> = Vec::new();
    for s in subsets(m, 2) {
        for _ in 0..lambda {
            pairs.push(s.clone());
        }
    }
    let all: Vec<ColorId> = (1..=k as ColorId).collect();
    'attempt: for _ in 0..30 {
        pairs.shuffle(rng);
        let width = rng.gen_range(1..=all.len());
        let focus: Vec<ColorId> = all.choose_multiple(rng, width).copied().collect();
        let mut deg: HashMap<(VertexId, ColorId), u64> = HashMap::new();
        let mut g = Hypergraph::with_vertices(k as u32, (0..m).map(VertexId));
        for p in &pairs {
            let free = |c: &ColorId| p.iter().all(|&x| deg.get(&(x, *c)).copied().unwrap_or(0) < r);
            let mut options: Vec<ColorId> = focus.iter().copied().filter(free).collect();
            if options.is_empty() {
                options = all.iter().copied().filter(free).collect();
            }
            let Some(&c) = options.choose(rng) else {
                continue 'attempt;
            };
            for &x in p {
                *deg.entry((x, c)).or_insert(0) += 1;
            }
            g.add_edge(Edge::from_vertices(p.iter().copied()), c).unwrap();
        }
        return Some(g);
    }
    None
}

pub fn graph_sweep() -> Outcome {
    let mut r_ = rng(4);
    let mut t = Tally::new("h = 2 extension", None, true);
    let mut skipped = 0;
    for m in 1..=6u32 {
        for n in m as u64 + 1..=13 {
            for lambda in 1..=2u64 {
                for r in 1..=4u64 {
                    let k = (lambda * (n - 1)).div_ceil(r).max(1);
                    for sample in 0..3 {
                        let Some(g) = random_partial_graph(&mut r_, m, lambda, k, r) else {
                            skipped += 1;
                            continue;
                        };
                        let p = PartialProblem { n, r, lambda, h: 2 };
                        let tag = format!("m = {m}, n = {n}, lambda = {lambda}, r = {r}, sample {sample}");
                        t.judge(
                            tag,
                            failed(partial_conditions(&g, n, r, lambda, 2)),
                            || embed_partial_r(&g, p),
                            |c| check_partial_output(&g, c, n, r, lambda, 2),
                        );
                    }
                }
            }
        }
    }
    let summary = format!(
        "{}; {skipped} samples without a coloring",
        t.summary(&[ADMISSIBLE, NO_REGULAR_COMPONENT, EDGE_COUNT_WINDOW])
    );
    let mut failures = t.failures.clone();
    if t.built.is_empty() || t.refusals == 0 {
        failures.push("sweep did not exercise both outcomes".into());
    }
    Outcome::new(&failures, summary)
}

fn partial_sweep(h: u64, n_max: u64, r_max: u64) -> Tally {
    let name = match h {
        3 => "partial h = 3",
        4 => "partial h = 4",
        _ => "partial h = 5",
    };
    let mut t = Tally::new(name, Some(5), false);
    for n in h + 2..=n_max {
        for m in h as u32..=(h as u32 + 2).min(n as u32 - 1) {
            for lambda in 1..=2u64 {
                let edges = (lambda * binom(m as u64, h)) as usize;
                for r in 1..=r_max {
                    let k = (lambda * binom(n - 1, h - 1) / r).max(1);
                    for variant in 0..2 {
                        let g = colored_complete(m, h as usize, lambda, k, |i| {
                            if variant == 0 {
                                (i as u64 % k) as ColorId + 1
                            } else {
                                1
                            }
                        });
                        debug_assert_eq!(g.edge_count(), edges);
                        let p = PartialProblem { n, r, lambda, h };
                        let tag = format!("m = {m}, n = {n}, lambda = {lambda}, r = {r}, variant {variant}");
                        t.judge(
                            tag,
                            failed(partial_conditions(&g, n, r, lambda, h)),
                            || embed_partial_r(&g, p),
                            |c| check_partial_output(&g, c, n, r, lambda, h),
                        );
                    }
                }
            }
        }
    }
    t
}

fn regular_conditions(m: u64, p: &RegularProblem) -> Vec<(&'static str, bool)> {
    let (n, r, s, lambda, h) = (p.n, p.r, p.s, p.lambda, p.h);
    let mut out = vec![(VERTEX_RANGE, n > m && m > h)];
    if !(n > m && m > h) {
        return out;
    }
    out.push((ADMISSIBLE, admissible(m, r, lambda, h) && admissible(n, s, lambda, h)));
    let (old, new) = (binom(m - 1, h - 1) as f64, binom(n - 1, h - 1) as f64);
    let ratio = s as f64 / r as f64;
    out.push((RATIO, r < s && ratio * old <= new + 1e-9));
    let strict = ratio * old < new - 1e-9;
    match h {
        2 | 3 => out.push((GROWTH, !strict || (n as f64) >= (h * m) as f64 / (h - 1) as f64)),
        4 => out.push((H4_RANGE, n >= 4 * m)),
        _ => out.push((H5_RANGE, n >= 5 * m)),
    }
    if h == 3 {
        let lhs = 3 * r as i128 * (n - m) as i128 * binom(m, 2) as i128;
        let rhs = (3 * m as i128 - n as i128) * (r as i128 * binom(n - 1, 2) as i128 - s as i128 * binom(m - 1, 2) as i128);
        out.push((OLD_EDGE_SHARE, lhs >= rhs));
    }
    out
}

fn regular_sweep(h: u64, m_max: u64, n_max: u64, r_max: u64, s_max: u64) -> Tally {
    let name = match h {
        2 => "r to s, h = 2",
        3 => "r to s, h = 3",
        4 => "r to s, h = 4",
        _ => "r to s, h = 5",
    };
    let mut t = Tally::new(name, Some(5), false);
    let mut inputs: HashMap<(u64, u64, u64), Hypergraph> = HashMap::new();
    for n in h + 1..=n_max {
        for m in h..=m_max.min(n - 1) {
            for lambda in 1..=2u64 {
                for r in 1..=r_max {
                    for s in r + 1..=s_max {
                        let p = RegularProblem { n, r, s, lambda, h };
                        let failed = failed(regular_conditions(m, &p));
                        if !t.wants(&failed) {
                            continue;
                        }
                        let g = inputs.entry((m, lambda, r)).or_insert_with(|| {
                            if admissible(m, r, lambda, h) {
                                let q = lambda * binom(m - 1, h - 1) / r;
                                let sizes = vec![r * m / h; q as usize];
                                baranyai_connected(m as u32, h as u32, lambda, &sizes).unwrap().hypergraph
                            } else {
                                colored_complete(m as u32, h as usize, lambda, 1, |_| 1)
                            }
                        });
                        let g = &*g;
                        let tag = format!("m = {m}, n = {n}, lambda = {lambda}, r = {r}, s = {s}");
                        t.judge(tag, failed, || embed_r_to_s(g, p), |c| {
                            let k = lambda * binom(n - 1, h - 1) / s;
                            regular_output(&c.hypergraph, n, h as u32, lambda, vec![s; k as usize])?;
                            extends(g, &c.hypergraph)
                        });
                    }
                }
            }
        }
    }
    t
}

/// Conditions for completing a partial factorization of `lambda K_n^h - V`
/// given on the vertices outside `V`.
fn pieces_conditions(q: &Hypergraph, p: &PiecesProblem) -> Vec<(&'static str, bool)> {
    let (n, r, lambda, h) = (p.n, p.r, p.lambda, p.h);
    let outside = q.vertex_count() as u64;
    let mut out = vec![(INPUT_SHAPE, n > outside && outside >= 1)];
    let ok = admissible(n, r, lambda, h);
    out.push((ADMISSIBLE, ok));
    out.push((R_AT_LEAST_TWO, r >= 2));
    if !ok {
        return out;
    }
    let m = n - outside;
    let k = lambda * binom(n - 1, h - 1) / r;
    let classes = class_table(q, k, r, h as u32);
    out.push((PARTIAL_FACTORIZATION, colors_in_range(q, k) && classes.iter().all(|c| c.max_degree <= r)));
    out.push((REGULAR_CLASSES, classes.iter().all(|c| c.min_degree == r && c.max_degree == r)));
    out.push((NO_UNIFORM_COMPONENT, classes.iter().all(|c| !c.uniform_component)));
    out.push((CLASS_SIZE, classes.iter().all(|c| (h * c.edges) as f64 <= (r * n) as f64)));
    let bound = classes.iter().all(|c| {
        let weighted: u64 = (1..h).map(|i| i * c.by_size.get(&(i as u32 + 1)).copied().unwrap_or(0)).sum();
        let rhs = (r * n) as f64 * (1.0 - 1.0 / h as f64) - weighted as f64 - m as f64 + 1.0;
        c.components as f64 <= rhs + 1e-9
    });
    out.push((COMPONENT_BOUND, bound));
    out
}

const PIECES_CONDITIONS: [&str; 8] = [
    INPUT_SHAPE,
    ADMISSIBLE,
    R_AT_LEAST_TWO,
    PARTIAL_FACTORIZATION,
    REGULAR_CLASSES,
    NO_UNIFORM_COMPONENT,
    CLASS_SIZE,
    COMPONENT_BOUND,
];

/// Connected `r`-factorizations of `lambda K_n^h` on `0..n`, cut along
/// vertex sets of every size.
fn pieces_sweeps() -> (Tally, Tally) {
    let mut minus = Tally::new("minus V", Some(5), false);
    let mut friendly = Tally::new("friendly", Some(5), false);
    for n in 3..=9u64 {
        for h in 2..=4u64.min(n - 1) {
            for lambda in 1..=2u64 {
                for r in (1..=8u64).filter(|&r| admissible(n, r, lambda, h)) {
                    let k = lambda * binom(n - 1, h - 1) / r;
                    let sizes = vec![r * n / h; k as usize];
                    let f = baranyai_connected(n as u32, h as u32, lambda, &sizes).unwrap().hypergraph;
                    for m in 1..n {
                        for low in [false, true] {
                            let v: BTreeSet<VertexId> = if low {
                                (0..m as u32).map(VertexId).collect()
                            } else {
                                (n as u32 - m as u32..n as u32).map(VertexId).collect()
                            };
                            let q = f.remove_vertices(&v);
                            let stripped = f.strip_contained_edges(&v);
                            for r_asked in [r, r + 1] {
                                let p = PiecesProblem { n, r: r_asked, lambda, h };
                                let tag = format!(
                                    "n = {n}, h = {h}, lambda = {lambda}, r = {r_asked}, |V| = {m}, V {}",
                                    if low { "low" } else { "high" }
                                );
                                let failed = failed(pieces_conditions(&q, &p));
                                minus.judge(tag.clone(), failed.clone(), || embed_minus_v(&q, p), |c| {
                                    let k = lambda * binom(n - 1, h - 1) / r_asked;
                                    regular_output(&c.hypergraph, n, h as u32, lambda, vec![r_asked; k as usize])?;
                                    extends(&q, &c.hypergraph)
                                });
                                friendly.judge(tag, failed, || embed_friendly(&stripped, &v, p), |c| {
                                    let k = lambda * binom(n - 1, h - 1) / r_asked;
                                    let out = &c.construction.hypergraph;
                                    regular_output(out, n, h as u32, lambda, vec![r_asked; k as usize])?;
                                    if !verify_friendly(&stripped, &c.friendly, &v) {
                                        return Err("recoloring is not friendly".into());
                                    }
                                    extends(&c.friendly, out)
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    (minus, friendly)
}

pub fn hypergraph_embeddings() -> Outcome {
    let mut tallies = vec![
        (partial_sweep(3, 16, 12), vec![INPUT_SHAPE, ADMISSIBLE, PARTIAL_FACTORIZATION, NO_REGULAR_COMPONENT, H3_THRESHOLD, R2_BRANCH]),
        (partial_sweep(4, 26, 12), vec![INPUT_SHAPE, ADMISSIBLE, PARTIAL_FACTORIZATION, NO_REGULAR_COMPONENT, H4_THRESHOLD]),
        (partial_sweep(5, 38, 120), vec![INPUT_SHAPE, ADMISSIBLE, PARTIAL_FACTORIZATION, NO_REGULAR_COMPONENT, H5_THRESHOLD]),
        (regular_sweep(2, 6, 14, 4, 16), vec![VERTEX_RANGE, ADMISSIBLE, RATIO, GROWTH]),
        (regular_sweep(3, 7, 16, 6, 40), vec![VERTEX_RANGE, ADMISSIBLE, RATIO, GROWTH, OLD_EDGE_SHARE]),
        (regular_sweep(4, 6, 24, 4, 60), vec![VERTEX_RANGE, ADMISSIBLE, RATIO, H4_RANGE]),
        (regular_sweep(5, 6, 30, 5, 30), vec![VERTEX_RANGE, ADMISSIBLE, RATIO, H5_RANGE]),
    ];
    let (minus, friendly) = pieces_sweeps();
    tallies.push((minus, PIECES_CONDITIONS.to_vec()));
    tallies.push((friendly, PIECES_CONDITIONS.to_vec()));
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for (t, conditions) in &tallies {
        failures.extend(t.failures.iter().cloned());
        if t.built.len() < 5 {
            failures.push(format!("{}: only {} verified outputs", t.name, t.built.len()));
        }
        lines.push(format!("{} [first: {}]", t.summary(conditions), t.built.first().map_or("none", |s| s.as_str())));
    }
    Outcome::new(&failures, lines.join(" | "))
}
