//! Independent checkers for detachments, factorizations and extensions.
//!
//! Nothing here calls the engine, the wing decomposition or the
//! constructors: degrees, multiplicities, components and wing counts are
//! recomputed directly from the vertex and edge lists.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::arith::binom;
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, Hypergraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Each part gets its share of the degree of the split vertex.
    DegreeShare,
    /// The same within every color class.
    ClassDegreeShare,
    /// Each set of parts gets its share of every edge multiplicity.
    MultiplicityShare,
    /// The same within every color class.
    ClassMultiplicityShare,
    /// No edge holds a part twice.
    PartSimple,
    /// Collapsing the parts gives back the original hypergraph.
    RoundTrip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FairnessReport {
    pub checks: u64,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassConnectivity {
    pub color: ColorId,
    pub components_before: usize,
    pub components_after: usize,
    pub margin: i64,
    /// Whether the margin reaches `n - 1`.
    pub predicted: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConnectivityReport {
    pub classes: Vec<ClassConnectivity>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetachmentReport {
    pub fairness: FairnessReport,
    pub connectivity: ConnectivityReport,
}

impl DetachmentReport {
    pub fn passed(&self) -> bool {
        self.fairness.violations.is_empty() && self.connectivity.classes.iter().all(|c| c.ok)
    }
}

/// Component labels of the hypergraph on `vertices` with the given edges,
/// by breadth-first search.
fn labels_of(vertices: &BTreeSet<VertexId>, edges: &[&Edge]) -> BTreeMap<VertexId, usize> {
    let mut incident: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for (p, e) in edges.iter().enumerate() {
        for v in e.support() {
            incident.entry(v).or_default().push(p);
        }
    }
    let mut label: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut next = 0;
    for &start in vertices {
        if label.contains_key(&start) {
            continue;
        }
        label.insert(start, next);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &p in incident.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                for w in edges[p].support() {
                    if let std::collections::btree_map::Entry::Vacant(e) = label.entry(w) {
                        e.insert(next);
                        queue.push_back(w);
                    }
                }
            }
        }
        next += 1;
    }
    label
}

/// Components of one color class (or of everything).
pub fn class_components(g: &Hypergraph, color: Option<ColorId>) -> BTreeMap<VertexId, usize> {
    let edges: Vec<&Edge> = g
        .edges()
        .iter()
        .filter(|e| color.is_none_or(|c| c == e.color))
        .map(|e| &e.edge)
        .collect();
    labels_of(g.vertices(), &edges)
}

pub fn component_count(g: &Hypergraph, color: Option<ColorId>) -> usize {
    class_components(g, color).values().collect::<BTreeSet<_>>().len()
}

/// Edges of every color, grouped in one pass.
fn edges_by_color(g: &Hypergraph) -> HashMap<ColorId, Vec<&Edge>> {
    let mut out: HashMap<ColorId, Vec<&Edge>> = HashMap::new();
    for e in g.edges() {
        out.entry(e.color).or_default().push(&e.edge);
    }
    out
}

fn count_of(vertices: &BTreeSet<VertexId>, edges: Option<&Vec<&Edge>>) -> usize {
    match edges {
        None => vertices.len(),
        Some(es) => labels_of(vertices, es).values().collect::<BTreeSet<_>>().len(),
    }
}

/// Degree of `alpha` in a color class minus its number of wings, counted as
/// edges made of `alpha` alone plus components of the `alpha`-component with
/// `alpha` deleted.
pub fn wing_margin(g: &Hypergraph, alpha: VertexId, color: ColorId) -> i64 {
    let edges: Vec<&Edge> = g.edges().iter().filter(|e| e.color == color).map(|e| &e.edge).collect();
    margin_of(g.vertices(), &edges, alpha)
}

fn margin_of(vertices: &BTreeSet<VertexId>, edges: &[&Edge], alpha: VertexId) -> i64 {
    let labels = labels_of(vertices, edges);
    let home = labels[&alpha];
    let mut degree = 0i64;
    let mut loops = 0i64;
    let mut adjacency: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for e in edges {
        degree += e.multiplicity(alpha) as i64;
        let rest: Vec<VertexId> = e.support().filter(|&v| v != alpha).collect();
        if rest.is_empty() {
            loops += 1;
            continue;
        }
        for w in &rest[1..] {
            adjacency.entry(rest[0]).or_default().push(*w);
            adjacency.entry(*w).or_default().push(rest[0]);
        }
    }
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut pieces = 0i64;
    for (&v, &l) in &labels {
        if l != home || v == alpha || seen.contains(&v) {
            continue;
        }
        pieces += 1;
        seen.insert(v);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in adjacency.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    degree - loops - pieces
}

fn subsets_of(items: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(items: &[VertexId], k: usize, i: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        if i == items.len() || items.len() - i < k - cur.len() {
            return;
        }
        cur.push(items[i]);
        go(items, k, i + 1, cur, out);
        cur.pop();
        go(items, k, i + 1, cur, out);
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// Parts are enumerated subset by subset up to this many parts; beyond it
/// the check groups the edges of the detachment instead.
const ENUMERATE_PARTS: usize = 12;

/// Checks that `f` with `parts` is a fair detachment of `h`, where `psi`
/// sends every part to the split vertex. Differences in edge ids or colors
/// are hard errors; everything else is reported.
pub fn verify_detachment(
    h: &Hypergraph,
    f: &Hypergraph,
    parts: &[VertexId],
    psi: &BTreeMap<VertexId, VertexId>,
) -> Result<DetachmentReport> {
    let alpha = *psi
        .values()
        .next()
        .ok_or_else(|| Error::Invalid("empty part map".into()))?;
    if psi.values().any(|&a| a != alpha) || !h.has_vertex(alpha) {
        return Err(Error::Invalid("part map must send every part to one vertex of the original".into()));
    }
    let part_set: BTreeSet<VertexId> = parts.iter().copied().collect();
    if part_set.len() != parts.len() || part_set != psi.keys().copied().collect() {
        return Err(Error::Invalid("parts and part map disagree".into()));
    }
    if let Some(p) = parts.iter().find(|p| !f.has_vertex(**p)) {
        return Err(Error::UnknownVertex(*p));
    }
    let original: HashMap<_, _> = h.edges().iter().map(|e| (e.id, e)).collect();
    if original.len() != f.edge_count() {
        return Err(Error::Invalid("edge counts differ".into()));
    }
    for e in f.edges() {
        match original.get(&e.id) {
            None => return Err(Error::Invalid(format!("edge {} is not in the original", e.id))),
            Some(o) if o.color != e.color => {
                return Err(Error::Invalid(format!("edge {} changed color", e.id)));
            }
            _ => {}
        }
    }

    let n = parts.len() as u64;
    let mut rep = FairnessReport::default();
    let flag = |rep: &mut FairnessReport, condition, detail: String| rep.violations.push(Violation { condition, detail });

    // collapsing the parts must give back h
    let image: BTreeSet<VertexId> = f
        .vertices()
        .iter()
        .map(|v| if part_set.contains(v) { alpha } else { *v })
        .collect();
    if &image != h.vertices() {
        flag(&mut rep, Condition::RoundTrip, "vertex sets differ after collapsing".into());
    }
    for e in f.edges() {
        let back = Edge::from_pairs(
            e.edge
                .occurrences()
                .iter()
                .map(|&(v, m)| (if part_set.contains(&v) { alpha } else { v }, m)),
        );
        if back != original[&e.id].edge {
            flag(&mut rep, Condition::RoundTrip, format!("edge {} collapses to {back}", e.id));
        }
        for &(v, m) in e.edge.occurrences() {
            if m > 1 && part_set.contains(&v) {
                flag(&mut rep, Condition::PartSimple, format!("edge {} holds part {v} {m} times", e.id));
            }
        }
    }

    let mut classes: BTreeSet<ColorId> = (1..=h.k()).collect();
    classes.extend(h.edges().iter().map(|e| e.color));

    // degree shares
    let mut target: BTreeMap<Option<ColorId>, u64> = BTreeMap::new();
    for e in h.edges() {
        let t = e.edge.multiplicity(alpha) as u64;
        *target.entry(None).or_insert(0) += t;
        *target.entry(Some(e.color)).or_insert(0) += t;
    }
    let mut got: HashMap<(Option<ColorId>, VertexId), u64> = HashMap::new();
    for e in f.edges() {
        for &(v, m) in e.edge.occurrences() {
            if part_set.contains(&v) {
                *got.entry((None, v)).or_insert(0) += m as u64;
                *got.entry((Some(e.color), v)).or_insert(0) += m as u64;
            }
        }
    }
    for class in std::iter::once(None).chain(classes.iter().map(|&c| Some(c))) {
        let d = target.get(&class).copied().unwrap_or(0);
        let (lo, hi) = (d / n, d.div_ceil(n));
        for &p in parts {
            rep.checks += 1;
            let x = got.get(&(class, p)).copied().unwrap_or(0);
            if x < lo || x > hi {
                let condition = if class.is_none() { Condition::DegreeShare } else { Condition::ClassDegreeShare };
                flag(&mut rep, condition, format!("part {p} in class {class:?} has degree {x}, window [{lo}, {hi}]"));
            }
        }
    }

    // multiplicity shares
    let mut before: BTreeMap<(Option<ColorId>, u64, Edge), u64> = BTreeMap::new();
    for e in h.edges() {
        let t = e.edge.multiplicity(alpha) as u64;
        let rest = e.edge.restricted(|v| v != alpha);
        *before.entry((None, t, rest.clone())).or_insert(0) += 1;
        *before.entry((Some(e.color), t, rest)).or_insert(0) += 1;
    }
    let mut after: BTreeMap<(Option<ColorId>, u64, Edge), BTreeMap<Vec<VertexId>, u64>> = BTreeMap::new();
    for e in f.edges() {
        let mut u = Vec::new();
        for &(v, m) in e.edge.occurrences() {
            if part_set.contains(&v) {
                u.extend(std::iter::repeat_n(v, m as usize));
            }
        }
        let rest = e.edge.restricted(|v| !part_set.contains(&v));
        let t = u.len() as u64;
        *after.entry((None, t, rest.clone())).or_default().entry(u.clone()).or_insert(0) += 1;
        *after.entry((Some(e.color), t, rest)).or_default().entry(u).or_insert(0) += 1;
    }
    let sorted_parts: Vec<VertexId> = part_set.iter().copied().collect();
    for (key, &total) in &before {
        let (class, t, rest) = key;
        let condition = if class.is_none() { Condition::MultiplicityShare } else { Condition::ClassMultiplicityShare };
        let ways = binom(n, *t);
        if ways == 0 {
            flag(&mut rep, condition, format!("{total} edges hold the split vertex {t} > n times"));
            continue;
        }
        let (lo, hi) = (total / ways, total.div_ceil(ways));
        let empty = BTreeMap::new();
        let counts = after.get(key).unwrap_or(&empty);
        let report = |rep: &mut FairnessReport, u: &[VertexId], x: u64| {
            rep.checks += 1;
            if x < lo || x > hi {
                flag(
                    rep,
                    condition,
                    format!("class {class:?}: parts {u:?} with {rest} occur {x} times, window [{lo}, {hi}]"),
                );
            }
        };
        if sorted_parts.len() <= ENUMERATE_PARTS {
            for u in subsets_of(&sorted_parts, *t as usize) {
                let x = counts.get(&u).copied().unwrap_or(0);
                report(&mut rep, &u, x);
            }
        } else {
            for (u, &x) in counts {
                report(&mut rep, u, x);
            }
            if lo > 0 && (counts.len() as u64) < ways {
                flag(
                    &mut rep,
                    condition,
                    format!("class {class:?}: some set of {t} parts misses {rest} entirely, window [{lo}, {hi}]"),
                );
            }
        }
    }
    for (key, counts) in &after {
        if !before.contains_key(key) {
            let (class, _, rest) = key;
            let condition = if class.is_none() { Condition::MultiplicityShare } else { Condition::ClassMultiplicityShare };
            for (u, x) in counts {
                flag(&mut rep, condition, format!("class {class:?}: parts {u:?} with {rest} occur {x} times, window [0, 0]"));
            }
        }
    }

    let mut connectivity = ConnectivityReport::default();
    let grouped_h = edges_by_color(h);
    let grouped_f = edges_by_color(f);
    for &c in &classes {
        let components_before = count_of(h.vertices(), grouped_h.get(&c));
        let components_after = count_of(f.vertices(), grouped_f.get(&c));
        let margin = margin_of(h.vertices(), grouped_h.get(&c).map(Vec::as_slice).unwrap_or(&[]), alpha);
        let predicted = margin >= n as i64 - 1;
        connectivity.classes.push(ClassConnectivity {
            color: c,
            components_before,
            components_after,
            margin,
            predicted,
            ok: predicted == (components_before == components_after),
        });
    }
    Ok(DetachmentReport {
        fairness: rep,
        connectivity,
    })
}

/// The complete hypergraph with `lambda` copies of every `size`-subset, for
/// each `(size, lambda)` layer, on the vertex set of the checked hypergraph.
#[derive(Clone, Debug)]
pub struct CompleteTarget {
    pub layers: Vec<(u32, u64)>,
}

impl CompleteTarget {
    pub fn uniform(h: u32, lambda: u64) -> Self {
        CompleteTarget {
            layers: vec![(h, lambda)],
        }
    }
}

/// What each color class must look like. Class `j` (1-based) uses entry `j-1`.
#[derive(Clone, Debug)]
pub enum ClassSpec {
    /// Every vertex has degree exactly `r_j`.
    Regular(Vec<u64>),
    /// Every vertex has degree in `[q_j, r_j]`.
    Windows(Vec<(u64, u64)>),
    /// Class `j` has `sizes[j]` edges of size `h` and every degree lies in
    /// `[floor(h a_j / n), ceil(h a_j / n)]`.
    AlmostRegular { h: u64, sizes: Vec<u64> },
}

impl ClassSpec {
    fn len(&self) -> usize {
        match self {
            ClassSpec::Regular(r) => r.len(),
            ClassSpec::Windows(w) => w.len(),
            ClassSpec::AlmostRegular { sizes, .. } => sizes.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub color: ColorId,
    pub edges: u64,
    pub min_degree: u64,
    pub max_degree: u64,
    pub degree_ok: bool,
    pub components: usize,
    pub connected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub complete: bool,
    pub classes: Vec<ClassReport>,
    pub violations: Vec<String>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.complete && self.violations.is_empty() && self.classes.iter().all(|c| c.degree_ok)
    }

    pub fn all_connected(&self) -> bool {
        self.classes.iter().all(|c| c.connected)
    }
}

/// Whether `g` is exactly the complete hypergraph described by `target`.
pub fn is_complete(g: &Hypergraph, target: &CompleteTarget, violations: &mut Vec<String>) -> bool {
    let n = g.vertex_count() as u64;
    let mut counts: HashMap<&Edge, u64> = HashMap::new();
    let mut ok = true;
    for e in g.edges() {
        if !e.edge.is_simple() {
            violations.push(format!("edge {} repeats a vertex", e.id));
            ok = false;
        }
        *counts.entry(&e.edge).or_insert(0) += 1;
    }
    let lambda_of: BTreeMap<u32, u64> = target.layers.iter().copied().collect();
    let mut distinct: BTreeMap<u32, u64> = BTreeMap::new();
    for (edge, &c) in &counts {
        let size = edge.size();
        match lambda_of.get(&size) {
            Some(&l) if l == c => *distinct.entry(size).or_insert(0) += 1,
            Some(&l) => {
                violations.push(format!("{edge} occurs {c} times, expected {l}"));
                ok = false;
            }
            None => {
                violations.push(format!("{edge} has a size outside the target"));
                ok = false;
            }
        }
    }
    for &(size, lambda) in &target.layers {
        let have = distinct.get(&size).copied().unwrap_or(0);
        if lambda > 0 && have != binom(n, size as u64) {
            violations.push(format!("{have} distinct {size}-sets present, expected {}", binom(n, size as u64)));
            ok = false;
        }
    }
    ok
}

pub fn verify_factorization(g: &Hypergraph, target: &CompleteTarget, spec: &ClassSpec) -> FactorizationReport {
    let mut violations = Vec::new();
    let complete = is_complete(g, target, &mut violations);
    let k = spec.len() as u32;
    let n = g.vertex_count() as u64;
    for e in g.edges() {
        if e.color == 0 || e.color > k {
            violations.push(format!("edge {} has color {} outside 1..={k}", e.id, e.color));
        }
    }
    let mut degree: HashMap<(ColorId, VertexId), u64> = HashMap::new();
    let mut edges: HashMap<ColorId, u64> = HashMap::new();
    for e in g.edges() {
        *edges.entry(e.color).or_insert(0) += 1;
        for &(v, m) in e.edge.occurrences() {
            *degree.entry((e.color, v)).or_insert(0) += m as u64;
        }
    }
    let grouped = edges_by_color(g);
    let mut classes = Vec::new();
    for j in 1..=k {
        let ds: Vec<u64> = g.vertices().iter().map(|&v| degree.get(&(j, v)).copied().unwrap_or(0)).collect();
        let min_degree = ds.iter().copied().min().unwrap_or(0);
        let max_degree = ds.iter().copied().max().unwrap_or(0);
        let count = edges.get(&j).copied().unwrap_or(0);
        let i = (j - 1) as usize;
        let degree_ok = match spec {
            ClassSpec::Regular(r) => min_degree == r[i] && max_degree == r[i],
            ClassSpec::Windows(w) => w[i].0 <= min_degree && max_degree <= w[i].1,
            ClassSpec::AlmostRegular { h, sizes } => {
                let total = h * sizes[i];
                count == sizes[i] && total / n <= min_degree && max_degree <= total.div_ceil(n)
            }
        };
        let components = count_of(g.vertices(), grouped.get(&j));
        classes.push(ClassReport {
            color: j,
            edges: count,
            min_degree,
            max_degree,
            degree_ok,
            components,
            connected: components == 1,
        });
    }
    FactorizationReport {
        complete,
        classes,
        violations,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub ok: bool,
    pub unmatched: Vec<String>,
}

/// Whether the edge instances of `original` inject, color-preservingly,
/// into the edge instances of `extended` restricted to the vertex set of
/// `original`.
pub fn verify_extension(original: &Hypergraph, extended: &Hypergraph) -> ExtensionReport {
    let mut unmatched = Vec::new();
    for v in original.vertices() {
        if !extended.has_vertex(*v) {
            unmatched.push(format!("vertex {v} is missing"));
        }
    }
    let keep = original.vertices();
    let mut available: HashMap<(Edge, ColorId), u64> = HashMap::new();
    for e in extended.edges() {
        let r = e.edge.restricted(|v| keep.contains(&v));
        if !r.is_empty() {
            *available.entry((r, e.color)).or_insert(0) += 1;
        }
    }
    let mut needed: BTreeMap<(Edge, ColorId), u64> = BTreeMap::new();
    for e in original.edges() {
        *needed.entry((e.edge.clone(), e.color)).or_insert(0) += 1;
    }
    for (key, need) in needed {
        let have = available.get(&key).copied().unwrap_or(0);
        if have < need {
            unmatched.push(format!("{} in color {}: need {need}, found {have}", key.0, key.1));
        }
    }
    ExtensionReport {
        ok: unmatched.is_empty(),
        unmatched,
    }
}

/// Whether `q` recolors `p` in a way that keeps the color of every edge
/// avoiding `removed` and, for each number of vertices in `removed` and each
/// color, the number of such edges. Both must hold the same edges.
pub fn verify_friendly(p: &Hypergraph, q: &Hypergraph, removed: &BTreeSet<VertexId>) -> bool {
    let signature = |g: &Hypergraph| {
        let mut m: BTreeMap<Edge, u64> = BTreeMap::new();
        for e in g.edges() {
            *m.entry(e.edge.clone()).or_insert(0) += 1;
        }
        m
    };
    if signature(p) != signature(q) {
        return false;
    }
    let profile = |g: &Hypergraph| {
        let mut outside: BTreeMap<(Edge, ColorId), u64> = BTreeMap::new();
        let mut types: BTreeMap<(u32, ColorId), u64> = BTreeMap::new();
        for e in g.edges() {
            let inside: u32 = e.edge.occurrences().iter().filter(|o| removed.contains(&o.0)).map(|o| o.1).sum();
            if inside == 0 {
                *outside.entry((e.edge.clone(), e.color)).or_insert(0) += 1;
            }
            *types.entry((inside, e.color)).or_insert(0) += 1;
        }
        (outside, types)
    };
    profile(p) == profile(q)
}
