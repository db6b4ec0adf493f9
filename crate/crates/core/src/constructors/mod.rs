//! Constructions of connected factorizations built on the detachment engine.
//!
//! Each constructor checks its hypotheses, builds an amalgamated hypergraph
//! in which the new vertices are collapsed into one vertex, colors it so
//! that every class meets the connectivity margin, and detaches.

pub mod baranyai;
pub mod nonuniform;
pub mod partial;
pub mod pieces;
pub mod regular;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::arith::binom;
use crate::engine::detach;
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, Hypergraph, VertexId};
use crate::unionfind::UnionFind;
use crate::wings::class_summaries;

/// One hypothesis of a construction and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub detail: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Construction {
    pub hypergraph: Hypergraph,
    pub checks: Vec<ConditionCheck>,
}

/// Accumulates condition checks; `require` stops at the first failure.
#[derive(Clone, Debug, Default)]
pub struct Checks(pub Vec<ConditionCheck>);

impl Checks {
    pub fn require(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> Result<()> {
        let detail = detail.into();
        self.0.push(ConditionCheck {
            name: name.to_string(),
            detail: detail.clone(),
            holds,
        });
        if holds {
            Ok(())
        } else {
            Err(Error::precondition(name, detail))
        }
    }

    pub fn note(&mut self, name: &str, holds: bool, detail: impl Into<String>) {
        self.0.push(ConditionCheck {
            name: name.to_string(),
            detail: detail.into(),
            holds,
        });
    }
}

pub const ADMISSIBLE: &str = "h-admissible";
pub const NO_REGULAR_COMPONENT: &str = "no color class has an r-regular component";
pub const EDGE_COUNT_WINDOW: &str = "edge count window";
pub const INPUT_SHAPE: &str = "input shape";
pub const PARTIAL_FACTORIZATION: &str = "partial r-factorization";

/// All `k`-subsets of `items` in lexicographic order.
pub(crate) fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    crate::engine::subsets(items, k)
}

/// Checks that `g` holds exactly `count(size)` copies of every `size`-subset
/// of its vertex set, for the sizes with a non-zero count, and nothing else.
pub(crate) fn check_layers(g: &Hypergraph, count: impl Fn(u32) -> u64, what: &str) -> Result<()> {
    let n = g.vertex_count() as u64;
    let mut seen: HashMap<&Edge, u64> = HashMap::new();
    for e in g.edges() {
        if !e.edge.is_simple() {
            return Err(Error::precondition(INPUT_SHAPE, format!("{what}: edge {} repeats a vertex", e.id)));
        }
        *seen.entry(&e.edge).or_insert(0) += 1;
    }
    let mut distinct: BTreeMap<u32, u64> = BTreeMap::new();
    for (edge, &c) in &seen {
        let want = count(edge.size());
        if want != c {
            return Err(Error::precondition(
                INPUT_SHAPE,
                format!("{what}: {edge} occurs {c} times, expected {want}"),
            ));
        }
        *distinct.entry(edge.size()).or_insert(0) += 1;
    }
    for size in 1..=n as u32 {
        if count(size) > 0 && distinct.get(&size).copied().unwrap_or(0) != binom(n, size as u64) {
            return Err(Error::precondition(INPUT_SHAPE, format!("{what}: some {size}-subset is missing")));
        }
    }
    Ok(())
}

/// Degrees per color class, `deg[color][vertex position]`, for colors `0..=k`.
pub(crate) struct ClassDegrees {
    pub vertices: Vec<VertexId>,
    pub deg: Vec<Vec<u64>>,
}

impl ClassDegrees {
    pub fn new(g: &Hypergraph, k: u32) -> Self {
        let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
        let mut deg = vec![vec![0u64; vertices.len()]; k as usize + 1];
        for e in g.edges() {
            for &(v, m) in e.edge.occurrences() {
                let i = vertices.binary_search(&v).expect("edge vertex in vertex set");
                deg[e.color as usize][i] += m as u64;
            }
        }
        ClassDegrees { vertices, deg }
    }
}

/// Fails unless every edge has a color in `1..=k` and no vertex has degree
/// above `r` in any class.
pub(crate) fn check_partial(g: &Hypergraph, k: u64, r: u64) -> Result<ClassDegrees> {
    if let Some(e) = g.edges().iter().find(|e| e.color == 0 || e.color as u64 > k) {
        return Err(Error::precondition(
            PARTIAL_FACTORIZATION,
            format!("edge {} has color {} outside 1..={k}", e.id, e.color),
        ));
    }
    let mut relabeled = g.clone();
    relabeled.set_k(k as u32);
    let degrees = ClassDegrees::new(&relabeled, k as u32);
    for (j, row) in degrees.deg.iter().enumerate() {
        if let Some(i) = row.iter().position(|&d| d > r) {
            return Err(Error::precondition(
                PARTIAL_FACTORIZATION,
                format!("vertex {} has degree {} > r = {r} in color {j}", degrees.vertices[i], row[i]),
            ));
        }
    }
    Ok(degrees)
}

/// Per color class of `g` (colors `1..=k`): number of components, counting
/// isolated vertices, and whether some component is `r`-regular.
pub(crate) struct ClassShape {
    pub components: u64,
    pub regular_component: bool,
    pub edges: u64,
}

pub(crate) fn class_shapes(g: &Hypergraph, k: u32, r: u64) -> Vec<ClassShape> {
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    let pos = |v: VertexId| vertices.binary_search(&v).expect("known vertex");
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); k as usize + 1];
    for (p, e) in g.edges().iter().enumerate() {
        by_color[e.color as usize].push(p);
    }
    (1..=k as usize)
        .map(|j| {
            let mut uf = UnionFind::new(vertices.len());
            let mut deg = vec![0u64; vertices.len()];
            for &p in &by_color[j] {
                let e = &g.edges()[p].edge;
                let first = pos(e.support().next().unwrap());
                for &(v, m) in e.occurrences() {
                    deg[pos(v)] += m as u64;
                    uf.union(first, pos(v));
                }
            }
            let mut regular: BTreeMap<usize, bool> = BTreeMap::new();
            for (i, &d) in deg.iter().enumerate() {
                let root = uf.find(i);
                let entry = regular.entry(root).or_insert(true);
                *entry &= d == r;
            }
            ClassShape {
                components: uf.set_count() as u64,
                regular_component: regular.values().any(|&x| x),
                edges: by_color[j].len() as u64,
            }
        })
        .collect()
}

/// Checks that every class `1..=k` of the amalgam is connected and has
/// margin at least `parts - 1` at `alpha`, then detaches `alpha` into
/// `parts` vertices.
pub(crate) fn detach_connected(amalgam: &Hypergraph, alpha: VertexId, parts: u32) -> Result<crate::engine::DetachmentResult> {
    let summaries = class_summaries(amalgam, alpha)?;
    for (c, s) in &summaries {
        if *c == 0 {
            continue;
        }
        if s.components != 1 || s.margin() < parts as i64 - 1 {
            return Err(Error::Internal(format!(
                "amalgam class {c}: {} components, margin {} for {parts} parts",
                s.components,
                s.margin()
            )));
        }
    }
    detach(amalgam, alpha, parts, false)
}

/// A single vertex `0` carrying, for each `(size, counts)` group, `counts[j-1]`
/// loops `{0^size}` of color `j`.
pub(crate) fn single_vertex_amalgam(k: u32, groups: &[(u32, Vec<u64>)]) -> Hypergraph {
    let alpha = VertexId(0);
    let mut g = Hypergraph::with_vertices(k, [alpha]);
    for (size, counts) in groups {
        for (j, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                g.add_edge(Edge::from_pairs([(alpha, *size)]), j as ColorId + 1)
                    .expect("loop on a known vertex");
            }
        }
    }
    g
}
