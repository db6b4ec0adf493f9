//! Completing a partial `r`-factorization of `lambda K_n^h - V` to a
//! connected `r`-factorization of `lambda K_n^h`.
//!
//! In `lambda K_n^h - V` the `m` vertices of `V` are deleted: every edge
//! loses its vertices in `V` and edges inside `V` vanish. The vertices of
//! `V` are collapsed into one vertex `alpha`; an edge of size `i` becomes an
//! edge with `alpha^{h-i}` added, the `alpha^h` loops fill each class to
//! `r n / h` edges, and detaching `alpha` into `m` parts restores `V`.
//!
//! The friendly variant starts from `lambda K_n^h` with only the edges inside
//! `V` removed, shrinks it to the vertex-deleted form and completes that. The
//! completion keeps the color of every edge missing `V` and the number of
//! edges of each color meeting `V` in each number of vertices.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{binom, class_count, is_admissible};
use crate::constructors::{
    check_layers, check_partial, detach_connected, Checks, Construction, ADMISSIBLE, INPUT_SHAPE,
};
use crate::engine::DetachmentResult;
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, Hypergraph, VertexId};
use crate::unionfind::UnionFind;

pub const R_AT_LEAST_TWO: &str = "r >= 2";
pub const REGULAR_CLASSES: &str = "every color class is r-regular outside V";
pub const NO_UNIFORM_COMPONENT: &str = "no component of a color class is h-uniform";
pub const CLASS_SIZE: &str = "|E(H(j))| <= r n / h";
pub const COMPONENT_BOUND: &str = "c(H(j)) <= r n (1 - 1/h) - sum_i i e_j^(i+1) - m + 1";

#[derive(Clone, Copy, Debug)]
pub struct PiecesProblem {
    pub n: u64,
    pub r: u64,
    pub lambda: u64,
    pub h: u64,
}

/// Shape of one color class of the vertex-deleted hypergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceClass {
    /// `by_size[t]`: edges of size `t`.
    pub by_size: Vec<u64>,
    pub components: u64,
    pub uniform_component: bool,
}

impl PieceClass {
    pub fn edges(&self) -> u64 {
        self.by_size.iter().sum()
    }

    /// `sum_{i in [h-1]} i e^{i+1}`.
    pub fn weighted(&self, h: u64) -> u64 {
        (1..h).map(|i| i * self.by_size[i as usize + 1]).sum()
    }
}

/// Per class `1..=k`: edges by size, components over all vertices, and
/// whether some component with an edge has only edges of size `h`.
pub fn piece_classes(g: &Hypergraph, k: u32, h: u64) -> Vec<PieceClass> {
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    let pos = |v: VertexId| vertices.binary_search(&v).expect("known vertex");
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); k as usize + 1];
    for (p, e) in g.edges().iter().enumerate() {
        if (e.color as usize) <= k as usize {
            by_color[e.color as usize].push(p);
        }
    }
    (1..=k as usize)
        .map(|j| {
            let mut uf = UnionFind::new(vertices.len());
            let mut by_size = vec![0u64; h as usize + 1];
            for &p in &by_color[j] {
                let e = &g.edges()[p].edge;
                by_size[(e.size() as usize).min(h as usize)] += 1;
                let mut it = e.support();
                let first = pos(it.next().expect("edges are non-empty"));
                for v in it {
                    uf.union(first, pos(v));
                }
            }
            let mut small: BTreeMap<usize, bool> = BTreeMap::new();
            for &p in &by_color[j] {
                let e = &g.edges()[p].edge;
                let root = uf.find(pos(e.support().next().unwrap()));
                *small.entry(root).or_insert(false) |= (e.size() as u64) < h;
            }
            PieceClass {
                by_size,
                components: uf.set_count() as u64,
                uniform_component: small.values().any(|&s| !s),
            }
        })
        .collect()
}

/// Checks conditions (admissibility, `r >= 2`, regularity, no uniform
/// component, class size, component bound) and returns `k`, `m` and the
/// class shapes.
fn hypotheses(g: &Hypergraph, p: &PiecesProblem, checks: &mut Checks) -> Result<(u64, u64, Vec<PieceClass>)> {
    let (n, r, h, lambda) = (p.n, p.r, p.h, p.lambda);
    let outside = g.vertex_count() as u64;
    checks.require(
        INPUT_SHAPE,
        h >= 2 && r >= 1 && lambda >= 1 && outside >= 1 && n > outside,
        format!("n = {n}, {outside} vertices outside V, h = {h}, r = {r}, lambda = {lambda}"),
    )?;
    let m = n - outside;
    check_layers(
        g,
        |s| if (1..=h).contains(&(s as u64)) { lambda * binom(m, h - s as u64) } else { 0 },
        "lambda K_n^h - V",
    )?;
    checks.require(
        ADMISSIBLE,
        is_admissible(n, r, lambda, h),
        format!("h = {h} | r n = {} and r = {r} | lambda C(n-1, h-1) = {}", r * n, lambda * binom(n - 1, h - 1)),
    )?;
    checks.require(R_AT_LEAST_TWO, r >= 2, format!("r = {r}"))?;
    let k = class_count(n, r, lambda, h).expect("admissible");
    let degrees = check_partial(g, k, r)?;
    for j in 1..=k as usize {
        if let Some(x) = degrees.deg[j].iter().position(|&d| d != r) {
            checks.require(
                REGULAR_CLASSES,
                false,
                format!("vertex {} has degree {} in class {j}", degrees.vertices[x], degrees.deg[j][x]),
            )?;
        }
    }
    checks.note(REGULAR_CLASSES, true, format!("k = {k} classes"));
    let classes = piece_classes(g, k as u32, h);
    let uniform = classes.iter().position(|c| c.uniform_component);
    checks.require(
        NO_UNIFORM_COMPONENT,
        uniform.is_none(),
        match uniform {
            Some(j) => format!("class {} has a component with only edges of size {h}", j + 1),
            None => "none".into(),
        },
    )?;
    for (j, c) in classes.iter().enumerate() {
        checks.require(
            CLASS_SIZE,
            h * c.edges() <= r * n,
            format!("class {}: |E| = {}, r n / h = {}", j + 1, c.edges(), r * n / h),
        )?;
    }
    for (j, c) in classes.iter().enumerate() {
        // scaled by h
        let lhs = (h * c.components) as i128;
        let rhs = (r * n * (h - 1)) as i128 - (h * c.weighted(h)) as i128 - (h as i128) * (m as i128 - 1);
        checks.require(
            COMPONENT_BOUND,
            lhs <= rhs,
            format!("class {}: c = {}, sum i e^(i+1) = {}", j + 1, c.components, c.weighted(h)),
        )?;
    }
    Ok((k, m, classes))
}

fn recolored(g: &Hypergraph, k: u64) -> Hypergraph {
    let mut out = g.clone();
    out.set_k(k as u32);
    out
}

fn build_amalgam(g: &Hypergraph, p: &PiecesProblem, k: u64, m: u64, classes: &[PieceClass], alpha: VertexId) -> Result<Hypergraph> {
    let (n, r, h) = (p.n, p.r, p.h);
    let mut amalgam = recolored(g, k);
    amalgam.add_vertex(alpha);
    for e in amalgam.edges_mut() {
        let t = e.edge.size() as u64;
        e.edge.add(alpha, (h - t) as u32);
    }
    let loop_edge = Edge::from_pairs([(alpha, h as u32)]);
    let mut total: i128 = 0;
    for (j, c) in classes.iter().enumerate() {
        let loops = (r * n / h) as i128 - (r * (n - m)) as i128 + c.weighted(h) as i128;
        if loops < 0 {
            return Err(Error::Internal(format!("class {} needs {loops} loops", j + 1)));
        }
        total += loops;
        for _ in 0..loops {
            amalgam.add_edge(loop_edge.clone(), j as ColorId + 1)?;
        }
    }
    let want = p.lambda * binom(m, h);
    if total != want as i128 {
        return Err(Error::Internal(format!("{total} loops colored, expected lambda C(m, h) = {want}")));
    }
    let mut at_alpha = vec![0u64; k as usize + 1];
    for e in amalgam.edges() {
        at_alpha[e.color as usize] += e.edge.multiplicity(alpha) as u64;
    }
    if let Some(j) = (1..=k as usize).find(|&j| at_alpha[j] != r * m) {
        return Err(Error::Internal(format!(
            "class {j} has degree {} at alpha, expected r m = {}",
            at_alpha[j],
            r * m
        )));
    }
    Ok(amalgam)
}

fn complete(g: &Hypergraph, p: &PiecesProblem, checks: &mut Checks) -> Result<DetachmentResult> {
    let (k, m, classes) = hypotheses(g, p, checks)?;
    let alpha = g.fresh_vertex_id();
    let amalgam = build_amalgam(g, p, k, m, &classes, alpha)?;
    detach_connected(&amalgam, alpha, m as u32)
}

/// Completes a partial `r`-factorization of `lambda K_n^h - V`, given on the
/// `n - m` vertices outside `V`, to a connected `r`-factorization of
/// `lambda K_n^h`. The vertices of `V` get ids above those of `g`; every edge
/// keeps its id and color.
pub fn embed_minus_v(g: &Hypergraph, p: PiecesProblem) -> Result<Construction> {
    let mut checks = Checks::default();
    let result = complete(g, &p, &mut checks)?;
    Ok(Construction {
        hypergraph: result.hypergraph,
        checks: checks.0,
    })
}

/// A completion together with the recoloring of `lambda K_n^h` minus the
/// edges inside `V` that it induces.
#[derive(Clone, Debug, Serialize)]
pub struct FriendlyConstruction {
    pub construction: Construction,
    pub friendly: Hypergraph,
}

/// Fails unless `g` is `lambda K_n^h` on its vertex set with exactly the
/// edges inside `v` removed.
fn check_minus_inside(g: &Hypergraph, v: &BTreeSet<VertexId>, h: u64, lambda: u64) -> Result<()> {
    let n = g.vertex_count() as u64;
    let mut seen: BTreeMap<&Edge, u64> = BTreeMap::new();
    for e in g.edges() {
        if !e.edge.is_simple() || e.edge.size() as u64 != h {
            return Err(Error::precondition(INPUT_SHAPE, format!("edge {} is not an h-set", e.id)));
        }
        if e.edge.support().all(|x| v.contains(&x)) {
            return Err(Error::precondition(INPUT_SHAPE, format!("edge {} lies inside V", e.id)));
        }
        *seen.entry(&e.edge).or_insert(0) += 1;
    }
    if let Some((edge, &c)) = seen.iter().find(|(_, &c)| c != lambda) {
        return Err(Error::precondition(INPUT_SHAPE, format!("{edge} occurs {c} times, expected {lambda}")));
    }
    let want = binom(n, h) - binom(v.len() as u64, h);
    if seen.len() as u64 != want {
        return Err(Error::precondition(
            INPUT_SHAPE,
            format!("{} distinct edges, expected {want}", seen.len()),
        ));
    }
    Ok(())
}

/// Given a partial `r`-factorization `g` of `lambda K_n^h` minus the edges
/// inside `v`, finds a friendly one that extends to a connected
/// `r`-factorization of `lambda K_n^h`, and returns both. The completion
/// keeps every vertex id; edge ids of `g` are kept.
pub fn embed_friendly(g: &Hypergraph, v: &BTreeSet<VertexId>, p: PiecesProblem) -> Result<FriendlyConstruction> {
    let mut checks = Checks::default();
    checks.require(
        INPUT_SHAPE,
        g.vertex_count() as u64 == p.n && !v.is_empty() && v.iter().all(|x| g.has_vertex(*x)) && (v.len() as u64) < p.n,
        format!("{} vertices, n = {}, |V| = {}, V inside the vertex set", g.vertex_count(), p.n, v.len()),
    )?;
    check_minus_inside(g, v, p.h, p.lambda)?;
    let shrunk = g.remove_vertices(v);
    let result = complete(&shrunk, &p, &mut checks)?;
    let psi: BTreeMap<VertexId, VertexId> = result.parts.iter().copied().zip(v.iter().copied()).collect();
    let hypergraph = result.hypergraph.amalgamate(&psi)?;
    let friendly = hypergraph.strip_contained_edges(v);
    Ok(FriendlyConstruction {
        construction: Construction {
            hypergraph,
            checks: checks.0,
        },
        friendly,
    })
}
