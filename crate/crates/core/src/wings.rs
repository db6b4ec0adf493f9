//! Wing decomposition of a hypergraph at a vertex.
//!
//! Inside the component of `alpha`, every edge whose only vertex is `alpha`
//! is a small wing by itself, and every component `C` of the component minus
//! `alpha` gives one large wing: `alpha`, `C` and all edges meeting `C`.
//! A wing is slim when `alpha` occurs in it once and wide otherwise. Edges in
//! other components are reported as remote.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, EdgeId, Hinge, Hypergraph, VertexId, VertexIndex};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WingKind {
    Small,
    Large,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wing {
    pub kind: WingKind,
    pub edges: Vec<EdgeId>,
    pub vertices: BTreeSet<VertexId>,
    /// Hinges at `alpha` inside this wing.
    pub hinges: Vec<Hinge>,
}

impl Wing {
    /// Degree of `alpha` inside the wing.
    pub fn degree(&self) -> u64 {
        self.hinges.len() as u64
    }

    pub fn is_wide(&self) -> bool {
        self.degree() >= 2
    }

    pub fn is_slim(&self) -> bool {
        self.degree() == 1
    }
}

#[derive(Clone, Debug)]
pub struct WingDecomposition {
    pub alpha: VertexId,
    pub color: Option<ColorId>,
    pub wings: Vec<Wing>,
    pub remote: Vec<EdgeId>,
}

impl WingDecomposition {
    /// Number of wings.
    pub fn omega(&self) -> u64 {
        self.wings.len() as u64
    }

    pub fn omega_large(&self) -> u64 {
        self.wings.iter().filter(|w| w.kind == WingKind::Large).count() as u64
    }

    pub fn wide(&self) -> impl Iterator<Item = &Wing> {
        self.wings.iter().filter(|w| w.is_wide())
    }

    pub fn slim(&self) -> impl Iterator<Item = &Wing> {
        self.wings.iter().filter(|w| w.is_slim())
    }

    /// Degree of `alpha` in the decomposed class.
    pub fn alpha_degree(&self) -> u64 {
        self.wings.iter().map(Wing::degree).sum()
    }

    /// Degree of `alpha` minus the number of wings.
    pub fn margin(&self) -> i64 {
        self.alpha_degree() as i64 - self.omega() as i64
    }
}

/// Wings of the sub-hypergraph formed by the edges at `positions`, given as
/// lists of edge positions. Returns `(wings, remote)`.
pub(crate) fn raw_wings(
    g: &Hypergraph,
    index: &VertexIndex,
    alpha: VertexId,
    positions: &[usize],
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let edges = g.edges();
    let a = index.index(alpha);
    let mut whole = UnionFind::new(index.len());
    for &p in positions {
        let mut it = edges[p].edge.support();
        if let Some(first) = it.next() {
            let f = index.index(first);
            for v in it {
                whole.union(f, index.index(v));
            }
        }
    }
    let mut punctured = UnionFind::new(index.len());
    let mut local = Vec::new();
    let mut remote = Vec::new();
    for &p in positions {
        let e = &edges[p].edge;
        let first = e.support().next().map(|v| index.index(v));
        if first.is_some_and(|f| whole.same(f, a)) {
            local.push(p);
            let mut rest = e.support().filter(|&v| v != alpha).map(|v| index.index(v));
            if let Some(f) = rest.next() {
                for x in rest {
                    punctured.union(f, x);
                }
            }
        } else {
            remote.push(p);
        }
    }
    let mut wings: Vec<Vec<usize>> = Vec::new();
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    for p in local {
        let e = &edges[p].edge;
        match e.support().find(|&v| v != alpha) {
            None => wings.push(vec![p]),
            Some(v) => {
                let root = punctured.find(index.index(v));
                match by_root.get(&root) {
                    Some(&w) => wings[w].push(p),
                    None => {
                        by_root.insert(root, wings.len());
                        wings.push(vec![p]);
                    }
                }
            }
        }
    }
    (wings, remote)
}

pub fn wing_decomposition(
    g: &Hypergraph,
    alpha: VertexId,
    color: Option<ColorId>,
) -> Result<WingDecomposition> {
    if !g.has_vertex(alpha) {
        return Err(Error::UnknownVertex(alpha));
    }
    let index = VertexIndex::new(g);
    let positions: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| color.is_none_or(|c| e.color == c))
        .map(|(p, _)| p)
        .collect();
    let (raw, remote) = raw_wings(g, &index, alpha, &positions);
    let edges = g.edges();
    let wings = raw
        .into_iter()
        .map(|ps| {
            let mut vertices = BTreeSet::new();
            let mut hinges = Vec::new();
            let mut small = true;
            for &p in &ps {
                let e = &edges[p];
                vertices.extend(e.edge.support());
                for slot in 1..=e.edge.multiplicity(alpha) {
                    hinges.push(Hinge {
                        edge: e.id,
                        slot,
                        vertex: alpha,
                    });
                }
                if e.edge.support_len() > 1 {
                    small = false;
                }
            }
            vertices.insert(alpha);
            Wing {
                kind: if small { WingKind::Small } else { WingKind::Large },
                edges: ps.iter().map(|&p| edges[p].id).collect(),
                vertices,
                hinges,
            }
        })
        .collect();
    Ok(WingDecomposition {
        alpha,
        color,
        wings,
        remote: remote.iter().map(|&p| edges[p].id).collect(),
    })
}

/// Degree, wing count and component count of one color class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub degree: u64,
    pub omega: u64,
    pub components: usize,
}

impl ClassSummary {
    pub fn margin(&self) -> i64 {
        self.degree as i64 - self.omega as i64
    }
}

/// Summaries of every color class (`1..=k` plus colors in use) in one pass
/// over the edges.
pub fn class_summaries(g: &Hypergraph, alpha: VertexId) -> Result<BTreeMap<ColorId, ClassSummary>> {
    if !g.has_vertex(alpha) {
        return Err(Error::UnknownVertex(alpha));
    }
    let index = VertexIndex::new(g);
    let mut by_color: BTreeMap<ColorId, Vec<usize>> = g.color_classes().into_iter().map(|c| (c, Vec::new())).collect();
    for (p, e) in g.edges().iter().enumerate() {
        by_color.get_mut(&e.color).unwrap().push(p);
    }
    let mut out = BTreeMap::new();
    for (c, positions) in by_color {
        let (wings, _) = raw_wings(g, &index, alpha, &positions);
        let mut uf = UnionFind::new(index.len());
        let mut degree = 0u64;
        for &p in &positions {
            let e = &g.edges()[p].edge;
            degree += e.multiplicity(alpha) as u64;
            let mut it = e.support();
            let first = index.index(it.next().expect("edges are non-empty"));
            for v in it {
                uf.union(first, index.index(v));
            }
        }
        out.insert(
            c,
            ClassSummary {
                degree,
                omega: wings.len() as u64,
                components: uf.set_count(),
            },
        );
    }
    Ok(out)
}

/// Whether `alpha` is a cut vertex of the connected hypergraph `g`.
pub fn is_cut_vertex(g: &Hypergraph, alpha: VertexId) -> Result<bool> {
    if !g.has_vertex(alpha) {
        return Err(Error::UnknownVertex(alpha));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(wing_decomposition(g, alpha, None)?.omega() >= 2)
}

/// Degree of `alpha` minus its number of wings, within one color class or
/// the whole hypergraph.
pub fn connectivity_margin(g: &Hypergraph, alpha: VertexId, color: Option<ColorId>) -> Result<i64> {
    Ok(wing_decomposition(g, alpha, color)?.margin())
}
