//! Hypergraphs whose edges are multisets of vertices.
//!
//! Every edge instance carries a stable identity and a color (`0` means
//! uncolored). A hinge is one occurrence of a vertex inside one edge
//! instance; detaching a vertex moves hinges but never creates or destroys
//! them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

pub type ColorId = u32;

pub const UNCOLORED: ColorId = 0;

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A multiset of vertices stored as `(vertex, multiplicity)` pairs sorted by
/// vertex. The sorted pair list doubles as the canonical signature.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    occ: Vec<(VertexId, u32)>,
}

impl Edge {
    pub fn new() -> Self {
        Edge::default()
    }

    /// Builds an edge from pairs; repeated vertices are merged and zero
    /// multiplicities dropped.
    pub fn from_pairs<I: IntoIterator<Item = (VertexId, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<VertexId, u32> = BTreeMap::new();
        for (v, m) in pairs {
            if m > 0 {
                *map.entry(v).or_insert(0) += m;
            }
        }
        Edge {
            occ: map.into_iter().collect(),
        }
    }

    /// One occurrence per listed vertex.
    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(vertices: I) -> Self {
        Edge::from_pairs(vertices.into_iter().map(|v| (v, 1)))
    }

    pub fn occurrences(&self) -> &[(VertexId, u32)] {
        &self.occ
    }

    pub fn multiplicity(&self, v: VertexId) -> u32 {
        match self.occ.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => self.occ[i].1,
            Err(_) => 0,
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.occ.binary_search_by_key(&v, |p| p.0).is_ok()
    }

    /// Total number of occurrences.
    pub fn size(&self) -> u32 {
        self.occ.iter().map(|p| p.1).sum()
    }

    /// Number of distinct vertices.
    pub fn support_len(&self) -> usize {
        self.occ.len()
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.occ.iter().map(|p| p.0)
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.occ.iter().all(|p| p.1 == 1)
    }

    pub fn add(&mut self, v: VertexId, count: u32) {
        if count == 0 {
            return;
        }
        match self.occ.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => self.occ[i].1 += count,
            Err(i) => self.occ.insert(i, (v, count)),
        }
    }

    /// Removes up to `count` occurrences of `v`, returning how many were removed.
    pub fn remove(&mut self, v: VertexId, count: u32) -> u32 {
        match self.occ.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => {
                let have = self.occ[i].1;
                if have <= count {
                    self.occ.remove(i);
                    have
                } else {
                    self.occ[i].1 -= count;
                    count
                }
            }
            Err(_) => 0,
        }
    }

    /// The sub-multiset of occurrences whose vertex satisfies `keep`.
    pub fn restricted<F: Fn(VertexId) -> bool>(&self, keep: F) -> Edge {
        Edge {
            occ: self.occ.iter().copied().filter(|p| keep(p.0)).collect(),
        }
    }

    pub fn without(&self, v: VertexId) -> Edge {
        self.restricted(|u| u != v)
    }

    /// Image under a vertex map; unmapped vertices stay put.
    pub fn mapped(&self, psi: &BTreeMap<VertexId, VertexId>) -> Edge {
        Edge::from_pairs(
            self.occ
                .iter()
                .map(|&(v, m)| (psi.get(&v).copied().unwrap_or(v), m)),
        )
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, m)) in self.occ.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if *m == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, m)?;
            }
        }
        write!(f, "}}")
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.occ.len()))?;
        for (v, m) in &self.occ {
            map.serialize_entry(&v.0.to_string(), m)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EdgeVisitor;

        impl<'de> Visitor<'de> for EdgeVisitor {
            type Value = Edge;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from vertex id to multiplicity")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Edge, A::Error> {
                let mut pairs = BTreeMap::new();
                while let Some((key, mult)) = access.next_entry::<String, u32>()? {
                    let v: u32 = key
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad vertex id {key:?}")))?;
                    if mult == 0 {
                        return Err(de::Error::custom(format!("vertex {v} has multiplicity 0")));
                    }
                    if pairs.insert(VertexId(v), mult).is_some() {
                        return Err(de::Error::custom(format!("vertex {v} listed twice")));
                    }
                }
                Ok(Edge {
                    occ: pairs.into_iter().collect(),
                })
            }
        }

        deserializer.deserialize_map(EdgeVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeInstance {
    pub id: EdgeId,
    #[serde(rename = "occ")]
    pub edge: Edge,
    pub color: ColorId,
}

/// One occurrence of `vertex` in edge instance `edge`; `slot` is 1-based
/// among that vertex's occurrences in the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hinge {
    pub edge: EdgeId,
    pub slot: u32,
    pub vertex: VertexId,
}

#[derive(Clone, Debug)]
pub struct Components {
    pub count: usize,
    pub label: BTreeMap<VertexId, usize>,
}

impl Components {
    pub fn same(&self, a: VertexId, b: VertexId) -> bool {
        self.label.get(&a) == self.label.get(&b)
    }
}

/// Hinge sets at one vertex, grouped the ways the detachment engine needs.
#[derive(Clone, Debug, Default)]
pub struct HingeSets {
    pub all: Vec<Hinge>,
    pub by_color: BTreeMap<ColorId, Vec<Hinge>>,
    pub by_edge: BTreeMap<EdgeId, Vec<Hinge>>,
    /// Keyed by (multiplicity of the vertex, rest of the edge).
    pub by_signature: BTreeMap<(u32, Edge), Vec<Hinge>>,
    pub by_color_signature: BTreeMap<(ColorId, u32, Edge), Vec<Hinge>>,
}

#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    vertices: BTreeSet<VertexId>,
    k: u32,
    edges: Vec<EdgeInstance>,
    next_edge_id: u64,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

/// Sorted vertex list with position lookup.
#[derive(Clone, Debug)]
pub struct VertexIndex {
    ids: Vec<VertexId>,
}

impl VertexIndex {
    pub fn new(g: &Hypergraph) -> Self {
        VertexIndex {
            ids: g.vertices.iter().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn index(&self, v: VertexId) -> usize {
        self.get(v).expect("vertex outside the index")
    }

    pub fn id(&self, i: usize) -> VertexId {
        self.ids[i]
    }
}

impl Hypergraph {
    /// An empty hypergraph that will use colors `1..=k`.
    pub fn new(k: u32) -> Self {
        Hypergraph {
            k,
            ..Default::default()
        }
    }

    pub fn with_vertices<I: IntoIterator<Item = VertexId>>(k: u32, vertices: I) -> Self {
        let mut g = Hypergraph::new(k);
        g.vertices.extend(vertices);
        g
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeInstance] {
        &self.edges
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn set_k(&mut self, k: u32) {
        self.k = k;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        self.vertices.insert(v)
    }

    /// Smallest id larger than every current vertex id.
    pub fn fresh_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.iter().next_back().map_or(0, |v| v.0 + 1))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge_id)
    }

    fn check_edge(&self, edge: &Edge, color: ColorId) -> Result<()> {
        if color > self.k {
            return Err(Error::Invalid(format!("color {color} exceeds k = {}", self.k)));
        }
        if edge.is_empty() {
            return Err(Error::Invalid("empty edge".into()));
        }
        for v in edge.support() {
            if !self.vertices.contains(&v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(())
    }

    /// Appends an edge instance under a fresh id.
    pub fn add_edge(&mut self, edge: Edge, color: ColorId) -> Result<EdgeId> {
        let id = EdgeId(self.next_edge_id);
        self.add_edge_with_id(id, edge, color)?;
        Ok(id)
    }

    pub fn add_edge_with_id(&mut self, id: EdgeId, edge: Edge, color: ColorId) -> Result<()> {
        self.check_edge(&edge, color)?;
        if id.0 < self.next_edge_id && self.edges.iter().any(|e| e.id == id) {
            return Err(Error::Invalid(format!("duplicate edge id {id}")));
        }
        self.next_edge_id = self.next_edge_id.max(id.0 + 1);
        self.edges.push(EdgeInstance { id, edge, color });
        Ok(())
    }

    pub fn edges_mut(&mut self) -> &mut [EdgeInstance] {
        &mut self.edges
    }

    pub fn position_of(&self, id: EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Colors that index color classes: `1..=k` plus any other color in use.
    pub fn color_classes(&self) -> BTreeSet<ColorId> {
        let mut cs: BTreeSet<ColorId> = (1..=self.k).collect();
        cs.extend(self.edges.iter().map(|e| e.color));
        cs
    }

    fn require_vertex(&self, v: VertexId) -> Result<()> {
        if self.vertices.contains(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    fn in_class(e: &EdgeInstance, color: Option<ColorId>) -> bool {
        color.is_none_or(|c| e.color == c)
    }

    /// Occurrences of `v`, counted with multiplicity, optionally within one color class.
    pub fn degree(&self, v: VertexId, color: Option<ColorId>) -> Result<u64> {
        self.require_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| Self::in_class(e, color))
            .map(|e| e.edge.multiplicity(v) as u64)
            .sum())
    }

    /// Number of edge instances equal to `signature`.
    pub fn mult(&self, signature: &Edge, color: Option<ColorId>) -> u64 {
        self.edges
            .iter()
            .filter(|e| Self::in_class(e, color) && &e.edge == signature)
            .count() as u64
    }

    pub fn components(&self, color: Option<ColorId>) -> Components {
        let index = VertexIndex::new(self);
        let mut uf = UnionFind::new(index.len());
        for e in self.edges.iter().filter(|e| Self::in_class(e, color)) {
            let mut it = e.edge.support();
            if let Some(first) = it.next() {
                let a = index.index(first);
                for v in it {
                    uf.union(a, index.index(v));
                }
            }
        }
        let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
        let mut label = BTreeMap::new();
        for i in 0..index.len() {
            let r = uf.find(i);
            let next = roots.len();
            let l = *roots.entry(r).or_insert(next);
            label.insert(index.id(i), l);
        }
        Components {
            count: roots.len(),
            label,
        }
    }

    pub fn component_count(&self, color: Option<ColorId>) -> usize {
        self.components(color).count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count(None) <= 1
    }

    /// Spanning sub-hypergraph made of the edges of one color.
    pub fn color_class(&self, color: ColorId) -> Hypergraph {
        let mut g = Hypergraph::with_vertices(self.k, self.vertices.iter().copied());
        g.edges = self.edges.iter().filter(|e| e.color == color).cloned().collect();
        g.next_edge_id = self.next_edge_id;
        g
    }

    /// Deletes `removed` from the vertex set and from every edge; edges left
    /// empty are dropped.
    pub fn remove_vertices(&self, removed: &BTreeSet<VertexId>) -> Hypergraph {
        let mut g = Hypergraph::with_vertices(
            self.k,
            self.vertices.iter().copied().filter(|v| !removed.contains(v)),
        );
        g.next_edge_id = self.next_edge_id;
        g.edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let edge = e.edge.restricted(|v| !removed.contains(&v));
                (!edge.is_empty()).then_some(EdgeInstance {
                    id: e.id,
                    edge,
                    color: e.color,
                })
            })
            .collect();
        g
    }

    /// Keeps every vertex but drops the edges whose support lies inside `set`.
    pub fn strip_contained_edges(&self, set: &BTreeSet<VertexId>) -> Hypergraph {
        let mut g = self.clone();
        g.edges.retain(|e| !e.edge.support().all(|v| set.contains(&v)));
        g
    }

    /// Image under `psi`; vertices missing from `psi` map to themselves.
    /// Edge ids and colors are preserved.
    pub fn amalgamate(&self, psi: &BTreeMap<VertexId, VertexId>) -> Result<Hypergraph> {
        for v in psi.keys() {
            self.require_vertex(*v)?;
        }
        let mut g = Hypergraph::with_vertices(
            self.k,
            self.vertices
                .iter()
                .map(|v| psi.get(v).copied().unwrap_or(*v)),
        );
        g.next_edge_id = self.next_edge_id;
        g.edges = self
            .edges
            .iter()
            .map(|e| EdgeInstance {
                id: e.id,
                edge: e.edge.mapped(psi),
                color: e.color,
            })
            .collect();
        Ok(g)
    }

    /// All hinges at `alpha` in edge order, slots ascending.
    pub fn hinges_at(&self, alpha: VertexId) -> Result<Vec<Hinge>> {
        self.require_vertex(alpha)?;
        let mut out = Vec::new();
        for e in &self.edges {
            for slot in 1..=e.edge.multiplicity(alpha) {
                out.push(Hinge {
                    edge: e.id,
                    slot,
                    vertex: alpha,
                });
            }
        }
        Ok(out)
    }

    pub fn hinge_sets(&self, alpha: VertexId) -> Result<HingeSets> {
        self.require_vertex(alpha)?;
        let mut hs = HingeSets::default();
        for e in &self.edges {
            let t = e.edge.multiplicity(alpha);
            if t == 0 {
                continue;
            }
            let rest = e.edge.without(alpha);
            for slot in 1..=t {
                let h = Hinge {
                    edge: e.id,
                    slot,
                    vertex: alpha,
                };
                hs.all.push(h);
                hs.by_color.entry(e.color).or_default().push(h);
                hs.by_edge.entry(e.id).or_default().push(h);
                hs.by_signature.entry((t, rest.clone())).or_default().push(h);
                hs.by_color_signature
                    .entry((e.color, t, rest.clone()))
                    .or_default()
                    .push(h);
            }
        }
        Ok(hs)
    }

    /// Checks internal consistency: edge vertices exist, edges are non-empty,
    /// ids are unique.
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for e in &self.edges {
            self.check_edge(&e.edge, e.color)?;
            if !ids.insert(e.id) {
                return Err(Error::Invalid(format!("duplicate edge id {}", e.id)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hypergraph serializes")
    }

    pub fn from_json(text: &str) -> Result<Hypergraph> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct RawHypergraph {
    vertices: Vec<VertexId>,
    k: u32,
    edges: Vec<EdgeInstance>,
}

impl Serialize for Hypergraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct RawRef<'a> {
            vertices: Vec<VertexId>,
            k: u32,
            edges: &'a [EdgeInstance],
        }
        RawRef {
            vertices: self.vertices.iter().copied().collect(),
            k: self.k,
            edges: &self.edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHypergraph::deserialize(deserializer)?;
        let mut g = Hypergraph::with_vertices(raw.k, raw.vertices.iter().copied());
        if g.vertices.len() != raw.vertices.len() {
            return Err(de::Error::custom("vertex listed twice"));
        }
        g.next_edge_id = raw.edges.iter().map(|e| e.id.0 + 1).max().unwrap_or(0);
        g.edges = raw.edges;
        g.validate().map_err(de::Error::custom)?;
        Ok(g)
    }
}
