//! Direct checks written from the definitions, sharing no code with the
//! library beyond the hypergraph container.

use std::collections::{BTreeMap, BTreeSet};

use hyperdetach::{ColorId, Edge, Hypergraph, SplitRequest, VertexId};

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64
}

pub fn admissible(n: u64, r: u64, lambda: u64, h: u64) -> bool {
    r >= 1 && (r * n).is_multiple_of(h) && (lambda * binom(n - 1, h - 1)).is_multiple_of(r)
}

pub fn degree(g: &Hypergraph, x: VertexId, color: ColorId) -> u64 {
    g.edges()
        .iter()
        .filter(|e| e.color == color)
        .map(|e| e.edge.multiplicity(x) as u64)
        .sum()
}

/// Component label of every vertex, by repeated merging of edge supports.
pub fn labels(g: &Hypergraph, color: Option<ColorId>) -> BTreeMap<VertexId, usize> {
    let vs: Vec<VertexId> = g.vertices().iter().copied().collect();
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in g.edges().iter().filter(|e| color.is_none_or(|c| c == e.color)) {
        let idx: Vec<usize> = e.edge.support().map(|x| vs.binary_search(&x).unwrap()).collect();
        for w in idx.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    (0..vs.len()).map(|i| (vs[i], root(&mut parent, i))).collect()
}

pub fn components(g: &Hypergraph, color: Option<ColorId>) -> usize {
    labels(g, color).values().collect::<BTreeSet<_>>().len()
}

/// Per class: edge count, edges by size, component count, whether some
/// component with an edge has every vertex at degree `r`, and whether some
/// component with an edge has only edges of size `h`.
#[derive(Clone, Debug, Default)]
pub struct ClassShape {
    pub edges: u64,
    pub by_size: BTreeMap<u32, u64>,
    pub components: u64,
    pub regular_component: bool,
    pub uniform_component: bool,
    pub max_degree: u64,
    pub min_degree: u64,
}

pub fn class_shape(g: &Hypergraph, color: ColorId, r: u64, h: u32) -> ClassShape {
    let label = labels(g, Some(color));
    let mut deg: BTreeMap<VertexId, u64> = g.vertices().iter().map(|&x| (x, 0)).collect();
    let mut shape = ClassShape::default();
    let mut with_edge: BTreeSet<usize> = BTreeSet::new();
    let mut non_uniform: BTreeSet<usize> = BTreeSet::new();
    for e in g.edges().iter().filter(|e| e.color == color) {
        shape.edges += 1;
        *shape.by_size.entry(e.edge.size()).or_insert(0) += 1;
        let first = e.edge.occurrences()[0].0;
        with_edge.insert(label[&first]);
        if e.edge.size() != h {
            non_uniform.insert(label[&first]);
        }
        for &(x, m) in e.edge.occurrences() {
            *deg.get_mut(&x).unwrap() += m as u64;
        }
    }
    let mut irregular: BTreeSet<usize> = BTreeSet::new();
    for (x, &d) in &deg {
        if d != r {
            irregular.insert(label[x]);
        }
    }
    shape.components = label.values().collect::<BTreeSet<_>>().len() as u64;
    shape.regular_component = with_edge.iter().any(|c| !irregular.contains(c));
    shape.uniform_component = with_edge.iter().any(|c| !non_uniform.contains(c));
    shape.max_degree = deg.values().copied().max().unwrap_or(0);
    shape.min_degree = deg.values().copied().min().unwrap_or(0);
    shape
}

/// Every set of both families, and the ground set, gets its share within
/// one of `|P| / m`.
pub fn check_split(req: &SplitRequest, z: &[u32]) -> Result<(), String> {
    let n = req.ground.len();
    let chosen: BTreeSet<u32> = z.iter().copied().collect();
    if chosen.len() != z.len() || chosen.iter().any(|&x| x as usize >= n) {
        return Err(format!("split {z:?} repeats or leaves the ground"));
    }
    let m = req.divisor as u64;
    let all: Vec<u32> = (0..n as u32).collect();
    let sets = std::iter::once(all.as_slice()).chain(req.family_a.sets()).chain(req.family_b.sets());
    for set in sets {
        let got = set.iter().filter(|x| chosen.contains(x)).count() as u64;
        let size = set.len() as u64;
        if got * m > size + m - 1 || got * m + m - 1 < size {
            return Err(format!("set of size {size} gets {got} with divisor {m}"));
        }
    }
    Ok(())
}

/// Parts appear at most once per edge, the vertex set is the original one
/// plus the new parts, and merging the parts back gives the original.
pub fn check_detachment_shape(h: &Hypergraph, f: &Hypergraph, parts: &[VertexId]) -> Result<(), String> {
    let alpha = parts[0];
    let part_set: BTreeSet<VertexId> = parts.iter().copied().collect();
    let mut expected: BTreeSet<VertexId> = h.vertices().clone();
    expected.extend(parts.iter().copied());
    if f.vertices() != &expected {
        return Err("vertex set is not the original plus the parts".into());
    }
    let merged = |e: &Edge| {
        let mut out = Edge::new();
        for &(x, m) in e.occurrences() {
            out.add(if part_set.contains(&x) { alpha } else { x }, m);
        }
        out
    };
    let before: BTreeMap<_, _> = h.edges().iter().map(|e| (e.id, (e.edge.clone(), e.color))).collect();
    let mut after = BTreeMap::new();
    for e in f.edges() {
        if let Some(&(x, m)) = e.edge.occurrences().iter().find(|(x, m)| part_set.contains(x) && *m > 1) {
            return Err(format!("edge {} holds part {x} {m} times", e.id));
        }
        after.insert(e.id, (merged(&e.edge), e.color));
    }
    if before != after {
        return Err("merging the parts does not give back the original".into());
    }
    Ok(())
}

/// Every edge of `g` appears in `out` under the same id and color, and
/// restricts to the vertex set of `g` as it was.
pub fn keeps_edges(g: &Hypergraph, out: &Hypergraph) -> bool {
    let by_id: BTreeMap<_, _> = out.edges().iter().map(|e| (e.id, e)).collect();
    let keep = g.vertices();
    g.edges().iter().all(|e| {
        by_id
            .get(&e.id)
            .is_some_and(|o| o.edge.restricted(|x| keep.contains(&x)) == e.edge && o.color == e.color)
    })
}
