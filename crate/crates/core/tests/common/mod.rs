#![allow(dead_code)]

use std::collections::BTreeMap;

use hyperdetach::{ColorId, Edge, Hypergraph, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn v(i: u32) -> VertexId {
    VertexId(i)
}

/// Random colored multiset hypergraph on vertices `0..vertices` with up to
/// `edges` instances, colors in `1..=k`, supports of at most `width`
/// vertices and multiplicities of at most `mult`.
pub fn random_hypergraph<R: Rng>(rng: &mut R, vertices: u32, edges: usize, k: u32, width: usize, mult: u32) -> Hypergraph {
    let all: Vec<VertexId> = (0..vertices).map(v).collect();
    let mut g = Hypergraph::with_vertices(k, all.iter().copied());
    let count = rng.gen_range(1..=edges);
    for _ in 0..count {
        let size = rng.gen_range(1..=width.min(all.len()));
        let support: Vec<VertexId> = all.choose_multiple(rng, size).copied().collect();
        let edge = Edge::from_pairs(support.into_iter().map(|x| (x, rng.gen_range(1..=mult))));
        let color = rng.gen_range(1..=k.max(1));
        g.add_edge(edge, color).unwrap();
    }
    g
}

/// Like `random_hypergraph`, but every edge is made to contain vertex 0,
/// which keeps `0` in a large component.
pub fn random_at_alpha<R: Rng>(rng: &mut R, vertices: u32, edges: usize, k: u32, width: usize, mult: u32) -> Hypergraph {
    let g = random_hypergraph(rng, vertices, edges, k, width, mult);
    let mut out = Hypergraph::with_vertices(k, g.vertices().iter().copied());
    for e in g.edges() {
        let mut edge = e.edge.clone();
        if rng.gen_bool(0.7) && !edge.contains(v(0)) {
            edge.add(v(0), rng.gen_range(1..=mult));
        }
        out.add_edge(edge, e.color).unwrap();
    }
    out
}

/// Components by depth-first search over edge supports.
pub fn brute_components(g: &Hypergraph, color: Option<ColorId>) -> usize {
    let vs: Vec<VertexId> = g.vertices().iter().copied().collect();
    let mut seen: BTreeMap<VertexId, bool> = vs.iter().map(|&x| (x, false)).collect();
    let mut count = 0;
    for &s in &vs {
        if seen[&s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen.insert(s, true);
        while let Some(x) = stack.pop() {
            for e in g.edges() {
                if color.is_some_and(|c| c != e.color) || !e.edge.contains(x) {
                    continue;
                }
                for y in e.edge.support() {
                    if !seen[&y] {
                        seen.insert(y, true);
                        stack.push(y);
                    }
                }
            }
        }
    }
    count
}

/// Whether some split of the edges into two non-empty sets has vertex sets
/// meeting exactly in `alpha`.
pub fn brute_cut_vertex(g: &Hypergraph, alpha: VertexId) -> bool {
    let n = g.edge_count();
    (1u32..(1 << n) - 1).any(|mask| {
        let mut left = std::collections::BTreeSet::new();
        let mut right = std::collections::BTreeSet::new();
        for (i, e) in g.edges().iter().enumerate() {
            let side = if mask >> i & 1 == 1 { &mut left } else { &mut right };
            side.extend(e.edge.support());
        }
        left.intersection(&right).copied().collect::<Vec<_>>() == vec![alpha]
    })
}

/// All `h`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: u32, h: usize) -> Vec<Vec<VertexId>> {
    fn go(next: u32, n: u32, h: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == h {
            out.push(cur.clone());
            return;
        }
        for x in next..n {
            cur.push(v(x));
            go(x + 1, n, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, h, &mut Vec::new(), &mut out);
    out
}

/// `lambda K_n^h` on vertices `0..n` with every edge colored `color`.
pub fn complete(n: u32, h: usize, lambda: u64, k: u32, color: ColorId) -> Hypergraph {
    let mut g = Hypergraph::with_vertices(k, (0..n).map(v));
    for s in subsets(n, h) {
        for _ in 0..lambda {
            g.add_edge(Edge::from_vertices(s.iter().copied()), color).unwrap();
        }
    }
    g
}
