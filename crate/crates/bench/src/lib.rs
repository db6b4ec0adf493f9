//! Fixtures shared by the benchmarks.

use hyperdetach::{Edge, Hypergraph, VertexId};

/// A single vertex carrying `lambda C(n, h)` loops of multiplicity `h`,
/// colored round-robin with `k` colors.
pub fn loops(n: u32, h: u32, lambda: u64, k: u32) -> Hypergraph {
    let total = lambda * hyperdetach::arith::binom(n as u64, h as u64);
    let mut g = Hypergraph::with_vertices(k, [VertexId(0)]);
    for i in 0..total {
        g.add_edge(Edge::from_pairs([(VertexId(0), h)]), (i % k as u64) as u32 + 1)
            .expect("valid edge");
    }
    g
}
