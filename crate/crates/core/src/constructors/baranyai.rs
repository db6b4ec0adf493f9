//! Connected almost-regular decompositions of `lambda K_n^h`.

use crate::arith::binom;
use crate::constructors::{single_vertex_amalgam, Checks, Construction};
use crate::engine::detach;
use crate::error::Result;
use crate::hypergraph::VertexId;

pub const SIZE_SUM: &str = "class sizes sum to lambda C(n, h)";
pub const POSITIVE_SIZES: &str = "every class size is positive";
pub const SHAPE: &str = "1 <= h <= n";

/// Whether a class with `a` edges of `lambda K_n^h` can be connected.
pub fn connectable(n: u64, h: u64, a: u64) -> bool {
    a * (h - 1) + 1 >= n
}

/// Decomposes `lambda K_n^h` on vertices `0..n` into classes `1..=k` with
/// `sizes[j-1]` edges each, degrees within a unit window of `h a_j / n`, and
/// class `j` connected exactly when `a_j (h - 1) >= n - 1`.
pub fn baranyai_connected(n: u32, h: u32, lambda: u64, sizes: &[u64]) -> Result<Construction> {
    let mut checks = Checks::default();
    checks.require(SHAPE, h >= 1 && h <= n, format!("n = {n}, h = {h}"))?;
    let total = lambda * binom(n as u64, h as u64);
    let sum: u64 = sizes.iter().sum();
    checks.require(SIZE_SUM, sum == total, format!("sum = {sum}, lambda C(n, h) = {total}"))?;
    checks.require(
        POSITIVE_SIZES,
        !sizes.is_empty() && sizes.iter().all(|&a| a >= 1),
        format!("sizes = {sizes:?}"),
    )?;
    for (j, &a) in sizes.iter().enumerate() {
        checks.note(
            "connected class",
            connectable(n as u64, h as u64, a),
            format!("class {}: a = {a}, (n - 1)/(h - 1) threshold", j + 1),
        );
    }
    let amalgam = single_vertex_amalgam(sizes.len() as u32, &[(h, sizes.to_vec())]);
    let result = detach(&amalgam, VertexId(0), n, false)?;
    Ok(Construction {
        hypergraph: result.hypergraph,
        checks: checks.0,
    })
}
