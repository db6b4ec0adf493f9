//! Extending an `r`-factorization of `lambda K_m^h` to a connected
//! `s`-factorization of `lambda K_n^h`, for `h` in `2..=5`.
//!
//! For `h = 2` an `r`-factorization is a partial `s`-factorization and the
//! partial embedding applies. For `h >= 3` two vertices `u` and `alpha`
//! stand for the old and the new vertices, with `lambda C(m, i) C(n-m, h-i)`
//! edges `u^i alpha^{h-i}`. These are colored so that `u` has degree
//! `m (s - r)` in the old classes and `s m` in the added ones, `u` is
//! detached into the `m` old vertices, the given factorization is laid on
//! top, and detaching `alpha` into `n - m` parts finishes.

use std::collections::BTreeMap;

use crate::arith::{binom, class_count, is_admissible};
use crate::constructors::partial::{embed_partial_r, PartialProblem};
use crate::constructors::{check_layers, check_partial, detach_connected, Checks, Construction, ADMISSIBLE, INPUT_SHAPE};
use crate::engine::detach;
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, EdgeId, Hypergraph, VertexId};

pub const VERTEX_RANGE: &str = "n > m > h";
pub const RATIO: &str = "1 < s/r <= C(n-1, h-1) / C(m-1, h-1)";
pub const GROWTH: &str = "n >= h m / (h - 1) when s/r < C(n-1, h-1) / C(m-1, h-1)";
pub const OLD_EDGE_SHARE: &str = "(n - m) C(m, 2) >= (m - n/3) [C(n-1, 2) - (s/r) C(m-1, 2)]";
pub const H4_RANGE: &str = "n >= 4m";
pub const H5_RANGE: &str = "n >= 5m";

#[derive(Clone, Copy, Debug)]
pub struct RegularProblem {
    pub n: u64,
    pub r: u64,
    pub s: u64,
    pub lambda: u64,
    pub h: u64,
}

impl RegularProblem {
    /// Classes of the given factorization.
    pub fn q(&self, m: u64) -> Option<u64> {
        class_count(m, self.r, self.lambda, self.h)
    }

    /// Classes of the extension.
    pub fn k(&self) -> Option<u64> {
        class_count(self.n, self.s, self.lambda, self.h)
    }
}

/// Checks the conditions for parameters alone, given the old order `m`.
pub fn check_parameters(m: u64, p: &RegularProblem, checks: &mut Checks) -> Result<()> {
    let (n, r, s, h, lambda) = (p.n, p.r, p.s, p.h, p.lambda);
    checks.require(
        INPUT_SHAPE,
        (2..=5).contains(&h) && r >= 1 && lambda >= 1,
        format!("h = {h}, r = {r}, lambda = {lambda}"),
    )?;
    checks.require(VERTEX_RANGE, n > m && m > h, format!("n = {n}, m = {m}, h = {h}"))?;
    checks.require(
        ADMISSIBLE,
        is_admissible(m, r, lambda, h) && is_admissible(n, s, lambda, h),
        format!("(m, r, lambda) = ({m}, {r}, {lambda}), (n, s, lambda) = ({n}, {s}, {lambda})"),
    )?;
    let (old, new) = (binom(m - 1, h - 1) as u128, binom(n - 1, h - 1) as u128);
    checks.require(
        RATIO,
        r < s && s as u128 * old <= r as u128 * new,
        format!("s/r = {s}/{r}, C(n-1, h-1) / C(m-1, h-1) = {new}/{old}"),
    )?;
    let strict = (s as u128) * old < (r as u128) * new;
    match h {
        2 | 3 => checks.require(
            GROWTH,
            !strict || (h - 1) * n >= h * m,
            format!("n = {n}, m = {m}, classes added: {strict}"),
        )?,
        4 => checks.require(H4_RANGE, n >= 4 * m, format!("n = {n}, m = {m}"))?,
        _ => checks.require(H5_RANGE, n >= 5 * m, format!("n = {n}, m = {m}"))?,
    }
    if h == 3 {
        // scaled by 3 r
        let (n_, m_, r_, s_) = (n as i128, m as i128, r as i128, s as i128);
        let lhs = 3 * r_ * (n_ - m_) * binom(m, 2) as i128;
        let rhs = (3 * m_ - n_) * (r_ * binom(n - 1, 2) as i128 - s_ * binom(m - 1, 2) as i128);
        checks.require(OLD_EDGE_SHARE, lhs >= rhs, format!("{lhs} >= {rhs} after scaling by 3r"))?;
    }
    Ok(())
}

fn check_input(g: &Hypergraph, p: &RegularProblem, checks: &mut Checks) -> Result<(u64, u64)> {
    let m = g.vertex_count() as u64;
    check_parameters(m, p, checks)?;
    check_layers(g, |size| if size as u64 == p.h { p.lambda } else { 0 }, "lambda K_m^h")?;
    let q = p.q(m).expect("admissible");
    // with every edge present, degrees at most r force degree exactly r
    check_partial(g, q, p.r)?;
    checks.note(INPUT_SHAPE, true, format!("r-factorization with q = {q} classes"));
    Ok((q, p.k().expect("admissible")))
}

/// Fills `total` units into slots with windows `[lo, hi]`: every slot gets
/// its lower bound, the rest goes round-robin in slot order.
fn water_fill(lo: &[i64], hi: &[i64], total: i64) -> Option<Vec<i64>> {
    let mut x: Vec<i64> = lo.iter().map(|&l| l.max(0)).collect();
    if x.iter().zip(hi).any(|(a, b)| a > b) {
        return None;
    }
    let mut left = total - x.iter().sum::<i64>();
    if left < 0 {
        return None;
    }
    while left > 0 {
        let before = left;
        let per = 1.max(left / hi.len() as i64);
        for (xj, &hj) in x.iter_mut().zip(hi) {
            if left == 0 {
                break;
            }
            if *xj < hj {
                let step = (hj - *xj).min(per).min(left);
                *xj += step;
                left -= step;
            }
        }
        if left == before {
            return None;
        }
    }
    Some(x)
}

/// `x[j][i]`: number of edges `u^i alpha^{h-i}` of color `j + 1`.
fn type_counts(m: u64, p: &RegularProblem, q: u64, k: u64) -> Result<Vec<Vec<i64>>> {
    let (n, r, s, h, lambda) = (p.n as i64, p.r as i64, p.s as i64, p.h as usize, p.lambda);
    let mi = m as i64;
    let supply: Vec<i64> = (0..=h)
        .map(|i| (lambda * binom(m, i as u64) * binom(p.n - m, (h - i) as u64)) as i64)
        .collect();
    let deg_u: Vec<i64> = (0..k).map(|j| if j < q { mi * (s - r) } else { s * mi }).collect();
    let edges: Vec<i64> = deg_u.iter().map(|&d| (d + s * (n - mi)) / h as i64).collect();
    for (j, &d) in deg_u.iter().enumerate() {
        if (d + s * (n - mi)) % h as i64 != 0 {
            return Err(Error::Internal(format!("class {} has fractional edge count", j + 1)));
        }
    }
    let mut x = vec![vec![0i64; h]; k as usize];
    for i in (2..h).rev() {
        let used = |row: &Vec<i64>| -> i64 { (i + 1..h).map(|t| t as i64 * row[t]).sum() };
        let hi: Vec<i64> = (0..k as usize).map(|j| (deg_u[j] - used(&x[j])) / i as i64).collect();
        let lo: Vec<i64> = if i == 2 {
            (0..k as usize)
                .map(|j| deg_u[j] - edges[j] - (3..h).map(|t| (t as i64 - 1) * x[j][t]).sum::<i64>())
                .collect()
        } else {
            vec![0; k as usize]
        };
        let level = water_fill(&lo, &hi, supply[i]).ok_or_else(|| {
            Error::Internal(format!("edges u^{i} alpha^{} do not fit their class windows", h - i))
        })?;
        for (row, v) in x.iter_mut().zip(level) {
            row[i] = v;
        }
    }
    for (j, row) in x.iter_mut().enumerate() {
        row[1] = deg_u[j] - (2..h).map(|t| t as i64 * row[t]).sum::<i64>();
        row[0] = edges[j] - (1..h).map(|t| row[t]).sum::<i64>();
        if row[0] < 0 || row[1] < 0 {
            return Err(Error::Internal(format!("class {} gets a negative edge count", j + 1)));
        }
    }
    for i in 0..h {
        let got: i64 = x.iter().map(|row| row[i]).sum();
        if got != supply[i] {
            return Err(Error::Internal(format!(
                "{got} edges u^{i} alpha^{} colored, expected {}",
                h - i,
                supply[i]
            )));
        }
    }
    Ok(x)
}

/// Runtime checks of auxiliary facts the sufficiency argument relies on.
fn alarms(m: u64, p: &RegularProblem, q: u64, k: u64) -> Result<()> {
    if p.h == 3 && k == q && (m * (p.s - p.r)) % 2 == 1 && !(p.n >= m + 2 && (p.s - p.r >= 2 || p.n - m >= 3)) {
        return Err(Error::Internal(format!(
            "k = q with m (s - r) odd, but n = {}, m = {m}, s - r = {}",
            p.n,
            p.s - p.r
        )));
    }
    Ok(())
}

fn embed_h2(g: &Hypergraph, p: &RegularProblem, mut checks: Checks) -> Result<Construction> {
    let partial = PartialProblem {
        n: p.n,
        r: p.s,
        lambda: p.lambda,
        h: 2,
    };
    let out = embed_partial_r(g, partial).map_err(|e| match e {
        Error::Precondition { condition, detail } => {
            Error::Internal(format!("partial embedding refused a valid extension: {condition}: {detail}"))
        }
        other => other,
    })?;
    checks.0.extend(out.checks);
    Ok(Construction {
        hypergraph: out.hypergraph,
        checks: checks.0,
    })
}

/// Extends the `r`-factorization `g` of `lambda K_m^h` (colors `1..=q`) to
/// a connected `s`-factorization of `lambda K_n^h`. Classes `1..=q` extend
/// those of `g`; every edge of `g` keeps its id and color, and the new
/// vertices get ids above those of `g`.
pub fn embed_r_to_s(g: &Hypergraph, p: RegularProblem) -> Result<Construction> {
    let mut checks = Checks::default();
    let (q, k) = check_input(g, &p, &mut checks)?;
    if p.h == 2 {
        return embed_h2(g, &p, checks);
    }
    let m = g.vertex_count() as u64;
    alarms(m, &p, q, k)?;
    let x = type_counts(m, &p, q, k)?;

    let (u, alpha) = (VertexId(0), VertexId(1));
    let mut two = Hypergraph::with_vertices(k as u32, [u, alpha]);
    for (j, row) in x.iter().enumerate() {
        for (i, &count) in row.iter().enumerate() {
            let edge = Edge::from_pairs([(u, i as u32), (alpha, (p.h as usize - i) as u32)].into_iter().filter(|e| e.1 > 0));
            for _ in 0..count {
                two.add_edge(edge.clone(), j as ColorId + 1)?;
            }
        }
    }
    let split = detach(&two, u, m as u32, false)?;

    let old: Vec<VertexId> = g.vertices().iter().copied().collect();
    let fresh = g.fresh_vertex_id();
    let mut psi: BTreeMap<VertexId, VertexId> = split.parts.iter().copied().zip(old.iter().copied()).collect();
    psi.insert(alpha, fresh);
    let mapped = split.hypergraph.amalgamate(&psi)?;
    let mut amalgam = g.clone();
    amalgam.set_k(k as u32);
    amalgam.add_vertex(fresh);
    let offset = g.next_edge_id().0;
    for e in mapped.edges() {
        amalgam.add_edge_with_id(EdgeId(offset + e.id.0), e.edge.clone(), e.color)?;
    }
    let result = detach_connected(&amalgam, fresh, (p.n - m) as u32)?;
    Ok(Construction {
        hypergraph: result.hypergraph,
        checks: checks.0,
    })
}
