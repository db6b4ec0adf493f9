//! Connected `R`- and `(Q, R)`-factorizations of non-uniform complete
//! hypergraphs `Lambda K_n^H`, which hold `lambda_j` copies of every
//! `h_j`-subset of `n` vertices.
//!
//! A factorization exists exactly when some non-negative integer matrix `A`
//! (rows are factors, columns are edge sizes) has column sums
//! `lambda_j C(n, h_j)` and row degree sums `(A H)_i` in `[n q_i, n r_i]`.
//! Given `A`, one vertex carrying `a_ij` loops `alpha^{h_j}` of color `i`
//! is detached into `n` vertices; factor `i` comes out connected exactly when
//! `sum_j a_ij (h_j - 1) >= n - 1`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::arith::binom;
use crate::constructors::{single_vertex_amalgam, Checks, Construction};
use crate::engine::detach;
use crate::error::Result;

pub const SIZES_INCREASING: &str = "1 <= h_1 < h_2 < ... < h_m <= n";
pub const VECTOR_SHAPE: &str = "Lambda and H have equal length, R and Q have equal length, Q <= R";
pub const DEGREE_IDENTITY: &str = "sum_i q_i <= sum_j lambda_j C(n-1, h_j-1) <= sum_i r_i";
pub const EDGE_TYPE_MATRIX: &str = "a non-negative integer matrix A with column sums lambda_j C(n, h_j) and n Q <= A H <= n R";
pub const CONNECTED_ROW: &str = "sum_j a_ij (h_j - 1) >= n - 1";

/// Factor `i` is a `(q_i, r_i)`-factor; without `q` every factor is
/// `r_i`-regular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationProblem {
    pub n: u64,
    pub lambda: Vec<u64>,
    pub h: Vec<u64>,
    pub r: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<u64>>,
}

impl FactorizationProblem {
    pub fn k(&self) -> usize {
        self.r.len()
    }

    pub fn lower(&self) -> &[u64] {
        self.q.as_deref().unwrap_or(&self.r)
    }

    /// `lambda_j C(n, h_j)`.
    pub fn column_sums(&self) -> Vec<u64> {
        self.lambda.iter().zip(&self.h).map(|(&l, &h)| l * binom(self.n, h)).collect()
    }

    /// Degree of every vertex of `Lambda K_n^H`.
    pub fn degree(&self) -> u64 {
        self.lambda.iter().zip(&self.h).map(|(&l, &h)| l * binom(self.n - 1, h - 1)).sum()
    }

    /// Checks shape, sizes and the degree identity.
    pub fn check(&self, checks: &mut Checks) -> Result<()> {
        checks.require(
            VECTOR_SHAPE,
            !self.h.is_empty()
                && self.lambda.len() == self.h.len()
                && !self.r.is_empty()
                && self.lambda.iter().all(|&l| l >= 1)
                && self.q.as_ref().is_none_or(|q| q.len() == self.r.len() && q.iter().zip(&self.r).all(|(a, b)| a <= b)),
            format!("|Lambda| = {}, |H| = {}, |R| = {}", self.lambda.len(), self.h.len(), self.r.len()),
        )?;
        checks.require(
            SIZES_INCREASING,
            self.h[0] >= 1 && self.h.windows(2).all(|w| w[0] < w[1]) && *self.h.last().unwrap() <= self.n,
            format!("H = {:?}, n = {}", self.h, self.n),
        )?;
        let d = self.degree();
        let (lo, hi) = (self.lower().iter().sum::<u64>(), self.r.iter().sum::<u64>());
        checks.require(DEGREE_IDENTITY, lo <= d && d <= hi, format!("{lo} <= {d} <= {hi}"))
    }
}

/// `a[i][j]`: edges of size `h_j` in factor `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTypeMatrix {
    pub a: Vec<Vec<u64>>,
}

/// Whether a factor with `row[j]` edges of size `h[j]` on `n` vertices can be
/// connected.
pub fn connectable_row(row: &[u64], h: &[u64], n: u64) -> bool {
    row.iter().zip(h).map(|(&a, &h)| a * (h - 1)).sum::<u64>() + 1 >= n
}

/// All rows `a` with `a_j <= cap_j`, `lo <= a . h <= hi`, and, if asked,
/// connectable, in lexicographic order.
pub fn row_solutions(h: &[u64], cap: &[u64], lo: u64, hi: u64, n: u64, connected: bool) -> Vec<Vec<u64>> {
    fn go(j: usize, h: &[u64], cap: &[u64], lo: u64, hi: u64, row: &mut Vec<u64>, sum: u64, out: &mut Vec<Vec<u64>>) {
        if j == h.len() {
            if sum >= lo {
                out.push(row.clone());
            }
            return;
        }
        // the remaining sizes can add at most this much
        let reach: u64 = (j + 1..h.len()).map(|t| cap[t] * h[t]).sum();
        let top = cap[j].min((hi - sum) / h[j]);
        for a in 0..=top {
            let s = sum + a * h[j];
            if s + reach < lo {
                continue;
            }
            row.push(a);
            go(j + 1, h, cap, lo, hi, row, s, out);
            row.pop();
        }
    }
    let mut out = Vec::new();
    go(0, h, cap, lo, hi, &mut Vec::new(), 0, &mut out);
    if connected {
        out.retain(|row| connectable_row(row, h, n));
    }
    out
}

struct Search<'a> {
    rows: Vec<Vec<Vec<u64>>>,
    /// Consecutive rows with equal options are interchangeable.
    same_as_prev: Vec<bool>,
    h: &'a [u64],
    /// `n q_i`, `n r_i` summed over rows `i..`.
    lo_tail: Vec<u64>,
    hi_tail: Vec<u64>,
    failed: HashSet<(usize, usize, Vec<u64>)>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, i: usize, min_choice: usize, left: &mut Vec<u64>) -> bool {
        if i == self.rows.len() {
            return left.iter().all(|&x| x == 0);
        }
        let weight: u64 = left.iter().zip(self.h).map(|(&a, &h)| a * h).sum();
        if weight < self.lo_tail[i] || weight > self.hi_tail[i] {
            return false;
        }
        let start = if self.same_as_prev[i] { min_choice } else { 0 };
        let key = (i, start, left.clone());
        if self.failed.contains(&key) {
            return false;
        }
        for c in start..self.rows[i].len() {
            let fits = self.rows[i][c].iter().zip(left.iter()).all(|(a, l)| a <= l);
            if !fits {
                continue;
            }
            for (l, a) in left.iter_mut().zip(&self.rows[i][c]) {
                *l -= a;
            }
            self.chosen.push(c);
            let ok = self.run(i + 1, c, left);
            if ok {
                for (l, a) in left.iter_mut().zip(&self.rows[i][c]) {
                    *l += a;
                }
                return true;
            }
            self.chosen.pop();
            for (l, a) in left.iter_mut().zip(&self.rows[i][c]) {
                *l += a;
            }
        }
        self.failed.insert(key);
        false
    }
}

/// Finds an edge-type matrix, or `None`. Factor `i` is additionally made
/// connectable when `connected[i]` (missing entries mean no requirement).
pub fn solve_edge_type_matrix(p: &FactorizationProblem, connected: &[bool]) -> Option<EdgeTypeMatrix> {
    if p.check(&mut Checks::default()).is_err() {
        return None;
    }
    let cap = p.column_sums();
    let k = p.k();
    let want = |i: usize| connected.get(i).copied().unwrap_or(false);
    let spec = |i: usize| (p.lower()[i], p.r[i], want(i));
    let rows: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|i| row_solutions(&p.h, &cap, p.n * p.lower()[i], p.n * p.r[i], p.n, want(i)))
        .collect();
    let mut lo_tail = vec![0u64; k + 1];
    let mut hi_tail = vec![0u64; k + 1];
    for i in (0..k).rev() {
        lo_tail[i] = lo_tail[i + 1] + p.n * p.lower()[i];
        hi_tail[i] = hi_tail[i + 1] + p.n * p.r[i];
    }
    let mut search = Search {
        same_as_prev: (0..k).map(|i| i > 0 && spec(i) == spec(i - 1)).collect(),
        rows,
        h: &p.h,
        lo_tail,
        hi_tail,
        failed: HashSet::new(),
        chosen: Vec::new(),
    };
    let mut left = cap;
    if !search.run(0, 0, &mut left) {
        return None;
    }
    Some(EdgeTypeMatrix {
        a: search.chosen.iter().enumerate().map(|(i, &c)| search.rows[i][c].clone()).collect(),
    })
}

/// Fails unless `a` is an edge-type matrix for `p`.
pub fn check_matrix(p: &FactorizationProblem, a: &EdgeTypeMatrix, checks: &mut Checks) -> Result<()> {
    let shape = a.a.len() == p.k() && a.a.iter().all(|row| row.len() == p.h.len());
    let columns = shape
        && p.column_sums()
            .iter()
            .enumerate()
            .all(|(j, &c)| a.a.iter().map(|row| row[j]).sum::<u64>() == c);
    let degrees = shape
        && a.a.iter().enumerate().all(|(i, row)| {
            let d: u64 = row.iter().zip(&p.h).map(|(x, h)| x * h).sum();
            p.n * p.lower()[i] <= d && d <= p.n * p.r[i]
        });
    checks.require(
        EDGE_TYPE_MATRIX,
        columns && degrees,
        format!("{} rows, column sums {}, row degrees {}", a.a.len(), columns, degrees),
    )
}

/// Builds the factorization that `a` prescribes on vertices `0..n`: class
/// `i + 1` is factor `i`, connected exactly when row `i` is connectable.
pub fn factorize_with_matrix(p: &FactorizationProblem, a: &EdgeTypeMatrix) -> Result<Construction> {
    let mut checks = Checks::default();
    p.check(&mut checks)?;
    check_matrix(p, a, &mut checks)?;
    for (i, row) in a.a.iter().enumerate() {
        checks.note(CONNECTED_ROW, connectable_row(row, &p.h, p.n), format!("factor {}", i + 1));
    }
    let groups: Vec<(u32, Vec<u64>)> = p
        .h
        .iter()
        .enumerate()
        .map(|(j, &h)| (h as u32, a.a.iter().map(|row| row[j]).collect()))
        .collect();
    let amalgam = single_vertex_amalgam(p.k() as u32, &groups);
    let result = detach(&amalgam, crate::hypergraph::VertexId(0), p.n as u32, false)?;
    Ok(Construction {
        hypergraph: result.hypergraph,
        checks: checks.0,
    })
}

/// Solves for an edge-type matrix (with the requested factors connected)
/// and builds the factorization.
pub fn factorize_nonuniform(p: &FactorizationProblem, connected: &[bool]) -> Result<Construction> {
    let mut checks = Checks::default();
    p.check(&mut checks)?;
    let a = solve_edge_type_matrix(p, connected);
    checks.require(
        EDGE_TYPE_MATRIX,
        a.is_some(),
        format!("n = {}, Lambda = {:?}, H = {:?}, R = {:?}, Q = {:?}", p.n, p.lambda, p.h, p.r, p.q),
    )?;
    let mut out = factorize_with_matrix(p, &a.unwrap())?;
    checks.0.append(&mut out.checks);
    out.checks = checks.0;
    Ok(out)
}
