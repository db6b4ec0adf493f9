//! Extending a partial `r`-factorization of `lambda K_m^h` to a connected
//! `r`-factorization of `lambda K_n^h`, for `h` in `2..=5`.
//!
//! The `n - m` new vertices are collapsed into one vertex `alpha`. Edges
//! `alpha^i X` with `|X| >= 2` are colored greedily, `alpha^{h-1} u` edges
//! top every old vertex up to degree `r`, and the `alpha^h` loops fill each
//! class to `r n / h` edges. Detaching `alpha` into `n - m` parts finishes.

use std::collections::BTreeSet;

pub use crate::arith::is_admissible;
use crate::arith::{at_least_scaled, binom, exceeds_sqrt, sqrt_at_least};
use crate::constructors::{
    check_layers, check_partial, class_shapes, combinations, detach_connected, Checks, ConditionCheck, Construction,
    ADMISSIBLE, EDGE_COUNT_WINDOW, INPUT_SHAPE, NO_REGULAR_COMPONENT,
};
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, Hypergraph, VertexId};

pub const H3_THRESHOLD: &str = "n > 2m + (gamma - 1)/2 with gamma = sqrt(8m^2 - 16m - 7)";
pub const R2_BRANCH: &str = "r = 2 needs n >= 3.5m - 3 or at most (2m + gamma)/5 + 1 components per class";
pub const H4_THRESHOLD: &str = "n >= 4.847323 m";
pub const H5_THRESHOLD: &str = "n >= 6.285214 m";

/// Smallest `a` with `q <= C(a - 1, h - 1) / r`.
pub fn n_r(q: u64, r: u64, h: u64) -> u64 {
    let mut a = h.max(1);
    while (binom(a - 1, h - 1) as u128) < q as u128 * r as u128 {
        a += 1;
    }
    a
}

/// Per-class bounds of the edge-count window, scaled by `h (h - 1)`:
/// `h (h-1) (r m - r n) + (h-1) r n <= h (h-1) E_j <= (h-1) r n - h (n - m + c_j - 1)`.
pub fn edge_window_holds(n: u64, m: u64, r: u64, h: u64, edges: u64, components: u64) -> (bool, bool) {
    let (n, m, r, h, e, c) = (n as i128, m as i128, r as i128, h as i128, edges as i128, components as i128);
    let scaled = h * (h - 1) * e;
    let lower = h * (h - 1) * (r * m - r * n) + (h - 1) * r * n;
    let upper = (h - 1) * r * n - h * (n - m + c - 1);
    (lower <= scaled, scaled <= upper)
}

/// Input of an extension problem: `g` must be `lambda K_m^h` with every edge
/// colored in `1..=k`, `k = lambda C(n-1, h-1) / r`.
#[derive(Clone, Copy, Debug)]
pub struct PartialProblem {
    pub n: u64,
    pub r: u64,
    pub lambda: u64,
    pub h: u64,
}

impl PartialProblem {
    pub fn k(&self) -> Option<u64> {
        crate::arith::class_count(self.n, self.r, self.lambda, self.h)
    }
}

fn shape(g: &Hypergraph, p: &PartialProblem, checks: &mut Checks) -> Result<()> {
    let m = g.vertex_count() as u64;
    checks.require(
        INPUT_SHAPE,
        p.h >= 2 && p.r >= 1 && p.lambda >= 1 && m >= 1 && p.n > m,
        format!("n = {}, m = {m}, h = {}, r = {}, lambda = {}", p.n, p.h, p.r, p.lambda),
    )?;
    check_layers(g, |s| if s as u64 == p.h { p.lambda } else { 0 }, "lambda K_m^h")
}

/// The three necessary conditions for a connected extension, evaluated on
/// every class `1..=k`. Malformed input is an error; failed conditions are
/// reported with `holds = false`.
pub fn check_partial_necessary(g: &Hypergraph, p: PartialProblem) -> Result<Vec<ConditionCheck>> {
    let mut checks = Checks::default();
    shape(g, &p, &mut checks)?;
    let m = g.vertex_count() as u64;
    let Some(k) = p.k() else {
        checks.note(ADMISSIBLE, false, format!("h = {} must divide r n and r must divide lambda C(n-1, h-1)", p.h));
        return Ok(checks.0);
    };
    checks.note(ADMISSIBLE, true, format!("k = {k}"));
    check_partial(g, k, p.r)?;
    let shapes = class_shapes(g, k as u32, p.r);
    let regular: Vec<usize> = (0..shapes.len()).filter(|&j| shapes[j].regular_component).map(|j| j + 1).collect();
    checks.note(NO_REGULAR_COMPONENT, regular.is_empty(), format!("classes with an r-regular component: {regular:?}"));
    let mut bad = Vec::new();
    for (j, s) in shapes.iter().enumerate() {
        let (lo, hi) = edge_window_holds(p.n, m, p.r, p.h, s.edges, s.components);
        if !(lo && hi) {
            bad.push(format!("class {}: |E| = {}, c = {}", j + 1, s.edges, s.components));
        }
    }
    checks.note(EDGE_COUNT_WINDOW, bad.is_empty(), bad.join("; "));
    Ok(checks.0)
}

/// Checks the hypotheses for `h` in `2..=5` and returns `k`.
fn hypotheses(g: &Hypergraph, p: &PartialProblem, checks: &mut Checks) -> Result<u64> {
    shape(g, p, checks)?;
    let m = g.vertex_count() as u64;
    let (n, r, h) = (p.n, p.r, p.h);
    checks.require(
        INPUT_SHAPE,
        (2..=5).contains(&h) && (h == 2 || m > h),
        format!("h = {h}, m = {m}: need h in 2..=5 and m > h for h >= 3"),
    )?;
    checks.require(
        ADMISSIBLE,
        is_admissible(n, r, p.lambda, h),
        format!("h = {h} | r n = {} and r = {r} | lambda C(n-1, h-1) = {}", r * n, p.lambda * binom(n - 1, h - 1)),
    )?;
    let k = p.k().expect("admissible");
    check_partial(g, k, r)?;
    let shapes = class_shapes(g, k as u32, r);
    let regular = shapes.iter().position(|s| s.regular_component);
    checks.require(
        NO_REGULAR_COMPONENT,
        regular.is_none(),
        match regular {
            Some(j) => format!("class {} has an r-regular component", j + 1),
            None => "none".into(),
        },
    )?;
    let window = |checks: &mut Checks, name: &str| -> Result<()> {
        for (j, s) in shapes.iter().enumerate() {
            let (lo, hi) = edge_window_holds(n, m, r, h, s.edges, s.components);
            checks.require(
                name,
                lo && hi,
                format!("class {}: |E| = {}, c = {}, lower {lo}, upper {hi}", j + 1, s.edges, s.components),
            )?;
        }
        Ok(())
    };
    match h {
        2 => window(checks, EDGE_COUNT_WINDOW)?,
        3 => {
            let (ni, mi) = (n as i128, m as i128);
            let gamma_sq = 8 * mi * mi - 16 * mi - 7;
            checks.require(
                H3_THRESHOLD,
                exceeds_sqrt(2 * (ni - 2 * mi) + 1, gamma_sq),
                format!("n = {n}, m = {m}, gamma^2 = {gamma_sq}"),
            )?;
            if r == 2 {
                let long = 2 * ni >= 7 * mi - 6;
                let few = shapes
                    .iter()
                    .all(|s| sqrt_at_least(gamma_sq, 5 * (s.components as i128 - 1) - 2 * mi));
                let max_c = shapes.iter().map(|s| s.components).max().unwrap_or(0);
                checks.require(
                    R2_BRANCH,
                    long || few,
                    format!("n >= 3.5m - 3: {long}; max components {max_c}"),
                )?;
            }
        }
        4 => checks.require(H4_THRESHOLD, at_least_scaled(n, m, 4_847_323), format!("n = {n}, m = {m}"))?,
        _ => checks.require(H5_THRESHOLD, at_least_scaled(n, m, 6_285_214), format!("n = {n}, m = {m}"))?,
    }
    if h >= 3 {
        // implied by the hypotheses above
        let mut alarm = Checks::default();
        if window(&mut alarm, EDGE_COUNT_WINDOW).is_err() {
            return Err(Error::Internal(format!(
                "edge count window fails although the h = {h} hypotheses hold: {}",
                alarm.0.last().map(|c| c.detail.clone()).unwrap_or_default()
            )));
        }
    }
    Ok(k)
}

/// Per-color degree table of the old vertices plus, per vertex, the colors
/// still below `r`.
struct Greedy {
    r: u64,
    deg: Vec<Vec<u64>>,
    open: Vec<BTreeSet<ColorId>>,
}

impl Greedy {
    fn new(g: &Hypergraph, vertices: &[VertexId], k: u64, r: u64) -> Self {
        let mut deg = vec![vec![0u64; k as usize + 1]; vertices.len()];
        for e in g.edges() {
            for &(v, mult) in e.edge.occurrences() {
                let x = vertices.binary_search(&v).expect("old vertex");
                deg[x][e.color as usize] += mult as u64;
            }
        }
        let open = deg
            .iter()
            .map(|row| (1..=k as ColorId).filter(|&j| row[j as usize] < r).collect())
            .collect();
        Greedy { r, deg, open }
    }

    fn bump(&mut self, x: usize, j: ColorId, by: u64) {
        self.deg[x][j as usize] += by;
        if self.deg[x][j as usize] >= self.r {
            self.open[x].remove(&j);
        }
    }

    /// Smallest color below `r` at every vertex of `xs`.
    fn pick(&self, xs: &[usize]) -> Option<ColorId> {
        self.open[xs[0]]
            .iter()
            .copied()
            .find(|&j| xs[1..].iter().all(|&x| self.deg[x][j as usize] < self.r))
    }
}

/// Colors the amalgam of `lambda K_n^h` over the old vertices of `g`:
/// `alpha^i X` edges with `|X| >= 2` greedily, then `alpha^{h-1} u` and
/// `alpha^h` edges by the degree and edge-count targets.
fn build_amalgam(g: &Hypergraph, p: &PartialProblem, k: u64, alpha: VertexId) -> Result<Hypergraph> {
    let (n, r, h, lambda) = (p.n, p.r, p.h, p.lambda);
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    let m = vertices.len() as u64;
    let fresh = n - m;
    let mut amalgam = g.clone();
    amalgam.set_k(k as u32);
    amalgam.add_vertex(alpha);
    let mut greedy = Greedy::new(g, &vertices, k, r);
    // counts[j][i]: edges of color j containing alpha exactly i times, i <= h - 2
    let mut counts = vec![vec![0u64; h as usize - 1]; k as usize + 1];
    for e in g.edges() {
        counts[e.color as usize][0] += 1;
    }
    let positions: Vec<usize> = (0..vertices.len()).collect();
    for i in 1..h - 1 {
        let copies = lambda * binom(fresh, i);
        for xs in combinations(&positions, (h - i) as usize) {
            let mut edge = Edge::from_vertices(xs.iter().map(|&x| vertices[x]));
            edge.add(alpha, i as u32);
            for _ in 0..copies {
                let j = greedy.pick(&xs).ok_or_else(|| {
                    Error::Internal(format!("greedy coloring found no color for {edge} (h = {h}, n = {n}, m = {m})"))
                })?;
                for &x in &xs {
                    greedy.bump(x, j, 1);
                }
                counts[j as usize][i as usize] += 1;
                amalgam.add_edge(edge.clone(), j)?;
            }
        }
    }
    for (x, &u) in vertices.iter().enumerate() {
        let edge = Edge::from_pairs([(u, 1), (alpha, (h - 1) as u32)]);
        let mut total = 0;
        for j in 1..=k as usize {
            let need = r - greedy.deg[x][j];
            total += need;
            for _ in 0..need {
                amalgam.add_edge(edge.clone(), j as ColorId)?;
            }
        }
        if total != lambda * binom(fresh, h - 1) {
            return Err(Error::Internal(format!(
                "vertex {u} needs {total} edges of type alpha^(h-1) u, expected {}",
                lambda * binom(fresh, h - 1)
            )));
        }
    }
    let loop_edge = Edge::from_pairs([(alpha, h as u32)]);
    let mut total: i128 = 0;
    for j in 1..=k as usize {
        let weighted: i128 = (0..h as usize - 1).map(|i| (h as i128 - 1 - i as i128) * counts[j][i] as i128).sum();
        let loops = (r * n / h) as i128 - (r * m) as i128 + weighted;
        if loops < 0 {
            return Err(Error::Internal(format!("class {j} needs {loops} loops")));
        }
        total += loops;
        for _ in 0..loops {
            amalgam.add_edge(loop_edge.clone(), j as ColorId)?;
        }
    }
    if total != (lambda * binom(fresh, h)) as i128 {
        return Err(Error::Internal(format!(
            "{total} loops colored, expected lambda C(n - m, h) = {}",
            lambda * binom(fresh, h)
        )));
    }
    let mut at_alpha = vec![0u64; k as usize + 1];
    for e in amalgam.edges() {
        at_alpha[e.color as usize] += e.edge.multiplicity(alpha) as u64;
    }
    if let Some(j) = (1..=k as usize).find(|&j| at_alpha[j] != r * fresh) {
        return Err(Error::Internal(format!(
            "class {j} has degree {} at alpha, expected {}",
            at_alpha[j],
            r * fresh
        )));
    }
    Ok(amalgam)
}

/// Extends the partial `r`-factorization `g` of `lambda K_m^h` to a
/// connected `r`-factorization of `lambda K_n^h`. The new vertices get ids
/// above those of `g`.
pub fn embed_partial_r(g: &Hypergraph, p: PartialProblem) -> Result<Construction> {
    let mut checks = Checks::default();
    let k = hypotheses(g, &p, &mut checks)?;
    let alpha = g.fresh_vertex_id();
    let amalgam = build_amalgam(g, &p, k, alpha)?;
    let m = g.vertex_count() as u64;
    let result = detach_connected(&amalgam, alpha, (p.n - m) as u32)?;
    Ok(Construction {
        hypergraph: result.hypergraph,
        checks: checks.0,
    })
}
