//! Fair detachment of one vertex into `n` parts.
//!
//! The engine peels off one new vertex per step. At step `l` it splits the
//! hinges at `alpha` with divisor `n - l + 1` against the two laminar hinge
//! families and moves the chosen hinges onto the new vertex. The result is
//! `alpha`-simple, each part receives a fair share of every degree and edge
//! multiplicity, and a color class stays connected exactly when its degree
//! at `alpha` minus its number of wings is at least `n - 1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::binom;
use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, Hinge, Hypergraph, VertexId};
use crate::laminar::{build_families, HingeFamilies};
use crate::split::{fair_split, SplitRequest};
use crate::wings::wing_decomposition;

#[derive(Clone, Copy, Debug, Default)]
pub struct DetachOptions {
    /// Re-check the per-step invariants after every step.
    pub verify_steps: bool,
    /// Keep the hinge families of every step in the result.
    pub record_families: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetachmentResult {
    pub alpha: VertexId,
    pub hypergraph: Hypergraph,
    /// `alpha` followed by the new vertices in creation order.
    pub parts: Vec<VertexId>,
    /// Maps every part back to `alpha`.
    pub psi: BTreeMap<VertexId, VertexId>,
    /// Hinges moved at each step, named as they were before the move.
    pub audit: Vec<Vec<Hinge>>,
    #[serde(skip)]
    pub families: Vec<HingeFamilies>,
}

/// Fails unless every edge contains `alpha` at most `n` times.
pub fn check_hypothesis(h: &Hypergraph, alpha: VertexId, n: u32) -> Result<()> {
    if !h.has_vertex(alpha) {
        return Err(Error::UnknownVertex(alpha));
    }
    if n == 0 {
        return Err(Error::precondition("at least one part", "n = 0"));
    }
    let offending: Vec<String> = h
        .edges()
        .iter()
        .filter(|e| e.edge.multiplicity(alpha) > n)
        .take(8)
        .map(|e| format!("edge {} has t = {} with Y = {}", e.id, e.edge.multiplicity(alpha), e.edge.without(alpha)))
        .collect();
    if offending.is_empty() {
        Ok(())
    } else {
        Err(Error::precondition(
            "multiplicity of the split vertex in any edge is at most n",
            offending.join("; "),
        ))
    }
}

struct StepRecord {
    moved: Vec<Hinge>,
    families: HingeFamilies,
}

/// Splits `alpha` once in place: a fair share (divisor `m`) of its hinges
/// moves to `beta`, which must already be an isolated vertex of `g`.
fn split_in_place(g: &mut Hypergraph, alpha: VertexId, beta: VertexId, m: u32) -> Result<StepRecord> {
    let families = build_families(g, alpha)?;
    let req = SplitRequest {
        ground: families.ground,
        family_a: families.a,
        family_b: families.b,
        divisor: m,
    };
    let z = fair_split(&req)?;
    let families = HingeFamilies {
        alpha,
        ground: req.ground,
        a: req.family_a,
        b: req.family_b,
    };

    let mut hinge_pos = Vec::with_capacity(families.ground.len());
    for (p, e) in g.edges().iter().enumerate() {
        for _ in 0..e.edge.multiplicity(alpha) {
            hinge_pos.push(p);
        }
    }
    let mut last = None;
    let mut moved = Vec::with_capacity(z.len());
    for &x in &z {
        let p = hinge_pos[x as usize];
        if last == Some(p) {
            return Err(Error::Internal(format!(
                "split moved two hinges of edge {}",
                g.edges()[p].id
            )));
        }
        last = Some(p);
        moved.push(families.ground[x as usize]);
    }
    for &x in &z {
        let e = &mut g.edges_mut()[hinge_pos[x as usize]].edge;
        e.remove(alpha, 1);
        e.add(beta, 1);
    }
    Ok(StepRecord { moved, families })
}

/// One step on a copy: returns the split hypergraph (with `beta` added) and
/// the moved hinges.
pub fn detach_step(g: &Hypergraph, alpha: VertexId, beta: VertexId, m: u32) -> Result<(Hypergraph, Vec<Hinge>)> {
    if !g.has_vertex(alpha) {
        return Err(Error::UnknownVertex(alpha));
    }
    if g.has_vertex(beta) {
        return Err(Error::Invalid(format!("vertex {beta} already exists")));
    }
    if m == 0 {
        return Err(Error::precondition("positive divisor", "m = 0"));
    }
    let mut out = g.clone();
    out.add_vertex(beta);
    let rec = split_in_place(&mut out, alpha, beta, m)?;
    Ok((out, rec.moved))
}

pub fn detach(h: &Hypergraph, alpha: VertexId, n: u32, verify_steps: bool) -> Result<DetachmentResult> {
    detach_with(
        h,
        alpha,
        n,
        DetachOptions {
            verify_steps,
            record_families: false,
        },
    )
}

pub fn detach_with(h: &Hypergraph, alpha: VertexId, n: u32, opts: DetachOptions) -> Result<DetachmentResult> {
    check_hypothesis(h, alpha, n)?;
    let tracked = if opts.verify_steps {
        Some(StepChecker::new(h, alpha, n)?)
    } else {
        None
    };
    let mut g = h.clone();
    let mut parts = vec![alpha];
    let mut audit = Vec::new();
    let mut families = Vec::new();
    let mut next = h.fresh_vertex_id();
    for l in 1..n {
        let beta = next;
        next = VertexId(next.0 + 1);
        g.add_vertex(beta);
        let rec = split_in_place(&mut g, alpha, beta, n - l + 1)?;
        parts.push(beta);
        audit.push(rec.moved);
        if opts.record_families {
            families.push(rec.families);
        }
        if let Some(checker) = &tracked {
            checker.check(&g, &parts)?;
        }
    }
    let psi = parts.iter().map(|&p| (p, alpha)).collect();
    Ok(DetachmentResult {
        alpha,
        hypergraph: g,
        parts,
        psi,
        audit,
        families,
    })
}

type SigKey = (Option<ColorId>, u32, Edge);

/// Checks the invariants that hold after every step of the engine. Built
/// from the input hypergraph; `check` is then called on each intermediate
/// hypergraph with the parts created so far.
pub struct StepChecker {
    alpha: VertexId,
    n: u32,
    degree: BTreeMap<Option<ColorId>, u64>,
    signatures: BTreeMap<SigKey, u64>,
    /// Colors whose margin at `alpha` is at least `n - 1`, with their component counts.
    tracked: BTreeMap<ColorId, usize>,
}

impl StepChecker {
    pub fn new(h: &Hypergraph, alpha: VertexId, n: u32) -> Result<Self> {
        let mut degree = BTreeMap::new();
        let mut signatures = BTreeMap::new();
        degree.insert(None, h.degree(alpha, None)?);
        for e in h.edges() {
            let t = e.edge.multiplicity(alpha);
            *degree.entry(Some(e.color)).or_insert(0) += t as u64;
            let rest = e.edge.without(alpha);
            *signatures.entry((None, t, rest.clone())).or_insert(0) += 1;
            *signatures.entry((Some(e.color), t, rest)).or_insert(0) += 1;
        }
        let mut tracked = BTreeMap::new();
        for c in h.color_classes() {
            if wing_decomposition(h, alpha, Some(c))?.margin() >= n as i64 - 1 {
                tracked.insert(c, h.component_count(Some(c)));
            }
        }
        Ok(StepChecker {
            alpha,
            n,
            degree,
            signatures,
            tracked,
        })
    }

    fn fail(what: String) -> Error {
        Error::Internal(format!("step invariant violated: {what}"))
    }

    /// `parts` lists `alpha` first, then the vertices split off so far.
    pub fn check(&self, g: &Hypergraph, parts: &[VertexId]) -> Result<()> {
        let n = self.n as u64;
        let l = parts.len() as u64;
        let left = n - l + 1;
        let part_set: BTreeSet<VertexId> = parts.iter().copied().collect();

        let mut current: BTreeMap<(Option<ColorId>, u32, Vec<VertexId>, Edge), u64> = BTreeMap::new();
        let mut degrees: BTreeMap<(Option<ColorId>, VertexId), u64> = BTreeMap::new();
        for e in g.edges() {
            let r = e.edge.multiplicity(self.alpha);
            if r as u64 > left {
                return Err(Self::fail(format!("edge {} holds alpha {r} times, bound {left}", e.id)));
            }
            let mut u = Vec::new();
            for &(v, m) in e.edge.occurrences() {
                if part_set.contains(&v) {
                    *degrees.entry((None, v)).or_insert(0) += m as u64;
                    *degrees.entry((Some(e.color), v)).or_insert(0) += m as u64;
                    if v != self.alpha {
                        if m > 1 {
                            return Err(Self::fail(format!("edge {} holds {v} {m} times", e.id)));
                        }
                        u.push(v);
                    }
                }
            }
            let rest = e.edge.restricted(|v| !part_set.contains(&v));
            *current.entry((None, r, u.clone(), rest.clone())).or_insert(0) += 1;
            *current.entry((Some(e.color), r, u, rest)).or_insert(0) += 1;
        }

        for (&class, &d) in &self.degree {
            for (i, &p) in parts.iter().enumerate() {
                let have = degrees.get(&(class, p)).copied().unwrap_or(0);
                let scale = if i == 0 { left } else { 1 };
                let (lo, hi) = (scale * (d / n), scale * d.div_ceil(n));
                if have < lo || have > hi {
                    return Err(Self::fail(format!(
                        "degree of part {p} in class {class:?} is {have}, window [{lo}, {hi}]"
                    )));
                }
            }
        }

        let others = &parts[1..];
        for ((class, t, rest), &total) in &self.signatures {
            let t = *t as u64;
            let c_nt = binom(n, t);
            let (lo, hi) = (total / c_nt, total.div_ceil(c_nt));
            let r_min = t.saturating_sub(others.len() as u64);
            for r in r_min..=t.min(left) {
                let scale = binom(left, r);
                for u in subsets(others, (t - r) as usize) {
                    let have = current
                        .get(&(*class, r as u32, u.clone(), rest.clone()))
                        .copied()
                        .unwrap_or(0);
                    if have < lo * scale || have > hi * scale {
                        return Err(Self::fail(format!(
                            "class {class:?}: alpha^{r} with {u:?} and {rest} occurs {have} times, \
                             window [{}, {}]",
                            lo * scale,
                            hi * scale
                        )));
                    }
                }
            }
        }

        for (&c, &before) in &self.tracked {
            let after = g.component_count(Some(c));
            if after != before {
                return Err(Self::fail(format!("class {c} went from {before} to {after} components")));
            }
            let margin = wing_decomposition(g, self.alpha, Some(c))?.margin();
            if margin < (n - l) as i64 {
                return Err(Self::fail(format!("class {c} margin {margin} below {}", n - l)));
            }
        }
        Ok(())
    }
}

/// All `k`-subsets of `items`, each in input order.
pub(crate) fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}
