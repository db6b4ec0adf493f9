//! Fair splits of a ground set against two laminar families.
//!
//! Given laminar families `A` and `B` over a ground set and a divisor `m`,
//! a fair split is a subset `Z` with `floor(|P|/m) <= |Z ∩ P| <= ceil(|P|/m)`
//! for every member `P` of either family and for the ground set itself.
//!
//! The split is read off an integral feasible flow: the `A` forest is laid
//! out top-down from the source, the `B` forest bottom-up into the sink, each
//! forest arc carries the window of its set, and each ground element is a unit
//! arc from its smallest `A` set to its smallest `B` set.

use crate::error::{Error, Result};
use crate::flow::{feasible_flow, BoundedArc};
use crate::hypergraph::Hinge;
use crate::laminar::LaminarFamily;
use crate::sorting::sort_by_pair;

#[derive(Clone, Debug)]
pub struct SplitRequest {
    pub ground: Vec<Hinge>,
    pub family_a: LaminarFamily,
    pub family_b: LaminarFamily,
    pub divisor: u32,
}

/// `(floor(size/m), ceil(size/m))`.
pub fn window(size: u64, m: u64) -> (u64, u64) {
    (size / m, size.div_ceil(m))
}

fn check(req: &SplitRequest) -> Result<()> {
    if req.divisor == 0 {
        return Err(Error::precondition("positive divisor", "m = 0"));
    }
    let n = req.ground.len();
    if req.family_a.universe() != n || req.family_b.universe() != n {
        return Err(Error::Invalid("family universe differs from the ground set".into()));
    }
    Ok(())
}

/// Whether `z` (sorted or not, indices into the ground) meets every window.
pub fn is_fair(req: &SplitRequest, z: &[u32]) -> bool {
    let m = req.divisor as u64;
    let mut chosen = vec![false; req.ground.len()];
    for &x in z {
        chosen[x as usize] = true;
    }
    let ok = |set: &[u32]| {
        let c = set.iter().filter(|&&x| chosen[x as usize]).count() as u64;
        let (lo, hi) = window(set.len() as u64, m);
        lo <= c && c <= hi
    };
    let (lo, hi) = window(req.ground.len() as u64, m);
    let total = chosen.iter().filter(|&&c| c).count() as u64;
    lo <= total
        && total <= hi
        && req.family_a.sets().all(ok)
        && req.family_b.sets().all(ok)
}

fn rooted(fam: &LaminarFamily) -> std::borrow::Cow<'_, LaminarFamily> {
    if fam.is_rooted() {
        std::borrow::Cow::Borrowed(fam)
    } else {
        std::borrow::Cow::Owned(fam.with_root())
    }
}

/// Computes a fair split, returned as sorted indices into the ground list.
pub fn fair_split(req: &SplitRequest) -> Result<Vec<u32>> {
    check(req)?;
    let n = req.ground.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = req.divisor as u64;
    let a = rooted(&req.family_a);
    let b = rooted(&req.family_b);
    // a set of one element has window [0, 1] once m >= 2, which the unit
    // supply of that element already enforces; such sets are skipped
    let skip = |size: usize| m >= 2 && size == 1;
    let (source, sink) = (0usize, 1usize);
    let a_node = |i: usize| 2 + i;
    let b_node = |i: usize| 2 + a.len() + i;
    let bounded = |from, to, size: usize| {
        let (lo, hi) = window(size as u64, m);
        BoundedArc { from, to, lo: lo as i64, hi: hi as i64 }
    };
    // nearest ancestor (or self) that is not skipped
    let kept = |fam: &LaminarFamily| -> Vec<usize> {
        let mut out = vec![0usize; fam.len()];
        for i in 0..fam.len() {
            out[i] = if i == 0 || !skip(fam.set(i).len()) {
                i
            } else {
                out[fam.parent(i).expect("rooted forest")]
            };
        }
        out
    };
    let (a_kept, b_kept) = (kept(&a), kept(&b));

    let mut arcs = Vec::with_capacity(a.len() + b.len() + 2);
    arcs.push(bounded(source, a_node(0), n));
    for i in 1..a.len() {
        if a_kept[i] == i {
            let p = a_kept[a.parent(i).expect("rooted forest")];
            arcs.push(bounded(a_node(p), a_node(i), a.set(i).len()));
        }
    }
    for i in 1..b.len() {
        if b_kept[i] == i {
            let p = b_kept[b.parent(i).expect("rooted forest")];
            arcs.push(bounded(b_node(i), b_node(p), b.set(i).len()));
        }
    }
    arcs.push(bounded(b_node(0), sink, n));

    // elements with the same pair of end nodes share one arc
    let ends: Vec<(u32, u32)> = (0..n as u32)
        .map(|x| {
            (
                a_kept[a.minimal_set(x).expect("rooted forest")] as u32,
                b_kept[b.minimal_set(x).expect("rooted forest")] as u32,
            )
        })
        .collect();
    let all: Vec<u32> = (0..n as u32).collect();
    let order = sort_by_pair(
        &all,
        a.len().max(b.len()),
        |x| ends[x as usize].0 as usize,
        |x| ends[x as usize].1 as usize,
    );
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let first_group_arc = arcs.len();
    for (i, &x) in order.iter().enumerate() {
        let (ea, eb) = ends[x as usize];
        if i == 0 || ends[order[i - 1] as usize] != (ea, eb) {
            groups.push((i, i));
            arcs.push(BoundedArc { from: a_node(ea as usize), to: b_node(eb as usize), lo: 0, hi: 0 });
        }
        let g = groups.last_mut().unwrap();
        g.1 = i + 1;
        arcs.last_mut().unwrap().hi += 1;
    }

    let flow = feasible_flow(2 + a.len() + b.len(), &arcs, source, sink)
        .ok_or_else(|| Error::Internal("no fair split exists for two laminar families".into()))?;
    let mut z: Vec<u32> = Vec::new();
    for (gi, &(lo, hi)) in groups.iter().enumerate() {
        let take = flow[first_group_arc + gi] as usize;
        z.extend_from_slice(&order[lo..lo + take.min(hi - lo)]);
    }
    z.sort_unstable();
    debug_assert!(is_fair(req, &z));
    Ok(z)
}

/// Exhaustive search over all subsets of a ground set of at most 20 elements;
/// returns the first fair split in subset order.
pub fn fair_split_bruteforce(req: &SplitRequest) -> Result<Option<Vec<u32>>> {
    check(req)?;
    let n = req.ground.len();
    if n > 20 {
        return Err(Error::TooLarge(format!("{n} ground elements, at most 20 supported")));
    }
    let m = req.divisor as u64;
    let mut constraints: Vec<(u32, u64, u64)> = Vec::new();
    let full: u32 = if n == 0 { 0 } else { (1u64 << n) as u32 - 1 };
    for set in req
        .family_a
        .sets()
        .chain(req.family_b.sets())
        .map(|s| s.iter().fold(0u32, |acc, &x| acc | 1 << x))
        .chain(std::iter::once(full))
    {
        let (lo, hi) = window(set.count_ones() as u64, m);
        constraints.push((set, lo, hi));
    }
    for z in 0u32..=full {
        if constraints.iter().all(|&(set, lo, hi)| {
            let c = (z & set).count_ones() as u64;
            lo <= c && c <= hi
        }) {
            return Ok(Some((0..n as u32).filter(|&x| z >> x & 1 == 1).collect()));
        }
    }
    Ok(None)
}
