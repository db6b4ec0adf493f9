//! Maximum flow (Dinic) and feasible flows under lower and upper arc bounds.

use crate::sorting::sort_by_pair;

#[derive(Clone, Debug)]
pub struct MaxFlow {
    nodes: usize,
    head: Vec<u32>,
    tail: Vec<u32>,
    cap: Vec<i64>,
    /// Arc ids grouped by tail node, `first[v]..first[v + 1]`.
    first: Vec<u32>,
    order: Vec<u32>,
    level: Vec<i32>,
    cursor: Vec<u32>,
}

impl MaxFlow {
    pub fn new(nodes: usize) -> Self {
        MaxFlow {
            nodes,
            head: Vec::new(),
            tail: Vec::new(),
            cap: Vec::new(),
            first: Vec::new(),
            order: Vec::new(),
            level: Vec::new(),
            cursor: Vec::new(),
        }
    }

    /// Adds an arc and returns its handle; the paired reverse arc is `handle ^ 1`.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.head.len();
        self.head.extend([to as u32, from as u32]);
        self.tail.extend([from as u32, to as u32]);
        self.cap.extend([cap, 0]);
        self.first.clear();
        id
    }

    /// Flow currently carried by the arc `handle`.
    pub fn flow(&self, handle: usize) -> i64 {
        self.cap[handle ^ 1]
    }

    fn index(&mut self) {
        let mut first = vec![0u32; self.nodes + 1];
        for &t in &self.tail {
            first[t as usize + 1] += 1;
        }
        for v in 0..self.nodes {
            first[v + 1] += first[v];
        }
        let mut fill = first.clone();
        let mut order = vec![0u32; self.tail.len()];
        for (a, &t) in self.tail.iter().enumerate() {
            order[fill[t as usize] as usize] = a as u32;
            fill[t as usize] += 1;
        }
        self.first = first;
        self.order = order;
        self.level = vec![-1; self.nodes];
        self.cursor = vec![0; self.nodes];
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = Vec::with_capacity(self.nodes);
        queue.push(s as u32);
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i] as usize;
            i += 1;
            for &a in &self.order[self.first[u] as usize..self.first[u + 1] as usize] {
                let to = self.head[a as usize] as usize;
                if self.cap[a as usize] > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push(to as u32);
                }
            }
        }
        self.level[t] >= 0
    }

    /// Pushes up to `limit` units from `u` to `t` along the level graph.
    fn push(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        let mut pushed = 0;
        let end = self.first[u + 1];
        while self.cursor[u] < end {
            let a = self.order[self.cursor[u] as usize] as usize;
            let to = self.head[a] as usize;
            let cap = self.cap[a];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.push(to, t, cap.min(limit - pushed));
                if got > 0 {
                    self.cap[a] -= got;
                    self.cap[a ^ 1] += got;
                    pushed += got;
                    if pushed == limit {
                        return pushed;
                    }
                }
            }
            self.cursor[u] += 1;
        }
        // dead end for this phase
        self.level[u] = -1;
        pushed
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        if self.first.is_empty() {
            self.index();
        }
        let mut total = 0;
        while self.bfs(s, t) {
            self.cursor.copy_from_slice(&self.first[..self.nodes]);
            total += self.push(s, t, i64::MAX);
        }
        total
    }
}

/// An arc with flow bounds `lo <= f <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedArc {
    pub from: usize,
    pub to: usize,
    pub lo: i64,
    pub hi: i64,
}

/// How an arc of the reduced network was formed.
#[derive(Clone, Copy, Debug)]
enum Piece {
    Input(usize),
    /// Two arcs in a row through a node with no other arcs.
    Series(usize, usize),
    /// Two arcs with the same ends.
    Parallel(usize, usize),
}

/// Series-parallel reduction of a bounded network, in rounds: merge arcs
/// with the same ends, then contract every node with one arc in and one
/// out, until nothing changes.
struct Reduction {
    nodes: usize,
    pieces: Vec<(Piece, BoundedArc)>,
    live: Vec<usize>,
}

impl Reduction {
    fn add(&mut self, piece: Piece, arc: BoundedArc) -> usize {
        self.pieces.push((piece, arc));
        self.pieces.len() - 1
    }

    fn merge_parallel(&mut self) {
        let pieces = &self.pieces;
        let live = sort_by_pair(&self.live, self.nodes, |id| pieces[id].1.from, |id| pieces[id].1.to);
        let mut out: Vec<usize> = Vec::with_capacity(live.len());
        for id in live {
            let b = self.pieces[id].1;
            match out.last().copied() {
                Some(prev) if self.pieces[prev].1.from == b.from && self.pieces[prev].1.to == b.to => {
                    let a = self.pieces[prev].1;
                    let merged = BoundedArc { lo: a.lo + b.lo, hi: a.hi + b.hi, ..a };
                    *out.last_mut().unwrap() = self.add(Piece::Parallel(prev, id), merged);
                }
                _ => out.push(id),
            }
        }
        self.live = out;
    }

    /// Contracts series pairs; returns how many, or `None` when a pair has
    /// empty bounds.
    fn contract_series(&mut self, nodes: usize, kept: &[bool]) -> Option<usize> {
        let mut in_xor = vec![0usize; nodes];
        let mut out_xor = vec![0usize; nodes];
        let mut indeg = vec![0u32; nodes];
        let mut outdeg = vec![0u32; nodes];
        for &id in &self.live {
            let a = self.pieces[id].1;
            out_xor[a.from] ^= id;
            in_xor[a.to] ^= id;
            outdeg[a.from] += 1;
            indeg[a.to] += 1;
        }
        let mut dead = vec![false; self.pieces.len()];
        let mut done = 0;
        for v in 0..nodes {
            if kept[v] || indeg[v] != 1 || outdeg[v] != 1 {
                continue;
            }
            let (a_id, b_id) = (in_xor[v], out_xor[v]);
            let (a, b) = (self.pieces[a_id].1, self.pieces[b_id].1);
            if a.from == b.to {
                continue;
            }
            let arc = BoundedArc { from: a.from, to: b.to, lo: a.lo.max(b.lo), hi: a.hi.min(b.hi) };
            if arc.lo > arc.hi {
                return None;
            }
            let id = self.add(Piece::Series(a_id, b_id), arc);
            dead.resize(self.pieces.len(), false);
            dead[a_id] = true;
            dead[b_id] = true;
            // the new arc takes the place of `a` at its tail and `b` at its head
            out_xor[a.from] ^= a_id ^ id;
            in_xor[b.to] ^= b_id ^ id;
            indeg[v] = 0;
            outdeg[v] = 0;
            self.live.push(id);
            done += 1;
        }
        if done > 0 {
            self.live.retain(|&id| !dead[id]);
        }
        Some(done)
    }

    fn new(nodes: usize, arcs: &[BoundedArc], keep: &[usize]) -> Option<Self> {
        if arcs.iter().any(|a| a.lo > a.hi) {
            return None;
        }
        let mut red = Reduction {
            nodes,
            pieces: arcs.iter().enumerate().map(|(i, &a)| (Piece::Input(i), a)).collect(),
            live: (0..arcs.len()).filter(|&i| arcs[i].from != arcs[i].to).collect(),
        };
        let mut kept = vec![false; nodes];
        for &v in keep {
            kept[v] = true;
        }
        loop {
            red.merge_parallel();
            if red.contract_series(nodes, &kept)? == 0 {
                return Some(red);
            }
        }
    }

    /// Spreads flow given on live arcs back over the input arcs.
    fn expand(&self, live_flow: &[(usize, i64)], out: &mut [i64]) {
        let mut stack: Vec<(usize, i64)> = live_flow.to_vec();
        while let Some((id, f)) = stack.pop() {
            match self.pieces[id].0 {
                Piece::Input(i) => out[i] = f,
                Piece::Series(a, b) => {
                    stack.push((a, f));
                    stack.push((b, f));
                }
                Piece::Parallel(a, b) => {
                    let (x, y) = (self.pieces[a].1, self.pieces[b].1);
                    let fa = x.hi.min(f - y.lo);
                    stack.push((a, fa));
                    stack.push((b, f - fa));
                }
            }
        }
    }
}

/// Finds a flow from `source` to `sink` (of any value) respecting every
/// arc's bounds, or `None` if none exists. Returns the flow on each arc.
pub fn feasible_flow(nodes: usize, arcs: &[BoundedArc], source: usize, sink: usize) -> Option<Vec<i64>> {
    let red = Reduction::new(nodes, arcs, &[source, sink])?;
    let live = red.live.clone();
    let mut used = vec![usize::MAX; nodes];
    let mut count = 0;
    let mut compact = |v: usize| {
        if used[v] == usize::MAX {
            used[v] = count;
            count += 1;
        }
        used[v]
    };
    let (s, t) = (compact(source), compact(sink));
    let small: Vec<BoundedArc> = live
        .iter()
        .map(|&i| {
            let a = red.pieces[i].1;
            BoundedArc { from: compact(a.from), to: compact(a.to), ..a }
        })
        .collect();
    let flow = feasible_flow_direct(count, &small, s, t)?;
    // self-loops stay out of the reduced network and take their lower bound
    let mut out: Vec<i64> = arcs.iter().map(|a| a.lo).collect();
    let live_flow: Vec<(usize, i64)> = live.into_iter().zip(flow).collect();
    red.expand(&live_flow, &mut out);
    Some(out)
}

fn feasible_flow_direct(nodes: usize, arcs: &[BoundedArc], source: usize, sink: usize) -> Option<Vec<i64>> {
    let super_source = nodes;
    let super_sink = nodes + 1;
    let mut net = MaxFlow::new(nodes + 2);
    let mut excess = vec![0i64; nodes];
    let mut handles = Vec::with_capacity(arcs.len());
    for a in arcs {
        if a.lo > a.hi {
            return None;
        }
        handles.push(net.add_arc(a.from, a.to, a.hi - a.lo));
        excess[a.to] += a.lo;
        excess[a.from] -= a.lo;
    }
    let unbounded: i64 = arcs.iter().map(|a| a.hi).sum::<i64>() + 1;
    net.add_arc(sink, source, unbounded);
    let mut demand = 0;
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            net.add_arc(super_source, v, x);
            demand += x;
        } else if x < 0 {
            net.add_arc(v, super_sink, -x);
        }
    }
    if net.max_flow(super_source, super_sink) != demand {
        return None;
    }
    Some(
        arcs.iter()
            .zip(&handles)
            .map(|(a, &h)| a.lo + net.flow(h))
            .collect(),
    )
}
