//! Laminar families of hinge sets and the two families the detachment engine
//! splits against.
//!
//! Sets are stored as sorted lists of indices into a ground list of hinges.
//! A family is kept as a forest: every set points to the smallest set of the
//! family strictly containing it.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{ColorId, Edge, EdgeId, Hinge, Hypergraph, VertexId, VertexIndex};
use crate::wings::raw_wings;

/// Where a set of a family comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetLabel {
    All,
    Color { color: ColorId },
    WideWings { color: ColorId },
    Wing { color: ColorId, index: usize },
    Edge { edge: EdgeId },
    Signature { multiplicity: u32, rest: Edge },
    ColorSignature { color: ColorId, multiplicity: u32, rest: Edge },
    Other,
}

/// Sets listed parents first, each naming the position of its smallest
/// proper superset among the earlier sets, stored back to back.
#[derive(Clone, Debug, Default)]
pub struct ForestBuilder {
    data: Vec<u32>,
    offsets: Vec<usize>,
    labels: Vec<SetLabel>,
    parents: Vec<Option<usize>>,
}

impl ForestBuilder {
    pub fn new() -> Self {
        ForestBuilder {
            offsets: vec![0],
            ..Default::default()
        }
    }

    /// Appends a set, given sorted, and returns its position.
    pub fn push(&mut self, set: impl IntoIterator<Item = u32>, label: SetLabel, parent: Option<usize>) -> usize {
        self.data.extend(set);
        self.offsets.push(self.data.len());
        self.labels.push(label);
        self.parents.push(parent);
        self.parents.len() - 1
    }

    pub fn set(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct LaminarFamily {
    universe: usize,
    data: Vec<u32>,
    offsets: Vec<usize>,
    labels: Vec<SetLabel>,
    label_offsets: Vec<usize>,
    parent: Vec<Option<usize>>,
    minimal: Vec<Option<usize>>,
}

impl Serialize for LaminarFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            universe: usize,
            sets: Vec<&'a [u32]>,
            labels: Vec<&'a [SetLabel]>,
            parent: &'a [Option<usize>],
        }
        View {
            universe: self.universe,
            sets: self.sets().collect(),
            labels: (0..self.len()).map(|i| self.labels(i)).collect(),
            parent: &self.parent,
        }
        .serialize(serializer)
    }
}

/// Accumulates sets, checking each against the sets already placed.
struct Placer {
    family: LaminarFamily,
    /// `(set, label)` pairs, in arrival order.
    owners: Vec<(usize, SetLabel)>,
}

impl Placer {
    fn new(universe: usize) -> Self {
        Placer {
            family: LaminarFamily {
                universe,
                data: Vec::new(),
                offsets: vec![0],
                labels: Vec::new(),
                label_offsets: vec![0],
                parent: Vec::new(),
                minimal: vec![None; universe],
            },
            owners: Vec::new(),
        }
    }

    /// Places a non-empty sorted set whose smallest proper superset so far
    /// is `parent`; a set equal to `parent` is merged into it. Returns the
    /// index it ends up at.
    fn place(&mut self, set: &[u32], label: SetLabel, parent: Option<usize>) -> Result<usize> {
        let f = &mut self.family;
        if set.iter().any(|&x| f.minimal[x as usize] != parent) {
            return Err(Error::Invalid("family is not laminar".into()));
        }
        if let Some(p) = parent.filter(|&p| f.set(p).len() == set.len()) {
            self.owners.push((p, label));
            return Ok(p);
        }
        let idx = f.parent.len();
        for &x in set {
            f.minimal[x as usize] = Some(idx);
        }
        f.data.extend_from_slice(set);
        f.offsets.push(f.data.len());
        f.parent.push(parent);
        self.owners.push((idx, label));
        Ok(idx)
    }

    fn finish(self) -> LaminarFamily {
        let mut f = self.family;
        let mut owners = self.owners;
        if owners.windows(2).any(|w| w[0].0 > w[1].0) {
            owners.sort_by_key(|&(i, _)| i);
        }
        let mut label_offsets = vec![0usize; f.parent.len() + 1];
        for &(i, _) in &owners {
            label_offsets[i + 1] += 1;
        }
        for i in 0..f.parent.len() {
            label_offsets[i + 1] += label_offsets[i];
        }
        f.labels = owners.into_iter().map(|(_, l)| l).collect();
        f.label_offsets = label_offsets;
        f
    }
}

fn sorted_within(set: &[u32], universe: usize) -> bool {
    set.windows(2).all(|w| w[0] < w[1]) && set.last().is_none_or(|&x| (x as usize) < universe)
}

impl LaminarFamily {
    /// Builds the forest of a family over `0..universe`. Empty sets are
    /// dropped and repeated sets merged. Sets come out ordered by decreasing
    /// size, ties broken by content. Fails if the family is not laminar.
    pub fn new(universe: usize, sets: Vec<(Vec<u32>, SetLabel)>) -> Result<Self> {
        let mut items: Vec<(Vec<u32>, SetLabel)> = sets
            .into_iter()
            .filter_map(|(mut s, l)| {
                s.sort_unstable();
                s.dedup();
                (!s.is_empty()).then_some((s, l))
            })
            .collect();
        if let Some(x) = items.iter().flat_map(|(s, _)| s.last()).max() {
            if *x as usize >= universe {
                return Err(Error::Invalid(format!("element {x} outside universe {universe}")));
            }
        }
        items.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        let mut placer = Placer::new(universe);
        for (set, label) in items {
            let parent = placer.family.minimal[set[0] as usize];
            placer.place(&set, label, parent)?;
        }
        Ok(placer.finish())
    }

    /// Builds a family from sets listed parents first. Empty sets are
    /// dropped and a set equal to its parent is merged into it. Sets come
    /// out in input order. Fails unless each set is sorted, lies inside its
    /// parent, and meets no other set with the same parent.
    pub fn from_forest(universe: usize, forest: ForestBuilder) -> Result<Self> {
        let mut placer = Placer::new(universe);
        // final index of each input set
        let mut placed: Vec<Option<usize>> = Vec::with_capacity(forest.len());
        for (i, label) in forest.labels.iter().enumerate() {
            let parent = match forest.parents[i] {
                Some(p) if p >= i => return Err(Error::Invalid(format!("set {i} lists a later parent {p}"))),
                Some(p) => placed[p],
                None => None,
            };
            let set = forest.set(i);
            if set.is_empty() {
                placed.push(parent);
                continue;
            }
            if !sorted_within(set, universe) {
                return Err(Error::Invalid(format!("set {i} is not a sorted subset of the universe")));
            }
            placed.push(Some(placer.place(set, label.clone(), parent)?));
        }
        Ok(placer.finish())
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn sets(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.len()).map(|i| self.set(i))
    }

    pub fn set(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn labels(&self, i: usize) -> &[SetLabel] {
        &self.labels[self.label_offsets[i]..self.label_offsets[i + 1]]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Smallest set containing element `x`.
    pub fn minimal_set(&self, x: u32) -> Option<usize> {
        self.minimal[x as usize]
    }

    /// True when the whole universe is a member, so the forest is one tree.
    pub fn is_rooted(&self) -> bool {
        self.universe > 0 && !self.is_empty() && self.set(0).len() == self.universe
    }

    /// The same family with the whole universe added.
    pub fn with_root(&self) -> LaminarFamily {
        if self.is_rooted() || self.universe == 0 {
            return self.clone();
        }
        let mut items: Vec<(Vec<u32>, SetLabel)> = vec![((0..self.universe as u32).collect(), SetLabel::All)];
        for i in 0..self.len() {
            for l in self.labels(i) {
                items.push((self.set(i).to_vec(), l.clone()));
            }
        }
        LaminarFamily::new(self.universe, items).expect("adding the universe keeps a family laminar")
    }
}

/// Whether every two sets are nested or disjoint.
pub fn is_laminar(universe: usize, sets: &[Vec<u32>]) -> bool {
    LaminarFamily::new(
        universe,
        sets.iter().map(|s| (s.clone(), SetLabel::Other)).collect(),
    )
    .is_ok()
}

/// The hinges at one vertex and the two laminar families over them.
#[derive(Clone, Debug, Serialize)]
pub struct HingeFamilies {
    pub alpha: VertexId,
    pub ground: Vec<Hinge>,
    pub a: LaminarFamily,
    pub b: LaminarFamily,
}

struct GroundLayout {
    ground: Vec<Hinge>,
    /// Index of the first hinge of each edge position.
    start: Vec<u32>,
    by_color: BTreeMap<ColorId, Vec<usize>>,
}

fn layout(g: &Hypergraph, alpha: VertexId) -> Result<GroundLayout> {
    let ground = g.hinges_at(alpha)?;
    let mut start = Vec::with_capacity(g.edge_count() + 1);
    let mut by_color: BTreeMap<ColorId, Vec<usize>> = g.color_classes().into_iter().map(|c| (c, Vec::new())).collect();
    let mut next = 0u32;
    for (p, e) in g.edges().iter().enumerate() {
        start.push(next);
        next += e.edge.multiplicity(alpha);
        by_color.get_mut(&e.color).unwrap().push(p);
    }
    start.push(next);
    Ok(GroundLayout { ground, start, by_color })
}

fn range(l: &GroundLayout, p: usize) -> std::ops::Range<u32> {
    l.start[p]..l.start[p + 1]
}

fn family_a_sets(g: &Hypergraph, alpha: VertexId, l: &GroundLayout) -> ForestBuilder {
    let index = VertexIndex::new(g);
    let edges = g.edges();
    let mut sets = ForestBuilder::new();
    sets.push(0..l.ground.len() as u32, SetLabel::All, None);
    let mut in_slim = vec![false; l.ground.len()];
    for (&color, positions) in &l.by_color {
        let color_at = sets.push(positions.iter().flat_map(|&p| range(l, p)), SetLabel::Color { color }, Some(0));
        if sets.set(color_at).is_empty() {
            continue;
        }
        let (wings, _) = raw_wings(g, &index, alpha, positions);
        let mut wide: Vec<usize> = Vec::new();
        let mut slim: Vec<usize> = Vec::new();
        for (i, wing) in wings.iter().enumerate() {
            let degree: u32 = wing.iter().map(|&p| range(l, p).len() as u32).sum();
            if degree >= 2 {
                wide.push(i);
            } else {
                slim.extend(wing.iter().copied().filter(|&p| !range(l, p).is_empty()));
            }
        }
        for &p in &slim {
            in_slim[l.start[p] as usize] = true;
        }
        let union: Vec<u32> = sets.set(color_at).iter().copied().filter(|&x| !in_slim[x as usize]).collect();
        let wide_at = sets.push(union, SetLabel::WideWings { color }, Some(color_at));
        // wing positions ascend, so each wing's hinges come out sorted
        for i in wide {
            let wing_at = sets.push(
                wings[i].iter().flat_map(|&p| range(l, p)),
                SetLabel::Wing { color, index: i },
                Some(wide_at),
            );
            for &p in &wings[i] {
                if !range(l, p).is_empty() {
                    sets.push(range(l, p), SetLabel::Edge { edge: edges[p].id }, Some(wing_at));
                }
            }
        }
        for p in slim {
            sets.push(range(l, p), SetLabel::Edge { edge: edges[p].id }, Some(color_at));
        }
    }
    sets
}

fn family_b_sets(g: &Hypergraph, alpha: VertexId, l: &GroundLayout) -> ForestBuilder {
    let edges = g.edges();
    let rest = |p: usize| edges[p].edge.occurrences().iter().filter(move |(v, _)| *v != alpha);
    let signature_hash = |p: usize, t: u32| {
        let mut h = DefaultHasher::new();
        t.hash(&mut h);
        rest(p).for_each(|o| o.hash(&mut h));
        h.finish()
    };
    // grouped by signature (hash first, then content), then by color
    let mut at: Vec<(u64, u32, usize)> = (0..edges.len())
        .filter_map(|p| {
            let t = edges[p].edge.multiplicity(alpha);
            (t > 0).then(|| (signature_hash(p, t), t, p))
        })
        .collect();
    at.sort_unstable_by(|&(h, t, p), &(k, u, q)| {
        h.cmp(&k)
            .then_with(|| t.cmp(&u))
            .then_with(|| rest(p).cmp(rest(q)))
            .then_with(|| edges[p].color.cmp(&edges[q].color))
            .then_with(|| p.cmp(&q))
    });
    let mut sets = ForestBuilder::new();
    sets.push(0..l.ground.len() as u32, SetLabel::All, None);
    let mut i = 0;
    while i < at.len() {
        let (hash, t, p) = at[i];
        let mut j = i + 1;
        while j < at.len() && at[j].0 == hash && at[j].1 == t && rest(at[j].2).eq(rest(p)) {
            j += 1;
        }
        let label_rest = edges[p].edge.without(alpha);
        let mut whole: Vec<u32> = at[i..j].iter().flat_map(|&(_, _, q)| range(l, q)).collect();
        whole.sort_unstable();
        let sig_at = sets.push(whole, SetLabel::Signature { multiplicity: t, rest: label_rest.clone() }, Some(0));
        let mut c = i;
        while c < j {
            let color = edges[at[c].2].color;
            let mut d = c + 1;
            while d < j && edges[at[d].2].color == color {
                d += 1;
            }
            // positions ascend within one color
            sets.push(
                at[c..d].iter().flat_map(|&(_, _, q)| range(l, q)),
                SetLabel::ColorSignature { color, multiplicity: t, rest: label_rest.clone() },
                Some(sig_at),
            );
            c = d;
        }
        i = j;
    }
    sets
}

fn finish(universe: usize, sets: ForestBuilder, which: &str) -> Result<LaminarFamily> {
    LaminarFamily::from_forest(universe, sets).map_err(|e| Error::Internal(format!("family {which}: {e}")))
}

/// The family of whole-vertex, per-color, wide-wing and per-edge hinge sets.
pub fn build_family_a(g: &Hypergraph, alpha: VertexId) -> Result<(Vec<Hinge>, LaminarFamily)> {
    let l = layout(g, alpha)?;
    let fam = finish(l.ground.len(), family_a_sets(g, alpha, &l), "A")?;
    Ok((l.ground, fam))
}

/// The family of hinge sets grouped by edge signature, overall and per color.
pub fn build_family_b(g: &Hypergraph, alpha: VertexId) -> Result<(Vec<Hinge>, LaminarFamily)> {
    let l = layout(g, alpha)?;
    let fam = finish(l.ground.len(), family_b_sets(g, alpha, &l), "B")?;
    Ok((l.ground, fam))
}

pub fn build_families(g: &Hypergraph, alpha: VertexId) -> Result<HingeFamilies> {
    let l = layout(g, alpha)?;
    let a = finish(l.ground.len(), family_a_sets(g, alpha, &l), "A")?;
    let b = finish(l.ground.len(), family_b_sets(g, alpha, &l), "B")?;
    Ok(HingeFamilies {
        alpha,
        ground: l.ground,
        a,
        b,
    })
}
