//! Pairwise similarity metrics and search-space calculators.
//!
//! * `rematch` — Jaccard overlap of the two graphs' motif sets.
//! * `labels` — Jaccard overlap of the flat label sets (structure-blind
//!   ablation baseline).
//! * `smatch` — F1 over matched triples under a one-to-one node alignment
//!   found by seeded hill climbing with restarts, symmetrized by scoring
//!   both directions and taking the max.
//!
//! All scores are exact rationals in [0, 1].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amr::{AmrGraph, NodeId};
use crate::motifs::{label_set, motif_set, FrameMap, MotifKinds};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricId {
    Rematch,
    Smatch,
    Labels,
}

impl MetricId {
    pub fn name(&self) -> &'static str {
        match self {
            MetricId::Rematch => "rematch",
            MetricId::Smatch => "smatch",
            MetricId::Labels => "labels",
        }
    }

    /// Whether the metric explores a node-alignment search space (Eq.-2
    /// style) rather than a feature-overlap one (Eq.-3 style).
    pub fn is_alignment_based(&self) -> bool {
        matches!(self, MetricId::Smatch)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rematch" => Ok(MetricId::Rematch),
            "smatch" => Ok(MetricId::Smatch),
            "labels" => Ok(MetricId::Labels),
            other => Err(format!("unknown metric `{other}` (expected rematch, smatch, labels)")),
        }
    }
}

/// Optional per-score breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScoreDetail {
    /// Set overlap sizes behind a Jaccard score.
    SetOverlap { intersection: u64, union: u64 },
    /// Matched-triple counts behind an alignment F1.
    TripleMatch { matched: u64, left: u64, right: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityScore {
    pub value: Rational,
    pub metric: MetricId,
    pub detail: Option<ScoreDetail>,
}

impl SimilarityScore {
    pub fn to_f64(&self) -> f64 {
        crate::numeric::rational_to(&self.value)
    }

    pub fn as_scalar<R: crate::numeric::Scalar>(&self) -> R {
        crate::numeric::rational_to(&self.value)
    }
}

/// Scoring knobs shared by the metrics.
#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub frames: FrameMap,
    pub kinds: MotifKinds,
    /// Hill-climbing starts per alignment direction.
    pub restarts: usize,
    pub seed: u64,
    pub candidates: CandidateSet,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            frames: FrameMap::identity(),
            kinds: MotifKinds::default(),
            restarts: 4,
            seed: 42,
            candidates: CandidateSet::AllInstances,
        }
    }
}

pub fn score_pair(metric: MetricId, a: &AmrGraph, b: &AmrGraph, opts: &ScoreOptions) -> SimilarityScore {
    match metric {
        MetricId::Rematch => rematch(a, b, &opts.frames, opts.kinds),
        MetricId::Labels => label_jaccard(a, b),
        MetricId::Smatch => smatch(a, b, opts.restarts, opts.seed),
    }
}

/// Jaccard similarity of two string sets; two empty sets count as
/// identical (score 1), one empty set as disjoint (score 0).
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> (u64, u64, Rational) {
    let intersection = a.intersection(b).count() as u64;
    let union = (a.len() + b.len()) as u64 - intersection;
    let value = if union == 0 { Rational::from_integer(1) } else { Rational::new(intersection, union) };
    (intersection, union, value)
}

/// Motif-overlap similarity of two graphs.
pub fn rematch(a: &AmrGraph, b: &AmrGraph, frames: &FrameMap, kinds: MotifKinds) -> SimilarityScore {
    let fa = motif_set(a, frames, kinds);
    let fb = motif_set(b, frames, kinds);
    let (intersection, union, value) = jaccard(fa.as_set(), fb.as_set());
    SimilarityScore {
        value,
        metric: MetricId::Rematch,
        detail: Some(ScoreDetail::SetOverlap { intersection, union }),
    }
}

/// Label-set overlap baseline: blind to structure by construction.
pub fn label_jaccard(a: &AmrGraph, b: &AmrGraph) -> SimilarityScore {
    let (intersection, union, value) = jaccard(&label_set(a), &label_set(b));
    SimilarityScore {
        value,
        metric: MetricId::Labels,
        detail: Some(ScoreDetail::SetOverlap { intersection, union }),
    }
}

/// A one-to-one node alignment with its matched-triple F1.
#[derive(Debug, Clone)]
pub struct AlignmentState {
    /// Partial injection from nodes of the first graph into the second.
    pub mapping: BTreeMap<NodeId, NodeId>,
    pub score: Rational,
}

/// Triple-match F1 under the best alignment hill climbing finds, taking
/// the max over both scoring directions. Deterministic given `seed`.
pub fn smatch(a: &AmrGraph, b: &AmrGraph, restarts: usize, seed: u64) -> SimilarityScore {
    let state = smatch_alignment(a, b, restarts, seed);
    let (t1, t2) = (triple_count(a) as u64, triple_count(b) as u64);
    let matched = matched_triples(a, b, &state.mapping) as u64;
    SimilarityScore {
        value: state.score,
        metric: MetricId::Smatch,
        detail: Some(ScoreDetail::TripleMatch { matched, left: t1, right: t2 }),
    }
}

/// Best alignment over both directions; the mapping is always expressed
/// from `a` into `b`. Each direction runs on a generator seeded the same
/// way, so the pair of climbs — and hence the max — is identical whichever
/// argument order the caller uses.
pub fn smatch_alignment(a: &AmrGraph, b: &AmrGraph, restarts: usize, seed: u64) -> AlignmentState {
    let mut fwd_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bwd_rng = ChaCha8Rng::seed_from_u64(seed);
    let forward = climb_direction(a, b, restarts, &mut fwd_rng);
    let backward = climb_direction(b, a, restarts, &mut bwd_rng);

    let forward_score = f1(forward.1, a, b);
    let backward_score = f1(backward.1, a, b);
    if backward_score > forward_score {
        let side_a = Aligner::node_list(b);
        let side_b = Aligner::node_list(a);
        let mapping = backward
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|j| (side_b[j].clone(), side_a[i].clone())))
            .collect();
        AlignmentState { mapping, score: backward_score }
    } else {
        let side_a = Aligner::node_list(a);
        let side_b = Aligner::node_list(b);
        let mapping = forward
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|j| (side_a[i].clone(), side_b[j].clone())))
            .collect();
        AlignmentState { mapping, score: forward_score }
    }
}

/// F1 recomputed from an explicit alignment; exposed so alignments can be
/// audited against their score.
pub fn alignment_f1(a: &AmrGraph, b: &AmrGraph, mapping: &BTreeMap<NodeId, NodeId>) -> Rational {
    f1(matched_triples(a, b, mapping), a, b)
}

fn f1(matched: usize, a: &AmrGraph, b: &AmrGraph) -> Rational {
    let total = triple_count(a) + triple_count(b);
    Rational::new(2 * matched as u64, total as u64)
}

/// Instance triples, relation triples, attribute triples, plus one `top`
/// triple encoding the root choice.
fn triple_count(g: &AmrGraph) -> usize {
    g.instances().len() + g.relations().len() + g.attributes().len() + 1
}

fn matched_triples(a: &AmrGraph, b: &AmrGraph, mapping: &BTreeMap<NodeId, NodeId>) -> usize {
    let image: HashMap<&str, &str> =
        mapping.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let injective = {
        let mut seen = HashSet::new();
        image.values().all(|v| seen.insert(*v))
    };
    assert!(injective, "alignment mapping must be injective");

    let mut matched = 0usize;
    for (node, concept) in a.instances() {
        if let Some(img) = image.get(node.as_str()) {
            if b.concept(img) == Some(concept.as_str()) {
                matched += 1;
            }
        }
    }
    let b_edges: HashSet<(&str, &str, &str)> = b
        .relations()
        .iter()
        .map(|r| (r.source.as_str(), r.role.as_str(), r.target.as_str()))
        .collect();
    for r in a.relations() {
        if let (Some(s), Some(t)) = (image.get(r.source.as_str()), image.get(r.target.as_str())) {
            if b_edges.contains(&(s, r.role.as_str(), t)) {
                matched += 1;
            }
        }
    }
    let b_attrs: HashSet<(&str, &str, char, &str)> = b
        .attributes()
        .iter()
        .map(|at| (at.source.as_str(), at.label.as_str(), at.value.kind_tag(), at.value.lexical.as_str()))
        .collect();
    for at in a.attributes() {
        if let Some(s) = image.get(at.source.as_str()) {
            if b_attrs.contains(&(s, at.label.as_str(), at.value.kind_tag(), at.value.lexical.as_str())) {
                matched += 1;
            }
        }
    }
    if image.get(a.root().as_str()) == Some(&b.root().as_str())
        && a.concept(a.root()) == b.concept(b.root())
    {
        matched += 1;
    }
    matched
}

/// Hill climbing in one direction; returns the best (mapping-by-index,
/// matched count) over all restarts.
fn climb_direction(
    a: &AmrGraph,
    b: &AmrGraph,
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Option<usize>>, usize) {
    let aligner = Aligner::new(a, b);
    let mut best: Option<(Vec<Option<usize>>, usize)> = None;
    for restart in 0..restarts.max(1) {
        let start = if restart == 0 { aligner.greedy_start() } else { aligner.random_start(rng) };
        let (mapping, matched) = aligner.climb(start);
        if best.as_ref().is_none_or(|(_, m)| matched > *m) {
            best = Some((mapping, matched));
        }
    }
    best.expect("at least one restart")
}

/// Interned triple tables for one scoring direction.
struct Aligner<'g> {
    n1: usize,
    n2: usize,
    concept1: Vec<u32>,
    concept2: Vec<u32>,
    /// Instance + attribute + top triples of graph 1, grouped per node as
    /// (key, node). A triple matches when its node's image carries the same
    /// key in graph 2.
    node_keys1: Vec<Vec<u64>>,
    node_keys2: Vec<HashSet<u64>>,
    /// Relation triples of graph 1 as (source, role, target) index triples.
    rel1: Vec<(usize, u32, usize)>,
    incident: Vec<Vec<usize>>,
    rel2: HashSet<(usize, u32, usize)>,
    ids1: Vec<&'g str>,
    /// For the greedy start: nodes of graph 2 by concept.
    by_concept2: HashMap<u32, Vec<usize>>,
    id_index2: HashMap<&'g str, usize>,
}

impl<'g> Aligner<'g> {
    fn node_list(g: &AmrGraph) -> Vec<NodeId> {
        g.instances().keys().cloned().collect()
    }

    fn new(a: &'g AmrGraph, b: &'g AmrGraph) -> Self {
        let mut interner: HashMap<String, u32> = HashMap::new();
        let mut intern = |s: &str| -> u32 {
            let next = interner.len() as u32;
            *interner.entry(s.to_owned()).or_insert(next)
        };

        let ids1: Vec<&str> = a.instances().keys().map(String::as_str).collect();
        let ids2: Vec<&str> = b.instances().keys().map(String::as_str).collect();
        let index1: HashMap<&str, usize> = ids1.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let index2: HashMap<&str, usize> = ids2.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let concept1: Vec<u32> = ids1.iter().map(|n| intern(a.concept(n).unwrap())).collect();
        let concept2: Vec<u32> = ids2.iter().map(|n| intern(b.concept(n).unwrap())).collect();

        // Node-anchored triple keys: instance concept, attributes, top.
        let node_key = |tag: u8, x: u32, y: u32| -> u64 {
            (tag as u64) << 60 | (x as u64) << 30 | y as u64
        };
        let mut node_keys1: Vec<Vec<u64>> = vec![Vec::new(); ids1.len()];
        for (i, c) in concept1.iter().enumerate() {
            node_keys1[i].push(node_key(1, *c, 0));
        }
        let mut node_keys2: Vec<HashSet<u64>> = vec![HashSet::new(); ids2.len()];
        for (i, c) in concept2.iter().enumerate() {
            node_keys2[i].insert(node_key(1, *c, 0));
        }
        for at in a.attributes() {
            let l = intern(&at.label);
            let v = intern(&format!("{}{}", at.value.kind_tag(), at.value.lexical));
            node_keys1[index1[at.source.as_str()]].push(node_key(2, l, v));
        }
        for at in b.attributes() {
            let l = intern(&at.label);
            let v = intern(&format!("{}{}", at.value.kind_tag(), at.value.lexical));
            node_keys2[index2[at.source.as_str()]].insert(node_key(2, l, v));
        }
        // The root is a `top` attribute triple keyed by the root concept,
        // so both the root choice and its label affect the score.
        let top1 = intern(a.concept(a.root()).expect("root defined"));
        node_keys1[index1[a.root().as_str()]].push(node_key(3, top1, 0));
        let top2 = intern(b.concept(b.root()).expect("root defined"));
        node_keys2[index2[b.root().as_str()]].insert(node_key(3, top2, 0));

        let rel1: Vec<(usize, u32, usize)> = a
            .relations()
            .iter()
            .map(|r| (index1[r.source.as_str()], intern(&r.role), index1[r.target.as_str()]))
            .collect();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); ids1.len()];
        for (e, (s, _, t)) in rel1.iter().enumerate() {
            incident[*s].push(e);
            incident[*t].push(e);
        }
        let rel2: HashSet<(usize, u32, usize)> = b
            .relations()
            .iter()
            .map(|r| (index2[r.source.as_str()], intern(&r.role), index2[r.target.as_str()]))
            .collect();

        let mut by_concept2: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, c) in concept2.iter().enumerate() {
            by_concept2.entry(*c).or_default().push(i);
        }

        Aligner {
            n1: ids1.len(),
            n2: ids2.len(),
            concept1,
            concept2,
            node_keys1,
            node_keys2,
            rel1,
            incident,
            rel2,
            ids1,

            by_concept2,
            id_index2: index2,
        }
    }

    /// Concept-guided seed: same id and concept first, then any node with
    /// the same concept (lowest id), then lowest free id.
    #[allow(clippy::needless_range_loop)]
    fn greedy_start(&self) -> Vec<Option<usize>> {
        let mut mapping: Vec<Option<usize>> = vec![None; self.n1];
        let mut used = vec![false; self.n2];
        for u in 0..self.n1 {
            if let Some(&v) = self.id_index2.get(self.ids1[u]) {
                if !used[v] && self.concept2[v] == self.concept1[u] {
                    mapping[u] = Some(v);
                    used[v] = true;
                }
            }
        }
        for u in 0..self.n1 {
            if mapping[u].is_some() {
                continue;
            }
            if let Some(cands) = self.by_concept2.get(&self.concept1[u]) {
                if let Some(&v) = cands.iter().find(|v| !used[**v]) {
                    mapping[u] = Some(v);
                    used[v] = true;
                }
            }
        }
        for u in 0..self.n1 {
            if mapping[u].is_none() {
                if let Some(v) = (0..self.n2).find(|v| !used[*v]) {
                    mapping[u] = Some(v);
                    used[v] = true;
                }
            }
        }
        mapping
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
        let mut targets: Vec<usize> = (0..self.n2).collect();
        targets.shuffle(rng);
        (0..self.n1).map(|u| targets.get(u).copied()).collect()
    }

    /// Matched triples anchored at node `u` under `mapping`, with `u`
    /// hypothetically mapped to `img`. When `override_far` names another
    /// node, that node's image is taken from the override instead of the
    /// mapping, which lets swap moves be evaluated without touching the
    /// mapping itself.
    fn contribution(
        &self,
        u: usize,
        img: Option<usize>,
        mapping: &[Option<usize>],
        override_far: Option<(usize, Option<usize>)>,
    ) -> usize {
        let Some(v) = img else { return 0 };
        let mut hits = self.node_keys1[u].iter().filter(|k| self.node_keys2[v].contains(k)).count();
        let far_img = |node: usize| match override_far {
            Some((ov, img_ov)) if ov == node => img_ov,
            _ => mapping[node],
        };
        for &e in &self.incident[u] {
            let (s, role, t) = self.rel1[e];
            let (si, ti) = if s == u { (Some(v), far_img(t)) } else { (far_img(s), Some(v)) };
            if let (Some(si), Some(ti)) = (si, ti) {
                if self.rel2.contains(&(si, role, ti)) {
                    hits += 1;
                }
            }
        }
        hits
    }

    /// Matched relation triples running between `u` and `w` when they map
    /// to `iu` and `iw`; these are counted once per endpoint in a summed
    /// pair contribution and need subtracting.
    fn between(&self, u: usize, w: usize, iu: Option<usize>, iw: Option<usize>) -> usize {
        let (Some(iu), Some(iw)) = (iu, iw) else { return 0 };
        let mut hits = 0;
        for &e in &self.incident[u] {
            let (s, role, t) = self.rel1[e];
            if (s == u && t == w && self.rel2.contains(&(iu, role, iw)))
                || (s == w && t == u && self.rel2.contains(&(iw, role, iu)))
            {
                hits += 1;
            }
        }
        hits
    }

    fn swap_gain(&self, u: usize, w: usize, mapping: &[Option<usize>]) -> isize {
        let (mu, mw) = (mapping[u], mapping[w]);
        let before = self.contribution(u, mu, mapping, None) as isize
            + self.contribution(w, mw, mapping, None) as isize
            - self.between(u, w, mu, mw) as isize;
        let after = self.contribution(u, mw, mapping, Some((w, mu))) as isize
            + self.contribution(w, mu, mapping, Some((u, mw))) as isize
            - self.between(u, w, mw, mu) as isize;
        after - before
    }

    fn total_matched(&self, mapping: &[Option<usize>]) -> usize {
        let mut matched = 0;
        for u in 0..self.n1 {
            matched += self.contribution(u, mapping[u], mapping, None);
        }
        // Relation triples were counted once per endpoint.
        for (s, role, t) in &self.rel1 {
            if let (Some(si), Some(ti)) = (mapping[*s], mapping[*t]) {
                if self.rel2.contains(&(si, *role, ti)) {
                    matched -= 1;
                }
            }
        }
        matched
    }

    /// Steepest-ascent hill climbing over single reassignments and pairwise
    /// swaps; ties in the move scan resolve to the first candidate in node
    /// order, i.e. the lowest node id.
    #[allow(clippy::needless_range_loop)]
    fn climb(&self, mut mapping: Vec<Option<usize>>) -> (Vec<Option<usize>>, usize) {
        let mut matched = self.total_matched(&mapping);
        loop {
            let mut used = vec![false; self.n2];
            for v in mapping.iter().flatten() {
                used[*v] = true;
            }
            let here: Vec<isize> = (0..self.n1)
                .map(|u| self.contribution(u, mapping[u], &mapping, None) as isize)
                .collect();
            let mut best_gain = 0isize;
            let mut best_move: Option<Move> = None;

            for u in 0..self.n1 {
                for v in 0..self.n2 {
                    if used[v] {
                        continue;
                    }
                    let gain = self.contribution(u, Some(v), &mapping, None) as isize - here[u];
                    if gain > best_gain {
                        best_gain = gain;
                        best_move = Some(Move::Reassign(u, v));
                    }
                }
                for w in u + 1..self.n1 {
                    if mapping[u].is_none() && mapping[w].is_none() {
                        continue;
                    }
                    let gain = self.swap_gain(u, w, &mapping);
                    if gain > best_gain {
                        best_gain = gain;
                        best_move = Some(Move::Swap(u, w));
                    }
                }
            }
            match best_move {
                Some(Move::Reassign(u, v)) => {
                    mapping[u] = Some(v);
                }
                Some(Move::Swap(u, w)) => {
                    mapping.swap(u, w);
                }
                None => break,
            }
            matched = (matched as isize + best_gain) as usize;
        }
        debug_assert_eq!(matched, self.total_matched(&mapping));
        (mapping, matched)
    }
}

enum Move {
    Reassign(usize, usize),
    Swap(usize, usize),
}

/// Which graph-2 nodes count as matching candidates per graph-1 node in
/// the alignment search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateSet {
    /// Every instance node of the second graph.
    #[default]
    AllInstances,
    /// Only instance nodes sharing the concept label.
    SameConcept,
}

impl FromStr for CandidateSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(CandidateSet::AllInstances),
            "label" => Ok(CandidateSet::SameConcept),
            other => Err(format!("unknown candidate set `{other}` (expected all, label)")),
        }
    }
}

/// Size of the node-alignment search space: the product over nodes of the
/// first graph of the number of matching candidates in the second.
pub fn alignment_search_space(a: &AmrGraph, b: &AmrGraph, candidates: CandidateSet) -> BigUint {
    let mut out = BigUint::from(1u32);
    match candidates {
        CandidateSet::AllInstances => {
            let m = BigUint::from(b.instances().len());
            for _ in a.instances().keys() {
                out *= &m;
            }
        }
        CandidateSet::SameConcept => {
            let mut by_concept: HashMap<&str, usize> = HashMap::new();
            for concept in b.instances().values() {
                *by_concept.entry(concept.as_str()).or_default() += 1;
            }
            for concept in a.instances().values() {
                out *= BigUint::from(by_concept.get(concept.as_str()).copied().unwrap_or(0));
            }
        }
    }
    out
}

/// Size of the feature-overlap search space: |F(a)| * |F(b)| over the full
/// motif sets.
pub fn feature_search_space(a: &AmrGraph, b: &AmrGraph, frames: &FrameMap) -> BigUint {
    let fa = motif_set(a, frames, MotifKinds::default()).len();
    let fb = motif_set(b, frames, MotifKinds::default()).len();
    BigUint::from(fa) * BigUint::from(fb)
}

/// Feature-set size for whichever feature family a metric uses; the label
/// baseline counts its label set.
pub fn feature_set_size(g: &AmrGraph, metric: MetricId, frames: &FrameMap) -> usize {
    match metric {
        MetricId::Labels => label_set(g).len(),
        _ => motif_set(g, frames, MotifKinds::default()).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    fn fig1() -> AmrGraph {
        parse_penman("(c / cut-01 :polarity - :ARG0 (h / he) :ARG1 (a / apple) :inst (k / knife))")
            .unwrap()
    }

    #[test]
    fn identical_graphs_score_one_everywhere() {
        let g = fig1();
        for metric in [MetricId::Rematch, MetricId::Labels, MetricId::Smatch] {
            let s = score_pair(metric, &g, &g, &ScoreOptions::default());
            assert_eq!(s.value, Rational::from_integer(1), "{metric}");
        }
    }

    #[test]
    fn disjoint_graphs_score_zero() {
        let a = fig1();
        let b = parse_penman("(s / sing-02 :mod (g / girl))").unwrap();
        let r = rematch(&a, &b, &FrameMap::identity(), MotifKinds::default());
        assert_eq!(r.value, Rational::from_integer(0));
        let l = label_jaccard(&a, &b);
        assert_eq!(l.value, Rational::from_integer(0));
        let s = smatch(&a, &b, 4, 7);
        assert_eq!(s.value, Rational::from_integer(0));
    }

    #[test]
    fn label_jaccard_against_single_instance() {
        // Label set of the negated cut graph has 9 members; the single
        // instance shares exactly `cut-01`.
        let a = fig1();
        let b = parse_penman("(c / cut-01)").unwrap();
        let s = label_jaccard(&a, &b);
        assert_eq!(s.value, Rational::new(1, 9));
        assert_eq!(
            s.detail,
            Some(ScoreDetail::SetOverlap { intersection: 1, union: 9 })
        );
    }

    #[test]
    fn rematch_on_negation_pair_matches_hand_enumeration() {
        let frames = FrameMap::from_entries([("talk-01".to_owned(), "speak".to_owned())]);
        let with = parse_penman(
            "(t / talk-01 :polarity - \
              :ARG0 (p / person :name (n / name :op1 \"Helen\")) \
              :ARG1 (o / politics) \
              :ARG2 (p2 / person :name (n2 / name :op1 \"Maya\")))",
        )
        .unwrap();
        let without = parse_penman(
            "(t / talk-01 \
              :ARG0 (p / person :name (n / name :op1 \"Helen\")) \
              :ARG1 (o / politics) \
              :ARG2 (p2 / person :name (n2 / name :op1 \"Maya\")))",
        )
        .unwrap();
        // Hand enumeration: 13 motifs with polarity, 12 without, 8 shared
        // (two name attributes, four attribute-free instances minus the two
        // changed ones, two name relations).
        let s = rematch(&with, &without, &frames, MotifKinds::default());
        assert_eq!(
            s.detail,
            Some(ScoreDetail::SetOverlap { intersection: 8, union: 17 })
        );
        assert_eq!(s.value, Rational::new(8, 17));
    }

    #[test]
    fn rematch_counts_identical_empty_sets_as_one() {
        let a = parse_penman("(p / person)").unwrap();
        let b = parse_penman("(q / dog)").unwrap();
        let s = rematch(&a, &b, &FrameMap::identity(), MotifKinds::NONE);
        assert_eq!(s.value, Rational::from_integer(1));
    }

    #[test]
    fn smatch_scores_structural_difference() {
        let a = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))").unwrap();
        let b = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 (d / dog)))")
            .unwrap();
        let s = smatch(&a, &b, 4, 42);
        // Triples: a has 3+3+0+1 = 7, b has 4+3+0+1 = 8; best alignment
        // matches everything but the dog/boy ARG0 edge and instance.
        assert_eq!(s.value, Rational::new(2 * 6, 7 + 8));
    }

    #[test]
    fn smatch_is_symmetric_by_construction() {
        let a = parse_penman("(w / want-01 :ARG0 (b / boy))").unwrap();
        let b = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))").unwrap();
        let ab = smatch(&a, &b, 4, 11);
        let ba = smatch(&b, &a, 4, 11);
        assert_eq!(ab.value, ba.value);
    }

    #[test]
    fn smatch_respects_root_choice() {
        // Same normalized edge set, different top node.
        let a = parse_penman("(b / boy :ARG0-of (w / want-01))").unwrap();
        let b = parse_penman("(w / want-01 :ARG0 (b / boy))").unwrap();
        let s = smatch(&a, &b, 8, 3);
        // Each side has 4 triples; everything matches except the top pair.
        assert_eq!(s.value, Rational::new(2 * 3, 4 + 4));
    }

    #[test]
    fn smatch_is_deterministic_given_seed() {
        let a = parse_penman("(m / meet-03 :ARG0 (p / person) :ARG1 (q / person))").unwrap();
        let b = parse_penman("(m / meet-03 :ARG0 (p / person) :ARG1 (q / person) :time (n / now))")
            .unwrap();
        let x = smatch(&a, &b, 4, 9);
        let y = smatch(&a, &b, 4, 9);
        assert_eq!(x.value, y.value);
    }

    #[test]
    fn alignment_score_is_consistent_with_mapping() {
        let a = parse_penman("(w / want-01 :ARG0 (b / boy))").unwrap();
        let b = parse_penman("(x0 / want-01 :ARG0 (x1 / boy) :ARG1 (x2 / go-02))").unwrap();
        let state = smatch_alignment(&a, &b, 4, 42);
        assert_eq!(alignment_f1(&a, &b, &state.mapping), state.score);
        let values: HashSet<&NodeId> = state.mapping.values().collect();
        assert_eq!(values.len(), state.mapping.len(), "mapping is injective");
    }

    #[test]
    fn alignment_space_is_a_plain_power() {
        let one = parse_penman("(p / person)").unwrap();
        let five = parse_penman(
            "(a / alpha :r1 (b / beta) :r2 (c / gamma) :r3 (d / delta) :r4 (e / epsilon))",
        )
        .unwrap();
        assert_eq!(alignment_search_space(&one, &five, CandidateSet::AllInstances), 5u32.into());

        let three =
            parse_penman("(a / alpha :r1 (b / beta) :r2 (c / gamma))").unwrap();
        let four =
            parse_penman("(a / alpha :r1 (b / beta) :r2 (c / gamma) :r3 (d / delta))").unwrap();
        assert_eq!(
            alignment_search_space(&three, &four, CandidateSet::AllInstances),
            64u32.into()
        );
    }

    #[test]
    fn label_candidates_shrink_the_space() {
        let a = parse_penman("(a / alpha :r1 (b / beta))").unwrap();
        let b = parse_penman("(a / alpha :r1 (b / beta) :r2 (c / gamma))").unwrap();
        assert_eq!(alignment_search_space(&a, &b, CandidateSet::SameConcept), 1u32.into());
        let c = parse_penman("(x / delta :r1 (y / eta))").unwrap();
        assert_eq!(alignment_search_space(&a, &c, CandidateSet::SameConcept), 0u32.into());
    }

    #[test]
    fn feature_space_multiplies_motif_counts() {
        let a = parse_penman("(p / person)").unwrap();
        assert_eq!(feature_search_space(&a, &a, &FrameMap::identity()), 1u32.into());

        let fig2 = parse_penman(
            "(t / talk-01 :polarity - \
              :ARG0 (p / person :name (n / name :op1 \"Helen\")) \
              :ARG1 (o / politics) \
              :ARG2 (p2 / person :name (n2 / name :op1 \"Maya\")))",
        )
        .unwrap();
        let frames = FrameMap::from_entries([("talk-01".to_owned(), "speak".to_owned())]);
        assert_eq!(feature_search_space(&fig2, &fig2, &frames), 169u32.into());
    }

    #[test]
    fn fifty_node_alignment_space() {
        // 50^50, computed independently by repeated multiplication.
        let mut nodes = String::from("(n0 / c0");
        for i in 1..50 {
            nodes.push_str(&format!(" :r{i} (n{i} / c{i})"));
        }
        nodes.push(')');
        let g = parse_penman(&nodes).unwrap();
        let space = alignment_search_space(&g, &g, CandidateSet::AllInstances);
        let mut expected = BigUint::from(1u32);
        for _ in 0..50 {
            expected *= BigUint::from(50u32);
        }
        assert_eq!(space, expected);
        let digits = space.to_string();
        assert_eq!(digits.len(), 85);
        assert!(digits.starts_with("8881784197"));
    }
}
