//! Synthetic corpus generation for desk-scale runs.
//!
//! Graphs are random rooted DAGs over a small concept vocabulary mixing
//! verb frames (with ARG0..ARG4 roles) and entity concepts, carrying 0-2
//! attributes per instance. Sizes (instances + relations + attributes) are
//! drawn log-uniformly from the configured range. This corpus is a
//! stand-in for licensed treebanks; numbers measured on it are proxies.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amr::{AmrGraph, Attribute, Constant, CorpusEntry, Relation};

const LEMMAS: [&str; 24] = [
    "want", "believe", "cut", "talk", "go", "see", "make", "run", "give", "take", "find",
    "know", "say", "meet", "leave", "work", "read", "open", "buy", "sing", "help", "hold",
    "ask", "play",
];

const ENTITIES: [&str; 30] = [
    "person", "dog", "city", "apple", "house", "boy", "girl", "team", "idea", "car", "tree",
    "book", "river", "country", "name", "school", "knife", "road", "song", "bird", "door",
    "game", "politics", "garden", "letter", "market", "night", "ship", "stone", "window",
];

const EXTRA_ROLES: [&str; 6] = ["mod", "time", "location", "manner", "topic", "poss"];

const ATTR_LABELS: [&str; 7] = ["polarity", "mode", "op1", "quant", "value", "year", "age"];

const SYMBOLS: [&str; 4] = ["-", "+", "imperative", "expressive"];

const NAMES: [&str; 5] = ["Helen", "Maya", "Rex", "Alba", "Ode"];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub graphs: usize,
    /// Inclusive graph-size bounds; sizes are log-uniform between them.
    pub min_size: usize,
    pub max_size: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { graphs: 100, min_size: 5, max_size: 1000, seed: 42 }
    }
}

/// Generate a corpus of `cfg.graphs` entries with ids `syn-N`.
pub fn synth_corpus(cfg: &SynthConfig) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.graphs)
        .map(|i| {
            let size = log_uniform(&mut rng, cfg.min_size.max(4), cfg.max_size.max(cfg.min_size));
            CorpusEntry {
                id: format!("syn-{i}"),
                snt: None,
                graph: synth_graph(&mut rng, size),
                extra: Vec::new(),
            }
        })
        .collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if lo >= hi {
        return lo;
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let x: f64 = rng.random_range(a..=b);
    (x.exp().round() as usize).clamp(lo, hi)
}

/// One random rooted DAG of the given total size (instances + relations +
/// attributes). Nodes attach to a random earlier node, extra relations run
/// from earlier to later nodes, attributes fill the rest of the budget.
pub fn synth_graph(rng: &mut ChaCha8Rng, size: usize) -> AmrGraph {
    let size = size.max(4);
    // Instances take roughly 40-50%; the tree needs n-1 relations, the
    // remaining budget splits between extra relations and attributes with
    // at most two attributes per node.
    let mut n = ((size as f64) * rng.random_range(0.40..0.50)).round() as usize;
    n = n.clamp(2, size.div_ceil(2));
    let edges = size - n;
    let extra_budget = edges - (n - 1);
    let mut attr_budget = ((extra_budget as f64) * rng.random_range(0.3..0.7)).round() as usize;
    attr_budget = attr_budget.min(2 * n);
    let mut extra_relations = extra_budget - attr_budget;
    // Extra relations are capped by the remaining forward slots.
    let max_extra = n * (n - 1) / 2 - (n - 1);
    if extra_relations > max_extra {
        attr_budget = (attr_budget + (extra_relations - max_extra)).min(2 * n);
        extra_relations = max_extra;
    }

    let ids: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut instances = std::collections::BTreeMap::new();
    let mut concepts = Vec::with_capacity(n);
    for id in &ids {
        let concept = if rng.random_bool(0.5) {
            format!("{}-{:02}", LEMMAS[rng.random_range(0..LEMMAS.len())], rng.random_range(1..10))
        } else {
            ENTITIES[rng.random_range(0..ENTITIES.len())].to_owned()
        };
        instances.insert(id.clone(), concept.clone());
        concepts.push(concept);
    }

    let pick_role = |rng: &mut ChaCha8Rng, source: usize| -> String {
        if concepts[source].as_bytes().last().is_some_and(u8::is_ascii_digit)
            && rng.random_bool(0.7)
        {
            format!("ARG{}", rng.random_range(0..5))
        } else {
            EXTRA_ROLES[rng.random_range(0..EXTRA_ROLES.len())].to_owned()
        }
    };

    // Spanning tree: node k hangs off a random earlier node, edges always
    // pointing from the lower index, which keeps the graph acyclic.
    let mut relations = Vec::with_capacity(edges.saturating_sub(attr_budget));
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for k in 1..n {
        let parent = rng.random_range(0..k);
        pairs.insert((parent, k));
        let role = pick_role(rng, parent);
        relations.push(Relation { source: ids[parent].clone(), role, target: ids[k].clone() });
    }
    let mut placed = 0;
    let mut tries = 0;
    while placed < extra_relations && tries < 50 * (extra_relations + 1) {
        tries += 1;
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        if pairs.insert((i, j)) {
            let role = pick_role(rng, i);
            relations.push(Relation { source: ids[i].clone(), role, target: ids[j].clone() });
            placed += 1;
        }
    }
    // Any unplaced extras become attribute budget so the size stays close.
    attr_budget = (attr_budget + (extra_relations - placed)).min(2 * n);

    let mut attributes = Vec::with_capacity(attr_budget);
    let mut per_node = vec![0usize; n];
    let mut attr_triples: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut placed = 0;
    let mut tries = 0;
    while placed < attr_budget && tries < 50 * (attr_budget + 1) {
        tries += 1;
        let node = rng.random_range(0..n);
        if per_node[node] >= 2 {
            continue;
        }
        let label = rng.random_range(0..ATTR_LABELS.len());
        let value = rng.random_range(0..SYMBOLS.len() + NAMES.len() + 40);
        if !attr_triples.insert((node, label, value)) {
            continue;
        }
        let constant = if value < SYMBOLS.len() {
            Constant::symbol(SYMBOLS[value])
        } else if value < SYMBOLS.len() + NAMES.len() {
            Constant::string(NAMES[value - SYMBOLS.len()])
        } else {
            Constant::number(format!("{}", value - SYMBOLS.len() - NAMES.len() + 1))
        };
        per_node[node] += 1;
        attributes.push(Attribute {
            source: ids[node].clone(),
            label: ATTR_LABELS[label].to_owned(),
            value: constant,
        });
        placed += 1;
    }

    AmrGraph::new(ids[0].clone(), instances, relations, attributes)
        .expect("generated graph satisfies the invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_track_the_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for size in [5, 8, 13, 20, 50, 120, 400] {
            let g = synth_graph(&mut rng, size);
            assert!(g.size() <= size && g.size() + 4 >= size, "size {} vs {size}", g.size());
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let cfg = SynthConfig { graphs: 5, min_size: 5, max_size: 40, seed: 7 };
        let a = synth_corpus(&cfg);
        let b = synth_corpus(&cfg);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.graph.to_penman(), y.graph.to_penman());
        }
    }

    #[test]
    fn graphs_have_reentrancies_and_attributes() {
        let cfg = SynthConfig { graphs: 30, min_size: 12, max_size: 40, seed: 3 };
        let corpus = synth_corpus(&cfg);
        assert!(corpus.iter().any(|e| !e.graph.attributes().is_empty()));
        assert!(corpus
            .iter()
            .any(|e| e.graph.relations().len() > e.graph.instances().len() - 1));
    }
}
