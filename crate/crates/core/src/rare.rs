//! Benchmark generation by constrained edge rewiring.
//!
//! A rewired graph is produced from an original by repeatedly swapping a
//! random pair of same-kind edges: relation swaps exchange targets,
//! attribute swaps exchange sources (keeping each attribute label glued to
//! its constant). A swap is rejected unless the result is still a valid
//! graph — acyclic, weakly connected, no multiedges — so every node keeps
//! its in/out degrees and the label multisets are untouched. Each emitted
//! pair carries the gold similarity (|E| - |E'|) / |E|, where E' counts
//! original edges no longer present.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::{AmrGraph, Attribute, Constant, CorpusEntry, GraphError, Relation};
use crate::Rational;

/// An original graph with one rewired counterpart and its gold similarity.
#[derive(Debug, Clone)]
pub struct RewiredPair {
    pub id: String,
    pub original: AmrGraph,
    pub rewired: AmrGraph,
    /// |E|: relations plus attributes.
    pub total_edges: usize,
    /// |E'|: original edges absent from the rewired graph, counted post
    /// hoc as a set difference so later swaps reverting earlier ones are
    /// not double counted.
    pub swapped_edges: usize,
    /// (|E| - |E'|) / |E|.
    pub gold: Rational,
    /// Set when the requested level was abandoned; the pair still records
    /// the achieved count.
    pub infeasible: bool,
}

/// Spectrum of rewiring levels applied to one graph.
#[derive(Debug, Clone)]
pub struct SpectrumConfig {
    /// Target fractions of |E| to have swapped, ascending, each in [0, 1].
    pub levels: Vec<f64>,
    /// Consecutive rejected candidates tolerated per level before the
    /// level is flagged infeasible; `None` means 100 * |E|. A ten-fold
    /// total-attempt guard bounds walks whose accepted swaps stop making
    /// net progress.
    pub max_attempts: Option<usize>,
    pub seed: u64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            levels: (0..=8).map(|k| k as f64 / 8.0).collect(),
            max_attempts: None,
            seed: 42,
        }
    }
}

impl SpectrumConfig {
    fn validate(&self) -> Result<(), RareError> {
        if self.levels.is_empty() {
            return Err(RareError::BadConfig("levels must be non-empty".into()));
        }
        if self.levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(RareError::BadConfig("levels must be ascending".into()));
        }
        if self.levels.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(RareError::BadConfig("levels must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RareError {
    #[error("graph has {0} edges; rewiring needs at least 2")]
    TooFewEdges(usize),
    #[error("invalid spectrum config: {0}")]
    BadConfig(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid split fractions: {0}")]
    BadSplit(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Why a candidate swap was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapRejection {
    /// The exchange leaves the edge set unchanged.
    NoOp,
    SelfEdge,
    MultiEdge,
    Cycle,
    Disconnected,
}

/// Exchange the targets of two relation edges (by index). Sources keep
/// their roles, so each relation stays attached to its source instance.
pub fn swap_relations(g: &AmrGraph, e1: usize, e2: usize) -> Result<AmrGraph, SwapRejection> {
    if e1 == e2 {
        return Err(SwapRejection::NoOp);
    }
    let rels = g.relations();
    let (a, b) = (&rels[e1], &rels[e2]);
    if a.target == b.target {
        return Err(SwapRejection::NoOp);
    }
    // Same source and role: exchanging targets permutes the pair in place.
    if a.source == b.source && a.role == b.role {
        return Err(SwapRejection::NoOp);
    }
    if a.source == b.target || b.source == a.target {
        return Err(SwapRejection::SelfEdge);
    }
    let mut next = rels.to_vec();
    next[e1].target = b.target.clone();
    next[e2].target = a.target.clone();
    let mut pairs: HashSet<(&str, &str)> = HashSet::new();
    for r in &next {
        if !pairs.insert((r.source.as_str(), r.target.as_str())) {
            return Err(SwapRejection::MultiEdge);
        }
    }
    match AmrGraph::new(g.root().clone(), g.instances().clone(), next, g.attributes().to_vec()) {
        Ok(g2) => Ok(g2),
        Err(GraphError::Cyclic) => Err(SwapRejection::Cycle),
        Err(GraphError::Disconnected) => Err(SwapRejection::Disconnected),
        Err(e) => unreachable!("pre-checked swap failed validation: {e}"),
    }
}

/// Exchange the sources of two attribute edges (by index). Labels stay
/// paired with their constants.
pub fn swap_attributes(g: &AmrGraph, a1: usize, a2: usize) -> Result<AmrGraph, SwapRejection> {
    if a1 == a2 {
        return Err(SwapRejection::NoOp);
    }
    let attrs = g.attributes();
    let (a, b) = (&attrs[a1], &attrs[a2]);
    if a.source == b.source {
        return Err(SwapRejection::NoOp);
    }
    if a.label == b.label && a.value == b.value {
        return Err(SwapRejection::NoOp);
    }
    let mut next = attrs.to_vec();
    next[a1].source = b.source.clone();
    next[a2].source = a.source.clone();
    let mut triples: HashSet<(&str, &str, &Constant)> = HashSet::new();
    for at in &next {
        if !triples.insert((at.source.as_str(), at.label.as_str(), &at.value)) {
            return Err(SwapRejection::MultiEdge);
        }
    }
    match AmrGraph::new(g.root().clone(), g.instances().clone(), g.relations().to_vec(), next) {
        Ok(g2) => Ok(g2),
        Err(e) => unreachable!("attribute swap cannot break structure: {e}"),
    }
}

/// Original edges absent from the rewired graph.
pub fn swapped_edge_count(original: &AmrGraph, rewired: &AmrGraph) -> usize {
    let rel: HashSet<&Relation> = rewired.relations().iter().collect();
    let attr: HashSet<&Attribute> = rewired.attributes().iter().collect();
    original.relations().iter().filter(|r| !rel.contains(r)).count()
        + original.attributes().iter().filter(|a| !attr.contains(a)).count()
}

/// Decode the k-th unordered index pair over `n` items.
fn unrank_pair(mut k: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

/// One randomized rewiring walk over `g`, emitting a pair at each level.
///
/// The walk is cumulative: ascending levels checkpoint a single
/// trajectory. Candidates pick relation or attribute swaps with
/// probability proportional to the number of same-kind edge pairs, and the
/// walk runs until the post-hoc swapped count reaches ceil(level * |E|) or
/// the attempt budget flags the level. Deterministic given the seed.
pub fn rewire_spectrum(
    id: &str,
    g: &AmrGraph,
    cfg: &SpectrumConfig,
) -> Result<Vec<RewiredPair>, RareError> {
    cfg.validate()?;
    let total = g.edge_count();
    if total < 2 {
        return Err(RareError::TooFewEdges(total));
    }
    let max_attempts = cfg.max_attempts.unwrap_or(100 * total).max(1);
    let n_rel = g.relations().len();
    let n_attr = g.attributes().len();
    let rel_pairs = n_rel * n_rel.saturating_sub(1) / 2;
    let attr_pairs = n_attr * n_attr.saturating_sub(1) / 2;
    let candidates = rel_pairs + attr_pairs;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = g.clone();
    let mut swapped = 0usize;
    let mut out = Vec::with_capacity(cfg.levels.len());

    for level in &cfg.levels {
        let target = ((level * total as f64).ceil() as usize).min(total);
        let mut consecutive = 0usize;
        let mut attempts = 0usize;
        let mut infeasible = false;
        while swapped < target {
            if candidates == 0 || consecutive >= max_attempts || attempts >= 10 * max_attempts {
                infeasible = true;
                break;
            }
            attempts += 1;
            let k = rng.random_range(0..candidates);
            let result = if k < rel_pairs {
                let (i, j) = unrank_pair(k, n_rel);
                swap_relations(&current, i, j)
            } else {
                let (i, j) = unrank_pair(k - rel_pairs, n_attr);
                swap_attributes(&current, i, j)
            };
            match result {
                Ok(next) => {
                    current = next;
                    swapped = swapped_edge_count(g, &current);
                    consecutive = 0;
                }
                Err(_) => consecutive += 1,
            }
        }
        out.push(RewiredPair {
            id: format!("{id}@f{level:.3}"),
            original: g.clone(),
            rewired: current.clone(),
            total_edges: total,
            swapped_edges: swapped,
            gold: Rational::new((total - swapped) as u64, total as u64),
            infeasible,
        });
    }
    Ok(out)
}

/// JSON-lines record for one rewired pair, with the graphs in Penman form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewiredRecord {
    pub id: String,
    pub gold: f64,
    pub total_edges: usize,
    pub swapped_edges: usize,
    pub original: String,
    pub rewired: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub infeasible: bool,
}

impl From<&RewiredPair> for RewiredRecord {
    fn from(p: &RewiredPair) -> Self {
        RewiredRecord {
            id: p.id.clone(),
            gold: crate::numeric::rational_to(&p.gold),
            total_edges: p.total_edges,
            swapped_edges: p.swapped_edges,
            original: p.original.to_penman(),
            rewired: p.rewired.to_penman(),
            infeasible: p.infeasible,
        }
    }
}

/// Split sizes for `n` entries under (train, dev, test) fractions: the
/// first two splits round down, the last takes the remainder.
pub fn split_counts(
    n: usize,
    fractions: (f64, f64, f64),
) -> Result<(usize, usize, usize), RareError> {
    let (f1, f2, f3) = fractions;
    if f1 < 0.0 || f2 < 0.0 || f3 < 0.0 || (f1 + f2 + f3 - 1.0).abs() > 1e-9 {
        return Err(RareError::BadSplit(format!("{f1},{f2},{f3} must be >= 0 and sum to 1")));
    }
    let train = ((n as f64) * f1 + 1e-9).floor() as usize;
    let dev = ((n as f64) * f2 + 1e-9).floor() as usize;
    Ok((train, dev, n - train - dev))
}

/// Per-split generation tally.
#[derive(Debug, Clone)]
pub struct SplitSummary {
    pub name: &'static str,
    pub entries: usize,
    pub pairs: usize,
    pub infeasible: usize,
    pub skipped_entries: usize,
}

/// Shuffle the corpus by seed, split it at entry level, rewire every entry
/// across the spectrum, and write one JSON-lines file per split. All pairs
/// from one source graph land in exactly one split. Entries with fewer
/// than 2 edges cannot be rewired and are skipped with a warning. Each
/// entry's walk runs on its own derived seed (config seed XOR the entry's
/// corpus index), so output does not depend on traversal parallelism.
pub fn build_dataset(
    corpus: &[CorpusEntry],
    cfg: &SpectrumConfig,
    split: (f64, f64, f64),
    out_dir: &Path,
) -> Result<Vec<SplitSummary>, RareError> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(RareError::EmptyCorpus);
    }
    let (train, dev, _) = split_counts(corpus.len(), split)?;

    let mut order: Vec<usize> = (0..corpus.len()).collect();
    {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        order.shuffle(&mut rng);
    }

    std::fs::create_dir_all(out_dir).map_err(|source| RareError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let splits: [(&'static str, &[usize]); 3] = [
        ("train", &order[..train]),
        ("dev", &order[train..train + dev]),
        ("test", &order[train + dev..]),
    ];
    let mut summaries = Vec::new();
    for (name, indices) in splits {
        let path = out_dir.join(format!("{name}.jsonl"));
        let mut body = String::new();
        let mut summary = SplitSummary {
            name,
            entries: indices.len(),
            pairs: 0,
            infeasible: 0,
            skipped_entries: 0,
        };
        for &idx in indices {
            let entry = &corpus[idx];
            let entry_cfg = SpectrumConfig { seed: cfg.seed ^ idx as u64, ..cfg.clone() };
            match rewire_spectrum(&entry.id, &entry.graph, &entry_cfg) {
                Ok(pairs) => {
                    for pair in &pairs {
                        summary.pairs += 1;
                        summary.infeasible += pair.infeasible as usize;
                        let record = RewiredRecord::from(pair);
                        body.push_str(&serde_json::to_string(&record).expect("record serializes"));
                        body.push('\n');
                    }
                }
                Err(RareError::TooFewEdges(n)) => {
                    log::warn!("skipping {}: {n} edges is too few to rewire", entry.id);
                    summary.skipped_entries += 1;
                }
                Err(e) => return Err(e),
            }
        }
        std::fs::write(&path, body).map_err(|source| RareError::Io {
            path: path.display().to_string(),
            source,
        })?;
        summaries.push(summary);
    }
    Ok(summaries)
}

/// Read a JSON-lines dataset back.
pub fn load_records(path: &Path) -> Result<Vec<RewiredRecord>, RareError> {
    let text = std::fs::read_to_string(path).map_err(|source| RareError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: RewiredRecord = serde_json::from_str(line).map_err(|e| RareError::Io {
            path: format!("{}:{}", path.display(), i + 1),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        out.push(record);
    }
    Ok(out)
}
