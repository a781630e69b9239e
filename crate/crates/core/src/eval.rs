//! Evaluation harnesses: Spearman rank correlation of metric scores
//! against gold values, and a timing/search-space benchmark with a
//! log-log scaling fit.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::{parse_penman_with, AmrGraph, CorpusEntry, PenmanOptions};
use crate::metrics::{
    alignment_search_space, feature_set_size, score_pair, MetricId, ScoreOptions,
};
use crate::numeric::{linear_fit, pearson, ranks, Scalar};

/// One scored pair ready for correlation.
#[derive(Debug, Clone)]
pub struct ScoredPair {
    pub id: String,
    pub metric_score: f64,
    pub gold_score: f64,
}

/// Which score column collapsed to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateSide {
    Metric,
    Gold,
}

impl std::fmt::Display for DegenerateSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegenerateSide::Metric => f.write_str("metric scores are all identical"),
            DegenerateSide::Gold => f.write_str("gold scores are all identical"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least 2 pairs, found {0}")]
    TooFewPairs(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(DegenerateSide),
    #[error("pair {id}: score is not finite")]
    NonFinite { id: String },
    #[error("pair {id}: {message}")]
    Pair { id: String, message: String },
    #[error("corpus has {found} graphs; the benchmark needs at least {needed}")]
    InsufficientCorpus { found: usize, needed: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Spearman rank correlation with average ranks for ties, generic over the
/// float type.
pub fn spearman_xy<R: Scalar>(xs: &[R], ys: &[R]) -> Result<R, EvalError> {
    if xs.len() < 2 {
        return Err(EvalError::TooFewPairs(xs.len()));
    }
    assert_eq!(xs.len(), ys.len());
    if xs.iter().all(|v| v == &xs[0]) {
        return Err(EvalError::DegenerateInput(DegenerateSide::Metric));
    }
    if ys.iter().all(|v| v == &ys[0]) {
        return Err(EvalError::DegenerateInput(DegenerateSide::Gold));
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry).ok_or(EvalError::DegenerateInput(DegenerateSide::Metric))
}

/// Spearman rho of metric scores against gold, in [-1, 1].
pub fn spearman(pairs: &[ScoredPair]) -> Result<f64, EvalError> {
    for p in pairs {
        if !p.metric_score.is_finite() || !p.gold_score.is_finite() {
            return Err(EvalError::NonFinite { id: p.id.clone() });
        }
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.metric_score).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.gold_score).collect();
    spearman_xy(&xs, &ys)
}

/// Mean metric/gold score over the pairs sharing one swap fraction.
#[derive(Debug, Clone)]
pub struct LevelRow {
    pub swap_fraction: f64,
    pub count: usize,
    pub mean_metric: f64,
    pub mean_gold: f64,
}

#[derive(Debug, Clone)]
pub struct StructuralReport {
    pub metric: MetricId,
    pub pairs: usize,
    pub rho: f64,
    pub levels: Vec<LevelRow>,
}

/// Graph pair parsed out of a dataset record.
pub struct ParsedPair {
    pub id: String,
    pub gold: f64,
    pub a: AmrGraph,
    pub b: AmrGraph,
}

pub fn parse_rewired_records(
    records: &[crate::rare::RewiredRecord],
    penman: &PenmanOptions,
) -> Result<Vec<ParsedPair>, EvalError> {
    records
        .iter()
        .map(|r| {
            let a = parse_penman_with(&r.original, penman).map_err(|e| EvalError::Pair {
                id: r.id.clone(),
                message: format!("original: {e}"),
            })?;
            let b = parse_penman_with(&r.rewired, penman).map_err(|e| EvalError::Pair {
                id: r.id.clone(),
                message: format!("rewired: {e}"),
            })?;
            Ok(ParsedPair { id: r.id.clone(), gold: r.gold, a, b })
        })
        .collect()
}

/// Score every pair with the metric, fanning out over `jobs` workers.
/// Output order always follows input order.
pub fn score_pairs(
    pairs: &[ParsedPair],
    metric: MetricId,
    opts: &ScoreOptions,
    jobs: usize,
) -> Vec<ScoredPair> {
    let score_one = |p: &ParsedPair| ScoredPair {
        id: p.id.clone(),
        metric_score: score_pair(metric, &p.a, &p.b, opts).to_f64(),
        gold_score: p.gold,
    };
    if jobs <= 1 {
        pairs.iter().map(score_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool builds");
        pool.install(|| {
            use rayon::prelude::*;
            pairs.par_iter().map(score_one).collect()
        })
    }
}

/// Correlate a metric against the gold similarities of a rewired-pair
/// dataset and tabulate mean scores per swap fraction (rounded to 1/1000).
pub fn eval_structural(
    pairs: &[ParsedPair],
    metric: MetricId,
    opts: &ScoreOptions,
    jobs: usize,
) -> Result<StructuralReport, EvalError> {
    let scored = score_pairs(pairs, metric, opts, jobs);
    let rho = spearman(&scored)?;

    let mut buckets: BTreeMap<u32, (usize, f64, f64)> = BTreeMap::new();
    for (p, s) in pairs.iter().zip(&scored) {
        let fraction = 1.0 - p.gold;
        let key = (fraction * 1000.0).round() as u32;
        let e = buckets.entry(key).or_insert((0, 0.0, 0.0));
        e.0 += 1;
        e.1 += s.metric_score;
        e.2 += s.gold_score;
    }
    let levels = buckets
        .into_iter()
        .map(|(key, (count, metric_sum, gold_sum))| LevelRow {
            swap_fraction: key as f64 / 1000.0,
            count,
            mean_metric: metric_sum / count as f64,
            mean_gold: gold_sum / count as f64,
        })
        .collect();
    Ok(StructuralReport { metric, pairs: pairs.len(), rho, levels })
}

/// JSON-lines record for externally produced AMR pairs with a gold
/// similarity (e.g. human sentence-similarity annotations).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemanticPairRecord {
    pub id: String,
    pub gold: f64,
    pub amr_a: String,
    pub amr_b: String,
}

#[derive(Debug, Clone)]
pub struct SemanticReport {
    pub metric: MetricId,
    pub pairs: usize,
    pub rho: f64,
}

pub fn load_semantic_records(path: &std::path::Path) -> Result<Vec<SemanticPairRecord>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SemanticPairRecord = serde_json::from_str(line).map_err(|e| EvalError::Io {
            path: format!("{}:{}", path.display(), i + 1),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn parse_semantic_records(
    records: &[SemanticPairRecord],
    penman: &PenmanOptions,
) -> Result<Vec<ParsedPair>, EvalError> {
    records
        .iter()
        .map(|r| {
            let a = parse_penman_with(&r.amr_a, penman).map_err(|e| EvalError::Pair {
                id: r.id.clone(),
                message: format!("amr_a: {e}"),
            })?;
            let b = parse_penman_with(&r.amr_b, penman).map_err(|e| EvalError::Pair {
                id: r.id.clone(),
                message: format!("amr_b: {e}"),
            })?;
            Ok(ParsedPair { id: r.id.clone(), gold: r.gold, a, b })
        })
        .collect()
}

pub fn eval_semantic(
    pairs: &[ParsedPair],
    metric: MetricId,
    opts: &ScoreOptions,
    jobs: usize,
) -> Result<SemanticReport, EvalError> {
    let scored = score_pairs(pairs, metric, opts, jobs);
    let rho = spearman(&scored)?;
    Ok(SemanticReport { metric, pairs: pairs.len(), rho })
}

/// One benchmark measurement: pair id, average graph size, the search
/// space the metric's family explores, and the wall-clock runtime of one
/// scoring call.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub id: String,
    pub n: f64,
    pub search_space: BigUint,
    pub runtime: Duration,
}

/// Log-log least-squares fit of runtime against N.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub per_metric: Vec<(MetricId, Vec<BenchRecord>, Option<ScalingFit>)>,
}

/// Pairs are sampled uniformly without replacement from all graph
/// combinations; runtimes are measured around the scoring call only, on a
/// single worker. The fit uses points with N > 10^1.5.
pub fn bench(
    corpus: &[CorpusEntry],
    sample_pairs: usize,
    metrics: &[MetricId],
    seed: u64,
    opts: &ScoreOptions,
) -> Result<BenchReport, EvalError> {
    let n = corpus.len();
    if n < 2 {
        return Err(EvalError::InsufficientCorpus { found: n, needed: 2 });
    }
    let total_pairs = n * (n - 1) / 2;
    if sample_pairs > total_pairs {
        return Err(EvalError::InsufficientCorpus { found: n, needed: sample_pairs });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, total_pairs, sample_pairs);

    let mut per_metric = Vec::new();
    for &metric in metrics {
        let mut records = Vec::with_capacity(sample_pairs);
        for k in picks.iter() {
            let (i, j) = unrank_pair(k, n);
            let (a, b) = (&corpus[i], &corpus[j]);
            let search_space = if metric.is_alignment_based() {
                alignment_search_space(&a.graph, &b.graph, opts.candidates)
            } else {
                BigUint::from(feature_set_size(&a.graph, metric, &opts.frames))
                    * BigUint::from(feature_set_size(&b.graph, metric, &opts.frames))
            };
            let started = Instant::now();
            let score = score_pair(metric, &a.graph, &b.graph, opts);
            let runtime = started.elapsed();
            std::hint::black_box(&score);
            records.push(BenchRecord {
                id: format!("{}~{}", a.id, b.id),
                n: (a.graph.size() + b.graph.size()) as f64 / 2.0,
                search_space,
                runtime,
            });
        }
        let fit = fit_scaling(&records);
        per_metric.push((metric, records, fit));
    }
    Ok(BenchReport { per_metric })
}

/// Slope of log10(runtime) against log10(N) over records with N > 10^1.5.
pub fn fit_scaling(records: &[BenchRecord]) -> Option<ScalingFit> {
    let cutoff = 10f64.powf(1.5);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in records {
        if r.n > cutoff {
            xs.push(r.n.log10());
            ys.push((r.runtime.as_nanos().max(1) as f64 * 1e-9).log10());
        }
    }
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    Some(ScalingFit { slope, intercept, points: xs.len() })
}

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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_corpus, SynthConfig};

    fn pairs(metric: &[f64], gold: &[f64]) -> Vec<ScoredPair> {
        metric
            .iter()
            .zip(gold)
            .enumerate()
            .map(|(i, (m, g))| ScoredPair {
                id: format!("p{i}"),
                metric_score: *m,
                gold_score: *g,
            })
            .collect()
    }

    #[test]
    fn spearman_of_identical_rankings_is_one() {
        let p = pairs(&[0.1, 0.5, 0.9], &[0.1, 0.5, 0.9]);
        assert!((spearman(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_of_reversed_rankings_is_minus_one() {
        let p = pairs(&[0.9, 0.5, 0.1], &[0.1, 0.5, 0.9]);
        assert!((spearman(&p).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_with_one_transposition() {
        // rho = 1 - 6*(0+1+1+0) / (4*15) = 0.8
        let p = pairs(&[1.0, 3.0, 2.0, 4.0], &[1.0, 2.0, 3.0, 4.0]);
        assert!((spearman(&p).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn spearman_generic_over_f32() {
        let rho: f32 = spearman_xy(&[1.0f32, 2.0, 3.0], &[2.0f32, 4.0, 9.0]).unwrap();
        assert!((rho - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_sides_are_reported() {
        let p = pairs(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3]);
        assert!(matches!(
            spearman(&p),
            Err(EvalError::DegenerateInput(DegenerateSide::Metric))
        ));
        let p = pairs(&[0.1, 0.2, 0.3], &[1.0, 1.0, 1.0]);
        assert!(matches!(
            spearman(&p),
            Err(EvalError::DegenerateInput(DegenerateSide::Gold))
        ));
        assert!(matches!(spearman(&[]), Err(EvalError::TooFewPairs(0))));
        let p = pairs(&[f64::NAN, 0.2], &[0.1, 0.2]);
        assert!(matches!(spearman(&p), Err(EvalError::NonFinite { .. })));
    }

    #[test]
    fn spearman_invariant_under_monotone_transforms() {
        let xs = [0.3, 0.1, 0.7, 0.4, 0.9];
        let ys = [0.2, 0.5, 0.6, 0.1, 0.8];
        let base: f64 = spearman_xy(&xs, &ys).unwrap();
        let squashed: Vec<f64> = xs.iter().map(|x| (3.0 * x + 1.0).exp()).collect();
        let again: f64 = spearman_xy(&squashed, &ys).unwrap();
        assert!((base - again).abs() < 1e-12);
    }

    #[test]
    fn scoring_fanout_preserves_order_and_results() {
        let corpus = synth_corpus(&SynthConfig { graphs: 12, min_size: 8, max_size: 30, seed: 5 });
        let parsed: Vec<ParsedPair> = corpus
            .windows(2)
            .map(|w| ParsedPair {
                id: format!("{}~{}", w[0].id, w[1].id),
                gold: 0.5,
                a: w[0].graph.clone(),
                b: w[1].graph.clone(),
            })
            .collect();
        let opts = ScoreOptions::default();
        let serial = score_pairs(&parsed, MetricId::Rematch, &opts, 1);
        let parallel = score_pairs(&parsed, MetricId::Rematch, &opts, 4);
        assert_eq!(serial.len(), parallel.len());
        for (a, b) in serial.iter().zip(&parallel) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.metric_score, b.metric_score);
        }
    }

    #[test]
    fn bench_needs_enough_graphs() {
        let corpus = synth_corpus(&SynthConfig { graphs: 1, min_size: 8, max_size: 10, seed: 1 });
        let err =
            bench(&corpus, 1, &[MetricId::Rematch], 1, &ScoreOptions::default()).unwrap_err();
        assert!(matches!(err, EvalError::InsufficientCorpus { .. }));
    }

    #[test]
    fn bench_sampling_is_deterministic() {
        let corpus = synth_corpus(&SynthConfig { graphs: 10, min_size: 8, max_size: 24, seed: 2 });
        let a = bench(&corpus, 6, &[MetricId::Rematch], 9, &ScoreOptions::default()).unwrap();
        let b = bench(&corpus, 6, &[MetricId::Rematch], 9, &ScoreOptions::default()).unwrap();
        let ids =
            |r: &BenchReport| r.per_metric[0].1.iter().map(|x| x.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
        let spaces = |r: &BenchReport| {
            r.per_metric[0].1.iter().map(|x| x.search_space.clone()).collect::<Vec<_>>()
        };
        assert_eq!(spaces(&a), spaces(&b));
    }

    #[test]
    fn structural_eval_buckets_by_swap_fraction() {
        let g = crate::amr::parse_penman(
            "(w / want-01 :polarity - :ARG0 (b / boy :age 7) \
              :ARG1 (g / go-02 :ARG0 b :time (n / now)))",
        )
        .unwrap();
        let cfg = crate::rare::SpectrumConfig { seed: 4, ..Default::default() };
        let rewired = crate::rare::rewire_spectrum("w", &g, &cfg).unwrap();
        let records: Vec<crate::rare::RewiredRecord> =
            rewired.iter().map(crate::rare::RewiredRecord::from).collect();
        let parsed = parse_rewired_records(&records, &PenmanOptions::default()).unwrap();
        let report =
            eval_structural(&parsed, MetricId::Rematch, &ScoreOptions::default(), 1).unwrap();
        assert_eq!(report.pairs, records.len());
        let total: usize = report.levels.iter().map(|l| l.count).sum();
        assert_eq!(total, records.len());
        // The unchanged pair sits in the zero bucket with a perfect score.
        assert_eq!(report.levels[0].swap_fraction, 0.0);
        assert!((report.levels[0].mean_metric - 1.0).abs() < 1e-12);
    }
}
