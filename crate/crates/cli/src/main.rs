//! Command-line front end: parse/validate corpora, dump motifs, score
//! graph pairs, generate rewired-edge datasets, run correlation
//! evaluations, and benchmark runtime scaling.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.
//! Data goes to standard output (or `--out`); diagnostics and effective
//! seeds go to standard error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use rematch_core::amr::{load_corpus, CorpusEntry, ErrorPolicy, LoadOptions, PenmanOptions};
use rematch_core::eval::{
    bench, eval_semantic, eval_structural, load_semantic_records, parse_rewired_records,
    parse_semantic_records, BenchReport, StructuralReport,
};
use rematch_core::metrics::{CandidateSet, MetricId, ScoreOptions};
use rematch_core::motifs::{motif_set, FrameMap, MotifKinds};
use rematch_core::rare::{build_dataset, load_records, SpectrumConfig};

#[derive(Parser)]
#[command(
    name = "rematch",
    version,
    about = "AMR similarity scoring, rewired-edge benchmark generation, and metric evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a Penman corpus, echoing it in canonical form.
    Parse(ParseArgs),
    /// Print the canonical motifs of each graph in a corpus, sorted.
    Motifs(MotifsArgs),
    /// Score two corpora block-by-block with one metric.
    Score(ScoreArgs),
    /// Generate a rewired-pair dataset with gold similarities and splits.
    Rare(RareArgs),
    /// Spearman correlation of a metric against a rewired-pair dataset.
    EvalStructural(EvalStructuralArgs),
    /// Spearman correlation of a metric against externally annotated pairs.
    EvalSemantic(EvalSemanticArgs),
    /// Time metrics over sampled pairs and fit runtime-vs-size slopes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ParseArgs {
    /// Penman corpus file.
    file: PathBuf,
    /// What to do with blocks that fail to parse.
    #[arg(long, value_enum, default_value_t = OnError::Fail)]
    on_error: OnError,
    /// Keep `-of` roles as written instead of flipping them.
    #[arg(long)]
    no_invert_normalize: bool,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MotifsArgs {
    /// Penman corpus file.
    file: PathBuf,
    /// Frame map TSV (`frame<TAB>generalized`); defaults to $AMR_FRAMES.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Motif kinds to extract, a comma-separated subset of a,i,r.
    #[arg(long, default_value = "a,i,r", value_parser = MotifKinds::parse)]
    kinds: MotifKinds,
    #[arg(long)]
    no_invert_normalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Metric to score with (rematch, smatch, labels).
    #[arg(value_parser = parse_metric)]
    metric: MetricId,
    /// First corpus; paired with the second block-by-block.
    file_a: PathBuf,
    file_b: PathBuf,
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long, default_value = "a,i,r", value_parser = MotifKinds::parse)]
    kinds: MotifKinds,
    /// Hill-climbing starts per alignment direction (smatch).
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads for pair scoring.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_invert_normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RareArgs {
    /// Penman corpus file to rewire.
    corpus: PathBuf,
    /// Output directory for train.jsonl, dev.jsonl, test.jsonl.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Swap-fraction levels, ascending, each in [0,1].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    levels: Option<Vec<f64>>,
    /// Train,dev,test fractions summing to 1.
    #[arg(long, default_value = "0.8,0.1,0.1", value_parser = parse_split)]
    split: (f64, f64, f64),
    /// Consecutive rejected swaps tolerated per level (default 100 * |E|).
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    no_invert_normalize: bool,
    #[arg(long, value_enum, default_value_t = OnError::Fail)]
    on_error: OnError,
}

#[derive(Args)]
struct EvalStructuralArgs {
    /// Rewired-pair dataset (JSON lines).
    dataset: PathBuf,
    #[arg(long, value_parser = parse_metric)]
    metric: MetricId,
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long, default_value = "a,i,r", value_parser = MotifKinds::parse)]
    kinds: MotifKinds,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_invert_normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalSemanticArgs {
    /// JSON-lines file of {id, gold, amr_a, amr_b} records.
    pairs: PathBuf,
    #[arg(long, value_parser = parse_metric)]
    metric: MetricId,
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long, default_value = "a,i,r", value_parser = MotifKinds::parse)]
    kinds: MotifKinds,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    no_invert_normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Penman corpus file to sample pairs from.
    corpus: PathBuf,
    /// Number of pairs to sample (without replacement).
    #[arg(long)]
    pairs: usize,
    /// Metrics to time.
    #[arg(long, value_delimiter = ',', default_value = "rematch,smatch", value_parser = parse_metric)]
    metrics: Vec<MetricId>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    /// Candidate set behind the alignment search space (all, label).
    #[arg(long, default_value = "all", value_parser = parse_candidates)]
    candidates: CandidateSet,
    #[arg(long)]
    no_invert_normalize: bool,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnError {
    Fail,
    Skip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Jsonl,
    Csv,
}

enum CliError {
    Data(String),
}

macro_rules! data_errors {
    ($($ty:ty),+) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        })+
    };
}

data_errors!(
    rematch_core::amr::CorpusError,
    rematch_core::motifs::FrameMapError,
    rematch_core::rare::RareError,
    rematch_core::eval::EvalError
);

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Motifs(args) => cmd_motifs(args),
        Command::Score(args) => cmd_score(args),
        Command::Rare(args) => cmd_rare(args),
        Command::EvalStructural(args) => cmd_eval_structural(args),
        Command::EvalSemantic(args) => cmd_eval_semantic(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn parse_split(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated fractions".into());
    }
    let mut vals = [0.0; 3];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse::<f64>().map_err(|e| e.to_string())?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn load_options(no_invert_normalize: bool, on_error: OnError) -> LoadOptions {
    LoadOptions {
        on_error: match on_error {
            OnError::Fail => ErrorPolicy::Fail,
            OnError::Skip => ErrorPolicy::Skip,
        },
        penman: PenmanOptions { normalize_inverse: !no_invert_normalize },
    }
}

/// `--frames`, falling back to $AMR_FRAMES, falling back to the identity.
fn resolve_frames(flag: &Option<PathBuf>) -> Result<FrameMap, CliError> {
    let path = flag.clone().or_else(|| std::env::var_os("AMR_FRAMES").map(PathBuf::from));
    match path {
        Some(p) => Ok(FrameMap::load(&p)?),
        None => Ok(FrameMap::identity()),
    }
}

fn write_output(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Data(e.to_string()))
        }
    }
}

fn cmd_parse(args: ParseArgs) -> Result<(), CliError> {
    let opts = load_options(args.no_invert_normalize, args.on_error);
    let entries = load_corpus(&args.file, &opts)?;
    let body = rematch_core::amr::write_corpus(&entries);
    write_output(&args.out, &body)
}

fn cmd_motifs(args: MotifsArgs) -> Result<(), CliError> {
    let opts = load_options(args.no_invert_normalize, OnError::Fail);
    let entries = load_corpus(&args.file, &opts)?;
    let frames = resolve_frames(&args.frames)?;
    let mut body = String::new();
    for entry in &entries {
        if entries.len() > 1 {
            let _ = writeln!(body, "# ::id {}", entry.id);
        }
        for motif in motif_set(&entry.graph, &frames, args.kinds).iter() {
            let _ = writeln!(body, "{motif}");
        }
    }
    write_output(&args.out, &body)
}

fn score_options(
    frames: &Option<PathBuf>,
    kinds: MotifKinds,
    restarts: usize,
    seed: u64,
) -> Result<ScoreOptions, CliError> {
    Ok(ScoreOptions {
        frames: resolve_frames(frames)?,
        kinds,
        restarts,
        seed,
        candidates: CandidateSet::AllInstances,
    })
}

fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let load = load_options(args.no_invert_normalize, OnError::Fail);
    let a = load_corpus(&args.file_a, &load)?;
    let b = load_corpus(&args.file_b, &load)?;
    if a.len() != b.len() {
        return Err(CliError::Data(format!(
            "{} has {} blocks but {} has {}",
            args.file_a.display(),
            a.len(),
            args.file_b.display(),
            b.len()
        )));
    }
    let opts = score_options(&args.frames, args.kinds, args.restarts, args.seed)?;
    if args.metric == MetricId::Smatch {
        eprintln!("seed: {}", args.seed);
    }
    let pairs: Vec<rematch_core::eval::ParsedPair> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| rematch_core::eval::ParsedPair {
            id: x.id.clone(),
            gold: 0.0,
            a: x.graph.clone(),
            b: y.graph.clone(),
        })
        .collect();
    let scored = rematch_core::eval::score_pairs(&pairs, args.metric, &opts, args.jobs);

    let mut body = String::new();
    match args.format {
        Format::Tsv => {
            for s in &scored {
                let _ = writeln!(body, "{}\t{:.4}", s.id, s.metric_score);
            }
        }
        Format::Csv => {
            let _ = writeln!(body, "id,score");
            for s in &scored {
                let _ = writeln!(body, "{},{:.4}", csv_field(&s.id), s.metric_score);
            }
        }
        Format::Jsonl => {
            for s in &scored {
                let _ = writeln!(
                    body,
                    "{}",
                    serde_json::json!({
                        "id": s.id,
                        "metric": args.metric.name(),
                        "score": s.metric_score,
                    })
                );
            }
        }
    }
    write_output(&args.out, &body)
}

fn cmd_rare(args: RareArgs) -> Result<(), CliError> {
    let load = load_options(args.no_invert_normalize, args.on_error);
    let corpus = load_corpus(&args.corpus, &load)?;
    let cfg = SpectrumConfig {
        levels: args.levels.unwrap_or_else(|| SpectrumConfig::default().levels),
        max_attempts: args.max_attempts,
        seed: args.seed,
    };
    eprintln!("seed: {}", args.seed);
    let summaries = build_dataset(&corpus, &cfg, args.split, &args.out)?;
    let mut body = String::from("split\tentries\tpairs\tinfeasible\tskipped\n");
    for s in &summaries {
        let _ = writeln!(
            body,
            "{}\t{}\t{}\t{}\t{}",
            s.name, s.entries, s.pairs, s.infeasible, s.skipped_entries
        );
    }
    print!("{body}");
    Ok(())
}

fn render_structural(report: &StructuralReport, format: Format) -> String {
    match format {
        Format::Jsonl => {
            let levels: Vec<serde_json::Value> = report
                .levels
                .iter()
                .map(|l| {
                    serde_json::json!({
                        "swap_fraction": l.swap_fraction,
                        "count": l.count,
                        "mean_metric": l.mean_metric,
                        "mean_gold": l.mean_gold,
                    })
                })
                .collect();
            let mut out = serde_json::json!({
                "metric": report.metric.name(),
                "pairs": report.pairs,
                "rho": report.rho,
                "rho_x100": report.rho * 100.0,
            })
            .to_string();
            out.push('\n');
            let _ = writeln!(out, "{}", serde_json::json!({ "levels": levels }));
            out
        }
        Format::Tsv | Format::Csv => {
            let sep = if format == Format::Tsv { '\t' } else { ',' };
            let mut out = String::new();
            let _ = writeln!(out, "metric{sep}pairs{sep}rho{sep}rho_x100");
            let _ = writeln!(
                out,
                "{}{sep}{}{sep}{:.6}{sep}{:.2}",
                report.metric.name(),
                report.pairs,
                report.rho,
                report.rho * 100.0
            );
            let _ = writeln!(out);
            let _ = writeln!(out, "swap_fraction{sep}count{sep}mean_metric{sep}mean_gold");
            for l in &report.levels {
                let _ = writeln!(
                    out,
                    "{:.3}{sep}{}{sep}{:.4}{sep}{:.4}",
                    l.swap_fraction, l.count, l.mean_metric, l.mean_gold
                );
            }
            out
        }
    }
}

fn cmd_eval_structural(args: EvalStructuralArgs) -> Result<(), CliError> {
    let records = load_records(&args.dataset)?;
    let penman = PenmanOptions { normalize_inverse: !args.no_invert_normalize };
    let pairs = parse_rewired_records(&records, &penman)?;
    let opts = score_options(&args.frames, args.kinds, args.restarts, args.seed)?;
    if args.metric == MetricId::Smatch {
        eprintln!("seed: {}", args.seed);
    }
    let report = eval_structural(&pairs, args.metric, &opts, args.jobs)?;
    write_output(&args.out, &render_structural(&report, args.format))
}

fn cmd_eval_semantic(args: EvalSemanticArgs) -> Result<(), CliError> {
    let records = load_semantic_records(&args.pairs)?;
    let penman = PenmanOptions { normalize_inverse: !args.no_invert_normalize };
    let pairs = parse_semantic_records(&records, &penman)?;
    let opts = score_options(&args.frames, args.kinds, args.restarts, args.seed)?;
    if args.metric == MetricId::Smatch {
        eprintln!("seed: {}", args.seed);
    }
    let report = eval_semantic(&pairs, args.metric, &opts, args.jobs)?;
    let body = match args.format {
        Format::Jsonl => {
            let mut s = serde_json::json!({
                "metric": report.metric.name(),
                "pairs": report.pairs,
                "rho": report.rho,
                "rho_x100": report.rho * 100.0,
            })
            .to_string();
            s.push('\n');
            s
        }
        Format::Tsv => format!(
            "metric\tpairs\trho\trho_x100\n{}\t{}\t{:.6}\t{:.2}\n",
            report.metric.name(),
            report.pairs,
            report.rho,
            report.rho * 100.0
        ),
        Format::Csv => format!(
            "metric,pairs,rho,rho_x100\n{},{},{:.6},{:.2}\n",
            report.metric.name(),
            report.pairs,
            report.rho,
            report.rho * 100.0
        ),
    };
    write_output(&args.out, &body)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn render_bench(report: &BenchReport) -> String {
    let multi = report.per_metric.len() > 1;
    let mut out = String::new();
    if multi {
        out.push_str("metric,id,N,search_space,runtime_ns\n");
    } else {
        out.push_str("id,N,search_space,runtime_ns\n");
    }
    for (metric, records, _) in &report.per_metric {
        for r in records {
            if multi {
                let _ = write!(out, "{},", metric.name());
            }
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(&r.id),
                r.n,
                r.search_space,
                r.runtime.as_nanos()
            );
        }
    }
    out
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let load = load_options(args.no_invert_normalize, OnError::Fail);
    let corpus: Vec<CorpusEntry> = load_corpus(&args.corpus, &load)?;
    let opts = ScoreOptions {
        frames: resolve_frames(&args.frames)?,
        kinds: MotifKinds::default(),
        restarts: args.restarts,
        seed: args.seed,
        candidates: args.candidates,
    };
    eprintln!("seed: {}", args.seed);
    let report = bench(&corpus, args.pairs, &args.metrics, args.seed, &opts)?;
    for (metric, _, fit) in &report.per_metric {
        match fit {
            Some(f) => eprintln!(
                "fit {}: slope={:.3} intercept={:.3} points={}",
                metric.name(),
                f.slope,
                f.intercept,
                f.points
            ),
            None => eprintln!("fit {}: not enough points above N = 10^1.5", metric.name()),
        }
    }
    write_output(&args.out, &render_bench(&report))
}

fn parse_metric(s: &str) -> Result<MetricId, String> {
    s.parse()
}

fn parse_candidates(s: &str) -> Result<CandidateSet, String> {
    s.parse()
}
