mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use config::Config;

/// A problem with how the tool was invoked rather than with its input data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(
    name = "spex",
    about = "Entity-expanded BM25 retrieval and run evaluation"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flat `key = value` settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Link entities in an id<TAB>text file with a gazetteer.
    Annotate(AnnotateArgs),
    /// Append linked entity names (or their hashes) to texts.
    Expand(ExpandArgs),
    /// Build a binary inverted index from a collection.
    Index(IndexArgs),
    /// Retrieve a BM25 run for a query set.
    Search(SearchArgs),
    /// Reciprocal rank fusion of runs.
    Fuse(FuseArgs),
    /// Per-query best run according to the qrels.
    Oracle(OracleArgs),
    /// Oracle choices over a run triple as classifier labels.
    Labels(LabelsArgs),
    /// Assemble a run from per-query run assignments.
    Select(SelectArgs),
    /// Score a run against qrels.
    Eval(EvalArgs),
    /// Recall at a series of cutoffs for several runs.
    Curve(CurveArgs),
    /// Paired t-test between two runs on one metric.
    Ttest(TtestArgs),
    /// Union of the documents of several runs per query.
    Pool(PoolArgs),
    /// Qrels from the top document of a reranker score file.
    #[command(name = "qrels-top1")]
    QrelsTop1(QrelsTop1Args),
    /// Qrels from a two-stage pointwise then pairwise reranking.
    #[command(name = "qrels-duo")]
    QrelsDuo(QrelsDuoArgs),
    /// Restrict queries, qrels and runs to a query-id list.
    Filter(FilterArgs),
    /// Print index statistics.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub gazetteer: PathBuf,
    /// Annotation JSON lines; a `.meta` file is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub annotator: Option<String>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub overlap: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub num_cand_mentions: Option<u32>,
    #[arg(long)]
    pub num_cand_entities: Option<u32>,
    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// explicit | hashed
    #[arg(long)]
    pub form: Option<String>,
    /// single | weighted | constant:K
    #[arg(long)]
    pub multiplicity: Option<String>,
    #[arg(long)]
    pub header: bool,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[arg(long)]
    pub collection: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub header: bool,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub topk: Option<usize>,
    /// Offer-Weight pseudo-relevance feedback.
    #[arg(long)]
    pub prf: bool,
    #[arg(long)]
    pub prf_docs: Option<usize>,
    #[arg(long)]
    pub prf_terms: Option<usize>,
    /// Clamp negative IDF values to zero.
    #[arg(long = "idf-floor0")]
    pub idf_floor0: bool,
    #[arg(long, default_value = "bm25")]
    pub tag: String,
}

#[derive(Args, Debug)]
pub struct FuseArgs {
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// RRF rank constant.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LabelsArgs {
    /// Exactly three runs; label i means run i.
    #[arg(num_args = 3, required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// qid<TAB>run-index lines.
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Repeatable, e.g. recall@1000, mrr@10, ndcg@10.
    #[arg(long = "metric", default_value = "recall@1000")]
    pub metrics: Vec<String>,
    #[arg(long)]
    pub per_query: bool,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Comma-separated ascending cutoffs.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TtestArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, default_value = "recall@1000")]
    pub metric: String,
}

#[derive(Args, Debug)]
pub struct PoolArgs {
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QrelsTop1Args {
    /// qid<TAB>docid<TAB>score lines.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QrelsDuoArgs {
    #[arg(long)]
    pub stage1: PathBuf,
    #[arg(long)]
    pub stage2: PathBuf,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    /// Query ids to keep, one per line.
    #[arg(long)]
    pub ids: PathBuf,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    #[arg(long = "run")]
    pub runs: Vec<PathBuf>,
    /// Filtered files keep their names under this directory.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub index: PathBuf,
}

impl Command {
    fn inputs(&self) -> Vec<&PathBuf> {
        match self {
            Command::Annotate(a) => vec![&a.input, &a.gazetteer],
            Command::Expand(a) => vec![&a.input, &a.annotations],
            Command::Index(a) => vec![&a.collection],
            Command::Search(a) => vec![&a.index, &a.queries],
            Command::Fuse(a) => a.runs.iter().collect(),
            Command::Pool(a) => a.runs.iter().collect(),
            Command::Oracle(a) => a.runs.iter().chain([&a.qrels]).collect(),
            Command::Labels(a) => a.runs.iter().chain([&a.qrels]).collect(),
            Command::Select(a) => a.runs.iter().chain([&a.assignment]).collect(),
            Command::Curve(a) => a.runs.iter().chain([&a.qrels]).collect(),
            Command::Eval(a) => vec![&a.run, &a.qrels],
            Command::Ttest(a) => vec![&a.a, &a.b, &a.qrels],
            Command::QrelsTop1(a) => vec![&a.scores],
            Command::QrelsDuo(a) => vec![&a.stage1, &a.stage2],
            Command::Filter(a) => [&a.ids]
                .into_iter()
                .chain(a.queries.iter())
                .chain(a.qrels.iter())
                .chain(a.runs.iter())
                .collect(),
            Command::Stats(a) => vec![&a.index],
        }
    }
}

fn parse_args() -> Result<Cli, clap::Error> {
    let version = format!(
        "{} (index format {})",
        spex::VERSION,
        spex::index::FORMAT_VERSION
    );
    let matches = Cli::command().version(version).try_get_matches()?;
    Cli::from_arg_matches(&matches)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<spex::Error>() {
        Some(spex::Error::Config(_) | spex::Error::UnknownStrategy { .. }) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            anyhow::bail!(UsageError("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let mut missing: Vec<&PathBuf> = cli.command.inputs();
    missing.extend(cli.config.iter());
    missing.retain(|p| !p.exists());
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|p| p.display().to_string()).collect();
        anyhow::bail!("input file(s) not found: {}", list.join(", "));
    }
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    commands::dispatch(cli.command, &config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match parse_args() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
