//! The `fairrel` command line.
//!
//! Settings resolve as flag > config file > built-in default. Exit codes:
//! 0 success, 1 computation error, 2 usage error (bad flags, bad config,
//! unreadable input paths).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::corpus::{RelevanceTable, RunData};
use crate::error::Error;
use crate::experiments::{
    correlation_matrix, insertion_sim, sliding_windows, synthetic_popularity_run, InsertionConfig, ScoreTable,
    SyntheticConfig, WindowReport,
};
use crate::metrics::{evaluate, JointConfig, Measure};
use crate::rerank::{combmnz_rerank, DEFAULT_K_PRIME};
use crate::report::ScoreReport;

#[derive(Debug, Parser)]
#[command(name = "fairrel", version, about = "Joint item-fairness and relevance evaluation of recommender runs")]
pub struct Cli {
    /// TOML file with default settings (flags win over it).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a run against relevance judgements.
    Eval(EvalArgs),
    /// CombMNZ fairness re-ranking of a scored run.
    Rerank(RerankArgs),
    /// Kendall tau-b between measures across several score reports.
    Correlate(CorrelateArgs),
    /// Evaluate consecutive rank windows of a run.
    Sliding(SlidingArgs),
    /// Artificial insertion experiment on synthetic data.
    Insertion(InsertionArgs),
    /// Write a synthetic popularity-skewed run and its judgements.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MeasureFlags {
    /// Cutoff.
    #[arg(long)]
    pub k: Option<usize>,
    /// RBP patience of the HD click model.
    #[arg(long)]
    pub gamma_hd: Option<f64>,
    /// RBP patience of II-F and AI-F.
    #[arg(long)]
    pub gamma_iif: Option<f64>,
    /// Relative impact change counted by IBO/IWO.
    #[arg(long)]
    pub impact_threshold: Option<f64>,
    /// Comma-separated measure names (default: all twenty).
    #[arg(long, value_delimiter = ',')]
    pub measures: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputFlags {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Report label (default: run file stem).
    #[arg(long)]
    pub label: Option<String>,
    #[command(flatten)]
    pub measure: MeasureFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct RerankArgs {
    #[arg(long)]
    pub run: PathBuf,
    /// Candidates re-ranked per list.
    #[arg(long)]
    pub k_prime: Option<usize>,
    /// Cutoff used for item coverage.
    #[arg(long)]
    pub k: Option<usize>,
    /// Keep the items below rank k' after the re-ranked candidates.
    #[arg(long)]
    pub keep_tail: bool,
    /// Output run file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Score reports (JSON, or CSV by extension), one per system.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct SlidingArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Window size (also the cutoff).
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Number of windows, starting at ranks 1, 2, ...
    #[arg(long, default_value_t = 5)]
    pub windows: usize,
    #[command(flatten)]
    pub measure: MeasureFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct InsertionArgs {
    #[arg(long, default_value_t = 1000)]
    pub users: usize,
    #[arg(long, default_value_t = 10_000)]
    pub items: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma_hd: Option<f64>,
    #[arg(long)]
    pub gamma_iif: Option<f64>,
    #[arg(long)]
    pub impact_threshold: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub measures: Option<Vec<String>>,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 500)]
    pub users: usize,
    #[arg(long, default_value_t = 2000)]
    pub items: usize,
    /// Average number of relevant items per user.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.75)]
    pub skew: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving run.tsv and qrels.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

/// Contents of `--config`. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
    pub gamma_hd: Option<f64>,
    pub gamma_iif: Option<f64>,
    pub impact_threshold: Option<f64>,
    pub measures: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => CliError::Usage(msg),
            other => CliError::Compute(other),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Eval(args) => cmd_eval(&args, &file),
        Command::Rerank(args) => cmd_rerank(&args, &file),
        Command::Correlate(args) => cmd_correlate(&args, &file),
        Command::Sliding(args) => cmd_sliding(&args, &file),
        Command::Insertion(args) => cmd_insertion(&args, &file),
        Command::Generate(args) => cmd_generate(&args, &file),
    }
}

fn joint_config(
    k: Option<usize>,
    gamma_hd: Option<f64>,
    gamma_iif: Option<f64>,
    threshold: Option<f64>,
    file: &FileConfig,
) -> CliResult<JointConfig> {
    let d = JointConfig::default();
    let cfg = JointConfig {
        k: k.or(file.k).unwrap_or(d.k),
        gamma_hd: gamma_hd.or(file.gamma_hd).unwrap_or(d.gamma_hd),
        gamma_iif: gamma_iif.or(file.gamma_iif).unwrap_or(d.gamma_iif),
        impact_threshold: threshold.or(file.impact_threshold).unwrap_or(d.impact_threshold),
        hd_tiebreak: d.hd_tiebreak,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn measures(flag: &Option<Vec<String>>, file: &FileConfig) -> CliResult<Vec<Measure>> {
    match flag.as_ref().or(file.measures.as_ref()) {
        None => Ok(Measure::ALL.to_vec()),
        Some(names) => {
            let parsed = names
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<Measure>())
                .collect::<Result<Vec<_>, _>>()?;
            if parsed.is_empty() {
                return Err(CliError::Usage("--measures names no measure".into()));
            }
            Ok(parsed)
        }
    }
}

fn format(output: &OutputFlags, file: &FileConfig) -> Format {
    output.format.or(file.format).unwrap_or_else(|| match &output.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    })
}

fn input_path(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("no such input file: {}", path.display())))
    }
}

fn load_run(path: &Path) -> CliResult<RunData> {
    input_path(path)?;
    Ok(RunData::load(path)?)
}

fn load_qrels(path: &Path) -> CliResult<RelevanceTable> {
    input_path(path)?;
    Ok(RelevanceTable::load(path)?)
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult<()> {
    let io = |path: &Path, e| CliError::Compute(Error::Io { path: path.to_owned(), source: e });
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| io(Path::new("<stdout>"), e))
        }
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn cmd_eval(args: &EvalArgs, file: &FileConfig) -> CliResult<()> {
    let m = &args.measure;
    let cfg = joint_config(m.k, m.gamma_hd, m.gamma_iif, m.impact_threshold, file)?;
    let wanted = measures(&m.measures, file)?;
    let run = load_run(&args.run)?;
    let rel = load_qrels(&args.qrels)?;
    let validation = crate::corpus::validate(&run, &rel);
    let eval = evaluate(&run, &rel, &cfg, &wanted).inspect_err(|e| {
        if matches!(e, Error::MissingRank { .. }) {
            eprintln!("hint: ifd_div needs full rankings; re-rank with --keep-tail or drop it from --measures");
        }
    })?;
    let label = args.label.clone().unwrap_or_else(|| {
        args.run
            .file_stem()
            .map_or_else(|| "run".to_owned(), |s| s.to_string_lossy().into_owned())
    });
    let mut report = ScoreReport::from_evaluation(label, cfg, eval);
    report.warnings = validation.warnings;
    let bytes = match format(&args.output, file) {
        Format::Json => report.to_json()?.into_bytes(),
        Format::Csv => report.to_csv()?.into_bytes(),
    };
    emit(&args.output.out, &bytes)
}

pub fn cmd_rerank(args: &RerankArgs, file: &FileConfig) -> CliResult<()> {
    let k_prime = args.k_prime.or(file.k_prime).unwrap_or(DEFAULT_K_PRIME);
    let k = args.k.or(file.k).unwrap_or(JointConfig::default().k);
    let run = load_run(&args.run)?;
    let (mut out, report) = combmnz_rerank(&run, k_prime, k)?;
    if args.keep_tail {
        out = crate::rerank::append_tail(&out, &run)?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut bytes = Vec::new();
    out.write_tsv(&mut bytes)
        .map_err(|e| CliError::Compute(Error::io("<run>", e)))?;
    emit(&args.out, &bytes)
}

pub fn cmd_correlate(args: &CorrelateArgs, file: &FileConfig) -> CliResult<()> {
    let reports = args
        .reports
        .iter()
        .map(|p| {
            input_path(p)?;
            Ok(ScoreReport::load(p)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if reports.len() < 2 {
        return Err(CliError::Usage("correlate needs at least 2 reports".into()));
    }
    let table = ScoreTable::from_reports(&reports)?;
    let matrix = correlation_matrix(&table);
    let bytes = match format(&args.output, file) {
        Format::Json => json(&matrix)?,
        Format::Csv => {
            let mut b = Vec::new();
            matrix.write_csv(&mut b)?;
            b
        }
    };
    emit(&args.output.out, &bytes)
}

fn windows_csv(windows: &[WindowReport]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["window", "start", "end", "measure", "value"]).map_err(Error::from)?;
    for win in windows {
        for s in &win.report.scores {
            w.write_record([
                win.report.label.clone(),
                win.start.to_string(),
                win.end.to_string(),
                s.measure.name().to_owned(),
                s.value.to_string(),
            ])
            .map_err(Error::from)?;
        }
    }
    Ok(w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))?)
}

pub fn cmd_sliding(args: &SlidingArgs, file: &FileConfig) -> CliResult<()> {
    let m = &args.measure;
    let cfg = joint_config(Some(args.window), m.gamma_hd, m.gamma_iif, m.impact_threshold, file)?;
    if m.k.is_some() {
        eprintln!("warning: --k is ignored by sliding; the window size is the cutoff");
    }
    let wanted = measures(&m.measures, file)?;
    let run = load_run(&args.run)?;
    let rel = load_qrels(&args.qrels)?;
    let windows = sliding_windows(&run, &rel, &cfg, &wanted, args.window, args.windows)?;
    let bytes = match format(&args.output, file) {
        Format::Json => json(&windows)?,
        Format::Csv => windows_csv(&windows)?,
    };
    emit(&args.output.out, &bytes)
}

pub fn cmd_insertion(args: &InsertionArgs, file: &FileConfig) -> CliResult<()> {
    let k = args.k.or(file.k).unwrap_or(10);
    let cfg = joint_config(Some(k), args.gamma_hd, args.gamma_iif, args.impact_threshold, file)?;
    let wanted = measures(&args.measures, file)?;
    let sim = InsertionConfig {
        users: args.users,
        items: args.items,
        k,
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    let trajectory = insertion_sim(&sim, &cfg, &wanted)?;
    let bytes = match format(&args.output, file) {
        Format::Json => json(&trajectory)?,
        Format::Csv => {
            let mut b = Vec::new();
            trajectory.write_csv(&mut b)?;
            b
        }
    };
    emit(&args.output.out, &bytes)
}

pub fn cmd_generate(args: &GenerateArgs, file: &FileConfig) -> CliResult<()> {
    let cfg = SyntheticConfig {
        users: args.users,
        items: args.items,
        k: args.k.or(file.k).unwrap_or(10),
        skew: args.skew,
        seed: args.seed.or(file.seed).unwrap_or(1),
    };
    let (run, rel) = synthetic_popularity_run(&cfg)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::Compute(Error::io(&args.out, e)))?;
    run.save(args.out.join("run.tsv"))?;
    rel.save(args.out.join("qrels.tsv"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("fairrel").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_beat_config_beat_defaults() {
        let file = FileConfig {
            k: Some(5),
            gamma_hd: Some(0.5),
            ..Default::default()
        };
        let cfg = joint_config(None, None, None, None, &file).unwrap();
        assert_eq!((cfg.k, cfg.gamma_hd, cfg.gamma_iif), (5, 0.5, 0.8));
        let cfg = joint_config(Some(3), None, Some(0.7), None, &file).unwrap();
        assert_eq!((cfg.k, cfg.gamma_hd, cfg.gamma_iif, cfg.impact_threshold), (3, 0.5, 0.7, 0.10));
    }

    #[test]
    fn config_file_parses() {
        let file: FileConfig = toml::from_str("k = 20\nmeasures = [\"ndcg\", \"gini\"]\nformat = \"csv\"\n").unwrap();
        assert_eq!(file.k, Some(20));
        assert_eq!(measures(&None, &file).unwrap(), vec![Measure::Ndcg, Measure::Gini]);
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }

    #[test]
    fn measure_flag_subset() {
        let cli = parse(&["eval", "--run", "r", "--qrels", "q", "--measures", "ndcg,ii-f"]);
        let Command::Eval(args) = cli.command else { panic!() };
        assert_eq!(
            measures(&args.measure.measures, &FileConfig::default()).unwrap(),
            vec![Measure::Ndcg, Measure::IiF]
        );
    }

    #[test]
    fn bad_gamma_is_usage_error() {
        let err = joint_config(None, Some(1.5), None, None, &FileConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn format_from_extension() {
        let out = OutputFlags {
            format: None,
            out: Some("x.csv".into()),
        };
        assert_eq!(format(&out, &FileConfig::default()), Format::Csv);
        assert_eq!(format(&OutputFlags::default(), &FileConfig::default()), Format::Json);
    }
}
