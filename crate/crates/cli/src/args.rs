use std::path::PathBuf;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hria_core::workflow::Stage;
use hria_core::{Level, RiskRatings};

fn level(s: &str) -> Result<Level, String> {
    s.parse().map_err(|e: hria_core::ScoringError| e.to_string())
}

fn stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: hria_core::workflow::UnknownStage| e.to_string())
}

fn timestamp(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("expected an RFC 3339 timestamp: {e}"))
}

/// Escalation threshold; `None` disables escalation.
#[derive(Debug, Clone, Copy)]
pub struct Threshold(pub Option<u32>);

fn threshold(s: &str) -> Result<Threshold, String> {
    match s {
        "none" | "off" => Ok(Threshold(None)),
        n => n
            .parse()
            .map(|t| Threshold(Some(t)))
            .map_err(|_| format!("expected a count or \"none\", got {n:?}")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "hria", version, about = "Human-rights impact assessment engine")]
pub struct Cli {
    /// Custom rights catalog file, merged with the builtin rights.
    #[arg(long, global = true, env = "HRIA_CATALOG", value_name = "FILE")]
    pub catalog: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a new assessment file.
    Init(InitArgs),
    /// Planning and scoping answers.
    #[command(subcommand)]
    Scope(ScopeCommand),
    /// Register a case-specific right on an assessment.
    #[command(subcommand)]
    Right(RightCommand),
    /// Risk register operations.
    #[command(subcommand)]
    Risk(RiskCommand),
    /// Mitigation rounds.
    #[command(subcommand)]
    Round(RoundCommand),
    /// Stage checklist and transitions.
    #[command(subcommand)]
    Stage(StageCommand),
    /// Free-text notes.
    #[command(subcommand)]
    Note(NoteCommand),
    /// Render a report for an assessment or integrated file.
    Report(ReportArgs),
    /// Combine component assessments into a per-right summary.
    Integrate(IntegrateArgs),
    /// Check a file's checksum, schema and invariants.
    Validate(FileArg),
    /// Run the local HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct FileArg {
    pub file: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Fixture {
    /// Initial ratings of the talking-doll case study.
    HelloBarbie,
    /// The same case study after its mitigation rounds.
    HelloBarbieMitigated,
}

#[derive(Debug, Args)]
pub struct InitArgs {
    pub file: PathBuf,
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub title: Option<String>,
    #[arg(long, conflicts_with = "fixture")]
    pub id: Option<String>,
    #[arg(long, conflicts_with = "fixture")]
    pub description: Option<String>,
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Overwrite an existing file.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum ScopeCommand {
    /// Update scoping fields; unspecified fields keep their values.
    Set(ScopeSetArgs),
}

#[derive(Debug, Args)]
pub struct ScopeSetArgs {
    pub file: PathBuf,
    /// Replace the whole scoping record with this JSON file.
    #[arg(long, value_name = "JSON")]
    pub from_json: Option<PathBuf>,
    #[arg(long)]
    pub product_description: Option<String>,
    #[arg(long, value_name = "COUNTRY")]
    pub target_countries: Vec<String>,
    #[arg(long, value_name = "HOLDER")]
    pub rights_holders: Vec<String>,
    #[arg(long, value_name = "CATEGORY")]
    pub data_categories: Vec<String>,
    #[arg(long, value_name = "PURPOSE")]
    pub processing_purposes: Vec<String>,
    #[arg(long, value_name = "BEARER")]
    pub duty_bearers: Vec<String>,
    /// `BLOCK.KEY=ANSWER`, e.g. `controls_in_place.impact_policies=...`.
    #[arg(long, value_name = "BLOCK.KEY=ANSWER")]
    pub answer: Vec<String>,
    /// Like `--answer` but for a project-specific question.
    #[arg(long, value_name = "BLOCK.KEY=ANSWER")]
    pub extension: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum RightCommand {
    Register(RightArgs),
}

#[derive(Debug, Args)]
pub struct RightArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub key: String,
    #[arg(long)]
    pub title: String,
    #[arg(long, default_value = "")]
    pub description: String,
    #[arg(long)]
    pub context_notes: Option<String>,
}

#[derive(Debug, Args)]
pub struct RatingArgs {
    #[arg(long, value_parser = level)]
    pub probability: Option<Level>,
    #[arg(long, value_parser = level)]
    pub exposure: Option<Level>,
    #[arg(long, value_parser = level)]
    pub gravity: Option<Level>,
    #[arg(long, value_parser = level)]
    pub effort: Option<Level>,
}

impl RatingArgs {
    /// All four or none; a partial set is a usage error.
    pub fn ratings(&self) -> Result<Option<RiskRatings>, String> {
        match (self.probability, self.exposure, self.gravity, self.effort) {
            (Some(p), Some(x), Some(g), Some(e)) => Ok(Some(RiskRatings::new(p, x, g, e))),
            (None, None, None, None) => Ok(None),
            _ => Err("--probability, --exposure, --gravity and --effort must be given together".into()),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum RiskCommand {
    /// Add a risk, optionally with its initial ratings.
    Add(RiskAddArgs),
    /// Set a risk's initial ratings.
    Rate(RiskRateArgs),
    /// Mark a risk whose impact cannot be quantified yet.
    FlagPrecautionary(FlagArgs),
    /// Accept the open uncertainty of a flagged risk.
    AcceptPrecautionary(ResolveArgs),
    /// Clear a flag so the risk is scored again.
    ResolvePrecautionary(ResolveArgs),
}

#[derive(Debug, Args)]
pub struct RiskAddArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub right_key: String,
    #[arg(long)]
    pub description: String,
    #[command(flatten)]
    pub initial: RatingArgs,
    /// `QUESTION=ANSWER`.
    #[arg(long, value_name = "QUESTION=ANSWER")]
    pub guiding_answer: Vec<String>,
    /// Add the risk already flagged, with this rationale.
    #[arg(long, value_name = "RATIONALE")]
    pub uncertainty_rationale: Option<String>,
}

#[derive(Debug, Args)]
pub struct RiskRateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub risk: String,
    #[command(flatten)]
    pub ratings: RatingArgs,
}

#[derive(Debug, Args)]
pub struct FlagArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub risk: String,
    #[arg(long)]
    pub uncertainty_rationale: String,
    #[arg(long, value_name = "MEASURE")]
    pub recommended_measures: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub risk: String,
    #[arg(long)]
    pub rationale: String,
    /// Initial ratings to use after resolving (resolve only).
    #[command(flatten)]
    pub ratings: RatingArgs,
}

#[derive(Debug, Subcommand)]
pub enum RoundCommand {
    /// Append a re-assessment round to a risk.
    Apply(RoundArgs),
}

#[derive(Debug, Args)]
pub struct RoundArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub risk: String,
    /// Defaults to the next index for the risk.
    #[arg(long)]
    pub index: Option<u32>,
    /// `DESCRIPTION::LEGAL_BASIS`.
    #[arg(long, value_name = "DESCRIPTION::LEGAL_BASIS")]
    pub excluding_factors: Vec<String>,
    /// `DESCRIPTION` or `DESCRIPTION::CATEGORY`.
    #[arg(long, value_name = "DESCRIPTION[::CATEGORY]")]
    pub mitigation_measures: Vec<String>,
    /// Residual ratings after the round.
    #[command(flatten)]
    pub residual: RatingArgs,
    /// The risk falls outside legal relevance after this round.
    #[arg(long, conflicts_with_all = ["probability", "exposure", "gravity", "effort"])]
    pub excluded: bool,
    #[arg(long, default_value = "")]
    pub rationale: String,
    #[arg(long, value_parser = timestamp)]
    pub created_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Subcommand)]
pub enum StageCommand {
    /// Move to another stage.
    Advance(AdvanceArgs),
    /// Mark checklist tasks done (all tasks unless `--item` is given).
    Check(CheckArgs),
    /// Print the stage and checklist.
    Show(FileArg),
}

#[derive(Debug, Args)]
pub struct AdvanceArgs {
    pub file: PathBuf,
    #[arg(long, value_parser = stage)]
    pub to: Stage,
    /// Required when the current checklist is incomplete.
    #[arg(long = "override", alias = "override-rationale", value_name = "RATIONALE")]
    pub override_rationale: Option<String>,
    #[arg(long, value_parser = timestamp)]
    pub at: Option<DateTime<Utc>>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Defaults to the current stage.
    #[arg(long, value_parser = stage)]
    pub stage: Option<Stage>,
    /// Zero-based task index.
    #[arg(long)]
    pub item: Option<usize>,
    /// Mark as not done instead.
    #[arg(long, requires = "item")]
    pub undo: bool,
}

#[derive(Debug, Subcommand)]
pub enum NoteCommand {
    Add { file: PathBuf, note: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[value(alias = "markdown")]
    Md,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    /// Write to a file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Chart only the initial series (svg).
    #[arg(long)]
    pub no_final: bool,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(required = true, num_args = 1..)]
    pub files: Vec<PathBuf>,
    /// Contributing components needed to step a right up one level, or `none`.
    #[arg(long, value_parser = threshold, default_value = "2")]
    pub escalation_threshold: Threshold,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also store the integrated result as a file.
    #[arg(long, value_name = "FILE")]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = ".")]
    pub root: PathBuf,
    #[arg(long, default_value_t = 8787)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Static console bundle to serve alongside the API.
    #[arg(long)]
    pub console_dir: Option<PathBuf>,
}
