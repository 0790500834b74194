//! Run configuration: defaults, config file, and flag overrides.
//!
//! The config file is JSON with the same field names as the long flags;
//! any flag given on the command line wins over the file.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crease_core::corpus::{DateRange, FilterTuple, Opponents, WindowKind};
use crease_core::lexicon::Role;
use crease_core::similarity::VectorMode;

use crate::error::CliError;
use crate::Cli;

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub player: Option<String>,
    pub opponents: Opponents,
    pub window: WindowKind,
    pub date_range: Option<DateRange>,
    pub role: Role,
    pub dims: usize,
    pub top_k: usize,
    pub perplexity: f64,
    pub iterations: usize,
    pub seed: u64,
    pub mode: VectorMode,
    pub window_days: u32,
    pub reject_threshold: f64,
    pub players_file: Option<PathBuf>,
    pub symmetric_biplot: bool,
}

/// On-disk shape of `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    corpus: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    player: Option<String>,
    opponents: Option<Vec<String>>,
    window: Option<String>,
    #[serde(rename = "type")]
    role: Option<String>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    dims: Option<usize>,
    top_k: Option<usize>,
    perplexity: Option<f64>,
    iterations: Option<usize>,
    seed: Option<u64>,
    mode: Option<String>,
    window_days: Option<u32>,
    reject_threshold: Option<f64>,
    players_file: Option<PathBuf>,
    symmetric_biplot: Option<bool>,
}

fn parse_date(tag: &str) -> Result<NaiveDate, CliError> {
    tag.parse()
        .map_err(|_| CliError::usage(format!("`{tag}` is not an ISO-8601 date (YYYY-MM-DD)")))
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };

        let window = match cli.window.as_deref().or(file.window.as_deref()) {
            Some(tag) => WindowKind::parse(tag)
                .ok_or_else(|| CliError::usage(format!("unknown time window `{tag}`")))?,
            None => WindowKind::Career,
        };
        let role = match cli.role.as_deref().or(file.role.as_deref()) {
            Some("batting") | None => Role::Batting,
            Some("bowling") => Role::Bowling,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "`--type` must be batting or bowling, got `{other}`"
                )))
            }
        };
        let mode = match cli.mode.as_deref().or(file.mode.as_deref()) {
            Some(tag) => VectorMode::parse(tag)
                .ok_or_else(|| CliError::usage(format!("unknown vector mode `{tag}`")))?,
            None => VectorMode::Profile,
        };
        let opponents = match cli.opponents.clone().or(file.opponents) {
            Some(names) if !names.is_empty() => {
                if names.len() == 1 && names[0].eq_ignore_ascii_case("all") {
                    Opponents::All
                } else {
                    Opponents::Set(names)
                }
            }
            _ => Opponents::All,
        };

        let from = match &cli.from {
            Some(tag) => Some(parse_date(tag)?),
            None => file.from,
        };
        let to = match &cli.to {
            Some(tag) => Some(parse_date(tag)?),
            None => file.to,
        };
        let date_range = match (from, to) {
            (None, None) => None,
            (start, end) => {
                let start = start
                    .ok_or_else(|| CliError::usage("--to given without --from".to_string()))?;
                let end =
                    end.ok_or_else(|| CliError::usage("--from given without --to".to_string()))?;
                Some(DateRange { start, end })
            }
        };

        Ok(Self {
            corpus: cli.corpus.clone().or(file.corpus),
            lexicon: cli.lexicon.clone().or(file.lexicon),
            out_dir: cli
                .out_dir
                .clone()
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from("crease-out")),
            player: cli.player.clone().or(file.player),
            opponents,
            window,
            date_range,
            role,
            dims: cli.dims.or(file.dims).unwrap_or(2),
            top_k: cli.top_k.or(file.top_k).unwrap_or(3),
            perplexity: cli.perplexity.or(file.perplexity).unwrap_or(30.0),
            iterations: cli.iterations.or(file.iterations).unwrap_or(1000),
            // Fixed default seed: default runs are reproducible.
            seed: cli.seed.or(file.seed).unwrap_or(42),
            window_days: cli.window_days.or(file.window_days).unwrap_or(365),
            reject_threshold: cli
                .reject_threshold
                .or(file.reject_threshold)
                .unwrap_or(0.1),
            mode,
            players_file: cli.players_file.clone().or(file.players_file),
            symmetric_biplot: cli.symmetric_biplot || file.symmetric_biplot.unwrap_or(false),
        })
    }

    pub fn corpus_path(&self) -> Result<&Path, CliError> {
        self.corpus
            .as_deref()
            .ok_or_else(|| CliError::usage("no corpus given (use --corpus or a config file)"))
    }

    pub fn player_name(&self) -> Result<&str, CliError> {
        self.player
            .as_deref()
            .ok_or_else(|| CliError::usage("no player given (use --player)"))
    }

    pub fn filter_tuple(&self) -> Result<FilterTuple, CliError> {
        Ok(FilterTuple {
            player: self.player_name()?.to_string(),
            opponents: self.opponents.clone(),
            window: self.window,
            date_range: self.date_range,
            role: self.role,
        })
    }
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::usage(format!("config {} is invalid: {e}", path.display())))
}
