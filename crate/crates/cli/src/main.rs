//! `crease`: strength and weakness mining from cricket ball-by-ball
//! commentary.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crease_core::lexicon::BattingFeature;
use crease_core::similarity::Polarity;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "crease",
    version,
    about = "Mine per-player strength and weakness rules from ball-by-ball cricket commentary",
    after_help = "Config file: --config points at a JSON object using the same names as the \
                  long flags (player, window, type, dims, ...); explicit flags win."
)]
pub struct Cli {
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Corpus file, one JSON delivery record per line
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Lexicon file mapping features to phrases (default: bundled lexicon)
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Directory for artifacts (default: crease-out)
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Player the filter tuple selects
    #[arg(long, global = true)]
    pub player: Option<String>,
    /// Opponent names, comma separated; omit or pass ALL for everyone
    #[arg(long, global = true, value_delimiter = ',')]
    pub opponents: Option<Vec<String>>,
    /// Time window: session, day, innings, match, series, or career
    #[arg(long, global = true)]
    pub window: Option<String>,
    /// Analyze the player's batting or bowling
    #[arg(long = "type", global = true)]
    pub role: Option<String>,
    /// Explicit range start (YYYY-MM-DD); requires --to
    #[arg(long, global = true)]
    pub from: Option<String>,
    /// Explicit range end (YYYY-MM-DD); requires --from
    #[arg(long, global = true)]
    pub to: Option<String>,
    /// Dimensions used for rule scoring and configurations (default 2)
    #[arg(long, global = true)]
    pub dims: Option<usize>,
    /// Rules to keep per anchor (default 3)
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// t-SNE perplexity (default 30, clamped to (N-1)/3)
    #[arg(long, global = true)]
    pub perplexity: Option<f64>,
    /// t-SNE gradient-descent iterations (default 1000)
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Seed for every stochastic step (default 42)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Player-vector mode: profile (31-dim) or coordinate
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Holdout window in days for validation (default 365)
    #[arg(long, global = true)]
    pub window_days: Option<u32>,
    /// Reject-rate fraction that makes ingestion fatal (default 0.1)
    #[arg(long, global = true)]
    pub reject_threshold: Option<f64>,
    /// Roster file for batch commands, one player per line
    #[arg(long, global = true)]
    pub players_file: Option<PathBuf>,
    /// Draw biplots as symmetric maps instead of contribution biplots
    #[arg(long, global = true)]
    pub symmetric_biplot: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate and persist a commentary corpus, writing an ingestion report
    Ingest,
    /// Export a player's 19x12 confrontation matrix (CSV + JSON)
    Matrix,
    /// Extract strength, weakness, and aspect rules (JSON + text)
    Rules,
    /// Render response/outcome/shotarea/footwork biplots as SVG
    Biplot,
    /// Embed all players by their top rule and render the similarity map
    Similar {
        /// strength or weakness
        #[arg(long, default_value = "strength")]
        polarity: String,
    },
    /// Train/test rule stability per player (Procrustes superimposition)
    Validate,
    /// Word-frequency baseline over the records matching an anchor feature
    Wordfreq {
        /// attacked, beaten, or both
        #[arg(long, default_value = "both")]
        anchor: String,
    },
    /// Generate the bundled synthetic corpus and run the whole pipeline
    Demo {
        /// Number of synthetic deliveries to generate
        #[arg(long, default_value_t = 14_400)]
        records: usize,
    },
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = RunConfig::resolve(cli)?;
    match &cli.command {
        Command::Ingest => commands::cmd_ingest(&config),
        Command::Matrix => commands::cmd_matrix(&config),
        Command::Rules => commands::cmd_rules(&config),
        Command::Biplot => commands::cmd_biplot(&config),
        Command::Similar { polarity } => {
            let polarity = match polarity.as_str() {
                "strength" => Polarity::Strength,
                "weakness" => Polarity::Weakness,
                other => {
                    return Err(CliError::usage(format!(
                        "--polarity must be strength or weakness, got `{other}`"
                    )))
                }
            };
            commands::cmd_similar(&config, polarity)
        }
        Command::Validate => commands::cmd_validate(&config),
        Command::Wordfreq { anchor } => {
            let anchors: Vec<BattingFeature> = match anchor.as_str() {
                "attacked" => vec![BattingFeature::Attacked],
                "beaten" => vec![BattingFeature::Beaten],
                "both" => vec![BattingFeature::Attacked, BattingFeature::Beaten],
                other => {
                    return Err(CliError::usage(format!(
                        "--anchor must be attacked, beaten, or both, got `{other}`"
                    )))
                }
            };
            commands::cmd_wordfreq(&config, &anchors)
        }
        Command::Demo { records } => commands::cmd_demo(&config, *records),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
