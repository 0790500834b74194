//! Implementations of the pipeline subcommands.

use std::fs;
use std::io::BufReader;

use serde_json::json;

use crease_core::ca::{run_ca, subset_ca, CaResult, CountGrid};
use crease_core::confrontation::{build_matrix, ConfrontationMatrix};
use crease_core::corpus::synthetic::{demo_roster_spec, generate_synthetic};
use crease_core::corpus::{filter_records, ingest, CorpusStore, FilterTuple, SchemaVersion};
use crease_core::lexicon::{BattingFeature, FeatureLexicon, Role};
use crease_core::report::{render_biplot, render_scatter, word_frequency_report, PlotStyle};
use crease_core::rules::{
    aspect_rules, rule_budget, strength_rules, weakness_rules, Aspect, PlayerRole, Rule, RuleError,
};
use crease_core::similarity::{embed_tsne, player_vector, Polarity};
use crease_core::validation::{validate_player, ProcrustesReport, ValidationError};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::OutDir;

fn batting_labels() -> Vec<&'static str> {
    BattingFeature::ALL.iter().map(|f| f.name()).collect()
}

fn bowling_labels() -> Vec<&'static str> {
    crease_core::lexicon::BowlingFeature::ALL
        .iter()
        .map(|f| f.name())
        .collect()
}

/// Shared setup: lexicon and corpus store.
pub struct Context {
    pub store: CorpusStore,
    pub lexicon: FeatureLexicon,
    pub out: OutDir,
}

pub fn load_lexicon(config: &RunConfig) -> Result<FeatureLexicon, CliError> {
    match &config.lexicon {
        Some(path) => {
            let raw = fs::read_to_string(path)?;
            Ok(FeatureLexicon::from_json(&raw)?)
        }
        None => Ok(FeatureLexicon::bundled()),
    }
}

pub fn load_store(config: &RunConfig) -> Result<CorpusStore, CliError> {
    let path = config.corpus_path()?;
    let file = fs::File::open(path)
        .map_err(|e| CliError::data(format!("cannot open corpus {}: {e}", path.display())))?;
    let store = ingest(BufReader::new(file), SchemaVersion::V1)?;
    store.report().ensure_reject_rate(config.reject_threshold)?;
    Ok(store)
}

fn context(config: &RunConfig) -> Result<Context, CliError> {
    Ok(Context {
        store: load_store(config)?,
        lexicon: load_lexicon(config)?,
        out: OutDir::create(&config.out_dir)?,
    })
}

/// Filter for one player, warning (not failing) when the player is unknown.
fn filtered_records(
    store: &CorpusStore,
    filter: &FilterTuple,
) -> Result<Vec<crease_core::corpus::CommentaryRecord>, CliError> {
    let outcome = filter_records(store, filter)?;
    if !outcome.player_known {
        eprintln!(
            "warning: player `{}` never appears as a {} in this corpus",
            filter.player, filter.role
        );
    }
    if outcome.records.is_empty() {
        return Err(CliError::data(format!(
            "no records match the filter for `{}`; the confrontation matrix would be empty",
            filter.player
        )));
    }
    Ok(outcome.records)
}

fn player_matrix(ctx: &Context, filter: &FilterTuple) -> Result<ConfrontationMatrix, CliError> {
    let records = filtered_records(&ctx.store, filter)?;
    let mut matrix = build_matrix(&records, &ctx.lexicon);
    matrix.filter = Some(filter.clone());
    Ok(matrix)
}

// ---------------------------------------------------------------------------
// ingest

pub fn cmd_ingest(config: &RunConfig) -> Result<(), CliError> {
    let store = load_store(config)?;
    if store.is_empty() {
        return Err(CliError::data(
            "corpus contains no valid records (EmptyCorpus)".to_string(),
        ));
    }
    let out = OutDir::create(&config.out_dir)?;
    out.write(
        "ingest_report.json",
        serde_json::to_string_pretty(store.report())? + "\n",
    )?;
    out.write("ingest_report.txt", store.report().to_text())?;
    out.write("corpus_normalized.jsonl", store.to_jsonl())?;
    println!(
        "ingested {} records ({} rejects) -> {}",
        store.len(),
        store.report().rejects.len(),
        config.out_dir.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// matrix

pub fn cmd_matrix(config: &RunConfig) -> Result<(), CliError> {
    let ctx = context(config)?;
    let filter = config.filter_tuple()?;
    let matrix = player_matrix(&ctx, &filter)?;
    ctx.out.write("matrix.csv", matrix.to_csv())?;
    ctx.out
        .write("matrix.json", serde_json::to_string_pretty(&matrix)? + "\n")?;
    println!(
        "confrontation matrix for {}: {} records used, {} skipped, total {}",
        filter.player,
        matrix.records_used,
        matrix.records_skipped,
        matrix.sum()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// rules

fn effective_dims(config_dims: usize, ca: &CaResult) -> Result<usize, CliError> {
    if ca.k() == 0 {
        return Err(CliError::degenerate(
            "analysis retained no dimensions; the matrix is too close to independence".to_string(),
        ));
    }
    let dims = config_dims.clamp(1, ca.k());
    if dims != config_dims {
        eprintln!(
            "notice: clamped dims from {config_dims} to {dims} (retained dimensions: {})",
            ca.k()
        );
    }
    Ok(dims)
}

pub fn cmd_rules(config: &RunConfig) -> Result<(), CliError> {
    let ctx = context(config)?;
    let filter = config.filter_tuple()?;
    let player = filter.player.clone();
    let matrix = player_matrix(&ctx, &filter)?;
    let ca = run_ca(&CountGrid::from(&matrix))?;
    let dims = effective_dims(config.dims, &ca)?;
    let role = match filter.role {
        Role::Batting => PlayerRole::Batsman,
        Role::Bowling => PlayerRole::Bowler,
    };

    let mut rules: Vec<Rule> = Vec::new();
    rules.extend(strength_rules(&ca, &player, role, config.top_k, dims)?);
    rules.extend(weakness_rules(&ca, &player, role, config.top_k, dims)?);
    for aspect in [Aspect::Outcome, Aspect::Shotarea, Aspect::Footwork] {
        match aspect_rules(&ca, &player, aspect, config.top_k, dims) {
            Ok(found) => rules.extend(found),
            Err(RuleError::FeatureUnavailable(feature)) => {
                eprintln!(
                    "warning: skipping {aspect:?} rules; no surviving features (e.g. `{feature}`)"
                );
            }
            Err(other) => return Err(other.into()),
        }
    }

    let payload = json!({
        "player": player,
        "type": filter.role,
        "dims": dims,
        "rule_budget": rule_budget(&ca),
        "rules": rules,
    });
    ctx.out
        .write("rules.json", serde_json::to_string_pretty(&payload)? + "\n")?;
    let ca_json = ca.to_json(&batting_labels(), &bowling_labels());
    ctx.out
        .write("ca.json", serde_json::to_string_pretty(&ca_json)? + "\n")?;

    let mut text = String::new();
    for rule in &rules {
        text.push_str(&format!(
            "[{:9}] #{} {} (score {:+.4})\n",
            format!("{:?}", rule.polarity).to_lowercase(),
            rule.rank,
            rule.to_text(),
            rule.score
        ));
    }
    ctx.out.write("rules.txt", text)?;
    println!("wrote {} rules for {player}", rules.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// biplot

pub fn cmd_biplot(config: &RunConfig) -> Result<(), CliError> {
    let ctx = context(config)?;
    let filter = config.filter_tuple()?;
    let matrix = player_matrix(&ctx, &filter)?;
    let grid = CountGrid::from(&matrix);
    let style = PlotStyle::default();
    let row_labels = batting_labels();
    let col_labels = bowling_labels();

    let groups: [(&str, Vec<usize>); 4] = [
        (
            "response",
            vec![
                BattingFeature::Beaten.index(),
                BattingFeature::Defended.index(),
                BattingFeature::Attacked.index(),
            ],
        ),
        (
            "outcome",
            Aspect::Outcome
                .features()
                .iter()
                .map(|f| f.index())
                .collect(),
        ),
        (
            "shotarea",
            Aspect::Shotarea
                .features()
                .iter()
                .map(|f| f.index())
                .collect(),
        ),
        (
            "footwork",
            Aspect::Footwork
                .features()
                .iter()
                .map(|f| f.index())
                .collect(),
        ),
    ];

    let mut rendered = 0;
    for (name, subset) in groups {
        let title = format!("{} - {} vs bowling features", filter.player, name);
        let result = subset_ca(&grid, &subset)
            .map_err(CliError::from)
            .and_then(|ca| {
                render_biplot(
                    &ca,
                    &row_labels,
                    &col_labels,
                    None,
                    &style,
                    &title,
                    config.symmetric_biplot,
                )
                .map_err(CliError::from)
            });
        match result {
            Ok(svg) => {
                ctx.out.write(&format!("biplot_{name}.svg"), svg)?;
                rendered += 1;
            }
            Err(err) => eprintln!("warning: skipping {name} biplot: {err}"),
        }
    }
    if rendered == 0 {
        return Err(CliError::degenerate(
            "no biplot group could be rendered (matrix too sparse)".to_string(),
        ));
    }
    println!("rendered {rendered} biplots for {}", filter.player);
    Ok(())
}

// ---------------------------------------------------------------------------
// similar

fn roster(config: &RunConfig, store: &CorpusStore) -> Result<Vec<String>, CliError> {
    match &config.players_file {
        Some(path) => {
            let raw = fs::read_to_string(path)?;
            let names: Vec<String> = raw
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
            if names.is_empty() {
                return Err(CliError::data(format!(
                    "players file {} lists no players",
                    path.display()
                )));
            }
            Ok(names)
        }
        None => Ok(store.player_names(config.role)),
    }
}

pub fn cmd_similar(config: &RunConfig, polarity: Polarity) -> Result<(), CliError> {
    let ctx = context(config)?;
    let role = match config.role {
        Role::Batting => PlayerRole::Batsman,
        Role::Bowling => PlayerRole::Bowler,
    };

    let mut vectors = Vec::new();
    for player in roster(config, &ctx.store)? {
        let filter = FilterTuple::career(player.clone(), config.role);
        let step = || -> Result<_, CliError> {
            let matrix = player_matrix(&ctx, &filter)?;
            let ca = run_ca(&CountGrid::from(&matrix))?;
            Ok(player_vector(
                &matrix,
                &ca,
                &player,
                role,
                polarity,
                config.mode,
            )?)
        };
        match step() {
            Ok(vector) => vectors.push(vector),
            Err(err) => eprintln!("warning: skipping {player}: {err}"),
        }
    }

    if vectors.len() < 4 {
        return Err(CliError::degenerate(format!(
            "only {} usable player vectors; t-SNE needs at least 4",
            vectors.len()
        )));
    }
    let max_perplexity = (vectors.len() as f64 - 1.0) / 3.0;
    let perplexity = if config.perplexity > max_perplexity {
        eprintln!(
            "notice: clamped perplexity from {} to {max_perplexity:.2} for {} points",
            config.perplexity,
            vectors.len()
        );
        max_perplexity
    } else {
        config.perplexity
    };

    let embedding = embed_tsne(&vectors, perplexity, config.iterations, config.seed)?;
    let tag = polarity.name();
    ctx.out
        .write(&format!("embedding_{tag}.csv"), embedding.to_csv())?;
    let svg = render_scatter(
        &embedding,
        &PlotStyle::default(),
        &format!("similar players by {tag} rule"),
    )?;
    ctx.out.write(&format!("similarity_{tag}.svg"), svg)?;
    println!(
        "embedded {} players ({tag}), final KL divergence {:.4}",
        embedding.entries.len(),
        embedding.final_kl
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// validate

pub fn cmd_validate(config: &RunConfig) -> Result<(), CliError> {
    let ctx = context(config)?;
    let mut reports: Vec<ProcrustesReport> = Vec::new();
    for player in roster(config, &ctx.store)? {
        let filter = FilterTuple::career(player.clone(), config.role);
        match validate_player(
            &ctx.store,
            &filter,
            &ctx.lexicon,
            config.window_days,
            config.dims,
        ) {
            Ok(report) => reports.push(report),
            Err(ValidationError::Corpus(err)) => return Err(err.into()),
            Err(err) => eprintln!("warning: skipping {player}: {err}"),
        }
    }
    if reports.is_empty() {
        return Err(CliError::degenerate(
            "no player produced a valid train/test comparison".to_string(),
        ));
    }

    let mut csv = String::from(ProcrustesReport::csv_header());
    for report in &reports {
        csv.push_str(&report.to_csv_row());
    }
    ctx.out.write("validate.csv", csv)?;
    ctx.out.write(
        "validate.json",
        serde_json::to_string_pretty(&reports)? + "\n",
    )?;
    println!(
        "validated {} players over a {}-day holdout",
        reports.len(),
        config.window_days
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// wordfreq

pub fn cmd_wordfreq(config: &RunConfig, anchors: &[BattingFeature]) -> Result<(), CliError> {
    let ctx = context(config)?;
    let filter = config.filter_tuple()?;
    let records = filtered_records(&ctx.store, &filter)?;
    for &anchor in anchors {
        let ranked = word_frequency_report(&records, anchor, &ctx.lexicon, config.top_k.max(20));
        let mut csv = String::from("bigram,count\n");
        for (bigram, count) in &ranked {
            csv.push_str(&format!("{bigram},{count}\n"));
        }
        ctx.out
            .write(&format!("wordfreq_{}.csv", anchor.name()), csv)?;
        match ranked.first() {
            Some((bigram, count)) => println!(
                "{} cloud for {}: top bigram `{bigram}` ({count} records)",
                anchor.name(),
                filter.player
            ),
            None => println!(
                "{} cloud for {}: no matching records",
                anchor.name(),
                filter.player
            ),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// demo

pub fn cmd_demo(config: &RunConfig, records: usize) -> Result<(), CliError> {
    let out = OutDir::create(&config.out_dir)?;
    let spec = demo_roster_spec();
    let generated = generate_synthetic(&spec, records, config.seed)
        .map_err(|e| CliError::data(e.to_string()))?;
    let mut jsonl = String::new();
    for record in &generated {
        jsonl.push_str(&serde_json::to_string(record)?);
        jsonl.push('\n');
    }
    let corpus_path = out.write("corpus.jsonl", jsonl)?;
    println!(
        "demo corpus: {} deliveries -> {}",
        generated.len(),
        corpus_path.display()
    );

    let base = RunConfig {
        corpus: Some(corpus_path),
        player: Some("Abel".to_string()),
        ..config.clone()
    };
    cmd_ingest(&base)?;
    cmd_matrix(&base)?;
    cmd_rules(&base)?;
    cmd_biplot(&base)?;
    cmd_wordfreq(&base, &[BattingFeature::Attacked, BattingFeature::Beaten])?;
    cmd_similar(&base, Polarity::Strength)?;
    cmd_similar(&base, Polarity::Weakness)?;
    cmd_validate(&base)?;
    println!("demo pipeline complete in {}", config.out_dir.display());
    Ok(())
}
