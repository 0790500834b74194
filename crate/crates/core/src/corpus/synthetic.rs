//! Synthetic corpus generation with planted feature dependencies.
//!
//! Each generated delivery samples one bowling phrase, then one batting
//! phrase from the conditional distribution attached to that bowling phrase,
//! and wraps both in neutral filler. Generation is a pure function of
//! (spec, n, seed), so fixtures are reproducible byte for byte.

use chrono::{Days, NaiveDate};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CommentaryRecord, CorpusError};

const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// A bowling phrase with its mix weight and the conditional batting-phrase
/// distribution for deliveries carrying it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BowlingCondition {
    pub phrase: String,
    pub weight: f64,
    /// P(batting phrase | this bowling phrase); must sum to 1.
    pub batting: Vec<(String, f64)>,
}

/// Planted behaviour of one synthetic player.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticPlayer {
    pub name: String,
    pub conditions: Vec<BowlingCondition>,
    /// Structured-head outcome distribution; must sum to 1.
    pub outcomes: Vec<(String, f64)>,
}

/// Full description of a synthetic corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub players: Vec<SyntheticPlayer>,
    pub bowler_pool: Vec<String>,
    pub start_date: NaiveDate,
    pub span_days: u32,
    /// Neutral sentences appended to every delivery text.
    pub filler: Vec<String>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.players.is_empty() {
            return Err(CorpusError::InvalidSyntheticSpec(
                "at least one player required".into(),
            ));
        }
        if self.bowler_pool.is_empty() {
            return Err(CorpusError::InvalidSyntheticSpec(
                "bowler pool must be non-empty".into(),
            ));
        }
        if self.filler.is_empty() {
            return Err(CorpusError::InvalidSyntheticSpec(
                "filler pool must be non-empty".into(),
            ));
        }
        for player in &self.players {
            if player.conditions.is_empty() {
                return Err(CorpusError::InvalidSyntheticSpec(format!(
                    "player `{}` has no bowling conditions",
                    player.name
                )));
            }
            check_distribution(
                player.conditions.iter().map(|c| c.weight),
                &format!("player `{}` bowling mix", player.name),
            )?;
            for condition in &player.conditions {
                check_distribution(
                    condition.batting.iter().map(|(_, p)| *p),
                    &format!(
                        "player `{}` batting conditional for `{}`",
                        player.name, condition.phrase
                    ),
                )?;
            }
            check_distribution(
                player.outcomes.iter().map(|(_, p)| *p),
                &format!("player `{}` outcome distribution", player.name),
            )?;
        }
        Ok(())
    }
}

fn check_distribution(probs: impl Iterator<Item = f64>, what: &str) -> Result<(), CorpusError> {
    let mut sum = 0.0;
    for p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(CorpusError::InvalidSyntheticSpec(format!(
                "{what}: probability {p} outside [0, 1]"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(CorpusError::InvalidSyntheticSpec(format!(
            "{what}: probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn pick_weighted<T>(items: &[(T, f64)], roll: f64) -> &T {
    let mut acc = 0.0;
    for (item, weight) in items {
        acc += weight;
        if roll < acc {
            return item;
        }
    }
    &items.last().expect("non-empty distribution").0
}

/// Generate `n` deliveries. Deterministic for a fixed seed.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<CommentaryRecord>, CorpusError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let player = &spec.players[i % spec.players.len()];
        let bowler = &spec.bowler_pool[(i / spec.players.len()) % spec.bowler_pool.len()];

        let condition_roll: f64 = rng.random();
        let mut acc = 0.0;
        let mut condition = &player.conditions[player.conditions.len() - 1];
        for c in &player.conditions {
            acc += c.weight;
            if condition_roll < acc {
                condition = c;
                break;
            }
        }
        let batting_phrase = pick_weighted(&condition.batting, rng.random());
        let outcome = pick_weighted(&player.outcomes, rng.random());
        let filler = &spec.filler[rng.random_range(0..spec.filler.len())];

        let day_offset = if n <= 1 {
            0
        } else {
            (i as u64 * u64::from(spec.span_days)) / (n as u64 - 1)
        };
        let within_match = i % 600;
        records.push(CommentaryRecord {
            match_id: format!("SYNM{:05}", i / 600),
            series_id: format!("SYNS{:04}", i / 1800),
            innings: (1 + within_match / 150) as u8,
            over: (within_match % 150 / 6) as u32,
            ball_in_over: (within_match % 6 + 1) as u8,
            date: spec.start_date + Days::new(day_offset),
            bowler: bowler.clone(),
            batsman: player.name.clone(),
            outcome_token: outcome.clone(),
            text: format!(
                "{} from {} and {} {}, {}",
                condition.phrase, bowler, player.name, batting_phrase, filler
            ),
            session: Some((1 + within_match / 200) as u8),
        });
    }
    Ok(records)
}

/// Neutral filler sentences that match no lexicon feature.
pub fn neutral_filler() -> Vec<String> {
    [
        "the batsman watches it closely",
        "the crowd goes quiet",
        "fielders stay alert in the ring",
        "he takes his time between deliveries",
        "the keeper collects it cleanly",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn standard_outcomes() -> Vec<(String, f64)> {
    vec![
        ("no run".to_string(), 0.45),
        ("1 run".to_string(), 0.30),
        ("FOUR".to_string(), 0.15),
        ("OUT".to_string(), 0.10),
    ]
}

/// One-player corpus with attacked↔leg-line and beaten↔swing planted: the
/// standard rule-recovery fixture.
pub fn planted_response_spec(player: &str) -> SyntheticSpec {
    let conditions = vec![
        BowlingCondition {
            phrase: "leg stump".into(),
            weight: 0.20,
            batting: vec![
                ("drives".into(), 0.80),
                ("blocks".into(), 0.15),
                ("beaten".into(), 0.05),
            ],
        },
        BowlingCondition {
            phrase: "swinging".into(),
            weight: 0.20,
            batting: vec![
                ("beaten".into(), 0.80),
                ("blocks".into(), 0.15),
                ("drives".into(), 0.05),
            ],
        },
        BowlingCondition {
            phrase: "good length".into(),
            weight: 0.30,
            batting: vec![
                ("blocks".into(), 0.60),
                ("drives".into(), 0.20),
                ("beaten".into(), 0.20),
            ],
        },
        BowlingCondition {
            phrase: "short ball".into(),
            weight: 0.15,
            batting: vec![
                ("blocks".into(), 0.50),
                ("drives".into(), 0.25),
                ("beaten".into(), 0.25),
            ],
        },
        BowlingCondition {
            phrase: "full length".into(),
            weight: 0.15,
            batting: vec![
                ("blocks".into(), 0.50),
                ("drives".into(), 0.25),
                ("beaten".into(), 0.25),
            ],
        },
    ];
    SyntheticSpec {
        players: vec![SyntheticPlayer {
            name: player.to_string(),
            conditions,
            outcomes: standard_outcomes(),
        }],
        bowler_pool: vec!["Quill".into(), "Rowan".into(), "Sefton".into()],
        start_date: NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
        span_days: 1095,
        filler: neutral_filler(),
    }
}

/// One-player corpus planting front-foot play on full deliveries, for the
/// footwork aspect fixture.
pub fn planted_footwork_spec(player: &str) -> SyntheticSpec {
    let conditions = vec![
        BowlingCondition {
            phrase: "full length".into(),
            weight: 0.30,
            batting: vec![("front foot".into(), 0.80), ("back foot".into(), 0.20)],
        },
        BowlingCondition {
            phrase: "short ball".into(),
            weight: 0.30,
            batting: vec![("back foot".into(), 0.80), ("front foot".into(), 0.20)],
        },
        BowlingCondition {
            phrase: "good length".into(),
            weight: 0.40,
            batting: vec![("front foot".into(), 0.50), ("back foot".into(), 0.50)],
        },
    ];
    SyntheticSpec {
        players: vec![SyntheticPlayer {
            name: player.to_string(),
            conditions,
            outcomes: standard_outcomes(),
        }],
        bowler_pool: vec!["Quill".into(), "Rowan".into()],
        start_date: NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
        span_days: 1095,
        filler: neutral_filler(),
    }
}

/// Eighteen players in six style groups, used by the demo pipeline: each
/// group attacks one delivery type and gets beaten by another, so both the
/// rules and the similarity embedding have visible structure.
pub fn demo_roster_spec() -> SyntheticSpec {
    let names = [
        "Abel", "Brook", "Calder", "Dalton", "Ennis", "Farley", "Girard", "Hobbs", "Irving",
        "Joshi", "Keller", "Lindo", "Mercer", "Novak", "Osler", "Pratt", "Tanaka", "Unwin",
    ];
    // (attacked phrase, beaten phrase) per style group of three players.
    let styles = [
        ("leg stump", "swinging"),
        ("short ball", "moving away"),
        ("full length", "angling in"),
        ("spinning", "good length"),
        ("slower ball", "short ball"),
        ("quick", "spinning"),
    ];
    let players = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (strong, weak) = styles[i / 3];
            let neutral = if weak == "good length" {
                "middle stump"
            } else {
                "good length"
            };
            // Footwork and shot-area phrases ride along so the aspect rules
            // and all four biplot groups have data.
            let conditions = vec![
                BowlingCondition {
                    phrase: strong.into(),
                    weight: 0.30,
                    batting: vec![
                        ("drives".into(), 0.55),
                        ("front foot".into(), 0.20),
                        ("square leg".into(), 0.15),
                        ("blocks".into(), 0.05),
                        ("beaten".into(), 0.05),
                    ],
                },
                BowlingCondition {
                    phrase: weak.into(),
                    weight: 0.30,
                    batting: vec![
                        ("beaten".into(), 0.60),
                        ("back foot".into(), 0.20),
                        ("blocks".into(), 0.15),
                        ("drives".into(), 0.05),
                    ],
                },
                BowlingCondition {
                    phrase: neutral.into(),
                    weight: 0.40,
                    batting: vec![
                        ("blocks".into(), 0.45),
                        ("drives".into(), 0.15),
                        ("beaten".into(), 0.15),
                        ("back foot".into(), 0.15),
                        ("third man".into(), 0.10),
                    ],
                },
            ];
            SyntheticPlayer {
                name: name.to_string(),
                conditions,
                outcomes: standard_outcomes(),
            }
        })
        .collect();
    SyntheticSpec {
        players,
        bowler_pool: vec![
            "Quill".into(),
            "Rowan".into(),
            "Sefton".into(),
            "Vance".into(),
        ],
        start_date: NaiveDate::from_ymd_opt(2015, 6, 1).unwrap(),
        span_days: 1400,
        filler: neutral_filler(),
    }
}
