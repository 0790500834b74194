//! Tokenization and phrase-to-feature matching.
//!
//! Commentary text is lowercased and split into tokens, expanded into
//! unigrams plus adjacent bigrams, and those n-grams are looked up in a
//! [`FeatureLexicon`]. Matching is exact: the lexicon enumerates surface
//! forms ("miss", "misses", "missed") instead of stemming, and no stop words
//! are removed; words like "off", "good" and "full" carry the signal here.

mod features;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use features::{BattingFeature, BowlingFeature, FeatureId, Role};

/// Bundled default lexicon, seeded from the published beaten set and common
/// cricket vocabulary. The mapping for the other 30 features is this
/// project's curation; replace it with `--lexicon` where a vetted one exists.
pub const DEFAULT_LEXICON_JSON: &str = include_str!("../../assets/default_lexicon.json");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown feature name `{0}` in lexicon file")]
    UnknownFeature(String),
    #[error("feature `{feature}` has invalid phrase `{phrase}`: {reason}")]
    InvalidPhrase {
        feature: String,
        phrase: String,
        reason: String,
    },
    #[error("outcome feature `{0}` must have an empty phrase set (outcomes come from the structured head)")]
    OutcomePhrases(String),
    #[error("phrase `{phrase}` is mapped to both `{first}` and `{second}` within the same role")]
    DuplicatePhrase {
        phrase: String,
        first: String,
        second: String,
    },
    #[error("unrecognized outcome token `{0}`")]
    UnknownOutcome(String),
}

/// Lowercase and split on any character outside `[a-z0-9']`.
///
/// Apostrophes survive inside tokens ("doesn't" is one token) and nothing is
/// treated as a stop word.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        let ch = ch.to_ascii_lowercase();
        if ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '\'' {
            current.push(ch);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// All unigrams in order, then all adjacent bigrams joined with one space.
pub fn extract_ngrams(tokens: &[String]) -> Vec<String> {
    let mut ngrams = Vec::with_capacity(tokens.len() * 2);
    ngrams.extend(tokens.iter().cloned());
    for pair in tokens.windows(2) {
        ngrams.push(format!("{} {}", pair[0], pair[1]));
    }
    ngrams
}

/// Phrase sets for every batting and bowling feature.
///
/// Within a role each phrase maps to at most one feature, so lookups are
/// unambiguous. Cross-role duplication (the same phrase naming a batting and
/// a bowling feature) is allowed.
#[derive(Debug, Clone)]
pub struct FeatureLexicon {
    batting_phrases: BTreeMap<BattingFeature, BTreeSet<String>>,
    bowling_phrases: BTreeMap<BowlingFeature, BTreeSet<String>>,
    batting_lookup: HashMap<String, BattingFeature>,
    bowling_lookup: HashMap<String, BowlingFeature>,
}

/// On-disk shape: one JSON object keyed by feature name.
#[derive(Serialize, Deserialize)]
struct LexiconFile(BTreeMap<String, Vec<String>>);

impl FeatureLexicon {
    /// Load and validate a lexicon from its JSON representation.
    pub fn from_json(json: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(json)?;
        let mut batting: BTreeMap<BattingFeature, BTreeSet<String>> = BattingFeature::ALL
            .iter()
            .map(|&f| (f, BTreeSet::new()))
            .collect();
        let mut bowling: BTreeMap<BowlingFeature, BTreeSet<String>> = BowlingFeature::ALL
            .iter()
            .map(|&f| (f, BTreeSet::new()))
            .collect();

        for (name, phrases) in file.0 {
            if let Some(feature) = BattingFeature::from_name(&name) {
                if feature.is_outcome() && !phrases.is_empty() {
                    return Err(LexiconError::OutcomePhrases(name));
                }
                let set = batting.get_mut(&feature).expect("all features present");
                for phrase in phrases {
                    validate_phrase(&name, &phrase)?;
                    set.insert(phrase);
                }
            } else if let Some(feature) = BowlingFeature::from_name(&name) {
                let set = bowling.get_mut(&feature).expect("all features present");
                for phrase in phrases {
                    validate_phrase(&name, &phrase)?;
                    set.insert(phrase);
                }
            } else {
                return Err(LexiconError::UnknownFeature(name));
            }
        }

        let mut batting_lookup = HashMap::new();
        for (&feature, phrases) in &batting {
            for phrase in phrases {
                if let Some(prev) = batting_lookup.insert(phrase.clone(), feature) {
                    if prev != feature {
                        return Err(LexiconError::DuplicatePhrase {
                            phrase: phrase.clone(),
                            first: prev.name().to_string(),
                            second: feature.name().to_string(),
                        });
                    }
                }
            }
        }
        let mut bowling_lookup = HashMap::new();
        for (&feature, phrases) in &bowling {
            for phrase in phrases {
                if let Some(prev) = bowling_lookup.insert(phrase.clone(), feature) {
                    if prev != feature {
                        return Err(LexiconError::DuplicatePhrase {
                            phrase: phrase.clone(),
                            first: prev.name().to_string(),
                            second: feature.name().to_string(),
                        });
                    }
                }
            }
        }

        Ok(Self {
            batting_phrases: batting,
            bowling_phrases: bowling,
            batting_lookup,
            bowling_lookup,
        })
    }

    /// The lexicon bundled with the toolkit.
    pub fn bundled() -> Self {
        Self::from_json(DEFAULT_LEXICON_JSON).expect("bundled lexicon is valid")
    }

    pub fn to_json(&self) -> String {
        let mut map = BTreeMap::new();
        for (&feature, phrases) in &self.batting_phrases {
            map.insert(
                feature.name().to_string(),
                phrases.iter().cloned().collect::<Vec<_>>(),
            );
        }
        for (&feature, phrases) in &self.bowling_phrases {
            map.insert(
                feature.name().to_string(),
                phrases.iter().cloned().collect::<Vec<_>>(),
            );
        }
        serde_json::to_string_pretty(&LexiconFile(map)).expect("lexicon serializes")
    }

    pub fn batting_phrases(&self, feature: BattingFeature) -> &BTreeSet<String> {
        &self.batting_phrases[&feature]
    }

    pub fn bowling_phrases(&self, feature: BowlingFeature) -> &BTreeSet<String> {
        &self.bowling_phrases[&feature]
    }

    /// Features whose phrase sets intersect `ngrams`, for both roles.
    pub fn match_features(
        &self,
        ngrams: &[String],
    ) -> (HashSet<BattingFeature>, HashSet<BowlingFeature>) {
        let mut batting = HashSet::new();
        let mut bowling = HashSet::new();
        for gram in ngrams {
            if let Some(&f) = self.batting_lookup.get(gram.as_str()) {
                batting.insert(f);
            }
            if let Some(&f) = self.bowling_lookup.get(gram.as_str()) {
                bowling.insert(f);
            }
        }
        (batting, bowling)
    }

    /// Tokenize, expand n-grams, and match in one step.
    pub fn match_text(&self, text: &str) -> (HashSet<BattingFeature>, HashSet<BowlingFeature>) {
        self.match_features(&extract_ngrams(&tokenize(text)))
    }
}

fn validate_phrase(feature: &str, phrase: &str) -> Result<(), LexiconError> {
    let tokens = tokenize(phrase);
    if tokens.is_empty() || tokens.len() > 2 {
        return Err(LexiconError::InvalidPhrase {
            feature: feature.to_string(),
            phrase: phrase.to_string(),
            reason: format!("must be 1 or 2 tokens, found {}", tokens.len()),
        });
    }
    if tokens.join(" ") != phrase {
        return Err(LexiconError::InvalidPhrase {
            feature: feature.to_string(),
            phrase: phrase.to_string(),
            reason: "must be lowercase tokens separated by single spaces, no punctuation"
                .to_string(),
        });
    }
    Ok(())
}

/// Map the structured outcome token to its batting feature.
///
/// Accepts the word forms ("no run", "FOUR", "SIX", "OUT") and the numeric
/// forms ("1 run", "4 runs"); anything above six runs folds into `run6plus`.
pub fn parse_outcome(outcome_token: &str) -> Result<BattingFeature, LexiconError> {
    let normalized = outcome_token.trim().to_ascii_lowercase();
    match normalized.as_str() {
        "no run" | "no runs" => return Ok(BattingFeature::Run0),
        "four" => return Ok(BattingFeature::Run4),
        "six" => return Ok(BattingFeature::Run6Plus),
        "out" | "wicket" | "w" => return Ok(BattingFeature::Out),
        _ => {}
    }
    if let Some(head) = normalized
        .strip_suffix(" runs")
        .or_else(|| normalized.strip_suffix(" run"))
    {
        if let Ok(runs) = head.trim().parse::<u32>() {
            return Ok(match runs {
                0 => BattingFeature::Run0,
                1 => BattingFeature::Run1,
                2 => BattingFeature::Run2,
                3 => BattingFeature::Run3,
                4 => BattingFeature::Run4,
                5 => BattingFeature::Run5,
                _ => BattingFeature::Run6Plus,
            });
        }
    }
    Err(LexiconError::UnknownOutcome(outcome_token.to_string()))
}
