//! Strength, weakness, and aspect rule extraction.
//!
//! A rule pairs one batting feature with one bowling feature. Strength and
//! weakness rules anchor at the attacked and beaten responses; the anchors
//! swap for bowlers, whose strength is the opponents' imperfection. Bowling
//! features are ranked by the inner product of the anchor's row principal
//! coordinates with each column's principal coordinates over the first
//! `dims` dimensions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca::CaResult;
use crate::lexicon::{BattingFeature, BowlingFeature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("batting feature `{0}` was dropped from the analysis (zero margin)")]
    FeatureUnavailable(BattingFeature),
    #[error("requested {requested} dimensions but only {available} were retained")]
    InvalidDims { requested: usize, available: usize },
}

/// Which side of the game a set of rules describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerRole {
    Batsman,
    Bowler,
}

/// Batting-feature groups for the aspect rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Outcome,
    Shotarea,
    Footwork,
}

impl Aspect {
    pub fn features(self) -> &'static [BattingFeature] {
        match self {
            Aspect::Outcome => &[
                BattingFeature::Run0,
                BattingFeature::Run1,
                BattingFeature::Run2,
                BattingFeature::Run3,
                BattingFeature::Run4,
                BattingFeature::Run5,
                BattingFeature::Run6Plus,
                BattingFeature::Out,
            ],
            Aspect::Shotarea => &[
                BattingFeature::ThirdMan,
                BattingFeature::SquareOff,
                BattingFeature::LongOff,
                BattingFeature::LongOn,
                BattingFeature::SquareLeg,
                BattingFeature::FineLeg,
            ],
            Aspect::Footwork => &[BattingFeature::FrontFoot, BattingFeature::BackFoot],
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "outcome" => Some(Aspect::Outcome),
            "shotarea" => Some(Aspect::Shotarea),
            "footwork" => Some(Aspect::Footwork),
            _ => None,
        }
    }
}

/// What a rule expresses: a strength, a weakness, or an aspect pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Strength,
    Weakness,
    Outcome,
    Shotarea,
    Footwork,
}

impl From<Aspect> for RuleKind {
    fn from(aspect: Aspect) -> Self {
        match aspect {
            Aspect::Outcome => RuleKind::Outcome,
            Aspect::Shotarea => RuleKind::Shotarea,
            Aspect::Footwork => RuleKind::Footwork,
        }
    }
}

/// One dependent (batting feature, bowling feature) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub player: String,
    pub polarity: RuleKind,
    pub role: PlayerRole,
    pub batting_feature: BattingFeature,
    pub bowling_feature: BowlingFeature,
    pub score: f64,
    /// 1-based rank by descending score within (player, polarity, anchor).
    pub rank: usize,
    pub dims_used: usize,
}

impl Rule {
    /// Prose rendering, e.g. "Smith attacks good length deliveries".
    pub fn to_text(&self) -> String {
        let delivery = self.bowling_feature.gloss();
        match (self.role, self.polarity) {
            (PlayerRole::Batsman, RuleKind::Strength) => {
                format!("{} attacks {}", self.player, delivery)
            }
            (PlayerRole::Batsman, RuleKind::Weakness) => {
                format!("{} gets beaten on {}", self.player, delivery)
            }
            (PlayerRole::Bowler, RuleKind::Strength) => {
                format!("{} beats batsmen with {}", self.player, delivery)
            }
            (PlayerRole::Bowler, RuleKind::Weakness) => {
                format!("{} gets attacked on {}", self.player, delivery)
            }
            _ => format!(
                "{} {} on {}",
                self.player,
                self.batting_feature.gloss(),
                delivery
            ),
        }
    }
}

/// The anchor batting feature for a polarity/role combination.
pub fn anchor_feature(role: PlayerRole, strength: bool) -> BattingFeature {
    match (role, strength) {
        (PlayerRole::Batsman, true) | (PlayerRole::Bowler, false) => BattingFeature::Attacked,
        (PlayerRole::Batsman, false) | (PlayerRole::Bowler, true) => BattingFeature::Beaten,
    }
}

/// Inner products of the anchor row with every surviving bowling column over
/// the first `dims` dimensions, sorted descending; ties break in bowling
/// enumeration order.
pub fn score_bowling_features(
    ca: &CaResult,
    batting_feature: BattingFeature,
    dims: usize,
) -> Result<Vec<(BowlingFeature, f64)>, RuleError> {
    let row = ca
        .row_position(batting_feature.index())
        .ok_or(RuleError::FeatureUnavailable(batting_feature))?;
    if dims == 0 || dims > ca.k() {
        return Err(RuleError::InvalidDims {
            requested: dims,
            available: ca.k(),
        });
    }
    let mut scores: Vec<(BowlingFeature, f64)> = ca
        .surviving_cols
        .iter()
        .enumerate()
        .map(|(pos, &original)| {
            let feature = BowlingFeature::from_index(original).expect("valid column index");
            let score: f64 = (0..dims)
                .map(|k| ca.row_principal[(row, k)] * ca.col_principal[(pos, k)])
                .sum();
            (feature, score)
        })
        .collect();
    scores.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then(a.0.index().cmp(&b.0.index()))
    });
    Ok(scores)
}

fn wrap_rules(
    player: &str,
    polarity: RuleKind,
    role: PlayerRole,
    anchor: BattingFeature,
    scored: Vec<(BowlingFeature, f64)>,
    k: usize,
    dims: usize,
) -> Vec<Rule> {
    scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(idx, (bowling, score))| Rule {
            player: player.to_string(),
            polarity,
            role,
            batting_feature: anchor,
            bowling_feature: bowling,
            score,
            rank: idx + 1,
            dims_used: dims,
        })
        .collect()
}

/// Top-k strength rules for a player.
pub fn strength_rules(
    ca: &CaResult,
    player: &str,
    role: PlayerRole,
    k: usize,
    dims: usize,
) -> Result<Vec<Rule>, RuleError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let anchor = anchor_feature(role, true);
    let scored = score_bowling_features(ca, anchor, dims)?;
    Ok(wrap_rules(
        player,
        RuleKind::Strength,
        role,
        anchor,
        scored,
        k,
        dims,
    ))
}

/// Top-k weakness rules for a player; anchors mirror [`strength_rules`].
pub fn weakness_rules(
    ca: &CaResult,
    player: &str,
    role: PlayerRole,
    k: usize,
    dims: usize,
) -> Result<Vec<Rule>, RuleError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let anchor = anchor_feature(role, false);
    let scored = score_bowling_features(ca, anchor, dims)?;
    Ok(wrap_rules(
        player,
        RuleKind::Weakness,
        role,
        anchor,
        scored,
        k,
        dims,
    ))
}

/// Top-k bowling pairings for every surviving feature of an aspect group.
///
/// Fails only when the whole group was dropped; individually dropped
/// features are skipped.
pub fn aspect_rules(
    ca: &CaResult,
    player: &str,
    aspect: Aspect,
    k: usize,
    dims: usize,
) -> Result<Vec<Rule>, RuleError> {
    let mut rules = Vec::new();
    let mut any_available = false;
    for &feature in aspect.features() {
        match score_bowling_features(ca, feature, dims) {
            Ok(scored) => {
                any_available = true;
                rules.extend(wrap_rules(
                    player,
                    aspect.into(),
                    PlayerRole::Batsman,
                    feature,
                    scored,
                    k,
                    dims,
                ));
            }
            Err(RuleError::FeatureUnavailable(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    if !any_available {
        return Err(RuleError::FeatureUnavailable(aspect.features()[0]));
    }
    Ok(rules)
}

/// Maximum number of rules the analysis can produce: surviving rows times
/// surviving columns (228 when nothing is dropped).
pub fn rule_budget(ca: &CaResult) -> usize {
    ca.surviving_rows.len() * ca.surviving_cols.len()
}
