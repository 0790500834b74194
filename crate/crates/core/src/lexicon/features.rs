//! Batting and bowling feature enumerations.
//!
//! The row and column spaces of every confrontation matrix are fixed: 19
//! batting features (8 delivery outcomes, 3 responses, 2 footwork, 6 shot
//! regions) against 12 bowling features (length, line, type, speed,
//! movement). Enumeration order is part of the file-format contract; CSV and
//! JSON exports list features in this order.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Which side of a confrontation a player is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Batting,
    Bowling,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Batting => "batting",
            Role::Bowling => "bowling",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! feature_enum {
    ($(#[$doc:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const COUNT: usize = Self::ALL.len();

            /// Position in the canonical enumeration order.
            pub fn index(self) -> usize {
                self as usize
            }

            pub fn from_index(index: usize) -> Option<Self> {
                Self::ALL.get(index).copied()
            }

            /// Canonical name used in lexicon files and exports.
            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn from_name(name: &str) -> Option<Self> {
                match name {
                    $($text => Some($name::$variant)),+,
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(deserializer)?;
                Self::from_name(&raw).ok_or_else(|| {
                    D::Error::custom(format!(
                        "unknown {} feature `{raw}`",
                        stringify!($name)
                    ))
                })
            }
        }
    };
}

feature_enum! {
    /// The 19 batting features. `Run0..Out` are delivery outcomes taken from
    /// the structured commentary head; the rest are matched from text.
    BattingFeature {
        Run0 => "run0",
        Run1 => "run1",
        Run2 => "run2",
        Run3 => "run3",
        Run4 => "run4",
        Run5 => "run5",
        Run6Plus => "run6plus",
        Out => "out",
        Beaten => "beaten",
        Defended => "defended",
        Attacked => "attacked",
        FrontFoot => "front_foot",
        BackFoot => "back_foot",
        ThirdMan => "third_man",
        SquareOff => "square_off",
        LongOff => "long_off",
        LongOn => "long_on",
        SquareLeg => "square_leg",
        FineLeg => "fine_leg",
    }
}

feature_enum! {
    /// The 12 bowling features: length, line, type, speed, and movement.
    BowlingFeature {
        Short => "short",
        Good => "good",
        Full => "full",
        OffLine => "off_line",
        MiddleLine => "middle_line",
        LegLine => "leg_line",
        Spin => "spin",
        Swing => "swing",
        Fast => "fast",
        Slow => "slow",
        MoveIn => "move_in",
        MoveAway => "move_away",
    }
}

impl BattingFeature {
    /// Outcome features come from the structured head, never from text, so
    /// their lexicon phrase sets must be empty.
    pub fn is_outcome(self) -> bool {
        self.index() < 8
    }

    /// Human-readable phrase used when rendering rules as prose.
    pub fn gloss(self) -> &'static str {
        match self {
            BattingFeature::Run0 => "scores no run",
            BattingFeature::Run1 => "scores a single",
            BattingFeature::Run2 => "scores two runs",
            BattingFeature::Run3 => "scores three runs",
            BattingFeature::Run4 => "hits a boundary",
            BattingFeature::Run5 => "scores five runs",
            BattingFeature::Run6Plus => "hits a six",
            BattingFeature::Out => "gets out",
            BattingFeature::Beaten => "gets beaten",
            BattingFeature::Defended => "defends",
            BattingFeature::Attacked => "attacks",
            BattingFeature::FrontFoot => "plays on the front foot",
            BattingFeature::BackFoot => "plays on the back foot",
            BattingFeature::ThirdMan => "plays to third man",
            BattingFeature::SquareOff => "plays square on the off side",
            BattingFeature::LongOff => "plays to long off",
            BattingFeature::LongOn => "plays to long on",
            BattingFeature::SquareLeg => "plays to square leg",
            BattingFeature::FineLeg => "plays to fine leg",
        }
    }
}

impl BowlingFeature {
    /// Human-readable delivery description used when rendering rules.
    pub fn gloss(self) -> &'static str {
        match self {
            BowlingFeature::Short => "short length deliveries",
            BowlingFeature::Good => "good length deliveries",
            BowlingFeature::Full => "full length deliveries",
            BowlingFeature::OffLine => "deliveries on or outside off stump",
            BowlingFeature::MiddleLine => "deliveries on middle stump",
            BowlingFeature::LegLine => "deliveries on or outside leg stump",
            BowlingFeature::Spin => "spin deliveries",
            BowlingFeature::Swing => "swinging deliveries",
            BowlingFeature::Fast => "fast deliveries",
            BowlingFeature::Slow => "slow deliveries",
            BowlingFeature::MoveIn => "deliveries moving in",
            BowlingFeature::MoveAway => "deliveries moving away",
        }
    }
}

/// A feature on either side, tagged with its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", content = "name", rename_all = "lowercase")]
pub enum FeatureId {
    Batting(BattingFeature),
    Bowling(BowlingFeature),
}

impl FeatureId {
    pub fn role(self) -> Role {
        match self {
            FeatureId::Batting(_) => Role::Batting,
            FeatureId::Bowling(_) => Role::Bowling,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::Batting(f) => f.name(),
            FeatureId::Bowling(f) => f.name(),
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.role(), self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes_are_fixed() {
        assert_eq!(BattingFeature::COUNT, 19);
        assert_eq!(BowlingFeature::COUNT, 12);
    }

    #[test]
    fn names_round_trip() {
        for &f in BattingFeature::ALL {
            assert_eq!(BattingFeature::from_name(f.name()), Some(f));
        }
        for &f in BowlingFeature::ALL {
            assert_eq!(BowlingFeature::from_name(f.name()), Some(f));
        }
    }

    #[test]
    fn names_are_unique() {
        let mut seen = std::collections::HashSet::new();
        for &f in BattingFeature::ALL {
            assert!(seen.insert(f.name()));
        }
        let mut seen = std::collections::HashSet::new();
        for &f in BowlingFeature::ALL {
            assert!(seen.insert(f.name()));
        }
    }

    #[test]
    fn outcome_features_are_the_first_eight() {
        let outcomes: Vec<_> = BattingFeature::ALL
            .iter()
            .filter(|f| f.is_outcome())
            .collect();
        assert_eq!(outcomes.len(), 8);
        assert_eq!(*outcomes[0], BattingFeature::Run0);
        assert_eq!(*outcomes[7], BattingFeature::Out);
    }

    #[test]
    fn serde_uses_canonical_names() {
        let json = serde_json::to_string(&BattingFeature::Run6Plus).unwrap();
        assert_eq!(json, "\"run6plus\"");
        let back: BattingFeature = serde_json::from_str("\"front_foot\"").unwrap();
        assert_eq!(back, BattingFeature::FrontFoot);
        assert!(serde_json::from_str::<BowlingFeature>("\"banana\"").is_err());
    }
}
