//! Privacy-notion games over the ideal functionality: scenario validity,
//! corruption options, adversary classes and the challenger loop.
//!
//! A scenario is a list of alternative batches. For plain notions each
//! scenario has one batch. For the observability notions and the
//! twice-unlinkability notions the challenger picks one of the listed
//! alternatives uniformly at random.

mod engine;
mod strategies;
#[cfg(test)]
mod tests;
mod validity;

pub use engine::{
    mo_trace_equality, replace_paths, run_notion_game, AdversaryClass, NotionError, NotionGame, NotionReport,
};
pub use strategies::{
    sfl_bound, standard_attack, AttackSetup, CountingStrategy, EndpointStrategy, FirstHopStrategy, RandomGuess,
    Strategy, StrategyRun, TraceStrategy,
};
pub use validity::validate;

use crate::ideal::Party;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// One communication `(u, u′, m, aux)`; `aux` is the path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Communication {
    pub sender: Party,
    pub receiver: Party,
    pub message: Vec<u8>,
    pub path: Vec<Party>,
}

impl Communication {
    pub fn new(sender: &str, receiver: &str, message: &[u8], path: &[&str]) -> Self {
        Communication {
            sender: sender.into(),
            receiver: receiver.into(),
            message: message.to_vec(),
            path: path.iter().map(|p| p.to_string()).collect(),
        }
    }
}

pub type Batch = Vec<Communication>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub alternatives: Vec<Batch>,
}

impl Scenario {
    pub fn single(batch: Batch) -> Self {
        Scenario { alternatives: vec![batch] }
    }

    pub fn choice(alternatives: Vec<Batch>) -> Self {
        Scenario { alternatives }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioPair {
    pub scenarios: [Scenario; 2],
}

impl ScenarioPair {
    pub fn new(s0: Scenario, s1: Scenario) -> Self {
        ScenarioPair { scenarios: [s0, s1] }
    }

    pub fn batches(&self) -> impl Iterator<Item = &Batch> {
        self.scenarios.iter().flat_map(|s| s.alternatives.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Notion {
    /// Message unobservability.
    Mo,
    /// Message unobservability leaking message length.
    MoLen,
    /// Sender-message unlinkability.
    Sml,
    /// Receiver-message unlinkability.
    Rml,
    /// Sender-receiver unlinkability.
    Srl,
    /// Pair sender-message unlinkability.
    SmlPair,
    /// Pair receiver-message unlinkability.
    RmlPair,
    /// Sender-receiver unobservability.
    Sro,
    /// Sender-message unobservability.
    Smo,
    /// Receiver-message unobservability.
    Rmo,
    /// Twice sender unlinkability.
    TwoSl,
    /// Twice receiver unlinkability.
    TwoRl,
    /// Sender frequency unlinkability with equal message partitions.
    SflP,
    /// Receiver frequency unlinkability with equal message partitions.
    RflP,
}

impl Notion {
    pub const ALL: [Notion; 14] = [
        Notion::Mo,
        Notion::MoLen,
        Notion::Sml,
        Notion::Rml,
        Notion::Srl,
        Notion::SmlPair,
        Notion::RmlPair,
        Notion::Sro,
        Notion::Smo,
        Notion::Rmo,
        Notion::TwoSl,
        Notion::TwoRl,
        Notion::SflP,
        Notion::RflP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Mo => "MO",
            Notion::MoLen => "MO-|M|",
            Notion::Sml => "SML",
            Notion::Rml => "RML",
            Notion::Srl => "SRL",
            Notion::SmlPair => "(SM)L",
            Notion::RmlPair => "(RM)L",
            Notion::Sro => "(SR)O",
            Notion::Smo => "(SM)O",
            Notion::Rmo => "(RM)O",
            Notion::TwoSl => "(2S)L",
            Notion::TwoRl => "(2R)L",
            Notion::SflP => "SFL-P",
            Notion::RflP => "RFL-P'",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_uppercase();
        let alias = match norm.as_str() {
            "MO-LEN" | "MOLEN" => Some(Notion::MoLen),
            "SML-PAIR" | "SMLPAIR" => Some(Notion::SmlPair),
            "RML-PAIR" | "RMLPAIR" => Some(Notion::RmlPair),
            "SRO" => Some(Notion::Sro),
            "SMO" => Some(Notion::Smo),
            "RMO" => Some(Notion::Rmo),
            "2SL" | "TWOSL" => Some(Notion::TwoSl),
            "2RL" | "TWORL" => Some(Notion::TwoRl),
            "SFLP" => Some(Notion::SflP),
            "RFLP" | "RFL-P" => Some(Notion::RflP),
            _ => None,
        };
        alias
            .or_else(|| Notion::ALL.into_iter().find(|n| n.name().to_ascii_uppercase() == norm))
            .ok_or_else(|| format!("unknown notion `{s}`"))
    }
}

/// User-corruption option.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corruption {
    /// No user in either scenario is corrupt.
    None,
    /// No sender in either scenario is corrupt; receivers may be.
    NoCorruptSender,
    /// Corrupt users see identical behaviour in both scenarios.
    Standard,
}

impl Corruption {
    pub fn name(self) -> &'static str {
        match self {
            Corruption::None => "c0",
            Corruption::NoCorruptSender => "cS",
            Corruption::Standard => "standard",
        }
    }
}

impl FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c0" | "none" => Ok(Corruption::None),
            "cs" | "no-corrupt-sender" => Ok(Corruption::NoCorruptSender),
            "standard" => Ok(Corruption::Standard),
            _ => Err(format!("unknown corruption option `{s}`")),
        }
    }
}

/// The parties of a notion game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub users: Vec<Party>,
    pub relays: Vec<Party>,
    pub corrupted: BTreeSet<Party>,
    /// Maximum number of relays on a path.
    pub max_path: usize,
}

impl ScenarioConfig {
    pub fn honest_relays(&self) -> Vec<&Party> {
        self.relays.iter().filter(|r| !self.corrupted.contains(*r)).collect()
    }
}
