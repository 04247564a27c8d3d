//! Challengers for the scheme-level security games: original
//! Onion-Security, Layer-Unlinkability (plain and duplicate-aware),
//! Tail-Indistinguishability, the modification variant of Onion-Security,
//! Wrap-Resistance and Onion-Integrity.
//!
//! Every trial builds a fresh router set. One router is honest and its
//! secret key stays with the challenger; the adversary receives the key
//! pairs of all other routers.

mod challenger;
mod distinguishers;
mod integrity;
#[cfg(test)]
mod tests;
mod wrap;

pub use challenger::{run_game, run_trial, GameReport};
pub use distinguishers::{
    distinguisher_suite, ComponentEquality, Distinguisher, IdScan, LengthCheck, NullGuess, PathLengthProbe,
    PathReader, RandomBit, TagAndQuery,
};
pub use integrity::{integrity_scheme, run_integrity_check, CraftedOnion, IntegrityReport};
pub use wrap::{run_wr, Forgery, IdentityCopy, RandomForgery, ReplayPrevious, WrAdversary, WrReport};

use crate::primitives::SuiteParams;
use crate::rng::LabRng;
use crate::scheme::{Directory, NodeState, Onion, OnionScheme, ProcOutput, SchemeError};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameId {
    /// Original Onion-Security.
    Os,
    /// Layer-Unlinkability; oracle excludes the two challenge layers.
    Lu,
    /// Layer-Unlinkability; oracle excludes duplicates of them.
    LuDup,
    /// Tail-Indistinguishability.
    Ti,
    /// Onion-Security under a duplicate-preserving modification.
    OsMod,
}

impl GameId {
    pub const ALL: [GameId; 5] = [GameId::Os, GameId::Lu, GameId::LuDup, GameId::Ti, GameId::OsMod];

    pub fn name(self) -> &'static str {
        match self {
            GameId::Os => "OS",
            GameId::Lu => "LU",
            GameId::LuDup => "LU-dup",
            GameId::Ti => "TI",
            GameId::OsMod => "OS-mod",
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "os" => Ok(GameId::Os),
            "lu" => Ok(GameId::Lu),
            "lu-dup" | "ludup" => Ok(GameId::LuDup),
            "ti" => Ok(GameId::Ti),
            "os-mod" | "osmod" => Ok(GameId::OsMod),
            _ => Err(format!("unknown game `{s}`")),
        }
    }
}

/// Which oracle inputs the challenger refuses after the challenge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OraclePolicy {
    Unrestricted,
    /// Refuse onions bit-identical to an excluded one.
    ExcludeExact,
    /// Refuse onions the scheme considers duplicates of an excluded one.
    ExcludeDuplicates,
}

impl GameId {
    /// Oracle policy after the challenge.
    pub fn oracle_policy(self) -> OraclePolicy {
        match self {
            GameId::Os | GameId::Lu => OraclePolicy::ExcludeExact,
            GameId::LuDup | GameId::OsMod => OraclePolicy::ExcludeDuplicates,
            GameId::Ti => OraclePolicy::Unrestricted,
        }
    }
}

/// Run configuration of a game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub game: GameId,
    pub scheme: String,
    pub params: SuiteParams,
    /// Number of routers, one of which is honest.
    pub routers: usize,
    pub trials: u64,
    pub seed: u64,
}

impl GameSpec {
    pub fn new(game: GameId, scheme: &str, trials: u64, seed: u64) -> Self {
        GameSpec { game, scheme: scheme.to_string(), params: SuiteParams::lab(), routers: 8, trials, seed }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid adversary input: {0}")]
    InvalidAdversaryInput(String),
    #[error("modification must return a different onion that is a duplicate of its input")]
    InvalidModificationFn,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Duplicate-preserving modifications the adversary may submit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modification {
    /// Invert the last `bytes` bytes of the payload.
    FlipPayloadTail { bytes: usize },
    /// Invert one byte at an absolute offset.
    FlipByte { offset: usize },
}

impl Modification {
    pub fn apply(&self, scheme: &dyn OnionScheme, onion: &Onion) -> Onion {
        let mut v = onion.0.clone();
        match *self {
            Modification::FlipPayloadTail { bytes } => {
                if let Some(r) = scheme.payload_range() {
                    let end = r.end.min(v.len());
                    let from = end.saturating_sub(bytes).max(r.start);
                    for b in v.iter_mut().take(end).skip(from) {
                        *b ^= 0xff;
                    }
                }
            }
            Modification::FlipByte { offset } => {
                if let Some(b) = v.get_mut(offset) {
                    *b ^= 0xff;
                }
            }
        }
        Onion(v)
    }
}

/// The adversary's challenge input: message, path `(P_1, …, P_{n+1})`,
/// 1-based honest position `j` and, for the modification game, `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeInput {
    pub message: Vec<u8>,
    pub path: Vec<String>,
    pub j: usize,
    pub modification: Option<Modification>,
}

/// Oracle reply. Failures are reported as a bare ⊥.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    Relay { next: String, onion: Onion },
    Receive { message: Vec<u8> },
    Bottom,
    Refused,
}

impl From<ProcOutput> for OracleAnswer {
    fn from(p: ProcOutput) -> Self {
        match p {
            ProcOutput::Relay { next, onion } => OracleAnswer::Relay { next, onion },
            ProcOutput::Receive { message } => OracleAnswer::Receive { message },
            ProcOutput::Fail(_) => OracleAnswer::Bottom,
        }
    }
}

/// What the challenger hands to the adversary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChallengeView {
    /// A first layer.
    First { onion: Onion },
    /// A first layer and the honest router's processing of a layer.
    Linked { onion: Onion, processed: OracleAnswer },
    /// A layer after the honest router and the router it goes to.
    Tail { onion: Onion, next: String },
}

/// Stateless processing at the honest router, with exclusions.
pub struct Oracle<'a> {
    scheme: &'a dyn OnionScheme,
    node: &'a NodeState,
    policy: OraclePolicy,
    excluded: Vec<Onion>,
    pub log: Vec<(Onion, OracleAnswer)>,
}

impl<'a> Oracle<'a> {
    pub fn new(scheme: &'a dyn OnionScheme, node: &'a NodeState) -> Self {
        Oracle { scheme, node, policy: OraclePolicy::Unrestricted, excluded: Vec::new(), log: Vec::new() }
    }

    pub fn restrict(&mut self, policy: OraclePolicy, excluded: Vec<Onion>) {
        self.policy = policy;
        self.excluded = excluded;
    }

    fn refuses(&self, onion: &Onion) -> bool {
        match self.policy {
            OraclePolicy::Unrestricted => false,
            OraclePolicy::ExcludeExact => self.excluded.iter().any(|e| e == onion),
            OraclePolicy::ExcludeDuplicates => {
                self.excluded.iter().any(|e| e == onion || self.scheme.is_duplicate(e, onion))
            }
        }
    }

    pub fn query(&mut self, onion: &Onion) -> OracleAnswer {
        let answer = if self.refuses(onion) {
            OracleAnswer::Refused
        } else {
            let mut node = self.node.clone();
            self.scheme.proc_onion(&mut node, onion).into()
        };
        self.log.push((onion.clone(), answer.clone()));
        answer
    }
}

/// Everything the adversary knows: the scheme, the directory, the honest
/// router's name and the full state of every other router.
pub struct AdversaryContext<'a> {
    pub game: GameId,
    pub scheme: &'a dyn OnionScheme,
    pub dir: &'a Directory,
    pub honest: &'a str,
    pub corrupt: &'a BTreeMap<String, NodeState>,
}

impl AdversaryContext<'_> {
    /// Process at a corrupt router without touching its stored state.
    pub fn process_at(&self, at: &str, onion: &Onion) -> Option<ProcOutput> {
        let mut node = self.corrupt.get(at)?.clone();
        Some(self.scheme.proc_onion(&mut node, onion))
    }

    /// Follow an onion through corrupt routers for at most `steps` hops.
    /// Returns the routers visited and the last onion with its holder.
    pub fn walk(&self, first: &str, onion: &Onion, steps: usize) -> Walk {
        let mut visited = Vec::new();
        let (mut at, mut cur) = (first.to_string(), onion.clone());
        for _ in 0..steps {
            visited.push(at.clone());
            match self.process_at(&at, &cur) {
                Some(ProcOutput::Relay { next, onion }) => {
                    at = next;
                    cur = onion;
                }
                Some(end) => return Walk { visited, at, onion: cur, end: Some(end) },
                None => return Walk { visited, at, onion: cur, end: None },
            }
        }
        Walk { visited, at, onion: cur, end: None }
    }

    /// A path of `len` routers with the honest router at 1-based position
    /// `j` and corrupt routers elsewhere.
    pub fn path_around(&self, len: usize, j: usize, rng: &mut LabRng) -> Vec<String> {
        let others: Vec<&String> = self.corrupt.keys().collect();
        (1..=len)
            .map(|i| if i == j { self.honest.to_string() } else { (*others.choose(rng).expect("corrupt routers")).clone() })
            .collect()
    }
}

/// Result of [`AdversaryContext::walk`].
#[derive(Clone, Debug)]
pub struct Walk {
    pub visited: Vec<String>,
    /// Router holding `onion` when the walk stopped.
    pub at: String,
    pub onion: Onion,
    /// Final non-relay outcome, if the walk ended at a corrupt router.
    pub end: Option<ProcOutput>,
}

/// One trial: bit, adversary input, view, oracle log, guess and the
/// challenger-side values the adversary never sees.
#[derive(Clone, Debug)]
pub struct GameTranscript {
    pub game: GameId,
    pub b: usize,
    pub input: ChallengeInput,
    pub view: ChallengeView,
    pub oracle_log: Vec<(Onion, OracleAnswer)>,
    pub guess: usize,
    /// Layers of the onion formed from the adversary's input.
    pub layers: Vec<Onion>,
    /// Layers of the replacement onion, its path, message and offset `k`.
    pub alt_layers: Vec<Onion>,
    pub alt_path: Vec<String>,
    pub alt_message: Vec<u8>,
    pub k: usize,
}
