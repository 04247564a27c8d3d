use super::{validate, Batch, Corruption, Notion, ScenarioConfig, ScenarioPair, Strategy};
use crate::ideal::{canonical_trace, AdvMessage, IdealError, IdealFunctionality, Party, Temp};
use crate::rng::{derive, LabRng};
use crate::stats::Estimate;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdversaryClass {
    /// Adversary-chosen paths and full control over delivery.
    Identity,
    /// Paths of honest senders are replaced by random paths through a
    /// common honest relay.
    PathReplacement,
    /// Path replacement, no delay or replay, and shuffled outputs.
    Restricted,
}

impl AdversaryClass {
    pub fn name(self) -> &'static str {
        match self {
            AdversaryClass::Identity => "identity",
            AdversaryClass::PathReplacement => "C_P",
            AdversaryClass::Restricted => "C",
        }
    }
}

impl FromStr for AdversaryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(AdversaryClass::Identity),
            "c_p" | "cp" | "path-replacement" => Ok(AdversaryClass::PathReplacement),
            "c" | "restricted" => Ok(AdversaryClass::Restricted),
            _ => Err(format!("unknown adversary class `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotionError {
    #[error("scenario pair is not valid for {notion} under {corruption}")]
    InvalidPair { notion: &'static str, corruption: &'static str },
    #[error("relay pool has no honest relay")]
    NoHonestRelayAvailable,
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotionGame {
    pub notion: Notion,
    pub corruption: Corruption,
    pub class: AdversaryClass,
    pub config: ScenarioConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct NotionReport {
    pub notion: String,
    pub corruption: String,
    pub class: String,
    pub strategy: String,
    pub trials: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub advantage: f64,
    /// 95% Wilson interval on the win rate.
    pub wilson95: (f64, f64),
    /// One standard deviation of the win rate for a guessing adversary.
    pub sigma: f64,
}

const MAX_ROUNDS: usize = 256;

/// Replace the path of every honest-sender communication by a random path
/// through one common honest relay `H`. Relays before `H` number at most
/// `a` and after it at most `N - 1 - a`, for one `a` drawn per batch, so any
/// prefix joined with any suffix is again a valid path.
pub fn replace_paths(batch: &mut Batch, cfg: &ScenarioConfig, rng: &mut LabRng) -> Result<(), NotionError> {
    let honest = cfg.honest_relays();
    if honest.is_empty() || cfg.max_path == 0 {
        return Err(NotionError::NoHonestRelayAvailable);
    }
    let h = (*honest.choose(rng).expect("non-empty")).clone();
    let a = rng.gen_range(0..cfg.max_path);
    for c in batch.iter_mut().filter(|c| !cfg.corrupted.contains(&c.sender)) {
        let pool: Vec<&Party> = cfg.relays.iter().filter(|r| **r != c.sender).collect();
        let draw = |count: usize, rng: &mut LabRng| -> Vec<Party> {
            (0..count).filter_map(|_| pool.choose(rng).map(|p| (*p).clone())).collect()
        };
        let pre = rng.gen_range(0..=a);
        let post = rng.gen_range(0..=cfg.max_path - 1 - a);
        let mut path = draw(pre, rng);
        path.push(h.clone());
        path.extend(draw(post, rng));
        c.path = path;
    }
    Ok(())
}

/// Run one challenge. Returns the adversary's guess and the challenge bit.
fn run_trial(game: &NotionGame, pair: &ScenarioPair, strategy: &dyn Strategy, rng: &mut LabRng) -> Result<(usize, usize), NotionError> {
    let b = rng.gen_range(0..2);
    let mut batch = pair.scenarios[b].alternatives.choose(rng).expect("validated non-empty").clone();
    batch.shuffle(rng);
    if game.class != AdversaryClass::Identity {
        replace_paths(&mut batch, &game.config, rng)?;
    }
    let mut f = IdealFunctionality::new(game.config.corrupted.clone(), game.config.max_path);
    for c in &batch {
        f.process_new_onion(&c.sender, &c.receiver, Some(c.message.clone()), c.path.clone(), rng)?;
    }
    f.run_environment(rng);
    let mut run = strategy.start();
    if game.class == AdversaryClass::Restricted {
        let mut all = deliver_everything(&mut f, rng);
        all.shuffle(rng);
        run.observe(&all);
    } else {
        let mut out = f.drain_adversary();
        for _ in 0..MAX_ROUNDS {
            let requests = run.observe(&out);
            if requests.is_empty() {
                break;
            }
            for t in requests {
                f.deliver_message(t, rng);
            }
            f.run_environment(rng);
            out = f.drain_adversary();
        }
    }
    Ok((run.guess(rng), b))
}

/// Deliver every segment once, letting honest relays forward at once, and
/// collect all adversary outputs.
fn deliver_everything(f: &mut IdealFunctionality, rng: &mut LabRng) -> Vec<AdvMessage> {
    let mut all = Vec::new();
    let mut delivered: HashSet<Temp> = HashSet::new();
    loop {
        let out = f.drain_adversary();
        if out.is_empty() {
            return all;
        }
        let fresh: Vec<Temp> = out
            .iter()
            .filter_map(|m| match m {
                AdvMessage::Segment { temp, .. } if delivered.insert(*temp) => Some(*temp),
                _ => None,
            })
            .collect();
        all.extend(out);
        for t in fresh {
            f.deliver_message(t, rng);
        }
        f.run_environment(rng);
    }
}

/// Estimate the strategy's advantage over `trials` independent challenges.
/// Trial `i` draws its randomness from the stream derived from `(seed, i)`.
pub fn run_notion_game(game: &NotionGame, strategy: &dyn Strategy, trials: u64, seed: u64) -> Result<NotionReport, NotionError> {
    let pair = strategy.propose();
    if !validate(game.notion, game.corruption, &pair, &game.config.corrupted) {
        return Err(NotionError::InvalidPair { notion: game.notion.name(), corruption: game.corruption.name() });
    }
    let results: Vec<Result<(usize, usize), NotionError>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive(seed, "notion", i);
            run_trial(game, &pair, strategy, &mut rng)
        })
        .collect();
    let mut wins = 0;
    for r in results {
        let (g, b) = r?;
        wins += u64::from(g == b);
    }
    let est = Estimate::new(wins, trials);
    Ok(NotionReport {
        notion: game.notion.name().to_string(),
        corruption: game.corruption.name().to_string(),
        class: game.class.name().to_string(),
        strategy: strategy.name(),
        trials,
        wins,
        win_rate: est.rate(),
        advantage: est.advantage(),
        wilson95: est.wilson(1.96),
        sigma: est.sigma_at(0.5),
    })
}

/// Run both scenarios of a message-only pair from the same random stream
/// with every segment delivered, and count the runs whose adversary traces
/// agree after temp renaming.
pub fn mo_trace_equality(game: &NotionGame, pair: &ScenarioPair, runs: u64, seed: u64) -> Result<u64, NotionError> {
    if !validate(Notion::Mo, game.corruption, pair, &game.config.corrupted) {
        return Err(NotionError::InvalidPair { notion: Notion::Mo.name(), corruption: game.corruption.name() });
    }
    let mut equal = 0;
    for i in 0..runs {
        let traces: Vec<Vec<String>> = (0..2)
            .map(|b| {
                let mut rng = derive(seed, "mo-trace", i);
                let mut batch = pair.scenarios[b].alternatives[0].clone();
                if game.class != AdversaryClass::Identity {
                    replace_paths(&mut batch, &game.config, &mut rng)?;
                }
                let mut f = IdealFunctionality::new(game.config.corrupted.clone(), game.config.max_path);
                for c in &batch {
                    f.process_new_onion(&c.sender, &c.receiver, Some(c.message.clone()), c.path.clone(), &mut rng)?;
                }
                f.run_environment(&mut rng);
                Ok(canonical_trace(&deliver_everything(&mut f, &mut rng)))
            })
            .collect::<Result<_, NotionError>>()?;
        equal += u64::from(traces[0] == traces[1]);
    }
    Ok(equal)
}
