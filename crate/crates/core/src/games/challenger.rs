use super::{
    AdversaryContext, ChallengeInput, ChallengeView, Distinguisher, GameError, GameId, GameSpec, GameTranscript,
    Oracle, OracleAnswer,
};
use crate::rng::{derive, LabRng};
use crate::scheme::{scheme_by_name, Directory, Network, Onion, OnionScheme};
use crate::stats::Estimate;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GameReport {
    pub game: String,
    pub scheme: String,
    pub adversary: String,
    pub trials: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub advantage: f64,
    /// 95% Wilson interval on the win rate.
    pub wilson95: (f64, f64),
    /// One standard deviation of the win rate for a guessing adversary.
    pub sigma: f64,
}

pub(crate) fn check_input(
    input: &ChallengeInput,
    scheme: &dyn OnionScheme,
    dir: &Directory,
    honest: &str,
) -> Result<(), GameError> {
    let bad = |s: String| Err(GameError::InvalidAdversaryInput(s));
    let n1 = input.path.len();
    if n1 == 0 || n1 > scheme.max_path_len() {
        return bad(format!("path length {n1} outside 1..={}", scheme.max_path_len()));
    }
    if let Some(unknown) = input.path.iter().find(|p| !dir.contains_key(*p)) {
        return bad(format!("router `{unknown}` is not in the directory"));
    }
    if input.j == 0 || input.j > n1 {
        return bad(format!("honest position {} outside 1..={n1}", input.j));
    }
    if input.path[input.j - 1] != honest {
        return bad(format!("position {} is not the honest router", input.j));
    }
    if input.message.len() > scheme.message_len() {
        return bad(format!("message of {} bytes exceeds {}", input.message.len(), scheme.message_len()));
    }
    Ok(())
}

pub(crate) fn random_routers(names: &[String], count: usize, rng: &mut LabRng) -> Vec<String> {
    (0..count).map(|_| names.choose(rng).expect("routers").clone()).collect()
}

pub(crate) fn random_message(len: usize, rng: &mut LabRng) -> Vec<u8> {
    let mut m = vec![0u8; len];
    rng.fill_bytes(&mut m);
    m
}

/// Run one trial with challenge bit `b`.
pub fn run_trial(
    game: GameId,
    scheme: &dyn OnionScheme,
    routers: usize,
    adversary: &dyn Distinguisher,
    b: usize,
    rng: &mut LabRng,
) -> Result<GameTranscript, GameError> {
    let names = Network::names(routers);
    let mut net = Network::generate(scheme, &names, rng);
    let honest = names.choose(rng).expect("at least one router").clone();
    let honest_node = net.nodes.remove(&honest).expect("generated");
    let ctx = AdversaryContext { game, scheme, dir: &net.dir, honest: &honest, corrupt: &net.nodes };
    let mut oracle = Oracle::new(scheme, &honest_node);

    let input = adversary.choose(&ctx, &mut oracle, rng);
    check_input(&input, scheme, &net.dir, &honest)?;
    let (m, path, j) = (&input.message, &input.path, input.j);
    let layers = scheme.form_onion(m, path, &net.dir, rng)?;
    let max = scheme.max_path_len();
    let proc_honest = |o: &Onion| -> OracleAnswer {
        let mut node = honest_node.clone();
        scheme.proc_onion(&mut node, o).into()
    };

    let (view, excluded, alt_layers, alt_path, alt_message, k) = match game {
        GameId::Os => {
            let m2 = random_message(m.len(), rng);
            let alt_path = path[..j].to_vec();
            let alt = scheme.form_onion(&m2, &alt_path, &net.dir, rng)?;
            let first = if b == 0 { layers[0].clone() } else { alt[0].clone() };
            let excluded = vec![layers[j - 1].clone(), alt[j - 1].clone()];
            (ChallengeView::First { onion: first }, excluded, alt, alt_path, m2, 1)
        }
        GameId::Lu | GameId::LuDup | GameId::OsMod => {
            let total = rng.gen_range(j..=max);
            let pre = rng.gen_range(0..=total - j);
            let mut alt_path = random_routers(&names, pre, rng);
            alt_path.extend_from_slice(&path[..j]);
            alt_path.extend(random_routers(&names, total - pre - j, rng));
            let m2 = random_message(m.len(), rng);
            let alt = scheme.form_onion(&m2, &alt_path, &net.dir, rng)?;
            let first = if b == 0 { layers[0].clone() } else { alt[pre].clone() };
            let at_honest = if b == 0 { &layers[j - 1] } else { &alt[pre + j - 1] };
            let (processed, excluded) = if game == GameId::OsMod {
                let f = input.modification.ok_or(GameError::InvalidModificationFn)?;
                let modified = f.apply(scheme, at_honest);
                if modified == *at_honest || !scheme.is_duplicate(at_honest, &modified) {
                    return Err(GameError::InvalidModificationFn);
                }
                (proc_honest(&modified), vec![modified])
            } else {
                (proc_honest(&layers[j - 1]), vec![layers[j - 1].clone(), alt[pre + j - 1].clone()])
            };
            (ChallengeView::Linked { onion: first, processed }, excluded, alt, alt_path, m2, pre + 1)
        }
        GameId::Ti => {
            if j == path.len() {
                return Err(GameError::InvalidAdversaryInput("the honest router must not be the receiver".into()));
            }
            let tail = path.len() - j;
            let total = rng.gen_range(tail + 1..=max);
            let k = total - tail;
            let mut alt_path = random_routers(&names, k - 1, rng);
            alt_path.extend_from_slice(&path[j - 1..]);
            let alt = scheme.form_onion(m, &alt_path, &net.dir, rng)?;
            let view = if b == 0 {
                ChallengeView::Tail { onion: layers[j].clone(), next: path[j].clone() }
            } else {
                ChallengeView::Tail { onion: alt[k].clone(), next: alt_path[k].clone() }
            };
            (view, Vec::new(), alt, alt_path, m.clone(), k)
        }
    };

    oracle.restrict(game.oracle_policy(), excluded);
    let guess = adversary.guess(&ctx, &input, &view, &mut oracle, rng);
    Ok(GameTranscript {
        game,
        b,
        input,
        view,
        oracle_log: oracle.log,
        guess,
        layers,
        alt_layers,
        alt_path,
        alt_message,
        k,
    })
}

/// Estimate an adversary's advantage. Trial `i` uses bit `i mod 2` and its
/// own random stream, so both bits get the same number of trials.
pub fn run_game(spec: &GameSpec, adversary: &dyn Distinguisher) -> Result<GameReport, GameError> {
    let scheme = scheme_by_name(&spec.scheme, &spec.params)?;
    let wins = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive(spec.seed, spec.game.name(), i);
            let t = run_trial(spec.game, scheme.as_ref(), spec.routers, adversary, (i % 2) as usize, &mut rng)?;
            Ok(u64::from(t.guess == t.b))
        })
        .collect::<Result<Vec<u64>, GameError>>()?
        .into_iter()
        .sum();
    let est = Estimate::new(wins, spec.trials);
    Ok(GameReport {
        game: spec.game.name().to_string(),
        scheme: scheme.name(),
        adversary: adversary.name(),
        trials: spec.trials,
        wins,
        win_rate: est.rate(),
        advantage: est.advantage(),
        wilson95: est.wilson(1.96),
        sigma: est.sigma_at(0.5),
    })
}
