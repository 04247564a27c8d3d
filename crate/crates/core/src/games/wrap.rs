//! Wrap-Resistance: after seeing a first layer, the adversary must name a
//! router other than `P_{j−1}`, a secret key and an onion whose processing
//! there yields exactly the layer `O_j` the honest router would receive.

use super::challenger::{check_input, random_message};
use super::{AdversaryContext, ChallengeInput, GameError, GameId, Oracle, OraclePolicy};
use crate::primitives::{GroupElement, Scalar, SuiteParams};
use crate::rng::{derive, LabRng};
use crate::scheme::{scheme_by_name, KeyPair, Network, NodeState, Onion, OnionScheme, ProcOutput};
use crate::stats::Estimate;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

/// The adversary's final submission `(P′, SK′, O′)`.
#[derive(Clone, Debug)]
pub struct Forgery {
    pub router: String,
    pub secret: Scalar,
    pub onion: Onion,
}

pub trait WrAdversary: Send + Sync {
    fn name(&self) -> String;

    fn choose(&self, ctx: &AdversaryContext<'_>, _oracle: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
        ChallengeInput { message: b"wrap probe".to_vec(), path: ctx.path_around(3, 2, rng), j: 2, modification: None }
    }

    fn forge(
        &self,
        ctx: &AdversaryContext<'_>,
        input: &ChallengeInput,
        first: &Onion,
        oracle: &mut Oracle<'_>,
        rng: &mut LabRng,
    ) -> Forgery;
}

/// The layer `O_{j−1}` recomputed from the first layer.
fn previous_layer(ctx: &AdversaryContext<'_>, input: &ChallengeInput, first: &Onion) -> Onion {
    ctx.walk(&input.path[0], first, input.j.saturating_sub(2)).onion
}

fn other_corrupt(ctx: &AdversaryContext<'_>, avoid: &str, rng: &mut LabRng) -> String {
    let names: Vec<&String> = ctx.corrupt.keys().filter(|n| n.as_str() != avoid).collect();
    names.choose(rng).map(|n| (*n).clone()).unwrap_or_else(|| avoid.to_string())
}

/// Processes `O_{j−1}` with `P_{j−1}`'s key under a different router name.
/// Wins against any scheme whose processing ignores the router identity.
pub struct IdentityCopy;

impl WrAdversary for IdentityCopy {
    fn name(&self) -> String {
        "identity-copy".into()
    }

    fn forge(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, first: &Onion, _: &mut Oracle<'_>, rng: &mut LabRng) -> Forgery {
        let prev = &input.path[input.j.saturating_sub(2)];
        let secret = ctx.corrupt.get(prev).map(|n| n.keys.secret).unwrap_or_else(|| Scalar::random(rng));
        Forgery { router: other_corrupt(ctx, prev, rng), secret, onion: previous_layer(ctx, input, first) }
    }
}

/// Random key, random router, random bytes.
pub struct RandomForgery;

impl WrAdversary for RandomForgery {
    fn name(&self) -> String {
        "random-forgery".into()
    }

    fn forge(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, _: &Onion, _: &mut Oracle<'_>, rng: &mut LabRng) -> Forgery {
        let prev = &input.path[input.j.saturating_sub(2)];
        Forgery {
            router: other_corrupt(ctx, prev, rng),
            secret: Scalar::random(rng),
            onion: Onion(random_message(ctx.scheme.onion_len(), rng)),
        }
    }
}

/// Submits the honest processing at `P_{j−1}` itself, which the game rules
/// out.
pub struct ReplayPrevious;

impl WrAdversary for ReplayPrevious {
    fn name(&self) -> String {
        "replay-previous".into()
    }

    fn forge(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, first: &Onion, _: &mut Oracle<'_>, rng: &mut LabRng) -> Forgery {
        let prev = input.path[input.j.saturating_sub(2)].clone();
        let secret = ctx.corrupt.get(&prev).map(|n| n.keys.secret).unwrap_or_else(|| Scalar::random(rng));
        Forgery { router: prev, secret, onion: previous_layer(ctx, input, first) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WrReport {
    pub scheme: String,
    pub adversary: String,
    pub trials: u64,
    pub successes: u64,
    /// Submissions refused because they named `P_{j−1}` or an unknown router.
    pub rejected: u64,
    pub success_rate: f64,
    pub wilson95: (f64, f64),
}

enum Outcome {
    Success,
    Failure,
    Rejected,
}

fn wr_trial(
    scheme: &dyn OnionScheme,
    routers: usize,
    adversary: &dyn WrAdversary,
    b: usize,
    rng: &mut LabRng,
) -> Result<Outcome, GameError> {
    let names = Network::names(routers);
    let mut net = Network::generate(scheme, &names, rng);
    let honest = names.choose(rng).expect("at least one router").clone();
    let honest_node = net.nodes.remove(&honest).expect("generated");
    let ctx = AdversaryContext { game: GameId::Os, scheme, dir: &net.dir, honest: &honest, corrupt: &net.nodes };
    let mut oracle = Oracle::new(scheme, &honest_node);

    let input = adversary.choose(&ctx, &mut oracle, rng);
    check_input(&input, scheme, &net.dir, &honest)?;
    let j = input.j;
    let layers = if b == 0 {
        scheme.form_onion(&input.message, &input.path, &net.dir, rng)?
    } else {
        let m2 = random_message(input.message.len(), rng);
        scheme.form_onion(&m2, &input.path[..j], &net.dir, rng)?
    };
    let target = layers[j - 1].clone();
    oracle.restrict(OraclePolicy::ExcludeExact, vec![target.clone()]);
    let forgery = adversary.forge(&ctx, &input, &layers[0], &mut oracle, rng);

    let previous = (j >= 2).then(|| input.path[j - 2].as_str());
    if !net.dir.contains_key(&forgery.router) || previous == Some(forgery.router.as_str()) {
        return Ok(Outcome::Rejected);
    }
    let keys = KeyPair { public: GroupElement::base_exp(&forgery.secret), secret: forgery.secret };
    let mut node = NodeState::new(forgery.router.clone(), keys);
    Ok(match scheme.proc_onion(&mut node, &forgery.onion) {
        ProcOutput::Relay { onion, .. } if onion == target => Outcome::Success,
        _ => Outcome::Failure,
    })
}

pub fn run_wr(
    scheme_name: &str,
    params: &SuiteParams,
    adversary: &dyn WrAdversary,
    trials: u64,
    seed: u64,
) -> Result<WrReport, GameError> {
    let scheme = scheme_by_name(scheme_name, params)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive(seed, "wrap", i);
            wr_trial(scheme.as_ref(), 8, adversary, (i % 2) as usize, &mut rng)
        })
        .collect::<Result<Vec<Outcome>, GameError>>()?;
    let successes = outcomes.iter().filter(|o| matches!(o, Outcome::Success)).count() as u64;
    let rejected = outcomes.iter().filter(|o| matches!(o, Outcome::Rejected)).count() as u64;
    let est = Estimate::new(successes, trials);
    Ok(WrReport {
        scheme: scheme.name(),
        adversary: adversary.name(),
        trials,
        successes,
        rejected,
        success_rate: est.rate(),
        wilson95: est.wilson(1.96),
    })
}
