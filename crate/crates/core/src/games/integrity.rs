//! Onion-Integrity check: onions crafted against the tag-chain extension
//! are routed through honest routers and the number of relays that accept
//! them is recorded.

use crate::extensions::{ChainHop, ChainScheme, TagChain};
use crate::primitives::SuiteParams;
use crate::rng::{derive, LabRng};
use crate::scheme::{lookup, Network, Onion, OnionScheme, ProcOutput, SchemeError, SphinxScheme};
use crate::sphinx::Variant;
use rand::seq::SliceRandom;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// How the adversary builds its onion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CraftedOnion {
    /// A regular onion over `N` relays and a receiver.
    Honest,
    /// An inner onion over `N + 2` relays with a valid chain for the first
    /// `N` of them.
    Overlong,
    /// An inner onion over `N + 2` relays with a chain of `N + 2` blocks.
    Stuffed,
}

impl CraftedOnion {
    pub const ALL: [CraftedOnion; 3] = [CraftedOnion::Honest, CraftedOnion::Overlong, CraftedOnion::Stuffed];

    pub fn name(self) -> &'static str {
        match self {
            CraftedOnion::Honest => "honest",
            CraftedOnion::Overlong => "overlong",
            CraftedOnion::Stuffed => "stuffed",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrityReport {
    pub scheme: String,
    pub crafted: String,
    /// The relay bound `N` of the chain.
    pub bound: usize,
    pub trials: u64,
    /// Largest number of honest routers that relayed one onion.
    pub max_relayed: usize,
    pub delivered: u64,
    /// 1-based hop at which processing failed, with counts.
    pub aborted_at: BTreeMap<usize, u64>,
    /// Failure reasons with counts.
    pub drops: BTreeMap<String, u64>,
}

/// Onion-integrity extension over adapted Sphinx whose inner scheme admits
/// paths three routers longer than the chain allows.
pub fn integrity_scheme(params: &SuiteParams, n_max: usize) -> Result<ChainScheme, SchemeError> {
    let inner = SuiteParams::new(params.kappa, n_max + 3, params.payload_bits)?;
    Ok(ChainScheme::integrity(Arc::new(SphinxScheme::new(inner, Variant::AdaptedAe)), params.k(), n_max))
}

fn pick_path(names: &[String], len: usize, rng: &mut LabRng) -> Vec<String> {
    if names.len() >= len {
        names.choose_multiple(rng, len).cloned().collect()
    } else {
        (0..len).map(|_| names.choose(rng).expect("routers").clone()).collect()
    }
}

fn craft(scheme: &ChainScheme, net: &Network, crafted: CraftedOnion, rng: &mut LabRng) -> Result<(String, Onion), SchemeError> {
    let n = scheme.chain().blocks;
    let names: Vec<String> = net.nodes.keys().cloned().collect();
    let m = b"integrity probe";
    if crafted == CraftedOnion::Honest {
        let path = pick_path(&names, n + 1, rng);
        let layers = scheme.form_onion(m, &path, &net.dir, rng)?;
        return Ok((path[0].clone(), layers[0].clone()));
    }
    let path = pick_path(&names, n + 3, rng);
    let inner: Vec<Vec<u8>> = scheme.inner().form_onion(m, &path, &net.dir, rng)?.into_iter().map(|o| o.0).collect();
    let hops = path.iter().map(|p| Ok(ChainHop { name: p.as_str(), public: lookup(&net.dir, p)? }));
    let hops = hops.collect::<Result<Vec<_>, SchemeError>>()?;
    let ext = match crafted {
        CraftedOnion::Overlong => scheme.chain().build(&inner[..n + 1], &hops[..n], None, rng)?,
        _ => {
            TagChain::new(n + 2, scheme.chain().k()).build(&inner, &hops[..n + 2], None, rng)?
        }
    };
    Ok((path[0].clone(), scheme.join(&inner[0], &[], &ext[0])))
}

/// Route `trials` crafted onions through `honest_routers` honest routers.
pub fn run_integrity_check(
    scheme: &ChainScheme,
    crafted: CraftedOnion,
    honest_routers: usize,
    trials: u64,
    seed: u64,
) -> Result<IntegrityReport, SchemeError> {
    let mut report = IntegrityReport {
        scheme: scheme.name(),
        crafted: crafted.name().to_string(),
        bound: scheme.chain().blocks,
        trials,
        max_relayed: 0,
        delivered: 0,
        aborted_at: BTreeMap::new(),
        drops: BTreeMap::new(),
    };
    for i in 0..trials {
        let mut rng = derive(seed, "integrity", i);
        let mut net = Network::generate(scheme, &Network::names(honest_routers.max(1)), &mut rng);
        let (first, onion) = craft(scheme, &net, crafted, &mut rng)?;
        let trace = net.route(scheme, &first, onion);
        report.max_relayed = report.max_relayed.max(trace.hops.len() - 1);
        match trace.end {
            ProcOutput::Receive { .. } => report.delivered += 1,
            ProcOutput::Fail(r) => {
                *report.aborted_at.entry(trace.hops.len()).or_default() += 1;
                *report.drops.entry(format!("{r:?}")).or_default() += 1;
            }
            ProcOutput::Relay { .. } => {}
        }
    }
    Ok(report)
}
