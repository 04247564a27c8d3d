//! Seeded correctness check: honest routers, random paths and messages,
//! and every layer compared against what the sender formed.

use super::{scheme_by_name, Network, OnionScheme, ProcOutput, SchemeError};
use crate::primitives::SuiteParams;
use crate::rng::derive;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CorrectnessReport {
    pub scheme: String,
    pub path_len: usize,
    pub trials: u64,
    pub failures: u64,
    /// Description of the first failing instance.
    pub first_failure: Option<String>,
}

/// Why one instance failed, or `None` if it was correct: the onion must
/// visit exactly the path, each processed layer must match the formed layer
/// up to the duplicate relation, and the last router must receive `m`.
pub fn check_instance(scheme: &dyn OnionScheme, net: &mut Network, path: &[String], m: &[u8], rng: &mut crate::rng::LabRng) -> Option<String> {
    let layers = match scheme.form_onion(m, path, &net.dir, rng) {
        Ok(l) => l,
        Err(e) => return Some(format!("form_onion: {e}")),
    };
    let trace = net.route(scheme, &path[0], layers[0].clone());
    let visited: Vec<&String> = trace.hops.iter().map(|(n, _)| n).collect();
    if visited != path.iter().collect::<Vec<_>>() {
        return Some(format!("visited {visited:?} instead of {path:?}"));
    }
    for (i, ((_, seen), formed)) in trace.hops.iter().zip(&layers).enumerate() {
        if seen != formed && !scheme.is_duplicate(seen, formed) {
            return Some(format!("layer {} differs from the formed layer", i + 1));
        }
    }
    match trace.end {
        ProcOutput::Receive { message } if message == m => None,
        other => Some(format!("ended with {other:?}")),
    }
}

/// `trials` instances over paths of length `path_len` drawn with repetition
/// from `routers` routers.
pub fn check_correctness(
    scheme_name: &str,
    params: &SuiteParams,
    path_len: usize,
    routers: usize,
    trials: u64,
    seed: u64,
) -> Result<CorrectnessReport, SchemeError> {
    let scheme = scheme_by_name(scheme_name, params)?;
    let names = Network::names(routers);
    let mut report = CorrectnessReport { scheme: scheme.name(), path_len, trials, failures: 0, first_failure: None };
    for i in 0..trials {
        let mut rng = derive(seed, &format!("correctness/{scheme_name}/{path_len}"), i);
        let mut net = Network::generate(scheme.as_ref(), &names, &mut rng);
        let path: Vec<String> = (0..path_len).map(|_| names.choose(&mut rng).expect("routers").clone()).collect();
        let mut m = vec![0u8; rng.gen_range(0..=scheme.message_len())];
        rng.fill_bytes(&mut m);
        if let Some(why) = check_instance(scheme.as_ref(), &mut net, &path, &m, &mut rng) {
            report.failures += 1;
            report.first_failure.get_or_insert(format!("instance {i}: {why}"));
        }
    }
    Ok(report)
}
