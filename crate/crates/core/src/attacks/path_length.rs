//! A corrupt exit reads how many hops an onion took from the zero run that
//! follows the exit marker in its decrypted routing information.

use crate::primitives::{Scalar, SuiteParams};
use crate::rng::derive;
use crate::scheme::{Network, Onion, OnionScheme, SchemeError, SphinxScheme};
use crate::sphinx::{exit_path_length_bound, SphinxPacket, Variant};
use crate::stats::chi_square_homogeneity;
use serde::Serialize;

/// Lower bound on the number of hops, computed by the exit from the layer
/// it received. `None` if the onion is not an exit layer for this key.
pub fn path_length_probe(params: &SuiteParams, exit_secret: &Scalar, onion: &Onion) -> Option<usize> {
    let pkt = SphinxPacket::from_bytes(params, onion.as_bytes()).ok()?;
    exit_path_length_bound(params, exit_secret, &pkt)
}

#[derive(Clone, Debug, Serialize)]
pub struct PathLengthReport {
    pub scheme: String,
    pub trials_per_length: u64,
    /// `histogram[ν−1][b−1]`: onions over ν hops for which the probe said b.
    pub histogram: Vec<Vec<u64>>,
    /// Share of onions over ν hops for which the probe was exact.
    pub exact: Vec<f64>,
    /// Chi-square homogeneity of the probe output across path lengths.
    pub chi_square: f64,
    pub p_value: f64,
}

/// Probe `trials` onions for every path length `1..=r`.
pub fn run_path_length_leak(
    variant: Variant,
    params: &SuiteParams,
    trials: u64,
    seed: u64,
) -> Result<PathLengthReport, SchemeError> {
    let scheme = SphinxScheme::new(*params, variant);
    let r = params.max_hops;
    let names = Network::names(r);
    let mut histogram = vec![vec![0u64; r]; r];
    for nu in 1..=r {
        for i in 0..trials {
            let mut rng = derive(seed, "path-length", (nu as u64) << 32 | i);
            let net = Network::generate(&scheme, &names, &mut rng);
            let path = names[..nu].to_vec();
            let layers = scheme.form_onion(b"probe", &path, &net.dir, &mut rng)?;
            let exit = &net.nodes[&path[nu - 1]];
            if let Some(b) = path_length_probe(params, &exit.keys.secret, &layers[nu - 1]) {
                histogram[nu - 1][b - 1] += 1;
            }
        }
    }
    let exact = (0..r).map(|i| histogram[i][i] as f64 / trials.max(1) as f64).collect();
    let (chi_square, p_value) = chi_square_homogeneity(&histogram);
    Ok(PathLengthReport { scheme: scheme.name(), trials_per_length: trials, histogram, exact, chi_square, p_value })
}
