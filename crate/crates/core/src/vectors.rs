//! Deterministic wire vectors: for each registered scheme, the keys, the
//! path, every onion layer and the delivered message, all derived from one
//! seed.

use crate::primitives::SuiteParams;
use crate::rng::derive;
use crate::scheme::{scheme_by_name, Network, ProcOutput, SchemeError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const VECTOR_SCHEMES: &[&str] = &[
    "sphinx-flawed",
    "sphinx-fixed",
    "sphinx-ae",
    "sphinx-malleable",
    "sphinx-tagged",
    "broken1",
    "broken2",
    "wr(sphinx-ae)",
    "oi(sphinx-ae)",
];

pub const VECTOR_MESSAGE: &[u8] = b"onionlab wire vector";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireVector {
    pub scheme: String,
    pub params: SuiteParams,
    pub seed: u64,
    pub path: Vec<String>,
    /// Router name to hex public key.
    pub public_keys: BTreeMap<String, String>,
    pub message_hex: String,
    pub onion_len: usize,
    /// Hex of the first layer.
    pub first_layer_hex: String,
    /// SHA-256 of every layer the sender computes, in path order.
    pub layer_sha256: Vec<String>,
    /// SHA-256 of every layer the routers actually receive.
    pub routed_sha256: Vec<String>,
    pub delivered_hex: String,
}

/// Hex SHA-256 of an onion layer.
pub fn layer_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Vector for one scheme over the path `P00 → P01 → P02`.
pub fn wire_vector(scheme_name: &str, params: &SuiteParams, seed: u64) -> Result<WireVector, SchemeError> {
    let scheme = scheme_by_name(scheme_name, params)?;
    let mut rng = derive(seed, scheme_name, 0);
    let names = Network::names(3);
    let mut net = Network::generate(scheme.as_ref(), &names, &mut rng);
    let layers = scheme.form_onion(VECTOR_MESSAGE, &names, &net.dir, &mut rng)?;
    let trace = net.route(scheme.as_ref(), &names[0], layers[0].clone());
    let delivered = match trace.end {
        ProcOutput::Receive { message } => message,
        _ => Vec::new(),
    };
    Ok(WireVector {
        scheme: scheme_name.to_string(),
        params: *params,
        seed,
        path: names.clone(),
        public_keys: net.dir.iter().map(|(n, pk)| (n.clone(), hex::encode(pk.encode()))).collect(),
        message_hex: hex::encode(VECTOR_MESSAGE),
        onion_len: scheme.onion_len(),
        first_layer_hex: hex::encode(layers[0].as_bytes()),
        layer_sha256: layers.iter().map(|l| layer_digest(l.as_bytes())).collect(),
        routed_sha256: trace.hops.iter().map(|(_, l)| layer_digest(l.as_bytes())).collect(),
        delivered_hex: hex::encode(delivered),
    })
}

pub fn wire_vectors(params: &SuiteParams, seed: u64) -> Result<Vec<WireVector>, SchemeError> {
    VECTOR_SCHEMES.iter().map(|s| wire_vector(s, params, seed)).collect()
}
