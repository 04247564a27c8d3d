//! Sphinx packet format in four payload/padding variants plus a mode whose
//! header MAC also covers the payload.
//!
//! Wire layout: `α (32) ‖ β ((2r+1)κ) ‖ γ (κ) ‖ δ (l_π)`.

mod address;
mod build;
mod process;

pub use address::Address;
pub use build::{create_forward_message, create_header, encode_payload, max_message_len, Header};
pub use process::{exit_path_length_bound, process_packet, unwrap_with_secret, DropReason, Outcome};

use crate::primitives::{GroupElement, PrimitiveError, SuiteParams, ELEMENT_LEN};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Zero padding after `Δ ‖ I` in the innermost routing block.
    OriginalFlawed,
    /// Random padding in place of the zeros.
    OriginalFixed,
    /// Per-hop authenticated encryption of the payload, tag in γ.
    AdaptedAe,
    /// Payload layers are a plain stream cipher; nothing checks them per hop.
    MalleablePayload,
    /// Random padding and a header MAC over `β ‖ δ`.
    PayloadTagged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PayloadMode {
    Prp,
    Ae,
    Stream,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::OriginalFlawed,
        Variant::OriginalFixed,
        Variant::AdaptedAe,
        Variant::MalleablePayload,
        Variant::PayloadTagged,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::OriginalFlawed => "sphinx-flawed",
            Variant::OriginalFixed => "sphinx-fixed",
            Variant::AdaptedAe => "sphinx-ae",
            Variant::MalleablePayload => "sphinx-malleable",
            Variant::PayloadTagged => "sphinx-tagged",
        }
    }

    pub fn from_name(name: &str) -> Option<Variant> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn random_padding(&self) -> bool {
        !matches!(self, Variant::OriginalFlawed)
    }

    pub(crate) fn mode(&self) -> PayloadMode {
        match self {
            Variant::AdaptedAe => PayloadMode::Ae,
            Variant::MalleablePayload => PayloadMode::Stream,
            _ => PayloadMode::Prp,
        }
    }

    pub(crate) fn mac_covers_payload(&self) -> bool {
        matches!(self, Variant::PayloadTagged)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SphinxError {
    #[error("path is empty")]
    EmptyPath,
    #[error("path of {len} hops exceeds the maximum of {max}")]
    PathTooLong { len: usize, max: usize },
    #[error("name `{0}` does not fit an address slot")]
    NameTooLong(String),
    #[error("message of {len} bytes exceeds the maximum of {max}")]
    MessageTooLong { len: usize, max: usize },
    #[error("destination of {len} bytes exceeds the {max} bytes available at this path length")]
    DestTooLong { len: usize, max: usize },
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("packet is {got} bytes, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
}

/// One router on a path: its name and public key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hop {
    pub name: String,
    pub public: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SphinxPacket {
    pub alpha: [u8; ELEMENT_LEN],
    pub beta: Vec<u8>,
    pub gamma: Vec<u8>,
    pub delta: Vec<u8>,
}

impl SphinxPacket {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(ELEMENT_LEN + self.beta.len() + self.gamma.len() + self.delta.len());
        out.extend_from_slice(&self.alpha);
        out.extend_from_slice(&self.beta);
        out.extend_from_slice(&self.gamma);
        out.extend_from_slice(&self.delta);
        out
    }

    pub fn from_bytes(params: &SuiteParams, bytes: &[u8]) -> Result<Self, SphinxError> {
        if bytes.len() != params.packet_len() {
            return Err(SphinxError::BadLength { expected: params.packet_len(), got: bytes.len() });
        }
        let (alpha, rest) = bytes.split_at(ELEMENT_LEN);
        let (beta, rest) = rest.split_at(params.beta_len());
        let (gamma, delta) = rest.split_at(params.tag_len());
        Ok(SphinxPacket {
            alpha: alpha.try_into().expect("split at element length"),
            beta: beta.to_vec(),
            gamma: gamma.to_vec(),
            delta: delta.to_vec(),
        })
    }
}

/// Set of h_τ values a node has accepted.
#[derive(Clone, Debug, Default)]
pub struct ReplayStore {
    seen: HashSet<Vec<u8>>,
}

impl ReplayStore {
    pub fn contains(&self, tag: &[u8]) -> bool {
        self.seen.contains(tag)
    }

    /// Returns false if the tag was already present.
    pub fn insert(&mut self, tag: Vec<u8>) -> bool {
        self.seen.insert(tag)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}
