//! Abstract onion-routing scheme: key generation, onion formation
//! returning every layer, and per-router processing.

mod correctness;
mod network;
mod registry;
mod runtime;
mod sphinx_scheme;

pub use correctness::{check_correctness, check_instance, CorrectnessReport};
pub use network::{Network, Trace};
pub use registry::{scheme_by_name, SCHEME_NAMES};
pub use runtime::{NodeRuntime, RuntimeError, RuntimeEvent};
pub use sphinx_scheme::SphinxScheme;

use crate::primitives::{GroupElement, Scalar};
use crate::rng::LabRng;
use crate::sphinx::{DropReason, ReplayStore, SphinxError};
use rand::{CryptoRng, RngCore};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Onion(pub Vec<u8>);

impl Onion {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Onion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = &self.0[..self.0.len().min(8)];
        write!(f, "Onion({} bytes, {}..)", self.0.len(), hex::encode(head))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KeyPair {
    pub public: GroupElement,
    pub secret: Scalar,
}

impl KeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let secret = Scalar::random(rng);
        KeyPair { public: GroupElement::base_exp(&secret), secret }
    }
}

/// Router name to public key.
pub type Directory = BTreeMap<String, GroupElement>;

/// Mutable per-router state: keys, replay store and the processing counter
/// used by the wrapping extension.
#[derive(Clone, Debug)]
pub struct NodeState {
    pub name: String,
    pub keys: KeyPair,
    pub replay: ReplayStore,
    pub counter: u64,
}

impl NodeState {
    pub fn new(name: impl Into<String>, keys: KeyPair) -> Self {
        NodeState { name: name.into(), keys, replay: ReplayStore::default(), counter: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcOutput {
    Relay { next: String, onion: Onion },
    Receive { message: Vec<u8> },
    Fail(DropReason),
}

impl ProcOutput {
    pub fn is_fail(&self) -> bool {
        matches!(self, ProcOutput::Fail(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("router `{0}` is not in the directory")]
    UnknownRouter(String),
    #[error("path of {len} routers exceeds the maximum of {max}")]
    PathTooLong { len: usize, max: usize },
    #[error("path is empty")]
    EmptyPath,
    #[error("message of {len} bytes exceeds the maximum of {max}")]
    MessageTooLong { len: usize, max: usize },
    #[error(transparent)]
    Sphinx(#[from] SphinxError),
    #[error(transparent)]
    Primitive(#[from] crate::primitives::PrimitiveError),
}

/// An onion-routing scheme. Paths are `(P_1, …, P_{n+1})` with the
/// receiver last; `form_onion` returns the layers `O_1, …, O_{n+1}` where
/// `O_i` is what `P_i` receives.
pub trait OnionScheme: Send + Sync {
    fn name(&self) -> String;

    /// Largest admissible `n + 1`.
    fn max_path_len(&self) -> usize;

    /// Largest message the scheme carries; shorter ones are accepted.
    fn message_len(&self) -> usize;

    /// Every onion of this scheme has exactly this many bytes.
    fn onion_len(&self) -> usize;

    fn keygen(&self, rng: &mut LabRng) -> KeyPair {
        KeyPair::generate(rng)
    }

    fn form_onion(
        &self,
        m: &[u8],
        path: &[String],
        dir: &Directory,
        rng: &mut LabRng,
    ) -> Result<Vec<Onion>, SchemeError>;

    fn proc_onion(&self, node: &mut NodeState, onion: &Onion) -> ProcOutput;

    /// The equivalence under which replay filtering treats two onions as
    /// the same packet.
    fn is_duplicate(&self, a: &Onion, b: &Onion) -> bool;

    /// Byte range of the layered payload inside an onion, if the scheme has
    /// one at a fixed position.
    fn payload_range(&self) -> Option<std::ops::Range<usize>> {
        None
    }
}

pub(crate) fn check_path(scheme: &dyn OnionScheme, path: &[String], m: &[u8]) -> Result<(), SchemeError> {
    if path.is_empty() {
        return Err(SchemeError::EmptyPath);
    }
    if path.len() > scheme.max_path_len() {
        return Err(SchemeError::PathTooLong { len: path.len(), max: scheme.max_path_len() });
    }
    if m.len() > scheme.message_len() {
        return Err(SchemeError::MessageTooLong { len: m.len(), max: scheme.message_len() });
    }
    Ok(())
}

pub(crate) fn lookup(dir: &Directory, name: &str) -> Result<GroupElement, SchemeError> {
    dir.get(name).copied().ok_or_else(|| SchemeError::UnknownRouter(name.to_string()))
}
