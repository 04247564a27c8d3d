//! Inner onion followed by a tag chain, optionally preceded by a random
//! per-onion identifier.
//!
//! Without the identifier this is the onion-integrity extension: no onion
//! can be relayed by more than N routers. With the identifier it is the
//! second counterexample: the identifier is authenticated but travels in
//! the clear and is identical in every layer.

use super::{split_suffix, ChainHop, TagChain};
use crate::scheme::{check_path, lookup, Directory, NodeState, Onion, OnionScheme, ProcOutput, SchemeError};
use crate::rng::LabRng;
use crate::sphinx::DropReason;
use rand::RngCore;
use std::sync::Arc;

pub const ID_LEN: usize = 16;

pub struct ChainScheme {
    inner: Arc<dyn OnionScheme>,
    chain: TagChain,
    with_id: bool,
}

impl ChainScheme {
    /// Onion-integrity extension with at most `n_max` relays.
    pub fn integrity(inner: Arc<dyn OnionScheme>, k: usize, n_max: usize) -> Self {
        ChainScheme { inner, chain: TagChain::new(n_max, k), with_id: false }
    }

    /// Counterexample with a visible identifier.
    pub fn with_identifier(inner: Arc<dyn OnionScheme>, k: usize, n_max: usize) -> Self {
        ChainScheme { inner, chain: TagChain::new(n_max, k), with_id: true }
    }

    pub fn chain(&self) -> &TagChain {
        &self.chain
    }

    pub fn inner(&self) -> &Arc<dyn OnionScheme> {
        &self.inner
    }

    fn id_len(&self) -> usize {
        if self.with_id {
            ID_LEN
        } else {
            0
        }
    }

    /// Byte range of the identifier inside an onion, if the scheme has one.
    pub fn id_range(&self) -> Option<std::ops::Range<usize>> {
        self.with_id.then(|| self.inner.onion_len()..self.inner.onion_len() + ID_LEN)
    }

    /// Assemble layers from inner layers and chain extensions; exposed for
    /// adversaries that craft their own chains.
    pub fn join(&self, inner: &[u8], id: &[u8], ext: &[u8]) -> Onion {
        let mut v = inner.to_vec();
        if self.with_id {
            v.extend_from_slice(id);
        }
        v.extend_from_slice(ext);
        Onion(v)
    }
}

impl OnionScheme for ChainScheme {
    fn name(&self) -> String {
        if self.with_id {
            format!("broken2({})", self.inner.name())
        } else {
            format!("oi({})", self.inner.name())
        }
    }

    fn max_path_len(&self) -> usize {
        self.inner.max_path_len().min(self.chain.blocks + 1)
    }

    fn message_len(&self) -> usize {
        self.inner.message_len()
    }

    fn onion_len(&self) -> usize {
        self.inner.onion_len() + self.id_len() + self.chain.len()
    }

    fn form_onion(&self, m: &[u8], path: &[String], dir: &Directory, rng: &mut LabRng) -> Result<Vec<Onion>, SchemeError> {
        check_path(self, path, m)?;
        let inner = self.inner.form_onion(m, path, dir, rng)?;
        let mut id = vec![0u8; self.id_len()];
        rng.fill_bytes(&mut id);
        let relays = path[..path.len() - 1]
            .iter()
            .map(|n| Ok(ChainHop { name: n.as_str(), public: lookup(dir, n)? }))
            .collect::<Result<Vec<_>, SchemeError>>()?;
        let inner_bytes: Vec<Vec<u8>> = inner.iter().map(|o| o.0.clone()).collect();
        let id_ref = self.with_id.then_some(id.as_slice());
        let exts = self.chain.build(&inner_bytes, &relays, id_ref, rng)?;
        Ok(inner_bytes.iter().zip(&exts).map(|(o, e)| self.join(o, &id, e)).collect())
    }

    fn proc_onion(&self, node: &mut NodeState, onion: &Onion) -> ProcOutput {
        let (inner, rest) = match split_suffix(onion, self.inner.onion_len(), self.id_len() + self.chain.len()) {
            Ok(parts) => parts,
            Err(r) => return ProcOutput::Fail(r),
        };
        let (id, ext) = rest.split_at(self.id_len());
        match self.inner.proc_onion(node, &Onion(inner.to_vec())) {
            ProcOutput::Relay { next, onion: next_inner } => {
                let id_ref = self.with_id.then_some(id);
                match self.chain.process(&node.keys.secret, &node.name, id_ref, next_inner.as_bytes(), ext) {
                    Some(next_ext) => ProcOutput::Relay { next, onion: self.join(next_inner.as_bytes(), id, &next_ext) },
                    None => ProcOutput::Fail(DropReason::BadTag),
                }
            }
            other => other,
        }
    }

    fn is_duplicate(&self, a: &Onion, b: &Onion) -> bool {
        let n = self.inner.onion_len();
        a.len() >= n && b.len() >= n && self.inner.is_duplicate(&Onion(a.0[..n].to_vec()), &Onion(b.0[..n].to_vec()))
    }

    fn payload_range(&self) -> Option<std::ops::Range<usize>> {
        self.inner.payload_range()
    }
}
