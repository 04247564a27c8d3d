//! Wrap-resistance extension: each relay appends a MAC of its own identity
//! under a key derived from its secret and a processing counter, so a layer
//! cannot be reproduced by processing at a different router.

use super::split_suffix;
use crate::primitives::{kdf, mac, xof_bytes, SymKey};
use crate::scheme::{Directory, NodeState, Onion, OnionScheme, ProcOutput, SchemeError};
use crate::rng::LabRng;
use rand::RngCore;
use std::sync::Arc;

pub struct WrapResistant {
    inner: Arc<dyn OnionScheme>,
    k: usize,
}

impl WrapResistant {
    pub fn new(inner: Arc<dyn OnionScheme>, k: usize) -> Self {
        WrapResistant { inner, k }
    }

    fn tag_for(&self, node: &mut NodeState) -> Vec<u8> {
        let base = SymKey::from_bytes(xof_bytes(b"wr-secret", &[&node.keys.secret.to_bytes()], self.k));
        let key = kdf(&node.counter.to_be_bytes(), &base);
        node.counter += 1;
        mac(&key, &[node.name.as_bytes()])
    }
}

impl OnionScheme for WrapResistant {
    fn name(&self) -> String {
        format!("wr({})", self.inner.name())
    }

    fn max_path_len(&self) -> usize {
        self.inner.max_path_len()
    }

    fn message_len(&self) -> usize {
        self.inner.message_len()
    }

    fn onion_len(&self) -> usize {
        self.inner.onion_len() + self.k
    }

    /// Layer 1 carries the sender's random tag. Later tags depend on relay
    /// secrets the sender does not hold; they are filled with fresh random
    /// values of the same length.
    fn form_onion(&self, m: &[u8], path: &[String], dir: &Directory, rng: &mut LabRng) -> Result<Vec<Onion>, SchemeError> {
        let layers = self.inner.form_onion(m, path, dir, rng)?;
        Ok(layers
            .into_iter()
            .map(|o| {
                let mut t = vec![0u8; self.k];
                rng.fill_bytes(&mut t);
                let mut v = o.0;
                v.extend(t);
                Onion(v)
            })
            .collect())
    }

    fn proc_onion(&self, node: &mut NodeState, onion: &Onion) -> ProcOutput {
        let (inner, _incoming) = match split_suffix(onion, self.inner.onion_len(), self.k) {
            Ok(parts) => parts,
            Err(r) => return ProcOutput::Fail(r),
        };
        match self.inner.proc_onion(node, &Onion(inner.to_vec())) {
            ProcOutput::Relay { next, onion } => {
                let mut v = onion.0;
                v.extend(self.tag_for(node));
                ProcOutput::Relay { next, onion: Onion(v) }
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
