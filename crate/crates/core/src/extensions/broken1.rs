//! Counterexample: the sender appends a fixed-width encoding of the whole
//! path to the message, so a corrupt receiver reads the route.

use crate::scheme::{check_path, Directory, NodeState, Onion, OnionScheme, ProcOutput, SchemeError};
use crate::rng::LabRng;
use crate::sphinx::{Address, DropReason};
use std::sync::Arc;

pub struct Broken1 {
    inner: Arc<dyn OnionScheme>,
    k: usize,
}

impl Broken1 {
    pub fn new(inner: Arc<dyn OnionScheme>, k: usize) -> Self {
        Broken1 { inner, k }
    }

    /// l_P: a count byte and one κ-byte slot per possible router.
    pub fn path_field_len(&self) -> usize {
        1 + self.inner.max_path_len() * self.k
    }

    fn encode_path(&self, path: &[String]) -> Result<Vec<u8>, SchemeError> {
        let mut out = vec![0u8; self.path_field_len()];
        out[0] = path.len() as u8;
        for (i, name) in path.iter().enumerate() {
            let slot = Address::Node(name.clone()).encode(self.k).map_err(SchemeError::from)?;
            out[1 + i * self.k..1 + (i + 1) * self.k].copy_from_slice(&slot);
        }
        Ok(out)
    }

    fn decode_path(&self, field: &[u8]) -> Option<Vec<String>> {
        let count = *field.first()? as usize;
        (0..count)
            .map(|i| match Address::decode(field.get(1 + i * self.k..1 + (i + 1) * self.k)?) {
                Some(Address::Node(n)) => Some(n),
                _ => None,
            })
            .collect()
    }

    /// What a receiver that skips the stripping step sees: the route the
    /// sender embedded.
    pub fn read_embedded_path(&self, node: &mut NodeState, onion: &Onion) -> Option<Vec<String>> {
        match self.inner.proc_onion(node, onion) {
            ProcOutput::Receive { message } if message.len() >= self.path_field_len() => {
                self.decode_path(&message[message.len() - self.path_field_len()..])
            }
            _ => None,
        }
    }
}

impl OnionScheme for Broken1 {
    fn name(&self) -> String {
        format!("broken1({})", self.inner.name())
    }

    fn max_path_len(&self) -> usize {
        self.inner.max_path_len()
    }

    fn message_len(&self) -> usize {
        self.inner.message_len() - self.path_field_len()
    }

    fn onion_len(&self) -> usize {
        self.inner.onion_len()
    }

    fn form_onion(&self, m: &[u8], path: &[String], dir: &Directory, rng: &mut LabRng) -> Result<Vec<Onion>, SchemeError> {
        check_path(self, path, m)?;
        let mut extended = m.to_vec();
        extended.extend(self.encode_path(path)?);
        self.inner.form_onion(&extended, path, dir, rng)
    }

    fn proc_onion(&self, node: &mut NodeState, onion: &Onion) -> ProcOutput {
        match self.inner.proc_onion(node, onion) {
            ProcOutput::Receive { mut message } => {
                if message.len() < self.path_field_len() {
                    return ProcOutput::Fail(DropReason::Malformed);
                }
                message.truncate(message.len() - self.path_field_len());
                ProcOutput::Receive { message }
            }
            other => other,
        }
    }

    fn is_duplicate(&self, a: &Onion, b: &Onion) -> bool {
        self.inner.is_duplicate(a, b)
    }

    fn payload_range(&self) -> Option<std::ops::Range<usize>> {
        self.inner.payload_range()
    }
}
