use super::{check_path, lookup, Directory, NodeState, Onion, OnionScheme, ProcOutput, SchemeError};
use crate::primitives::{SuiteParams, ELEMENT_LEN};
use crate::rng::LabRng;
use crate::sphinx::{
    create_forward_message, max_message_len, process_packet, unwrap_with_secret, Address, Hop, Outcome,
    SphinxError, Variant,
};

/// Sphinx as an onion-routing scheme: the last router on the path is the
/// exit and also the receiver.
#[derive(Clone, Copy, Debug)]
pub struct SphinxScheme {
    pub params: SuiteParams,
    pub variant: Variant,
}

impl SphinxScheme {
    pub fn new(params: SuiteParams, variant: Variant) -> Self {
        SphinxScheme { params, variant }
    }
}

impl OnionScheme for SphinxScheme {
    fn name(&self) -> String {
        self.variant.name().to_string()
    }

    fn max_path_len(&self) -> usize {
        self.params.max_hops
    }

    fn message_len(&self) -> usize {
        max_message_len(&self.params)
    }

    fn onion_len(&self) -> usize {
        self.params.packet_len()
    }

    fn form_onion(&self, m: &[u8], path: &[String], dir: &Directory, rng: &mut LabRng) -> Result<Vec<Onion>, SchemeError> {
        check_path(self, path, m)?;
        let hops = path
            .iter()
            .map(|n| Ok(Hop { name: n.clone(), public: lookup(dir, n)? }))
            .collect::<Result<Vec<_>, SchemeError>>()?;
        let receiver = Address::Dest(path.last().expect("non-empty path").clone());
        let (first, secrets) = create_forward_message(&self.params, self.variant, &hops, &receiver, m, rng)?;
        let mut layers = vec![Onion(first.to_bytes())];
        let mut cur = first;
        for s in &secrets[..secrets.len() - 1] {
            match unwrap_with_secret(&self.params, self.variant, &cur, s, None) {
                Outcome::Forward { packet, .. } => {
                    layers.push(Onion(packet.to_bytes()));
                    cur = packet;
                }
                _ => return Err(SphinxError::Unsupported("sender-side unwrap did not forward").into()),
            }
        }
        Ok(layers)
    }

    fn proc_onion(&self, node: &mut NodeState, onion: &Onion) -> ProcOutput {
        match process_packet(&self.params, self.variant, &node.keys.secret, &mut node.replay, onion.as_bytes()) {
            Outcome::Forward { next, packet } => ProcOutput::Relay { next, onion: Onion(packet.to_bytes()) },
            Outcome::Deliver { message, .. } => ProcOutput::Receive { message },
            Outcome::Drop(r) => ProcOutput::Fail(r),
        }
    }

    /// Same group element α means the same shared secret at every router,
    /// which is what the replay store keys on.
    fn is_duplicate(&self, a: &Onion, b: &Onion) -> bool {
        a.len() >= ELEMENT_LEN && b.len() >= ELEMENT_LEN && a.0[..ELEMENT_LEN] == b.0[..ELEMENT_LEN]
    }

    fn payload_range(&self) -> Option<std::ops::Range<usize>> {
        Some(self.params.header_len()..self.params.packet_len())
    }
}
