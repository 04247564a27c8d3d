use super::{Directory, NodeState, Onion, OnionScheme, ProcOutput};
use crate::rng::LabRng;
use std::collections::BTreeMap;

/// A set of routers with fresh keys and the public directory.
#[derive(Clone, Debug)]
pub struct Network {
    pub dir: Directory,
    pub nodes: BTreeMap<String, NodeState>,
}

/// What happened to an onion sent along its path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// `(router, onion it received)` in order.
    pub hops: Vec<(String, Onion)>,
    /// Final processing result.
    pub end: ProcOutput,
}

impl Network {
    pub fn generate<S: AsRef<str>>(scheme: &dyn OnionScheme, names: &[S], rng: &mut LabRng) -> Self {
        let mut dir = Directory::new();
        let mut nodes = BTreeMap::new();
        for n in names {
            let keys = scheme.keygen(rng);
            dir.insert(n.as_ref().to_string(), keys.public);
            nodes.insert(n.as_ref().to_string(), NodeState::new(n.as_ref(), keys));
        }
        Network { dir, nodes }
    }

    /// Router names `P00, P01, …`.
    pub fn names(count: usize) -> Vec<String> {
        (0..count).map(|i| format!("P{i:02}")).collect()
    }

    pub fn node_mut(&mut self, name: &str) -> Option<&mut NodeState> {
        self.nodes.get_mut(name)
    }

    /// Process once at `at`; an unknown router yields `None`.
    pub fn process(&mut self, scheme: &dyn OnionScheme, at: &str, onion: &Onion) -> Option<ProcOutput> {
        let node = self.nodes.get_mut(at)?;
        Some(scheme.proc_onion(node, onion))
    }

    /// Relay `onion` from `first` until it is received, dropped, or sent to
    /// a router outside the network.
    pub fn route(&mut self, scheme: &dyn OnionScheme, first: &str, onion: Onion) -> Trace {
        let mut hops = Vec::new();
        let mut at = first.to_string();
        let mut cur = onion;
        loop {
            hops.push((at.clone(), cur.clone()));
            match self.process(scheme, &at, &cur) {
                Some(ProcOutput::Relay { next, onion }) if self.nodes.contains_key(&next) => {
                    at = next;
                    cur = onion;
                }
                Some(end) => return Trace { hops, end },
                None => return Trace { hops, end: ProcOutput::Fail(crate::sphinx::DropReason::Malformed) },
            }
        }
    }
}
