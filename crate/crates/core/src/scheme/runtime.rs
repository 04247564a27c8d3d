use super::{NodeState, Onion, OnionScheme, ProcOutput};
use crate::ideal::Temp;
use crate::rng::LabRng;
use crate::sphinx::DropReason;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("no buffered onion under temp {0}")]
    UnknownTemp(Temp),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuntimeEvent {
    /// Processed and held until forwarded under `temp`.
    Buffered { temp: Temp, next: String },
    Delivered(Vec<u8>),
    Dropped(DropReason),
}

/// A router that processes onions on receipt and holds each result until
/// the environment asks it to forward.
pub struct NodeRuntime {
    pub state: NodeState,
    buffer: HashMap<Temp, (String, Onion)>,
}

impl NodeRuntime {
    pub fn new(state: NodeState) -> Self {
        NodeRuntime { state, buffer: HashMap::new() }
    }

    pub fn receive(&mut self, scheme: &dyn OnionScheme, onion: &Onion, rng: &mut LabRng) -> RuntimeEvent {
        match scheme.proc_onion(&mut self.state, onion) {
            ProcOutput::Relay { next, onion } => {
                let temp = Temp::fresh(rng);
                self.buffer.insert(temp, (next.clone(), onion));
                RuntimeEvent::Buffered { temp, next }
            }
            ProcOutput::Receive { message } => RuntimeEvent::Delivered(message),
            ProcOutput::Fail(r) => RuntimeEvent::Dropped(r),
        }
    }

    pub fn forward(&mut self, temp: Temp) -> Result<(String, Onion), RuntimeError> {
        self.buffer.remove(&temp).ok_or(RuntimeError::UnknownTemp(temp))
    }

    pub fn pending(&self) -> usize {
        self.buffer.len()
    }
}
