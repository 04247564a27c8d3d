//! Ideal onion-routing functionality. The adversary sees only which honest
//! party an onion is headed to next, the corrupt relays it passes on the
//! way, and, once every remaining party is corrupt, the message itself.

use crate::rng::LabRng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

pub type Party = String;

/// 128-bit handle for an onion segment, fresh per hop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Temp(pub u128);

impl Temp {
    pub fn fresh(rng: &mut LabRng) -> Temp {
        Temp(rng.gen())
    }
}

impl fmt::Display for Temp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealOnion {
    pub sid: u128,
    pub sender: Party,
    pub receiver: Party,
    pub message: Option<Vec<u8>>,
    pub path: Vec<Party>,
    /// Position reached: 0 is the sender, `n + 1` the receiver.
    pub i: usize,
}

impl IdealOnion {
    pub fn n(&self) -> usize {
        self.path.len()
    }

    fn party_at(&self, j: usize) -> &Party {
        match j {
            0 => &self.sender,
            j if j <= self.n() => &self.path[j - 1],
            _ => &self.receiver,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SenderPhase {
    Start,
    Temp(Temp),
    End,
}

/// Output to the adversary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdvMessage {
    /// Onion `temp` from `from`, through corrupt `via`, to honest `to`.
    Segment { temp: Temp, from: Party, via: Vec<Party>, to: Party },
    /// Every remaining party is corrupt: the rest of the route and the message.
    Final { from: Party, via: Vec<Party>, receiver: Party, message: Option<Vec<u8>> },
    /// Full record of an onion whose sender is corrupt.
    CorruptSender { sid: u128, receiver: Party, message: Option<Vec<u8>>, path: Vec<Party>, phase: SenderPhase },
}

impl AdvMessage {
    pub fn from_party(&self) -> Option<&Party> {
        match self {
            AdvMessage::Segment { from, .. } | AdvMessage::Final { from, .. } => Some(from),
            AdvMessage::CorruptSender { .. } => None,
        }
    }
}

impl fmt::Display for AdvMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdvMessage::Segment { temp, from, via, to } => {
                write!(f, "SEG temp={temp} from={from} via=[{}] to={to}", via.join(","))
            }
            AdvMessage::Final { from, via, receiver, message } => write!(
                f,
                "FIN from={from} via=[{}] to={receiver} msg={}",
                via.join(","),
                message.as_ref().map(hex::encode).unwrap_or_else(|| "-".into())
            ),
            AdvMessage::CorruptSender { sid, receiver, message, path, phase } => {
                let phase = match phase {
                    SenderPhase::Start => "start".to_string(),
                    SenderPhase::Temp(t) => format!("temp:{t}"),
                    SenderPhase::End => "end".to_string(),
                };
                write!(
                    f,
                    "CSI sid={sid:032x} to={receiver} path=[{}] msg={} phase={phase}",
                    path.join(","),
                    message.as_ref().map(hex::encode).unwrap_or_else(|| "-".into())
                )
            }
        }
    }
}

/// Output to honest parties (played by the environment).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvMessage {
    Received { party: Party, temp: Temp },
    Delivered { receiver: Party, message: Vec<u8> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("path of {len} relays exceeds the maximum of {max}")]
    PathTooLong { len: usize, max: usize },
}

pub struct IdealFunctionality {
    bad: BTreeSet<Party>,
    max_path: usize,
    list: Vec<(Temp, IdealOnion, usize)>,
    buffers: HashMap<Party, Vec<(Temp, IdealOnion)>>,
    adv_out: Vec<AdvMessage>,
    env_out: Vec<EnvMessage>,
}

impl IdealFunctionality {
    pub fn new(bad: BTreeSet<Party>, max_path: usize) -> Self {
        IdealFunctionality {
            bad,
            max_path,
            list: Vec::new(),
            buffers: HashMap::new(),
            adv_out: Vec::new(),
            env_out: Vec::new(),
        }
    }

    pub fn is_corrupt(&self, p: &str) -> bool {
        self.bad.contains(p)
    }

    pub fn process_new_onion(
        &mut self,
        sender: &str,
        receiver: &str,
        message: Option<Vec<u8>>,
        path: Vec<Party>,
        rng: &mut LabRng,
    ) -> Result<(), IdealError> {
        if path.len() > self.max_path {
            return Err(IdealError::PathTooLong { len: path.len(), max: self.max_path });
        }
        let onion = IdealOnion {
            sid: rng.gen(),
            sender: sender.to_string(),
            receiver: receiver.to_string(),
            message,
            path,
            i: 0,
        };
        self.output_corrupt_sender(&onion, SenderPhase::Start);
        self.next_step(onion, rng);
        Ok(())
    }

    fn output_corrupt_sender(&mut self, o: &IdealOnion, phase: SenderPhase) {
        if self.bad.contains(&o.sender) {
            self.adv_out.push(AdvMessage::CorruptSender {
                sid: o.sid,
                receiver: o.receiver.clone(),
                message: o.message.clone(),
                path: o.path.clone(),
                phase,
            });
        }
    }

    fn next_step(&mut self, o: IdealOnion, rng: &mut LabRng) {
        let last = o.n() + 1;
        let honest = (o.i + 1..=last).find(|&j| !self.bad.contains(o.party_at(j)));
        match honest {
            None => {
                self.adv_out.push(AdvMessage::Final {
                    from: o.party_at(o.i).clone(),
                    via: o.path[o.i.min(o.n())..].to_vec(),
                    receiver: o.receiver.clone(),
                    message: o.message.clone(),
                });
                self.output_corrupt_sender(&o, SenderPhase::End);
            }
            Some(j) => {
                let temp = Temp::fresh(rng);
                self.adv_out.push(AdvMessage::Segment {
                    temp,
                    from: o.party_at(o.i).clone(),
                    via: (o.i + 1..j).map(|x| o.party_at(x).clone()).collect(),
                    to: o.party_at(j).clone(),
                });
                self.output_corrupt_sender(&o, SenderPhase::Temp(temp));
                self.list.push((temp, o, j));
            }
        }
    }

    /// Adversary delivers segment `temp`. Unknown temps are ignored.
    pub fn deliver_message(&mut self, temp: Temp, rng: &mut LabRng) {
        let Some((_, o, j)) = self.list.iter().find(|(t, _, _)| *t == temp).cloned() else {
            return;
        };
        let mut o = o;
        o.i = j;
        if j < o.n() + 1 {
            let fresh = Temp::fresh(rng);
            let party = o.party_at(j).clone();
            self.env_out.push(EnvMessage::Received { party: party.clone(), temp: fresh });
            self.buffers.entry(party).or_default().push((fresh, o));
        } else if let Some(m) = &o.message {
            self.env_out.push(EnvMessage::Delivered { receiver: o.receiver.clone(), message: m.clone() });
        }
    }

    /// Honest `party` forwards its buffered onion `temp`.
    pub fn forward_onion(&mut self, party: &str, temp: Temp, rng: &mut LabRng) {
        let Some(buf) = self.buffers.get_mut(party) else {
            return;
        };
        let Some(pos) = buf.iter().position(|(t, _)| *t == temp) else {
            return;
        };
        let (_, o) = buf.remove(pos);
        self.next_step(o, rng);
    }

    /// Honest relays forward as soon as they are told of an arrival.
    /// Returns the deliveries to honest receivers.
    pub fn run_environment(&mut self, rng: &mut LabRng) -> Vec<(Party, Vec<u8>)> {
        let mut delivered = Vec::new();
        while !self.env_out.is_empty() {
            for msg in std::mem::take(&mut self.env_out) {
                match msg {
                    EnvMessage::Received { party, temp } => self.forward_onion(&party, temp, rng),
                    EnvMessage::Delivered { receiver, message } => delivered.push((receiver, message)),
                }
            }
        }
        delivered
    }

    pub fn drain_adversary(&mut self) -> Vec<AdvMessage> {
        std::mem::take(&mut self.adv_out)
    }

    pub fn drain_environment(&mut self) -> Vec<EnvMessage> {
        std::mem::take(&mut self.env_out)
    }
}

/// Rename temps by order of first appearance so traces from independent
/// runs can be compared.
pub fn canonical_trace(msgs: &[AdvMessage]) -> Vec<String> {
    let mut names: HashMap<Temp, usize> = HashMap::new();
    msgs.iter()
        .map(|m| {
            let mut m = m.clone();
            let mut rename = |t: &mut Temp| {
                let next = names.len();
                *t = Temp(*names.entry(*t).or_insert(next) as u128);
            };
            match &mut m {
                AdvMessage::Segment { temp, .. } => rename(temp),
                AdvMessage::CorruptSender { phase: SenderPhase::Temp(t), sid, .. } => {
                    rename(t);
                    *sid = 0;
                }
                AdvMessage::CorruptSender { sid, .. } => *sid = 0,
                AdvMessage::Final { .. } => {}
            }
            m.to_string()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn set(xs: &[&str]) -> BTreeSet<Party> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn path(xs: &[&str]) -> Vec<Party> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn segments_skip_corrupt_relays() {
        let mut rng = seeded(1);
        let mut f = IdealFunctionality::new(set(&["x", "y"]), 5);
        f.process_new_onion("a", "b", Some(b"m".to_vec()), path(&["x", "h", "y"]), &mut rng).unwrap();
        let out = f.drain_adversary();
        assert_eq!(out.len(), 1);
        let AdvMessage::Segment { temp, from, via, to } = &out[0] else { panic!() };
        assert_eq!((from.as_str(), via.clone(), to.as_str()), ("a", path(&["x"]), "h"));
        f.deliver_message(*temp, &mut rng);
        f.run_environment(&mut rng);
        let out = f.drain_adversary();
        let AdvMessage::Segment { temp, from, via, to } = &out[0] else { panic!() };
        assert_eq!((from.as_str(), via.clone(), to.as_str()), ("h", path(&["y"]), "b"));
        f.deliver_message(*temp, &mut rng);
        assert_eq!(f.run_environment(&mut rng), vec![("b".to_string(), b"m".to_vec())]);
    }

    #[test]
    fn corrupt_tail_reveals_message() {
        let mut rng = seeded(2);
        let mut f = IdealFunctionality::new(set(&["x", "b"]), 5);
        f.process_new_onion("a", "b", Some(b"hi".to_vec()), path(&["x"]), &mut rng).unwrap();
        let out = f.drain_adversary();
        assert_eq!(
            out,
            vec![AdvMessage::Final { from: "a".into(), via: path(&["x"]), receiver: "b".into(), message: Some(b"hi".to_vec()) }]
        );
    }

    #[test]
    fn corrupt_sender_sees_everything_and_limits_apply() {
        let mut rng = seeded(3);
        let mut f = IdealFunctionality::new(set(&["a"]), 2);
        assert_eq!(
            f.process_new_onion("a", "b", None, path(&["h", "i", "j"]), &mut rng),
            Err(IdealError::PathTooLong { len: 3, max: 2 })
        );
        f.process_new_onion("a", "b", None, path(&["h"]), &mut rng).unwrap();
        let out = f.drain_adversary();
        assert!(matches!(out[0], AdvMessage::CorruptSender { phase: SenderPhase::Start, .. }));
        assert!(matches!(out[1], AdvMessage::Segment { .. }));
        assert!(matches!(out[2], AdvMessage::CorruptSender { phase: SenderPhase::Temp(_), .. }));
    }

    #[test]
    fn unknown_temps_are_ignored() {
        let mut rng = seeded(4);
        let mut f = IdealFunctionality::new(set(&[]), 5);
        f.deliver_message(Temp(7), &mut rng);
        f.forward_onion("h", Temp(7), &mut rng);
        assert!(f.drain_adversary().is_empty());
        assert!(f.drain_environment().is_empty());
    }

    #[test]
    fn canonical_trace_renames_temps() {
        let a = vec![
            AdvMessage::Segment { temp: Temp(99), from: "a".into(), via: vec![], to: "h".into() },
            AdvMessage::Segment { temp: Temp(5), from: "h".into(), via: vec![], to: "b".into() },
        ];
        let b = vec![
            AdvMessage::Segment { temp: Temp(1), from: "a".into(), via: vec![], to: "h".into() },
            AdvMessage::Segment { temp: Temp(2), from: "h".into(), via: vec![], to: "b".into() },
        ];
        assert_eq!(canonical_trace(&a), canonical_trace(&b));
    }
}
