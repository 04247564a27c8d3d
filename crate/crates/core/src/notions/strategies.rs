use super::{AdversaryClass, Communication, Corruption, Notion, NotionGame, Scenario, ScenarioConfig, ScenarioPair};
use crate::ideal::{AdvMessage, Party, Temp};
use crate::rng::LabRng;
use rand::Rng;
use std::collections::{BTreeSet, HashSet};

/// A notion-game adversary: it proposes a scenario pair, then reacts to the
/// functionality's outputs with delivery requests, then guesses.
pub trait Strategy: Send + Sync {
    fn name(&self) -> String;
    fn propose(&self) -> ScenarioPair;
    fn start(&self) -> Box<dyn StrategyRun>;
}

/// Per-challenge state of a strategy.
pub trait StrategyRun {
    /// Outputs since the last call; returns temps to deliver. An empty
    /// answer ends the interaction.
    fn observe(&mut self, msgs: &[AdvMessage]) -> Vec<Temp>;
    fn guess(&mut self, rng: &mut LabRng) -> usize;
}

/// Guesses uniformly and delivers nothing.
pub struct RandomGuess {
    pub pair: ScenarioPair,
}

struct RandomRun;

impl StrategyRun for RandomRun {
    fn observe(&mut self, _: &[AdvMessage]) -> Vec<Temp> {
        Vec::new()
    }

    fn guess(&mut self, rng: &mut LabRng) -> usize {
        rng.gen_range(0..2)
    }
}

impl Strategy for RandomGuess {
    fn name(&self) -> String {
        "random-guess".into()
    }

    fn propose(&self) -> ScenarioPair {
        self.pair.clone()
    }

    fn start(&self) -> Box<dyn StrategyRun> {
        Box::new(RandomRun)
    }
}

fn senders(pair: &ScenarioPair) -> BTreeSet<Party> {
    pair.batches().flatten().map(|c| c.sender.clone()).collect()
}

/// Follow a single onion by delivering only its segments, chaining outputs
/// by party name, then pick the scenario consistent with the observed
/// sender, receiver and, if revealed, message.
pub struct TraceStrategy {
    pub pair: ScenarioPair,
    /// Sender whose onion is followed; any sender of the pair if `None`.
    pub follow: Option<Party>,
}

struct TraceRun {
    pair: ScenarioPair,
    starts: BTreeSet<Party>,
    seen: Vec<(AdvMessage, bool)>,
    sender: Option<Party>,
    at: Option<Party>,
    end: Option<(Party, Option<Vec<u8>>)>,
}

impl TraceRun {
    /// Take the first unused output whose origin satisfies `want` and
    /// advance the chain along it. Returns the origin and, for a segment,
    /// its temp.
    fn step(&mut self, want: impl Fn(&Party) -> bool) -> Option<(Party, Option<Temp>)> {
        let idx = self.seen.iter().position(|(m, used)| !used && m.from_party().is_some_and(&want))?;
        self.seen[idx].1 = true;
        let msg = &self.seen[idx].0;
        let origin = msg.from_party().expect("filtered on origin").clone();
        match msg {
            AdvMessage::Segment { temp, to, .. } => {
                let temp = *temp;
                self.at = Some(to.clone());
                Some((origin, Some(temp)))
            }
            AdvMessage::Final { receiver, message, .. } => {
                self.end = Some((receiver.clone(), message.clone()));
                Some((origin, None))
            }
            AdvMessage::CorruptSender { .. } => unreachable!("filtered on origin"),
        }
    }

    fn consistent(&self, b: usize, receiver: Option<&Party>, message: Option<&Vec<u8>>) -> bool {
        self.pair.scenarios[b].alternatives.iter().flatten().any(|c: &Communication| {
            self.sender.as_ref().map_or(true, |s| *s == c.sender)
                && receiver.map_or(true, |r| *r == c.receiver)
                && message.map_or(true, |m| *m == c.message)
        })
    }
}

impl StrategyRun for TraceRun {
    fn observe(&mut self, msgs: &[AdvMessage]) -> Vec<Temp> {
        self.seen.extend(msgs.iter().map(|m| (m.clone(), false)));
        let mut requests = Vec::new();
        if self.sender.is_none() {
            let starts = self.starts.clone();
            let Some((origin, first)) = self.step(|p| starts.contains(p)) else { return requests };
            self.sender = Some(origin);
            requests.extend(first);
        }
        while self.end.is_none() {
            let Some(at) = self.at.clone() else { break };
            match self.step(|p| *p == at) {
                Some((_, t)) => requests.extend(t),
                None => break,
            }
        }
        requests
    }

    fn guess(&mut self, rng: &mut LabRng) -> usize {
        let (receiver, message) = match &self.end {
            Some((r, m)) => (Some(r.clone()), m.clone()),
            None => (self.at.clone(), None),
        };
        let ok: Vec<usize> = (0..2).filter(|&b| self.consistent(b, receiver.as_ref(), message.as_ref())).collect();
        match ok.as_slice() {
            [b] => *b,
            _ => rng.gen_range(0..2),
        }
    }
}

impl Strategy for TraceStrategy {
    fn name(&self) -> String {
        match &self.follow {
            Some(p) => format!("trace({p})"),
            None => "trace".into(),
        }
    }

    fn propose(&self) -> ScenarioPair {
        self.pair.clone()
    }

    fn start(&self) -> Box<dyn StrategyRun> {
        let starts = match &self.follow {
            Some(p) => [p.clone()].into(),
            None => senders(&self.pair),
        };
        Box::new(TraceRun { pair: self.pair.clone(), starts, seen: Vec::new(), sender: None, at: None, end: None })
    }
}

/// Compare the origins of the first-hop outputs: one sender means
/// scenario 0, two senders scenario 1.
pub struct FirstHopStrategy {
    pub pair: ScenarioPair,
}

struct FirstHopRun {
    senders: BTreeSet<Party>,
    origins: Vec<Party>,
}

impl StrategyRun for FirstHopRun {
    fn observe(&mut self, msgs: &[AdvMessage]) -> Vec<Temp> {
        for m in msgs {
            if let Some(p) = m.from_party().filter(|p| self.senders.contains(*p)) {
                self.origins.push(p.clone());
            }
        }
        Vec::new()
    }

    fn guess(&mut self, rng: &mut LabRng) -> usize {
        match self.origins.as_slice() {
            [a, b, ..] => usize::from(a != b),
            _ => rng.gen_range(0..2),
        }
    }
}

impl Strategy for FirstHopStrategy {
    fn name(&self) -> String {
        "first-hop-senders".into()
    }

    fn propose(&self) -> ScenarioPair {
        self.pair.clone()
    }

    fn start(&self) -> Box<dyn StrategyRun> {
        Box::new(FirstHopRun { senders: senders(&self.pair), origins: Vec::new() })
    }
}

/// Deliver everything and compare the receivers that the final segments
/// reach: one receiver means scenario 0, two receivers scenario 1.
pub struct EndpointStrategy {
    pub pair: ScenarioPair,
}

struct EndpointRun {
    receivers: BTreeSet<Party>,
    reached: Vec<Party>,
    delivered: HashSet<Temp>,
}

impl StrategyRun for EndpointRun {
    fn observe(&mut self, msgs: &[AdvMessage]) -> Vec<Temp> {
        let mut requests = Vec::new();
        for m in msgs {
            match m {
                AdvMessage::Segment { temp, to, .. } => {
                    if self.receivers.contains(to) {
                        self.reached.push(to.clone());
                    }
                    if self.delivered.insert(*temp) {
                        requests.push(*temp);
                    }
                }
                AdvMessage::Final { receiver, .. } if self.receivers.contains(receiver) => {
                    self.reached.push(receiver.clone())
                }
                _ => {}
            }
        }
        requests
    }

    fn guess(&mut self, rng: &mut LabRng) -> usize {
        match self.reached.as_slice() {
            [a, b, ..] => usize::from(a != b),
            _ => rng.gen_range(0..2),
        }
    }
}

impl Strategy for EndpointStrategy {
    fn name(&self) -> String {
        "endpoint-receivers".into()
    }

    fn propose(&self) -> ScenarioPair {
        self.pair.clone()
    }

    fn start(&self) -> Box<dyn StrategyRun> {
        let receivers = self.pair.batches().flatten().map(|c| c.receiver.clone()).collect();
        Box::new(EndpointRun { receivers, reached: Vec::new(), delivered: HashSet::new() })
    }
}

/// Deliver everything and count how often `a` and `c` appear: as origin
/// of an output, or as its destination when `by_receiver` is set. The
/// pair must have `a` in the rare role in scenario 0.
pub struct CountingStrategy {
    pub pair: ScenarioPair,
    pub a: Party,
    pub c: Party,
    pub by_receiver: bool,
}

struct CountingRun {
    a: Party,
    c: Party,
    by_receiver: bool,
    counts: (usize, usize),
    delivered: HashSet<Temp>,
}

impl StrategyRun for CountingRun {
    fn observe(&mut self, msgs: &[AdvMessage]) -> Vec<Temp> {
        let mut requests = Vec::new();
        for m in msgs {
            let party = match m {
                AdvMessage::Segment { to, .. } if self.by_receiver => Some(to),
                AdvMessage::Final { receiver, .. } if self.by_receiver => Some(receiver),
                _ if self.by_receiver => None,
                _ => m.from_party(),
            };
            if party == Some(&self.a) {
                self.counts.0 += 1;
            } else if party == Some(&self.c) {
                self.counts.1 += 1;
            }
            if let AdvMessage::Segment { temp, .. } = m {
                if self.delivered.insert(*temp) {
                    requests.push(*temp);
                }
            }
        }
        requests
    }

    fn guess(&mut self, rng: &mut LabRng) -> usize {
        use std::cmp::Ordering::*;
        match self.counts.0.cmp(&self.counts.1) {
            Greater => 1,
            Less => 0,
            Equal => rng.gen_range(0..2),
        }
    }
}

impl Strategy for CountingStrategy {
    fn name(&self) -> String {
        format!("counting({},{})", self.a, self.c)
    }

    fn propose(&self) -> ScenarioPair {
        self.pair.clone()
    }

    fn start(&self) -> Box<dyn StrategyRun> {
        Box::new(CountingRun {
            a: self.a.clone(),
            c: self.c.clone(),
            by_receiver: self.by_receiver,
            counts: (0, 0),
            delivered: HashSet::new(),
        })
    }
}

/// Lower bound on the counting attack's win probability.
pub fn sfl_bound(honest_relays: usize, max_path: usize, parties: usize, k: u32) -> f64 {
    let q = (max_path as f64 - 1.0) / (parties as f64 - 1.0);
    1.0 - (1.0 / honest_relays as f64 + q.powi(k as i32) + q.powi(k as i32 - 1) / (parties as f64 - 1.0))
}

/// A ready-to-run attack: configuration, corruption option and strategy.
pub struct AttackSetup {
    pub game: NotionGame,
    pub strategy: Box<dyn Strategy>,
}

const M1: &[u8] = b"alpha";
const M2: &[u8] = b"bravo";

fn small_config(corrupt_receivers: bool) -> ScenarioConfig {
    let mut corrupted: BTreeSet<Party> = ["R4", "R5"].iter().map(|s| s.to_string()).collect();
    if corrupt_receivers {
        corrupted.extend(["B".to_string(), "D".to_string()]);
    }
    ScenarioConfig {
        users: ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
        relays: (0..6).map(|i| format!("R{i}")).collect(),
        corrupted,
        max_path: 4,
    }
}

fn com(s: &str, r: &str, m: &[u8]) -> Communication {
    Communication::new(s, r, m, &["R0"])
}

fn one(b0: Vec<Communication>, b1: Vec<Communication>) -> ScenarioPair {
    ScenarioPair::new(Scenario::single(b0), Scenario::single(b1))
}

fn alternatives(s0: [Vec<Communication>; 2], s1: [Vec<Communication>; 2]) -> ScenarioPair {
    ScenarioPair::new(Scenario::choice(s0.into()), Scenario::choice(s1.into()))
}

/// Configuration with `#P = 20` parties, half of them corrupt, `N = 5`, and
/// a scenario where one party sends once and another `k` times.
fn frequency_setup(notion: Notion, k: usize) -> (ScenarioConfig, ScenarioPair, Party, Party) {
    let parties: Vec<Party> = (0..20).map(|i| format!("P{i:02}")).collect();
    let cfg = ScenarioConfig {
        users: parties.clone(),
        relays: parties.clone(),
        corrupted: parties[10..].iter().cloned().collect(),
        max_path: 5,
    };
    let (a, c, x, y) = (&parties[0], &parties[1], &parties[2], &parties[3]);
    let msg = |i: usize| format!("m{i}").into_bytes();
    let build = |rare: (&Party, &Party), many: (&Party, &Party)| -> Vec<Communication> {
        let mut b = vec![Communication::new(rare.0, rare.1, &msg(0), &[])];
        b.extend((1..=k).map(|i| Communication::new(many.0, many.1, &msg(i), &[])));
        b
    };
    let (pair, rare, common) = if notion == Notion::SflP {
        (one(build((a, x), (c, y)), build((c, x), (a, y))), a, c)
    } else {
        (one(build((a, x), (a, y)), build((a, y), (a, x))), x, y)
    };
    (cfg, pair, rare.clone(), common.clone())
}

/// The standard attack for each notion together with a configuration in
/// which it is admissible. `class` selects the adversary class.
pub fn standard_attack(notion: Notion, class: AdversaryClass) -> AttackSetup {
    use Notion::*;
    let (corruption, corrupt_receivers) = match notion {
        SmlPair | Smo | RmlPair | Rmo | MoLen | Sml => (Corruption::NoCorruptSender, true),
        _ => (Corruption::None, false),
    };
    let trace = |pair: ScenarioPair, follow: Option<&str>| -> Box<dyn Strategy> {
        Box::new(TraceStrategy { pair, follow: follow.map(str::to_string) })
    };
    let (config, strategy): (ScenarioConfig, Box<dyn Strategy>) = match notion {
        SflP | RflP => {
            let (cfg, pair, a, c) = frequency_setup(notion, 6);
            let s = CountingStrategy { pair, a, c, by_receiver: notion == RflP };
            (cfg, Box::new(s))
        }
        _ => {
            let cfg = small_config(corrupt_receivers);
            let s = match notion {
                Mo => trace(one(vec![com("A", "B", M1)], vec![com("A", "B", M2)]), None),
                MoLen => trace(one(vec![com("A", "B", M1)], vec![com("A", "B", M2)]), None),
                Sml => trace(
                    one(vec![com("A", "B", M1), com("C", "B", M2)], vec![com("C", "B", M1), com("A", "B", M2)]),
                    Some("A"),
                ),
                Rml | Srl => trace(
                    one(vec![com("A", "B", M1), com("C", "D", M2)], vec![com("A", "D", M1), com("C", "B", M2)]),
                    Some("A"),
                ),
                SmlPair => trace(
                    one(vec![com("A", "B", M1), com("C", "B", M2)], vec![com("A", "B", M2), com("C", "B", M1)]),
                    Some("A"),
                ),
                RmlPair => trace(
                    one(vec![com("A", "B", M1), com("A", "D", M2)], vec![com("A", "B", M2), com("A", "D", M1)]),
                    None,
                ),
                Sro => trace(
                    alternatives(
                        [vec![com("A", "B", M1)], vec![com("C", "D", M1)]],
                        [vec![com("A", "D", M1)], vec![com("C", "B", M1)]],
                    ),
                    None,
                ),
                Smo => trace(
                    alternatives(
                        [vec![com("A", "B", M1)], vec![com("C", "B", M2)]],
                        [vec![com("A", "B", M2)], vec![com("C", "B", M1)]],
                    ),
                    None,
                ),
                Rmo => trace(
                    alternatives(
                        [vec![com("A", "B", M1)], vec![com("A", "D", M2)]],
                        [vec![com("A", "B", M2)], vec![com("A", "D", M1)]],
                    ),
                    None,
                ),
                TwoSl => Box::new(FirstHopStrategy {
                    pair: alternatives(
                        [vec![com("A", "B", M1), com("A", "D", M2)], vec![com("C", "B", M1), com("C", "D", M2)]],
                        [vec![com("A", "B", M1), com("C", "D", M2)], vec![com("C", "B", M1), com("A", "D", M2)]],
                    ),
                }),
                TwoRl => Box::new(EndpointStrategy {
                    pair: alternatives(
                        [vec![com("A", "B", M1), com("C", "B", M2)], vec![com("A", "D", M1), com("C", "D", M2)]],
                        [vec![com("A", "B", M1), com("C", "D", M2)], vec![com("A", "D", M1), com("C", "B", M2)]],
                    ),
                }),
                SflP | RflP => unreachable!(),
            };
            (cfg, s)
        }
    };
    AttackSetup { game: NotionGame { notion, corruption, class, config }, strategy }
}
