//! Built-in adversaries for the indistinguishability games. Each one picks
//! a challenge input, looks at the challenger's output and guesses the bit.
//! Where a distinguisher has nothing to go on it guesses at random.

use super::{AdversaryContext, ChallengeInput, ChallengeView, GameId, Modification, Oracle, OracleAnswer};
use crate::extensions::Broken1;
use crate::primitives::SuiteParams;
use crate::rng::LabRng;
use crate::scheme::{scheme_by_name, Onion, ProcOutput};
use crate::sphinx::{exit_path_length_bound, SphinxPacket};
use rand::Rng;
use std::collections::HashSet;
use std::sync::Arc;

pub trait Distinguisher: Send + Sync {
    fn name(&self) -> String;

    fn choose(&self, ctx: &AdversaryContext<'_>, oracle: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
        let _ = oracle;
        standard_input(ctx, 3, 2, rng)
    }

    fn guess(
        &self,
        ctx: &AdversaryContext<'_>,
        input: &ChallengeInput,
        view: &ChallengeView,
        oracle: &mut Oracle<'_>,
        rng: &mut LabRng,
    ) -> usize;
}

const PROBE_MESSAGE: &[u8] = b"layer linking probe";
const WINDOW: usize = 16;

/// Path of `len` routers with the honest one at `j`, a fixed message and a
/// one-byte payload flip as the modification.
fn standard_input(ctx: &AdversaryContext<'_>, len: usize, j: usize, rng: &mut LabRng) -> ChallengeInput {
    ChallengeInput {
        message: PROBE_MESSAGE.to_vec(),
        path: ctx.path_around(len, j, rng),
        j,
        modification: Some(Modification::FlipPayloadTail { bytes: 1 }),
    }
}

fn coin(rng: &mut LabRng) -> usize {
    rng.gen_range(0..2)
}

/// Onions the adversary holds after the challenge.
fn view_onions(view: &ChallengeView) -> (Onion, Option<Onion>) {
    match view {
        ChallengeView::First { onion } | ChallengeView::Tail { onion, .. } => (onion.clone(), None),
        ChallengeView::Linked { onion, processed } => {
            let p = match processed {
                OracleAnswer::Relay { onion, .. } => Some(onion.clone()),
                _ => None,
            };
            (onion.clone(), p)
        }
    }
}

/// What to compare the challenge onion against: the honest router's output
/// if the view has one, otherwise the adversary's own onion over its input.
fn references(ctx: &AdversaryContext<'_>, input: &ChallengeInput, view: &ChallengeView, rng: &mut LabRng) -> (Onion, Vec<Onion>) {
    let (first, processed) = view_onions(view);
    let refs = match processed {
        Some(p) => vec![p],
        None => ctx.scheme.form_onion(&input.message, &input.path, ctx.dir, rng).unwrap_or_default(),
    };
    (first, refs)
}

/// Walk the view's first layer to the honest router through the corrupt
/// prefix of the chosen path.
fn layer_at_honest(ctx: &AdversaryContext<'_>, input: &ChallengeInput, onion: &Onion) -> Option<Onion> {
    let w = ctx.walk(&input.path[0], onion, input.j - 1);
    (w.end.is_none() && w.at == ctx.honest).then_some(w.onion)
}

/// Always answers 0.
pub struct NullGuess;

impl Distinguisher for NullGuess {
    fn name(&self) -> String {
        "null".into()
    }

    fn guess(&self, _: &AdversaryContext<'_>, _: &ChallengeInput, _: &ChallengeView, _: &mut Oracle<'_>, _: &mut LabRng) -> usize {
        0
    }
}

/// Uniform guess.
pub struct RandomBit;

impl Distinguisher for RandomBit {
    fn name(&self) -> String {
        "random".into()
    }

    fn guess(&self, _: &AdversaryContext<'_>, _: &ChallengeInput, _: &ChallengeView, _: &mut Oracle<'_>, rng: &mut LabRng) -> usize {
        coin(rng)
    }
}

/// Guesses 0 when every onion in the view has the scheme's nominal length.
pub struct LengthCheck;

impl Distinguisher for LengthCheck {
    fn name(&self) -> String {
        "length".into()
    }

    fn guess(&self, ctx: &AdversaryContext<'_>, _: &ChallengeInput, view: &ChallengeView, _: &mut Oracle<'_>, _: &mut LabRng) -> usize {
        let (first, processed) = view_onions(view);
        let expected = ctx.scheme.onion_len();
        usize::from(first.len() != expected || processed.is_some_and(|p| p.len() != expected))
    }
}

/// Guesses 0 when an aligned 16-byte block of the challenge onion occurs
/// anywhere in a reference onion.
pub struct ComponentEquality;

impl Distinguisher for ComponentEquality {
    fn name(&self) -> String {
        "component-equality".into()
    }

    fn guess(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, view: &ChallengeView, _: &mut Oracle<'_>, rng: &mut LabRng) -> usize {
        let (first, refs) = references(ctx, input, view, rng);
        let blocks: HashSet<&[u8]> = first.as_bytes().chunks_exact(WINDOW).collect();
        let shared = refs.iter().any(|r| r.as_bytes().chunks_exact(WINDOW).any(|c| blocks.contains(c)));
        usize::from(!shared)
    }
}

/// Guesses 0 when the challenge onion and a reference onion agree on a
/// 16-byte window at the same offset, which is how a per-onion identifier
/// shows up.
pub struct IdScan;

impl Distinguisher for IdScan {
    fn name(&self) -> String {
        "id-scan".into()
    }

    fn guess(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, view: &ChallengeView, _: &mut Oracle<'_>, rng: &mut LabRng) -> usize {
        let (first, refs) = references(ctx, input, view, rng);
        let a = first.as_bytes();
        let shared = refs.iter().any(|r| {
            let b = r.as_bytes();
            let len = a.len().min(b.len());
            len >= WINDOW && (0..=len - WINDOW).any(|i| a[i..i + WINDOW] == b[i..i + WINDOW])
        });
        usize::from(!shared)
    }
}

/// Flips payload bytes of the layer at the honest router and asks the
/// oracle what happens. In the modification game the flip is the
/// submitted modification and the challenger's output is followed instead.
pub struct TagAndQuery;

impl Distinguisher for TagAndQuery {
    fn name(&self) -> String {
        "tag-and-query".into()
    }

    fn guess(
        &self,
        ctx: &AdversaryContext<'_>,
        input: &ChallengeInput,
        view: &ChallengeView,
        oracle: &mut Oracle<'_>,
        rng: &mut LabRng,
    ) -> usize {
        let flip = Modification::FlipPayloadTail { bytes: 1 };
        match view {
            ChallengeView::First { onion } => {
                let Some(x) = layer_at_honest(ctx, input, onion) else { return coin(rng) };
                match oracle.query(&flip.apply(ctx.scheme, &x)) {
                    OracleAnswer::Relay { .. } => 0,
                    OracleAnswer::Receive { .. } | OracleAnswer::Bottom => 1,
                    OracleAnswer::Refused => coin(rng),
                }
            }
            ChallengeView::Linked { onion, processed } if ctx.game == GameId::OsMod => {
                let _ = onion;
                match processed {
                    OracleAnswer::Relay { next, onion } => {
                        let tail = &input.path[input.j..];
                        let w = ctx.walk(next, onion, tail.len());
                        usize::from(!(w.visited == tail && w.end.is_some()))
                    }
                    OracleAnswer::Receive { .. } | OracleAnswer::Bottom => 1,
                    OracleAnswer::Refused => coin(rng),
                }
            }
            ChallengeView::Linked { onion, processed } => {
                let Some(x) = layer_at_honest(ctx, input, onion) else { return coin(rng) };
                match (oracle.query(&flip.apply(ctx.scheme, &x)), processed) {
                    (OracleAnswer::Relay { onion: y, .. }, OracleAnswer::Relay { onion: z, .. }) => {
                        usize::from(!ctx.scheme.is_duplicate(&y, z))
                    }
                    (OracleAnswer::Receive { .. } | OracleAnswer::Bottom, OracleAnswer::Relay { .. }) => 1,
                    _ => coin(rng),
                }
            }
            ChallengeView::Tail { .. } => coin(rng),
        }
    }
}

/// Follows a tail layer to the corrupt receiver and reads the path-length
/// bound the zero padding leaks. Chooses a maximal path with the honest
/// router second to last.
pub struct PathLengthProbe {
    pub params: SuiteParams,
}

impl Distinguisher for PathLengthProbe {
    fn name(&self) -> String {
        "path-length-probe".into()
    }

    fn choose(&self, ctx: &AdversaryContext<'_>, _: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
        let len = ctx.scheme.max_path_len();
        standard_input(ctx, len, len.saturating_sub(1).max(1), rng)
    }

    fn guess(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, view: &ChallengeView, _: &mut Oracle<'_>, rng: &mut LabRng) -> usize {
        let ChallengeView::Tail { onion, next } = view else { return coin(rng) };
        let w = ctx.walk(next, onion, input.path.len());
        let Some(node) = ctx.corrupt.get(&w.at) else { return coin(rng) };
        let bound = SphinxPacket::from_bytes(&self.params, w.onion.as_bytes())
            .ok()
            .and_then(|pkt| exit_path_length_bound(&self.params, &node.keys.secret, &pkt));
        match bound {
            Some(b) => usize::from(b != input.path.len()),
            None => coin(rng),
        }
    }
}

/// Corrupt receiver of the path-embedding counterexample: reads the route
/// out of the message and compares it with the chosen path.
pub struct PathReader {
    scheme: Arc<Broken1>,
}

impl PathReader {
    pub fn new(inner: &str, params: &SuiteParams) -> Result<Self, crate::scheme::SchemeError> {
        Ok(PathReader { scheme: Arc::new(Broken1::new(scheme_by_name(inner, params)?, params.k())) })
    }
}

impl Distinguisher for PathReader {
    fn name(&self) -> String {
        "path-reader".into()
    }

    fn choose(&self, ctx: &AdversaryContext<'_>, _: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
        let len = ctx.scheme.max_path_len();
        standard_input(ctx, len, len.saturating_sub(1).max(1), rng)
    }

    fn guess(&self, ctx: &AdversaryContext<'_>, input: &ChallengeInput, view: &ChallengeView, _: &mut Oracle<'_>, rng: &mut LabRng) -> usize {
        let ChallengeView::Tail { onion, next } = view else { return coin(rng) };
        let w = ctx.walk(next, onion, input.path.len());
        if !matches!(w.end, Some(ProcOutput::Receive { .. })) {
            return coin(rng);
        }
        let Some(mut node) = ctx.corrupt.get(&w.at).cloned() else { return coin(rng) };
        match self.scheme.read_embedded_path(&mut node, &w.onion) {
            Some(path) => usize::from(path != input.path),
            None => coin(rng),
        }
    }
}

/// The distinguishers that apply to a scheme.
pub fn distinguisher_suite(scheme: &str, params: &SuiteParams) -> Vec<Box<dyn Distinguisher>> {
    let mut suite: Vec<Box<dyn Distinguisher>> = vec![
        Box::new(NullGuess),
        Box::new(RandomBit),
        Box::new(LengthCheck),
        Box::new(ComponentEquality),
        Box::new(IdScan),
        Box::new(TagAndQuery),
        Box::new(PathLengthProbe { params: *params }),
    ];
    if let Some(rest) = scheme.trim().strip_prefix("broken1") {
        let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or("sphinx-ae");
        if let Ok(reader) = PathReader::new(inner, params) {
            suite.push(Box::new(reader));
        }
    }
    suite
}
