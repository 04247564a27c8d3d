//! Payload tagging: a corrupt first relay inverts the last `k` message
//! frames of one sender's onion; a corrupt receiver that finds broken frame
//! markers knows the message came from that sender.
//!
//! Messages are sequences of 16-byte frames, 12 data bytes followed by a
//! fixed 4-byte marker, so an intact message and a garbled one can be told
//! apart mechanically.

use crate::primitives::SuiteParams;
use crate::rng::derive;
use crate::scheme::{Network, Onion, OnionScheme, ProcOutput, SchemeError, SphinxScheme};
use crate::sphinx::{max_message_len, Variant};
use rand::{Rng, RngCore};
use serde::Serialize;
use std::collections::BTreeMap;

pub const FRAME_LEN: usize = 16;
pub const FRAME_DATA: usize = 12;
pub const MARKER: [u8; 4] = [0xc3, 0x3c, 0xa5, 0x5a];

/// Split `data` into frames, zero-filling the last one.
pub fn frame_message(data: &[u8]) -> Vec<u8> {
    data.chunks(FRAME_DATA)
        .flat_map(|c| {
            let mut f = c.to_vec();
            f.resize(FRAME_DATA, 0);
            f.extend_from_slice(&MARKER);
            f
        })
        .collect()
}

/// Marker check for every complete frame.
pub fn check_frames(message: &[u8]) -> Vec<bool> {
    message.chunks_exact(FRAME_LEN).map(|f| f[FRAME_DATA..] == MARKER).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TaggingReport {
    pub scheme: String,
    pub trials: u64,
    /// Frames inverted by the first relay.
    pub k: usize,
    /// Frames per message.
    pub frames: usize,
    /// Trials in which exactly the tagged sender's receiver saw broken
    /// frames.
    pub linked: u64,
    /// Tagged onions that reached their receiver.
    pub tagged_delivered: u64,
    /// Delivered tagged messages whose bytes before the inverted frames
    /// were intact.
    pub prefix_recovered: u64,
    /// Message bytes recovered per linked trial.
    pub recovered_bytes: usize,
    /// 1-based hop at which the tagged onion was dropped, with counts.
    pub dropped_at: BTreeMap<usize, u64>,
}

enum Fate {
    Delivered(Vec<u8>),
    Dropped(usize),
}

/// Relay `onion` from hop 2 on, starting at `first`.
fn finish(scheme: &SphinxScheme, net: &mut Network, first: &str, onion: Onion) -> Fate {
    let trace = net.route(scheme, first, onion);
    match trace.end {
        ProcOutput::Receive { message } => Fate::Delivered(message),
        _ => Fate::Dropped(trace.hops.len() + 1),
    }
}

pub fn run_tagging_attack(
    variant: Variant,
    params: &SuiteParams,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<TaggingReport, SchemeError> {
    let scheme = SphinxScheme::new(*params, variant);
    let frames = max_message_len(params) / FRAME_LEN;
    let k = k.min(frames);
    let names = Network::names(4);
    let (first, honest, b, d) = (&names[0], &names[1], &names[2], &names[3]);
    let payload = scheme.payload_range().expect("sphinx payload");
    let flip_from = payload.start + 2 * params.k() + (frames - k) * FRAME_LEN;
    let flip_to = payload.start + 2 * params.k() + frames * FRAME_LEN;
    let keep = (frames - k) * FRAME_LEN;

    let mut report = TaggingReport {
        scheme: scheme.name(),
        trials,
        k,
        frames,
        linked: 0,
        tagged_delivered: 0,
        prefix_recovered: 0,
        recovered_bytes: keep,
        dropped_at: BTreeMap::new(),
    };
    for i in 0..trials {
        let mut rng = derive(seed, "tagging", i);
        let mut net = Network::generate(&scheme, &names, &mut rng);
        let (to_a, to_c) = if rng.gen::<bool>() { (b, d) } else { (d, b) };
        let message = |rng: &mut _| {
            let mut data = vec![0u8; frames * FRAME_DATA];
            RngCore::fill_bytes(rng, &mut data);
            frame_message(&data)
        };
        let (m_a, m_c) = (message(&mut rng), message(&mut rng));
        let path = |to: &String| vec![first.clone(), honest.clone(), to.clone()];
        let o_a = scheme.form_onion(&m_a, &path(to_a), &net.dir, &mut rng)?;
        let o_c = scheme.form_onion(&m_c, &path(to_c), &net.dir, &mut rng)?;

        // The corrupt first relay processes both onions and tags A's.
        let mut fates = Vec::new();
        for (onion, tag) in [(&o_a[0], true), (&o_c[0], false)] {
            match net.process(&scheme, first, onion) {
                Some(ProcOutput::Relay { next, onion }) => {
                    let mut bytes = onion.0;
                    if tag {
                        bytes[flip_from..flip_to].iter_mut().for_each(|x| *x ^= 0xff);
                    }
                    fates.push(finish(&scheme, &mut net, &next, Onion(bytes)));
                }
                _ => fates.push(Fate::Dropped(1)),
            }
        }

        let broken = |m: &[u8]| check_frames(m)[frames - k..].iter().any(|ok| !ok);
        let seen: Vec<bool> = fates.iter().map(|f| matches!(f, Fate::Delivered(m) if broken(m))).collect();
        if seen == [true, false] {
            report.linked += 1;
        }
        match &fates[0] {
            Fate::Delivered(m) => {
                report.tagged_delivered += 1;
                if m.len() == m_a.len() && m[..keep] == m_a[..keep] {
                    report.prefix_recovered += 1;
                }
            }
            Fate::Dropped(hop) => *report.dropped_at.entry(*hop).or_default() += 1,
        }
    }
    Ok(report)
}
