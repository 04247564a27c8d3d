use super::{Address, PayloadMode, ReplayStore, SphinxPacket, Variant};
use crate::primitives::{
    ae_open, hash_blind, hash_key, hash_tau, mac_verify, prg, rho, xor_into, GroupElement, HashLabel,
    Prp, Scalar, SuiteParams,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DropReason {
    Replay,
    BadTag,
    BadPrefix,
    BadLength,
    Malformed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Forward { next: String, packet: SphinxPacket },
    Deliver { dest: String, message: Vec<u8> },
    Drop(DropReason),
}

fn lengths_ok(params: &SuiteParams, pkt: &SphinxPacket) -> bool {
    pkt.beta.len() == params.beta_len()
        && pkt.gamma.len() == params.tag_len()
        && pkt.delta.len() == params.payload_len()
}

/// Everything a node does once the shared secret `s` is known. The sender
/// uses this with its own copy of `s` to compute later layers.
pub fn unwrap_with_secret(
    params: &SuiteParams,
    variant: Variant,
    pkt: &SphinxPacket,
    s: &GroupElement,
    replay: Option<&mut ReplayStore>,
) -> Outcome {
    if !lengths_ok(params, pkt) {
        return Outcome::Drop(DropReason::BadLength);
    }
    let Ok(alpha) = GroupElement::decode(&pkt.alpha) else {
        return Outcome::Drop(DropReason::Malformed);
    };
    let tau = hash_tau(params, s);
    if let Some(store) = replay.as_deref() {
        if store.contains(&tau) {
            return Outcome::Drop(DropReason::Replay);
        }
    }

    let mu = hash_key(params, HashLabel::Mu, s);
    let pi = hash_key(params, HashLabel::Pi, s);
    let delta = match variant.mode() {
        PayloadMode::Ae => match ae_open(&pi, &pkt.delta, &pkt.gamma, &pkt.beta) {
            Ok(pt) => pt,
            Err(_) => return Outcome::Drop(DropReason::BadTag),
        },
        mode => {
            let ok = if variant.mac_covers_payload() {
                mac_verify(&mu, &[&pkt.beta, &pkt.delta], &pkt.gamma)
            } else {
                mac_verify(&mu, &[&pkt.beta], &pkt.gamma)
            };
            if !ok {
                return Outcome::Drop(DropReason::BadTag);
            }
            if mode == PayloadMode::Prp {
                Prp::new(params.payload_len())
                    .decrypt(&pi, &pkt.delta)
                    .expect("payload length checked above")
            } else {
                let mut d = pkt.delta.clone();
                let ks = prg(&pi, d.len());
                xor_into(&mut d, &ks);
                d
            }
        }
    };
    if let Some(store) = replay {
        store.insert(tau);
    }

    let k = params.k();
    let mut b = pkt.beta.clone();
    b.extend(std::iter::repeat(0u8).take(2 * k));
    xor_into(&mut b, &rho(params, &hash_key(params, HashLabel::Rho, s)));

    match Address::decode(&b[..k]) {
        Some(Address::Node(next)) => {
            let alpha_next = alpha.exp(&hash_blind(&alpha, s));
            Outcome::Forward {
                next,
                packet: SphinxPacket {
                    alpha: alpha_next.encode(),
                    gamma: b[k..2 * k].to_vec(),
                    beta: b[2 * k..].to_vec(),
                    delta,
                },
            }
        }
        Some(Address::Exit) => deliver(params, &delta),
        _ => Outcome::Drop(DropReason::Malformed),
    }
}

fn deliver(params: &SuiteParams, delta: &[u8]) -> Outcome {
    let k = params.k();
    if delta[..k].iter().any(|b| *b != 0) {
        return Outcome::Drop(DropReason::BadPrefix);
    }
    let Some(Address::Dest(dest)) = Address::decode(&delta[k..2 * k]) else {
        return Outcome::Drop(DropReason::BadPrefix);
    };
    let body = &delta[2 * k..];
    match body.iter().rposition(|b| *b != 0) {
        Some(end) if body[end] == 0x80 => Outcome::Deliver { dest, message: body[..end].to_vec() },
        _ => Outcome::Drop(DropReason::BadPrefix),
    }
}

/// Node-side processing of wire bytes with the node's secret exponent.
pub fn process_packet(
    params: &SuiteParams,
    variant: Variant,
    sk: &Scalar,
    replay: &mut ReplayStore,
    bytes: &[u8],
) -> Outcome {
    let Ok(pkt) = SphinxPacket::from_bytes(params, bytes) else {
        return Outcome::Drop(DropReason::BadLength);
    };
    let Ok(alpha) = GroupElement::decode(&pkt.alpha) else {
        return Outcome::Drop(DropReason::Malformed);
    };
    unwrap_with_secret(params, variant, &pkt, &alpha.exp(sk), Some(replay))
}

/// What a corrupt exit learns about the path length from the run of zero
/// bits that follows `Δ ‖ I` in its decrypted routing block:
/// `r − ⌊zero_run / 2κ⌋`, clamped to `[1, r]`. `None` if the packet is not
/// addressed to an exit.
pub fn exit_path_length_bound(params: &SuiteParams, sk: &Scalar, pkt: &SphinxPacket) -> Option<usize> {
    let alpha = GroupElement::decode(&pkt.alpha).ok()?;
    let s = alpha.exp(sk);
    let k = params.k();
    let mut b = pkt.beta.clone();
    b.extend(std::iter::repeat(0u8).take(2 * k));
    xor_into(&mut b, &rho(params, &hash_key(params, HashLabel::Rho, &s)));
    if Address::decode(&b[..k]) != Some(Address::Exit) {
        return None;
    }
    let mut zero_run = 0usize;
    for byte in &b[2 * k..] {
        if *byte == 0 {
            zero_run += 8;
        } else {
            zero_run += byte.leading_zeros() as usize;
            break;
        }
    }
    let r = params.max_hops;
    let est = r.saturating_sub(zero_run / (2 * params.kappa));
    Some(est.clamp(1, r))
}
