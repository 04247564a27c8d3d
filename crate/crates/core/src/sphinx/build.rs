use super::{Address, Hop, PayloadMode, SphinxError, SphinxPacket, Variant};
use crate::primitives::{
    ae_seal, hash_blind, hash_key, mac, prg, rho, xor_into, GroupElement, HashLabel, Prp, Scalar,
    SuiteParams, SymKey, ELEMENT_LEN,
};
use rand::{CryptoRng, RngCore};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub alpha: [u8; ELEMENT_LEN],
    pub beta: Vec<u8>,
    pub gamma: Vec<u8>,
}

/// Largest message a forward packet can carry: `l_π − |0_κ| − |Δ| − 1`.
pub fn max_message_len(params: &SuiteParams) -> usize {
    params.payload_len() - 2 * params.k() - 1
}

/// `0_κ ‖ Δ ‖ m ‖ 1 0…0`, exactly l_π bytes.
pub fn encode_payload(params: &SuiteParams, dest: &Address, m: &[u8]) -> Result<Vec<u8>, SphinxError> {
    let max = max_message_len(params);
    if m.len() > max {
        return Err(SphinxError::MessageTooLong { len: m.len(), max });
    }
    let k = params.k();
    let mut out = vec![0u8; params.payload_len()];
    out[k..2 * k].copy_from_slice(&dest.encode(k)?);
    out[2 * k..2 * k + m.len()].copy_from_slice(m);
    out[2 * k + m.len()] = 0x80;
    Ok(out)
}

struct HopKeys {
    stream: Vec<u8>,
    mu: SymKey,
    pi: SymKey,
}

/// α_0 = g^x and s_i = y_i^{x·b_0⋯b_{i−1}}.
fn derive_secrets(path: &[Hop], x: &Scalar) -> (GroupElement, Vec<GroupElement>) {
    let alpha0 = GroupElement::base_exp(x);
    let mut acc = *x;
    let mut secrets = Vec::with_capacity(path.len());
    for hop in path {
        let alpha = GroupElement::base_exp(&acc);
        let s = hop.public.exp(&acc);
        acc = acc.mul(&hash_blind(&alpha, &s));
        secrets.push(s);
    }
    (alpha0, secrets)
}

fn check_path(params: &SuiteParams, path: &[Hop]) -> Result<(), SphinxError> {
    if path.is_empty() {
        return Err(SphinxError::EmptyPath);
    }
    if path.len() > params.max_hops {
        return Err(SphinxError::PathTooLong { len: path.len(), max: params.max_hops });
    }
    for hop in path {
        Address::Node(hop.name.clone()).encode(params.k())?;
    }
    Ok(())
}

/// φ_{ν−1}: what the first ν−1 hops will append, pre-encrypted.
fn filler(params: &SuiteParams, keys: &[HopKeys]) -> Vec<u8> {
    let (k, r) = (params.k(), params.max_hops);
    let mut phi = Vec::new();
    for i in 1..keys.len() {
        phi.extend(std::iter::repeat(0u8).take(2 * k));
        let from = (2 * (r - i) + 3) * k;
        xor_into(&mut phi, &keys[i - 1].stream[from..]);
    }
    phi
}

/// Shared core of header and forward-message construction. When `payload`
/// is given it is layered alongside the header and returned as δ_0.
#[allow(clippy::too_many_arguments)]
fn assemble<R: RngCore + CryptoRng>(
    params: &SuiteParams,
    variant: Variant,
    path: &[Hop],
    secrets: &[GroupElement],
    dest: &[u8],
    id: &[u8],
    mut payload: Option<Vec<u8>>,
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<u8>, Option<Vec<u8>>), SphinxError> {
    let (k, r, nu) = (params.k(), params.max_hops, path.len());
    let max_dest = (2 * (r - nu) + 1) * k;
    if dest.len() > max_dest {
        return Err(SphinxError::DestTooLong { len: dest.len(), max: max_dest });
    }
    let keys: Vec<HopKeys> = secrets
        .iter()
        .map(|s| HopKeys {
            stream: rho(params, &hash_key(params, HashLabel::Rho, s)),
            mu: hash_key(params, HashLabel::Mu, s),
            pi: hash_key(params, HashLabel::Pi, s),
        })
        .collect();

    let head_len = (2 * (r - nu) + 3) * k;
    let mut beta = Vec::with_capacity(params.beta_len());
    beta.extend_from_slice(dest);
    beta.extend_from_slice(id);
    let pad_len = head_len - beta.len();
    let mut pad = vec![0u8; pad_len];
    if variant.random_padding() {
        rng.fill_bytes(&mut pad);
    }
    beta.extend_from_slice(&pad);
    xor_into(&mut beta, &keys[nu - 1].stream[..head_len]);
    beta.extend_from_slice(&filler(params, &keys));
    debug_assert_eq!(beta.len(), params.beta_len());

    let prp = Prp::new(params.payload_len());
    let mut gamma = Vec::new();
    for i in (0..nu).rev() {
        if i + 1 < nu {
            let mut next = Address::Node(path[i + 1].name.clone()).encode(k)?;
            next.extend_from_slice(&gamma);
            next.extend_from_slice(&beta[..(2 * r - 1) * k]);
            xor_into(&mut next, &keys[i].stream[..params.beta_len()]);
            beta = next;
        }
        match (variant.mode(), payload.as_mut()) {
            (PayloadMode::Ae, Some(d)) => {
                let (ct, tag) = ae_seal(&keys[i].pi, d, &beta);
                *d = ct;
                gamma = tag;
            }
            (PayloadMode::Ae, None) => return Err(SphinxError::Unsupported("authenticated payloads need a message")),
            (mode, d) => {
                if let Some(d) = d {
                    match mode {
                        PayloadMode::Prp => *d = prp.encrypt(&keys[i].pi, d)?,
                        _ => {
                            let ks = prg(&keys[i].pi, d.len());
                            xor_into(d, &ks)
                        }
                    }
                }
                gamma = match (variant.mac_covers_payload(), payload.as_ref()) {
                    (true, Some(d)) => mac(&keys[i].mu, &[&beta, d]),
                    (true, None) => return Err(SphinxError::Unsupported("payload-covering tags need a message")),
                    (false, _) => mac(&keys[i].mu, &[&beta]),
                };
            }
        }
    }
    Ok((beta, gamma, payload))
}

/// Header for destination encoding `dest` and identifier `id`. Only the
/// variants whose γ covers β alone have a payload-independent header.
pub fn create_header<R: RngCore + CryptoRng>(
    params: &SuiteParams,
    variant: Variant,
    path: &[Hop],
    dest: &[u8],
    id: &[u8],
    rng: &mut R,
) -> Result<(Header, Vec<GroupElement>), SphinxError> {
    check_path(params, path)?;
    if id.len() != params.k() {
        return Err(SphinxError::BadLength { expected: params.k(), got: id.len() });
    }
    let x = Scalar::random(rng);
    let (alpha0, secrets) = derive_secrets(path, &x);
    let (beta, gamma, _) = assemble(params, variant, path, &secrets, dest, id, None, rng)?;
    Ok((Header { alpha: alpha0.encode(), beta, gamma }, secrets))
}

/// Forward message to `dest` through `path`; returns the first packet and
/// the per-hop shared secrets.
pub fn create_forward_message<R: RngCore + CryptoRng>(
    params: &SuiteParams,
    variant: Variant,
    path: &[Hop],
    dest: &Address,
    m: &[u8],
    rng: &mut R,
) -> Result<(SphinxPacket, Vec<GroupElement>), SphinxError> {
    check_path(params, path)?;
    let payload = encode_payload(params, dest, m)?;
    let x = Scalar::random(rng);
    let (alpha0, secrets) = derive_secrets(path, &x);
    let exit = Address::Exit.encode(params.k())?;
    let id = vec![0u8; params.k()];
    let (beta, gamma, delta) = assemble(params, variant, path, &secrets, &exit, &id, Some(payload), rng)?;
    let pkt = SphinxPacket {
        alpha: alpha0.encode(),
        beta,
        gamma,
        delta: delta.expect("payload was supplied"),
    };
    Ok((pkt, secrets))
}
