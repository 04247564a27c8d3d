//! Domain-separated hash family, PRG, MAC and KDF.

use super::{GroupElement, Scalar, SuiteParams, SymKey};
use hkdf::Hkdf;
use hmac::{Hmac, Mac};
use sha2::Sha256;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use subtle::ConstantTimeEq;

const DOMAIN: &[u8] = b"onionlab/v1/";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashLabel {
    Mu,
    Rho,
    Pi,
    Tau,
    Blind,
}

impl HashLabel {
    fn tag(self) -> &'static [u8] {
        match self {
            HashLabel::Mu => b"mu",
            HashLabel::Rho => b"rho",
            HashLabel::Pi => b"pi",
            HashLabel::Tau => b"tau",
            HashLabel::Blind => b"b",
        }
    }
}

fn xof(label: &[u8], parts: &[&[u8]]) -> impl XofReader {
    let mut h = Shake256::default();
    h.update(DOMAIN);
    h.update(&[label.len() as u8]);
    h.update(label);
    for p in parts {
        h.update(&(p.len() as u64).to_be_bytes());
        h.update(p);
    }
    h.finalize_xof()
}

/// Generic labelled XOF output of `len` bytes.
pub fn xof_bytes(label: &[u8], parts: &[&[u8]], len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    xof(label, parts).read(&mut out);
    out
}

/// h_μ, h_ρ, h_π: κ-bit key from a shared secret.
pub fn hash_key(params: &SuiteParams, label: HashLabel, s: &GroupElement) -> SymKey {
    SymKey::from_bytes(xof_bytes(label.tag(), &[&s.encode()], params.k()))
}

/// h_τ: 2κ-bit replay tag.
pub fn hash_tau(params: &SuiteParams, s: &GroupElement) -> Vec<u8> {
    xof_bytes(HashLabel::Tau.tag(), &[&s.encode()], params.tau_len())
}

/// h_b(α, s) into Z_q^* by rejection sampling on 253-bit candidates.
pub fn hash_blind(alpha: &GroupElement, s: &GroupElement) -> Scalar {
    let mut reader = xof(HashLabel::Blind.tag(), &[&alpha.encode(), &s.encode()]);
    loop {
        let mut cand = [0u8; 32];
        reader.read(&mut cand);
        cand[0] &= 0x1f;
        if let Some(x) = Scalar::from_canonical(cand) {
            return x;
        }
    }
}

/// Keyed pseudo-random stream of `len` bytes.
pub fn prg(key: &SymKey, len: usize) -> Vec<u8> {
    xof_bytes(b"prg", &[key.as_bytes()], len)
}

/// ρ: the (2r+3)κ-bit header stream.
pub fn rho(params: &SuiteParams, key: &SymKey) -> Vec<u8> {
    prg(key, params.stream_len())
}

type HmacSha256 = Hmac<Sha256>;

/// HMAC-SHA256 over the concatenation of `parts`, truncated to |key| bytes.
pub fn mac(key: &SymKey, parts: &[&[u8]]) -> Vec<u8> {
    let mut m = <HmacSha256 as hmac::digest::KeyInit>::new_from_slice(key.as_bytes()).expect("hmac accepts any key length");
    for p in parts {
        Mac::update(&mut m, p);
    }
    let full = m.finalize().into_bytes();
    full[..key.len().min(full.len())].to_vec()
}

pub fn mac_verify(key: &SymKey, parts: &[&[u8]], tag: &[u8]) -> bool {
    let expect = mac(key, parts);
    expect.len() == tag.len() && bool::from(expect.ct_eq(tag))
}

/// HKDF-SHA256 with `salt`, expanded to |key| bytes.
pub fn kdf(salt: &[u8], key: &SymKey) -> SymKey {
    let hk = Hkdf::<Sha256>::new(Some(salt), key.as_bytes());
    let mut out = vec![0u8; key.len()];
    hk.expand(b"onionlab kdf", &mut out).expect("output length within hkdf bound");
    SymKey::from_bytes(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn elem(seed: u64) -> GroupElement {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        GroupElement::base_exp(&Scalar::random(&mut rng))
    }

    #[test]
    fn labels_separate_outputs() {
        let p = SuiteParams::lab();
        let s = elem(3);
        let keys: Vec<_> = [HashLabel::Mu, HashLabel::Rho, HashLabel::Pi]
            .iter()
            .map(|l| hash_key(&p, *l, &s))
            .collect();
        assert_ne!(keys[0], keys[1]);
        assert_ne!(keys[1], keys[2]);
        assert_eq!(hash_tau(&p, &s).len(), 2 * p.k());
    }

    #[test]
    fn blind_depends_on_both_inputs() {
        let (a, s) = (elem(4), elem(5));
        assert_eq!(hash_blind(&a, &s), hash_blind(&a, &s));
        assert_ne!(hash_blind(&a, &s), hash_blind(&s, &a));
    }

    #[test]
    fn prg_monobit_balance() {
        let p = SuiteParams::lab();
        let key = SymKey::from_bytes(vec![7u8; p.k()]);
        let bytes = prg(&key, 16_384);
        let ones: u32 = bytes.iter().map(|b| b.count_ones()).sum();
        let frac = ones as f64 / (bytes.len() * 8) as f64;
        assert!((frac - 0.5).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn mac_truncates_and_verifies() {
        let key = SymKey::from_bytes(vec![1u8; 16]);
        let t = mac(&key, &[b"ab", b"c"]);
        assert_eq!(t.len(), 16);
        assert_eq!(t, mac(&key, &[b"abc"]));
        assert!(mac_verify(&key, &[b"abc"], &t));
        let mut bad = t.clone();
        bad[0] ^= 1;
        assert!(!mac_verify(&key, &[b"abc"], &bad));
        assert!(!mac_verify(&key, &[b"abc"], &t[..15]));
    }

    #[test]
    fn kdf_depends_on_salt() {
        let key = SymKey::from_bytes(vec![9u8; 16]);
        assert_ne!(kdf(b"a", &key), kdf(b"b", &key));
        assert_eq!(kdf(b"a", &key).len(), 16);
    }
}
