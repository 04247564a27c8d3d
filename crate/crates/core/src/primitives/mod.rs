//! Cryptographic building blocks shared by every onion format in the crate.
//!
//! All lengths are derived from [`SuiteParams`]; nothing downstream
//! hard-codes a header or stream size.

mod ae;
mod group;
mod kem;
mod prp;
mod symmetric;

pub use ae::{ae_open, ae_seal};
pub use group::{GroupElement, Scalar, ELEMENT_LEN, GROUP_ORDER_BITS};
pub use kem::HybridKem;
pub use prp::Prp;
pub use symmetric::{
    hash_blind, hash_key, hash_tau, kdf, mac, mac_verify, prg, rho, xof_bytes, HashLabel,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimitiveError {
    #[error("wrong length: expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("group element does not decode")]
    Decode,
    #[error("authentication failed")]
    AuthFail,
    #[error("invalid suite parameters: {0}")]
    InvalidParams(String),
}

/// Security parameter, maximum route length and payload size.
///
/// `kappa` and `payload_bits` are in bits and must be byte aligned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuiteParams {
    pub kappa: usize,
    pub max_hops: usize,
    pub payload_bits: usize,
}

impl SuiteParams {
    pub fn new(kappa: usize, max_hops: usize, payload_bits: usize) -> Result<Self, PrimitiveError> {
        let p = SuiteParams { kappa, max_hops, payload_bits };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PrimitiveError> {
        let bad = |s: &str| Err(PrimitiveError::InvalidParams(s.to_string()));
        if self.kappa % 8 != 0 || self.payload_bits % 8 != 0 {
            return bad("kappa and payload length must be multiples of 8");
        }
        if !(64..=256).contains(&self.kappa) {
            return bad("kappa must lie in 64..=256");
        }
        if self.max_hops == 0 || self.max_hops > 64 {
            return bad("max_hops must lie in 1..=64");
        }
        if self.payload_bits <= 3 * self.kappa {
            return bad("payload must exceed three kappa-blocks");
        }
        Ok(())
    }

    /// Default lab profile: kappa = 128, r = 5, 512-byte payload.
    pub fn lab() -> Self {
        SuiteParams { kappa: 128, max_hops: 5, payload_bits: 4096 }
    }

    /// κ in bytes.
    pub fn k(&self) -> usize {
        self.kappa / 8
    }

    pub fn group_order_bits(&self) -> u32 {
        GROUP_ORDER_BITS
    }

    /// |β| = (2r+1)κ.
    pub fn beta_len(&self) -> usize {
        (2 * self.max_hops + 1) * self.k()
    }

    /// |ρ(·)| = (2r+3)κ.
    pub fn stream_len(&self) -> usize {
        (2 * self.max_hops + 3) * self.k()
    }

    /// |h_τ(·)| = 2κ.
    pub fn tau_len(&self) -> usize {
        2 * self.k()
    }

    pub fn tag_len(&self) -> usize {
        self.k()
    }

    pub fn payload_len(&self) -> usize {
        self.payload_bits / 8
    }

    pub fn header_len(&self) -> usize {
        ELEMENT_LEN + self.beta_len() + self.tag_len()
    }

    pub fn packet_len(&self) -> usize {
        self.header_len() + self.payload_len()
    }
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self::lab()
    }
}

/// Symmetric key of κ bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymKey(Vec<u8>);

impl SymKey {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        SymKey(bytes)
    }

    pub fn random<R: rand::RngCore>(len: usize, rng: &mut R) -> Self {
        let mut v = vec![0u8; len];
        rng.fill_bytes(&mut v);
        SymKey(v)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for SymKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymKey({} bytes)", self.0.len())
    }
}

/// XOR `src` into `dst` over the shorter of the two.
pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_lengths_follow_formulas() {
        for (kappa, r) in [(128, 3), (128, 5), (256, 5)] {
            let p = SuiteParams::new(kappa, r, 8 * 512).unwrap();
            assert_eq!(p.beta_len() * 8, (2 * r + 1) * kappa);
            assert_eq!(p.stream_len() * 8, (2 * r + 3) * kappa);
            assert_eq!(p.tau_len() * 8, 2 * kappa);
            assert_eq!(p.tag_len() * 8, kappa);
        }
    }

    #[test]
    fn rejects_short_payload() {
        assert!(SuiteParams::new(128, 5, 128).is_err());
        assert!(SuiteParams::new(100, 5, 4096).is_err());
    }
}
