//! Hybrid public-key encryption with a fixed ciphertext size: an ephemeral
//! Diffie-Hellman share followed by an authenticated encryption of the
//! plaintext under a key hashed from the share and the shared secret.

use super::{ae_open, ae_seal, xof_bytes, GroupElement, PrimitiveError, Scalar, SymKey, ELEMENT_LEN};
use rand::{CryptoRng, RngCore};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HybridKem {
    /// κ in bytes; also the tag length.
    pub k: usize,
    pub plaintext_len: usize,
}

impl HybridKem {
    pub fn new(k: usize, plaintext_len: usize) -> Self {
        HybridKem { k, plaintext_len }
    }

    /// |c| = element + plaintext + tag.
    pub fn ciphertext_len(&self) -> usize {
        ELEMENT_LEN + self.plaintext_len + self.k
    }

    fn key(&self, share: &GroupElement, shared: &GroupElement) -> SymKey {
        SymKey::from_bytes(xof_bytes(b"kem", &[&share.encode(), &shared.encode()], self.k))
    }

    pub fn encrypt<R: RngCore + CryptoRng>(
        &self,
        pk: &GroupElement,
        pt: &[u8],
        rng: &mut R,
    ) -> Result<Vec<u8>, PrimitiveError> {
        if pt.len() != self.plaintext_len {
            return Err(PrimitiveError::WrongLength { expected: self.plaintext_len, got: pt.len() });
        }
        let e = Scalar::random(rng);
        let share = GroupElement::base_exp(&e);
        let key = self.key(&share, &pk.exp(&e));
        let (ct, tag) = ae_seal(&key, pt, &share.encode());
        let mut out = Vec::with_capacity(self.ciphertext_len());
        out.extend_from_slice(&share.encode());
        out.extend_from_slice(&ct);
        out.extend_from_slice(&tag);
        Ok(out)
    }

    pub fn decrypt(&self, sk: &Scalar, c: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        if c.len() != self.ciphertext_len() {
            return Err(PrimitiveError::WrongLength { expected: self.ciphertext_len(), got: c.len() });
        }
        let share = GroupElement::decode(&c[..ELEMENT_LEN])?;
        let key = self.key(&share, &share.exp(sk));
        let (ct, tag) = c[ELEMENT_LEN..].split_at(self.plaintext_len);
        ae_open(&key, ct, tag, &share.encode())
    }
}
