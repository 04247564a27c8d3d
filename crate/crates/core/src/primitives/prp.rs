//! Wide-block PRP: four-round unbalanced Feistel network over the PRG and
//! the MAC, with a κ-byte left half and the rest of the block on the right.

use super::{kdf, mac, prg, xor_into, PrimitiveError, SymKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prp {
    block_len: usize,
}

struct RoundKeys([SymKey; 4]);

impl RoundKeys {
    fn derive(key: &SymKey) -> Self {
        RoundKeys([
            kdf(b"prp-round-1", key),
            kdf(b"prp-round-2", key),
            kdf(b"prp-round-3", key),
            kdf(b"prp-round-4", key),
        ])
    }
}

impl Prp {
    /// `block_len` must leave a non-empty right half for a κ-byte key.
    pub fn new(block_len: usize) -> Self {
        Prp { block_len }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    fn check(&self, key: &SymKey, block: &[u8]) -> Result<(), PrimitiveError> {
        if block.len() != self.block_len {
            return Err(PrimitiveError::WrongLength { expected: self.block_len, got: block.len() });
        }
        if block.len() <= key.len() {
            return Err(PrimitiveError::InvalidParams("block shorter than key".into()));
        }
        Ok(())
    }

    fn stream_round(k: &SymKey, left: &[u8], right: &mut [u8]) {
        let mut seed = left.to_vec();
        xor_into(&mut seed, k.as_bytes());
        let ks = prg(&SymKey::from_bytes(seed), right.len());
        xor_into(right, &ks);
    }

    fn hash_round(k: &SymKey, left: &mut [u8], right: &[u8]) {
        let t = mac(k, &[right]);
        xor_into(left, &t);
    }

    pub fn encrypt(&self, key: &SymKey, block: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        self.check(key, block)?;
        let rk = RoundKeys::derive(key);
        let mut out = block.to_vec();
        let (l, r) = out.split_at_mut(key.len());
        Self::stream_round(&rk.0[0], l, r);
        Self::hash_round(&rk.0[1], l, r);
        Self::stream_round(&rk.0[2], l, r);
        Self::hash_round(&rk.0[3], l, r);
        Ok(out)
    }

    pub fn decrypt(&self, key: &SymKey, block: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
        self.check(key, block)?;
        let rk = RoundKeys::derive(key);
        let mut out = block.to_vec();
        let (l, r) = out.split_at_mut(key.len());
        Self::hash_round(&rk.0[3], l, r);
        Self::stream_round(&rk.0[2], l, r);
        Self::hash_round(&rk.0[1], l, r);
        Self::stream_round(&rk.0[0], l, r);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn wrong_length_rejected() {
        let prp = Prp::new(64);
        let key = SymKey::from_bytes(vec![0; 16]);
        assert_eq!(
            prp.encrypt(&key, &[0u8; 63]),
            Err(PrimitiveError::WrongLength { expected: 64, got: 63 })
        );
    }

    #[test]
    fn avalanche_at_least_a_quarter() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let prp = Prp::new(256);
        let key = SymKey::random(16, &mut rng);
        let mut total = 0f64;
        let trials = 200;
        for _ in 0..trials {
            let mut block = vec![0u8; 256];
            rng.fill(&mut block[..]);
            let c0 = prp.encrypt(&key, &block).unwrap();
            let bit = rng.gen_range(0..256 * 8);
            block[bit / 8] ^= 1 << (bit % 8);
            let c1 = prp.encrypt(&key, &block).unwrap();
            let diff: u32 = c0.iter().zip(&c1).map(|(a, b)| (a ^ b).count_ones()).sum();
            total += diff as f64 / (256.0 * 8.0);
        }
        assert!(total / trials as f64 >= 0.25);
    }

    proptest! {
        #[test]
        fn decrypt_inverts_encrypt(key in prop::collection::vec(any::<u8>(), 16),
                                   block in prop::collection::vec(any::<u8>(), 17..300)) {
            let prp = Prp::new(block.len());
            let key = SymKey::from_bytes(key);
            let c = prp.encrypt(&key, &block).unwrap();
            prop_assert_eq!(prp.decrypt(&key, &c).unwrap(), block);
        }
    }
}
