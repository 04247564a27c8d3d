//! Fixed-length chain of N public-key blocks appended to an onion. Block 1
//! of each layer carries that relay's symmetric key and a MAC over the next
//! layer; the relay re-pads the chain so its length never changes.

use crate::primitives::{
    kdf, mac, mac_verify, prg, GroupElement, HybridKem, PrimitiveError, Prp, Scalar, SymKey,
};
use crate::rng::LabRng;
use rand::RngCore;

#[derive(Clone, Copy, Debug)]
pub struct TagChain {
    pub blocks: usize,
    k: usize,
    kem: HybridKem,
    prp: Prp,
}

/// A relay on the chain: identity and public key.
pub struct ChainHop<'a> {
    pub name: &'a str,
    pub public: GroupElement,
}

impl TagChain {
    pub fn new(blocks: usize, k: usize) -> Self {
        let kem = HybridKem::new(k, 2 * k);
        TagChain { blocks, k, kem, prp: Prp::new(kem.ciphertext_len()) }
    }

    /// κ in bytes.
    pub fn k(&self) -> usize {
        self.k
    }

    /// |c|
    pub fn block_len(&self) -> usize {
        self.kem.ciphertext_len()
    }

    pub fn len(&self) -> usize {
        self.blocks * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks == 0
    }

    fn split<'b>(&self, ext: &'b [u8]) -> Vec<&'b [u8]> {
        ext.chunks(self.block_len()).collect()
    }

    /// `(Dec_sym(k, B_2), …, Dec_sym(k, B_N), PRNG(KDF(P_i, k)))`.
    pub fn proc_padding(&self, key: &SymKey, name: &str, blocks: &[&[u8]]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        for b in &blocks[1..] {
            out.extend(self.prp.decrypt(key, b).expect("block length fixed by split"));
        }
        out.extend(prg(&kdf(name.as_bytes(), key), self.block_len()));
        out
    }

    fn tag(&self, key: &SymKey, id: Option<&[u8]>, next_inner: &[u8], rest: &[&[u8]]) -> Vec<u8> {
        let mut parts: Vec<&[u8]> = Vec::with_capacity(rest.len() + 2);
        if let Some(id) = id {
            parts.push(id);
        }
        parts.push(next_inner);
        parts.extend_from_slice(rest);
        mac(key, &parts)
    }

    /// Extensions for layers `1..=n+1` given the inner layers `O_1..O_{n+1}`
    /// and the `n` relays (the receiver carries an unchecked chain).
    pub fn build(
        &self,
        inner: &[Vec<u8>],
        relays: &[ChainHop<'_>],
        id: Option<&[u8]>,
        rng: &mut LabRng,
    ) -> Result<Vec<Vec<u8>>, PrimitiveError> {
        let n = relays.len();
        assert!(n <= self.blocks && inner.len() == n + 1, "caller checks the path length");
        let keys: Vec<SymKey> = (0..n).map(|_| SymKey::random(self.k, rng)).collect();

        let mut chain = vec![0u8; self.len()];
        rng.fill_bytes(&mut chain);
        for (key, hop) in keys.iter().zip(relays) {
            chain = self.proc_padding(key, hop.name, &self.split(&chain));
        }
        let mut exts = vec![Vec::new(); n + 1];
        exts[n] = chain.clone();

        for i in (0..n).rev() {
            let blocks = self.split(&chain);
            let mut shifted: Vec<Vec<u8>> = Vec::with_capacity(self.blocks - 1);
            for b in &blocks[..self.blocks - 1] {
                shifted.push(self.prp.encrypt(&keys[i], b)?);
            }
            let refs: Vec<&[u8]> = shifted.iter().map(|v| v.as_slice()).collect();
            let t = self.tag(&keys[i], id, &inner[i + 1], &refs);
            let mut embed = keys[i].as_bytes().to_vec();
            embed.extend_from_slice(&t);
            let head = self.kem.encrypt(&relays[i].public, &embed, rng)?;
            chain = head;
            for s in &shifted {
                chain.extend_from_slice(s);
            }
            exts[i] = chain.clone();
        }
        Ok(exts)
    }

    /// Relay-side check and re-padding. `None` if block 1 does not decrypt
    /// or the tag does not verify.
    pub fn process(&self, sk: &Scalar, name: &str, id: Option<&[u8]>, next_inner: &[u8], ext: &[u8]) -> Option<Vec<u8>> {
        if ext.len() != self.len() {
            return None;
        }
        let blocks = self.split(ext);
        let embed = self.kem.decrypt(sk, blocks[0]).ok()?;
        let (key, t) = embed.split_at(self.k);
        let key = SymKey::from_bytes(key.to_vec());
        let mut parts: Vec<&[u8]> = Vec::new();
        if let Some(id) = id {
            parts.push(id);
        }
        parts.push(next_inner);
        parts.extend_from_slice(&blocks[1..]);
        if !mac_verify(&key, &parts, t) {
            return None;
        }
        Some(self.proc_padding(&key, name, &blocks))
    }
}
