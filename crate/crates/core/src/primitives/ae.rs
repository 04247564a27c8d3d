//! Length-preserving authenticated encryption: stream cipher then MAC over
//! the associated data and ciphertext. The tag is κ bits.

use super::{kdf, mac, mac_verify, prg, xor_into, PrimitiveError, SymKey};

fn subkeys(key: &SymKey) -> (SymKey, SymKey) {
    (kdf(b"ae-enc", key), kdf(b"ae-mac", key))
}

/// Returns `(ct, tag)` with `ct.len() == payload.len()`.
pub fn ae_seal(key: &SymKey, payload: &[u8], aad: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let (ke, km) = subkeys(key);
    let mut ct = payload.to_vec();
    let ks = prg(&ke, ct.len());
    xor_into(&mut ct, &ks);
    let tag = mac(&km, &[&(aad.len() as u64).to_be_bytes(), aad, &ct]);
    (ct, tag)
}

pub fn ae_open(key: &SymKey, ct: &[u8], tag: &[u8], aad: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
    let (ke, km) = subkeys(key);
    if !mac_verify(&km, &[&(aad.len() as u64).to_be_bytes(), aad, ct], tag) {
        return Err(PrimitiveError::AuthFail);
    }
    let mut pt = ct.to_vec();
    let ks = prg(&ke, pt.len());
    xor_into(&mut pt, &ks);
    Ok(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn roundtrip_and_tamper(key in prop::collection::vec(any::<u8>(), 16),
                                pt in prop::collection::vec(any::<u8>(), 1..200),
                                aad in prop::collection::vec(any::<u8>(), 0..40),
                                flip in any::<usize>()) {
            let key = SymKey::from_bytes(key);
            let (ct, tag) = ae_seal(&key, &pt, &aad);
            prop_assert_eq!(ct.len(), pt.len());
            prop_assert_eq!(tag.len(), 16);
            prop_assert_eq!(ae_open(&key, &ct, &tag, &aad).unwrap(), pt);
            let mut bad = ct.clone();
            bad[flip % ct.len()] ^= 0x01;
            prop_assert_eq!(ae_open(&key, &bad, &tag, &aad), Err(PrimitiveError::AuthFail));
            let mut aad2 = aad.clone();
            aad2.push(0);
            prop_assert_eq!(ae_open(&key, &ct, &tag, &aad2), Err(PrimitiveError::AuthFail));
        }
    }
}
