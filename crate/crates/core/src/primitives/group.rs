//! Prime-order group: Ristretto255 with canonical 32-byte encodings.

use super::PrimitiveError;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as DalekScalar;
use rand::{CryptoRng, RngCore};
use std::fmt;

pub const ELEMENT_LEN: usize = 32;
pub const GROUP_ORDER_BITS: u32 = 253;

/// Non-zero exponent in Z_q^*.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Scalar(pub(crate) DalekScalar);

impl Scalar {
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = DalekScalar::random(rng);
            if s != DalekScalar::ZERO {
                return Scalar(s);
            }
        }
    }

    /// Accepts only canonical, non-zero big-endian encodings.
    pub fn from_canonical(mut bytes: [u8; 32]) -> Option<Self> {
        bytes.reverse();
        let s: Option<DalekScalar> = DalekScalar::from_canonical_bytes(bytes).into();
        s.filter(|s| *s != DalekScalar::ZERO).map(Scalar)
    }

    /// Fixed-length big-endian encoding.
    pub fn to_bytes(&self) -> [u8; 32] {
        let mut bytes = self.0.to_bytes();
        bytes.reverse();
        bytes
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar(self.0 * other.0)
    }

    pub fn one() -> Scalar {
        Scalar(DalekScalar::ONE)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Scalar(..)")
    }
}

/// Group element carried with its encoding, so hashing never recompresses.
#[derive(Clone, Copy)]
pub struct GroupElement {
    point: RistrettoPoint,
    enc: [u8; ELEMENT_LEN],
}

impl GroupElement {
    fn from_point(point: RistrettoPoint) -> Self {
        GroupElement { point, enc: point.compress().to_bytes() }
    }

    pub fn generator() -> Self {
        Self::base_exp(&Scalar::one())
    }

    /// g^x.
    pub fn base_exp(x: &Scalar) -> Self {
        Self::from_point(RistrettoPoint::mul_base(&x.0))
    }

    /// self^x.
    pub fn exp(&self, x: &Scalar) -> Self {
        Self::from_point(self.point * x.0)
    }

    pub fn encode(&self) -> [u8; ELEMENT_LEN] {
        self.enc
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, PrimitiveError> {
        if bytes.len() != ELEMENT_LEN {
            return Err(PrimitiveError::WrongLength { expected: ELEMENT_LEN, got: bytes.len() });
        }
        let mut enc = [0u8; ELEMENT_LEN];
        enc.copy_from_slice(bytes);
        let point = CompressedRistretto(enc).decompress().ok_or(PrimitiveError::Decode)?;
        Ok(GroupElement { point, enc })
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.enc == other.enc
    }
}

impl Eq for GroupElement {}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({})", hex::encode(&self.enc[..8]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn exponent_product_commutes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (a, b) = (Scalar::random(&mut rng), Scalar::random(&mut rng));
        let g = GroupElement::generator();
        assert_eq!(g.exp(&a).exp(&b), g.exp(&b).exp(&a));
        assert_eq!(g.exp(&a).exp(&b), GroupElement::base_exp(&a.mul(&b)));
    }

    #[test]
    fn decode_roundtrip_and_rejects_garbage() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let e = GroupElement::base_exp(&Scalar::random(&mut rng));
        assert_eq!(GroupElement::decode(&e.encode()).unwrap(), e);
        assert!(GroupElement::decode(&[0xff; 32]).is_err());
        assert!(GroupElement::decode(&[0u8; 31]).is_err());
    }

    #[test]
    fn scalars_encode_big_endian() {
        let mut one = [0u8; 32];
        one[31] = 1;
        assert_eq!(Scalar::one().to_bytes(), one);
        assert_eq!(Scalar::from_canonical(one), Some(Scalar::one()));
        assert_eq!(Scalar::from_canonical([0u8; 32]), None);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = Scalar::random(&mut rng);
        assert_eq!(Scalar::from_canonical(x.to_bytes()), Some(x));
        assert_eq!(x.to_bytes()[0] & 0xe0, 0, "below 2^253");
    }
}
