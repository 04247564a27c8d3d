use super::SphinxError;

const KIND_NODE: u8 = 0x01;
const KIND_EXIT: u8 = 0x02;
const KIND_DEST: u8 = 0x03;

/// Routing information carried in κ-byte slots: a kind byte, a length
/// byte, the name, then zero fill. The length prefix keeps node names and
/// destinations prefix-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Address {
    Node(String),
    /// The `*` marker: this hop is the exit.
    Exit,
    Dest(String),
}

impl Address {
    pub fn max_name_len(k: usize) -> usize {
        k - 2
    }

    pub fn encode(&self, k: usize) -> Result<Vec<u8>, SphinxError> {
        let (kind, name) = match self {
            Address::Node(n) => (KIND_NODE, n.as_bytes()),
            Address::Exit => (KIND_EXIT, &[][..]),
            Address::Dest(n) => (KIND_DEST, n.as_bytes()),
        };
        if name.len() > Self::max_name_len(k) {
            return Err(SphinxError::NameTooLong(String::from_utf8_lossy(name).into_owned()));
        }
        let mut out = vec![0u8; k];
        out[0] = kind;
        out[1] = name.len() as u8;
        out[2..2 + name.len()].copy_from_slice(name);
        Ok(out)
    }

    /// Strict decode of one κ-byte slot: trailing fill must be zero.
    pub fn decode(slot: &[u8]) -> Option<Address> {
        if slot.len() < 2 {
            return None;
        }
        let len = slot[1] as usize;
        if 2 + len > slot.len() || slot[2 + len..].iter().any(|b| *b != 0) {
            return None;
        }
        let name = std::str::from_utf8(&slot[2..2 + len]).ok()?.to_string();
        match slot[0] {
            KIND_NODE if len > 0 => Some(Address::Node(name)),
            KIND_EXIT if len == 0 => Some(Address::Exit),
            KIND_DEST if len > 0 => Some(Address::Dest(name)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn slot_roundtrip(name in "[a-z0-9]{1,14}", kind in 0u8..3) {
            let a = match kind {
                0 => Address::Node(name),
                1 => Address::Exit,
                _ => Address::Dest(name),
            };
            let enc = a.encode(16).unwrap();
            prop_assert_eq!(enc.len(), 16);
            prop_assert_eq!(Address::decode(&enc), Some(a));
        }
    }

    #[test]
    fn long_names_and_dirty_fill_rejected() {
        assert!(Address::Node("x".repeat(15)).encode(16).is_err());
        let mut enc = Address::Node("ab".into()).encode(16).unwrap();
        enc[15] = 1;
        assert_eq!(Address::decode(&enc), None);
        assert_eq!(Address::decode(&[0u8; 16]), None);
    }
}
