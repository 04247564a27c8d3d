//! Schemes built on top of an inner onion-routing scheme: two deliberate
//! counterexamples, the wrap-resistance extension and the onion-integrity
//! extension.

mod broken1;
mod chain_scheme;
mod tag_chain;
mod wr;

pub use broken1::Broken1;
pub use chain_scheme::ChainScheme;
pub use tag_chain::{ChainHop, TagChain};
pub use wr::WrapResistant;

use crate::scheme::Onion;
use crate::sphinx::DropReason;

/// Split an onion into its inner part and a fixed-length suffix.
pub(crate) fn split_suffix(onion: &Onion, inner_len: usize, suffix_len: usize) -> Result<(&[u8], &[u8]), DropReason> {
    if onion.len() != inner_len + suffix_len {
        return Err(DropReason::BadLength);
    }
    Ok(onion.as_bytes().split_at(inner_len))
}
