//! Executable attacks: the exit-side path-length probe against zero
//! padding, the payload tagging attack against malleable payloads, and the
//! selective-delivery attacks on the ideal functionality.

mod path_length;
mod tagging;

pub use path_length::{path_length_probe, run_path_length_leak, PathLengthReport};
pub use tagging::{check_frames, frame_message, run_tagging_attack, TaggingReport, FRAME_DATA, FRAME_LEN, MARKER};

use crate::notions::{run_notion_game, standard_attack, AdversaryClass, Notion, NotionError, NotionReport};

/// Deliver only the onion of the followed sender, one segment at a time,
/// until it reaches a receiver, then guess by the receiver's identity.
pub fn single_delivery_trace(class: AdversaryClass, trials: u64, seed: u64) -> Result<NotionReport, NotionError> {
    let setup = standard_attack(Notion::Srl, class);
    run_notion_game(&setup.game, setup.strategy.as_ref(), trials, seed)
}

/// Withhold the other sender's onion; whatever message reaches the corrupt
/// receiver then belongs to the followed sender. With `single` set, the
/// one-communication variant against sender-message unobservability runs.
pub fn blocked_sender_link(class: AdversaryClass, single: bool, trials: u64, seed: u64) -> Result<NotionReport, NotionError> {
    let notion = if single { Notion::Smo } else { Notion::SmlPair };
    let setup = standard_attack(notion, class);
    run_notion_game(&setup.game, setup.strategy.as_ref(), trials, seed)
}
