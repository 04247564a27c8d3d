//! Provably-secure onion routing lab: Sphinx variants, an ideal onion
//! routing functionality, privacy-notion games, cryptographic security
//! games, counterexample protocols, protocol extensions and attacks.

pub mod attacks;
pub mod extensions;
pub mod games;
pub mod ideal;
pub mod notions;
pub mod primitives;
pub mod rng;
pub mod scheme;
pub mod sphinx;
pub mod stats;
pub mod thresholds;
pub mod vectors;
