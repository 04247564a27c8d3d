use onionlab::primitives::SuiteParams;
use onionlab::vectors::{wire_vectors, WireVector, VECTOR_MESSAGE};
use std::path::PathBuf;

const SEED: u64 = 20;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/wire_vectors.json")
}

/// Set `ONIONLAB_BLESS=1` to rewrite the golden file after an intended
/// wire format change.
#[test]
fn wire_vectors_match_golden_file() {
    let fresh = wire_vectors(&SuiteParams::lab(), SEED).unwrap();
    if std::env::var_os("ONIONLAB_BLESS").is_some() {
        let text = serde_json::to_string_pretty(&fresh).unwrap();
        std::fs::write(golden_path(), text + "\n").unwrap();
    }
    let text = std::fs::read_to_string(golden_path()).expect("golden file present");
    let golden: Vec<WireVector> = serde_json::from_str(&text).unwrap();
    assert_eq!(golden.len(), fresh.len());
    for (g, f) in golden.iter().zip(&fresh) {
        assert_eq!(g, f, "scheme {}", g.scheme);
    }
}

#[test]
fn every_vector_delivers_its_message() {
    for v in wire_vectors(&SuiteParams::lab(), SEED).unwrap() {
        assert_eq!(hex::decode(&v.delivered_hex).unwrap(), VECTOR_MESSAGE, "{}", v.scheme);
        assert_eq!(v.first_layer_hex.len(), 2 * v.onion_len, "{}", v.scheme);
        assert_eq!(v.routed_sha256.len(), v.path.len(), "{}", v.scheme);
        assert_eq!(v.routed_sha256[0], v.layer_sha256[0], "{}", v.scheme);
    }
}
