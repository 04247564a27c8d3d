//! Router directory files: `directory.json` with names and public keys,
//! and one `secrets/<name>.key` file per router holding the hex secret.

use anyhow::{bail, ensure, Context, Result};
use onionlab::primitives::{GroupElement, Scalar, SuiteParams};
use onionlab::scheme::{KeyPair, Network, NodeState};
use onionlab::sphinx::Address;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const DIRECTORY_FILE: &str = "directory.json";
pub const SECRETS_DIR: &str = "secrets";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouterEntry {
    pub name: String,
    pub public: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectoryFile {
    pub params: SuiteParams,
    pub seed: u64,
    pub routers: Vec<RouterEntry>,
}

/// Names must be unique, non-empty and fit an address slot.
pub fn check_names(names: &[String], params: &SuiteParams) -> Result<()> {
    let max = Address::max_name_len(params.k());
    let mut seen = BTreeSet::new();
    for n in names {
        ensure!(!n.is_empty(), "router names must be non-empty");
        ensure!(n.len() <= max, "router name `{n}` is longer than {max} bytes");
        ensure!(
            n.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'),
            "router name `{n}` may only contain letters, digits, `-` and `_`"
        );
        ensure!(seen.insert(n.as_str()), "duplicate router name `{n}`");
    }
    Ok(())
}

pub fn generate(names: &[String], params: &SuiteParams, seed: u64) -> Result<(DirectoryFile, Vec<KeyPair>)> {
    check_names(names, params)?;
    let mut rng = onionlab::rng::derive(seed, "keygen", 0);
    let keys: Vec<KeyPair> = names.iter().map(|_| KeyPair::generate(&mut rng)).collect();
    let routers = names
        .iter()
        .zip(&keys)
        .map(|(n, k)| RouterEntry { name: n.clone(), public: hex::encode(k.public.encode()) })
        .collect();
    Ok((DirectoryFile { params: *params, seed, routers }, keys))
}

pub fn write(dir: &Path, file: &DirectoryFile, keys: &[KeyPair]) -> Result<()> {
    let secrets = dir.join(SECRETS_DIR);
    std::fs::create_dir_all(&secrets).with_context(|| format!("creating {}", secrets.display()))?;
    let text = serde_json::to_string_pretty(file)? + "\n";
    std::fs::write(dir.join(DIRECTORY_FILE), text)?;
    for (entry, k) in file.routers.iter().zip(keys) {
        let path = secrets.join(format!("{}.key", entry.name));
        std::fs::write(&path, hex::encode(k.secret.to_bytes()) + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn decode32(hex_text: &str, what: &str) -> Result<[u8; 32]> {
    let bytes = hex::decode(hex_text.trim()).with_context(|| format!("{what} is not hex"))?;
    bytes.try_into().map_err(|_| anyhow::anyhow!("{what} is not 32 bytes"))
}

/// Read and validate a directory written by [`write`]: names are checked
/// again, public keys must be canonical, and each secret must match its
/// public key.
pub fn load(dir: &Path) -> Result<(DirectoryFile, Network)> {
    let path = dir.join(DIRECTORY_FILE);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let file: DirectoryFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let names: Vec<String> = file.routers.iter().map(|r| r.name.clone()).collect();
    check_names(&names, &file.params)?;
    let mut net = Network { dir: BTreeMap::new(), nodes: BTreeMap::new() };
    for r in &file.routers {
        let public = GroupElement::decode(&decode32(&r.public, &r.name)?)
            .map_err(|e| anyhow::anyhow!("public key of `{}`: {e}", r.name))?;
        let secret_path = dir.join(SECRETS_DIR).join(format!("{}.key", r.name));
        let secret_hex = std::fs::read_to_string(&secret_path).with_context(|| format!("reading {}", secret_path.display()))?;
        let Some(secret) = Scalar::from_canonical(decode32(&secret_hex, &r.name)?) else {
            bail!("secret key of `{}` is not a canonical non-zero scalar", r.name);
        };
        ensure!(GroupElement::base_exp(&secret) == public, "secret key of `{}` does not match its public key", r.name);
        let keys = KeyPair { public, secret };
        net.dir.insert(r.name.clone(), public);
        net.nodes.insert(r.name.clone(), NodeState::new(r.name.clone(), keys));
    }
    Ok((file, net))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_and_oversized_names_are_rejected() {
        let p = SuiteParams::lab();
        assert!(check_names(&["a".into(), "b".into()], &p).is_ok());
        assert!(check_names(&["a".into(), "a".into()], &p).is_err());
        assert!(check_names(&["x".repeat(15)], &p).is_err());
        assert!(check_names(&[String::new()], &p).is_err());
    }

    #[test]
    fn same_seed_same_directory() {
        let p = SuiteParams::lab();
        let names: Vec<String> = (0..5).map(|i| format!("N{i}")).collect();
        assert_eq!(generate(&names, &p, 3).unwrap().0, generate(&names, &p, 3).unwrap().0);
        assert_ne!(generate(&names, &p, 3).unwrap().0, generate(&names, &p, 4).unwrap().0);
    }
}
