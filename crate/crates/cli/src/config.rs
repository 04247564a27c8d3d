//! Run configuration: built-in defaults, then the TOML file, then flags.
//! The seed falls back to `ONIONLAB_SEED` when neither sets it.

use anyhow::{bail, Context, Result};
use onionlab::primitives::SuiteParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "ONIONLAB_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SCHEME: &str = "sphinx-ae";
pub const DEFAULT_TRIALS: u64 = 1_000;
pub const DEFAULT_ROUTERS: usize = 8;

/// Settings shared by every subcommand, as read from a config file or
/// given on the command line. Unset fields fall through to the next source.
#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Onion scheme, for example `sphinx-ae`, `broken2` or `wr(sphinx-ae)`.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trials per estimate.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Security parameter in bits.
    #[arg(long, global = true)]
    pub kappa: Option<usize>,
    /// Maximum number of hops.
    #[arg(long, global = true)]
    pub max_hops: Option<usize>,
    /// Payload size in bits.
    #[arg(long, global = true)]
    pub payload_bits: Option<usize>,
    /// Routers in the simulated network.
    #[arg(long, global = true)]
    pub routers: Option<usize>,
    /// Append one JSON record per report to this file.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
    /// Parties corrupted in notion games, replacing the attack's own set.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default)]
    pub corrupted: Option<Vec<String>>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Flags in `self` win over `file`.
    pub fn over(self, file: Settings) -> Settings {
        Settings {
            scheme: self.scheme.or(file.scheme),
            seed: self.seed.or(file.seed),
            trials: self.trials.or(file.trials),
            kappa: self.kappa.or(file.kappa),
            max_hops: self.max_hops.or(file.max_hops),
            payload_bits: self.payload_bits.or(file.payload_bits),
            routers: self.routers.or(file.routers),
            log: self.log.or(file.log),
            corrupted: self.corrupted.or(file.corrupted),
        }
    }
}

/// Fully resolved configuration. Together with the subcommand arguments it
/// determines a run bit for bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub scheme: String,
    pub params: SuiteParams,
    pub seed: u64,
    pub trials: u64,
    pub routers: usize,
    pub corrupted: Option<Vec<String>>,
    #[serde(skip)]
    pub log: Option<PathBuf>,
    /// Whether flags or the config file set the seed.
    #[serde(skip)]
    pub seed_set: bool,
    /// Whether flags or the config file set the trial count.
    #[serde(skip)]
    pub trials_set: bool,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).with_context(|| format!("{SEED_ENV}=`{v}` is not a seed")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(SEED_ENV),
    }
}

impl RunConfig {
    pub fn resolve(flags: Settings, config: Option<&Path>) -> Result<Self> {
        let file = match config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let s = flags.over(file);
        let lab = SuiteParams::lab();
        let params = SuiteParams::new(
            s.kappa.unwrap_or(lab.kappa),
            s.max_hops.unwrap_or(lab.max_hops),
            s.payload_bits.unwrap_or(lab.payload_bits),
        )
        .context("invalid suite parameters")?;
        let (seed_set, trials_set) = (s.seed.is_some(), s.trials.is_some());
        let seed = match s.seed {
            Some(seed) => seed,
            None => env_seed()?.unwrap_or(DEFAULT_SEED),
        };
        let routers = s.routers.unwrap_or(DEFAULT_ROUTERS);
        if routers < 2 {
            bail!("a network needs at least 2 routers, got {routers}");
        }
        let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            bail!("trials must be positive");
        }
        Ok(RunConfig {
            scheme: s.scheme.unwrap_or_else(|| DEFAULT_SCHEME.to_string()),
            params,
            seed,
            trials,
            routers,
            corrupted: s.corrupted,
            log: s.log,
            seed_set,
            trials_set,
        })
    }
}
