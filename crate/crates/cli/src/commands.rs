use crate::config::RunConfig;
use crate::keys;
use crate::output::{interval, seconds, Log, Table};
use anyhow::{anyhow, bail, Context, Result};
use onionlab::attacks::{
    blocked_sender_link, run_path_length_leak, run_tagging_attack, single_delivery_trace,
};
use onionlab::games::{
    distinguisher_suite, integrity_scheme, run_game, run_integrity_check, run_wr, CraftedOnion, GameId, GameSpec,
    IdentityCopy, RandomForgery, ReplayPrevious, WrAdversary,
};
use onionlab::notions::{
    run_notion_game, sfl_bound, standard_attack, AdversaryClass, Notion, NotionReport, ScenarioConfig, ScenarioPair,
};
use onionlab::rng::derive;
use onionlab::scheme::{scheme_by_name, Network, Onion, ProcOutput};
use onionlab::sphinx::Variant;
use onionlab::thresholds::{within_null, INDEPENDENCE_P, NOTION_ATTACK_ADVANTAGE};
use onionlab::vectors::{layer_digest, wire_vectors};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(clap::Args, Debug, Serialize)]
pub struct KeygenArgs {
    /// Number of routers, named P00, P01, ...
    #[arg(long, default_value_t = 5)]
    pub nodes: usize,
    /// Explicit router names; overrides --nodes.
    #[arg(long, value_delimiter = ',')]
    pub names: Option<Vec<String>>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn keygen(cfg: &RunConfig, a: &KeygenArgs) -> Result<ExitCode> {
    let names = a.names.clone().unwrap_or_else(|| Network::names(a.nodes));
    let (file, pairs) = keys::generate(&names, &cfg.params, cfg.seed)?;
    keys::write(&a.out, &file, &pairs)?;
    let mut log = Log::open(cfg.log.as_deref())?;
    log.write("keygen", cfg, a, &file)?;
    log.finish()?;
    let mut t = Table::new(&["router", "public key"]);
    for r in &file.routers {
        t.row(vec![r.name.clone(), r.public.clone()]);
    }
    println!("{}", t.render());
    println!("wrote {} routers to {}", file.routers.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(clap::Args, Debug, Serialize)]
pub struct RoundtripArgs {
    /// Comma-separated path; the last router is the receiver.
    #[arg(long, value_delimiter = ',', default_value = "P00,P01,P02")]
    pub path: Vec<String>,
    /// Message to send.
    #[arg(long, default_value = "hello onion")]
    pub message: String,
    /// Directory written by `keygen`; without it keys come from the seed.
    #[arg(long)]
    pub keys: Option<PathBuf>,
    /// Flip the byte at OFFSET of the onion arriving at hop HOP (1-based),
    /// written as HOP:OFFSET.
    #[arg(long)]
    pub tamper: Option<String>,
}

#[derive(Serialize)]
struct HopRecord {
    hop: usize,
    router: String,
    sha256: String,
    formed_layer: bool,
    outcome: String,
}

#[derive(Serialize)]
struct RoundtripReport {
    scheme: String,
    onion_len: usize,
    hops: Vec<HopRecord>,
    delivered: Option<String>,
    correct: bool,
}

fn parse_tamper(spec: &str) -> Result<(usize, usize)> {
    let (hop, offset) = spec.split_once(':').ok_or_else(|| anyhow!("--tamper expects HOP:OFFSET"))?;
    let hop: usize = hop.trim().parse().context("tamper hop")?;
    let offset: usize = offset.trim().parse().context("tamper offset")?;
    if hop == 0 {
        bail!("tamper hop is 1-based");
    }
    Ok((hop, offset))
}

pub fn roundtrip(cfg: &RunConfig, a: &RoundtripArgs) -> Result<ExitCode> {
    let scheme = scheme_by_name(&cfg.scheme, &cfg.params)?;
    let mut rng = derive(cfg.seed, "roundtrip", 0);
    let mut net = match &a.keys {
        Some(dir) => keys::load(dir)?.1,
        None => Network::generate(scheme.as_ref(), &Network::names(cfg.routers), &mut rng),
    };
    let tamper = a.tamper.as_deref().map(parse_tamper).transpose()?;
    if let Some((_, offset)) = tamper {
        if offset >= scheme.onion_len() {
            bail!("tamper offset {offset} is outside the {}-byte onion", scheme.onion_len());
        }
    }
    let m = a.message.as_bytes();
    let layers = scheme.form_onion(m, &a.path, &net.dir, &mut rng)?;

    let mut hops = Vec::new();
    let mut at = a.path[0].clone();
    let mut onion = layers[0].clone();
    let mut delivered = None;
    loop {
        let hop = hops.len() + 1;
        if let Some((h, offset)) = tamper {
            if h == hop {
                let mut bytes = onion.0;
                bytes[offset] ^= 0x01;
                onion = Onion(bytes);
            }
        }
        let formed = layers.get(hop - 1).is_some_and(|l| *l == onion || scheme.is_duplicate(l, &onion));
        let out = net.process(scheme.as_ref(), &at, &onion).ok_or_else(|| anyhow!("router `{at}` is not in the network"))?;
        let (outcome, next) = match out {
            ProcOutput::Relay { next, onion: o } => (format!("relay to {next}"), Some((next, o))),
            ProcOutput::Receive { message } => {
                let text = String::from_utf8_lossy(&message).into_owned();
                delivered = Some(message);
                (format!("receive {text:?}"), None)
            }
            ProcOutput::Fail(reason) => (format!("drop: {reason:?}"), None),
        };
        hops.push(HopRecord { hop, router: at.clone(), sha256: layer_digest(onion.as_bytes()), formed_layer: formed, outcome });
        match next {
            Some((n, o)) if net.dir.contains_key(&n) && hops.len() <= scheme.max_path_len() => {
                at = n;
                onion = o;
            }
            Some((n, _)) => {
                hops.last_mut().expect("one hop").outcome.push_str(&format!(" (`{n}` unreachable)"));
                break;
            }
            None => break,
        }
    }
    let correct = delivered.as_deref() == Some(m) && hops.len() == a.path.len();
    let report = RoundtripReport {
        scheme: scheme.name(),
        onion_len: scheme.onion_len(),
        hops,
        delivered: delivered.map(hex::encode),
        correct,
    };
    let mut log = Log::open(cfg.log.as_deref())?;
    log.write("roundtrip", cfg, a, &report)?;
    log.finish()?;

    let mut t = Table::new(&["hop", "router", "layer sha256", "formed layer", "outcome"]);
    for h in &report.hops {
        t.row(vec![h.hop.to_string(), h.router.clone(), h.sha256[..16].to_string(), h.formed_layer.to_string(), h.outcome.clone()]);
    }
    println!("{} onion of {} bytes\n{}", report.scheme, report.onion_len, t.render());
    if correct {
        println!("delivered the message over {} hops", report.hops.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not delivered: {}", report.hops.last().map_or("", |h| h.outcome.as_str()));
        Ok(ExitCode::from(1))
    }
}

#[derive(clap::Args, Debug, Serialize)]
pub struct GameArgs {
    /// OS, LU, LU-dup, TI or OS-mod.
    pub game: String,
    /// One distinguisher by name, or `all` for the scheme's suite.
    #[arg(long, default_value = "all")]
    pub adversary: String,
}

/// Scheme and game combinations where the suite is expected to win, with
/// the property responsible.
pub fn known_break(game: GameId, scheme: &str) -> Option<&'static str> {
    use GameId::*;
    match (scheme, game) {
        ("broken1", Ti) => Some("path embedded in the message"),
        ("broken2", Lu | LuDup) => Some("identifier shared by all layers"),
        ("sphinx-malleable", Os | Lu | OsMod) => Some("malleable payload"),
        ("sphinx-flawed", Ti) => Some("zero padding reveals the path length"),
        ("sphinx-flawed" | "sphinx-fixed", Os | Lu) => Some("unauthenticated payload with a stateless oracle"),
        _ => None,
    }
}

pub fn game(cfg: &RunConfig, a: &GameArgs) -> Result<ExitCode> {
    let id: GameId = a.game.parse().map_err(|e: String| anyhow!(e))?;
    let suite = distinguisher_suite(&cfg.scheme, &cfg.params);
    let chosen: Vec<_> = if a.adversary == "all" {
        suite
    } else {
        let names: Vec<String> = suite.iter().map(|d| d.name()).collect();
        let one: Vec<_> = suite.into_iter().filter(|d| d.name() == a.adversary).collect();
        if one.is_empty() {
            bail!("unknown distinguisher `{}`; available: {}", a.adversary, names.join(", "));
        }
        one
    };
    let spec = GameSpec { params: cfg.params, routers: cfg.routers, ..GameSpec::new(id, &cfg.scheme, cfg.trials, cfg.seed) };
    let mut log = Log::open(cfg.log.as_deref())?;
    let mut t = Table::new(&["distinguisher", "wins", "win rate", "95% CI", "advantage", "3 sigma", "result", "runtime"]);
    let mut all_null = true;
    for d in &chosen {
        let start = Instant::now();
        let r = run_game(&spec, d.as_ref())?;
        let null = within_null(r.advantage, r.sigma);
        all_null &= null;
        log.write("game", cfg, a, &r)?;
        t.row(vec![
            r.adversary.clone(),
            format!("{}/{}", r.wins, r.trials),
            format!("{:.4}", r.win_rate),
            interval(r.wilson95),
            format!("{:.4}", r.advantage),
            format!("{:.4}", 3.0 * r.sigma),
            if null { "null" } else { "distinguishes" }.to_string(),
            seconds(start.elapsed()),
        ]);
    }
    log.finish()?;
    println!("{} on {} ({} trials per distinguisher, seed {})", id.name(), cfg.scheme, cfg.trials, cfg.seed);
    println!("{}", t.render());
    let verdict = if all_null { "PASS" } else { "FAIL" };
    match (all_null, known_break(id, &cfg.scheme)) {
        (false, Some(why)) => println!("{verdict} (expected: {why})"),
        (true, Some(why)) => println!("{verdict} (unexpected: {why} should be detectable; try more trials)"),
        (false, None) => println!("{verdict} (unexpected)"),
        (true, None) => println!("{verdict}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackId {
    /// Exit-side path-length probe on a Sphinx variant.
    PathLength,
    /// Payload tagging by a corrupt first relay and receiver.
    Tagging,
    /// Selective delivery against sender-receiver unlinkability.
    SingleDelivery,
    /// Withholding one sender's onion against a corrupt receiver.
    BlockedSender,
    /// Wrap-resistance forgery game.
    Wrap,
    /// Crafted onions against the onion-integrity chain.
    Integrity,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct AttackArgs {
    #[arg(value_enum)]
    pub attack: AttackId,
    /// Frames inverted by the tagging relay.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Adversary class for the ideal-functionality attacks: identity, cp or c.
    #[arg(long, default_value = "cp")]
    pub class: String,
    /// Single-communication variant of the blocked-sender attack.
    #[arg(long)]
    pub single: bool,
    /// Forger for the wrap game: identity-copy, random or replay.
    #[arg(long, default_value = "identity-copy")]
    pub forger: String,
    /// Onion crafted against the integrity chain: honest, overlong or stuffed.
    #[arg(long, default_value = "overlong")]
    pub crafted: String,
}

fn variant(scheme: &str) -> Result<Variant> {
    Variant::from_name(scheme).ok_or_else(|| anyhow!("attack needs a Sphinx variant, not `{scheme}`"))
}

fn class(name: &str) -> Result<AdversaryClass> {
    name.parse().map_err(|e: String| anyhow!(e))
}

fn notion_row(t: &mut Table, r: &NotionReport, runtime: std::time::Duration) {
    t.row(vec![
        r.notion.clone(),
        r.class.clone(),
        r.strategy.clone(),
        format!("{}/{}", r.wins, r.trials),
        interval(r.wilson95),
        format!("{:.4}", r.advantage),
        format!("{:.4}", 3.0 * r.sigma),
        seconds(runtime),
    ]);
}

const NOTION_HEADER: [&str; 8] = ["notion", "class", "strategy", "wins", "95% CI", "advantage", "3 sigma", "runtime"];

pub fn attack(cfg: &RunConfig, a: &AttackArgs) -> Result<ExitCode> {
    let mut log = Log::open(cfg.log.as_deref())?;
    let start = Instant::now();
    let (title, table) = match a.attack {
        AttackId::PathLength => {
            let r = run_path_length_leak(variant(&cfg.scheme)?, &cfg.params, cfg.trials, cfg.seed)?;
            log.write("attack", cfg, a, &r)?;
            let mut header = vec!["path length".to_string()];
            header.extend((1..=cfg.params.max_hops).map(|b| format!("probe={b}")));
            header.push("exact".into());
            let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for (i, row) in r.histogram.iter().enumerate() {
                let mut cells = vec![(i + 1).to_string()];
                cells.extend(row.iter().map(u64::to_string));
                cells.push(format!("{:.4}", r.exact[i]));
                t.row(cells);
            }
            let leak = if r.p_value <= INDEPENDENCE_P { "probe output depends on the path length" } else { "no dependence detected" };
            (format!("path-length probe on {}: chi-square {:.2}, p {:.4}: {leak}", r.scheme, r.chi_square, r.p_value), t)
        }
        AttackId::Tagging => {
            let r = run_tagging_attack(variant(&cfg.scheme)?, &cfg.params, a.k, cfg.trials, cfg.seed)?;
            log.write("attack", cfg, a, &r)?;
            let mut t = Table::new(&["frames", "inverted", "linked", "delivered", "prefix recovered", "bytes recovered", "dropped at hop"]);
            t.row(vec![
                r.frames.to_string(),
                r.k.to_string(),
                format!("{}/{}", r.linked, r.trials),
                r.tagged_delivered.to_string(),
                r.prefix_recovered.to_string(),
                r.recovered_bytes.to_string(),
                format!("{:?}", r.dropped_at),
            ]);
            (format!("payload tagging on {}", r.scheme), t)
        }
        AttackId::SingleDelivery | AttackId::BlockedSender => {
            let c = class(&a.class)?;
            let r = match a.attack {
                AttackId::SingleDelivery => single_delivery_trace(c, cfg.trials, cfg.seed)?,
                _ => blocked_sender_link(c, a.single, cfg.trials, cfg.seed)?,
            };
            log.write("attack", cfg, a, &r)?;
            let mut t = Table::new(&NOTION_HEADER);
            notion_row(&mut t, &r, start.elapsed());
            ("selective delivery on the ideal functionality".to_string(), t)
        }
        AttackId::Wrap => {
            let forger: &dyn WrAdversary = match a.forger.as_str() {
                "identity-copy" => &IdentityCopy,
                "random" => &RandomForgery,
                "replay" => &ReplayPrevious,
                other => bail!("unknown forger `{other}`; use identity-copy, random or replay"),
            };
            let r = run_wr(&cfg.scheme, &cfg.params, forger, cfg.trials, cfg.seed)?;
            log.write("attack", cfg, a, &r)?;
            let mut t = Table::new(&["forger", "successes", "rejected", "success rate", "95% CI"]);
            t.row(vec![
                r.adversary.clone(),
                format!("{}/{}", r.successes, r.trials),
                r.rejected.to_string(),
                format!("{:.4}", r.success_rate),
                interval(r.wilson95),
            ]);
            (format!("wrap forgery on {}", r.scheme), t)
        }
        AttackId::Integrity => {
            let crafted = CraftedOnion::ALL
                .into_iter()
                .find(|c| c.name() == a.crafted)
                .ok_or_else(|| anyhow!("unknown crafted onion `{}`; use honest, overlong or stuffed", a.crafted))?;
            let n = cfg.params.max_hops - 1;
            let scheme = integrity_scheme(&cfg.params, n)?;
            let r = run_integrity_check(&scheme, crafted, cfg.routers, cfg.trials, cfg.seed)?;
            log.write("attack", cfg, a, &r)?;
            let mut t = Table::new(&["crafted", "bound N", "delivered", "max relayed", "aborted at hop", "drops"]);
            t.row(vec![
                r.crafted.clone(),
                r.bound.to_string(),
                format!("{}/{}", r.delivered, r.trials),
                r.max_relayed.to_string(),
                format!("{:?}", r.aborted_at),
                format!("{:?}", r.drops),
            ]);
            (format!("onion integrity on {}", r.scheme), t)
        }
    };
    log.finish()?;
    println!("{title} ({} trials, seed {})", cfg.trials, cfg.seed);
    println!("{}", table.render());
    println!("runtime {}", seconds(start.elapsed()));
    Ok(ExitCode::SUCCESS)
}

#[derive(clap::Args, Debug, Serialize)]
pub struct NotionArgs {
    /// Notion, for example SRL, (SM)L, MO-|M| or SFL-P. Optional when the
    /// scenario file names one.
    pub notion: Option<String>,
    /// Adversary class: identity, cp or c. Defaults to the scenario file's
    /// class, then cp.
    #[arg(long)]
    pub class: Option<String>,
    /// Scenario file replacing the attack's parties.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

pub fn notion(cfg: &RunConfig, a: &NotionArgs) -> Result<ExitCode> {
    let file = a.scenario.as_deref().map(ScenarioFile::load).transpose()?.unwrap_or_default();
    let name = a.notion.as_deref().or(file.notion.as_deref()).ok_or_else(|| anyhow!("no notion given"))?;
    let notion: Notion = name.parse().map_err(|e: String| anyhow!(e))?;
    let c = class(a.class.as_deref().or(file.class.as_deref()).unwrap_or("cp"))?;
    let mut setup = standard_attack(notion, c);
    file.apply(&mut setup.game.config);
    if let Some(corrupted) = &cfg.corrupted {
        setup.game.config.corrupted = corrupted.iter().cloned().collect();
    }
    check_parties(&setup.game.config, &setup.strategy.propose())?;
    // Flags and the config file were merged into `cfg`; the scenario file
    // fills trials and seed only where neither set them.
    let trials = if cfg.trials_set { cfg.trials } else { file.trials.unwrap_or(cfg.trials) };
    let seed = if cfg.seed_set { cfg.seed } else { file.seed.unwrap_or(cfg.seed) };
    let cfg = &RunConfig { trials, seed, ..cfg.clone() };
    let start = Instant::now();
    let r = run_notion_game(&setup.game, setup.strategy.as_ref(), cfg.trials, cfg.seed)?;
    let runtime = start.elapsed();
    let mut log = Log::open(cfg.log.as_deref())?;
    log.write("notion", cfg, a, &r)?;
    log.finish()?;
    let mut t = Table::new(&NOTION_HEADER);
    notion_row(&mut t, &r, runtime);
    println!("{} with {} corruption (seed {})", r.notion, r.corruption, cfg.seed);
    println!("{}", t.render());
    if matches!(notion, Notion::SflP | Notion::RflP) {
        let g = &setup.game.config;
        let bound = sfl_bound(g.honest_relays().len(), g.max_path, g.users.len(), 6);
        let met = r.wilson95.1 >= bound;
        println!("counting bound {bound:.5}: {}", if met { "met" } else { "not met" });
    } else if within_null(r.advantage, r.sigma) {
        println!("advantage within 3 sigma of 0");
    } else if r.advantage >= NOTION_ATTACK_ADVANTAGE {
        println!("attack breaks the notion");
    } else {
        println!("advantage above noise but below {NOTION_ATTACK_ADVANTAGE}");
    }
    Ok(ExitCode::SUCCESS)
}

/// Parties and settings of a notion run. Every field is optional; unset
/// fields keep the values of the notion's standard attack.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub notion: Option<String>,
    pub class: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub users: Option<Vec<String>>,
    pub relays: Option<Vec<String>>,
    pub corrupted: Option<Vec<String>>,
    pub max_path: Option<usize>,
}

impl ScenarioFile {
    fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(u) = &self.users {
            cfg.users = u.clone();
        }
        if let Some(r) = &self.relays {
            cfg.relays = r.clone();
        }
        if let Some(c) = &self.corrupted {
            cfg.corrupted = c.iter().cloned().collect();
        }
        if let Some(n) = self.max_path {
            cfg.max_path = n;
        }
    }
}

/// Every sender and receiver of the attack's scenarios must be a user, and
/// every relay on a given path must be in the relay pool.
fn check_parties(cfg: &ScenarioConfig, pair: &ScenarioPair) -> Result<()> {
    for c in pair.batches().flatten() {
        for u in [&c.sender, &c.receiver] {
            if !cfg.users.contains(u) {
                bail!("the attack needs user `{u}`, which the scenario does not list");
            }
        }
        if let Some(r) = c.path.iter().find(|r| !cfg.relays.contains(r)) {
            bail!("the attack routes through `{r}`, which is not in the relay pool");
        }
    }
    if cfg.max_path == 0 {
        bail!("max_path must be positive");
    }
    Ok(())
}

#[derive(clap::Args, Debug, Serialize)]
pub struct VectorsArgs {
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn vectors(cfg: &RunConfig, a: &VectorsArgs) -> Result<ExitCode> {
    let v = wire_vectors(&cfg.params, cfg.seed)?;
    let text = serde_json::to_string_pretty(&v)? + "\n";
    match &a.out {
        Some(p) => {
            std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {} vectors to {}", v.len(), p.display());
        }
        None => print!("{text}"),
    }
    let mut log = Log::open(cfg.log.as_deref())?;
    log.write("vectors", cfg, a, &v)?;
    log.finish()?;
    Ok(ExitCode::SUCCESS)
}
