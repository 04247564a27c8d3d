//! Acceptance run: every criterion at its stated trial count and
//! tolerance, one PASS/FAIL line each. The process exits non-zero if any
//! criterion fails.

use onionlab::attacks::{run_path_length_leak, run_tagging_attack};
use onionlab::games::{
    distinguisher_suite, integrity_scheme, run_game, run_integrity_check, run_wr, CraftedOnion, Distinguisher,
    GameId, GameSpec, IdScan, IdentityCopy, PathReader, RandomForgery,
};
use onionlab::notions::{mo_trace_equality, run_notion_game, sfl_bound, standard_attack, AdversaryClass, Notion};
use onionlab::primitives::SuiteParams;
use onionlab::scheme::check_correctness;
use onionlab::sphinx::Variant;
use onionlab::thresholds::*;
use serde::Serialize;
use std::time::Instant;

const SEED: u64 = 0x5eed_2024;

const CORRECTNESS_SCHEMES: &[&str] = &[
    "sphinx-flawed",
    "sphinx-fixed",
    "sphinx-ae",
    "sphinx-malleable",
    "broken1",
    "broken2",
    "wr(sphinx-ae)",
    "oi(sphinx-ae)",
];

/// Result of one criterion plus the serialized reports it was judged on.
struct Verdict {
    pass: bool,
    detail: String,
    log: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, detail: String::new(), log: Vec::new() }
    }

    fn record<T: Serialize>(&mut self, report: &T) {
        self.log.push(serde_json::to_string(report).expect("reports serialize"));
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }
}

fn correctness(params: &SuiteParams) -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let mut instances = 0;
    for scheme in CORRECTNESS_SCHEMES {
        for nu in 1..=params.max_hops {
            let r = check_correctness(scheme, params, nu, CORRECTNESS_ROUTERS, CORRECTNESS_TRIALS, SEED).unwrap();
            instances += r.trials;
            v.require(r.failures == 0, format!("{scheme} nu={nu}: {:?}", r.first_failure));
            v.record(&r);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    v.require(secs < CORRECTNESS_BUDGET_SECS, format!("took {secs:.1}s"));
    if v.pass {
        v.detail = format!("{instances} instances, 0 failures, {secs:.1}s");
    }
    v
}

fn path_length(params: &SuiteParams) -> Verdict {
    let mut v = Verdict::new();
    let flawed = run_path_length_leak(Variant::OriginalFlawed, params, PATH_LENGTH_TRIALS, SEED).unwrap();
    let worst = flawed.exact.iter().cloned().fold(1.0, f64::min);
    v.require(worst >= PATH_LENGTH_EXACT, format!("flawed exact share {worst}"));
    let fixed = run_path_length_leak(Variant::OriginalFixed, params, PATH_LENGTH_TRIALS, SEED).unwrap();
    v.require(fixed.p_value > INDEPENDENCE_P, format!("fixed p = {}", fixed.p_value));
    if v.pass {
        v.detail = format!("flawed min exact {worst:.4}; fixed chi-square p {:.3}", fixed.p_value);
    }
    v.record(&flawed);
    v.record(&fixed);
    v
}

fn tagging(params: &SuiteParams) -> Verdict {
    let mut v = Verdict::new();
    let m = run_tagging_attack(Variant::MalleablePayload, params, 1, TAGGING_TRIALS, SEED).unwrap();
    v.require(m.linked == m.trials, format!("linked {}/{}", m.linked, m.trials));
    v.require(m.prefix_recovered == m.trials, format!("prefix recovered {}/{}", m.prefix_recovered, m.trials));
    v.require(m.recovered_bytes == (m.frames - 1) * onionlab::attacks::FRAME_LEN, "recovered length");
    let ae = run_tagging_attack(Variant::AdaptedAe, params, 1, TAGGING_TRIALS, SEED).unwrap();
    v.require(ae.tagged_delivered == 0, format!("sphinx-ae delivered {}", ae.tagged_delivered));
    if v.pass {
        v.detail = format!(
            "malleable linked {}/{} with {} bytes recovered; sphinx-ae delivered 0, dropped at {:?}",
            m.linked, m.trials, m.recovered_bytes, ae.dropped_at
        );
    }
    v.record(&m);
    v.record(&ae);
    v
}

fn game(v: &mut Verdict, game: GameId, scheme: &str, d: &dyn Distinguisher) -> onionlab::games::GameReport {
    let r = run_game(&GameSpec::new(game, scheme, GAME_TRIALS, SEED), d).unwrap();
    v.record(&r);
    r
}

fn games(params: &SuiteParams) -> Verdict {
    let mut v = Verdict::new();
    let mut worst: f64 = 0.0;
    for (g, scheme) in [(GameId::Lu, "sphinx-ae"), (GameId::Ti, "sphinx-ae"), (GameId::Os, "broken2")] {
        for d in distinguisher_suite(scheme, params) {
            let r = game(&mut v, g, scheme, d.as_ref());
            worst = worst.max(r.advantage / r.sigma);
            v.require(
                within_null(r.advantage, r.sigma),
                format!("{} {} {}: advantage {:.4}", r.game, r.scheme, r.adversary, r.advantage),
            );
        }
    }
    let reader = PathReader::new("sphinx-ae", params).unwrap();
    let b1 = game(&mut v, GameId::Ti, "broken1", &reader);
    v.require(b1.advantage >= BREAK_ADVANTAGE, format!("broken1 TI advantage {}", b1.advantage));
    let b2 = game(&mut v, GameId::Lu, "broken2", &IdScan);
    v.require(b2.advantage >= BREAK_ADVANTAGE, format!("broken2 LU advantage {}", b2.advantage));
    if v.pass {
        v.detail = format!(
            "null suites max {worst:.2} sigma; broken1 TI {:.4}; broken2 LU {:.4}",
            b1.advantage, b2.advantage
        );
    }
    v
}

fn wrap_and_integrity(params: &SuiteParams) -> Verdict {
    let mut v = Verdict::new();
    for adv in [&IdentityCopy as &dyn onionlab::games::WrAdversary, &RandomForgery] {
        let r = run_wr("wr(sphinx-ae)", params, adv, WR_TRIALS, SEED).unwrap();
        v.require(r.successes == 0, format!("{}: {} forgeries", r.adversary, r.successes));
        v.record(&r);
    }
    let n = params.max_hops - 1;
    let scheme = integrity_scheme(params, n).unwrap();
    let r = run_integrity_check(&scheme, CraftedOnion::Overlong, CORRECTNESS_ROUTERS, INTEGRITY_TRIALS, SEED).unwrap();
    let at_bound = r.aborted_at.get(&(n + 1)).copied().unwrap_or(0);
    v.require(at_bound == r.trials, format!("aborted at N+1: {at_bound}/{}; {:?}", r.trials, r.aborted_at));
    v.require(r.delivered == 0, format!("{} delivered", r.delivered));
    if v.pass {
        v.detail = format!("0 forgeries in {WR_TRIALS} trials; {at_bound}/{} aborted at hop {}", r.trials, n + 1);
    }
    v.record(&r);
    v
}

const PATH_REPLACEMENT_NOTIONS: [Notion; 9] = [
    Notion::Srl,
    Notion::Sro,
    Notion::TwoSl,
    Notion::TwoRl,
    Notion::SmlPair,
    Notion::Smo,
    Notion::RmlPair,
    Notion::Rmo,
    Notion::MoLen,
];

fn path_replacement() -> Verdict {
    let mut v = Verdict::new();
    let mut weakest: f64 = 1.0;
    for notion in PATH_REPLACEMENT_NOTIONS {
        let s = standard_attack(notion, AdversaryClass::PathReplacement);
        let r = run_notion_game(&s.game, s.strategy.as_ref(), NOTION_ATTACK_TRIALS, SEED).unwrap();
        weakest = weakest.min(r.advantage);
        v.require(r.advantage >= NOTION_ATTACK_ADVANTAGE, format!("{}: {}", r.notion, r.advantage));
        v.record(&r);
    }
    let s = standard_attack(Notion::Mo, AdversaryClass::PathReplacement);
    let equal = mo_trace_equality(&s.game, &s.strategy.propose(), MO_TRACE_RUNS, SEED).unwrap();
    v.require(equal == MO_TRACE_RUNS, format!("MO traces equal in {equal}/{MO_TRACE_RUNS}"));
    v.log.push(format!("{{\"mo_trace_equal\":{equal},\"runs\":{MO_TRACE_RUNS}}}"));
    if v.pass {
        v.detail = format!("min advantage {weakest:.4} over 9 notions; MO traces equal {equal}/{MO_TRACE_RUNS}");
    }
    v
}

fn restricted() -> Verdict {
    let mut v = Verdict::new();
    let mut detail = Vec::new();
    for notion in [Notion::Sml, Notion::Rml, Notion::Srl] {
        let s = standard_attack(notion, AdversaryClass::Restricted);
        let r = run_notion_game(&s.game, s.strategy.as_ref(), RESTRICTED_TRIALS, SEED).unwrap();
        v.require(within_null(r.advantage, r.sigma), format!("{}: advantage {:.4}", r.notion, r.advantage));
        detail.push(format!("{} {:.4}", r.notion, r.advantage));
        v.record(&r);
    }
    let s = standard_attack(Notion::SflP, AdversaryClass::Restricted);
    let r = run_notion_game(&s.game, s.strategy.as_ref(), RESTRICTED_TRIALS, SEED).unwrap();
    let cfg = &s.game.config;
    let bound = sfl_bound(cfg.honest_relays().len(), cfg.max_path, cfg.users.len(), 6);
    v.require(
        r.wilson95.1 >= bound,
        format!("SFL-P win rate {:.4}, interval {:?} below bound {bound:.5}", r.win_rate, r.wilson95),
    );
    v.record(&r);
    if v.pass {
        v.detail = format!(
            "{}; SFL-P win {:.4} (95% up to {:.4}) vs bound {bound:.5}",
            detail.join(", "),
            r.win_rate,
            r.wilson95.1
        );
    }
    v
}

type Criterion = (&'static str, fn(&SuiteParams) -> Verdict);

fn criteria() -> Vec<Criterion> {
    vec![
        ("onion correctness", correctness),
        ("path-length leak", path_length),
        ("payload tagging", tagging),
        ("security games", games),
        ("wrap resistance and onion integrity", wrap_and_integrity),
        ("notion attacks under path replacement", |_| path_replacement()),
        ("notion attacks under the restricted class", |_| restricted()),
    ]
}

fn main() {
    let params = SuiteParams::lab();
    let mut all_pass = true;
    let mut first_log = Vec::new();
    for (i, (name, run)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let v = run(&params);
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("{status} {}. {name}: {} [{:.1}s]", i + 1, v.detail, start.elapsed().as_secs_f64());
        all_pass &= v.pass;
        first_log.extend(v.log);
    }

    // Every criterion again under the same seed; the serialized reports
    // must match byte for byte.
    let start = Instant::now();
    let second_log: Vec<String> = criteria().into_iter().flat_map(|(_, run)| run(&params).log).collect();
    let same = first_log == second_log;
    let status = if same { "PASS" } else { "FAIL" };
    println!(
        "{status} 8. determinism: {} serialized reports, {} [{:.1}s]",
        first_log.len(),
        if same { "byte-identical on rerun" } else { "differ on rerun" },
        start.elapsed().as_secs_f64()
    );
    all_pass &= same;
    if !all_pass {
        std::process::exit(1);
    }
}
