//! Trial counts and pass thresholds for every statistical check, in one
//! table shared by the acceptance run and the command-line summaries.

/// Seeded instances per scheme and path length in the correctness check.
pub const CORRECTNESS_TRIALS: u64 = 200;
/// Wall-clock budget for the whole correctness check, in seconds.
pub const CORRECTNESS_BUDGET_SECS: f64 = 60.0;
/// Routers in the correctness network.
pub const CORRECTNESS_ROUTERS: usize = 8;

/// Onions per path length in the path-length probe.
pub const PATH_LENGTH_TRIALS: u64 = 1_000;
/// Share of onions for which the probe must return the exact length.
pub const PATH_LENGTH_EXACT: f64 = 0.999;
/// Minimum chi-square p-value for a probe output independent of length.
pub const INDEPENDENCE_P: f64 = 0.01;

/// Trials of the payload tagging attack.
pub const TAGGING_TRIALS: u64 = 1_000;

/// Trials per distinguisher in the security games.
pub const GAME_TRIALS: u64 = 10_000;
/// A scheme passes a game if every advantage is within this many σ of 0.
pub const NULL_SIGMAS: f64 = 3.0;
/// Advantage a counterexample attack must reach.
pub const BREAK_ADVANTAGE: f64 = 0.49;

/// Trials of the wrap-resistance game.
pub const WR_TRIALS: u64 = 10_000;
/// Crafted onions in the integrity check.
pub const INTEGRITY_TRIALS: u64 = 1_000;

/// Trials per notion attack under path replacement.
pub const NOTION_ATTACK_TRIALS: u64 = 1_000;
/// Advantage each notion attack must reach under path replacement.
pub const NOTION_ATTACK_ADVANTAGE: f64 = 0.45;
/// Paired runs in the message-only trace-equality check.
pub const MO_TRACE_RUNS: u64 = 1_000;
/// Trials per notion attack under the restricted class.
pub const RESTRICTED_TRIALS: u64 = 10_000;

/// Whether an advantage is indistinguishable from 0.
pub fn within_null(advantage: f64, sigma: f64) -> bool {
    advantage <= NULL_SIGMAS * sigma
}
