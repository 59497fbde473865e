//! Rendering helpers for machine-readable reports. Exact rationals are
//! rendered as "p/q" strings so no verdict ever passes through floats.

use num_rational::{BigRational, Ratio};
use serde_json::{json, Value};

use crate::experiments::TrialStats;

pub fn big_ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn weight_string(w: &Ratio<u64>) -> String {
    format!("{}/{}", w.numer(), w.denom())
}

/// The common JSON body for a statistics-producing experiment.
pub fn trial_stats_json(stats: &TrialStats) -> Value {
    json!({
        "trials": stats.trials,
        "successes": stats.successes,
        "estimate": big_ratio_string(&stats.estimate),
        "sigma": stats.std_error,
        "analytic": stats.analytic.as_ref().map(|a| big_ratio_string(a)),
        "seed": stats.seed,
        "mode": if stats.exhaustive { "exhaustive" } else { "monte_carlo" },
    })
}

pub fn verdict_str(pass: bool) -> &'static str {
    if pass { "pass" } else { "fail" }
}
