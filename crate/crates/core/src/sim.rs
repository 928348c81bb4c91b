//! Monte Carlo harness: single realizations, (N, M) sweeps and result files.
//!
//! Every trial is one fading slot pushed through the whole pipeline
//! (scenario, negotiation, preferences, matching). Unmatched PUs fall back to
//! their direct rate and unmatched SUs score zero; averages divide by the
//! full population of each side.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_scenario, NetworkScenario, SystemParams};
use crate::error::{Error, Result};
use crate::matching::{build_preferences, deferred_acceptance, Matching, PreferenceProfile};

/// Exact CSV header line written by [`emit_results`].
pub const CSV_HEADER: &str =
    "n_pu,n_su,trials,seed,avg_pu_utility,avg_pu_noncoop,avg_su_utility,matched_frac_pu,matched_frac_su";

/// Significant digits of every floating-point field in emitted results.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// A fully evaluated realization, kept for inspection.
#[derive(Debug, Clone)]
pub struct Realization {
    pub scenario: NetworkScenario,
    pub profile: PreferenceProfile,
    pub matching: Matching,
    /// Realized rate of each PU: cooperative if matched, direct otherwise.
    pub pu_utilities: Vec<f64>,
    /// Realized utility of each SU; 0 when unmatched.
    pub su_utilities: Vec<f64>,
}

/// Sample and solve one realization, deterministic in `(params, seed)`.
pub fn simulate(params: &SystemParams, seed: u64) -> Result<Realization> {
    let scenario = sample_scenario(params, seed)?;
    let profile = build_preferences(&scenario)?;
    let matching = deferred_acceptance(&profile)?;
    let pu_utilities = matching
        .su_of_pu
        .iter()
        .enumerate()
        .map(|(i, su)| match su {
            Some(j) => profile.terms[i][*j].r_coop_pu,
            None => profile.r_noncoop[i],
        })
        .collect();
    let su_utilities = matching
        .pu_of_su
        .iter()
        .enumerate()
        .map(|(j, pu)| pu.map_or(0.0, |i| profile.terms[i][j].u_su))
        .collect();
    Ok(Realization {
        scenario,
        profile,
        matching,
        pu_utilities,
        su_utilities,
    })
}

/// Per-trial sums for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub n_pu: usize,
    pub n_su: usize,
    pub pu_utility_sum: f64,
    pub pu_noncoop_sum: f64,
    pub su_utility_sum: f64,
    pub matched_pu: usize,
    pub matched_su: usize,
    pub proposal_count: usize,
    /// PUs whose realized rate fell below their direct rate (always 0).
    pub dominance_violations: usize,
}

impl From<&Realization> for TrialOutcome {
    fn from(r: &Realization) -> Self {
        let violations = r
            .pu_utilities
            .iter()
            .zip(&r.profile.r_noncoop)
            .filter(|(u, nc)| u < nc)
            .count();
        Self {
            n_pu: r.scenario.n_pu(),
            n_su: r.scenario.n_su(),
            pu_utility_sum: r.pu_utilities.iter().sum(),
            pu_noncoop_sum: r.profile.r_noncoop.iter().sum(),
            su_utility_sum: r.su_utilities.iter().sum(),
            matched_pu: r.matching.matched_pus(),
            matched_su: r.matching.matched_sus(),
            proposal_count: r.matching.proposal_count,
            dominance_violations: violations,
        }
    }
}

pub fn run_trial(params: &SystemParams, seed: u64) -> Result<TrialOutcome> {
    simulate(params, seed).map(|r| TrialOutcome::from(&r))
}

/// Grid of network sizes to sweep, plus shared constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Constants for every point; `n_pu` and `n_su` are ignored.
    pub base: SystemParams,
    pub n_pu_list: Vec<usize>,
    pub n_su_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParam {
                field: "trials",
                reason: "must be >= 1".into(),
            });
        }
        if self.n_pu_list.is_empty() {
            return Err(Error::InvalidParam {
                field: "n_pu_list",
                reason: "must not be empty".into(),
            });
        }
        if self.n_su_list.is_empty() {
            return Err(Error::InvalidParam {
                field: "n_su_list",
                reason: "must not be empty".into(),
            });
        }
        Ok(())
    }
}

/// Aggregates of one `(N, M)` sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_pu: usize,
    pub n_su: usize,
    pub trials: usize,
    pub seed: u64,
    pub avg_pu_utility: f64,
    pub avg_pu_noncoop: f64,
    pub avg_su_utility: f64,
    pub matched_frac_pu: f64,
    pub matched_frac_su: f64,
}

impl SweepRow {
    /// Cooperative gain per PU over direct transmission.
    pub fn pu_gain(&self) -> f64 {
        self.avg_pu_utility - self.avg_pu_noncoop
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sweep point `(n_pu, n_su)`.
///
/// `h = splitmix64(master)`, then `h = splitmix64(h ^ w)` for `w` in
/// `[n_pu, n_su, trial]`.
pub fn derive_seed(master_seed: u64, n_pu: usize, n_su: usize, trial: usize) -> u64 {
    [n_pu as u64, n_su as u64, trial as u64]
        .into_iter()
        .fold(splitmix64(master_seed), |h, w| splitmix64(h ^ w))
}

/// Row plus the per-trial outcomes it was reduced from, in trial order.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub row: SweepRow,
    pub outcomes: Vec<TrialOutcome>,
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Runs all trials of one sweep point on the current rayon pool.
pub fn run_point(
    base: &SystemParams,
    n_pu: usize,
    n_su: usize,
    trials: usize,
    master_seed: u64,
) -> Result<SweepPoint> {
    let params = SystemParams { n_pu, n_su, ..*base };
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&params, derive_seed(master_seed, n_pu, n_su, t)))
        .collect::<Result<Vec<_>>>()?;

    // Sequential reduction in trial order keeps results schedule-independent.
    let mut total = TrialOutcome::default();
    for o in &outcomes {
        total.pu_utility_sum += o.pu_utility_sum;
        total.pu_noncoop_sum += o.pu_noncoop_sum;
        total.su_utility_sum += o.su_utility_sum;
        total.matched_pu += o.matched_pu;
        total.matched_su += o.matched_su;
    }
    let pu_slots = n_pu * trials;
    let su_slots = n_su * trials;
    let row = SweepRow {
        n_pu,
        n_su,
        trials,
        seed: master_seed,
        avg_pu_utility: ratio(total.pu_utility_sum, pu_slots),
        avg_pu_noncoop: ratio(total.pu_noncoop_sum, pu_slots),
        avg_su_utility: ratio(total.su_utility_sum, su_slots),
        matched_frac_pu: ratio(total.matched_pu as f64, pu_slots),
        matched_frac_su: ratio(total.matched_su as f64, su_slots),
    };
    Ok(SweepPoint { row, outcomes })
}

/// Full sweep with per-trial detail, points ordered by `n_pu` then `n_su`
/// as listed in the config.
pub fn run_sweep_detailed(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.n_pu_list.len() * config.n_su_list.len());
    for &n in &config.n_pu_list {
        for &m in &config.n_su_list {
            points.push(run_point(&config.base, n, m, config.trials, config.master_seed)?);
        }
    }
    Ok(points)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    Ok(run_sweep_detailed(config)?.into_iter().map(|p| p.row).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits in positional
/// notation.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn rounded(x: f64) -> f64 {
    format_significant(x).parse().unwrap_or(x)
}

/// Renders rows in `format`; the output is byte-stable for equal rows.
pub fn render_results(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.n_pu,
                    r.n_su,
                    r.trials,
                    r.seed,
                    format_significant(r.avg_pu_utility),
                    format_significant(r.avg_pu_noncoop),
                    format_significant(r.avg_su_utility),
                    format_significant(r.matched_frac_pu),
                    format_significant(r.matched_frac_su),
                );
            }
            out
        }
        OutputFormat::Json => {
            let rounded_rows: Vec<SweepRow> = rows
                .iter()
                .map(|r| SweepRow {
                    avg_pu_utility: rounded(r.avg_pu_utility),
                    avg_pu_noncoop: rounded(r.avg_pu_noncoop),
                    avg_su_utility: rounded(r.avg_su_utility),
                    matched_frac_pu: rounded(r.matched_frac_pu),
                    matched_frac_su: rounded(r.matched_frac_su),
                    ..r.clone()
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&rounded_rows)
                .expect("sweep rows always serialize");
            out.push('\n');
            out
        }
    }
}

/// Writes rendered rows to `destination`.
pub fn emit_results(rows: &[SweepRow], format: OutputFormat, destination: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Usage("no sweep rows to emit".into()));
    }
    std::fs::write(destination, render_results(rows, format)).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}
