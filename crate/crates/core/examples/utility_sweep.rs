//! Average PU and SU utilities as the number of SUs grows, written as CSV.
//!
//! ```bash
//! cargo run --release -p spectrum-match --example utility_sweep -- 200 sweep.csv
//! ```
//!
//! Arguments: trials per point (default 100) and an optional output path.

use spectrum_match::channel::SystemParams;
use spectrum_match::sim::{emit_results, render_results, run_sweep, OutputFormat, SweepConfig};

fn main() -> spectrum_match::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let config = SweepConfig {
        base: SystemParams::default(),
        n_pu_list: vec![20, 30],
        n_su_list: (5..=50).step_by(5).collect(),
        trials,
        master_seed: 1,
    };
    let rows = run_sweep(&config)?;
    match args.next() {
        Some(path) => emit_results(&rows, OutputFormat::Csv, path.as_ref())?,
        None => print!("{}", render_results(&rows, OutputFormat::Csv)),
    }
    for r in rows.iter().filter(|r| r.n_pu == 20) {
        eprintln!(
            "N=20 M={:>2}: PU gain {:+.4}, SU utility {:.4}, SUs matched {:.0}%",
            r.n_su,
            r.pu_gain(),
            r.avg_su_utility,
            100.0 * r.matched_frac_su
        );
    }
    Ok(())
}
