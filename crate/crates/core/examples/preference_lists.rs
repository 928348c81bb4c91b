//! Build both sides' acceptability-filtered preference lists from a sampled
//! scenario.
//!
//! ```bash
//! cargo run -p spectrum-match --example preference_lists
//! ```

use spectrum_match::channel::{sample_scenario, SystemParams};
use spectrum_match::matching::build_preferences;

fn main() -> spectrum_match::Result<()> {
    let scenario = sample_scenario(&SystemParams::with_size(4, 5), 7)?;
    let profile = build_preferences(&scenario)?;

    for (i, list) in profile.pu_prefs.iter().enumerate() {
        let entries: Vec<String> = list
            .iter()
            .map(|&j| format!("su{j}({:.3})", profile.terms[i][j].r_coop_pu))
            .collect();
        println!("pu{i} direct {:.3}: [{}]", profile.r_noncoop[i], entries.join(", "));
    }
    for (j, list) in profile.su_prefs.iter().enumerate() {
        let entries: Vec<String> = list
            .iter()
            .map(|&i| format!("pu{i}({:.3})", profile.terms[i][j].u_su))
            .collect();
        println!("su{j}: [{}]", entries.join(", "));
    }
    Ok(())
}
