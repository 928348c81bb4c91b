//! Run SU-proposing deferred acceptance on hand-written rankings and show the
//! pair that blocks the naive assignment.
//!
//! ```bash
//! cargo run -p spectrum-match --example deferred_acceptance
//! ```

use spectrum_match::matching::{deferred_acceptance, find_blocking_pairs, Matching, PreferenceProfile};

fn main() -> spectrum_match::Result<()> {
    // Both SUs prefer PU 0; PU 0 prefers SU 1.
    let profile = PreferenceProfile::from_rankings(
        vec![vec![0, 1], vec![0, 1]],
        vec![vec![1, 0], vec![0, 1]],
    )?;

    let naive = Matching::from_pairs(2, 2, &[(0, 0), (1, 1)])?;
    println!("naive {:?} blocked by {:?}", naive.pairs(), find_blocking_pairs(&naive, &profile));

    let mu = deferred_acceptance(&profile)?;
    println!(
        "deferred acceptance {:?} after {} proposals; blocking pairs {:?}",
        mu.pairs(),
        mu.proposal_count,
        find_blocking_pairs(&mu, &profile)
    );
    Ok(())
}
