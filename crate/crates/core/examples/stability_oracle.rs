//! Enumerate every stable matching of small random markets and confirm the
//! deferred-acceptance outcome is the one every SU likes best.
//!
//! ```bash
//! cargo run -p spectrum-match --example stability_oracle
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectrum_match::matching::{check_instance, enumerate_stable_matchings, random_profile};

fn main() -> spectrum_match::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut richest = (0, None);
    for _ in 0..200 {
        let profile = random_profile(5, 5, 0.9, &mut rng);
        let check = check_instance(&profile)?;
        assert!(check.passed(), "{check:?}");
        if check.stable_matchings > richest.0 {
            richest = (check.stable_matchings, Some(profile));
        }
    }
    let (count, profile) = richest;
    let profile = profile.expect("at least one instance");
    println!("200 instances checked; largest stable set has {count} matchings:");
    for m in enumerate_stable_matchings(&profile)? {
        println!("  {:?}", m.pairs());
    }
    Ok(())
}
