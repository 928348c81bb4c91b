//! One realization end to end: fading draw, negotiation, preferences,
//! matching and realized utilities.
//!
//! ```bash
//! cargo run -p spectrum-match --example single_trial -- 20 15 3
//! ```
//!
//! Arguments are N, M and the seed.

use spectrum_match::channel::SystemParams;
use spectrum_match::sim::simulate;

fn main() -> spectrum_match::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, m, seed) = match args.as_slice() {
        [n, m, seed] => (*n as usize, *m as usize, *seed),
        _ => (6, 4, 3),
    };
    let r = simulate(&SystemParams::with_size(n, m), seed)?;
    for (i, su) in r.matching.su_of_pu.iter().enumerate() {
        match su {
            Some(j) => {
                let t = &r.profile.terms[i][*j];
                println!(
                    "pu{i} <- su{j}: alpha={:.3} beta={:.3} p={:.3}  rate {:.3} (direct {:.3})  SU utility {:.3}",
                    t.alpha, t.beta, t.p_su, t.r_coop_pu, r.profile.r_noncoop[i], t.u_su
                );
            }
            None => println!("pu{i} direct: rate {:.3}", r.pu_utilities[i]),
        }
    }
    let unmatched: Vec<usize> = (0..m).filter(|&j| r.matching.pu_of_su[j].is_none()).collect();
    println!("unmatched SUs: {unmatched:?}");
    Ok(())
}
