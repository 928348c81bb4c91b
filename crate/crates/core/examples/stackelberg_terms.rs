//! Negotiate the time split and SU power for one PU-SU pair and show how the
//! PU's cooperative rate compares with direct transmission.
//!
//! ```bash
//! cargo run -p spectrum-match --example stackelberg_terms
//! ```

use spectrum_match::channel::{NetworkScenario, SystemParams};
use spectrum_match::rates::{cooperative_rate, noncooperative_rate, pu_utility};
use spectrum_match::stackelberg::{best_response_power, negotiate_terms};

fn main() -> spectrum_match::Result<()> {
    let params = SystemParams::default();
    // Weak direct PU link, good relay links.
    let s = NetworkScenario::from_gains(params, vec![0.1], vec![0.8], vec![vec![1.5]], vec![vec![1.2]])?;

    println!("follower best response p*(beta):");
    for beta in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0] {
        println!("  beta={beta:.2}  p*={:.4}", best_response_power(beta, s.g_ss[0], &params));
    }

    let t = negotiate_terms(0, 0, &s)?;
    let direct = noncooperative_rate(&s, 0)?;
    println!("negotiated: alpha*={:.4} beta*={:.4} p*={:.4}", t.alpha, t.beta, t.p_su);
    println!("  hop rates r1={:.4} r2={:.4} nats", t.phase_rates.r1, t.phase_rates.r2);
    println!(
        "  PU rate {:.4} (min-form {:.4}), direct {:.4}, PU utility {:.4}",
        t.r_coop_pu,
        cooperative_rate(t.alpha, t.beta, t.phase_rates)?,
        direct,
        pu_utility(t.r_coop_pu, direct)
    );
    println!("  SU utility {:.4} nats/slot", t.u_su);
    Ok(())
}
