//! Sample a Rayleigh block-fading scenario and compare gain statistics with
//! the exponential law of `|h|^2`.
//!
//! ```bash
//! cargo run -p spectrum-match --example fading_channel
//! ```

use spectrum_match::channel::{sample_scenario, SystemParams};

fn main() -> spectrum_match::Result<()> {
    let params = SystemParams::with_size(3, 4);
    let s = sample_scenario(&params, 42)?;
    println!("direct PU gains  {:?}", s.g_pp);
    println!("direct SU gains  {:?}", s.g_ss);
    println!("PT -> ST gains   {:?}", s.g_ps);
    println!("ST -> PR gains   {:?}", s.g_sp);

    let mut pooled = Vec::new();
    for seed in 0..20_000 {
        let s = sample_scenario(&params, seed)?;
        pooled.extend(s.g_ps.into_iter().flatten());
    }
    let mean = pooled.iter().sum::<f64>() / pooled.len() as f64;
    let sigma = params.rayleigh_sigma;
    println!(
        "pooled mean over {} gains: {mean:.4} (expected 2 sigma^2 = {:.4})",
        pooled.len(),
        2.0 * sigma * sigma
    );
    Ok(())
}
