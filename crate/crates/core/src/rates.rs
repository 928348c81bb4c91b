//! Rate and utility formulas for the three-subslot frame.
//!
//! A slot of unit length is split by `(alpha, beta)` into the PU broadcast
//! (`1 - alpha`), the SU relaying primary traffic (`alpha * beta`) and the SU
//! sending its own traffic (`alpha * (1 - beta)`). All rates are in nats per
//! unit time; utilities are in nats per slot.

use serde::{Deserialize, Serialize};

use crate::channel::NetworkScenario;
use crate::error::{check_index, Error, Result};

/// Hop rates of a decode-and-forward relay path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseRates {
    /// PT_i to ST_j.
    pub r1: f64,
    /// ST_j to PR_i.
    pub r2: f64,
}

/// Negotiated operating point of one (PU, SU) pair and what it yields.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CooperationTerms {
    pub alpha: f64,
    pub beta: f64,
    /// SU transmit power, used in both the relay and the own-traffic subslot.
    pub p_su: f64,
    pub phase_rates: PhaseRates,
    /// Cooperative PU rate at these terms.
    pub r_coop_pu: f64,
    /// SU utility at these terms; may be negative.
    pub u_su: f64,
}

/// `ln(1 + gain * power / noise)`.
pub fn shannon_rate(gain: f64, power: f64, noise: f64) -> Result<f64> {
    if !(noise > 0.0) {
        return Err(Error::Domain(format!("noise power must be > 0, got {noise}")));
    }
    if !(gain >= 0.0) || !(power >= 0.0) {
        return Err(Error::Domain(format!(
            "gain and power must be >= 0, got gain={gain}, power={power}"
        )));
    }
    Ok((gain * power / noise).ln_1p())
}

/// Rate of PU `i` transmitting directly at `p_primary`.
pub fn noncooperative_rate(scenario: &NetworkScenario, i: usize) -> Result<f64> {
    check_index("PU", i, scenario.g_pp.len())?;
    let p = &scenario.params;
    shannon_rate(scenario.g_pp[i], p.p_primary, p.noise_power)
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {value}")))
    }
}

/// Decode-and-forward PU rate: the slower of the two hops, each weighted by
/// its subslot length.
pub fn cooperative_rate(alpha: f64, beta: f64, rates: PhaseRates) -> Result<f64> {
    check_fraction("alpha", alpha)?;
    check_fraction("beta", beta)?;
    Ok(((1.0 - alpha) * rates.r1).min(alpha * beta * rates.r2))
}

/// Own-traffic rate of SU `j` when it spends `alpha * (1 - beta)` of the slot
/// on its link at power `p_su`.
pub fn secondary_rate(
    alpha: f64,
    beta: f64,
    p_su: f64,
    scenario: &NetworkScenario,
    j: usize,
) -> Result<f64> {
    check_index("SU", j, scenario.g_ss.len())?;
    check_fraction("alpha", alpha)?;
    check_fraction("beta", beta)?;
    let p = &scenario.params;
    if !(0.0..=p.p_max).contains(&p_su) {
        return Err(Error::Domain(format!(
            "SU power must lie in [0, {}], got {p_su}",
            p.p_max
        )));
    }
    Ok(alpha * (1.0 - beta) * shannon_rate(scenario.g_ss[j], p_su, p.noise_power)?)
}

/// A PU keeps whichever of cooperative and direct transmission is faster.
pub fn pu_utility(r_coop: f64, r_noncoop: f64) -> f64 {
    r_coop.max(r_noncoop)
}

/// SU rate minus the energy it spends over both of its subslots.
pub fn su_utility(
    alpha: f64,
    beta: f64,
    p_su: f64,
    scenario: &NetworkScenario,
    j: usize,
) -> Result<f64> {
    let rate = secondary_rate(alpha, beta, p_su, scenario, j)?;
    Ok(rate - alpha * scenario.params.cost_per_energy * p_su)
}
