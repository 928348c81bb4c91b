//! Leader-follower negotiation of one (PU, SU) pair.
//!
//! The PU (leader) picks the time split `(alpha, beta)`, anticipating the SU
//! (follower) best-responding with its transmit power. The follower objective
//! `alpha * [(1 - beta) ln(1 + g p / N0) - C p]` scales with `alpha`, so the
//! best response depends on `beta` only; the leader then optimizes `beta`
//! alone and sets `alpha` to balance the two relay hops.

use crate::channel::{NetworkScenario, SystemParams};
use crate::error::{check_index, Result};
use crate::rates::{shannon_rate, su_utility, CooperationTerms, PhaseRates};
use crate::search::golden_section_max;

/// Number of points in the coarse `beta` grid, endpoints included.
pub const BETA_GRID_POINTS: usize = 1001;
/// Absolute tolerance of the golden-section refinement in `beta`.
pub const BETA_TOLERANCE: f64 = 1e-9;

/// SU power maximizing `(1 - beta) ln(1 + g_ss p / N0) - C p` over `[0, p_max]`.
///
/// The objective is concave in `p`, so the stationary point clamped to the box
/// is the maximizer. With `C = 0` the objective is nondecreasing and the cap
/// wins whenever there is anything to gain.
pub fn best_response_power(beta: f64, g_ss: f64, params: &SystemParams) -> f64 {
    if g_ss <= 0.0 || beta >= 1.0 {
        return 0.0;
    }
    let cost = params.cost_per_energy;
    if cost == 0.0 {
        return params.p_max;
    }
    ((1.0 - beta) / cost - params.noise_power / g_ss).clamp(0.0, params.p_max)
}

/// Leader objective for fixed gains: `beta * ln(1 + g_sp p*(beta) / N0)`.
struct BetaObjective {
    g_ss: f64,
    g_sp: f64,
    params: SystemParams,
    /// Relay hop rate at the power cap, shared by every `beta` where the
    /// best response saturates.
    rate_at_cap: f64,
}

impl BetaObjective {
    fn new(g_ss: f64, g_sp: f64, params: SystemParams) -> Self {
        let rate_at_cap = (g_sp * params.p_max / params.noise_power).ln_1p();
        Self {
            g_ss,
            g_sp,
            params,
            rate_at_cap,
        }
    }

    fn eval(&self, beta: f64) -> f64 {
        let p = best_response_power(beta, self.g_ss, &self.params);
        if p == 0.0 {
            0.0
        } else if p == self.params.p_max {
            beta * self.rate_at_cap
        } else {
            beta * (self.g_sp * p / self.params.noise_power).ln_1p()
        }
    }
}

/// First index in `0..len` where the monotone predicate turns true.
fn first_true(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Best grid index; ties keep the smaller `beta`.
///
/// `p*(beta)` is nonincreasing, so the grid splits into a saturated prefix
/// (`p* = p_max`, objective `beta * rate_at_cap`, increasing), an interior
/// band, and a zero suffix. Only the last saturated point and the band can
/// hold the maximum, which gives the same winner as scanning every point.
fn best_grid_index(objective: &BetaObjective, step: f64) -> (usize, f64) {
    let params = &objective.params;
    let power = |k: usize| best_response_power(k as f64 * step, objective.g_ss, params);
    let saturated_end = first_true(BETA_GRID_POINTS, |k| power(k) != params.p_max);
    let dead_start = first_true(BETA_GRID_POINTS, |k| power(k) == 0.0).max(saturated_end);
    let start = saturated_end.saturating_sub(1);
    let mut best = (0, objective.eval(0.0));
    for k in start..dead_start {
        let v = objective.eval(k as f64 * step);
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

fn maximize_beta(objective: &BetaObjective) -> f64 {
    let last = BETA_GRID_POINTS - 1;
    let step = 1.0 / last as f64;
    let (best_k, best_val) = best_grid_index(objective, step);
    if best_val <= 0.0 {
        return 0.0;
    }
    let grid_beta = best_k as f64 * step;
    let lo = best_k.saturating_sub(1) as f64 * step;
    let hi = ((best_k + 1).min(last)) as f64 * step;
    let (refined, refined_val) =
        golden_section_max(|b| objective.eval(b), lo, hi, BETA_TOLERANCE);
    if refined_val > best_val {
        refined
    } else {
        grid_beta
    }
}

/// Relay-subslot share `beta*` chosen by PU `i` for SU `j`.
///
/// A 1001-point grid locates the best bracket, then golden-section search
/// refines inside it. An objective that is zero everywhere yields 0.
pub fn optimal_beta(i: usize, j: usize, scenario: &NetworkScenario) -> Result<f64> {
    check_index("PU", i, scenario.n_pu())?;
    check_index("SU", j, scenario.n_su())?;
    let objective = BetaObjective::new(scenario.g_ss[j], scenario.g_sp[i][j], scenario.params);
    Ok(maximize_beta(&objective))
}

/// `alpha*` equalizing `(1 - alpha) r1` and `alpha beta r2`.
///
/// A pair with `r1 = 0` and `beta r2 = 0` gets `alpha = 1`; its cooperative
/// rate is zero either way.
pub fn optimal_alpha(rates: PhaseRates, beta_star: f64) -> f64 {
    let denom = rates.r1 + beta_star * rates.r2;
    if denom == 0.0 {
        1.0
    } else {
        rates.r1 / denom
    }
}

/// Full negotiated terms for PU `i` and SU `j`.
pub fn negotiate_terms(i: usize, j: usize, scenario: &NetworkScenario) -> Result<CooperationTerms> {
    let beta = optimal_beta(i, j, scenario)?;
    let params = &scenario.params;
    let p_su = best_response_power(beta, scenario.g_ss[j], params);
    let phase_rates = PhaseRates {
        r1: shannon_rate(scenario.g_ps[i][j], params.p_primary, params.noise_power)?,
        r2: shannon_rate(scenario.g_sp[i][j], p_su, params.noise_power)?,
    };
    let alpha = optimal_alpha(phase_rates, beta);
    let denom = phase_rates.r1 + beta * phase_rates.r2;
    let r_coop_pu = if denom == 0.0 {
        0.0
    } else {
        beta * phase_rates.r1 * phase_rates.r2 / denom
    };
    let u_su = su_utility(alpha, beta, p_su, scenario, j)?;
    Ok(CooperationTerms {
        alpha,
        beta,
        p_su,
        phase_rates,
        r_coop_pu,
        u_su,
    })
}

/// Terms for every pair, indexed `[i][j]`.
pub fn negotiate_all(scenario: &NetworkScenario) -> Result<Vec<Vec<CooperationTerms>>> {
    (0..scenario.n_pu())
        .map(|i| (0..scenario.n_su()).map(|j| negotiate_terms(i, j, scenario)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::cooperative_rate;

    fn params(cost: f64, p_max: f64) -> SystemParams {
        SystemParams {
            p_primary: 1.0,
            p_max,
            cost_per_energy: cost,
            noise_power: 1.0,
            ..SystemParams::default()
        }
    }

    /// Grid maximizer of the follower's inner objective; first max wins.
    fn grid_best_power(beta: f64, g: f64, p: &SystemParams, points: usize) -> f64 {
        let obj = |x: f64| (1.0 - beta) * (g * x / p.noise_power).ln_1p() - p.cost_per_energy * x;
        let mut best = (0.0, obj(0.0));
        for k in 1..points {
            let x = p.p_max * k as f64 / (points - 1) as f64;
            let v = obj(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        best.0
    }

    #[test]
    fn best_response_examples() {
        assert_eq!(best_response_power(1.0, 2.0, &params(0.25, 10.0)), 0.0);
        let p = params(0.25, 10.0);
        let br = best_response_power(0.5, 1.0, &p);
        assert!((br - 1.0).abs() < 1e-15);
        assert!((grid_best_power(0.5, 1.0, &p, 1_000_000) - br).abs() < 2e-5);
        let p = params(0.25, 0.5);
        let br = best_response_power(0.5, 1.0, &p);
        assert_eq!(br, 0.5);
        assert!((grid_best_power(0.5, 1.0, &p, 1_000_000) - br).abs() < 1e-12);
    }

    #[test]
    fn best_response_zero_cost_and_dead_link() {
        assert_eq!(best_response_power(0.3, 1.0, &params(0.0, 4.0)), 4.0);
        assert_eq!(best_response_power(1.0, 1.0, &params(0.0, 4.0)), 0.0);
        assert_eq!(best_response_power(0.3, 0.0, &params(0.25, 4.0)), 0.0);
    }

    fn single_pair(g_ss: f64, g_sp: f64, p: SystemParams) -> NetworkScenario {
        NetworkScenario::from_gains(p, vec![1.0], vec![g_ss], vec![vec![1.0]], vec![vec![g_sp]])
            .unwrap()
    }

    #[test]
    fn dead_relay_gives_zero_beta() {
        let s = single_pair(1.0, 0.0, params(0.25, 10.0));
        assert_eq!(optimal_beta(0, 0, &s).unwrap(), 0.0);
    }

    #[test]
    fn priced_out_follower_gives_zero_beta() {
        // N0 / g_ss >= 1 / C: best response is zero for every beta.
        let p = params(2.0, 10.0);
        let g_ss = 0.4;
        assert!(p.noise_power / g_ss >= 1.0 / p.cost_per_energy);
        for k in 0..=100 {
            assert_eq!(best_response_power(k as f64 / 100.0, g_ss, &p), 0.0);
        }
        let s = single_pair(g_ss, 1.0, p);
        assert_eq!(optimal_beta(0, 0, &s).unwrap(), 0.0);
    }

    #[test]
    fn beta_matches_brute_force() {
        let p = params(0.25, 10.0);
        let s = single_pair(1.0, 1.0, p);
        let beta = optimal_beta(0, 0, &s).unwrap();
        let power = |b: f64| ((1.0 - b) / p.cost_per_energy - p.noise_power).clamp(0.0, p.p_max);
        let obj = |b: f64| b * (power(b) / p.noise_power).ln_1p();
        let n = 1_000_000;
        let (mut bb, mut bv) = (0.0, obj(0.0));
        for k in 1..=n {
            let b = k as f64 / n as f64;
            let v = obj(b);
            if v > bv {
                bb = b;
                bv = v;
            }
        }
        assert!((beta - bb).abs() < 1e-4, "{beta} vs {bb}");
    }

    #[test]
    fn pruned_grid_matches_full_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let step = 1.0 / (BETA_GRID_POINTS - 1) as f64;
        for _ in 0..2000 {
            let p = SystemParams {
                p_max: rng.gen_range(0.1..5.0),
                cost_per_energy: if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.01..2.0) },
                noise_power: rng.gen_range(0.01..1.0),
                ..SystemParams::default()
            };
            let g_ss = if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.0..3.0) };
            let g_sp = if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.0..3.0) };
            let obj = BetaObjective::new(g_ss, g_sp, p);
            let mut full = (0, obj.eval(0.0));
            for k in 1..BETA_GRID_POINTS {
                let v = obj.eval(k as f64 * step);
                if v > full.1 {
                    full = (k, v);
                }
            }
            let pruned = best_grid_index(&obj, step);
            if full.1 > 0.0 {
                assert_eq!(pruned, full, "{p:?} g_ss={g_ss} g_sp={g_sp}");
            } else {
                assert!(pruned.1 <= 0.0);
            }
        }
    }

    #[test]
    fn optimal_alpha_examples() {
        assert_eq!(optimal_alpha(PhaseRates { r1: 1.3, r2: 1.3 }, 1.0), 0.5);
        assert_eq!(optimal_alpha(PhaseRates { r1: 0.7, r2: 2.0 }, 0.0), 1.0);
        assert!((optimal_alpha(PhaseRates { r1: 2.0, r2: 1.0 }, 0.5) - 0.8).abs() < 1e-15);
        assert_eq!(optimal_alpha(PhaseRates { r1: 0.0, r2: 0.0 }, 0.5), 1.0);
    }

    #[test]
    fn dead_hops_kill_cooperation() {
        let p = params(0.25, 10.0);
        let s = NetworkScenario::from_gains(p, vec![1.0], vec![1.0], vec![vec![0.0]], vec![vec![1.0]])
            .unwrap();
        let t = negotiate_terms(0, 0, &s).unwrap();
        assert_eq!(t.phase_rates.r1, 0.0);
        assert_eq!(t.r_coop_pu, 0.0);
        let s = single_pair(1.0, 0.0, p);
        let t = negotiate_terms(0, 0, &s).unwrap();
        assert_eq!(t.phase_rates.r2, 0.0);
        assert_eq!(t.r_coop_pu, 0.0);
    }

    #[test]
    fn closed_form_rate_matches_min_form() {
        let p = params(0.25, 10.0);
        let s = NetworkScenario::from_gains(p, vec![1.0], vec![1.3], vec![vec![0.8]], vec![vec![2.1]])
            .unwrap();
        let t = negotiate_terms(0, 0, &s).unwrap();
        let direct = cooperative_rate(t.alpha, t.beta, t.phase_rates).unwrap();
        assert!((t.r_coop_pu - direct).abs() <= 1e-9 * direct);
        assert!(t.r_coop_pu > 0.0 && t.u_su > 0.0);
    }

    #[test]
    fn index_errors() {
        let s = single_pair(1.0, 1.0, params(0.25, 1.0));
        assert!(optimal_beta(1, 0, &s).is_err());
        assert!(negotiate_terms(0, 2, &s).is_err());
    }
}
