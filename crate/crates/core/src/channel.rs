//! Network parameters and Rayleigh block-fading scenarios.
//!
//! One [`NetworkScenario`] is one time slot: every link gain is drawn once and
//! held for the whole slot. Gains are power gains `|h|^2`; with a Rayleigh(σ)
//! amplitude these are exponential with mean `2σ²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random stream used for every scenario draw.
pub type ScenarioRng = ChaCha12Rng;

/// Global constants shared by every PU and SU in a network.
///
/// Power values are linear (not dB). Only `rayleigh_sigma = 0.5` has a
/// published value; the rest of [`SystemParams::default`] are artifact defaults
/// chosen so that a nontrivial fraction of PU-SU pairs find cooperation useful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Number of primary transmitter/receiver pairs (N).
    pub n_pu: usize,
    /// Number of secondary transmitter/receiver pairs (M).
    pub n_su: usize,
    /// Primary transmit power, identical for all PUs.
    pub p_primary: f64,
    /// Cap on secondary transmit power.
    pub p_max: f64,
    /// Secondary utility cost per unit of transmit energy.
    pub cost_per_energy: f64,
    /// Receiver noise power.
    pub noise_power: f64,
    /// Rayleigh scale of every link amplitude.
    pub rayleigh_sigma: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_pu: 20,
            n_su: 20,
            p_primary: 1.0,
            p_max: 1.0,
            cost_per_energy: 0.2,
            noise_power: 0.1,
            rayleigh_sigma: 0.5,
        }
    }
}

impl SystemParams {
    /// Default constants with the given network size.
    pub fn with_size(n_pu: usize, n_su: usize) -> Self {
        Self {
            n_pu,
            n_su,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("p_primary", self.p_primary)?;
        positive("p_max", self.p_max)?;
        non_negative("cost_per_energy", self.cost_per_energy)?;
        positive("noise_power", self.noise_power)?;
        non_negative("rayleigh_sigma", self.rayleigh_sigma)?;
        Ok(())
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}

/// One fading realization of all link power gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    pub params: SystemParams,
    /// `|h_{P_i}|^2`: PT_i to PR_i.
    pub g_pp: Vec<f64>,
    /// `|h_{S_j}|^2`: ST_j to SR_j.
    pub g_ss: Vec<f64>,
    /// `|h_{P_i S_j}|^2`: PT_i to ST_j, indexed `[i][j]`.
    pub g_ps: Vec<Vec<f64>>,
    /// `|h_{S_j P_i}|^2`: ST_j to PR_i, indexed `[i][j]`.
    pub g_sp: Vec<Vec<f64>>,
}

impl NetworkScenario {
    /// Builds a scenario from explicit gains. `params.n_pu` and `params.n_su`
    /// are overwritten with the dimensions of `g_pp` and `g_ss`.
    pub fn from_gains(
        mut params: SystemParams,
        g_pp: Vec<f64>,
        g_ss: Vec<f64>,
        g_ps: Vec<Vec<f64>>,
        g_sp: Vec<Vec<f64>>,
    ) -> Result<Self> {
        params.n_pu = g_pp.len();
        params.n_su = g_ss.len();
        let scenario = Self {
            params,
            g_pp,
            g_ss,
            g_ps,
            g_sp,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn n_pu(&self) -> usize {
        self.params.n_pu
    }

    pub fn n_su(&self) -> usize {
        self.params.n_su
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let (n, m) = (self.params.n_pu, self.params.n_su);
        let shape_err = |name: &str| Error::InvalidParam {
            field: "scenario",
            reason: format!("{name} does not match {n} PUs x {m} SUs"),
        };
        if self.g_pp.len() != n {
            return Err(shape_err("g_pp"));
        }
        if self.g_ss.len() != m {
            return Err(shape_err("g_ss"));
        }
        for (name, table) in [("g_ps", &self.g_ps), ("g_sp", &self.g_sp)] {
            if table.len() != n || table.iter().any(|row| row.len() != m) {
                return Err(shape_err(name));
            }
        }
        let all = self
            .g_pp
            .iter()
            .chain(&self.g_ss)
            .chain(self.g_ps.iter().flatten())
            .chain(self.g_sp.iter().flatten());
        for &g in all {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParam {
                    field: "scenario",
                    reason: format!("channel gain {g} is not finite and >= 0"),
                });
            }
        }
        Ok(())
    }
}

/// Draws one power gain `|h|^2` for a Rayleigh(`sigma`) amplitude.
///
/// Uses exactly one uniform draw from `rng` and maps it through the inverse
/// CDF of the exponential with mean `2 sigma^2`. `sigma == 0` still consumes
/// the draw and returns exactly `0.0`.
pub fn rayleigh_power_gain<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    if sigma == 0.0 {
        return 0.0;
    }
    // 1 - u lies in (0, 1], so the log is finite.
    -2.0 * sigma * sigma * (1.0 - u).ln()
}

/// Samples a full scenario, deterministic in `(params, seed)`.
///
/// Draw order is row-major: all of `g_pp`, then `g_ss`, then `g_ps[i][j]`
/// with `j` varying fastest, then `g_sp[i][j]` likewise.
pub fn sample_scenario(params: &SystemParams, seed: u64) -> Result<NetworkScenario> {
    params.validate()?;
    let mut rng = ScenarioRng::seed_from_u64(seed);
    let sigma = params.rayleigh_sigma;
    let (n, m) = (params.n_pu, params.n_su);
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len)
            .map(|_| rayleigh_power_gain(sigma, &mut rng))
            .collect()
    };
    let g_pp = draw(n);
    let g_ss = draw(m);
    let g_ps = (0..n).map(|_| draw(m)).collect();
    let g_sp = (0..n).map(|_| draw(m)).collect();
    Ok(NetworkScenario {
        params: *params,
        g_pp,
        g_ss,
        g_ps,
        g_sp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_gives_zero_gain() {
        for seed in 0..20 {
            let mut rng = ScenarioRng::seed_from_u64(seed);
            assert_eq!(rayleigh_power_gain(0.0, &mut rng), 0.0);
        }
    }

    #[test]
    fn one_draw_per_gain() {
        let mut a = ScenarioRng::seed_from_u64(5);
        let mut b = ScenarioRng::seed_from_u64(5);
        rayleigh_power_gain(0.5, &mut a);
        let _: f64 = b.gen();
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn same_seed_same_scenario() {
        let params = SystemParams::with_size(4, 6);
        let a = sample_scenario(&params, 42).unwrap();
        let b = sample_scenario(&params, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_scenario(&params, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_sigma_scenario_is_dead() {
        let params = SystemParams {
            rayleigh_sigma: 0.0,
            ..SystemParams::with_size(3, 3)
        };
        let s = sample_scenario(&params, 1).unwrap();
        assert!(s.g_pp.iter().chain(&s.g_ss).all(|&g| g == 0.0));
        assert!(s.g_ps.iter().chain(&s.g_sp).flatten().all(|&g| g == 0.0));
    }

    #[test]
    fn shapes_follow_params() {
        let s = sample_scenario(&SystemParams::with_size(2, 3), 7).unwrap();
        assert_eq!(s.g_pp.len(), 2);
        assert_eq!(s.g_ss.len(), 3);
        assert_eq!(s.g_ps.len(), 2);
        assert_eq!(s.g_sp.len(), 2);
        assert!(s.g_ps.iter().chain(&s.g_sp).all(|row| row.len() == 3));
    }

    #[test]
    fn fill_order_is_row_major() {
        let params = SystemParams::with_size(2, 3);
        let s = sample_scenario(&params, 11).unwrap();
        let mut rng = ScenarioRng::seed_from_u64(11);
        let flat: Vec<f64> = (0..2 + 3 + 6 + 6)
            .map(|_| rayleigh_power_gain(params.rayleigh_sigma, &mut rng))
            .collect();
        let expected: Vec<f64> = s
            .g_pp
            .iter()
            .chain(&s.g_ss)
            .chain(s.g_ps.iter().flatten())
            .chain(s.g_sp.iter().flatten())
            .copied()
            .collect();
        assert_eq!(flat, expected);
    }

    #[test]
    fn invalid_params_name_the_field() {
        let cases: [(SystemParams, &str); 5] = [
            (SystemParams { p_primary: 0.0, ..Default::default() }, "p_primary"),
            (SystemParams { p_max: -1.0, ..Default::default() }, "p_max"),
            (SystemParams { cost_per_energy: -0.1, ..Default::default() }, "cost_per_energy"),
            (SystemParams { noise_power: 0.0, ..Default::default() }, "noise_power"),
            (SystemParams { rayleigh_sigma: f64::NAN, ..Default::default() }, "rayleigh_sigma"),
        ];
        for (params, name) in cases {
            match sample_scenario(&params, 0) {
                Err(Error::InvalidParam { field, .. }) => assert_eq!(field, name),
                other => panic!("expected InvalidParam for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn from_gains_checks_shape() {
        let p = SystemParams::default();
        let bad = NetworkScenario::from_gains(p, vec![1.0], vec![1.0, 1.0], vec![vec![1.0]], vec![vec![1.0, 1.0]]);
        assert!(bad.is_err());
        let ok = NetworkScenario::from_gains(p, vec![1.0], vec![1.0], vec![vec![1.0]], vec![vec![1.0]]).unwrap();
        assert_eq!((ok.n_pu(), ok.n_su()), (1, 1));
    }
}
