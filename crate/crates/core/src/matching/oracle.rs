//! Brute-force checks of stability and SU-optimality.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{deferred_acceptance, Matching, PreferenceProfile, Ranks};
use crate::error::{Error, Result};

/// Largest side length [`enumerate_stable_matchings`] will accept.
pub const ORACLE_LIMIT: usize = 8;

/// `true` when `candidate` beats the current partner `current` in a list with
/// ranks `rank`. Unmatched loses to any acceptable partner and beats any
/// unacceptable one.
fn strictly_better(rank: &[Option<usize>], candidate: usize, current: Option<usize>) -> bool {
    let Some(rc) = rank[candidate] else {
        return false;
    };
    match current {
        None => true,
        Some(k) => rank[k].map_or(true, |rk| rc < rk),
    }
}

fn blocking_pairs_with(matching: &Matching, ranks: &Ranks) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, pu_rank) in ranks.pu.iter().enumerate() {
        for (j, su_rank) in ranks.su.iter().enumerate() {
            if matching.su_of_pu[i] == Some(j) {
                continue;
            }
            if strictly_better(su_rank, i, matching.pu_of_su[j])
                && strictly_better(pu_rank, j, matching.su_of_pu[i])
            {
                out.push((i, j));
            }
        }
    }
    out
}

/// Every `(pu, su)` pair that would rather be together than keep its
/// assignment. Empty means `matching` is stable.
///
/// # Panics
///
/// If `matching` and `profile` disagree on the number of agents.
pub fn find_blocking_pairs(matching: &Matching, profile: &PreferenceProfile) -> Vec<(usize, usize)> {
    assert_eq!(matching.su_of_pu.len(), profile.n_pu(), "PU count mismatch");
    assert_eq!(matching.pu_of_su.len(), profile.n_su(), "SU count mismatch");
    blocking_pairs_with(matching, &profile.ranks())
}

/// All stable matchings among those pairing only mutually acceptable agents.
///
/// Exhaustive; refuses instances with more than [`ORACLE_LIMIT`] agents on
/// either side.
pub fn enumerate_stable_matchings(profile: &PreferenceProfile) -> Result<Vec<Matching>> {
    let (n, m) = (profile.n_pu(), profile.n_su());
    if n > ORACLE_LIMIT || m > ORACLE_LIMIT {
        return Err(Error::OracleScale {
            n_pu: n,
            n_su: m,
            limit: ORACLE_LIMIT,
        });
    }
    profile.validate()?;
    let ranks = profile.ranks();
    let mut current = Matching::empty(n, m);
    let mut found = Vec::new();
    extend(0, &ranks, &mut current, &mut found);
    Ok(found)
}

fn extend(j: usize, ranks: &Ranks, current: &mut Matching, found: &mut Vec<Matching>) {
    if j == current.pu_of_su.len() {
        if blocking_pairs_with(current, ranks).is_empty() {
            found.push(current.clone());
        }
        return;
    }
    extend(j + 1, ranks, current, found);
    for i in 0..current.su_of_pu.len() {
        if current.su_of_pu[i].is_none() && ranks.mutually_acceptable(i, j) {
            current.su_of_pu[i] = Some(j);
            current.pu_of_su[j] = Some(i);
            extend(j + 1, ranks, current, found);
            current.su_of_pu[i] = None;
            current.pu_of_su[j] = None;
        }
    }
}

/// Whether SU `j` likes its partner in `a` at least as much as in `b`.
pub fn su_prefers_weakly(ranks: &Ranks, j: usize, a: &Matching, b: &Matching) -> bool {
    let rank_of = |m: &Matching| m.pu_of_su[j].and_then(|i| ranks.su[j][i]);
    match (rank_of(a), rank_of(b)) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(ra), Some(rb)) => ra <= rb,
    }
}

/// Outcome of checking deferred acceptance against the brute-force oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceCheck {
    pub blocking_pairs: usize,
    pub stable_matchings: usize,
    /// The deferred-acceptance matching appears in the enumerated stable set.
    pub in_stable_set: bool,
    /// Every SU weakly prefers its deferred-acceptance partner to its partner
    /// in every stable matching.
    pub su_optimal: bool,
    pub within_proposal_bound: bool,
}

impl InstanceCheck {
    pub fn passed(&self) -> bool {
        self.blocking_pairs == 0 && self.in_stable_set && self.su_optimal && self.within_proposal_bound
    }
}

/// Runs deferred acceptance on `profile` and compares it with every stable
/// matching of the instance.
pub fn check_instance(profile: &PreferenceProfile) -> Result<InstanceCheck> {
    let da = deferred_acceptance(profile)?;
    let stable = enumerate_stable_matchings(profile)?;
    let ranks = profile.ranks();
    let su_optimal = stable.iter().all(|other| {
        (0..profile.n_su()).all(|j| su_prefers_weakly(&ranks, j, &da, other))
    });
    Ok(InstanceCheck {
        blocking_pairs: blocking_pairs_with(&da, &ranks).len(),
        stable_matchings: stable.len(),
        in_stable_set: stable.iter().any(|s| s.same_assignment(&da)),
        su_optimal,
        within_proposal_bound: da.proposal_count <= profile.n_pu() * profile.n_su(),
    })
}

/// Random strict rankings where each side finds each partner acceptable with
/// probability `accept_prob`, independently per direction.
pub fn random_profile<R: Rng + ?Sized>(
    n_pu: usize,
    n_su: usize,
    accept_prob: f64,
    rng: &mut R,
) -> PreferenceProfile {
    let mut lists = |owners: usize, partners: usize| -> Vec<Vec<usize>> {
        (0..owners)
            .map(|_| {
                let mut list: Vec<usize> =
                    (0..partners).filter(|_| rng.gen_bool(accept_prob)).collect();
                list.shuffle(rng);
                list
            })
            .collect()
    };
    let su_prefs = lists(n_su, n_pu);
    let pu_prefs = lists(n_pu, n_su);
    PreferenceProfile {
        su_prefs,
        pu_prefs,
        terms: Vec::new(),
        r_noncoop: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> PreferenceProfile {
        PreferenceProfile::from_rankings(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]])
            .unwrap()
    }

    #[test]
    fn identity_matching_is_blocked() {
        let p = two_by_two();
        let m = Matching::from_pairs(2, 2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(find_blocking_pairs(&m, &p), vec![(0, 1)]);
        let da = deferred_acceptance(&p).unwrap();
        assert!(find_blocking_pairs(&da, &p).is_empty());
    }

    #[test]
    fn unmatched_acceptable_pair_blocks() {
        let p = PreferenceProfile::from_rankings(vec![vec![0]], vec![vec![0]]).unwrap();
        assert_eq!(find_blocking_pairs(&Matching::empty(1, 1), &p), vec![(0, 0)]);
    }

    #[test]
    fn unacceptable_partner_is_worse_than_none() {
        // PU 0 is stuck with SU 1, whom it does not list; SU 0 is free.
        let p = PreferenceProfile::from_rankings(vec![vec![0], vec![0]], vec![vec![0]]).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        assert_eq!(find_blocking_pairs(&m, &p), vec![(0, 0)]);
    }

    #[test]
    fn enumeration_of_small_cases() {
        let stable = enumerate_stable_matchings(&two_by_two()).unwrap();
        assert_eq!(stable.len(), 1);
        assert_eq!(stable[0].pairs(), vec![(0, 1), (1, 0)]);

        let empty = PreferenceProfile::from_rankings(vec![vec![]; 2], vec![vec![]; 3]).unwrap();
        let stable = enumerate_stable_matchings(&empty).unwrap();
        assert_eq!(stable, vec![Matching::empty(3, 2)]);
    }

    #[test]
    fn enumeration_finds_both_extremes() {
        // Classic two-stable-matching instance: SUs and PUs disagree cyclically.
        let p = PreferenceProfile::from_rankings(vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]])
            .unwrap();
        let stable = enumerate_stable_matchings(&p).unwrap();
        assert_eq!(stable.len(), 2);
        let check = check_instance(&p).unwrap();
        assert!(check.passed());
        // SU-proposing outcome gives each SU its first choice.
        assert_eq!(deferred_acceptance(&p).unwrap().pairs(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn scale_guard() {
        let p = PreferenceProfile::from_rankings(vec![vec![]; 9], vec![vec![]; 1]).unwrap();
        assert!(matches!(enumerate_stable_matchings(&p), Err(Error::OracleScale { .. })));
    }
}
