use std::collections::VecDeque;

use super::{Matching, PreferenceProfile};
use crate::error::{Error, Result};

/// SU-proposing deferred acceptance, run in rounds.
///
/// Every round, each unmatched SU that still has an untried PU proposes to the
/// next one on its list. Each PU keeps the best acceptable SU among its current
/// partner and the new applicants and rejects the rest. The loop ends once no
/// SU can propose, so at most `n_su * n_pu` proposals are ever made.
pub fn deferred_acceptance(profile: &PreferenceProfile) -> Result<Matching> {
    profile.validate()?;
    let ranks = profile.ranks();
    let (n, m) = (profile.n_pu(), profile.n_su());
    let mut matching = Matching::empty(n, m);
    let mut next = vec![0usize; m];
    let mut applicants: Vec<Vec<usize>> = vec![Vec::new(); n];

    loop {
        let mut any = false;
        for j in 0..m {
            if matching.pu_of_su[j].is_none() && next[j] < profile.su_prefs[j].len() {
                let i = profile.su_prefs[j][next[j]];
                next[j] += 1;
                matching.proposal_count += 1;
                applicants[i].push(j);
                any = true;
            }
        }
        if !any {
            break;
        }
        for (i, pool) in applicants.iter_mut().enumerate() {
            if pool.is_empty() {
                continue;
            }
            let held = matching.su_of_pu[i];
            let best = held
                .into_iter()
                .chain(pool.drain(..))
                .filter_map(|j| ranks.pu[i][j].map(|r| (r, j)))
                .min()
                .map(|(_, j)| j);
            if best != held {
                if let Some(old) = held {
                    matching.pu_of_su[old] = None;
                }
                if let Some(new) = best {
                    matching.pu_of_su[new] = Some(i);
                }
                matching.su_of_pu[i] = best;
            }
        }
    }
    Ok(matching)
}

/// Deferred acceptance with one proposal at a time, SUs taking turns in
/// `order`. Rejected SUs rejoin the back of the queue.
///
/// The outcome does not depend on `order`; this entry point exists to check
/// exactly that.
pub fn deferred_acceptance_in_order(
    profile: &PreferenceProfile,
    order: &[usize],
) -> Result<Matching> {
    profile.validate()?;
    let m = profile.n_su();
    let mut seen = vec![false; m];
    if order.len() != m || order.iter().any(|&j| j >= m || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::MalformedProfile(format!(
            "proposal order must be a permutation of 0..{m}"
        )));
    }
    let ranks = profile.ranks();
    let mut matching = Matching::empty(profile.n_pu(), m);
    let mut next = vec![0usize; m];
    let mut queue: VecDeque<usize> = order.iter().copied().collect();

    while let Some(j) = queue.pop_front() {
        let Some(&i) = profile.su_prefs[j].get(next[j]) else {
            continue;
        };
        next[j] += 1;
        matching.proposal_count += 1;
        let Some(rank_j) = ranks.pu[i][j] else {
            queue.push_back(j);
            continue;
        };
        match matching.su_of_pu[i] {
            Some(held) if ranks.pu[i][held].is_some_and(|r| r < rank_j) => queue.push_back(j),
            held => {
                if let Some(old) = held {
                    matching.pu_of_su[old] = None;
                    queue.push_back(old);
                }
                matching.su_of_pu[i] = Some(j);
                matching.pu_of_su[j] = Some(i);
            }
        }
    }
    Ok(matching)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> PreferenceProfile {
        PreferenceProfile::from_rankings(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]])
            .unwrap()
    }

    #[test]
    fn single_pair() {
        let p = PreferenceProfile::from_rankings(vec![vec![0]], vec![vec![0]]).unwrap();
        let m = deferred_acceptance(&p).unwrap();
        assert_eq!(m.pairs(), vec![(0, 0)]);
        assert_eq!(m.proposal_count, 1);
    }

    #[test]
    fn empty_lists_leave_everyone_unmatched() {
        let p = PreferenceProfile::from_rankings(vec![vec![]; 3], vec![vec![]; 2]).unwrap();
        let m = deferred_acceptance(&p).unwrap();
        assert_eq!(m, Matching::empty(2, 3));
    }

    #[test]
    fn contested_pu_prefers_second_su() {
        let p = two_by_two();
        let m = deferred_acceptance(&p).unwrap();
        assert_eq!(m.pairs(), vec![(0, 1), (1, 0)]);
        assert!(m.is_consistent());
        let seq = deferred_acceptance_in_order(&p, &[1, 0]).unwrap();
        assert!(seq.same_assignment(&m));
    }

    #[test]
    fn one_sided_acceptability_is_rejected() {
        // SU 0 wants PU 0, but PU 0 does not list SU 0.
        let p = PreferenceProfile::from_rankings(vec![vec![0]], vec![vec![]]).unwrap();
        let m = deferred_acceptance(&p).unwrap();
        assert_eq!(m.matched_sus(), 0);
        assert_eq!(m.proposal_count, 1);
        let m = deferred_acceptance_in_order(&p, &[0]).unwrap();
        assert_eq!(m.matched_sus(), 0);
    }

    #[test]
    fn malformed_input() {
        let p = PreferenceProfile {
            su_prefs: vec![vec![0, 0]],
            pu_prefs: vec![vec![0]],
            terms: vec![],
            r_noncoop: vec![],
        };
        assert!(matches!(deferred_acceptance(&p), Err(Error::MalformedProfile(_))));
        assert!(deferred_acceptance_in_order(&two_by_two(), &[0, 0]).is_err());
        assert!(deferred_acceptance_in_order(&two_by_two(), &[0]).is_err());
    }
}
