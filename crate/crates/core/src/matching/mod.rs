//! Two-sided PU/SU market: preference construction, SU-proposing deferred
//! acceptance, and stability oracles.
//!
//! Each side ranks only the partners it finds acceptable. An SU accepts a PU
//! whose negotiated terms give it strictly positive utility; a PU accepts an
//! SU whose relaying strictly beats its direct rate. Everyone may stay
//! unmatched, and being unmatched is preferred to any unacceptable partner.

mod deferred;
mod oracle;

pub use deferred::{deferred_acceptance, deferred_acceptance_in_order};
pub use oracle::{
    check_instance, enumerate_stable_matchings, find_blocking_pairs, random_profile,
    su_prefers_weakly, InstanceCheck, ORACLE_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::channel::NetworkScenario;
use crate::error::{check_index, Error, Result};
use crate::rates::{noncooperative_rate, CooperationTerms};
use crate::stackelberg::negotiate_all;

/// Acceptability-filtered, strictly ordered rankings for both sides.
///
/// `terms` and `r_noncoop` record where the rankings came from; they are
/// empty for profiles built directly from rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    /// `su_prefs[j]`: acceptable PUs of SU `j`, most preferred first.
    pub su_prefs: Vec<Vec<usize>>,
    /// `pu_prefs[i]`: acceptable SUs of PU `i`, most preferred first.
    pub pu_prefs: Vec<Vec<usize>>,
    /// Negotiated terms, indexed `[i][j]`.
    pub terms: Vec<Vec<CooperationTerms>>,
    /// Direct-link rate of each PU.
    pub r_noncoop: Vec<f64>,
}

impl PreferenceProfile {
    /// Profile from explicit rankings, without negotiated terms.
    pub fn from_rankings(su_prefs: Vec<Vec<usize>>, pu_prefs: Vec<Vec<usize>>) -> Result<Self> {
        let profile = Self {
            su_prefs,
            pu_prefs,
            terms: Vec::new(),
            r_noncoop: Vec::new(),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn n_pu(&self) -> usize {
        self.pu_prefs.len()
    }

    pub fn n_su(&self) -> usize {
        self.su_prefs.len()
    }

    /// Checks indices, duplicates and (when present) the terms shape.
    pub fn validate(&self) -> Result<()> {
        check_lists("SU", &self.su_prefs, self.n_pu())?;
        check_lists("PU", &self.pu_prefs, self.n_su())?;
        if !self.terms.is_empty() || !self.r_noncoop.is_empty() {
            let (n, m) = (self.n_pu(), self.n_su());
            if self.terms.len() != n
                || self.terms.iter().any(|row| row.len() != m)
                || self.r_noncoop.len() != n
            {
                return Err(Error::MalformedProfile(format!(
                    "terms table does not match {n} PUs x {m} SUs"
                )));
            }
        }
        Ok(())
    }

    /// Rank lookup tables; `None` marks an unacceptable partner.
    pub fn ranks(&self) -> Ranks {
        Ranks {
            su: rank_table(&self.su_prefs, self.n_pu()),
            pu: rank_table(&self.pu_prefs, self.n_su()),
        }
    }
}

fn check_lists(side: &str, lists: &[Vec<usize>], n_other: usize) -> Result<()> {
    for (owner, list) in lists.iter().enumerate() {
        let mut seen = vec![false; n_other];
        for &partner in list {
            if partner >= n_other {
                return Err(Error::MalformedProfile(format!(
                    "{side} {owner} lists partner {partner}, only {n_other} exist"
                )));
            }
            if std::mem::replace(&mut seen[partner], true) {
                return Err(Error::MalformedProfile(format!(
                    "{side} {owner} lists partner {partner} twice"
                )));
            }
        }
    }
    Ok(())
}

fn rank_table(lists: &[Vec<usize>], n_other: usize) -> Vec<Vec<Option<usize>>> {
    lists
        .iter()
        .map(|list| {
            let mut rank = vec![None; n_other];
            for (r, &partner) in list.iter().enumerate() {
                rank[partner] = Some(r);
            }
            rank
        })
        .collect()
}

/// Position of every partner in every list; lower is better.
#[derive(Debug, Clone)]
pub struct Ranks {
    /// `su[j][i]`: rank of PU `i` in SU `j`'s list.
    pub su: Vec<Vec<Option<usize>>>,
    /// `pu[i][j]`: rank of SU `j` in PU `i`'s list.
    pub pu: Vec<Vec<Option<usize>>>,
}

impl Ranks {
    pub fn mutually_acceptable(&self, i: usize, j: usize) -> bool {
        self.su[j][i].is_some() && self.pu[i][j].is_some()
    }
}

/// A partial one-to-one assignment; `None` is the unmatched state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    pub pu_of_su: Vec<Option<usize>>,
    pub su_of_pu: Vec<Option<usize>>,
    /// Proposals made while computing the matching (0 when not computed by
    /// deferred acceptance).
    pub proposal_count: usize,
}

impl Matching {
    pub fn empty(n_pu: usize, n_su: usize) -> Self {
        Self {
            pu_of_su: vec![None; n_su],
            su_of_pu: vec![None; n_pu],
            proposal_count: 0,
        }
    }

    /// Builds a matching from `(pu, su)` pairs, rejecting reuse of an agent.
    pub fn from_pairs(n_pu: usize, n_su: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(n_pu, n_su);
        for &(i, j) in pairs {
            check_index("PU", i, n_pu)?;
            check_index("SU", j, n_su)?;
            if m.su_of_pu[i].is_some() || m.pu_of_su[j].is_some() {
                return Err(Error::MalformedProfile(format!(
                    "pair ({i}, {j}) reuses a matched agent"
                )));
            }
            m.su_of_pu[i] = Some(j);
            m.pu_of_su[j] = Some(i);
        }
        Ok(m)
    }

    /// Matched `(pu, su)` pairs in PU order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.su_of_pu
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
            .collect()
    }

    /// Same assignment, ignoring `proposal_count`.
    pub fn same_assignment(&self, other: &Matching) -> bool {
        self.pu_of_su == other.pu_of_su && self.su_of_pu == other.su_of_pu
    }

    /// Both directions agree and nobody is used twice.
    pub fn is_consistent(&self) -> bool {
        let pu_ok = self.su_of_pu.iter().enumerate().all(|(i, j)| match j {
            Some(j) => self.pu_of_su.get(*j) == Some(&Some(i)),
            None => true,
        });
        let su_ok = self.pu_of_su.iter().enumerate().all(|(j, i)| match i {
            Some(i) => self.su_of_pu.get(*i) == Some(&Some(j)),
            None => true,
        });
        pu_ok && su_ok
    }

    pub fn matched_pus(&self) -> usize {
        self.su_of_pu.iter().flatten().count()
    }

    pub fn matched_sus(&self) -> usize {
        self.pu_of_su.iter().flatten().count()
    }
}

/// Whether relaying through SU `j` strictly beats PU `i`'s direct rate.
pub fn discriminator(
    i: usize,
    j: usize,
    terms: &[Vec<CooperationTerms>],
    r_noncoop: &[f64],
) -> Result<bool> {
    check_index("PU", i, terms.len().min(r_noncoop.len()))?;
    check_index("SU", j, terms[i].len())?;
    Ok(terms[i][j].r_coop_pu > r_noncoop[i])
}

/// Negotiates every pair of `scenario` and ranks both sides.
///
/// SU lists hold PUs with `u_su > 0` by descending `u_su`; PU lists hold SUs
/// passing the discriminator by descending cooperative rate. Ties go to the
/// lower index.
pub fn build_preferences(scenario: &NetworkScenario) -> Result<PreferenceProfile> {
    scenario.validate()?;
    let (n, m) = (scenario.n_pu(), scenario.n_su());
    let terms = negotiate_all(scenario)?;
    let r_noncoop = (0..n)
        .map(|i| noncooperative_rate(scenario, i))
        .collect::<Result<Vec<_>>>()?;

    let su_prefs = (0..m)
        .map(|j| {
            let mut list: Vec<usize> = (0..n).filter(|&i| terms[i][j].u_su > 0.0).collect();
            list.sort_by(|&a, &b| terms[b][j].u_su.total_cmp(&terms[a][j].u_su).then(a.cmp(&b)));
            list
        })
        .collect();
    let mut pu_prefs = Vec::with_capacity(n);
    for i in 0..n {
        let mut list = Vec::new();
        for j in 0..m {
            if discriminator(i, j, &terms, &r_noncoop)? {
                list.push(j);
            }
        }
        let row = &terms[i];
        list.sort_by(|&a, &b| row[b].r_coop_pu.total_cmp(&row[a].r_coop_pu).then(a.cmp(&b)));
        pu_prefs.push(list);
    }

    Ok(PreferenceProfile {
        su_prefs,
        pu_prefs,
        terms,
        r_noncoop,
    })
}
