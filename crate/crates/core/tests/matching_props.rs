use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectrum_match::channel::{sample_scenario, SystemParams};
use spectrum_match::matching::{
    build_preferences, check_instance, deferred_acceptance, deferred_acceptance_in_order,
    discriminator, enumerate_stable_matchings, find_blocking_pairs, random_profile,
    su_prefers_weakly, PreferenceProfile,
};

fn scenario_profile(n: usize, m: usize, seed: u64) -> PreferenceProfile {
    build_preferences(&sample_scenario(&SystemParams::with_size(n, m), seed).unwrap()).unwrap()
}

fn ranked_profile(n: usize, m: usize, accept: f64, seed: u64) -> PreferenceProfile {
    random_profile(n, m, accept, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn deferred_acceptance_is_stable(n in 0usize..12, m in 0usize..12, accept in 0.0f64..=1.0, seed: u64) {
        let p = ranked_profile(n, m, accept, seed);
        let mu = deferred_acceptance(&p).unwrap();
        prop_assert!(mu.is_consistent());
        prop_assert!(find_blocking_pairs(&mu, &p).is_empty());
        prop_assert!(mu.proposal_count <= n * m);
    }

    #[test]
    fn scenario_matchings_are_rational(n in 1usize..9, m in 1usize..9, seed: u64) {
        let p = scenario_profile(n, m, seed);
        let mu = deferred_acceptance(&p).unwrap();
        prop_assert!(find_blocking_pairs(&mu, &p).is_empty());
        for (i, j) in mu.pairs() {
            prop_assert!(discriminator(i, j, &p.terms, &p.r_noncoop).unwrap());
            prop_assert!(p.terms[i][j].u_su > 0.0);
            prop_assert!(p.su_prefs[j].contains(&i) && p.pu_prefs[i].contains(&j));
        }
    }

    #[test]
    fn preference_lists_are_sorted_and_filtered(n in 1usize..8, m in 1usize..8, seed: u64) {
        let p = scenario_profile(n, m, seed);
        for (j, list) in p.su_prefs.iter().enumerate() {
            let expected: Vec<usize> = (0..n).filter(|&i| p.terms[i][j].u_su > 0.0).collect();
            let mut sorted = list.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, expected);
            for w in list.windows(2) {
                let (a, b) = (p.terms[w[0]][j].u_su, p.terms[w[1]][j].u_su);
                prop_assert!(a > b || (a == b && w[0] < w[1]));
            }
        }
        for (i, list) in p.pu_prefs.iter().enumerate() {
            for &j in list {
                prop_assert!(p.terms[i][j].r_coop_pu > p.r_noncoop[i]);
            }
            for w in list.windows(2) {
                let (a, b) = (p.terms[i][w[0]].r_coop_pu, p.terms[i][w[1]].r_coop_pu);
                prop_assert!(a > b || (a == b && w[0] < w[1]));
            }
        }
    }

    #[test]
    fn su_optimal_among_all_stable(n in 0usize..=5, m in 0usize..=5, accept in 0.2f64..=1.0, seed: u64) {
        let p = ranked_profile(n, m, accept, seed);
        let da = deferred_acceptance(&p).unwrap();
        let stable = enumerate_stable_matchings(&p).unwrap();
        prop_assert!(!stable.is_empty());
        prop_assert!(stable.iter().any(|s| s.same_assignment(&da)));
        let ranks = p.ranks();
        for s in &stable {
            for j in 0..m {
                prop_assert!(su_prefers_weakly(&ranks, j, &da, s));
            }
        }
        prop_assert!(check_instance(&p).unwrap().passed());
    }

    #[test]
    fn proposal_order_is_irrelevant(
        n in 1usize..8, m in 1usize..8, accept in 0.2f64..=1.0, seed: u64,
        shuffle_seed: u64,
    ) {
        use rand::seq::SliceRandom;
        let p = ranked_profile(n, m, accept, seed);
        let rounds = deferred_acceptance(&p).unwrap();
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let queued = deferred_acceptance_in_order(&p, &perm).unwrap();
        prop_assert!(queued.same_assignment(&rounds));
        prop_assert!(queued.proposal_count <= n * m);
    }
}

#[test]
fn enumerated_matchings_respect_acceptability() {
    for seed in 0..50 {
        let p = ranked_profile(4, 4, 0.6, seed);
        let ranks = p.ranks();
        for s in enumerate_stable_matchings(&p).unwrap() {
            assert!(s.is_consistent());
            assert!(find_blocking_pairs(&s, &p).is_empty());
            for (i, j) in s.pairs() {
                assert!(ranks.mutually_acceptable(i, j));
            }
        }
    }
}
