use matchwelfare::extensions::*;
use matchwelfare::instances::*;
use matchwelfare::rng::{random_permutation, sample_rng};
use matchwelfare::*;
use proptest::prelude::*;

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn naive_sd_partial(lists: &[Vec<usize>], order: &[usize]) -> Vec<Option<usize>> {
    let mut taken: Vec<usize> = Vec::new();
    let mut out = vec![None; lists.len()];
    for &a in order {
        if let Some(&i) = lists[a].iter().find(|i| !taken.contains(i)) {
            taken.push(i);
            out[a] = Some(i);
        }
    }
    out
}

fn partial_instance() -> impl Strategy<Value = (PartialProfile, Matching, Vec<usize>)> {
    (1..=7usize, 1..=7usize, 0..=5usize, any::<u64>()).prop_map(|(n, m, len, seed)| {
        let (p, b) = gen_random_partial(n, m, len, seed).unwrap();
        let order = random_permutation(n, &mut sample_rng(seed, 1));
        (p, b, order)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sd_partial_is_maximal((p, _, order) in partial_instance()) {
        let m = sd_partial(&p, &order).unwrap();
        p.check_matching(&m).unwrap();
        let mut taken = vec![false; p.m()];
        for (_, i) in m.pairs() {
            taken[i] = true;
        }
        for a in 0..p.n() {
            if m.get(a).is_none() {
                prop_assert!(p.list(a).iter().all(|&i| taken[i]));
            }
        }
        let naive = naive_sd_partial(p.lists(), &order);
        prop_assert_eq!(m.assignment(), naive.as_slice());
    }

    #[test]
    fn rsd_bundles_are_disjoint_and_listed(n in 1..8usize, k in 1..4usize, extra in 0..4usize, seed in any::<u64>()) {
        let g = gen_random_bundles(n, k, extra, seed).unwrap();
        let order = random_permutation(n, &mut sample_rng(seed, 2));
        let alloc = rsd_bundles(&g.profile, &order).unwrap();
        // Validation rejects overlaps and unlisted bundles.
        BundleAllocation::new(&g.profile, alloc.assignment.clone()).unwrap();
        let happy = ordinal_happy_bundles(&alloc, &g.benchmark, &g.profile).unwrap();
        prop_assert!(happy >= 1);
        prop_assert_eq!(ordinal_happy_bundles(&g.benchmark, &g.benchmark, &g.profile).unwrap(), n);
    }
}

#[test]
fn sd_partial_harmonic_lower_bound() {
    for seed in 0..150u64 {
        let n = 1 + (seed % 6) as usize;
        let (p, _) = gen_random_partial(n, 2 + (seed % 5) as usize, 4, seed).unwrap();
        let (_, opt) = optimal_partial_welfare(&p);
        let k = opt.size();
        let floor = harmonic(k.div_ceil(2));
        for order in all_perms(n) {
            let m = sd_partial(&p, &order).unwrap();
            assert!(linear_utility_partial(&m, &p).unwrap() >= floor, "seed {seed}");
            assert!(2 * m.size() >= k);
        }
    }
}

#[test]
fn partial_exact_matches_enumeration() {
    for seed in 0..40u64 {
        let n = 1 + (seed % 6) as usize;
        let (p, b) = gen_random_partial(n, 5, 3, seed).unwrap();
        let exact = rsd_partial_exact(&p, &b, 10).unwrap();
        let perms = all_perms(n);
        let (mut happy, mut matched) = (0u64, 0u64);
        let mut utility = Rational::zero();
        for order in &perms {
            let got = naive_sd_partial(p.lists(), order);
            for a in 0..n {
                let rank = |i: usize| p.list(a).iter().position(|&x| x == i).unwrap();
                happy += match (got[a], b.get(a)) {
                    (_, None) => 1,
                    (None, Some(_)) => 0,
                    (Some(i), Some(j)) => u64::from(rank(i) <= rank(j)),
                };
                if let Some(i) = got[a] {
                    matched += 1;
                    let len = p.list(a).len() as u64;
                    utility += Rational::ratio(len - rank(i) as u64, len);
                }
            }
        }
        let total = perms.len() as u64;
        assert_eq!(exact.happy, Rational::ratio(happy, total));
        assert_eq!(exact.matched, Rational::ratio(matched, total));
        assert_eq!(exact.utility, utility / Rational::ratio(total, 1));
    }
}

#[test]
fn partial_monte_carlo_tracks_exact() {
    let (p, b) = gen_random_partial(6, 6, 4, 21).unwrap();
    let exact = rsd_partial_exact(&p, &b, 10).unwrap();
    let est = rsd_partial_monte_carlo(&p, &b, 20_000, 4).unwrap();
    let check = |e: &MeanEstimate, truth: &Rational| {
        assert!((e.mean - truth.to_f64()).abs() <= 5.0 * e.stderr + 1e-12);
    };
    check(&est.matched, &exact.matched);
    check(&est.utility, &exact.utility);
    let happy_frac = &exact.happy / Rational::from_usize(6);
    check(&est.happy_fraction, &happy_frac);
}

#[test]
fn complete_lists_reduce_to_the_unit_demand_model() {
    let p = gen_random(5, 8).unwrap();
    let pp = PartialProfile::from_complete(&p);
    let b = gen_random_benchmark(5, 1).unwrap();
    let exact = rsd_partial_exact(&pp, &b, 10).unwrap();
    let m = rsd_exact(&p).unwrap();
    assert_eq!(exact.happy, expected_ordinal_welfare(&m, &b, &p).unwrap());
    assert_eq!(exact.utility, linear_utility_matrix(&m, &p).unwrap());
    assert_eq!(exact.matched, Rational::from_usize(5));
}

#[test]
fn kvv_planted_matching() {
    let (p, _) = gen_planted_partial(100, 2, 17).unwrap();
    let est = kvv_expected_matching(&p, 10_000, 3).unwrap();
    let floor = (1.0 - (-1.0f64).exp()) * 100.0 - 1.0;
    assert!(est.mean >= floor - 3.0 * est.stderr, "{est:?}");
}

#[test]
fn kdemand_hard_is_deterministic_over_all_orders() {
    let g = gen_kdemand_hard(6, 3).unwrap();
    for order in all_perms(6) {
        let alloc = rsd_bundles(&g.profile, &order).unwrap();
        assert_eq!(ordinal_happy_bundles(&alloc, &g.benchmark, &g.profile).unwrap(), 2);
    }
    let g = gen_kdemand_hard(40, 4).unwrap();
    let est = rsd_bundles_monte_carlo(&g.profile, &g.benchmark, 300, 1).unwrap();
    assert_eq!(est.mean, 0.25);
    assert_eq!(est.stderr, 0.0);
}

#[test]
fn random_bundles_respect_the_kdemand_bounds() {
    for k in 1..=4usize {
        let g = gen_random_bundles(60, k, 3, 100 + k as u64).unwrap();
        let est = rsd_bundles_monte_carlo(&g.profile, &g.benchmark, 4000, 9).unwrap();
        let limit = welfare::kdemand_lower_bound(k as u32).unwrap();
        let finite = welfare::kdemand_finite_bound(60, k);
        assert!(est.mean >= limit - 3.0 * est.stderr, "K={k}: {est:?} vs {limit}");
        assert!(est.mean >= finite - 3.0 * est.stderr, "K={k}: {est:?} vs {finite}");
    }
}

#[test]
fn partial_adversarial_ratio_is_small() {
    let g = gen_partial_adversarial(1000).unwrap();
    let empty = Matching::empty(1000, g.profile.m());
    let est = rsd_partial_monte_carlo(&g.profile, &empty, 20, 5).unwrap();
    assert!(est.utility.mean <= 0.35 * g.opt.to_f64(), "{:?} vs {}", est.utility, g.opt);
}
