use matchwelfare::extensions::*;
use matchwelfare::instances::*;
use matchwelfare::*;

/// Pearson statistic against a uniform expectation.
fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum()
}

#[test]
fn identical_lists() {
    let p = gen_identical(4).unwrap();
    assert!(p.lists().iter().all(|l| l == &[0, 1, 2, 3]));
    assert_eq!(gen_identical(0).unwrap_err(), Error::ZeroAgents);
}

#[test]
fn random_profiles_are_uniform_permutations() {
    // n = 3: six orders; 99.9% chi-square quantile with 5 dof is 20.5.
    let mut counts = [0u64; 6];
    let all = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for seed in 0..6000 {
        let p = gen_random(3, seed).unwrap();
        for l in p.lists() {
            counts[all.iter().position(|x| x == l.as_slice()).unwrap()] += 1;
        }
    }
    assert!(chi_square(&counts) < 20.5, "{counts:?}");
}

#[test]
fn random_benchmarks_are_uniform() {
    let mut hits = [0u64; 5];
    for seed in 0..5000 {
        hits[gen_random_benchmark(5, seed).unwrap().get(0).unwrap()] += 1;
    }
    // 4 dof, 99.9% quantile 18.5.
    assert!(chi_square(&hits) < 18.5, "{hits:?}");
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(gen_random(9, 4).unwrap(), gen_random(9, 4).unwrap());
    assert_ne!(gen_random(9, 4).unwrap(), gen_random(9, 5).unwrap());
    assert_eq!(gen_rsd_linear_hard(64, 2).unwrap(), gen_rsd_linear_hard(64, 2).unwrap());
}

#[test]
fn rsd_hard_golden_lists() {
    let p = gen_rsd_linear_hard(64, 1).unwrap();
    // t = 2, blocks of 32, 8 sampled items from block 0 before agent 32's own item.
    assert_eq!(&p.list(32)[..12], &[5, 6, 14, 15, 16, 17, 19, 21, 32, 0, 1, 2]);
    assert_eq!(&p.list(63)[..12], &[6, 7, 8, 12, 13, 20, 28, 31, 63, 0, 1, 2]);
    assert_eq!(p.list(0), (0..64).collect::<Vec<_>>().as_slice());
}

#[test]
fn rsd_hard_structure() {
    for &(n, t) in &[(64usize, 2usize), (486, 3), (1024, 4)] {
        let p = gen_rsd_linear_hard(n, 11).unwrap();
        let block = n / t;
        for a in 0..n {
            let j = a / block;
            let list = p.list(a);
            let own = j * t.pow(3);
            assert_eq!(list[own], a);
            assert!(p.rank_of(a, a) <= t.pow(4));
            let prefix = &list[..own];
            assert!(prefix.windows(2).all(|w| w[0] < w[1]));
            for l in 0..j {
                let from_l = prefix.iter().filter(|&&i| i / block == l).count();
                assert_eq!(from_l, t.pow(3));
            }
            let rest = &list[own + 1..];
            assert!(rest.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn rsd_hard_samples_are_uniform() {
    // Each block-0 item lands in agent 32's sample with probability 1/4.
    let mut counts = vec![0u64; 32];
    for seed in 0..2000 {
        let p = gen_rsd_linear_hard(64, seed).unwrap();
        for &i in &p.list(32)[..8] {
            counts[i] += 1;
        }
    }
    // 31 dof, 99.9% quantile 61.1; the 8-of-32 draw is without replacement,
    // which only shrinks the variance.
    assert!(chi_square(&counts) < 61.1, "{counts:?}");
}

#[test]
fn rsd_hard_parameter_errors() {
    let msg = gen_rsd_linear_hard(31, 0).unwrap_err().to_string();
    assert!(msg.contains("try n=32"), "{msg}");
    let msg = gen_rsd_linear_hard(33, 0).unwrap_err().to_string();
    assert!(msg.contains("try n=32 or n=34"), "{msg}");
}

#[test]
fn ps_hard_golden_n9_t3() {
    let p = gen_ps_linear_hard(9, 3).unwrap();
    let expected: Vec<Vec<usize>> = vec![
        vec![0, 1, 2, 3, 4, 5, 6, 7, 8],
        vec![1, 0, 2, 4, 3, 5, 7, 6, 8],
        vec![2, 0, 1, 5, 3, 4, 8, 6, 7],
        vec![0, 3, 1, 2, 4, 5, 6, 7, 8],
        vec![1, 4, 0, 2, 3, 5, 7, 6, 8],
        vec![2, 5, 0, 1, 3, 4, 8, 6, 7],
        vec![0, 3, 6, 1, 2, 4, 5, 7, 8],
        vec![1, 4, 7, 0, 2, 3, 5, 6, 8],
        vec![2, 5, 8, 0, 1, 3, 4, 6, 7],
    ];
    assert_eq!(p.lists(), expected.as_slice());
    // Second block, first agent: items 1 and n/t + 1 in 1-based numbering.
    assert_eq!(&p.list(3)[..2], &[0, 3]);
}

#[test]
fn ps_hard_divisibility() {
    assert_eq!(gen_ps_linear_hard(10, 3).unwrap_err().to_string(), "t must divide n; try n=9 or n=12");
}

#[test]
fn ps_hard_phases_at_scale() {
    let (n, t) = (2000usize, 20usize);
    let p = gen_ps_linear_hard(n, t).unwrap();
    let out = ps_allocate(&p);
    let phases = &out.phases.phases;
    assert_eq!(phases.len(), t);
    let step = Rational::ratio(1, t as u64);
    for (j, ph) in phases.iter().enumerate() {
        assert_eq!(ph.duration(), step);
        let mut items = ph.exhausted.clone();
        items.sort_unstable();
        assert_eq!(items, (j * n / t..(j + 1) * n / t).collect::<Vec<_>>());
    }
    let (opt, _) = optimal_linear_welfare(&p);
    assert!(opt >= Rational::from_usize(n - t));
    let ratio = linear_utility_matrix(&out.matrix, &p).unwrap().to_f64() / n as f64;
    assert!((0.66..=0.70).contains(&ratio), "{ratio}");
}

#[test]
fn kvv_hard_adversarial_order() {
    for n in 2..30 {
        let k = gen_kvv_hard(n).unwrap();
        let m = sd_partial(&k.profile, &k.order).unwrap();
        assert_eq!(ordinal_happy_partial(&m, &k.benchmark, &k.profile).unwrap(), 1);
        assert!(k.benchmark.is_perfect());
    }
}

#[test]
fn kvv_hard_matched_count_below_n_for_some_orders() {
    let k = gen_kvv_hard(3).unwrap();
    let m = sd_partial(&k.profile, &[2, 0, 1]).unwrap();
    assert_eq!(m.size(), 2);
    let exact = rsd_partial_exact(&k.profile, &k.benchmark, 10).unwrap();
    assert!(exact.matched < Rational::from_usize(3));
    // Random order makes far more agents happy than the single adversarial one.
    let big = gen_kvv_hard(200).unwrap();
    let est = rsd_partial_monte_carlo(&big.profile, &big.benchmark, 200, 3).unwrap();
    assert!(est.happy_fraction.mean > 0.3);
}

#[test]
fn sd_log_hard_extremes() {
    for n in (2..=40).step_by(2) {
        let p = gen_sd_log_hard(n).unwrap();
        let order: Vec<usize> = (0..n).collect();
        let m = sd_partial(&p, &order).unwrap();
        assert_eq!(linear_utility_partial(&m, &p).unwrap(), harmonic(n / 2));
        let (opt, _) = optimal_partial_welfare(&p);
        assert_eq!(opt, Rational::from_usize(n / 2));
    }
    assert_eq!(gen_sd_log_hard(7).unwrap_err(), Error::OddN(7));
}

#[test]
fn partial_adversarial_structure_and_optimum() {
    for c in 2..=4usize {
        let n = c.pow(3);
        let g = gen_partial_adversarial(n).unwrap();
        let p = &g.profile;
        assert_eq!(p.n(), n);
        assert_eq!(p.m(), c * c + c);
        for a in 0..c * c {
            assert_eq!(p.list(a), &[a]);
        }
        // Every good item is the last choice of exactly c - 1 bad agents.
        let mut tail = vec![0; c * c];
        for a in c * c..n {
            assert_eq!(&p.list(a)[..c], (c * c..c * c + c).collect::<Vec<_>>().as_slice());
            tail[p.list(a)[c]] += 1;
        }
        assert!(tail.iter().all(|&k| k == c - 1));
        let (opt, _) = optimal_partial_welfare(p);
        assert_eq!(g.opt, opt, "c = {c}");
    }
    assert!(matches!(gen_partial_adversarial(100).unwrap_err(), Error::NotACube { below: 64, above: 125, .. }));
}

#[test]
fn kdemand_hard_structure() {
    let g = gen_kdemand_hard(8, 2).unwrap();
    let p = &g.profile;
    assert_eq!(p.item_count(), 16);
    assert_eq!(p.list(0), &[vec![0, 2], vec![0, 1]]);
    assert_eq!(p.list(1), &[vec![0, 2], vec![2, 3]]);
    assert_eq!(p.list(2), &[vec![4, 6], vec![4, 5]]);
    assert!(g.benchmark.assignment.iter().all(|&b| b == Some(1)));
    assert!(gen_kdemand_hard(10, 4).is_err());
}

#[test]
fn planted_and_random_partial_generators() {
    let (p, m) = gen_planted_partial(30, 3, 8).unwrap();
    assert!(m.is_perfect());
    p.check_matching(&m).unwrap();
    assert!(p.lists().iter().all(|l| l.len() == 4));
    let (p, b) = gen_random_partial(12, 9, 4, 2).unwrap();
    p.check_matching(&b).unwrap();
}

#[test]
fn generator_specs_round_trip() {
    let spec = GeneratorSpec::PsHard { n: 9, t: 3 };
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(text, r#"{"family":"ps-hard","n":9,"t":3}"#);
    let g = spec.generate().unwrap();
    assert_eq!(g.instance.kind(), "complete");
    assert_eq!(GeneratorSpec::Kdemand { n: 4, k: 2 }.generate().unwrap().instance.kind(), "bundle");
}
