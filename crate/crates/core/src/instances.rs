//! Generators for the adversarial instance families, plus seeded random
//! profiles and benchmarks. Every generator is a pure function of its
//! parameters. Ids are 0-based.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extensions::{BundleAllocation, BundleProfile, PartialProfile};
use crate::matching::Matching;
use crate::profile::PreferenceProfile;
use crate::rational::Rational;
use crate::rng::{random_permutation, sample_rng};

const BENCHMARK_STREAM: u64 = 1 << 63;

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroAgents)
    } else {
        Ok(())
    }
}

/// Every agent ranks items `0, 1, ..., n-1`.
pub fn gen_identical(n: usize) -> Result<PreferenceProfile> {
    require_n(n)?;
    PreferenceProfile::new(n, vec![(0..n).collect(); n])
}

/// Independent uniform lists; agent `a` draws from stream `a` of `seed`.
pub fn gen_random(n: usize, seed: u64) -> Result<PreferenceProfile> {
    require_n(n)?;
    let prefs = (0..n)
        .map(|a| random_permutation(n, &mut sample_rng(seed, a as u64)))
        .collect();
    PreferenceProfile::new(n, prefs)
}

/// Uniform random perfect matching on `n` agents.
pub fn gen_random_benchmark(n: usize, seed: u64) -> Result<Matching> {
    require_n(n)?;
    Matching::from_items(random_permutation(n, &mut sample_rng(seed, BENCHMARK_STREAM)))
}

/// Largest `t` with `t^5 <= n`.
pub fn fifth_root_floor(n: usize) -> usize {
    let mut t = (n as f64).powf(0.2).round() as usize + 1;
    while t.pow(5) > n {
        t -= 1;
    }
    t
}

fn rsd_hard_ok(n: usize) -> bool {
    let t = fifth_root_floor(n);
    t >= 2 && n.is_multiple_of(t)
}

/// Nearest `n` (below, above) accepted by [`gen_rsd_linear_hard`].
pub fn nearest_rsd_hard_n(n: usize) -> (Option<usize>, usize) {
    let below = (32..n).rev().find(|&m| rsd_hard_ok(m));
    let above = (n.max(32)..).find(|&m| m != n && rsd_hard_ok(m)).expect("unbounded");
    (below, above)
}

/// Efficient instance that is hard for RSD under linear utilities.
///
/// `n` agents and items in `t = floor(n^(1/5))` blocks of `n/t`. Agent `k`
/// of block `j` lists, in increasing item order, `t^3` items sampled without
/// replacement from each earlier block; then its own item `j*n/t + k`; then
/// every other item in increasing order.
pub fn gen_rsd_linear_hard(n: usize, seed: u64) -> Result<PreferenceProfile> {
    let t = fifth_root_floor(n);
    if !(t >= 2 && n.is_multiple_of(t)) {
        let (below, above) = nearest_rsd_hard_n(n);
        let below = below.map_or(String::new(), |b| format!("n={b} or "));
        return Err(Error::Divisibility(format!(
            "need t = floor(n^(1/5)) >= 2 dividing n (n={n} gives t={t}); try {below}n={above}"
        )));
    }
    let block = n / t;
    let sample = t.pow(3);
    let mut prefs = Vec::with_capacity(n);
    for j in 0..t {
        for k in 0..block {
            let agent = j * block + k;
            let mut rng = sample_rng(seed, agent as u64);
            let mut list = Vec::with_capacity(n);
            let mut used = vec![false; n];
            for earlier in 0..j {
                let mut pool: Vec<usize> = (earlier * block..(earlier + 1) * block).collect();
                let (picked, _) = pool.partial_shuffle(&mut rng, sample);
                let mut picked = picked.to_vec();
                picked.sort_unstable();
                for &i in &picked {
                    used[i] = true;
                }
                list.extend(picked);
            }
            let own = j * block + k;
            used[own] = true;
            list.push(own);
            list.extend((0..n).filter(|&i| !used[i]));
            prefs.push(list);
        }
    }
    PreferenceProfile::new(n, prefs)
}

/// Utility of the identity assignment on [`gen_rsd_linear_hard`]; a lower
/// bound on the optimum.
pub fn identity_welfare(profile: &PreferenceProfile) -> Rational {
    let n = profile.n();
    let total: u64 = (0..n).map(|a| (n + 1 - profile.rank_of(a, a)) as u64).sum();
    Rational::ratio(total, n as u64)
}

fn divisor_hint(n: usize, d: usize) -> String {
    let below = (n / d) * d;
    let above = below + d;
    if below == 0 {
        format!("try n={above}")
    } else {
        format!("try n={below} or n={above}")
    }
}

/// Efficient instance that is hard for PS under linear utilities.
///
/// Agent `k` of block `j` (blocks of `n/t`) ranks the `k`-th items of blocks
/// `0..=j` first, in order; for each later block `l` it puts that block's
/// `k`-th item at position `l*n/t`; remaining items fill the remaining
/// positions in increasing order.
pub fn gen_ps_linear_hard(n: usize, t: usize) -> Result<PreferenceProfile> {
    require_n(n)?;
    if t == 0 || !n.is_multiple_of(t) {
        return Err(Error::Divisibility(format!(
            "t must divide n; {}",
            if t == 0 { "t must be positive".to_string() } else { divisor_hint(n, t) }
        )));
    }
    let block = n / t;
    let mut prefs = Vec::with_capacity(n);
    for j in 0..t {
        for k in 0..block {
            let mut slot = vec![usize::MAX; n];
            let mut used = vec![false; n];
            for l in 0..=j {
                slot[l] = l * block + k;
                used[l * block + k] = true;
            }
            for l in j + 1..t {
                slot[l * block] = l * block + k;
                used[l * block + k] = true;
            }
            let mut rest = (0..n).filter(|&i| !used[i]);
            for s in slot.iter_mut().filter(|s| **s == usize::MAX) {
                *s = rest.next().expect("counts match");
            }
            prefs.push(slot);
        }
    }
    PreferenceProfile::new(n, prefs)
}

/// Partial-list instance where serial dictatorship in order `0..n` makes only
/// agent 0 happy against the returned benchmark.
#[derive(Debug, Clone)]
pub struct KvvHard {
    pub profile: PartialProfile,
    pub benchmark: Matching,
    pub order: Vec<usize>,
}

/// Agent `i >= 1` lists `(i-1, i)`; agent 0 lists `(0, n-1)`. The benchmark
/// gives agent `i >= 1` item `i-1` and agent 0 item `n-1`.
pub fn gen_kvv_hard(n: usize) -> Result<KvvHard> {
    if n < 2 {
        return Err(Error::Domain("n must be at least 2".into()));
    }
    let mut lists = vec![vec![0, n - 1]];
    lists.extend((1..n).map(|i| vec![i - 1, i]));
    let mut bench = vec![Some(n - 1)];
    bench.extend((1..n).map(|i| Some(i - 1)));
    Ok(KvvHard {
        profile: PartialProfile::new(n, lists)?,
        benchmark: Matching::new(n, bench)?,
        order: (0..n).collect(),
    })
}

/// `n/2` items. Agent `i < n/2` lists `0..=i`; agent `i >= n/2` lists only
/// item `i - n/2`.
pub fn gen_sd_log_hard(n: usize) -> Result<PartialProfile> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddN(n));
    }
    let half = n / 2;
    let lists = (0..n)
        .map(|i| if i < half { (0..=i).collect() } else { vec![i - half] })
        .collect();
    PartialProfile::new(half, lists)
}

#[derive(Debug, Clone)]
pub struct PartialAdversarial {
    pub profile: PartialProfile,
    /// `n^(1/3)`.
    pub cube_root: usize,
    /// Exact optimum of the partial-list linear utility.
    pub opt: Rational,
}

fn cube_root_floor(n: usize) -> usize {
    let mut c = (n as f64).cbrt().round() as usize + 1;
    while c.pow(3) > n {
        c -= 1;
    }
    c
}

/// Instance on which RSD with partial lists collects a vanishing fraction
/// of the optimum.
///
/// With `c = n^(1/3)`: good agents `0..c^2` each list only their own good
/// item; bad agent `j` (1-based among bad agents) lists the `c` bad items
/// `c^2..c^2+c` in order, then good item `j mod c^2`.
pub fn gen_partial_adversarial(n: usize) -> Result<PartialAdversarial> {
    let c = cube_root_floor(n);
    if n == 0 || c.pow(3) != n {
        return Err(Error::NotACube { n, below: c.pow(3), above: (c + 1).pow(3) });
    }
    let good = c * c;
    let bad_items: Vec<usize> = (good..good + c).collect();
    let mut lists: Vec<Vec<usize>> = (0..good).map(|i| vec![i]).collect();
    for j in 1..=n - good {
        let mut list = bad_items.clone();
        list.push(j % good);
        lists.push(list);
    }
    Ok(PartialAdversarial {
        profile: PartialProfile::new(good + c, lists)?,
        cube_root: c,
        opt: partial_adversarial_opt(c),
    })
}

/// Good items to good agents (utility 1 each) and bad item `l` to a bad
/// agent at list position `l` (utility `(c+2-l)/(c+1)`). Needs `c >= 2` so
/// that there are at least `c` bad agents.
fn partial_adversarial_opt(c: usize) -> Rational {
    let good = Rational::from_usize(c * c);
    if c < 2 {
        return good;
    }
    let bad: u64 = (1..=c).map(|l| (c + 2 - l) as u64).sum();
    good + Rational::ratio(bad, c as u64 + 1)
}

#[derive(Debug, Clone)]
pub struct KDemandHard {
    pub profile: BundleProfile,
    pub benchmark: BundleAllocation,
}

/// `n/K` groups of `K` agents over `n*K` items, `K^2` items per group.
/// Agent `j` of group `i` lists the group's "column" bundle
/// `{iK^2 + rK : r < K}` first and its own "row" `{iK^2 + jK + c : c < K}`
/// second. The benchmark gives every agent its row. With `K = 1` the two
/// coincide and each agent lists a single bundle.
pub fn gen_kdemand_hard(n: usize, k: usize) -> Result<KDemandHard> {
    require_n(n)?;
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::Divisibility(format!(
            "K must divide n; {}",
            if k == 0 { "K must be positive".to_string() } else { divisor_hint(n, k) }
        )));
    }
    let groups = n / k;
    let mut lists = Vec::with_capacity(n);
    let mut bench = Vec::with_capacity(n);
    for i in 0..groups {
        let base = i * k * k;
        let column: Vec<usize> = (0..k).map(|r| base + r * k).collect();
        for j in 0..k {
            let row: Vec<usize> = (0..k).map(|c| base + j * k + c).collect();
            if row == column {
                lists.push(vec![row]);
                bench.push(Some(0));
            } else {
                lists.push(vec![column.clone(), row]);
                bench.push(Some(1));
            }
        }
    }
    let profile = BundleProfile::new(n * k, k, lists)?;
    let benchmark = BundleAllocation::new(&profile, bench)?;
    Ok(KDemandHard { profile, benchmark })
}

/// Random bundle instance with a disjoint benchmark: items `0..n*K` are
/// split into `n` random bundles, agent `a` lists its own bundle at a random
/// position among `extra` random other `K`-subsets.
pub fn gen_random_bundles(n: usize, k: usize, extra: usize, seed: u64) -> Result<KDemandHard> {
    require_n(n)?;
    if k == 0 {
        return Err(Error::Domain("K must be at least 1".into()));
    }
    let items = n * k;
    let mut rng = sample_rng(seed, BENCHMARK_STREAM);
    let perm = random_permutation(items, &mut rng);
    let own: Vec<Vec<usize>> = perm.chunks(k).map(|c| {
        let mut b = c.to_vec();
        b.sort_unstable();
        b
    }).collect();
    let mut lists = Vec::with_capacity(n);
    let mut bench = Vec::with_capacity(n);
    let extra = extra.min(binomial_cap(items, k).saturating_sub(1));
    for (a, own_bundle) in own.iter().enumerate() {
        let mut rng = sample_rng(seed, a as u64);
        let mut list: Vec<Vec<usize>> = vec![own_bundle.clone()];
        while list.len() < extra + 1 {
            let mut b: Vec<usize> = rand::seq::index::sample(&mut rng, items, k).into_vec();
            b.sort_unstable();
            if !list.contains(&b) {
                list.push(b);
            }
        }
        list.shuffle(&mut rng);
        bench.push(list.iter().position(|b| b == own_bundle));
        lists.push(list);
    }
    let profile = BundleProfile::new(items, k, lists)?;
    let benchmark = BundleAllocation::new(&profile, bench)?;
    Ok(KDemandHard { profile, benchmark })
}

fn binomial_cap(n: usize, k: usize) -> usize {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc > 1 << 20 {
            return usize::MAX;
        }
    }
    acc
}

/// Partial lists containing a planted perfect matching: agent `a` lists its
/// planted item plus `extra` other random items, in random order.
pub fn gen_planted_partial(n: usize, extra: usize, seed: u64) -> Result<(PartialProfile, Matching)> {
    require_n(n)?;
    let planted = random_permutation(n, &mut sample_rng(seed, BENCHMARK_STREAM));
    let extra = extra.min(n - 1);
    let lists = (0..n)
        .map(|a| {
            let mut rng = sample_rng(seed, a as u64);
            let mut list = vec![planted[a]];
            let others: Vec<usize> = (0..n).filter(|&i| i != planted[a]).collect();
            list.extend(others.choose_multiple(&mut rng, extra).copied());
            list.shuffle(&mut rng);
            list
        })
        .collect();
    Ok((PartialProfile::new(n, lists)?, Matching::from_items(planted)?))
}

/// Random partial lists over `m` items, each of random length `0..=max_len`,
/// and a random benchmark that only uses listed items.
pub fn gen_random_partial(n: usize, m: usize, max_len: usize, seed: u64) -> Result<(PartialProfile, Matching)> {
    require_n(n)?;
    let max_len = max_len.min(m);
    let lists: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            let mut rng = sample_rng(seed, a as u64);
            let len = rng.gen_range(0..=max_len);
            rand::seq::index::sample(&mut rng, m, len).into_vec()
        })
        .collect();
    let mut rng = sample_rng(seed, BENCHMARK_STREAM);
    let order = random_permutation(n, &mut rng);
    let mut taken = vec![false; m];
    let mut bench = vec![None; n];
    for a in order {
        if rng.gen_bool(0.25) {
            continue;
        }
        let free: Vec<usize> = lists[a].iter().copied().filter(|&i| !taken[i]).collect();
        if let Some(&i) = free.choose(&mut rng) {
            taken[i] = true;
            bench[a] = Some(i);
        }
    }
    Ok((PartialProfile::new(m, lists)?, Matching::new(m, bench)?))
}

/// Named generator with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Identical { n: usize },
    Random { n: usize, seed: u64 },
    RsdHard { n: usize, seed: u64 },
    PsHard { n: usize, t: usize },
    KvvHard { n: usize },
    SdLog { n: usize },
    PartialAdversarial { n: usize },
    Kdemand { n: usize, k: usize },
}

impl GeneratorSpec {
    pub const FAMILIES: [&'static str; 8] = [
        "identical",
        "random",
        "rsd-hard",
        "ps-hard",
        "kvv-hard",
        "sd-log",
        "partial-adversarial",
        "kdemand",
    ];

    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Identical { .. } => "identical",
            GeneratorSpec::Random { .. } => "random",
            GeneratorSpec::RsdHard { .. } => "rsd-hard",
            GeneratorSpec::PsHard { .. } => "ps-hard",
            GeneratorSpec::KvvHard { .. } => "kvv-hard",
            GeneratorSpec::SdLog { .. } => "sd-log",
            GeneratorSpec::PartialAdversarial { .. } => "partial-adversarial",
            GeneratorSpec::Kdemand { .. } => "kdemand",
        }
    }

    pub fn generate(&self) -> Result<Generated> {
        Ok(match *self {
            GeneratorSpec::Identical { n } => Generated::complete(gen_identical(n)?),
            GeneratorSpec::Random { n, seed } => Generated::complete(gen_random(n, seed)?),
            GeneratorSpec::RsdHard { n, seed } => Generated::complete(gen_rsd_linear_hard(n, seed)?),
            GeneratorSpec::PsHard { n, t } => Generated::complete(gen_ps_linear_hard(n, t)?),
            GeneratorSpec::KvvHard { n } => {
                let k = gen_kvv_hard(n)?;
                Generated {
                    instance: Instance::Partial(k.profile),
                    benchmark: Some(Benchmark::Items(k.benchmark)),
                    order: Some(k.order),
                }
            }
            GeneratorSpec::SdLog { n } => Generated {
                instance: Instance::Partial(gen_sd_log_hard(n)?),
                benchmark: None,
                order: Some((0..n).collect()),
            },
            GeneratorSpec::PartialAdversarial { n } => Generated {
                instance: Instance::Partial(gen_partial_adversarial(n)?.profile),
                benchmark: None,
                order: None,
            },
            GeneratorSpec::Kdemand { n, k } => {
                let g = gen_kdemand_hard(n, k)?;
                Generated {
                    instance: Instance::Bundle(g.profile),
                    benchmark: Some(Benchmark::Bundles(g.benchmark)),
                    order: None,
                }
            }
        })
    }
}

/// Any of the three preference models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Complete(PreferenceProfile),
    Partial(PartialProfile),
    Bundle(BundleProfile),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Complete(p) => p.n(),
            Instance::Partial(p) => p.n(),
            Instance::Bundle(p) => p.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Complete(_) => "complete",
            Instance::Partial(_) => "partial",
            Instance::Bundle(_) => "bundle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Benchmark {
    Items(Matching),
    Bundles(BundleAllocation),
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub benchmark: Option<Benchmark>,
    /// Adversarial arrival order, when the family defines one.
    pub order: Option<Vec<usize>>,
}

impl Generated {
    fn complete(p: PreferenceProfile) -> Self {
        Generated { instance: Instance::Complete(p), benchmark: None, order: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(fifth_root_floor(32), 2);
        assert_eq!(fifth_root_floor(242), 2);
        assert_eq!(fifth_root_floor(243), 3);
        assert_eq!(fifth_root_floor(4096), 5);
        assert_eq!(cube_root_floor(27), 3);
        assert_eq!(cube_root_floor(26), 2);
    }

    #[test]
    fn ps_hard_divisibility_hint() {
        let err = gen_ps_linear_hard(10, 3).unwrap_err();
        assert_eq!(err.to_string(), "t must divide n; try n=9 or n=12");
    }

    #[test]
    fn rsd_hard_divisibility() {
        let err = gen_rsd_linear_hard(4096, 1).unwrap_err();
        assert!(err.to_string().contains("try n=4095 or n=4100"), "{err}");
    }

    #[test]
    fn odd_and_cube_errors() {
        assert_eq!(gen_sd_log_hard(5).unwrap_err(), Error::OddN(5));
        assert!(matches!(
            gen_partial_adversarial(30).unwrap_err(),
            Error::NotACube { below: 27, above: 64, .. }
        ));
    }

    #[test]
    fn kvv_smallest() {
        let k = gen_kvv_hard(2).unwrap();
        assert_eq!(k.profile.lists(), &[vec![0, 1], vec![0, 1]]);
        assert_eq!(k.benchmark.assignment(), &[Some(1), Some(0)]);
    }

    #[test]
    fn kdemand_k1_collapses_to_single_bundle() {
        let g = gen_kdemand_hard(3, 1).unwrap();
        assert!(g.profile.lists().iter().all(|l| l.len() == 1));
    }
}
