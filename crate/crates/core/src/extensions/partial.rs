use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::perm::{factorial, par_fold_permutations};
use crate::profile::{check_permutation, PreferenceProfile};
use crate::rational::Rational;
use crate::rsd::sample_orders;
use crate::stats::MeanEstimate;
use crate::welfare::max_weight_perfect;

/// `n` agents with ordered lists over subsets of `m` items. Lists may be
/// empty; an agent prefers staying unmatched to any unlisted item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialProfile {
    n: usize,
    m: usize,
    lists: Vec<Vec<usize>>,
}

impl PartialProfile {
    pub fn new(m: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        let mut seen = vec![usize::MAX; m];
        for (agent, list) in lists.iter().enumerate() {
            for (position, &item) in list.iter().enumerate() {
                if item >= m || seen[item] == agent {
                    return Err(Error::NotPermutation { agent, position, item });
                }
                seen[item] = agent;
            }
        }
        Ok(PartialProfile { n, m, lists })
    }

    pub fn from_complete(profile: &PreferenceProfile) -> Self {
        PartialProfile {
            n: profile.n(),
            m: profile.n(),
            lists: profile.lists().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn list(&self, agent: usize) -> &[usize] {
        &self.lists[agent]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    /// 1-based position of `item` on `agent`'s list, if listed.
    pub fn position(&self, agent: usize, item: usize) -> Option<usize> {
        self.lists[agent].iter().position(|&i| i == item).map(|p| p + 1)
    }

    /// `(|L| + 1 - j) / |L|` for the item at position `j`.
    pub fn utility(&self, agent: usize, item: usize) -> Option<Rational> {
        let len = self.lists[agent].len() as u64;
        self.position(agent, item)
            .map(|j| Rational::ratio(len + 1 - j as u64, len))
    }

    fn utility_f64(&self, agent: usize, item: usize) -> f64 {
        let len = self.lists[agent].len() as f64;
        let j = self.position(agent, item).expect("listed") as f64;
        (len + 1.0 - j) / len
    }

    /// Checks a matching fits this profile and uses only listed items.
    pub fn check_matching(&self, matching: &Matching) -> Result<()> {
        if matching.agents() != self.n || matching.items() != self.m {
            return Err(Error::Domain(format!(
                "matching over {} agents / {} items does not fit {} / {}",
                matching.agents(),
                matching.items(),
                self.n,
                self.m
            )));
        }
        for (agent, item) in matching.pairs() {
            if self.position(agent, item).is_none() {
                return Err(Error::ItemNotOnList { agent, item });
            }
        }
        Ok(())
    }
}

/// Serial dictatorship with lists that may run out: an agent whose listed
/// items are all taken stays unmatched.
pub fn sd_partial(profile: &PartialProfile, order: &[usize]) -> Result<Matching> {
    check_permutation(order, profile.n())?;
    let mut taken = vec![false; profile.m()];
    let mut out = vec![None; profile.n()];
    run_partial(profile, order, &mut taken, &mut out);
    Ok(Matching::from_assignment_unchecked(profile.m(), out))
}

fn run_partial(profile: &PartialProfile, order: &[usize], taken: &mut [bool], out: &mut [Option<usize>]) {
    taken.iter_mut().for_each(|t| *t = false);
    for &agent in order {
        out[agent] = profile.list(agent).iter().copied().find(|&i| !taken[i]);
        if let Some(i) = out[agent] {
            taken[i] = true;
        }
    }
}

/// Sum of `(|L_a| + 1 - j) / |L_a|` over matched agents.
pub fn linear_utility_partial(matching: &Matching, profile: &PartialProfile) -> Result<Rational> {
    profile.check_matching(matching)?;
    Ok(matching
        .pairs()
        .map(|(a, i)| profile.utility(a, i).expect("checked"))
        .sum())
}

/// Happy count against a partial benchmark under the global convention.
pub fn ordinal_happy_partial(matching: &Matching, benchmark: &Matching, profile: &PartialProfile) -> Result<usize> {
    profile.check_matching(matching)?;
    profile.check_matching(benchmark)?;
    Ok(happy_partial_unchecked(profile, matching.assignment(), benchmark))
}

fn happy_partial_unchecked(profile: &PartialProfile, alloc: &[Option<usize>], benchmark: &Matching) -> usize {
    (0..profile.n())
        .filter(|&a| match (alloc[a], benchmark.get(a)) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(i), Some(b)) => profile.position(a, i) <= profile.position(a, b),
        })
        .count()
}

/// Monte Carlo estimates for RSD on partial lists.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PartialRsdEstimate {
    /// Fraction of agents happy against the benchmark.
    pub happy_fraction: MeanEstimate,
    /// Total partial-list linear utility.
    pub utility: MeanEstimate,
    /// Number of matched agents.
    pub matched: MeanEstimate,
}

pub fn rsd_partial_monte_carlo(
    profile: &PartialProfile,
    benchmark: &Matching,
    samples: usize,
    seed: u64,
) -> Result<PartialRsdEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    profile.check_matching(benchmark)?;
    let n = profile.n();
    let per_sample = sample_orders(n, samples, seed, |order| {
        let mut taken = vec![false; profile.m()];
        let mut out = vec![None; n];
        run_partial(profile, order, &mut taken, &mut out);
        let happy = happy_partial_unchecked(profile, &out, benchmark) as f64 / n as f64;
        let mut utility = 0.0;
        let mut matched = 0.0;
        for (a, slot) in out.iter().enumerate() {
            if let Some(i) = *slot {
                utility += profile.utility_f64(a, i);
                matched += 1.0;
            }
        }
        (happy, utility, matched)
    });
    let col = |f: fn(&(f64, f64, f64)) -> f64| per_sample.iter().map(f).collect::<Vec<_>>();
    Ok(PartialRsdEstimate {
        happy_fraction: MeanEstimate::from_values(&col(|s| s.0)),
        utility: MeanEstimate::from_values(&col(|s| s.1)),
        matched: MeanEstimate::from_values(&col(|s| s.2)),
    })
}

/// Expected matched count of RSD on partial lists (the RANKING view of
/// online bipartite matching), by Monte Carlo.
pub fn kvv_expected_matching(profile: &PartialProfile, samples: usize, seed: u64) -> Result<MeanEstimate> {
    let empty = Matching::empty(profile.n(), profile.m());
    Ok(rsd_partial_monte_carlo(profile, &empty, samples, seed)?.matched)
}

/// Exact expectations over all `n!` orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialRsdExact {
    pub happy: Rational,
    pub utility: Rational,
    pub matched: Rational,
}

pub fn rsd_partial_exact(profile: &PartialProfile, benchmark: &Matching, guard: usize) -> Result<PartialRsdExact> {
    let n = profile.n();
    if n > guard {
        return Err(Error::TooLarge { n, guard });
    }
    profile.check_matching(benchmark)?;
    let (happy, matched, utility) = par_fold_permutations(
        n,
        || (0u64, 0u64, Rational::zero()),
        |acc, order| {
            let mut taken = vec![false; profile.m()];
            let mut out = vec![None; n];
            run_partial(profile, order, &mut taken, &mut out);
            acc.0 += happy_partial_unchecked(profile, &out, benchmark) as u64;
            for (a, slot) in out.iter().enumerate() {
                if let Some(i) = *slot {
                    acc.1 += 1;
                    acc.2 += profile.utility(a, i).expect("listed");
                }
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    let total = factorial(n);
    Ok(PartialRsdExact {
        happy: Rational::ratio(happy, total),
        matched: Rational::ratio(matched, total),
        utility: utility / Rational::ratio(total, 1),
    })
}

/// Maximum total partial-list utility and the lexicographically smallest
/// optimal matching (unlisted pairs are never used).
pub fn optimal_partial_welfare(profile: &PartialProfile) -> (Rational, Matching) {
    let size = profile.n().max(profile.m());
    let weight = |a: usize, i: usize| {
        if a < profile.n() && i < profile.m() {
            profile.utility(a, i).unwrap_or_else(Rational::zero)
        } else {
            Rational::zero()
        }
    };
    let (total, cols) = max_weight_perfect(size, weight);
    let assignment = (0..profile.n())
        .map(|a| {
            let i = cols[a];
            (i < profile.m() && profile.position(a, i).is_some()).then_some(i)
        })
        .collect();
    (total, Matching::from_assignment_unchecked(profile.m(), assignment))
}
