use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::check_permutation;
use crate::rsd::sample_orders;
use crate::stats::MeanEstimate;

/// Agents demanding bundles of exactly `k` items, each with an ordered list
/// of acceptable bundles. Unlisted bundles are unacceptable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleProfile {
    item_count: usize,
    k: usize,
    lists: Vec<Vec<Vec<usize>>>,
}

impl BundleProfile {
    pub fn new(item_count: usize, k: usize, lists: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        for (agent, list) in lists.iter().enumerate() {
            let mut canon: Vec<Vec<usize>> = Vec::with_capacity(list.len());
            for (index, bundle) in list.iter().enumerate() {
                let bad = |reason: String| Error::InvalidBundle { agent, index, reason };
                if bundle.len() != k {
                    return Err(bad(format!("has {} items, expected {k}", bundle.len())));
                }
                let mut sorted = bundle.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(bad("repeats an item".into()));
                }
                if let Some(&i) = sorted.iter().find(|&&i| i >= item_count) {
                    return Err(bad(format!("item {i} out of range")));
                }
                if canon.contains(&sorted) {
                    return Err(bad("listed twice".into()));
                }
                canon.push(sorted);
            }
        }
        Ok(BundleProfile { item_count, k, lists })
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn list(&self, agent: usize) -> &[Vec<usize>] {
        &self.lists[agent]
    }

    pub fn lists(&self) -> &[Vec<Vec<usize>>] {
        &self.lists
    }
}

/// `assignment[a]` is the index into agent `a`'s list of the bundle it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleAllocation {
    pub assignment: Vec<Option<usize>>,
}

impl BundleAllocation {
    /// Validates that held bundles are listed and pairwise disjoint.
    pub fn new(profile: &BundleProfile, assignment: Vec<Option<usize>>) -> Result<Self> {
        if assignment.len() != profile.n() {
            return Err(Error::Domain(format!(
                "allocation covers {} agents, profile has {}",
                assignment.len(),
                profile.n()
            )));
        }
        let mut owner = vec![usize::MAX; profile.item_count()];
        for (agent, slot) in assignment.iter().enumerate() {
            let Some(index) = *slot else { continue };
            let bundle = profile
                .list(agent)
                .get(index)
                .ok_or(Error::OutOfRange { id: index, size: profile.list(agent).len() })?;
            for &item in bundle {
                if owner[item] != usize::MAX {
                    return Err(Error::NonInjective { item, first: owner[item], second: agent });
                }
                owner[item] = agent;
            }
        }
        Ok(BundleAllocation { assignment })
    }

    pub fn matched(&self) -> usize {
        self.assignment.iter().flatten().count()
    }
}

/// Agents arrive in `order`; each takes its best listed bundle whose items
/// are all still free, or nothing.
pub fn rsd_bundles(profile: &BundleProfile, order: &[usize]) -> Result<BundleAllocation> {
    check_permutation(order, profile.n())?;
    let mut taken = vec![false; profile.item_count()];
    let mut out = vec![None; profile.n()];
    run_bundles(profile, order, &mut taken, &mut out);
    Ok(BundleAllocation { assignment: out })
}

fn run_bundles(profile: &BundleProfile, order: &[usize], taken: &mut [bool], out: &mut [Option<usize>]) {
    taken.iter_mut().for_each(|t| *t = false);
    for &agent in order {
        out[agent] = profile
            .list(agent)
            .iter()
            .position(|b| b.iter().all(|&i| !taken[i]));
        if let Some(idx) = out[agent] {
            for &i in &profile.list(agent)[idx] {
                taken[i] = true;
            }
        }
    }
}

/// Agents holding a bundle ranked at least as high as their benchmark
/// bundle, plus agents the benchmark leaves empty-handed.
pub fn ordinal_happy_bundles(
    allocation: &BundleAllocation,
    benchmark: &BundleAllocation,
    profile: &BundleProfile,
) -> Result<usize> {
    BundleAllocation::new(profile, allocation.assignment.clone())?;
    BundleAllocation::new(profile, benchmark.assignment.clone())?;
    Ok(happy_unchecked(&allocation.assignment, &benchmark.assignment))
}

fn happy_unchecked(alloc: &[Option<usize>], benchmark: &[Option<usize>]) -> usize {
    alloc
        .iter()
        .zip(benchmark)
        .filter(|(got, want)| match (got, want) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(g), Some(w)) => g <= w,
        })
        .count()
}

/// Monte Carlo happy fraction of RSD with bundles against `benchmark`.
pub fn rsd_bundles_monte_carlo(
    profile: &BundleProfile,
    benchmark: &BundleAllocation,
    samples: usize,
    seed: u64,
) -> Result<MeanEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    BundleAllocation::new(profile, benchmark.assignment.clone())?;
    let n = profile.n();
    let values = sample_orders(n, samples, seed, |order| {
        let mut taken = vec![false; profile.item_count()];
        let mut out = vec![None; n];
        run_bundles(profile, order, &mut taken, &mut out);
        happy_unchecked(&out, &benchmark.assignment) as f64 / n as f64
    });
    Ok(MeanEstimate::from_values(&values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(BundleProfile::new(4, 2, vec![vec![vec![0]]]).is_err());
        assert!(BundleProfile::new(4, 2, vec![vec![vec![0, 0]]]).is_err());
        assert!(BundleProfile::new(4, 2, vec![vec![vec![0, 4]]]).is_err());
        assert!(BundleProfile::new(4, 2, vec![vec![vec![0, 1], vec![1, 0]]]).is_err());
        BundleProfile::new(4, 2, vec![vec![vec![0, 1], vec![2, 3]]]).unwrap();
    }

    #[test]
    fn single_agent_gets_its_bundle() {
        let p = BundleProfile::new(3, 2, vec![vec![vec![0, 2]]]).unwrap();
        assert_eq!(rsd_bundles(&p, &[0]).unwrap().assignment, vec![Some(0)]);
    }

    #[test]
    fn conflict_goes_to_first_arrival() {
        let p = BundleProfile::new(2, 2, vec![vec![vec![0, 1]], vec![vec![0, 1]]]).unwrap();
        assert_eq!(rsd_bundles(&p, &[1, 0]).unwrap().assignment, vec![None, Some(0)]);
    }

    #[test]
    fn overlapping_benchmark_rejected() {
        let p = BundleProfile::new(3, 2, vec![vec![vec![0, 1]], vec![vec![1, 2]]]).unwrap();
        assert!(BundleAllocation::new(&p, vec![Some(0), Some(0)]).is_err());
    }
}
