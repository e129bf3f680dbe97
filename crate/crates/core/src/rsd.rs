//! Random Serial Dictatorship: exact distribution by enumerating every
//! arrival order, seeded Monte Carlo estimation, and the dead-agent
//! trajectory of a run.

use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::AllocationMatrix;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::perm::{factorial, par_fold_permutations};
use crate::profile::{check_permutation, PreferenceProfile};
use crate::rational::Rational;
use crate::rng::{sample_rng, shuffle_identity};
use crate::sd::run_into;
use crate::stats::MeanEstimate;

/// Largest `n` for which full enumeration of `n!` orders is attempted.
pub const DEFAULT_ENUM_GUARD: usize = 10;

fn check_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard {
        Err(Error::TooLarge { n, guard })
    } else {
        Ok(())
    }
}

/// Exact RSD allocation with the default enumeration guard.
pub fn rsd_exact(profile: &PreferenceProfile) -> Result<AllocationMatrix> {
    rsd_exact_guarded(profile, DEFAULT_ENUM_GUARD)
}

pub fn rsd_exact_guarded(profile: &PreferenceProfile, guard: usize) -> Result<AllocationMatrix> {
    let n = profile.n();
    check_guard(n, guard)?;
    let counts = par_fold_permutations(
        n,
        || SdCounter::new(n),
        |acc, order| acc.record(profile, order),
        SdCounter::merge,
    );
    let total = factorial(n);
    let rows = counts
        .hits
        .chunks(n)
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &h)| h > 0)
                .map(|(i, &h)| (i, Rational::ratio(h, total)))
                .collect()
        })
        .collect();
    AllocationMatrix::from_sparse(n, rows)
}

struct SdCounter {
    n: usize,
    hits: Vec<u64>,
    taken: Vec<bool>,
    out: Vec<usize>,
}

impl SdCounter {
    fn new(n: usize) -> Self {
        SdCounter {
            n,
            hits: vec![0; n * n],
            taken: vec![false; n],
            out: vec![0; n],
        }
    }

    fn record(&mut self, profile: &PreferenceProfile, order: &[usize]) {
        run_into(profile, order, &mut self.taken, &mut self.out);
        for (a, &i) in self.out.iter().enumerate() {
            self.hits[a * self.n + i] += 1;
        }
    }

    fn merge(mut self, other: SdCounter) -> SdCounter {
        self.hits
            .iter_mut()
            .zip(other.hits)
            .for_each(|(x, y)| *x += y);
        self
    }
}

/// Monte Carlo estimate of the RSD allocation matrix.
#[derive(Debug, Clone, Serialize)]
pub struct RsdEstimate {
    pub n: usize,
    pub samples: usize,
    /// `hits[a][i]`: number of samples in which agent `a` received item `i`.
    pub hits: Vec<Vec<u64>>,
}

impl RsdEstimate {
    pub fn mean(&self, agent: usize, item: usize) -> f64 {
        self.hits[agent][item] as f64 / self.samples as f64
    }

    pub fn stderr(&self, agent: usize, item: usize) -> f64 {
        MeanEstimate::from_proportion(self.hits[agent][item], self.samples).stderr
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|i| self.mean(a, i)).collect())
            .collect()
    }

    pub fn stderrs(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|i| self.stderr(a, i)).collect())
            .collect()
    }
}

/// Each sample draws an independent uniform order and runs serial
/// dictatorship. Deterministic in `(seed, samples)`.
pub fn rsd_monte_carlo(profile: &PreferenceProfile, samples: usize, seed: u64) -> Result<RsdEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let n = profile.n();
    let counts = (0..samples as u64)
        .into_par_iter()
        .fold(
            || (SdCounter::new(n), vec![0usize; n]),
            |(mut acc, mut order), idx| {
                let mut rng = sample_rng(seed, idx);
                shuffle_identity(&mut order, &mut rng);
                acc.record(profile, &order);
                (acc, order)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(|| SdCounter::new(n), SdCounter::merge);
    Ok(RsdEstimate {
        n,
        samples,
        hits: counts.hits.chunks(n).map(<[u64]>::to_vec).collect(),
    })
}

/// Per-sample statistic over seeded uniform orders, returned in sample order.
pub fn sample_orders<T, F>(n: usize, samples: usize, seed: u64, stat: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize]) -> T + Sync + Send,
{
    (0..samples as u64)
        .into_par_iter()
        .map_init(
            || vec![0usize; n],
            |order, idx| {
                let mut rng = sample_rng(seed, idx);
                shuffle_identity(order, &mut rng);
                stat(order)
            },
        )
        .collect()
}

/// Dead agents after the first `t` arrivals of `order`: agents not yet
/// arrived whose every item weakly preferred to their benchmark item is taken.
pub fn dead_agents_after(
    profile: &PreferenceProfile,
    benchmark: &Matching,
    order: &[usize],
    t: usize,
) -> Result<usize> {
    let n = profile.n();
    benchmark.require_perfect(n)?;
    check_permutation(order, n)?;
    if t > n {
        return Err(Error::OutOfRange { id: t, size: n + 1 });
    }
    let mut tracker = DeadTracker::new(profile, benchmark);
    for &agent in &order[..t] {
        tracker.arrive(profile, agent);
    }
    Ok(tracker.dead)
}

/// Incremental bookkeeping of one SD run against a benchmark.
struct DeadTracker {
    /// Rank of the benchmark item for each agent.
    target: Vec<usize>,
    /// Taken items among each agent's weakly-better prefix.
    filled: Vec<usize>,
    arrived: Vec<bool>,
    taken: Vec<bool>,
    dead: usize,
    happy: usize,
}

impl DeadTracker {
    fn new(profile: &PreferenceProfile, benchmark: &Matching) -> Self {
        let n = profile.n();
        let target = (0..n)
            .map(|a| profile.rank_of(a, benchmark.get(a).expect("perfect")))
            .collect();
        DeadTracker {
            target,
            filled: vec![0; n],
            arrived: vec![false; n],
            taken: vec![false; n],
            dead: 0,
            happy: 0,
        }
    }

    fn arrive(&mut self, profile: &PreferenceProfile, agent: usize) {
        let item = *profile
            .list(agent)
            .iter()
            .find(|&&i| !self.taken[i])
            .expect("complete lists always leave an item");
        if self.filled[agent] == self.target[agent] {
            // Was dead; it leaves the pool of waiting agents.
            self.dead -= 1;
        }
        self.arrived[agent] = true;
        self.taken[item] = true;
        if profile.rank_of(agent, item) <= self.target[agent] {
            self.happy += 1;
        }
        for a in 0..self.target.len() {
            if profile.rank_of(a, item) <= self.target[a] {
                self.filled[a] += 1;
                if !self.arrived[a] && self.filled[a] == self.target[a] {
                    self.dead += 1;
                }
            }
        }
    }
}

/// Expected happy count and dead count after each step `t = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RsdTrajectory {
    pub n: usize,
    /// `happy[t]`: expected number of the first `t` arrivals matched at
    /// least as well as in the benchmark.
    pub happy: Vec<Rational>,
    /// `dead[t]`: expected number of dead agents after `t` arrivals.
    pub dead: Vec<Rational>,
}

impl RsdTrajectory {
    /// Per-step identity `happy[t+1] - happy[t] = 1 - dead[t] / (n - t)`.
    pub fn satisfies_step_identity(&self) -> bool {
        (0..self.n).all(|t| {
            let lhs = &self.happy[t + 1] - &self.happy[t];
            let rhs = Rational::one() - &self.dead[t] / Rational::from_usize(self.n - t);
            lhs == rhs
        })
    }

    /// Upper bound `(t+2)(n-t)/(n+1)` on the expected dead count.
    pub fn dead_bound(n: usize, t: usize) -> Rational {
        Rational::ratio(((t + 2) * (n - t)) as u64, (n + 1) as u64)
    }

    pub fn satisfies_dead_bound(&self) -> bool {
        (1..=self.n).all(|t| self.dead[t] <= Self::dead_bound(self.n, t))
    }

    pub fn final_happy(&self) -> &Rational {
        &self.happy[self.n]
    }
}

pub fn rsd_trajectory_exact(profile: &PreferenceProfile, benchmark: &Matching) -> Result<RsdTrajectory> {
    let mut all = rsd_trajectories_exact(profile, std::slice::from_ref(benchmark), DEFAULT_ENUM_GUARD)?;
    Ok(all.remove(0))
}

/// Trajectories for several benchmarks from a single pass over all orders.
pub fn rsd_trajectories_exact(
    profile: &PreferenceProfile,
    benchmarks: &[Matching],
    guard: usize,
) -> Result<Vec<RsdTrajectory>> {
    let n = profile.n();
    check_guard(n, guard)?;
    for b in benchmarks {
        b.require_perfect(n)?;
    }
    let k = benchmarks.len();
    // Layout: [benchmark][t] for happy and dead sums.
    let (happy, dead) = par_fold_permutations(
        n,
        || (vec![0u64; k * (n + 1)], vec![0u64; k * (n + 1)]),
        |(happy, dead), order| {
            for (b, bench) in benchmarks.iter().enumerate() {
                let mut tracker = DeadTracker::new(profile, bench);
                let base = b * (n + 1);
                for (t, &agent) in order.iter().enumerate() {
                    tracker.arrive(profile, agent);
                    happy[base + t + 1] += tracker.happy as u64;
                    dead[base + t + 1] += tracker.dead as u64;
                }
            }
        },
        |(mut h1, mut d1), (h2, d2)| {
            h1.iter_mut().zip(h2).for_each(|(x, y)| *x += y);
            d1.iter_mut().zip(d2).for_each(|(x, y)| *x += y);
            (h1, d1)
        },
    );
    let total = factorial(n);
    Ok((0..k)
        .map(|b| {
            let base = b * (n + 1);
            RsdTrajectory {
                n,
                happy: (0..=n).map(|t| Rational::ratio(happy[base + t], total)).collect(),
                dead: (0..=n).map(|t| Rational::ratio(dead[base + t], total)).collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance2() -> PreferenceProfile {
        PreferenceProfile::new(3, vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]).unwrap()
    }

    #[test]
    fn dead_after_first_arrival() {
        let p = instance2();
        let bench = Matching::from_items(vec![0, 2, 1]).unwrap();
        let order = [1, 0, 2];
        assert_eq!(dead_agents_after(&p, &bench, &order, 1).unwrap(), 1);
        assert_eq!(dead_agents_after(&p, &bench, &order, 0).unwrap(), 0);
        assert_eq!(dead_agents_after(&p, &bench, &order, 3).unwrap(), 0);
        assert!(dead_agents_after(&p, &bench, &order, 4).is_err());
    }

    #[test]
    fn guard_is_enforced() {
        let p = PreferenceProfile::new(4, vec![vec![0, 1, 2, 3]; 4]).unwrap();
        assert_eq!(
            rsd_exact_guarded(&p, 3).unwrap_err(),
            Error::TooLarge { n: 4, guard: 3 }
        );
    }

    #[test]
    fn single_sample_is_permutation_matrix() {
        let p = instance2();
        let est = rsd_monte_carlo(&p, 1, 11).unwrap();
        for a in 0..3 {
            assert_eq!(est.hits[a].iter().sum::<u64>(), 1);
        }
        for i in 0..3 {
            assert_eq!((0..3).map(|a| est.hits[a][i]).sum::<u64>(), 1);
        }
    }

    #[test]
    fn zero_samples_rejected() {
        assert_eq!(rsd_monte_carlo(&instance2(), 0, 1).unwrap_err(), Error::NoSamples);
    }

    #[test]
    fn trajectory_starts_at_zero() {
        let p = instance2();
        let bench = Matching::from_items(vec![0, 2, 1]).unwrap();
        let tr = rsd_trajectory_exact(&p, &bench).unwrap();
        assert!(tr.happy[0].is_zero());
        assert!(tr.dead[0].is_zero());
        assert_eq!(tr.final_happy(), &Rational::new(7, 3));
        assert!(tr.satisfies_step_identity());
    }
}
