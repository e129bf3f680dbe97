//! Probabilistic Serial: the simultaneous eating algorithm in exact
//! arithmetic, and Birkhoff–von Neumann decomposition of its output.

use serde::Serialize;

use crate::allocation::{AllocationMatrix, Lottery};
use crate::bipartite::lex_smallest_perfect;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::PreferenceProfile;
use crate::rational::Rational;

/// One phase of the eating run: `[start, end)` and the items that ran out at `end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub start: Rational,
    pub end: Rational,
    pub exhausted: Vec<usize>,
}

impl Phase {
    pub fn duration(&self) -> Rational {
        &self.end - &self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseLog {
    pub phases: Vec<Phase>,
}

/// Time at which each item is completely eaten.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustTimes {
    pub times: Vec<Rational>,
}

impl ExhaustTimes {
    pub fn get(&self, item: usize) -> &Rational {
        &self.times[item]
    }

    pub fn sorted(&self) -> Vec<Rational> {
        let mut v = self.times.clone();
        v.sort();
        v
    }

    /// The `j`-th smallest exhaust time is at least `j/n`, and the last is 1.
    pub fn satisfies_counting_bound(&self) -> bool {
        let n = self.times.len();
        let sorted = self.sorted();
        sorted
            .iter()
            .enumerate()
            .all(|(k, t)| t >= &Rational::ratio(k as u64 + 1, n as u64))
            && sorted.last().is_some_and(Rational::is_one)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsOutcome {
    pub matrix: AllocationMatrix,
    pub phases: PhaseLog,
    pub exhaust: ExhaustTimes,
    /// Items each agent ate, in the order it ate them.
    pub eaten: Vec<Vec<usize>>,
}

/// Runs the eating algorithm: every agent eats its best available item at
/// unit rate; a phase ends when some item runs out (simultaneous run-outs
/// end the same phase).
pub fn ps_allocate(profile: &PreferenceProfile) -> PsOutcome {
    let n = profile.n();
    let mut remaining = vec![Rational::one(); n];
    let mut available = vec![true; n];
    let mut exhaust = vec![Rational::zero(); n];
    let mut cursor = vec![0usize; n];
    let mut started = vec![Rational::zero(); n];
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut eaten: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut phases = Vec::new();
    let mut eaters = vec![0usize; n];
    let mut now = Rational::zero();
    let mut left = n;

    while left > 0 {
        eaters.iter_mut().for_each(|e| *e = 0);
        for a in 0..n {
            let list = profile.list(a);
            while !available[list[cursor[a]]] {
                cursor[a] += 1;
            }
            let item = list[cursor[a]];
            eaters[item] += 1;
            if eaten[a].last() != Some(&item) {
                eaten[a].push(item);
            }
        }
        let delta = (0..n)
            .filter(|&i| eaters[i] > 0)
            .map(|i| &remaining[i] / Rational::from_usize(eaters[i]))
            .min()
            .expect("some item is being eaten");
        let end = &now + &delta;
        let mut exhausted = Vec::new();
        for i in 0..n {
            if eaters[i] > 0 {
                remaining[i] -= &delta * Rational::from_usize(eaters[i]);
                if remaining[i].is_zero() {
                    exhausted.push(i);
                    available[i] = false;
                    exhaust[i] = end.clone();
                    left -= 1;
                }
            }
        }
        for a in 0..n {
            let item = profile.list(a)[cursor[a]];
            if !available[item] {
                rows[a].push((item, &end - &started[a]));
                started[a] = end.clone();
            }
        }
        phases.push(Phase {
            start: now,
            end: end.clone(),
            exhausted,
        });
        now = end;
    }
    debug_assert!(now.is_one());
    for row in &mut rows {
        row.sort_by_key(|(i, _)| *i);
    }
    PsOutcome {
        matrix: AllocationMatrix::from_rows_unchecked(n, rows),
        phases: PhaseLog { phases },
        exhaust: ExhaustTimes { times: exhaust },
        eaten,
    }
}

pub fn exhaust_times(profile: &PreferenceProfile) -> ExhaustTimes {
    ps_allocate(profile).exhaust
}

/// Splits a doubly stochastic matrix into a lottery over perfect matchings.
///
/// Each round takes the lexicographically smallest perfect matching on the
/// current support and subtracts its smallest entry, so the output is
/// deterministic.
pub fn bvn_decompose(matrix: &AllocationMatrix) -> Result<Lottery> {
    matrix.check_doubly_stochastic()?;
    let n = matrix.n();
    let mut rows: Vec<Vec<(usize, Rational)>> = (0..n).map(|a| matrix.row(a).to_vec()).collect();
    let mut components = Vec::new();
    let mut mass = Rational::one();
    while !mass.is_zero() {
        let adj: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| r.iter().map(|(i, _)| *i).collect())
            .collect();
        let perm = lex_smallest_perfect(&adj, None).ok_or_else(|| {
            Error::NotDoublyStochastic("support has no perfect matching".into())
        })?;
        let weight = perm
            .iter()
            .enumerate()
            .map(|(a, &i)| entry(&rows[a], i))
            .min()
            .expect("n >= 1")
            .clone();
        for (a, &i) in perm.iter().enumerate() {
            let pos = rows[a].binary_search_by_key(&i, |(j, _)| *j).expect("in support");
            rows[a][pos].1 -= &weight;
            if rows[a][pos].1.is_zero() {
                rows[a].remove(pos);
            }
        }
        mass -= &weight;
        components.push((weight, Matching::from_items(perm)?));
    }
    Lottery::new(components)
}

fn entry(row: &[(usize, Rational)], item: usize) -> &Rational {
    let pos = row.binary_search_by_key(&item, |(j, _)| *j).expect("in support");
    &row[pos].1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn identical_lists_three_equal_phases() {
        let p = PreferenceProfile::new(3, vec![vec![0, 1, 2]; 3]).unwrap();
        let out = ps_allocate(&p);
        for a in 0..3 {
            for i in 0..3 {
                assert_eq!(out.matrix.get(a, i), q(1, 3));
            }
        }
        assert_eq!(out.phases.phases.len(), 3);
        for (j, ph) in out.phases.phases.iter().enumerate() {
            assert_eq!(ph.duration(), q(1, 3));
            assert_eq!(ph.exhausted, vec![j]);
        }
        assert_eq!(out.exhaust.times, vec![q(1, 3), q(2, 3), q(1, 1)]);
    }

    #[test]
    fn simultaneous_exhaustion_is_one_phase() {
        // Two agents, distinct first choices: both items run out at time 1.
        let p = PreferenceProfile::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let out = ps_allocate(&p);
        assert_eq!(out.phases.phases.len(), 1);
        assert_eq!(out.phases.phases[0].exhausted, vec![0, 1]);
    }

    #[test]
    fn bvn_two_by_two_half() {
        let m = AllocationMatrix::from_dense(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 2)]]).unwrap();
        let l = bvn_decompose(&m).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.components()[0], (q(1, 2), Matching::from_items(vec![0, 1]).unwrap()));
        assert_eq!(l.components()[1], (q(1, 2), Matching::from_items(vec![1, 0]).unwrap()));
    }

    #[test]
    fn bvn_permutation_is_single_component() {
        let pm = Matching::from_items(vec![2, 0, 1]).unwrap();
        let l = bvn_decompose(&AllocationMatrix::permutation(&pm).unwrap()).unwrap();
        assert_eq!(l.components(), &[(q(1, 1), pm)]);
    }
}
