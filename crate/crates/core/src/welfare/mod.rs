//! Ordinal and linear welfare of matchings and allocation matrices.
//!
//! An agent is *happy* against a benchmark when it receives an item it
//! weakly prefers to its benchmark item. Agents the benchmark leaves
//! unmatched always count as happy; agents left unmatched by the
//! allocation but matched by the benchmark never do.

pub mod assignment;
pub mod bounds;

use serde::Serialize;

use crate::allocation::AllocationMatrix;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::PreferenceProfile;
use crate::ps::exhaust_times;
use crate::rational::Rational;

pub use assignment::{max_weight_perfect, Weight};
pub use bounds::{
    kdemand_finite_bound, kdemand_lower_bound, ps_constant_residual, ps_general_linear_constant,
    rsd_finite_benefit_integrand, rsd_general_linear_bound,
};

fn check_matching(m: &Matching, profile: &PreferenceProfile) -> Result<()> {
    let n = profile.n();
    if m.agents() != n || m.items() != n {
        return Err(Error::Domain(format!(
            "matching over {} agents / {} items does not fit n = {n}",
            m.agents(),
            m.items()
        )));
    }
    Ok(())
}

/// Number of agents at least as happy in `matching` as in `benchmark`.
pub fn ordinal_happy_count(
    matching: &Matching,
    benchmark: &Matching,
    profile: &PreferenceProfile,
) -> Result<usize> {
    check_matching(matching, profile)?;
    check_matching(benchmark, profile)?;
    Ok((0..profile.n())
        .filter(|&a| match (matching.get(a), benchmark.get(a)) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(i), Some(b)) => profile.weakly_prefers(a, i, b),
        })
        .count())
}

/// Expected happy count: `sum_a sum_{i weakly better than M*(a)} x(a, i)`.
pub fn expected_ordinal_welfare(
    matrix: &AllocationMatrix,
    benchmark: &Matching,
    profile: &PreferenceProfile,
) -> Result<Rational> {
    let n = profile.n();
    if matrix.n() != n {
        return Err(Error::Domain("matrix size does not match profile".into()));
    }
    benchmark.require_perfect(n)?;
    Ok((0..n)
        .flat_map(|a| {
            let target = profile.rank_of(a, benchmark.get(a).expect("perfect"));
            matrix
                .row(a)
                .iter()
                .filter(move |(i, _)| profile.rank_of(a, *i) <= target)
                .map(|(_, x)| x)
        })
        .sum())
}

/// `sum_a t(M*(a))`: total time at which the benchmark items run out. A
/// lower bound on the PS happy count, and itself at least `(n+1)/2`.
pub fn benchmark_exhaust_sum(profile: &PreferenceProfile, benchmark: &Matching) -> Result<Rational> {
    benchmark.require_perfect(profile.n())?;
    let times = exhaust_times(profile);
    Ok(benchmark.pairs().map(|(_, i)| times.get(i)).sum())
}

/// PS happy count from exhaust times alone. Agent `a` keeps eating items
/// weakly better than `M*(a)` until the last of them runs out, so its
/// happiness probability is the largest exhaust time over that prefix
/// (which can exceed the exhaust time of `M*(a)` itself).
pub fn ps_ordinal_via_times(profile: &PreferenceProfile, benchmark: &Matching) -> Result<Rational> {
    benchmark.require_perfect(profile.n())?;
    let times = exhaust_times(profile);
    Ok(benchmark
        .pairs()
        .map(|(a, i)| {
            let prefix = &profile.list(a)[..profile.rank_of(a, i)];
            prefix.iter().map(|&j| times.get(j)).max().expect("non-empty").clone()
        })
        .sum())
}

/// Utility `(n - rank + 1) / n` of an item to an agent.
pub fn item_utility(profile: &PreferenceProfile, agent: usize, item: usize) -> Rational {
    let n = profile.n();
    Rational::ratio((n + 1 - profile.rank_of(agent, item)) as u64, n as u64)
}

/// Total linear utility of a (possibly partial) matching.
pub fn linear_utility(matching: &Matching, profile: &PreferenceProfile) -> Result<Rational> {
    check_matching(matching, profile)?;
    let n = profile.n();
    let total: u64 = matching
        .pairs()
        .map(|(a, i)| (n + 1 - profile.rank_of(a, i)) as u64)
        .sum();
    Ok(Rational::ratio(total, n as u64))
}

/// Expected linear utility of an allocation matrix.
pub fn linear_utility_matrix(matrix: &AllocationMatrix, profile: &PreferenceProfile) -> Result<Rational> {
    let agents: Vec<usize> = (0..profile.n()).collect();
    let items: Vec<usize> = agents.clone();
    linear_utility_restricted(matrix, profile, &agents, &items)
}

/// Linear utility collected only from entries `(a, i)` with `a` in
/// `agents` and `i` in `items`.
pub fn linear_utility_restricted(
    matrix: &AllocationMatrix,
    profile: &PreferenceProfile,
    agents: &[usize],
    items: &[usize],
) -> Result<Rational> {
    let n = profile.n();
    if matrix.n() != n {
        return Err(Error::Domain("matrix size does not match profile".into()));
    }
    let mut keep = vec![false; n];
    for &i in items {
        *keep.get_mut(i).ok_or(Error::OutOfRange { id: i, size: n })? = true;
    }
    let mut acc = Rational::zero();
    for &a in agents {
        if a >= n {
            return Err(Error::OutOfRange { id: a, size: n });
        }
        for (i, x) in matrix.row(a) {
            if keep[*i] {
                acc += x * Rational::from_usize(n + 1 - profile.rank_of(a, *i));
            }
        }
    }
    Ok(acc / Rational::from_usize(n))
}

/// Maximum total linear utility over perfect matchings and the
/// lexicographically smallest matching attaining it.
pub fn optimal_linear_welfare(profile: &PreferenceProfile) -> (Rational, Matching) {
    let n = profile.n();
    let (total, cols) = max_weight_perfect(n, |a, i| (n + 1 - profile.rank_of(a, i)) as i64);
    let matching = Matching::from_items(cols).expect("assignment is a permutation");
    (Rational::ratio(total as u64, n as u64), matching)
}

/// `#agents strictly preferring m` minus `#agents strictly preferring m2`.
/// Being matched beats being unmatched.
pub fn popularity_margin(m: &Matching, m2: &Matching, profile: &PreferenceProfile) -> Result<i64> {
    check_matching(m, profile)?;
    check_matching(m2, profile)?;
    let mut margin = 0i64;
    for a in 0..profile.n() {
        let r1 = m.get(a).map(|i| profile.rank_of(a, i));
        let r2 = m2.get(a).map(|i| profile.rank_of(a, i));
        let cmp = match (r1, r2) {
            (Some(x), Some(y)) => y.cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Greater,
            (None, Some(_)) => std::cmp::Ordering::Less,
            (None, None) => std::cmp::Ordering::Equal,
        };
        margin += match cmp {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        };
    }
    Ok(margin)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WelfareReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordinal_happy: Option<Rational>,
    pub linear_utility: Rational,
    pub opt_linear: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordinal_ratio: Option<Rational>,
    pub linear_ratio: Rational,
}

/// Welfare of an allocation matrix; ordinal figures only with a benchmark.
pub fn welfare_report(
    matrix: &AllocationMatrix,
    profile: &PreferenceProfile,
    benchmark: Option<&Matching>,
) -> Result<WelfareReport> {
    let n = Rational::from_usize(profile.n());
    let ordinal_happy = benchmark
        .map(|b| expected_ordinal_welfare(matrix, b, profile))
        .transpose()?;
    let linear_utility = linear_utility_matrix(matrix, profile)?;
    let (opt_linear, _) = optimal_linear_welfare(profile);
    Ok(WelfareReport {
        ordinal_ratio: ordinal_happy.as_ref().map(|h| h / &n),
        linear_ratio: &linear_utility / &opt_linear,
        ordinal_happy,
        linear_utility,
        opt_linear,
    })
}
