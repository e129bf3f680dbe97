//! Exact maximum-weight perfect assignment (Hungarian method with
//! potentials), ties broken toward the lexicographically smallest matching.

use std::ops::{Add, Sub};

use crate::bipartite::lex_smallest_perfect;
use crate::rational::Rational;

/// Exact ordered weights the solver can work with.
pub trait Weight: Clone + Ord + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
}

impl Weight for i64 {
    fn zero() -> Self {
        0
    }
}

impl Weight for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
}

/// Maximum total weight over perfect matchings of the complete `n x n`
/// bipartite graph, and the lexicographically smallest maximizer
/// (`result[row] = column`).
pub fn max_weight_perfect<T, F>(n: usize, weight: F) -> (T, Vec<usize>)
where
    T: Weight,
    F: Fn(usize, usize) -> T,
{
    if n == 0 {
        return (T::zero(), Vec::new());
    }
    // Minimise cost = -weight.
    let cost: Vec<Vec<T>> = (0..n)
        .map(|r| (0..n).map(|c| T::zero() - weight(r, c)).collect())
        .collect();
    let (row_pot, col_pot, col_owner) = hungarian(&cost);

    // Every optimal matching uses only edges that are tight under optimal
    // potentials, and every perfect matching on tight edges is optimal.
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| {
            (0..n)
                .filter(|&c| cost[r][c].clone() - row_pot[r + 1].clone() - col_pot[c + 1].clone() == T::zero())
                .collect()
        })
        .collect();
    let mut start = vec![0usize; n];
    for c in 1..=n {
        start[col_owner[c] - 1] = c - 1;
    }
    let cols = lex_smallest_perfect(&adj, Some(start)).expect("optimal matching is tight");
    let total = cols
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (r, &c)| acc + weight(r, c));
    (total, cols)
}

/// Square min-cost assignment, 1-indexed internally. Returns row and
/// column potentials and `owner[col] = row`.
fn hungarian<T: Weight>(cost: &[Vec<T>]) -> (Vec<T>, Vec<T>, Vec<usize>) {
    let n = cost.len();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv: Vec<Option<T>> = vec![None; n + 1];
    let mut used = vec![false; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = None);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0usize;
            let c_row = &cost[i0 - 1];
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = c_row[j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| &cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    let r = owner[j];
                    u[r] = u[r].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].take() {
                    minv[j] = Some(m - delta.clone());
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (u, v, owner)
}
