use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::rational::Rational;

/// Doubly stochastic `n x n` matrix of assignment probabilities.
///
/// Stored as sparse rows sorted by item; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllocationMatrix {
    n: usize,
    rows: Vec<Vec<(usize, Rational)>>,
}

impl AllocationMatrix {
    /// Validates a dense grid.
    pub fn from_dense(grid: Vec<Vec<Rational>>) -> Result<Self> {
        let n = grid.len();
        let rows = grid
            .into_iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::NotDoublyStochastic(format!(
                        "row of length {} in {n}x{n} matrix",
                        row.len()
                    )));
                }
                Ok(row
                    .into_iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        AllocationMatrix::from_sparse(n, rows)
    }

    /// Validates sparse rows of `(item, probability)`; duplicates are summed.
    pub fn from_sparse(n: usize, rows: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::NotDoublyStochastic(format!(
                "{} rows for n = {n}",
                rows.len()
            )));
        }
        let mut tidy = Vec::with_capacity(n);
        for mut row in rows {
            row.sort_by_key(|(i, _)| *i);
            let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
            for (item, q) in row {
                if item >= n {
                    return Err(Error::OutOfRange { id: item, size: n });
                }
                match merged.last_mut() {
                    Some((last, acc)) if *last == item => *acc += q,
                    _ => merged.push((item, q)),
                }
            }
            merged.retain(|(_, q)| !q.is_zero());
            tidy.push(merged);
        }
        let m = AllocationMatrix { n, rows: tidy };
        m.check_doubly_stochastic()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, agent: usize, item: usize) -> Rational {
        let row = &self.rows[agent];
        match row.binary_search_by_key(&item, |(i, _)| *i) {
            Ok(pos) => row[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Nonzero entries of one agent's row, sorted by item.
    pub fn row(&self, agent: usize) -> &[(usize, Rational)] {
        &self.rows[agent]
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|i| self.get(a, i)).collect())
            .collect()
    }

    /// Permutation matrix of a perfect matching.
    pub fn permutation(matching: &Matching) -> Result<Self> {
        let n = matching.agents();
        matching.require_perfect(n)?;
        let rows = matching
            .as_permutation()
            .into_iter()
            .map(|i| vec![(i, Rational::one())])
            .collect();
        Ok(AllocationMatrix { n, rows })
    }

    pub fn check_doubly_stochastic(&self) -> Result<()> {
        let one = Rational::one();
        let mut cols = vec![Rational::zero(); self.n];
        for (a, row) in self.rows.iter().enumerate() {
            let mut sum = Rational::zero();
            for (i, q) in row {
                if q.is_negative() || q > &one {
                    return Err(Error::NotDoublyStochastic(format!(
                        "entry ({a},{i}) = {q} outside [0,1]"
                    )));
                }
                sum += q;
                cols[*i] += q;
            }
            if sum != one {
                return Err(Error::NotDoublyStochastic(format!("row {a} sums to {sum}")));
            }
        }
        for (i, sum) in cols.iter().enumerate() {
            if sum != &one {
                return Err(Error::NotDoublyStochastic(format!(
                    "column {i} sums to {sum}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn from_rows_unchecked(n: usize, rows: Vec<Vec<(usize, Rational)>>) -> Self {
        AllocationMatrix { n, rows }
    }

    /// Same matrix with agent `a` renamed to `relabel[a]`.
    pub fn relabel_agents(&self, relabel: &[usize]) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for (old, &new) in relabel.iter().enumerate() {
            rows[new] = self.rows[old].clone();
        }
        AllocationMatrix { n: self.n, rows }
    }
}

/// Convex combination of perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lottery {
    components: Vec<(Rational, Matching)>,
}

impl Lottery {
    pub fn new(components: Vec<(Rational, Matching)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::Domain("lottery has no components".into()));
        };
        let n = first.agents();
        let mut total = Rational::zero();
        for (w, m) in &components {
            if !w.is_positive() {
                return Err(Error::Domain(format!("non-positive weight {w}")));
            }
            m.require_perfect(n)?;
            total += w;
        }
        if !total.is_one() {
            return Err(Error::Domain(format!("weights sum to {total}")));
        }
        Ok(Lottery { components })
    }

    pub fn components(&self) -> &[(Rational, Matching)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn n(&self) -> usize {
        self.components[0].1.agents()
    }

    /// Weighted sum of the components' permutation matrices.
    pub fn recombine(&self) -> Result<AllocationMatrix> {
        let n = self.n();
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        for (w, m) in &self.components {
            for (a, i) in m.pairs() {
                rows[a].push((i, w.clone()));
            }
        }
        AllocationMatrix::from_sparse(n, rows)
    }

    /// Draws one component index with probability equal to its weight.
    pub fn sample_index<R: Rng + ?Sized>(&self, cumulative: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        cumulative
            .partition_point(|&c| c <= u)
            .min(self.components.len() - 1)
    }

    /// Cumulative weights as `f64`, for [`Lottery::sample_index`].
    pub fn cumulative_weights(&self) -> Vec<f64> {
        let mut acc = Rational::zero();
        self.components
            .iter()
            .map(|(w, _)| {
                acc += w;
                acc.to_f64()
            })
            .collect()
    }
}
