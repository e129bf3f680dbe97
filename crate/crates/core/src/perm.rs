//! Enumeration of all permutations of `0..n` (Heap's algorithm).

use rayon::prelude::*;

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Calls `visit` once per permutation of `0..n`, in Heap's order.
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut visit: F) {
    let mut perm: Vec<usize> = (0..n).collect();
    heap_visit(&mut perm, 0, &mut visit);
}

fn heap_visit<F: FnMut(&[usize])>(perm: &mut [usize], fixed: usize, visit: &mut F) {
    let k = perm.len() - fixed;
    visit(perm);
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(fixed, fixed + i);
            } else {
                perm.swap(fixed + c[i], fixed + i);
            }
            visit(perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Parallel fold over all permutations, split by the first element.
///
/// `merge` must be associative and commutative for the result to be
/// independent of scheduling (integer counters are).
pub(crate) fn par_fold_permutations<A, I, V, M>(n: usize, init: I, visit: V, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &[usize]) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut perm: Vec<usize> = std::iter::once(first)
                .chain((0..n).filter(|&x| x != first))
                .collect();
            heap_visit(&mut perm, 1, &mut |p: &[usize]| visit(&mut acc, p));
            acc
        })
        .reduce(&init, &merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn visits_each_permutation_once() {
        for n in 1..=6 {
            let mut seen = HashSet::new();
            for_each_permutation(n, |p| {
                assert!(seen.insert(p.to_vec()));
            });
            assert_eq!(seen.len() as u64, factorial(n));
        }
    }

    #[test]
    fn parallel_fold_counts() {
        let total = par_fold_permutations(6, || 0u64, |acc, _| *acc += 1, |a, b| a + b);
        assert_eq!(total, 720);
        let firsts = par_fold_permutations(
            4,
            || vec![0u64; 4],
            |acc, p| acc[p[0]] += 1,
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
        assert_eq!(firsts, vec![6; 4]);
    }
}
