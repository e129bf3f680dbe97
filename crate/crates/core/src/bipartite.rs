//! Perfect matchings in bipartite support graphs with `n` agents and `n` items.

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

/// Any perfect matching via augmenting paths, scanning agents and their
/// items in ascending order. `adj[a]` must be sorted.
pub fn find_perfect(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut owner = vec![NONE; n];
    let mut item_of = vec![NONE; n];
    // Greedy warm start.
    for a in 0..n {
        if let Some(&i) = adj[a].iter().find(|&&i| owner[i] == NONE) {
            owner[i] = a;
            item_of[a] = i;
        }
    }
    let mut visited = vec![0u32; n];
    let mut stamp = 0u32;
    for a in 0..n {
        if item_of[a] != NONE {
            continue;
        }
        stamp += 1;
        if !augment(a, adj, &mut owner, &mut item_of, &mut visited, stamp) {
            return None;
        }
    }
    Some(item_of)
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    owner: &mut [usize],
    item_of: &mut [usize],
    visited: &mut [u32],
    stamp: u32,
) -> bool {
    // Iterative DFS; stack holds (agent, next adjacency index).
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    let mut via: Vec<usize> = Vec::new();
    while let Some(&mut (agent, ref mut idx)) = stack.last_mut() {
        if *idx >= adj[agent].len() {
            stack.pop();
            via.pop();
            continue;
        }
        let item = adj[agent][*idx];
        *idx += 1;
        if visited[item] == stamp {
            continue;
        }
        visited[item] = stamp;
        via.push(item);
        if owner[item] == NONE {
            // Flip the path.
            for (k, &(ag, _)) in stack.iter().enumerate() {
                let it = via[k];
                owner[it] = ag;
                item_of[ag] = it;
            }
            return true;
        }
        stack.push((owner[item], 0));
    }
    false
}

/// Lexicographically smallest perfect matching (smallest item for agent 0,
/// then agent 1, ...), or `None` if the graph has no perfect matching.
///
/// `start` may supply any perfect matching of the graph to skip the search.
pub fn lex_smallest_perfect(adj: &[Vec<usize>], start: Option<Vec<usize>>) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut item_of = match start {
        Some(m) => m,
        None => find_perfect(adj)?,
    };
    let mut owner = vec![NONE; n];
    for (a, &i) in item_of.iter().enumerate() {
        owner[i] = a;
    }
    // Reverse adjacency: item -> agents.
    let mut radj = vec![Vec::new(); n];
    for (a, items) in adj.iter().enumerate() {
        for &i in items {
            radj[i].push(a);
        }
    }
    // next_item[b]: the item agent b moves to on its way toward the target.
    let mut next_item = vec![NONE; n];
    let mut mark = vec![0u32; n];
    let mut queue = VecDeque::new();
    for a in 0..n {
        let cur = item_of[a];
        if adj[a].first().is_none_or(|&i| i >= cur) {
            continue;
        }
        let stamp = a as u32 + 1;
        // Agents < a are locked; a itself gives up `cur`.
        queue.clear();
        for &b in &radj[cur] {
            if b > a && mark[b] != stamp {
                mark[b] = stamp;
                next_item[b] = cur;
                queue.push_back(b);
            }
        }
        while let Some(b) = queue.pop_front() {
            let held = item_of[b];
            for &c in &radj[held] {
                if c > a && mark[c] != stamp {
                    mark[c] = stamp;
                    next_item[c] = held;
                    queue.push_back(c);
                }
            }
        }
        let best = adj[a]
            .iter()
            .take_while(|&&i| i < cur)
            .find(|&&i| owner[i] > a && mark[owner[i]] == stamp);
        if let Some(&i) = best {
            let mut chain = Vec::new();
            let mut b = owner[i];
            loop {
                chain.push(b);
                let j = next_item[b];
                if j == cur {
                    break;
                }
                b = owner[j];
            }
            item_of[a] = i;
            owner[i] = a;
            for b in chain {
                let j = next_item[b];
                item_of[b] = j;
                owner[j] = b;
            }
        }
    }
    Some(item_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_perfect_or_none() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = find_perfect(&adj).unwrap();
        assert_eq!(m, vec![1, 0, 2]);
        let bad = vec![vec![0], vec![0], vec![1, 2]];
        assert!(find_perfect(&bad).is_none());
    }

    #[test]
    fn lex_smallest_matches_enumeration() {
        use crate::perm::for_each_permutation;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
                .collect();
            let mut best: Option<Vec<usize>> = None;
            for_each_permutation(n, |p| {
                if (0..n).all(|a| adj[a].contains(&p[a]))
                    && best.as_ref().is_none_or(|b| p < b.as_slice())
                {
                    best = Some(p.to_vec());
                }
            });
            assert_eq!(lex_smallest_perfect(&adj, None), best, "adj = {adj:?}");
        }
    }
}
