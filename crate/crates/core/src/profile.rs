use serde::Serialize;

use crate::error::{Error, Result};

/// Complete ranked preference lists of `n` agents over `n` items.
///
/// Immutable after validation. `rank[a * n + i]` caches the 1-based
/// position of item `i` in agent `a`'s list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreferenceProfile {
    n: usize,
    prefs: Vec<Vec<usize>>,
    #[serde(skip)]
    rank: Vec<u32>,
}

impl PreferenceProfile {
    /// Validates raw lists: exactly `n` agents, each list a permutation of `0..n`.
    pub fn new(n: usize, prefs: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroAgents);
        }
        if prefs.len() != n {
            return Err(Error::WrongLength {
                agent: prefs.len().min(n),
                len: prefs.len(),
                expected: n,
            });
        }
        let mut rank = vec![0u32; n * n];
        for (agent, list) in prefs.iter().enumerate() {
            if list.len() != n {
                return Err(Error::WrongLength {
                    agent,
                    len: list.len(),
                    expected: n,
                });
            }
            let row = &mut rank[agent * n..(agent + 1) * n];
            for (position, &item) in list.iter().enumerate() {
                if item >= n || row[item] != 0 {
                    return Err(Error::NotPermutation {
                        agent,
                        position,
                        item,
                    });
                }
                row[item] = position as u32 + 1;
            }
        }
        Ok(PreferenceProfile { n, prefs, rank })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn list(&self, agent: usize) -> &[usize] {
        &self.prefs[agent]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.prefs
    }

    /// 1-based position of `item` in `agent`'s list; 1 is most preferred.
    pub fn rank_of(&self, agent: usize, item: usize) -> usize {
        debug_assert!(agent < self.n && item < self.n);
        self.rank[agent * self.n + item] as usize
    }

    /// Whether `agent` weakly prefers `item` to `other`.
    pub fn weakly_prefers(&self, agent: usize, item: usize, other: usize) -> bool {
        self.rank_of(agent, item) <= self.rank_of(agent, other)
    }

    /// Same lists with agents renamed: new agent `relabel[a]` gets old agent `a`'s list.
    pub fn relabel_agents(&self, relabel: &[usize]) -> Result<Self> {
        check_permutation(relabel, self.n)?;
        let mut prefs = vec![Vec::new(); self.n];
        for (old, &new) in relabel.iter().enumerate() {
            prefs[new] = self.prefs[old].clone();
        }
        PreferenceProfile::new(self.n, prefs)
    }
}

/// Checked construction from raw lists; see [`PreferenceProfile::new`].
pub fn validate_profile(n: usize, prefs: Vec<Vec<usize>>) -> Result<PreferenceProfile> {
    PreferenceProfile::new(n, prefs)
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidOrder { n });
    }
    let mut seen = vec![false; n];
    for &x in order {
        if x >= n || seen[x] {
            return Err(Error::InvalidOrder { n });
        }
        seen[x] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance2() -> PreferenceProfile {
        PreferenceProfile::new(3, vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]).unwrap()
    }

    #[test]
    fn accepts_instance2_and_singleton() {
        instance2();
        PreferenceProfile::new(1, vec![vec![0]]).unwrap();
    }

    #[test]
    fn duplicate_entry_is_not_permutation_at_agent_0() {
        let err = PreferenceProfile::new(2, vec![vec![0, 0], vec![1, 0]]).unwrap_err();
        assert_eq!(
            err,
            Error::NotPermutation {
                agent: 0,
                position: 1,
                item: 0
            }
        );
    }

    #[test]
    fn structural_errors() {
        assert_eq!(PreferenceProfile::new(0, vec![]).unwrap_err(), Error::ZeroAgents);
        assert!(matches!(
            PreferenceProfile::new(2, vec![vec![0, 1], vec![1]]).unwrap_err(),
            Error::WrongLength { agent: 1, len: 1, expected: 2 }
        ));
        assert!(matches!(
            PreferenceProfile::new(2, vec![vec![0, 2], vec![1, 0]]).unwrap_err(),
            Error::NotPermutation { agent: 0, position: 1, item: 2 }
        ));
        assert!(matches!(
            PreferenceProfile::new(2, vec![vec![0, 1]]).unwrap_err(),
            Error::WrongLength { .. }
        ));
    }

    #[test]
    fn ranks() {
        let p = instance2();
        // Agent 3 (index 2) lists b, a, c.
        assert_eq!(p.rank_of(2, 0), 2);
        for a in 0..3 {
            assert_eq!(p.rank_of(a, p.list(a)[0]), 1);
        }
        let ident = PreferenceProfile::new(4, vec![vec![0, 1, 2, 3]; 4]).unwrap();
        for j in 0..4 {
            assert_eq!(ident.rank_of(2, j), j + 1);
        }
    }
}
