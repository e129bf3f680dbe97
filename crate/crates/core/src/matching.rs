use serde::Serialize;

use crate::error::{Error, Result};

/// Partial injective map from agents to items.
///
/// `assignment[a]` is the item held by agent `a`, if any. The item universe
/// has `items` elements, which equals the agent count for complete profiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Matching {
    items: usize,
    assignment: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(items: usize, assignment: Vec<Option<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; items];
        for (agent, slot) in assignment.iter().enumerate() {
            if let Some(item) = *slot {
                if item >= items {
                    return Err(Error::OutOfRange { id: item, size: items });
                }
                if owner[item] != usize::MAX {
                    return Err(Error::NonInjective {
                        item,
                        first: owner[item],
                        second: agent,
                    });
                }
                owner[item] = agent;
            }
        }
        Ok(Matching { items, assignment })
    }

    /// Perfect matching from `agent -> item` for every agent.
    pub fn from_items(items: Vec<usize>) -> Result<Self> {
        let n = items.len();
        Matching::new(n, items.into_iter().map(Some).collect())
    }

    /// From `(agent, item)` pairs over `agents` agents and `items` items.
    pub fn from_pairs(agents: usize, items: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut assignment = vec![None; agents];
        for &(agent, item) in pairs {
            if agent >= agents {
                return Err(Error::OutOfRange { id: agent, size: agents });
            }
            if let Some(prev) = assignment[agent] {
                if prev != item {
                    return Err(Error::Domain(format!("agent {agent} assigned twice")));
                }
            }
            assignment[agent] = Some(item);
        }
        Matching::new(items, assignment)
    }

    pub fn empty(agents: usize, items: usize) -> Self {
        Matching {
            items,
            assignment: vec![None; agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn get(&self, agent: usize) -> Option<usize> {
        self.assignment[agent]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn size(&self) -> usize {
        self.assignment.iter().flatten().count()
    }

    pub fn is_perfect(&self) -> bool {
        self.items == self.agents() && self.size() == self.agents()
    }

    /// `(agent, item)` pairs in agent order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(a, slot)| slot.map(|i| (a, i)))
    }

    /// Item for every agent; panics if the matching is not perfect.
    pub fn as_permutation(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .map(|slot| slot.expect("perfect matching"))
            .collect()
    }

    pub(crate) fn from_assignment_unchecked(items: usize, assignment: Vec<Option<usize>>) -> Self {
        debug_assert!(Matching::new(items, assignment.clone()).is_ok());
        Matching { items, assignment }
    }

    pub(crate) fn require_perfect(&self, n: usize) -> Result<()> {
        if self.agents() == n && self.items == n && self.is_perfect() {
            Ok(())
        } else {
            Err(Error::NotPerfect { n })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shared_item() {
        // Instance 2: {1->b, 2->c, 3->c}
        let err = Matching::from_items(vec![1, 2, 2]).unwrap_err();
        assert_eq!(err, Error::NonInjective { item: 2, first: 1, second: 2 });
    }

    #[test]
    fn partial_and_perfect() {
        let m = Matching::from_pairs(3, 2, &[(0, 1), (2, 0)]).unwrap();
        assert_eq!(m.size(), 2);
        assert!(!m.is_perfect());
        assert_eq!(m.get(1), None);
        assert!(Matching::from_items(vec![2, 0, 1]).unwrap().is_perfect());
    }

    #[test]
    fn out_of_range_item() {
        assert!(matches!(
            Matching::from_pairs(2, 2, &[(0, 5)]).unwrap_err(),
            Error::OutOfRange { id: 5, size: 2 }
        ));
    }
}
