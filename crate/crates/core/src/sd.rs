use crate::error::Result;
use crate::matching::Matching;
use crate::profile::{check_permutation, PreferenceProfile};

/// Agents arrive in `order`; each takes its best item not yet taken.
///
/// `order[t]` is the agent arriving at position `t` (0-based).
pub fn serial_dictatorship(profile: &PreferenceProfile, order: &[usize]) -> Result<Matching> {
    check_permutation(order, profile.n())?;
    let mut taken = vec![false; profile.n()];
    let mut out = vec![0usize; profile.n()];
    run_into(profile, order, &mut taken, &mut out);
    Ok(Matching::from_assignment_unchecked(
        profile.n(),
        out.into_iter().map(Some).collect(),
    ))
}

/// Allocation-free serial dictatorship for hot loops. `taken` is reset here;
/// `out[a]` receives agent `a`'s item.
pub(crate) fn run_into(
    profile: &PreferenceProfile,
    order: &[usize],
    taken: &mut [bool],
    out: &mut [usize],
) {
    taken.iter_mut().for_each(|t| *t = false);
    for &agent in order {
        let item = *profile
            .list(agent)
            .iter()
            .find(|&&i| !taken[i])
            .expect("complete lists always leave an item");
        taken[item] = true;
        out[agent] = item;
    }
}
