//! Preference models beyond complete strict lists: partial lists (agents may
//! find items unacceptable) and K-demand bundles.

pub mod bundles;
pub mod partial;

pub use bundles::{
    ordinal_happy_bundles, rsd_bundles, rsd_bundles_monte_carlo, BundleAllocation, BundleProfile,
};
pub use partial::{
    kvv_expected_matching, linear_utility_partial, optimal_partial_welfare, ordinal_happy_partial,
    rsd_partial_exact, rsd_partial_monte_carlo, sd_partial, PartialProfile, PartialRsdEstimate,
    PartialRsdExact,
};
