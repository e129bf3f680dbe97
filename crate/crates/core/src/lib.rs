//! Welfare of randomized one-sided matching: Random Serial Dictatorship and
//! Probabilistic Serial, evaluated in exact rational arithmetic against
//! ordinal and linear welfare benchmarks.
//!
//! ```
//! use matchwelfare::{ps_allocate, rsd_exact, PreferenceProfile};
//!
//! let p = PreferenceProfile::new(3, vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]).unwrap();
//! let rsd = rsd_exact(&p).unwrap();
//! assert_eq!(rsd.get(0, 0).to_string(), "1/2");
//! let ps = ps_allocate(&p).matrix;
//! assert_eq!(ps.get(2, 1).to_string(), "3/4");
//! ```

pub mod allocation;
pub mod bipartite;
pub mod error;
pub mod extensions;
pub mod instances;
pub mod matching;
pub mod perm;
pub mod profile;
pub mod ps;
pub mod rational;
pub mod rng;
pub mod rsd;
pub mod sd;
pub mod stats;
pub mod welfare;

pub use allocation::{AllocationMatrix, Lottery};
pub use error::{Error, Result};
pub use matching::Matching;
pub use profile::{validate_profile, PreferenceProfile};
pub use ps::{bvn_decompose, exhaust_times, ps_allocate, ExhaustTimes, PhaseLog, PsOutcome};
pub use rational::{harmonic, Rational};
pub use rsd::{
    dead_agents_after, rsd_exact, rsd_exact_guarded, rsd_monte_carlo, rsd_trajectory_exact,
    RsdEstimate, RsdTrajectory, DEFAULT_ENUM_GUARD,
};
pub use sd::serial_dictatorship;
pub use stats::MeanEstimate;
pub use welfare::{
    expected_ordinal_welfare, linear_utility, linear_utility_matrix, optimal_linear_welfare,
    ordinal_happy_count, popularity_margin, welfare_report, WelfareReport,
};
