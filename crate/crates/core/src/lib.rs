//! Fourier-based (Toscani) metrics and Wasserstein distances for probability
//! laws on the non-negative integers, a harness that checks the inequalities
//! relating them, and the binomial reshuffling wealth-exchange model whose
//! relaxation to a Poisson law is tracked in both metric families.
//!
//! ```
//! use pgfmetric::{toscani_distance, wasserstein_p, DiscreteDist, Order};
//!
//! let f = DiscreteDist::dirac(1);
//! let g = DiscreteDist::new(vec![0.5, 0.0, 0.5]).unwrap();
//! assert!((toscani_distance(&f, &g, Order::Two).value - 0.5).abs() < 1e-12);
//! assert_eq!(wasserstein_p(&f, &g, 2.0), 1.0);
//! ```

pub mod config;
pub mod dist;
pub mod error;
pub mod metrics;
pub mod numeric;
pub mod reshuffle;
pub mod transport;
pub mod verify;

pub use dist::{poisson_dist, random_dist, random_equal_mean_pair, CdfVector, DiscreteDist};
pub use error::{Error, Result};
pub use metrics::{ell_norm, estimate_norm_constant, toscani_distance, toscani_profile, Order, ToscaniResult};
pub use transport::{monotone_coupling, random_feasible_coupling, wasserstein1_cdf, wasserstein_p, Coupling, PlanEntry};
pub use verify::{check_part1, check_part2, check_part3, check_w1w2_interpolation, sweep, Inequality, SweepConfig, SweepReport};
