//! Binomial reshuffling: pairs of agents pool their dollars and split the pot
//! by a fair Binomial draw. Includes the mean-field ODE, its RK4 integrator and
//! the finite-population simulator.

pub mod agents;
pub mod collision;
pub mod fit;
pub mod ode;

pub use agents::{agent_replicates, agent_sim, fair_binomial, AgentState, Snapshot};
pub use collision::{collision_operator, CollisionKernel};
pub use fit::{fit_decay_rate, fit_series, DecayFit, DecayMetric};
pub use ode::{integrate_ode, MeanFieldState, OdeConfig, Trajectory, TrajectorySample};
