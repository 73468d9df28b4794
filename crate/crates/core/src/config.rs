//! Numerical tolerances shared across the crate.

/// Tolerance record. All comparison thresholds used by the library live here
/// so that tests and harnesses agree on what "equal" means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of a distribution's total mass from 1.
    pub normalization: f64,
    /// Entries more negative than this are rejected.
    pub negative_mass: f64,
    /// Entries smaller than this in magnitude are stored as exact zeros.
    pub clamp_zero: f64,
    /// Mean gap under which two distributions count as having equal means.
    pub equal_mean: f64,
    /// Mean gap produced by the equal-mean pair generator.
    pub generated_mean_gap: f64,
    /// Slack below which an inequality instance counts as violated.
    pub violation_slack: f64,
    /// Golden-section stopping width on `[0, 1]`.
    pub refine_abs: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-9,
    negative_mass: 1e-12,
    clamp_zero: 1e-15,
    equal_mean: 1e-9,
    generated_mean_gap: 1e-12,
    violation_slack: -1e-9,
    refine_abs: 1e-12,
};

/// Default number of grid cells used to locate the supremum of a polynomial on `[0, 1]`.
pub const DEFAULT_GRID: usize = 2048;
