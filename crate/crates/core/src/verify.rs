//! Numerical checks of the Toscani/Wasserstein comparison inequalities over
//! fixed and randomized pairs of distributions.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::TOLERANCES;
use crate::dist::{random_dist, random_equal_mean_pair, DiscreteDist};
use crate::error::{Error, Result};
use crate::metrics::{toscani_distance, Order};
use crate::transport::{wasserstein1_cdf, wasserstein_p};

/// `D_2` at or below this value is treated as zero by the part-3 ratio study.
pub const DEGENERATE_D2: f64 = 1e-14;
/// `W_2` above this value alongside a vanishing `D_2` is a contradiction.
pub const DEGENERATE_W2: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Inequality {
    /// `D_1 ≤ W_1`.
    Part1,
    /// `D_2 ≤ ½ W_2² + min(m_2(f), m_2(g))^{1/2} W_2` for equal means.
    Part2,
    /// `W_2² ≤ C D_2^{α/(1+α)}` on a compact support, studied as a ratio.
    Part3,
    /// `W_2²` bounded by a power of `W_1` through the `(2+α)`-moment.
    W1W2,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::Part1 => "part1",
            Inequality::Part2 => "part2",
            Inequality::Part3 => "part3",
            Inequality::W1W2 => "w1w2",
        }
    }

    fn needs_equal_means(self) -> bool {
        matches!(self, Inequality::Part2 | Inequality::Part3)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "part1" => Ok(Inequality::Part1),
            "part2" => Ok(Inequality::Part2),
            "part3" => Ok(Inequality::Part3),
            "w1w2" => Ok(Inequality::W1W2),
            other => Err(Error::Parse(format!("unknown inequality '{other}'"))),
        }
    }
}

/// One evaluated instance `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: Inequality,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub inputs_digest: String,
}

impl InequalityReport {
    fn new(name: Inequality, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self { name, lhs, rhs, slack, satisfied: slack >= TOLERANCES.violation_slack, inputs_digest: String::new() }
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.inputs_digest = digest.into();
        self
    }
}

fn require_equal_means(f: &DiscreteDist, g: &DiscreteDist) -> Result<()> {
    let (mean_a, mean_b) = (f.mean(), g.mean());
    if (mean_a - mean_b).abs() >= TOLERANCES.equal_mean {
        return Err(Error::UnequalMeans { mean_a, mean_b });
    }
    Ok(())
}

pub fn check_part1(f: &DiscreteDist, g: &DiscreteDist) -> InequalityReport {
    let d1 = toscani_distance(f, g, Order::One).value;
    InequalityReport::new(Inequality::Part1, d1, wasserstein1_cdf(f, g))
}

pub fn check_part2(f: &DiscreteDist, g: &DiscreteDist) -> Result<InequalityReport> {
    require_equal_means(f, g)?;
    let d2 = toscani_distance(f, g, Order::Two).value;
    let w2 = wasserstein_p(f, g, 2.0);
    let m2 = f.moment(2.0).min(g.moment(2.0));
    Ok(InequalityReport::new(Inequality::Part2, d2, 0.5 * w2 * w2 + m2.sqrt() * w2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Part3Record {
    pub w2_squared: f64,
    pub d2_power: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Part3Outcome {
    Ratio(Part3Record),
    /// Both sides vanish; the ratio is undefined.
    Skipped,
}

/// `W_2²`, `D_2^{α/(1+α)}` and their quotient, an empirical witness for the
/// constant of the compact-support bound.
pub fn check_part3(f: &DiscreteDist, g: &DiscreteDist, alpha: f64) -> Result<Part3Outcome> {
    check_alpha(alpha)?;
    require_equal_means(f, g)?;
    let d2 = toscani_distance(f, g, Order::Two).value;
    let w2 = wasserstein_p(f, g, 2.0);
    if !d2.is_finite() || d2 <= DEGENERATE_D2 {
        if w2 > DEGENERATE_W2 {
            return Err(Error::DegenerateDistance { d2, w2 });
        }
        return Ok(Part3Outcome::Skipped);
    }
    let w2_squared = w2 * w2;
    let d2_power = d2.powf(alpha / (1.0 + alpha));
    Ok(Part3Outcome::Ratio(Part3Record { w2_squared, d2_power, ratio: w2_squared / d2_power }))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// Right-hand side of the `W_1 → W_2` interpolation bound.
pub fn w1w2_bound(w1: f64, moment: f64, alpha: f64) -> f64 {
    let a1 = 1.0 + alpha;
    2f64.powf((2.0 + alpha) / a1)
        * (alpha.powf(1.0 / a1) + alpha.powf(-alpha / a1))
        * moment.powf(1.0 / a1)
        * w1.powf(alpha / a1)
}

pub fn check_w1w2_interpolation(f: &DiscreteDist, g: &DiscreteDist, alpha: f64) -> Result<InequalityReport> {
    check_alpha(alpha)?;
    let w2 = wasserstein_p(f, g, 2.0);
    let m = f.moment(2.0 + alpha).max(g.moment(2.0 + alpha));
    let rhs = w1w2_bound(wasserstein1_cdf(f, g), m, alpha);
    Ok(InequalityReport::new(Inequality::W1W2, w2 * w2, rhs))
}

/// Aggregate of a randomized sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub name: Inequality,
    pub trials: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen; absent for the part-3 ratio study.
    pub min_slack: Option<f64>,
    /// Trial index of the worst case (smallest slack, or largest part-3 ratio).
    pub worst_case_trial: Option<usize>,
    /// Seed that regenerates the worst-case pair.
    pub worst_case_seed: Option<u64>,
    pub seed: u64,
    pub support: usize,
    pub alpha: Option<f64>,
    /// Part 3 only: trials where both sides vanished.
    pub skipped: usize,
    /// Part 3 only: largest `W_2² / D_2^{α/(1+α)}`.
    pub max_ratio: Option<f64>,
    /// Wall-clock time; not part of the deterministic content.
    #[serde(skip)]
    pub elapsed_sec: f64,
}

impl SweepReport {
    /// True when two reports agree in everything but timing.
    pub fn same_content(&self, other: &SweepReport) -> bool {
        let mut a = self.clone();
        a.elapsed_sec = other.elapsed_sec;
        a == *other
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub which: Inequality,
    pub trials: usize,
    pub support: usize,
    pub alpha: Option<f64>,
    pub seed: u64,
}

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Per-trial generator: master seed plus trial index.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Draws the pair used by trial `trial` of a sweep.
pub fn trial_pair(which: Inequality, support: usize, seed: u64, trial: usize) -> Result<(DiscreteDist, DiscreteDist)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
    if which.needs_equal_means() {
        random_equal_mean_pair(support, &mut rng)
    } else {
        let f = random_dist(support, &mut rng);
        let g = random_dist(support, &mut rng);
        Ok((f, g))
    }
}

enum TrialOutcome {
    Report(InequalityReport),
    Ratio(f64),
    Skipped,
    Degenerate,
}

fn run_trial(cfg: &SweepConfig, alpha: f64, trial: usize) -> Result<TrialOutcome> {
    let (f, g) = trial_pair(cfg.which, cfg.support, cfg.seed, trial)?;
    let digest = format!("seed={};trial={}", trial_seed(cfg.seed, trial), trial);
    Ok(match cfg.which {
        Inequality::Part1 => TrialOutcome::Report(check_part1(&f, &g).with_digest(digest)),
        Inequality::Part2 => TrialOutcome::Report(check_part2(&f, &g)?.with_digest(digest)),
        Inequality::W1W2 => TrialOutcome::Report(check_w1w2_interpolation(&f, &g, alpha)?.with_digest(digest)),
        Inequality::Part3 => match check_part3(&f, &g, alpha) {
            Ok(Part3Outcome::Ratio(r)) => TrialOutcome::Ratio(r.ratio),
            Ok(Part3Outcome::Skipped) => TrialOutcome::Skipped,
            Err(Error::DegenerateDistance { .. }) => TrialOutcome::Degenerate,
            Err(e) => return Err(e),
        },
    })
}

/// Runs `cfg.trials` randomized instances of `cfg.which` in parallel.
///
/// Each trial owns a generator seeded from the master seed and its index, and
/// outcomes are folded in trial order, so the report does not depend on
/// scheduling. A part-3 pair with vanishing `D_2` but positive `W_2` counts
/// as a violation.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.trials == 0 {
        return Err(Error::Domain("a sweep needs at least one trial".into()));
    }
    let alpha = match cfg.which {
        Inequality::Part3 | Inequality::W1W2 => {
            let a = cfg.alpha.unwrap_or(DEFAULT_ALPHA);
            check_alpha(a)?;
            Some(a)
        }
        _ => None,
    };
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, alpha.unwrap_or(DEFAULT_ALPHA), t))
        .collect::<Result<_>>()?;

    let mut report = SweepReport {
        name: cfg.which,
        trials: cfg.trials,
        violations: 0,
        min_slack: None,
        worst_case_trial: None,
        worst_case_seed: None,
        seed: cfg.seed,
        support: cfg.support,
        alpha,
        skipped: 0,
        max_ratio: None,
        elapsed_sec: 0.0,
    };
    let mut worst = None;
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            TrialOutcome::Report(r) => {
                if !r.satisfied {
                    report.violations += 1;
                }
                if report.min_slack.is_none_or(|m| r.slack < m) {
                    report.min_slack = Some(r.slack);
                    worst = Some(trial);
                }
            }
            TrialOutcome::Ratio(ratio) => {
                if report.max_ratio.is_none_or(|m| ratio > m) {
                    report.max_ratio = Some(ratio);
                    worst = Some(trial);
                }
            }
            TrialOutcome::Skipped => report.skipped += 1,
            TrialOutcome::Degenerate => {
                report.violations += 1;
                worst = Some(trial);
            }
        }
    }
    report.worst_case_trial = worst;
    report.worst_case_seed = worst.map(|t| trial_seed(cfg.seed, t));
    report.elapsed_sec = start.elapsed().as_secs_f64();
    Ok(report)
}
