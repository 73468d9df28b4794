//! Fixed-step RK4 integration of `dp/dt = Q[p]` with distances to the
//! Poisson equilibrium sampled along the way.

use serde::Serialize;

use crate::dist::{poisson_dist, DiscreteDist};
use crate::error::{Error, Result};
use crate::metrics::{toscani_distance, Order};
use crate::transport::{wasserstein1_cdf, wasserstein_p};

use super::collision::CollisionKernel;

pub const MASS_LEAK_LIMIT: f64 = 1e-6;
pub const MEAN_DRIFT_LIMIT: f64 = 1e-6;
pub const NEGATIVE_LIMIT: f64 = -1e-10;
const EQUILIBRIUM_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeConfig {
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: f64,
    /// Lower bound on the truncation index; the default rule still applies.
    pub n_max: Option<usize>,
}

impl OdeConfig {
    pub fn new(mu: f64) -> Self {
        Self { mu, dt: 0.02, t_end: 30.0, sample_every: 0.1, n_max: None }
    }

    /// Stable text form used for reproducibility digests.
    pub fn canonical(&self) -> String {
        format!(
            "mu={:?};dt={:?};t_end={:?};sample_every={:?};n_max={:?}",
            self.mu, self.dt, self.t_end, self.sample_every, self.n_max
        )
    }
}

/// Law `p(t)` on `{0, …, n_max}` with its conservation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub p: Vec<f64>,
    pub t: f64,
    pub mass_defect: f64,
    pub mean: f64,
}

impl MeanFieldState {
    fn new(p: Vec<f64>, t: f64) -> Self {
        let mass: f64 = p.iter().sum();
        let mean = p.iter().enumerate().map(|(n, v)| n as f64 * v).sum();
        Self { p, t, mass_defect: (1.0 - mass).abs(), mean }
    }

    /// The state as a distribution. Rounding negatives are dropped and the
    /// vector rescaled to unit mass; the defect stays recorded on `self`.
    pub fn to_dist(&self) -> DiscreteDist {
        let clipped: Vec<f64> = self.p.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        DiscreteDist::new(clipped.into_iter().map(|v| v / total).collect())
            .expect("rescaled non-negative vector is a distribution")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub d2: f64,
    pub w1: f64,
    pub w2: f64,
    pub mass_defect: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Canonical text of the run configuration and initial law.
    pub config_digest: String,
    pub n_max: usize,
    pub final_state: Option<MeanFieldState>,
}

/// Truncation index: the larger of `4μ + 40`, the Poisson(μ) `1e-12` tail
/// point, the initial support and any user override.
pub fn truncation_index(mu: f64, initial_support: usize, user: Option<usize>) -> Result<usize> {
    let poisson_tail = poisson_dist(mu, EQUILIBRIUM_TAIL)?.support_bound();
    let rule = (4.0 * mu).ceil() as usize + 40;
    Ok(rule.max(poisson_tail).max(initial_support).max(user.unwrap_or(0)))
}

fn sample(state: &MeanFieldState, equilibrium: &DiscreteDist) -> TrajectorySample {
    let p = state.to_dist();
    TrajectorySample {
        t: state.t,
        d2: toscani_distance(&p, equilibrium, Order::Two).value,
        w1: wasserstein1_cdf(&p, equilibrium),
        w2: wasserstein_p(&p, equilibrium, 2.0),
        mass_defect: state.mass_defect,
        mean: state.mean,
    }
}

fn check_state(state: &MeanFieldState, mu: f64) -> Result<()> {
    if state.mass_defect > MASS_LEAK_LIMIT {
        return Err(Error::MassLeak { t: state.t, defect: state.mass_defect });
    }
    if let Some((index, &value)) = state.p.iter().enumerate().find(|(_, &v)| v < NEGATIVE_LIMIT) {
        return Err(Error::NegativeProbability { t: state.t, index, value });
    }
    let drift = (state.mean - mu).abs();
    if drift > MEAN_DRIFT_LIMIT {
        return Err(Error::MeanDrift { t: state.t, drift });
    }
    Ok(())
}

struct Rk4 {
    kernel: CollisionKernel,
    k: [Vec<f64>; 4],
    scratch: Vec<f64>,
}

impl Rk4 {
    fn new(kernel: CollisionKernel) -> Self {
        let len = kernel.n_max() + 1;
        Self { kernel, k: std::array::from_fn(|_| vec![0.0; len]), scratch: vec![0.0; len] }
    }

    fn step(&mut self, p: &mut [f64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        self.kernel.apply(p, k1);
        for ((s, &x), &d) in self.scratch.iter_mut().zip(p.iter()).zip(k1.iter()) {
            *s = x + 0.5 * dt * d;
        }
        self.kernel.apply(&self.scratch, k2);
        for ((s, &x), &d) in self.scratch.iter_mut().zip(p.iter()).zip(k2.iter()) {
            *s = x + 0.5 * dt * d;
        }
        self.kernel.apply(&self.scratch, k3);
        for ((s, &x), &d) in self.scratch.iter_mut().zip(p.iter()).zip(k3.iter()) {
            *s = x + dt * d;
        }
        self.kernel.apply(&self.scratch, k4);
        for (n, x) in p.iter_mut().enumerate() {
            *x += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
    }
}

/// Integrates the mean-field dynamics from `p0` and records `D_2`, `W_1`,
/// `W_2` to the truncated Poisson(μ) law every `sample_every` time units
/// (rounded to a whole number of steps), starting at `t = 0`.
///
/// Aborts on mass leak beyond `1e-6`, any entry below `-1e-10`, or mean
/// drift beyond `1e-6`.
pub fn integrate_ode(p0: &DiscreteDist, cfg: &OdeConfig) -> Result<Trajectory> {
    if !(cfg.mu > 0.0 && cfg.mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be positive, got {}", cfg.mu)));
    }
    if !(cfg.dt > 0.0 && cfg.dt <= 0.1) {
        return Err(Error::Domain(format!("dt must lie in (0, 0.1], got {}", cfg.dt)));
    }
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end must be non-negative, got {}", cfg.t_end)));
    }
    if cfg.sample_every.is_nan() || cfg.sample_every <= 0.0 {
        return Err(Error::Domain(format!("sample interval must be positive, got {}", cfg.sample_every)));
    }
    let mean0 = p0.mean();
    if (mean0 - cfg.mu).abs() > 1e-9 {
        return Err(Error::UnequalMeans { mean_a: mean0, mean_b: cfg.mu });
    }

    let n_max = truncation_index(cfg.mu, p0.support_bound(), cfg.n_max)?;
    let equilibrium = poisson_dist(cfg.mu, EQUILIBRIUM_TAIL)?;
    let mut rk = Rk4::new(CollisionKernel::new(n_max));
    let mut p = p0.padded(n_max + 1);

    let total_steps = (cfg.t_end / cfg.dt).round() as usize;
    let stride = ((cfg.sample_every / cfg.dt).round() as usize).max(1);

    let mut state = MeanFieldState::new(p.clone(), 0.0);
    let mut samples = vec![sample(&state, &equilibrium)];
    for step in 1..=total_steps {
        rk.step(&mut p, cfg.dt);
        let t = step as f64 * cfg.dt;
        state = MeanFieldState::new(p.clone(), t);
        check_state(&state, cfg.mu)?;
        if step % stride == 0 || step == total_steps {
            samples.push(sample(&state, &equilibrium));
        }
    }
    Ok(Trajectory {
        samples,
        config_digest: format!("{};n_max={n_max};p0={:?}", cfg.canonical(), p0.probs()),
        n_max,
        final_state: Some(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mean_mismatch_and_bad_step() {
        let p0 = DiscreteDist::dirac(3);
        assert!(matches!(integrate_ode(&p0, &OdeConfig::new(2.0)), Err(Error::UnequalMeans { .. })));
        let mut cfg = OdeConfig::new(3.0);
        cfg.dt = 0.2;
        assert!(matches!(integrate_ode(&p0, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(truncation_index(5.0, 5, None).unwrap(), 60);
        assert_eq!(truncation_index(5.0, 80, None).unwrap(), 80);
        assert_eq!(truncation_index(5.0, 5, Some(100)).unwrap(), 100);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p0 = poisson_dist(2.0, 1e-12).unwrap();
        let mut cfg = OdeConfig::new(p0.mean());
        cfg.t_end = 2.0;
        cfg.sample_every = 0.5;
        let traj = integrate_ode(&p0, &cfg).unwrap();
        assert_eq!(traj.samples.len(), 5);
        for s in &traj.samples {
            assert!(s.d2 < 1e-8, "t={} d2={:e}", s.t, s.d2);
        }
    }

    #[test]
    fn point_mass_relaxes() {
        let p0 = DiscreteDist::dirac(5);
        let mut cfg = OdeConfig::new(5.0);
        cfg.t_end = 10.0;
        cfg.sample_every = 1.0;
        let traj = integrate_ode(&p0, &cfg).unwrap();
        let at = |t: f64| traj.samples.iter().find(|s| (s.t - t).abs() < 1e-9).unwrap();
        assert!(at(10.0).d2 < at(1.0).d2);
        for s in &traj.samples {
            assert!(s.mass_defect < 1e-6);
            assert!((s.mean - 5.0).abs() < 1e-6);
        }
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn guards_report_time_and_magnitude() {
        let leak = MeanFieldState::new(vec![0.5, 0.4999], 3.0);
        assert!(matches!(check_state(&leak, 0.5), Err(Error::MassLeak { t, .. }) if t == 3.0));
        let negative = MeanFieldState::new(vec![1.0 + 1e-9, -1e-9], 1.5);
        assert!(matches!(
            check_state(&negative, 0.0),
            Err(Error::NegativeProbability { index: 1, .. })
        ));
        let drift = MeanFieldState::new(vec![0.0, 1.0], 0.5);
        assert!(matches!(check_state(&drift, 0.9), Err(Error::MeanDrift { .. })));
        assert!(check_state(&drift, 1.0).is_ok());
    }
}
