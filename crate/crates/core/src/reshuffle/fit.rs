//! Least-squares decay fits on trajectory metrics.

use serde::Serialize;

use crate::error::{Error, Result};

use super::ode::Trajectory;

/// Values at or below this are too small to take logarithms of reliably.
pub const FIT_FLOOR: f64 = 1e-13;
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecayMetric {
    /// Exponential model: `log D_2` against `t`.
    D2,
    /// Power-law model: `log W_2` against `log t`.
    W2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// `−slope` for `D2` (positive for decay); the slope itself (the power
    /// exponent) for `W2`.
    pub rate: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, r²)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r_squared)
}

/// Fits a decay law to `(t, value)` pairs falling in `[t_lo, t_hi]`.
pub fn fit_series(times: &[f64], values: &[f64], metric: DecayMetric, window: (f64, f64)) -> Result<DecayFit> {
    let (t_lo, t_hi) = window;
    let in_window: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= t_lo && t <= t_hi)
        .map(|(&t, &v)| (t, v))
        .collect();
    if in_window.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_FIT_SAMPLES, found: in_window.len() });
    }
    if let Some(&(t, value)) = in_window.iter().find(|(_, v)| v.is_nan() || *v <= FIT_FLOOR) {
        return Err(Error::MetricUnderflow { t, value });
    }
    if metric == DecayMetric::W2 && in_window.iter().any(|&(t, _)| t <= 0.0) {
        return Err(Error::Domain("power-law fit needs t > 0 throughout the window".into()));
    }
    let x: Vec<f64> = in_window
        .iter()
        .map(|&(t, _)| match metric {
            DecayMetric::D2 => t,
            DecayMetric::W2 => t.ln(),
        })
        .collect();
    let y: Vec<f64> = in_window.iter().map(|&(_, v)| v.ln()).collect();
    let (slope, r_squared) = linear_fit(&x, &y);
    let rate = match metric {
        DecayMetric::D2 => -slope,
        DecayMetric::W2 => slope,
    };
    Ok(DecayFit { rate, r_squared })
}

pub fn fit_decay_rate(traj: &Trajectory, metric: DecayMetric, window: (f64, f64)) -> Result<DecayFit> {
    let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let values: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| match metric {
            DecayMetric::D2 => s.d2,
            DecayMetric::W2 => s.w2,
        })
        .collect();
    fit_series(&times, &values, metric, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reshuffle::ode::TrajectorySample;

    fn synthetic(f: impl Fn(f64) -> f64) -> Trajectory {
        let samples = (1..=40)
            .map(|i| {
                let t = i as f64 * 0.25;
                let v = f(t);
                TrajectorySample { t, d2: v, w1: v, w2: v, mass_defect: 0.0, mean: 1.0 }
            })
            .collect();
        Trajectory { samples, config_digest: String::new(), n_max: 0, final_state: None }
    }

    #[test]
    fn exponential_rate() {
        let fit = fit_decay_rate(&synthetic(|t| (-3.0 * t).exp()), DecayMetric::D2, (0.0, 5.0)).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn power_law_exponent() {
        let fit = fit_decay_rate(&synthetic(|t| t.powf(-0.5)), DecayMetric::W2, (0.5, 10.0)).unwrap();
        assert!((fit.rate + 0.5).abs() < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn too_few_samples() {
        let traj = synthetic(|t| (-t).exp());
        assert!(matches!(
            fit_decay_rate(&traj, DecayMetric::D2, (0.0, 1.0)),
            Err(Error::InsufficientSamples { found: 4, .. })
        ));
    }

    #[test]
    fn underflow_is_reported() {
        let traj = synthetic(|t| (-40.0 * t).exp());
        assert!(matches!(fit_decay_rate(&traj, DecayMetric::D2, (0.0, 10.0)), Err(Error::MetricUnderflow { .. })));
    }
}
