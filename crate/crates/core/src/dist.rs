//! Finitely supported probability distributions on `{0, 1, …, K}`.

use std::path::Path;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, horner};

/// A probability vector indexed by `n = 0, 1, …, K`.
///
/// Entries are non-negative and sum to one within [`TOLERANCES.normalization`].
/// Trailing zeros carry no meaning: two distributions compare equal when their
/// zero-padded vectors agree entrywise.
#[derive(Debug, Clone)]
pub struct DiscreteDist {
    probs: Vec<f64>,
    renormalization: f64,
}

impl DiscreteDist {
    /// Validates `probs` and builds a distribution.
    ///
    /// Entries smaller than `1e-15` in magnitude, and negative entries no
    /// smaller than `-1e-12`, are stored as zero. Mass is never silently
    /// renormalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        if probs.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *p < -TOLERANCES.negative_mass {
                return Err(Error::NegativeMass { index, value: *p });
            }
            if *p < 0.0 || p.abs() < TOLERANCES.clamp_zero {
                *p = 0.0;
            }
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - 1.0).abs() > TOLERANCES.normalization {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probs, renormalization: 0.0 })
    }

    /// Point mass at `k`.
    pub fn dirac(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self { probs, renormalization: 0.0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest stored index `K`.
    pub fn support_bound(&self) -> usize {
        self.probs.len() - 1
    }

    /// Mass at `n`, zero beyond the stored range.
    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Relative size of the rescaling applied when the distribution was built
    /// from a truncated series (zero for user-supplied vectors).
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    /// `Σ n^r f_n`, with `0^0 = 1`.
    pub fn moment(&self, r: f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, &p)| power(n, r) * p)
            .sum()
    }

    /// Same as [`moment`](Self::moment) but with compensated summation.
    pub fn moment_compensated(&self, r: f64) -> f64 {
        compensated_sum(self.probs.iter().enumerate().map(|(n, &p)| power(n, r) * p))
    }

    pub fn cdf(&self) -> CdfVector {
        let mut acc = 0.0;
        let values = self
            .probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        CdfVector { values }
    }

    /// Probability generating function `Σ z^n f_n` for `z ∈ [0, 1]`.
    pub fn pgf(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("pgf argument {z} outside [0, 1]")));
        }
        Ok(horner(&self.probs, z))
    }

    /// Probability vector zero-padded (never truncated) to length `len`.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.probs.clone();
        if v.len() < len {
            v.resize(len, 0.0);
        }
        v
    }

    pub fn total_variation(&self, other: &DiscreteDist) -> f64 {
        let len = self.probs.len().max(other.probs.len());
        0.5 * (0..len).map(|n| (self.get(n) - other.get(n)).abs()).sum::<f64>()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DistFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(file.probs)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&DistFile { probs: self.probs.clone() })
            .expect("a vector of floats always serializes")
    }
}

impl PartialEq for DiscreteDist {
    fn eq(&self, other: &Self) -> bool {
        let len = self.probs.len().max(other.probs.len());
        (0..len).all(|n| self.get(n) == other.get(n))
    }
}

/// On-disk form: `{"probs": [p0, p1, …]}`.
#[derive(Debug, Serialize, Deserialize)]
struct DistFile {
    probs: Vec<f64>,
}

fn power(n: usize, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        (n as f64).powf(r)
    }
}

/// Running sums `F_n = Σ_{k ≤ n} f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfVector {
    values: Vec<f64>,
}

impl CdfVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `F_n`, equal to the final value beyond the stored range.
    pub fn get(&self, n: usize) -> f64 {
        match self.values.get(n) {
            Some(&v) => v,
            None => *self.values.last().expect("cdf is never empty"),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Truncated Poisson law with mean `mu`.
///
/// The truncation index is the first `n` past the mode at which a geometric
/// bound on the omitted tail drops below `tail_tol`. The retained mass is
/// rescaled to one and the relative rescaling is kept in
/// [`DiscreteDist::renormalization`].
pub fn poisson_dist(mu: f64, tail_tol: f64) -> Result<DiscreteDist> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("Poisson mean must be positive, got {mu}")));
    }
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain(format!("tail tolerance must lie in (0, 1e-6], got {tail_tol}")));
    }
    let ln_mu = mu.ln();
    let mut log_p = -mu;
    let mut probs = vec![log_p.exp()];
    let mut n = 0usize;
    loop {
        let next_log = log_p + ln_mu - ((n + 1) as f64).ln();
        let ratio = mu / (n + 2) as f64;
        if ratio < 1.0 && next_log.exp() / (1.0 - ratio) < tail_tol {
            break;
        }
        log_p = next_log;
        probs.push(log_p.exp());
        n += 1;
    }
    let kept = compensated_sum(probs.iter().copied());
    for p in &mut probs {
        *p /= kept;
    }
    let mut dist = DiscreteDist::new(probs)?;
    dist.renormalization = 1.0 - kept;
    Ok(dist)
}

/// Uniform random point of the simplex on `{0, …, K}`.
pub fn random_dist<R: Rng + ?Sized>(support_bound: usize, rng: &mut R) -> DiscreteDist {
    let draws: Vec<f64> = (0..=support_bound).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    let probs = draws.into_iter().map(|x| x / total).collect();
    DiscreteDist::new(probs).expect("normalized exponential draws form a distribution")
}

const EQUAL_MEAN_ATTEMPTS: usize = 100;

/// Draws `f` and `g` from [`random_dist`], then moves mass within `g` between a
/// single index pair so that both means coincide.
pub fn random_equal_mean_pair<R: Rng + ?Sized>(
    support_bound: usize,
    rng: &mut R,
) -> Result<(DiscreteDist, DiscreteDist)> {
    if support_bound < 2 {
        return Err(Error::Domain(format!("support bound must be at least 2, got {support_bound}")));
    }
    for _ in 0..EQUAL_MEAN_ATTEMPTS {
        let f = random_dist(support_bound, rng);
        let g = random_dist(support_bound, rng);
        if let Some(g) = match_mean(&f, g, rng) {
            return Ok((f, g));
        }
    }
    Err(Error::GenerationFailed { attempts: EQUAL_MEAN_ATTEMPTS })
}

fn match_mean<R: Rng + ?Sized>(f: &DiscreteDist, g: DiscreteDist, rng: &mut R) -> Option<DiscreteDist> {
    let target = f.mean_compensated();
    let gap = target - g.mean_compensated();
    let k = g.support_bound();
    // Moving mass m from i to j (i < j) raises the mean by m (j - i).
    let feasible: Vec<(usize, usize, f64)> = (0..k)
        .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let m = gap.abs() / (j - i) as f64;
            let donor = if gap >= 0.0 { g.get(i) } else { g.get(j) };
            (m < donor).then_some((i, j, m))
        })
        .collect();
    if feasible.is_empty() {
        return None;
    }
    let (i, j, m) = feasible[rng.gen_range(0..feasible.len())];
    let mut probs = g.probs;
    if gap >= 0.0 {
        probs[i] -= m;
        probs[j] += m;
    } else {
        probs[j] -= m;
        probs[i] += m;
    }
    let g = DiscreteDist::new(probs).ok()?;
    ((g.mean_compensated() - target).abs() < TOLERANCES.generated_mean_gap).then_some(g)
}

impl DiscreteDist {
    pub(crate) fn mean_compensated(&self) -> f64 {
        self.moment_compensated(1.0)
    }
}
