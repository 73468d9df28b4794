use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative mass {value:e} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("unsupported Toscani order {0}; only 1 and 2 are supported")]
    UnsupportedOrder(u32),
    #[error("empty vector")]
    EmptyVector,
    #[error("could not generate an equal-mean pair after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("means differ: {mean_a} vs {mean_b}")]
    UnequalMeans { mean_a: f64, mean_b: f64 },
    #[error("D2 = {d2:e} vanishes while W2 = {w2:e} does not")]
    DegenerateDistance { d2: f64, w2: f64 },
    #[error("mass leak {defect:e} at t = {t}")]
    MassLeak { t: f64, defect: f64 },
    #[error("negative probability {value:e} at index {index}, t = {t}")]
    NegativeProbability { t: f64, index: usize, value: f64 },
    #[error("mean drifted by {drift:e} at t = {t}")]
    MeanDrift { t: f64, drift: f64 },
    #[error("need at least {needed} usable samples in window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("metric value {value:e} at t = {t} is below the fitting floor")]
    MetricUnderflow { t: f64, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
