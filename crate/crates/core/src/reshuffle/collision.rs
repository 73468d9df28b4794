//! Mean-field collision operator of the binomial reshuffling model.
//!
//! `Q[p]_n = Σ_{k,ℓ} C(k+ℓ, n) 2^{-(k+ℓ)} p_k p_ℓ − p_n`. The double sum is
//! evaluated as the self-convolution `s = p * p` (law of the pooled wealth)
//! followed by binomial thinning `Σ_{m ≥ n} s_m C(m, n) 2^{-m}`.
//!
//! The pair `(0, 0)` returns its (empty) pool to state 0, i.e. `C(0,0) = 1`;
//! any other reading makes `δ_0` lose mass.
//!
//! The loss term is applied as `p_n Σ_k p_k`, which equals `p_n` on the
//! simplex. With a bare `p_n` the total mass obeys `M' = M² − M`, whose fixed
//! point `M = 1` is unstable, and rounding errors grow like `e^t` under
//! integration.

use crate::dist::DiscreteDist;

/// Precomputed thinning table for states `0..=n_max`.
#[derive(Debug, Clone)]
pub struct CollisionKernel {
    n_max: usize,
    /// `half_binom[m][n] = C(m, n) / 2^m` for `m ≤ 2 n_max`, `n ≤ min(m, n_max)`.
    half_binom: Vec<Vec<f64>>,
}

impl CollisionKernel {
    pub fn new(n_max: usize) -> Self {
        let rows = 2 * n_max + 1;
        let mut half_binom: Vec<Vec<f64>> = Vec::with_capacity(rows);
        half_binom.push(vec![1.0]);
        for m in 1..rows {
            let prev = &half_binom[m - 1];
            let width = (m + 1).min(n_max + 1);
            let row = (0..width)
                .map(|n| {
                    let left = if n > 0 { prev.get(n - 1).copied().unwrap_or(0.0) } else { 0.0 };
                    let right = prev.get(n).copied().unwrap_or(0.0);
                    0.5 * (left + right)
                })
                .collect();
            half_binom.push(row);
        }
        Self { n_max, half_binom }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Writes `Q[p]` restricted to `0..=n_max` into `out` and returns the
    /// gain mass that lands above `n_max`.
    ///
    /// `p` and `out` must both have length `n_max + 1`.
    pub fn apply(&self, p: &[f64], out: &mut [f64]) -> f64 {
        let len = self.n_max + 1;
        assert_eq!(p.len(), len, "state length must be n_max + 1");
        assert_eq!(out.len(), len, "output length must be n_max + 1");

        let mut pooled = vec![0.0; 2 * self.n_max + 1];
        for (k, &pk) in p.iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            for (l, &pl) in p.iter().enumerate() {
                pooled[k + l] += pk * pl;
            }
        }

        let mass: f64 = p.iter().sum();
        out.iter_mut().zip(p).for_each(|(o, &pn)| *o = -pn * mass);
        let mut overflow = 0.0;
        for (m, &sm) in pooled.iter().enumerate() {
            if sm == 0.0 {
                continue;
            }
            let row = &self.half_binom[m];
            let mut kept = 0.0;
            for (n, &b) in row.iter().enumerate() {
                let gain = sm * b;
                out[n] += gain;
                kept += gain;
            }
            overflow += sm - kept;
        }
        overflow
    }
}

/// `Q[p]` on the full gain support `0..=2K`, with no truncation.
pub fn collision_operator(p: &DiscreteDist) -> Vec<f64> {
    let k = p.support_bound();
    let kernel = CollisionKernel::new(2 * k);
    let padded = p.padded(2 * k + 1);
    let mut out = vec![0.0; 2 * k + 1];
    kernel.apply(&padded, &mut out);
    out
}
