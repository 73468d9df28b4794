//! Fourier-based (Toscani) distances between laws on the non-negative
//! integers, computed through their probability generating functions, and the
//! auxiliary norm `ℓ` on `R^N`.
//!
//! For `f̂(z) = Σ z^n f_n` the order-`s` distance is
//! `sup_{z ∈ (0,1)} |f̂(z) − ĝ(z)| / (1 − z)^s`. The quotient is never formed
//! directly. Writing `F`, `G` for the CDFs,
//!
//! * `(f̂ − ĝ)(z) / (1 − z) = Σ z^n (F_n − G_n)`,
//! * and when the means agree, `(f̂ − ĝ)(z) / (1 − z)^2 = Σ z^n T_n` with
//!   `T_n = Σ_{k ≤ n} (F_k − G_k)`.
//!
//! Both right-hand sides are polynomials, so the supremum over the open
//! interval equals the maximum of their absolute value over `[0, 1]`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::{DEFAULT_GRID, TOLERANCES};
use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::numeric::{horner, max_abs_on_unit_interval};

/// Knobs for locating a supremum on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupOptions {
    pub grid_cells: usize,
    pub refine_tol: f64,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self { grid_cells: DEFAULT_GRID, refine_tol: TOLERANCES.refine_abs }
    }
}

/// Order of a Toscani distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    One,
    Two,
}

impl Order {
    pub fn exponent(self) -> i32 {
        match self {
            Order::One => 1,
            Order::Two => 2,
        }
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(s: u32) -> Result<Self> {
        match s {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToscaniResult {
    /// Distance value; `+inf` for order two with unequal means.
    pub value: f64,
    /// Where the supremum is attained by the continuous extension.
    pub argmax_z: Option<f64>,
    pub evaluations: usize,
}

impl ToscaniResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Coefficients of `Σ z^n (F_n − G_n)` over the union support.
fn cdf_difference(f: &DiscreteDist, g: &DiscreteDist) -> Vec<f64> {
    let len = f.probs().len().max(g.probs().len());
    let (cf, cg) = (f.cdf(), g.cdf());
    (0..len).map(|n| cf.get(n) - cg.get(n)).collect()
}

fn running_sum(c: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    c.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

fn means_match(f: &DiscreteDist, g: &DiscreteDist) -> bool {
    (f.mean() - g.mean()).abs() <= TOLERANCES.equal_mean
}

/// Polynomial whose absolute value on `[0, 1]` is the order-`s` ratio, or
/// `None` when the ratio is unbounded.
///
/// For order two the double cumulative sum is cut at the union support: its
/// tail is the constant mean gap, which is at most `1e-9` here.
pub fn singularity_free_coefficients(f: &DiscreteDist, g: &DiscreteDist, order: Order) -> Option<Vec<f64>> {
    let c = cdf_difference(f, g);
    match order {
        Order::One => Some(c),
        Order::Two => means_match(f, g).then(|| running_sum(&c)),
    }
}

pub fn toscani_distance(f: &DiscreteDist, g: &DiscreteDist, order: Order) -> ToscaniResult {
    toscani_distance_with(f, g, order, &SupOptions::default())
}

pub fn toscani_distance_with(f: &DiscreteDist, g: &DiscreteDist, order: Order, opts: &SupOptions) -> ToscaniResult {
    match singularity_free_coefficients(f, g, order) {
        None => ToscaniResult { value: f64::INFINITY, argmax_z: None, evaluations: 0 },
        Some(coeffs) => {
            let m = max_abs_on_unit_interval(&coeffs, opts.grid_cells, opts.refine_tol);
            ToscaniResult { value: m.value, argmax_z: Some(m.argmax), evaluations: m.evaluations }
        }
    }
}

/// `D_s` with the order given as an integer, rejecting anything but 1 and 2.
pub fn toscani_distance_order(f: &DiscreteDist, g: &DiscreteDist, s: u32) -> Result<ToscaniResult> {
    Ok(toscani_distance(f, g, Order::try_from(s)?))
}

/// `(z, ratio)` on `grid_size` equally spaced points of `[0, 1]`, endpoints
/// included through the continuous extension.
pub fn toscani_profile(f: &DiscreteDist, g: &DiscreteDist, order: Order, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    if grid_size < 2 {
        return Err(Error::Domain(format!("profile grid needs at least 2 points, got {grid_size}")));
    }
    let zs = (0..grid_size).map(|i| i as f64 / (grid_size - 1) as f64);
    let out = match singularity_free_coefficients(f, g, order) {
        Some(coeffs) => zs.map(|z| (z, horner(&coeffs, z).abs())).collect(),
        None => {
            // Unequal means at order two: finite inside, divergent at z = 1.
            let c = cdf_difference(f, g);
            zs.map(|z| {
                let r = if z < 1.0 { horner(&c, z).abs() / (1.0 - z) } else { f64::INFINITY };
                (z, r)
            })
            .collect()
        }
    };
    Ok(out)
}

/// `ℓ[a] = sup_{z ∈ (0,1)} |Σ_{n=1}^N a_n Σ_{k<n} z^k|`, with `a[0]` holding `a_1`.
pub fn ell_norm(a: &[f64]) -> Result<f64> {
    ell_norm_with(a, &SupOptions::default())
}

pub fn ell_norm_with(a: &[f64], opts: &SupOptions) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    // Coefficient of z^k is the tail sum Σ_{n > k} a_n.
    let mut coeffs = vec![0.0; a.len()];
    let mut acc = 0.0;
    for k in (0..a.len()).rev() {
        acc += a[k];
        coeffs[k] = acc;
    }
    Ok(max_abs_on_unit_interval(&coeffs, opts.grid_cells, opts.refine_tol).value)
}

/// Lower bound on `C(N) = sup_{a ≠ 0} ‖a‖₁ / ℓ[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormConstantEstimate {
    pub estimate: f64,
    /// Vector attaining `estimate`.
    pub witness: Vec<f64>,
    /// Largest ratio seen after each random trial.
    pub running_max: Vec<f64>,
}

fn l1_over_ell(a: &[f64], opts: &SupOptions) -> f64 {
    let ell = ell_norm_with(a, opts).expect("non-empty vector");
    if ell == 0.0 {
        return 0.0;
    }
    a.iter().map(|x| x.abs()).sum::<f64>() / ell
}

const CLIMB_SWEEPS: usize = 60;
const CLIMB_MIN_STEP: f64 = 1e-6;

/// Coordinate-wise hill climbing on the ratio from `start`.
fn hill_climb(start: &[f64], start_ratio: f64, opts: &SupOptions) -> (Vec<f64>, f64) {
    let mut best = start.to_vec();
    let mut best_ratio = start_ratio;
    let scale = best.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut step = 0.25 * scale;
    for _ in 0..CLIMB_SWEEPS {
        if step < CLIMB_MIN_STEP * scale {
            break;
        }
        let mut improved = false;
        for i in 0..best.len() {
            for dir in [1.0, -1.0] {
                let mut trial = best.clone();
                trial[i] += dir * step;
                let r = l1_over_ell(&trial, opts);
                if r > best_ratio {
                    best = trial;
                    best_ratio = r;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_ratio)
}

/// Empirical lower bound on the `ℓ¹`-to-`ℓ` equivalence constant in dimension `dim`.
///
/// Random Gaussian directions are scored by `‖a‖₁ / ℓ[a]`; each time the
/// running best improves, coordinate hill climbing is run from it. The
/// returned value is a lower bound on the true constant, never an upper bound.
pub fn estimate_norm_constant<R: Rng + ?Sized>(dim: usize, trials: usize, rng: &mut R) -> Result<NormConstantEstimate> {
    estimate_norm_constant_with(dim, trials, rng, &SupOptions::default())
}

pub fn estimate_norm_constant_with<R: Rng + ?Sized>(
    dim: usize,
    trials: usize,
    rng: &mut R,
    opts: &SupOptions,
) -> Result<NormConstantEstimate> {
    if dim == 0 {
        return Err(Error::EmptyVector);
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let mut best = 0.0;
    let mut witness = vec![0.0; dim];
    let mut running_max = Vec::with_capacity(trials);
    for _ in 0..trials {
        let a: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let r = l1_over_ell(&a, opts);
        if r > best {
            let (climbed, climbed_ratio) = hill_climb(&a, r, opts);
            best = climbed_ratio;
            witness = climbed;
        }
        running_max.push(best);
    }
    Ok(NormConstantEstimate { estimate: best, witness, running_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_zero_two() -> DiscreteDist {
        DiscreteDist::new(vec![0.5, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn identical_laws_are_at_distance_zero() {
        let f = DiscreteDist::new(vec![0.2, 0.3, 0.5]).unwrap();
        for order in [Order::One, Order::Two] {
            assert_eq!(toscani_distance(&f, &f, order).value, 0.0);
        }
    }

    #[test]
    fn order_one_between_adjacent_points() {
        let r = toscani_distance(&DiscreteDist::dirac(0), &DiscreteDist::dirac(1), Order::One);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.argmax_z.is_some());
    }

    #[test]
    fn order_two_constant_ratio() {
        let r = toscani_distance(&DiscreteDist::dirac(1), &half_zero_two(), Order::Two);
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn order_two_unequal_means_diverges() {
        let r = toscani_distance(&DiscreteDist::dirac(0), &DiscreteDist::dirac(1), Order::Two);
        assert_eq!(r.value, f64::INFINITY);
        assert_eq!(r.argmax_z, None);
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        let f = DiscreteDist::dirac(0);
        assert!(matches!(toscani_distance_order(&f, &f, 3), Err(Error::UnsupportedOrder(3))));
        assert!(toscani_distance_order(&f, &f, 0).is_err());
        assert!(toscani_distance_order(&f, &f, 2).is_ok());
    }

    #[test]
    fn profile_examples() {
        let f = half_zero_two();
        let zero = toscani_profile(&f, &f, Order::Two, 7).unwrap();
        assert!(zero.iter().all(|&(_, r)| r == 0.0));
        let prof = toscani_profile(&DiscreteDist::dirac(1), &f, Order::Two, 5).unwrap();
        assert_eq!(prof.len(), 5);
        assert_eq!(prof[0].0, 0.0);
        assert_eq!(prof[4].0, 1.0);
        assert!(prof.iter().all(|&(_, r)| (r - 0.5).abs() < 1e-15));
        assert!(toscani_profile(&f, &f, Order::One, 1).is_err());
    }

    #[test]
    fn profile_unequal_means_order_two() {
        let prof = toscani_profile(&DiscreteDist::dirac(0), &DiscreteDist::dirac(1), Order::Two, 3).unwrap();
        assert!((prof[1].1 - 2.0).abs() < 1e-15);
        assert_eq!(prof[2].1, f64::INFINITY);
    }

    #[test]
    fn ell_norm_examples() {
        assert_eq!(ell_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(ell_norm(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(ell_norm(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap(), 5.0);
        assert_eq!(ell_norm(&[1.0, -1.0]).unwrap(), 1.0);
        assert!(matches!(ell_norm(&[]), Err(Error::EmptyVector)));
    }

    #[test]
    fn norm_constant_low_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = estimate_norm_constant(1, 20, &mut rng).unwrap();
        assert!((one.estimate - 1.0).abs() < 1e-9);
        let two = estimate_norm_constant(2, 50, &mut rng).unwrap();
        assert!(two.estimate >= 2.0 - 1e-6);
        // C(2) = 5 exactly, attained at a = (3, -2); a lower bound cannot exceed it.
        assert!(two.estimate <= 5.0 + 1e-9, "estimate {}", two.estimate);
    }

    #[test]
    fn norm_constant_running_max_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = estimate_norm_constant(6, 40, &mut rng).unwrap();
        assert!(est.running_max.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*est.running_max.last().unwrap(), est.estimate);
        let short = estimate_norm_constant(6, 10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(short.estimate <= est.estimate);
        assert_eq!(short.running_max[..], est.running_max[..10]);
        let w = &est.witness;
        let ratio = w.iter().map(|x| x.abs()).sum::<f64>() / ell_norm(w).unwrap();
        assert!((ratio - est.estimate).abs() < 1e-12);
    }
}
