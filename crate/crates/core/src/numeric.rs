//! Small numerical helpers: compensated summation and polynomial maximization on `[0, 1]`.

/// Kahan–Babuška (Neumaier) compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Evaluates `Σ coeffs[k] z^k` by Horner's scheme.
pub fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Location and value of the maximum of `|P(z)|` over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyMax {
    pub value: f64,
    pub argmax: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `|P(z)|` on the closed interval `[0, 1]`.
///
/// A uniform grid of `grid_cells + 1` points brackets the best value, then
/// golden-section search refines inside the two cells adjacent to the best
/// grid point until the bracket is narrower than `abs_tol`.
pub fn max_abs_on_unit_interval(coeffs: &[f64], grid_cells: usize, abs_tol: f64) -> PolyMax {
    let cells = grid_cells.max(1);
    if coeffs.iter().all(|&c| c == 0.0) {
        return PolyMax { value: 0.0, argmax: 0.0, evaluations: 0 };
    }
    let f = |z: f64| horner(coeffs, z).abs();
    let h = 1.0 / cells as f64;
    let mut best_i = 0;
    let mut best = f(0.0);
    let mut evaluations = 1;
    for i in 1..=cells {
        let v = f(i as f64 * h);
        evaluations += 1;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut argmax = best_i as f64 * h;

    let mut lo = (best_i.saturating_sub(1)) as f64 * h;
    let mut hi = ((best_i + 1).min(cells)) as f64 * h;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evaluations += 2;
    while hi - lo > abs_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        evaluations += 1;
    }
    for (z, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            argmax = z;
        }
    }
    PolyMax { value: best, argmax, evaluations }
}
