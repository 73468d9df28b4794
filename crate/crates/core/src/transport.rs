//! Wasserstein distances on the non-negative integers.
//!
//! On the line the monotone (quantile) coupling is optimal for every convex
//! cost `|i − j|^p`, so `W_p` reduces to a two-pointer merge of the CDF
//! staircases. `W_1` additionally has the closed form `Σ |F_n − G_n|`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dist::DiscreteDist;
use crate::numeric::compensated_sum;

/// Mass below which a residual left by floating-point subtraction is treated
/// as exhausted.
const RESIDUAL: f64 = 1e-15;

/// One cell `(i, j, mass)` of a transport plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// A sparse transport plan between two laws.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    entries: Vec<PlanEntry>,
}

impl Coupling {
    pub fn from_entries(entries: Vec<PlanEntry>) -> Self {
        Self { entries: entries.into_iter().filter(|e| e.mass > 0.0).collect() }
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row sums, indexed by source atom.
    pub fn source_marginal(&self) -> Vec<f64> {
        self.marginal(|e| e.source)
    }

    /// Column sums, indexed by target atom.
    pub fn target_marginal(&self) -> Vec<f64> {
        self.marginal(|e| e.target)
    }

    fn marginal(&self, key: impl Fn(&PlanEntry) -> usize) -> Vec<f64> {
        let len = self.entries.iter().map(|e| key(e) + 1).max().unwrap_or(0);
        let mut out = vec![0.0; len];
        for e in &self.entries {
            out[key(e)] += e.mass;
        }
        out
    }

    /// Largest deviation of either marginal from the given laws.
    pub fn marginal_error(&self, f: &DiscreteDist, g: &DiscreteDist) -> f64 {
        let dev = |m: Vec<f64>, d: &DiscreteDist| {
            let len = m.len().max(d.probs().len());
            (0..len)
                .map(|n| (m.get(n).copied().unwrap_or(0.0) - d.get(n)).abs())
                .fold(0.0, f64::max)
        };
        dev(self.source_marginal(), f).max(dev(self.target_marginal(), g))
    }

    /// `Σ mass · |i − j|^p`, without the root.
    pub fn transport_cost(&self, p: f64) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.mass * (e.source.abs_diff(e.target) as f64).powf(p)))
    }

    /// `(Σ mass · |i − j|^p)^{1/p}`.
    pub fn cost(&self, p: f64) -> f64 {
        self.transport_cost(p).powf(1.0 / p)
    }
}

/// `W_1 = Σ_n |F_n − G_n|` over the union support.
pub fn wasserstein1_cdf(f: &DiscreteDist, g: &DiscreteDist) -> f64 {
    let len = f.probs().len().max(g.probs().len());
    let (cf, cg) = (f.cdf(), g.cdf());
    compensated_sum((0..len).map(|n| (cf.get(n) - cg.get(n)).abs()))
}

/// Quantile coupling: pairs the lowest unmatched mass of `f` with the lowest
/// unmatched mass of `g` until both are exhausted.
pub fn monotone_coupling(f: &DiscreteDist, g: &DiscreteDist) -> Coupling {
    let atoms = |d: &DiscreteDist| -> Vec<(usize, f64)> {
        d.probs().iter().copied().enumerate().filter(|&(_, p)| p > 0.0).collect()
    };
    let (a, b) = (atoms(f), atoms(g));
    let mut entries = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    loop {
        let last_a = ia + 1 == a.len();
        let last_b = ib + 1 == b.len();
        // Once one side is on its final atom it absorbs everything left on
        // the other side, so rounding never strands mass.
        let m = match (last_a, last_b) {
            (true, true) => ra.max(rb),
            (true, false) => rb,
            (false, true) => ra,
            (false, false) => ra.min(rb),
        };
        entries.push(PlanEntry { source: a[ia].0, target: b[ib].0, mass: m });
        match (last_a, last_b) {
            (true, true) => break,
            (true, false) => {
                ra -= m;
                ib += 1;
                rb = b[ib].1;
            }
            (false, true) => {
                rb -= m;
                ia += 1;
                ra = a[ia].1;
            }
            (false, false) => {
                ra -= m;
                rb -= m;
                if ra <= RESIDUAL {
                    ia += 1;
                    ra = a[ia].1;
                }
                if rb <= RESIDUAL {
                    ib += 1;
                    rb = b[ib].1;
                }
            }
        }
    }
    Coupling::from_entries(entries)
}

/// `W_p` through the monotone coupling.
pub fn wasserstein_p(f: &DiscreteDist, g: &DiscreteDist, p: f64) -> f64 {
    assert!(p >= 1.0, "Wasserstein exponent must be at least 1, got {p}");
    monotone_coupling(f, g).cost(p)
}

/// A feasible but generally suboptimal plan: source atoms are visited in
/// random order and each one's mass is poured greedily into randomly chosen
/// target atoms with capacity left.
pub fn random_feasible_coupling<R: Rng + ?Sized>(f: &DiscreteDist, g: &DiscreteDist, rng: &mut R) -> Coupling {
    let mut sources: Vec<usize> = (0..f.probs().len()).filter(|&i| f.get(i) > 0.0).collect();
    sources.shuffle(rng);
    let mut capacity: Vec<f64> = g.probs().to_vec();
    let mut open: Vec<usize> = (0..capacity.len()).filter(|&j| capacity[j] > 0.0).collect();
    let mut entries = Vec::new();
    let n_sources = sources.len();
    for (visit, &i) in sources.iter().enumerate() {
        let final_source = visit + 1 == n_sources;
        let mut left = f.get(i);
        while left > RESIDUAL && !open.is_empty() {
            let slot = rng.gen_range(0..open.len());
            let j = open[slot];
            let last_target = open.len() == 1;
            let m = if last_target { left } else { left.min(capacity[j]) };
            entries.push(PlanEntry { source: i, target: j, mass: m });
            left -= m;
            capacity[j] -= m;
            if capacity[j] <= RESIDUAL && !last_target {
                open.swap_remove(slot);
            }
        }
        if final_source {
            // Rounding leftovers on the target side go to the final source.
            for &j in &open {
                if capacity[j] > RESIDUAL {
                    entries.push(PlanEntry { source: i, target: j, mass: capacity[j] });
                }
            }
        }
    }
    Coupling::from_entries(merge_duplicates(entries))
}

fn merge_duplicates(mut entries: Vec<PlanEntry>) -> Vec<PlanEntry> {
    entries.sort_by_key(|e| (e.source, e.target));
    let mut out: Vec<PlanEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match out.last_mut() {
            Some(last) if last.source == e.source && last.target == e.target => last.mass += e.mass,
            _ => out.push(e),
        }
    }
    out
}
