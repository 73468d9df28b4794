//! Event-driven N-agent binomial reshuffling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;

use crate::dist::DiscreteDist;
use crate::error::{Error, Result};

/// Wealth of every agent; the sum never changes.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub wealths: Vec<u64>,
    pub t: f64,
    pub total: u64,
}

impl AgentState {
    /// Every agent starts with exactly `mu` dollars.
    pub fn uniform(agents: usize, mu: u64) -> Self {
        Self { wealths: vec![mu; agents], t: 0.0, total: agents as u64 * mu }
    }

    /// Pools the wealth of agents `i` and `j` and splits it as
    /// `(B, total − B)` with `B ~ Binomial(total, 1/2)`.
    pub fn reshuffle<R: Rng + ?Sized>(&mut self, i: usize, j: usize, rng: &mut R) {
        let pool = self.wealths[i] + self.wealths[j];
        let share = fair_binomial(pool, rng);
        self.wealths[i] = share;
        self.wealths[j] = pool - share;
    }

    /// Histogram of wealth across agents, indexed by dollar amount.
    pub fn counts(&self) -> Vec<u64> {
        let top = self.wealths.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0u64; top + 1];
        for &w in &self.wealths {
            counts[w as usize] += 1;
        }
        counts
    }
}

/// Exact `Binomial(n, 1/2)` draw as the number of set bits among `n` fair
/// random bits, taken 64 at a time.
pub fn fair_binomial<R: Rng + ?Sized>(n: u64, rng: &mut R) -> u64 {
    let mut left = n;
    let mut heads = 0u64;
    while left >= 64 {
        heads += u64::from(rng.next_u64().count_ones());
        left -= 64;
    }
    if left > 0 {
        let mask = (1u64 << left) - 1;
        heads += u64::from((rng.next_u64() & mask).count_ones());
    }
    heads
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub counts: Vec<u64>,
    /// Total wealth at the snapshot; equals `N μ`.
    pub total: u64,
}

impl Snapshot {
    pub fn agents(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn empirical(&self) -> DiscreteDist {
        let n = self.agents() as f64;
        DiscreteDist::new(self.counts.iter().map(|&c| c as f64 / n).collect())
            .expect("frequencies of a non-empty population form a distribution")
    }
}

/// Simulates `agents` agents starting at `mu` dollars each up to `t_end`.
///
/// Events arrive at the jumps of a rate-`N` Poisson clock; each picks an
/// unordered pair uniformly and reshuffles it. Snapshots are taken at the
/// requested times (sorted, clipped to `[0, t_end]`).
pub fn agent_sim<R: Rng + ?Sized>(
    agents: usize,
    mu: u64,
    t_end: f64,
    snapshot_times: &[f64],
    rng: &mut R,
) -> Result<Vec<Snapshot>> {
    if agents < 2 {
        return Err(Error::Domain(format!("need at least 2 agents, got {agents}")));
    }
    if mu == 0 {
        return Err(Error::Domain("mu must be a positive integer".into()));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end must be non-negative, got {t_end}")));
    }
    let mut times: Vec<f64> = snapshot_times.iter().copied().filter(|&t| (0.0..=t_end).contains(&t)).collect();
    if times.len() != snapshot_times.len() {
        return Err(Error::Domain(format!("snapshot times must lie in [0, {t_end}]")));
    }
    times.sort_by(f64::total_cmp);

    let clock = Exp::new(agents as f64).expect("positive rate");
    let mut state = AgentState::uniform(agents, mu);
    let mut snapshots = Vec::with_capacity(times.len());
    let mut pending = times.into_iter().peekable();
    loop {
        let next_event = state.t + rng.sample(clock);
        while let Some(&ts) = pending.peek() {
            if ts < next_event {
                snapshots.push(Snapshot { t: ts, counts: state.counts(), total: state.wealths.iter().sum() });
                pending.next();
            } else {
                break;
            }
        }
        if next_event > t_end || pending.peek().is_none() {
            break;
        }
        state.t = next_event;
        let i = rng.gen_range(0..agents);
        let mut j = rng.gen_range(0..agents - 1);
        if j >= i {
            j += 1;
        }
        state.reshuffle(i, j, rng);
    }
    Ok(snapshots)
}

/// Independent replicates of [`agent_sim`]; replicate `r` uses seed
/// `seed + r` and results come back in replicate order.
pub fn agent_replicates(
    agents: usize,
    mu: u64,
    t_end: f64,
    snapshot_times: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<Vec<Snapshot>>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            agent_sim(agents, mu, t_end, snapshot_times, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_binomial_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [0u64, 1, 5, 63, 64, 65, 200] {
            let draws = 20_000;
            let xs: Vec<f64> = (0..draws).map(|_| fair_binomial(n, &mut rng) as f64).collect();
            let mean = xs.iter().sum::<f64>() / draws as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
            let sd_of_mean = (n as f64 / 4.0 / draws as f64).sqrt();
            assert!((mean - n as f64 / 2.0).abs() <= 4.0 * sd_of_mean + 1e-12, "n={n} mean={mean}");
            if n > 0 {
                assert!((var / (n as f64 / 4.0) - 1.0).abs() < 0.05, "n={n} var={var}");
            }
            assert!(xs.iter().all(|&x| x <= n as f64));
        }
    }

    #[test]
    fn fair_binomial_small_n_pmf() {
        // Binomial(3, 1/2) = (1, 3, 3, 1) / 8.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 80_000;
        let mut hist = [0usize; 4];
        for _ in 0..draws {
            hist[fair_binomial(3, &mut rng) as usize] += 1;
        }
        for (k, &c) in hist.iter().enumerate() {
            let expected = [1.0, 3.0, 3.0, 1.0][k] / 8.0;
            let sd = (expected * (1.0 - expected) / draws as f64).sqrt();
            assert!((c as f64 / draws as f64 - expected).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn wealth_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let snaps = agent_sim(50, 3, 20.0, &[0.0, 1.0, 5.0, 20.0], &mut rng).unwrap();
        assert_eq!(snaps.len(), 4);
        for s in &snaps {
            assert_eq!(s.total, 150);
            assert_eq!(s.agents(), 50);
            let dollars: u64 = s.counts.iter().enumerate().map(|(n, &c)| n as u64 * c).sum();
            assert_eq!(dollars, 150);
        }
        assert_eq!(snaps[0].counts, {
            let mut v = vec![0; 4];
            v[3] = 50;
            v
        });
    }

    #[test]
    fn pairwise_exchange_conserves_pair_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = AgentState::uniform(2, 0);
        state.wealths = vec![7, 100];
        for _ in 0..1000 {
            state.reshuffle(0, 1, &mut rng);
            assert_eq!(state.wealths[0] + state.wealths[1], 107);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let run = || agent_replicates(30, 2, 5.0, &[1.0, 5.0], 3, 9).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(agent_sim(1, 5, 1.0, &[1.0], &mut rng).is_err());
        assert!(agent_sim(10, 0, 1.0, &[1.0], &mut rng).is_err());
        assert!(agent_sim(10, 5, 1.0, &[2.0], &mut rng).is_err());
    }
}
