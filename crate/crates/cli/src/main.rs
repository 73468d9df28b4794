//! `pgfmetric`: Toscani and Wasserstein distances between laws on ℕ,
//! inequality sweeps, norm-constant estimates and reshuffling simulations.
//!
//! Exit codes: 0 success, 1 malformed input, 2 precondition violation,
//! 3 inequality violation, 4 integration failure.

mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use pgfmetric::metrics::{estimate_norm_constant_with, toscani_distance_with, SupOptions};
use pgfmetric::reshuffle::{agent_sim, integrate_ode, OdeConfig};
use pgfmetric::verify::{sweep, SweepConfig, SweepReport};
use pgfmetric::{poisson_dist, toscani_profile, wasserstein1_cdf, wasserstein_p, DiscreteDist, Error, Inequality, Order};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use output::{config_digest, csv_header, fmt17, write_file};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(1, message)
    }

    fn precondition(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::NonFinite { .. }
            | Error::NegativeMass { .. }
            | Error::NotNormalized { .. }
            | Error::EmptyVector => 1,
            Error::DegenerateDistance { .. } => 3,
            Error::MassLeak { .. } | Error::NegativeProbability { .. } | Error::MeanDrift { .. } => 4,
            _ => 2,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "pgfmetric", version, about = "Fourier-based and Wasserstein metrics on the non-negative integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricKind {
    D1,
    D2,
    W1,
    W2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Part1,
    Part2,
    Part3,
    W1w2,
}

impl From<Which> for Inequality {
    fn from(w: Which) -> Self {
        match w {
            Which::Part1 => Inequality::Part1,
            Which::Part2 => Inequality::Part2,
            Which::Part3 => Inequality::Part3,
            Which::W1w2 => Inequality::W1W2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum InitLaw {
    Dirac,
    Poisson,
    File(PathBuf),
}

impl FromStr for InitLaw {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dirac" => Ok(InitLaw::Dirac),
            "poisson" => Ok(InitLaw::Poisson),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(InitLaw::File(PathBuf::from(path))),
                _ => Err(format!("expected dirac, poisson or file:PATH, got '{s}'")),
            },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two distribution files.
    Metric {
        #[arg(long)]
        dist_a: PathBuf,
        #[arg(long)]
        dist_b: PathBuf,
        #[arg(long, value_enum)]
        kind: MetricKind,
        /// Print `inf` for D2 between laws with different means instead of failing.
        #[arg(long)]
        allow_infinite: bool,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
    },
    /// Randomized sweep of one inequality; writes a JSON report.
    Verify {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Support bound K of the random distributions.
        #[arg(long, default_value_t = 10)]
        support: usize,
        /// Moment exponent offset for part3 and w1w2 (default 1).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Store wall-clock time in the report (breaks byte-identical reruns).
        #[arg(long)]
        record_elapsed: bool,
    },
    /// Lower-bound estimate of the l1-to-ell norm equivalence constant.
    Constant {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate the mean-field reshuffling ODE; writes a trajectory CSV.
    Ode {
        #[arg(long)]
        mu: f64,
        /// dirac, poisson or file:PATH
        #[arg(long, default_value = "dirac")]
        init: InitLaw,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
        #[arg(long, default_value_t = 30.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.1)]
        sample_every: f64,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// N-agent binomial reshuffling; writes wealth-histogram snapshots.
    Abm {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        mu: u64,
        #[arg(long)]
        t_end: f64,
        /// Comma-separated snapshot times; defaults to t-end.
        #[arg(long)]
        snapshots: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ratio |f̂ − ĝ|/(1 − z)^s on a uniform z grid; writes a CSV.
    Profile {
        #[arg(long)]
        dist_a: PathBuf,
        #[arg(long)]
        dist_b: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Metric { dist_a, dist_b, kind, allow_infinite, grid } => {
            let f = DiscreteDist::from_json_file(&dist_a)?;
            let g = DiscreteDist::from_json_file(&dist_b)?;
            let opts = sup_options(grid)?;
            let value = match kind {
                MetricKind::D1 => toscani_distance_with(&f, &g, Order::One, &opts).value,
                MetricKind::D2 => {
                    let v = toscani_distance_with(&f, &g, Order::Two, &opts).value;
                    if v.is_infinite() && !allow_infinite {
                        return Err(Error::UnequalMeans { mean_a: f.mean(), mean_b: g.mean() }.into());
                    }
                    v
                }
                MetricKind::W1 => wasserstein1_cdf(&f, &g),
                MetricKind::W2 => wasserstein_p(&f, &g, 2.0),
            };
            println!("{}", fmt17(value));
            Ok(0)
        }
        Command::Verify { which, trials, support, alpha, seed, out, record_elapsed } => {
            let canonical = format!("verify;which={which:?};trials={trials};support={support};alpha={alpha:?};seed={seed}");
            let cfg = SweepConfig { which: which.into(), trials, support, alpha, seed };
            let report = sweep(&cfg)?;
            let file = SweepFile::new(&report, config_digest(&canonical), record_elapsed);
            let body = serde_json::to_string_pretty(&file).expect("report serializes") + "\n";
            write_file(&out, &body)?;
            println!(
                "{}: trials={} violations={} min_slack={} max_ratio={} elapsed={:.3}s",
                report.name,
                report.trials,
                report.violations,
                report.min_slack.map_or("-".into(), fmt17),
                report.max_ratio.map_or("-".into(), fmt17),
                report.elapsed_sec
            );
            Ok(if report.violations > 0 { 3 } else { 0 })
        }
        Command::Constant { dim, trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let est = estimate_norm_constant_with(dim, trials, &mut rng, &SupOptions::default())?;
            println!("{}", fmt17(est.estimate));
            Ok(0)
        }
        Command::Ode { mu, init, dt, t_end, sample_every, n_max, out } => {
            let p0 = match &init {
                InitLaw::Dirac => {
                    if mu.fract() != 0.0 || mu < 0.0 {
                        return Err(CliError::precondition(format!("dirac start needs an integer mean, got {mu}")));
                    }
                    DiscreteDist::dirac(mu as usize)
                }
                InitLaw::Poisson => poisson_dist(mu, 1e-12)?,
                InitLaw::File(path) => DiscreteDist::from_json_file(path)?,
            };
            let cfg = OdeConfig { mu, dt, t_end, sample_every, n_max };
            let traj = integrate_ode(&p0, &cfg)?;
            let canonical = format!("ode;init={init:?};{}", traj.config_digest);
            let mut body = csv_header(&config_digest(&canonical), 0);
            body.push_str("t,D2,W1,W2,mass_defect,mean\n");
            for s in &traj.samples {
                let cols = [s.t, s.d2, s.w1, s.w2, s.mass_defect, s.mean].map(fmt17);
                writeln!(body, "{}", cols.join(",")).expect("writing to a string");
            }
            write_file(&out, &body)?;
            if let Some(last) = traj.samples.last() {
                println!("t={} D2={} W2={} (n_max={})", fmt17(last.t), fmt17(last.d2), fmt17(last.w2), traj.n_max);
            }
            Ok(0)
        }
        Command::Abm { agents, mu, t_end, snapshots, seed, out } => {
            let times = match snapshots.as_deref() {
                None => vec![t_end],
                Some(s) => parse_times(s)?,
            };
            let canonical = format!("abm;agents={agents};mu={mu};t_end={t_end:?};snapshots={times:?};seed={seed}");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let snaps = agent_sim(agents, mu, t_end, &times, &mut rng)?;
            let equilibrium = poisson_dist(mu as f64, 1e-12)?;
            let mut body = csv_header(&config_digest(&canonical), seed);
            body.push_str("t,n,count,fraction\n");
            for snap in &snaps {
                let n_agents = snap.agents() as f64;
                for (n, &count) in snap.counts.iter().enumerate() {
                    writeln!(body, "{},{n},{count},{}", fmt17(snap.t), fmt17(count as f64 / n_agents))
                        .expect("writing to a string");
                }
                println!(
                    "t={} total={} tv_to_poisson={}",
                    fmt17(snap.t),
                    snap.total,
                    fmt17(snap.empirical().total_variation(&equilibrium))
                );
            }
            write_file(&out, &body)?;
            Ok(0)
        }
        Command::Profile { dist_a, dist_b, order, grid, out } => {
            let f = DiscreteDist::from_json_file(&dist_a)?;
            let g = DiscreteDist::from_json_file(&dist_b)?;
            let order = Order::try_from(order)?;
            let prof = toscani_profile(&f, &g, order, grid)?;
            let canonical = format!("profile;order={order:?};grid={grid};a={};b={}", f.to_json_string(), g.to_json_string());
            let mut body = csv_header(&config_digest(&canonical), 0);
            body.push_str("z,ratio\n");
            for (z, r) in prof {
                writeln!(body, "{},{}", fmt17(z), fmt17(r)).expect("writing to a string");
            }
            write_file(&out, &body)?;
            Ok(0)
        }
    }
}

fn sup_options(grid: usize) -> Result<SupOptions, CliError> {
    if grid == 0 {
        return Err(CliError::precondition("grid must be positive"));
    }
    Ok(SupOptions { grid_cells: grid, ..SupOptions::default() })
}

fn parse_times(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::malformed(format!("bad snapshot time '{t}': {e}"))))
        .collect()
}

/// On-disk sweep report.
#[derive(Serialize)]
struct SweepFile {
    name: String,
    trials: usize,
    violations: usize,
    min_slack: Option<f64>,
    worst_case_seed: Option<u64>,
    worst_case_trial: Option<usize>,
    elapsed_sec: Option<f64>,
    seed: u64,
    support: usize,
    alpha: Option<f64>,
    skipped: usize,
    max_ratio: Option<f64>,
    config_digest: String,
}

impl SweepFile {
    fn new(r: &SweepReport, config_digest: String, record_elapsed: bool) -> Self {
        Self {
            name: r.name.name().to_string(),
            trials: r.trials,
            violations: r.violations,
            min_slack: r.min_slack,
            worst_case_seed: r.worst_case_seed,
            worst_case_trial: r.worst_case_trial,
            elapsed_sec: record_elapsed.then_some(r.elapsed_sec),
            seed: r.seed,
            support: r.support,
            alpha: r.alpha,
            skipped: r.skipped,
            max_ratio: r.max_ratio,
            config_digest,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_law_parsing() {
        assert_eq!("dirac".parse::<InitLaw>().unwrap(), InitLaw::Dirac);
        assert_eq!("file:a.json".parse::<InitLaw>().unwrap(), InitLaw::File("a.json".into()));
        assert!("file:".parse::<InitLaw>().is_err());
        assert!("uniform".parse::<InitLaw>().is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::NotNormalized { sum: 2.0 }).code, 1);
        assert_eq!(CliError::from(Error::UnequalMeans { mean_a: 0.0, mean_b: 1.0 }).code, 2);
        assert_eq!(CliError::from(Error::MassLeak { t: 1.0, defect: 1.0 }).code, 4);
        assert_eq!(CliError::from(Error::DegenerateDistance { d2: 0.0, w2: 1.0 }).code, 3);
    }

    #[test]
    fn snapshot_time_list() {
        assert_eq!(parse_times("1, 2.5,10").unwrap(), vec![1.0, 2.5, 10.0]);
        assert!(parse_times("1,x").is_err());
    }
}
