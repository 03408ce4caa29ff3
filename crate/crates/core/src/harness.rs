//! Monte Carlo experiment drivers and the statistical comparisons that turn
//! the limit theorems into pass/fail checks.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::beta::BetaSeries;
use crate::collapse::{collapse, OrderPolicy};
use crate::hypergraph::Hypergraph;
use crate::stream::{trial_rng, trial_seed};
use crate::{chain, fluid, Error, Result};

/// Which simulator produces a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    /// Sample a hypergraph and collapse it.
    Full,
    /// Run the embedded (Y, Z) chain.
    Chain,
}

/// What each trial keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordMode {
    TerminalOnly,
    Trajectories,
}

/// A reproducible experiment: `trials` independent runs at fixed N, each on
/// its own random stream derived from (master_seed, trial index).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub series: BetaSeries,
    pub n_vertices: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub engine: EngineKind,
    pub record: RecordMode,
    /// Worker threads; 0 picks the runtime default, 1 forces the
    /// sequential path. Has no effect on results.
    pub workers: usize,
}

/// Terminal quantities of one trial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial_index: usize,
    pub seed: u64,
    /// |V*| / N.
    pub v_frac: f64,
    /// |Λ*| / N.
    pub edge_frac: f64,
    /// |V*|, the number of removals.
    pub steps: u64,
}

/// All trials of an experiment, keyed by trial index.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub n_vertices: usize,
    pub summaries: Vec<TrialSummary>,
    /// Per-trial (Y, Z) trajectories when requested, aligned with
    /// `summaries`.
    pub trajectories: Option<Vec<Vec<[u64; 2]>>>,
}

impl ExperimentResult {
    pub fn mean_v_frac(&self) -> f64 {
        mean(self.summaries.iter().map(|s| s.v_frac))
    }

    pub fn mean_edge_frac(&self) -> f64 {
        mean(self.summaries.iter().map(|s| s.edge_frac))
    }

    /// |V*| per trial.
    pub fn v_counts(&self) -> Vec<u64> {
        self.summaries.iter().map(|s| s.steps).collect()
    }

    /// |Λ*| per trial.
    pub fn edge_counts(&self) -> Vec<u64> {
        let nf = self.n_vertices as f64;
        self.summaries
            .iter()
            .map(|s| (s.edge_frac * nf).round() as u64)
            .collect()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count.max(1) as f64
}

fn run_trial(
    config: &ExperimentConfig,
    trial: usize,
) -> Result<(TrialSummary, Option<Vec<[u64; 2]>>)> {
    let mut rng = trial_rng(config.master_seed, trial as u64);
    let n = config.n_vertices;
    let record = matches!(config.record, RecordMode::Trajectories);
    let wrap = |e: Error| Error::Trial {
        trial,
        source: Box::new(e),
    };
    let (v_star, lambda_star, trajectory) = match config.engine {
        EngineKind::Full => {
            let mut h =
                Hypergraph::sample_poisson(&config.series, n, &mut rng).map_err(wrap)?;
            let trace =
                collapse(&mut h, &OrderPolicy::Randomized, &mut rng).map_err(wrap)?;
            let traj = record.then(|| trace.trajectory());
            (trace.v_star(), trace.lambda_star, traj)
        }
        EngineKind::Chain => {
            let run = chain::run(&config.series, n, &mut rng, record).map_err(wrap)?;
            (run.v_star, run.lambda_star, run.trajectory)
        }
    };
    let summary = TrialSummary {
        trial_index: trial,
        seed: trial_seed(config.master_seed, trial as u64),
        v_frac: v_star as f64 / n as f64,
        edge_frac: lambda_star as f64 / n as f64,
        steps: v_star,
    };
    Ok((summary, trajectory))
}

/// Runs every trial of the experiment. Results are deterministic for a
/// given config, independent of the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.trials < 1 || config.n_vertices < 1 {
        return Err(Error::Domain(
            "need at least one trial and one vertex".into(),
        ));
    }
    let outcomes = run_trials(config)?;
    let keep_traj = matches!(config.record, RecordMode::Trajectories);
    let mut summaries = Vec::with_capacity(outcomes.len());
    let mut trajectories = keep_traj.then(|| Vec::with_capacity(outcomes.len()));
    for (summary, traj) in outcomes {
        summaries.push(summary);
        if let Some(ts) = trajectories.as_mut() {
            ts.push(traj.expect("recording was requested"));
        }
    }
    Ok(ExperimentResult {
        n_vertices: config.n_vertices,
        summaries,
        trajectories,
    })
}

#[cfg(feature = "parallel")]
fn run_trials(
    config: &ExperimentConfig,
) -> Result<Vec<(TrialSummary, Option<Vec<[u64; 2]>>)>> {
    use rayon::prelude::*;
    if config.workers == 1 {
        return run_trials_sequential(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| run_trial(config, trial))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_trials(
    config: &ExperimentConfig,
) -> Result<Vec<(TrialSummary, Option<Vec<[u64; 2]>>)>> {
    run_trials_sequential(config)
}

/// The sequential fallback path; also what `workers = 1` selects when the
/// parallel feature is on.
pub fn run_trials_sequential(
    config: &ExperimentConfig,
) -> Result<Vec<(TrialSummary, Option<Vec<[u64; 2]>>)>> {
    (0..config.trials)
        .map(|trial| run_trial(config, trial))
        .collect()
}

/// Result of a two-sample chi-square comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub bins: usize,
    /// Both samples fell into a single bin; trivially equal.
    pub degenerate: bool,
}

/// Two-sample chi-square test on integer outcomes. Adjacent value bins are
/// merged until every expected count is at least 5.
pub fn compare_distributions(a: &[u64], b: &[u64]) -> Result<ChiSquareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let lo = *a.iter().chain(b).min().unwrap();
    let hi = *a.iter().chain(b).max().unwrap();
    let width = (hi - lo + 1) as usize;
    let mut count_a = vec![0u64; width];
    let mut count_b = vec![0u64; width];
    for &v in a {
        count_a[(v - lo) as usize] += 1;
    }
    for &v in b {
        count_b[(v - lo) as usize] += 1;
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let total = na + nb;
    // The expected count in a bin is proportional to its pooled count, so
    // merging until pooled ≥ threshold bounds both expectations.
    let threshold = (5.0 * total / na.min(nb)).ceil() as u64;
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for k in 0..width {
        acc.0 += count_a[k];
        acc.1 += count_b[k];
        if acc.0 + acc.1 >= threshold {
            bins.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    if bins.len() < 2 {
        return Ok(ChiSquareReport {
            statistic: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
            bins: bins.len(),
            degenerate: true,
        });
    }
    let mut statistic = 0.0;
    for &(oa, ob) in &bins {
        let pooled = (oa + ob) as f64;
        let ea = na * pooled / total;
        let eb = nb * pooled / total;
        let da = oa as f64 - ea;
        let db = ob as f64 - eb;
        statistic += da * da / ea + db * db / eb;
    }
    let dof = bins.len() - 1;
    let p_value = if statistic <= 0.0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64)
            .expect("dof >= 1")
            .cdf(statistic)
    };
    Ok(ChiSquareReport {
        statistic,
        degrees_of_freedom: dof,
        p_value,
        bins: bins.len(),
        degenerate: false,
    })
}

/// Empirical mass on each candidate value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassReport {
    /// (candidate, empirical frequency) in the candidates' order.
    pub masses: Vec<(f64, f64)>,
    /// Values farther than the tolerance from every candidate; never
    /// silently assigned.
    pub unclassified: usize,
}

/// Classifies each value to the nearest candidate within `tol`.
pub fn two_point_mass(values: &[f64], candidates: &[f64], tol: f64) -> MassReport {
    let mut counts = vec![0usize; candidates.len()];
    let mut unclassified = 0usize;
    for &v in values {
        let nearest = candidates
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (v - *a).abs().total_cmp(&(v - *b).abs())
            })
            .map(|(i, c)| (i, (v - c).abs()));
        match nearest {
            Some((i, d)) if d <= tol => counts[i] += 1,
            _ => unclassified += 1,
        }
    }
    let n = values.len().max(1) as f64;
    MassReport {
        masses: candidates
            .iter()
            .zip(&counts)
            .map(|(&c, &k)| (c, k as f64 / n))
            .collect(),
        unclassified,
    }
}

/// Sup-norm deviations between recorded trajectories and the fluid path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationStats {
    /// Per-trial sup over the trajectory of the Euclidean distance between
    /// `(n/N, Y_n/N, Z_n/N)` and `x_{n/N}`.
    pub sups: Vec<f64>,
    pub median: f64,
}

impl DeviationStats {
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        if self.sups.is_empty() {
            return 0.0;
        }
        self.sups.iter().filter(|&&s| s > threshold).count() as f64 / self.sups.len() as f64
    }
}

/// Computes per-trial sup-norm deviations from the closed-form fluid path,
/// aligning step n with t = n/N.
pub fn trajectory_deviation(
    series: &BetaSeries,
    trajectories: &[Vec<[u64; 2]>],
    n_vertices: usize,
) -> Result<DeviationStats> {
    if trajectories.is_empty() {
        return Err(Error::EmptySample);
    }
    let nf = n_vertices as f64;
    let mut sups = Vec::with_capacity(trajectories.len());
    for traj in trajectories {
        let mut sup: f64 = 0.0;
        for (n, yz) in traj.iter().enumerate() {
            let t = n as f64 / nf;
            if t >= 1.0 {
                break;
            }
            let x = fluid::path_point(series, t)?;
            let dy = yz[0] as f64 / nf - x[1];
            let dz = yz[1] as f64 / nf - x[2];
            sup = sup.max((dy * dy + dz * dz).sqrt());
        }
        sups.push(sup);
    }
    let mut sorted = sups.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    Ok(DeviationStats { sups, median })
}

/// Convenience driver: draws `count` samples of the critical limit law.
pub fn sample_z_many<R: Rng + ?Sized>(
    report: &crate::beta::ThresholdReport,
    count: usize,
    rng: &mut R,
) -> Result<Vec<fluid::ZLawSample>> {
    (0..count).map(|_| fluid::sample_z(report, rng)).collect()
}
