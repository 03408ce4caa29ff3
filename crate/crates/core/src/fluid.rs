//! Deterministic limit paths, limiting constants, and the critical-case
//! fluctuation machinery.
//!
//! As N grows, the rescaled trajectory `(n/N, Y_n/N, Z_n/N)` of the embedded
//! chain concentrates on the closed-form path
//!
//! ```text
//! x_t = (t, (1−t)(β'(t) + log(1−t)), β(t) − (1−t) log(1−t)),
//! ```
//!
//! which solves `ẋ = b(x)` for the drift field of the limiting jump
//! kernel. The patch density `x²` first hits zero at `z*`, which is where
//! the collapse stops. At a tangential zero `z ∈ ζ` the outcome stays
//! random: the reduced patch-density fluctuation is a Brownian motion `W`
//! run in the clock `σ_t²`, whose value at a tangency is `z/(1−z)`, and the
//! limiting collapse fraction is the first tangency where `W` is negative,
//! else `z*`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::beta::{BetaSeries, ThresholdReport};
use crate::{Error, Result};

/// One point of the fluid path together with the fluctuation clock.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub sigma_sq: f64,
}

/// Limiting constants of the collapse.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Limits {
    pub z_star: f64,
    /// Limit of |V*|/N; equals `z_star`.
    pub v_limit: f64,
    /// Limit of |Λ*|/N: `β(z*) − (1−z*) log(1−z*)`, continued to `β(1)` at
    /// `z* = 1`.
    pub edge_limit: f64,
}

/// Fluid path plus analytic summary, ready for serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluidReport {
    pub path: Vec<PathSample>,
    pub z_star: f64,
    /// Locations of the tangential zeros ζ.
    pub zeros: Vec<f64>,
    pub v_limit: f64,
    pub edge_limit: f64,
    /// Largest deviation between the drift field and a central finite
    /// difference of the closed form over the grid; a self-check that the
    /// emitted path solves ẋ = b(x).
    pub max_drift_residual: f64,
}

/// Drift of the limiting jump kernel,
/// `b(x) = (1, −1 − x²/(1−x¹) + (1−x¹)β''(x¹), 1 + x²/(1−x¹))`.
///
/// The third component carries the deterministic `+1` of the per-step
/// debris increment `1 + W`, matching the Laplace transform of the kernel
/// and the closed-form path.
pub fn drift(series: &BetaSeries, x: [f64; 3]) -> Result<[f64; 3]> {
    if x[0] >= 1.0 {
        return Err(Error::Domain(format!("drift needs x1 < 1, got {}", x[0])));
    }
    let rate = x[1] / (1.0 - x[0]);
    Ok([
        1.0,
        -1.0 - rate + (1.0 - x[0]) * series.d2(x[0]),
        1.0 + rate,
    ])
}

/// Jacobian of [`drift`]; rows are gradients of the components.
fn drift_jacobian(series: &BetaSeries, x: [f64; 3]) -> [[f64; 3]; 3] {
    let om = 1.0 - x[0];
    let d_rate_d1 = x[1] / (om * om);
    [
        [0.0, 0.0, 0.0],
        [
            -d_rate_d1 - series.d2(x[0]) + om * series.d3(x[0]),
            -1.0 / om,
            0.0,
        ],
        [d_rate_d1, 1.0 / om, 0.0],
    ]
}

/// The closed-form fluid path at a single time.
pub fn path_point(series: &BetaSeries, t: f64) -> Result<[f64; 3]> {
    if t >= 1.0 {
        return Err(Error::Domain(format!("path needs t < 1, got {t}")));
    }
    let log1m = (-t).ln_1p();
    Ok([
        t,
        (1.0 - t) * (series.d1(t) + log1m),
        series.value(t) - (1.0 - t) * log1m,
    ])
}

/// Evaluates the closed form on a grid, attaching the fluctuation clock.
pub fn path(series: &BetaSeries, grid: &[f64]) -> Result<Vec<PathSample>> {
    grid.iter()
        .map(|&t| {
            let x = path_point(series, t)?;
            Ok(PathSample {
                t,
                x1: x[0],
                x2: x[1],
                x3: x[2],
                sigma_sq: series.sigma_sq(t)?,
            })
        })
        .collect()
}

/// Largest gap between a central finite difference of the closed form and
/// the drift field over the grid.
fn drift_residual(series: &BetaSeries, grid: &[f64]) -> Result<f64> {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for &t in grid {
        if t - h < -0.5 || t + h >= 1.0 {
            continue;
        }
        let plus = path_point(series, t + h)?;
        let minus = path_point(series, t - h)?;
        let b = drift(series, path_point(series, t)?)?;
        for k in 0..3 {
            let fd = (plus[k] - minus[k]) / (2.0 * h);
            worst = worst.max((fd - b[k]).abs() / (1.0 + b[k].abs()));
        }
    }
    Ok(worst)
}

/// Builds the full fluid report over a grid.
pub fn report(series: &BetaSeries, grid: &[f64]) -> Result<FluidReport> {
    let analysis = series.analyze();
    let limits = limits_from(series, &analysis);
    Ok(FluidReport {
        path: path(series, grid)?,
        z_star: analysis.z_star,
        zeros: analysis.zeros.iter().map(|z| z.location).collect(),
        v_limit: limits.v_limit,
        edge_limit: limits.edge_limit,
        max_drift_residual: drift_residual(series, grid)?,
    })
}

/// Limiting identifiable fractions for a series.
pub fn limits(series: &BetaSeries) -> Limits {
    limits_from(series, &series.analyze())
}

/// [`limits`] reusing an existing threshold analysis.
pub fn limits_from(series: &BetaSeries, analysis: &ThresholdReport) -> Limits {
    let z = analysis.z_star;
    let edge_limit = if z < 1.0 {
        series.value(z) - (1.0 - z) * (-z).ln_1p()
    } else {
        // (1−z)log(1−z) → 0, so the closed form continues to β(1).
        series.value(1.0)
    };
    Limits {
        z_star: z,
        v_limit: z,
        edge_limit,
    }
}

/// A draw of the critical-case limit law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZLawSample {
    /// The realized collapse fraction, an element of ζ ∪ {z*}.
    pub value: f64,
    /// Which tangency absorbed the path, if any.
    pub hit_zero_index: Option<usize>,
}

/// Samples the limit law `Z = min{z ∈ ζ : W(z/(1−z)) < 0} ∧ z*` exactly,
/// by drawing the Brownian motion at the clock times `z/(1−z)` through
/// independent Gaussian increments.
///
/// A degenerate tangency at z = 0 is rejected: `W(0) = 0` decides nothing
/// and the limit theorems exclude that configuration.
pub fn sample_z<R: Rng + ?Sized>(
    report: &ThresholdReport,
    rng: &mut R,
) -> Result<ZLawSample> {
    let mut w = 0.0;
    let mut clock = 0.0;
    for (i, zero) in report.zeros.iter().enumerate() {
        if zero.degenerate || zero.location <= 0.0 {
            return Err(Error::DegenerateZeroTangency);
        }
        let s = zero.location / (1.0 - zero.location);
        let incr: f64 = StandardNormal.sample(rng);
        w += (s - clock).max(0.0).sqrt() * incr;
        clock = s;
        if w < 0.0 {
            return Ok(ZLawSample {
                value: zero.location,
                hit_zero_index: Some(i),
            });
        }
    }
    Ok(ZLawSample {
        value: report.z_star,
        hit_zero_index: None,
    })
}

/// Exact sampler for the reduced patch-density fluctuation `α_t = W(σ_t²)`
/// on a fixed grid: Gaussian increments in the σ² clock, starting from
/// `α_0 ~ N(0, β_1)` (the clock starts at `σ_0² = β_1`).
pub struct FluctuationSampler {
    grid: Vec<f64>,
    sqrt_increments: Vec<f64>,
}

impl FluctuationSampler {
    /// Grid must be strictly increasing inside [0, z*).
    pub fn new(series: &BetaSeries, grid: &[f64]) -> Result<Self> {
        let z_star = series.analyze().z_star;
        validate_grid(grid, z_star)?;
        let mut sqrt_increments = Vec::with_capacity(grid.len());
        let mut prev_clock = 0.0;
        for &t in grid {
            let clock = series.sigma_sq(t)?;
            // The clock is nondecreasing before z*; guard rounding.
            sqrt_increments.push((clock - prev_clock).max(0.0).sqrt());
            prev_clock = clock;
        }
        Ok(Self {
            grid: grid.to_vec(),
            sqrt_increments,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// One α path over the grid.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut w = 0.0;
        self.sqrt_increments
            .iter()
            .map(|&sd| {
                let g: f64 = StandardNormal.sample(rng);
                w += sd * g;
                w
            })
            .collect()
    }
}

/// Options for the diagnostic Euler–Maruyama integrator.
#[derive(Debug, Clone)]
pub struct SdeOptions {
    /// Integration step; grid times are hit exactly by shortening the
    /// final sub-step of each segment.
    pub dt: f64,
    /// Include the time-randomization field `V₃ = b(x)`. It does not affect
    /// the patch component at tangencies and is off for the reduced
    /// fluctuation.
    pub include_poissonization: bool,
}

impl Default for SdeOptions {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            include_poissonization: false,
        }
    }
}

/// Euler–Maruyama integration of the fluctuation SDE
/// `dγ = Σ V_i(x_t) dB_i + ∇b(x_t) γ dt` along the closed-form path,
/// reporting γ at each grid time. With `include_poissonization = false`
/// this is the reduced process γ*; its patch component divided by (1−t)
/// is the α process checked against the exact sampler.
pub struct SdeIntegrator<'a> {
    series: &'a BetaSeries,
    grid: Vec<f64>,
    opts: SdeOptions,
    beta0: f64,
    beta1: f64,
}

impl<'a> SdeIntegrator<'a> {
    pub fn new(series: &'a BetaSeries, grid: &[f64], opts: SdeOptions) -> Result<Self> {
        if !(opts.dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {}", opts.dt)));
        }
        let z_star = series.analyze().z_star;
        validate_grid(grid, z_star)?;
        Ok(Self {
            series,
            grid: grid.to_vec(),
            opts,
            beta0: series.coeffs().first().copied().unwrap_or(0.0),
            beta1: series.coeffs().get(1).copied().unwrap_or(0.0),
        })
    }

    /// One γ path, reported at the grid times.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<[f64; 3]>> {
        let normal = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
        let mut gamma = [
            0.0,
            self.beta1.sqrt() * normal(rng),
            self.beta0.sqrt() * normal(rng),
        ];
        let mut t = 0.0;
        let mut out = Vec::with_capacity(self.grid.len());
        for &target in &self.grid {
            while t < target {
                let dt = self.opts.dt.min(target - t);
                let x = path_point(self.series, t)?;
                let jac = drift_jacobian(self.series, x);
                let rate = (x[1] / (1.0 - x[0])).max(0.0);
                let v1 = rate.sqrt();
                let v2 = ((1.0 - x[0]) * self.series.d2(x[0])).max(0.0).sqrt();
                let sq = dt.sqrt();
                let (g1, g2) = (normal(rng), normal(rng));
                let mut next = gamma;
                for row in 0..3 {
                    let mut d = 0.0;
                    for col in 0..3 {
                        d += jac[row][col] * gamma[col];
                    }
                    next[row] += d * dt;
                }
                next[1] += sq * (v1 * g1 + v2 * g2);
                next[2] += sq * (-v1 * g1);
                if self.opts.include_poissonization {
                    let b = drift(self.series, x)?;
                    let g3 = normal(rng);
                    for k in 0..3 {
                        next[k] += sq * b[k] * g3;
                    }
                }
                gamma = next;
                t += dt;
            }
            out.push(gamma);
        }
        Ok(out)
    }
}

fn validate_grid(grid: &[f64], z_star: f64) -> Result<()> {
    let mut prev = -f64::INFINITY;
    for &t in grid {
        if !(0.0..1.0).contains(&t) || t >= z_star {
            return Err(Error::Domain(format!(
                "grid point {t} outside [0, z*) with z* = {z_star}"
            )));
        }
        if t <= prev {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        prev = t;
    }
    Ok(())
}

/// Uniform grid of `points` values from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| t_max * k as f64 / (points - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::critical_tangent_series;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn drift_at_initial_point() {
        let s = BetaSeries::new(vec![0.3, 0.7, 0.2]).unwrap();
        let b = drift(&s, [0.0, 0.7, 0.3]).unwrap();
        assert_relative_eq!(b[0], 1.0);
        assert_relative_eq!(b[1], -1.0 - 0.7 + s.d2(0.0), epsilon = 1e-15);
        assert_relative_eq!(b[2], 1.0 + 0.7, epsilon = 1e-15);
        assert!(drift(&s, [1.0, 0.1, 0.0]).is_err());
    }

    #[test]
    fn closed_form_solves_the_drift_ode() {
        let s = BetaSeries::new(vec![0.1, 0.3, 0.4, 0.05]).unwrap();
        let grid = uniform_grid(0.5, 101);
        let res = drift_residual(&s, &grid).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn initial_path_point() {
        let s = BetaSeries::new(vec![0.25, 0.5]).unwrap();
        let x = path_point(&s, 0.0).unwrap();
        assert_eq!(x, [0.0, 0.5, 0.25]);
        assert!(path_point(&s, 1.0).is_err());
    }

    #[test]
    fn patch_density_is_one_minus_t_times_threshold() {
        let s = BetaSeries::example21(0.2, 1.5).unwrap();
        for k in 0..50 {
            let t = 0.019 * k as f64;
            let x = path_point(&s, t).unwrap();
            let expect = (1.0 - t) * s.threshold(t).unwrap();
            assert_relative_eq!(x[1], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn drift_patch_component_vanishes_at_tangency() {
        let s = critical_tangent_series();
        let x = path_point(&s, 0.5).unwrap();
        let b = drift(&s, x).unwrap();
        assert!(x[1].abs() < 1e-12, "x2 at tangency: {}", x[1]);
        assert!(b[1].abs() < 1e-12, "b2 at tangency: {}", b[1]);
    }

    #[test]
    fn example22_dip_behavior() {
        // Subcritical: the patch density hits zero near 0.02 and the debris
        // is stuck at about the same value.
        let s = BetaSeries::example22(1185.0).unwrap();
        let lim = limits(&s);
        assert!(lim.z_star > 0.015 && lim.z_star < 0.03);
        let x = path_point(&s, lim.z_star).unwrap();
        assert!((x[2] - lim.z_star).abs() < 0.01, "debris {} vs z* {}", x[2], lim.z_star);
        assert_relative_eq!(x[2], lim.edge_limit, epsilon = 1e-9);

        // Supercritical: the dip near 0.02 stays positive and re-ascends.
        let s = BetaSeries::example22(1200.0).unwrap();
        assert_eq!(limits(&s).z_star, 1.0);
        let dip: f64 = (5..400)
            .map(|k| path_point(&s, k as f64 * 1e-4).unwrap()[1])
            .fold(f64::INFINITY, f64::min)
            ;
        assert!(dip > 0.0, "dip {dip}");
        assert!(dip < 0.3 * path_point(&s, 0.0).unwrap()[1]);
        let later = path_point(&s, 0.2).unwrap()[1];
        assert!(later > 10.0 * dip, "re-ascent {later} vs dip {dip}");
    }

    #[test]
    fn limits_examples() {
        // Pure debris: z* = 0 and only the ∅-edges are identifiable.
        let s = BetaSeries::new(vec![0.8]).unwrap();
        let lim = limits(&s);
        assert_eq!(lim.z_star, 0.0);
        assert_relative_eq!(lim.edge_limit, 0.8, epsilon = 1e-12);

        // Example 2.1: bisection oracle on αz + log(1−z) = log(1−p).
        let (p, alpha) = (0.1, 2.0);
        let target = (1.0f64 - p).ln();
        let g = |z: f64| alpha * z + (1.0 - z).ln() - target;
        let (mut lo, mut hi) = (0.5, 0.99);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let lim = limits(&BetaSeries::example21(p, alpha).unwrap());
        assert!((lim.z_star - root).abs() < 1e-9, "{} vs {root}", lim.z_star);

        // Linear series: both limits in closed form.
        let s = BetaSeries::new(vec![0.0, 0.2]).unwrap();
        let z = 1.0 - (-0.2f64).exp();
        let lim = limits(&s);
        assert!((lim.z_star - z).abs() < 1e-9);
        assert_relative_eq!(
            lim.edge_limit,
            0.2 * z - (1.0 - z) * (1.0 - z).ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn sigma_clock_at_tangency_is_z_over_one_minus_z() {
        let s = critical_tangent_series();
        let report = s.analyze();
        for zero in &report.zeros {
            let z = zero.location;
            assert_relative_eq!(
                s.sigma_sq(z).unwrap(),
                z / (1.0 - z),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn sample_z_no_zeros_returns_z_star() {
        let report = BetaSeries::new(vec![0.0, 0.2]).unwrap().analyze();
        let mut r = rng(1);
        for _ in 0..10 {
            let s = sample_z(&report, &mut r).unwrap();
            assert_eq!(s.value, report.z_star);
            assert!(s.hit_zero_index.is_none());
        }
    }

    #[test]
    fn sample_z_single_tangency_is_a_coin_flip() {
        let report = critical_tangent_series().analyze();
        let n = 10_000;
        let mut r = rng(2);
        let hits = (0..n)
            .filter(|_| sample_z(&report, &mut r).unwrap().hit_zero_index.is_some())
            .count();
        // Exact Binomial(n, 1/2) 99% interval.
        let mean = n as f64 / 2.0;
        let half_width = 2.5758 * (n as f64 * 0.25).sqrt();
        assert!(
            (hits as f64 - mean).abs() < half_width,
            "hits {hits} of {n}"
        );
    }

    #[test]
    fn sample_z_two_tangencies_match_orthant_oracle() {
        // Synthetic report with ζ = {0.3, 0.45}: the mass at the second
        // tangency is P(W(s1) ≥ 0, W(s2) < 0), estimated from direct
        // Gaussian pairs.
        let report = ThresholdReport {
            z_star: 0.6,
            zeros: vec![
                crate::beta::TangencyZero {
                    location: 0.3,
                    residual: 0.0,
                    degenerate: false,
                },
                crate::beta::TangencyZero {
                    location: 0.45,
                    residual: 0.0,
                    degenerate: false,
                },
            ],
            tangency_tolerance: 1e-9,
            degenerate_origin: false,
            f_samples: None,
        };
        let s1: f64 = 0.3 / 0.7;
        let s2: f64 = 0.45 / 0.55;
        let pairs = 10_000_000;
        let mut r = rng(3);
        let mut oracle_hits = 0u64;
        for _ in 0..pairs {
            let g1: f64 = StandardNormal.sample(&mut r);
            let g2: f64 = StandardNormal.sample(&mut r);
            let w1 = s1.sqrt() * g1;
            let w2 = w1 + (s2 - s1).sqrt() * g2;
            if w1 >= 0.0 && w2 < 0.0 {
                oracle_hits += 1;
            }
        }
        let oracle = oracle_hits as f64 / pairs as f64;

        let n = 1_000_000;
        let mut hits2 = 0u64;
        for _ in 0..n {
            let s = sample_z(&report, &mut r).unwrap();
            if s.hit_zero_index == Some(1) {
                hits2 += 1;
            }
        }
        let freq = hits2 as f64 / n as f64;
        let sd = (oracle * (1.0 - oracle) / n as f64).sqrt()
            + (oracle * (1.0 - oracle) / pairs as f64).sqrt();
        assert!(
            (freq - oracle).abs() < 4.0 * sd,
            "freq {freq} vs oracle {oracle} (sd {sd})"
        );
    }

    #[test]
    fn sample_z_rejects_degenerate_zero() {
        let report = BetaSeries::new(vec![0.0, 0.0, 1.0]).unwrap().analyze();
        assert!(report.zeros[0].degenerate);
        assert!(matches!(
            sample_z(&report, &mut rng(4)),
            Err(Error::DegenerateZeroTangency)
        ));
    }

    #[test]
    fn exact_fluctuation_variance_matches_clock() {
        let s = BetaSeries::new(vec![0.0, 0.2, 0.6]).unwrap();
        let grid = [0.0, 0.1, 0.2, 0.3];
        let sampler = FluctuationSampler::new(&s, &grid).unwrap();
        let paths = 10_000;
        let mut r = rng(5);
        let mut acc = vec![0.0f64; grid.len()];
        for _ in 0..paths {
            let alpha = sampler.sample(&mut r);
            for (k, a) in alpha.iter().enumerate() {
                acc[k] += a * a;
            }
        }
        for (k, &t) in grid.iter().enumerate() {
            let var = acc[k] / paths as f64;
            let target = s.sigma_sq(t).unwrap();
            assert!(
                (var - target).abs() <= 0.05 * target.max(1e-12),
                "Var(α_{t}) = {var} vs σ² = {target}"
            );
        }
    }

    #[test]
    fn fluctuation_sign_at_tangency_is_a_fair_coin_in_the_brownian_clock() {
        // At a tangency z the clock is z/(1−z), so sgn(α_z) must match the
        // sign law of W(z/(1−z)): a fair coin, with Var(α_z) = z/(1−z).
        let s = critical_tangent_series();
        let z = 0.5;
        let sampler = FluctuationSampler::new(&s, &[0.3, z]).unwrap();
        let paths = 10_000;
        let mut r = rng(9);
        let mut negatives = 0usize;
        let mut acc = 0.0;
        for _ in 0..paths {
            let alpha = sampler.sample(&mut r);
            if alpha[1] < 0.0 {
                negatives += 1;
            }
            acc += alpha[1] * alpha[1];
        }
        let mean = paths as f64 / 2.0;
        let half_width = 2.5758 * (paths as f64 * 0.25).sqrt();
        assert!(
            (negatives as f64 - mean).abs() < half_width,
            "negative signs {negatives} of {paths}"
        );
        let var = acc / paths as f64;
        let clock = z / (1.0 - z);
        assert!(
            (var - clock).abs() < 0.05 * clock,
            "Var(α_z) = {var} vs clock {clock}"
        );
    }

    #[test]
    fn degenerate_beta_one_gives_zero_initial_fluctuation() {
        let s = BetaSeries::new(vec![0.5, 0.0, 2.0]).unwrap();
        let sampler = FluctuationSampler::new(&s, &[0.0]).unwrap();
        let mut r = rng(6);
        for _ in 0..50 {
            assert_eq!(sampler.sample(&mut r)[0], 0.0);
        }
    }

    #[test]
    fn sde_integrator_refinement_tracks_exact_clock() {
        // One configuration, step halving: the weak error of Var(α) must
        // stay within tolerance and not degrade as the step shrinks.
        let s = BetaSeries::new(vec![0.0, 0.2, 0.6]).unwrap();
        let t_end = 0.3;
        let target = s.sigma_sq(t_end).unwrap();
        let paths = 4000;
        let mut errors = Vec::new();
        for (seed, dt) in [(7u64, 2e-3), (8u64, 1e-3)] {
            let integ = SdeIntegrator::new(
                &s,
                &[t_end],
                SdeOptions {
                    dt,
                    include_poissonization: false,
                },
            )
            .unwrap();
            let mut r = rng(seed);
            let mut acc = 0.0;
            for _ in 0..paths {
                let gamma = integ.sample(&mut r).unwrap()[0];
                let alpha = gamma[1] / (1.0 - t_end);
                acc += alpha * alpha;
            }
            let var = acc / paths as f64;
            errors.push((var - target).abs() / target);
        }
        assert!(errors[0] < 0.10, "coarse step error {}", errors[0]);
        assert!(errors[1] < 0.10, "fine step error {}", errors[1]);
    }

    #[test]
    fn sde_grid_validation() {
        let s = BetaSeries::new(vec![0.0, 0.2]).unwrap();
        // z* ≈ 0.18: a grid point beyond it must be rejected.
        assert!(FluctuationSampler::new(&s, &[0.0, 0.5]).is_err());
        assert!(FluctuationSampler::new(&s, &[0.1, 0.1]).is_err());
        assert!(SdeIntegrator::new(&s, &[0.5], SdeOptions::default()).is_err());
    }
}
