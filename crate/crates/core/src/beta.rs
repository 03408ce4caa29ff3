//! The coefficient series β and the thresholds derived from it.
//!
//! A series is a finite list of nonnegative coefficients `β_0..β_J`; the
//! generating function is `β(t) = Σ β_j t^j`. Everything downstream is driven
//! by the threshold function
//!
//! ```text
//! f(t) = β'(t) + log(1 − t),      t ∈ [0, 1),
//! ```
//!
//! whose first strict sign change is the limiting collapse fraction `z*`,
//! and whose tangential zeros before `z*` (the set ζ) mark the critical
//! configurations where the limit of the collapse fraction stays random.
//!
//! Infinite coefficient families enter only through [`BetaSeries::from_rule`],
//! which truncates at a chosen index and reports the discarded tail mass.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Finite-support coefficient series with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSeries {
    coeffs: Vec<f64>,
}

impl BetaSeries {
    /// Builds a series from raw coefficients. Trailing zeros are trimmed.
    ///
    /// Every coefficient must be finite and nonnegative. A series with no
    /// positive coefficient of index ≥ 1 is allowed (pure debris) and can be
    /// detected with [`BetaSeries::is_pure_debris`].
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSeries("no coefficients".into()));
        }
        for (j, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidSeries(format!(
                    "coefficient {j} is {c}, must be finite and nonnegative"
                )));
            }
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    /// The random-graph-with-distinguished-vertices example: vertices open
    /// with probability `p`, edges with probability `α/N`. In series form
    /// `β_1 = −log(1−p)`, `β_2 = α/2`.
    pub fn example21(p: f64, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) || !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidSeries(format!(
                "example21 needs p in [0,1) and alpha >= 0, got p={p}, alpha={alpha}"
            )));
        }
        Self::new(vec![0.0, -(-p).ln_1p(), alpha / 2.0])
    }

    /// The critical-phenomena example `β(t) = α(0.1 + 0.9t)^7`, expanded to
    /// coefficients `β_j = α C(7,j) 0.1^(7−j) 0.9^j`.
    pub fn example22(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidSeries(format!(
                "example22 needs alpha >= 0, got {alpha}"
            )));
        }
        let mut coeffs = Vec::with_capacity(8);
        for j in 0..=7u32 {
            let binom = binomial_7(j);
            coeffs.push(alpha * binom * 0.1f64.powi(7 - j as i32) * 0.9f64.powi(j as i32));
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest index with a stored coefficient (after trailing-zero trim).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when no coefficient of index ≥ 1 is positive: such a series
    /// produces only debris and nothing is ever identifiable.
    pub fn is_pure_debris(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0.0)
    }

    /// β(t) by Horner recurrence.
    pub fn value(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// β'(t) = Σ j β_j t^(j−1).
    pub fn d1(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for j in (1..self.coeffs.len()).rev() {
            acc = acc * t + j as f64 * self.coeffs[j];
        }
        acc
    }

    /// β''(t) = Σ j(j−1) β_j t^(j−2).
    pub fn d2(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for j in (2..self.coeffs.len()).rev() {
            acc = acc * t + (j * (j - 1)) as f64 * self.coeffs[j];
        }
        acc
    }

    /// β'''(t), needed by the Jacobian of the fluctuation drift.
    pub(crate) fn d3(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for j in (3..self.coeffs.len()).rev() {
            acc = acc * t + (j * (j - 1) * (j - 2)) as f64 * self.coeffs[j];
        }
        acc
    }

    /// Derivative of the requested order (0, 1 or 2) at `t`.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        match order {
            0 => self.value(t),
            1 => self.d1(t),
            2 => self.d2(t),
            _ => panic!("order must be 0, 1 or 2"),
        }
    }

    /// The threshold function `f(t) = β'(t) + log(1−t)`.
    pub fn threshold(&self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Domain(format!(
                "threshold needs t in [0,1), got {t}"
            )));
        }
        Ok(self.threshold_unchecked(t))
    }

    #[inline]
    pub(crate) fn threshold_unchecked(&self, t: f64) -> f64 {
        // ln_1p keeps the log accurate without forming 1 - t separately.
        self.d1(t) + (-t).ln_1p()
    }

    /// Variance clock of the reduced patch-density fluctuation:
    /// `σ_t² = (β'(t) + log(1−t) + t) / (1−t)`, with `σ_0² = β_1`.
    pub fn sigma_sq(&self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Domain(format!("sigma_sq needs t in [0,1), got {t}")));
        }
        Ok((self.threshold_unchecked(t) + t) / (1.0 - t))
    }

    /// Keeps coefficients with index ≤ `m`; returns the truncated series and
    /// the exact discarded tail mass `Σ_{j>m} β_j`.
    pub fn truncate(&self, m: usize) -> (BetaSeries, f64) {
        let keep = self.coeffs.len().min(m + 1);
        let tail: f64 = self.coeffs[keep..].iter().sum();
        let series = BetaSeries::new(self.coeffs[..keep].to_vec())
            .expect("truncation preserves validity");
        (series, tail)
    }

    /// Builds the truncation of an infinite coefficient rule `j ↦ β_j`,
    /// keeping indices ≤ `m`. The reported tail mass is a numerical estimate
    /// of `Σ_{j>m} rule(j)` obtained by summing until the terms are
    /// negligible; the rule must be summable for the estimate to mean
    /// anything.
    pub fn from_rule(rule: impl Fn(usize) -> f64, m: usize) -> Result<(BetaSeries, f64)> {
        let coeffs: Vec<f64> = (0..=m).map(&rule).collect();
        let series = BetaSeries::new(coeffs)?;
        let mut tail = 0.0;
        for j in (m + 1)..(m + 1 + 100_000) {
            let term = rule(j);
            if !term.is_finite() || term < 0.0 {
                return Err(Error::InvalidSeries(format!(
                    "rule produced {term} at index {j}"
                )));
            }
            tail += term;
            if term <= 1e-18 * (tail + 1.0) {
                break;
            }
        }
        Ok((series, tail))
    }

    /// Scans `f` on [0, 1) for its first strict sign change and its
    /// tangential zeros, with default tolerances.
    pub fn analyze(&self) -> ThresholdReport {
        self.analyze_with(&AnalyzeOptions::default())
    }

    /// [`BetaSeries::analyze`] with explicit scan/refinement tolerances.
    ///
    /// `z_star` is reported as 1 when no sign change occurs before
    /// `1 − near_one_cutoff`; zeros of `f` can accumulate only at 1, so the
    /// scan resolution near 1 is a documented limitation rather than a
    /// guarantee.
    pub fn analyze_with(&self, opts: &AnalyzeOptions) -> ThresholdReport {
        let f = |t: f64| self.threshold_unchecked(t);
        let h = opts.scan_step;
        let cutoff = 1.0 - opts.near_one_cutoff;
        let tol = opts.tangency_tol;
        let degenerate_origin = self.coeffs.len() < 2 || self.coeffs[1] == 0.0;

        // Scan until the first value below -tol (a genuine crossing, not a
        // rounding-level tangency dip).
        let mut grid: Vec<(f64, f64)> = Vec::new();
        let mut crossing_at: Option<usize> = None;
        let mut i = 0usize;
        loop {
            let t = i as f64 * h;
            if t >= cutoff {
                break;
            }
            let ft = f(t);
            grid.push((t, ft));
            if ft < -tol {
                crossing_at = Some(i);
                break;
            }
            i += 1;
        }

        let z_star = match crossing_at {
            None => 1.0,
            Some(ci) => {
                // Walk back to a strictly positive bracket endpoint.
                let mut a = ci;
                while a > 0 && grid[a - 1].1 <= tol {
                    a -= 1;
                }
                if a == 0 {
                    // f(0) = β_1 is never < 0; this branch is the β_1 = 0
                    // series whose threshold dips immediately.
                    0.0
                } else {
                    bisect_sign_change(&f, grid[a - 1].0, grid[ci].0, opts.bisect_width)
                }
            }
        };

        // Tangential zeros: refine every interior local minimum of the
        // sampled values that sits strictly before z_star.
        let mut zeros: Vec<TangencyZero> = Vec::new();
        if degenerate_origin && z_star > 0.0 {
            zeros.push(TangencyZero {
                location: 0.0,
                residual: 0.0,
                degenerate: true,
            });
        }
        let scan_len = match crossing_at {
            Some(ci) => ci.saturating_sub(1), // keep clear of the crossing dip
            None => grid.len(),
        };
        for k in 1..scan_len.saturating_sub(1) {
            let (_, fm) = grid[k];
            if fm <= grid[k - 1].1 && fm <= grid[k + 1].1 {
                let (c, fc) = refine_minimum(&f, grid[k - 1].0, grid[k + 1].0, opts.bisect_width);
                if fc.abs() <= tol
                    && c < z_star
                    && !zeros
                        .iter()
                        .any(|z| (z.location - c).abs() <= 2.0 * h)
                {
                    zeros.push(TangencyZero {
                        location: c,
                        residual: fc.abs(),
                        degenerate: false,
                    });
                }
            }
        }
        zeros.sort_by(|a, b| a.location.total_cmp(&b.location));

        let f_samples = opts.sample_count.map(|n| {
            let n = n.max(2);
            let top = if z_star < 1.0 { z_star } else { cutoff };
            (0..n)
                .map(|k| {
                    let t = top * k as f64 / (n - 1) as f64;
                    (t, f(t))
                })
                .collect()
        });

        ThresholdReport {
            z_star,
            zeros,
            tangency_tolerance: tol,
            degenerate_origin,
            f_samples,
        }
    }
}

// C(7, j) for the degree-7 preset.
fn binomial_7(j: u32) -> f64 {
    const ROW: [f64; 8] = [1.0, 7.0, 21.0, 35.0, 35.0, 21.0, 7.0, 1.0];
    ROW[j as usize]
}

/// Bisection on a bracketed sign change: `f(lo) > 0 > f(hi)` on entry.
fn bisect_sign_change(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    debug_assert!(f(lo) >= 0.0 && f(hi) < 0.0);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of a locally unimodal function.
fn refine_minimum(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let c = 0.5 * (lo + hi);
    (c, f(c))
}

/// Tolerances for [`BetaSeries::analyze_with`].
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Uniform scan step over [0, 1).
    pub scan_step: f64,
    /// Final bracket width for bisection and minimum refinement.
    pub bisect_width: f64,
    /// |f| below this at a local minimum counts as a tangential zero, and a
    /// scan value must drop below its negative to count as a crossing.
    pub tangency_tol: f64,
    /// Scanning stops at `1 − near_one_cutoff`; no sign change by then
    /// reports `z* = 1`.
    pub near_one_cutoff: f64,
    /// When set, the report carries this many (t, f(t)) samples on [0, z*].
    pub sample_count: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            scan_step: 1e-4,
            bisect_width: 1e-12,
            tangency_tol: 1e-9,
            near_one_cutoff: 1e-6,
            sample_count: None,
        }
    }
}

/// A refined tangential zero of the threshold function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangencyZero {
    pub location: f64,
    /// |f| at the refined location; the numerical confidence of the zero.
    pub residual: f64,
    /// True only for the zero at t = 0 produced by β_1 = 0.
    pub degenerate: bool,
}

/// Output of [`BetaSeries::analyze`]: the collapse threshold `z*` and the
/// tangential zeros ζ of `f` before it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub z_star: f64,
    pub zeros: Vec<TangencyZero>,
    pub tangency_tolerance: f64,
    /// β_1 = 0: the chain starts with no patches and the limit theorems
    /// exclude this configuration.
    pub degenerate_origin: bool,
    pub f_samples: Option<Vec<(f64, f64)>>,
}

impl ThresholdReport {
    /// Human-readable regime tag: generic (ζ empty), critical (ζ nonempty)
    /// or degenerate (β_1 = 0).
    pub fn regime(&self) -> &'static str {
        if self.degenerate_origin {
            "degenerate"
        } else if self.zeros.is_empty() {
            "generic"
        } else {
            "critical"
        }
    }
}

/// The canonical critical test configuration: a series whose threshold
/// function has a double zero at exactly t = 1/2, so ζ = {1/2}.
///
/// Support {1, 7} with `β_7 = 32/21` and `β_1 = ln 2 − 1/6` solves
/// `f(1/2) = 0` and `f'(1/2) = 0` exactly in rationals (the tangency
/// condition `β''(1/2) = 2` reads `42 β_7 / 32 = 2`). The curvature
/// `f''(1/2) = 210 β_7/16 − 4 = 16` keeps the tangency narrow, which is
/// what makes the coin-flip outcome visible at simulable N: after the
/// near-miss the patch density recovers fast and survivors run to
/// near-total collapse (f stays positive until ~1 − 1.4e-5, so the
/// reported threshold is 1).
///
/// No cubic with nonnegative coefficients has a tangency at t = 1/2:
/// tangency from above needs `6β_3 > 1/(1−c)²` while `β_2 ≥ 0` forces
/// `6β_3 ≤ 1/(c(1−c))`, which is impossible for c ≥ 1/2. Higher degree is
/// the only way to place the double zero there.
pub fn critical_tangent_series() -> BetaSeries {
    let beta7 = 32.0 / 21.0;
    let beta1 = std::f64::consts::LN_2 - 1.0 / 6.0;
    BetaSeries::new(vec![0.0, beta1, 0.0, 0.0, 0.0, 0.0, 0.0, beta7])
        .expect("constants are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_matches_example21_derivative() {
        let s = BetaSeries::new(vec![0.0, -(0.9f64.ln()), 0.25]).unwrap();
        for &t in &[0.0, 0.3, 0.7, 1.0] {
            assert_relative_eq!(s.d1(t), -(0.9f64.ln()) + 0.5 * t, max_relative = 1e-14);
        }
    }

    #[test]
    fn eval_at_zero_is_constant_term() {
        let s = BetaSeries::new(vec![2.5, 1.0, 3.0]).unwrap();
        assert_eq!(s.value(0.0), 2.5);
    }

    #[test]
    fn eval_cross_checks_binomial_expansion() {
        // Oracle: evaluate 1185(0.1+0.9t)^7 and its derivatives directly.
        let alpha = 1185.0;
        let s = BetaSeries::example22(alpha).unwrap();
        let direct = |t: f64| alpha * (0.1 + 0.9 * t).powi(7);
        let direct_d1 = |t: f64| alpha * 7.0 * 0.9 * (0.1 + 0.9 * t).powi(6);
        let direct_d2 = |t: f64| alpha * 42.0 * 0.81 * (0.1 + 0.9 * t).powi(5);
        for &t in &[0.0, 0.5, 1.0] {
            assert_relative_eq!(s.value(t), direct(t), max_relative = 1e-12);
            assert_relative_eq!(s.d1(t), direct_d1(t), max_relative = 1e-12);
            assert_relative_eq!(s.d2(t), direct_d2(t), max_relative = 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = BetaSeries::new(vec![0.1, 0.4, 0.3, 0.0, 0.2]).unwrap();
        let h = 1e-6;
        for k in 1..9 {
            let t = 0.1 * k as f64;
            let fd1 = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
            let fd2 = (s.d1(t + h) - s.d1(t - h)) / (2.0 * h);
            assert_relative_eq!(s.d1(t), fd1, max_relative = 1e-6);
            assert_relative_eq!(s.d2(t), fd2, max_relative = 1e-6);
        }
    }

    #[test]
    fn threshold_examples() {
        // β_1-only: f(0) = β_1.
        let s = BetaSeries::new(vec![0.0, 0.7]).unwrap();
        assert_eq!(s.threshold(0.0).unwrap(), 0.7);

        // Example 2.1 closed form.
        let p = 0.1;
        let alpha = 0.5;
        let s = BetaSeries::example21(p, alpha).unwrap();
        for &t in &[0.0, 0.25, 0.5, 0.9] {
            let expect = -(1.0 - p).ln() + t * alpha + (1.0 - t).ln();
            assert_relative_eq!(s.threshold(t).unwrap(), expect, epsilon = 1e-14);
        }

        // Direct arithmetic: β = 0.2t + 0.6t² at t = 0.5.
        let s = BetaSeries::new(vec![0.0, 0.2, 0.6]).unwrap();
        assert_relative_eq!(
            s.threshold(0.5).unwrap(),
            0.2 + 0.6 - 2.0f64.ln(),
            epsilon = 1e-14
        );

        assert!(s.threshold(1.0).is_err());
        assert!(s.threshold(-0.1).is_err());
    }

    #[test]
    fn analyze_pure_linear_series() {
        // f(t) = 0.2 + log(1−t) solves exactly: z* = 1 − e^{−0.2}.
        let s = BetaSeries::new(vec![0.0, 0.2]).unwrap();
        let report = s.analyze();
        assert_relative_eq!(report.z_star, 1.0 - (-0.2f64).exp(), epsilon = 1e-9);
        assert!(report.zeros.is_empty());
        assert!(!report.degenerate_origin);
        assert_eq!(report.regime(), "generic");
    }

    #[test]
    fn analyze_example22_subcritical() {
        let report = BetaSeries::example22(1185.0).unwrap().analyze();
        assert!(report.z_star > 0.015 && report.z_star < 0.03, "z* = {}", report.z_star);
        assert!(report.zeros.is_empty());
    }

    #[test]
    fn analyze_example22_supercritical() {
        let report = BetaSeries::example22(1200.0).unwrap().analyze();
        assert_eq!(report.z_star, 1.0);
        assert!(report.zeros.is_empty());
    }

    #[test]
    fn analyze_detects_constructed_tangency() {
        let s = critical_tangent_series();
        // The construction really is a tangency: f >= 0 densely on [0, z*).
        let report = s.analyze();
        assert_eq!(report.zeros.len(), 1, "zeros: {:?}", report.zeros);
        let zero = &report.zeros[0];
        assert!((zero.location - 0.5).abs() < 1e-6, "location {}", zero.location);
        assert!(zero.residual <= 1e-9);
        assert!(!zero.degenerate);
        assert!(report.z_star > 0.5);
        assert_eq!(report.regime(), "critical");

        for k in 0..5000 {
            let t = 0.999 * k as f64 / 5000.0;
            assert!(
                s.threshold_unchecked(t) >= -1e-9,
                "f({t}) < -tol before z*"
            );
        }
    }

    #[test]
    fn analyze_bracket_straddles_z_star() {
        for s in [
            BetaSeries::new(vec![0.0, 0.2]).unwrap(),
            BetaSeries::example21(0.1, 2.0).unwrap(),
            BetaSeries::example22(1185.0).unwrap(),
        ] {
            let z = s.analyze().z_star;
            assert!(z > 0.0 && z < 1.0);
            let h = 1e-9;
            assert!(s.threshold_unchecked(z - h) >= 0.0);
            assert!(s.threshold_unchecked(z + h) < 0.0);
        }
    }

    #[test]
    fn analyze_degenerate_origin() {
        // β_1 = 0 with strong β_2: f(0) = 0 then rises, so the zero at the
        // origin is reported degenerate and z* stays away from 0.
        let s = BetaSeries::new(vec![0.0, 0.0, 1.0]).unwrap();
        let report = s.analyze();
        assert!(report.degenerate_origin);
        assert_eq!(report.zeros.len(), 1);
        assert!(report.zeros[0].degenerate);
        assert_eq!(report.zeros[0].location, 0.0);
        assert!(report.z_star > 0.7);

        // Pure debris: f = log(1−t) < 0 immediately, z* = 0.
        let s = BetaSeries::new(vec![1.0]).unwrap();
        let report = s.analyze();
        assert_eq!(report.z_star, 0.0);
        assert!(report.zeros.is_empty());
        assert!(report.degenerate_origin);
        assert!(s.is_pure_debris());
        assert_eq!(report.regime(), "degenerate");
    }

    #[test]
    fn sigma_sq_examples() {
        let s = BetaSeries::new(vec![0.3, 0.8, 0.1]).unwrap();
        assert_relative_eq!(s.sigma_sq(0.0).unwrap(), 0.8, epsilon = 1e-15);

        // β_1-only closed form.
        let s = BetaSeries::new(vec![0.0, 0.4]).unwrap();
        for &t in &[0.1f64, 0.5, 0.9] {
            let expect = (0.4 + (1.0 - t).ln() + t) / (1.0 - t);
            assert_relative_eq!(s.sigma_sq(t).unwrap(), expect, epsilon = 1e-12);
        }
        assert!(s.sigma_sq(1.0).is_err());
    }

    #[test]
    fn sigma_sq_matches_quadrature_of_variance_rate() {
        // Oracle: σ_t² = β_1 + ∫₀ᵗ (f(s) + (1−s)β''(s)) / (1−s)² ds via
        // Simpson's rule; the integrand is the per-time variance of the
        // reduced fluctuation.
        let s = BetaSeries::new(vec![0.0, 0.2, 0.6]).unwrap();
        let t = 0.5;
        let integrand = |u: f64| {
            (s.threshold_unchecked(u) + (1.0 - u) * s.d2(u)) / ((1.0 - u) * (1.0 - u))
        };
        let n = 10_000;
        let h = t / n as f64;
        let mut acc = integrand(0.0) + integrand(t);
        for k in 1..n {
            let w = if k % 2 == 0 { 2.0 } else { 4.0 };
            acc += w * integrand(k as f64 * h);
        }
        let oracle = 0.2 + acc * h / 3.0;
        assert_relative_eq!(s.sigma_sq(t).unwrap(), oracle, epsilon = 1e-9);
        // Closed-form spot value for the same configuration.
        assert_relative_eq!(
            s.sigma_sq(t).unwrap(),
            (0.8 + 0.5f64.ln() + 0.5) / 0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sigma_sq_identity() {
        // σ_t²(1−t) − t − log(1−t) = β'(t), algebraically.
        let s = BetaSeries::new(vec![0.1, 0.5, 0.2, 0.3]).unwrap();
        for k in 0..20 {
            let t = 0.049 * k as f64;
            let lhs = s.sigma_sq(t).unwrap() * (1.0 - t) - t - (-t).ln_1p();
            assert_relative_eq!(lhs, s.d1(t), epsilon = 1e-12);
        }
    }

    #[test]
    fn truncate_geometric_rule() {
        let (series, tail) = BetaSeries::from_rule(|j| 0.5f64.powi(j as i32), 3).unwrap();
        assert_eq!(series.coeffs(), &[1.0, 0.5, 0.25, 0.125]);
        // Geometric sum oracle: Σ_{j>3} 2^{−j} = 2^{−3}.
        assert_relative_eq!(tail, 0.125, epsilon = 1e-12);

        let (debris, tail) = BetaSeries::from_rule(|j| 0.5f64.powi(j as i32), 0).unwrap();
        assert!(debris.is_pure_debris());
        assert_relative_eq!(tail, 1.0, epsilon = 1e-12);

        let s = BetaSeries::new(vec![0.5, 0.25, 0.125, 0.0625]).unwrap();
        let (t2, tail) = s.truncate(1);
        assert_eq!(t2.coeffs(), &[0.5, 0.25]);
        assert_relative_eq!(tail, 0.1875, epsilon = 1e-15);
    }

    #[test]
    fn scaling_up_coefficients_never_shrinks_z_star() {
        let base = [
            BetaSeries::new(vec![0.0, 0.1, 0.4]).unwrap(),
            BetaSeries::new(vec![0.2, 0.3, 0.0, 0.1]).unwrap(),
            BetaSeries::example21(0.05, 1.2).unwrap(),
        ];
        for s in base {
            let z0 = s.analyze().z_star;
            for lambda in [1.1, 1.5, 3.0] {
                let scaled: Vec<f64> = s
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| if j >= 1 { c * lambda } else { c })
                    .collect();
                let z1 = BetaSeries::new(scaled).unwrap().analyze().z_star;
                assert!(
                    z1 >= z0 - 1e-9,
                    "scaling by {lambda} shrank z* from {z0} to {z1}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_series() {
        assert!(BetaSeries::new(vec![]).is_err());
        assert!(BetaSeries::new(vec![0.1, -0.2]).is_err());
        assert!(BetaSeries::new(vec![f64::NAN]).is_err());
        assert!(BetaSeries::example21(1.0, 2.0).is_err());
        assert!(BetaSeries::example22(-1.0).is_err());
    }

    #[test]
    fn critical_series_is_exactly_tangent() {
        let s = critical_tangent_series();
        let f_half = s.threshold_unchecked(0.5);
        assert!(f_half.abs() < 1e-14, "f(1/2) = {f_half}");
        // f'(1/2) = β''(1/2) − 2, and β''(1/2) = 42 β_7 / 32 = 2.
        let fp_half = s.d2(0.5) - 2.0;
        assert!(fp_half.abs() < 1e-14, "f'(1/2) = {fp_half}");
        // Curvature 16 keeps the double zero narrow.
        let curvature = s.d3(0.5) - 4.0;
        assert!((curvature - 16.0).abs() < 1e-12, "f''(1/2) = {curvature}");
    }
}
