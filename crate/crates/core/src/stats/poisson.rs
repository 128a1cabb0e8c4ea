//! Minimal gaps of `N` independent uniform points on `[0, N]`.
//!
//! Trial `i` under seed `s` reads ChaCha8 keyed by `s` on stream `i`.
//! A uniform is `(x >> 11) · 2⁻⁵³` for the next 64-bit output `x`, so the
//! sample is the same on every platform. Trials run in parallel and are
//! collected in trial order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Quantile levels reported for every distribution.
pub const QUANTILE_LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PoissonExperiment {
    #[serde(rename = "N")]
    pub count: u64,
    pub trials: u64,
    pub seed: u64,
    pub k: usize,
}

impl PoissonExperiment {
    pub fn new(count: u64, trials: u64, seed: u64, k: usize) -> Result<Self> {
        let exp = PoissonExperiment { count, trials, seed, k };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidArgument("N must be at least 2".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.k < 1 || self.k as u64 > self.count - 1 {
            return Err(Error::InvalidArgument(format!("k must lie in [1, N - 1], got {}", self.k)));
        }
        Ok(())
    }
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits.
pub(crate) fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The `k` smallest consecutive gaps of sorted points, ascending.
pub(crate) fn smallest_gaps(sorted: &[f64], k: usize) -> Vec<f64> {
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let k = k.min(gaps.len());
    if k == 0 {
        return Vec::new();
    }
    gaps.select_nth_unstable_by(k - 1, f64::total_cmp);
    gaps.truncate(k);
    gaps.sort_unstable_by(f64::total_cmp);
    gaps
}

/// `N·δ_min,j` for `j = 1..=k` in one trial.
pub fn trial_gaps(count: u64, seed: u64, trial: u64, k: usize) -> Vec<f64> {
    let mut rng = rng_for(seed, trial);
    let n = count as f64;
    let mut pts: Vec<f64> = (0..count).map(|_| uniform(&mut rng) * n).collect();
    pts.sort_unstable_by(f64::total_cmp);
    smallest_gaps(&pts, k).into_iter().map(|g| g * n).collect()
}

/// Per-trial `N·δ_min,j`, `j = 1..=k`, in trial order.
pub(crate) fn sample(count: u64, trials: u64, seed: u64, k: usize) -> Vec<Vec<f64>> {
    (0..trials).into_par_iter().map(|t| trial_gaps(count, seed, t, k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quantile {
    pub level: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub quantiles: Vec<Quantile>,
    pub median: f64,
    /// Median of the large-`N` limit law `Gamma(k, 1)`.
    pub limit_median: f64,
    /// Kolmogorov–Smirnov distance to the limit law.
    pub ks_limit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonDistribution {
    pub experiment: PoissonExperiment,
    pub summary: Summary,
    /// Kolmogorov–Smirnov distance to the exact finite-`N` law (`k = 1` only).
    pub ks_exact: Option<f64>,
    /// Sorted `N·δ_min,k` over all trials.
    pub samples: Vec<f64>,
}

impl PoissonDistribution {
    /// Fraction of samples `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        ecdf(&self.samples, x)
    }
}

pub(crate) fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&s| s <= x) as f64 / sorted.len() as f64
}

/// `P(Gamma(k, 1) ≤ t) = 1 − e^{−t} Σ_{j<k} t^j/j!`.
pub fn limit_cdf(k: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= t / j as f64;
        sum += term;
    }
    (1.0 - (-t).exp() * sum).clamp(0.0, 1.0)
}

/// Exact `P(N·δ_min ≤ t)` for `N` uniform points on `[0, N]`:
/// `1 − (1 − (N − 1)t/N²)^N`.
pub fn exact_min_gap_cdf(count: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let n = count as f64;
    let base = 1.0 - (n - 1.0) * t / (n * n);
    if base <= 0.0 {
        return 1.0;
    }
    1.0 - (n * base.ln()).exp()
}

fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Median of `Gamma(k, 1)`; `ln 2` for `k = 1`, `1.67835…` for `k = 2`.
pub fn limit_median(k: usize) -> f64 {
    bisect(|t| limit_cdf(k, t), 0.5, 0.0, 2.0 * k as f64 + 2.0)
}

pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn summarize(sorted: &[f64], k: usize) -> Summary {
    Summary {
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        quantiles: QUANTILE_LEVELS.iter().map(|&level| Quantile { level, value: quantile(sorted, level) }).collect(),
        median: quantile(sorted, 0.5),
        limit_median: limit_median(k),
        ks_limit: ks_distance(sorted, |t| limit_cdf(k, t)),
    }
}

pub(crate) fn distribution(experiment: PoissonExperiment, mut samples: Vec<f64>) -> PoissonDistribution {
    samples.sort_unstable_by(f64::total_cmp);
    let k = experiment.k;
    let ks_exact = (k == 1).then(|| ks_distance(&samples, |t| exact_min_gap_cdf(experiment.count, t)));
    PoissonDistribution { experiment, summary: summarize(&samples, k), ks_exact, samples }
}

/// Empirical distribution of `N·δ_min,k(N)` over independent trials.
pub fn poisson_min_gap(experiment: &PoissonExperiment) -> Result<PoissonDistribution> {
    experiment.validate()?;
    let e = *experiment;
    let samples = sample(e.count, e.trials, e.seed, e.k).into_iter().map(|g| g[e.k - 1]).collect();
    Ok(distribution(e, samples))
}

/// Frequencies of the events behind the Devroye laws at `N = 2^j`.
///
/// Each trial is one sequence `X₁, X₂, …` uniform on `[0, 1)`; row `j`
/// looks at its first `N` terms, scaled to `[0, N]`. `ever_*` counts trials
/// where the event happened at some `2^i ≤ N`, and is nondecreasing in `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DevroyeRow {
    pub j: u32,
    #[serde(rename = "N")]
    pub count: u64,
    /// `N·δ_min ≤ 1/log N`.
    pub min_below_inv_log: f64,
    pub ever_min_below_inv_log: f64,
    /// `N·δ_min,2 < (log N)^{−2/3}`.
    pub second_below_inv_log_23: f64,
    pub ever_second_below_inv_log_23: f64,
    /// `N·δ_min ≥ log log N`.
    pub min_above_loglog: f64,
    pub ever_min_above_loglog: f64,
    /// `N·δ_min ≥ (log log N)²`.
    pub min_above_loglog_sq: f64,
    pub ever_min_above_loglog_sq: f64,
}

const DEVROYE_EVENTS: usize = 4;

fn devroye_trial(seed: u64, trial: u64, j_min: u32, j_max: u32) -> Vec<[bool; DEVROYE_EVENTS]> {
    let mut rng = rng_for(seed, trial);
    let all: Vec<f64> = (0..1u64 << j_max).map(|_| uniform(&mut rng)).collect();
    (j_min..=j_max)
        .map(|j| {
            let n = 1usize << j;
            let mut pts = all[..n].to_vec();
            pts.sort_unstable_by(f64::total_cmp);
            let nf = n as f64;
            let g = smallest_gaps(&pts, 2);
            let (g1, g2) = (g[0] * nf * nf, g[1] * nf * nf);
            let ln = nf.ln();
            let lln = ln.ln();
            [g1 <= 1.0 / ln, g2 < ln.powf(-2.0 / 3.0), g1 >= lln, g1 >= lln * lln]
        })
        .collect()
}

pub fn devroye_frequencies(j_min: u32, j_max: u32, trials: u64, seed: u64) -> Result<Vec<DevroyeRow>> {
    if j_min < 2 || j_min > j_max || j_max > 24 {
        return Err(Error::InvalidArgument("need 2 <= j_min <= j_max <= 24".into()));
    }
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let per_trial: Vec<_> = (0..trials).into_par_iter().map(|t| devroye_trial(seed, t, j_min, j_max)).collect();
    let rows = (j_max - j_min + 1) as usize;
    let mut now = vec![[0u64; DEVROYE_EVENTS]; rows];
    let mut ever = vec![[0u64; DEVROYE_EVENTS]; rows];
    for events in &per_trial {
        let mut seen = [false; DEVROYE_EVENTS];
        for (r, ev) in events.iter().enumerate() {
            for e in 0..DEVROYE_EVENTS {
                seen[e] |= ev[e];
                now[r][e] += ev[e] as u64;
                ever[r][e] += seen[e] as u64;
            }
        }
    }
    let f = |c: u64| c as f64 / trials as f64;
    Ok((0..rows)
        .map(|r| DevroyeRow {
            j: j_min + r as u32,
            count: 1 << (j_min + r as u32),
            min_below_inv_log: f(now[r][0]),
            ever_min_below_inv_log: f(ever[r][0]),
            second_below_inv_log_23: f(now[r][1]),
            ever_second_below_inv_log_23: f(ever[r][1]),
            min_above_loglog: f(now[r][2]),
            ever_min_above_loglog: f(ever[r][2]),
            min_above_loglog_sq: f(now[r][3]),
            ever_min_above_loglog_sq: f(ever[r][3]),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_medians() {
        assert!((limit_median(1) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((limit_median(2) - 1.678_346_990).abs() < 1e-8);
    }

    #[test]
    fn exact_law_tends_to_exponential() {
        for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let limit = 1.0 - (-t as f64).exp();
            let errs: Vec<f64> = [10u64, 100, 1000, 10_000, 100_000]
                .iter()
                .map(|&n| (exact_min_gap_cdf(n, t) - limit).abs())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "t = {t}: {errs:?}");
            assert!(errs[4] < 1e-4);
        }
    }

    #[test]
    fn two_points() {
        let d = poisson_min_gap(&PoissonExperiment::new(2, 1, 7, 1).unwrap()).unwrap();
        let mut rng = rng_for(7, 0);
        let (u1, u2) = (2.0 * uniform(&mut rng), 2.0 * uniform(&mut rng));
        assert_eq!(d.samples, vec![2.0 * (u1 - u2).abs()]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let e = PoissonExperiment::new(500, 40, 11, 2).unwrap();
        assert_eq!(poisson_min_gap(&e).unwrap(), poisson_min_gap(&e).unwrap());
        let other = PoissonExperiment { seed: 12, ..e };
        assert_ne!(poisson_min_gap(&e).unwrap().samples, poisson_min_gap(&other).unwrap().samples);
    }

    #[test]
    fn devroye_cumulative_frequencies_grow() {
        let rows = devroye_frequencies(4, 10, 200, 3).unwrap();
        assert_eq!(rows.len(), 7);
        for w in rows.windows(2) {
            assert!(w[1].ever_min_below_inv_log >= w[0].ever_min_below_inv_log);
            assert!(w[1].ever_min_above_loglog >= w[0].ever_min_above_loglog);
        }
        for r in &rows {
            assert!(r.ever_min_below_inv_log >= r.min_below_inv_log);
        }
    }

    #[test]
    fn rejects_bad_experiments() {
        assert!(PoissonExperiment::new(1, 1, 0, 1).is_err());
        assert!(PoissonExperiment::new(10, 0, 0, 1).is_err());
        assert!(PoissonExperiment::new(10, 1, 0, 10).is_err());
    }
}
