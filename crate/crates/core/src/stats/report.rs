//! The billiard's `N·δ_min` and `N·δ_min,2` against Poisson samples, and
//! the quadrupling check: a gap between `(m, n)` and `(m', n')` reappears
//! as four times itself between `(2m, 2n)` and `(2m', 2n')`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use super::poisson::{ecdf, sample, summarize, PoissonExperiment, Summary};
use crate::alpha::{Alpha, DEFAULT_PRECISION_CAP, REPORT_DIGITS};
use crate::error::{Error, Result};
use crate::spectrum::{propagate_gap, Eigenvalue, GapRecord, Spectrum};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationCheck {
    #[serde(rename = "N")]
    pub count: u64,
    pub record: GapRecord,
    pub doubled: GapRecord,
    /// Number of eigenvalues up to and including the larger doubled level.
    pub doubled_count: u64,
    /// Both doubled eigenvalues were met in the ordered enumeration.
    pub in_spectrum: bool,
    /// The doubled gap is `4·δ_min(N)`, compared as `α·A + B` exactly.
    pub gap_exactly_quadrupled: bool,
    /// `δ_min,2` over the first `doubled_count` eigenvalues.
    pub second_gap: GapRecord,
    /// `δ_min,2(doubled_count) ≤ 4·δ_min(N)`.
    pub second_gap_bound_holds: bool,
}

/// `(A, B)` of `α·A + B` for a gap record.
fn record_parts(g: &GapRecord) -> (BigInt, BigInt) {
    g.affine_parts()
}

pub fn propagation_check(alpha: &Alpha, count: u64) -> Result<PropagationCheck> {
    propagation_check_with(&Spectrum::new(alpha)?, count)
}

pub(crate) fn propagation_check_with(spec: &Spectrum, count: u64) -> Result<PropagationCheck> {
    if count < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    let alpha = spec.alpha();
    let mut levels: Vec<Eigenvalue> = Vec::with_capacity(4 * count as usize + 16);
    for e in spec.iter().take(count as usize) {
        levels.push(e?);
    }
    let record = spec.kth_gap_of(&levels, 1)?;
    let doubled = propagate_gap(alpha, &record);
    let targets = [doubled.lower, doubled.upper];
    let mut found = targets.iter().map(|t| levels.iter().any(|e| e == t)).collect::<Vec<_>>();
    let mut it = spec.iter().skip(levels.len());
    while !found.iter().all(|&f| f) {
        let Some(e) = it.next() else { break };
        let e = e?;
        for (i, t) in targets.iter().enumerate() {
            found[i] |= *t == e;
        }
        levels.push(e);
    }
    let in_spectrum = found.iter().all(|&f| f);
    let (a, b) = record_parts(&record);
    let (da, db) = record_parts(&doubled);
    let gap_exactly_quadrupled = da == &a * 4 && db == &b * 4;
    let second_gap = spec.kth_gap_of(&levels, 2)?;
    let (sa, sb) = record_parts(&second_gap);
    // 4(αA + B) − (αA₂ + B₂) ≥ 0
    let second_gap_bound_holds = alpha.affine_sign(&(&a * 4 - sa), &(&b * 4 - sb), DEFAULT_PRECISION_CAP)? != Ordering::Less;
    Ok(PropagationCheck {
        count,
        record,
        doubled,
        doubled_count: levels.len() as u64,
        in_spectrum,
        gap_exactly_quadrupled,
        second_gap,
        second_gap_bound_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub count: u64,
    /// `N·δ_min(N)`, decimal.
    pub scaled_min: String,
    /// `N·δ_min,2(N)`, decimal.
    pub scaled_second: String,
    pub poisson_min: Summary,
    pub poisson_second: Summary,
    /// Fraction of Poisson trials at or below the billiard value.
    pub min_percentile: f64,
    pub second_percentile: f64,
    /// `N·δ_min ≤ 1/log N`.
    pub min_below_inv_log: bool,
    /// `N·δ_min,2 < (log N)^{−2/3}`.
    pub second_below_inv_log_23: bool,
    pub propagation: PropagationCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BilliardReport {
    pub alpha: String,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

/// One row per `N`; Poisson columns use `trials` and `seed` of `exp`
/// (its `N` and `k` are ignored).
pub fn billiard_vs_poisson_report(alpha: &Alpha, counts: &[u64], exp: &PoissonExperiment) -> Result<BilliardReport> {
    if counts.is_empty() {
        return Err(Error::InvalidArgument("N list is empty".into()));
    }
    if counts.iter().any(|&n| n < 3) {
        return Err(Error::InvalidArgument("every N must be at least 3".into()));
    }
    if exp.trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let spec = Spectrum::new(alpha)?;
    let rows = counts
        .iter()
        .map(|&n| {
            let levels = spec.enumerate(n as usize)?;
            let gaps = spec.smallest_gaps(&levels, 2)?;
            let (g1, g2) = (&gaps[0].scaled_gap, &gaps[1].scaled_gap);
            let per_trial = sample(n, exp.trials, exp.seed, 2);
            let mut s1: Vec<f64> = per_trial.iter().map(|g| g[0]).collect();
            let mut s2: Vec<f64> = per_trial.iter().map(|g| g[1]).collect();
            s1.sort_unstable_by(f64::total_cmp);
            s2.sort_unstable_by(f64::total_cmp);
            let ln = (n as f64).ln();
            let (f1, f2) = (g1.to_f64(), g2.to_f64());
            Ok(ReportRow {
                count: n,
                scaled_min: g1.to_decimal(REPORT_DIGITS),
                scaled_second: g2.to_decimal(REPORT_DIGITS),
                min_percentile: ecdf(&s1, f1),
                second_percentile: ecdf(&s2, f2),
                poisson_min: summarize(&s1, 1),
                poisson_second: summarize(&s2, 2),
                min_below_inv_log: f1 <= 1.0 / ln,
                second_below_inv_log_23: f2 < ln.powf(-2.0 / 3.0),
                propagation: propagation_check_with(&spec, n)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BilliardReport { alpha: alpha.to_string(), trials: exp.trials, seed: exp.seed, rows })
}
