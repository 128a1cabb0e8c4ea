//! Ordered enumeration of `{α m² + n² : m, n ≥ 1}`, minimal gaps, and the
//! quadrupling map `(m, n) ↦ (2m, 2n)`.
//!
//! Levels along a fixed `m` increase with `n`, so the spectrum is a k-way
//! merge of column streams. Column `m + 1` is opened when `(m, 1)` is
//! emitted, which keeps about `√N` streams resident. All comparisons go
//! through the sign of `α·ΔA + ΔB`, exact for surd α.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use crate::alpha::{AffineOracle, Alpha, Real, DEFAULT_PRECISION_CAP};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Eigenvalue {
    pub m: u64,
    pub n: u64,
}

impl Eigenvalue {
    pub fn new(m: u64, n: u64) -> Self {
        Eigenvalue { m, n }
    }

    pub fn level(&self, alpha: &Alpha) -> Real {
        alpha.affine_value(&(BigInt::from(self.m).pow(2)), &(BigInt::from(self.n).pow(2)))
    }

    fn squares(&self) -> (i128, i128) {
        ((self.m as i128) * (self.m as i128), (self.n as i128) * (self.n as i128))
    }
}

/// A gap `upper.level − lower.level` between two eigenvalues.
///
/// `index = Some(i)` when the pair is `(λ_i, λ_{i+1})` of the ordered
/// spectrum; `count` is the `N` the record was computed for and
/// `scaled_gap = N · gap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapRecord {
    pub index: Option<u64>,
    pub count: u64,
    pub lower: Eigenvalue,
    pub upper: Eigenvalue,
    pub gap: Real,
    pub scaled_gap: Real,
}

impl GapRecord {
    fn build(alpha: &Alpha, index: Option<u64>, count: u64, lower: Eigenvalue, upper: Eigenvalue) -> Self {
        let (la, lb) = lower.squares();
        let (ua, ub) = upper.squares();
        let gap = alpha.affine_value(&BigInt::from(ua - la), &BigInt::from(ub - lb));
        let scaled_gap = gap.mul_int(&BigInt::from(count));
        GapRecord { index, count, lower, upper, gap, scaled_gap }
    }

    /// `(ΔA, ΔB)` with `gap = α·ΔA + ΔB`.
    pub fn affine_parts(&self) -> (BigInt, BigInt) {
        let sq = |x: u64| BigInt::from(x).pow(2);
        (sq(self.upper.m) - sq(self.lower.m), sq(self.upper.n) - sq(self.lower.n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub count: u64,
    pub record: GapRecord,
}

/// Spectrum queries for one α.
pub struct Spectrum<'a> {
    oracle: AffineOracle<'a>,
}

impl<'a> Spectrum<'a> {
    pub fn new(alpha: &'a Alpha) -> Result<Self> {
        Self::with_precision_cap(alpha, DEFAULT_PRECISION_CAP)
    }

    pub fn with_precision_cap(alpha: &'a Alpha, cap: u32) -> Result<Self> {
        alpha.require_spectral()?;
        Ok(Spectrum { oracle: AffineOracle::new(alpha, cap) })
    }

    pub fn alpha(&self) -> &Alpha {
        self.oracle.alpha()
    }

    /// Compares the levels of two lattice points.
    pub fn cmp_levels(&self, x: Eigenvalue, y: Eigenvalue) -> Result<Ordering> {
        let (xa, xb) = x.squares();
        let (ya, yb) = y.squares();
        self.oracle.sign(xa - ya, xb - yb)
    }

    fn cmp_gaps(&self, g: &RawGap, h: &RawGap) -> Result<Ordering> {
        self.oracle.sign(g.da - h.da, g.db - h.db)
    }

    /// Lazy ascending iterator over the spectrum.
    pub fn iter(&self) -> SpectrumIter<'_, 'a> {
        SpectrumIter { spectrum: self, heap: vec![Eigenvalue::new(1, 1)], failed: false }
    }

    /// The first `count` eigenvalues in strictly increasing order.
    pub fn enumerate(&self, count: usize) -> Result<Vec<Eigenvalue>> {
        self.iter().take(count).collect()
    }

    fn raw_gaps(&self, levels: &[Eigenvalue]) -> Vec<RawGap> {
        levels
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (la, lb) = w[0].squares();
                let (ua, ub) = w[1].squares();
                RawGap { i, da: ua - la, db: ub - lb }
            })
            .collect()
    }

    /// Consecutive gaps among `levels` in ascending order (ties by position).
    fn ranked_gaps(&self, levels: &[Eigenvalue]) -> Result<Vec<RawGap>> {
        let mut gaps = self.raw_gaps(levels);
        let mut failure = None;
        gaps.sort_by(|g, h| match self.cmp_gaps(g, h) {
            Ok(Ordering::Equal) => g.i.cmp(&h.i),
            Ok(o) => o,
            Err(e) => {
                failure.get_or_insert(e);
                g.i.cmp(&h.i)
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(gaps),
        }
    }

    fn record(&self, levels: &[Eigenvalue], g: &RawGap) -> GapRecord {
        GapRecord::build(self.alpha(), Some(g.i as u64 + 1), levels.len() as u64, levels[g.i], levels[g.i + 1])
    }

    /// The `k`-th smallest of the `N − 1` consecutive gaps among the first
    /// `N = count` eigenvalues.
    pub fn min_gap(&self, count: u64, k: usize) -> Result<GapRecord> {
        let levels = self.enumerate(count as usize)?;
        self.kth_gap_of(&levels, k)
    }

    /// Like [`Spectrum::min_gap`] on an already enumerated prefix.
    pub fn kth_gap_of(&self, levels: &[Eigenvalue], k: usize) -> Result<GapRecord> {
        if k == 0 {
            return Err(Error::InvalidArgument("gap rank k must be at least 1".into()));
        }
        if levels.len() < k + 1 {
            return Err(Error::InvalidArgument(format!(
                "need N >= k + 1 eigenvalues, got N = {} and k = {k}",
                levels.len()
            )));
        }
        let ranked = self.ranked_gaps(levels)?;
        Ok(self.record(levels, &ranked[k - 1]))
    }

    /// The `k` smallest gaps in ascending order.
    pub fn smallest_gaps(&self, levels: &[Eigenvalue], k: usize) -> Result<Vec<GapRecord>> {
        let ranked = self.ranked_gaps(levels)?;
        Ok(ranked.iter().take(k).map(|g| self.record(levels, g)).collect())
    }

    /// Minimal gap for each `N` in an increasing list, from one enumeration.
    pub fn sweep(&self, counts: &[u64]) -> Result<Vec<SweepRow>> {
        if counts.is_empty() {
            return Ok(Vec::new());
        }
        if counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("N list must be strictly increasing".into()));
        }
        if counts[0] < 2 {
            return Err(Error::InvalidArgument("every N must be at least 2".into()));
        }
        let levels = self.enumerate(*counts.last().unwrap() as usize)?;
        let gaps = self.raw_gaps(&levels);
        let mut rows = Vec::with_capacity(counts.len());
        let mut best: Option<usize> = None;
        let mut scanned = 0usize;
        for &n in counts {
            let upto = n as usize - 1;
            while scanned < upto {
                let g = &gaps[scanned];
                best = match best {
                    Some(b) if self.cmp_gaps(g, &gaps[b])? != Ordering::Less => Some(b),
                    _ => Some(scanned),
                };
                scanned += 1;
            }
            let g = &gaps[best.expect("at least one gap")];
            let record = GapRecord::build(self.alpha(), Some(g.i as u64 + 1), n, levels[g.i], levels[g.i + 1]);
            rows.push(SweepRow { count: n, record });
        }
        Ok(rows)
    }

    /// Exact number of eigenvalues `≤ x`.
    pub fn count_up_to(&self, x: u64) -> Result<u64> {
        let x = x as i128;
        let alpha_f = self.alpha().approx_f64();
        let mut total = 0u64;
        let mut m: i128 = 1;
        loop {
            let m2 = m * m;
            // is α m² + 1 ≤ x ?
            if self.oracle.sign(m2, 1 - x)? == Ordering::Greater {
                break;
            }
            let rest = x as f64 - alpha_f * m2 as f64;
            let mut n = rest.max(0.0).sqrt().floor() as i128;
            while n >= 1 && self.oracle.sign(m2, n * n - x)? == Ordering::Greater {
                n -= 1;
            }
            while self.oracle.sign(m2, (n + 1) * (n + 1) - x)? != Ordering::Greater {
                n += 1;
            }
            total += n as u64;
            m += 1;
        }
        Ok(total)
    }
}

/// Main term `πX/(4√α)` of the eigenvalue counting function.
pub fn weyl_main_term(alpha: &Alpha, x: f64) -> f64 {
    std::f64::consts::PI * x / (4.0 * alpha.approx_f64().sqrt())
}

#[derive(Clone, Copy, Debug)]
struct RawGap {
    i: usize,
    da: i128,
    db: i128,
}

pub struct SpectrumIter<'s, 'a> {
    spectrum: &'s Spectrum<'a>,
    heap: Vec<Eigenvalue>,
    failed: bool,
}

impl SpectrumIter<'_, '_> {
    fn less(&self, x: Eigenvalue, y: Eigenvalue) -> Result<bool> {
        Ok(self.spectrum.cmp_levels(x, y)? == Ordering::Less)
    }

    fn push(&mut self, e: Eigenvalue) -> Result<()> {
        self.heap.push(e);
        let mut i = self.heap.len() - 1;
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.less(self.heap[i], self.heap[parent])? {
                self.heap.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
        Ok(())
    }

    fn pop(&mut self) -> Result<Option<Eigenvalue>> {
        if self.heap.is_empty() {
            return Ok(None);
        }
        let top = self.heap.swap_remove(0);
        let len = self.heap.len();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut smallest = i;
            if l < len && self.less(self.heap[l], self.heap[smallest])? {
                smallest = l;
            }
            if r < len && self.less(self.heap[r], self.heap[smallest])? {
                smallest = r;
            }
            if smallest == i {
                break;
            }
            self.heap.swap(i, smallest);
            i = smallest;
        }
        Ok(Some(top))
    }

    fn advance(&mut self) -> Result<Option<Eigenvalue>> {
        let Some(top) = self.pop()? else { return Ok(None) };
        self.push(Eigenvalue::new(top.m, top.n + 1))?;
        if top.n == 1 {
            self.push(Eigenvalue::new(top.m + 1, 1))?;
        }
        Ok(Some(top))
    }
}

impl Iterator for SpectrumIter<'_, '_> {
    type Item = Result<Eigenvalue>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.advance() {
            Ok(e) => e.map(Ok),
            Err(err) => {
                self.failed = true;
                Some(Err(err))
            }
        }
    }
}

/// The first `count` eigenvalues of `α`.
pub fn enumerate_spectrum(alpha: &Alpha, count: usize) -> Result<Vec<Eigenvalue>> {
    Spectrum::new(alpha)?.enumerate(count)
}

/// `δ_min,k(N)`: the `k`-th smallest consecutive gap among the first `N`.
pub fn min_gap(alpha: &Alpha, count: u64, k: usize) -> Result<GapRecord> {
    Spectrum::new(alpha)?.min_gap(count, k)
}

pub fn scaled_gap_sweep(alpha: &Alpha, counts: &[u64]) -> Result<Vec<SweepRow>> {
    Spectrum::new(alpha)?.sweep(counts)
}

/// The pair `(2m, 2n)`, `(2m', 2n')`: both levels scale by 4, so does the gap.
pub fn propagate_gap(alpha: &Alpha, g: &GapRecord) -> GapRecord {
    let dbl = |e: Eigenvalue| Eigenvalue::new(2 * e.m, 2 * e.n);
    GapRecord::build(alpha, None, g.count, dbl(g.lower), dbl(g.upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuadSurd;

    fn sqrt2() -> Alpha {
        Alpha::parse("sqrt:2").unwrap()
    }

    /// Brute force: all (m, n) ≤ 5, sorted by floating level.
    fn brute(alpha: f64, bound: u64) -> Vec<(u64, u64)> {
        let mut v: Vec<(f64, u64, u64)> = (1..=bound)
            .flat_map(|m| (1..=bound).map(move |n| (alpha * (m * m) as f64 + (n * n) as f64, m, n)))
            .collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v.into_iter().map(|(_, m, n)| (m, n)).collect()
    }

    #[test]
    fn first_three_levels_of_sqrt2() {
        let a = sqrt2();
        let levels = enumerate_spectrum(&a, 3).unwrap();
        let pairs: Vec<_> = levels.iter().map(|e| (e.m, e.n)).collect();
        assert_eq!(pairs, brute(std::f64::consts::SQRT_2, 5)[..3]);
        assert_eq!(pairs, vec![(1, 1), (1, 2), (2, 1)]);
        let decimals: Vec<_> = levels.iter().map(|e| e.level(&a).to_decimal(4)).collect();
        assert_eq!(decimals, vec!["2.414", "5.414", "6.657"]);
    }

    #[test]
    fn single_level_is_alpha_plus_one() {
        let a = Alpha::parse("golden2").unwrap();
        let levels = enumerate_spectrum(&a, 1).unwrap();
        assert_eq!(levels, vec![Eigenvalue::new(1, 1)]);
        let expected = a.as_surd().unwrap().add_int(&BigInt::from(1));
        assert_eq!(levels[0].level(&a), Real::Exact(expected));
    }

    #[test]
    fn small_gaps_of_sqrt2() {
        let a = sqrt2();
        let g1 = min_gap(&a, 3, 1).unwrap();
        // (4√2 + 1) − (√2 + 4)
        let expected = QuadSurd::new((-3).into(), 3.into(), 1.into(), 2).unwrap();
        assert_eq!(g1.gap, Real::Exact(expected));
        assert_eq!(g1.index, Some(2));
        let g2 = min_gap(&a, 3, 2).unwrap();
        assert_eq!(g2.gap, Real::Exact(QuadSurd::from_integer(3)));
        assert!(matches!(min_gap(&a, 3, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rational_alpha_is_rejected() {
        let a = Alpha::parse("sqrt:9/4").unwrap();
        assert_eq!(enumerate_spectrum(&a, 3).err(), Some(Error::RationalAlpha));
    }

    #[test]
    fn literal_alpha_enumerates_and_fails_loudly() {
        let lit = Alpha::parse("dec:1.414213562373095048801688724209698").unwrap();
        let exact = enumerate_spectrum(&sqrt2(), 500).unwrap();
        assert_eq!(enumerate_spectrum(&lit, 500).unwrap(), exact);
        // α = 1.5 ± 0.05: 1.5·4 + 1 = 1.5·2² + 1 vs 1.5·... ties appear quickly
        let coarse = Alpha::parse("dec:1.5").unwrap();
        let s = Spectrum::with_precision_cap(&coarse, 256).unwrap();
        assert_eq!(s.enumerate(200).err(), Some(Error::PrecisionExhausted { bits: 256 }));
    }

    #[test]
    fn sweep_of_two_is_first_gap() {
        let a = sqrt2();
        let rows = scaled_gap_sweep(&a, &[2]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].record.gap, Real::Exact(QuadSurd::from_integer(3)));
        assert!(scaled_gap_sweep(&a, &[10, 5]).is_err());
    }

    #[test]
    fn propagation_scales_by_four() {
        let a = sqrt2();
        let g = GapRecord::build(&a, None, 3, Eigenvalue::new(1, 1), Eigenvalue::new(1, 2));
        let p = propagate_gap(&a, &g);
        assert_eq!((p.lower, p.upper), (Eigenvalue::new(2, 2), Eigenvalue::new(2, 4)));
        assert_eq!(p.gap, Real::Exact(QuadSurd::from_integer(12)));
        let mut cur = g.clone();
        for j in 1..=5u32 {
            cur = propagate_gap(&a, &cur);
            let expect = g.gap.as_exact().unwrap().mul_int(&BigInt::from(4u64.pow(j)));
            assert_eq!(cur.gap.as_exact().unwrap(), &expect);
        }
    }

    #[test]
    fn counting_matches_enumeration() {
        let a = sqrt2();
        let s = Spectrum::new(&a).unwrap();
        let levels = s.enumerate(2000).unwrap();
        let x = 1000u64;
        let below = levels
            .iter()
            .filter(|e| e.level(&a).as_exact().unwrap().add_int(&BigInt::from(-(x as i64))).signum() != Ordering::Greater)
            .count() as u64;
        assert_eq!(s.count_up_to(x).unwrap(), below);
    }
}
