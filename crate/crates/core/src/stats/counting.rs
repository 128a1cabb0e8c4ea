//! Distinct entries of the multiplication table, and the quadruple count
//! `#{n₁, n₂, n₃, n₄ ∈ [M, 2M] : |n₁n₂/(n₃n₄) − α| ≤ 1/T}`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::alpha::{AffineOracle, Alpha, DEFAULT_PRECISION_CAP};
use crate::error::{Error, Result};

/// Largest side length accepted by [`mult_table_distinct`] (a bitset of
/// `X²` bits, 50 MB at the bound).
pub const MULT_TABLE_BOUND: u64 = 20_000;

/// `#{u·v : 1 ≤ u, v ≤ X}`.
pub fn mult_table_distinct(x: u64) -> Result<u64> {
    mult_table_distinct_bounded(x, MULT_TABLE_BOUND)
}

pub fn mult_table_distinct_bounded(x: u64, bound: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be at least 1".into()));
    }
    if x > bound {
        return Err(Error::MemoryBound { x, bound });
    }
    let top = (x * x) as usize;
    let mut bits = vec![0u64; top / 64 + 1];
    for u in 1..=x as usize {
        for v in (u * u..=u * x as usize).step_by(u) {
            bits[v >> 6] |= 1 << (v & 63);
        }
    }
    Ok(bits.iter().map(|w| w.count_ones() as u64).sum())
}

/// `c = 1 − log(e·log 2)/log 2 = 0.0860713…`.
pub fn ford_constant() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    1.0 - (1.0 + ln2.ln()) / ln2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FordRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub distinct: u64,
    /// `distinct / X²`.
    pub ratio: f64,
    /// `(log X)^{−c} (log log X)^{−2/3}`, for `X ≥ 3`.
    pub reference: Option<f64>,
    pub ratio_over_reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FordReport {
    pub c: f64,
    pub rows: Vec<FordRow>,
    /// `ratio` strictly decreasing along the rows.
    pub ratio_decreasing: bool,
}

pub fn ford_exponent_report(xs: &[u64]) -> Result<FordReport> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("X list is empty".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("X list must be strictly increasing".into()));
    }
    let c = ford_constant();
    let rows: Vec<FordRow> = xs
        .iter()
        .map(|&x| {
            let distinct = mult_table_distinct(x)?;
            let ratio = distinct as f64 / (x as f64 * x as f64);
            let lx = (x as f64).ln();
            let reference = (x >= 3).then(|| lx.powf(-c) * lx.ln().powf(-2.0 / 3.0));
            Ok(FordRow { x, distinct, ratio, reference, ratio_over_reference: reference.map(|r| ratio / r) })
        })
        .collect::<Result<_>>()?;
    let ratio_decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
    Ok(FordReport { c, rows, ratio_decreasing })
}

/// Distinct moduli `u·v` with `u, v ≤ C·N^{1/2}`: the side length and count.
pub fn distinct_moduli(count: u64, c: f64) -> Result<(u64, u64)> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("C must be positive".into()));
    }
    let side = (c * (count as f64).sqrt()).floor().max(1.0) as u64;
    Ok((side, mult_table_distinct(side)?))
}

/// Largest `M` accepted by [`quadruple_count`].
pub const QUADRUPLE_MAX_M: u64 = 3000;

/// Number of witnesses kept by [`quadruple_count`].
pub const QUADRUPLE_WITNESSES: usize = 10;

#[derive(Clone, Debug)]
pub struct QuadrupleWindow {
    pub alpha: Alpha,
    pub m: u64,
    pub t: u64,
}

impl QuadrupleWindow {
    pub fn new(alpha: Alpha, m: u64, t: u64) -> Result<Self> {
        let w = QuadrupleWindow { alpha, m, t };
        w.validate()?;
        Ok(w)
    }

    /// `T = M^e`, exact for integral `e`, otherwise rounded down.
    pub fn with_exponent(alpha: Alpha, m: u64, e: f64) -> Result<Self> {
        if !(3.0..=4.0).contains(&e) {
            return Err(Error::InvalidArgument(format!("T exponent must lie in [3, 4], got {e}")));
        }
        let t = if e.fract() == 0.0 {
            m.checked_pow(e as u32)
        } else {
            let v = (m as f64).powf(e).floor();
            (v < u64::MAX as f64).then_some(v as u64)
        };
        let t = t.ok_or_else(|| Error::InvalidArgument("T overflows 64 bits".into()))?;
        QuadrupleWindow::new(alpha, m, t)
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.require_spectral()?;
        if self.m < 2 || self.m > QUADRUPLE_MAX_M {
            return Err(Error::InvalidArgument(format!("M must lie in [2, {QUADRUPLE_MAX_M}]")));
        }
        let m = self.m as u128;
        let t = self.t as u128;
        if t < m.pow(3) || t > m.pow(4) {
            return Err(Error::InvalidArgument("need M³ <= T <= M⁴".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadrupleCount {
    pub alpha: String,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub window: [u64; 2],
    /// Ordered quadruples.
    pub count: u64,
    /// Up to ten quadruples with `n₁ ≤ n₂`, `n₃ ≤ n₄` and distinct products.
    pub witnesses: Vec<[u64; 4]>,
}

/// Position of `s` relative to `[αP − P/T, αP + P/T]`.
fn locate(oracle: &AffineOracle, t: u64, s: u64, p: u64) -> Result<Ordering> {
    let (t, s, p) = (t as i128, s as i128, p as i128);
    // α·TP − (Ts + P) > 0  ⇔  s < αP − P/T
    if oracle.sign(t * p, -(t * s + p))? == Ordering::Greater {
        return Ok(Ordering::Less);
    }
    // α·TP − (Ts − P) < 0  ⇔  s > αP + P/T
    if oracle.sign(t * p, -(t * s - p))? == Ordering::Less {
        return Ok(Ordering::Greater);
    }
    Ok(Ordering::Equal)
}

/// `|n₁n₂/(n₃n₄) − α| ≤ 1/T`, exactly.
pub fn quadruple_holds(alpha: &Alpha, t: u64, n: [u64; 4]) -> Result<bool> {
    let oracle = AffineOracle::new(alpha, DEFAULT_PRECISION_CAP);
    Ok(locate(&oracle, t, n[0] * n[1], n[2] * n[3])? == Ordering::Equal)
}

fn factor_in_window(s: u64, lo: u64, hi: u64) -> Option<(u64, u64)> {
    (lo..=hi).find(|&a| s % a == 0 && (a..=hi).contains(&(s / a)) && a <= s / a).map(|a| (a, s / a))
}

/// Counts ordered quadruples in `[M, 2M]⁴` by sorting the products
/// `n₁n₂` and sweeping two pointers against `α·n₃n₄`.
pub fn quadruple_count(w: &QuadrupleWindow) -> Result<QuadrupleCount> {
    w.validate()?;
    let (lo, hi) = (w.m, 2 * w.m);
    let mut prods: Vec<u64> = (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| a * b)).collect();
    prods.sort_unstable();
    let oracle = AffineOracle::new(&w.alpha, DEFAULT_PRECISION_CAP);
    let (mut left, mut right) = (0usize, 0usize);
    let mut count = 0u64;
    let mut witnesses = Vec::new();
    for (i, &p) in prods.iter().enumerate() {
        while left < prods.len() && locate(&oracle, w.t, prods[left], p)? == Ordering::Less {
            left += 1;
        }
        right = right.max(left);
        while right < prods.len() && locate(&oracle, w.t, prods[right], p)? != Ordering::Greater {
            right += 1;
        }
        count += (right - left) as u64;
        if witnesses.len() < QUADRUPLE_WITNESSES && (i == 0 || prods[i - 1] != p) {
            let (n3, n4) = factor_in_window(p, lo, hi).expect("product of the window");
            for (j, &s) in prods[left..right].iter().enumerate() {
                if witnesses.len() == QUADRUPLE_WITNESSES {
                    break;
                }
                if j > 0 && prods[left + j - 1] == s {
                    continue;
                }
                let (n1, n2) = factor_in_window(s, lo, hi).expect("product of the window");
                witnesses.push([n1, n2, n3, n4]);
            }
        }
    }
    Ok(QuadrupleCount { alpha: w.alpha.to_string(), m: w.m, t: w.t, window: [lo, hi], count, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(mult_table_distinct(1).unwrap(), 1);
        assert_eq!(mult_table_distinct(3).unwrap(), 6);
        assert_eq!(mult_table_distinct(4).unwrap(), 9);
        assert!(matches!(mult_table_distinct(MULT_TABLE_BOUND + 1), Err(Error::MemoryBound { .. })));
        assert!(mult_table_distinct(0).is_err());
    }

    #[test]
    fn ford_report() {
        let r = ford_exponent_report(&[10, 100, 1000]).unwrap();
        assert_eq!(format!("{:.6}", r.c), "0.086071");
        assert!(r.ratio_decreasing);
        let one = ford_exponent_report(&[2]).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_eq!(one.rows[0].reference, None);
        assert!(ford_exponent_report(&[10, 10]).is_err());
    }

    #[test]
    fn rational_point_in_window() {
        // α = 1.5 = (20·30)/(20·20)
        let a = Alpha::parse("dec:1.5000000001").unwrap();
        let w = QuadrupleWindow::new(a.clone(), 20, 8000).unwrap();
        let r = quadruple_count(&w).unwrap();
        assert!(r.count >= 1);
        for wit in &r.witnesses {
            assert!(quadruple_holds(&a, w.t, *wit).unwrap());
        }
    }

    #[test]
    fn window_validation() {
        let a = Alpha::parse("sqrt:2").unwrap();
        assert!(QuadrupleWindow::new(a.clone(), 10, 999).is_err());
        assert!(QuadrupleWindow::new(a.clone(), 10, 10_001).is_err());
        assert!(QuadrupleWindow::new(a.clone(), 1, 1).is_err());
        assert_eq!(QuadrupleWindow::with_exponent(a.clone(), 50, 3.0).unwrap().t, 125_000);
        assert_eq!(QuadrupleWindow::with_exponent(a, 50, 3.5).unwrap().t, 883_883);
    }
}
