//! Certified small gaps from approximants `p/q` whose numerator and
//! denominator both have a divisor near their square root.
//!
//! With `d | q`, `e | p`, `d² < q`, `e² < p`:
//! `m = q/d + d`, `m' = q/d − d`, `n = p/e − e`, `n' = p/e + e` give
//! `m² − m'² = 4q`, `n'² − n² = 4p`, so the levels `αm² + n²` and
//! `αm'² + n'²` differ by `4|αq − p|`.

mod family;
mod pipeline;

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::alpha::{Alpha, Real, DEFAULT_PRECISION_CAP};
use crate::diophantine::{best_divisor, desquare, dirichlet_approx, DivisorWitness};
use crate::error::{Error, Result};
use crate::exact::ln_big;
use crate::ser;

pub use family::{
    approximants_general_quadratic, construct_general, construct_strong_exact, solve_index_equation,
    FamilyInfo, GeneralQuadraticSpec, IndexSolution, StrongInfo,
};
pub use pipeline::{construct_sqrt_d, PipelineInfo, SqrtDOptions};

/// Balance required of both witnesses for `evenly_divisible`.
pub const EVEN_BALANCE: (u32, u32) = (1, 4);

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "provenance")]
pub enum Origin {
    #[serde(rename = "approximant")]
    Approximant,
    #[serde(rename = "dirichlet")]
    Dirichlet {
        #[serde(rename = "N")]
        count: u64,
        #[serde(rename = "Q")]
        big_q: u64,
    },
    #[serde(rename = "sqrtD_pipeline")]
    SqrtDPipeline(PipelineInfo),
    #[serde(rename = "general_quadratic")]
    GeneralQuadratic(FamilyInfo),
    #[serde(rename = "strong_exact")]
    StrongExact(StrongInfo),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCertificate {
    pub alpha: String,
    #[serde(serialize_with = "ser::text")]
    pub m: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub m_prime: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub n: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub n_prime: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub p: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub q: BigUint,
    /// Factor `t ∈ {1, 2, 3}` applied to the original approximant.
    pub scale: u32,
    pub gap: Real,
    pub lambda: Real,
    pub lambda_prime: Real,
    pub level_bound: Real,
    pub q_witness: DivisorWitness,
    pub p_witness: DivisorWitness,
    pub evenly_divisible: bool,
    /// `log(level_bound)/log(q) − 1`.
    pub level_exponent: f64,
    pub revalidated: bool,
    pub origin: Origin,
}

impl GapCertificate {
    /// `d` and `e`.
    pub fn divisors(&self) -> (&BigUint, &BigUint) {
        (&self.q_witness.d, &self.p_witness.d)
    }

    /// `(A, B)` with `gap = |α·A − B|`.
    fn affine(&self) -> (BigInt, BigInt) {
        let sq = |x: &BigUint| BigInt::from(x * x);
        (sq(&self.m) - sq(&self.m_prime), sq(&self.n_prime) - sq(&self.n))
    }

    /// Re-runs every exact check on the stored integers.
    pub fn revalidate(&self, alpha: &Alpha) -> Result<()> {
        let four = BigUint::from(4u32);
        if self.m_prime.is_zero() || self.n.is_zero() || self.m <= self.m_prime || self.n_prime <= self.n {
            return Err(Error::DegenerateDivisor("lattice points must satisfy m > m' >= 1, n' > n >= 1".into()));
        }
        let (a, b) = self.affine();
        if a != BigInt::from(&four * &self.q) || b != BigInt::from(&four * &self.p) {
            return Err(Error::DivisibilityViolation("m² − m'² = 4q or n'² − n² = 4p fails".into()));
        }
        let sign = alpha.affine_sign(&a, &-&b, DEFAULT_PRECISION_CAP)?;
        if sign == Ordering::Equal {
            return Err(Error::RationalAlpha);
        }
        if let Real::Exact(g) = &self.gap {
            let direct = alpha.affine_value(&a, &-&b).abs();
            let via_q = alpha
                .affine_value(&BigInt::from(self.q.clone()), &-BigInt::from(self.p.clone()))
                .mul_int(&BigInt::from(4))
                .abs();
            if Real::Exact(g.clone()) != direct || direct != via_q {
                return Err(Error::DivisibilityViolation("gap differs from 4|αq − p|".into()));
            }
        }
        Ok(())
    }

    /// `gap · T ≤ 4q`, the bound for an approximant with `|α − p/q| ≤ 1/T`.
    /// `None` when the approximant does not meet that hypothesis.
    pub fn weak_bound(&self, alpha: &Alpha, t: &BigUint) -> Result<Option<bool>> {
        let q = BigInt::from(self.q.clone());
        let p = BigInt::from(self.p.clone());
        let t = BigInt::from(t.clone());
        let cap = DEFAULT_PRECISION_CAP;
        // |qα − p|·T ≤ q
        let hyp = alpha.affine_sign(&(&q * &t), &(-(&p * &t) - &q), cap)?.is_le()
            && alpha.affine_sign(&(&q * &t), &(-(&p * &t) + &q), cap)?.is_ge();
        if !hyp {
            return Ok(None);
        }
        let (a, b) = self.affine();
        let four_q = BigInt::from(4) * &q;
        let ok = alpha.affine_sign(&(&a * &t), &(-(&b * &t) - &four_q), cap)?.is_le()
            && alpha.affine_sign(&(&a * &t), &(-(&b * &t) + &four_q), cap)?.is_ge();
        Ok(Some(ok))
    }
}

fn ln_level(alpha_f: f64, m: &BigUint, n: &BigUint) -> f64 {
    let la = alpha_f.ln() + 2.0 * ln_big(m);
    let lb = 2.0 * ln_big(n);
    let (hi, lo) = if la > lb { (la, lb) } else { (lb, la) };
    hi + (lo - hi).exp().ln_1p()
}

/// Builds and revalidates the certificate for divisors `d | q`, `e | p`.
pub(crate) fn certify(alpha: &Alpha, p: BigUint, q: BigUint, d: BigUint, e: BigUint, scale: u32, origin: Origin) -> Result<GapCertificate> {
    let (qd, r1) = q.div_rem(&d);
    let (pe, r2) = p.div_rem(&e);
    if !r1.is_zero() || !r2.is_zero() {
        return Err(Error::DivisibilityViolation("divisor does not divide the approximant".into()));
    }
    if qd <= d || pe <= e {
        return Err(Error::DegenerateDivisor(format!("need d² < q and e² < p (d = {d}, e = {e})")));
    }
    let m = &qd + &d;
    let m_prime = &qd - &d;
    let n = &pe - &e;
    let n_prime = &pe + &e;
    let big = |x: &BigUint| BigInt::from_biguint(Sign::Plus, x.clone());
    let lambda = alpha.affine_value(&big(&(&m * &m)), &big(&(&n * &n)));
    let lambda_prime = alpha.affine_value(&big(&(&m_prime * &m_prime)), &big(&(&n_prime * &n_prime)));
    // λ − λ' = 4(αq − p)
    let signed = alpha.affine_sign(&big(&q), &-big(&p), DEFAULT_PRECISION_CAP)?;
    let level_bound = if signed.is_ge() { lambda.clone() } else { lambda_prime.clone() };
    let gap = alpha.affine_value(&(big(&q) * 4), &(-big(&p) * 4)).abs();
    let alpha_f = alpha.approx_f64();
    let ln_bound = if signed.is_ge() { ln_level(alpha_f, &m, &n) } else { ln_level(alpha_f, &m_prime, &n_prime) };
    let level_exponent = if q > BigUint::from(1u32) { ln_bound / ln_big(&q) - 1.0 } else { f64::INFINITY };
    let q_witness = DivisorWitness::new(q.clone(), d)?;
    let p_witness = DivisorWitness::new(p.clone(), e)?;
    let (num, den) = EVEN_BALANCE;
    let evenly_divisible = q_witness.balance_at_least(num, den) && p_witness.balance_at_least(num, den);
    let mut cert = GapCertificate {
        alpha: alpha.to_string(),
        m,
        m_prime,
        n,
        n_prime,
        p,
        q,
        scale,
        gap,
        lambda,
        lambda_prime,
        level_bound,
        q_witness,
        p_witness,
        evenly_divisible,
        level_exponent,
        revalidated: false,
        origin,
    };
    cert.revalidate(alpha)?;
    cert.revalidated = true;
    Ok(cert)
}

/// `min(g, v/g)`-side divisor: `g` itself when `g² ≤ v`, else `v/g`.
pub(crate) fn lower_divisor(v: &BigUint, g: &BigUint) -> BigUint {
    if g * g <= *v {
        g.clone()
    } else {
        v / g
    }
}

fn positive(x: &BigInt, what: &str) -> Result<BigUint> {
    x.to_biguint()
        .filter(|v| !v.is_zero())
        .ok_or_else(|| Error::InvalidArgument(format!("{what} must be positive")))
}

/// Certificate from `p/q` using the most balanced divisors of `tp`, `tq`.
pub fn construct_from_approximant(alpha: &Alpha, p: &BigInt, q: &BigInt) -> Result<GapCertificate> {
    alpha.require_spectral()?;
    let p = positive(p, "p")?;
    let q = positive(q, "q")?;
    let (t, tp, tq) = desquare(&p, &q);
    let d = best_divisor(&tq)?.d;
    let e = best_divisor(&tp)?.d;
    certify(alpha, tp, tq, d, e, t, Origin::Approximant)
}

/// `Q = ⌈√N⌉`.
pub fn dirichlet_q(count: u64) -> u64 {
    let r = count.sqrt();
    if r * r == count {
        r
    } else {
        r + 1
    }
}

/// The universal construction: `(a, q)` from Dirichlet with `Q = ⌈√N⌉`,
/// `m = 2q ± 1`, `n = 2a ∓ 1`, gap `8|αq − a| ≤ 8/Q`.
pub fn general_upper_bound(alpha: &Alpha, count: u64) -> Result<GapCertificate> {
    alpha.require_spectral()?;
    if count < 4 {
        return Err(Error::InvalidArgument("N must be at least 4".into()));
    }
    let big_q = dirichlet_q(count);
    let approx = dirichlet_approx(alpha, big_q)?;
    let a = positive(&approx.p, "a")?;
    let q = positive(&approx.q, "q")?;
    let one = BigUint::from(1u32);
    certify(alpha, &a * 2u32, &q * 2u32, one.clone(), one, 1, Origin::Dirichlet { count, big_q })
}

/// Sorts certificates by `q` (ties by `p`).
pub(crate) fn sort_by_q(certs: &mut [GapCertificate]) {
    certs.sort_by(|x, y| x.q.cmp(&y.q).then_with(|| x.p.cmp(&y.p)));
}

/// `log x / log n` for positive integers (`n > 1`).
pub fn log_ratio(x: &BigUint, n: &BigUint) -> f64 {
    ln_big(x) / ln_big(n)
}

/// Rounds to `places` decimals for reporting.
pub(crate) fn rounded(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (x * s).round() / s
}

pub(crate) fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuadSurd;

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn sqrt8_example() {
        let alpha = Alpha::parse("sqrt:8").unwrap();
        let c = construct_from_approximant(&alpha, &BigInt::from(34), &BigInt::from(12)).unwrap();
        assert_eq!((c.m.clone(), c.m_prime.clone(), c.n.clone(), c.n_prime.clone()), (u(7), u(1), u(15), u(19)));
        assert_eq!(c.divisors(), (&u(3), &u(2)));
        // (49α + 225) − (α + 361) = 48α − 136
        let expected = QuadSurd::new((-136).into(), 96.into(), 1.into(), 2).unwrap().abs();
        assert_eq!(c.gap, Real::Exact(expected));
        assert_eq!(c.gap.to_decimal(4), "0.2355");
        assert!(c.revalidated);
    }

    #[test]
    fn prime_numerator_is_flagged() {
        let alpha = Alpha::parse("sqrt:2").unwrap();
        let c = construct_from_approximant(&alpha, &BigInt::from(17), &BigInt::from(12)).unwrap();
        assert_eq!(c.scale, 1);
        assert_eq!(c.p_witness.d, u(1));
        assert_eq!(c.p_witness.balance, 0.0);
        assert!(!c.evenly_divisible);
    }

    #[test]
    fn dirichlet_example() {
        let alpha = Alpha::parse("sqrt:2").unwrap();
        let c = general_upper_bound(&alpha, 100).unwrap();
        assert_eq!((c.m.clone(), c.m_prime.clone(), c.n.clone(), c.n_prime.clone()), (u(11), u(9), u(13), u(15)));
        let expected = QuadSurd::new((-56).into(), 40.into(), 1.into(), 2).unwrap().abs();
        assert_eq!(c.gap, Real::Exact(expected));
        assert_eq!(c.gap.to_decimal(4), "0.5685");
        assert!(matches!(c.origin, Origin::Dirichlet { count: 100, big_q: 10 }));
        assert!(general_upper_bound(&alpha, 3).is_err());
    }

    #[test]
    fn weak_bound_variant() {
        let alpha = Alpha::parse("sqrt:2").unwrap();
        let c = construct_from_approximant(&alpha, &BigInt::from(99), &BigInt::from(70)).unwrap();
        // |√2 − 99/70| ≈ 7.2e-5 ≤ 1/T for T = 10^4
        assert_eq!(c.weak_bound(&alpha, &u(10_000)).unwrap(), Some(true));
        assert_eq!(c.weak_bound(&alpha, &u(100_000)).unwrap(), None);
    }

    #[test]
    fn degenerate_divisors_are_rejected() {
        let alpha = Alpha::parse("sqrt:2").unwrap();
        let r = certify(&alpha, u(9), u(4), u(2), u(1), 1, Origin::Approximant);
        assert!(matches!(r, Err(Error::DegenerateDivisor(_))));
        let r = certify(&alpha, u(9), u(6), u(4), u(1), 1, Origin::Approximant);
        assert!(matches!(r, Err(Error::DivisibilityViolation(_))));
    }
}
