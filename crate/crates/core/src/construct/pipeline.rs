//! Approximants `2x_n / y_n` of `√(4D)` from Pell solutions, at indices
//! `n = ℓ₁⋯ℓ_J·P`, with lcm divisors built from the terms at `n/ℓ_j`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{certify, log_ratio, lower_divisor, rounded, sort_by_q, GapCertificate, Origin};
use crate::alpha::Alpha;
use crate::chebyshev::{pell_fundamental, sds_lcm, Lucas, PrimeSelection};
use crate::diophantine::desquare;
use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational};
use crate::ser;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtDOptions {
    /// Positive rational `r`; the target becomes `r·√(4D)`.
    pub prefactor: Rational,
}

impl Default for SqrtDOptions {
    fn default() -> Self {
        SqrtDOptions { prefactor: Rational::one() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineInfo {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(serialize_with = "ser::text")]
    pub pell_x: BigInt,
    #[serde(serialize_with = "ser::text")]
    pub pell_y: BigInt,
    pub primes: Vec<u64>,
    #[serde(rename = "P")]
    pub cofactor: u64,
    pub index: u64,
    #[serde(serialize_with = "ser::text")]
    pub density: Rational,
    pub primes_coprime_to_y: bool,
    #[serde(serialize_with = "ser::text")]
    pub q_lcm: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub p_lcm: BigUint,
    /// `log Q / log q_n` for `Q = lcm(q_{n/ℓ})`.
    pub q_lcm_exponent: f64,
    /// `log P / log p_n` for `P = lcm(p_{n/ℓ})`.
    pub p_lcm_exponent: f64,
    /// `q_{n/ℓ} | q_n` and `p_{n/ℓ} | p_n` for every `ℓ`, and both lcms
    /// divide, all by exact division.
    pub divisibility_certified: bool,
    pub q_digits: u64,
}

fn digits(x: &BigUint) -> u64 {
    (crate::exact::log2_big(x) * std::f64::consts::LOG10_2).floor() as u64 + 1
}

fn subset_indices(n: u64, primes: &[u64]) -> Vec<u64> {
    let mut idx: Vec<u64> = (0..1usize << primes.len())
        .map(|s| primes.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).fold(n, |acc, (_, &l)| acc / l))
        .collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

fn divides(d: &BigUint, n: &BigUint) -> bool {
    (n % d).is_zero()
}

fn to_nat(x: BigInt) -> BigUint {
    x.abs().to_biguint().expect("absolute value")
}

struct Terms {
    u: BTreeMap<u64, BigUint>,
    v: BTreeMap<u64, BigUint>,
}

fn lucas_terms(lucas: &Lucas, indices: &[u64]) -> Terms {
    let pairs: Vec<(u64, BigUint, BigUint)> = indices
        .par_iter()
        .map(|&k| {
            let (u, v) = lucas.uv(k);
            (k, to_nat(u), to_nat(v))
        })
        .collect();
    let mut u = BTreeMap::new();
    let mut v = BTreeMap::new();
    for (k, a, b) in pairs {
        u.insert(k, a);
        v.insert(k, b);
    }
    Terms { u, v }
}

fn one_certificate(
    d: u64,
    pell: (&BigInt, &BigInt),
    selection: &PrimeSelection,
    cofactor: u64,
    options: &SqrtDOptions,
    alpha: &Alpha,
) -> Result<GapCertificate> {
    let (x, y) = pell;
    let primes = &selection.primes;
    let big_l: u64 = primes.iter().product();
    let n = big_l
        .checked_mul(cofactor)
        .ok_or_else(|| Error::InvalidArgument("index ℓ₁⋯ℓ_J·P overflows".into()))?;
    let lucas = Lucas::chebyshev(x * 2);
    let terms = lucas_terms(&lucas, &subset_indices(n, primes));
    let y_nat = to_nat(y.clone());
    let q_n = &y_nat * &terms.u[&n];
    let p_n = terms.v[&n].clone();
    for &l in primes {
        let k = n / l;
        if !divides(&(&y_nat * &terms.u[&k]), &q_n) {
            return Err(Error::DivisibilityViolation(format!("q_{k} does not divide q_{n}")));
        }
        if !divides(&terms.v[&k], &p_n) {
            return Err(Error::DivisibilityViolation(format!("p_{k} does not divide p_{n}")));
        }
    }
    let q_lcm = &y_nat * sds_lcm(n, primes, |k| terms.u[&k].clone())?;
    let p_lcm = sds_lcm(n, primes, |k| terms.v[&k].clone())?;
    if !divides(&q_lcm, &q_n) || !divides(&p_lcm, &p_n) {
        return Err(Error::DivisibilityViolation(format!("lcm divisor does not divide the index-{n} term")));
    }
    let (num, den) = (options.prefactor.numer(), options.prefactor.denom());
    let p_scaled = &p_n * to_nat(num.clone());
    let q_scaled = &q_n * to_nat(den.clone());
    let (t, p_final, q_final) = desquare(&p_scaled, &q_scaled);
    let dq = lower_divisor(&q_final, &q_lcm);
    let ep = lower_divisor(&p_final, &p_lcm);
    let info = PipelineInfo {
        d,
        pell_x: x.clone(),
        pell_y: y.clone(),
        primes: primes.clone(),
        cofactor,
        index: n,
        density: selection.density.clone(),
        primes_coprime_to_y: primes.iter().all(|&l| !divides(&BigUint::from(l), &y_nat)),
        q_lcm_exponent: rounded(log_ratio(&q_lcm, &q_n), 10),
        p_lcm_exponent: rounded(log_ratio(&p_lcm, &p_n), 10),
        q_lcm,
        p_lcm,
        divisibility_certified: true,
        q_digits: digits(&q_n),
    };
    certify(alpha, p_final, q_final, dq, ep, t, Origin::SqrtDPipeline(info))
}

/// `r·√(4D)` as a surd.
pub fn sqrt_4d(d: u64, prefactor: &Rational) -> Result<QuadSurd> {
    let base = QuadSurd::new(BigInt::zero(), BigInt::from(2), BigInt::one(), d)?;
    base.checked_mul(&QuadSurd::from_rational(prefactor))
}

/// One certificate per `P`, ordered by increasing `q`.
pub fn construct_sqrt_d(
    d: u64,
    selection: &PrimeSelection,
    cofactors: &[u64],
    options: &SqrtDOptions,
) -> Result<Vec<GapCertificate>> {
    if !options.prefactor.is_positive() {
        return Err(Error::InvalidArgument("prefactor must be positive".into()));
    }
    if selection.primes.is_empty() {
        return Err(Error::InvalidArgument("prime selection is empty".into()));
    }
    if selection.primes.iter().any(|&l| l % 2 == 0 || !num_prime::nt_funcs::is_prime64(l)) {
        return Err(Error::InvalidArgument("selection must consist of odd primes".into()));
    }
    let big_l: u64 = selection.primes.iter().product();
    for &p in cofactors {
        if p % 2 == 0 || p.gcd(&big_l) != 1 {
            return Err(Error::InvalidArgument(format!("P = {p} must be odd and coprime to {big_l}")));
        }
    }
    let pell = pell_fundamental(d)?;
    let alpha = Alpha::Surd(sqrt_4d(d, &options.prefactor)?);
    let mut certs = cofactors
        .par_iter()
        .map(|&p| one_certificate(d, (&pell.x, &pell.y), selection, p, options, &alpha))
        .collect::<Result<Vec<_>>>()?;
    sort_by_q(&mut certs);
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{pell_sequence, prime_select, PoolPolicy};
    use crate::exact::QuadSurd;

    #[test]
    fn small_pipeline() {
        let sel = prime_select(0.04, &PoolPolicy::default()).unwrap();
        let certs = construct_sqrt_d(2, &sel, &[7], &SqrtDOptions::default()).unwrap();
        let c = &certs[0];
        assert!(c.revalidated);
        let Origin::SqrtDPipeline(info) = &c.origin else { panic!() };
        assert_eq!(info.index, 105);
        // q_105 = y_105 from the Pell sequence
        let seq = pell_sequence(2, 105).unwrap();
        assert_eq!(BigInt::from(c.q.clone()), seq.y * c.scale);
        assert!(info.q_lcm_exponent > 0.40 && info.q_lcm_exponent < 0.53);
        // gap·q ≤ 8
        let g = c.gap.as_exact().unwrap().mul_int(&BigInt::from(c.q.clone()));
        assert!(g.add_int(&BigInt::from(-8)).signum().is_lt());
    }

    #[test]
    fn prefactor_and_validation() {
        let sel = prime_select(0.04, &PoolPolicy::default()).unwrap();
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let opts = SqrtDOptions { prefactor: half.clone() };
        let c = &construct_sqrt_d(2, &sel, &[7], &opts).unwrap()[0];
        assert_eq!(c.alpha, Alpha::Surd(QuadSurd::sqrt_int(2)).to_string());
        assert!(construct_sqrt_d(2, &sel, &[9], &SqrtDOptions::default()).is_err());
        assert!(construct_sqrt_d(4, &sel, &[7], &SqrtDOptions::default()).is_err());
    }
}
