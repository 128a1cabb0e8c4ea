//! Continued fractions, convergents, Dirichlet approximation and divisor
//! witnesses.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_prime::nt_funcs::{factorize64, factors};
use num_prime::FactorizationConfig;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::alpha::{Alpha, Real, DEFAULT_PRECISION_CAP};
use crate::error::{Error, Result};
use crate::exact::{ln_big, log2_big, QuadSurd, Rational};
use crate::ser;

/// Extra steps spent looking for the period past the requested depth.
const PERIOD_SEARCH: usize = 100_000;

/// Integers above this size are not factored.
pub const MAX_FACTOR_BITS: u64 = 320;

/// A rational approximation `p/q` with `quality = |qα − p|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Approximant {
    #[serde(serialize_with = "ser::text")]
    pub p: BigInt,
    #[serde(serialize_with = "ser::text")]
    pub q: BigInt,
    pub quality: Real,
    pub scaled_quality: Real,
}

impl Approximant {
    pub fn new(alpha: &Alpha, p: BigInt, q: BigInt) -> Self {
        let quality = alpha.affine_value(&q, &-&p).abs();
        let scaled_quality = quality.mul_int(&q);
        Approximant { p, q, quality, scaled_quality }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CFExpansion {
    #[serde(serialize_with = "ser::text")]
    pub a0: BigInt,
    #[serde(serialize_with = "ser::text_seq")]
    pub partial_quotients: Vec<BigInt>,
    /// `(start, length)` with `start` counted from `a0` at index 0.
    pub period: Option<(usize, usize)>,
    /// True when the expansion of a rational ended before `depth`.
    pub terminated: bool,
}

impl CFExpansion {
    /// `a0` followed by the partial quotients.
    pub fn terms(&self) -> Vec<BigInt> {
        std::iter::once(self.a0.clone()).chain(self.partial_quotients.iter().cloned()).collect()
    }
}

/// `(P + √D)/Q` with `Q | D − P²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SurdState {
    p: BigInt,
    q: BigInt,
}

fn surd_state(x: &QuadSurd) -> (SurdState, BigInt) {
    // (a + b√d)/c = (±a + √(b²d)) / ±c
    let d_big = x.b() * x.b() * BigInt::from(x.d());
    let (mut p, mut q) = if x.b().is_positive() {
        (x.a().clone(), x.c().clone())
    } else {
        (-x.a(), -x.c())
    };
    let mut disc = d_big;
    if !(&disc - &p * &p).is_multiple_of(&q) {
        let s = q.abs();
        p *= &s;
        disc *= &s * &s;
        q *= &s;
    }
    (SurdState { p, q }, disc)
}

fn floor_state(st: &SurdState, root: &BigInt) -> BigInt {
    if st.q.is_positive() {
        (&st.p + root).div_floor(&st.q)
    } else {
        (-&st.p - root - BigInt::one()).div_floor(&-&st.q)
    }
}

fn surd_cf(x: &QuadSurd, depth: usize) -> CFExpansion {
    let (mut st, disc) = surd_state(x);
    let root = disc.sqrt();
    let mut seen: HashMap<SurdState, usize> = HashMap::new();
    let mut terms = Vec::with_capacity(depth);
    let mut period = None;
    for k in 0..depth {
        if period.is_none() {
            if let Some(&start) = seen.get(&st) {
                period = Some((start, k - start));
            } else {
                seen.insert(st.clone(), k);
            }
        }
        let a = floor_state(&st, &root);
        let p_next = &a * &st.q - &st.p;
        let q_next = (&disc - &p_next * &p_next) / &st.q;
        terms.push(a);
        st = SurdState { p: p_next, q: q_next };
    }
    if period.is_none() {
        // Keep stepping until the state repeats so the period is reported
        // even for shallow requests.
        let mut k = depth;
        while period.is_none() && k < depth + PERIOD_SEARCH {
            if let Some(&start) = seen.get(&st) {
                period = Some((start, k - start));
                break;
            }
            seen.insert(st.clone(), k);
            let a = floor_state(&st, &root);
            let p_next = &a * &st.q - &st.p;
            let q_next = (&disc - &p_next * &p_next) / &st.q;
            st = SurdState { p: p_next, q: q_next };
            k += 1;
        }
    }
    split_terms(terms, period, false)
}

fn rational_terms(r: &Rational, depth: usize) -> Vec<BigInt> {
    let mut terms = Vec::new();
    let mut x = r.clone();
    while terms.len() < depth {
        let a = x.floor().to_integer();
        let frac = &x - Rational::from_integer(a.clone());
        terms.push(a);
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
    }
    terms
}

fn split_terms(mut terms: Vec<BigInt>, period: Option<(usize, usize)>, terminated: bool) -> CFExpansion {
    let rest = terms.split_off(1);
    CFExpansion { a0: terms.pop().expect("depth >= 1"), partial_quotients: rest, period, terminated }
}

fn literal_bits(alpha: &Alpha) -> u32 {
    match alpha {
        Alpha::Literal(l) => l.half_ulp().denom().bits() as u32,
        Alpha::Surd(_) => DEFAULT_PRECISION_CAP,
    }
}

/// The first `depth` terms (counting `a0`) of the continued fraction of α.
pub fn continued_fraction(alpha: &Alpha, depth: usize) -> Result<CFExpansion> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !alpha.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    match alpha {
        Alpha::Surd(s) if s.is_rational() => {
            let terms = rational_terms(&s.to_rational().expect("rational"), depth);
            let terminated = terms.len() < depth;
            Ok(split_terms(terms, None, terminated))
        }
        Alpha::Surd(s) => Ok(surd_cf(s, depth)),
        Alpha::Literal(_) => {
            let terms = literal_terms(alpha, depth);
            if terms.len() < depth {
                return Err(Error::PrecisionExhausted { bits: literal_bits(alpha) });
            }
            Ok(split_terms(terms, None, false))
        }
    }
}

/// Terms shared by both ends of the literal's uncertainty interval. The last
/// term of each finite expansion is ambiguous and is not trusted.
fn literal_terms(alpha: &Alpha, depth: usize) -> Vec<BigInt> {
    let Alpha::Literal(l) = alpha else { unreachable!() };
    let lo = rational_terms(&l.lower(), depth + 1);
    let hi = rational_terms(&l.upper(), depth + 1);
    let trusted = lo.len().min(hi.len()).saturating_sub(1).min(depth);
    let common = lo.iter().zip(&hi).take(trusted).take_while(|(a, b)| a == b).count();
    lo[..common].to_vec()
}

/// Convergents `p_k/q_k` from the continued fraction.
pub fn convergents(alpha: &Alpha, count: usize) -> Result<Vec<Approximant>> {
    let cf = continued_fraction(alpha, count)?;
    Ok(convergents_of(alpha, &cf.terms()))
}

fn convergents_of(alpha: &Alpha, terms: &[BigInt]) -> Vec<Approximant> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (terms[0].clone(), BigInt::one());
    let mut out = vec![Approximant::new(alpha, p1.clone(), q1.clone())];
    for a in &terms[1..] {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        out.push(Approximant::new(alpha, p2.clone(), q2.clone()));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

/// `(a, q)` with `1 ≤ q ≤ Q`, `a ≥ 1` and `0 < |a − qα| ≤ 1/Q`.
///
/// Uses the last convergent with denominator at most `Q`.
pub fn dirichlet_approx(alpha: &Alpha, big_q: u64) -> Result<Approximant> {
    if big_q == 0 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    if !alpha.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    let bound = BigInt::from(big_q);
    let mut best: Option<Approximant> = None;
    let mut depth = 8;
    'outer: loop {
        // Convergents of a literal are only those it certifies; the final
        // quality check below still holds for whichever is reached.
        let (terms, more) = match alpha {
            Alpha::Literal(_) => {
                let t = literal_terms(alpha, depth);
                let more = t.len() == depth;
                (t, more)
            }
            Alpha::Surd(_) => {
                let cf = continued_fraction(alpha, depth)?;
                (cf.terms(), !cf.terminated)
            }
        };
        if terms.is_empty() {
            return Err(Error::PrecisionExhausted { bits: literal_bits(alpha) });
        }
        for c in convergents_of(alpha, &terms) {
            if c.q > bound {
                break 'outer;
            }
            best = Some(c);
        }
        if !more {
            break;
        }
        depth *= 2;
    }
    let mut best = best.expect("q_0 = 1 <= Q");
    if best.p.is_zero() {
        best = Approximant::new(alpha, BigInt::one(), bound.clone());
    }
    let cap = DEFAULT_PRECISION_CAP;
    let (q, a) = (&best.q, &best.p);
    if alpha.affine_sign(q, &-a, cap)?.is_eq() {
        return Err(Error::RationalAlpha);
    }
    // |a − qα| ≤ 1/Q  ⟺  Qqα − Qa ∈ [−1, 1]
    let qq = &bound * q;
    let qa = &bound * a;
    let above = alpha.affine_sign(&qq, &(-&qa - 1), cap)?.is_gt();
    let below = alpha.affine_sign(&qq, &(-&qa + 1), cap)?.is_lt();
    if above || below {
        return Err(Error::AlphaTooSmall);
    }
    Ok(best)
}

/// A divisor `d | n` with its balance `log min(d, n/d) / (½ log n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorWitness {
    #[serde(serialize_with = "ser::text")]
    pub n: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub d: BigUint,
    #[serde(serialize_with = "ser::ten_places")]
    pub balance: f64,
}

impl DivisorWitness {
    pub fn new(n: BigUint, d: BigUint) -> Result<Self> {
        if n.is_zero() || d.is_zero() || !(&n % &d).is_zero() {
            return Err(Error::DivisibilityViolation(format!("{d} does not divide {n}")));
        }
        let balance = balance_of(&n, &d);
        Ok(DivisorWitness { n, d, balance })
    }

    /// `min(d, n/d)`.
    pub fn small_side(&self) -> BigUint {
        let co = &self.n / &self.d;
        co.min(self.d.clone())
    }

    /// Test of `balance ≥ num/den`, i.e. `min^(2 den) ≥ n^num`.
    pub fn balance_at_least(&self, num: u32, den: u32) -> bool {
        power_at_least(&self.small_side(), &self.n, num, 2 * den)
    }
}

fn balance_of(n: &BigUint, d: &BigUint) -> f64 {
    if n.is_one() {
        return 1.0;
    }
    let co = n / d;
    let small = if &co < d { co } else { d.clone() };
    (ln_big(&small) / (0.5 * ln_big(n))).clamp(0.0, 1.0)
}

/// Prime factorization; `FactorizationTimeout` past [`MAX_FACTOR_BITS`] or
/// when the rho budget runs out.
pub fn factorize(n: &BigUint) -> Result<Vec<(BigUint, usize)>> {
    if let Some(small) = n.to_u64() {
        return Ok(factorize64(small).into_iter().map(|(p, e)| (BigUint::from(p), e)).collect());
    }
    let bits = n.bits();
    if bits > MAX_FACTOR_BITS {
        return Err(Error::FactorizationTimeout { bits });
    }
    let mut config = FactorizationConfig::default();
    config.rho_trials = 64;
    let (found, rest) = factors(n.clone(), Some(config));
    if rest.is_some() {
        return Err(Error::FactorizationTimeout { bits });
    }
    Ok(found.into_iter().collect())
}

/// All divisors of `n`, unsorted.
pub fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n)? {
        let len = divs.len();
        let mut pk = BigUint::one();
        for _ in 0..e {
            pk *= &p;
            for i in 0..len {
                divs.push(&divs[i] * &pk);
            }
        }
    }
    Ok(divs)
}

/// The divisor `d ≤ √n` maximizing `min(d, n/d)`.
pub fn best_divisor(n: &BigUint) -> Result<DivisorWitness> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let d = divisors(n)?
        .into_iter()
        .filter(|d| d * d <= *n)
        .max()
        .expect("1 divides n");
    DivisorWitness::new(n.clone(), d)
}

pub fn is_perfect_square(n: &BigUint) -> bool {
    // quadratic residues modulo 64·63·65·11
    const MODULI: [u32; 4] = [64, 63, 65, 11];
    for m in MODULI {
        let r = (n % m).to_u32().expect("small remainder");
        if !(0..m).any(|k| k * k % m == r) {
            return false;
        }
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Exact test of `x^den ≥ n^num`, decided from logarithms when they are
/// clearly apart.
pub fn power_at_least(x: &BigUint, n: &BigUint, num: u32, den: u32) -> bool {
    let lhs = log2_big(x) * den as f64;
    let rhs = log2_big(n) * num as f64;
    let slack = 1e-9 * lhs.abs().max(rhs.abs()).max(1.0);
    if lhs > rhs + slack {
        return true;
    }
    if lhs < rhs - slack {
        return false;
    }
    num_traits::pow(x.clone(), den as usize) >= num_traits::pow(n.clone(), num as usize)
}

/// The least `t ∈ {1, 2, 3}` with neither `tp` nor `tq` a square, and
/// `(t, tp, tq)`.
pub fn desquare(p: &BigUint, q: &BigUint) -> (u32, BigUint, BigUint) {
    for t in 1..=3u32 {
        let tp = p * t;
        let tq = q * t;
        if !is_perfect_square(&tp) && !is_perfect_square(&tq) {
            return (t, tp, tq);
        }
    }
    unreachable!("one of p, 2p, 3p and of q, 2q, 3q is a nonsquare pairwise")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(s: &str) -> Alpha {
        Alpha::parse(s).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn classical_expansions() {
        let cf = continued_fraction(&alpha("sqrt:2"), 6).unwrap();
        assert_eq!(cf.terms(), ints(&[1, 2, 2, 2, 2, 2]));
        assert_eq!(cf.period, Some((1, 1)));
        let phi = continued_fraction(&alpha("surd:1,1,2,5"), 8).unwrap();
        assert_eq!(phi.terms(), ints(&[1; 8]));
        assert_eq!(phi.period, Some((0, 1)));
        let r = continued_fraction(&alpha("sqrt:49/9"), 5).unwrap();
        assert_eq!(r.terms(), ints(&[2, 3]));
        assert!(r.terminated);
        let s7 = continued_fraction(&alpha("sqrt:7"), 9).unwrap();
        assert_eq!(s7.terms(), ints(&[2, 1, 1, 1, 4, 1, 1, 1, 4]));
        assert_eq!(s7.period, Some((1, 4)));
        let shallow = continued_fraction(&alpha("sqrt:7"), 1).unwrap();
        assert_eq!(shallow.period, Some((1, 4)));
    }

    #[test]
    fn negative_coefficient_surds() {
        // (5 − √3)/2 ≈ 1.6339746
        let cf = continued_fraction(&alpha("surd:5,-1,2,3"), 6).unwrap();
        let lit = continued_fraction(&alpha("dec:1.63397459621556135323627682924706"), 6).unwrap();
        assert_eq!(cf.terms(), lit.terms());
    }

    #[test]
    fn literal_runs_out() {
        let a = alpha("dec:1.41421356");
        assert!(continued_fraction(&a, 5).is_ok());
        assert!(matches!(continued_fraction(&a, 40), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn sqrt2_convergents() {
        let cs = convergents(&alpha("sqrt:2"), 6).unwrap();
        let pq: Vec<(i64, i64)> = cs.iter().map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap())).collect();
        assert_eq!(pq, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)]);
        for c in &cs {
            let sq = c.scaled_quality.as_exact().unwrap();
            assert!(sq.add_int(&BigInt::from(-1)).signum().is_lt());
        }
        let one = convergents(&alpha("sqrt:2"), 1).unwrap();
        assert_eq!((one[0].p.clone(), one[0].q.clone()), (BigInt::from(1), BigInt::from(1)));
    }

    #[test]
    fn dirichlet_examples() {
        let a = dirichlet_approx(&alpha("sqrt:2"), 10).unwrap();
        assert_eq!((a.p, a.q), (BigInt::from(7), BigInt::from(5)));
        let b = dirichlet_approx(&alpha("sqrt:2"), 1).unwrap();
        assert_eq!((b.p, b.q), (BigInt::from(1), BigInt::from(1)));
        // α = √(1/50) ≈ 0.1414 and Q = 5: no convergent with p ≥ 1 fits
        assert_eq!(dirichlet_approx(&alpha("sqrt:1/50"), 5).err(), Some(Error::AlphaTooSmall));
        assert_eq!(dirichlet_approx(&alpha("sqrt:9/4"), 10).err(), Some(Error::RationalAlpha));
    }

    #[test]
    fn divisor_examples() {
        let w = best_divisor(&BigUint::from(12u32)).unwrap();
        assert_eq!(w.d, BigUint::from(3u32));
        assert!((w.balance - 3f64.ln() / (0.5 * 12f64.ln())).abs() < 1e-12);
        let sq = best_divisor(&BigUint::from(36u32)).unwrap();
        assert_eq!((sq.d.clone(), sq.balance), (BigUint::from(6u32), 1.0));
        let prime = best_divisor(&BigUint::from(17u32)).unwrap();
        assert_eq!((prime.d.clone(), prime.balance), (BigUint::one(), 0.0));
        assert!(sq.balance_at_least(1, 1));
        assert!(w.balance_at_least(88, 100));
        assert!(!w.balance_at_least(89, 100));
    }

    #[test]
    fn large_factorizations() {
        // (2^61 − 1)(2^31 − 1)
        let n = (BigUint::one() << 61u32) - 1u32;
        let m = (BigUint::one() << 31u32) - 1u32;
        let w = best_divisor(&(&n * &m)).unwrap();
        assert_eq!(w.d, m);
        let huge = BigUint::one() << 400u32;
        assert!(matches!(best_divisor(&huge), Err(Error::FactorizationTimeout { bits: 401 })));
    }

    #[test]
    fn squares_and_powers() {
        for k in 0u32..2000 {
            let n = BigUint::from(k);
            let r = (k as f64).sqrt() as u32;
            assert_eq!(is_perfect_square(&n), r * r == k || (r + 1) * (r + 1) == k, "{k}");
        }
        let big = BigUint::from(3u32).pow(4001);
        assert!(!is_perfect_square(&big));
        assert!(is_perfect_square(&(&big * &big)));
        let u = |x: u32| BigUint::from(x);
        assert!(power_at_least(&u(4), &u(16), 1, 2));
        assert!(!power_at_least(&u(3), &u(16), 1, 2));
        assert!(power_at_least(&u(10), &u(1000), 1, 3));
    }

    #[test]
    fn desquare_examples() {
        let u = |x: u32| BigUint::from(x);
        assert_eq!(desquare(&u(17), &u(12)), (1, u(17), u(12)));
        assert_eq!(desquare(&u(4), &u(9)), (2, u(8), u(18)));
        assert_eq!(desquare(&u(2), &u(3)), (1, u(2), u(3)));
        assert_eq!(desquare(&u(1), &u(2)), (3, u(3), u(6)));
    }
}
