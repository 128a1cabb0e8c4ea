//! The family `α(x; a, b, ε, r) = r·θ^a·(√Δ)^b` with `Δ = x² + 4ε` and
//! `θ = (x + √Δ)/2`.
//!
//! `θ` and its conjugate are the roots of `t² − xt − ε`, so with the Lucas
//! pair `(P, Q) = (x, −ε)`:
//!
//! * `b = 0`: `α ≈ c·U_{n+a+1} / (d·U_{n+1})`
//! * `b = 1`: `α ≈ c·V_{n+a} / (d·U_n)`
//!
//! where `r = c/d`. For `ε = +1` these are the integer forms of the
//! Chebyshev values at `ix/2`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{certify, log_ratio, lower_divisor, rounded, sort_by_q, GapCertificate, Origin};
use crate::alpha::Alpha;
use crate::chebyshev::{prime_select, sds_lcm, Lucas, PoolPolicy, PrimeSelection};
use crate::diophantine::{desquare, Approximant};
use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational};
use crate::ser;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralQuadraticSpec {
    pub x: i64,
    pub a: i64,
    pub b: u8,
    /// `ε ∈ {+1, −1}`.
    pub sign: i8,
    #[serde(serialize_with = "ser::text")]
    pub r: Rational,
}

impl GeneralQuadraticSpec {
    pub fn new(x: i64, a: i64, b: u8, sign: i8, r: Rational) -> Result<Self> {
        let spec = GeneralQuadraticSpec { x, a, b, sign, r };
        spec.validate()?;
        Ok(spec)
    }

    /// `(3 + √5)/2 = θ²` at `x = 1, ε = +1`.
    pub fn golden2() -> Self {
        GeneralQuadraticSpec { x: 1, a: 2, b: 0, sign: 1, r: Rational::one() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.into()));
        if self.b > 1 {
            return bad("b must be 0 or 1");
        }
        if self.sign != 1 && self.sign != -1 {
            return bad("sign must be +1 or -1");
        }
        if self.a == 0 && self.b == 0 {
            return bad("(a, b) = (0, 0) gives a rational alpha");
        }
        if self.x == 0 {
            return bad("x must be nonzero");
        }
        if self.sign == -1 && self.x.abs() <= 2 {
            return bad("sign = -1 needs |x| >= 3");
        }
        if self.r.is_zero() {
            return bad("r must be nonzero");
        }
        if self.alpha()?.signum().is_le() {
            return bad("alpha must be positive");
        }
        Ok(())
    }

    pub fn discriminant(&self) -> i64 {
        self.x * self.x + 4 * self.sign as i64
    }

    fn theta(&self) -> Result<QuadSurd> {
        QuadSurd::new(BigInt::from(self.x), BigInt::one(), BigInt::from(2), self.discriminant() as u64)
    }

    /// The exact value `r·θ^a·(√Δ)^b`.
    pub fn alpha(&self) -> Result<QuadSurd> {
        let mut v = self.theta()?.pow(self.a)?.checked_mul(&QuadSurd::from_rational(&self.r))?;
        if self.b == 1 {
            v = v.checked_mul(&QuadSurd::sqrt_int(self.discriminant() as u64))?;
        }
        Ok(v)
    }

    /// The same α with `x > 0`: `α(−x; a, b, ε, r) = α(x; −a, b, ε, ε^a·r)`.
    pub fn normalized(&self) -> Self {
        if self.x > 0 {
            return self.clone();
        }
        let flip = self.sign == -1 && self.a % 2 != 0;
        let r = if flip { -self.r.clone() } else { self.r.clone() };
        GeneralQuadraticSpec { x: -self.x, a: -self.a, b: self.b, sign: self.sign, r }
    }

    pub fn lucas(&self) -> Lucas {
        Lucas::new(self.x, -(self.sign as i64))
    }

    /// Lucas indices `(numerator, denominator)` of the `n`-th approximant.
    pub fn indices(&self, n: i64) -> (i64, i64) {
        if self.b == 0 {
            (n + self.a + 1, n + 1)
        } else {
            (n + self.a, n)
        }
    }

    /// Difference of numerator and denominator indices.
    pub fn index_offset(&self) -> i64 {
        self.a
    }

    fn first_n(&self) -> i64 {
        let (np, _) = self.indices(0);
        1.max(1 - np)
    }

    fn term_p(&self, lucas: &Lucas, k: u64) -> BigUint {
        let (u, v) = lucas.uv(k);
        nat(if self.b == 0 { u } else { v })
    }
}

fn nat(x: BigInt) -> BigUint {
    x.abs().to_biguint().expect("absolute value")
}

fn parts(r: &Rational) -> (BigUint, BigUint) {
    (nat(r.numer().clone()), nat(r.denom().clone()))
}

/// The first `count` approximants, from the smallest admissible `n`.
pub fn approximants_general_quadratic(spec: &GeneralQuadraticSpec, count: usize) -> Result<Vec<Approximant>> {
    spec.validate()?;
    let s = spec.normalized();
    let alpha = Alpha::Surd(s.alpha()?);
    let lucas = s.lucas();
    let (c, d) = parts(&s.r);
    let n0 = s.first_n();
    let top = s.indices(n0 + count as i64).0.max(s.indices(n0 + count as i64).1) as usize;
    let u = lucas.u_table(top);
    let v = lucas.v_table(top);
    Ok((0..count as i64)
        .map(|i| {
            let (kp, kq) = s.indices(n0 + i);
            let tp = if s.b == 0 { &u[kp as usize] } else { &v[kp as usize] };
            let p = BigInt::from(c.clone()) * tp;
            let q = BigInt::from(d.clone()) * &u[kq as usize];
            Approximant::new(&alpha, p, q)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexSolution {
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "L_prime")]
    pub l_prime: u64,
    pub mu: u64,
    pub mu_prime: u64,
    pub m_idx: u64,
    pub m_prime_idx: u64,
    pub b_off: i64,
}

impl IndexSolution {
    pub fn holds(&self) -> bool {
        let lhs = self.l as i128 * self.m_idx as i128 - self.l_prime as i128 * self.m_prime_idx as i128;
        lhs == self.b_off as i128
            && (self.l as u128 * self.m_idx as u128) % 2 == 1
            && self.l.gcd(&self.m_idx) == 1
            && self.l_prime.gcd(&self.m_prime_idx) == 1
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Solutions of `L·m − L'·m' = b_off` with `m = 2μL + 1`, `m' = μ'L' + 1`,
/// `μ, μ' ≥ 0`, in increasing `μ`; `keep` filters them.
pub fn solve_index_equation(
    l: u64,
    l_prime: u64,
    b_off: i64,
    count: usize,
    keep: impl Fn(&IndexSolution) -> bool,
) -> Result<Vec<IndexSolution>> {
    let (li, lpi) = (l as i128, l_prime as i128);
    let a = 2 * li * li;
    let b = lpi * lpi;
    let rhs = b_off as i128 - li + lpi;
    let inv = mod_inverse(a, b).ok_or_else(|| Error::InvalidArgument(format!("gcd(2L², L'²) != 1 for L = {l}, L' = {l_prime}")))?;
    let mu0 = (rhs.rem_euclid(b) * inv).rem_euclid(b);
    let overflow = || Error::InvalidArgument("index solution overflows 64 bits".into());
    let mut out = Vec::with_capacity(count);
    let mut mu = mu0;
    while out.len() < count {
        let num = a * mu - rhs;
        if num >= 0 {
            let mu_p = num / b;
            let m_idx = 2 * mu * li + 1;
            let m_p_idx = mu_p * lpi + 1;
            if m_idx * li > u64::MAX as i128 || m_p_idx * lpi > u64::MAX as i128 {
                return Err(overflow());
            }
            let sol = IndexSolution {
                l,
                l_prime,
                mu: mu as u64,
                mu_prime: mu_p as u64,
                m_idx: m_idx as u64,
                m_prime_idx: m_p_idx as u64,
                b_off,
            };
            debug_assert!(sol.holds());
            if keep(&sol) {
                out.push(sol);
            }
        }
        mu += b;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyInfo {
    pub spec: GeneralQuadraticSpec,
    pub n: u64,
    pub numerator_index: u64,
    pub denominator_index: u64,
    pub solution: IndexSolution,
    pub primes: Vec<u64>,
    pub primes_prime: Vec<u64>,
    /// `log lcm / log term` for the numerator and denominator sequences.
    pub p_lcm_exponent: f64,
    pub q_lcm_exponent: f64,
}

/// `lcm(a_{k/ℓ})` for a term of a divisibility sequence, with every
/// divisibility checked by exact division.
fn certified_lcm(k: u64, primes: &[u64], term: &(dyn Fn(u64) -> BigUint + Sync), top: &BigUint) -> Result<BigUint> {
    for &l in primes {
        if !(top % term(k / l)).is_zero() {
            return Err(Error::DivisibilityViolation(format!("term {} does not divide term {k}", k / l)));
        }
    }
    let g = sds_lcm(k, primes, term)?;
    if !(top % &g).is_zero() {
        return Err(Error::DivisibilityViolation(format!("lcm divisor does not divide term {k}")));
    }
    Ok(g)
}

fn general_one(s: &GeneralQuadraticSpec, sol: IndexSolution, sel: &PrimeSelection, sel_p: &PrimeSelection, alpha: &Alpha) -> Result<GapCertificate> {
    let lucas = s.lucas();
    let kp = sol.l * sol.m_idx;
    let kq = sol.l_prime * sol.m_prime_idx;
    let n = if s.b == 0 { kq - 1 } else { kq };
    let tp = s.term_p(&lucas, kp);
    let tq = nat(lucas.u(kq));
    let fp = |k: u64| s.term_p(&lucas, k);
    let fq = |k: u64| nat(lucas.u(k));
    let gp = certified_lcm(kp, &sel.primes, &fp, &tp)?;
    let gq = certified_lcm(kq, &sel_p.primes, &fq, &tq)?;
    let (c, d) = parts(&s.r);
    let (t, p, q) = desquare(&(&tp * c), &(&tq * d));
    let e = lower_divisor(&p, &gp);
    let dd = lower_divisor(&q, &gq);
    let info = FamilyInfo {
        spec: s.clone(),
        n,
        numerator_index: kp,
        denominator_index: kq,
        solution: sol,
        primes: sel.primes.clone(),
        primes_prime: sel_p.primes.clone(),
        p_lcm_exponent: rounded(log_ratio(&gp, &tp), 10),
        q_lcm_exponent: rounded(log_ratio(&gq, &tq), 10),
    };
    certify(alpha, p, q, dd, e, t, Origin::GeneralQuadratic(info))
}

/// Certificates from prime selections `ℓ ≡ 1 (mod 4)` and `ℓ' ≡ 3 (mod 4)`
/// and the index equation `L·m − L'·m' = a`.
pub fn construct_general(spec: &GeneralQuadraticSpec, epsilon: f64, count: usize) -> Result<Vec<GapCertificate>> {
    spec.validate()?;
    let s = spec.normalized();
    let alpha = Alpha::Surd(s.alpha()?);
    let sel = prime_select(epsilon, &PoolPolicy::residue(1))?;
    let sel_p = prime_select(epsilon, &PoolPolicy::residue(3))?;
    let l = crate::construct::to_u64(&sel.product()).ok_or_else(|| Error::InvalidArgument("L overflows".into()))?;
    let l_p = crate::construct::to_u64(&sel_p.product()).ok_or_else(|| Error::InvalidArgument("L' overflows".into()))?;
    let n_min = s.first_n();
    let keep = |sol: &IndexSolution| {
        let kq = (sol.l_prime * sol.m_prime_idx) as i64;
        let n = if s.b == 0 { kq - 1 } else { kq };
        n >= n_min
    };
    let sols = solve_index_equation(l, l_p, s.index_offset(), count, keep)?;
    let mut certs = sols
        .into_par_iter()
        .map(|sol| general_one(&s, sol, &sel, &sel_p, &alpha))
        .collect::<Result<Vec<_>>>()?;
    sort_by_q(&mut certs);
    Ok(certs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongInfo {
    pub spec: GeneralQuadraticSpec,
    pub n: u64,
    pub numerator_index: u64,
    pub denominator_index: u64,
    /// `U_{k/2}` for the numerator and denominator indices `k`.
    #[serde(serialize_with = "ser::text")]
    pub p_half: BigUint,
    #[serde(serialize_with = "ser::text")]
    pub q_half: BigUint,
}

fn strong_one(s: &GeneralQuadraticSpec, n: u64, alpha: &Alpha) -> Result<GapCertificate> {
    let lucas = s.lucas();
    let (kp, kq) = s.indices(n as i64);
    let (kp, kq) = (kp as u64, kq as u64);
    let tp = nat(lucas.u(kp));
    let tq = nat(lucas.u(kq));
    let hp = nat(lucas.u(kp / 2));
    let hq = nat(lucas.u(kq / 2));
    if !(&tp % &hp).is_zero() || !(&tq % &hq).is_zero() {
        return Err(Error::DivisibilityViolation(format!("U_(k/2) does not divide U_k at n = {n}")));
    }
    let (c, d) = parts(&s.r);
    let (t, p, q) = desquare(&(&tp * c), &(&tq * d));
    let e = lower_divisor(&p, &hp);
    let dd = lower_divisor(&q, &hq);
    let info = StrongInfo { spec: s.clone(), n, numerator_index: kp, denominator_index: kq, p_half: hp, q_half: hq };
    certify(alpha, p, q, dd, e, t, Origin::StrongExact(info))
}

/// `a` even, `b = 0`, odd `n`: both Lucas indices are even, and
/// `U_{k/2} | U_k` gives divisors of exact square-root size.
pub fn construct_strong_exact(spec: &GeneralQuadraticSpec, count: usize) -> Result<Vec<GapCertificate>> {
    spec.validate()?;
    let s = spec.normalized();
    if s.b != 0 || s.a % 2 != 0 {
        return Err(Error::InvalidSpec("strong construction needs b = 0 and a even".into()));
    }
    let alpha = Alpha::Surd(s.alpha()?);
    let mut n0 = s.first_n().max(1);
    if n0 % 2 == 0 {
        n0 += 1;
    }
    let ns: Vec<u64> = (0..count as u64).map(|i| n0 as u64 + 2 * i).collect();
    let mut certs = ns.par_iter().map(|&n| strong_one(&s, n, &alpha)).collect::<Result<Vec<_>>>()?;
    sort_by_q(&mut certs);
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::golden2;
    use crate::chebyshev::{pell_sequence, SdsSpec};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn family_values() {
        assert_eq!(GeneralQuadraticSpec::golden2().alpha().unwrap(), golden2());
        let phi = GeneralQuadraticSpec::new(1, 1, 0, 1, Rational::one()).unwrap();
        assert_eq!(phi.alpha().unwrap(), QuadSurd::new(1.into(), 1.into(), 2.into(), 5).unwrap());
        let s8 = GeneralQuadraticSpec::new(6, 0, 1, -1, rat(1, 2)).unwrap();
        assert_eq!(s8.alpha().unwrap(), QuadSurd::sqrt_int(8));
        // √D = α(2z, 0, 1, −1, 1/(2w)) for z² − D w² = 1
        let s3 = GeneralQuadraticSpec::new(4, 0, 1, -1, rat(1, 2)).unwrap();
        assert_eq!(s3.alpha().unwrap(), QuadSurd::sqrt_int(3));
        assert!(GeneralQuadraticSpec::new(2, 1, 0, -1, Rational::one()).is_err());
        assert!(GeneralQuadraticSpec::new(3, 0, 0, 1, Rational::one()).is_err());
        assert!(GeneralQuadraticSpec::new(3, 1, 0, 1, rat(-1, 1)).is_err());
    }

    #[test]
    fn negative_x_normalization() {
        for x in [-7i64, -4, -3, -1] {
            for a in -3i64..=3 {
                for b in 0u8..=1 {
                    for sign in [1i8, -1] {
                        if (a == 0 && b == 0) || (sign == -1 && x.abs() <= 2) {
                            continue;
                        }
                        let raw = GeneralQuadraticSpec { x, a, b, sign, r: rat(3, 2) };
                        let norm = raw.normalized();
                        assert_eq!(raw.alpha().unwrap(), norm.alpha().unwrap(), "x={x} a={a} b={b} sign={sign}");
                        assert!(norm.x > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn golden_mean_gives_fibonacci_ratios() {
        let phi = GeneralQuadraticSpec::new(1, 1, 0, 1, Rational::one()).unwrap();
        let fib = SdsSpec::LinearRecurrence { b: 1, d: 1 }.table(40);
        let apps = approximants_general_quadratic(&phi, 30).unwrap();
        for (i, ap) in apps.iter().enumerate() {
            assert_eq!(ap.p, fib[i + 3]);
            assert_eq!(ap.q, fib[i + 2]);
            let sq = ap.scaled_quality.as_exact().unwrap();
            assert!(sq.add_int(&BigInt::from(-1)).signum().is_lt());
        }
    }

    #[test]
    fn sqrt8_matches_pell() {
        let s8 = GeneralQuadraticSpec::new(6, 0, 1, -1, rat(1, 2)).unwrap();
        let apps = approximants_general_quadratic(&s8, 12).unwrap();
        for (i, ap) in apps.iter().enumerate() {
            let seq = pell_sequence(2, i as u64 + 1).unwrap();
            assert_eq!(ap.p, seq.x * 2);
            assert_eq!(ap.q, seq.y);
        }
    }

    #[test]
    fn index_equation() {
        let sols = solve_index_equation(65, 3, 2, 5, |_| true).unwrap();
        assert_eq!(sols.len(), 5);
        assert_eq!(sols[0].mu, 6);
        assert_eq!(sols[0].mu_prime, 5640);
        for s in &sols {
            assert!(s.holds());
        }
        let neg = solve_index_equation(5, 21, -4, 3, |_| true).unwrap();
        assert!(neg.iter().all(IndexSolution::holds));
        assert!(solve_index_equation(15, 3, 0, 1, |_| true).is_err());
    }

    #[test]
    fn general_certificates() {
        let certs = construct_general(&GeneralQuadraticSpec::golden2(), 0.3, 2).unwrap();
        assert_eq!(certs.len(), 2);
        for c in &certs {
            assert!(c.revalidated);
            let Origin::GeneralQuadratic(info) = &c.origin else { panic!() };
            assert!(info.solution.holds());
            assert_eq!(info.numerator_index as i64 - info.denominator_index as i64, 2);
        }
        let s3 = GeneralQuadraticSpec::new(3, 1, 1, -1, rat(2, 3)).unwrap();
        let certs = construct_general(&s3, 0.3, 1).unwrap();
        assert!(certs[0].revalidated);
    }

    #[test]
    fn strong_certificates() {
        let certs = construct_strong_exact(&GeneralQuadraticSpec::golden2(), 10).unwrap();
        assert_eq!(certs.len(), 10);
        for c in &certs {
            let (d, e) = c.divisors();
            for (g, v) in [(d, &c.q), (e, &c.p)] {
                let co = v / g;
                let small = if &co < g { co } else { g.clone() };
                assert!(&small * &small * 25u32 >= *v);
            }
        }
        let odd_a = GeneralQuadraticSpec::new(1, 1, 0, 1, Rational::one()).unwrap();
        assert!(construct_strong_exact(&odd_a, 3).is_err());
    }
}
