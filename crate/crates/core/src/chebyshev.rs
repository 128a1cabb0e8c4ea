//! Integer Chebyshev values, strong divisibility sequences, Pell solutions,
//! prime selection and lcm divisors.
//!
//! Everything runs on Lucas sequences `s_{k+1} = P s_k − Q s_{k−1}`:
//! `U_0 = 0, U_1 = 1` and `V_0 = 2, V_1 = P`. With `Q = 1` these are the
//! half-integral Chebyshev specializations `U_k(x/2) = U_{k+1}` and
//! `2T_k(x/2) = V_k` at `P = x`.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_prime::nt_funcs::is_prime64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::diophantine::continued_fraction;
use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational};
use crate::ser;

/// Above this index single terms are computed by doubling.
pub const DOUBLING_THRESHOLD: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lucas {
    p: BigInt,
    q: BigInt,
}

impl Lucas {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        Lucas { p: p.into(), q: q.into() }
    }

    /// `P = x, Q = 1`: the Chebyshev case.
    pub fn chebyshev(x: impl Into<BigInt>) -> Self {
        Lucas::new(x, 1)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn discriminant(&self) -> BigInt {
        &self.p * &self.p - BigInt::from(4) * &self.q
    }

    fn table(&self, first: BigInt, second: BigInt, n: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(first);
        if n >= 1 {
            out.push(second);
        }
        for k in 2..=n {
            let next = &self.p * &out[k - 1] - &self.q * &out[k - 2];
            out.push(next);
        }
        out
    }

    /// `U_0, …, U_n`.
    pub fn u_table(&self, n: usize) -> Vec<BigInt> {
        self.table(BigInt::zero(), BigInt::one(), n)
    }

    /// `V_0, …, V_n`.
    pub fn v_table(&self, n: usize) -> Vec<BigInt> {
        self.table(BigInt::from(2), self.p.clone(), n)
    }

    /// `(U_n, V_n)` by index doubling.
    pub fn uv_doubling(&self, n: u64) -> (BigInt, BigInt) {
        let disc = self.discriminant();
        let (mut u, mut v, mut qk) = (BigInt::zero(), BigInt::from(2), BigInt::one());
        for bit in (0..64 - n.leading_zeros()).rev() {
            // k → 2k
            let u2 = &u * &v;
            let v2 = &v * &v - (&qk << 1u32);
            qk = &qk * &qk;
            u = u2;
            v = v2;
            if (n >> bit) & 1 == 1 {
                // k → k + 1
                let u1 = (&self.p * &u + &v) >> 1u32;
                let v1 = (&disc * &u + &self.p * &v) >> 1u32;
                qk *= &self.q;
                u = u1;
                v = v1;
            }
        }
        (u, v)
    }

    fn linear(&self, n: u64) -> (BigInt, BigInt) {
        let (mut u0, mut u1) = (BigInt::zero(), BigInt::one());
        let (mut v0, mut v1) = (BigInt::from(2), self.p.clone());
        for _ in 0..n {
            let u2 = &self.p * &u1 - &self.q * &u0;
            let v2 = &self.p * &v1 - &self.q * &v0;
            u0 = std::mem::replace(&mut u1, u2);
            v0 = std::mem::replace(&mut v1, v2);
        }
        (u0, v0)
    }

    /// `(U_n, V_n)`: linear recurrence for small `n`, doubling beyond.
    pub fn uv(&self, n: u64) -> (BigInt, BigInt) {
        if n > DOUBLING_THRESHOLD {
            self.uv_doubling(n)
        } else {
            self.linear(n)
        }
    }

    pub fn u(&self, n: u64) -> BigInt {
        self.uv(n).0
    }

    pub fn v(&self, n: u64) -> BigInt {
        self.uv(n).1
    }
}

/// `2 T_n(x/2)`.
pub fn cheb_t2(n: u64, x: i64) -> BigInt {
    Lucas::chebyshev(x).v(n)
}

/// `U_k(x/2)`.
pub fn cheb_u(k: u64, x: i64) -> BigInt {
    Lucas::chebyshev(x).u(k + 1)
}

/// Integer Chebyshev polynomials at an integer point, `T_0..=T_n` and
/// `U_0..=U_n`, from `T_{k+1} = 2x T_k − T_{k−1}` and the same for `U`.
fn chebyshev_at(n: usize, x: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let two_x: BigInt = x * BigInt::from(2);
    let step = |t: &mut Vec<BigInt>, first: BigInt, second: BigInt| {
        t.push(first);
        t.push(second);
        for k in 2..=n {
            let next = &two_x * &t[k - 1] - &t[k - 2];
            t.push(next);
        }
        t.truncate(n + 1);
    };
    let mut t = Vec::new();
    let mut u = Vec::new();
    step(&mut t, BigInt::one(), x.clone());
    step(&mut u, BigInt::one(), two_x.clone());
    (t, u)
}

/// `T_n(x)² − (x² − 1) U_{n−1}(x)² = 1`.
pub fn verify_pell_poly(n: u64, x: i64) -> bool {
    if n == 0 {
        return false;
    }
    let xb = BigInt::from(x);
    let (t, u) = chebyshev_at(n as usize, &xb);
    let tn = &t[n as usize];
    let un = &u[n as usize - 1];
    tn * tn - (&xb * &xb - 1) * un * un == BigInt::one()
}

/// `2T_{n+m} = 2T_n · 2T_m − 2T_{n−m}` at `x/2`.
pub fn verify_composition(n: u64, m: u64, x: i64) -> bool {
    if m > n {
        return false;
    }
    let v = Lucas::chebyshev(x).v_table((n + m) as usize);
    v[(n + m) as usize] == &v[n as usize] * &v[m as usize] - &v[(n - m) as usize]
}

/// A strong divisibility sequence `a_1, a_2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SdsSpec {
    /// `a_n = U_{n−1}(x/2)`.
    UHalfint { x: i64 },
    /// `a_n = 2T_n(x/2)`, odd indices only.
    THalfintDoubled { x: i64 },
    /// `a_0 = 0, a_1 = 1, a_{k+1} = b a_k + d a_{k−1}`.
    LinearRecurrence { b: i64, d: i64 },
}

impl SdsSpec {
    pub fn lucas(&self) -> Lucas {
        match *self {
            SdsSpec::UHalfint { x } | SdsSpec::THalfintDoubled { x } => Lucas::chebyshev(x),
            SdsSpec::LinearRecurrence { b, d } => Lucas::new(b, -d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SdsSpec::LinearRecurrence { b, d } = *self {
            if b.gcd(&d) != 1 {
                return Err(Error::InvalidArgument(format!("gcd(b, d) must be 1, got b = {b}, d = {d}")));
            }
        }
        Ok(())
    }

    fn is_t(&self) -> bool {
        matches!(self, SdsSpec::THalfintDoubled { .. })
    }

    /// `a_0, …, a_n`.
    pub fn table(&self, n: usize) -> Vec<BigInt> {
        let l = self.lucas();
        if self.is_t() {
            l.v_table(n)
        } else {
            l.u_table(n)
        }
    }

    pub fn term(&self, n: u64) -> BigInt {
        let (u, v) = self.lucas().uv(n);
        if self.is_t() {
            v
        } else {
            u
        }
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("indices start at 1".into()));
        }
        if self.is_t() && n % 2 == 0 {
            return Err(Error::OddIndexRequired(n));
        }
        Ok(())
    }
}

/// `gcd(a_n, a_m) = a_{gcd(n, m)}`.
pub fn sds_gcd_check(spec: &SdsSpec, n: u64, m: u64) -> Result<bool> {
    spec.validate()?;
    spec.check_index(n)?;
    spec.check_index(m)?;
    let g = n.gcd(&m);
    Ok(spec.term(n).gcd(&spec.term(m)) == spec.term(g).abs())
}

/// The same identity over a whole table, returning the failing pairs.
pub fn sds_gcd_sweep(spec: &SdsSpec, max_index: u64) -> Result<Vec<(u64, u64)>> {
    spec.validate()?;
    let t = spec.table(max_index as usize);
    let step = if spec.is_t() { 2 } else { 1 };
    let mut bad = Vec::new();
    for n in (1..=max_index).step_by(step) {
        for m in (n..=max_index).step_by(step) {
            let g = n.gcd(&m) as usize;
            if t[n as usize].gcd(&t[m as usize]) != t[g].abs() {
                bad.push((n, m));
            }
        }
    }
    Ok(bad)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: &'static str,
    pub checked: u64,
    /// `(n, m, x)` for every failing instance (`m = 0` where unused).
    pub failures: Vec<(u64, u64, i64)>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

fn run_suite(identity: &'static str, xs: std::ops::RangeInclusive<i64>, check: impl Fn(i64) -> (u64, Vec<(u64, u64, i64)>) + Sync + Send) -> IdentityReport {
    let parts: Vec<_> = xs.into_par_iter().map(&check).collect();
    IdentityReport {
        identity,
        checked: parts.iter().map(|p| p.0).sum(),
        failures: parts.into_iter().flat_map(|p| p.1).collect(),
    }
}

/// The four Chebyshev identity suites, exhaustively:
///
/// * polynomial Pell, `1 ≤ n ≤ 50`, `1 ≤ x ≤ 20`
/// * `T_{n+m} = 2T_nT_m − T_{n−m}`, `0 ≤ m ≤ n ≤ 100`, `1 ≤ x ≤ 30`
/// * `gcd(U_{n−1}, U_{m−1}) = U_{gcd−1}` at `x/2`, `1 ≤ n, m ≤ 100`, `1 ≤ x ≤ 30`
/// * `gcd(2T_n, 2T_m) = 2T_gcd` at `x/2`, odd `n, m ≤ 99`, `1 ≤ x ≤ 30`
pub fn identity_suites() -> Vec<IdentityReport> {
    let pell = run_suite("polynomial_pell", 1..=20, |x| {
        let bad = (1..=50u64).filter(|&n| !verify_pell_poly(n, x)).map(|n| (n, 0, x)).collect();
        (50, bad)
    });
    let composition = run_suite("composition", 1..=30, |x| {
        let v = Lucas::chebyshev(x).v_table(200);
        let mut bad = Vec::new();
        let mut checked = 0;
        for n in 0..=100usize {
            for m in 0..=n {
                checked += 1;
                if v[n + m] != &v[n] * &v[m] - &v[n - m] {
                    bad.push((n as u64, m as u64, x));
                }
            }
        }
        (checked, bad)
    });
    let sweep = |spec: SdsSpec, max: u64| {
        let step = if spec.is_t() { 2 } else { 1 };
        let per_row = |n: u64| (n..=max).step_by(step).count() as u64;
        let checked = (1..=max).step_by(step).map(per_row).sum();
        let x = match spec {
            SdsSpec::UHalfint { x } | SdsSpec::THalfintDoubled { x } => x,
            SdsSpec::LinearRecurrence { .. } => 0,
        };
        let bad = sds_gcd_sweep(&spec, max).expect("valid spec").into_iter().map(|(n, m)| (n, m, x)).collect();
        (checked, bad)
    };
    let u = run_suite("u_strong_divisibility", 1..=30, |x| sweep(SdsSpec::UHalfint { x }, 100));
    let t = run_suite("t_odd_strong_divisibility", 1..=30, |x| sweep(SdsSpec::THalfintDoubled { x }, 99));
    vec![pell, composition, u, t]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(serialize_with = "ser::text")]
    pub x: BigInt,
    #[serde(serialize_with = "ser::text")]
    pub y: BigInt,
}

impl PellSolution {
    pub fn holds(&self) -> bool {
        &self.x * &self.x - BigInt::from(self.d) * &self.y * &self.y == BigInt::one()
    }
}

fn is_square_u64(d: u64) -> bool {
    let r = d.sqrt();
    r * r == d
}

/// The least positive solution of `x² − D y² = 1`.
pub fn pell_fundamental(d: u64) -> Result<PellSolution> {
    if d < 2 {
        return Err(Error::InvalidArgument("D must be at least 2".into()));
    }
    if is_square_u64(d) {
        return Err(Error::SquareD(d));
    }
    let alpha = Alpha::Surd(QuadSurd::sqrt_int(d));
    let period = continued_fraction(&alpha, 1)?.period.expect("√D is periodic").1;
    let terms = continued_fraction(&alpha, period)?.terms();
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (terms[0].clone(), BigInt::one());
    for a in &terms[1..] {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let (x, y) = if period % 2 == 0 {
        (p1, q1)
    } else {
        // x² − D y² = −1; square in ℤ[√D]
        (&p1 * &p1 + BigInt::from(d) * &q1 * &q1, BigInt::from(2) * &p1 * &q1)
    };
    Ok(PellSolution { d, x, y })
}

/// `(x_n, y_n)` with `x_n + y_n √D = (x + y √D)^n`, i.e. `x_n = T_n(x)` and
/// `y_n = y U_{n−1}(x)`.
pub fn pell_sequence(d: u64, n: u64) -> Result<PellSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let f = pell_fundamental(d)?;
    let (u, v) = Lucas::chebyshev(&f.x * 2).uv(n);
    Ok(PellSolution { d, x: v >> 1u32, y: &f.y * u })
}

/// Which primes may be selected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoolPolicy {
    /// Required residue mod 4 (1 or 3); `None` admits every odd prime.
    pub residue_mod4: Option<u8>,
    /// Primes dividing this are excluded.
    #[serde(serialize_with = "opt_text")]
    pub coprime_to: Option<BigUint>,
    /// Primes are drawn from `[3, bound)`.
    pub bound: u64,
}

fn opt_text<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

impl Default for PoolPolicy {
    fn default() -> Self {
        PoolPolicy { residue_mod4: None, coprime_to: None, bound: 1 << 24 }
    }
}

impl PoolPolicy {
    pub fn residue(r: u8) -> Self {
        PoolPolicy { residue_mod4: Some(r), ..Self::default() }
    }

    pub fn coprime_to(mut self, n: BigUint) -> Self {
        self.coprime_to = Some(n);
        self
    }

    fn admits(&self, l: u64) -> bool {
        if let Some(r) = self.residue_mod4 {
            if l % 4 != r as u64 {
                return false;
            }
        }
        if let Some(n) = &self.coprime_to {
            if (n % l).is_zero() {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeSelection {
    pub primes: Vec<u64>,
    pub epsilon: f64,
    /// `1 − ∏ (1 − 1/ℓ)`.
    #[serde(serialize_with = "ser::text")]
    pub density: Rational,
    pub density_decimal: f64,
}

impl PrimeSelection {
    /// A hand-picked set of distinct odd primes with density below `1/2`;
    /// `epsilon` is set to `1/2 − density`.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != primes.len() {
            return Err(Error::InvalidArgument("primes must be distinct and nonempty".into()));
        }
        if let Some(&l) = sorted.iter().find(|&&l| l % 2 == 0 || !is_prime64(l)) {
            return Err(Error::InvalidArgument(format!("{l} is not an odd prime")));
        }
        let dens = density(&sorted);
        if dens >= Rational::new(BigInt::one(), BigInt::from(2)) {
            return Err(Error::InvalidArgument("density 1 − ∏(1 − 1/ℓ) must stay below 1/2".into()));
        }
        let density_decimal = dens.to_f64().unwrap_or(f64::NAN);
        Ok(PrimeSelection { primes: sorted, epsilon: 0.5 - density_decimal, density: dens, density_decimal })
    }

    pub fn product(&self) -> BigUint {
        self.primes.iter().map(|&l| BigUint::from(l)).product()
    }
}

/// `1 − ∏ (1 − 1/ℓ)` exactly.
pub fn density(primes: &[u64]) -> Rational {
    let prod = primes
        .iter()
        .fold(Rational::one(), |acc, &l| acc * Rational::new(BigInt::from(l - 1), BigInt::from(l)));
    Rational::one() - prod
}

/// Greedy smallest-first: each admissible prime is taken if the density
/// stays below `1/2`; stops once it exceeds `1/2 − ε`.
pub fn prime_select(epsilon: f64, policy: &PoolPolicy) -> Result<PrimeSelection> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1/2)".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let eps = Rational::from_float(epsilon).expect("finite epsilon");
    let floor = &half - &eps;
    // complement = ∏ (1 − 1/ℓ); density < 1/2 ⟺ complement > 1/2
    let mut complement = Rational::one();
    let mut primes = Vec::new();
    let mut l = 3u64;
    while l < policy.bound {
        if is_prime64(l) && policy.admits(l) {
            let next = &complement * Rational::new(BigInt::from(l - 1), BigInt::from(l));
            if next > half {
                complement = next;
                primes.push(l);
                if Rational::one() - &complement > floor {
                    let density = Rational::one() - complement;
                    let density_decimal = density.to_f64().unwrap_or(f64::NAN);
                    return Ok(PrimeSelection { primes, epsilon, density, density_decimal });
                }
            }
        }
        l += 2;
    }
    Err(Error::PoolExhausted(policy.bound))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmDivisor {
    #[serde(serialize_with = "ser::text")]
    pub value: BigUint,
    /// The inclusion–exclusion product over gcds was checked.
    pub audited: bool,
}

/// `∏_S g(S)^{(−1)^{|S|+1}}` over nonempty subsets `S` of `0..k`, split as
/// (odd-size product, even-size product).
fn inclusion_exclusion<F>(k: usize, g: F) -> (BigUint, BigUint)
where
    F: Fn(usize) -> BigUint + Sync,
{
    let masks: Vec<usize> = (1..1usize << k).collect();
    let terms: Vec<(bool, BigUint)> = masks.par_iter().map(|&s| (s.count_ones() % 2 == 1, g(s))).collect();
    let mut odd = BigUint::one();
    let mut even = BigUint::one();
    for (is_odd, t) in terms {
        if is_odd {
            odd *= t;
        } else {
            even *= t;
        }
    }
    (odd, even)
}

/// Pairwise lcm; with `audit`, also checks
/// `lcm = ∏_S gcd(S)^{(−1)^{|S|+1}}` exactly (subsets limited to 16 values).
pub fn lcm_divisor(values: &[BigUint], audit: bool) -> Result<LcmDivisor> {
    if values.is_empty() || values.iter().any(Zero::is_zero) {
        return Err(Error::InvalidArgument("need a nonempty list of positive integers".into()));
    }
    let value = values.iter().fold(BigUint::one(), |acc, v| acc.lcm(v));
    if audit {
        if values.len() > 16 {
            return Err(Error::InvalidArgument("audit supports at most 16 values".into()));
        }
        let gcd_of = |s: usize| {
            let mut g = BigUint::zero();
            for (i, v) in values.iter().enumerate() {
                if s >> i & 1 == 1 {
                    g = g.gcd(v);
                }
            }
            g
        };
        let (odd, even) = inclusion_exclusion(values.len(), gcd_of);
        if odd != &value * &even {
            return Err(Error::DivisibilityViolation("inclusion-exclusion lcm mismatch".into()));
        }
    }
    Ok(LcmDivisor { value, audited: audit })
}

/// `lcm(a_{n/ℓ} : ℓ ∈ primes)` for a strong divisibility sequence `a`, via
/// `gcd(a_{n/ℓ}, a_{n/ℓ'}) = a_{n/(ℓℓ')}` and exact division.
///
/// `term` maps an index to `|a_index|`.
pub fn sds_lcm<F>(n: u64, primes: &[u64], term: F) -> Result<BigUint>
where
    F: Fn(u64) -> BigUint + Sync,
{
    if primes.is_empty() {
        return Err(Error::InvalidArgument("need at least one prime".into()));
    }
    for &l in primes {
        if n % l != 0 {
            return Err(Error::InvalidArgument(format!("{l} does not divide n = {n}")));
        }
    }
    let index = |s: usize| {
        let mut idx = n;
        for (i, &l) in primes.iter().enumerate() {
            if s >> i & 1 == 1 {
                idx /= l;
            }
        }
        idx
    };
    let (odd, even) = inclusion_exclusion(primes.len(), |s| term(index(s)));
    let (value, rem) = odd.div_rem(&even);
    if !rem.is_zero() {
        return Err(Error::DivisibilityViolation("inclusion-exclusion quotient is not integral".into()));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(cheb_t2(0, 7), b(2));
        assert_eq!(cheb_t2(1, 3), b(3));
        assert_eq!(cheb_t2(3, 3), b(18));
        assert_eq!(cheb_t2(5, 3), b(123));
        assert_eq!(cheb_u(0, 9), b(1));
        assert_eq!(cheb_u(2, 3), b(8));
        assert_eq!(cheb_u(1, -4), b(-4));
    }

    #[test]
    fn closed_forms() {
        // T_3(y) = 4y³ − 3y, T_5(y) = 16y⁵ − 20y³ + 5y at y = x/2, doubled
        for x in -10i64..=10 {
            assert_eq!(cheb_t2(3, x), b(x.pow(3) - 3 * x));
            assert_eq!(cheb_t2(5, x), b(x.pow(5) - 5 * x.pow(3) + 5 * x));
            assert_eq!(cheb_u(2, x), b(x * x - 1));
        }
    }

    #[test]
    fn doubling_matches_linear() {
        for (p, q) in [(6, 1), (1, -1), (3, 1), (-5, 2), (7, -3)] {
            let l = Lucas::new(p, q);
            for n in [0u64, 1, 2, 3, 10, 57, 128, 1001] {
                assert_eq!(l.uv_doubling(n), l.linear(n), "P={p} Q={q} n={n}");
            }
        }
        let l = Lucas::chebyshev(6);
        let n = DOUBLING_THRESHOLD + 3;
        assert_eq!(l.uv(n), l.linear(n));
    }

    #[test]
    fn identities_small() {
        assert!(verify_pell_poly(1, 17));
        assert!(verify_pell_poly(7, -3));
        assert!(!verify_pell_poly(0, 3));
        assert!(verify_composition(1, 1, 3));
        assert_eq!(cheb_t2(2, 3), b(7));
        assert!(verify_composition(9, 0, 5));
    }

    #[test]
    fn gcd_examples() {
        let t = SdsSpec::THalfintDoubled { x: 3 };
        assert!(sds_gcd_check(&t, 3, 5).unwrap());
        assert_eq!(b(18).gcd(&b(123)), b(3));
        assert_eq!(sds_gcd_check(&t, 2, 5).err(), Some(Error::OddIndexRequired(2)));
        let fib = SdsSpec::LinearRecurrence { b: 1, d: 1 };
        assert_eq!(fib.term(6), b(8));
        assert_eq!(fib.term(9), b(34));
        assert!(sds_gcd_check(&fib, 6, 9).unwrap());
        assert!(sds_gcd_check(&fib, 7, 7).unwrap());
        assert!(sds_gcd_check(&SdsSpec::LinearRecurrence { b: 2, d: 4 }, 3, 5).is_err());
        assert!(sds_gcd_sweep(&SdsSpec::UHalfint { x: 4 }, 40).unwrap().is_empty());
    }

    #[test]
    fn pell_examples() {
        let s2 = pell_fundamental(2).unwrap();
        assert_eq!((s2.x.clone(), s2.y.clone()), (b(3), b(2)));
        let s5 = pell_fundamental(5).unwrap();
        assert_eq!((s5.x.clone(), s5.y.clone()), (b(9), b(4)));
        assert_eq!(pell_fundamental(4).err(), Some(Error::SquareD(4)));
        let s61 = pell_fundamental(61).unwrap();
        assert_eq!((s61.x.clone(), s61.y.clone()), (b(1766319049), b(226153980)));
        let seq = pell_sequence(2, 2).unwrap();
        assert_eq!((seq.x.clone(), seq.y.clone()), (b(17), b(12)));
        assert_eq!(pell_sequence(2, 1).unwrap(), s2);
    }

    #[test]
    fn prime_selection_examples() {
        let sel = prime_select(1e-4, &PoolPolicy::default()).unwrap();
        assert_eq!(sel.primes, vec![3, 5, 17, 257]);
        assert_eq!(sel.density, Rational::new(b(32767), b(65535)));
        let coarse = prime_select(0.04, &PoolPolicy::default()).unwrap();
        assert_eq!(coarse.primes, vec![3, 5]);
        assert_eq!(coarse.density, Rational::new(b(7), b(15)));
        let small_pool = PoolPolicy { bound: 100, ..PoolPolicy::default() };
        assert_eq!(prime_select(1e-4, &small_pool).err(), Some(Error::PoolExhausted(100)));
        let skip3 = PoolPolicy::default().coprime_to(BigUint::from(6u32));
        assert!(!prime_select(0.01, &skip3).unwrap().primes.contains(&3));
        for r in [1u8, 3] {
            let s = prime_select(0.01, &PoolPolicy::residue(r)).unwrap();
            assert!(s.primes.iter().all(|l| l % 4 == r as u64));
        }
    }

    #[test]
    fn lcm_examples() {
        let v = |xs: &[u32]| xs.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
        assert_eq!(lcm_divisor(&v(&[6, 10, 15]), true).unwrap().value, BigUint::from(30u32));
        assert_eq!(lcm_divisor(&v(&[7]), true).unwrap().value, BigUint::from(7u32));
        assert_eq!(lcm_divisor(&v(&[12, 18, 8, 27]), true).unwrap().value, BigUint::from(216u32));
        assert!(lcm_divisor(&[], false).is_err());
    }

    #[test]
    fn sds_lcm_agrees_with_pairwise() {
        let l = Lucas::chebyshev(6);
        let n = 3 * 5 * 7;
        let u = |k: u64| l.u(k).to_biguint().unwrap();
        let via_ie = sds_lcm(n, &[3, 5, 7], u).unwrap();
        let pairwise = lcm_divisor(&[u(n / 3), u(n / 5), u(n / 7)], false).unwrap().value;
        assert_eq!(via_ie, pairwise);
        let v = |k: u64| l.v(k).to_biguint().unwrap();
        let via_ie = sds_lcm(n, &[3, 5], v).unwrap();
        assert_eq!(via_ie, v(n / 3).lcm(&v(n / 5)));
    }

    #[test]
    fn identity_suites_pass() {
        let suites = identity_suites();
        assert_eq!(suites.len(), 4);
        for s in &suites {
            assert!(s.passed(), "{}: {:?}", s.identity, s.failures);
        }
        assert_eq!(suites[0].checked, 1000);
        assert_eq!(suites[1].checked, 30 * 5151);
        assert_eq!(suites[2].checked, 30 * 5050);
        assert_eq!(suites[3].checked, 30 * 1275);
    }
}
