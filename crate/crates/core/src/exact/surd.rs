//! Real quadratic surds `(a + b√d)/c` with exact arithmetic and comparisons.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::certified::CertifiedReal;
use super::decimal::{format_ratio, log2_big};
use crate::error::{Error, Result};

/// Exact sign of `u + v·√d`, decided with integer comparisons only.
pub fn surd_sign(u: &BigInt, v: &BigInt, d: u64) -> Ordering {
    let su = sign_of(u);
    let sv = sign_of(v);
    if sv == Ordering::Equal || su == sv {
        return if su == Ordering::Equal { sv } else { su };
    }
    if su == Ordering::Equal {
        return sv;
    }
    // opposite signs: the larger square wins
    let lhs = u * u;
    let rhs = v * v * BigInt::from(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => su,
        Ordering::Less => sv,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Machine-word variant of [`surd_sign`]; `None` on overflow.
pub(crate) fn surd_sign_i128(u: i128, v: i128, d: i128) -> Option<Ordering> {
    let su = u.cmp(&0);
    let sv = v.cmp(&0);
    if sv == Ordering::Equal || su == sv {
        return Some(if su == Ordering::Equal { sv } else { su });
    }
    if su == Ordering::Equal {
        return Some(sv);
    }
    let lhs = u.checked_mul(u)?;
    let rhs = v.checked_mul(v)?.checked_mul(d)?;
    Some(match lhs.cmp(&rhs) {
        Ordering::Greater => su,
        Ordering::Less => sv,
        Ordering::Equal => Ordering::Equal,
    })
}

pub(crate) fn sign_of(x: &BigInt) -> Ordering {
    match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Splits `d = s²·core` with `core` squarefree.
pub(crate) fn split_square(d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut core = 1u64;
    for (p, e) in num_prime::nt_funcs::factorize64(d) {
        s *= p.pow((e / 2) as u32);
        if e % 2 == 1 {
            core *= p;
        }
    }
    (s, core)
}

/// Remainder-based gcd; cheap when one operand is small.
pub(crate) fn euclid_gcd(x: &BigInt, y: &BigInt) -> BigInt {
    let mut x = x.abs();
    let mut y = y.abs();
    while !y.is_zero() {
        let r = &x % &y;
        x = std::mem::replace(&mut y, r);
    }
    x
}

pub fn is_squarefree(d: u64) -> bool {
    d >= 1 && split_square(d).0 == 1
}

/// The exact real `(a + b√d)/c` in canonical form.
///
/// Canonical means: `d` squarefree, `c > 0`, `gcd(a, b, c) = 1`, and a
/// rational value is always stored with `b = 0, d = 1`. Two surds are equal
/// as numbers exactly when their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl QuadSurd {
    /// Builds `(a + b√d)/c`, folding square factors of `d` into `b`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: u64) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d == 0 {
            return Ok(Self::canonical(a, BigInt::zero(), c, 1));
        }
        let (s, core) = split_square(d);
        Ok(Self::canonical(a, b * s, c, core))
    }

    /// `d` must already be squarefree.
    fn canonical(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: u64) -> Self {
        if d == 1 {
            a += &b;
            b = BigInt::zero();
        }
        if b.is_zero() {
            d = 1;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let mut g = euclid_gcd(&c, &a);
        if !g.is_one() {
            g = euclid_gcd(&g, &b);
        }
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        QuadSurd { a, b, c, d }
    }

    pub fn from_integer(i: impl Into<BigInt>) -> Self {
        QuadSurd { a: i.into(), b: BigInt::zero(), c: BigInt::one(), d: 1 }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::canonical(r.numer().clone(), BigInt::zero(), r.denom().clone(), 1)
    }

    /// `√(p/q)` for a nonnegative rational, as `√(p·q)/q`.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidArgument("square root of a negative rational".into()));
        }
        let prod = r.numer() * r.denom();
        let prod = prod
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("radicand exceeds 64 bits".into()))?;
        Self::new(BigInt::zero(), BigInt::one(), r.denom().clone(), prod)
    }

    /// `√d` for a nonnegative integer.
    pub fn sqrt_int(d: u64) -> Self {
        Self::new(BigInt::zero(), BigInt::one(), BigInt::one(), d).expect("c = 1")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.a.clone(), self.c.clone()))
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.a, &self.b, self.d)
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `(a − b√d)/c`.
    pub fn conjugate(&self) -> Self {
        QuadSurd { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: self.d }
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        if self.b.is_zero() {
            Ok(other.d)
        } else if other.b.is_zero() || self.d == other.d {
            Ok(self.d)
        } else {
            Err(Error::MixedRadicands(self.d, other.d))
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        Ok(Self::canonical(
            &self.a * &o.c + &o.a * &self.c,
            &self.b * &o.c + &o.b * &self.c,
            &self.c * &o.c,
            d,
        ))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o.clone())
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        let bd = BigInt::from(d);
        Ok(Self::canonical(
            &self.a * &o.a + &self.b * &o.b * &bd,
            &self.a * &o.b + &o.a * &self.b,
            &self.c * &o.c,
            d,
        ))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.common_radicand(o)?;
        // x / y = x · conj(y) · c_y / (a_y² − b_y² d)
        let norm = &o.a * &o.a - &o.b * &o.b * BigInt::from(d);
        let conj = QuadSurd { a: &o.a * &o.c, b: -(&o.b * &o.c), c: norm, d };
        let conj = Self::canonical(conj.a, conj.b, conj.c, conj.d);
        self.checked_mul(&conj)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::canonical(&self.a * k, &self.b * k, self.c.clone(), self.d)
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        Self::canonical(&self.a + k * &self.c, self.b.clone(), self.c.clone(), self.d)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { Self::from_integer(1).checked_div(self)? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::from_integer(1);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Exact comparison of two values.
    pub fn cmp_value(&self, o: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum())
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.to_decimal(20);
        s.parse().unwrap_or(f64::NAN)
    }

    /// Certified evaluation with absolute error at most `2^-bits`.
    pub fn eval(&self, bits: u32) -> CertifiedReal {
        surd_eval(self, bits)
    }

    /// Decimal rendering with `sig` significant digits, accurate relative to
    /// the value even when it is tiny (cancellation is removed through the
    /// conjugate).
    pub fn to_decimal(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if self.is_rational() {
            return format_ratio(&self.a, &self.c, sig);
        }
        let guard = (sig as f64 * 3.33) as i64 + 24;
        let bd = BigInt::from(self.d);
        let opposite = !self.a.is_zero() && sign_of(&self.a) != sign_of(&self.b);
        if opposite {
            // value = (a² − b²d) / (c·(a − b√d)), the denominator has no cancellation
            let num = &self.a * &self.a - &self.b * &self.b * &bd;
            let (z, s) = scaled_no_cancel(&self.a, &(-&self.b), self.d, guard);
            // (a − b√d) ≈ z·2^-s  ⇒ value ≈ num·2^s / (c·z)
            let (n2, d2) = if s >= 0 {
                (num << s as usize, &self.c * &z)
            } else {
                (num, (&self.c * &z) << (-s) as usize)
            };
            format_ratio(&n2, &d2, sig)
        } else {
            let (z, s) = scaled_no_cancel(&self.a, &self.b, self.d, guard);
            let (n2, d2) = if s >= 0 {
                (z, &self.c << s as usize)
            } else {
                (z << (-s) as usize, self.c.clone())
            };
            format_ratio(&n2, &d2, sig)
        }
    }
}

/// Approximates `a + b√d` (with `a`, `b` not of opposite signs) as `z·2^-s`
/// with `|z| ≥ 2^guard`.
fn scaled_no_cancel(a: &BigInt, b: &BigInt, d: u64, guard: i64) -> (BigInt, i64) {
    let mag_bits = {
        let ab = log2_big(a.magnitude());
        let bb = log2_big(b.magnitude()) + 0.5 * (d as f64).log2();
        ab.max(bb)
    };
    let s = guard - mag_bits.floor() as i64;
    let b2d = b * b * BigInt::from(d);
    let root = if s >= 0 {
        (b2d << (2 * s) as usize).sqrt()
    } else {
        (b2d >> (2 * -s) as usize).sqrt()
    };
    let root = if b.is_negative() { -root } else { root };
    let a_s = if s >= 0 { a << s as usize } else { a >> (-s) as usize };
    (a_s + root, s)
}

/// Certified evaluation of `x` to absolute precision `2^-bits`.
pub fn surd_eval(x: &QuadSurd, bits: u32) -> CertifiedReal {
    let k = bits as usize + 1;
    if x.is_rational() {
        let scaled = &x.a << k;
        let (q, r) = scaled.div_mod_floor(&x.c);
        let rad = if r.is_zero() { BigInt::zero() } else { BigInt::one() };
        return CertifiedReal::new(q, rad, -(k as i64));
    }
    let root = (&x.b * &x.b * BigInt::from(x.d) << (2 * k)).sqrt();
    let root = if x.b.is_negative() { -root } else { root };
    let num = (&x.a << k) + root;
    let mid = num.div_floor(&x.c);
    CertifiedReal::new(mid, BigInt::from(2), -(k as i64))
}

/// Closed-form arithmetic with renormalization.
pub fn surd_arith(x: &QuadSurd, y: &QuadSurd, op: ArithOp) -> Result<QuadSurd> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
    }
}

impl std::ops::Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { a: -self.a, b: -self.b, c: self.c, d: self.d }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            if self.c.is_one() {
                write!(f, "{}", self.a)
            } else {
                write!(f, "{}/{}", self.a, self.c)
            }
        } else {
            write!(f, "({}{}{}√{})", self.a, if self.b.is_negative() { "" } else { "+" }, self.b, self.d)?;
            if !self.c.is_one() {
                write!(f, "/{}", self.c)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: i64, b: i64, c: i64, d: u64) -> QuadSurd {
        QuadSurd::new(a.into(), b.into(), c.into(), d).unwrap()
    }

    #[test]
    fn sign_examples() {
        let z = BigInt::zero;
        assert_eq!(surd_sign(&z(), &z(), 2), Ordering::Equal);
        assert_eq!(surd_sign(&(-1).into(), &1.into(), 2), Ordering::Greater);
        // 289 vs 288
        assert_eq!(surd_sign(&17.into(), &(-12).into(), 2), Ordering::Greater);
        assert_eq!(surd_sign(&(-17).into(), &12.into(), 2), Ordering::Less);
        assert_eq!(surd_sign_i128(17, -12, 2), Some(Ordering::Greater));
    }

    #[test]
    fn canonical_forms() {
        // √8 = 2√2
        assert_eq!(QuadSurd::sqrt_int(8), s(0, 2, 1, 2));
        // √4 = 2
        assert_eq!(QuadSurd::sqrt_int(4), QuadSurd::from_integer(2));
        // (2 + 4√2)/6 = (1 + 2√2)/3
        assert_eq!(s(2, 4, 6, 2), s(1, 2, 3, 2));
        // negative denominator moves the sign
        assert_eq!(s(1, 1, -2, 5), s(-1, -1, 2, 5));
        let x = s(3, 0, 1, 5);
        assert!(x.is_rational());
        assert_eq!(x.d(), 1);
    }

    #[test]
    fn arithmetic_examples() {
        let r2 = QuadSurd::sqrt_int(2);
        assert_eq!(r2.checked_mul(&r2).unwrap(), QuadSurd::from_integer(2));
        let phi = s(1, 1, 2, 5);
        assert_eq!(phi.checked_mul(&phi).unwrap(), s(3, 1, 2, 5));
        assert_eq!(s(3, 1, 2, 5).checked_sub(&phi).unwrap(), QuadSurd::from_integer(1));
        let inv = QuadSurd::from_integer(1).checked_div(&phi).unwrap();
        assert_eq!(inv, s(-1, 1, 2, 5));
        assert_eq!(
            r2.checked_add(&QuadSurd::sqrt_int(3)),
            Err(Error::MixedRadicands(2, 3))
        );
        assert_eq!(r2.checked_div(&QuadSurd::from_integer(0)), Err(Error::DivisionByZero));
        // rational operands mix with any radicand
        assert_eq!(
            r2.checked_add(&QuadSurd::from_integer(1)).unwrap(),
            s(1, 1, 1, 2)
        );
        assert_eq!(phi.pow(-2).unwrap(), s(3, -1, 2, 5));
    }

    #[test]
    fn evaluation() {
        let r2 = QuadSurd::sqrt_int(2).eval(64);
        assert!((r2.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(r2.radius_ratio() <= BigRational::new(2.into(), BigInt::one() << 64usize));
        let three = s(3, 0, 1, 5).eval(200);
        assert_eq!(three.radius_ratio(), BigRational::zero());
        assert_eq!(three.midpoint_ratio(), BigRational::from_integer(3.into()));
        let g2 = s(3, 1, 2, 5).eval(32);
        assert!((g2.to_f64() - 2.618_033_988_749_895).abs() < 1e-9);
    }

    #[test]
    fn decimals() {
        assert_eq!(QuadSurd::sqrt_int(2).to_decimal(30), "1.41421356237309504880168872421");
        assert_eq!(s(17, -12, 1, 2).to_decimal(10), "0.02943725152");
        assert_eq!(s(-17, 12, 1, 2).to_decimal(10), "-0.02943725152");
        // 4(12√8 − 34) ≈ −0.2354, derived from the construction example
        let g = s(-136, 48, 1, 8);
        assert_eq!(g.to_decimal(6), "-0.235498");
    }
}
