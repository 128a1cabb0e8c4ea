use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::decimal::{dyadic_ratio, format_ratio};

/// A real known to lie in `[(mid − rad)·2^exp, (mid + rad)·2^exp]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedReal {
    mid: BigInt,
    rad: BigInt,
    exp: i64,
}

impl CertifiedReal {
    pub fn new(mid: BigInt, rad: BigInt, exp: i64) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        CertifiedReal { mid, rad, exp }
    }

    pub fn exact(i: BigInt) -> Self {
        CertifiedReal { mid: i, rad: BigInt::zero(), exp: 0 }
    }

    /// Outward rounding of a rational to absolute precision `2^-bits`.
    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let k = bits as usize;
        let (q, rem) = (r.numer() << k).div_mod_floor(r.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        CertifiedReal { mid: q, rad, exp: -(k as i64) }
    }

    /// Widens the radius by at least `extra` (a nonnegative rational).
    pub fn widen(&self, extra: &BigRational) -> Self {
        if extra.is_zero() {
            return self.clone();
        }
        // ceil(extra · 2^-exp)
        let scaled = if self.exp <= 0 {
            extra * BigRational::from_integer(BigInt::one() << (-self.exp) as usize)
        } else {
            extra / BigRational::from_integer(BigInt::one() << self.exp as usize)
        };
        CertifiedReal { mid: self.mid.clone(), rad: &self.rad + scaled.ceil().to_integer(), exp: self.exp }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let s1 = (self.exp - e) as usize;
        let s2 = (other.exp - e) as usize;
        (&self.mid << s1, &self.rad << s1, &other.mid << s2, &other.rad << s2, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (m1, r1, m2, r2, e) = self.aligned(other);
        CertifiedReal { mid: m1 + m2, rad: r1 + r2, exp: e }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let rad = self.mid.abs() * &other.rad + other.mid.abs() * &self.rad + &self.rad * &other.rad;
        CertifiedReal { mid: &self.mid * &other.mid, rad, exp: self.exp + other.exp }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        CertifiedReal { mid: &self.mid * k, rad: &self.rad * k.abs(), exp: self.exp }
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        self.add(&CertifiedReal::exact(k.clone()))
    }

    pub fn abs(&self) -> Self {
        CertifiedReal { mid: self.mid.abs(), rad: self.rad.clone(), exp: self.exp }
    }

    /// The sign when the enclosure excludes zero (or is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        if self.rad.is_zero() {
            return Some(self.mid.cmp(&BigInt::zero()));
        }
        if self.mid.abs() > self.rad {
            Some(self.mid.cmp(&BigInt::zero()))
        } else {
            None
        }
    }

    pub fn midpoint_ratio(&self) -> BigRational {
        let (n, d) = dyadic_ratio(&self.mid, self.exp);
        BigRational::new(n, d)
    }

    pub fn radius_ratio(&self) -> BigRational {
        let (n, d) = dyadic_ratio(&self.rad, self.exp);
        BigRational::new(n, d)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(20).parse().unwrap_or(f64::NAN)
    }

    /// Midpoint rendered with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        let (n, d) = dyadic_ratio(&self.mid, self.exp);
        format_ratio(&n, &d, sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_rounding_encloses() {
        let third = BigRational::new(1.into(), 3.into());
        let c = CertifiedReal::from_rational(&third, 64);
        let lo = c.midpoint_ratio() - c.radius_ratio();
        let hi = c.midpoint_ratio() + c.radius_ratio();
        assert!(lo <= third && third <= hi);
        assert_eq!(c.sign(), Some(Ordering::Greater));
    }

    #[test]
    fn product_encloses() {
        let a = CertifiedReal::new(BigInt::from(3), BigInt::from(1), -1); // [1, 2]
        let b = CertifiedReal::new(BigInt::from(-5), BigInt::from(1), -1); // [-3, -2]
        let p = a.mul(&b);
        let lo = p.midpoint_ratio() - p.radius_ratio();
        let hi = p.midpoint_ratio() + p.radius_ratio();
        assert!(lo <= BigRational::from_integer((-6).into()));
        assert!(hi >= BigRational::from_integer((-2).into()));
        assert_eq!(p.sign(), Some(Ordering::Less));
        let z = a.add(&CertifiedReal::exact((-1).into())); // [0, 1]
        assert_eq!(z.sign(), None);
    }
}
