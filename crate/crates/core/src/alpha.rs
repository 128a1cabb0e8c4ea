//! The billiard parameter α and the values derived from it.
//!
//! α is either an exact [`QuadSurd`] or a decimal literal standing in for an
//! irrational number known to within half a unit in its last digit. Every
//! predicate on α reduces to the sign of an affine form `α·A + B` with
//! integer `A`, `B`; surds decide it exactly, literals through certified
//! enclosures at doubling precision.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{surd_sign, surd_sign_i128, CertifiedReal, QuadSurd, Rational};

pub const START_BITS: u32 = 128;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Significant digits used when rendering reals in reports.
pub const REPORT_DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalLiteral {
    text: String,
    value: Rational,
    half_ulp: Rational,
}

impl DecimalLiteral {
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse { input: text.to_string(), reason: reason.into() };
        let body = text.strip_prefix('+').unwrap_or(text);
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("empty literal"));
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err("expected decimal digits"));
        }
        let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err("bad digits"))?;
        let scale = num_traits::pow(BigInt::from(10u8), frac_part.len());
        let value = Rational::new(digits, scale.clone());
        let half_ulp = Rational::new(BigInt::one(), scale * 2);
        Ok(DecimalLiteral { text: text.to_string(), value, half_ulp })
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn half_ulp(&self) -> &Rational {
        &self.half_ulp
    }

    pub fn lower(&self) -> Rational {
        &self.value - &self.half_ulp
    }

    pub fn upper(&self) -> Rational {
        &self.value + &self.half_ulp
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Surd(QuadSurd),
    Literal(DecimalLiteral),
}

/// `(3 + √5)/2`, the square of the golden mean.
pub fn golden2() -> QuadSurd {
    QuadSurd::new(3.into(), 1.into(), 2.into(), 5).expect("valid surd")
}

impl Alpha {
    /// Parses `sqrt:p/q`, `sqrt:p`, `surd:a,b,c,d`, `dec:<digits>` or `golden2`.
    pub fn parse(s: &str) -> Result<Alpha> {
        let err = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.into() };
        let s = s.trim();
        if s == "golden2" {
            return Ok(Alpha::Surd(golden2()));
        }
        let (tag, body) = s.split_once(':').ok_or_else(|| err("expected sqrt:, surd:, dec: or golden2"))?;
        match tag {
            "sqrt" => {
                let r: Rational = body.parse().map_err(|_| err("expected p or p/q"))?;
                Ok(Alpha::Surd(QuadSurd::sqrt_rational(&r)?))
            }
            "surd" => {
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(err("expected surd:a,b,c,d"));
                }
                let a: BigInt = parts[0].parse().map_err(|_| err("bad a"))?;
                let b: BigInt = parts[1].parse().map_err(|_| err("bad b"))?;
                let c: BigInt = parts[2].parse().map_err(|_| err("bad c"))?;
                let d: u64 = parts[3].parse().map_err(|_| err("d must be a positive integer"))?;
                if d == 0 || c.is_zero() {
                    return Err(err("c and d must be nonzero"));
                }
                Ok(Alpha::Surd(QuadSurd::new(a, b, c, d)?))
            }
            "dec" => Ok(Alpha::Literal(DecimalLiteral::parse(body)?)),
            _ => Err(err("unknown tag")),
        }
    }

    pub fn as_surd(&self) -> Option<&QuadSurd> {
        match self {
            Alpha::Surd(s) => Some(s),
            Alpha::Literal(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Alpha::Surd(s) if s.is_rational())
    }

    pub fn approx_f64(&self) -> f64 {
        match self {
            Alpha::Surd(s) => s.to_f64(),
            Alpha::Literal(l) => l.value.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Enclosure of α with absolute radius about `2^-bits` (plus the
    /// literal's own uncertainty).
    pub fn enclosure(&self, bits: u32) -> CertifiedReal {
        match self {
            Alpha::Surd(s) => s.eval(bits),
            Alpha::Literal(l) => CertifiedReal::from_rational(&l.value, bits).widen(&l.half_ulp),
        }
    }

    /// Certified sign of `α·a + b`.
    pub fn affine_sign(&self, a: &BigInt, b: &BigInt, cap: u32) -> Result<Ordering> {
        match self {
            Alpha::Surd(s) => Ok(surd_sign(&(s.a() * a + s.c() * b), &(s.b() * a), s.d())),
            Alpha::Literal(_) => {
                let mut bits = START_BITS.min(cap);
                loop {
                    if let Some(sign) = self.enclosure(bits).mul_int(a).add_int(b).sign() {
                        return Ok(sign);
                    }
                    if bits >= cap {
                        return Err(Error::PrecisionExhausted { bits: cap });
                    }
                    bits = (bits * 2).min(cap);
                }
            }
        }
    }

    /// The value `α·a + b`: exact for surds, an enclosure for literals.
    pub fn affine_value(&self, a: &BigInt, b: &BigInt) -> Real {
        match self {
            Alpha::Surd(s) => Real::Exact(s.mul_int(a).add_int(b)),
            Alpha::Literal(_) => Real::Enclosure(self.enclosure(START_BITS).mul_int(a).add_int(b)),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Alpha::Surd(s) => s.signum() == Ordering::Greater,
            Alpha::Literal(l) => l.lower().is_positive(),
        }
    }

    /// Spectral operations need α > 0 and irrational.
    pub fn require_spectral(&self) -> Result<()> {
        if self.is_rational() {
            return Err(Error::RationalAlpha);
        }
        if !self.is_positive() {
            return Err(Error::NonPositiveAlpha);
        }
        Ok(())
    }
}

impl FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Alpha> {
        Alpha::parse(s)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Surd(s) => write!(f, "surd:{},{},{},{}", s.a(), s.b(), s.c(), s.d()),
            Alpha::Literal(l) => write!(f, "dec:{}", l.text),
        }
    }
}

/// A derived real value: exact when α is a surd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Exact(QuadSurd),
    Enclosure(CertifiedReal),
}

impl Real {
    pub fn to_decimal(&self, sig: usize) -> String {
        match self {
            Real::Exact(s) => s.to_decimal(sig),
            Real::Enclosure(c) => c.to_decimal(sig),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(s) => s.to_f64(),
            Real::Enclosure(c) => c.to_f64(),
        }
    }

    pub fn as_exact(&self) -> Option<&QuadSurd> {
        match self {
            Real::Exact(s) => Some(s),
            Real::Enclosure(_) => None,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Real {
        match self {
            Real::Exact(s) => Real::Exact(s.mul_int(k)),
            Real::Enclosure(c) => Real::Enclosure(c.mul_int(k)),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(s) => Real::Exact(s.abs()),
            Real::Enclosure(c) => Real::Enclosure(c.abs()),
        }
    }
}

impl Serialize for QuadSurd {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QuadSurd", 5)?;
        st.serialize_field("a", &self.a().to_string())?;
        st.serialize_field("b", &self.b().to_string())?;
        st.serialize_field("c", &self.c().to_string())?;
        st.serialize_field("d", &self.d().to_string())?;
        st.serialize_field("decimal", &self.to_decimal(REPORT_DIGITS))?;
        st.end()
    }
}

impl Serialize for CertifiedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CertifiedReal", 3)?;
        st.serialize_field("midpoint", &self.to_decimal(REPORT_DIGITS))?;
        st.serialize_field("radius", &crate::exact::format_ratio(
            self.radius_ratio().numer(),
            self.radius_ratio().denom(),
            3,
        ))?;
        st.serialize_field("decimal", &self.to_decimal(REPORT_DIGITS))?;
        st.end()
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(s) => {
                let mut st = serializer.serialize_struct("Real", 2)?;
                st.serialize_field("exact", s)?;
                st.serialize_field("decimal", &s.to_decimal(REPORT_DIGITS))?;
                st.end()
            }
            Real::Enclosure(c) => {
                let mut st = serializer.serialize_struct("Real", 2)?;
                st.serialize_field("enclosure", c)?;
                st.serialize_field("decimal", &c.to_decimal(REPORT_DIGITS))?;
                st.end()
            }
        }
    }
}

/// Fast sign oracle for `α·a + b` with machine-word coefficients.
pub(crate) struct AffineOracle<'a> {
    alpha: &'a Alpha,
    kind: OracleKind,
    cap: u32,
}

enum OracleKind {
    Small { a: i128, b: i128, c: i128, d: i128 },
    Big,
    Float { approx: f64, half_width: f64 },
}

impl<'a> AffineOracle<'a> {
    pub fn new(alpha: &'a Alpha, cap: u32) -> Self {
        let kind = match alpha {
            Alpha::Surd(s) => match (s.a().to_i64(), s.b().to_i64(), s.c().to_i64()) {
                (Some(a), Some(b), Some(c)) => OracleKind::Small {
                    a: a as i128,
                    b: b as i128,
                    c: c as i128,
                    d: s.d() as i128,
                },
                _ => OracleKind::Big,
            },
            Alpha::Literal(l) => OracleKind::Float {
                approx: l.value().to_f64().unwrap_or(f64::NAN),
                half_width: l.half_ulp().to_f64().unwrap_or(f64::INFINITY),
            },
        };
        AffineOracle { alpha, kind, cap }
    }

    pub fn alpha(&self) -> &Alpha {
        self.alpha
    }

    pub fn sign(&self, a: i128, b: i128) -> Result<Ordering> {
        match self.kind {
            OracleKind::Small { a: sa, b: sb, c: sc, d } => {
                let u = sa.checked_mul(a).and_then(|x| sc.checked_mul(b).and_then(|y| x.checked_add(y)));
                let v = sb.checked_mul(a);
                if let (Some(u), Some(v)) = (u, v) {
                    if let Some(sign) = surd_sign_i128(u, v, d) {
                        return Ok(sign);
                    }
                }
            }
            OracleKind::Float { approx, half_width } => {
                let af = a as f64;
                let bf = b as f64;
                let val = approx * af + bf;
                let eps = 4.0 * f64::EPSILON;
                let err = af.abs() * half_width + (af.abs() * approx.abs() + bf.abs()) * eps;
                if val.abs() > 4.0 * err && val.is_finite() {
                    return Ok(val.partial_cmp(&0.0).unwrap());
                }
            }
            OracleKind::Big => {}
        }
        self.alpha.affine_sign(&BigInt::from(a), &BigInt::from(b), self.cap)
    }
}
