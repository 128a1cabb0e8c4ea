use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Base-2 logarithm of a positive big integer, accurate to ~1e-15 relative.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    log2_big(x) * std::f64::consts::LN_2
}

fn pow10(k: u64) -> BigUint {
    num_traits::pow(BigUint::from(10u8), k as usize)
}

/// Formats `num/den` with `sig` significant digits (round half up).
///
/// Positional notation for moderate exponents, scientific otherwise.
/// Trailing zeros after the decimal point are removed.
pub fn format_ratio(num: &BigInt, den: &BigInt, sig: usize) -> String {
    assert!(!den.is_zero(), "zero denominator");
    assert!(sig >= 1);
    if num.is_zero() {
        return "0".to_string();
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    let mut e = ((log2_big(n) - log2_big(d)) * std::f64::consts::LOG10_2).floor() as i64;
    let lower = pow10(sig as u64 - 1);
    let upper = pow10(sig as u64);
    let mantissa = loop {
        // m = round(n * 10^(sig-1-e) / d)
        let shift = sig as i64 - 1 - e;
        let (sn, sd) = if shift >= 0 {
            (n * pow10(shift as u64), d.clone())
        } else {
            (n.clone(), d * pow10((-shift) as u64))
        };
        let (q, r) = sn.div_rem(&sd);
        let m = if r * 2u8 >= sd { q + 1u8 } else { q };
        if m >= upper {
            e += 1;
        } else if m < lower {
            e -= 1;
        } else {
            break m;
        }
    };
    render(negative, &mantissa.to_string(), e)
}

fn render(negative: bool, digits: &str, e: i64) -> String {
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let len = digits.len() as i64;
    if (-7..40).contains(&e) {
        if e < 0 {
            out.push_str("0.");
            for _ in 0..(-e - 1) {
                out.push('0');
            }
            out.push_str(digits);
        } else if e + 1 >= len {
            out.push_str(digits);
            for _ in 0..(e + 1 - len) {
                out.push('0');
            }
        } else {
            let split = (e + 1) as usize;
            out.push_str(&digits[..split]);
            out.push('.');
            out.push_str(&digits[split..]);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

/// `m * 2^exp` as an exact ratio of integers.
pub fn dyadic_ratio(m: &BigInt, exp: i64) -> (BigInt, BigInt) {
    if exp >= 0 {
        (m << exp as usize, BigInt::one())
    } else {
        (m.clone(), BigInt::one() << (-exp) as usize)
    }
}
