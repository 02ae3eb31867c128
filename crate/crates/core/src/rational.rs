//! Exact rational helpers shared by the closed-form and lattice modules.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always held in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Parses a plain decimal literal (`0.05`, `-3`, `1e-3` is not accepted) or a
/// `num/den` fraction into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Formats `value` as a plain decimal with `sig` significant digits, rounding
/// half away from zero. Computed exactly; no floating point is involved.
pub fn decimal_string(value: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    let ten = BigInt::from(10u32);

    // exponent e with 10^e <= |x| < 10^(e+1)
    let mut exp =
        magnitude.numer().to_string().len() as i64 - magnitude.denom().to_string().len() as i64;
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    while magnitude < pow10(exp) {
        exp -= 1;
    }
    while magnitude >= pow10(exp + 1) {
        exp += 1;
    }

    // scaled = |x| * 10^(sig-1-e), rounded half up
    let shift = sig as i64 - 1 - exp;
    let scaled = &magnitude * pow10(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits_int = q;
    if r * BigInt::from(2u32) >= *scaled.denom() {
        digits_int += 1;
    }
    let mut digits = digits_int.to_string();
    let mut shift = shift;
    if digits.len() > sig {
        // rounding carried into a new leading digit (e.g. 9.99 -> 10.0)
        digits.pop();
        shift -= 1;
    }

    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{digits}{zeros}")
    } else if (shift as usize) >= digits.len() {
        let zeros = "0".repeat(shift as usize - digits.len());
        let frac = trim_fraction(&format!("{zeros}{digits}"));
        if frac.is_empty() {
            "0".to_string()
        } else {
            format!("0.{frac}")
        }
    } else {
        let split = digits.len() - shift as usize;
        let frac = trim_fraction(&digits[split..]);
        if frac.is_empty() {
            digits[..split].to_string()
        } else {
            format!("{}.{}", &digits[..split], frac)
        }
    };
    match negative {
        true => format!("-{body}"),
        false => body,
    }
}

fn trim_fraction(frac: &str) -> String {
    frac.trim_end_matches('0').to_string()
}

/// `num/den` rendering used in reports (integers render without a denominator).
pub fn fraction_string(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub(crate) fn is_probability(value: &Rational) -> bool {
    value.numer().sign() != Sign::Minus && value <= &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&ratio(5, 27), 15), "0.185185185185185");
        assert_eq!(decimal_string(&ratio(4, 3), 15), "1.33333333333333");
        assert_eq!(decimal_string(&ratio(1, 3), 3), "0.333");
        assert_eq!(decimal_string(&ratio(2, 3), 3), "0.667");
        assert_eq!(decimal_string(&ratio(1, 2), 15), "0.5");
        assert_eq!(decimal_string(&ratio(999, 1000), 2), "1");
        assert_eq!(decimal_string(&ratio(-1, 8), 15), "-0.125");
        assert_eq!(decimal_string(&ratio(123456, 1), 3), "123000");
        assert_eq!(decimal_string(&ratio(1, 1000), 2), "0.001");
        assert_eq!(decimal_string(&ratio(0, 1), 15), "0");
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.05"), Some(ratio(1, 20)));
        assert_eq!(parse_rational("2/3"), Some(ratio(2, 3)));
        assert_eq!(parse_rational("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("1"), Some(ratio(1, 1)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn fraction_rendering() {
        assert_eq!(fraction_string(&ratio(10, 54)), "5/27");
        assert_eq!(fraction_string(&ratio(3, 1)), "3");
    }
}
