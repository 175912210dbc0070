//! Exact rational arithmetic. All budgets, loads, weights, and ratios are
//! `BigRational`; floating point never enters a decision path.

use num::{BigInt, BigRational, One, Zero};

pub type Rational = BigRational;

/// Shorthand for a rational from small integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Renders in lowest terms as `num/den`, or just `num` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(Rational::new(num, den))
            }
        }
        None => {
            let num: BigInt = text.parse().ok()?;
            Some(Rational::from_integer(num))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_in_lowest_terms() {
        let r = rat(2, 4);
        assert_eq!(r, rat(1, 2));
        assert_eq!(format_rational(&r), "1/2");
    }

    #[test]
    fn denominator_normalized_positive() {
        let r = rat(1, -3);
        assert_eq!(format_rational(&r), "-1/3");
        assert!(r < zero());
    }

    #[test]
    fn integers_render_bare() {
        assert_eq!(format_rational(&rat_int(0)), "0");
        assert_eq!(format_rational(&rat_int(-2)), "-2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3/16", "-1/3", "0", "7", "4/3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
