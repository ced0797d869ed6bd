//! Exact rational arithmetic helpers.
//!
//! Budgets, costs and discount factors are arbitrary-precision rationals.
//! The text form is `"num/den"` or a plain integer (`"8/9"`, `"0"`, `"-4"`).

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Shorthand for small constants in tests and generators.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or `"int"`. The denominator must be positive.
pub fn parse_rat(text: &str) -> Result<Rat, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num = BigInt::from_str(num).map_err(|_| bad(text))?;
    let den = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| bad(text))?,
        None => BigInt::one(),
    };
    if !den.is_positive() {
        return Err(bad(text));
    }
    Ok(Rat::new(num, den))
}

fn bad(text: &str) -> String {
    let mut msg = String::from("malformed rational `");
    msg.push_str(text);
    msg.push('`');
    msg
}

/// Renders in lowest terms: `"num/den"`, or just `"num"` for integers.
pub fn render_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        let mut out = value.numer().to_string();
        out.push('/');
        out.push_str(&value.denom().to_string());
        out
    }
}

pub fn is_nonneg(value: &Rat) -> bool {
    !value.is_negative()
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}
