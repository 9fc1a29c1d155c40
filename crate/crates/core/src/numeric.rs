//! Working-precision plumbing shared by the numerical modules.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{GfnError, Result};

/// Environment variable holding the default precision in decimal digits.
pub const PRECISION_ENV: &str = "GFN_PRECISION";

/// Guard bits carried on top of the requested decimal precision.
const GUARD_BITS: u32 = 32;

/// Working precision, expressed in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 64;
    pub const MIN_DIGITS: u32 = 16;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(GfnError::usage(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Precision { digits })
    }

    /// Reads `GFN_PRECISION`, falling back to 64 digits when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Ok(raw) => {
                let digits = raw.trim().parse::<u32>().map_err(|_| {
                    GfnError::Parse(format!("{PRECISION_ENV}={raw:?} is not an integer"))
                })?;
                Self::new(digits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Binary precision used for every `Float`/`Complex` at this setting.
    pub fn bits(self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Same precision with twice the decimal digits.
    pub fn doubled(self) -> Self {
        Precision {
            digits: self.digits * 2,
        }
    }

    pub fn zero(self) -> Float {
        Float::with_val(self.bits(), 0)
    }

    pub fn rat(self, r: &Rational) -> Float {
        Float::with_val(self.bits(), r)
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn complex_zero(self) -> Complex {
        Complex::with_val(self.bits(), (0, 0))
    }

    /// `10^(-k)` at this precision.
    pub fn ten_pow_neg(self, k: i32) -> Float {
        let ten = Float::with_val(self.bits(), 10);
        ten.pow(-k)
    }

    /// `10^(-digits + slack)`; the natural convergence threshold at this precision.
    pub fn eps_with_slack(self, slack: i32) -> Float {
        self.ten_pow_neg(self.digits as i32 - slack)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

/// Parses `"3/4"`, `"-2"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    if let Ok(r) = text.parse::<Rational>() {
        return Ok(r);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp = text[pos + 1..]
                .parse::<i32>()
                .map_err(|_| GfnError::Parse(format!("bad exponent in {text:?}")))?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(GfnError::Parse(format!(
            "{text:?} is not a rational or decimal number"
        )));
    }
    let joined = format!("{int_part}{frac_part}");
    let numer = rug::Integer::from_str_radix(if joined.is_empty() { "0" } else { &joined }, 10)
        .map_err(|e| GfnError::Parse(e.to_string()))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = rug::Integer::from(10);
    let mut r = Rational::from(numer);
    if scale >= 0 {
        r *= Rational::from(ten.pow(scale as u32));
    } else {
        r /= Rational::from(ten.pow((-scale) as u32));
    }
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Parses a complex literal such as `2i`, `0.5+2i`, `-1/2-1.5i` or `3`.
pub fn parse_complex(text: &str, prec: Precision) -> Result<Complex> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bits = prec.bits();
    let Some(body) = text.strip_suffix('i') else {
        let re = parse_rational(&text)?;
        return Ok(Complex::with_val(bits, (&re, 0)));
    };
    // split at the last sign that is not the leading one and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im) = match split {
        Some(i) => (parse_rational(&body[..i])?, imag_part(&body[i..])?),
        None => (Rational::new(), imag_part(body)?),
    };
    Ok(Complex::with_val(bits, (&re, &im)))
}

fn imag_part(text: &str) -> Result<Rational> {
    match text {
        "" | "+" => Ok(Rational::from(1)),
        "-" => Ok(Rational::from(-1)),
        _ => parse_rational(text),
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    x.to_string_radix(10, Some(digits as usize))
}

pub fn format_complex(z: &Complex, digits: u32) -> String {
    let (re, im) = (z.real(), z.imag());
    if im.is_zero() {
        return format_float(re, digits);
    }
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!(
        "{}{}{}i",
        format_float(re, digits),
        sign,
        format_float(&Float::with_val(im.prec(), im.abs_ref()), digits)
    )
}

/// `|z|` as a `Float`.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Inverse of a dense complex matrix by Gauss–Jordan elimination with partial pivoting.
pub fn complex_inverse(m: &[Vec<Complex>]) -> Result<Vec<Vec<Complex>>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) || n == 0 {
        return Err(GfnError::usage("matrix must be square and nonempty"));
    }
    let bits = m[0][0].prec().0;
    let mut a: Vec<Vec<Complex>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Complex::with_val(bits, (u8::from(i == j), 0))));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| cabs(&a[i][col]).partial_cmp(&cabs(&a[j][col])).unwrap())
            .unwrap();
        if a[p][col].is_zero() {
            return Err(GfnError::usage("metric is singular"));
        }
        a.swap(p, col);
        let inv = Complex::with_val(bits, 1) / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    let t = Complex::with_val(bits, &f * &a[col][j]);
                    a[i][j] -= t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational::from((3, 4)));
        assert_eq!(parse_rational("-0.125").unwrap(), Rational::from((-1, 8)));
        assert_eq!(parse_rational("1e-3").unwrap(), Rational::from((1, 1000)));
        assert_eq!(parse_rational("2.5E2").unwrap(), Rational::from(250));
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let p = Precision::default();
        let z = parse_complex("2i", p).unwrap();
        assert_eq!(*z.real(), 0);
        assert_eq!(*z.imag(), 2);
        let z = parse_complex("1/2-1.5i", p).unwrap();
        assert_eq!(*z.real(), 0.5);
        assert_eq!(*z.imag(), -1.5);
        let z = parse_complex("-3", p).unwrap();
        assert_eq!(*z.real(), -3);
    }

    #[test]
    fn precision_bounds() {
        assert!(Precision::new(8).is_err());
        assert_eq!(Precision::default().digits(), 64);
        assert!(Precision::new(64).unwrap().bits() > 212);
    }
}
