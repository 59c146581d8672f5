use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{decimal_len, pow10, PrecisionContext};
use crate::error::{Error, Result};

/// A finite decimal real `mant * 10^exp`.
///
/// Addition, subtraction and multiplication are exact. Operations that cannot
/// be exact (division, transcendental functions) take a [`PrecisionContext`]
/// and round to its significant-digit budget.
#[derive(Clone, Debug)]
pub struct Real {
    mant: BigInt,
    exp: i64,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Real {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Real {
            mant: n.into(),
            exp: 0,
        }
    }

    /// `mant / 10^frac_digits`.
    pub fn from_scaled(mant: BigInt, frac_digits: u64) -> Self {
        Real {
            mant,
            exp: -(frac_digits as i64),
        }
    }

    pub(crate) fn from_parts(mant: BigInt, exp: i64) -> Self {
        Real { mant, exp }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn abs(&self) -> Real {
        Real {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Number of fractional decimal digits in the representation.
    pub fn frac_digits(&self) -> u64 {
        if self.exp < 0 {
            (-self.exp) as u64
        } else {
            0
        }
    }

    /// `floor(log10 |self|)`, or `None` for zero.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(decimal_len(&self.mant) as i64 - 1 + self.exp)
        }
    }

    /// Decimal length of the integer part of `|self|` (0 when `|self| < 1`).
    pub fn integer_digits(&self) -> u64 {
        match self.magnitude() {
            Some(m) if m >= 0 => m as u64 + 1,
            _ => 0,
        }
    }

    /// Significant digits carried by the mantissa.
    pub fn significant_digits(&self) -> u64 {
        decimal_len(&self.mant)
    }

    /// `floor(self * 10^scale)` for any integer `scale`.
    pub fn scaled_floor(&self, scale: i64) -> BigInt {
        let shift = self.exp + scale;
        if shift >= 0 {
            &self.mant * pow10(shift as u64)
        } else {
            self.mant.div_floor(&pow10((-shift) as u64))
        }
    }

    /// Floor toward negative infinity.
    pub fn floor(&self) -> BigInt {
        self.scaled_floor(0)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Nearest integer, ties away from zero.
    pub fn round(&self) -> BigInt {
        let half = Real::from_parts(BigInt::from(5), -1);
        if self.is_negative() {
            -(&self.abs() + &half).floor()
        } else {
            (self + &half).floor()
        }
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn frac_part(&self) -> Real {
        if self.exp >= 0 {
            return Real::zero();
        }
        let unit = pow10((-self.exp) as u64);
        Real {
            mant: self.mant.mod_floor(&unit),
            exp: self.exp,
        }
    }

    /// `floor(self * 10^m)`.
    pub fn floor_scaled(&self, m: u32) -> BigInt {
        self.scaled_floor(m as i64)
    }

    /// `self * 10^k`, exact.
    pub fn mul_pow10(&self, k: i64) -> Real {
        Real {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to `digits` significant digits, ties to even.
    pub fn round_sig(&self, digits: u64) -> Real {
        let len = decimal_len(&self.mant);
        if len <= digits {
            return self.clone();
        }
        let drop = len - digits;
        let mant = div_round_half_even(&self.mant, &pow10(drop));
        Real {
            mant,
            exp: self.exp + drop as i64,
        }
    }

    /// Round so that at most `frac` fractional digits remain, ties to even.
    pub fn round_frac(&self, frac: u64) -> Real {
        let have = self.frac_digits();
        if have <= frac {
            return self.clone();
        }
        let drop = have - frac;
        let mant = div_round_half_even(&self.mant, &pow10(drop));
        Real {
            mant,
            exp: -(frac as i64),
        }
    }

    /// Quotient rounded to `ctx.digits` significant digits.
    pub fn div(&self, rhs: &Real, ctx: &PrecisionContext) -> Result<Real> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Real::zero());
        }
        let want = ctx.digits() as i64 + 2;
        let la = decimal_len(&self.mant) as i64;
        let lb = decimal_len(&rhs.mant) as i64;
        let shift = (want + lb - la).max(0);
        let num = &self.mant * pow10(shift as u64);
        let (q, rem) = num.div_rem(&rhs.mant);
        // A sticky digit keeps the final rounding correct when the quotient is inexact.
        let (mant, exp) = if rem.is_zero() {
            (q, self.exp - rhs.exp - shift)
        } else {
            let sticky = if (num.sign() == Sign::Minus) == (rhs.mant.sign() == Sign::Minus) {
                1
            } else {
                -1
            };
            (q * 10 + sticky, self.exp - rhs.exp - shift - 1)
        };
        Ok(Real { mant, exp }.round_sig(ctx.digits()))
    }

    /// Plain decimal rendering rounded to `frac` fractional digits (zero-padded).
    pub fn to_fixed_string(&self, frac: u64) -> String {
        let r = self.round_frac(frac);
        let mant = if r.exp >= 0 {
            &r.mant * pow10(r.exp as u64) * pow10(frac)
        } else {
            &r.mant * pow10(frac - r.frac_digits())
        };
        render(&mant, frac)
    }

    /// Plain decimal rendering with `sig` significant digits.
    pub fn to_sig_string(&self, sig: u64) -> String {
        let r = self.round_sig(sig);
        if r.exp >= 0 {
            (&r.mant * pow10(r.exp as u64)).to_string()
        } else {
            render(&r.mant, r.frac_digits())
        }
    }

    fn align(&self, other: &Real) -> (BigInt, BigInt, i64) {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => (self.mant.clone(), other.mant.clone(), self.exp),
            Ordering::Less => (
                self.mant.clone(),
                &other.mant * pow10((other.exp - self.exp) as u64),
                self.exp,
            ),
            Ordering::Greater => (
                &self.mant * pow10((self.exp - other.exp) as u64),
                other.mant.clone(),
                other.exp,
            ),
        }
    }
}

fn div_round_half_even(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    let twice: BigInt = &r * 2u32;
    match twice.cmp(d) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

/// Render `mant / 10^frac` without trimming.
fn render(mant: &BigInt, frac: u64) -> String {
    let neg = mant.is_negative();
    let digits = mant.abs().to_string();
    let frac = frac as usize;
    let body = if frac == 0 {
        digits
    } else if digits.len() > frac {
        let (i, f) = digits.split_at(digits.len() - frac);
        format!("{i}.{f}")
    } else {
        format!("0.{}{}", "0".repeat(frac - digits.len()), digits)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for Real {
    /// Exact plain decimal, trailing fractional zeros removed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp >= 0 {
            return write!(f, "{}", &self.mant * pow10(self.exp as u64));
        }
        let s = render(&self.mant, (-self.exp) as u64);
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            f.write_str("0")
        } else {
            f.write_str(&s)
        }
    }
}

impl FromStr for Real {
    type Err = Error;

    /// Parses `[+-]digits[.digits]` (either side of the point may be empty, not both).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let well_formed = !(int.is_empty() && frac.is_empty())
            && int.bytes().all(|b| b.is_ascii_digit())
            && frac.bytes().all(|b| b.is_ascii_digit());
        if !well_formed {
            return Err(Error::Parse(format!("malformed decimal {s:?}")));
        }
        let digits = format!("{int}{frac}");
        let mut mant: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("malformed decimal {s:?}")))?;
        if neg {
            mant = -mant;
        }
        Ok(Real {
            mant,
            exp: -(frac.len() as i64),
        })
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.exp == other.exp {
            return self.mant.cmp(&other.mant);
        }
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::from_integer(n)
    }
}

impl From<BigInt> for Real {
    fn from(n: BigInt) -> Self {
        Real::from_integer(n)
    }
}

impl From<&BigInt> for Real {
    fn from(n: &BigInt) -> Self {
        Real::from_integer(n.clone())
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -&self.mant,
            exp: self.exp,
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        let (a, b, exp) = self.align(rhs);
        Real { mant: a + b, exp }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        let (a, b, exp) = self.align(rhs);
        Real { mant: a - b, exp }
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real {
            mant: &self.mant * &rhs.mant,
            exp: self.exp + rhs.exp,
        }
    }
}

impl Mul<&BigInt> for &Real {
    type Output = Real;
    fn mul(self, rhs: &BigInt) -> Real {
        Real {
            mant: &self.mant * rhs,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        if self.exp == rhs.exp {
            self.mant += &rhs.mant;
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        if self.exp == rhs.exp {
            self.mant -= &rhs.mant;
        } else {
            *self = &*self - rhs;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(r("-0.2500").to_string(), "-0.25");
        assert_eq!(r("12").to_string(), "12");
        assert_eq!(r(".5").to_string(), "0.5");
        assert_eq!(r("-0.000").to_string(), "0");
        assert!("1e8".parse::<Real>().is_err());
        assert!("".parse::<Real>().is_err());
        assert!("-.".parse::<Real>().is_err());
        assert!("1.2.3".parse::<Real>().is_err());
    }

    #[test]
    fn floor_is_toward_negative_infinity() {
        assert_eq!(r("-0.5").floor_scaled(0), BigInt::from(-1));
        assert_eq!(r("-0.1").floor_scaled(0), BigInt::from(-1));
        assert_eq!(r("2.999").floor(), BigInt::from(2));
        assert_eq!(r("-3").floor(), BigInt::from(-3));
        assert_eq!(r("-2.5").ceil(), BigInt::from(-2));
    }

    #[test]
    fn frac_part_examples() {
        assert_eq!(r("2.828536898289").frac_part(), r("0.828536898289"));
        assert_eq!(r("5.0").frac_part(), Real::zero());
        assert_eq!(r("-0.25").frac_part(), r("0.75"));
    }

    #[test]
    fn floor_scaled_examples() {
        let d = r("0.73995897022306966689744239562920880188");
        assert_eq!(d.floor_scaled(9), BigInt::from(739958970));
        let e = r("6.30711352191035348845280507405");
        assert_eq!(e.floor_scaled(9), BigInt::from(6307113521u64));
    }

    #[test]
    fn rounding() {
        assert_eq!(r("3.14159265358979").round_sig(10), r("3.141592654"));
        assert_eq!(r("0.125").round_sig(2), r("0.12"));
        assert_eq!(r("0.135").round_sig(2), r("0.14"));
        assert_eq!(r("99.96").round_sig(3), r("100.0"));
        assert_eq!(r("-2.5").round(), BigInt::from(-3));
        assert_eq!(r("2.4999").round(), BigInt::from(2));
        assert_eq!(r("1.23456").to_fixed_string(3), "1.235");
        assert_eq!(r("-0.0004").to_fixed_string(2), "0.00");
        assert_eq!(r("7").to_fixed_string(2), "7.00");
        assert_eq!(r("123456").to_sig_string(3), "123000");
    }

    #[test]
    fn division_rounds_correctly() {
        let ctx = PrecisionContext::new(10).unwrap();
        assert_eq!(r("1").div(&r("3"), &ctx).unwrap(), r("0.3333333333"));
        assert_eq!(r("2").div(&r("3"), &ctx).unwrap(), r("0.6666666667"));
        assert_eq!(r("-2").div(&r("3"), &ctx).unwrap(), r("-0.6666666667"));
        assert_eq!(r("10").div(&r("4"), &ctx).unwrap(), r("2.5"));
        assert!(r("1").div(&Real::zero(), &ctx).is_err());
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(r("0.1") < r("0.10000001"));
        assert!(r("-1") < r("-0.999"));
        assert_eq!(r("1.000"), Real::one());
    }
}
