//! pi, cos and arccos on fixed-point integers (`value = n / 10^scale`).

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{decimal_len, pow10, PrecisionContext, Real};
use crate::error::{Error, Result};

/// Internal guard digits of the fixed-point kernels, on top of the caller's scale.
const KERNEL_GUARD: u64 = 10;

static PI_CACHE: Mutex<Option<(u64, BigInt)>> = Mutex::new(None);

/// `atan(1/n) * 10^scale` by the alternating Taylor series.
fn atan_inv(n: u64, scale: u64) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut power = pow10(scale) / n;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &n2;
        if power.is_zero() {
            break;
        }
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// `pi * 10^scale`, within a few units of the last place.
pub(crate) fn pi_fixed(scale: u64) -> BigInt {
    let mut cache = PI_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some((have, value)) = cache.as_ref() {
        if *have >= scale {
            return value / pow10(have - scale);
        }
    }
    let work = scale + KERNEL_GUARD;
    // Machin: pi/4 = 4 atan(1/5) - atan(1/239)
    let quarter = atan_inv(5, work) * 4 - atan_inv(239, work);
    let value = quarter * 4;
    let result = &value / pow10(KERNEL_GUARD);
    *cache = Some((work, value));
    result
}

/// `sqrt(v)` for `v` at `scale`, result at `scale`.
fn sqrt_fixed(v: &BigInt, scale: u64) -> BigInt {
    (v * pow10(scale)).sqrt()
}

/// `atan(t)` for `0 <= t <= 1` (both at `scale`).
fn atan_unit(t: &BigInt, scale: u64) -> BigInt {
    let work = scale + KERNEL_GUARD;
    let one = pow10(work);
    let mut t = t * pow10(KERNEL_GUARD);
    // atan(t) = 2 atan(t / (1 + sqrt(1 + t^2))); shrink below 1/20 before the series.
    let limit = &one / 20;
    let mut doublings = 0u32;
    while t > limit {
        let root = (&one * &one + &t * &t).sqrt();
        t = &t * &one / (&one + root);
        doublings += 1;
    }
    let t2 = &t * &t / &one;
    let mut power = t.clone();
    let mut sum = t;
    let mut k = 1u64;
    loop {
        power = &power * &t2 / &one;
        if power.is_zero() {
            break;
        }
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    (sum << doublings) / pow10(KERNEL_GUARD)
}

/// `cos(x)` and `sin(x)` series for `|x| <= pi/4` (both at `scale`).
fn cos_series(x: &BigInt, scale: u64) -> BigInt {
    let work = scale + KERNEL_GUARD;
    let one = pow10(work);
    let x = x * pow10(KERNEL_GUARD);
    let x2 = &x * &x / &one;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k = 1u64;
    loop {
        term = -(&term * &x2 / &one) / ((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum / pow10(KERNEL_GUARD)
}

fn sin_series(x: &BigInt, scale: u64) -> BigInt {
    let work = scale + KERNEL_GUARD;
    let one = pow10(work);
    let x = x * pow10(KERNEL_GUARD);
    let x2 = &x * &x / &one;
    let mut term = x.clone();
    let mut sum = x;
    let mut k = 1u64;
    loop {
        term = -(&term * &x2 / &one) / ((2 * k) * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum / pow10(KERNEL_GUARD)
}

/// `cos(theta)` for `theta` in `[0, 2 pi)`, all at `scale`.
fn cos_reduced(theta: &BigInt, scale: u64) -> BigInt {
    let pi = pi_fixed(scale);
    let half_pi = &pi / 2;
    let quarter_pi = &pi / 4;
    let mut a = theta.clone();
    if a > pi {
        a = (&pi << 1) - a;
    }
    let mut negate = false;
    if a > half_pi {
        a = &pi - a;
        negate = true;
    }
    let c = if a > quarter_pi {
        sin_series(&(&half_pi - a), scale)
    } else {
        cos_series(&a, scale)
    };
    if negate {
        -c
    } else {
        c
    }
}

/// `arccos(x) * 10^scale` for `|x| <= 1`, `x` given exactly.
pub(crate) fn arccos_fixed(x: &Real, scale: u64) -> BigInt {
    let one = pow10(scale);
    let ax = x.abs().scaled_floor(scale as i64);
    let num = &one - &ax;
    let den = &one + &ax;
    // arccos(|x|) = 2 atan(sqrt((1 - |x|) / (1 + |x|)))
    let ratio = &num * &one / den;
    let t = sqrt_fixed(&ratio, scale);
    let a = atan_unit(&t, scale) * 2;
    if x.is_negative() {
        pi_fixed(scale) - a
    } else {
        a
    }
}

/// pi rounded to `ctx.digits` significant digits.
pub fn pi(ctx: &PrecisionContext) -> Real {
    let scale = ctx.working_digits();
    ctx.round(&Real::from_scaled(pi_fixed(scale), scale))
}

/// Principal `arccos(x)` in `[0, pi]`, rounded to `ctx.digits` significant digits.
pub fn arccos(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let one = Real::one();
    if x.abs() > one {
        return Err(Error::Domain(format!(
            "arccos argument outside [-1, 1]: {x}"
        )));
    }
    if *x == one {
        return Ok(Real::zero());
    }
    // Near x = 1 the result is ~sqrt(2(1 - x)); near |x| = 1 the ratio loses
    // relative precision. Both are covered by scaling past the leading zeros.
    let gap = &one - &x.abs();
    let extra = match gap.magnitude() {
        Some(m) if m < 0 => (-m) as u64,
        _ => 0,
    };
    let scale = ctx.working_digits() + extra;
    Ok(ctx.round(&Real::from_scaled(arccos_fixed(x, scale), scale)))
}

/// `cos(theta)` rounded to `ctx.digits` significant digits.
///
/// Argument reduction modulo 2 pi uses pi at `integer digits of theta` extra
/// digits, so the absolute error of the reduced angle stays at the working scale.
pub fn cos_of(theta: &Real, ctx: &PrecisionContext) -> Real {
    if theta.is_zero() {
        return Real::one();
    }
    let lead = theta.integer_digits() + 2;
    let need = ctx.digits() + ctx.guard() / 2;
    let mut extra = 0u64;
    let mut attempt = 0;
    loop {
        let scale = ctx.working_digits() + extra;
        let wide = scale + lead;
        let t = theta.scaled_floor(wide as i64);
        let two_pi = pi_fixed(wide) << 1;
        let reduced = t.mod_floor(&two_pi) / pow10(lead);
        let c = cos_reduced(&reduced, scale);
        // Results near zero need more absolute digits to keep `digits` significant ones.
        let have = if c.is_zero() { 0 } else { decimal_len(&c) };
        if have >= need || attempt == 3 {
            return clamp_unit(ctx.round(&Real::from_scaled(c, scale)));
        }
        extra += need - have + ctx.guard();
        attempt += 1;
    }
}

fn clamp_unit(v: Real) -> Real {
    let one = Real::one();
    if v > one {
        one
    } else if v < -one.clone() {
        -one
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    const PI_60: &str = "3.14159265358979323846264338327950288419716939937510582097494";

    #[test]
    fn pi_digits() {
        let c40 = PrecisionContext::new(40).unwrap();
        assert_eq!(pi(&c40), r("3.141592653589793238462643383279502884197"));
        let c10 = PrecisionContext::new(10).unwrap();
        assert_eq!(pi(&c10), r("3.141592654"));
        let c59 = PrecisionContext::new(59).unwrap();
        assert_eq!(pi(&c59), r(PI_60).round_sig(59));
    }

    #[test]
    fn arccos_endpoints() {
        let ctx = PrecisionContext::new(50).unwrap();
        assert_eq!(arccos(&Real::one(), &ctx).unwrap(), Real::zero());
        assert_eq!(arccos(&-Real::one(), &ctx).unwrap(), pi(&ctx));
        let half_pi = r(PI_60).div(&Real::from(2), &ctx).unwrap();
        assert_eq!(arccos(&Real::zero(), &ctx).unwrap(), half_pi);
        assert!(matches!(arccos(&r("1.0001"), &ctx), Err(Error::Domain(_))));
    }

    #[test]
    fn arccos_of_half() {
        let ctx = PrecisionContext::new(50).unwrap();
        let third_pi = r(PI_60).div(&Real::from(3), &ctx).unwrap();
        assert_eq!(arccos(&r("0.5"), &ctx).unwrap(), third_pi);
        let two_thirds = (r(PI_60) * Real::from(2))
            .div(&Real::from(3), &ctx)
            .unwrap();
        assert_eq!(arccos(&r("-0.5"), &ctx).unwrap(), two_thirds);
    }

    #[test]
    fn arccos_near_one_keeps_significance() {
        let ctx = PrecisionContext::new(30).unwrap();
        // arccos(1 - 2e-40) = 2e-20 * (1 + 1e-40/6 + ...)
        let x = r("0.9999999999999999999999999999999999999998");
        let a = arccos(&x, &ctx).unwrap();
        assert_eq!(a, r("0.00000000000000000002"));
    }

    #[test]
    fn cos_examples() {
        let ctx = PrecisionContext::new(40).unwrap();
        assert_eq!(cos_of(&Real::zero(), &ctx), Real::one());
        let p = pi(&ctx.widen(20));
        assert_eq!(cos_of(&p, &ctx), -Real::one());
        let theta = arccos(&r("0.3"), &ctx.widen(20)).unwrap() * Real::from(3);
        assert_eq!(cos_of(&theta, &ctx), r("-0.792"));
    }

    #[test]
    fn cos_near_a_zero_is_relative() {
        let ctx = PrecisionContext::new(30).unwrap();
        let w = ctx.widen(60);
        let half_pi = pi(&w).div(&Real::from(2), &w).unwrap();
        let theta = &half_pi - &r("0.000000000000000000001");
        let c = cos_of(&theta, &ctx);
        // cos(pi/2 - h) = sin(h) = h - h^3/6
        assert_eq!(c, r("0.000000000000000000001"));
    }

    #[test]
    fn cos_large_argument_reduction() {
        let ctx = PrecisionContext::new(30).unwrap();
        // 10^20 * 2 pi + 1 reduces to 1
        let w = ctx.widen(50);
        let theta = &(&pi(&w) * &Real::from_integer(pow10(20) * 2)) + &Real::one();
        let expect = cos_of(&Real::one(), &ctx);
        assert_eq!(cos_of(&theta, &ctx), expect);
        assert_eq!(expect.to_sig_string(20), "0.54030230586813971740");
    }
}
