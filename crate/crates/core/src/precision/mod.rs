//! Decimal real arithmetic under an explicit digit budget.
//!
//! [`Real`] is an exact decimal `mant * 10^exp`; a [`PrecisionContext`] says
//! how many significant decimal digits rounded operations must deliver. The
//! transcendental functions run internally at `digits + guard` digits and round
//! their result back to `digits`.

mod real;
mod transcendental;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

pub use real::Real;
pub use transcendental::{arccos, cos_of, pi};

use crate::error::{Error, Result};

pub const MIN_DIGITS: u64 = 10;
pub const DEFAULT_GUARD: u64 = 20;

/// Digit budget for rounded operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u64,
    guard: u64,
}

impl PrecisionContext {
    pub fn new(digits: u64) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u64, guard: u64) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Parameter(format!(
                "precision of {digits} digits is below the minimum of {MIN_DIGITS}"
            )));
        }
        Ok(PrecisionContext { digits, guard })
    }

    pub fn digits(&self) -> u64 {
        self.digits
    }

    pub fn guard(&self) -> u64 {
        self.guard
    }

    /// Digits carried internally by transcendental evaluations.
    pub fn working_digits(&self) -> u64 {
        self.digits + self.guard
    }

    /// The same context with `extra` more significant digits.
    pub fn widen(&self, extra: u64) -> Self {
        PrecisionContext {
            digits: self.digits + extra,
            guard: self.guard,
        }
    }

    /// A context whose `digits` equal this context's working digits.
    pub fn working(&self) -> Self {
        self.widen(self.guard)
    }

    pub fn round(&self, x: &Real) -> Real {
        x.round_sig(self.digits)
    }
}

/// Alias matching the operation name used throughout the workbench.
pub fn make_context(digits: u64) -> Result<PrecisionContext> {
    PrecisionContext::new(digits)
}

/// `floor(a * 10^m)`, floor toward negative infinity.
pub fn floor_scaled(a: &Real, m: u32) -> BigInt {
    a.floor_scaled(m)
}

/// `a - floor(a)`.
pub fn frac_part(a: &Real) -> Real {
    a.frac_part()
}

/// True iff `x` is one of the five rational cosines of rational multiples of
/// pi: 0, 1/2, -1/2, 1, -1 (Niven).
pub fn is_trivial_angle(x: &Real) -> Result<bool> {
    if x.abs() > Real::one() {
        return Err(Error::Domain(format!("|x| > 1 for x = {x}")));
    }
    let half: Real = Real::from_scaled(BigInt::from(5), 1);
    let trivial = [Real::zero(), half.clone(), -half, Real::one(), -Real::one()];
    Ok(trivial.contains(x))
}

pub(crate) fn pow10(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(10u32), n as usize)
}

/// Number of decimal digits of `|n|` (1 for zero).
pub(crate) fn decimal_len(n: &BigInt) -> u64 {
    if n.is_zero() {
        return 1;
    }
    let mag: BigUint = n.abs().to_biguint().unwrap_or_default();
    let bits = mag.bits();
    // floor((bits - 1) * log10(2)) + 1 undercounts by at most one.
    let est = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1;
    let bound = num_traits::pow(BigUint::from(10u32), est as usize);
    if mag >= bound {
        est + 1
    } else {
        est
    }
}

/// Number of leading decimal digits on which `a` and `b` agree, i.e. the
/// largest `n` with `|a - b| < 10^-n` (saturating at `u64::MAX` when equal).
pub fn agreeing_digits(a: &Real, b: &Real) -> u64 {
    match (a - b).magnitude() {
        None => u64::MAX,
        Some(m) if m >= 0 => 0,
        Some(m) => (-m - 1) as u64,
    }
}

/// True iff `|a - b| < 10^-digits`.
pub fn agrees_to(a: &Real, b: &Real, digits: u64) -> bool {
    agreeing_digits(a, b) >= digits
}

/// Decimal length of a non-negative integer, used for precision budgets.
pub fn decimal_length(n: &BigInt) -> u64 {
    decimal_len(n)
}
