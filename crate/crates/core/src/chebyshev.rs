//! Chebyshev T-polynomials over decimal reals and the key exchange built on
//! their permutability, `T_r(T_s(x)) = T_rs(x)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::precision::{
    arccos, cos_of, decimal_length, is_trivial_angle, pow10, PrecisionContext, Real,
};

/// Digits a key-exchange context must carry beyond the length of the largest secret.
pub const KEX_PRECISION_MARGIN: u64 = 40;

/// Reusable `T_r(x)` evaluator for one `x`: `arccos(x)` is computed once, wide
/// enough for any secret of at most `max_len` decimal digits.
#[derive(Clone, Debug)]
pub struct ChebyshevEvaluator {
    theta: Real,
    ctx: PrecisionContext,
    max_len: u64,
}

impl ChebyshevEvaluator {
    pub fn new(x: &Real, ctx: &PrecisionContext, max_len: u64) -> Result<Self> {
        let wide = ctx.widen(max_len + ctx.guard());
        Ok(ChebyshevEvaluator {
            theta: arccos(x, &wide)?,
            ctx: *ctx,
            max_len,
        })
    }

    /// `arccos(x)` at the evaluator's widened precision.
    pub fn theta(&self) -> &Real {
        &self.theta
    }

    pub fn eval(&self, r: &BigInt) -> Result<Real> {
        if r.is_negative() {
            return Err(Error::Parameter(format!("negative polynomial degree {r}")));
        }
        let len = decimal_length(r);
        if len > self.max_len {
            return Err(Error::Precision {
                required: self.ctx.digits() + len,
                available: self.ctx.digits() + self.max_len,
            });
        }
        Ok(cos_of(&(&self.theta * r), &self.ctx))
    }
}

/// `T_r(x) = cos(r * arccos(x))` to `ctx.digits` digits.
///
/// `r * arccos(x)` loses `len(r)` leading digits to argument reduction, so the
/// angle is computed with `digits + len(r) + guard` digits.
pub fn t_cos_eval(r: &BigInt, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let working = ctx.digits() + decimal_length(r) + ctx.guard();
    t_cos_eval_at(r, x, ctx, working)
}

/// [`t_cos_eval`] with an explicit working precision for the angle. Budgets below
/// `ctx.digits + len(r)` cannot deliver `ctx.digits` correct digits and are rejected.
pub fn t_cos_eval_at(
    r: &BigInt,
    x: &Real,
    ctx: &PrecisionContext,
    working_digits: u64,
) -> Result<Real> {
    let required = ctx.digits() + decimal_length(r);
    if working_digits < required {
        return Err(Error::Precision {
            required,
            available: working_digits,
        });
    }
    if r.is_negative() {
        return Err(Error::Parameter(format!("negative polynomial degree {r}")));
    }
    let angle_ctx = PrecisionContext::with_guard(working_digits, ctx.guard())?;
    let theta = arccos(x, &angle_ctx)?;
    Ok(cos_of(&(&theta * r), ctx))
}

/// `T_r(x)` by the product ladder `T_2k = 2 T_k^2 - 1`, `T_2k+1 = 2 T_k T_k+1 - x`.
///
/// Pure fixed-point algebra, no trigonometry: an independent check on
/// [`t_cos_eval`]. Rounding errors grow with `r`, so the ladder runs at
/// `digits + 2 len(r) + guard` digits.
pub fn t_ladder_eval(r: &BigInt, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if x.abs() > Real::one() {
        return Err(Error::Domain(format!("T_r(x) needs |x| <= 1, got {x}")));
    }
    if r.is_negative() {
        return Err(Error::Parameter(format!("negative polynomial degree {r}")));
    }
    let scale = ctx.working_digits() + 2 * decimal_length(r);
    let one = pow10(scale);
    let xs = x.scaled_floor(scale as i64);
    let (mut lo, mut hi) = (one.clone(), xs.clone());
    let bits = r.bits();
    for i in (0..bits).rev() {
        let cross = (&lo * &hi << 1) / &one - &xs;
        if r.bit(i) {
            hi = (&hi * &hi << 1) / &one - &one;
            lo = cross;
        } else {
            lo = (&lo * &lo << 1) / &one - &one;
            hi = cross;
        }
    }
    let v = ctx.round(&Real::from_scaled(lo, scale));
    Ok(clamp_unit(v))
}

fn clamp_unit(v: Real) -> Real {
    if v > Real::one() {
        Real::one()
    } else if v < -Real::one() {
        -Real::one()
    } else {
        v
    }
}

/// Public parameters of a key exchange.
#[derive(Clone, Debug)]
pub struct KexParams {
    x: Real,
    r_min: BigInt,
    r_max: BigInt,
    ctx: PrecisionContext,
}

impl KexParams {
    pub fn new(x: Real, r_min: BigInt, r_max: BigInt, ctx: PrecisionContext) -> Result<Self> {
        if x.abs() >= Real::one() {
            return Err(Error::Domain(format!(
                "public parameter must lie in (-1, 1): {x}"
            )));
        }
        if is_trivial_angle(&x)? {
            return Err(Error::Degenerate(format!("{x} is a rational-cosine angle")));
        }
        if r_min < BigInt::from(2) || r_max <= r_min {
            return Err(Error::Parameter(format!(
                "secret range must satisfy 2 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        let required = decimal_length(&r_max) + KEX_PRECISION_MARGIN;
        if ctx.digits() < required {
            return Err(Error::Precision {
                required,
                available: ctx.digits(),
            });
        }
        Ok(KexParams {
            x,
            r_min,
            r_max,
            ctx,
        })
    }

    pub fn x(&self) -> &Real {
        &self.x
    }

    pub fn r_min(&self) -> &BigInt {
        &self.r_min
    }

    pub fn r_max(&self) -> &BigInt {
        &self.r_max
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }
}

/// One party's key pair: secret degree `r` and public value `y = T_r(x)`.
#[derive(Clone, Debug)]
pub struct KexInstance {
    params: KexParams,
    r: BigInt,
    y: Real,
}

impl KexInstance {
    /// An instance with a chosen secret, for reproducing fixed experiments.
    pub fn with_secret(params: KexParams, r: BigInt) -> Result<Self> {
        if r < params.r_min || r > params.r_max {
            return Err(Error::Parameter(format!(
                "secret {r} outside [{}, {}]",
                params.r_min, params.r_max
            )));
        }
        let y = t_cos_eval(&r, &params.x, &params.ctx)?;
        Ok(KexInstance { params, r, y })
    }

    pub fn params(&self) -> &KexParams {
        &self.params
    }

    pub fn secret(&self) -> &BigInt {
        &self.r
    }

    /// The public value `T_r(x)`.
    pub fn public(&self) -> &Real {
        &self.y
    }

    /// Combine with the other party's public value.
    pub fn shared(&self, their_y: &Real) -> Result<Real> {
        kex_shared(&self.r, their_y, &self.params.ctx)
    }

    /// Key-value text record. The secret is written only when `export_secret` is set.
    pub fn to_record(&self, export_secret: bool) -> KexRecord {
        KexRecord {
            r: export_secret.then(|| self.r.clone()),
            x: self.params.x.clone(),
            y: self.y.clone(),
            digits: self.params.ctx.digits(),
        }
    }
}

/// Draw a secret uniformly from `[r_min, r_max]` with a seeded generator.
pub fn kex_keygen(params: &KexParams, seed: u64) -> Result<KexInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.gen_bigint_range(&params.r_min, &(&params.r_max + BigInt::one()));
    KexInstance::with_secret(params.clone(), r)
}

/// `T_my_r(their_y)`: the shared secret `T_rs(x)` when `their_y = T_s(x)`.
pub fn kex_shared(my_r: &BigInt, their_y: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if their_y.abs() > Real::one() {
        return Err(Error::Domain(format!(
            "public value outside [-1, 1]: {their_y}"
        )));
    }
    t_cos_eval(my_r, their_y, ctx)
}

/// Serialized form of a [`KexInstance`]: `key=value` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KexRecord {
    pub r: Option<BigInt>,
    pub x: Real,
    pub y: Real,
    pub digits: u64,
}

impl fmt::Display for KexRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.r {
            writeln!(f, "r={r}")?;
        }
        writeln!(f, "x={}", self.x)?;
        writeln!(f, "y={}", self.y)?;
        writeln!(f, "digits={}", self.digits)
    }
}

impl FromStr for KexRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut r, mut x, mut y, mut digits) = (None, None, None, None);
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
            match key.trim() {
                "r" => {
                    r = Some(
                        value
                            .trim()
                            .parse::<BigInt>()
                            .map_err(|_| Error::Parse(format!("malformed integer {value:?}")))?,
                    )
                }
                "x" => x = Some(value.parse::<Real>()?),
                "y" => y = Some(value.parse::<Real>()?),
                "digits" => {
                    digits =
                        Some(value.trim().parse::<u64>().map_err(|_| {
                            Error::Parse(format!("malformed digit count {value:?}"))
                        })?)
                }
                other => return Err(Error::Parse(format!("unknown record key {other:?}"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("record is missing {k}"));
        Ok(KexRecord {
            r,
            x: x.ok_or_else(|| missing("x"))?,
            y: y.ok_or_else(|| missing("y"))?,
            digits: digits.ok_or_else(|| missing("digits"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::agrees_to;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    fn ctx(d: u64) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    const X3: &str = "0.5434908208304983248023984";

    #[test]
    fn cos_eval_small_degrees() {
        let c = ctx(40);
        assert_eq!(
            t_cos_eval(&BigInt::zero(), &r("0.7"), &c).unwrap(),
            Real::one()
        );
        assert_eq!(t_cos_eval(&BigInt::one(), &r("0.7"), &c).unwrap(), r("0.7"));
        assert_eq!(
            t_cos_eval(&BigInt::from(3), &r("0.3"), &c).unwrap(),
            r("-0.792")
        );
        assert!(matches!(
            t_cos_eval(&BigInt::from(3), &r("1.2"), &c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cos_eval_reproduces_published_public_value() {
        let printed = "0.7403861482024649794710508003339062035627295103915700058583940113150512830650614599318710233011943378";
        let y = t_cos_eval(&BigInt::from(342683123012u64), &r(X3), &ctx(150)).unwrap();
        // all printed digits but the last
        assert!(agrees_to(&y, &r(printed), 99), "{y}");
    }

    #[test]
    fn ladder_closed_forms() {
        let c = ctx(40);
        assert_eq!(
            t_ladder_eval(&BigInt::from(3), &r("0.3"), &c).unwrap(),
            r("-0.792")
        );
        assert_eq!(
            t_ladder_eval(&BigInt::from(2), &r("0.5"), &c).unwrap(),
            r("-0.5")
        );
        assert_eq!(
            t_ladder_eval(&BigInt::zero(), &r("0.5"), &c).unwrap(),
            Real::one()
        );
        assert_eq!(
            t_ladder_eval(&BigInt::one(), &r("0.25"), &c).unwrap(),
            r("0.25")
        );
    }

    #[test]
    fn ladder_matches_cosine_form() {
        let c = ctx(60);
        let n = BigInt::from(1_000_003);
        let a = t_ladder_eval(&n, &r(X3), &c).unwrap();
        let b = t_cos_eval(&n, &r(X3), &c).unwrap();
        assert!(agrees_to(&a, &b, 50), "{a} vs {b}");
    }

    #[test]
    fn precision_budget_is_enforced() {
        let c = ctx(40);
        let big = BigInt::from(10).pow(30);
        let err = t_cos_eval_at(&big, &r(X3), &c, 60).unwrap_err();
        assert_eq!(
            err,
            Error::Precision {
                required: 71,
                available: 60
            }
        );
        assert!(t_cos_eval_at(&big, &r(X3), &c, 71).is_ok());
        let eval = ChebyshevEvaluator::new(&r(X3), &c, 9).unwrap();
        assert!(matches!(eval.eval(&big), Err(Error::Precision { .. })));
    }

    #[test]
    fn evaluator_agrees_with_one_shot() {
        let c = ctx(50);
        let eval = ChebyshevEvaluator::new(&r(X3), &c, 13).unwrap();
        let n = BigInt::from(526556641);
        assert_eq!(eval.eval(&n).unwrap(), t_cos_eval(&n, &r(X3), &c).unwrap());
    }

    #[test]
    fn shared_secret_composition() {
        let c = ctx(40);
        let x = r("0.3");
        let y5 = t_cos_eval(&BigInt::from(5), &x, &c).unwrap();
        let y3 = t_cos_eval(&BigInt::from(3), &x, &c).unwrap();
        let a = kex_shared(&BigInt::from(3), &y5, &c).unwrap();
        let b = kex_shared(&BigInt::from(5), &y3, &c).unwrap();
        let direct = t_cos_eval(&BigInt::from(15), &x, &c).unwrap();
        assert!(agrees_to(&a, &direct, 35));
        assert!(agrees_to(&b, &direct, 35));

        let y2 = t_cos_eval(&BigInt::from(2), &r("0.5"), &c).unwrap();
        assert_eq!(kex_shared(&BigInt::from(2), &y2, &c).unwrap(), r("-0.5"));
        assert_eq!(
            kex_shared(&BigInt::one(), &r("0.123"), &c).unwrap(),
            r("0.123")
        );
        assert!(kex_shared(&BigInt::one(), &r("-1.01"), &c).is_err());
    }

    #[test]
    fn params_validation() {
        let ok = |x: &str, lo: i64, hi: i64, d: u64| {
            KexParams::new(r(x), BigInt::from(lo), BigInt::from(hi), ctx(d))
        };
        assert!(ok(X3, 2, 1000, 50).is_ok());
        assert!(matches!(ok("0.5", 2, 1000, 50), Err(Error::Degenerate(_))));
        assert!(matches!(ok("1", 2, 1000, 50), Err(Error::Domain(_))));
        assert!(matches!(ok(X3, 1, 1000, 50), Err(Error::Parameter(_))));
        assert!(matches!(ok(X3, 10, 10, 50), Err(Error::Parameter(_))));
        assert!(matches!(ok(X3, 2, 1000, 42), Err(Error::Precision { .. })));
    }

    #[test]
    fn keygen_is_seeded_and_in_range() {
        let lo = BigInt::from(10).pow(12);
        let hi = BigInt::from(10).pow(13);
        let p = KexParams::new(r(X3), lo.clone(), hi.clone(), ctx(80)).unwrap();
        let a = kex_keygen(&p, 7).unwrap();
        let b = kex_keygen(&p, 7).unwrap();
        assert_eq!(a.secret(), b.secret());
        assert!(*a.secret() >= lo && *a.secret() <= hi);
        assert_ne!(kex_keygen(&p, 8).unwrap().secret(), a.secret());
    }

    #[test]
    fn forced_secret_gives_published_attack_constant() {
        let lo = BigInt::from(10).pow(8);
        let hi = BigInt::from(10).pow(9);
        let p = KexParams::new(r(X3), lo, hi, ctx(60)).unwrap();
        let inst = KexInstance::with_secret(p, BigInt::from(526556641)).unwrap();
        let w = ctx(60);
        let d = arccos(inst.public(), &w)
            .unwrap()
            .div(&arccos(&r(X3), &w).unwrap(), &ctx(40))
            .unwrap();
        assert!(
            agrees_to(&d, &r("2.828536898289298870761221685646344096466"), 38),
            "{d}"
        );
    }

    #[test]
    fn record_round_trip_hides_secret_by_default() {
        let p = KexParams::new(r(X3), BigInt::from(2), BigInt::from(1000), ctx(50)).unwrap();
        let inst = KexInstance::with_secret(p, BigInt::from(777)).unwrap();
        let public = inst.to_record(false).to_string();
        assert!(!public.contains("r="));
        let back: KexRecord = public.parse().unwrap();
        assert_eq!(back, inst.to_record(false));
        let full: KexRecord = inst.to_record(true).to_string().parse().unwrap();
        assert_eq!(full.r, Some(BigInt::from(777)));
        assert!("x=0.1\ndigits=3".parse::<KexRecord>().is_err());
        assert!("x=0.1\ny=0.2\ndigits=3\nzz=1".parse::<KexRecord>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn outputs_stay_in_unit_interval(n in 0u64..1_000_000_000, xm in -999_999i64..999_999) {
            let c = ctx(30);
            let x = Real::from_scaled(BigInt::from(xm), 6);
            let y = t_cos_eval(&BigInt::from(n), &x, &c).unwrap();
            prop_assert!(y.abs() <= Real::one());
        }

        #[test]
        fn semigroup(a in 1u64..1_000_000, b in 1u64..1_000_000, xm in 1i64..999_999) {
            let c = ctx(40);
            let x = Real::from_scaled(BigInt::from(xm), 6);
            prop_assume!(!is_trivial_angle(&x).unwrap());
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let inner = t_cos_eval(&b, &x, &c).unwrap();
            let outer = t_cos_eval(&a, &inner, &c).unwrap();
            let direct = t_cos_eval(&(&a * &b), &x, &c).unwrap();
            prop_assert!(agrees_to(&outer, &direct, 30), "{} vs {}", outer, direct);
        }
    }
}
