//! Continued fractions of the attack constant `e` and the candidates they suggest.
//!
//! If `k e` were close to an integer `m`, then `m/k` would be a good rational
//! approximation of `e`, so the attack walks the approximants `p/q` of `e` and
//! turns each numerator into a secret estimate `p * frac(d)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::diophantine::{CandidateReport, CandidateSource, ScanMode, SignBranch, Verifier};
use crate::error::{Error, Result};
use crate::precision::{pow10, PrecisionContext, Real};

/// Partial quotients and convergents of a positive real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
}

/// `(p_{i-2} + j p_{i-1}) / (q_{i-2} + j q_{i-1})` for `1 <= j <= a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximant {
    pub index: usize,
    pub multiple: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

impl Approximant {
    pub fn is_convergent(&self, cf: &CFExpansion) -> bool {
        cf.quotients.get(self.index) == Some(&self.multiple)
    }
}

impl CFExpansion {
    /// Fold the quotients back into a single fraction.
    pub fn fold(&self) -> Option<(BigInt, BigInt)> {
        let mut it = self.quotients.iter().rev();
        let last = it.next()?;
        let (mut p, mut q) = (last.clone(), BigInt::one());
        for a in it {
            // a + q/p
            let np = a * &p + &q;
            q = std::mem::replace(&mut p, np);
        }
        Some((p, q))
    }

    /// Convergents interleaved with the intermediate fractions before each one,
    /// ordered by index and then multiple.
    pub fn approximants(&self) -> Vec<Approximant> {
        let mut out = Vec::new();
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for (index, a) in self.quotients.iter().enumerate() {
            let first = if index == 0 { a.clone() } else { BigInt::one() };
            let mut j = first;
            while j <= *a {
                out.push(Approximant {
                    index,
                    multiple: j.clone(),
                    p: &p2 + &j * &p1,
                    q: &q2 + &j * &q1,
                });
                j += 1;
            }
            let (p, q) = self.convergents[index].clone();
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        out
    }
}

/// Expand `v` (rounded to `ctx.digits`) into at most `max_terms` partial quotients.
///
/// Quotients are only trusted while the convergent denominator stays below
/// `10^(digits/2)`; past that point they depend on the rounding of `v`.
pub fn cf_expand(v: &Real, max_terms: usize, ctx: &PrecisionContext) -> Result<CFExpansion> {
    if v.is_zero() || v.is_negative() {
        return Err(Error::Parameter(format!(
            "continued fraction needs v > 0, got {v}"
        )));
    }
    if max_terms == 0 {
        return Err(Error::Parameter("max_terms must be at least 1".into()));
    }
    let v = ctx.round(v);
    let scale = v.frac_digits();
    let mut num = v.scaled_floor(scale as i64);
    let mut den = pow10(scale);
    let limit = pow10(ctx.digits() / 2);

    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    while quotients.len() < max_terms {
        let (a, rem) = num.div_mod_floor(&den);
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        if q >= limit && !quotients.is_empty() {
            break;
        }
        quotients.push(a);
        convergents.push((p.clone(), q.clone()));
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        if rem.is_zero() {
            break;
        }
        num = std::mem::replace(&mut den, rem);
    }
    Ok(CFExpansion {
        quotients,
        convergents,
    })
}

/// One continued-fraction guess for the secret.
#[derive(Clone, Debug)]
pub struct CfCandidate {
    pub approximant: Approximant,
    pub branch: SignBranch,
    /// `frac(d)` on the `+` branch, `frac(-d)` on the `-` branch.
    pub frac: Real,
    /// `p * frac`.
    pub estimate: Real,
    pub candidate_r: BigInt,
    pub residual: Option<Real>,
    pub verified: bool,
}

impl CfCandidate {
    /// `r - estimate`.
    pub fn dr(&self, r_true: &BigInt) -> Real {
        &Real::from(r_true) - &self.estimate
    }

    /// `(r - estimate) / r`.
    pub fn dr_over_r(&self, r_true: &BigInt, ctx: &PrecisionContext) -> Result<Real> {
        self.dr(r_true).div(&Real::from(r_true), ctx)
    }

    /// `r / estimate`.
    pub fn r_over_estimate(&self, r_true: &BigInt, ctx: &PrecisionContext) -> Result<Real> {
        Real::from(r_true).div(&self.estimate, ctx)
    }

    pub fn to_report(&self, mode: &ScanMode) -> CandidateReport {
        CandidateReport {
            candidate_r: self.candidate_r.clone(),
            source: CandidateSource::Approximant {
                index: self.approximant.index,
                multiple: self.approximant.multiple.clone(),
            },
            residual: self.residual.clone().unwrap_or_else(Real::zero),
            verified: self.verified,
            signed_diff: mode.secret().map(|r| r - &self.candidate_r),
        }
    }
}

/// Terms requested from [`cf_expand`]; the precision cut-off normally stops earlier.
pub const CF_MAX_TERMS: usize = 200;

/// Every approximant `p/q` of `e` with `p * frac(±d)` in `[r_lo, r_hi]`, both branches.
pub fn cf_candidates(
    d: &Real,
    e: &Real,
    r_lo: &BigInt,
    r_hi: &BigInt,
    ctx: &PrecisionContext,
) -> Result<Vec<CfCandidate>> {
    if r_lo >= r_hi {
        return Err(Error::Parameter(format!(
            "empty candidate range [{r_lo}, {r_hi}]"
        )));
    }
    let cf = cf_expand(e, CF_MAX_TERMS, ctx)?;
    let approximants = cf.approximants();
    let (lo, hi) = (Real::from(r_lo), Real::from(r_hi));
    let mut out = Vec::new();
    for branch in SignBranch::BOTH {
        let frac = branch.apply(d).frac_part();
        if frac.is_zero() {
            continue;
        }
        for ap in &approximants {
            let estimate = &Real::from(&ap.p) * &frac;
            if estimate < lo || estimate > hi {
                continue;
            }
            out.push(CfCandidate {
                approximant: ap.clone(),
                branch,
                frac: frac.clone(),
                candidate_r: estimate.round(),
                estimate,
                residual: None,
                verified: false,
            });
        }
    }
    Ok(out)
}

/// Check each candidate against the public value.
pub fn cf_verify(
    cands: &mut [CfCandidate],
    x: &Real,
    tr: &Real,
    ctx: &PrecisionContext,
) -> Result<()> {
    let Some(bound) = cands.iter().map(|c| c.candidate_r.abs()).max() else {
        return Ok(());
    };
    let verifier = Verifier::new(x, tr, ctx, &bound)?;
    for c in cands.iter_mut() {
        let (residual, verified) = verifier.check(&c.candidate_r)?;
        c.residual = Some(residual);
        c.verified = verified;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    fn big(n: u64) -> BigInt {
        BigInt::from(n)
    }

    const E3: &str = "6.307113521910353488452805074053219201594725596341746710710479708456892071359128166852644030941847249";

    #[test]
    fn two_and_a_half() {
        let cf = cf_expand(&r("2.5"), 10, &PrecisionContext::new(20).unwrap()).unwrap();
        assert_eq!(cf.quotients, vec![big(2), big(2)]);
        assert_eq!(cf.convergents, vec![(big(2), big(1)), (big(5), big(2))]);
        assert_eq!(cf.fold(), Some((big(5), big(2))));
    }

    #[test]
    fn rejects_non_positive() {
        let ctx = PrecisionContext::new(20).unwrap();
        assert!(matches!(
            cf_expand(&Real::zero(), 5, &ctx),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            cf_expand(&r("-1.5"), 5, &ctx),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            cf_expand(&r("1.5"), 0, &ctx),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn expansion_of_e_prefix() {
        let ctx = PrecisionContext::new(100).unwrap();
        let cf = cf_expand(&r(E3), CF_MAX_TERMS, &ctx).unwrap();
        assert_eq!(cf.quotients[0], big(6));
        assert_eq!(cf.convergents[20], (big(884248097465), big(140198538427)));
        assert_eq!(cf.convergents[22], (big(1828055901813), big(289840335910)));
        let last = cf.convergents.last().unwrap().1.clone();
        assert!(last < pow10(50));
    }

    #[test]
    fn intermediate_fractions_include_printed_pairs() {
        let ctx = PrecisionContext::new(100).unwrap();
        let cf = cf_expand(&r(E3), CF_MAX_TERMS, &ctx).unwrap();
        let aps = cf.approximants();
        let find = |p: u64, q: u64| aps.iter().find(|a| a.p == big(p) && a.q == big(q)).cloned();
        let mid = find(467330149284, 74095725035).expect("p18 + 7 p19");
        assert_eq!((mid.index, mid.multiple.clone()), (20, big(7)));
        assert!(!mid.is_convergent(&cf));
        assert!(find(2771863706161, 439482133393).is_some());
        let conv = find(884248097465, 140198538427).unwrap();
        assert!(conv.is_convergent(&cf));
    }

    #[test]
    fn candidate_estimate_for_printed_pair() {
        let ctx = PrecisionContext::new(100).unwrap();
        let d = r("0.73995897022306966689744239562920880188490492328069029456993812469123");
        let cands = cf_candidates(
            &d,
            &r(E3),
            &big(100_000_000_000),
            &big(1_000_000_000_000),
            &ctx,
        )
        .unwrap();
        let hit = cands
            .iter()
            .find(|c| c.branch == SignBranch::Plus && c.approximant.p == big(467330149284))
            .unwrap();
        assert_eq!(hit.estimate.to_fixed_string(4), "345805136018.3821");
        assert_eq!(hit.candidate_r, big(345805136018));
        let secret = big(342683123012);
        assert_eq!(hit.dr(&secret).to_fixed_string(3), "-3122013006.382");
        let ratio = hit.dr_over_r(&secret, &ctx).unwrap();
        assert_eq!(ratio.to_sig_string(10), "-0.009110495372");
        assert!(cands
            .iter()
            .all(|c| c.estimate >= Real::from(100_000_000_000i64)));
    }

    #[test]
    fn empty_window() {
        let ctx = PrecisionContext::new(60).unwrap();
        let cands = cf_candidates(&r("0.5"), &r(E3), &big(4), &big(5), &ctx).unwrap();
        assert!(cands.is_empty());
        cf_verify(&mut [], &r("0.3"), &r("0.1"), &ctx).unwrap();
    }

    proptest! {
        #[test]
        fn convergent_quality_and_reconstruction(mant in 1u64..u64::MAX, shift in 0u64..12) {
            let ctx = PrecisionContext::new(40).unwrap();
            let v = Real::from_scaled(BigInt::from(mant), shift + 5);
            let cf = cf_expand(&v, 60, &ctx).unwrap();
            prop_assert_eq!(cf.fold(), cf.convergents.last().cloned());
            let wide = ctx.widen(40);
            for (p, q) in &cf.convergents {
                let approx = Real::from(p).div(&Real::from(q), &wide).unwrap();
                let err = (&approx - &v).abs();
                let bound = Real::one().div(&Real::from(q * q), &wide).unwrap();
                prop_assert!(err < bound);
            }
        }
    }
}
