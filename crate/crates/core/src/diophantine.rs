//! The arccos-inversion attack.
//!
//! From `y = cos(r arccos x)` every secret satisfies `r = ±d + k e` with
//! `d = arccos(y)/arccos(x)` and `e = 2 pi/arccos(x)`. Scaling by `M = 10^m` and
//! flooring turns this into the linear Diophantine equation
//! `-n M + k [eM] = ∓[dM]`, whose solution line `n(z)` is scanned for the secret.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chebyshev::ChebyshevEvaluator;
use crate::error::{Error, Result};
use crate::precision::{
    arccos, decimal_length, is_trivial_angle, pi, pow10, PrecisionContext, Real,
};

/// Which of `r = +d + k e` and `r = -d + k e` a computation follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    pub const BOTH: [SignBranch; 2] = [SignBranch::Plus, SignBranch::Minus];

    pub fn apply(self, v: &Real) -> Real {
        match self {
            SignBranch::Plus => v.clone(),
            SignBranch::Minus => -v,
        }
    }
}

impl fmt::Display for SignBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignBranch::Plus => "+",
            SignBranch::Minus => "-",
        })
    }
}

/// `d = arccos(y)/arccos(x)` and `e = 2 pi/arccos(x)`.
#[derive(Clone, Debug)]
pub struct AttackReals {
    pub d: Real,
    pub e: Real,
    pub ctx: PrecisionContext,
}

/// Derive the attack constants from the public pair `(x, y)`.
pub fn derive_attack_reals(x: &Real, y: &Real, ctx: &PrecisionContext) -> Result<AttackReals> {
    if x.abs() < Real::one() && is_trivial_angle(x)? {
        return Err(Error::Degenerate(format!(
            "arccos({x}) is a rational multiple of pi"
        )));
    }
    derive_attack_reals_forced(x, y, ctx)
}

/// [`derive_attack_reals`] without the trivial-angle rejection.
pub fn derive_attack_reals_forced(
    x: &Real,
    y: &Real,
    ctx: &PrecisionContext,
) -> Result<AttackReals> {
    if x.abs() >= Real::one() {
        return Err(Error::Domain(format!("attack needs |x| < 1, got {x}")));
    }
    if y.abs() > Real::one() {
        return Err(Error::Domain(format!("public value outside [-1, 1]: {y}")));
    }
    let wide = ctx.working();
    let ax = arccos(x, &wide)?;
    let ay = arccos(y, &wide)?;
    let two_pi = &pi(&wide) * &Real::from(2);
    Ok(AttackReals {
        d: ay.div(&ax, ctx)?,
        e: two_pi.div(&ax, ctx)?,
        ctx: *ctx,
    })
}

/// Which neighbouring integers stand in for `d M` and `e M`: the floor or floor + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoundingVariant {
    pub d_up: bool,
    pub e_up: bool,
}

impl RoundingVariant {
    pub const ALL: [RoundingVariant; 4] = [
        RoundingVariant {
            d_up: false,
            e_up: false,
        },
        RoundingVariant {
            d_up: false,
            e_up: true,
        },
        RoundingVariant {
            d_up: true,
            e_up: false,
        },
        RoundingVariant {
            d_up: true,
            e_up: true,
        },
    ];
}

impl fmt::Display for RoundingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |up| if up { "+1" } else { "" };
        write!(f, "D=[dM]{} E=[eM]{}", part(self.d_up), part(self.e_up))
    }
}

/// `a n + b k = c` with `a = -10^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophEquation {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub m: u32,
    pub sign: SignBranch,
    pub variant: RoundingVariant,
}

impl fmt::Display for DiophEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a.is_negative() {
            write!(f, "-n*{} + k*{} = {}", -&self.a, self.b, self.c)
        } else {
            write!(f, "n*{} + k*{} = {}", self.a, self.b, self.c)
        }
    }
}

/// The equation for one sign branch and rounding variant.
pub fn build_equation(
    reals: &AttackReals,
    m: u32,
    sign: SignBranch,
    variant: RoundingVariant,
) -> DiophEquation {
    let bump = |up: bool| if up { BigInt::one() } else { BigInt::zero() };
    let d_int = reals.d.floor_scaled(m) + bump(variant.d_up);
    let e_int = reals.e.floor_scaled(m) + bump(variant.e_up);
    // n = k e ± d, i.e. -n M + k E = ∓D
    let c = match sign {
        SignBranch::Plus => -d_int,
        SignBranch::Minus => d_int,
    };
    DiophEquation {
        a: -pow10(m as u64),
        b: e_int,
        c,
        m,
        sign,
        variant,
    }
}

/// The equation printed in the literature: `+` branch, both constants floored.
pub fn primary_equation(reals: &AttackReals, m: u32) -> DiophEquation {
    build_equation(reals, m, SignBranch::Plus, RoundingVariant::ALL[0])
}

/// All eight equations: four rounding variants for each sign branch.
pub fn enumerate_equations(reals: &AttackReals, m: u32) -> Result<Vec<DiophEquation>> {
    if m == 0 {
        return Err(Error::Parameter("scale exponent must be at least 1".into()));
    }
    Ok(SignBranch::BOTH
        .iter()
        .flat_map(|&s| {
            RoundingVariant::ALL
                .iter()
                .map(move |&v| build_equation(reals, m, s, v))
        })
        .collect())
}

/// Extended Euclid: `(g, u, v)` with `a u + b v = g = gcd(|a|, |b|) > 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Parameter("gcd(0, 0) is undefined".into()));
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_u, mut u) = (BigInt::one(), BigInt::zero());
    let (mut old_v, mut v) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_u = &old_u - &q * &u;
        old_u = std::mem::replace(&mut u, next_u);
        let next_v = &old_v - &q * &v;
        old_v = std::mem::replace(&mut v, next_v);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_u, -old_v))
    } else {
        Ok((old_r, old_u, old_v))
    }
}

/// Every solution of `a n + b k = c`: `n(z) = n0 + n_step z`, `k(z) = k0 + k_step z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophFamily {
    pub n0: BigInt,
    pub k0: BigInt,
    pub n_step: BigInt,
    pub k_step: BigInt,
}

impl DiophFamily {
    pub fn at(&self, z: &BigInt) -> (BigInt, BigInt) {
        (&self.n0 + &self.n_step * z, &self.k0 + &self.k_step * z)
    }

    /// The `z` at which the family passes through `(n, k)`, if it does.
    pub fn index_of(&self, n: &BigInt, k: &BigInt) -> Option<BigInt> {
        let z = if !self.k_step.is_zero() {
            let (z, rem) = (k - &self.k0).div_rem(&self.k_step);
            if !rem.is_zero() {
                return None;
            }
            z
        } else {
            if *k != self.k0 || self.n_step.is_zero() {
                return None;
            }
            let (z, rem) = (n - &self.n0).div_rem(&self.n_step);
            if !rem.is_zero() {
                return None;
            }
            z
        };
        (self.at(&z) == (n.clone(), k.clone())).then_some(z)
    }

    /// `(k0 mod k_step) / k_step` in `[0, 1)`: where the particular solution sits in its class.
    pub fn residue_fraction(&self) -> f64 {
        if self.k_step.is_zero() {
            return 0.0;
        }
        let r = self.k0.mod_floor(&self.k_step);
        let scaled = (r * 1_000_000_000_000u64) / &self.k_step;
        scaled.to_f64().unwrap_or(0.0) / 1e12
    }

    /// Substitute back into `eq` at the given indices.
    pub fn satisfies(&self, eq: &DiophEquation, zs: &[i64]) -> bool {
        zs.iter().all(|&z| {
            let (n, k) = self.at(&BigInt::from(z));
            &eq.a * n + &eq.b * k == eq.c
        })
    }
}

/// Solve `a n + b k = c`; `None` when `gcd(a, b)` does not divide `c`.
///
/// The particular solution is canonicalised so `k0` is the least-absolute
/// member of its class modulo `k_step` (ties resolved toward the positive one).
pub fn solve_linear(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<Option<DiophFamily>> {
    let (g, u, v) = ext_gcd(a, b)?;
    let (q, rem) = c.div_rem(&g);
    if !rem.is_zero() {
        return Ok(None);
    }
    let (mut n_step, mut k_step) = (b / &g, -(a / &g));
    if k_step.is_negative() || (k_step.is_zero() && n_step.is_negative()) {
        n_step = -n_step;
        k_step = -k_step;
    }
    let (mut n0, mut k0) = (u * &q, v * &q);
    if !k_step.is_zero() {
        let mut t = k0.div_floor(&k_step);
        let mut rest = &k0 - &t * &k_step;
        if &rest * 2 > k_step {
            t += 1;
            rest -= &k_step;
        }
        n0 -= &t * &n_step;
        k0 = rest;
    }
    Ok(Some(DiophFamily {
        n0,
        k0,
        n_step,
        k_step,
    }))
}

pub fn solve_diophantine(eq: &DiophEquation) -> Result<Option<DiophFamily>> {
    solve_linear(&eq.a, &eq.b, &eq.c)
}

/// Verification of candidate secrets against the public value.
///
/// A candidate verifies iff `|T_candidate(x) - tr| < 10^-(digits/2)`: only the
/// leading half of the digits are trusted, the tail of a genuine public value
/// being rounding noise at large degrees.
#[derive(Clone, Debug)]
pub struct Verifier {
    eval: ChebyshevEvaluator,
    tr: Real,
    tolerance_digits: u64,
}

impl Verifier {
    pub fn new(
        x: &Real,
        tr: &Real,
        ctx: &PrecisionContext,
        max_candidate: &BigInt,
    ) -> Result<Self> {
        let tolerance_digits = ctx.digits() / 2;
        let check_ctx = PrecisionContext::with_guard(tolerance_digits + 10, ctx.guard())?;
        let max_len = decimal_length(max_candidate) + 2;
        Ok(Verifier {
            eval: ChebyshevEvaluator::new(x, &check_ctx, max_len)?,
            tr: tr.clone(),
            tolerance_digits,
        })
    }

    pub fn tolerance_digits(&self) -> u64 {
        self.tolerance_digits
    }

    /// `(|T_candidate(x) - tr|, verified)`.
    pub fn check(&self, candidate: &BigInt) -> Result<(Real, bool)> {
        let y = self.eval.eval(&candidate.abs())?;
        let residual = (&y - &self.tr).abs();
        let tol = Real::from_parts(BigInt::one(), -(self.tolerance_digits as i64));
        let verified = residual < tol;
        Ok((residual.round_sig(12), verified))
    }
}

/// Where a candidate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateSource {
    /// Index `z` on a Diophantine solution line.
    ScanIndex(BigInt),
    /// Continued-fraction approximant `p_{i-2} + j p_{i-1}` (`j = a_i` is the convergent).
    Approximant { index: usize, multiple: BigInt },
}

impl fmt::Display for CandidateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateSource::ScanIndex(z) => write!(f, "z={z}"),
            CandidateSource::Approximant { index, multiple } => write!(f, "i={index} j={multiple}"),
        }
    }
}

/// One candidate secret and its verdict.
#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub candidate_r: BigInt,
    pub source: CandidateSource,
    pub residual: Real,
    pub verified: bool,
    /// True secret minus candidate; oracle mode only.
    pub signed_diff: Option<BigInt>,
}

/// Oracle mode knows the true secret (to reproduce distance tables); attack mode
/// can only verify against the public value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Oracle(BigInt),
    Attack,
}

impl ScanMode {
    pub fn secret(&self) -> Option<&BigInt> {
        match self {
            ScanMode::Oracle(r) => Some(r),
            ScanMode::Attack => None,
        }
    }
}

/// Result of scanning a solution line over a candidate window.
#[derive(Clone, Debug)]
pub struct FamilyScan {
    pub z_lo: BigInt,
    pub z_hi: BigInt,
    pub reports: Vec<CandidateReport>,
}

impl FamilyScan {
    /// Number of `z` values in the window.
    pub fn width(&self) -> usize {
        self.reports.len()
    }

    pub fn verified(&self) -> impl Iterator<Item = &CandidateReport> {
        self.reports.iter().filter(|c| c.verified)
    }

    /// Closest candidate at or below `r`.
    pub fn best_below(&self, r: &BigInt) -> Option<&CandidateReport> {
        self.reports
            .iter()
            .filter(|c| c.candidate_r <= *r)
            .max_by(|a, b| a.candidate_r.cmp(&b.candidate_r))
    }

    /// Closest candidate at or above `r`.
    pub fn best_above(&self, r: &BigInt) -> Option<&CandidateReport> {
        self.reports
            .iter()
            .filter(|c| c.candidate_r >= *r)
            .min_by(|a, b| a.candidate_r.cmp(&b.candidate_r))
    }
}

/// Refuse windows that would take longer to scan than brute force would.
pub const MAX_SCAN_WIDTH: u64 = 10_000_000;

/// Scan the `z` interval on which `n(z)` lies in `[r_lo, r_hi]`, verifying every
/// `|n(z)|` against `tr`. Reports come back in ascending `z`.
#[allow(clippy::too_many_arguments)]
pub fn scan_family(
    fam: &DiophFamily,
    r_lo: &BigInt,
    r_hi: &BigInt,
    x: &Real,
    tr: &Real,
    mode: &ScanMode,
    ctx: &PrecisionContext,
) -> Result<FamilyScan> {
    if r_lo >= r_hi {
        return Err(Error::Parameter(format!(
            "empty candidate range [{r_lo}, {r_hi}]"
        )));
    }
    let (z_lo, z_hi) = if fam.n_step.is_zero() {
        if fam.n0 >= *r_lo && fam.n0 <= *r_hi {
            (BigInt::zero(), BigInt::zero())
        } else {
            (BigInt::one(), BigInt::zero())
        }
    } else if fam.n_step.is_positive() {
        (
            (r_lo - &fam.n0).div_ceil(&fam.n_step),
            (r_hi - &fam.n0).div_floor(&fam.n_step),
        )
    } else {
        (
            (r_hi - &fam.n0).div_ceil(&fam.n_step),
            (r_lo - &fam.n0).div_floor(&fam.n_step),
        )
    };
    if z_lo > z_hi {
        return Ok(FamilyScan {
            z_lo,
            z_hi,
            reports: Vec::new(),
        });
    }
    let width = (&z_hi - &z_lo + 1u32).to_u64().unwrap_or(u64::MAX);
    if width > MAX_SCAN_WIDTH {
        return Err(Error::Parameter(format!(
            "scan window of {width} candidates exceeds {MAX_SCAN_WIDTH}"
        )));
    }
    let bound = r_hi.abs().max(r_lo.abs());
    let verifier = Verifier::new(x, tr, ctx, &bound)?;
    let mut reports = Vec::with_capacity(width as usize);
    let mut z = z_lo.clone();
    while z <= z_hi {
        let (n, _) = fam.at(&z);
        let candidate_r = n.abs();
        let (residual, verified) = verifier.check(&candidate_r)?;
        let signed_diff = mode.secret().map(|r| r - &candidate_r);
        reports.push(CandidateReport {
            candidate_r,
            source: CandidateSource::ScanIndex(z.clone()),
            residual,
            verified,
            signed_diff,
        });
        z += 1u32;
    }
    Ok(FamilyScan {
        z_lo,
        z_hi,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::agrees_to;
    use proptest::prelude::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    fn big(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    fn first_solvable(reals: &AttackReals, m: u32) -> (DiophEquation, DiophFamily) {
        (m..m + 4)
            .flat_map(|m| enumerate_equations(reals, m).unwrap())
            .find_map(|eq| solve_diophantine(&eq).unwrap().map(|f| (eq, f)))
            .expect("some rounding variant is solvable")
    }

    fn exact(d: &str, e: &str) -> AttackReals {
        AttackReals {
            d: r(d),
            e: r(e),
            ctx: PrecisionContext::new(20).unwrap(),
        }
    }

    #[test]
    fn ext_gcd_examples() {
        let (g, u, v) = ext_gcd(&big("6307113521"), &big("1000000000")).unwrap();
        assert_eq!(g, BigInt::one());
        assert_eq!((u, v), (big("326428881"), big("-2058824009")));
        assert_eq!(
            ext_gcd(&big("3"), &big("5")).unwrap(),
            (big("1"), big("2"), big("-1"))
        );
        assert_eq!(ext_gcd(&big("12"), &big("18")).unwrap().0, big("6"));
        assert_eq!(
            ext_gcd(&big("-12"), &big("0")).unwrap(),
            (big("12"), big("-1"), big("0"))
        );
        assert!(ext_gcd(&BigInt::zero(), &BigInt::zero()).is_err());
    }

    #[test]
    fn equations_for_exact_constants() {
        let eqs = enumerate_equations(&exact("0.5", "1.5"), 1).unwrap();
        assert_eq!(eqs.len(), 8);
        for eq in &eqs {
            assert_eq!(eq.a, big("-10"));
            assert!(eq.b == big("15") || eq.b == big("16"));
            assert!(eq.c.abs() == big("5") || eq.c.abs() == big("6"));
        }
        assert!(enumerate_equations(&exact("0.5", "1.5"), 0).is_err());
    }

    #[test]
    fn unsolvable_when_gcd_does_not_divide() {
        assert_eq!(solve_linear(&big("2"), &big("4"), &big("3")).unwrap(), None);
    }

    #[test]
    fn canonical_particular_solution() {
        // -10 n + 15 k = -5: g = 5, k_step = 2, n_step = 3
        let fam = solve_linear(&big("-10"), &big("15"), &big("-5"))
            .unwrap()
            .unwrap();
        assert_eq!(
            (fam.n_step.clone(), fam.k_step.clone()),
            (big("3"), big("2"))
        );
        assert!(fam.k0.abs() <= BigInt::one());
        assert!(fam.satisfies(
            &DiophEquation {
                a: big("-10"),
                b: big("15"),
                c: big("-5"),
                m: 1,
                sign: SignBranch::Plus,
                variant: RoundingVariant::ALL[0]
            },
            &[-10, 0, 10]
        ));
    }

    #[test]
    fn degenerate_and_domain_errors() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(matches!(
            derive_attack_reals(&Real::zero(), &Real::zero(), &ctx),
            Err(Error::Degenerate(_))
        ));
        let forced = derive_attack_reals_forced(&Real::zero(), &Real::zero(), &ctx).unwrap();
        assert_eq!(forced.d, Real::one());
        assert_eq!(forced.e, Real::from(4));
        assert!(matches!(
            derive_attack_reals(&Real::one(), &Real::zero(), &ctx),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derive_attack_reals(&r("0.3"), &r("1.5"), &ctx),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn small_synthetic_scan_matches_exhaustive_oracle() {
        let ctx = PrecisionContext::new(30).unwrap();
        let x = r("0.3");
        let secret = BigInt::from(1009);
        let tr = crate::chebyshev::t_cos_eval(&secret, &x, &ctx).unwrap();
        let reals = derive_attack_reals(&x, &tr, &ctx).unwrap();
        let (eq, fam) = first_solvable(&reals, 6);
        let (lo, hi) = (BigInt::from(100), BigInt::from(100_000));
        let scan = scan_family(
            &fam,
            &lo,
            &hi,
            &x,
            &tr,
            &ScanMode::Oracle(secret.clone()),
            &ctx,
        )
        .unwrap();
        // Oracle: every n in range with a n + b k = c for some integer k.
        let mut expect = Vec::new();
        let mut n = lo.clone();
        while n <= hi {
            let rest = &eq.c - &eq.a * &n;
            if rest.is_multiple_of(&eq.b) {
                expect.push(n.clone());
            }
            n += 1;
        }
        let got: Vec<BigInt> = scan.reports.iter().map(|c| c.candidate_r.clone()).collect();
        assert_eq!(got, expect);
        for c in &scan.reports {
            assert_eq!(c.signed_diff, Some(&secret - &c.candidate_r));
        }
    }

    #[test]
    fn oracle_outside_window_never_verifies() {
        let ctx = PrecisionContext::new(30).unwrap();
        let x = r("0.3");
        let secret = BigInt::from(5_000_000);
        let tr = crate::chebyshev::t_cos_eval(&secret, &x, &ctx).unwrap();
        let reals = derive_attack_reals(&x, &tr, &ctx).unwrap();
        let (_, fam) = first_solvable(&reals, 4);
        let scan = scan_family(
            &fam,
            &BigInt::from(10),
            &BigInt::from(100_000),
            &x,
            &tr,
            &ScanMode::Oracle(secret),
            &ctx,
        )
        .unwrap();
        assert!(!scan.reports.is_empty());
        assert!(scan.reports.iter().all(|c| !c.verified));
        assert!(scan
            .reports
            .iter()
            .all(|c| !c.signed_diff.as_ref().unwrap().is_zero()));
    }

    #[test]
    fn inverted_range_is_rejected() {
        let fam = solve_linear(&big("-10"), &big("15"), &big("-5"))
            .unwrap()
            .unwrap();
        let ctx = PrecisionContext::new(20).unwrap();
        assert!(scan_family(
            &fam,
            &big("5"),
            &big("5"),
            &r("0.3"),
            &r("0.1"),
            &ScanMode::Attack,
            &ctx
        )
        .is_err());
    }

    #[test]
    fn verifier_accepts_only_the_secret() {
        let ctx = PrecisionContext::new(40).unwrap();
        let x = r("0.5434908208304983248023984");
        let secret = BigInt::from(526556641);
        let tr = crate::chebyshev::t_cos_eval(&secret, &x, &ctx).unwrap();
        let v = Verifier::new(&x, &tr, &ctx, &secret).unwrap();
        assert!(v.check(&secret).unwrap().1);
        assert!(!v.check(&(&secret + 1)).unwrap().1);
        assert!(!v.check(&BigInt::from(122879389)).unwrap().1);
        assert_eq!(v.tolerance_digits(), 20);
    }

    #[test]
    fn attack_constants_recover_the_secret_identity() {
        let ctx = PrecisionContext::new(50).unwrap();
        let x = r("0.5434908208304983248023984");
        let secret = BigInt::from(342683123012u64);
        let tr = crate::chebyshev::t_cos_eval(&secret, &x, &ctx).unwrap();
        let reals = derive_attack_reals(&x, &tr, &ctx).unwrap();
        // r = -d + k e for k = 54332797693
        let k = BigInt::from(54332797693u64);
        let back = &(-&reals.d) + &(&reals.e * &k);
        assert!(agrees_to(&back, &Real::from(&secret), 30));
    }

    proptest! {
        #[test]
        fn bezout_identity(a in any::<i128>(), b in any::<i128>()) {
            prop_assume!(a != 0 || b != 0);
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let (g, u, v) = ext_gcd(&a, &b).unwrap();
            prop_assert!(g.is_positive());
            prop_assert_eq!(&a * &u + &b * &v, g.clone());
            prop_assert!(a.is_multiple_of(&g) && b.is_multiple_of(&g));
        }

        #[test]
        fn family_contains_unit_pair(a in 1i64..1000, b in 1i64..1000) {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let c = &a + &b;
            let fam = solve_linear(&a, &b, &c).unwrap().expect("c = a + b is always solvable");
            prop_assert!(fam.index_of(&BigInt::one(), &BigInt::one()).is_some());
            for z in [-10i64, 0, 10] {
                let (n, k) = fam.at(&BigInt::from(z));
                prop_assert_eq!(&a * n + &b * k, c.clone());
            }
        }
    }
}
