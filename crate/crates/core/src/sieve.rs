//! Brute-force sieves over `k`: is `±d + k e` within a tolerance of an integer?
//!
//! Two kernels walk the same recurrence `acc <- acc + e`. The decimal kernel
//! carries the full value `±d + k e` as an exact decimal with a whole and a
//! fractional part; the modular kernel carries only the scaled fractional part
//! `k ei mod M` in a machine word. Both test the same circular window around
//! `∓frac(d)`.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::diophantine::{AttackReals, SignBranch, Verifier};
use crate::error::{Error, Result};
use crate::precision::{decimal_length, pow10, PrecisionContext, Real};

/// Steps between direct re-computations of the accumulator.
pub const REANCHOR_PERIOD: u64 = 1_000_000;

/// Runs shorter than this are reported but not trusted as a speed comparison.
pub const MEASUREMENT_THRESHOLD: Duration = Duration::from_millis(10);

/// Every `k` whose `±d + k e` can land in `[r_lo, r_hi]`, for either sign.
pub fn k_range_for_r_range(
    r_lo: &BigInt,
    r_hi: &BigInt,
    reals: &AttackReals,
) -> Result<(BigInt, BigInt)> {
    if r_lo >= r_hi {
        return Err(Error::Parameter(format!(
            "empty secret range [{r_lo}, {r_hi}]"
        )));
    }
    let ctx = &reals.ctx;
    let lo = (&Real::from(r_lo) - &reals.d.abs())
        .div(&reals.e, ctx)?
        .floor();
    let hi = (&Real::from(r_hi) + &reals.d.abs())
        .div(&reals.e, ctx)?
        .ceil();
    Ok((lo.max(BigInt::zero()), hi))
}

#[derive(Clone, Debug)]
pub struct FloatSieveConfig {
    pub d: Real,
    pub e: Real,
    pub k_lo: BigInt,
    pub k_hi: BigInt,
    pub match_digits: u64,
    pub ctx: PrecisionContext,
}

impl FloatSieveConfig {
    pub fn new(
        d: Real,
        e: Real,
        k_lo: BigInt,
        k_hi: BigInt,
        match_digits: u64,
        ctx: PrecisionContext,
    ) -> Result<Self> {
        let cfg = FloatSieveConfig {
            d,
            e,
            k_lo,
            k_hi,
            match_digits,
            ctx,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_k_range(&self.k_lo, &self.k_hi)?;
        if self.match_digits < 4 {
            return Err(Error::Parameter(format!(
                "match_digits must be at least 4, got {}",
                self.match_digits
            )));
        }
        let required = self.match_digits + decimal_length(&self.k_hi) + 10;
        if self.ctx.digits() < required {
            return Err(Error::Precision {
                required,
                available: self.ctx.digits(),
            });
        }
        if self.e <= Real::zero() {
            return Err(Error::Parameter(format!(
                "sieve step must be positive, got {}",
                self.e
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> u64 {
        range_width(&self.k_lo, &self.k_hi)
    }
}

fn validate_k_range(k_lo: &BigInt, k_hi: &BigInt) -> Result<()> {
    if k_lo >= k_hi || k_lo.is_negative() {
        return Err(Error::Parameter(format!(
            "invalid k range [{k_lo}, {k_hi}]"
        )));
    }
    if (k_hi - k_lo).to_u64().is_none() {
        return Err(Error::Parameter(format!(
            "k range [{k_lo}, {k_hi}] is too wide to sieve"
        )));
    }
    Ok(())
}

fn range_width(k_lo: &BigInt, k_hi: &BigInt) -> u64 {
    (k_hi - k_lo)
        .to_u64()
        .map_or(u64::MAX, |w| w.saturating_add(1))
}

/// Modular form: `di = [frac(d) M]`, `ei = [frac(e) M]`, hit iff
/// `(±di + k ei) mod M < comp` or `M - (±di + k ei) mod M < comp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSieveConfig {
    pub di: BigInt,
    pub ei: BigInt,
    pub modulus: BigInt,
    pub comp: BigInt,
    pub k_lo: BigInt,
    pub k_hi: BigInt,
    /// `floor(d)` and `floor(e)`, needed only to report `r` for a hit.
    pub d_whole: BigInt,
    pub e_whole: BigInt,
}

impl IntSieveConfig {
    /// Scale the fractional parts of `reals` by `M = 10^m`.
    pub fn from_reals(
        reals: &AttackReals,
        m: u32,
        comp: BigInt,
        k_lo: BigInt,
        k_hi: BigInt,
    ) -> Result<Self> {
        let cfg = IntSieveConfig {
            di: reals.d.frac_part().floor_scaled(m),
            ei: reals.e.frac_part().floor_scaled(m),
            modulus: pow10(m as u64),
            comp,
            k_lo,
            k_hi,
            d_whole: reals.d.floor(),
            e_whole: reals.e.floor(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The modular sieve with the same relative threshold as `float`:
    /// `comp / M = 10^-match_digits`.
    pub fn equivalent_to(float: &FloatSieveConfig, m: u32) -> Result<Self> {
        if (m as u64) <= float.match_digits {
            return Err(Error::Parameter(format!(
                "modulus 10^{m} cannot express a {}-digit match",
                float.match_digits
            )));
        }
        let reals = AttackReals {
            d: float.d.clone(),
            e: float.e.clone(),
            ctx: float.ctx,
        };
        let comp = pow10(m as u64 - float.match_digits);
        Self::from_reals(&reals, m, comp, float.k_lo.clone(), float.k_hi.clone())
    }

    /// `comp = 0` is accepted and matches nothing.
    pub fn validate(&self) -> Result<()> {
        validate_k_range(&self.k_lo, &self.k_hi)?;
        if !self.modulus.is_positive() {
            return Err(Error::Parameter(format!(
                "modulus must be positive, got {}",
                self.modulus
            )));
        }
        let in_range = |v: &BigInt| !v.is_negative() && *v < self.modulus;
        if !in_range(&self.di) || !in_range(&self.ei) || !in_range(&self.comp) {
            return Err(Error::Parameter(format!(
                "di, ei and comp must lie in [0, {})",
                self.modulus
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> u64 {
        range_width(&self.k_lo, &self.k_hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveHit {
    pub k: BigInt,
    pub sign: SignBranch,
    /// `round(±d + k e)`.
    pub r_candidate: BigInt,
    /// `(±d + k e) - r_candidate`.
    pub residual: Real,
    pub verified: bool,
}

/// Residues `s` (mod `one`) with circular distance to `centre` below `thr`,
/// which is exactly `(s - centre) mod one < thr || one - (s - centre) mod one < thr`.
#[derive(Clone, Debug)]
enum Window {
    Empty,
    Arc {
        lo: BigInt,
        hi: BigInt,
    },
    Literal {
        centre: BigInt,
        thr: BigInt,
        one: BigInt,
    },
}

impl Window {
    fn around(centre: &BigInt, thr: &BigInt, one: &BigInt) -> Window {
        if !thr.is_positive() {
            Window::Empty
        } else if thr * 2u32 < *one {
            Window::Arc {
                lo: (centre - thr).mod_floor(one),
                hi: (centre + thr).mod_floor(one),
            }
        } else {
            Window::Literal {
                centre: centre.clone(),
                thr: thr.clone(),
                one: one.clone(),
            }
        }
    }

    fn contains(&self, s: &BigInt) -> bool {
        match self {
            Window::Empty => false,
            Window::Arc { lo, hi } if lo < hi => s > lo && s < hi,
            Window::Arc { lo, hi } => s > lo || s < hi,
            Window::Literal { centre, thr, one } => {
                let t = (s - centre).mod_floor(one);
                t < *thr || one - &t < *thr
            }
        }
    }
}

/// The window centre for each branch: `s + frac(d)` or `s - frac(d)` is
/// near an integer exactly when `s` is near `-frac(d)` or `+frac(d)`.
fn centre(branch: SignBranch, d_frac: &BigInt, one: &BigInt) -> BigInt {
    match branch {
        SignBranch::Plus => (one - d_frac).mod_floor(one),
        SignBranch::Minus => d_frac.clone(),
    }
}

/// Split `[k_lo, k_lo + width)` into at most `chunks` consecutive pieces.
fn chunk_bounds(width: u64, chunks: usize) -> Vec<(u64, u64)> {
    let chunks = (chunks.max(1) as u64).min(width.max(1));
    let len = width.div_ceil(chunks);
    (0..chunks)
        .map(|i| (i * len, ((i + 1) * len).min(width)))
        .filter(|(a, b)| a < b)
        .collect()
}

struct DecimalKernel {
    one: BigInt,
    d_scaled: BigInt,
    e_scaled: BigInt,
    e_whole: BigInt,
    e_frac: BigInt,
    windows: Vec<(SignBranch, Window)>,
    scale: u64,
}

impl DecimalKernel {
    fn new(cfg: &FloatSieveConfig) -> Self {
        let d = cfg.ctx.round(&cfg.d);
        let e = cfg.ctx.round(&cfg.e);
        let scale = d.frac_digits().max(e.frac_digits());
        let one = pow10(scale);
        let d_scaled = d.scaled_floor(scale as i64);
        let e_scaled = e.scaled_floor(scale as i64);
        let (e_whole, e_frac) = e_scaled.div_mod_floor(&one);
        let d_frac = d_scaled.mod_floor(&one);
        let thr = if cfg.match_digits <= scale {
            pow10(scale - cfg.match_digits)
        } else {
            BigInt::zero()
        };
        let windows = SignBranch::BOTH
            .iter()
            .map(|&b| (b, Window::around(&centre(b, &d_frac, &one), &thr, &one)))
            .collect();
        DecimalKernel {
            one,
            d_scaled,
            e_scaled,
            e_whole,
            e_frac,
            windows,
            scale,
        }
    }

    /// `k e` split into whole and fractional parts, by direct multiplication.
    fn anchor(&self, k: &BigInt) -> (BigInt, BigInt) {
        (k * &self.e_scaled).div_mod_floor(&self.one)
    }

    fn run(&self, k0: &BigInt, count: u64) -> Vec<SieveHit> {
        let mut hits = Vec::new();
        let (mut whole, mut frac) = self.anchor(k0);
        for off in 0..count {
            if off > 0 {
                if off % REANCHOR_PERIOD == 0 {
                    (whole, frac) = self.anchor(&(k0 + off));
                } else {
                    frac += &self.e_frac;
                    if frac >= self.one {
                        frac -= &self.one;
                        whole += 1u32;
                    }
                    whole += &self.e_whole;
                }
            }
            for (branch, window) in &self.windows {
                if window.contains(&frac) {
                    let value = &whole * &self.one + &frac + branch_sign(*branch) * &self.d_scaled;
                    hits.push(self.hit(k0 + off, *branch, value));
                }
            }
        }
        hits
    }

    fn hit(&self, k: BigInt, sign: SignBranch, value: BigInt) -> SieveHit {
        let half = &self.one / 2u32;
        let r_candidate = (&value + half).div_floor(&self.one);
        let rest = value - &r_candidate * &self.one;
        SieveHit {
            k,
            sign,
            r_candidate,
            residual: Real::from_scaled(rest, self.scale),
            verified: false,
        }
    }
}

fn branch_sign(b: SignBranch) -> i32 {
    match b {
        SignBranch::Plus => 1,
        SignBranch::Minus => -1,
    }
}

/// Decimal sieve over `[k_lo, k_hi]` in one chunk per worker thread.
pub fn float_sieve(cfg: &FloatSieveConfig) -> Result<Vec<SieveHit>> {
    float_sieve_chunked(cfg, rayon::current_num_threads())
}

/// Decimal sieve with an explicit chunk count; the result does not depend on it.
pub fn float_sieve_chunked(cfg: &FloatSieveConfig, chunks: usize) -> Result<Vec<SieveHit>> {
    cfg.validate()?;
    let kernel = DecimalKernel::new(cfg);
    let parts: Vec<Vec<SieveHit>> = chunk_bounds(cfg.width(), chunks)
        .into_par_iter()
        .map(|(a, b)| kernel.run(&(&cfg.k_lo + a), b - a))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

enum ModularKernel {
    Word {
        ei: u128,
        m: u128,
        comp: u128,
        centres: [(SignBranch, u128); 2],
    },
    Big {
        ei: BigInt,
        m: BigInt,
        windows: Vec<(SignBranch, Window)>,
    },
}

impl ModularKernel {
    fn new(cfg: &IntSieveConfig) -> Self {
        let m = &cfg.modulus;
        let word = |v: &BigInt| v.to_u128();
        let fits = m.bits() < 127;
        let centres = SignBranch::BOTH.map(|b| (b, centre(b, &cfg.di, m)));
        if let (true, Some(ei), Some(mw), Some(comp)) =
            (fits, word(&cfg.ei), word(m), word(&cfg.comp))
        {
            let centres = centres.map(|(b, c)| (b, word(&c).unwrap_or(0)));
            ModularKernel::Word {
                ei,
                m: mw,
                comp,
                centres,
            }
        } else {
            let windows = centres
                .iter()
                .map(|(b, c)| (*b, Window::around(c, &cfg.comp, m)))
                .collect();
            ModularKernel::Big {
                ei: cfg.ei.clone(),
                m: m.clone(),
                windows,
            }
        }
    }

    fn run(&self, k0: &BigInt, count: u64) -> Vec<(u64, SignBranch)> {
        let mut out = Vec::new();
        match self {
            ModularKernel::Word {
                ei,
                m,
                comp,
                centres,
            } => {
                let (ei, m, comp) = (*ei, *m, *comp);
                let start = (k0 * BigInt::from(ei)).mod_floor(&BigInt::from(m));
                let mut t = start.to_u128().unwrap_or(0);
                for off in 0..count {
                    for &(branch, c) in centres {
                        let s = if t >= c { t - c } else { t + m - c };
                        if s < comp || m - s < comp {
                            out.push((off, branch));
                        }
                    }
                    t += ei;
                    if t >= m {
                        t -= m;
                    }
                }
            }
            ModularKernel::Big { ei, m, windows } => {
                let mut t = (k0 * ei).mod_floor(m);
                for off in 0..count {
                    for (branch, w) in windows {
                        if w.contains(&t) {
                            out.push((off, *branch));
                        }
                    }
                    t += ei;
                    if t >= *m {
                        t -= m;
                    }
                }
            }
        }
        out
    }
}

/// Modular sieve in one chunk per worker thread.
pub fn int_sieve(cfg: &IntSieveConfig) -> Result<Vec<SieveHit>> {
    int_sieve_chunked(cfg, rayon::current_num_threads())
}

pub fn int_sieve_chunked(cfg: &IntSieveConfig, chunks: usize) -> Result<Vec<SieveHit>> {
    cfg.validate()?;
    let kernel = ModularKernel::new(cfg);
    let parts: Vec<Vec<(u64, SignBranch)>> = chunk_bounds(cfg.width(), chunks)
        .into_par_iter()
        .map(|(a, b)| {
            kernel
                .run(&(&cfg.k_lo + a), b - a)
                .into_iter()
                .map(|(o, s)| (o + a, s))
                .collect()
        })
        .collect();
    let d_scaled = &cfg.d_whole * &cfg.modulus + &cfg.di;
    let e_scaled = &cfg.e_whole * &cfg.modulus + &cfg.ei;
    parts
        .into_iter()
        .flatten()
        .map(|(off, sign)| {
            let k = &cfg.k_lo + off;
            let value = &k * &e_scaled + branch_sign(sign) * &d_scaled;
            let half = &cfg.modulus / 2u32;
            let r_candidate = (&value + half).div_floor(&cfg.modulus);
            let rest = value - &r_candidate * &cfg.modulus;
            let residual = scaled_residual(&rest, &cfg.modulus)?;
            Ok(SieveHit {
                k,
                sign,
                r_candidate,
                residual,
                verified: false,
            })
        })
        .collect()
}

/// `rest / modulus`, exact when the modulus is a power of ten.
fn scaled_residual(rest: &BigInt, modulus: &BigInt) -> Result<Real> {
    let len = decimal_length(modulus);
    if *modulus == pow10(len - 1) {
        return Ok(Real::from_scaled(rest.clone(), len - 1));
    }
    let ctx = PrecisionContext::new(len.max(20))?;
    Real::from(rest).div(&Real::from(modulus), &ctx)
}

/// Set each hit's `verified` flag against the public value.
pub fn verify_hits(
    hits: &[SieveHit],
    x: &Real,
    tr: &Real,
    ctx: &PrecisionContext,
) -> Result<Vec<SieveHit>> {
    let Some(bound) = hits.iter().map(|h| h.r_candidate.abs()).max() else {
        return Ok(Vec::new());
    };
    let verifier = Verifier::new(x, tr, ctx, &bound)?;
    hits.iter()
        .map(|h| {
            let verified = !h.r_candidate.is_negative() && verifier.check(&h.r_candidate)?.1;
            Ok(SieveHit {
                verified,
                ..h.clone()
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct VariantTiming {
    pub variant: &'static str,
    pub k_lo: BigInt,
    pub k_hi: BigInt,
    pub hits: usize,
    pub elapsed: Duration,
}

impl VariantTiming {
    /// Values of `k` per second.
    pub fn throughput(&self) -> f64 {
        let width = range_width(&self.k_lo, &self.k_hi) as f64;
        width / self.elapsed.as_secs_f64().max(1e-9)
    }
}

impl fmt::Display for VariantTiming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "variant={} k_lo={} k_hi={} hits={} elapsed_ms={:.3} k_per_sec={:.0}",
            self.variant,
            self.k_lo,
            self.k_hi,
            self.hits,
            self.elapsed.as_secs_f64() * 1e3,
            self.throughput()
        )
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub float: VariantTiming,
    pub int: VariantTiming,
    pub hits: Vec<SieveHit>,
}

impl BenchReport {
    /// Float time over integer time.
    pub fn ratio(&self) -> f64 {
        self.float.elapsed.as_secs_f64() / self.int.elapsed.as_secs_f64().max(1e-9)
    }

    pub fn below_threshold(&self) -> bool {
        self.float.elapsed < MEASUREMENT_THRESHOLD || self.int.elapsed < MEASUREMENT_THRESHOLD
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.float)?;
        writeln!(f, "{}", self.int)?;
        write!(f, "ratio={:.2}", self.ratio())?;
        if self.below_threshold() {
            write!(f, " below_measurement_threshold=true")?;
        }
        Ok(())
    }
}

/// Time both kernels over the same range and insist on identical hit sets.
pub fn sieve_benchmark(
    float_cfg: &FloatSieveConfig,
    int_cfg: &IntSieveConfig,
    chunks: usize,
) -> Result<BenchReport> {
    if float_cfg.k_lo != int_cfg.k_lo || float_cfg.k_hi != int_cfg.k_hi {
        return Err(Error::Parameter(
            "benchmark variants must cover the same k range".into(),
        ));
    }
    let t0 = Instant::now();
    let fh = float_sieve_chunked(float_cfg, chunks)?;
    let float_elapsed = t0.elapsed();
    let t1 = Instant::now();
    let ih = int_sieve_chunked(int_cfg, chunks)?;
    let int_elapsed = t1.elapsed();
    let key = |h: &SieveHit| (h.k.clone(), h.sign);
    let fk: Vec<_> = fh.iter().map(key).collect();
    let ik: Vec<_> = ih.iter().map(key).collect();
    if fk != ik {
        return Err(Error::Internal(format!(
            "sieve variants disagree: float found {} hits, integer found {}",
            fk.len(),
            ik.len()
        )));
    }
    let timing = |variant, hits, elapsed| VariantTiming {
        variant,
        k_lo: float_cfg.k_lo.clone(),
        k_hi: float_cfg.k_hi.clone(),
        hits,
        elapsed,
    };
    Ok(BenchReport {
        float: timing("float", fh.len(), float_elapsed),
        int: timing("int", ih.len(), int_elapsed),
        hits: fh,
    })
}

/// Projected cost of a full sieve for secrets of `r_digits` digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostEstimate {
    pub log10_steps: f64,
    pub log10_seconds: f64,
    pub log10_years: f64,
}

/// Extrapolate from a measured throughput under the `O(r n)` model: the number
/// of `k` grows like `r / e`, the cost per step linearly with the digit count
/// `n = 2 r_digits` the sieve must carry.
pub fn extrapolate_cost(
    measured_k_per_sec: f64,
    measured_digits: u64,
    r_digits: u64,
    e: f64,
) -> CostEstimate {
    let log10_steps = r_digits as f64 - e.log10();
    let per_step = (2 * r_digits) as f64 / measured_digits.max(1) as f64;
    let log10_seconds = log10_steps + per_step.log10() - measured_k_per_sec.log10();
    let log10_years = log10_seconds - (365.25f64 * 86400.0).log10();
    CostEstimate {
        log10_steps,
        log10_seconds,
        log10_years,
    }
}
