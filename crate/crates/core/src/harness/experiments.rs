use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::report::{Outcome, RunReport, Table};
use super::{Experiment, ExperimentSpec, Named, Task};
use crate::chebyshev::{kex_keygen, t_cos_eval, KexInstance, KexParams};
use crate::contfrac::{cf_candidates, cf_expand, cf_verify, CfCandidate, CF_MAX_TERMS};
use crate::diophantine::{
    derive_attack_reals, enumerate_equations, ext_gcd, primary_equation, scan_family,
    solve_diophantine, AttackReals, FamilyScan, ScanMode, SignBranch,
};
use crate::error::{Error, Result};
use crate::precision::{agreeing_digits, decimal_length, pow10, PrecisionContext, Real};
use crate::sieve::{
    extrapolate_cost, float_sieve_chunked, int_sieve_chunked, k_range_for_r_range, sieve_benchmark,
    verify_hits, FloatSieveConfig, IntSieveConfig, SieveHit,
};

/// Published values the named experiments are compared against.
pub(crate) mod reference {
    pub const X: &str = "0.5434908208304983248023984";

    pub const R3: u64 = 342683123012;
    pub const TR3: &str = "0.7403861482024649794710508003339062035627295103915700058583940113150512830650614599318710233011943378";
    pub const D3: &str = "0.7399589702230696668974423956292088018849049232806902945699381246912302384626566753074188492306315011";
    pub const E3: &str = "6.307113521910353488452805074053219201594725596341746710710479708456892071359128166852644030941847249";
    pub const EQUATION3: &str = "-n*1000000000 + k*6307113521 = -739958970";
    pub const BEZOUT3: (i64, i64) = (326428881, -2058824009);
    pub const PAIR3: (&str, &str) = ("-1523445293110910730", "-241543978563012570");
    pub const SCAN_LO: u64 = 100_000_000_000;
    pub const SCAN_HI: u64 = 1_000_000_000_000;
    pub const WIDTH3: usize = 143;
    /// (candidate, r - candidate, r / candidate)
    pub const BEST_BELOW3: (u64, i64, &str) = (337033145942, 5649977070, "1.016763862");
    pub const BEST_ABOVE3: (u64, i64, &str) = (343340259463, -657136451, "0.9980860489");

    pub const CF_PAIR: (u64, u64) = (467330149284, 74095725035);
    pub const R3B: u64 = 742683555011;
    pub const D3B: &str = "0.6952848506280095966573614222543226005342836351572384895234419570862294723430015348764036691302557555";
    /// (secret, p, q, estimate, r - estimate, (r - estimate) / r)
    pub const CF_ROWS: [(u64, u64, u64, &str, &str, &str); 3] = [
        (
            R3,
            467330149284,
            74095725035,
            "345805136018.3821",
            "-3122013006.382058",
            "-0.009110495372346459",
        ),
        (
            R3B,
            884248097465,
            140198538427,
            "614804306364.0542",
            "127879248646.9458",
            "0.1721853779905653",
        ),
        (
            R3B,
            2771863706161,
            439482133393,
            "1927234842899.352",
            "-1184551287888.352",
            "-1.594960976173503",
        ),
    ];

    pub const R5: u64 = 526556641;
    pub const D5: &str = "2.828536898289298870761221685646344096466";
    pub const E5: &str = "6.307113521910353488452805074053219201595";
    pub const K_RANGE5: (u64, u64) = (15855112, 158551135);
    pub const HITS5: [(u64, u64); 3] = [
        (19482666, 122879389),
        (51484409, 324718015),
        (83486152, 526556641),
    ];
    pub const DI5: &str = "828536898289298870761";
    pub const EI5: &str = "307113521910353488452";
    pub const M5: u32 = 21;
    pub const COMP5: &str = "100000000000";
}

use reference as refv;

/// Digits of the key exchange and attack reals in the larger reproductions.
const DIGITS_SEC3: u64 = 150;
/// Attack precision of the sieve reproductions.
const DIGITS_SEC5: u64 = 40;
/// The public value is generated with more digits than the attack consumes.
const DIGITS_SEC5_GEN: u64 = 60;

pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunReport> {
    let mut report = RunReport::new(&spec.experiment.name());
    match spec.experiment {
        Experiment::Named(Named::Sec3Diophantine) => sec3_diophantine(&mut report)?,
        Experiment::Named(Named::Sec3Contfrac) => sec3_contfrac(&mut report)?,
        Experiment::Named(Named::Sec5FloatSieve) => sec5_float(&mut report, spec)?,
        Experiment::Named(Named::Sec5IntSieve) => sec5_int(&mut report, spec)?,
        Experiment::Named(Named::KexDemo) => kex_demo(&mut report, spec)?,
        Experiment::Custom(task) => custom(&mut report, spec, task)?,
    }
    Ok(report)
}

fn dec(s: &str) -> Real {
    s.parse().expect("reference decimal")
}

fn int(s: &str) -> BigInt {
    s.parse().expect("reference integer")
}

/// Agreement on every printed digit but the last: `|got - printed| < 10^-(n-1)`
/// for `n` printed fractional digits.
fn printed_matches(got: &Real, printed: &str) -> bool {
    let p = dec(printed);
    let n = p.frac_digits();
    let tol = Real::from_scaled(BigInt::one(), n.saturating_sub(1));
    (got - &p).abs() < tol
}

fn check_printed(report: &mut RunReport, name: &str, got: &Real, printed: &str) {
    let p = dec(printed);
    let shown = got.round_frac(p.frac_digits());
    report.check(name, printed, shown, printed_matches(got, printed));
}

fn check_eq<T: PartialEq + ToString>(report: &mut RunReport, name: &str, expected: T, got: T) {
    let pass = expected == got;
    report.check(name, expected.to_string(), got.to_string(), pass);
}

fn reals_values(report: &mut RunReport, tr: &Real, reals: &AttackReals) {
    report.value("tr", tr);
    report.value("d", &reals.d);
    report.value("e", &reals.e);
}

fn sec3_instance(r: u64, ctx: &PrecisionContext) -> Result<(Real, Real, AttackReals)> {
    let x = dec(refv::X);
    let tr = t_cos_eval(&BigInt::from(r), &x, ctx)?;
    let reals = derive_attack_reals(&x, &tr, ctx)?;
    Ok((x, tr, reals))
}

fn sec3_diophantine(report: &mut RunReport) -> Result<()> {
    let started = Instant::now();
    let ctx = PrecisionContext::new(DIGITS_SEC3)?;
    let m = 9;
    let secret = BigInt::from(refv::R3);
    let (lo, hi) = (BigInt::from(refv::SCAN_LO), BigInt::from(refv::SCAN_HI));
    report.param("digits", DIGITS_SEC3);
    report.param("x", refv::X);
    report.param("r", &secret);
    report.param("m", m);
    report.param("r_range", format!("{lo}:{hi}"));
    report.param("mode", "oracle");

    let (x, tr, reals) = sec3_instance(refv::R3, &ctx)?;
    reals_values(report, &tr, &reals);
    check_printed(report, "tr", &tr, refv::TR3);
    check_printed(report, "d", &reals.d, refv::D3);
    check_printed(report, "e", &reals.e, refv::E3);

    report.table(equation_table(&reals, m)?);

    let eq = primary_equation(&reals, m);
    report.value("equation", &eq);
    check_eq(
        report,
        "equation",
        refv::EQUATION3.to_string(),
        eq.to_string(),
    );
    let (g, u, v) = ext_gcd(&eq.b, &(-&eq.a))?;
    report.value("bezout", format!("{v}*{} + {u}*{} = {g}", -&eq.a, eq.b));
    check_eq(report, "gcd", BigInt::one(), g);
    check_eq(
        report,
        "bezout coefficients",
        format!("{} {}", refv::BEZOUT3.0, refv::BEZOUT3.1),
        format!("{u} {v}"),
    );
    let fam = solve_diophantine(&eq)?
        .ok_or_else(|| Error::Internal("published equation reported unsolvable".into()))?;
    report.value(
        "family",
        format!(
            "n(z) = {} + {}*z, k(z) = {} + {}*z",
            fam.n0, fam.n_step, fam.k0, fam.k_step
        ),
    );
    let (pn, pk) = (int(refv::PAIR3.0), int(refv::PAIR3.1));
    let satisfies = &eq.a * &pn + &eq.b * &pk == eq.c;
    let member = fam.index_of(&pn, &pk);
    report.check(
        "published particular solution",
        "satisfies the equation and lies on the family",
        match &member {
            Some(z) if satisfies => format!("member at z = {z}"),
            _ => "not a member".to_string(),
        },
        satisfies && member.is_some(),
    );

    let scan = scan_family(
        &fam,
        &lo,
        &hi,
        &x,
        &tr,
        &ScanMode::Oracle(secret.clone()),
        &ctx,
    )?;
    report.value("z_window", format!("{} <= z <= {}", scan.z_lo, scan.z_hi));
    report.value("window_width", scan.width());
    check_eq(report, "window width", refv::WIDTH3, scan.width());
    report.table(scan_table(&scan, Some(&secret), &ctx)?);
    best_checks(report, &scan, &secret, &ctx)?;
    let verified = scan.verified().count();
    check_eq(report, "verified candidates", 0, verified);
    report.timing("elapsed", started.elapsed());
    report.finish(
        format!("verified candidates: {verified}; secret recovered: no"),
        Outcome::Reproduced,
    );
    Ok(())
}

fn best_checks(
    report: &mut RunReport,
    scan: &FamilyScan,
    secret: &BigInt,
    ctx: &PrecisionContext,
) -> Result<()> {
    for (label, best, (cand, diff, ratio)) in [
        ("best below", scan.best_below(secret), refv::BEST_BELOW3),
        ("best above", scan.best_above(secret), refv::BEST_ABOVE3),
    ] {
        let Some(best) = best else {
            report.check(label, cand, "none", false);
            continue;
        };
        let got_diff = secret - &best.candidate_r;
        let got_ratio = Real::from(secret).div(&Real::from(&best.candidate_r), ctx)?;
        report.value(
            label,
            format!(
                "{} diff {} ratio {}",
                best.candidate_r,
                got_diff,
                got_ratio.to_sig_string(10)
            ),
        );
        check_eq(report, label, BigInt::from(cand), best.candidate_r.clone());
        check_eq(
            report,
            &format!("{label} diff"),
            BigInt::from(diff),
            got_diff,
        );
        check_printed(report, &format!("{label} ratio"), &got_ratio, ratio);
    }
    Ok(())
}

fn equation_table(reals: &AttackReals, m: u32) -> Result<Table> {
    let mut t = Table::new(
        "equations",
        &["sign", "variant", "equation", "solvable", "k0/k_step"],
    );
    for eq in enumerate_equations(reals, m)? {
        let fam = solve_diophantine(&eq)?;
        t.push(vec![
            eq.sign.to_string(),
            eq.variant.to_string(),
            eq.to_string(),
            fam.is_some().to_string(),
            fam.map_or("-".into(), |f| format!("{:.6}", f.residue_fraction())),
        ]);
    }
    Ok(t)
}

fn scan_table(scan: &FamilyScan, secret: Option<&BigInt>, ctx: &PrecisionContext) -> Result<Table> {
    let mut cols = vec!["source", "candidate", "residual", "verified"];
    if secret.is_some() {
        cols.extend(["diff", "r/candidate"]);
    }
    let mut t = Table::new("scan", &cols);
    for c in &scan.reports {
        let mut row = vec![
            c.source.to_string(),
            c.candidate_r.to_string(),
            c.residual.to_sig_string(6),
            c.verified.to_string(),
        ];
        if let Some(r) = secret {
            row.push(c.signed_diff.clone().unwrap_or_default().to_string());
            let ratio = Real::from(r).div(&Real::from(&c.candidate_r), ctx)?;
            row.push(ratio.to_sig_string(10));
        }
        t.push(row);
    }
    Ok(t)
}

fn cf_table(
    name: &str,
    cands: &[CfCandidate],
    secret: Option<&BigInt>,
    ctx: &PrecisionContext,
) -> Result<Table> {
    let mut cols = vec![
        "branch",
        "iter",
        "j",
        "p",
        "q",
        "estimate",
        "candidate",
        "verified",
    ];
    if secret.is_some() {
        cols.extend(["dr", "dr/r", "r/r'"]);
    }
    let mut t = Table::new(name, &cols);
    for c in cands {
        let mut row = vec![
            c.branch.to_string(),
            c.approximant.index.to_string(),
            c.approximant.multiple.to_string(),
            c.approximant.p.to_string(),
            c.approximant.q.to_string(),
            c.estimate.to_fixed_string(4),
            c.candidate_r.to_string(),
            c.verified.to_string(),
        ];
        if let Some(r) = secret {
            row.push(c.dr(r).to_fixed_string(6));
            row.push(c.dr_over_r(r, ctx)?.to_sig_string(16));
            row.push(c.r_over_estimate(r, ctx)?.to_sig_string(16));
        }
        t.push(row);
    }
    Ok(t)
}

fn sec3_contfrac(report: &mut RunReport) -> Result<()> {
    let started = Instant::now();
    let ctx = PrecisionContext::new(DIGITS_SEC3)?;
    report.param("digits", DIGITS_SEC3);
    report.param("x", refv::X);
    report.param("r", format!("{} {}", refv::R3, refv::R3B));
    report.param(
        "r_range",
        format!(
            "{}:{} {}:{}",
            refv::SCAN_LO,
            refv::SCAN_HI,
            refv::SCAN_LO,
            10 * refv::SCAN_HI
        ),
    );
    report.param("mode", "oracle");
    report.param("estimate", "p*frac(d)");

    let (x, tr, reals) = sec3_instance(refv::R3, &ctx)?;
    let (_, tr_b, reals_b) = sec3_instance(refv::R3B, &ctx)?;
    reals_values(report, &tr, &reals);
    report.value("tr_b", &tr_b);
    report.value("d_b", &reals_b.d);
    check_printed(report, "e", &reals.e, refv::E3);
    check_printed(report, "d", &reals.d, refv::D3);
    check_printed(report, "d_b", &reals_b.d, refv::D3B);

    let cf = cf_expand(&reals.e, CF_MAX_TERMS, &ctx)?;
    report.value(
        "quotients",
        cf.quotients
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    let approximants = cf.approximants();
    let (pp, pq) = (BigInt::from(refv::CF_PAIR.0), BigInt::from(refv::CF_PAIR.1));
    let found = approximants.iter().find(|a| a.p == pp && a.q == pq);
    report.check(
        "published pair among approximants",
        format!("{pp}/{pq}"),
        match found {
            Some(a) if a.is_convergent(&cf) => format!("convergent {}", a.index),
            Some(a) => format!("intermediate i={} j={}", a.index, a.multiple),
            None => "absent".into(),
        },
        found.is_some(),
    );

    let mut verified = 0usize;
    let instances = [
        ("candidates_a", refv::R3, &tr, &reals.d, refv::SCAN_HI),
        (
            "candidates_b",
            refv::R3B,
            &tr_b,
            &reals_b.d,
            10 * refv::SCAN_HI,
        ),
    ];
    for (name, secret, tr_i, d_i, hi) in instances {
        let secret = BigInt::from(secret);
        let mut cands = cf_candidates(
            d_i,
            &reals.e,
            &BigInt::from(refv::SCAN_LO),
            &BigInt::from(hi),
            &ctx,
        )?;
        cf_verify(&mut cands, &x, tr_i, &ctx)?;
        verified += cands.iter().filter(|c| c.verified).count();
        for (r, p, q, est, dr, ratio) in refv::CF_ROWS {
            if r != secret.to_u64().unwrap_or(0) {
                continue;
            }
            let row = cands.iter().find(|c| {
                c.branch == SignBranch::Plus
                    && c.approximant.p == BigInt::from(p)
                    && c.approximant.q == BigInt::from(q)
            });
            let label = format!("p={p}");
            match row {
                Some(c) => {
                    check_printed(report, &format!("{label} estimate"), &c.estimate, est);
                    check_printed(report, &format!("{label} dr"), &c.dr(&secret), dr);
                    check_printed(
                        report,
                        &format!("{label} dr/r"),
                        &c.dr_over_r(&secret, &ctx)?,
                        ratio,
                    );
                }
                None => report.check(&format!("{label} estimate"), est, "absent", false),
            }
        }
        report.table(cf_table(name, &cands, Some(&secret), &ctx)?);
    }
    check_eq(report, "verified candidates", 0, verified);
    report.timing("elapsed", started.elapsed());
    report.finish(
        format!("verified candidates: {verified}; secret recovered: no"),
        Outcome::Reproduced,
    );
    Ok(())
}

/// The instance behind the sieve runs, generated wider than it is attacked.
fn sec5_instance(report: &mut RunReport) -> Result<(Real, Real, AttackReals, PrecisionContext)> {
    let x = dec(refv::X);
    let gen = PrecisionContext::new(DIGITS_SEC5_GEN)?;
    let ctx = PrecisionContext::new(DIGITS_SEC5)?;
    let tr = t_cos_eval(&BigInt::from(refv::R5), &x, &gen)?;
    let reals = derive_attack_reals(&x, &tr, &ctx)?;
    report.param("digits", DIGITS_SEC5);
    report.param("generation_digits", DIGITS_SEC5_GEN);
    report.param("x", refv::X);
    report.param("r", refv::R5);
    reals_values(report, &tr, &reals);
    check_printed(report, "d", &reals.d, refv::D5);
    check_printed(report, "e", &reals.e, refv::E5);
    Ok((x, tr, reals, ctx))
}

fn sec5_k_range(report: &mut RunReport, reals: &AttackReals) -> Result<(BigInt, BigInt)> {
    let (k_lo, k_hi) = k_range_for_r_range(&pow10(8), &pow10(9), reals)?;
    report.value("k_range", format!("{k_lo}:{k_hi}"));
    let near = |got: &BigInt, want: u64| (got - BigInt::from(want)).abs() <= BigInt::one();
    let (want_lo, want_hi) = refv::K_RANGE5;
    report.check(
        "k range (+-1)",
        format!("{want_lo}:{want_hi}"),
        format!("{k_lo}:{k_hi}"),
        near(&k_lo, want_lo) && near(&k_hi, want_hi),
    );
    Ok((k_lo, k_hi))
}

fn hit_table(hits: &[SieveHit]) -> Table {
    let mut t = Table::new(
        "hits",
        &["k", "sign", "r_candidate", "residual", "verified"],
    );
    for h in hits {
        t.push(vec![
            h.k.to_string(),
            h.sign.to_string(),
            h.r_candidate.to_string(),
            h.residual.to_sig_string(6),
            h.verified.to_string(),
        ]);
    }
    t
}

fn verified_check(report: &mut RunReport, hits: &[SieveHit]) -> usize {
    let verified: Vec<_> = hits.iter().filter(|h| h.verified).collect();
    let got = verified
        .iter()
        .map(|h| format!("k={} r={}", h.k, h.r_candidate))
        .collect::<Vec<_>>()
        .join(", ");
    let (k, r) = refv::HITS5[2];
    let pass = verified.len() == 1
        && verified[0].k == BigInt::from(k)
        && verified[0].r_candidate == BigInt::from(r);
    report.check("verified hits", format!("k={k} r={r}"), got, pass);
    verified.len()
}

fn hit_keys(hits: &[SieveHit]) -> String {
    let ks: BTreeSet<BigInt> = hits.iter().map(|h| h.k.clone()).collect();
    ks.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn sec5_float(report: &mut RunReport, spec: &ExperimentSpec) -> Result<()> {
    let (x, tr, reals, ctx) = sec5_instance(report)?;
    let match_digits = 9;
    report.param("match_digits", match_digits);
    let (k_lo, k_hi) = sec5_k_range(report, &reals)?;
    let cfg = FloatSieveConfig::new(
        reals.d.clone(),
        reals.e.clone(),
        k_lo,
        k_hi,
        match_digits,
        ctx,
    )?;
    let started = Instant::now();
    let hits = float_sieve_chunked(&cfg, chunks(spec))?;
    report.timing("float_sieve", started.elapsed());
    let hits = verify_hits(&hits, &x, &tr, &ctx)?;
    report.table(hit_table(&hits));

    // Distance of each published k from an integer, by direct multiplication.
    let mut near = Table::new("published_hits", &["k", "r", "residual", "within_match"]);
    let tol = Real::from_scaled(BigInt::one(), match_digits);
    for (k, _) in refv::HITS5 {
        let v = &reals.d + &(&reals.e * &BigInt::from(k));
        let r = v.round();
        let residual = &v - &Real::from(&r);
        near.push(vec![
            k.to_string(),
            r.to_string(),
            residual.to_sig_string(6),
            (residual.abs() < tol).to_string(),
        ]);
    }
    report.table(near);

    let expected = refv::HITS5
        .iter()
        .map(|(k, _)| k.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let got = hit_keys(&hits);
    report.check("hit set", &expected, &got, expected == got);
    let verified = verified_check(report, &hits);
    report.finish(
        format!("hits: {}; verified hits: {verified}", hits.len()),
        Outcome::Reproduced,
    );
    Ok(())
}

fn sec5_int(report: &mut RunReport, spec: &ExperimentSpec) -> Result<()> {
    let (x, tr, reals, ctx) = sec5_instance(report)?;
    let (k_lo, k_hi) = sec5_k_range(report, &reals)?;
    let cfg = IntSieveConfig::from_reals(&reals, refv::M5, int(refv::COMP5), k_lo, k_hi)?;
    report.value("di", &cfg.di);
    report.value("ei", &cfg.ei);
    report.value("M", &cfg.modulus);
    report.value("comp", &cfg.comp);
    check_eq(report, "di", int(refv::DI5), cfg.di.clone());
    check_eq(report, "ei", int(refv::EI5), cfg.ei.clone());
    check_eq(report, "M", pow10(refv::M5 as u64), cfg.modulus.clone());
    let started = Instant::now();
    let hits = int_sieve_chunked(&cfg, chunks(spec))?;
    report.timing("int_sieve", started.elapsed());
    let hits = verify_hits(&hits, &x, &tr, &ctx)?;
    report.table(hit_table(&hits));
    check_eq(
        report,
        "hit set",
        refv::HITS5[2].0.to_string(),
        hit_keys(&hits),
    );
    let verified = verified_check(report, &hits);
    report.finish(
        format!("hits: {}; verified hits: {verified}", hits.len()),
        Outcome::Reproduced,
    );
    Ok(())
}

fn chunks(spec: &ExperimentSpec) -> usize {
    spec.chunks
        .unwrap_or_else(rayon::current_num_threads)
        .max(1)
}

fn kex_demo(report: &mut RunReport, spec: &ExperimentSpec) -> Result<()> {
    let ctx = PrecisionContext::new(DIGITS_SEC3)?;
    let params = KexParams::new(dec(refv::X), pow10(12), pow10(13), ctx)?;
    let seed = spec.seed.unwrap_or(1);
    report.param("digits", DIGITS_SEC3);
    report.param("x", refv::X);
    report.param("r_range", format!("{}:{}", params.r_min(), params.r_max()));
    report.param("seed", seed);
    let alice = kex_keygen(&params, seed)?;
    let bob = kex_keygen(&params, seed.wrapping_add(1))?;
    exchange(report, &alice, &bob, spec.export_secrets)
}

fn exchange(
    report: &mut RunReport,
    alice: &KexInstance,
    bob: &KexInstance,
    export: bool,
) -> Result<()> {
    let ctx = alice.params().ctx();
    let mut t = Table::new("parties", &["party", "record"]);
    for (name, who) in [("alice", alice), ("bob", bob)] {
        let record = who
            .to_record(export)
            .to_string()
            .trim_end()
            .replace('\n', " ");
        t.push(vec![name.to_string(), record]);
    }
    report.table(t);
    let ka = alice.shared(bob.public())?;
    let kb = bob.shared(alice.public())?;
    report.value("shared_alice", &ka);
    report.value("shared_bob", &kb);
    let margin = decimal_length(alice.secret()).max(decimal_length(bob.secret())) + 10;
    let need = ctx.digits().saturating_sub(margin);
    let agree = agreeing_digits(&ka, &kb);
    report.value("agreeing_digits", agree.min(ctx.digits()));
    report.check(
        "shared secrets agree",
        format!(">= {need} digits"),
        agree.min(ctx.digits()),
        agree >= need,
    );
    report.finish(
        format!("shared secrets agree to {} digits", agree.min(ctx.digits())),
        Outcome::Reproduced,
    );
    Ok(())
}

struct CustomInput {
    ctx: PrecisionContext,
    x: Real,
    tr: Real,
    lo: BigInt,
    hi: BigInt,
    mode: ScanMode,
}

fn custom_input(report: &mut RunReport, spec: &ExperimentSpec) -> Result<CustomInput> {
    let need = |what: &str| Error::Usage(format!("missing {what}"));
    let digits = spec.digits.ok_or_else(|| need("--digits"))?;
    let ctx = PrecisionContext::new(digits)?;
    let x = spec.x.clone().ok_or_else(|| need("--x"))?;
    let tr = spec.tr.clone().ok_or_else(|| need("--tr"))?;
    let (lo, hi) = spec.r_range.clone().ok_or_else(|| need("--r-range"))?;
    report.param("digits", digits);
    report.param("x", &x);
    report.param("tr", &tr);
    report.param("r_range", format!("{lo}:{hi}"));
    let mode = match &spec.r {
        Some(r) => {
            report.param("mode", "oracle");
            report.param("r", r);
            ScanMode::Oracle(r.clone())
        }
        None => {
            report.param("mode", "attack");
            ScanMode::Attack
        }
    };
    Ok(CustomInput {
        ctx,
        x,
        tr,
        lo,
        hi,
        mode,
    })
}

fn attack_verdict(report: &mut RunReport, recovered: &BTreeSet<BigInt>) {
    let listed = recovered
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    if recovered.is_empty() {
        report.finish(
            "verified candidates: 0; secret recovered: no",
            Outcome::NoRecovery,
        );
    } else {
        report.finish(
            format!(
                "verified candidates: {}; secret recovered: yes ({listed})",
                recovered.len()
            ),
            Outcome::Recovered,
        );
    }
}

fn custom(report: &mut RunReport, spec: &ExperimentSpec, task: Task) -> Result<()> {
    if task == Task::Kex {
        return custom_kex(report, spec);
    }
    let inp = custom_input(report, spec)?;
    let started = Instant::now();
    let reals = derive_attack_reals(&inp.x, &inp.tr, &inp.ctx)?;
    reals_values(report, &inp.tr, &reals);
    let mut recovered = BTreeSet::new();
    match task {
        Task::Diophantine => {
            let m = spec.m.ok_or_else(|| Error::Usage("missing --m".into()))?;
            report.param("m", m);
            report.table(equation_table(&reals, m)?);
            let mut all = Table::new(
                "scans",
                &["sign", "variant", "z_lo", "z_hi", "width", "verified"],
            );
            for eq in enumerate_equations(&reals, m)? {
                let Some(fam) = solve_diophantine(&eq)? else {
                    continue;
                };
                let scan =
                    scan_family(&fam, &inp.lo, &inp.hi, &inp.x, &inp.tr, &inp.mode, &inp.ctx)?;
                recovered.extend(scan.verified().map(|c| c.candidate_r.clone()));
                all.push(vec![
                    eq.sign.to_string(),
                    eq.variant.to_string(),
                    scan.z_lo.to_string(),
                    scan.z_hi.to_string(),
                    scan.width().to_string(),
                    scan.verified().count().to_string(),
                ]);
            }
            report.table(all);
        }
        Task::ContFrac => {
            let mut cands = cf_candidates(&reals.d, &reals.e, &inp.lo, &inp.hi, &inp.ctx)?;
            cf_verify(&mut cands, &inp.x, &inp.tr, &inp.ctx)?;
            recovered.extend(
                cands
                    .iter()
                    .filter(|c| c.verified)
                    .map(|c| c.candidate_r.clone()),
            );
            report.table(cf_table("candidates", &cands, inp.mode.secret(), &inp.ctx)?);
        }
        Task::FloatSieve => {
            let match_digits = spec.match_digits.unwrap_or(9);
            report.param("match_digits", match_digits);
            let (k_lo, k_hi) = k_range_for_r_range(&inp.lo, &inp.hi, &reals)?;
            report.value("k_range", format!("{k_lo}:{k_hi}"));
            let cfg = FloatSieveConfig::new(
                reals.d.clone(),
                reals.e.clone(),
                k_lo,
                k_hi,
                match_digits,
                inp.ctx,
            )?;
            let t = Instant::now();
            let hits = float_sieve_chunked(&cfg, chunks(spec))?;
            report.timing("float_sieve", t.elapsed());
            let hits = in_range(
                verify_hits(&hits, &inp.x, &inp.tr, &inp.ctx)?,
                &inp.lo,
                &inp.hi,
            );
            recovered.extend(
                hits.iter()
                    .filter(|h| h.verified)
                    .map(|h| h.r_candidate.clone()),
            );
            report.table(hit_table(&hits));
        }
        Task::IntSieve => {
            let (k_lo, k_hi) = k_range_for_r_range(&inp.lo, &inp.hi, &reals)?;
            report.value("k_range", format!("{k_lo}:{k_hi}"));
            let comp = spec
                .comp
                .clone()
                .ok_or_else(|| Error::Usage("missing --comp".into()))?;
            let cfg = int_config(spec, &reals, comp, k_lo, k_hi)?;
            report.value("di", &cfg.di);
            report.value("ei", &cfg.ei);
            report.value("M", &cfg.modulus);
            report.value("comp", &cfg.comp);
            let t = Instant::now();
            let hits = int_sieve_chunked(&cfg, chunks(spec))?;
            report.timing("int_sieve", t.elapsed());
            let hits = in_range(
                verify_hits(&hits, &inp.x, &inp.tr, &inp.ctx)?,
                &inp.lo,
                &inp.hi,
            );
            recovered.extend(
                hits.iter()
                    .filter(|h| h.verified)
                    .map(|h| h.r_candidate.clone()),
            );
            report.table(hit_table(&hits));
        }
        Task::Bench => {
            let match_digits = spec.match_digits.unwrap_or(9);
            let m = spec.m.ok_or_else(|| Error::Usage("missing --m".into()))?;
            report.param("match_digits", match_digits);
            report.param("m", m);
            let (k_lo, k_hi) = k_range_for_r_range(&inp.lo, &inp.hi, &reals)?;
            let fcfg = FloatSieveConfig::new(
                reals.d.clone(),
                reals.e.clone(),
                k_lo,
                k_hi,
                match_digits,
                inp.ctx,
            )?;
            let icfg = IntSieveConfig::equivalent_to(&fcfg, m)?;
            let bench = sieve_benchmark(&fcfg, &icfg, chunks(spec))?;
            let mut t = Table::new("benchmark", &["variant", "k_lo", "k_hi", "hits"]);
            for v in [&bench.float, &bench.int] {
                t.push(vec![
                    v.variant.into(),
                    v.k_lo.to_string(),
                    v.k_hi.to_string(),
                    v.hits.to_string(),
                ]);
                report.timing(&format!("{}_sieve", v.variant), v.elapsed);
            }
            report.table(t);
            report.value("ratio", format!("{:.2}", bench.ratio()));
            report.value("below_measurement_threshold", bench.below_threshold());
            let e = reals.e.to_sig_string(15).parse::<f64>().unwrap_or(6.0);
            let cost = extrapolate_cost(bench.float.throughput(), inp.ctx.digits(), 100, e);
            report.value("extrapolated_r_digits", 100);
            report.value(
                "extrapolated_log10_steps",
                format!("{:.2}", cost.log10_steps),
            );
            report.value(
                "extrapolated_log10_years",
                format!("{:.2}", cost.log10_years),
            );
            let hits = in_range(
                verify_hits(&bench.hits, &inp.x, &inp.tr, &inp.ctx)?,
                &inp.lo,
                &inp.hi,
            );
            recovered.extend(
                hits.iter()
                    .filter(|h| h.verified)
                    .map(|h| h.r_candidate.clone()),
            );
            report.table(hit_table(&hits));
        }
        Task::Kex => unreachable!("handled above"),
    }
    report.timing("elapsed", started.elapsed());
    attack_verdict(report, &recovered);
    Ok(())
}

/// The sieve scans a k-range slightly wider than the secret range.
fn in_range(hits: Vec<SieveHit>, lo: &BigInt, hi: &BigInt) -> Vec<SieveHit> {
    hits.into_iter()
        .filter(|h| h.r_candidate >= *lo && h.r_candidate <= *hi)
        .collect()
}

fn int_config(
    spec: &ExperimentSpec,
    reals: &AttackReals,
    comp: BigInt,
    k_lo: BigInt,
    k_hi: BigInt,
) -> Result<IntSieveConfig> {
    if let Some(m) = spec.m {
        return IntSieveConfig::from_reals(reals, m, comp, k_lo, k_hi);
    }
    let modulus = spec
        .modulus
        .clone()
        .ok_or_else(|| Error::Usage("missing --m or --modulus".into()))?;
    let scale = |v: &Real| (&v.frac_part() * &Real::from(&modulus)).floor();
    let cfg = IntSieveConfig {
        di: scale(&reals.d),
        ei: scale(&reals.e),
        comp,
        k_lo,
        k_hi,
        d_whole: reals.d.floor(),
        e_whole: reals.e.floor(),
        modulus,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn custom_kex(report: &mut RunReport, spec: &ExperimentSpec) -> Result<()> {
    let need = |what: &str| Error::Usage(format!("missing {what}"));
    let digits = spec.digits.ok_or_else(|| need("--digits"))?;
    let x = spec.x.clone().ok_or_else(|| need("--x"))?;
    let (lo, hi) = spec.r_range.clone().ok_or_else(|| need("--r-range"))?;
    let ctx = PrecisionContext::new(digits)?;
    let params = KexParams::new(x.clone(), lo, hi, ctx)?;
    report.param("digits", digits);
    report.param("x", &x);
    report.param("r_range", format!("{}:{}", params.r_min(), params.r_max()));
    let seed = spec.seed.unwrap_or(0);
    report.param("seed", seed);
    let alice = match &spec.r {
        Some(r) => KexInstance::with_secret(params.clone(), r.clone())?,
        None => kex_keygen(&params, seed)?,
    };
    let bob = kex_keygen(&params, seed.wrapping_add(1))?;
    exchange(report, &alice, &bob, spec.export_secrets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::KEX_PRECISION_MARGIN;
    use crate::precision::{arccos, pi};

    /// Independent re-derivation of `e = 2 pi / arccos(x)`.
    fn e_from_x(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
        let wide = ctx.working();
        let two_pi = &pi(&wide) * &Real::from(2);
        two_pi.div(&arccos(x, &wide)?, ctx)
    }

    #[test]
    fn printed_tolerance_ignores_last_digit() {
        assert!(printed_matches(&dec("1.2345"), "1.2346"));
        assert!(printed_matches(&dec("1.23449"), "1.2345"));
        assert!(!printed_matches(&dec("1.2335"), "1.2345"));
    }

    #[test]
    fn diophantine_reproduction() {
        let r = run_experiment(&ExperimentSpec::named(Named::Sec3Diophantine)).unwrap();
        let failed: Vec<_> = r.failed_checks().collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert_eq!(r.outcome(), Outcome::Reproduced);
    }

    #[test]
    fn unsolvable_instance_reports_no_recovery() {
        let mut spec = ExperimentSpec::custom(Task::ContFrac);
        spec.digits = Some(40);
        spec.x = Some(dec("0.3"));
        spec.tr = Some(
            t_cos_eval(
                &BigInt::from(123456789),
                &dec("0.3"),
                &PrecisionContext::new(60).unwrap(),
            )
            .unwrap(),
        );
        spec.r_range = Some((pow10(8), pow10(9)));
        let r = run_experiment(&spec).unwrap();
        assert_eq!(r.outcome(), Outcome::NoRecovery);
        assert_eq!(r.outcome().exit_code(), 1);
    }

    #[test]
    fn custom_sieve_recovers_small_secret() {
        let x = dec("0.3");
        let secret = BigInt::from(2_000_123);
        let mut spec = ExperimentSpec::custom(Task::FloatSieve);
        spec.digits = Some(40);
        spec.x = Some(x.clone());
        spec.tr = Some(t_cos_eval(&secret, &x, &PrecisionContext::new(60).unwrap()).unwrap());
        spec.r_range = Some((pow10(6), BigInt::from(3_000_000)));
        spec.match_digits = Some(12);
        spec.chunks = Some(2);
        let r = run_experiment(&spec).unwrap();
        assert_eq!(r.outcome(), Outcome::Recovered, "{}", r.render_text());
        assert!(r.verdict.contains("2000123"));
    }

    #[test]
    fn secrets_stay_private_unless_exported() {
        let mut spec = ExperimentSpec::named(Named::KexDemo);
        let hidden = run_experiment(&spec).unwrap().render_structured(false);
        assert!(!hidden.contains("r="));
        spec.export_secrets = true;
        let shown = run_experiment(&spec).unwrap().render_structured(false);
        assert!(shown.contains("r="));
    }

    #[test]
    fn e_rederives_from_x() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert!(printed_matches(
            &e_from_x(&dec(refv::X), &ctx).unwrap(),
            refv::E3
        ));
    }

    #[test]
    fn named_spec_digit_counts_respect_kex_budget() {
        assert!(DIGITS_SEC3 >= 13 + KEX_PRECISION_MARGIN);
        assert!(DIGITS_SEC5_GEN >= 9 + KEX_PRECISION_MARGIN);
    }
}
