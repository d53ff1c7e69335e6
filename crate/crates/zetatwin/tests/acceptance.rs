//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use common::{is_within, rat};
use num_bigint::BigInt;
use serde_json::Value;
use zetatwin::cli::{run, Cli, Outcome};
use clap::Parser;
use zetatwin_core::analytic::{index_upper_bound, regulator_with_escalation, snap_to_rational};
use zetatwin_core::ball::RealBall;
use zetatwin_core::gassmann::{are_conjugate_subgroups, build_galois_model, gassmann_check};
use zetatwin_core::modp::{compare_splitting, f2_is_nonsingular, parse_prime_list, residue_matrix};
use zetatwin_core::prover::adele_congruence;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(elapsed: Duration, limit_ms: u128, what: &str) -> Result<(), String> {
    ensure(
        elapsed.as_millis() < limit_ms,
        format!("{what} took {} ms, limit {limit_ms} ms", elapsed.as_millis()),
    )
}

fn regulator_reproduction() -> Check {
    let mut out = Vec::new();
    for (units, center, name) in [
        (common::k_units(), rat(66316, 1000), "R0"),
        (common::k_prime_units(), rat(132633, 1000), "R0'"),
    ] {
        let start = Instant::now();
        let (r, roots) = regulator_with_escalation(&units, 192).map_err(|e| e.to_string())?;
        within_time(start.elapsed(), 2000, name)?;
        ensure(roots.precision() == 192, format!("{name} needed {} bits", roots.precision()))?;
        ensure(is_within(&r, &center, &rat(5, 10000)), format!("{name} = {r}"))?;
        ensure(r.rad().to_rational() <= rat(1, 1_000_000), format!("{name} radius too large"))?;
        out.push(format!("{name} = {}", r.to_decimal(12)));
    }
    Ok(out.join(", "))
}

fn ratio_snap() -> Check {
    let (r0, _) = regulator_with_escalation(&common::k_units(), 192).map_err(|e| e.to_string())?;
    let (r0p, _) = regulator_with_escalation(&common::k_prime_units(), 192).map_err(|e| e.to_string())?;
    let q = r0p.div(&r0).ok_or("R0 contains zero")?;
    ensure(q.rad().to_rational() < rat(1, 1000), "ratio radius >= 1e-3")?;
    let snapped = snap_to_rational(&q, &BigInt::from(500)).map_err(|e| e.to_string())?;
    ensure(snapped == rat(2, 1), format!("snapped to {snapped}"))?;
    Ok(format!("R0'/R0 = {} snaps to 2", q.to_decimal(12)))
}

fn index_bounds() -> Check {
    let b = index_upper_bound(&RealBall::from_int(133, 128), &rat(296, 1000)).map_err(|e| e.to_string())?;
    ensure(b == BigInt::from(449), format!("got {b}"))?;
    ensure(b < BigInt::from(500), "bound not below 500")?;
    Ok("floor(133/0.296) = 449 < 500".into())
}

fn residue_matrix_nonsingular() -> Check {
    let units = common::k_prime_units();
    let start = Instant::now();
    let primes = parse_prime_list("3:0,19:8,23:9,47:16", units.field()).map_err(|e| e.to_string())?;
    let m = residue_matrix(&units, &primes).map_err(|e| e.to_string())?;
    let ok = f2_is_nonsingular(&m).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(ok, format!("singular:\n{m}"))?;
    within_time(elapsed, 100, "residue matrix")?;
    Ok(format!("4x4 matrix nonsingular over F_2 ({} ms)", elapsed.as_millis()))
}

fn gassmann_certification() -> Check {
    let start = Instant::now();
    let t = build_galois_model();
    let equivalent = gassmann_check(&t);
    let conjugate = are_conjugate_subgroups(&t);
    let elapsed = start.elapsed();
    ensure(equivalent && !conjugate, format!("equivalent={equivalent} conjugate={conjugate}"))?;
    within_time(elapsed, 10, "enumeration")?;
    Ok(format!("equivalent, not conjugate ({} us)", elapsed.as_micros()))
}

fn splitting_evidence() -> Check {
    let start = Instant::now();
    let mut primes = 0;
    for a in [-15i64, -31, -33, -63, 65, 66, -65, -66] {
        let a = BigInt::from(a);
        let report = compare_splitting(&a, &(&a * 16), 10_000).map_err(|e| e.to_string())?;
        if let Some(bad) = report.disagreements().next() {
            return Err(format!("a = {a} differs at p = {}", bad.p));
        }
        let expected = zetatwin_core::modp::primes_up_to(10_000)
            .into_iter()
            .filter(|&p| p > 2 && zetatwin_core::modp::big_mod(&a, p) != 0)
            .count();
        ensure(report.primes.len() == expected, format!("a = {a}: {} primes checked", report.primes.len()))?;
        primes += report.primes.len();
    }
    within_time(start.elapsed(), 30_000, "splitting scan")?;
    Ok(format!("8 pairs agree at {primes} prime checks ({} ms)", start.elapsed().as_millis()))
}

fn adele_congruences() -> Check {
    ensure(adele_congruence(&BigInt::from(-33)), "-33 not congruent")?;
    ensure(!adele_congruence(&BigInt::from(-15)), "-15 congruent")?;
    Ok("-33 true, -15 false".into())
}

fn verify(args: &[&str]) -> Result<(Outcome, Value), String> {
    let cli = Cli::try_parse_from(std::iter::once("zetatwin").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    let outcome = run(cli, &mut buf).map_err(|e| format!("{e:#}"))?;
    let cert: Value = serde_json::from_slice(&buf).map_err(|e| e.to_string())?;
    zetatwin::cert_json::validate(&cert)?;
    Ok((outcome, cert))
}

fn end_to_end() -> Check {
    let (outcome, cert) = verify(&["verify"])?;
    let v = &cert["verdict"];
    ensure(
        outcome == Outcome::Success && v["kind"] == "exact" && v["quotient"] == "h/h'" && v["value"] == "2",
        format!("bundled dataset gave {}", v["summary"]),
    )?;
    let (outcome, cert) = verify(&["verify", "--skip-k-side"])?;
    let w = &cert["verdict"];
    ensure(
        outcome == Outcome::Negative && w["kind"] == "lower_bound" && w["quotient"] == "h/h'" && w["value"] == "2",
        format!("without K-side primes: {}", w["summary"]),
    )?;
    Ok(format!(
        "{} (exit 0); without K-side primes {} (exit 2)",
        v["summary"].as_str().unwrap_or_default(),
        w["summary"].as_str().unwrap_or_default()
    ))
}

fn property_suites() -> Check {
    let start = Instant::now();
    common::norm_multiplicativity(200)?;
    common::inverse_roundtrip(100)?;
    common::regulator_invariance(12)?;
    common::residue_character_multiplicativity(50)?;
    common::f2_exhaustive()?;
    common::ball_containment_under_doubling()?;
    within_time(start.elapsed(), 60_000, "property suites")?;
    Ok(format!("6 suites ({} ms)", start.elapsed().as_millis()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("regulator reproduction", regulator_reproduction),
        ("ratio snap", ratio_snap),
        ("index bounds", index_bounds),
        ("residue matrix", residue_matrix_nonsingular),
        ("gassmann certification", gassmann_certification),
        ("splitting evidence", splitting_evidence),
        ("adele congruence", adele_congruences),
        ("end-to-end verdict", end_to_end),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
