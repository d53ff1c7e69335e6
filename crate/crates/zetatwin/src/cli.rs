//! Subcommand dispatch. Every command writes its report to the given writer
//! and returns an [`Outcome`]; errors map to exit code 1 in `main`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use zetatwin_core::analytic::{field_signature, regulator_with_escalation, DEFAULT_PRECISION};
use zetatwin_core::gassmann::{
    are_conjugate_subgroups, build_galois_model, class_intersections, gassmann_check,
};
use zetatwin_core::modp::{compare_splitting, f2_is_nonsingular, parse_prime_list, residue_matrix};
use zetatwin_core::parse::parse_rational;
use zetatwin_core::prover::{
    assemble_certificate, search_independent_primes,
    unramified_local_match, verify_units, PrimeChoice, ProofOptions, SnapDenominator,
};
use zetatwin_core::BigRational;

use crate::cert_json::{certificate_to_json, ExtraMeta};
use crate::units_file::{bundled, load_unit_file, UnitFile};

#[derive(Parser, Debug)]
#[command(name = "zetatwin", version, about = "Certified class-number quotients for X^8 - a versus X^8 - 16a")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full proof chain and emit a JSON certificate.
    Verify(VerifyArgs),
    /// Compare residue degrees of X^8 - a and X^8 - 16a at small primes.
    SplitCompare(SplitArgs),
    /// Print the Gassmann model and its two verdicts.
    Gassmann,
    /// Certified regulator of a unit subgroup.
    Regulator(UnitsArgs),
    /// Quadratic-residue matrix of a unit subgroup over F_2.
    ResidueMatrix(ResidueArgs),
    /// Local comparison of the two fields, including the congruence at 2.
    AdeleCheck(SplitArgs),
}

#[derive(Args, Debug)]
pub struct UnitsArgs {
    /// Constant `a`; selects bundled data when --units is omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<BigInt>,
    /// Unit-data TOML file.
    #[arg(long)]
    pub units: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct ResidueArgs {
    #[command(flatten)]
    pub units: UnitsArgs,
    /// `p:r,...`; defaults to the file's primes, then to a search.
    #[arg(long)]
    pub primes: Option<String>,
    /// Search bound when no primes are given.
    #[arg(long, default_value_t = 500)]
    pub search_bound: u64,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: BigInt,
    #[arg(long, default_value_t = 1000)]
    pub bound: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Constant of K; must match --units when both are given. Default -15.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<BigInt>,
    /// Unit data for K.
    #[arg(long)]
    pub units: Option<PathBuf>,
    /// Unit data for K'.
    #[arg(long)]
    pub units_prime: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    /// Splitting-evidence bound.
    #[arg(long, default_value_t = 10_000)]
    pub bound: u64,
    /// Bound for the degree-one prime search.
    #[arg(long, default_value_t = 500)]
    pub search_bound: u64,
    /// K' primes as `p:r,...`, overriding the K' file.
    #[arg(long)]
    pub primes: Option<String>,
    /// Decimal or `n/d`.
    #[arg(long, default_value = "0.296")]
    pub reg_lower_bound: String,
    /// `computed` or a fixed positive denominator bound such as 500.
    #[arg(long, default_value = "computed")]
    pub snap_den: String,
    /// Omit the residue matrix for K.
    #[arg(long)]
    pub skip_k_side: bool,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Non-error results: exit 0 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Negative
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Verify(args) => cmd_verify(&args, out),
        Command::SplitCompare(args) => cmd_split_compare(&args, out),
        Command::Gassmann => cmd_gassmann(out),
        Command::Regulator(args) => cmd_regulator(&args, out),
        Command::ResidueMatrix(args) => cmd_residue_matrix(&args, out),
        Command::AdeleCheck(args) => cmd_adele_check(&args, out),
    }
}

/// `0.296`, `37/125` or `3`.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if t.contains('/') {
        return parse_rational(t).map_err(Into::into);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    ensure!(
        !(int.is_empty() && frac.is_empty())
            && int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()),
        "not a decimal number: {text:?}"
    );
    let digits: BigInt = format!("{int}{frac}").parse()?;
    let q = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -q } else { q })
}

fn parse_snap_den(text: &str) -> Result<SnapDenominator> {
    if text == "computed" {
        return Ok(SnapDenominator::Computed);
    }
    let n: BigInt = text
        .parse()
        .with_context(|| format!("--snap-den expects `computed` or an integer, got {text:?}"))?;
    ensure!(n.is_positive(), "--snap-den must be positive");
    Ok(SnapDenominator::Fixed(n))
}

fn check_precision(bits: u32) -> Result<()> {
    ensure!(bits >= 64, "--precision must be at least 64 bits");
    Ok(())
}

fn load_units(path: Option<&PathBuf>, a: Option<&BigInt>) -> Result<UnitFile> {
    let file = match path {
        Some(p) => load_unit_file(p)?,
        None => {
            let a = a.cloned().unwrap_or_else(|| BigInt::from(-15));
            bundled(&a).with_context(|| format!("no bundled unit data for a = {a}; pass --units"))?
        }
    };
    if let Some(a) = a {
        ensure!(
            file.field().a() == a,
            "--a {a} does not match a = {} in the unit file",
            file.field().a()
        );
    }
    Ok(file)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let start = Instant::now();
    check_precision(args.precision)?;
    ensure!(args.bound >= 3, "--bound must be at least 3");
    ensure!(args.search_bound >= 3, "--search-bound must be at least 3");
    let reg_lower_bound = parse_decimal(&args.reg_lower_bound)?;
    ensure!(reg_lower_bound.is_positive(), "--reg-lower-bound must be positive");

    let k = load_units(args.units.as_ref(), args.a.as_ref())?;
    let k_prime = match &args.units_prime {
        Some(p) => load_unit_file(p)?,
        None => {
            let a16 = k.field().a() * BigInt::from(16);
            bundled(&a16)
                .with_context(|| format!("no bundled unit data for a' = {a16}; pass --units-prime"))?
        }
    };
    let verified_k = verify_units(&k.units).context("unit data for K")?;
    let verified_k_prime = verify_units(&k_prime.units).context("unit data for K'")?;

    let k_prime_primes = match &args.primes {
        Some(text) => {
            let chars = parse_prime_list(text, k_prime.field()).context("--primes")?;
            PrimeChoice::Explicit(chars.iter().map(|c| (c.p(), c.r())).collect())
        }
        None => k_prime.primes.clone().map_or(PrimeChoice::Search, PrimeChoice::Explicit),
    };
    let k_primes = if args.skip_k_side {
        PrimeChoice::Skip
    } else {
        k.primes.clone().map_or(PrimeChoice::Search, PrimeChoice::Explicit)
    };
    let options = ProofOptions {
        precision: args.precision,
        reg_lower_bound,
        splitting_bound: args.bound,
        prime_search_bound: args.search_bound,
        snap_denominator: parse_snap_den(&args.snap_den)?,
        k_primes,
        k_prime_primes,
    };
    let cert = assemble_certificate(&verified_k, &verified_k_prime, &options);
    let extra = ExtraMeta {
        units_sha256_k: Some(k.digest()),
        units_sha256_k_prime: Some(k_prime.digest()),
        elapsed_ms: Some(start.elapsed().as_millis()),
    };
    let text = serde_json::to_string_pretty(&certificate_to_json(&cert, &extra))? + "\n";
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "verdict: {}", cert.verdict)?;
            writeln!(out, "certificate: {}", path.display())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Outcome::from_bool(cert.verdict.is_exact()))
}

pub fn cmd_split_compare(args: &SplitArgs, out: &mut dyn Write) -> Result<Outcome> {
    ensure!(!args.a.is_zero(), "a must be nonzero");
    let a16 = &args.a * BigInt::from(16);
    let report = compare_splitting(&args.a, &a16, args.bound)?;
    writeln!(out, "a: {}", args.a)?;
    writeln!(out, "a_prime: {a16}")?;
    writeln!(out, "bound: {}", args.bound)?;
    writeln!(out, "primes_checked: {}", report.primes.len())?;
    for c in report.disagreements() {
        writeln!(out, "mismatch {}: {:?} vs {:?}", c.p, c.degrees_left, c.degrees_right)?;
    }
    writeln!(out, "all_agree: {}", report.all_agree())?;
    Ok(Outcome::from_bool(report.all_agree()))
}

pub fn cmd_gassmann(out: &mut dyn Write) -> Result<Outcome> {
    let t = build_galois_model();
    let list = |h: &[zetatwin_core::gassmann::GroupElement]| {
        h.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    };
    writeln!(out, "group_order: {}", t.group.len())?;
    writeln!(out, "H: {}", list(t.h.elements()))?;
    writeln!(out, "H': {}", list(t.h_prime.elements()))?;
    writeln!(out, "{:<8} {:>4} {:>6} {:>7}", "class", "size", "|C∩H|", "|C∩H'|")?;
    for ci in class_intersections(&t) {
        writeln!(
            out,
            "{:<8} {:>4} {:>6} {:>7}",
            ci.class[0].to_string(),
            ci.class.len(),
            ci.in_h,
            ci.in_h_prime
        )?;
    }
    let equivalent = gassmann_check(&t);
    let conjugate = are_conjugate_subgroups(&t);
    let yes_no = |b| if b { "yes" } else { "no" };
    writeln!(out, "equivalent: {}", yes_no(equivalent))?;
    writeln!(out, "conjugate: {}", yes_no(conjugate))?;
    Ok(Outcome::from_bool(equivalent && !conjugate))
}

pub fn cmd_regulator(args: &UnitsArgs, out: &mut dyn Write) -> Result<Outcome> {
    check_precision(args.precision)?;
    let file = load_units(args.units.as_ref(), args.a.as_ref())?;
    let verified = verify_units(&file.units)?;
    let sig = field_signature(file.field().a())?;
    let (reg, roots) = regulator_with_escalation(verified.units(), args.precision)?;
    writeln!(out, "a: {}", file.field().a())?;
    writeln!(out, "signature: ({}, {})", sig.r1, sig.r2)?;
    writeln!(out, "unit_rank: {}", sig.unit_rank())?;
    writeln!(out, "regulator: {}", reg.to_decimal(30))?;
    writeln!(out, "precision_bits: {}", roots.precision())?;
    Ok(Outcome::from_bool(reg.is_positive()))
}

pub fn cmd_residue_matrix(args: &ResidueArgs, out: &mut dyn Write) -> Result<Outcome> {
    let file = load_units(args.units.units.as_ref(), args.units.a.as_ref())?;
    let verified = verify_units(&file.units)?;
    let primes = match (&args.primes, &file.primes) {
        (Some(text), _) => parse_prime_list(text, file.field())?,
        (None, Some(list)) => parse_prime_list(
            &list.iter().map(|(p, r)| format!("{p}:{r}")).collect::<Vec<_>>().join(","),
            file.field(),
        )?,
        (None, None) => match search_independent_primes(&verified, args.search_bound) {
            Some(found) => found,
            None => bail!("no full-rank set of degree-one primes up to {}", args.search_bound),
        },
    };
    let m = residue_matrix(verified.units(), &primes)?;
    writeln!(out, "a: {}", file.field().a())?;
    for (j, chi) in primes.iter().enumerate() {
        let bits: Vec<String> = (0..m.rows()).map(|i| m.get(i, j).to_string()).collect();
        writeln!(out, "{chi}: {}", bits.join(" "))?;
    }
    let nonsingular = f2_is_nonsingular(&m).unwrap_or(false);
    writeln!(out, "rank: {}", m.rank())?;
    writeln!(out, "nonsingular: {nonsingular}")?;
    Ok(Outcome::from_bool(nonsingular))
}

pub fn cmd_adele_check(args: &SplitArgs, out: &mut dyn Write) -> Result<Outcome> {
    ensure!(!args.a.is_zero(), "a must be nonzero");
    let report = unramified_local_match(&args.a, args.bound)?;
    writeln!(out, "{}", report.congruence)?;
    writeln!(out, "a: {}", args.a)?;
    writeln!(
        out,
        "a_mod_32: {}",
        zetatwin_core::modp::big_mod(&args.a, 32)
    )?;
    writeln!(out, "unramified_primes_checked: {}", report.splitting.primes.len())?;
    writeln!(out, "unramified_all_match: {}", report.all_unramified_match())?;
    let skipped: Vec<String> = report.unchecked.iter().map(u64::to_string).collect();
    writeln!(out, "not_checked: {}", skipped.join(", "))?;
    Ok(Outcome::from_bool(report.congruence && report.all_unramified_match()))
}
