//! The proof chain comparing the class numbers `h` of `K = Q(a^(1/8))` and
//! `h'` of `K' = Q((16a)^(1/8))`, recorded step by step in a
//! [`Certificate`].
//!
//! The chain runs in a fixed order: admissibility, the Gassmann model,
//! splitting evidence, signatures, regulators of the supplied unit
//! subgroups, index bounds, recovery of the exact regulator quotient,
//! residue matrices on either side, and the final 2-adic count. Theorems
//! that are cited rather than recomputed are listed as [`Assumption`]s.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::analytic::{
    field_signature, index_upper_bound, regulator_with_escalation, snap_to_rational,
    DEFAULT_PRECISION,
};
use crate::ball::RealBall;
use crate::field::{is_minus_one, NumberField, UnitData};
use crate::gassmann::{
    are_conjugate_subgroups, build_galois_model, class_intersections, gassmann_check,
};
use crate::modp::{
    big_mod, compare_splitting, f2_is_nonsingular, find_degree_one_primes, quad_residue_bit,
    residue_matrix, BitMatrix, EvaluationCharacter, SplittingReport,
};
use crate::parse::format_rational;
use crate::{Error, Result};

/// Schema tag carried by every certificate.
pub const SCHEMA: &str = "zetatwin-cert/1";

/// Fractional digits used when a ball is written into a certificate.
pub const BALL_DIGITS: usize = 30;

/// `true` iff none of `a, -a, 2a, -2a` is a perfect square.
pub fn check_admissible(a: &BigInt) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroConstant);
    }
    let is_square = |n: BigInt| !n.is_negative() && n.sqrt().pow(2) == n;
    let two = BigInt::from(2);
    Ok(![a.clone(), -a, a * &two, -(a * &two)]
        .into_iter()
        .any(is_square))
}

/// `a = -1 (mod 32)`, under which the two fields also agree locally at 2.
pub fn adele_congruence(a: &BigInt) -> bool {
    big_mod(a, 32) == 31
}

/// Unit data whose generators have all been checked to be units, with the
/// torsion generator `-1` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedUnits(UnitData);

impl VerifiedUnits {
    pub fn units(&self) -> &UnitData {
        &self.0
    }

    pub fn field(&self) -> &NumberField {
        self.0.field()
    }
}

pub fn verify_units(units: &UnitData) -> Result<VerifiedUnits> {
    let gens = units.generators();
    match gens.first() {
        None => return Err(Error::InvalidArgument("no unit generators".into())),
        Some(g) if !is_minus_one(g) => {
            return Err(Error::InvalidArgument(format!(
                "the first generator must be -1, found {g}"
            )))
        }
        Some(_) => {}
    }
    for (index, g) in gens.iter().enumerate() {
        if !g.is_algebraic_integer() {
            return Err(Error::NotAUnit {
                index,
                element: g.to_string(),
                reason: "characteristic polynomial has non-integral coefficients".into(),
            });
        }
        let norm = g.norm();
        if !norm.abs().is_one() {
            return Err(Error::NotAUnit {
                index,
                element: g.to_string(),
                reason: format!("norm is {}", format_rational(&norm)),
            });
        }
    }
    Ok(VerifiedUnits(units.clone()))
}

/// Greedy search over [`find_degree_one_primes`] for characters whose
/// residue matrix against all generators has full rank. A candidate is kept
/// iff it raises the rank; candidates at which some generator reduces to
/// zero (or is not integral) are skipped.
pub fn search_independent_primes(
    units: &VerifiedUnits,
    bound: u64,
) -> Option<Vec<EvaluationCharacter>> {
    let gens = units.units().generators();
    let n = gens.len();
    if bound < 3 || n == 0 || n > BitMatrix::MAX_COLS {
        return None;
    }
    let mut kept: Vec<EvaluationCharacter> = Vec::new();
    let mut columns: Vec<Vec<u8>> = Vec::new();
    let mut rank = 0;
    for chi in find_degree_one_primes(units.field(), bound) {
        let Ok(col) = gens
            .iter()
            .map(|u| quad_residue_bit(u, &chi))
            .collect::<Result<Vec<u8>>>()
        else {
            continue;
        };
        columns.push(col);
        let trial = columns_to_matrix(&columns, n);
        if trial.rank() > rank {
            rank += 1;
            kept.push(chi);
            if rank == n {
                return Some(kept);
            }
        } else {
            columns.pop();
        }
    }
    None
}

fn columns_to_matrix(columns: &[Vec<u8>], rows: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, &bit) in col.iter().enumerate() {
            m.set(i, j, bit);
        }
    }
    m
}

/// Per-prime comparison of the local algebras of `X^8 - a` and `X^8 - 16a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMatchReport {
    pub splitting: SplittingReport,
    /// `2` and the odd primes up to the bound dividing `a`; not checked.
    pub unchecked: Vec<u64>,
    pub congruence: bool,
}

impl LocalMatchReport {
    pub fn all_unramified_match(&self) -> bool {
        self.splitting.all_agree()
    }
}

/// Compares `Q_p[X]/(X^8 - a)` with `Q_p[X]/(X^8 - 16a)` at every odd prime
/// `p <= p_bound` not dividing `a` through their residue degrees, and
/// reports the congruence that settles `p = 2`.
pub fn unramified_local_match(a: &BigInt, p_bound: u64) -> Result<LocalMatchReport> {
    let a16 = a * BigInt::from(16);
    let splitting = compare_splitting(a, &a16, p_bound)?;
    let mut unchecked = alloc::vec![2];
    unchecked.extend(
        crate::modp::primes_up_to(p_bound)
            .into_iter()
            .filter(|&p| p > 2 && big_mod(a, p) == 0),
    );
    Ok(LocalMatchReport {
        splitting,
        unchecked,
        congruence: adele_congruence(a),
    })
}

/// Structured values recorded in a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Text(String),
    Rational(BigRational),
    Ball { decimal: String, precision: u32 },
    List(Vec<Value>),
    Record(Vec<(String, Value)>),
}

impl Value {
    pub fn ball(b: &RealBall) -> Self {
        Value::Ball {
            decimal: b.to_decimal(BALL_DIGITS),
            precision: b.precision(),
        }
    }

    pub fn matrix(m: &BitMatrix) -> Self {
        Value::List(
            m.to_rows()
                .into_iter()
                .map(|row| Value::List(row.into_iter().map(|b| Value::Int(b.into())).collect()))
                .collect(),
        )
    }

    fn int(n: impl Into<BigInt>) -> Self {
        Value::Int(n.into())
    }

    fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepStatus {
    Passed,
    Failed,
    Skipped,
    /// Recorded for information; never affects the verdict.
    Info,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Passed => "passed",
            StepStatus::Failed => "failed",
            StepStatus::Skipped => "skipped",
            StepStatus::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub name: String,
    pub status: StepStatus,
    pub values: Vec<(String, Value)>,
    pub citation: String,
    pub note: Option<String>,
}

impl Step {
    fn new(name: &str, citation: &str) -> Self {
        Self {
            name: name.into(),
            status: StepStatus::Passed,
            values: Vec::new(),
            citation: citation.into(),
            note: None,
        }
    }

    fn value(mut self, key: &str, v: Value) -> Self {
        self.values.push((key.into(), v));
        self
    }

    fn status(mut self, status: StepStatus) -> Self {
        self.status = status;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// A theorem used without proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assumption {
    pub id: &'static str,
    pub statement: String,
    pub citation: &'static str,
}

pub const CLASS_NUMBER_REGULATOR: &str = "class-number-regulator-product";
pub const REGULATOR_LOWER_BOUND: &str = "regulator-lower-bound";
pub const POWER_OF_TWO_QUOTIENT: &str = "power-of-two-quotient";
pub const GASSMANN_CRITERION: &str = "gassmann-criterion";

fn assumptions(reg_lower_bound: &BigRational) -> Vec<Assumption> {
    alloc::vec![
        Assumption {
            id: GASSMANN_CRITERION,
            statement: "N^H and N^H' have the same zeta function iff the induced trivial \
                        characters 1_H^G and 1_H'^G agree"
                .into(),
            citation: "On the equation zeta_K(s) = zeta_K'(s), J. Number Theory 9 (1977) 342-360",
        },
        Assumption {
            id: CLASS_NUMBER_REGULATOR,
            statement: "arithmetically equivalent fields satisfy hR = h'R'".into(),
            citation: "On the class numbers of arithmetically equivalent fields, J. Number Theory 10 (1978) 489-509",
        },
        Assumption {
            id: REGULATOR_LOWER_BOUND,
            statement: format!(
                "the regulators R, R' of the full unit groups are at least {}",
                format_rational(reg_lower_bound)
            ),
            citation: "E. Friedman, Analytic formulas for the regulator of a number field, Invent. Math. 98 (1989) 599-622",
        },
        Assumption {
            id: POWER_OF_TWO_QUOTIENT,
            statement: "h/h' is a power of 2, the Galois closure having degree 32".into(),
            citation: "On the equation zeta_K(s) = zeta_K'(s), J. Number Theory 9 (1977) 342-360",
        },
    ]
}

/// Which class-number quotient a verdict speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quotient {
    /// `h / h'`
    HOverHPrime,
    /// `h' / h`
    HPrimeOverH,
}

impl Quotient {
    pub fn as_str(self) -> &'static str {
        match self {
            Quotient::HOverHPrime => "h/h'",
            Quotient::HPrimeOverH => "h'/h",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exact {
        quotient: Quotient,
        value: BigRational,
        assumptions: Vec<&'static str>,
    },
    LowerBound {
        quotient: Quotient,
        value: BigRational,
        assumptions: Vec<&'static str>,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn is_exact(&self) -> bool {
        matches!(self, Verdict::Exact { .. })
    }

    /// `h/h' = 2^k` exactly, in the orientation `h/h'`.
    pub fn exact_h_over_h_prime(&self) -> Option<BigRational> {
        match self {
            Verdict::Exact {
                quotient: Quotient::HOverHPrime,
                value,
                ..
            } => Some(value.clone()),
            Verdict::Exact {
                quotient: Quotient::HPrimeOverH,
                value,
                ..
            } => Some(value.recip()),
            _ => None,
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Verdict::Exact { quotient, value, .. } => {
                write!(f, "Exact({} = {})", quotient.as_str(), format_rational(value))
            }
            Verdict::LowerBound { quotient, value, .. } => {
                write!(f, "LowerBound({} >= {})", quotient.as_str(), format_rational(value))
            }
            Verdict::Inconclusive { reason } => write!(f, "Inconclusive({reason})"),
        }
    }
}

/// How the denominator bound for the regulator quotient is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnapDenominator {
    /// Derived from the certified index bounds.
    Computed,
    /// A fixed bound, e.g. 500.
    Fixed(BigInt),
}

/// Source of the degree-one characters for a residue matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeChoice {
    /// Greedy search up to [`ProofOptions::prime_search_bound`].
    Search,
    /// Explicit `(p, r)` pairs.
    Explicit(Vec<(u64, u64)>),
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofOptions {
    pub precision: u32,
    pub reg_lower_bound: BigRational,
    pub splitting_bound: u64,
    pub prime_search_bound: u64,
    pub snap_denominator: SnapDenominator,
    pub k_primes: PrimeChoice,
    pub k_prime_primes: PrimeChoice,
}

impl Default for ProofOptions {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            reg_lower_bound: default_reg_lower_bound(),
            splitting_bound: 10_000,
            prime_search_bound: 500,
            snap_denominator: SnapDenominator::Computed,
            k_primes: PrimeChoice::Search,
            k_prime_primes: PrimeChoice::Search,
        }
    }
}

/// `0.296`.
pub fn default_reg_lower_bound() -> BigRational {
    BigRational::new(296.into(), 1000.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputEcho {
    pub a: BigInt,
    pub a_prime: BigInt,
    pub units_k: Vec<String>,
    pub units_k_prime: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub requested_precision: u32,
    pub precision_k: Option<u32>,
    pub precision_k_prime: Option<u32>,
    pub options: Vec<(String, Value)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub schema: &'static str,
    pub input: InputEcho,
    pub steps: Vec<Step>,
    pub assumptions: Vec<Assumption>,
    pub verdict: Verdict,
    pub meta: Meta,
}

impl Certificate {
    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }
}

fn v2(n: &BigInt) -> i64 {
    n.trailing_zeros().map_or(0, |t| t as i64)
}

/// 2-adic valuation of a nonzero rational.
fn v2_rational(q: &BigRational) -> i64 {
    v2(q.numer()) - v2(q.denom())
}

fn pow2(k: i64) -> BigRational {
    let p = BigRational::from_integer(BigInt::one() << k.unsigned_abs() as usize);
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

struct Run {
    steps: Vec<Step>,
}

impl Run {
    /// Records a step; a failed step ends the chain with `Inconclusive`.
    fn require(&mut self, step: Step) -> core::result::Result<(), Verdict> {
        let failed = step.status == StepStatus::Failed;
        let reason = format!(
            "step '{}' failed{}",
            step.name,
            step.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default()
        );
        self.steps.push(step);
        if failed {
            Err(Verdict::Inconclusive { reason })
        } else {
            Ok(())
        }
    }
}

/// Runs the full proof chain. Never fails: any failing step turns the
/// verdict into [`Verdict::Inconclusive`] naming that step.
pub fn assemble_certificate(
    k: &VerifiedUnits,
    k_prime: &VerifiedUnits,
    options: &ProofOptions,
) -> Certificate {
    let input = InputEcho {
        a: k.field().a().clone(),
        a_prime: k_prime.field().a().clone(),
        units_k: k.units().generators().iter().map(ToString::to_string).collect(),
        units_k_prime: k_prime
            .units()
            .generators()
            .iter()
            .map(ToString::to_string)
            .collect(),
    };
    let mut meta = Meta {
        requested_precision: options.precision,
        precision_k: None,
        precision_k_prime: None,
        options: option_echo(options),
    };
    let mut run = Run { steps: Vec::new() };
    let verdict = match run_chain(&mut run, &mut meta, k, k_prime, options) {
        Ok(v) | Err(v) => v,
    };
    Certificate {
        schema: SCHEMA,
        input,
        steps: run.steps,
        assumptions: assumptions(&options.reg_lower_bound),
        verdict,
        meta,
    }
}

fn option_echo(o: &ProofOptions) -> Vec<(String, Value)> {
    let primes = |c: &PrimeChoice| match c {
        PrimeChoice::Search => Value::text("search"),
        PrimeChoice::Skip => Value::text("skip"),
        PrimeChoice::Explicit(v) => Value::text(
            v.iter()
                .map(|(p, r)| format!("{p}:{r}"))
                .collect::<Vec<_>>()
                .join(","),
        ),
    };
    alloc::vec![
        ("precision".to_owned(), Value::int(o.precision)),
        ("reg_lower_bound".to_owned(), Value::Rational(o.reg_lower_bound.clone())),
        ("splitting_bound".to_owned(), Value::int(o.splitting_bound)),
        ("prime_search_bound".to_owned(), Value::int(o.prime_search_bound)),
        (
            "snap_denominator".to_owned(),
            match &o.snap_denominator {
                SnapDenominator::Computed => Value::text("computed"),
                SnapDenominator::Fixed(n) => Value::Int(n.clone()),
            },
        ),
        ("k_primes".to_owned(), primes(&o.k_primes)),
        ("k_prime_primes".to_owned(), primes(&o.k_prime_primes)),
    ]
}

fn run_chain(
    run: &mut Run,
    meta: &mut Meta,
    k: &VerifiedUnits,
    k_prime: &VerifiedUnits,
    options: &ProofOptions,
) -> core::result::Result<Verdict, Verdict> {
    let a = k.field().a().clone();
    let a_prime = k_prime.field().a().clone();
    let sixteen = BigInt::from(16);

    // (1) admissibility
    let related = a_prime == &a * &sixteen || a == &a_prime * &sixteen;
    let base = if a_prime == &a * &sixteen { &a } else { &a_prime };
    let admissible = check_admissible(base).unwrap_or(false);
    let mut step = Step::new(
        "admissibility",
        "none of a, -a, 2a, -2a is a square, and the second constant is 16 times the first",
    )
    .value("a", Value::Int(a.clone()))
    .value("a_prime", Value::Int(a_prime.clone()))
    .value("related_by_16", Value::Bool(related))
    .value("admissible", Value::Bool(admissible));
    if !(related && admissible) {
        step = step.status(StepStatus::Failed).note(if related {
            format!("a = {base} is not admissible")
        } else {
            format!("{a_prime} is not 16 * {a} (nor the reverse)")
        });
    }
    run.require(step)?;

    run.steps.push(
        Step::new("adele_congruence", "a = -1 (mod 32) gives isomorphic local algebras at 2")
            .value("a_mod_32", Value::int(big_mod(base, 32)))
            .value("congruent_to_minus_one", Value::Bool(adele_congruence(base)))
            .status(StepStatus::Info)
            .note(if adele_congruence(base) {
                "K and K' are locally isomorphic at every prime, hence have isomorphic adele rings"
            } else {
                "no statement about the adele rings"
            }),
    );

    // (2) Gassmann model
    let model = build_galois_model();
    let equivalent = gassmann_check(&model);
    let conjugate = are_conjugate_subgroups(&model);
    let counts = class_intersections(&model)
        .into_iter()
        .map(|ci| {
            Value::Record(alloc::vec![
                ("representative".into(), Value::text(ci.class[0].to_string())),
                ("size".into(), Value::int(ci.class.len() as u64)),
                ("in_h".into(), Value::int(ci.in_h as u64)),
                ("in_h_prime".into(), Value::int(ci.in_h_prime as u64)),
            ])
        })
        .collect();
    let mut step = Step::new(
        "gassmann",
        "1_H^G = 1_H'^G with H, H' non-conjugate in the affine group of Z/8",
    )
    .value("group_order", Value::int(model.group.len() as u64))
    .value("class_intersections", Value::List(counts))
    .value("equivalent", Value::Bool(equivalent))
    .value("conjugate", Value::Bool(conjugate));
    if !equivalent || conjugate {
        step = step.status(StepStatus::Failed).note("model is not a Gassmann triple");
    }
    run.require(step)?;

    // (3) splitting evidence
    let step = match compare_splitting(&a, &a_prime, options.splitting_bound) {
        Ok(report) => {
            let disagreements: Vec<Value> = report
                .disagreements()
                .take(10)
                .map(|c| Value::int(c.p))
                .collect();
            let s = Step::new(
                "splitting",
                "equal residue degrees at every unramified prime up to the bound",
            )
            .value("bound", Value::int(options.splitting_bound))
            .value("primes_checked", Value::int(report.primes.len() as u64))
            .value("disagreements", Value::List(disagreements))
            .value("all_agree", Value::Bool(report.all_agree()));
            if report.all_agree() {
                s
            } else {
                s.status(StepStatus::Failed).note("residue degrees differ")
            }
        }
        Err(e) => Step::new("splitting", "")
            .status(StepStatus::Failed)
            .note(e.to_string()),
    };
    run.require(step)?;

    // (4) signature and rank
    let sig = field_signature(&a).and_then(|s| Ok((s, field_signature(&a_prime)?)));
    let step = match sig {
        Ok((s, s_prime)) => {
            let rank = s.unit_rank();
            let free_k = k.units().free_generators().len();
            let free_kp = k_prime.units().free_generators().len();
            let st = Step::new("signature", "unit rank r1 + r2 - 1 matches the free generators")
                .value("r1", Value::int(s.r1 as u64))
                .value("r2", Value::int(s.r2 as u64))
                .value("unit_rank", Value::int(rank as u64))
                .value("free_generators_k", Value::int(free_k as u64))
                .value("free_generators_k_prime", Value::int(free_kp as u64));
            if s != s_prime || free_k != rank || free_kp != rank {
                st.status(StepStatus::Failed)
                    .note("signatures differ or generator counts do not match the unit rank")
            } else {
                st
            }
        }
        Err(e) => Step::new("signature", "").status(StepStatus::Failed).note(e.to_string()),
    };
    run.require(step)?;

    // (5) regulators
    let regs = regulator_with_escalation(k.units(), options.precision).and_then(|(r, roots)| {
        let (rp, roots_p) = regulator_with_escalation(k_prime.units(), options.precision)?;
        Ok((r, roots.precision(), rp, roots_p.precision()))
    });
    let (r0, r0_prime) = match regs {
        Ok((r, pk, rp, pkp)) => {
            meta.precision_k = Some(pk);
            meta.precision_k_prime = Some(pkp);
            let mut st = Step::new(
                "regulators",
                "|det| of the logarithmic embeddings of the free generators, last place deleted",
            )
            .value("r0", Value::ball(&r))
            .value("r0_prime", Value::ball(&rp));
            if !r.is_positive() || !rp.is_positive() {
                st = st
                    .status(StepStatus::Failed)
                    .note("a regulator ball contains zero; the generators may be dependent");
            }
            run.require(st)?;
            (r, rp)
        }
        Err(e) => {
            run.require(Step::new("regulators", "").status(StepStatus::Failed).note(e.to_string()))?;
            unreachable!("failed step returns early")
        }
    };

    // (6) index bounds
    let lb = &options.reg_lower_bound;
    let bounds = index_upper_bound(&r0, lb).and_then(|b| Ok((b, index_upper_bound(&r0_prime, lb)?)));
    let (bound_i, bound_i_prime) = match bounds {
        Ok(b) => b,
        Err(e) => {
            run.require(Step::new("index_bounds", "").status(StepStatus::Failed).note(e.to_string()))?;
            unreachable!("failed step returns early")
        }
    };
    run.require(
        Step::new("index_bounds", "[U:U0] <= R0 / R with R at least the cited lower bound")
            .value("reg_lower_bound", Value::Rational(lb.clone()))
            .value("i_max", Value::Int(bound_i.clone()))
            .value("i_prime_max", Value::Int(bound_i_prime.clone())),
    )?;

    // (7) exact regulator quotient
    let Some(ratio) = r0_prime.div(&r0) else {
        run.require(Step::new("ratio", "").status(StepStatus::Failed).note("R0 contains zero"))?;
        unreachable!("failed step returns early")
    };
    // R0'/R0 = (i'/i)(h/h'). If h/h' is an integer the denominator divides
    // i <= B; otherwise it divides i h'/h = i' R0/R0' <= B' sup(R0/R0').
    let inverse_sup = ratio
        .recip()
        .map(|x| x.upper().to_rational())
        .unwrap_or_else(BigRational::zero);
    let second_case = (BigRational::from_integer(bound_i_prime.clone()) * inverse_sup)
        .floor()
        .to_integer();
    let max_den = match &options.snap_denominator {
        SnapDenominator::Computed => bound_i
            .clone()
            .max(bound_i_prime.clone())
            .max(second_case),
        SnapDenominator::Fixed(n) => n.clone(),
    };
    let snapped = snap_to_rational(&ratio, &max_den);
    let mut step = Step::new(
        "ratio",
        "R0'/R0 = (i'/i)(h/h') is rational with denominator at most the index bound",
    )
    .value("ratio", Value::ball(&ratio))
    .value("max_denominator", Value::Int(max_den.clone()));
    let q = match snapped {
        Ok(q) => {
            step = step.value("exact_ratio", Value::Rational(q.clone()));
            q
        }
        Err(e) => {
            run.require(step.status(StepStatus::Failed).note(e.to_string()))?;
            unreachable!("failed step returns early")
        }
    };
    run.require(step)?;

    // (8), (9) residue matrices
    let odd_k_prime = residue_step(run, "residue_k_prime", "i'", k_prime, &options.k_prime_primes, options);
    let odd_k = residue_step(run, "residue_k", "i", k, &options.k_primes, options);

    // (10) conclusion
    // h/h' = q i/i' and h/h' = 2^e, so e = v2(q) + v2(i) - v2(i').
    let v = v2_rational(&q);
    let axioms = alloc::vec![
        GASSMANN_CRITERION,
        CLASS_NUMBER_REGULATOR,
        REGULATOR_LOWER_BOUND,
        POWER_OF_TWO_QUOTIENT,
    ];
    let verdict = match (odd_k, odd_k_prime) {
        (true, true) => {
            let value = pow2(v);
            if value < BigRational::one() {
                Verdict::Exact {
                    quotient: Quotient::HPrimeOverH,
                    value: value.recip(),
                    assumptions: axioms,
                }
            } else {
                Verdict::Exact {
                    quotient: Quotient::HOverHPrime,
                    value,
                    assumptions: axioms,
                }
            }
        }
        (false, true) => Verdict::LowerBound {
            quotient: Quotient::HOverHPrime,
            value: pow2(v),
            assumptions: axioms,
        },
        (true, false) => Verdict::LowerBound {
            quotient: Quotient::HPrimeOverH,
            value: pow2(-v),
            assumptions: axioms,
        },
        (false, false) => Verdict::Inconclusive {
            reason: "neither unit index is known to be odd".into(),
        },
    };
    let note = match (odd_k, odd_k_prime) {
        (true, true) => "i and i' odd: the 2-part of h/h' equals that of R0'/R0",
        (false, true) => "i' odd: h/h' = (R0'/R0) i/i' has 2-adic valuation at least that of R0'/R0",
        (true, false) => "i odd: h'/h = (R0/R0') i'/i has 2-adic valuation at least that of R0/R0'",
        (false, false) => "no parity information",
    };
    run.steps.push(
        Step::new("conclusion", "h/h' is a power of 2 equal to (R0'/R0) i/i'")
            .value("exact_ratio", Value::Rational(q.clone()))
            .value("ratio_2_adic_valuation", Value::int(v))
            .value("i_odd", Value::Bool(odd_k))
            .value("i_prime_odd", Value::Bool(odd_k_prime))
            .value("verdict", Value::text(verdict.to_string()))
            .status(if matches!(verdict, Verdict::Inconclusive { .. }) {
                StepStatus::Failed
            } else {
                StepStatus::Passed
            })
            .note(note),
    );
    Ok(verdict)
}

/// Records a residue-matrix step and returns whether the index is certified
/// odd. Failure here only removes parity information.
fn residue_step(
    run: &mut Run,
    name: &str,
    index: &str,
    units: &VerifiedUnits,
    choice: &PrimeChoice,
    options: &ProofOptions,
) -> bool {
    let citation = "a nonsingular residue matrix over F_2 gives U0 ∩ U^2 = U0^2, so the index is odd";
    let field = units.field();
    let primes: core::result::Result<Vec<EvaluationCharacter>, String> = match choice {
        PrimeChoice::Skip => {
            run.steps.push(Step::new(name, citation).status(StepStatus::Skipped));
            return false;
        }
        PrimeChoice::Explicit(list) => list
            .iter()
            .map(|&(p, r)| EvaluationCharacter::new(field, p, r).map_err(|e| e.to_string()))
            .collect(),
        PrimeChoice::Search => search_independent_primes(units, options.prime_search_bound)
            .ok_or_else(|| {
                format!(
                    "no full-rank set of degree-one primes up to {}",
                    options.prime_search_bound
                )
            }),
    };
    let step = Step::new(name, citation).value(
        "source",
        Value::text(match choice {
            PrimeChoice::Search => "search",
            _ => "explicit",
        }),
    );
    let primes = match primes {
        Ok(p) => p,
        Err(msg) => {
            run.steps.push(step.status(StepStatus::Failed).note(msg));
            return false;
        }
    };
    let step = step.value(
        "primes",
        Value::List(primes.iter().map(|c| Value::text(c.to_string())).collect()),
    );
    let matrix = match residue_matrix(units.units(), &primes) {
        Ok(m) => m,
        Err(e) => {
            run.steps.push(step.status(StepStatus::Failed).note(e.to_string()));
            return false;
        }
    };
    let nonsingular = f2_is_nonsingular(&matrix).unwrap_or(false);
    let step = step
        .value("matrix", Value::matrix(&matrix))
        .value("rank", Value::int(matrix.rank() as u64))
        .value("nonsingular", Value::Bool(nonsingular));
    if nonsingular {
        run.steps.push(step.note(format!(
            "U0/U0^2 injects into U/U^2 and both have F_2-dimension {}, so {index} is odd",
            matrix.rows()
        )));
    } else {
        run.steps.push(
            step.status(StepStatus::Failed)
                .note("residue matrix is singular or not square; no parity conclusion"),
        );
    }
    nonsingular
}
