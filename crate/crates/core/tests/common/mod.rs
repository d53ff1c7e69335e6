//! Independent oracles and the property suites built on them. Shared by
//! the integration tests here and by the acceptance harness.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use zetatwin_core::analytic::{complex_roots, regulator_deleting, regulator_with_escalation};
use zetatwin_core::ball::RealBall;
use zetatwin_core::field::{FieldElement, NumberField, UnitData};
use zetatwin_core::gassmann::{GroupElement, Subgroup};
use zetatwin_core::modp::{f2_is_nonsingular, quad_residue_bit, BitMatrix, EvaluationCharacter};
use zetatwin_core::parse::parse_element;

pub const K_UNITS: [&str; 4] = ["-1", "(a+1)/(a-1)", "(a^2+a+2)/(a+1)", "(a^2-a+2)/(-a+1)"];
pub const K_PRIME_UNITS: [&str; 4] = [
    "-1",
    "(b^6 + 2*b^4 - 4*b^2 - 56)/16",
    "(b^7-2*b^6+2*b^5-4*b^3+8*b^2-8*b+64)/64",
    "(b^7-2*b^5+4*b^4-4*b^3-32*b^2+8*b-16)/64",
];
pub const K_PRIME_PRIMES: [(u64, u64); 4] = [(3, 0), (19, 8), (23, 9), (47, 16)];

pub fn units(a: i64, symbol: &str, gens: &[&str]) -> UnitData {
    let k = NumberField::with_symbol(a, symbol).unwrap();
    let g = gens.iter().map(|s| parse_element(s, &k).unwrap()).collect();
    UnitData::new(k, g).unwrap()
}

pub fn k_units() -> UnitData {
    units(-15, "a", &K_UNITS)
}

pub fn k_prime_units() -> UnitData {
    units(-240, "b", &K_PRIME_UNITS)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

// ---- strategies ----

pub const FIELD_CONSTANTS: [i64; 5] = [-15, -240, 3, -7, 10];

pub fn small_rational() -> impl Strategy<Value = BigRational> {
    prop_oneof![
        2 => Just(BigRational::zero()),
        5 => (-30i64..=30, 1i64..=6).prop_map(|(n, d)| rat(n, d)),
    ]
}

pub fn element_in(a: i64) -> impl Strategy<Value = FieldElement> {
    proptest::collection::vec(small_rational(), 8).prop_map(move |c| {
        NumberField::new(a).unwrap().element(c.try_into().unwrap())
    })
}

pub fn field_and_pair() -> impl Strategy<Value = (FieldElement, FieldElement)> {
    proptest::sample::select(FIELD_CONSTANTS.to_vec())
        .prop_flat_map(|a| (element_in(a), element_in(a)))
}

// ---- oracles ----

/// Determinant by fraction-free Bareiss elimination over the integers after
/// clearing denominators row by row.
pub fn bareiss_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut scale = BigRational::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            scale = &scale * BigRational::from_integer(l.clone());
            row.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigRational::zero();
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { BigInt::one() } else { a[n - 1][n - 1].clone() };
    BigRational::from_integer(det * sign) / scale
}

/// `N(x) = Res(X^8 - a, g)` for `x = g(t)`, via the Sylvester matrix.
pub fn norm_by_resultant(x: &FieldElement) -> BigRational {
    let mut g: Vec<BigRational> = x.coeffs().to_vec();
    while g.len() > 1 && g.last().unwrap().is_zero() {
        g.pop();
    }
    let d = g.len() - 1;
    if d == 0 {
        return g[0].pow(8);
    }
    // high degree first
    let mut f = vec![BigRational::zero(); 9];
    f[0] = BigRational::one();
    f[8] = -BigRational::from_integer(x.field().a().clone());
    let g_high: Vec<BigRational> = g.iter().rev().cloned().collect();
    let n = 8 + d;
    let mut s = vec![vec![BigRational::zero(); n]; n];
    for i in 0..d {
        for (j, c) in f.iter().enumerate() {
            s[i][i + j] = c.clone();
        }
    }
    for i in 0..8 {
        for (j, c) in g_high.iter().enumerate() {
            s[d + i][i + j] = c.clone();
        }
    }
    bareiss_det(&s)
}

fn modp(q: &BigRational, p: u64) -> Option<u64> {
    let p_big = BigInt::from(p);
    let den = q.denom().mod_floor(&p_big);
    if den.is_zero() {
        return None;
    }
    let inv = den.modpow(&(&p_big - 2u32), &p_big);
    let v = (q.numer().mod_floor(&p_big) * inv).mod_floor(&p_big);
    Some(u64::try_from(&v).unwrap())
}

/// Reduction of `x` at `t = r` by Horner's rule, then a search for a square
/// root by enumeration.
pub fn residue_bit_by_enumeration(x: &FieldElement, p: u64, r: u64) -> Option<u8> {
    let mut acc = 0u64;
    for c in x.coeffs().iter().rev() {
        acc = (acc * r + modp(c, p)?) % p;
    }
    if acc == 0 {
        return None;
    }
    Some(if (0..p).any(|y| y * y % p == acc) { 0 } else { 1 })
}

/// Low-first polynomials over F_p.
fn poly_divmod(f: &[u64], g: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    if r.len() <= dg {
        return (vec![0], r);
    }
    let mut q = vec![0u64; r.len() - dg];
    for k in (0..q.len()).rev() {
        let c = r[k + dg] % p;
        q[k] = c;
        for (j, gj) in g.iter().enumerate() {
            r[k + j] = (r[k + j] + p - c * gj % p) % p;
        }
    }
    r.truncate(dg.max(1));
    (q, r)
}

/// Degrees of the irreducible factors of `X^8 - a` mod `p`, by trial
/// division with every monic polynomial of increasing degree.
pub fn factor_degrees_by_trial_division(a: i64, p: u64) -> Vec<usize> {
    let mut f = vec![0u64; 9];
    f[0] = (-a).rem_euclid(p as i64) as u64;
    f[8] = 1;
    let mut degrees = Vec::new();
    let mut d = 1;
    while 2 * d < f.len() {
        for n in 0..p.pow(d as u32) {
            let mut g: Vec<u64> = (0..d).map(|i| n / p.pow(i as u32) % p).collect();
            g.push(1);
            loop {
                let (q, r) = poly_divmod(&f, &g, p);
                if r.iter().any(|&c| c != 0) {
                    break;
                }
                degrees.push(d);
                f = q;
            }
        }
        d += 1;
    }
    if f.len() > 1 {
        degrees.push(f.len() - 1);
    }
    degrees.sort_unstable();
    degrees
}

/// Determinant mod 2 by the Leibniz formula.
pub fn leibniz_det_mod2(m: &[[u8; 4]; 4]) -> u8 {
    let mut total = 0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let perm = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| perm[i] != perm[j]));
                    if distinct {
                        total ^= m[0][a] & m[1][b] & m[2][c] & m[3][d];
                    }
                }
            }
        }
    }
    total
}

/// Permutation character of `G` on the left cosets of `H`.
pub fn coset_character(group: &[GroupElement], h: &Subgroup) -> Vec<usize> {
    let mut cosets: Vec<Vec<GroupElement>> = Vec::new();
    for &x in group {
        let mut c: Vec<_> = h.elements().iter().map(|&y| x.compose(y)).collect();
        c.sort();
        if !cosets.contains(&c) {
            cosets.push(c);
        }
    }
    group
        .iter()
        .map(|&g| {
            cosets
                .iter()
                .filter(|c| {
                    let mut moved: Vec<_> = c.iter().map(|&y| g.compose(y)).collect();
                    moved.sort();
                    &moved == *c
                })
                .count()
        })
        .collect()
}

// ---- property suites ----

pub fn norm_multiplicativity(cases: u32) -> Result<(), String> {
    run(cases, field_and_pair(), |(x, y)| {
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.norm(), x.norm() * y.norm());
        prop_assert_eq!(x.norm(), norm_by_resultant(&x));
        Ok(())
    })
}

pub fn inverse_roundtrip(cases: u32) -> Result<(), String> {
    let nonzero = proptest::sample::select(FIELD_CONSTANTS.to_vec())
        .prop_flat_map(element_in)
        .prop_filter("nonzero", |x| !x.is_zero());
    run(cases, nonzero, |x| {
        let inv = x.inverse().unwrap();
        prop_assert!(x.mul(&inv).unwrap().is_one());
        prop_assert_eq!(inv.inverse().unwrap(), x);
        Ok(())
    })
}

pub fn ring_axioms(cases: u32) -> Result<(), String> {
    let triple = proptest::sample::select(FIELD_CONSTANTS.to_vec())
        .prop_flat_map(|a| (element_in(a), element_in(a), element_in(a)));
    run(cases, triple, |(x, y, z)| {
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        prop_assert!(x.eval_poly(&x.char_poly()).is_zero());
        Ok(())
    })
}

/// Products of the `K'` generators with exponents in `-2..=2`.
fn unit_from_exponents(gens: &[FieldElement], inverses: &[FieldElement], e: &[i8]) -> FieldElement {
    let mut u = gens[0].field().one();
    for ((g, gi), &k) in gens.iter().zip(inverses).zip(e) {
        let base = if k < 0 { gi } else { g };
        u = u.mul(&base.pow(k.unsigned_abs() as u64)).unwrap();
    }
    u
}

pub fn residue_character_multiplicativity(pairs: u32) -> Result<(), String> {
    let data = k_prime_units();
    let gens = data.generators().to_vec();
    let inverses: Vec<_> = gens.iter().map(|g| g.inverse().unwrap()).collect();
    let field = data.field().clone();
    let chars: Vec<_> = K_PRIME_PRIMES
        .iter()
        .map(|&(p, r)| EvaluationCharacter::new(&field, p, r).unwrap())
        .collect();
    let exps = proptest::collection::vec(-2i8..=2, 4);
    run(pairs, (exps.clone(), exps), |(e, f)| {
        let u = unit_from_exponents(&gens, &inverses, &e);
        let v = unit_from_exponents(&gens, &inverses, &f);
        let uv = u.mul(&v).unwrap();
        for chi in &chars {
            let bu = quad_residue_bit(&u, chi).unwrap();
            let bv = quad_residue_bit(&v, chi).unwrap();
            prop_assert_eq!(quad_residue_bit(&uv, chi).unwrap(), bu ^ bv);
            prop_assert_eq!(quad_residue_bit(&u.mul(&u).unwrap(), chi).unwrap(), 0);
            prop_assert_eq!(Some(bu), residue_bit_by_enumeration(&u, chi.p(), chi.r()));
        }
        Ok(())
    })
}

/// All `2^16` matrices of size 4.
pub fn f2_exhaustive() -> Result<(), String> {
    for bits in 0u32..1 << 16 {
        let mut rows = [[0u8; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (bits >> (4 * i + j) & 1) as u8;
            }
        }
        let m = BitMatrix::from_rows(&rows.map(|r| r.to_vec())).unwrap();
        let expected = leibniz_det_mod2(&rows) == 1;
        if f2_is_nonsingular(&m).unwrap() != expected {
            return Err(format!("mismatch on {rows:?}"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum Move {
    Invert(usize),
    Negate(usize),
    /// `u_i <- u_i * u_j^(+-1)`
    Combine(usize, usize, bool),
    Swap(usize, usize),
}

fn moves() -> impl Strategy<Value = Vec<Move>> {
    let idx = 1usize..4;
    let one = prop_oneof![
        idx.clone().prop_map(Move::Invert),
        idx.clone().prop_map(Move::Negate),
        (idx.clone(), idx.clone(), any::<bool>())
            .prop_filter("distinct", |(i, j, _)| i != j)
            .prop_map(|(i, j, s)| Move::Combine(i, j, s)),
        (idx.clone(), idx).prop_map(|(i, j)| Move::Swap(i, j)),
    ];
    proptest::collection::vec(one, 1..4)
}

/// Regulator of `U0` for `a = -15` is unchanged by unimodular changes of the
/// free generators and by the choice of deleted coordinate.
pub fn regulator_invariance(cases: u32) -> Result<(), String> {
    let base = k_units();
    let (r0, roots) = regulator_with_escalation(&base, 192).map_err(|e| e.to_string())?;
    for deleted in 0..4 {
        let r = regulator_deleting(&base, &roots, deleted).map_err(|e| e.to_string())?;
        if !r.overlaps(&r0) {
            return Err(format!("deleting coordinate {deleted}: {r} vs {r0}"));
        }
    }
    run(cases, (moves(), 0usize..4), |(moves, deleted)| {
        let mut g = base.generators().to_vec();
        for m in &moves {
            match *m {
                Move::Invert(i) => g[i] = g[i].inverse().unwrap(),
                Move::Negate(i) => g[i] = g[i].neg(),
                Move::Combine(i, j, s) => {
                    let f = if s { g[j].clone() } else { g[j].inverse().unwrap() };
                    g[i] = g[i].mul(&f).unwrap();
                }
                Move::Swap(i, j) => g.swap(i, j),
            }
        }
        let changed = UnitData::new(base.field().clone(), g).unwrap();
        let r = regulator_deleting(&changed, &roots, deleted).unwrap();
        prop_assert!(r.overlaps(&r0), "{} vs {}", r, r0);
        Ok(())
    })
}

/// `R0` at 192, 384 and 768 bits: each ball contains the next.
pub fn ball_containment_under_doubling() -> Result<(), String> {
    let u = k_units();
    let balls: Vec<RealBall> = [192, 384, 768]
        .iter()
        .map(|&p| regulator_with_escalation(&u, p).map(|(r, _)| r))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for w in balls.windows(2) {
        if !w[0].contains(&w[1]) {
            return Err(format!("{} does not contain {}", w[0], w[1]));
        }
        if !(w[1].rad() < w[0].rad()) {
            return Err("radius did not shrink".into());
        }
    }
    let roots = complex_roots(u.field().a(), 192).map_err(|e| e.to_string())?;
    if roots.roots().len() != 8 || !balls[0].is_positive() {
        return Err("unexpected root set".into());
    }
    Ok(())
}

pub fn is_within(ball: &RealBall, center: &BigRational, tol: &BigRational) -> bool {
    let lo = ball.lower().to_rational();
    let hi = ball.upper().to_rational();
    (center - &lo).abs() <= *tol && (&hi - center).abs() <= *tol
}
