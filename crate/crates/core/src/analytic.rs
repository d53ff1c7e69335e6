//! Certified numerics for the fields `Q[X]/(X^8 - a)`: enclosures of the
//! complex roots, logarithmic embeddings of units, regulators of unit
//! subgroups, and recovery of a rational number from a narrow ball.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{ComplexBall, Dyadic, RealBall};
use crate::field::{FieldElement, UnitData, DEGREE};
use crate::{Error, Result};

/// Working precision used when none is requested.
pub const DEFAULT_PRECISION: u32 = 192;
/// Precision escalation stops here.
pub const MAX_PRECISION: u32 = 4096;

/// Numbers of real embeddings and of conjugate pairs of complex embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub r1: usize,
    pub r2: usize,
}

impl Signature {
    pub fn unit_rank(&self) -> usize {
        self.r1 + self.r2 - 1
    }
}

/// Signature of `Q[X]/(X^8 - a)`: two real roots when `a > 0`, none when
/// `a < 0`.
pub fn field_signature(a: &BigInt) -> Result<Signature> {
    if a.is_zero() {
        return Err(Error::ZeroConstant);
    }
    if a.is_positive() {
        let root = a.nth_root(8);
        if root.pow(8) == *a {
            return Err(Error::EighthPower(a.to_str_radix(10)));
        }
        Ok(Signature { r1: 2, r2: 3 })
    } else {
        Ok(Signature { r1: 0, r2: 4 })
    }
}

/// An archimedean place: a root enclosure and whether it is real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub root: ComplexBall,
    pub real: bool,
    /// Index of the complex-conjugate root in [`RootSet::roots`].
    pub conjugate: usize,
}

/// Disjoint enclosures of the eight roots of `X^8 - a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    a: BigInt,
    precision: u32,
    roots: Vec<ComplexBall>,
    embeddings: Vec<Embedding>,
}

impl RootSet {
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// All eight roots, ordered by argument in `(-pi, pi]`, then real part.
    pub fn roots(&self) -> &[ComplexBall] {
        &self.roots
    }

    /// One embedding per real root and per conjugate pair (the member with
    /// positive imaginary part), in root order.
    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }
}

fn seed_angles(a: &BigInt) -> Vec<f64> {
    let offset = if a.is_negative() { 1.0 } else { 0.0 };
    (0..DEGREE)
        .map(|k| {
            let theta = (2.0 * k as f64 + offset) * PI / DEGREE as f64;
            if theta > PI + 1e-9 {
                theta - 2.0 * PI
            } else {
                theta
            }
        })
        .collect()
}

/// Enclosures of the roots of `X^8 - a`, each certified to contain exactly
/// one root. Precision is doubled (up to [`MAX_PRECISION`]) until the
/// enclosures are pairwise disjoint.
pub fn complex_roots(a: &BigInt, precision: u32) -> Result<RootSet> {
    if a.is_zero() {
        return Err(Error::ZeroConstant);
    }
    let mut prec = precision.max(64);
    loop {
        match try_complex_roots(a, prec) {
            Some(set) => return Ok(set),
            None if prec < MAX_PRECISION => prec = (prec * 2).min(MAX_PRECISION),
            None => {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    what: "root enclosures overlap".into(),
                })
            }
        }
    }
}

fn pow8_minus_a(z: &ComplexBall, a: &RealBall) -> (ComplexBall, ComplexBall) {
    let z2 = z.mul(z);
    let z4 = z2.mul(&z2);
    let z7 = z4.mul(&z2).mul(z);
    let f = z7.mul(z);
    let f = ComplexBall::new(f.re.sub(a), f.im);
    let d = z7.mul_real(&RealBall::from_int(DEGREE as i64, z.precision()));
    (f, d)
}

fn try_complex_roots(a: &BigInt, prec: u32) -> Option<RootSet> {
    let wp = prec + 16;
    let a_ball = RealBall::from_int(a.clone(), wp);
    let a_f64 = Dyadic::from_int(a.clone()).to_f64();
    let modulus = libm::pow(a_f64.abs(), 1.0 / DEGREE as f64);
    // Newton roughly doubles the 50 correct bits of the seed per step.
    let mut steps = 2;
    while (40u64 << steps) < wp as u64 {
        steps += 1;
    }
    steps += 1;

    let mut roots = Vec::with_capacity(DEGREE);
    for theta in seed_angles(a) {
        let real = a.is_positive() && (theta == 0.0 || (theta - PI).abs() < 1e-9);
        let re = Dyadic::from_f64(modulus * libm::cos(theta))?;
        let im = if real {
            Dyadic::zero()
        } else {
            Dyadic::from_f64(modulus * libm::sin(theta))?
        };
        let mut z = ComplexBall::new(RealBall::exact(re, wp), RealBall::exact(im, wp));
        for _ in 0..steps {
            let (f, d) = pow8_minus_a(&z, &a_ball);
            z = z.sub(&f.div(&d)?).center();
        }
        // a disc of radius 8|f(z)|/|f'(z)| about z contains a root
        let (f, d) = pow8_minus_a(&z, &a_ball);
        let d_low = d.norm_sqr().lower();
        if !d_low.is_positive() {
            return None;
        }
        let num = f.norm_sqr().upper().mul(&Dyadic::from_int(64));
        let rho = num.div_ceil(&d_low, 64).sqrt_ceil(64);
        let ball = ComplexBall::new(
            RealBall::new(z.re.mid().clone(), rho.clone(), prec),
            RealBall::new(z.im.mid().clone(), rho, prec),
        );
        roots.push((theta, ball));
    }

    // Eight pairwise disjoint discs, each holding a root of a degree-8
    // polynomial, hold exactly one root each.
    for i in 0..DEGREE {
        for j in i + 1..DEGREE {
            if roots[i].1.overlaps(&roots[j].1) {
                return None;
            }
        }
    }

    roots.sort_by(|(t1, b1), (t2, b2)| {
        t1.total_cmp(t2)
            .then_with(|| b1.re.mid().to_f64().total_cmp(&b2.re.mid().to_f64()))
    });
    let roots: Vec<ComplexBall> = roots.into_iter().map(|(_, b)| b).collect();

    let mut embeddings = Vec::new();
    for (i, z) in roots.iter().enumerate() {
        let conj = z.conj();
        let conjugate = roots.iter().position(|w| w.overlaps(&conj))?;
        if conjugate == i {
            // a disc symmetric about the real axis holding one root holds a real root
            if !z.im.mid().is_zero() {
                return None;
            }
            embeddings.push(Embedding {
                root: z.clone(),
                real: true,
                conjugate,
            });
        } else if z.im.is_positive() {
            embeddings.push(Embedding {
                root: z.clone(),
                real: false,
                conjugate,
            });
        }
    }
    Some(RootSet {
        a: a.clone(),
        precision: prec,
        roots,
        embeddings,
    })
}

/// Evaluates the coefficient polynomial of `x` at a complex ball.
pub fn evaluate(x: &FieldElement, z: &ComplexBall) -> ComplexBall {
    let prec = z.precision();
    let mut acc = ComplexBall::from_real(RealBall::zero(prec));
    for c in x.coeffs().iter().rev() {
        acc = acc.mul(z);
        acc = ComplexBall::new(acc.re.add(&RealBall::from_rational(c, prec)), acc.im);
    }
    acc
}

/// `(d_j log |sigma_j(u)|)_j` with `d_j = 1` for real and `2` for complex
/// places.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogVector {
    pub entries: Vec<RealBall>,
}

impl LogVector {
    pub fn sum(&self) -> RealBall {
        let prec = self.entries.first().map_or(64, RealBall::precision);
        self.entries
            .iter()
            .fold(RealBall::zero(prec), |acc, e| acc.add(e))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| x.add(y))
                .collect(),
        }
    }
}

pub fn log_embedding(u: &FieldElement, roots: &RootSet) -> Result<LogVector> {
    if u.field().a() != roots.a() {
        return Err(Error::FieldMismatch {
            left: u.field().a().to_str_radix(10),
            right: roots.a().to_str_radix(10),
        });
    }
    if u.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let entries = roots
        .embeddings
        .iter()
        .map(|emb| {
            let value = evaluate(u, &emb.root);
            let log_abs_sq = value.norm_sqr().ln().ok_or_else(|| Error::PrecisionExhausted {
                bits: roots.precision,
                what: format!("|{u}| at an embedding is not separated from zero"),
            })?;
            // log|x|^2 = 2 log|x|, which is already the complex weight
            Ok(if emb.real {
                log_abs_sq.mul_pow2(-1)
            } else {
                log_abs_sq
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogVector { entries })
}

/// Determinant by cofactor expansion along the first row (sizes here are at
/// most 4).
pub fn ball_determinant(m: &[Vec<RealBall>], prec: u32) -> RealBall {
    let n = m.len();
    match n {
        0 => RealBall::one(prec),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = RealBall::zero(prec);
            for col in 0..n {
                let minor: Vec<Vec<RealBall>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].mul(&ball_determinant(&minor, prec));
                acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Regulator of the subgroup generated by `units` (a leading `-1` is
/// skipped), deleting the last logarithmic coordinate.
pub fn regulator(units: &UnitData, roots: &RootSet) -> Result<RealBall> {
    let places = roots.embeddings.len();
    regulator_deleting(units, roots, places - 1)
}

/// Regulator with an arbitrary deleted coordinate.
pub fn regulator_deleting(units: &UnitData, roots: &RootSet, deleted: usize) -> Result<RealBall> {
    let places = roots.embeddings.len();
    let rank = places - 1;
    let free = units.free_generators();
    if free.len() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found: free.len(),
        });
    }
    if deleted >= places {
        return Err(Error::InvalidArgument(format!(
            "coordinate {deleted} out of range for {places} places"
        )));
    }
    let rows = free
        .iter()
        .map(|u| {
            let v = log_embedding(u, roots)?;
            Ok(v.entries
                .into_iter()
                .enumerate()
                .filter(|&(j, _)| j != deleted)
                .map(|(_, x)| x)
                .collect())
        })
        .collect::<Result<Vec<Vec<RealBall>>>>()?;
    Ok(ball_determinant(&rows, roots.precision).abs())
}

/// Regulator at `precision`, doubling the precision while a logarithm
/// cannot be separated from zero. Returns the ball and the roots used.
pub fn regulator_with_escalation(units: &UnitData, precision: u32) -> Result<(RealBall, RootSet)> {
    let mut prec = precision;
    loop {
        let roots = complex_roots(units.field().a(), prec)?;
        match regulator(units, &roots) {
            Ok(r) => return Ok((r, roots)),
            Err(Error::PrecisionExhausted { .. }) if prec < MAX_PRECISION => {
                prec = (roots.precision() * 2).min(MAX_PRECISION);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Closest rational to `x` with denominator at most `max_den`, by the
/// continued-fraction expansion and its last semiconvergent.
pub fn best_approximation(x: &BigRational, max_den: &BigInt) -> BigRational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = core::mem::replace(&mut d, r);
    }
    let k = (max_den - &q0).div_floor(&q1);
    let semi = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = BigRational::new(p1, q1);
    if (&conv - x).abs() <= (&semi - x).abs() {
        conv
    } else {
        semi
    }
}

/// Neighbours of `p/q` in the Farey sequence of order `n` (`q <= n`).
pub fn farey_neighbors(x: &BigRational, n: &BigInt) -> (BigRational, BigRational) {
    let (p, q) = (x.numer(), x.denom());
    let b0 = if q.is_one() {
        BigInt::zero()
    } else {
        // p * b0 = 1 (mod q)
        let e = p.extended_gcd(q);
        e.x.mod_floor(q)
    };
    let d0 = (q - &b0).mod_floor(q);
    let stretch = |start: &BigInt| {
        let start = if start.is_zero() { q.clone() } else { start.clone() };
        &start + (n - &start).div_floor(q) * q
    };
    let b = stretch(&b0);
    let d = stretch(&d0);
    let left = BigRational::new((p * &b - 1) / q, b);
    let right = BigRational::new((p * &d + 1) / q, d);
    (left, right)
}

/// The unique rational with denominator at most `max_den` inside `x`.
///
/// Uniqueness is certified by checking that both Farey neighbours of the
/// candidate at order `max_den` lie outside the ball.
pub fn snap_to_rational(x: &RealBall, max_den: &BigInt) -> Result<BigRational> {
    if !max_den.is_positive() {
        return Err(Error::InvalidArgument("max_den must be at least 1".into()));
    }
    let candidate = best_approximation(&x.mid().to_rational(), max_den);
    if !x.contains_rational(&candidate) {
        return Err(Error::NoRational {
            max_den: max_den.to_str_radix(10),
        });
    }
    let (left, right) = farey_neighbors(&candidate, max_den);
    for other in [left, right] {
        if x.contains_rational(&other) {
            return Err(Error::AmbiguousRational {
                first: crate::parse::format_rational(&candidate),
                second: crate::parse::format_rational(&other),
            });
        }
    }
    Ok(candidate)
}

/// `floor(sup(r0) / reg_lower_bound)`, an upper bound for `[U : U0]` when the
/// full regulator is at least `reg_lower_bound`.
pub fn index_upper_bound(r0: &RealBall, reg_lower_bound: &BigRational) -> Result<BigInt> {
    if !reg_lower_bound.is_positive() {
        return Err(Error::InvalidArgument("regulator lower bound must be positive".into()));
    }
    if !r0.is_positive() {
        return Err(Error::InvalidArgument("regulator ball must be positive".into()));
    }
    Ok((r0.upper().to_rational() / reg_lower_bound).floor().to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use alloc::vec;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn signatures() {
        assert_eq!(field_signature(&(-15).into()).unwrap(), Signature { r1: 0, r2: 4 });
        assert_eq!(field_signature(&(-15).into()).unwrap().unit_rank(), 3);
        let s = field_signature(&65.into()).unwrap();
        assert_eq!((s.r1, s.r2, s.unit_rank()), (2, 3, 4));
        assert_eq!(field_signature(&0.into()), Err(Error::ZeroConstant));
        assert!(matches!(field_signature(&256.into()), Err(Error::EighthPower(_))));
        assert!(field_signature(&(-256).into()).is_ok());
    }

    #[test]
    fn roots_of_minus_fifteen() {
        let set = complex_roots(&(-15).into(), 128).unwrap();
        let modulus = libm::pow(15.0, 0.125);
        for (k, z) in set.roots().iter().enumerate() {
            let (x, y) = (z.re.mid().to_f64(), z.im.mid().to_f64());
            assert!((libm::hypot(x, y) - modulus).abs() < 1e-12);
            let expected = (2.0 * k as f64 - 7.0) * PI / 8.0;
            assert!((libm::atan2(y, x) - expected).abs() < 1e-12);
        }
        assert_eq!(set.embeddings().len(), 4);
        assert!(set.embeddings().iter().all(|e| !e.real));
    }

    #[test]
    fn roots_of_256_include_two() {
        let set = complex_roots(&256.into(), 96).unwrap();
        let reals: Vec<_> = set.embeddings().iter().filter(|e| e.real).collect();
        assert_eq!(reals.len(), 2);
        assert!(set.roots().iter().any(|z| z.re.contains_rational(&q(2, 1)) && z.im.contains_zero()));
        assert!(set.roots().iter().any(|z| z.re.contains_rational(&q(-2, 1)) && z.im.contains_zero()));
    }

    #[test]
    fn snap_examples() {
        let ball = |m: BigRational, r: BigRational| {
            let mid = Dyadic::from_rational_floor(&m, 80);
            let rad = Dyadic::from_rational_ceil(&(r + (&m - mid.to_rational()).abs()), 64);
            RealBall::new(mid, rad, 80)
        };
        let b = ball(q(20003, 10000), q(1, 1000));
        assert_eq!(snap_to_rational(&b, &500.into()).unwrap(), q(2, 1));
        let b = ball(q(1, 2), q(1, 1_000_000_000));
        assert_eq!(snap_to_rational(&b, &3.into()).unwrap(), q(1, 2));
        let b = ball(q(1, 2), q(3, 10));
        assert!(matches!(
            snap_to_rational(&b, &10.into()),
            Err(Error::AmbiguousRational { .. })
        ));
        let b = ball(q(1, 2) + q(1, 7), q(1, 1000));
        assert!(matches!(
            snap_to_rational(&b, &3.into()),
            Err(Error::NoRational { .. })
        ));
    }

    #[test]
    fn farey_neighbors_by_enumeration() {
        let n = BigInt::from(12);
        let mut all = Vec::new();
        for den in 1..=12i64 {
            for num in -30..=30i64 {
                all.push(q(num, den));
            }
        }
        all.sort();
        all.dedup();
        let inside = |x: &BigRational| x.abs() <= q(2, 1);
        for w in all.windows(3).filter(|w| inside(&w[1])) {
            let (l, r) = farey_neighbors(&w[1], &n);
            assert_eq!((l, r), (w[0].clone(), w[2].clone()), "around {}", w[1]);
        }
    }

    #[test]
    fn index_bounds() {
        let exact = |n: i64, d: i64| RealBall::from_rational(&q(n, d), 64);
        let lb = q(296, 1000);
        assert_eq!(index_upper_bound(&exact(133, 1), &lb).unwrap(), 449.into());
        assert_eq!(index_upper_bound(&exact(6632, 100), &lb).unwrap(), 224.into());
        assert_eq!(index_upper_bound(&exact(296, 1000), &lb).unwrap(), 1.into());
        assert!(index_upper_bound(&exact(1, 1), &q(0, 1)).is_err());
        assert!(index_upper_bound(&exact(-1, 1), &lb).is_err());
    }

    #[test]
    fn log_embedding_of_one_and_inverse() {
        let k = NumberField::new(-15).unwrap();
        let roots = complex_roots(k.a(), 128).unwrap();
        let v = log_embedding(&k.one(), &roots).unwrap();
        assert!(v.entries.iter().all(RealBall::contains_zero));
        let t = k.generator();
        let u = t.add(&k.one()).unwrap().div(&t.sub(&k.one()).unwrap()).unwrap();
        let lu = log_embedding(&u, &roots).unwrap();
        let li = log_embedding(&u.inverse().unwrap(), &roots).unwrap();
        assert!(lu.add(&li).entries.iter().all(RealBall::contains_zero));
        assert!(lu.sum().contains_zero());
        assert!(log_embedding(&k.zero(), &roots).is_err());
    }

    #[test]
    fn dependent_generators_have_zero_regulator() {
        let k = NumberField::new(-15).unwrap();
        let t = k.generator();
        let one = k.one();
        let u = t.add(&one).unwrap().div(&t.sub(&one).unwrap()).unwrap();
        let v = t.pow(2).add(&t).unwrap().add(&FieldElement::from_integer(&k, 2)).unwrap()
            .div(&t.add(&one).unwrap()).unwrap();
        let uv = u.mul(&v).unwrap();
        let units = UnitData::new(k.clone(), vec![one.neg(), u, v, uv]).unwrap();
        let roots = complex_roots(k.a(), 128).unwrap();
        assert!(regulator(&units, &roots).unwrap().contains_zero());
        let short = UnitData::new(k.clone(), vec![one.neg()]).unwrap();
        assert_eq!(
            regulator(&short, &roots),
            Err(Error::RankMismatch { expected: 3, found: 0 })
        );
    }
}
