//! Computations modulo small primes.
//!
//! * residue degrees of `X^8 - a` over `F_p` (distinct-degree factorization),
//! * degree-one evaluation characters `t -> r (mod p)` with `r^8 = a`,
//! * quadratic residue bits of units at such characters (Euler's criterion),
//! * rank over `F_2` of the resulting bit matrices.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::field::{FieldElement, NumberField, UnitData};
use crate::{Error, Result};

/// `x mod p` for a big integer, in `[0, p)`.
pub fn big_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue below p")
}

fn mul_mod(x: u64, y: u64, p: u64) -> u64 {
    ((x as u128 * y as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime, `None` for zero.
pub fn inv_mod(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    (x != 0).then(|| pow_mod(x, p - 2, p))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = alloc::vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| is_p.then_some(k as u64))
        .collect()
}

/// Dense polynomial over `F_p`, low degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<u64>);

impl Poly {
    fn trimmed(mut v: Vec<u64>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Self(v)
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn sub(&self, other: &Self, p: u64) -> Self {
        let n = self.0.len().max(other.0.len());
        let v = (0..n)
            .map(|i| {
                let x = self.0.get(i).copied().unwrap_or(0);
                let y = other.0.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        Self::trimmed(v)
    }

    fn mul(&self, other: &Self, p: u64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self(Vec::new());
        }
        let mut v = alloc::vec![0u64; self.0.len() + other.0.len() - 1];
        for (i, &x) in self.0.iter().enumerate() {
            for (j, &y) in other.0.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        Self::trimmed(v)
    }

    /// Quotient and remainder by a nonzero divisor.
    fn div_rem(&self, divisor: &Self, p: u64) -> (Self, Self) {
        let dd = divisor.degree().expect("nonzero divisor");
        let lead_inv = inv_mod(divisor.0[dd], p).expect("nonzero leading coefficient");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Self(Vec::new()), Self::trimmed(rem));
        }
        let mut quot = alloc::vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = mul_mod(rem[k + dd], lead_inv, p);
            quot[k] = c;
            if c != 0 {
                for (j, &d) in divisor.0.iter().enumerate() {
                    rem[k + j] = (rem[k + j] + p - mul_mod(c, d, p)) % p;
                }
            }
        }
        rem.truncate(dd);
        (Self::trimmed(quot), Self::trimmed(rem))
    }

    fn rem(&self, divisor: &Self, p: u64) -> Self {
        self.div_rem(divisor, p).1
    }

    fn monic(&self, p: u64) -> Self {
        match self.0.last() {
            None => self.clone(),
            Some(&lead) => {
                let inv = inv_mod(lead, p).expect("nonzero");
                Self(self.0.iter().map(|&c| mul_mod(c, inv, p)).collect())
            }
        }
    }

    fn gcd(&self, other: &Self, p: u64) -> Self {
        let (mut x, mut y) = (self.clone(), other.clone());
        while !y.is_zero() {
            let r = x.rem(&y, p);
            x = y;
            y = r;
        }
        x.monic(p)
    }

    fn pow_mod(&self, mut exp: u64, modulus: &Self, p: u64) -> Self {
        let mut base = self.rem(modulus, p);
        let mut acc = Self::trimmed(alloc::vec![1]).rem(modulus, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base, p).rem(modulus, p);
            }
            base = base.mul(&base, p).rem(modulus, p);
            exp >>= 1;
        }
        acc
    }
}

/// Degrees of the irreducible factors of `X^8 - a` over `F_p`, ascending.
///
/// Requires `p` prime with `p ∤ 2a`, so the polynomial is squarefree.
pub fn poly_factor_degrees(a: &BigInt, p: u64) -> Result<Vec<usize>> {
    if !is_prime(p) {
        return Err(Error::NotOddPrime { p });
    }
    if p == 2 || big_mod(a, p) == 0 {
        return Err(Error::RamifiedPrime { p });
    }
    let mut coeffs = alloc::vec![0u64; 9];
    coeffs[0] = (p - big_mod(a, p)) % p;
    coeffs[8] = 1;
    Ok(distinct_degree_degrees(Poly::trimmed(coeffs), p))
}

fn distinct_degree_degrees(mut f: Poly, p: u64) -> Vec<usize> {
    let x = Poly::trimmed(alloc::vec![0, 1]);
    let mut degrees = Vec::new();
    let mut h = x.clone();
    let mut d = 1;
    while let Some(n) = f.degree() {
        if n == 0 {
            break;
        }
        if 2 * d > n {
            degrees.push(n);
            break;
        }
        h = h.pow_mod(p, &f, p);
        let g = h.sub(&x, p).gcd(&f, p);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 {
            degrees.extend(core::iter::repeat_n(d, gd / d));
            f = f.div_rem(&g, p).0;
            h = h.rem(&f, p);
        }
        d += 1;
    }
    degrees.sort_unstable();
    degrees
}

/// Residue-degree comparison at one unramified prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeComparison {
    pub p: u64,
    pub degrees_left: Vec<usize>,
    pub degrees_right: Vec<usize>,
}

impl PrimeComparison {
    pub fn agrees(&self) -> bool {
        self.degrees_left == self.degrees_right
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingReport {
    pub a: BigInt,
    pub a2: BigInt,
    pub bound: u64,
    /// Odd primes `p <= bound` with `p ∤ 2 a a2`, ascending.
    pub primes: Vec<PrimeComparison>,
}

impl SplittingReport {
    pub fn all_agree(&self) -> bool {
        self.primes.iter().all(PrimeComparison::agrees)
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &PrimeComparison> {
        self.primes.iter().filter(|c| !c.agrees())
    }
}

/// Compares the residue degrees of `X^8 - a` and `X^8 - a2` at every odd
/// prime up to `bound` that divides neither constant.
pub fn compare_splitting(a: &BigInt, a2: &BigInt, bound: u64) -> Result<SplittingReport> {
    if bound < 3 {
        return Err(Error::InvalidArgument("splitting bound must be at least 3".into()));
    }
    if a.is_zero() || a2.is_zero() {
        return Err(Error::ZeroConstant);
    }
    let mut primes = Vec::new();
    for p in primes_up_to(bound).into_iter().filter(|&p| p > 2) {
        if big_mod(a, p) == 0 || big_mod(a2, p) == 0 {
            continue;
        }
        primes.push(PrimeComparison {
            p,
            degrees_left: poly_factor_degrees(a, p)?,
            degrees_right: poly_factor_degrees(a2, p)?,
        });
    }
    Ok(SplittingReport {
        a: a.clone(),
        a2: a2.clone(),
        bound,
        primes,
    })
}

/// The ring map `Z[t] -> F_p`, `t -> r`, with `r^8 = a (mod p)`.
///
/// `r` need not be a simple root: `(3, 0)` for `a = -240` is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvaluationCharacter {
    p: u64,
    r: u64,
    a: BigInt,
}

impl EvaluationCharacter {
    pub fn new(field: &NumberField, p: u64, r: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime { p });
        }
        if r >= p || pow_mod(r, 8, p) != big_mod(field.a(), p) {
            return Err(Error::NotARoot { p, r });
        }
        Ok(Self {
            p,
            r,
            a: field.a().clone(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
}

impl fmt::Display for EvaluationCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.r)
    }
}

/// All characters `(p, r)` with `3 <= p <= bound`, sorted by `(p, r)`.
pub fn find_degree_one_primes(field: &NumberField, bound: u64) -> Vec<EvaluationCharacter> {
    let mut out = Vec::new();
    for p in primes_up_to(bound).into_iter().filter(|&p| p > 2) {
        let target = big_mod(field.a(), p);
        for r in 0..p {
            if pow_mod(r, 8, p) == target {
                out.push(EvaluationCharacter {
                    p,
                    r,
                    a: field.a().clone(),
                });
            }
        }
    }
    out
}

/// Image of `x` under the character, i.e. its coefficient polynomial at `r`.
pub fn reduce_mod_prime(x: &FieldElement, chi: &EvaluationCharacter) -> Result<u64> {
    if x.field().a() != chi.a() {
        return Err(Error::FieldMismatch {
            left: x.field().a().to_string(),
            right: chi.a().to_string(),
        });
    }
    let (p, r) = (chi.p, chi.r);
    let mut acc = 0u64;
    for c in x.coeffs().iter().rev() {
        let den_inv = inv_mod(big_mod(c.denom(), p), p).ok_or(Error::NotIntegral { p, r })?;
        let value = mul_mod(big_mod(c.numer(), p), den_inv, p);
        acc = (mul_mod(acc, r, p) + value) % p;
    }
    Ok(acc)
}

/// `0` if `u` reduces to a nonzero square modulo the character, `1` if it
/// reduces to a non-square.
pub fn quad_residue_bit(u: &FieldElement, chi: &EvaluationCharacter) -> Result<u8> {
    let t = reduce_mod_prime(u, chi)?;
    if t == 0 {
        return Err(Error::ZeroReduction { p: chi.p, r: chi.r });
    }
    Ok(if pow_mod(t, (chi.p - 1) / 2, chi.p) == 1 {
        0
    } else {
        1
    })
}

/// A matrix over `F_2` with at most 64 columns, one `u64` per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub const MAX_COLS: usize = 64;

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= Self::MAX_COLS, "at most 64 columns");
        Self {
            rows,
            cols,
            data: alloc::vec![0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if cols > Self::MAX_COLS {
            return Err(Error::InvalidArgument("more than 64 columns".into()));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidArgument("ragged bit matrix".into()));
            }
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::InvalidArgument("entries must be 0 or 1".into()));
                }
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        assert!(i < self.rows && j < self.cols);
        ((self.data[i] >> j) & 1) as u8
    }

    pub fn set(&mut self, i: usize, j: usize, bit: u8) {
        assert!(i < self.rows && j < self.cols);
        if bit & 1 == 1 {
            self.data[i] |= 1 << j;
        } else {
            self.data[i] &= !(1 << j);
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Rank over `F_2` by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let bit = 1u64 << col;
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row & bit != 0 {
                    *row ^= pivot_row;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn f2_is_nonsingular(m: &BitMatrix) -> Result<bool> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(m.rank() == m.rows)
}

/// Entry `(i, j)` is the residue bit of generator `i` at character `j`.
pub fn residue_matrix(units: &UnitData, primes: &[EvaluationCharacter]) -> Result<BitMatrix> {
    let gens = units.generators();
    if primes.len() > BitMatrix::MAX_COLS {
        return Err(Error::InvalidArgument("more than 64 primes".into()));
    }
    let mut m = BitMatrix::zeros(gens.len(), primes.len());
    for (i, u) in gens.iter().enumerate() {
        for (j, chi) in primes.iter().enumerate() {
            m.set(i, j, quad_residue_bit(u, chi)?);
        }
    }
    Ok(m)
}

/// Parses a `p:r,p:r,...` list and validates every pair against `field`.
pub fn parse_prime_list(text: &str, field: &NumberField) -> Result<Vec<EvaluationCharacter>> {
    let bad = |item: &str| Error::Parse {
        pos: 0,
        msg: alloc::format!("expected p:r, found {item:?}"),
    };
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (p, r) = item.split_once(':').ok_or_else(|| bad(item))?;
            let p: u64 = p.trim().parse().map_err(|_| bad(item))?;
            let r: u64 = r.trim().parse().map_err(|_| bad(item))?;
            EvaluationCharacter::new(field, p, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;
    use alloc::vec;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn sieve_matches_trial_division() {
        let sieved = primes_up_to(200);
        let trial: Vec<u64> = (0..=200).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, trial);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn degrees_of_small_cases() {
        // X^8 - 1 over F_17 splits completely (8 | 16)
        assert_eq!(poly_factor_degrees(&big(1), 17).unwrap(), vec![1; 8]);
        // X^8 - 3 over F_5: 3 has order 4, so roots have order 32, degree 8
        assert_eq!(poly_factor_degrees(&big(3), 5).unwrap(), vec![8]);
        assert_eq!(poly_factor_degrees(&big(-15), 2), Err(Error::RamifiedPrime { p: 2 }));
        assert_eq!(poly_factor_degrees(&big(-15), 5), Err(Error::RamifiedPrime { p: 5 }));
        assert_eq!(poly_factor_degrees(&big(-15), 9), Err(Error::NotOddPrime { p: 9 }));
    }

    #[test]
    fn known_characters_are_found() {
        let k = NumberField::new(-240).unwrap();
        let found = find_degree_one_primes(&k, 50);
        for (p, r) in [(3, 0), (19, 8), (23, 9), (47, 16)] {
            assert!(found.iter().any(|c| c.p() == p && c.r() == r), "({p},{r})");
        }
        assert!(find_degree_one_primes(&k, 2).is_empty());
        assert!(found.windows(2).all(|w| (w[0].p, w[0].r) < (w[1].p, w[1].r)));
    }

    #[test]
    fn reduction_and_bits() {
        let k = NumberField::with_symbol(-240, "b").unwrap();
        let chi = EvaluationCharacter::new(&k, 3, 0).unwrap();
        let u = parse_element("(b^6 + 2*b^4 - 4*b^2 - 56)/16", &k).unwrap();
        assert_eq!(reduce_mod_prime(&u, &chi).unwrap(), 1);
        assert_eq!(reduce_mod_prime(&k.one(), &chi).unwrap(), 1);
        assert_eq!(quad_residue_bit(&k.one(), &chi).unwrap(), 0);
        assert_eq!(quad_residue_bit(&k.one().neg(), &chi).unwrap(), 1);
        let third = parse_element("b/3", &k).unwrap();
        assert_eq!(
            reduce_mod_prime(&third, &chi),
            Err(Error::NotIntegral { p: 3, r: 0 })
        );
        assert_eq!(
            quad_residue_bit(&k.generator(), &chi),
            Err(Error::ZeroReduction { p: 3, r: 0 })
        );
    }

    #[test]
    fn character_validation() {
        let k = NumberField::new(-240).unwrap();
        assert!(EvaluationCharacter::new(&k, 19, 8).is_ok());
        assert_eq!(EvaluationCharacter::new(&k, 19, 7), Err(Error::NotARoot { p: 19, r: 7 }));
        assert_eq!(EvaluationCharacter::new(&k, 2, 0), Err(Error::NotOddPrime { p: 2 }));
        assert_eq!(EvaluationCharacter::new(&k, 21, 0), Err(Error::NotOddPrime { p: 21 }));
        let parsed = parse_prime_list("3:0, 19:8,23:9,47:16", &k).unwrap();
        assert_eq!(parsed.len(), 4);
        assert_eq!(parsed[3].to_string(), "47:16");
        assert!(parse_prime_list("3-0", &k).is_err());
    }

    #[test]
    fn small_matrices() {
        let k = NumberField::new(-240).unwrap();
        let chi = EvaluationCharacter::new(&k, 3, 0).unwrap();
        let minus_one = UnitData::new(k.clone(), vec![k.one().neg()]).unwrap();
        let m = residue_matrix(&minus_one, core::slice::from_ref(&chi)).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1]]);
        let ones = UnitData::new(k.clone(), vec![k.one(); 4]).unwrap();
        let primes = find_degree_one_primes(&k, 50);
        let z = residue_matrix(&ones, &primes[..4]).unwrap();
        assert_eq!(z, BitMatrix::zeros(4, 4));
        assert!(f2_is_nonsingular(&BitMatrix::identity(4)).unwrap());
        assert!(!f2_is_nonsingular(&BitMatrix::zeros(4, 4)).unwrap());
        assert!(f2_is_nonsingular(&BitMatrix::zeros(2, 3)).is_err());
    }
}
