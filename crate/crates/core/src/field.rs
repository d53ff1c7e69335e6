//! Exact arithmetic in the octic fields `Q[X]/(X^8 - a)`.
//!
//! Elements are dense vectors of eight reduced rationals over the power basis
//! `1, t, ..., t^7` of the generator `t`. Irreducibility of `X^8 - a` is not
//! checked here; it follows from the admissibility test in [`crate::prover`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Degree of every field handled by this crate.
pub const DEGREE: usize = 8;

/// The field `Q[X]/(X^8 - a)` with a presentational generator symbol.
///
/// Equality compares only the defining constant; the symbol is cosmetic.
#[derive(Clone, Debug)]
pub struct NumberField {
    a: BigInt,
    symbol: String,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

impl Eq for NumberField {}

impl NumberField {
    pub fn new(a: impl Into<BigInt>) -> Result<Self> {
        Self::with_symbol(a, "x")
    }

    pub fn with_symbol(a: impl Into<BigInt>, symbol: &str) -> Result<Self> {
        let a = a.into();
        if a.is_zero() {
            return Err(Error::ZeroConstant);
        }
        let valid = !symbol.is_empty()
            && symbol.chars().next().is_some_and(|c| c.is_alphabetic())
            && symbol.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::InvalidArgument(format!(
                "generator symbol {symbol:?} is not an identifier"
            )));
        }
        Ok(Self {
            a,
            symbol: symbol.into(),
        })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_rational(self, BigRational::zero())
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_rational(self, BigRational::one())
    }

    /// The power-basis generator `t` with `t^8 = a`.
    pub fn generator(&self) -> FieldElement {
        let mut coeffs = zero_coeffs();
        coeffs[1] = BigRational::one();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn element(&self, coeffs: [BigRational; DEGREE]) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// Builds an element from a coefficient polynomial of any length,
    /// reducing powers `t^n` with `n >= 8` by `t^8 = a`.
    pub fn from_poly(&self, poly: &[BigRational]) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: self.reduce(poly.to_vec()),
        }
    }

    fn reduce(&self, mut poly: Vec<BigRational>) -> [BigRational; DEGREE] {
        let a = BigRational::from_integer(self.a.clone());
        for n in (DEGREE..poly.len()).rev() {
            if !poly[n].is_zero() {
                let carry = core::mem::take(&mut poly[n]) * &a;
                poly[n - DEGREE] += carry;
            }
        }
        poly.resize(DEGREE, BigRational::zero());
        let mut out = zero_coeffs();
        for (slot, c) in out.iter_mut().zip(poly) {
            *slot = c;
        }
        out
    }
}

/// An element `c0 + c1 t + ... + c7 t^7` of a [`NumberField`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: NumberField,
    coeffs: [BigRational; DEGREE],
}

pub(crate) fn zero_coeffs() -> [BigRational; DEGREE] {
    core::array::from_fn(|_| BigRational::zero())
}

impl FieldElement {
    pub fn from_rational(field: &NumberField, c: BigRational) -> Self {
        let mut coeffs = zero_coeffs();
        coeffs[0] = c;
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_integer(field: &NumberField, c: impl Into<BigInt>) -> Self {
        Self::from_rational(field, BigRational::from_integer(c.into()))
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational; DEGREE] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Returns the constant when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then_some(&self.coeffs[0])
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.a.to_string(),
                right: other.field.a.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(Self {
            field: self.field.clone(),
            coeffs: core::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(Self {
            field: self.field.clone(),
            coeffs: core::array::from_fn(|i| &self.coeffs[i] - &other.coeffs[i]),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: core::array::from_fn(|i| -&self.coeffs[i]),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: core::array::from_fn(|i| &self.coeffs[i] * c),
        }
    }

    /// Product in the power basis, using `t^n = a t^(n-8)` for `n >= 8`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        let mut prod = alloc::vec![BigRational::zero(); 2 * DEGREE - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Ok(Self {
            coeffs: self.field.reduce(prod),
            field: self.field.clone(),
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Matrix of multiplication by `self`: column `j` holds `self * t^j`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let a = BigRational::from_integer(self.field.a.clone());
        let mut m = alloc::vec![alloc::vec![BigRational::zero(); DEGREE]; DEGREE];
        // column j: coefficients of self * t^j, obtained by shifting the
        // previous column one place and folding t^8 back to a.
        let mut col: Vec<BigRational> = self.coeffs.to_vec();
        for j in 0..DEGREE {
            for (i, c) in col.iter().enumerate() {
                m[i][j] = c.clone();
            }
            let top = col.pop().expect("degree 8");
            col.insert(0, top * &a);
        }
        m
    }

    /// Multiplicative inverse, by solving `M_self * y = e_0` exactly.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.multiplication_matrix();
        let mut rhs = alloc::vec![BigRational::zero(); DEGREE];
        rhs[0] = BigRational::one();
        let y = solve(m, rhs).ok_or_else(|| {
            Error::Internal(format!(
                "multiplication matrix is singular; X^8 - ({}) is reducible",
                self.field.a
            ))
        })?;
        Ok(self.field.from_poly(&y))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        self.mul(&other.inverse()?)
    }

    /// Characteristic polynomial of the multiplication map, low degree first,
    /// monic of degree 8.
    pub fn char_poly(&self) -> Vec<BigRational> {
        char_poly(&self.multiplication_matrix())
    }

    /// Determinant of the multiplication matrix.
    pub fn norm(&self) -> BigRational {
        determinant(self.multiplication_matrix())
    }

    pub fn trace(&self) -> BigRational {
        self.multiplication_matrix()
            .iter()
            .enumerate()
            .map(|(i, row)| row[i].clone())
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn is_algebraic_integer(&self) -> bool {
        self.char_poly().iter().all(BigRational::is_integer)
    }

    pub fn is_unit(&self) -> bool {
        let n = self.norm();
        n.abs().is_one() && self.is_algebraic_integer()
    }

    /// Evaluates a rational polynomial (low degree first) at `self`.
    pub fn eval_poly(&self, poly: &[BigRational]) -> Self {
        let mut acc = self.field.zero();
        for c in poly.iter().rev() {
            acc = acc.mul(self).expect("same field");
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_element(self))
    }
}

/// Exact determinant by fraction Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Solves `m y = rhs` exactly; `None` if `m` is singular.
pub fn solve(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        rhs.swap(pivot, col);
        let p = m[col][col].clone();
        for c in col..n {
            m[col][c] /= &p;
        }
        rhs[col] /= &p;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some(rhs)
}

/// Characteristic polynomial `det(X I - m)` by the Faddeev-LeVerrier
/// recurrence, low degree first.
pub fn char_poly(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = alloc::vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux = alloc::vec![alloc::vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // aux <- m * aux + c_{n-k+1} I
        let mut next = mat_mul(m, &aux);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        aux = next;
        let prod = mat_mul(m, &aux);
        let trace = (0..n).fold(BigRational::zero(), |acc, i| acc + &prod[i][i]);
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
}

fn mat_mul(x: &[Vec<BigRational>], y: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = x.len();
    let mut out = alloc::vec![alloc::vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !y[k][j].is_zero() {
                    out[i][j] += &x[i][k] * &y[k][j];
                }
            }
        }
    }
    out
}

/// A list of unit generators of a field, torsion generator `-1` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitData {
    field: NumberField,
    generators: Vec<FieldElement>,
}

impl UnitData {
    pub fn new(field: NumberField, generators: Vec<FieldElement>) -> Result<Self> {
        for g in &generators {
            if g.field() != &field {
                return Err(Error::FieldMismatch {
                    left: field.a.to_string(),
                    right: g.field().a.to_string(),
                });
            }
        }
        Ok(Self { field, generators })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// Generators other than a leading `-1`.
    pub fn free_generators(&self) -> &[FieldElement] {
        match self.generators.first() {
            Some(g) if is_minus_one(g) => &self.generators[1..],
            _ => &self.generators,
        }
    }
}

pub(crate) fn is_minus_one(x: &FieldElement) -> bool {
    x.as_rational().is_some_and(|c| (-c).is_one())
}
