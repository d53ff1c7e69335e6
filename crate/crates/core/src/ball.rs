//! Midpoint-radius ("ball") arithmetic over dyadic numbers.
//!
//! A [`RealBall`] stands for the closed interval `[mid - rad, mid + rad]`.
//! Midpoints are rounded to the working precision; the exact rounding error
//! is added to the radius, and radii are rounded upward to [`RAD_BITS`]
//! bits. Every operation therefore returns a ball containing every result
//! obtainable from points of its inputs.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Mantissa bits kept in radii.
pub const RAD_BITS: u64 = 64;

/// The exact number `man * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Self { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    /// Exact conversion; `None` for non-finite input.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Some(Self::new(BigInt::from(man) * sign, exp))
    }

    fn normalize(&mut self) {
        match self.man.trailing_zeros() {
            None => self.exp = 0,
            Some(tz) if tz > 0 => {
                self.man >>= tz;
                self.exp += tz as i64;
            }
            Some(_) => {}
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let x = &self.man << (self.exp - exp) as usize;
        let y = &other.man << (other.exp - exp) as usize;
        Self::new(x + y, exp)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// Position of the leading bit: `2^(top-1) <= |self| < 2^top`.
    fn top(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    /// Largest dyadic with at most `prec` mantissa bits that is `<= self`.
    pub fn round_floor(&self, prec: u64) -> Self {
        let bits = self.man.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        // BigInt >> rounds toward negative infinity.
        Self::new(&self.man >> shift, self.exp + shift as i64)
    }

    /// Smallest dyadic with at most `prec` mantissa bits that is `>= self`.
    pub fn round_ceil(&self, prec: u64) -> Self {
        self.neg().round_floor(prec).neg()
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Largest dyadic with `prec` significant bits that is `<= q`.
    pub fn from_rational_floor(q: &BigRational, prec: u64) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let num = q.numer();
        let den = q.denom();
        // choose s with num * 2^s / den having about prec + 1 bits
        let s = prec as i64 + 1 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if s >= 0 {
            (num << s as usize, den.clone())
        } else {
            (num.clone(), den << (-s) as usize)
        };
        Self::new(n.div_floor(&d), -s).round_floor(prec)
    }

    pub fn from_rational_ceil(q: &BigRational, prec: u64) -> Self {
        Self::from_rational_floor(&-q, prec).neg()
    }

    /// Upper bound for `self / other`, both positive.
    pub fn div_ceil(&self, other: &Self, prec: u64) -> Self {
        Self::from_rational_ceil(&(self.to_rational() / other.to_rational()), prec)
    }

    /// Upper bound for `sqrt(self)`, `self >= 0`.
    pub fn sqrt_ceil(&self, prec: u64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        // scale so the radicand has an even exponent and about 2*prec bits
        let mut e = self.exp - 2 * prec as i64 - 2;
        if e.rem_euclid(2) != 0 {
            e -= 1;
        }
        let scaled = &self.man << (self.exp - e) as usize;
        let mut root = scaled.sqrt();
        if &root * &root < scaled {
            root += 1;
        }
        Self::new(root, e / 2).round_ceil(prec)
    }

    /// Nearest `f64`, for seeds and ordering only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let shift = bits.saturating_sub(60);
        let m = &self.man >> shift;
        let m: i64 = m.try_into().expect("fits in 60 bits");
        (m as f64) * libm::pow(2.0, (self.exp + shift as i64) as f64)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).man.sign().cmp(&Sign::NoSign)
    }
}

/// A real interval `[mid - rad, mid + rad]` with `prec`-bit midpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl RealBall {
    /// Ball from a midpoint (rounded to `prec` bits) and a radius (rounded up).
    pub fn new(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        let rounded = mid.round_floor(prec as u64);
        let err = mid.sub(&rounded);
        Self {
            mid: rounded,
            rad: rad.add(&err).round_ceil(RAD_BITS),
            prec,
        }
    }

    pub fn exact(x: Dyadic, prec: u32) -> Self {
        Self::new(x, Dyadic::zero(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Dyadic::from_int(1), prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::exact(Dyadic::from_int(n), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let mid = Dyadic::from_rational_floor(q, prec as u64);
        let err = q - mid.to_rational();
        Self {
            rad: Dyadic::from_rational_ceil(&err, RAD_BITS),
            mid,
            prec,
        }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same ball re-rounded for a new working precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::new(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Upper bound for `|x|` over the ball.
    pub fn mag(&self) -> Dyadic {
        self.mid.abs().add(&self.rad)
    }

    /// Lower bound for `|x|` over the ball (zero when the ball meets zero).
    pub fn mig(&self) -> Dyadic {
        let m = self.mid.abs().sub(&self.rad);
        if m.is_negative() {
            Dyadic::zero()
        } else {
            m
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let lo = self.lower().to_rational();
        let hi = self.upper().to_rational();
        &lo <= q && q <= &hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    fn working_prec(&self, other: &Self) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn neg(&self) -> Self {
        Self {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            // [0, mag] as a ball
            let m = self.mag().mul_pow2(-1);
            return Self::new(m.clone(), m, self.prec);
        }
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.mid.add(&other.mid),
            self.rad.add(&other.rad),
            self.working_prec(other),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.mid.sub(&other.mid),
            self.rad.add(&other.rad),
            self.working_prec(other),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Self::new(self.mid.mul(&other.mid), rad, self.working_prec(other))
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
            prec: self.prec,
        }
    }

    /// `1/x`; `None` when the ball contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let m = self.mid.abs();
        // |1/x - 1/m| <= r / (|m| (|m| - r)) for |x - m| <= r < |m|
        let den = m.mul(&m.sub(&self.rad));
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            self.rad.div_ceil(&den, RAD_BITS)
        };
        let q = BigRational::one() / self.mid.to_rational();
        let mid = Dyadic::from_rational_floor(&q, self.prec as u64);
        let err = Dyadic::from_rational_ceil(&(q - mid.to_rational()), RAD_BITS);
        Some(Self {
            mid,
            rad: prop.add(&err).round_ceil(RAD_BITS),
            prec: self.prec,
        })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.recip()?))
    }

    /// Natural logarithm; `None` unless the ball is strictly positive.
    pub fn ln(&self) -> Option<Self> {
        let lo = self.lower();
        if !lo.is_positive() {
            return None;
        }
        let point = ln_point(&self.mid, self.prec);
        // |ln x - ln m| <= r / (m - r)
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            self.rad.div_ceil(&lo, RAD_BITS)
        };
        Some(Self::new(
            point.mid.clone(),
            point.rad.add(&prop),
            self.prec,
        ))
    }

    /// Decimal rendering `mid ± rad` whose printed interval still encloses
    /// this ball: the midpoint is rounded to `digits` fractional digits and
    /// the rounding error is folded into the printed radius.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let exact = self.mid.to_rational();
        let scaled = &exact * BigRational::from_integer(scale.clone());
        let printed_num = scaled.round();
        let printed = printed_num.clone() / BigRational::from_integer(scale);
        let err = (exact - &printed).abs() + self.rad.to_rational();
        let n = printed_num.to_integer();
        let neg = n.is_negative();
        let digits_str = n.abs().to_str_radix(10);
        let mut body = if digits == 0 {
            digits_str
        } else if digits_str.len() <= digits {
            let pad = digits - digits_str.len();
            format!("0.{}{}", "0".repeat(pad), digits_str)
        } else {
            let (int, frac) = digits_str.split_at(digits_str.len() - digits);
            format!("{int}.{frac}")
        };
        if neg {
            body.insert(0, '-');
        }
        format!("{body} ± {}", sci_ceil(&err))
    }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) * core::f64::consts::LOG10_2) as usize;
        f.write_str(&self.to_decimal(digits.min(60)))
    }
}

/// Upward-rounded two-significant-digit scientific form of a nonnegative
/// rational, e.g. `1.3e-50`.
pub fn sci_ceil(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let ten = BigRational::from_integer(BigInt::from(10));
    // find e with 10^e <= x < 10^(e+1)
    let mut e: i64 = 0;
    let mut p = BigRational::one();
    while &p > x {
        p /= &ten;
        e -= 1;
    }
    while &(&p * &ten) <= x {
        p *= &ten;
        e += 1;
    }
    // m = ceil(x / 10^(e-1)) in [10, 100]
    let m = (x * &ten / p).ceil().to_integer();
    let m: u32 = m.try_into().expect("two digits");
    if m >= 100 {
        format!("1.0e{}", e + 1)
    } else {
        format!("{}.{}e{}", m / 10, m % 10, e)
    }
}

/// `2 atanh(t) = ln((1+t)/(1-t))` for `|t| <= 1/2`, by its odd power series.
fn two_atanh(t: &RealBall) -> RealBall {
    let prec = t.prec;
    let tmax = t.mag();
    assert!(tmax.mul_pow2(1) <= Dyadic::from_int(1), "|t| > 1/2");
    let t2 = t.sqr();
    let mut power = t.clone();
    let mut sum = RealBall::zero(prec);
    let eps = Dyadic::new(BigInt::one(), -(prec as i64) - 8);
    let mut k: u64 = 1;
    loop {
        let term = power.mul(&RealBall::from_rational(
            &BigRational::new(BigInt::one(), BigInt::from(k)),
            prec,
        ));
        sum = sum.add(&term);
        power = power.mul(&t2);
        k += 2;
        // remaining tail <= |t|^k / k / (1 - t^2) <= (4/3) |t|^k
        if power.mag() < eps {
            break;
        }
    }
    let tail = power.mag().mul(&Dyadic::new(BigInt::from(3), -1));
    let sum = RealBall::new(sum.mid, sum.rad.add(&tail), prec);
    sum.mul_pow2(1)
}

/// `ln 2` enclosed at `prec` bits.
pub fn ln2(prec: u32) -> RealBall {
    let third = RealBall::from_rational(&BigRational::new(BigInt::one(), BigInt::from(3)), prec);
    two_atanh(&third)
}

/// `ln m` for an exact positive dyadic `m`.
fn ln_point(m: &Dyadic, prec: u32) -> RealBall {
    let wp = prec + 32;
    // m = f * 2^k with 1 <= f < 2
    let k = m.top() - 1;
    let f = RealBall::exact(m.mul_pow2(-k), wp);
    let one = RealBall::one(wp);
    let t = f
        .sub(&one)
        .div(&f.add(&one))
        .expect("f + 1 >= 2");
    let mut out = two_atanh(&t);
    if k != 0 {
        out = out.add(&ln2(wp).mul(&RealBall::from_int(k, wp)));
    }
    out.with_precision(prec)
}

/// Complex ball: a rectangle `re x im` of real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: RealBall) -> Self {
        let prec = re.precision();
        Self {
            re,
            im: RealBall::zero(prec),
        }
    }

    pub fn precision(&self) -> u32 {
        self.re.precision().max(self.im.precision())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        )
    }

    pub fn mul_real(&self, x: &RealBall) -> Self {
        Self::new(self.re.mul(x), self.im.mul(x))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> RealBall {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        let inv = other.norm_sqr().recip()?;
        Some(self.mul(&other.conj()).mul_real(&inv))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Midpoint as an exact complex point.
    pub fn center(&self) -> Self {
        Self::new(
            RealBall::exact(self.re.mid().clone(), self.re.precision()),
            RealBall::exact(self.im.mid().clone(), self.im.precision()),
        )
    }

    /// Boxes intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        format!(
            "({}) + ({})i",
            self.re.to_decimal(digits),
            self.im.to_decimal(digits)
        )
    }
}
