//! Exact rational scalars.
//!
//! Values whose numerator and denominator fit in an `i64` are stored inline
//! and combined with `i128` intermediates; everything else falls back to
//! `BigRational`. The representation is canonical, so structural equality
//! and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in canonical form
/// (positive denominator, coprime parts).
#[derive(Clone)]
pub struct Rat(Repr);

#[derive(Clone)]
enum Repr {
    /// `n/d` with `d > 0`, `gcd(n, d) = 1` and `n != i64::MIN`.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRatError(pub String);

fn small_fits(n: i128, d: i128) -> Option<(i64, i64)> {
    let n = i64::try_from(n).ok().filter(|&n| n != i64::MIN)?;
    let d = i64::try_from(d).ok()?;
    Some((n, d))
}

impl Rat {
    /// `n/d` from `i128` parts with `d != 0`, reduced.
    fn from_i128(n: i128, d: i128) -> Rat {
        debug_assert!(d != 0);
        let (mut n, mut d) = (n, d);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match small_fits(n, d) {
            Some((n, d)) => Rat(Repr::Small(n, d)),
            None => Rat(Repr::Big(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        let small = r
            .numer()
            .to_i128()
            .zip(r.denom().to_i128())
            .and_then(|(n, d)| small_fits(n, d));
        match small {
            Some((n, d)) => Rat(Repr::Small(n, d)),
            None => Rat(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn zero() -> Self {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Rat::from_i128(n as i128, 1)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat::from_big(BigRational::from_integer(n))
    }

    /// `num/den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    /// Nonnegative integer.
    pub fn is_natural(&self) -> bool {
        self.is_integer() && !self.is_negative()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer())
    }

    /// The value as a `u64`, if it is a natural number that fits.
    pub fn to_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(n, 1) => u64::try_from(*n).ok(),
            Repr::Small(..) => None,
            Repr::Big(r) => r.is_integer().then(|| r.numer().to_u64()).flatten(),
        }
    }

    /// True iff `k` divides this (integer) value.
    pub fn divisible_by(&self, k: u64) -> bool {
        match &self.0 {
            Repr::Small(n, 1) => (*n as i128) % (k as i128) == 0,
            Repr::Small(..) => false,
            Repr::Big(r) => r.is_integer() && r.numer().is_multiple_of(&BigInt::from(k)),
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => (0u8, n, d).hash(state),
            Repr::Big(r) => (1u8, r).hash(state),
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat::from_big(r)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat::from_i128(n as i128, 1)
    }
}

impl From<usize> for Rat {
    fn from(n: usize) -> Self {
        Rat::from_i128(n as i128, 1)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `n`, `-n`, `p/q` with `q != 0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatError(s.to_string());
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt, ParseRatError> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            t.parse::<BigInt>().map_err(|_| err())
        };
        match s.split_once('/') {
            None => Ok(Rat::from_bigint(parse_int(s)?)),
            Some((p, q)) => {
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(err());
                }
                Ok(Rat::from_big(BigRational::new(parse_int(p)?, q)))
            }
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn add(x: &Rat, y: &Rat) -> Rat {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                Rat::from_i128(a + c, b)
            } else {
                Rat::from_i128(a * d + c * b, b * d)
            }
        }
        _ => Rat::from_big(x.to_big() + y.to_big()),
    }
}

fn sub(x: &Rat, y: &Rat) -> Rat {
    add(x, &-y.clone())
}

fn mul(x: &Rat, y: &Rat) -> Rat {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => Rat::from_big(x.to_big() * y.to_big()),
    }
}

fn div(x: &Rat, y: &Rat) -> Rat {
    assert!(!y.is_zero(), "division by zero");
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rat::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
        }
        _ => Rat::from_big(x.to_big() / y.to_big()),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                $f(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                $f(&self, rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                $f(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = add(self, rhs);
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self.0 {
            // `n != i64::MIN`, so the negation cannot overflow.
            Repr::Small(n, d) => Rat(Repr::Small(-n, d)),
            Repr::Big(r) => Rat::from_big(-r),
        }
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

impl<'a> Product<&'a Rat> for Rat {
    fn product<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}
