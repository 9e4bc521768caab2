//! Exact rationals and rational intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::OracleError;
use crate::expr_engine::BinaryOp;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Exact field arithmetic.
pub fn rat_arith(op: BinaryOp, a: &Rational, b: &Rational) -> Result<Rational, OracleError> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b.is_zero() {
                return Err(OracleError::DivisionByZero);
            }
            a / b
        }
    })
}

/// `n / 2^shift` without a general gcd.
pub(crate) fn dyadic(n: BigInt, shift: u64) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    let tz = n.trailing_zeros().unwrap_or(0).min(shift);
    Rational::new_raw(n >> tz as usize, BigInt::one() << (shift - tz) as usize)
}

/// `floor(q * 2^shift)`.
pub(crate) fn floor_scaled(q: &Rational, shift: u64) -> BigInt {
    (q.numer() << shift as usize).div_floor(q.denom())
}

/// `ceil(q * 2^shift)`.
pub(crate) fn ceil_scaled(q: &Rational, shift: u64) -> BigInt {
    -((-q.numer() << shift as usize).div_floor(q.denom()))
}

/// `ceil(a / b)` for `b > 0`.
pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `floor(log2(|q|))` for nonzero `q`.
pub fn floor_log2(q: &Rational) -> i64 {
    debug_assert!(!q.is_zero());
    let num = q.numer().abs();
    let den = q.denom();
    let k = num.bits() as i64 - den.bits() as i64;
    let at_least = if k >= 0 { num >= (den << k as usize) } else { (&num << (-k) as usize) >= *den };
    if at_least {
        k
    } else {
        k - 1
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl RationalInterval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "rational interval with lo > hi");
        RationalInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn neg(&self) -> Self {
        RationalInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_point() && other.is_point() {
            return Self::point(&self.lo + &other.lo);
        }
        RationalInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        if self.is_point() && other.is_point() {
            return Self::point(&self.lo - &other.lo);
        }
        RationalInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_point() && other.is_point() {
            return Self::point(&self.lo * &other.lo);
        }
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        Self::hull_of(products)
    }

    /// Divisor must exclude zero.
    pub fn div(&self, other: &Self) -> Result<Self, OracleError> {
        if other.contains_zero() {
            return Err(OracleError::DivisionByZero);
        }
        if self.is_point() && other.is_point() {
            return Ok(Self::point(&self.lo / &other.lo));
        }
        let quotients = [&self.lo / &other.lo, &self.lo / &other.hi, &self.hi / &other.lo, &self.hi / &other.hi];
        Ok(Self::hull_of(quotients))
    }

    /// Intersection with `[-1, 1]`; the caller guarantees overlap.
    pub(crate) fn clamp_unit(self) -> Self {
        let one = Rational::one();
        let lo = if self.lo < -&one { -&one } else { self.lo };
        let hi = if self.hi > one { one } else { self.hi };
        RationalInterval { lo, hi }
    }

    fn hull_of(values: [Rational; 4]) -> Self {
        let mut it = values.into_iter();
        let first = it.next().expect("four values");
        let (mut lo, mut hi) = (first.clone(), first);
        for v in it {
            if v < lo {
                lo = v;
            } else if v > hi {
                hi = v;
            }
        }
        RationalInterval { lo, hi }
    }
}

/// Total ordering helper for comparisons with an optional infinite bound.
pub(crate) fn cmp_bound(x: &Rational, bound: Option<&Rational>, infinite: Ordering) -> Ordering {
    match bound {
        Some(b) => x.cmp(b),
        None => infinite,
    }
}
