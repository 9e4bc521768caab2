//! Binary64 intervals widened in software.
//!
//! Every endpoint is computed once in round-to-nearest and then pushed
//! outward by a [`Strategy`]. Nothing here touches the hardware rounding
//! mode; the host's default round-to-nearest mode is a precondition.

mod transcendental;

use std::fmt;

use thiserror::Error;

use crate::float_kernel::{pred, succ, FloatError};

pub use transcendental::{cos, exp, sin, sqrt, K_EXP, K_TRIG, PI_HI, PI_LO};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error(transparent)]
    Float(#[from] FloatError),
    #[error("interval [{lo}, {hi}] violates lo <= hi or contains a NaN")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("divisor interval contains zero")]
    DivisorContainsZero,
    #[error("argument interval has a negative lower bound")]
    NegativeDomain,
    #[error("unbounded argument to a periodic function")]
    UnboundedArgument,
    #[error("invalid multiplicative parameters eps = {eps}, eta = {eta}")]
    InvalidStrategy { eps: f64, eta: f64 },
}

/// Closed interval `[lo, hi]` of binary64 values.
///
/// Endpoints may be infinite to represent an overflowed enclosure, but
/// `lo < +inf` and `hi > -inf` always hold.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Builds an interval without checking the invariants. Only meant for
    /// test fixtures such as deliberately empty intervals.
    pub fn from_bounds_unchecked(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        // NaN endpoints count as empty
        !matches!(self.lo.partial_cmp(&self.hi), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Width in round-to-nearest; the exact width is
    /// [`crate::rational_oracle::width_exact`].
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The degenerate interval `[x, x]`; no widening.
pub fn make_point(x: f64) -> Result<Interval, IntervalError> {
    if !x.is_finite() {
        return Err(FloatError::InvalidFloat(x).into());
    }
    Ok(Interval { lo: x, hi: x })
}

/// Outward widening policy applied to every rounded endpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Strategy {
    /// Step to the adjacent binary64 by bit manipulation.
    #[default]
    PredSucc,
    /// Scale by `1 -+ eps`, with an additive floor `eta` near zero.
    Multiplicative { eps: f64, eta: f64 },
    /// No widening at all. Produces wrong enclosures on purpose; exists so
    /// the verification harness can show that it detects incorrect results.
    Unwidened,
}

/// Default relative widening for [`Strategy::Multiplicative`], 2^-52.
pub const DEFAULT_EPS: f64 = f64::EPSILON;
/// Default additive floor for [`Strategy::Multiplicative`], 2^-1073.
pub const DEFAULT_ETA: f64 = 2.0 * crate::float_kernel::MIN_SUBNORMAL;

impl Strategy {
    pub fn multiplicative_default() -> Strategy {
        Strategy::Multiplicative { eps: DEFAULT_EPS, eta: DEFAULT_ETA }
    }

    /// Validates `eps > 0` with `1 - eps` and `1 + eps` exact, and `eta > 0`.
    pub fn multiplicative(eps: f64, eta: f64) -> Result<Strategy, IntervalError> {
        let exact = eps > 0.0 && eps < 0.5 && (1.0 + eps) - 1.0 == eps && 1.0 - (1.0 - eps) == eps;
        if !exact || !eta.is_finite() || eta <= 0.0 {
            return Err(IntervalError::InvalidStrategy { eps, eta });
        }
        Ok(Strategy::Multiplicative { eps, eta })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::PredSucc => "pred-succ",
            Strategy::Multiplicative { .. } => "multiplicative",
            Strategy::Unwidened => "unwidened",
        }
    }

    /// A binary64 `<= alpha` for every real `alpha` that rounds to `beta`.
    pub fn round_down(&self, beta: f64) -> Result<f64, IntervalError> {
        if beta.is_nan() {
            return Err(FloatError::InvalidFloat(beta).into());
        }
        Ok(self.down(beta))
    }

    /// A binary64 `>= alpha` for every real `alpha` that rounds to `beta`.
    pub fn round_up(&self, beta: f64) -> Result<f64, IntervalError> {
        if beta.is_nan() {
            return Err(FloatError::InvalidFloat(beta).into());
        }
        Ok(self.up(beta))
    }

    #[inline]
    pub(crate) fn down(&self, beta: f64) -> f64 {
        match *self {
            Strategy::PredSucc => pred(beta),
            Strategy::Multiplicative { eps, eta } => {
                if beta == f64::INFINITY {
                    return f64::MAX;
                }
                if beta == 0.0 {
                    return -eta;
                }
                let scaled = if beta > 0.0 { beta * (1.0 - eps) } else { beta * (1.0 + eps) };
                if beta.abs() < f64::MIN_POSITIVE {
                    scaled - eta
                } else {
                    scaled
                }
            }
            Strategy::Unwidened => beta,
        }
    }

    #[inline]
    pub(crate) fn up(&self, beta: f64) -> f64 {
        match *self {
            Strategy::PredSucc => succ(beta),
            Strategy::Multiplicative { eps, eta } => {
                if beta == f64::NEG_INFINITY {
                    return -f64::MAX;
                }
                if beta == 0.0 {
                    return eta;
                }
                let scaled = if beta > 0.0 { beta * (1.0 + eps) } else { beta * (1.0 - eps) };
                if beta.abs() < f64::MIN_POSITIVE {
                    scaled + eta
                } else {
                    scaled
                }
            }
            Strategy::Unwidened => beta,
        }
    }

    #[inline]
    fn widen(&self, lo: f64, hi: f64) -> Interval {
        Interval { lo: self.down(lo), hi: self.up(hi) }
    }
}

pub fn neg(a: Interval) -> Interval {
    Interval { lo: -a.hi, hi: -a.lo }
}

pub fn add(a: Interval, b: Interval, s: Strategy) -> Interval {
    s.widen(a.lo + b.lo, a.hi + b.hi)
}

pub fn sub(a: Interval, b: Interval, s: Strategy) -> Interval {
    s.widen(a.lo - b.hi, a.hi - b.lo)
}

/// `x * y` with the `0 * inf` case mapped to 0.
#[inline]
fn guarded_mul(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        0.0
    } else {
        x * y
    }
}

#[inline]
fn min4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.min(b).min(c.min(d))
}

#[inline]
fn max4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.max(b).max(c.max(d))
}

pub fn mul(a: Interval, b: Interval, s: Strategy) -> Interval {
    let p1 = guarded_mul(a.lo, b.lo);
    let p2 = guarded_mul(a.lo, b.hi);
    let p3 = guarded_mul(a.hi, b.lo);
    let p4 = guarded_mul(a.hi, b.hi);
    s.widen(min4(p1, p2, p3, p4), max4(p1, p2, p3, p4))
}

pub fn div(a: Interval, b: Interval, s: Strategy) -> Result<Interval, IntervalError> {
    if b.contains_zero() {
        return Err(IntervalError::DivisorContainsZero);
    }
    let q1 = a.lo / b.lo;
    let q2 = a.lo / b.hi;
    let q3 = a.hi / b.lo;
    let q4 = a.hi / b.hi;
    if q1.is_nan() || q2.is_nan() || q3.is_nan() || q4.is_nan() {
        // inf / inf: give up on tightness
        return Ok(Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY });
    }
    Ok(s.widen(min4(q1, q2, q3, q4), max4(q1, q2, q3, q4)))
}
