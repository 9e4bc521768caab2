//! Bit-level primitives on IEEE 754 binary64.
//!
//! The successor order used here is the order of the extended reals: `-0.0`
//! and `+0.0` are the same point, so `next_up(-0.0)` is the smallest positive
//! subnormal rather than `+0.0`.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::rational_oracle::Rational;

/// Sign-magnitude bit mask.
const SIGN_MASK: u64 = 0x8000_0000_0000_0000;
const EXP_MASK: u64 = 0x7ff0_0000_0000_0000;
const FRAC_MASK: u64 = 0x000f_ffff_ffff_ffff;

/// Smallest positive subnormal, 2^-1074.
pub const MIN_SUBNORMAL: f64 = f64::from_bits(1);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FloatError {
    #[error("invalid float operand {0}")]
    InvalidFloat(f64),
}

/// `sign * mantissa * 2^exponent`, with trailing zero bits stripped from the
/// mantissa (zero is `+1 * 0 * 2^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatDecomposition {
    pub sign: i8,
    pub mantissa: u64,
    pub exponent: i32,
}

impl FloatDecomposition {
    pub fn to_rational(&self) -> Rational {
        let mut n = BigInt::from(self.mantissa);
        if self.sign < 0 {
            n = -n;
        }
        if self.exponent >= 0 {
            Rational::from_integer(n << self.exponent as usize)
        } else {
            Rational::new(n, BigInt::from(1u8) << (-self.exponent) as usize)
        }
    }
}

/// Smallest binary64 strictly above `x`. Saturates at `+inf`.
pub fn next_up(x: f64) -> Result<f64, FloatError> {
    if x.is_nan() {
        return Err(FloatError::InvalidFloat(x));
    }
    Ok(succ(x))
}

/// Largest binary64 strictly below `x`. Saturates at `-inf`.
pub fn next_down(x: f64) -> Result<f64, FloatError> {
    if x.is_nan() {
        return Err(FloatError::InvalidFloat(x));
    }
    Ok(pred(x))
}

/// Unchecked successor; NaN passes through unchanged.
#[inline]
pub(crate) fn succ(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return MIN_SUBNORMAL;
    }
    let bits = x.to_bits();
    if bits & SIGN_MASK == 0 {
        f64::from_bits(bits + 1)
    } else {
        let r = f64::from_bits(bits - 1);
        // -2^-1074 steps onto -0.0; collapse it
        if r == 0.0 {
            0.0
        } else {
            r
        }
    }
}

/// Unchecked predecessor; NaN passes through unchanged.
#[inline]
pub(crate) fn pred(x: f64) -> f64 {
    -succ(-x)
}

/// Spacing between `|x|` and the next binary64 above it, or below it for
/// `f64::MAX`; `+inf` for non-finite input.
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if !a.is_finite() {
        return f64::INFINITY;
    }
    let next = succ(a);
    if next.is_infinite() {
        // spacing just below the overflow threshold
        return a - pred(a);
    }
    next - a
}

/// Base-2 logarithm of `ulp(x)` for finite `x`.
pub fn ulp_log2(x: f64) -> i32 {
    let bits = x.abs().to_bits();
    let biased = ((bits & EXP_MASK) >> 52) as i32;
    if biased == 0 {
        -1074
    } else {
        biased - 1075
    }
}

/// Exact sign/mantissa/exponent split of a finite binary64.
pub fn split(x: f64) -> Result<FloatDecomposition, FloatError> {
    if !x.is_finite() {
        return Err(FloatError::InvalidFloat(x));
    }
    if x == 0.0 {
        return Ok(FloatDecomposition { sign: 1, mantissa: 0, exponent: 0 });
    }
    let bits = x.to_bits();
    let sign = if bits & SIGN_MASK != 0 { -1 } else { 1 };
    let biased = ((bits & EXP_MASK) >> 52) as i32;
    let frac = bits & FRAC_MASK;
    let (mut mantissa, mut exponent) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
    let tz = mantissa.trailing_zeros();
    mantissa >>= tz;
    exponent += tz as i32;
    Ok(FloatDecomposition { sign, mantissa, exponent })
}

/// The exact rational value of a finite binary64.
pub fn decompose(x: f64) -> Result<Rational, FloatError> {
    split(x).map(|d| d.to_rational())
}

/// Nearest binary64 to a rational (ties to even), saturating to infinity.
pub fn nearest_f64(q: &Rational) -> f64 {
    round_rational(q, Rounding::Nearest)
}

/// Largest binary64 `<= q`.
pub fn floor_f64(q: &Rational) -> f64 {
    round_rational(q, Rounding::Floor)
}

/// Smallest binary64 `>= q`.
pub fn ceil_f64(q: &Rational) -> f64 {
    round_rational(q, Rounding::Ceil)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rounding {
    Nearest,
    Floor,
    Ceil,
}

fn round_rational(q: &Rational, mode: Rounding) -> f64 {
    use num_integer::Integer;
    use num_traits::Signed;

    if q.is_zero() {
        return 0.0;
    }
    let negative = q.is_negative();
    // round the magnitude; a floor of a negative value is a ceil of |q|
    let mag_mode = match (mode, negative) {
        (Rounding::Nearest, _) => Rounding::Nearest,
        (Rounding::Floor, false) | (Rounding::Ceil, true) => Rounding::Floor,
        (Rounding::Floor, true) | (Rounding::Ceil, false) => Rounding::Ceil,
    };
    let num = q.numer().abs();
    let den = q.denom().clone();

    // choose e so that num / den / 2^e lands in [2^52, 2^53)
    let approx = num.bits() as i64 - den.bits() as i64;
    let mut e = approx - 53;
    let scaled = |e: i64| -> (BigInt, BigInt) {
        if e >= 0 {
            (num.clone(), &den << e as usize)
        } else {
            (&num << (-e) as usize, den.clone())
        }
    };
    let (mut n, mut d) = scaled(e);
    if n >= (&d << 53usize) {
        e += 1;
        (n, d) = scaled(e);
    } else if n < (&d << 52usize) {
        e -= 1;
        (n, d) = scaled(e);
    }
    // subnormal range: the exponent floor is -1074
    if e < -1074 {
        e = -1074;
        (n, d) = scaled(e);
    }
    let (mut m, r) = n.div_rem(&d);
    let round_up = match mag_mode {
        Rounding::Floor => false,
        Rounding::Ceil => !r.is_zero(),
        Rounding::Nearest => {
            let twice = &r << 1usize;
            twice > d || (twice == d && m.is_odd())
        }
    };
    if round_up {
        m += 1u8;
    }
    let m: u64 = num_traits::ToPrimitive::to_u64(&m).expect("mantissa fits in 54 bits");
    let value = compose(m, e as i32, mag_mode);
    if negative {
        -value
    } else {
        value
    }
}

/// `m * 2^e` for `m < 2^54` with overflow handled per rounding direction.
fn compose(m: u64, e: i32, mode: Rounding) -> f64 {
    let (mut m, mut e) = (m, e);
    if m == 1u64 << 53 {
        m >>= 1;
        e += 1;
    }
    if m != 0 && e + 52 > 1023 {
        return match mode {
            Rounding::Floor => f64::MAX,
            _ => f64::INFINITY,
        };
    }
    // m * 2^e is exact in binary64 here; scale in two steps to avoid
    // intermediate overflow or underflow
    let mut v = m as f64;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v *= 2f64.powi(-step);
        e += step;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn next_up_examples() {
        assert_eq!(next_up(1.0).unwrap(), 1.0 + f64::EPSILON);
        assert_eq!(next_up(0.0).unwrap(), MIN_SUBNORMAL);
        assert_eq!(next_up(-0.0).unwrap(), MIN_SUBNORMAL);
        let r = next_up(-MIN_SUBNORMAL).unwrap();
        assert_eq!(r, 0.0);
        assert!(r.is_sign_positive());
        assert_eq!(next_up(f64::MAX).unwrap(), f64::INFINITY);
        assert_eq!(next_up(f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(next_up(f64::NEG_INFINITY).unwrap(), -f64::MAX);
        assert!(next_up(f64::NAN).is_err());
    }

    #[test]
    fn next_down_examples() {
        assert_eq!(next_down(1.0).unwrap(), 1.0 - f64::EPSILON / 2.0);
        assert_eq!(next_down(0.0).unwrap(), -MIN_SUBNORMAL);
        assert_eq!(next_down(f64::INFINITY).unwrap(), f64::MAX);
        assert_eq!(next_down(f64::NEG_INFINITY).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(next_down(f64::NAN), Err(FloatError::InvalidFloat(_))));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(1.5).unwrap(), Rational::new(3.into(), 2.into()));
        assert_eq!(decompose(-0.0).unwrap(), Rational::zero());
        let tenth = Rational::new(3602879701896397u64.into(), BigInt::from(1u8) << 55usize);
        assert_eq!(decompose(0.1).unwrap(), tenth);
        assert!(decompose(f64::INFINITY).is_err());
        assert!(decompose(f64::NAN).is_err());
        let d = split(-3.0 * MIN_SUBNORMAL).unwrap();
        assert_eq!(d, FloatDecomposition { sign: -1, mantissa: 3, exponent: -1074 });
    }

    #[test]
    fn ulp_values() {
        assert_eq!(ulp(1.0), f64::EPSILON);
        assert_eq!(ulp(-3.0), 2.0 * f64::EPSILON);
        assert_eq!(ulp(0.0), MIN_SUBNORMAL);
        assert_eq!(ulp_log2(1.0), -52);
        assert_eq!(ulp_log2(0.0), -1074);
        assert_eq!(ulp_log2(f64::MIN_POSITIVE), -1074);
        assert_eq!(2f64.powi(ulp_log2(1e300)), ulp(1e300));
    }

    #[test]
    fn directed_rational_rounding() {
        let third = Rational::new(1.into(), 3.into());
        let lo = floor_f64(&third);
        let hi = ceil_f64(&third);
        assert_eq!(hi, succ(lo));
        assert!(decompose(lo).unwrap() < third && third < decompose(hi).unwrap());
        assert_eq!(nearest_f64(&third), 1.0 / 3.0);
        let neg = -third;
        assert_eq!(floor_f64(&neg), -hi);
        let huge = Rational::from_integer(BigInt::from(1u8) << 1100usize);
        assert_eq!(nearest_f64(&huge), f64::INFINITY);
        assert_eq!(floor_f64(&huge), f64::MAX);
        let tiny = Rational::new(1.into(), BigInt::from(1u8) << 1100usize);
        assert_eq!(nearest_f64(&tiny), 0.0);
        assert_eq!(ceil_f64(&tiny), MIN_SUBNORMAL);
    }

    fn any_finite() -> impl Strategy<Value = f64> {
        prop_oneof![any::<u64>().prop_map(f64::from_bits), (0u64..1u64 << 52).prop_map(f64::from_bits), -1e6f64..1e6,]
            .prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn successor_is_adjacent(x in any_finite()) {
            let up = succ(x);
            let down = pred(x);
            prop_assert!(down < x && x < up);
            // bit-pattern adjacency on the magnitude line
            if x > 0.0 && up.is_finite() {
                prop_assert_eq!(up.to_bits(), x.to_bits() + 1);
            }
            if x < 0.0 && down.is_finite() {
                prop_assert_eq!(down.to_bits(), x.to_bits() + 1);
            }
            if up.is_finite() && x != -MIN_SUBNORMAL {
                prop_assert_eq!(pred(up), x);
            }
        }

        #[test]
        fn decompose_round_trips(x in any_finite()) {
            let q = decompose(x).unwrap();
            prop_assert_eq!(nearest_f64(&q).to_bits(), if x == 0.0 { 0 } else { x.to_bits() });
            prop_assert_eq!(floor_f64(&q), x);
            prop_assert_eq!(ceil_f64(&q), x);
        }

        #[test]
        fn successor_is_monotone(mut xs in proptest::collection::vec(any_finite(), 2..32)) {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in xs.windows(2) {
                prop_assert!(succ(w[0]) <= succ(w[1]));
                prop_assert!(pred(w[0]) <= pred(w[1]));
            }
        }

        #[test]
        fn nearest_matches_division(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000) {
            let q = Rational::new(a.into(), b.into());
            prop_assert_eq!(nearest_f64(&q), a as f64 / b as f64);
        }
    }
}
