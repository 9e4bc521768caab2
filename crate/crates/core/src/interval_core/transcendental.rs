//! sqrt, exp, sin and cos. These do not take a strategy: both strategies
//! share them, relying on the platform math library being faithful to
//! within one ulp and widening by a fixed number of ulps per side.

use super::{Interval, IntervalError};
use crate::float_kernel::{pred, succ};

/// Ulps of widening applied to each side of an exp endpoint.
pub const K_EXP: u32 = 2;
/// Ulps of widening applied to each side of a sin/cos endpoint.
pub const K_TRIG: u32 = 2;

/// The binary64 just below pi.
pub const PI_LO: f64 = std::f64::consts::PI;
/// The binary64 just above pi.
pub const PI_HI: f64 = 3.141_592_653_589_793_6;

fn down_k(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = pred(x);
    }
    x
}

fn up_k(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = succ(x);
    }
    x
}

/// Correctly rounded sqrt widened by one ulp per side.
pub fn sqrt(a: Interval) -> Result<Interval, IntervalError> {
    if a.lo < 0.0 {
        return Err(IntervalError::NegativeDomain);
    }
    let lo = pred(a.lo.sqrt()).max(0.0);
    let hi = succ(a.hi.sqrt());
    Ok(Interval { lo, hi })
}

pub fn exp(a: Interval) -> Interval {
    let lo = down_k(a.lo.exp(), K_EXP).max(0.0);
    let hi = up_k(a.hi.exp(), K_EXP);
    Interval { lo, hi }
}

pub fn sin(a: Interval) -> Result<Interval, IntervalError> {
    periodic(a, Periodic::Sin)
}

pub fn cos(a: Interval) -> Result<Interval, IntervalError> {
    periodic(a, Periodic::Cos)
}

#[derive(Clone, Copy)]
enum Periodic {
    Sin,
    Cos,
}

const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

/// `floor(x / (pi/2))`, or `None` when the pi bracket and the rounding of
/// the quotient leave it ambiguous.
fn quadrant(x: f64) -> Option<i64> {
    if x == 0.0 {
        return Some(0);
    }
    let q1 = x / (PI_LO / 2.0);
    let q2 = x / (PI_HI / 2.0);
    let lo = pred(q1.min(q2));
    let hi = succ(q1.max(q2));
    let (k_lo, k_hi) = (lo.floor(), hi.floor());
    if k_lo != k_hi || k_lo.abs() > 2f64.powi(52) {
        return None;
    }
    Some(k_lo as i64)
}

fn periodic(a: Interval, f: Periodic) -> Result<Interval, IntervalError> {
    if !a.lo.is_finite() || !a.hi.is_finite() {
        return Err(IntervalError::UnboundedArgument);
    }
    if a.hi - a.lo >= 2.0 * PI_LO {
        return Ok(UNIT);
    }
    let (k_lo, k_hi) = match (quadrant(a.lo), quadrant(a.hi)) {
        (Some(l), Some(h)) => (l, h),
        _ => return Ok(UNIT),
    };
    let (v_lo, v_hi) = match f {
        Periodic::Sin => (a.lo.sin(), a.hi.sin()),
        Periodic::Cos => (a.lo.cos(), a.hi.cos()),
    };
    let mut lo = down_k(v_lo.min(v_hi), K_TRIG).max(-1.0);
    let mut hi = up_k(v_lo.max(v_hi), K_TRIG).min(1.0);
    // extrema sit on quadrant boundaries b * pi/2; boundary b lies inside
    // the argument interval iff k_lo < b <= k_hi
    let (max_phase, min_phase) = match f {
        Periodic::Sin => (1, 3),
        Periodic::Cos => (0, 2),
    };
    for b in (k_lo + 1)..=k_hi {
        let phase = b.rem_euclid(4);
        if phase == max_phase {
            hi = 1.0;
        } else if phase == min_phase {
            lo = -1.0;
        }
    }
    Ok(Interval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_core::make_point;

    fn pt(x: f64) -> Interval {
        make_point(x).unwrap()
    }

    #[test]
    fn pi_bracket_is_adjacent() {
        assert_eq!(PI_HI, succ(PI_LO));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt(pt(4.0)).unwrap(), Interval::new(pred(2.0), succ(2.0)).unwrap());
        assert!(sqrt(pt(0.0)).unwrap().contains(0.0));
        let r2 = sqrt(pt(2.0)).unwrap();
        assert!(r2.lo() * r2.lo() < 2.0 && r2.hi() * r2.hi() > 2.0);
        assert_eq!(sqrt(Interval::new(-1.0, 1.0).unwrap()), Err(IntervalError::NegativeDomain));
        assert_eq!(sqrt(Interval::new(1.0, f64::INFINITY).unwrap()).unwrap().hi(), f64::INFINITY);
    }

    #[test]
    fn exp_examples() {
        assert!(exp(pt(0.0)).contains(1.0));
        let e = exp(pt(1.0));
        assert!(e.contains(std::f64::consts::E));
        let big = exp(pt(710.0));
        assert_eq!(big.hi(), f64::INFINITY);
        assert!(big.lo() <= f64::MAX);
        let tiny = exp(pt(-1000.0));
        assert_eq!(tiny.lo(), 0.0);
        assert!(tiny.hi() > 0.0);
    }

    #[test]
    fn trig_examples() {
        let s0 = sin(pt(0.0)).unwrap();
        assert!(s0.contains(0.0) && s0.is_subset_of(&UNIT));
        let c0 = cos(pt(0.0)).unwrap();
        assert!(c0.contains(1.0) && c0.hi() <= 1.0);
        let s = sin(Interval::new(0.0, 4.0).unwrap()).unwrap();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() <= 4f64.sin());
        let c = cos(Interval::new(3.0, 3.5).unwrap()).unwrap();
        assert_eq!(c.lo(), -1.0);
        assert!(c.hi() >= 3f64.cos() && c.hi() < 0.0);
        assert_eq!(sin(Interval::new(0.0, 7.0).unwrap()).unwrap(), UNIT);
        assert_eq!(sin(Interval::new(0.0, f64::INFINITY).unwrap()), Err(IntervalError::UnboundedArgument));
        let neg = sin(Interval::new(-2.0, -1.0).unwrap()).unwrap();
        assert_eq!(neg.lo(), -1.0);
        assert!(neg.hi() >= (-1f64).sin());
    }

    #[test]
    fn quadrants() {
        assert_eq!(quadrant(0.0), Some(0));
        assert_eq!(quadrant(1.0), Some(0));
        assert_eq!(quadrant(2.0), Some(1));
        assert_eq!(quadrant(-0.5), Some(-1));
        assert_eq!(quadrant(PI_LO / 2.0), None);
        assert_eq!(quadrant(1e300), None);
    }
}
