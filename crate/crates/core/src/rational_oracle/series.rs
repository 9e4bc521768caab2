//! Rigorous enclosures of pi, exp, sin, cos and sqrt.
//!
//! Everything here works on fixed-point integers: a value `v` at scale `w`
//! is the integer pair `[lo, hi]` with `lo / 2^w <= v <= hi / 2^w`. Every
//! truncation is rounded outward, and every series carries an explicit
//! remainder bound, so the returned intervals are enclosures by construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{ceil_div, ceil_scaled, dyadic, floor_log2, floor_scaled, Rational, RationalInterval};
use super::OracleError;

/// Largest `|x|` accepted by [`exp_enclosure`].
pub const EXP_ARG_LIMIT: i64 = 1024;

/// Largest `|x|` (as a power of two) for which trig arguments are reduced.
pub const TRIG_ARG_LOG2_LIMIT: i64 = 64;

/// `arctan(1/k)` at scale `w`.
fn arctan_inv(k: u32, w: u64) -> (BigInt, BigInt) {
    let k2 = BigInt::from(k) * BigInt::from(k);
    // pw = floor(2^w / k^(2j+1)); the true power lies in [pw, pw + 1)
    let mut pw = (BigInt::one() << w as usize) / BigInt::from(k);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let odd = BigInt::from(2 * j + 1);
        let t_lo = &pw / &odd;
        let t_hi = ceil_div(&(&pw + 1u8), &odd);
        if t_hi <= BigInt::one() {
            // alternating with decreasing terms: the tail is bounded by this term
            lo -= &t_hi;
            hi += &t_hi;
            break;
        }
        if j.is_multiple_of(2) {
            lo += t_lo;
            hi += t_hi;
        } else {
            lo -= t_hi;
            hi -= t_lo;
        }
        pw /= &k2;
        j += 1;
    }
    (lo, hi)
}

/// pi at scale `w` via Machin's identity `pi = 16 atan(1/5) - 4 atan(1/239)`.
pub(crate) fn pi_fixed(w: u64) -> (BigInt, BigInt) {
    let (a_lo, a_hi) = arctan_inv(5, w);
    let (b_lo, b_hi) = arctan_inv(239, w);
    let lo = (a_lo << 4usize) - (b_hi << 2usize);
    let hi = (a_hi << 4usize) - (b_lo << 2usize);
    (lo, hi)
}

/// Rational enclosure of pi of width at most `2^-p`.
///
/// All precisions up to the same power-of-two tier are cut from one tight
/// enclosure by outward rounding onto the grid `2^-(p+2)`, so enclosures
/// within a tier nest.
pub fn pi_enclosure(p: u32) -> RationalInterval {
    let tier = (p as u64).max(256).next_power_of_two();
    let w = tier + 32;
    let (lo, hi) = pi_fixed(w);
    let drop = (w - (p as u64 + 2)) as usize;
    let lo = lo >> drop;
    let hi = ceil_div(&hi, &(BigInt::one() << drop));
    RationalInterval::new(dyadic(lo, p as u64 + 2), dyadic(hi, p as u64 + 2))
}

/// `exp(y)` for `0 <= y` at scale `w`, by argument halving, a Taylor sum
/// with remainder `<= 2 y^n / n!` (valid for `y <= 1/2`) and repeated squaring.
fn exp_nonneg_fixed(x: &Rational, w: u64) -> (BigInt, BigInt) {
    debug_assert!(!x.is_negative());
    let halvings: u64 = if x.is_zero() { 0 } else { (floor_log2(x) + 2).max(0) as u64 };
    let wg = w + halvings + 8;
    let y_lo = floor_scaled(x, wg - halvings.min(wg));
    let y_hi = ceil_scaled(x, wg - halvings.min(wg));
    let one = BigInt::one() << wg as usize;
    let mut sum_lo = one.clone();
    let mut sum_hi = one.clone();
    let mut t_lo = one.clone();
    let mut t_hi = one;
    let mut k: u64 = 1;
    loop {
        let kb = BigInt::from(k);
        t_lo = ((&t_lo * &y_lo) >> wg as usize) / &kb;
        t_hi = ceil_div(&(&t_hi * &y_hi), &(kb << wg as usize));
        if t_hi <= BigInt::one() {
            sum_hi += &t_hi << 1usize;
            break;
        }
        sum_lo += &t_lo;
        sum_hi += &t_hi;
        k += 1;
    }
    let scale = BigInt::one() << wg as usize;
    for _ in 0..halvings {
        sum_lo = (&sum_lo * &sum_lo) >> wg as usize;
        sum_hi = ceil_div(&(&sum_hi * &sum_hi), &scale);
    }
    // bring the result back to scale w
    let drop = (wg - w) as usize;
    (sum_lo >> drop, ceil_div(&sum_hi, &(BigInt::one() << drop)))
}

/// Enclosure of `e^x` with relative width about `2^-p`.
///
/// Arguments below `-EXP_ARG_LIMIT` are bounded by `[0, e^-EXP_ARG_LIMIT]`;
/// arguments above the limit are rejected.
pub fn exp_enclosure(x: &Rational, p: u32) -> Result<RationalInterval, OracleError> {
    if x.is_zero() {
        return Ok(RationalInterval::point(Rational::one()));
    }
    let limit = Rational::from_integer(BigInt::from(EXP_ARG_LIMIT));
    if x > &limit {
        return Err(OracleError::ArgumentOutOfRange { function: "exp", value: x.to_string() });
    }
    if x < &-&limit {
        let upper = exp_enclosure(&-&limit, p)?;
        return Ok(RationalInterval::new(Rational::zero(), upper.hi().clone()));
    }
    let w = p as u64 + 4;
    if x.is_positive() {
        let (lo, hi) = exp_nonneg_fixed(x, w);
        return Ok(RationalInterval::new(dyadic(lo, w), dyadic(hi, w)));
    }
    // e^x = 1 / e^|x|; carry enough bits to keep relative precision
    let ax = x.abs();
    // e^|x| needs about 1.443 |x| integer bits
    let int_part = ax.ceil().to_integer().to_u64().unwrap_or(EXP_ARG_LIMIT as u64);
    let s = w + int_part * 3 / 2 + 4;
    let (e_lo, e_hi) = exp_nonneg_fixed(&ax, s);
    let numer = BigInt::one() << (2 * s) as usize;
    let r_lo = &numer / &e_hi;
    let r_hi = ceil_div(&numer, &e_lo);
    Ok(RationalInterval::new(dyadic(r_lo, s), dyadic(r_hi, s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

/// Alternating Taylor series for sin/cos at the exact point `a / 2^w`,
/// `0 <= a / 2^w <= 2`.
fn trig_series_fixed(f: Trig, a: &BigInt, w: u64) -> (BigInt, BigInt) {
    let a2 = a * a;
    let shift = 2 * w as usize;
    let first = match f {
        Trig::Sin => a.clone(),
        Trig::Cos => BigInt::one() << w as usize,
    };
    let mut t_lo = first.clone();
    let mut t_hi = first.clone();
    let mut sum_lo = first.clone();
    let mut sum_hi = first;
    let mut j: u64 = 1;
    loop {
        // ratio of consecutive terms is a^2 / ((2j)(2j+1)) for sin and
        // a^2 / ((2j-1)(2j)) for cos
        let denom = match f {
            Trig::Sin => BigInt::from((2 * j) * (2 * j + 1)),
            Trig::Cos => BigInt::from((2 * j - 1) * (2 * j)),
        };
        t_lo = ((&t_lo * &a2) >> shift) / &denom;
        t_hi = ceil_div(&(&t_hi * &a2), &(denom << shift));
        if j > 1 && t_hi <= BigInt::one() {
            // omitted tail is bounded by its first term
            sum_lo -= &t_hi;
            sum_hi += &t_hi;
            break;
        }
        if j % 2 == 1 {
            sum_lo -= &t_hi;
            sum_hi -= &t_lo;
        } else {
            sum_lo += &t_lo;
            sum_hi += &t_hi;
        }
        j += 1;
    }
    (sum_lo, sum_hi)
}

/// Enclosure of `sin(x)` or `cos(x)` of absolute width about `2^-p`,
/// intersected with `[-1, 1]`.
pub fn trig_enclosure(f: Trig, x: &Rational, p: u32) -> RationalInterval {
    if x.is_zero() {
        return match f {
            Trig::Sin => RationalInterval::point(Rational::zero()),
            Trig::Cos => RationalInterval::point(Rational::one()),
        };
    }
    let unit = RationalInterval::new(-Rational::one(), Rational::one());
    let bit_len = floor_log2(x) + 1;
    if bit_len > TRIG_ARG_LOG2_LIMIT {
        return unit;
    }
    let bit_len = bit_len.max(0) as u64;
    let wr = p as u64 + 16;
    for extra in [0u64, 64, 256, 1024] {
        let wp = p as u64 + bit_len + 32 + extra;
        let (p_lo, p_hi) = pi_fixed(wp);
        // x / (pi/2) lies between 2x/pi_hi and 2x/pi_lo
        let scaled_num = x.numer() << (wp + 1) as usize;
        let q1 = scaled_num.div_floor(&(x.denom() * &p_hi));
        let q2 = scaled_num.div_floor(&(x.denom() * &p_lo));
        if q1 != q2 {
            continue;
        }
        let q = q1;
        // r = x - q pi/2, with the pi bracket chosen per sign of q
        let (pi_for_lo, pi_for_hi) = if q.is_negative() { (&p_lo, &p_hi) } else { (&p_hi, &p_lo) };
        let den = x.denom() << (wp + 1) as usize;
        let r_lo_num = &scaled_num - &q * pi_for_lo * x.denom();
        let r_hi_num = &scaled_num - &q * pi_for_hi * x.denom();
        let r_lo = (r_lo_num << wr as usize).div_floor(&den);
        let r_hi = ceil_div(&(r_hi_num << wr as usize), &den);
        let mid: BigInt = (&r_lo + &r_hi) >> 1usize;
        let radius = (&r_hi - &mid).max(&mid - &r_lo);

        let quadrant = q.mod_floor(&BigInt::from(4)).to_u32().expect("quadrant in 0..4");
        // sin(r + q pi/2) and cos(r + q pi/2) in terms of sin r, cos r
        let (base, negate) = match (f, quadrant) {
            (Trig::Sin, 0) => (Trig::Sin, false),
            (Trig::Sin, 1) => (Trig::Cos, false),
            (Trig::Sin, 2) => (Trig::Sin, true),
            (Trig::Sin, _) => (Trig::Cos, true),
            (Trig::Cos, 0) => (Trig::Cos, false),
            (Trig::Cos, 1) => (Trig::Sin, true),
            (Trig::Cos, 2) => (Trig::Cos, true),
            (Trig::Cos, _) => (Trig::Sin, false),
        };
        let (mut lo, mut hi) = trig_series_fixed(base, &mid.abs(), wr);
        if base == Trig::Sin && mid.is_negative() {
            (lo, hi) = (-hi, -lo);
        }
        // Lipschitz bound over [r_lo, r_hi]
        lo -= &radius;
        hi += &radius;
        if negate {
            (lo, hi) = (-hi, -lo);
        }
        let result = RationalInterval::new(dyadic(lo, wr), dyadic(hi, wr));
        return result.clamp_unit();
    }
    unit
}

/// Enclosure of `sin` or `cos` over a rational interval: the hull of the
/// endpoint enclosures, plus `1` or `-1` for every extremum `m pi/2` that
/// may lie inside.
pub fn trig_interval(f: Trig, x: &RationalInterval, p: u32) -> RationalInterval {
    if x.is_point() {
        return trig_enclosure(f, x.lo(), p);
    }
    let unit = RationalInterval::new(-Rational::one(), Rational::one());
    let outer = x.lo().abs().max(x.hi().abs());
    if x.width() >= Rational::from_integer(7.into()) || floor_log2(&outer) + 1 > TRIG_ARG_LOG2_LIMIT {
        return unit;
    }
    let (mut lo, mut hi) = trig_enclosure(f, x.lo(), p).into_bounds();
    let (b_lo, b_hi) = trig_enclosure(f, x.hi(), p).into_bounds();
    lo = lo.min(b_lo);
    hi = hi.max(b_hi);

    let pi = pi_enclosure(p.max(8));
    let two = Rational::from_integer(2.into());
    let (h_lo, h_hi) = (pi.lo() / &two, pi.hi() / two);
    // every m with m pi/2 in x satisfies m_first <= m <= m_last
    let m_first = (x.lo() / &h_lo).min(x.lo() / &h_hi).floor().to_integer();
    let m_last = (x.hi() / &h_lo).max(x.hi() / &h_hi).ceil().to_integer();
    let mut m = m_first;
    while m <= m_last {
        let scaled = (Rational::from_integer(m.clone()) * &h_lo, Rational::from_integer(m.clone()) * &h_hi);
        let (at_lo, at_hi) = if m.is_negative() { (scaled.1, scaled.0) } else { scaled };
        if &at_lo <= x.hi() && &at_hi >= x.lo() {
            let phase = m.mod_floor(&BigInt::from(4)).to_u32().expect("phase in 0..4");
            match (f, phase) {
                (Trig::Sin, 1) | (Trig::Cos, 0) => hi = Rational::one(),
                (Trig::Sin, 3) | (Trig::Cos, 2) => lo = -Rational::one(),
                _ => {}
            }
        }
        m += 1;
    }
    RationalInterval::new(lo, hi).clamp_unit()
}

/// Exact decision of `l <= sqrt(a)`.
pub fn sqrt_decide(l: &Rational, a: &Rational) -> Result<bool, OracleError> {
    if a.is_negative() {
        return Err(OracleError::NegativeDomain);
    }
    if !l.is_positive() {
        return Ok(true);
    }
    Ok(&(l * l) <= a)
}

/// Exact decision of `sqrt(a) <= u`.
pub fn sqrt_upper_decide(u: &Rational, a: &Rational) -> Result<bool, OracleError> {
    if a.is_negative() {
        return Err(OracleError::NegativeDomain);
    }
    if u.is_negative() {
        return Ok(false);
    }
    Ok(a <= &(u * u))
}

/// Enclosure of `sqrt(a)` with relative width about `2^-p`, from the exact
/// integer square root of `floor(a * 4^w)`.
pub fn sqrt_enclosure(a: &Rational, p: u32) -> Result<RationalInterval, OracleError> {
    if a.is_negative() {
        return Err(OracleError::NegativeDomain);
    }
    if a.is_zero() {
        return Ok(RationalInterval::point(Rational::zero()));
    }
    let k = floor_log2(a);
    let w = p as u64 + 4 + (if k < 0 { (-k) as u64 / 2 + 1 } else { 0 });
    let scaled = a * Rational::from_integer(BigInt::one() << (2 * w) as usize);
    let n = scaled.floor().to_integer();
    let s = n.sqrt();
    let exact = scaled.is_integer() && &s * &s == n;
    let hi = if exact { s.clone() } else { &s + 1u8 };
    Ok(RationalInterval::new(dyadic(s, w), dyadic(hi, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float_kernel::decompose;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn contains_f64_bracket(iv: &RationalInterval, lo: f64, hi: f64) -> bool {
        // the enclosure must meet [lo, hi], the double bracket of the true value
        iv.hi() >= &decompose(lo).unwrap() && iv.lo() <= &decompose(hi).unwrap()
    }

    #[test]
    fn pi_examples() {
        let pi = pi_enclosure(32);
        assert!(pi.width() <= Rational::new(1.into(), BigInt::one() << 32usize));
        // 3.14159265358979323846 bracketed by two decimal truncations
        let below = Rational::new(314159265358979323u64.into(), 100000000000000000u64.into());
        let above = Rational::new(314159265358979324u64.into(), 100000000000000000u64.into());
        let pi64 = pi_enclosure(64);
        assert!(pi64.lo() > &below && pi64.hi() < &above);
        for p in [8u32, 16, 40, 100] {
            let e = pi_enclosure(p);
            assert!(e.lo() > &q(3, 1) && e.lo() < &q(22, 7));
            assert!(e.width() <= Rational::new(1.into(), BigInt::one() << p as usize));
        }
    }

    #[test]
    fn pi_refinement_nests() {
        for p in [8u32, 20, 32, 64, 200] {
            let coarse = pi_enclosure(p);
            let fine = pi_enclosure(p + 8);
            assert!(fine.is_subset_of(&coarse), "p = {p}");
        }
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_enclosure(&q(0, 1), 64).unwrap(), RationalInterval::point(q(1, 1)));
        let e = exp_enclosure(&q(1, 1), 40).unwrap();
        assert!(e.width() <= Rational::new(3.into(), BigInt::one() << 40usize));
        // e = 2.718281828459045235..
        assert!(
            e.contains(&Rational::new(2718281828459045235u64.into(), 1000000000000000000u64.into()))
                || e.contains(&Rational::new(2718281828459045236u64.into(), 1000000000000000000u64.into()))
        );
        assert!(contains_f64_bracket(&e, std::f64::consts::E, 2.7182818284590455));
        let inv = exp_enclosure(&q(-1, 1), 40).unwrap();
        assert!(e.mul(&inv).contains(&q(1, 1)));
        assert!(exp_enclosure(&q(2000, 1), 40).is_err());
        let tiny = exp_enclosure(&q(-5000, 1), 40).unwrap();
        assert_eq!(tiny.lo(), &q(0, 1));
    }

    #[test]
    fn exp_large_arguments_keep_relative_precision() {
        for x in [300i64, -300, 700, -745, 1000] {
            let e = exp_enclosure(&q(x, 1), 64).unwrap();
            let rel = e.width() / e.lo();
            assert!(rel < Rational::new(1.into(), BigInt::one() << 58usize), "x = {x}");
            let f = (x as f64).exp();
            if f.is_normal() {
                assert!(contains_f64_bracket(&e, crate::float_kernel::pred(f), crate::float_kernel::succ(f)));
            }
        }
    }

    /// Decimal literal to an exact rational.
    fn dec(s: &str) -> Rational {
        let (int, frac) = s.split_once('.').unwrap();
        let digits: BigInt = format!("{int}{frac}").parse().unwrap();
        Rational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    }

    #[test]
    fn trig_examples() {
        assert_eq!(trig_enclosure(Trig::Sin, &q(0, 1), 40), RationalInterval::point(q(0, 1)));
        assert_eq!(trig_enclosure(Trig::Cos, &q(0, 1), 40), RationalInterval::point(q(1, 1)));
        let s = trig_enclosure(Trig::Sin, &q(1, 1), 40);
        assert!(s.width() <= Rational::new(1.into(), BigInt::one() << 38usize));
        assert!(s.contains(&dec("0.8414709848078965066525023216302989996226")));
        let c = trig_enclosure(Trig::Cos, &q(4, 1), 60);
        assert!(c.contains(&dec("-0.6536436208636119146391681830977503814241")));
        let big = trig_enclosure(Trig::Sin, &q(1_000_000, 1), 60);
        assert!(big.contains(&dec("-0.3499935021712929521176524867807714690614")));
        let huge = Rational::from_integer(BigInt::one() << 70usize);
        assert_eq!(trig_enclosure(Trig::Cos, &huge, 60).width(), q(2, 1));
    }

    #[test]
    fn trig_matches_libm_for_varied_arguments() {
        for i in -200..200 {
            let x = i as f64 * 0.37 + 0.011;
            let xr = decompose(x).unwrap();
            for (f, v) in [(Trig::Sin, x.sin()), (Trig::Cos, x.cos())] {
                let e = trig_enclosure(f, &xr, 80);
                let lo = crate::float_kernel::pred(crate::float_kernel::pred(v));
                let hi = crate::float_kernel::succ(crate::float_kernel::succ(v));
                assert!(contains_f64_bracket(&e, lo, hi), "{f:?}({x})");
            }
        }
    }

    #[test]
    fn sqrt_decisions() {
        assert!(sqrt_decide(&q(2, 1), &q(4, 1)).unwrap());
        assert!(!sqrt_decide(&q(3, 1), &q(4, 1)).unwrap());
        assert!(sqrt_decide(&q(-1, 1), &q(0, 1)).unwrap());
        assert_eq!(sqrt_decide(&q(1, 1), &q(-1, 1)), Err(OracleError::NegativeDomain));
        assert!(sqrt_upper_decide(&q(2, 1), &q(4, 1)).unwrap());
        assert!(!sqrt_upper_decide(&q(-1, 1), &q(0, 1)).unwrap());
    }

    #[test]
    fn sqrt_enclosure_is_certified_by_squaring() {
        for (n, d) in [(2i64, 1i64), (4, 1), (1, 3), (1, 1_000_000_007), (123456789, 1000)] {
            let a = q(n, d);
            let e = sqrt_enclosure(&a, 64).unwrap();
            assert!(sqrt_decide(e.lo(), &a).unwrap());
            assert!(sqrt_upper_decide(e.hi(), &a).unwrap());
            assert!(e.width() / e.lo() < Rational::new(1.into(), BigInt::one() << 60usize));
        }
        assert!(sqrt_enclosure(&q(4, 1), 64).unwrap().is_point());
        assert!(sqrt_enclosure(&q(-4, 1), 64).is_err());
    }

    #[test]
    fn trig_interval_examples() {
        let iv = |a: i64, b: i64| RationalInterval::new(q(a, 1), q(b, 1));
        let s = trig_interval(Trig::Sin, &iv(0, 4), 64);
        assert_eq!(s.hi(), &q(1, 1));
        assert!(s.contains(&dec("-0.7568024953079282513726390945118290941359")));
        assert!(s.lo() > &q(-76, 100));
        // cos over [-1/2, 1/2] bottoms out at cos(1/2), not at 1 - 1/2
        let c = trig_interval(Trig::Cos, &RationalInterval::new(q(-1, 2), q(1, 2)), 64);
        assert_eq!(c.hi(), &q(1, 1));
        assert!(c.lo() > &q(877, 1000) && c.lo() < &q(8776, 10000));
        assert_eq!(trig_interval(Trig::Cos, &iv(0, 7), 64), iv(-1, 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat() -> impl Strategy<Value = Rational> {
            (-20_000i64..20_000, 1i64..1000).prop_map(|(n, d)| q(n, d))
        }

        fn exp_domain(x: &Rational) -> bool {
            x.abs() <= q(EXP_ARG_LIMIT, 1)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn refinement_nests(x in rat()) {
                if exp_domain(&x) {
                    let e64 = exp_enclosure(&x, 64).unwrap();
                    prop_assert!(exp_enclosure(&x, 128).unwrap().is_subset_of(&e64));
                }
                for f in [Trig::Sin, Trig::Cos] {
                    prop_assert!(trig_enclosure(f, &x, 128).is_subset_of(&trig_enclosure(f, &x, 64)));
                }
                let a = x.abs();
                prop_assert!(sqrt_enclosure(&a, 128).unwrap().is_subset_of(&sqrt_enclosure(&a, 64).unwrap()));
            }

            #[test]
            fn exp_product_contains_one(x in rat()) {
                prop_assume!(exp_domain(&x));
                let prod = exp_enclosure(&x, 64).unwrap().mul(&exp_enclosure(&-x.clone(), 64).unwrap());
                prop_assert!(prod.contains(&q(1, 1)));
            }

            #[test]
            fn pythagorean_identity(x in rat()) {
                let s = trig_enclosure(Trig::Sin, &x, 64);
                let c = trig_enclosure(Trig::Cos, &x, 64);
                prop_assert!(s.mul(&s).add(&c.mul(&c)).contains(&q(1, 1)));
            }

            #[test]
            fn interval_form_contains_samples(a in rat(), w in 0i64..8000, t in 0i64..=100) {
                let b = &a + q(w, 1000);
                let inner = &a + (&b - &a) * q(t, 100);
                for f in [Trig::Sin, Trig::Cos] {
                    let whole = trig_interval(f, &RationalInterval::new(a.clone(), b.clone()), 64);
                    prop_assert!(trig_enclosure(f, &inner, 64).is_subset_of(&whole));
                }
            }
        }
    }
}
