//! Dense univariate polynomials over the rationals, with Sturm sequences.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::rational_oracle::Rational;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    c: Vec<Rational>,
}

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(x: Rational) -> Poly {
        Poly::new(vec![x])
    }

    /// `a + b t`
    pub fn linear(a: Rational, b: Rational) -> Poly {
        Poly::new(vec![a, b])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.c.len() as i32 - 1
    }

    /// Coefficient of `t^i`.
    pub fn coeff(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    fn lead(&self) -> &Rational {
        self.c.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.c.iter().rev().fold(Rational::zero(), |acc, x| acc * t + x)
    }

    pub fn sign_at(&self, t: &Rational) -> Ordering {
        self.eval(t).cmp(&Rational::zero())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, x)| x * Rational::from_integer(i.into())).collect())
    }

    /// Remainder of division by a nonzero `d`.
    pub fn rem(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.c.clone();
        let dl = d.c.len();
        let lead = d.lead();
        while r.len() >= dl {
            let q = r.last().expect("nonempty") / lead;
            let shift = r.len() - dl;
            for (i, x) in d.c.iter().enumerate() {
                r[shift + i] -= &q * x;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        Poly::new(r)
    }

    /// Monic greatest common divisor; zero only if both are zero.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.lead().clone();
        Poly { c: a.c.iter().map(|x| x / &lead).collect() }
    }
}

/// Sturm sequence of a nonzero polynomial.
#[derive(Clone, Debug)]
pub struct Sturm {
    seq: Vec<Poly>,
}

impl Sturm {
    pub fn new(p: &Poly) -> Sturm {
        assert!(!p.is_zero(), "Sturm sequence of the zero polynomial");
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            seq.push(r);
        }
        seq.pop();
        Sturm { seq }
    }

    fn variations(&self, t: &Rational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let s = p.sign_at(t);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// Root of a polynomial located exactly or isolated in `(lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact(Rational),
    Isolated(Rational, Rational),
}

/// All distinct real roots of `p` in `[lo, hi]`, in increasing order.
pub fn isolate_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Vec<Root> {
    let sturm = Sturm::new(p);
    let mut out = Vec::new();
    if p.eval(lo).is_zero() {
        out.push(Root::Exact(lo.clone()));
    }
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 if p.eval(&b).is_zero() => out.push(Root::Exact(b)),
            1 => out.push(Root::Isolated(a, b)),
            _ => {
                let mid = (&a + &b) / Rational::from_integer(2.into());
                // push right first so the left half is processed first
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    out
}

/// Sign of `g` at the root of `p` isolated in `(lo, hi]`, where `p` has no
/// other root there.
pub fn sign_at_root(p: &Poly, g: &Poly, lo: &Rational, hi: &Rational) -> Ordering {
    if g.is_zero() {
        return Ordering::Equal;
    }
    let common = p.gcd(g);
    if common.degree() >= 1 && Sturm::new(&common).count(lo, hi) >= 1 {
        return Ordering::Equal;
    }
    let sturm_p = Sturm::new(p);
    let sturm_g = Sturm::new(g);
    let (mut a, mut b) = (lo.clone(), hi.clone());
    loop {
        if sturm_g.count(&a, &b) == 0 {
            // g keeps one sign on (a, b], which holds the root
            return g.sign_at(&b);
        }
        let mid = (&a + &b) / Rational::from_integer(2.into());
        if p.eval(&mid).is_zero() {
            return g.sign_at(&mid);
        }
        if sturm_p.count(&a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
}
