//! Continuous collision detection between linearly moving primitives:
//! interval root finders and an exact decision procedure to check them.

mod dataset;
mod fixtures;
mod oracle;
mod poly;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::float_kernel::{ceil_f64, decompose, floor_f64};
use crate::interval_core::{self as ic, make_point, Interval, Strategy};
use crate::rational_oracle::Rational;

pub use dataset::{read_dataset, run_ccd_benchmark, write_ccd_report, write_dataset, CcdMethod, CcdRow, LabeledQuery};
pub use fixtures::fixture_suite;
pub use oracle::{ccd_oracle, coplanarity_cubic, sturm_count, CubicPoly};
pub use poly::{isolate_roots, sign_at_root, Poly, Root, Sturm};

/// Default bisection tolerance in parameter units.
pub const DEFAULT_DELTA: f64 = 1e-6;
/// Boxes a root finder may examine before it gives up and reports a hit.
pub const MAX_BOXES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    /// Vertex 0 against the triangle of vertices 1, 2, 3.
    VertexFace,
    /// Edge of vertices 0, 1 against the edge of vertices 2, 3.
    EdgeEdge,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::VertexFace => "vf",
            QueryKind::EdgeEdge => "ee",
        }
    }
}

pub type Vec3 = [f64; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct CcdQuery {
    pub kind: QueryKind,
    pub start: [Vec3; 4],
    pub end: [Vec3; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcdError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("coplanarity polynomial is identically zero")]
    IdenticallyZeroCubic,
    #[error("degenerate query: {0}")]
    DegenerateQuery(&'static str),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl CcdQuery {
    pub fn new(kind: QueryKind, start: [Vec3; 4], end: [Vec3; 4]) -> Result<Self, CcdError> {
        if start.iter().chain(end.iter()).flatten().any(|x| !x.is_finite()) {
            return Err(CcdError::NonFinite);
        }
        Ok(CcdQuery { kind, start, end })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamBox {
    pub t: Interval,
    pub u: Interval,
    pub v: Interval,
}

impl ParamBox {
    pub fn unit() -> ParamBox {
        let unit = Interval::new(0.0, 1.0).expect("valid");
        ParamBox { t: unit, u: unit, v: unit }
    }

    fn widths(&self) -> [f64; 3] {
        [self.t.width(), self.u.width(), self.v.width()]
    }

    /// Halves along the widest dimension, preferring t, then u, on ties.
    fn split(&self) -> [ParamBox; 2] {
        let w = self.widths();
        let axis = if w[0] >= w[1] && w[0] >= w[2] {
            0
        } else if w[1] >= w[2] {
            1
        } else {
            2
        };
        let halves = |iv: Interval| {
            let mid = iv.lo() / 2.0 + iv.hi() / 2.0;
            (Interval::new(iv.lo(), mid).expect("ordered"), Interval::new(mid, iv.hi()).expect("ordered"))
        };
        let (mut a, mut b) = (*self, *self);
        match axis {
            0 => (a.t, b.t) = halves(self.t),
            1 => (a.u, b.u) = halves(self.u),
            _ => (a.v, b.v) = halves(self.v),
        }
        [a, b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcdResult {
    pub hit: bool,
    /// Time interval of the first surviving box, on a hit.
    pub t_box: Option<Interval>,
}

impl CcdResult {
    fn miss() -> Self {
        CcdResult { hit: false, t_box: None }
    }

    fn hit(t: Interval) -> Self {
        CcdResult { hit: true, t_box: Some(t) }
    }
}

fn point(x: f64) -> Interval {
    make_point(x).expect("finite coordinate")
}

fn one() -> Interval {
    point(1.0)
}

/// `(1 - t) start + t end`, per coordinate.
fn position(q: &CcdQuery, i: usize, t: Interval, s: Strategy) -> [Interval; 3] {
    let omt = ic::sub(one(), t, s);
    std::array::from_fn(|k| ic::add(ic::mul(omt, point(q.start[i][k]), s), ic::mul(t, point(q.end[i][k]), s), s))
}

/// Enclosure of `p(t) - ((1-u-v) v0(t) + u v1(t) + v v2(t))`.
pub fn f_vertex_face(b: &ParamBox, q: &CcdQuery, s: Strategy) -> [Interval; 3] {
    let p = position(q, 0, b.t, s);
    let v0 = position(q, 1, b.t, s);
    let v1 = position(q, 2, b.t, s);
    let v2 = position(q, 3, b.t, s);
    let w0 = ic::sub(ic::sub(one(), b.u, s), b.v, s);
    std::array::from_fn(|k| {
        let face = ic::add(ic::add(ic::mul(w0, v0[k], s), ic::mul(b.u, v1[k], s), s), ic::mul(b.v, v2[k], s), s);
        ic::sub(p[k], face, s)
    })
}

/// Enclosure of `((1-u) a0(t) + u a1(t)) - ((1-v) b0(t) + v b1(t))`.
pub fn f_edge_edge(b: &ParamBox, q: &CcdQuery, s: Strategy) -> [Interval; 3] {
    let a0 = position(q, 0, b.t, s);
    let a1 = position(q, 1, b.t, s);
    let b0 = position(q, 2, b.t, s);
    let b1 = position(q, 3, b.t, s);
    let (omu, omv) = (ic::sub(one(), b.u, s), ic::sub(one(), b.v, s));
    std::array::from_fn(|k| {
        let on_a = ic::add(ic::mul(omu, a0[k], s), ic::mul(b.u, a1[k], s), s);
        let on_b = ic::add(ic::mul(omv, b0[k], s), ic::mul(b.v, b1[k], s), s);
        ic::sub(on_a, on_b, s)
    })
}

/// Box ordered for a min-heap on `t.lo`, first-in first on ties.
struct Queued {
    t_lo: f64,
    seq: u64,
    b: ParamBox,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        o.t_lo.total_cmp(&self.t_lo).then(o.seq.cmp(&self.seq))
    }
}

/// Bisection over `(t, u, v)` in `[0, 1]^3`.
///
/// A box is dropped when a component of F excludes zero or, for
/// vertex-face queries, when `u + v > 1` holds on all of it. The first box
/// with every side at most `delta` is a hit. If [`MAX_BOXES`] boxes are
/// examined without a decision the result is a hit over `[0, 1]`.
pub fn multivariate_ccd(q: &CcdQuery, s: Strategy, delta: f64) -> CcdResult {
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let root = ParamBox::unit();
    heap.push(Queued { t_lo: root.t.lo(), seq, b: root });
    let mut examined = 0usize;
    while let Some(Queued { b, .. }) = heap.pop() {
        examined += 1;
        if examined > MAX_BOXES {
            return CcdResult::hit(root.t);
        }
        if q.kind == QueryKind::VertexFace && ic::add(point(b.u.lo()), point(b.v.lo()), s).lo() > 1.0 {
            continue;
        }
        let f = match q.kind {
            QueryKind::VertexFace => f_vertex_face(&b, q, s),
            QueryKind::EdgeEdge => f_edge_edge(&b, q, s),
        };
        if f.iter().any(|c| !c.contains_zero()) {
            continue;
        }
        if b.widths().iter().all(|w| *w <= delta) {
            return CcdResult::hit(b.t);
        }
        for child in b.split() {
            seq += 1;
            heap.push(Queued { t_lo: child.t.lo(), seq, b: child });
        }
    }
    CcdResult::miss()
}

fn outward(x: &Rational) -> Interval {
    Interval::new(floor_f64(x), ceil_f64(x)).expect("ordered rounding")
}

fn dot(a: &[Interval; 3], b: &[Interval; 3], s: Strategy) -> Interval {
    ic::add(ic::add(ic::mul(a[0], b[0], s), ic::mul(a[1], b[1], s), s), ic::mul(a[2], b[2], s), s)
}

fn diff(a: &[Interval; 3], b: &[Interval; 3], s: Strategy) -> [Interval; 3] {
    std::array::from_fn(|k| ic::sub(a[k], b[k], s))
}

/// Whether the contact parameters may lie in the valid region over `t`.
/// Degenerate geometry, where the parameters are undefined, passes.
fn may_touch(q: &CcdQuery, t: Interval, s: Strategy) -> bool {
    let x: [[Interval; 3]; 4] = std::array::from_fn(|i| position(q, i, t, s));
    let ratio = |n: Interval, d: Interval| ic::div(n, d, s).ok();
    match q.kind {
        QueryKind::VertexFace => {
            let e1 = diff(&x[2], &x[1], s);
            let e2 = diff(&x[3], &x[1], s);
            let w = diff(&x[0], &x[1], s);
            let (d11, d12, d22) = (dot(&e1, &e1, s), dot(&e1, &e2, s), dot(&e2, &e2, s));
            let (dw1, dw2) = (dot(&w, &e1, s), dot(&w, &e2, s));
            let den = ic::sub(ic::mul(d11, d22, s), ic::mul(d12, d12, s), s);
            let un = ic::sub(ic::mul(d22, dw1, s), ic::mul(d12, dw2, s), s);
            let vn = ic::sub(ic::mul(d11, dw2, s), ic::mul(d12, dw1, s), s);
            let (Some(u), Some(v)) = (ratio(un, den), ratio(vn, den)) else {
                return true;
            };
            u.hi() >= 0.0 && v.hi() >= 0.0 && ic::add(u, v, s).lo() <= 1.0
        }
        QueryKind::EdgeEdge => {
            let d1 = diff(&x[1], &x[0], s);
            let d2 = diff(&x[3], &x[2], s);
            let r = diff(&x[0], &x[2], s);
            let (a, b, c) = (dot(&d1, &d1, s), dot(&d1, &d2, s), dot(&d2, &d2, s));
            let (d, e) = (dot(&d1, &r, s), dot(&d2, &r, s));
            let den = ic::sub(ic::mul(a, c, s), ic::mul(b, b, s), s);
            let un = ic::sub(ic::mul(b, e, s), ic::mul(c, d, s), s);
            let vn = ic::sub(ic::mul(a, e, s), ic::mul(b, d, s), s);
            let (Some(u), Some(v)) = (ratio(un, den), ratio(vn, den)) else {
                return true;
            };
            u.hi() >= 0.0 && u.lo() <= 1.0 && v.hi() >= 0.0 && v.lo() <= 1.0
        }
    }
}

/// Bisection over `t` alone on the coplanarity cubic, evaluated by Horner
/// with outward-rounded coefficients. Time intervals at most `delta` wide
/// that survive are kept only if the contact parameters may be valid.
pub fn univariate_ccd(q: &CcdQuery, s: Strategy, delta: f64) -> Result<CcdResult, CcdError> {
    let cubic = coplanarity_cubic(q);
    if cubic.is_zero() {
        return Err(CcdError::IdenticallyZeroCubic);
    }
    let c: Vec<Interval> = cubic.coeffs().iter().map(outward).collect();
    let horner = |t: Interval| {
        let mut acc = c[3];
        for k in (0..3).rev() {
            acc = ic::add(ic::mul(acc, t, s), c[k], s);
        }
        acc
    };
    // depth-first, left half first, so hits come out in t order
    let mut stack = vec![Interval::new(0.0, 1.0).expect("valid")];
    let mut examined = 0usize;
    while let Some(t) = stack.pop() {
        examined += 1;
        if examined > MAX_BOXES {
            return Ok(CcdResult::hit(Interval::new(0.0, 1.0).expect("valid")));
        }
        if !horner(t).contains_zero() {
            continue;
        }
        if t.width() <= delta {
            if may_touch(q, t, s) {
                return Ok(CcdResult::hit(t));
            }
            continue;
        }
        let mid = t.lo() / 2.0 + t.hi() / 2.0;
        stack.push(Interval::new(mid, t.hi()).expect("ordered"));
        stack.push(Interval::new(t.lo(), mid).expect("ordered"));
    }
    Ok(CcdResult::miss())
}

/// Exact coordinates of vertex `i` at the start and end.
fn exact_vertex(q: &CcdQuery, i: usize) -> ([Rational; 3], [Rational; 3]) {
    let conv = |v: &Vec3| v.map(|x| decompose(x).expect("finite coordinate"));
    (conv(&q.start[i]), conv(&q.end[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: [Vec3; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

    fn vf(p0: Vec3, p1: Vec3) -> CcdQuery {
        CcdQuery::new(QueryKind::VertexFace, [p0, TRI[0], TRI[1], TRI[2]], [p1, TRI[0], TRI[1], TRI[2]]).unwrap()
    }

    fn both() -> [Strategy; 2] {
        [Strategy::PredSucc, Strategy::multiplicative_default()]
    }

    #[test]
    fn crossing_vertex_hits_at_half() {
        let q = vf([0.1, 0.1, -1.0], [0.1, 0.1, 1.0]);
        for s in both() {
            let r = multivariate_ccd(&q, s, DEFAULT_DELTA);
            assert!(r.hit && r.t_box.unwrap().contains(0.5), "{r:?}");
            let r = univariate_ccd(&q, s, DEFAULT_DELTA).unwrap();
            assert!(r.hit && r.t_box.unwrap().contains(0.5), "{r:?}");
        }
        assert!(ccd_oracle(&q).unwrap());
    }

    #[test]
    fn distant_vertex_misses() {
        let q = vf([5.0, 5.0, -1.0], [5.0, 5.0, 1.0]);
        for s in both() {
            assert!(!multivariate_ccd(&q, s, DEFAULT_DELTA).hit);
            assert!(!univariate_ccd(&q, s, DEFAULT_DELTA).unwrap().hit);
        }
        assert!(!ccd_oracle(&q).unwrap());
    }

    #[test]
    fn f_encloses_zero_where_expected() {
        let q = vf([0.0, 0.0, -1.0], [0.0, 0.0, 1.0]);
        let zero = Interval::new(0.0, 0.0).unwrap();
        let start = ParamBox { t: zero, u: zero, v: zero };
        let coincident = vf([0.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        assert!(f_vertex_face(&start, &coincident, Strategy::PredSucc).iter().all(|c| c.contains_zero()));
        let crossing = vf([0.1, 0.1, -1.0], [0.1, 0.1, 1.0]);
        assert!(f_vertex_face(&ParamBox::unit(), &crossing, Strategy::PredSucc)[2].contains_zero());
        assert!(f_vertex_face(&ParamBox::unit(), &q, Strategy::PredSucc)[2].contains_zero());

        let ee = CcdQuery::new(
            QueryKind::EdgeEdge,
            [[0.0; 3], [1.0, 0.0, 0.0], [0.0; 3], [0.0, 1.0, 0.0]],
            [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 1.0]],
        )
        .unwrap();
        assert!(f_edge_edge(&start, &ee, Strategy::PredSucc).iter().all(|c| c.contains_zero()));
        assert!(f_edge_edge(&ParamBox::unit(), &ee, Strategy::PredSucc)[2].contains_zero());
    }

    #[test]
    fn identically_zero_cubic_is_reported() {
        let flat = vf([0.2, 0.2, 0.0], [0.3, 0.1, 0.0]);
        assert_eq!(univariate_ccd(&flat, Strategy::PredSucc, DEFAULT_DELTA), Err(CcdError::IdenticallyZeroCubic));
        assert_eq!(ccd_oracle(&flat), Err(CcdError::DegenerateQuery("coplanar for all t")));
        assert!(CcdQuery::new(QueryKind::EdgeEdge, [[f64::NAN; 3]; 4], [[0.0; 3]; 4]).is_err());
    }

    mod props {
        use super::*;
        use crate::rational_oracle::RationalInterval;
        use proptest::prelude::{any, prop_assert, proptest, ProptestConfig, Strategy as _};

        fn coord() -> impl proptest::strategy::Strategy<Value = f64> {
            (-64i32..64).prop_map(|k| k as f64 / 16.0)
        }

        fn frac() -> impl proptest::strategy::Strategy<Value = (f64, f64)> {
            (0u32..=64, 0u32..=64).prop_map(|(a, b)| {
                let (a, b) = (a.min(b), a.max(b));
                (a as f64 / 64.0, b as f64 / 64.0)
            })
        }

        /// Exact F at a rational point, per coordinate.
        fn exact_f(q: &CcdQuery, t: &Rational, u: &Rational, v: &Rational) -> [Rational; 3] {
            let one = Rational::from_integer(1.into());
            let pos = |i: usize| {
                let (a, b) = exact_vertex(q, i);
                [0, 1, 2].map(|k| (&one - t) * &a[k] + t * &b[k])
            };
            let x = [pos(0), pos(1), pos(2), pos(3)];
            [0, 1, 2].map(|k| match q.kind {
                QueryKind::VertexFace => &x[0][k] - ((&one - u - v) * &x[1][k] + u * &x[2][k] + v * &x[3][k]),
                QueryKind::EdgeEdge => ((&one - u) * &x[0][k] + u * &x[1][k]) - ((&one - v) * &x[2][k] + v * &x[3][k]),
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn f_contains_exact_values(
                coords in proptest::collection::vec(coord(), 24),
                ee in any::<bool>(),
                t in frac(), u in frac(), v in frac(),
                pick in (0u32..=8, 0u32..=8, 0u32..=8),
            ) {
                let vtx = |o: usize| -> [Vec3; 4] {
                    std::array::from_fn(|i| [coords[o + 3 * i], coords[o + 3 * i + 1], coords[o + 3 * i + 2]])
                };
                let kind = if ee { QueryKind::EdgeEdge } else { QueryKind::VertexFace };
                let q = CcdQuery::new(kind, vtx(0), vtx(12)).unwrap();
                let iv = |(a, b): (f64, f64)| Interval::new(a, b).unwrap();
                let b = ParamBox { t: iv(t), u: iv(u), v: iv(v) };
                let at = |(a, b): (f64, f64), k: u32| {
                    let (a, b) = (decompose(a).unwrap(), decompose(b).unwrap());
                    &a + (b - &a) * Rational::new(k.into(), 8.into())
                };
                let value = exact_f(&q, &at(t, pick.0), &at(u, pick.1), &at(v, pick.2));
                for s in both() {
                    let f = match kind {
                        QueryKind::VertexFace => f_vertex_face(&b, &q, s),
                        QueryKind::EdgeEdge => f_edge_edge(&b, &q, s),
                    };
                    for k in 0..3 {
                        let enc = RationalInterval::new(decompose(f[k].lo()).unwrap(), decompose(f[k].hi()).unwrap());
                        prop_assert!(enc.contains(&value[k]));
                    }
                }
            }
        }
    }
}
