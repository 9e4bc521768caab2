//! Exact collision decision over the rationals.

use std::cmp::Ordering;

use num_traits::Zero;

use super::poly::{isolate_roots, sign_at_root, Poly, Root, Sturm};
use super::{exact_vertex, CcdError, CcdQuery, QueryKind};
use crate::rational_oracle::Rational;

/// Coplanarity polynomial `c0 + c1 t + c2 t^2 + c3 t^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicPoly {
    c: [Rational; 4],
}

impl CubicPoly {
    fn from_poly(p: &Poly) -> CubicPoly {
        assert!(p.degree() <= 3, "coplanarity polynomial above degree 3");
        CubicPoly { c: std::array::from_fn(|i| p.coeff(i)) }
    }

    /// Coefficients from the constant term up.
    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.to_poly().eval(t)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.c.to_vec())
    }
}

type PVec = [Poly; 3];

fn psub(a: &PVec, b: &PVec) -> PVec {
    std::array::from_fn(|k| a[k].sub(&b[k]))
}

fn pdot(a: &PVec, b: &PVec) -> Poly {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

fn pcross(a: &PVec, b: &PVec) -> PVec {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// Exact trajectories `s + t (e - s)` of the four vertices.
fn trajectories(q: &CcdQuery) -> [PVec; 4] {
    std::array::from_fn(|i| {
        let (s, e) = exact_vertex(q, i);
        std::array::from_fn(|k| Poly::linear(s[k].clone(), &e[k] - &s[k]))
    })
}

fn det_poly(x: &[PVec; 4], kind: QueryKind) -> Poly {
    let (a, b, c) = match kind {
        QueryKind::VertexFace => (psub(&x[0], &x[1]), psub(&x[2], &x[1]), psub(&x[3], &x[1])),
        QueryKind::EdgeEdge => (psub(&x[1], &x[0]), psub(&x[2], &x[0]), psub(&x[3], &x[0])),
    };
    pdot(&a, &pcross(&b, &c))
}

/// Exact coefficients of the determinant that vanishes when the four
/// vertices are coplanar.
pub fn coplanarity_cubic(q: &CcdQuery) -> CubicPoly {
    CubicPoly::from_poly(&det_poly(&trajectories(q), q.kind))
}

/// Distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count(p: &CubicPoly, lo: &Rational, hi: &Rational) -> Result<usize, CcdError> {
    if p.is_zero() {
        return Err(CcdError::IdenticallyZeroCubic);
    }
    Ok(Sturm::new(&p.to_poly()).count(lo, hi))
}

/// Numerators and denominator of the contact parameters, each a polynomial
/// in `t`. Contact is valid where every entry of `ge_zero` is nonnegative,
/// given a positive denominator.
struct Params {
    ge_zero: Vec<Poly>,
    den: Poly,
}

fn contact_params(x: &[PVec; 4], kind: QueryKind) -> Params {
    match kind {
        QueryKind::VertexFace => {
            let e1 = psub(&x[2], &x[1]);
            let e2 = psub(&x[3], &x[1]);
            let w = psub(&x[0], &x[1]);
            let (d11, d12, d22) = (pdot(&e1, &e1), pdot(&e1, &e2), pdot(&e2, &e2));
            let (dw1, dw2) = (pdot(&w, &e1), pdot(&w, &e2));
            let den = d11.mul(&d22).sub(&d12.mul(&d12));
            let u = d22.mul(&dw1).sub(&d12.mul(&dw2));
            let v = d11.mul(&dw2).sub(&d12.mul(&dw1));
            let rest = den.sub(&u).sub(&v);
            Params { ge_zero: vec![u, v, rest], den }
        }
        QueryKind::EdgeEdge => {
            let d1 = psub(&x[1], &x[0]);
            let d2 = psub(&x[3], &x[2]);
            let r = psub(&x[0], &x[2]);
            let (a, b, c) = (pdot(&d1, &d1), pdot(&d1, &d2), pdot(&d2, &d2));
            let (d, e) = (pdot(&d1, &r), pdot(&d2, &r));
            let den = a.mul(&c).sub(&b.mul(&b));
            let u = b.mul(&e).sub(&c.mul(&d));
            let v = a.mul(&e).sub(&b.mul(&d));
            Params { ge_zero: vec![den.sub(&u), den.sub(&v), u, v], den }
        }
    }
}

/// Whether the primitives touch for some `t` in `[0, 1]`, decided exactly.
/// Contact on a boundary counts.
pub fn ccd_oracle(q: &CcdQuery) -> Result<bool, CcdError> {
    let x = trajectories(q);
    let cubic = det_poly(&x, q.kind);
    if cubic.is_zero() {
        return Err(CcdError::DegenerateQuery("coplanar for all t"));
    }
    let params = contact_params(&x, q.kind);
    let (zero, one) = (Rational::zero(), Rational::from_integer(1.into()));
    for root in isolate_roots(&cubic, &zero, &one) {
        let sign = |g: &Poly| match &root {
            Root::Exact(r) => g.sign_at(r),
            Root::Isolated(lo, hi) => sign_at_root(&cubic, g, lo, hi),
        };
        // the Gram denominator is nonnegative; zero means the triangle
        // or the edge pair degenerates at the contact time
        if sign(&params.den) != Ordering::Greater {
            return Err(CcdError::DegenerateQuery(match q.kind {
                QueryKind::VertexFace => "degenerate triangle at a coplanar time",
                QueryKind::EdgeEdge => "parallel edges at a coplanar time",
            }));
        }
        if params.ge_zero.iter().all(|g| sign(g) != Ordering::Less) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccd::Vec3;
    use crate::float_kernel::decompose;
    use num_traits::One;

    fn r(x: f64) -> Rational {
        decompose(x).unwrap()
    }

    const TRI: [Vec3; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

    fn vf(p0: Vec3, p1: Vec3) -> CcdQuery {
        CcdQuery::new(QueryKind::VertexFace, [p0, TRI[0], TRI[1], TRI[2]], [p1, TRI[0], TRI[1], TRI[2]]).unwrap()
    }

    #[test]
    fn crossing_cubic_is_linear() {
        let c = coplanarity_cubic(&vf([0.1, 0.1, -1.0], [0.1, 0.1, 1.0]));
        assert_eq!(c.coeffs(), &[r(-1.0), r(2.0), r(0.0), r(0.0)]);
        assert!(coplanarity_cubic(&vf([0.2, 0.2, 0.0], [0.3, 0.1, 0.0])).is_zero());
    }

    #[test]
    fn sturm_count_examples() {
        let p = CubicPoly::from_poly(&Poly::new(vec![r(0.0), r(1.0), r(-3.0), r(2.0)]));
        assert_eq!(sturm_count(&p, &Rational::new((-1).into(), 2.into()), &Rational::one()), Ok(3));
        let q = CubicPoly::from_poly(&Poly::new(vec![r(1.0), r(0.0), r(1.0)]));
        assert_eq!(sturm_count(&q, &Rational::zero(), &Rational::one()), Ok(0));
        let zero = CubicPoly::from_poly(&Poly::zero());
        assert_eq!(sturm_count(&zero, &Rational::zero(), &Rational::one()), Err(CcdError::IdenticallyZeroCubic));
    }

    #[test]
    fn grazing_contacts_count() {
        // through the edge v0 v2 (u = 0), the edge v0 v1 (v = 0), the
        // hypotenuse (u + v = 1) and the vertex v0
        for p in [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.0]] {
            let q = vf([p[0], p[1], -1.0], [p[0], p[1], 1.0]);
            assert_eq!(ccd_oracle(&q), Ok(true), "{p:?}");
        }
        let just_out = vf([0.5 + 2f64.powi(-40), 0.5, -1.0], [0.5 + 2f64.powi(-40), 0.5, 1.0]);
        assert_eq!(ccd_oracle(&just_out), Ok(false));
    }

    #[test]
    fn edge_edge_decisions() {
        let a = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        let ee = |b0: Vec3, b1: Vec3, dz: f64| {
            CcdQuery::new(
                QueryKind::EdgeEdge,
                [a[0], a[1], [b0[0], b0[1], b0[2] - dz], [b1[0], b1[1], b1[2] - dz]],
                [a[0], a[1], [b0[0], b0[1], b0[2] + dz], [b1[0], b1[1], b1[2] + dz]],
            )
            .unwrap()
        };
        assert_eq!(ccd_oracle(&ee([0.5, -1.0, 0.0], [0.5, 1.0, 0.0], 1.0)), Ok(true));
        assert_eq!(ccd_oracle(&ee([2.0, -1.0, 0.0], [2.0, 1.0, 0.0], 1.0)), Ok(false));
        // endpoint of b touches a
        assert_eq!(ccd_oracle(&ee([0.5, 0.0, 0.0], [0.5, 1.0, 0.0], 1.0)), Ok(true));
        // parallel edges meeting the plane of a
        assert!(matches!(ccd_oracle(&ee([0.0, 1.0, 0.0], [1.0, 1.0, 0.0], 1.0)), Err(CcdError::DegenerateQuery(_))));
    }

    #[test]
    fn cubic_matches_exact_determinant() {
        let q = CcdQuery::new(
            QueryKind::VertexFace,
            [[0.3, -0.2, 1.5], [0.0, 0.1, 0.0], [1.0, 0.25, -0.5], [0.0, 1.0, 0.125]],
            [[-0.7, 0.4, -2.0], [0.5, 0.0, 0.5], [1.25, 0.0, 0.0], [-0.5, 1.5, 0.0]],
        )
        .unwrap();
        let c = coplanarity_cubic(&q);
        for k in 0..=8 {
            let t = Rational::new(k.into(), 8.into());
            let at = |i: usize| {
                let (s, e) = exact_vertex(&q, i);
                [0, 1, 2].map(|j| &s[j] + (&e[j] - &s[j]) * &t)
            };
            let x = [at(0), at(1), at(2), at(3)];
            let sub = |a: &[Rational; 3], b: &[Rational; 3]| [0, 1, 2].map(|j| &a[j] - &b[j]);
            let (u, v, w) = (sub(&x[0], &x[1]), sub(&x[2], &x[1]), sub(&x[3], &x[1]));
            let det = &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
                + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0]);
            assert_eq!(c.eval(&t), det);
        }
    }
}
