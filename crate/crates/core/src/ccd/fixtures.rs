//! Built-in query suite with exactly decided ground truth.

use super::{ccd_oracle, CcdQuery, QueryKind, Vec3};
use crate::rng::SplitMix64;

const FIXTURE_SEED: u64 = 0x00cc_d5ee_d000_0001;
const PLANTED_PER_KIND: usize = 16;

const TRI: [Vec3; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

fn moving_point(p0: Vec3, p1: Vec3) -> CcdQuery {
    CcdQuery { kind: QueryKind::VertexFace, start: [p0, TRI[0], TRI[1], TRI[2]], end: [p1, TRI[0], TRI[1], TRI[2]] }
}

/// Vertical pass through `(x, y)` in the plane `z = 0`.
fn pass_at(x: f64, y: f64) -> CcdQuery {
    moving_point([x, y, -1.0], [x, y, 1.0])
}

/// Edge `b` sweeping through `z = 0` against the x-axis edge `a`.
fn sweep(b0: Vec3, b1: Vec3) -> CcdQuery {
    let a = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
    CcdQuery {
        kind: QueryKind::EdgeEdge,
        start: [a[0], a[1], [b0[0], b0[1], -1.0], [b1[0], b1[1], -1.0]],
        end: [a[0], a[1], [b0[0], b0[1], 1.0], [b1[0], b1[1], 1.0]],
    }
}

fn hand_authored() -> Vec<(&'static str, CcdQuery)> {
    let tiny = 2f64.powi(-30);
    let (gap16, gap24) = (2f64.powi(-16), 2f64.powi(-24));
    vec![
        ("vf-cross", pass_at(0.1, 0.1)),
        ("vf-outside", pass_at(5.0, 5.0)),
        ("vf-graze-u0", pass_at(0.0, 0.5)),
        ("vf-graze-v0", pass_at(0.5, 0.0)),
        ("vf-graze-uv1", pass_at(0.5, 0.5)),
        ("vf-graze-vertex", pass_at(0.0, 0.0)),
        ("vf-graze-far-vertex", pass_at(1.0, 0.0)),
        ("vf-near-miss-hyp", pass_at(0.5 + tiny, 0.5)),
        ("vf-near-miss-edge", pass_at(-tiny, 0.25)),
        ("vf-gap16-hyp", pass_at(0.5 + gap16, 0.5)),
        ("vf-gap24-hyp", pass_at(0.5 + gap24, 0.5)),
        ("vf-gap16-edge", pass_at(0.25, -gap16)),
        ("vf-near-inside", pass_at(0.5 - tiny, 0.5)),
        ("vf-stops-short", moving_point([0.2, 0.2, -1.0], [0.2, 0.2, -tiny])),
        ("vf-ends-on-face", moving_point([0.2, 0.2, -1.0], [0.2, 0.2, 0.0])),
        ("vf-starts-on-face", moving_point([0.3, 0.3, 0.0], [0.3, 0.3, 1.0])),
        ("vf-diagonal", moving_point([-1.0, -1.0, -1.0], [1.25, 1.25, 1.0])),
        ("vf-diagonal-miss", moving_point([-1.0, 2.0, -1.0], [1.0, 2.0, 1.0])),
        (
            "vf-moving-face",
            CcdQuery {
                kind: QueryKind::VertexFace,
                start: [[0.25, 0.25, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]],
                end: [[0.25, 0.25, 0.0], [0.0, 0.0, -1.0], [1.0, 0.0, -1.0], [0.0, 1.0, -1.0]],
            },
        ),
        (
            "vf-rotating-face",
            CcdQuery {
                kind: QueryKind::VertexFace,
                start: [[0.25, 0.25, 0.5], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 1.0]],
                end: [[0.25, 0.25, 0.5], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            },
        ),
        ("ee-cross", sweep([0.5, -1.0, 0.0], [0.5, 1.0, 0.0])),
        ("ee-miss", sweep([2.0, -1.0, 0.0], [2.0, 1.0, 0.0])),
        ("ee-graze-endpoint-b", sweep([0.5, 0.0, 0.0], [0.5, 1.0, 0.0])),
        ("ee-graze-endpoint-a", sweep([1.0, -1.0, 0.0], [1.0, 1.0, 0.0])),
        ("ee-graze-both-endpoints", sweep([0.0, 0.0, 0.0], [-1.0, 1.0, 0.0])),
        ("ee-near-miss", sweep([1.0 + tiny, -1.0, 0.0], [1.0 + tiny, 1.0, 0.0])),
        ("ee-gap16", sweep([1.0 + gap16, -1.0, 0.0], [1.0 + gap16, 1.0, 0.0])),
        ("ee-gap24", sweep([-gap24, -1.0, 0.0], [-gap24, 1.0, 0.0])),
        ("ee-skew-cross", sweep([0.25, -1.0, 0.0], [0.75, 1.0, 0.0])),
        ("ee-skew-miss", sweep([0.25, 0.5, 0.0], [0.75, 2.0, 0.0])),
    ]
}

fn grid(rng: &mut SplitMix64, lo: i64, hi: i64) -> f64 {
    (lo + rng.below((hi - lo + 1) as u64) as i64) as f64 / 16.0
}

fn grid_vec(rng: &mut SplitMix64, lo: i64, hi: i64) -> Vec3 {
    [grid(rng, lo, hi), grid(rng, lo, hi), grid(rng, lo, hi)]
}

fn axpy(a: f64, x: Vec3, y: Vec3) -> Vec3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

/// Trajectory through `mid` at `t = 1/2` with displacement `d` either side.
fn through(mid: [Vec3; 4], d: [Vec3; 4]) -> ([Vec3; 4], [Vec3; 4]) {
    (std::array::from_fn(|i| axpy(-1.0, d[i], mid[i])), std::array::from_fn(|i| axpy(1.0, d[i], mid[i])))
}

/// Queries whose primitives meet, or nearly meet, at `t = 1/2`. All
/// coordinates are small dyadics, so the positions are exact.
fn planted(rng: &mut SplitMix64, kind: QueryKind, touching: bool) -> CcdQuery {
    let eighth = |rng: &mut SplitMix64, lo: i64, hi: i64| (lo + rng.below((hi - lo + 1) as u64) as i64) as f64 / 8.0;
    let (u, v) = if touching {
        loop {
            let (u, v) = (eighth(rng, 0, 8), eighth(rng, 0, 8));
            if kind == QueryKind::EdgeEdge || u + v <= 1.0 {
                break (u, v);
            }
        }
    } else {
        (eighth(rng, 9, 16), eighth(rng, -4, 8))
    };
    let d: [Vec3; 4] = std::array::from_fn(|_| grid_vec(rng, -16, 16));
    let mid = match kind {
        QueryKind::VertexFace => {
            let v0 = grid_vec(rng, -16, 16);
            let e1 = grid_vec(rng, -16, 16);
            let e2 = grid_vec(rng, -16, 16);
            let p = axpy(v, e2, axpy(u, e1, v0));
            [p, v0, axpy(1.0, e1, v0), axpy(1.0, e2, v0)]
        }
        QueryKind::EdgeEdge => {
            let x = grid_vec(rng, -16, 16);
            let d1 = grid_vec(rng, -16, 16);
            let d2 = grid_vec(rng, -16, 16);
            let a0 = axpy(-u, d1, x);
            let b0 = axpy(-v, d2, x);
            [a0, axpy(1.0, d1, a0), b0, axpy(1.0, d2, b0)]
        }
    };
    let (start, end) = through(mid, d);
    CcdQuery { kind, start, end }
}

/// The built-in suite: hand-authored crossings, misses and boundary
/// contacts, then seeded queries with contacts planted at `t = 1/2`.
/// Each entry carries its exact verdict. Queries the exact decision
/// rejects as degenerate are left out.
pub fn fixture_suite() -> Vec<(String, CcdQuery, bool)> {
    let mut out: Vec<(String, CcdQuery, bool)> = Vec::new();
    let mut keep = |id: String, q: CcdQuery| {
        if let Ok(truth) = ccd_oracle(&q) {
            out.push((id, q, truth));
        }
    };
    for (id, q) in hand_authored() {
        keep(id.to_string(), q);
    }
    let mut rng = SplitMix64::new(FIXTURE_SEED);
    for kind in [QueryKind::VertexFace, QueryKind::EdgeEdge] {
        for touching in [true, false] {
            for i in 0..PLANTED_PER_KIND {
                let q = planted(&mut rng, kind, touching);
                let tag = if touching { "hit" } else { "off" };
                keep(format!("{}-planted-{tag}-{i:02}", kind.name()), q);
            }
        }
    }
    out
}
