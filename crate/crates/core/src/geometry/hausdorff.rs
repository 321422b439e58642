//! Hausdorff distance between polygonal curves.
//!
//! For a segment `s(t) = A + t (B - A)` of one curve, `f(t) = dist(s(t), Q)`
//! is the lower envelope of the convex functions `t -> dist(s(t), q)` over
//! the segments `q` of the other curve. The maximum of such an envelope is
//! attained at an endpoint or at a point where two of the functions cross.
//! Branch and bound on `t` (using that `f` is Lipschitz with constant `|B - A|`)
//! narrows every interval to a handful of relevant segments, after which the
//! crossings are solved in closed form.

use crate::brownian::Polyline;
use crate::point::Point;

use super::index::SegmentIndex;
use super::{dist_segment_segment, dist_sq_point_segment};

/// How the directed suprema are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HausdorffMode {
    Exact,
    /// Sample every segment with spacing at most `step`; the result
    /// underestimates the true distance by at most `step / 2`.
    Sampled { step: f64 },
}

/// Exact Hausdorff distance between two polylines.
pub fn hausdorff_polyline(p: &Polyline, q: &Polyline) -> f64 {
    directed_hausdorff(p, q, HausdorffMode::Exact).max(directed_hausdorff(q, p, HausdorffMode::Exact))
}

/// Hausdorff distance in the given mode, with its certified error bound.
pub fn hausdorff_with_mode(p: &Polyline, q: &Polyline, mode: HausdorffMode) -> (f64, f64) {
    let v = directed_hausdorff(p, q, mode).max(directed_hausdorff(q, p, mode));
    let err = match mode {
        HausdorffMode::Exact => 0.0,
        HausdorffMode::Sampled { step } => 0.5 * step,
    };
    (v, err)
}

fn index_for(q: &Polyline) -> SegmentIndex {
    let bb = q.bounding_box();
    let extent = bb.width().max(bb.height());
    let total: f64 = q.segments().map(|(a, b)| a.dist(b)).sum();
    let mean = total / q.segment_count().max(1) as f64;
    SegmentIndex::new(q, (2.0 * mean).max(extent / 512.0).max(1e-12))
}

/// `sup_{x in p} dist(x, q)`.
pub fn directed_hausdorff(p: &Polyline, q: &Polyline, mode: HausdorffMode) -> f64 {
    let index = index_for(q);
    let dist = |x: Point| index.nearest(x, f64::INFINITY).map_or(f64::INFINITY, |(d, _)| d);
    let mut best = p.vertices().iter().map(|&v| dist(v)).fold(0.0, f64::max);
    match mode {
        HausdorffMode::Exact => {
            let mut scratch = Scratch::default();
            for (a, b) in p.segments() {
                if a != b {
                    best = best.max(segment_sup(a, b, &index, best, &mut scratch));
                }
            }
        }
        HausdorffMode::Sampled { step } => {
            assert!(step > 0.0, "sampling step must be positive");
            for (a, b) in p.segments() {
                let n = (a.dist(b) / step).ceil() as usize;
                for i in 1..n {
                    best = best.max(dist(a.lerp(b, i as f64 / n as f64)));
                }
            }
        }
    }
    best
}

#[derive(Default)]
struct Scratch {
    found: Vec<u32>,
    stack: Vec<(f64, f64, f64, f64)>,
}

/// Candidate count at which an interval is resolved in closed form.
const EXACT_CANDIDATES: usize = 8;

fn segment_sup(a: Point, b: Point, index: &SegmentIndex, floor: f64, scratch: &mut Scratch) -> f64 {
    let len = a.dist(b);
    let at = |t: f64| a.lerp(b, t);
    let min_over = |x: Point, cands: &[u32]| {
        cands
            .iter()
            .map(|&s| {
                let (u, v) = index.segment(s);
                dist_sq_point_segment(x, u, v)
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    };
    let near = |x: Point| index.nearest(x, f64::INFINITY).map_or(f64::INFINITY, |(d, _)| d);
    let mut best = floor;
    let mut cands: Vec<u32> = Vec::new();
    scratch.stack.clear();
    scratch.stack.push((0.0, 1.0, near(a), near(b)));
    while let Some((t0, t1, f0, f1)) = scratch.stack.pop() {
        let span = len * (t1 - t0);
        let ub = 0.5 * (f0 + f1 + span);
        if ub <= best {
            continue;
        }
        let (p0, p1) = (at(t0), at(t1));
        scratch.found.clear();
        index.query_rect(
            Point::new(p0.x.min(p1.x) - ub, p0.y.min(p1.y) - ub),
            Point::new(p0.x.max(p1.x) + ub, p0.y.max(p1.y) + ub),
            &mut scratch.found,
        );
        scratch.found.sort_unstable();
        scratch.found.dedup();
        cands.clear();
        cands.extend(scratch.found.iter().copied().filter(|&s| {
            let (u, v) = index.segment(s);
            dist_segment_segment(p0, p1, u, v) <= ub * (1.0 + 1e-12)
        }));
        if cands.len() <= EXACT_CANDIDATES || span <= 1e-9 * len {
            best = best.max(envelope_max(a, b, t0, t1, index, &cands, &min_over));
        } else {
            let tm = 0.5 * (t0 + t1);
            let fm = min_over(at(tm), &cands);
            best = best.max(fm);
            scratch.stack.push((t0, tm, f0, fm));
            scratch.stack.push((tm, t1, fm, f1));
        }
    }
    best
}

/// Squared distance from `s(t)` to one segment, as quadratic pieces `(lo, hi, [a, b, c])`
/// meaning `a t^2 + b t + c` on `[lo, hi]`.
fn pieces(a: Point, b: Point, t0: f64, t1: f64, c: Point, d: Point) -> Vec<(f64, f64, [f64; 3])> {
    let v = b - a;
    let point_quad = |p: Point| {
        let w = a - p;
        [v.dot(v), 2.0 * w.dot(v), w.dot(w)]
    };
    let e = d - c;
    let l2 = e.norm_sq();
    if l2 == 0.0 {
        return vec![(t0, t1, point_quad(c))];
    }
    let w = a - c;
    let u0 = w.dot(e) / l2;
    let u1 = v.dot(e) / l2;
    let c0 = w.x * e.y - w.y * e.x;
    let c1 = v.x * e.y - v.y * e.x;
    let line = [c1 * c1 / l2, 2.0 * c0 * c1 / l2, c0 * c0 / l2];
    let mut cuts = vec![t0, t1];
    if u1 != 0.0 {
        for t in [-u0 / u1, (1.0 - u0) / u1] {
            if t > t0 && t < t1 {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let u = u0 + u1 * 0.5 * (w[0] + w[1]);
            let quad = if u < 0.0 {
                point_quad(c)
            } else if u > 1.0 {
                point_quad(d)
            } else {
                line
            };
            (w[0], w[1], quad)
        })
        .collect()
}

fn quadratic_roots(a: f64, b: f64, c: f64, out: &mut Vec<f64>) {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return;
    }
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            out.push(-c / b);
        }
        return;
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-12 * b * b {
            disc = 0.0;
        } else {
            return;
        }
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q != 0.0 {
        out.push(q / a);
        out.push(c / q);
    } else {
        out.push(-b / (2.0 * a));
    }
}

fn envelope_max(
    a: Point,
    b: Point,
    t0: f64,
    t1: f64,
    index: &SegmentIndex,
    cands: &[u32],
    min_over: &impl Fn(Point, &[u32]) -> f64,
) -> f64 {
    let mut ts = vec![t0, t1];
    let all: Vec<_> = cands
        .iter()
        .map(|&s| {
            let (c, d) = index.segment(s);
            pieces(a, b, t0, t1, c, d)
        })
        .collect();
    let mut roots = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            for &(lo_i, hi_i, qi) in &all[i] {
                for &(lo_j, hi_j, qj) in &all[j] {
                    let lo = lo_i.max(lo_j);
                    let hi = hi_i.min(hi_j);
                    if lo > hi {
                        continue;
                    }
                    roots.clear();
                    quadratic_roots(qi[0] - qj[0], qi[1] - qj[1], qi[2] - qj[2], &mut roots);
                    ts.extend(roots.iter().copied().filter(|&t| t >= lo && t <= hi));
                }
            }
        }
    }
    ts.iter()
        .map(|&t| min_over(a.lerp(b, t), cands))
        .fold(0.0, f64::max)
}
