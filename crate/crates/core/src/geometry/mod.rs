//! Dilated polylines, their raster representation and intrinsic volumes.
//!
//! The parallel set `A_r = A ⊕ B_r(o)` of a polyline `A` is never built
//! explicitly. Instead a [`DistanceMap`] stores the exact Euclidean distance
//! from every pixel center to the polyline, and every radius of interest is a
//! sublevel set of that map.

mod distance_map;
mod frame;
mod grid;
mod hausdorff;
mod index;
mod topology;
mod volumes;

pub use distance_map::{build_distance_map, build_distance_map_brute_force, DistanceMap};
pub use frame::RasterFrame;
pub use grid::{threshold, BinaryGrid, TILE};
pub use hausdorff::{directed_hausdorff, hausdorff_polyline, hausdorff_with_mode, HausdorffMode};
pub use index::SegmentIndex;
pub use topology::{euler_by_complex, label_components, Components};
pub use volumes::{intrinsic_volumes, measure, measure_path, IntrinsicVolumes, Measurement};

use crate::brownian::Polyline;
use crate::point::Point;

/// Squared distance from `p` to the closed segment `[a, b]`.
#[inline]
pub fn dist_sq_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let ap = p - a;
    let len_sq = ab.norm_sq();
    let t = if len_sq > 0.0 {
        (ap.dot(ab) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = ap.x - ab.x * t;
    let dy = ap.y - ab.y * t;
    dx * dx + dy * dy
}

pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    dist_sq_point_segment(p, a, b).sqrt()
}

/// Distance from `x` to the polyline, minimized over all of its segments.
pub fn dist_point_polyline(x: Point, p: &Polyline) -> f64 {
    p.segments()
        .map(|(a, b)| dist_sq_point_segment(x, a, b))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Whether closed segments `[a, b]` and `[c, d]` share a point.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// Distance between two closed segments.
pub(crate) fn dist_segment_segment(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    dist_sq_point_segment(a, c, d)
        .min(dist_sq_point_segment(b, c, d))
        .min(dist_sq_point_segment(c, a, b))
        .min(dist_sq_point_segment(d, a, b))
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg() -> Polyline {
        Polyline::from_vertices(vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn point_polyline_examples() {
        let p = seg();
        assert_eq!(dist_point_polyline(Point::new(0.3, 0.0), &p), 0.0);
        assert_eq!(dist_point_polyline(Point::new(0.0, 3.0), &p), 3.0);
        assert_eq!(dist_point_polyline(Point::new(2.0, 1.0), &p), 2f64.sqrt());
        let single = Polyline::single_point(Point::new(1.0, 1.0));
        assert_eq!(dist_point_polyline(Point::new(4.0, 5.0), &single), 5.0);
    }

    #[test]
    fn segment_distance() {
        let o = Point::ORIGIN;
        let e = Point::new(1.0, 0.0);
        assert_eq!(dist_segment_segment(o, e, Point::new(0.5, -1.0), Point::new(0.5, 1.0)), 0.0);
        assert_eq!(dist_segment_segment(o, e, Point::new(0.0, 2.0), Point::new(1.0, 2.0)), 2.0);
        assert_eq!(dist_segment_segment(o, e, Point::new(2.0, 0.0), Point::new(3.0, 0.0)), 1.0);
        assert_eq!(dist_segment_segment(o, e, Point::new(1.0, 0.0), Point::new(3.0, 0.0)), 0.0);
    }
}
