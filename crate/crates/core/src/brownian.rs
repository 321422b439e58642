//! Piecewise-linear approximations of a planar Brownian path.
//!
//! Two constructions are provided:
//!
//! * [`sample_increment_path`]: the path is sampled on a regular time lattice
//!   `t_i = i T / k` from independent Gaussian increments and the samples are
//!   joined by straight segments.
//! * [`haar_schauder_path`]: each coordinate is the partial sum
//!   `sum_{k=1}^{2^n} Y_k S_k(t)` of the Haar–Schauder series on `[0, 1]`,
//!   which is piecewise linear with nodes at the dyadic times `j / 2^n`.
//!
//! Both consume standard-normal deviates from a [`DeviateSource`], drawing the
//! x-deviate before the y-deviate at every index.

use crate::error::{Error, Result};
use crate::point::{BoundingBox, Point};

/// A stream of independent standard-normal deviates.
pub trait DeviateSource {
    fn next_normal(&mut self) -> f64;
}

impl<S: DeviateSource + ?Sized> DeviateSource for &mut S {
    fn next_normal(&mut self) -> f64 {
        (**self).next_normal()
    }
}

/// Replays a fixed list of deviates, then yields zeros forever.
///
/// Used to drive the generators with hand-picked values in tests and examples.
#[derive(Debug, Clone, Default)]
pub struct ScriptedDeviates {
    values: Vec<f64>,
    pos: usize,
}

impl ScriptedDeviates {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        ScriptedDeviates {
            values: values.into(),
            pos: 0,
        }
    }

    /// A source that only ever yields zero.
    pub fn zeros() -> Self {
        ScriptedDeviates::default()
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl DeviateSource for ScriptedDeviates {
    fn next_normal(&mut self) -> f64 {
        let v = self.values.get(self.pos).copied().unwrap_or(0.0);
        self.pos += 1;
        v
    }
}

/// A time-indexed polygonal curve.
///
/// Times are strictly increasing, start at zero and end at the horizon.
/// Paths produced by the Brownian generators additionally start at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
    times: Vec<f64>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, times: Vec<f64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::domain("polyline needs at least one vertex"));
        }
        if vertices.len() != times.len() {
            return Err(Error::domain(format!(
                "{} vertices but {} time stamps",
                vertices.len(),
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::domain("first time stamp must be 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("time stamps must be strictly increasing"));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite("polyline vertices".into()));
        }
        Ok(Polyline { vertices, times })
    }

    /// Vertices stamped with times `0, 1, ..., n - 1`.
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        let times = (0..vertices.len()).map(|i| i as f64).collect();
        Polyline::new(vertices, times)
    }

    pub fn single_point(p: Point) -> Self {
        Polyline {
            vertices: vec![p],
            times: vec![0.0],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Consecutive vertex pairs. A single-vertex path yields one degenerate segment.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let single = (self.vertices.len() == 1).then(|| (self.vertices[0], self.vertices[0]));
        self.vertices
            .windows(2)
            .map(|w| (w[0], w[1]))
            .chain(single)
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::of_points(&self.vertices).expect("nonempty")
    }

    /// Largest distance between two vertices, which equals the diameter of the curve.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max((v[i] - v[j]).norm_sq());
            }
        }
        best.sqrt()
    }

    /// Position at time `t` by linear interpolation between the bracketing vertices.
    pub fn position_at(&self, t: f64) -> Point {
        let times = &self.times;
        if t <= times[0] {
            return self.vertices[0];
        }
        if t >= self.horizon() {
            return *self.vertices.last().expect("nonempty");
        }
        let hi = times.partition_point(|&s| s <= t);
        let lo = hi - 1;
        let alpha = (t - times[lo]) / (times[hi] - times[lo]);
        self.vertices[lo].lerp(self.vertices[hi], alpha)
    }

    /// Brownian rescaling `t -> T t`, `x -> sqrt(T) x`.
    pub fn rescaled(&self, horizon_factor: f64) -> Result<Self> {
        if !(horizon_factor > 0.0) || !horizon_factor.is_finite() {
            return Err(Error::domain("rescaling factor must be positive"));
        }
        let s = horizon_factor.sqrt();
        Polyline::new(
            self.vertices.iter().map(|&p| p * s).collect(),
            self.times.iter().map(|&t| t * horizon_factor).collect(),
        )
    }

    /// Uniform spatial translation; times are unchanged.
    pub fn translated(&self, by: Point) -> Self {
        Polyline {
            vertices: self.vertices.iter().map(|&p| p + by).collect(),
            times: self.times.clone(),
        }
    }
}

/// Samples a path on the lattice `t_i = i T / k` from Gaussian increments.
pub fn sample_increment_path<S: DeviateSource + ?Sized>(
    steps: usize,
    horizon: f64,
    src: &mut S,
) -> Result<Polyline> {
    if steps == 0 {
        return Err(Error::domain("step count must be at least 1"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    let scale = (horizon / steps as f64).sqrt();
    let mut vertices = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut cur = Point::ORIGIN;
    vertices.push(cur);
    times.push(0.0);
    for i in 1..=steps {
        let dx = src.next_normal();
        let dy = src.next_normal();
        cur = cur + Point::new(dx, dy) * scale;
        vertices.push(cur);
        times.push(if i == steps {
            horizon
        } else {
            i as f64 * horizon / steps as f64
        });
    }
    Polyline::new(vertices, times)
}

/// Level and offset `(m, j)` with `k = 2^m + j`, `1 <= j <= 2^m`, for `k >= 2`.
fn haar_level(k: u64) -> (u32, u64) {
    let m = 63 - (k - 1).leading_zeros();
    (m, k - (1u64 << m))
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} outside [0, 1]")))
    }
}

/// Haar function `H_k(s)` on `[0, 1]`; `H_k(1) = 0` for `k >= 2`.
pub fn haar(k: u64, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("Haar index starts at 1"));
    }
    check_unit("s", s)?;
    if k == 1 {
        return Ok(1.0);
    }
    let (m, j) = haar_level(k);
    let scale = 2f64.powi(m as i32);
    let left = (j - 1) as f64 / scale;
    let mid = (2 * j - 1) as f64 / (2.0 * scale);
    let right = j as f64 / scale;
    let h = scale.sqrt();
    Ok(if s >= left && s < mid {
        h
    } else if s >= mid && s < right {
        -h
    } else {
        0.0
    })
}

/// Schauder function `S_k(t)`, the integral of `H_k` over `[0, t]`.
pub fn schauder(k: u64, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("Schauder index starts at 1"));
    }
    check_unit("t", t)?;
    Ok(schauder_unchecked(k, t))
}

fn schauder_unchecked(k: u64, t: f64) -> f64 {
    if k == 1 {
        return t;
    }
    let (m, j) = haar_level(k);
    let scale = 2f64.powi(m as i32);
    let left = (j - 1) as f64 / scale;
    let mid = (2 * j - 1) as f64 / (2.0 * scale);
    let right = j as f64 / scale;
    let h = scale.sqrt();
    if t <= left || t >= right {
        0.0
    } else if t <= mid {
        h * (t - left)
    } else {
        h * (right - t)
    }
}

/// Maximum supported Haar–Schauder level.
pub const MAX_HAAR_LEVEL: u32 = 30;

/// Level-`n` Haar–Schauder partial sum of a planar Brownian path on `[0, 1]`.
///
/// Consumes `2 * 2^n` deviates: for `k = 1, ..., 2^n` the x-coefficient then the
/// y-coefficient. Returns the `2^n + 1` nodes at times `j / 2^n`.
pub fn haar_schauder_path<S: DeviateSource + ?Sized>(level: u32, src: &mut S) -> Result<Polyline> {
    if level > MAX_HAAR_LEVEL {
        return Err(Error::domain(format!("Haar–Schauder level {level} too large")));
    }
    let terms = 1u64 << level;
    let coeffs: Vec<Point> = (0..terms)
        .map(|_| {
            let x = src.next_normal();
            let y = src.next_normal();
            Point::new(x, y)
        })
        .collect();
    let nodes = terms as usize + 1;
    let mut vertices = Vec::with_capacity(nodes);
    let mut times = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let t = j as f64 / terms as f64;
        times.push(t);
        vertices.push(schauder_sum(&coeffs, t));
    }
    Polyline::new(vertices, times)
}

/// Evaluates `sum_k Y_k S_k(t)` using only the one tent per level whose support contains `t`.
pub(crate) fn schauder_sum(coeffs: &[Point], t: f64) -> Point {
    let mut acc = coeffs.first().map_or(Point::ORIGIN, |&c| c * t);
    let terms = coeffs.len() as u64;
    let mut m = 0u32;
    while (1u64 << m) < terms {
        let width = 1u64 << m;
        // tents of level m occupy indices width + 1 ..= 2 * width
        let j = ((t * width as f64).floor() as u64 + 1).min(width);
        let k = width + j;
        if k <= terms {
            let s = schauder_unchecked(k, t);
            if s != 0.0 {
                acc = acc + coeffs[(k - 1) as usize] * s;
            }
        }
        m += 1;
    }
    acc
}

/// Keeps every `stride`-th vertex, including both endpoints.
pub fn subsample_path(p: &Polyline, stride: usize) -> Result<Polyline> {
    let segs = p.len() - 1;
    if stride == 0 || segs % stride != 0 {
        return Err(Error::domain(format!(
            "stride {stride} does not divide segment count {segs}"
        )));
    }
    let vertices = p.vertices.iter().step_by(stride).copied().collect();
    let times = p.times.iter().step_by(stride).copied().collect();
    Polyline::new(vertices, times)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(p: &Polyline) -> Vec<(f64, f64)> {
        p.vertices().iter().map(|v| (v.x, v.y)).collect()
    }

    #[test]
    fn increment_path_examples() {
        let p = sample_increment_path(1, 4.0, &mut ScriptedDeviates::new([1.0, 0.0])).unwrap();
        assert_eq!(pts(&p), vec![(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(p.times(), &[0.0, 4.0]);

        let p = sample_increment_path(2, 2.0, &mut ScriptedDeviates::new([1.0, 0.0, 0.0, 1.0]))
            .unwrap();
        assert_eq!(pts(&p), vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        assert_eq!(p.times(), &[0.0, 1.0, 2.0]);

        let p = sample_increment_path(3, 1.0, &mut ScriptedDeviates::zeros()).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.vertices().iter().all(|v| *v == Point::ORIGIN));
    }

    #[test]
    fn increment_path_rejects_bad_arguments() {
        let mut src = ScriptedDeviates::zeros();
        assert!(matches!(sample_increment_path(0, 1.0, &mut src), Err(Error::Domain(_))));
        assert!(matches!(sample_increment_path(4, 0.0, &mut src), Err(Error::Domain(_))));
        assert!(matches!(sample_increment_path(4, -1.0, &mut src), Err(Error::Domain(_))));
    }

    #[test]
    fn haar_examples() {
        assert_eq!(haar(1, 0.7).unwrap(), 1.0);
        assert_eq!(haar(2, 0.25).unwrap(), 1.0);
        assert_eq!(haar(2, 0.75).unwrap(), -1.0);
        assert_eq!(haar(3, 0.1).unwrap(), 2f64.sqrt());
        assert_eq!(haar(3, 0.3).unwrap(), -(2f64.sqrt()));
        assert_eq!(haar(3, 0.6).unwrap(), 0.0);
        assert_eq!(haar(4, 0.6).unwrap(), 2f64.sqrt());
        for k in 2..40 {
            assert_eq!(haar(k, 1.0).unwrap(), 0.0);
        }
        assert!(haar(2, 1.5).is_err());
        assert!(haar(2, -0.1).is_err());
        assert!(haar(0, 0.5).is_err());
    }

    #[test]
    fn schauder_examples() {
        assert_eq!(schauder(1, 0.3).unwrap(), 0.3);
        assert_eq!(schauder(2, 0.5).unwrap(), 0.5);
        assert_eq!(schauder(2, 1.0).unwrap(), 0.0);
        assert!((schauder(3, 0.25).unwrap() - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(schauder(3, 1.01).is_err());
    }

    #[test]
    fn schauder_is_integral_of_haar() {
        // midpoint rule is exact on each dyadic cell for these step functions
        let cells = 1 << 10;
        for k in 1..64u64 {
            let mut acc = 0.0;
            for c in 0..cells {
                let s = (c as f64 + 0.5) / cells as f64;
                acc += haar(k, s).unwrap() / cells as f64;
                let t = (c + 1) as f64 / cells as f64;
                assert!((schauder(k, t).unwrap() - acc).abs() < 1e-12, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn haar_schauder_examples() {
        let p = haar_schauder_path(0, &mut ScriptedDeviates::new([1.0, 0.0])).unwrap();
        assert_eq!(pts(&p), vec![(0.0, 0.0), (1.0, 0.0)]);

        let p = haar_schauder_path(1, &mut ScriptedDeviates::new([0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(pts(&p), vec![(0.0, 0.0), (0.5, 0.5), (0.0, 0.0)]);
        assert_eq!(p.times(), &[0.0, 0.5, 1.0]);

        let mut src = ScriptedDeviates::zeros();
        let p = haar_schauder_path(2, &mut src).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.vertices().iter().all(|v| *v == Point::ORIGIN));
        assert_eq!(src.consumed(), 8);
    }

    #[test]
    fn haar_schauder_matches_direct_series() {
        let values: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let p = haar_schauder_path(5, &mut ScriptedDeviates::new(values.clone())).unwrap();
        for (j, v) in p.vertices().iter().enumerate() {
            let t = p.times()[j];
            let mut direct = Point::ORIGIN;
            for k in 1..=32u64 {
                let s = schauder(k, t).unwrap();
                let i = (k - 1) as usize;
                direct = direct + Point::new(values[2 * i], values[2 * i + 1]) * s;
            }
            assert!((direct - *v).norm() < 1e-12);
        }
    }

    #[test]
    fn haar_schauder_nesting() {
        // with the deviates beyond index 2^m zeroed, the level-n nodes at
        // times j / 2^m coincide with the level-m path
        let coarse_vals: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let coarse = haar_schauder_path(3, &mut ScriptedDeviates::new(coarse_vals.clone())).unwrap();
        let fine = haar_schauder_path(6, &mut ScriptedDeviates::new(coarse_vals)).unwrap();
        let sub = subsample_path(&fine, 8).unwrap();
        assert_eq!(sub.times(), coarse.times());
        for (a, b) in sub.vertices().iter().zip(coarse.vertices()) {
            assert!((*a - *b).norm() < 1e-14);
        }
    }

    #[test]
    fn interpolation_identity() {
        // the level-n partial sum is linear between consecutive dyadic nodes
        let level = 4;
        let terms = 1usize << level;
        let vals: Vec<f64> = (0..2 * terms).map(|i| ((i * 7 + 3) as f64).cos()).collect();
        let p = haar_schauder_path(level, &mut ScriptedDeviates::new(vals.clone())).unwrap();
        let coeffs: Vec<Point> = vals.chunks(2).map(|c| Point::new(c[0], c[1])).collect();
        for i in 0..200 {
            let t = (i as f64 + 0.37) / 200.0;
            let k = (t * terms as f64).floor() as usize + 1;
            let alpha = terms as f64 * t - k as f64 + 1.0;
            let interp = p.vertices()[k - 1] * (1.0 - alpha) + p.vertices()[k] * alpha;
            let direct = schauder_sum(&coeffs, t);
            assert!((interp - direct).norm() < 1e-12, "t={t}");
            assert!((p.position_at(t) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn subsample_examples() {
        let p = sample_increment_path(4, 1.0, &mut ScriptedDeviates::new([1.0; 8])).unwrap();
        let s = subsample_path(&p, 2).unwrap();
        assert_eq!(s.vertices(), &[p.vertices()[0], p.vertices()[2], p.vertices()[4]]);
        assert_eq!(s.times(), &[0.0, 0.5, 1.0]);
        assert_eq!(subsample_path(&p, 1).unwrap(), p);

        let q = sample_increment_path(2, 1.0, &mut ScriptedDeviates::new([1.0; 4])).unwrap();
        let s = subsample_path(&q, 2).unwrap();
        assert_eq!(s.vertices(), &[q.vertices()[0], q.vertices()[2]]);
        assert!(subsample_path(&p, 3).is_err());
        assert!(subsample_path(&p, 0).is_err());
    }

    #[test]
    fn polyline_validation() {
        assert!(Polyline::new(vec![], vec![]).is_err());
        assert!(Polyline::new(vec![Point::ORIGIN; 2], vec![0.0, 0.0]).is_err());
        assert!(Polyline::new(vec![Point::ORIGIN; 2], vec![0.5, 1.0]).is_err());
        assert!(Polyline::new(vec![Point::ORIGIN; 2], vec![0.0]).is_err());
        let p = Polyline::from_vertices(vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)]).unwrap();
        assert_eq!(p.diameter(), 5.0);
        assert_eq!(p.position_at(0.5), Point::new(1.5, 2.0));
    }

    #[test]
    fn rescaling_is_brownian() {
        let p = haar_schauder_path(2, &mut ScriptedDeviates::new([1.0, 2.0, 0.5, -1.0])).unwrap();
        let q = p.rescaled(4.0).unwrap();
        assert_eq!(q.horizon(), 4.0);
        assert_eq!(q.vertices()[2], p.vertices()[2] * 2.0);
    }
}
