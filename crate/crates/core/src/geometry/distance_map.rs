use rayon::prelude::*;

use crate::brownian::Polyline;
use crate::error::{Error, Result};
use crate::point::Point;

use super::frame::RasterFrame;
use super::grid::TILE;
use super::index::SegmentIndex;
use super::dist_sq_point_segment;

/// Pixels beyond `r_max` that are still computed exactly.
pub const GUARD_PIXELS: f64 = 4.0;

const EMPTY: u32 = u32::MAX;
const TILE_PIXELS: usize = TILE * TILE;

/// Per-pixel Euclidean distance from pixel centers to a polyline.
///
/// Values are exact up to `bound = r_max + 4a`; pixels farther away read as
/// `f64::INFINITY`. Storage is split into `TILE x TILE` tiles and tiles with
/// no pixel inside the bound are not allocated.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    frame: RasterFrame,
    r_max: f64,
    bound: f64,
    tiles_x: usize,
    tiles_y: usize,
    slots: Vec<u32>,
    values: Vec<f64>,
}

impl DistanceMap {
    fn assemble(frame: RasterFrame, r_max: f64, bound: f64, tiles: Vec<(usize, Vec<f64>)>) -> Self {
        let tiles_x = frame.width.div_ceil(TILE);
        let tiles_y = frame.height.div_ceil(TILE);
        let mut slots = vec![EMPTY; tiles_x * tiles_y];
        let mut values = Vec::with_capacity(tiles.len() * TILE_PIXELS);
        for (t, vals) in tiles {
            slots[t] = (values.len() / TILE_PIXELS) as u32;
            values.extend_from_slice(&vals);
        }
        DistanceMap {
            frame,
            r_max,
            bound,
            tiles_x,
            tiles_y,
            slots,
            values,
        }
    }

    pub fn frame(&self) -> &RasterFrame {
        &self.frame
    }

    /// Largest radius this map may be thresholded at.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Distances up to this value are exact.
    pub fn exact_bound(&self) -> f64 {
        self.bound
    }

    pub fn tiles_x(&self) -> usize {
        self.tiles_x
    }

    pub fn tiles_y(&self) -> usize {
        self.tiles_y
    }

    pub fn stored_tiles(&self) -> usize {
        self.values.len() / TILE_PIXELS
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let t = (j / TILE) * self.tiles_x + i / TILE;
        match self.slots[t] {
            EMPTY => f64::INFINITY,
            s => self.values[s as usize * TILE_PIXELS + (j % TILE) * TILE + i % TILE],
        }
    }

    /// Stored tiles as `(tile index, values)`; padding pixels outside the
    /// frame hold `INFINITY`.
    pub(crate) fn tiles(&self) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != EMPTY)
            .map(|(t, &s)| {
                let lo = s as usize * TILE_PIXELS;
                (t, &self.values[lo..lo + TILE_PIXELS])
            })
    }

    /// Number of pixels with `lo < D <= hi`.
    pub fn count_between(&self, lo: f64, hi: f64) -> u64 {
        self.values.iter().filter(|&&d| d > lo && d <= hi).count() as u64
    }

    /// Number of pixels with `D <= r`.
    pub fn count_within(&self, r: f64) -> u64 {
        self.values.iter().filter(|&&d| d <= r).count() as u64
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }
}

fn tile_origin(t: usize, tiles_x: usize) -> (usize, usize) {
    ((t % tiles_x) * TILE, (t / tiles_x) * TILE)
}

fn validate(path: &Polyline, frame: &RasterFrame, r_max: f64) -> Result<f64> {
    if !(r_max >= 0.0) || !r_max.is_finite() {
        return Err(Error::domain(format!("r_max must be finite and nonnegative, got {r_max}")));
    }
    frame.check_margin(path, r_max)?;
    Ok(r_max + GUARD_PIXELS * frame.pixel_size)
}

/// Values of one tile handed to a [`visit_tiles`] callback.
pub(crate) enum TileValues<'a> {
    /// Row-major `TILE x TILE` distances, `INFINITY` beyond the bound or
    /// outside the frame.
    Exact(&'a [f64]),
    /// Every pixel of the tile is closer than the requested cutoff.
    Inside,
}

/// Computes the exact distances of every tile of `frame` and hands them to
/// `visit`. Tiles with no pixel within the bound are skipped, and tiles lying
/// entirely closer than `inside_cutoff` are reported as [`TileValues::Inside`]
/// without per-pixel work. Results come back in tile order.
///
/// Each tile first collects, through a [`SegmentIndex`], the segments close
/// enough to its center to be nearest for some pixel of the tile: if `c` is the
/// tile center, `h` its half diagonal and `d` the distance from `c` to the
/// path, only segments within `d + 2h` of `c` qualify. Pixels scan that list
/// in order of distance from `c` and stop once `dist(c, s) - |p - c|` exceeds
/// the best distance found.
pub(crate) fn visit_tiles<T, F>(
    path: &Polyline,
    frame: &RasterFrame,
    r_max: f64,
    inside_cutoff: f64,
    visit: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, TileValues) -> T + Sync,
{
    let bound = validate(path, frame, r_max)?;
    let a = frame.pixel_size;
    let half_diag = 0.5 * (TILE - 1) as f64 * a * std::f64::consts::SQRT_2;
    let reach = bound + half_diag;
    let index = SegmentIndex::new(path, reach.max(4.0 * TILE as f64 * a));
    let tiles_x = frame.width.div_ceil(TILE);
    let tiles_y = frame.height.div_ceil(TILE);
    // rounding slack for the culling tests below
    let slack = 1e-9 * a;

    let rows: Vec<Vec<T>> = (0..tiles_y)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), vec![f64::INFINITY; TILE_PIXELS]),
            |(found, near, vals): &mut (Vec<u32>, Vec<(f64, Point, Point)>, Vec<f64>), ty| {
                let mut row = Vec::new();
                for tx in 0..tiles_x {
                    let t = ty * tiles_x + tx;
                    let (x0, y0) = tile_origin(t, tiles_x);
                    let c = frame.center(x0, y0)
                        + Point::new(0.5 * (TILE - 1) as f64 * a, 0.5 * (TILE - 1) as f64 * a);
                    found.clear();
                    index.query_rect(
                        Point::new(c.x - reach - slack, c.y - reach - slack),
                        Point::new(c.x + reach + slack, c.y + reach + slack),
                        found,
                    );
                    if found.is_empty() {
                        continue;
                    }
                    found.sort_unstable();
                    found.dedup();
                    near.clear();
                    let mut nearest = f64::INFINITY;
                    for &s in found.iter() {
                        let (p, q) = index.segment(s);
                        let d = dist_sq_point_segment(c, p, q).sqrt();
                        nearest = nearest.min(d);
                        near.push((d, p, q));
                    }
                    // every pixel center lies within half_diag of c
                    if nearest - half_diag > bound + slack {
                        continue;
                    }
                    if nearest + half_diag + slack < inside_cutoff {
                        row.push(visit(t, TileValues::Inside));
                        continue;
                    }
                    let keep = (nearest + 2.0 * half_diag).min(reach) + slack;
                    near.retain(|e| e.0 <= keep);
                    if near.is_empty() {
                        continue;
                    }
                    near.sort_by(|x, y| x.0.total_cmp(&y.0));
                    vals.iter_mut().for_each(|v| *v = f64::INFINITY);
                    let mut any = false;
                    let w = (frame.width - x0).min(TILE);
                    let h = (frame.height - y0).min(TILE);
                    for ly in 0..h {
                        for lx in 0..w {
                            let p = frame.center(x0 + lx, y0 + ly);
                            let rp = p.dist(c) + slack;
                            let mut d2 = f64::INFINITY;
                            for chunk in near.chunks(8) {
                                let lb = chunk[0].0 - rp;
                                if lb > 0.0 && lb * lb > d2 {
                                    break;
                                }
                                d2 = chunk
                                    .iter()
                                    .map(|&(_, u, v)| dist_sq_point_segment(p, u, v))
                                    .fold(d2, f64::min);
                            }
                            let d = d2.sqrt();
                            if d <= bound {
                                vals[ly * TILE + lx] = d;
                                any = true;
                            }
                        }
                    }
                    if any {
                        row.push(visit(t, TileValues::Exact(vals)));
                    }
                }
                row
            },
        )
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Builds the exact distance map of `path` on `frame`, valid for radii up to `r_max`.
pub fn build_distance_map(path: &Polyline, frame: &RasterFrame, r_max: f64) -> Result<DistanceMap> {
    let bound = r_max + GUARD_PIXELS * frame.pixel_size;
    let tiles = visit_tiles(path, frame, r_max, f64::NEG_INFINITY, |t, vals| match vals {
        TileValues::Exact(v) => (t, v.to_vec()),
        TileValues::Inside => unreachable!("no inside cutoff requested"),
    })?;
    Ok(DistanceMap::assemble(*frame, r_max, bound, tiles))
}

/// Reference construction scanning every segment for every pixel.
pub fn build_distance_map_brute_force(
    path: &Polyline,
    frame: &RasterFrame,
    r_max: f64,
) -> Result<DistanceMap> {
    let bound = validate(path, frame, r_max)?;
    let tiles_x = frame.width.div_ceil(TILE);
    let tiles_y = frame.height.div_ceil(TILE);
    let segs: Vec<(Point, Point)> = path.segments().collect();
    let mut tiles = Vec::new();
    for t in 0..tiles_x * tiles_y {
        let (x0, y0) = tile_origin(t, tiles_x);
        let mut vals = vec![f64::INFINITY; TILE_PIXELS];
        let mut any = false;
        for ly in 0..TILE.min(frame.height - y0) {
            for lx in 0..TILE.min(frame.width - x0) {
                let p = frame.center(x0 + lx, y0 + ly);
                let d = segs
                    .iter()
                    .map(|&(u, v)| dist_sq_point_segment(p, u, v))
                    .fold(f64::INFINITY, f64::min)
                    .sqrt();
                if d <= bound {
                    vals[ly * TILE + lx] = d;
                    any = true;
                }
            }
        }
        if any {
            tiles.push((t, vals));
        }
    }
    Ok(DistanceMap::assemble(*frame, r_max, bound, tiles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::{sample_increment_path, ScriptedDeviates};
    use crate::geometry::dist_point_polyline;

    fn assert_maps_equal(a: &DistanceMap, b: &DistanceMap) {
        let f = a.frame();
        for j in 0..f.height {
            for i in 0..f.width {
                assert_eq!(a.get(i, j).to_bits(), b.get(i, j).to_bits(), "pixel ({i}, {j})");
            }
        }
    }

    #[test]
    fn single_point_is_radial() {
        let c = Point::new(0.3, -0.2);
        let path = Polyline::single_point(c);
        let frame = RasterFrame::auto(&path, 1.0, 1.0 / 32.0).unwrap();
        let m = build_distance_map(&path, &frame, 1.0).unwrap();
        for j in 0..frame.height {
            for i in 0..frame.width {
                let want = frame.center(i, j).dist(c);
                let got = m.get(i, j);
                if want <= 1.0 {
                    assert!((got - want).abs() < 1e-12);
                } else if want > m.exact_bound() {
                    assert!(got.is_infinite());
                }
            }
        }
    }

    #[test]
    fn vertex_on_pixel_center_is_zero() {
        let frame = RasterFrame::new(Point::new(-2.0, -2.0), 0.25, 17, 17).unwrap();
        let path = Polyline::from_vertices(vec![Point::ORIGIN, Point::new(0.3, 0.1)]).unwrap();
        let m = build_distance_map(&path, &frame, 0.5).unwrap();
        assert_eq!(m.get(8, 8), 0.0);
        assert_eq!(m.min_value(), 0.0);
    }

    #[test]
    fn two_segments_take_the_minimum() {
        let path = Polyline::from_vertices(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.3),
            Point::new(0.2, 0.9),
        ])
        .unwrap();
        let frame = RasterFrame::auto(&path, 0.4, 0.02).unwrap();
        let m = build_distance_map(&path, &frame, 0.4).unwrap();
        let first = Polyline::from_vertices(path.vertices()[..2].to_vec()).unwrap();
        let second = Polyline::from_vertices(path.vertices()[1..].to_vec()).unwrap();
        for j in 0..frame.height {
            for i in 0..frame.width {
                let p = frame.center(i, j);
                let want = dist_point_polyline(p, &first).min(dist_point_polyline(p, &second));
                if want <= m.exact_bound() {
                    assert_eq!(m.get(i, j), want);
                }
            }
        }
        let brute = build_distance_map_brute_force(&path, &frame, 0.4).unwrap();
        assert_maps_equal(&m, &brute);
    }

    #[test]
    fn brownian_path_matches_brute_force() {
        let vals: Vec<f64> = (0..512).map(|i| ((i * 7919 % 101) as f64 / 50.0) - 1.0).collect();
        let path = sample_increment_path(256, 0.05, &mut ScriptedDeviates::new(vals)).unwrap();
        for r in [0.002, 0.01, 0.03] {
            let frame = RasterFrame::auto(&path, r, r / 8.0).unwrap();
            if frame.width > 128 || frame.height > 128 {
                continue;
            }
            let fast = build_distance_map(&path, &frame, r).unwrap();
            let brute = build_distance_map_brute_force(&path, &frame, r).unwrap();
            assert_maps_equal(&fast, &brute);
        }
    }

    #[test]
    fn frame_too_small() {
        let path = Polyline::single_point(Point::ORIGIN);
        let frame = RasterFrame::new(Point::new(-1.0, -1.0), 0.1, 21, 21).unwrap();
        assert!(matches!(
            build_distance_map(&path, &frame, 0.95),
            Err(Error::FrameTooSmall(_))
        ));
        assert!(build_distance_map(&path, &frame, 0.5).is_ok());
    }
}
