use crate::brownian::Polyline;
use crate::point::{BoundingBox, Point};

use super::dist_sq_point_segment;

/// Uniform bucketing of polyline segments.
///
/// Every segment is listed in every cell its bounding box overlaps, so a
/// rectangle query returns a superset of the segments meeting that rectangle.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    segments: Vec<(Point, Point)>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: items[starts[c]..starts[c + 1]] are the segments of cell c
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SegmentIndex {
    pub fn new(path: &Polyline, cell_size: f64) -> Self {
        Self::from_segments(path.segments().collect(), cell_size)
    }

    pub fn from_segments(segments: Vec<(Point, Point)>, cell_size: f64) -> Self {
        let bb = BoundingBox::of_points(segments.iter().flat_map(|(a, b)| [a, b]))
            .unwrap_or(BoundingBox {
                min: Point::ORIGIN,
                max: Point::ORIGIN,
            });
        // cap the grid so degenerate cell sizes cannot explode memory
        let extent = bb.width().max(bb.height());
        let cell = cell_size.max(extent / 4096.0).max(f64::MIN_POSITIVE);
        let nx = (bb.width() / cell).floor() as usize + 1;
        let ny = (bb.height() / cell).floor() as usize + 1;
        let mut index = SegmentIndex {
            segments,
            origin: bb.min,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            items: Vec::new(),
        };
        for (a, b) in index.segments.iter() {
            let (x0, x1, y0, y1) = index.cell_range(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y));
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    index.starts[cy * nx + cx + 1] += 1;
                }
            }
        }
        for c in 0..nx * ny {
            index.starts[c + 1] += index.starts[c];
        }
        let mut fill = index.starts.clone();
        index.items = vec![0; *index.starts.last().unwrap() as usize];
        for (s, (a, b)) in index.segments.iter().enumerate() {
            let (x0, x1, y0, y1) = index.cell_range(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y));
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    let c = cy * nx + cx;
                    index.items[fill[c] as usize] = s as u32;
                    fill[c] += 1;
                }
            }
        }
        index
    }

    pub fn segments(&self) -> &[(Point, Point)] {
        &self.segments
    }

    pub fn segment(&self, id: u32) -> (Point, Point) {
        self.segments[id as usize]
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn clamp_cell(&self, v: f64, n: usize) -> usize {
        if v <= 0.0 {
            0
        } else {
            ((v / self.cell) as usize).min(n - 1)
        }
    }

    fn cell_range(&self, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> (usize, usize, usize, usize) {
        (
            self.clamp_cell(xmin - self.origin.x, self.nx),
            self.clamp_cell(xmax - self.origin.x, self.nx),
            self.clamp_cell(ymin - self.origin.y, self.ny),
            self.clamp_cell(ymax - self.origin.y, self.ny),
        )
    }

    /// Appends the ids of all segments listed in cells meeting the rectangle.
    /// Ids may repeat.
    pub fn query_rect(&self, min: Point, max: Point, out: &mut Vec<u32>) {
        let (x0, x1, y0, y1) = self.cell_range(min.x, max.x, min.y, max.y);
        for cy in y0..=y1 {
            let row = cy * self.nx;
            let lo = self.starts[row + x0] as usize;
            let hi = self.starts[row + x1 + 1] as usize;
            out.extend_from_slice(&self.items[lo..hi]);
        }
    }

    /// Nearest segment to `p` within `max_dist`, by expanding rings of cells.
    ///
    /// The search stops as soon as the next ring cannot hold anything closer
    /// than the best distance found.
    pub fn nearest(&self, p: Point, max_dist: f64) -> Option<(f64, u32)> {
        let fx = (p.x - self.origin.x) / self.cell;
        let fy = (p.y - self.origin.y) / self.cell;
        let cx = fx.floor().clamp(0.0, (self.nx - 1) as f64) as i64;
        let cy = fy.floor().clamp(0.0, (self.ny - 1) as f64) as i64;
        // distance from p to the home cell's complement is at least this
        let outside = {
            let ox = (self.origin.x + cx as f64 * self.cell - p.x).max(p.x - self.origin.x - (cx + 1) as f64 * self.cell);
            let oy = (self.origin.y + cy as f64 * self.cell - p.y).max(p.y - self.origin.y - (cy + 1) as f64 * self.cell);
            ox.max(oy).max(0.0)
        };
        let mut best_sq = max_dist * max_dist;
        let mut best: Option<u32> = None;
        let max_ring = self.nx.max(self.ny) as i64;
        for ring in 0..=max_ring {
            if ring > 0 {
                // cells of this ring lie at least (ring - 1) cells away from the home cell
                let lower = outside.max((ring - 1) as f64 * self.cell);
                if lower * lower > best_sq {
                    break;
                }
            }
            for dy in -ring..=ring {
                let y = cy + dy;
                if y < 0 || y >= self.ny as i64 {
                    continue;
                }
                let edge_row = dy.abs() == ring;
                let mut dx = -ring;
                while dx <= ring {
                    let x = cx + dx;
                    if x >= 0 && x < self.nx as i64 {
                        let c = y as usize * self.nx + x as usize;
                        for &s in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
                            let (a, b) = self.segments[s as usize];
                            let d = dist_sq_point_segment(p, a, b);
                            if d < best_sq || (d == best_sq && best.is_none()) {
                                best_sq = d;
                                best = Some(s);
                            }
                        }
                    }
                    dx += if edge_row { 1 } else { 2 * ring.max(1) };
                }
            }
        }
        best.map(|s| (best_sq.sqrt(), s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::{sample_increment_path, ScriptedDeviates};
    use crate::geometry::dist_point_polyline;

    #[test]
    fn nearest_matches_brute_force() {
        let vals: Vec<f64> = (0..400).map(|i| ((i * 97 % 61) as f64 / 30.0) - 1.0).collect();
        let path = sample_increment_path(200, 1.0, &mut ScriptedDeviates::new(vals)).unwrap();
        for cell in [0.01, 0.05, 0.3, 10.0] {
            let idx = SegmentIndex::new(&path, cell);
            for i in 0..300 {
                let p = Point::new((i as f64 * 0.37).sin() * 1.5, (i as f64 * 0.23).cos() * 1.5);
                let exact = dist_point_polyline(p, &path);
                let (d, _) = idx.nearest(p, f64::INFINITY).unwrap();
                assert_eq!(d, exact, "cell={cell} p={p:?}");
                if exact > 0.1 {
                    assert!(idx.nearest(p, 0.05).is_none());
                }
            }
        }
    }

    #[test]
    fn every_segment_in_overlapped_cells() {
        let path = Polyline::from_vertices(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 1.0),
            Point::new(-2.0, 2.5),
        ])
        .unwrap();
        let idx = SegmentIndex::new(&path, 0.5);
        let mut out = Vec::new();
        idx.query_rect(Point::new(1.0, 0.6), Point::new(1.1, 0.7), &mut out);
        assert!(out.contains(&0));
        assert!(!out.contains(&1));
        out.clear();
        idx.query_rect(Point::new(-1.0, 2.0), Point::new(-0.9, 2.1), &mut out);
        assert!(out.contains(&1));
    }
}
