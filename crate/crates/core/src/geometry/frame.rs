use crate::brownian::Polyline;
use crate::error::{Error, Result};
use crate::point::{BoundingBox, Point};

/// A regular pixel raster. Pixel `(i, j)` has its center at
/// `origin + a (i, j)` and covers the square of side `a` around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterFrame {
    pub origin: Point,
    pub pixel_size: f64,
    pub width: usize,
    pub height: usize,
}

impl RasterFrame {
    pub fn new(origin: Point, pixel_size: f64, width: usize, height: usize) -> Result<Self> {
        if !(pixel_size > 0.0) || !pixel_size.is_finite() {
            return Err(Error::domain(format!("pixel size must be positive, got {pixel_size}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::domain("frame must have at least one pixel"));
        }
        Ok(RasterFrame {
            origin,
            pixel_size,
            width,
            height,
        })
    }

    /// Smallest frame whose pixel centers cover `bbox`, with pixel centers
    /// on the global lattice `a Z^2`.
    pub fn covering(bbox: BoundingBox, pixel_size: f64) -> Result<Self> {
        let i0 = (bbox.min.x / pixel_size).floor();
        let j0 = (bbox.min.y / pixel_size).floor();
        let w = ((bbox.max.x / pixel_size).ceil() - i0) as usize + 1;
        let h = ((bbox.max.y / pixel_size).ceil() - j0) as usize + 1;
        RasterFrame::new(Point::new(i0 * pixel_size, j0 * pixel_size), pixel_size, w, h)
    }

    /// Frame around `path` inflated by `r_max + 16 a`.
    pub fn auto(path: &Polyline, r_max: f64, pixel_size: f64) -> Result<Self> {
        Self::covering(
            path.bounding_box().inflate(r_max + 16.0 * pixel_size),
            pixel_size,
        )
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.pixel_size,
            self.origin.y + j as f64 * self.pixel_size,
        )
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn pixel_area(&self) -> f64 {
        self.pixel_size * self.pixel_size
    }

    /// Outer edges of the covered region.
    pub fn extent(&self) -> BoundingBox {
        let h = 0.5 * self.pixel_size;
        BoundingBox {
            min: Point::new(self.origin.x - h, self.origin.y - h),
            max: Point::new(
                self.origin.x + (self.width as f64 - 0.5) * self.pixel_size,
                self.origin.y + (self.height as f64 - 0.5) * self.pixel_size,
            ),
        }
    }

    /// Checks that every vertex of `path` keeps a distance greater than
    /// `r + 2a` from the frame boundary. Segments lie in the convex hull of
    /// their vertices, so vertices suffice.
    pub fn check_margin(&self, path: &Polyline, r: f64) -> Result<()> {
        let ext = self.extent();
        let need = r + 2.0 * self.pixel_size;
        let bb = path.bounding_box();
        let slack = (bb.min.x - ext.min.x)
            .min(bb.min.y - ext.min.y)
            .min(ext.max.x - bb.max.x)
            .min(ext.max.y - bb.max.y);
        if slack > need {
            Ok(())
        } else {
            Err(Error::FrameTooSmall(format!(
                "path comes within {slack:.6} of the frame edge, need more than {need:.6}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_frame_satisfies_margin() {
        let p = Polyline::from_vertices(vec![Point::new(-1.0, 0.5), Point::new(2.0, -3.0)]).unwrap();
        let f = RasterFrame::auto(&p, 1.5, 0.01).unwrap();
        f.check_margin(&p, 1.5).unwrap();
        assert!(f.check_margin(&p, 1.8).is_err());
        assert_eq!(f.center(0, 0), f.origin);
        // the origin is a pixel center
        let f = RasterFrame::auto(&p, 1.0, 0.25).unwrap();
        let i = (-f.origin.x / 0.25).round() as usize;
        let j = (-f.origin.y / 0.25).round() as usize;
        assert_eq!(f.center(i, j), Point::ORIGIN);
    }
}
