use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use crate::brownian::Polyline;

use super::distance_map::{visit_tiles, DistanceMap, TileValues};
use super::frame::RasterFrame;
use super::grid::{threshold, threshold_tile, BinaryGrid, TileBits};
use super::topology::{euler_by_complex, label_components, Components};

/// Area, boundary length and Euler characteristic of one dilated set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicVolumes {
    pub area: f64,
    pub boundary_length: f64,
    pub euler: i64,
}

/// Intrinsic volumes together with the component counts behind the Euler number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub volumes: IntrinsicVolumes,
    pub components: Components,
}

fn check(m: &DistanceMap, r: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("band half-width must be positive, got {delta}")));
    }
    if !(r - delta > 0.0) {
        return Err(Error::domain(format!("r - delta must be positive (r = {r}, delta = {delta})")));
    }
    if r + delta > m.r_max() {
        return Err(Error::domain(format!(
            "r + delta = {} exceeds the map's validity range {}",
            r + delta,
            m.r_max()
        )));
    }
    Ok(())
}

fn area_and_perimeter(m: &DistanceMap, r: f64, delta: f64) -> (f64, f64) {
    let a2 = m.frame().pixel_area();
    let area = a2 * m.count_within(r) as f64;
    // the volume function V(r) has derivative equal to the boundary length
    let band = m.count_between(r - delta, r + delta) as f64;
    (area, a2 * band / (2.0 * delta))
}

/// Area, boundary length and Euler number of `{D <= r}`.
///
/// The boundary length is the central difference of the area over
/// `[r - delta, r + delta]`.
pub fn intrinsic_volumes(m: &DistanceMap, r: f64, delta: f64) -> Result<IntrinsicVolumes> {
    check(m, r, delta)?;
    let (area, boundary_length) = area_and_perimeter(m, r, delta);
    let euler = euler_by_complex(&threshold(m, r)?);
    Ok(IntrinsicVolumes {
        area,
        boundary_length,
        euler,
    })
}

/// [`intrinsic_volumes`] plus foreground and hole counts from component labeling.
pub fn measure(m: &DistanceMap, r: f64, delta: f64) -> Result<Measurement> {
    check(m, r, delta)?;
    let (area, boundary_length) = area_and_perimeter(m, r, delta);
    let grid = threshold(m, r)?;
    let euler = euler_by_complex(&grid);
    let components = label_components(&grid);
    Ok(Measurement {
        volumes: IntrinsicVolumes {
            area,
            boundary_length,
            euler,
        },
        components,
    })
}

/// [`measure`] at several radii on one frame of pixel size `a`, without
/// storing the distance map.
///
/// The frame is [`RasterFrame::auto`] for `max(radii) + delta`. Tiles lying
/// entirely within `min(radii) - delta` of the path skip the per-pixel
/// distance computation. Results equal those of [`measure`] on the full
/// map of the same frame.
pub fn measure_path(path: &Polyline, a: f64, radii: &[f64], delta: f64) -> Result<Vec<Measurement>> {
    let (lo, hi) = radii
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if radii.is_empty() || !(lo - delta > 0.0) || !hi.is_finite() {
        return Err(Error::domain(format!(
            "radii must be finite with r - delta > 0 (delta = {delta})"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!("band half-width must be positive, got {delta}")));
    }
    let r_max = hi + delta;
    let frame = RasterFrame::auto(path, r_max, a)?;
    struct TileStats {
        t: usize,
        within: Vec<u32>,
        band: Vec<u32>,
        bits: Vec<TileBits>,
    }
    let tiles = visit_tiles(path, &frame, r_max, lo - delta, |t, vals| match vals {
        TileValues::Exact(v) => TileStats {
            t,
            within: radii.iter().map(|&r| v.iter().filter(|&&d| d <= r).count() as u32).collect(),
            band: radii
                .iter()
                .map(|&r| v.iter().filter(|&&d| d > r - delta && d <= r + delta).count() as u32)
                .collect(),
            bits: radii.iter().map(|&r| threshold_tile(v, r)).collect(),
        },
        TileValues::Inside => {
            let mask = BinaryGrid::frame_mask(&frame, t);
            let n: u32 = mask.iter().map(|b| b.count_ones()).sum();
            TileStats {
                t,
                within: vec![n; radii.len()],
                band: vec![0; radii.len()],
                bits: vec![mask; radii.len()],
            }
        }
    })?;
    let a2 = frame.pixel_area();
    Ok((0..radii.len())
        .map(|k| {
            let within: u64 = tiles.iter().map(|s| s.within[k] as u64).sum();
            let band: u64 = tiles.iter().map(|s| s.band[k] as u64).sum();
            let grid = BinaryGrid::from_tiles(frame, tiles.iter().map(|s| (s.t, s.bits[k])));
            Measurement {
                volumes: IntrinsicVolumes {
                    area: a2 * within as f64,
                    boundary_length: a2 * band as f64 / (2.0 * delta),
                    euler: euler_by_complex(&grid),
                },
                components: label_components(&grid),
            }
        })
        .collect())
}
