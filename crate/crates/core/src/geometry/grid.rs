use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::point::Point;

use super::distance_map::DistanceMap;
use super::frame::RasterFrame;

/// Side length, in pixels, of the square tiles used for sparse raster storage.
pub const TILE: usize = 16;

pub(crate) const EMPTY: u32 = u32::MAX;

/// One tile of occupancy bits; bit `x` of row `y` is pixel `(x0 + x, y0 + y)`.
pub(crate) type TileBits = [u16; TILE];

/// Foreground/background raster, stored as sparse tiles.
///
/// Tiles that are not stored are entirely background. Bits of stored tiles
/// that fall outside the frame are always clear.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGrid {
    frame: RasterFrame,
    tiles_x: usize,
    tiles_y: usize,
    slots: Vec<u32>,
    bits: Vec<TileBits>,
}

impl BinaryGrid {
    pub fn empty(frame: RasterFrame) -> Self {
        let tiles_x = frame.width.div_ceil(TILE);
        let tiles_y = frame.height.div_ceil(TILE);
        BinaryGrid {
            frame,
            tiles_x,
            tiles_y,
            slots: vec![EMPTY; tiles_x * tiles_y],
            bits: Vec::new(),
        }
    }

    /// Unit-pixel grid filled from a predicate.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let frame = RasterFrame::new(Point::ORIGIN, 1.0, width, height)?;
        let mut g = BinaryGrid::empty(frame);
        for j in 0..height {
            for i in 0..width {
                if f(i, j) {
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    /// Grid from text rows, `#` for foreground; the first row is the top (largest `j`).
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        BinaryGrid::from_fn(width, height, |i, j| {
            rows[height - 1 - j].chars().nth(i) == Some('#')
        })
    }

    /// Grid from stored tiles given as `(tile index, bits)` in increasing tile order.
    pub(crate) fn from_tiles(frame: RasterFrame, tiles: impl IntoIterator<Item = (usize, TileBits)>) -> Self {
        let mut g = BinaryGrid::empty(frame);
        for (t, bits) in tiles {
            if bits.iter().any(|&b| b != 0) {
                g.slots[t] = g.bits.len() as u32;
                g.bits.push(bits);
            }
        }
        g
    }

    /// Bits of tile `t` that lie inside the frame.
    pub(crate) fn frame_mask(frame: &RasterFrame, t: usize) -> TileBits {
        let tiles_x = frame.width.div_ceil(TILE);
        let (x0, y0) = ((t % tiles_x) * TILE, (t / tiles_x) * TILE);
        let w = (frame.width - x0).min(TILE);
        let h = (frame.height - y0).min(TILE);
        let row = if w == TILE { u16::MAX } else { (1u16 << w) - 1 };
        let mut bits = [0; TILE];
        bits[..h].iter_mut().for_each(|b| *b = row);
        bits
    }

    pub fn frame(&self) -> &RasterFrame {
        &self.frame
    }

    pub fn width(&self) -> usize {
        self.frame.width
    }

    pub fn height(&self) -> usize {
        self.frame.height
    }

    pub(crate) fn tiles_x(&self) -> usize {
        self.tiles_x
    }

    pub(crate) fn tiles_y(&self) -> usize {
        self.tiles_y
    }

    pub(crate) fn slot(&self, tx: usize, ty: usize) -> u32 {
        self.slots[ty * self.tiles_x + tx]
    }

    pub(crate) fn tile_bits(&self, slot: u32) -> &TileBits {
        &self.bits[slot as usize]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        if i >= self.frame.width || j >= self.frame.height {
            return false;
        }
        match self.slot(i / TILE, j / TILE) {
            EMPTY => false,
            s => self.bits[s as usize][j % TILE] >> (i % TILE) & 1 == 1,
        }
    }

    /// Like [`get`](Self::get) but accepting out-of-frame (negative) coordinates.
    pub fn get_signed(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && self.get(i as usize, j as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.frame.width && j < self.frame.height, "pixel outside frame");
        let t = (j / TILE) * self.tiles_x + i / TILE;
        if self.slots[t] == EMPTY {
            if !value {
                return;
            }
            self.slots[t] = self.bits.len() as u32;
            self.bits.push([0; TILE]);
        }
        let row = &mut self.bits[self.slots[t] as usize][j % TILE];
        if value {
            *row |= 1 << (i % TILE);
        } else {
            *row &= !(1 << (i % TILE));
        }
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> u64 {
        self.bits
            .iter()
            .flat_map(|t| t.iter())
            .map(|r| r.count_ones() as u64)
            .sum()
    }

    pub fn is_subset_of(&self, other: &BinaryGrid) -> bool {
        self.frame == other.frame
            && self.slots.iter().enumerate().all(|(t, &s)| {
                if s == EMPTY {
                    return true;
                }
                let mine = &self.bits[s as usize];
                match other.slots[t] {
                    EMPTY => mine.iter().all(|&r| r == 0),
                    o => mine.iter().zip(&other.bits[o as usize]).all(|(a, b)| a & !b == 0),
                }
            })
    }

    /// Plain PBM (`P1`) image, top row first, lines of at most 70 characters.
    pub fn to_pbm(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "P1\n{} {}", self.width(), self.height());
        for j in (0..self.height()).rev() {
            let mut line = 0;
            for i in 0..self.width() {
                if line == 70 {
                    out.push('\n');
                    line = 0;
                }
                out.push(if self.get(i, j) { '1' } else { '0' });
                line += 1;
            }
            out.push('\n');
        }
        out
    }
}

/// Foreground `{D <= r}` of a distance map. Ties count as foreground.
pub fn threshold(m: &DistanceMap, r: f64) -> Result<BinaryGrid> {
    if !(r >= 0.0) || r > m.r_max() {
        return Err(Error::domain(format!(
            "threshold {r} outside the map's validity range [0, {}]",
            m.r_max()
        )));
    }
    Ok(BinaryGrid::from_tiles(
        *m.frame(),
        m.tiles().map(|(t, vals)| (t, threshold_tile(vals, r))),
    ))
}

pub(crate) fn threshold_tile(vals: &[f64], r: f64) -> TileBits {
    let mut bits = [0u16; TILE];
    for (y, row) in bits.iter_mut().enumerate() {
        for x in 0..TILE {
            if vals[y * TILE + x] <= r {
                *row |= 1 << x;
            }
        }
    }
    bits
}
