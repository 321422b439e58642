//! Topology of the union of closed foreground pixels.
//!
//! Closed pixels that share only a corner intersect, so foreground is
//! 8-connected and background is 4-connected. Under this convention the
//! Euler characteristic equals foreground components minus holes.

use super::grid::{BinaryGrid, EMPTY, TILE};

/// Euler characteristic `V - E + F` of the cubical complex formed by the
/// closed foreground pixels, counting each vertex and edge once.
///
/// Every cell is charged to one lattice vertex: vertex `(i, j)` owns itself,
/// the edges leaving it to the right and upwards, and the pixel whose lower
/// left corner it is. With `a, b, c, d` the pixels below-left, below-right,
/// above-left and above-right of the vertex, its charge is
/// `[a|b|c|d] - [b|d] - [c|d] + [d]`.
pub fn euler_by_complex(g: &BinaryGrid) -> i64 {
    let (tx_n, ty_n) = (g.tiles_x(), g.tiles_y());
    let stored = |tx: i64, ty: i64| {
        tx >= 0 && ty >= 0 && (tx as usize) < tx_n && (ty as usize) < ty_n && g.slot(tx as usize, ty as usize) != EMPTY
    };
    // 18-bit row of pixels x0 - 1 ..= x0 + 16 (bit 0 is x0 - 1)
    let row_bits = |tx: usize, y: i64| -> u32 {
        if y < 0 || y as usize >= g.height() {
            return 0;
        }
        let ty = y as usize / TILE;
        let ly = y as usize % TILE;
        let fetch = |t: i64| -> u32 {
            if t < 0 || t as usize >= tx_n {
                return 0;
            }
            match g.slot(t as usize, ty) {
                EMPTY => 0,
                s => g.tile_bits(s)[ly] as u32,
            }
        };
        let mid = fetch(tx as i64) << 1;
        let left = (fetch(tx as i64 - 1) >> (TILE - 1)) & 1;
        let right = (fetch(tx as i64 + 1) & 1) << (TILE + 1);
        left | mid | right
    };

    let mut chi = 0i64;
    for ty in 0..ty_n {
        for tx in 0..tx_n {
            if g.slot(tx, ty) == EMPTY {
                continue;
            }
            let (txi, tyi) = (tx as i64, ty as i64);
            let left_stored = stored(txi - 1, tyi);
            let below_stored = stored(txi, tyi - 1);
            let below_left = stored(txi - 1, tyi - 1);
            let below_right = stored(txi + 1, tyi - 1);
            let y0 = (ty * TILE) as i64;
            // vertices k = 0..=16 at x = x0 + k
            let full: u32 = (1 << (TILE + 1)) - 1;
            let mut lower = row_bits(tx, y0 - 1);
            for vy in 0..=TILE as i64 {
                let upper = row_bits(tx, y0 + vy);
                let mut mask = full;
                if left_stored {
                    mask &= !1;
                }
                if vy == 0 {
                    if below_stored {
                        mask = 0;
                    }
                    if below_left {
                        mask &= !1;
                    }
                    if below_right {
                        mask &= !(1 << TILE);
                    }
                }
                // vertex k: a = lower bit k, b = lower bit k+1, c = upper bit k, d = upper bit k+1
                let b = lower >> 1;
                let d = upper >> 1;
                let any = (lower | b | upper | d) & mask;
                let bd = (b | d) & mask;
                let cd = (upper | d) & mask;
                chi += any.count_ones() as i64 - bd.count_ones() as i64 - cd.count_ones() as i64
                    + (d & mask).count_ones() as i64;
                lower = upper;
            }
        }
    }
    chi
}

/// Connected-component counts of a binary grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Components {
    /// 8-connected foreground components.
    pub foreground: usize,
    /// 4-connected background components not touching the frame border.
    pub holes: usize,
}

#[derive(Default)]
struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn add(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.rank.push(0);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

/// Maximal run `[start, end)` of equal pixels in one row.
#[derive(Clone, Copy)]
struct Run {
    start: usize,
    end: usize,
    id: u32,
}

/// First index `>= pos` whose bit differs from `val`, or `w`.
fn next_change(words: &[u64], w: usize, pos: usize, val: bool) -> usize {
    let mut i = pos;
    while i < w {
        let (wi, off) = (i / 64, i % 64);
        let word = if val { !words[wi] } else { words[wi] } >> off;
        if word != 0 {
            return (i + word.trailing_zeros() as usize).min(w);
        }
        i = (wi + 1) * 64;
    }
    w
}

/// Connects each run of `cur` to the runs of `prev` it touches, where
/// runs touch if they overlap after widening by `reach` pixels.
fn link(uf: &mut UnionFind, prev: &[Run], cur: &[Run], reach: usize) {
    let mut k = 0;
    for c in cur {
        while k < prev.len() && prev[k].end + reach <= c.start {
            k += 1;
        }
        let mut m = k;
        while m < prev.len() && prev[m].start < c.end + reach {
            uf.union(c.id, prev[m].id);
            m += 1;
        }
    }
}

/// Counts foreground components (8-connectivity) and holes, i.e. bounded
/// background components (4-connectivity), by union–find over row runs.
pub fn label_components(g: &BinaryGrid) -> Components {
    let (w, h) = (g.width(), g.height());
    let mut uf = UnionFind::default();
    let outside = uf.add();
    let mut words = vec![0u64; w.div_ceil(64) + 1];
    let (mut prev_fg, mut prev_bg) = (Vec::new(), Vec::new());
    let (mut cur_fg, mut cur_bg) = (Vec::new(), Vec::new());
    let (mut fg_ids, mut bg_ids) = (Vec::new(), Vec::new());
    for j in 0..h {
        words.iter_mut().for_each(|x| *x = 0);
        let (ty, ly) = (j / TILE, j % TILE);
        for tx in 0..g.tiles_x() {
            let s = g.slot(tx, ty);
            if s != EMPTY {
                let bits = g.tile_bits(s)[ly] as u64;
                let x = tx * TILE;
                words[x / 64] |= bits << (x % 64);
            }
        }
        cur_fg.clear();
        cur_bg.clear();
        let mut pos = 0;
        let mut val = words[0] & 1 == 1;
        while pos < w {
            let end = next_change(&words, w, pos, val);
            let id = uf.add();
            let run = Run { start: pos, end, id };
            if val {
                cur_fg.push(run);
                fg_ids.push(id);
            } else {
                if pos == 0 || end == w || j == 0 || j + 1 == h {
                    uf.union(id, outside);
                }
                cur_bg.push(run);
                bg_ids.push(id);
            }
            pos = end;
            val = !val;
        }
        link(&mut uf, &prev_fg, &cur_fg, 1);
        link(&mut uf, &prev_bg, &cur_bg, 0);
        std::mem::swap(&mut prev_fg, &mut cur_fg);
        std::mem::swap(&mut prev_bg, &mut cur_bg);
    }
    let outside_root = uf.find(outside);
    let distinct = |ids: &[u32], uf: &mut UnionFind| {
        let mut roots: Vec<u32> = ids.iter().map(|&i| uf.find(i)).filter(|&r| r != outside_root).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    };
    let foreground = distinct(&fg_ids, &mut uf);
    let holes = distinct(&bg_ids, &mut uf);
    Components { foreground, holes }
}
