//! The H-curve: a closed Sierpiński-type cycle over the `2^n x 2^n` grid.
//!
//! The grid is cut by its diagonals into four right triangles, one per side,
//! traversed counter-clockwise: bottom, right, top, left. A triangle whose
//! hypotenuse lies on side `e` of a square splits (two halvings) into four
//! triangles of the same kind in the half-size quadrants. For the bottom side
//! the children are, in order:
//!
//! ```text
//! (quadrant (0,0), bottom) (quadrant (0,0), right) (quadrant (1,0), left) (quadrant (1,0), bottom)
//! ```
//!
//! and the other sides are rotations of that pattern. The recursion stops at
//! the quarter triangles of `2 x 2` blocks. Consecutive pairs of those form a
//! pass over half of a block: a diagonal cell, the off-diagonal cell, and the
//! opposite diagonal cell. Each block is crossed by two passes along the same
//! diagonal. A pass keeps its entry-end diagonal cell when the block's
//! checkerboard colour `(bx + by) mod 2` is even and its exit-end one when
//! odd, so every pass numbers exactly two cells and the cycle stays
//! edge-connected.
//!
//! Sides are numbered `0..4` as bottom, right, top, left. Quadrants use the
//! counter-clockwise cycle `(0,0) -> (1,0) -> (1,1) -> (0,1)` numbered `0..4`.

use super::{CurveIndex, Granularity, GridPoint};
use crate::error::{Error, Result};

use super::z::spread;

/// Quadrant cycle number to `(x, y)` bit pair.
#[inline]
fn quadrant_bits(q: u64) -> (u64, u64) {
    let y = q >> 1;
    (y ^ (q & 1), y)
}

/// Bit vectors describing, for every level `k`, which diagonal quarter of the
/// enclosing `2^k` square the cell's numbered half lies in.
///
/// With `lx`, `ly` the cell position inside that square, the quarter is fixed
/// by two tests, `lx - t >= ly` and `lx + ly + t >= 2^k`, where `t` selects
/// which half of the cell is numbered (low bit of `x`, flipped on odd blocks).
/// Both tests, for every `k` at once, are the carry chains of one
/// subtraction and one addition. Returns `(ge, side_lo)`: the first test, and
/// the low bit of the quarter number.
#[inline]
fn quarter_bits(x: u64, y: u64) -> (u64, u64) {
    let t = (x ^ (x >> 1) ^ (y >> 1)) & 1;
    let ny = !y;
    let ge = x ^ ny ^ x.wrapping_add(ny).wrapping_add(1 - t);
    let over = x ^ y ^ (x + y + t);
    (ge, !(ge ^ over))
}

/// Closed-form H index. The digit for level `k` only needs the low bit of the
/// quarter at levels `k` and `k + 1` and the low bit of the quadrant number.
#[inline]
pub(crate) fn index_raw(x: u32, y: u32, n: u32) -> u64 {
    let (x, y) = (u64::from(x), u64::from(y));
    let (ge, side_lo) = quarter_bits(x, y);
    let quad_lo = x ^ y;

    let inner = ((1u64 << n) - 1) & !1;
    let top = 1u64 << n;
    let hi = ((quad_lo ^ (side_lo >> 1)) & inner) | (!ge & top);
    let lo = ((quad_lo ^ side_lo) & inner) | (side_lo & top);
    spread((lo >> 1) as u32) | (spread((hi >> 1) as u32) << 1)
}

pub(crate) fn point_raw(index: u64, n: u32) -> (u32, u32) {
    let mut side = (index >> (2 * (n - 1))) & 3;
    let (mut x, mut y) = (0u64, 0u64);
    for k in (1..n).rev() {
        let digit = (index >> (2 * (k - 1))) & 3;
        // children of the bottom side, as (quadrant, side)
        let (q, child) = match digit {
            0 => (0, 0),
            1 => (0, 1),
            2 => (1, 3),
            _ => (1, 0),
        };
        let (qx, qy) = quadrant_bits((q + side) & 3);
        x |= qx << k;
        y |= qy << k;
        side = (child + side) & 3;
    }
    // odd blocks number the exit-end cell of the final quarter
    let odd = ((x ^ y) >> 1) & 1;
    let (cx, cy) = quadrant_bits((side + odd) & 3);
    ((x | cx) as u32, (y | cy) as u32)
}

pub fn h_index(p: GridPoint, n: Granularity) -> Result<CurveIndex> {
    let p = p.check(n)?;
    Ok(CurveIndex::new_unchecked(index_raw(p.x, p.y, n.get()), n))
}

pub fn h_point(i: CurveIndex) -> GridPoint {
    let (x, y) = point_raw(i.value(), i.granularity().get());
    GridPoint::new(x, y)
}

const NO_CHILD: u8 = u8::MAX;

/// Levels resolved per composite table lookup.
const CHUNK_LEVELS: u32 = 4;

/// Precomputed transition data for the H-curve.
///
/// `step[side][quadrant][child_side]` is the index digit of the child triangle
/// in `quadrant` with its hypotenuse on `child_side`, inside a parent triangle
/// on `side`; [`NO_CHILD`] marks combinations that do not occur. It is
/// derived by splitting the four canonical triangles. `chunk` composes the
/// digit rule over [`CHUNK_LEVELS`] consecutive levels so that evaluation
/// takes one lookup per four levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HTables {
    max_n: Granularity,
    step: [[[u8; 4]; 4]; 4],
    chunk: Box<[u8; 512]>,
}

impl HTables {
    pub fn max_granularity(&self) -> Granularity {
        self.max_n
    }

    pub fn covers(&self, n: Granularity) -> bool {
        n <= self.max_n
    }

    /// Digit of the child `(quadrant, child_side)` inside a parent on `side`,
    /// or `None` when that child does not belong to the parent.
    pub fn step(&self, side: u8, quadrant: u8, child_side: u8) -> Option<u8> {
        let d = *self
            .step
            .get(usize::from(side))?
            .get(usize::from(quadrant))?
            .get(usize::from(child_side))?;
        (d != NO_CHILD).then_some(d)
    }
}

/// Splits a triangle `(entry, exit, apex)` at the hypotenuse midpoint.
fn split(t: [(i64, i64); 3]) -> [[(i64, i64); 3]; 2] {
    let [a, b, c] = t;
    let m = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    [[a, c, m], [c, b, m]]
}

/// Entry and exit corners of side `e` on a square of side `len`, counter-clockwise.
fn side_corners(e: u8, len: i64) -> ((i64, i64), (i64, i64)) {
    let corners = [(0, 0), (len, 0), (len, len), (0, len)];
    (corners[usize::from(e)], corners[usize::from((e + 1) & 3)])
}

/// Identify a quarter-square triangle by its quadrant and hypotenuse side
/// inside the `len x len` parent square.
fn classify(t: [(i64, i64); 3], len: i64) -> (u8, u8) {
    let [a, b, apex] = t;
    let half = len / 2;
    let (qx, qy) = (apex.0 / half, apex.1 / half);
    let quadrant = match (qx, qy) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    };
    let mid = ((a.0 + b.0) / 2 - apex.0, (a.1 + b.1) / 2 - apex.1);
    let side = match (mid.0.signum(), mid.1.signum()) {
        (0, -1) => 0,
        (1, 0) => 1,
        (0, 1) => 2,
        _ => 3,
    };
    debug_assert_eq!(
        side_corners(side, half),
        ((a.0 - qx * half, a.1 - qy * half), (b.0 - qx * half, b.1 - qy * half)),
        "child triangle must keep the counter-clockwise orientation"
    );
    (quadrant, side)
}

/// Builds the transition and composite tables for granularities up to `max_n`.
pub fn build_h_tables(max_n: Granularity) -> Result<HTables> {
    let max_n = Granularity::new(max_n.get())?;
    const LEN: i64 = 4;

    let mut step = [[[NO_CHILD; 4]; 4]; 4];
    for e in 0..4u8 {
        let (a, b) = side_corners(e, LEN);
        let children = split([a, b, (LEN / 2, LEN / 2)]);
        let grand = children.iter().flat_map(|c| split(*c));
        for (digit, t) in grand.enumerate() {
            let (q, child) = classify(t, LEN);
            step[usize::from(e)][usize::from(q)][usize::from(child)] = digit as u8;
        }
    }

    // The digit only depends on the low bits of the parent side, quadrant and
    // child side; collapse the step table to that 3-bit rule.
    let mut rule = [NO_CHILD; 8];
    for (e, by_q) in step.iter().enumerate() {
        for (q, by_child) in by_q.iter().enumerate() {
            for (c, &d) in by_child.iter().enumerate() {
                if d == NO_CHILD {
                    continue;
                }
                let key = ((e & 1) << 2) | ((q & 1) << 1) | (c & 1);
                if rule[key] != NO_CHILD && rule[key] != d {
                    return Err(Error::Config(format!(
                        "inconsistent H transition for side {e}, quadrant {q}, child {c}"
                    )));
                }
                rule[key] = d;
            }
        }
    }

    // chunk index: bits 4..9 side low bits of levels k..=k+4, bits 0..4 quadrant
    // low bits of levels k..k+4; value: digits of levels k..k+4, lowest first.
    let mut chunk = Box::new([0u8; 512]);
    for (idx, out) in chunk.iter_mut().enumerate() {
        let sides = idx >> 4;
        let quads = idx & 0xF;
        let mut v = 0u8;
        for j in 0..CHUNK_LEVELS as usize {
            let parent = (sides >> (j + 1)) & 1;
            let child = (sides >> j) & 1;
            let q = (quads >> j) & 1;
            let d = rule[(parent << 2) | (q << 1) | child];
            debug_assert_ne!(d, NO_CHILD);
            v |= (d & 3) << (2 * j);
        }
        *out = v;
    }

    Ok(HTables { max_n, step, chunk })
}

/// Table-driven H index. Agrees bit-exactly with [`h_index`].
pub fn h_index_cached(tables: &HTables, p: GridPoint, n: Granularity) -> Result<CurveIndex> {
    let p = p.check(n)?;
    if !tables.covers(n) {
        return Err(Error::MissingTables {
            curve: super::CurveId::H,
            n: n.get(),
        });
    }
    Ok(CurveIndex::new_unchecked(
        index_cached_raw(tables, p.x, p.y, n.get()),
        n,
    ))
}

#[inline]
pub(crate) fn index_cached_raw(tables: &HTables, x: u32, y: u32, n: u32) -> u64 {
    let (x, y) = (u64::from(x), u64::from(y));
    let (ge, side_lo) = quarter_bits(x, y);
    let quad_lo = x ^ y;

    let mut index = 0u64;
    let mut level = 1;
    while level < n {
        let key = (((side_lo >> level) & 0x1F) << 4) | ((quad_lo >> level) & 0xF);
        index |= u64::from(tables.chunk[key as usize]) << (2 * (level - 1));
        level += CHUNK_LEVELS;
    }
    let low = 2 * (n - 1);
    index &= (1u64 << low) - 1;
    let top = (((!ge >> n) & 1) << 1) | ((side_lo >> n) & 1);
    index | (top << low)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Granularity {
        Granularity::new(n).unwrap()
    }

    type Cell = (i64, i64);

    /// Literal triangle recursion down to the quarter triangles of 2x2
    /// blocks; each quarter yields the cells at its entry and exit ends.
    fn quarters(n: u32) -> Vec<[Cell; 2]> {
        fn walk(a: Cell, b: Cell, c: Cell, out: &mut Vec<[Cell; 2]>) {
            let m = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
            let hyp2 = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
            if hyp2 == 4 {
                let min = |p: Cell, q: Cell| (p.0.min(q.0).min(c.0), p.1.min(q.1).min(c.1));
                out.push([min(a, m), min(m, b)]);
                return;
            }
            walk(a, c, m, out);
            walk(c, b, m, out);
        }
        let s = 1i64 << n;
        let c = (s / 2, s / 2);
        let mut out = Vec::new();
        walk((0, 0), (s, 0), c, &mut out);
        walk((s, 0), (s, s), c, &mut out);
        walk((s, s), (0, s), c, &mut out);
        walk((0, s), (0, 0), c, &mut out);
        out
    }

    fn cell_order(n: u32) -> Vec<Cell> {
        quarters(n)
            .chunks(2)
            .flat_map(|pass| {
                let [[d0, o], [o2, d1]] = [pass[0], pass[1]];
                assert_eq!(o, o2);
                let odd = ((o.0 >> 1) + (o.1 >> 1)) & 1 == 1;
                if odd { [o, d1] } else { [d0, o] }
            })
            .collect()
    }

    #[test]
    fn unit_grid_order() {
        assert_eq!(cell_order(1), [(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(h_index(GridPoint::new(0, 0), g(1)).unwrap().value(), 0);
        assert_eq!(h_index(GridPoint::new(1, 1), g(1)).unwrap().value(), 2);
        assert_eq!(h_index(GridPoint::new(0, 1), g(1)).unwrap().value(), 3);
        for (i, want) in [(0, (0, 0)), (1, (1, 0)), (2, (1, 1))] {
            let p = h_point(CurveIndex::new(i, g(1)).unwrap());
            assert_eq!((p.x, p.y), want);
        }
    }

    #[test]
    fn closed_form_matches_recursion() {
        for n in 1..=7 {
            for (i, &(x, y)) in cell_order(n).iter().enumerate() {
                assert_eq!(index_raw(x as u32, y as u32, n), i as u64, "n={n} cell=({x},{y})");
                assert_eq!(point_raw(i as u64, n), (x as u32, y as u32), "n={n} index={i}");
            }
        }
    }

    #[test]
    fn block_passes_partition_cells() {
        for n in 1..=6 {
            let mut by_block: std::collections::HashMap<Cell, Vec<[Cell; 3]>> = Default::default();
            for pass in quarters(n).chunks(2) {
                let [[d0, o], [_, d1]] = [pass[0], pass[1]];
                by_block.entry((o.0 >> 1, o.1 >> 1)).or_default().push([d0, o, d1]);
            }
            assert_eq!(by_block.len(), 1 << (2 * (n - 1)));
            for (block, passes) in by_block {
                assert_eq!(passes.len(), 2, "block {block:?}");
                // same diagonal, opposite directions
                assert_eq!(passes[0][0], passes[1][2]);
                assert_eq!(passes[0][2], passes[1][0]);
                assert_ne!(passes[0][1], passes[1][1]);
            }
        }
    }

    #[test]
    fn step_table_shape() {
        let t = build_h_tables(g(1)).unwrap();
        // bottom side children
        assert_eq!(t.step(0, 0, 0), Some(0));
        assert_eq!(t.step(0, 0, 1), Some(1));
        assert_eq!(t.step(0, 1, 3), Some(2));
        assert_eq!(t.step(0, 1, 0), Some(3));
        assert_eq!(t.step(0, 2, 2), None);
        assert_eq!(t.step(4, 0, 0), None);
        for e in 0..4 {
            let defined = (0..4)
                .flat_map(|q| (0..4).map(move |c| (q, c)))
                .filter(|&(q, c)| t.step(e, q, c).is_some())
                .count();
            assert_eq!(defined, 4);
        }
    }

    #[test]
    fn cached_matches_plain() {
        let t = build_h_tables(g(6)).unwrap();
        for n in g(6).up_to() {
            for p in GridPoint::all(n) {
                assert_eq!(h_index_cached(&t, p, n).unwrap(), h_index(p, n).unwrap());
            }
        }
        assert!(h_index_cached(&t, GridPoint::new(0, 0), g(7)).is_err());
    }

    #[test]
    fn cached_matches_plain_at_depth() {
        let t = build_h_tables(g(31)).unwrap();
        let mut s = 0x9E37_79B9_7F4A_7C15u64;
        for n in [13, 16, 24, 29, 30, 31] {
            let mask = (1u64 << n) - 1;
            for _ in 0..2000 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let (x, y) = ((s >> 7) & mask, (s >> 29) & mask);
                let (x, y) = (x as u32, y as u32);
                let plain = index_raw(x, y, n);
                assert_eq!(index_cached_raw(&t, x, y, n), plain);
                assert_eq!(point_raw(plain, n), (x, y));
            }
        }
    }

    #[test]
    fn tables_are_deterministic() {
        assert_eq!(build_h_tables(g(5)).unwrap(), build_h_tables(g(5)).unwrap());
    }
}
