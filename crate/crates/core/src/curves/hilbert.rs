//! Hilbert order. At `n = 1` the cells are visited as
//! `(0,0), (0,1), (1,1), (1,0)`; every level keeps that orientation, so the
//! curve starts at the origin and ends in the bottom-right corner.

use super::{CurveIndex, Granularity, GridPoint};
use crate::error::Result;

/// Reflect/transpose the sub-square so the next level sees the base orientation.
#[inline]
fn rotate(side: u64, x: &mut u64, y: &mut u64, rx: u64, ry: u64) {
    if ry == 0 {
        if rx == 1 {
            *x = side - 1 - *x;
            *y = side - 1 - *y;
        }
        std::mem::swap(x, y);
    }
}

#[inline]
pub(crate) fn index_raw(x: u32, y: u32, n: u32) -> u64 {
    let side = 1u64 << n;
    let (mut x, mut y) = (u64::from(x), u64::from(y));
    let mut d = 0;
    let mut s = side >> 1;
    while s > 0 {
        let rx = u64::from(x & s != 0);
        let ry = u64::from(y & s != 0);
        d += s * s * ((3 * rx) ^ ry);
        rotate(side, &mut x, &mut y, rx, ry);
        s >>= 1;
    }
    d
}

pub(crate) fn point_raw(d: u64, n: u32) -> (u32, u32) {
    let side = 1u64 << n;
    let (mut x, mut y) = (0u64, 0u64);
    let mut t = d;
    let mut s = 1;
    while s < side {
        let rx = 1 & (t >> 1);
        let ry = 1 & (t ^ rx);
        rotate(s, &mut x, &mut y, rx, ry);
        x += s * rx;
        y += s * ry;
        t >>= 2;
        s <<= 1;
    }
    (x as u32, y as u32)
}

pub fn hilbert_index(p: GridPoint, n: Granularity) -> Result<CurveIndex> {
    let p = p.check(n)?;
    Ok(CurveIndex::new_unchecked(index_raw(p.x, p.y, n.get()), n))
}

pub fn hilbert_point(i: CurveIndex) -> GridPoint {
    let (x, y) = point_raw(i.value(), i.granularity().get());
    GridPoint::new(x, y)
}
