//! Morton (Z-order) and its Gray-coded variant.
//!
//! Morton code: bit `i` of `x` goes to bit `2i`, bit `i` of `y` to `2i + 1`.

use super::{CurveIndex, Granularity, GridPoint};
use crate::error::Result;

/// Spreads the 32 bits of `v` into the even bit positions of a `u64`.
#[inline]
pub(crate) fn spread(v: u32) -> u64 {
    let mut v = u64::from(v);
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

/// Gathers the even bits of `v` back into a `u32`.
#[inline]
pub(crate) fn compact(v: u64) -> u32 {
    let mut v = v & 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v >> 4)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v >> 8)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v >> 16)) & 0x0000_0000_FFFF_FFFF;
    v as u32
}

#[inline]
pub(crate) fn interleave(x: u32, y: u32) -> u64 {
    spread(x) | (spread(y) << 1)
}

#[inline]
pub(crate) fn deinterleave(code: u64) -> (u32, u32) {
    (compact(code), compact(code >> 1))
}

/// Position of `code` in the binary reflected Gray sequence (inverse Gray).
#[inline]
pub(crate) fn gray_rank(code: u64) -> u64 {
    let mut v = code;
    v ^= v >> 1;
    v ^= v >> 2;
    v ^= v >> 4;
    v ^= v >> 8;
    v ^= v >> 16;
    v ^= v >> 32;
    v
}

#[inline]
pub(crate) fn gray(rank: u64) -> u64 {
    rank ^ (rank >> 1)
}

pub fn z_index(p: GridPoint, n: Granularity) -> Result<CurveIndex> {
    let p = p.check(n)?;
    Ok(CurveIndex::new_unchecked(interleave(p.x, p.y), n))
}

pub fn z_point(i: CurveIndex) -> GridPoint {
    let (x, y) = deinterleave(i.value());
    GridPoint::new(x, y)
}

/// Rank of the cell's Morton code in the Gray sequence, so that walking the
/// index visits codes that differ by one bit at each step.
pub fn gray_z_index(p: GridPoint, n: Granularity) -> Result<CurveIndex> {
    let p = p.check(n)?;
    Ok(CurveIndex::new_unchecked(gray_rank(interleave(p.x, p.y)), n))
}

pub fn gray_z_point(i: CurveIndex) -> GridPoint {
    let (x, y) = deinterleave(gray(i.value()));
    GridPoint::new(x, y)
}
