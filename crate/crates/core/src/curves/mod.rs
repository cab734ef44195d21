//! Cell/index maps for the four 2D curve families.
//!
//! Every curve works on the `2^n x 2^n` lattice and maps a [`GridPoint`] to a
//! [`CurveIndex`] in `[0, 4^n)`. The kernels are integer-only.

mod h;
mod hilbert;
mod z;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};

pub(crate) use h::index_cached_raw as h_index_cached_raw;
pub use h::{build_h_tables, h_index, h_index_cached, h_point, HTables};
pub use hilbert::{hilbert_index, hilbert_point};
pub use z::{gray_z_index, gray_z_point, z_index, z_point};

/// Largest supported granularity; `2n` index bits must fit in a `u64`.
pub const MAX_GRANULARITY: u32 = 31;

/// Number of subdivisions per axis. The grid side is `2^n` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Granularity(u32);

impl Granularity {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_GRANULARITY).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::Granularity(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Cells along one axis, `2^n`.
    #[inline]
    pub fn side(self) -> u64 {
        1 << self.0
    }

    /// Total number of cells, `4^n`.
    #[inline]
    pub fn cells(self) -> u64 {
        1 << (2 * self.0)
    }

    /// Every granularity from 1 up to and including `self`.
    pub fn up_to(self) -> impl Iterator<Item = Granularity> {
        (1..=self.0).map(Granularity)
    }
}

impl TryFrom<u32> for Granularity {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Granularity::new(n)
    }
}

impl From<Granularity> for u32 {
    fn from(n: Granularity) -> u32 {
        n.0
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A cell on the lattice: column `x`, row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: u32,
    pub y: u32,
}

impl GridPoint {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Checks both coordinates against the grid side for `n`.
    pub fn check(self, n: Granularity) -> Result<Self> {
        let limit = n.side();
        if u64::from(self.x) >= limit {
            return Err(Error::CellOutOfRange {
                axis: Axis::X,
                value: self.x.into(),
                limit,
            });
        }
        if u64::from(self.y) >= limit {
            return Err(Error::CellOutOfRange {
                axis: Axis::Y,
                value: self.y.into(),
                limit,
            });
        }
        Ok(self)
    }

    pub fn manhattan(self, other: GridPoint) -> u64 {
        u64::from(self.x.abs_diff(other.x)) + u64::from(self.y.abs_diff(other.y))
    }

    /// Every cell of the grid, row-major.
    pub fn all(n: Granularity) -> impl Iterator<Item = GridPoint> {
        let side = n.side() as u32;
        (0..side).flat_map(move |y| (0..side).map(move |x| GridPoint::new(x, y)))
    }
}

/// A position along a curve, tied to the granularity it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveIndex {
    value: u64,
    n: Granularity,
}

impl CurveIndex {
    pub fn new(value: u64, n: Granularity) -> Result<Self> {
        if value < n.cells() {
            Ok(Self { value, n })
        } else {
            Err(Error::IndexOutOfRange { value, n: n.get() })
        }
    }

    /// Caller guarantees `value < 4^n`.
    #[inline]
    pub(crate) fn new_unchecked(value: u64, n: Granularity) -> Self {
        debug_assert!(value < n.cells());
        Self { value, n }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn granularity(self) -> Granularity {
        self.n
    }
}

/// Curve selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveId {
    Z,
    GrayZ,
    Hilbert,
    H,
}

impl CurveId {
    pub const ALL: [CurveId; 4] = [CurveId::Z, CurveId::GrayZ, CurveId::Hilbert, CurveId::H];

    pub fn name(self) -> &'static str {
        match self {
            CurveId::Z => "z",
            CurveId::GrayZ => "grayz",
            CurveId::Hilbert => "hilbert",
            CurveId::H => "h",
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for CurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(CurveId::Z),
            "grayz" | "gray-z" | "gray" => Ok(CurveId::GrayZ),
            "hilbert" => Ok(CurveId::Hilbert),
            "h" => Ok(CurveId::H),
            other => Err(Error::Usage(format!(
                "unknown curve {other:?}; expected z, grayz, hilbert or h"
            ))),
        }
    }
}

/// How the H index is evaluated. Only H has a cached form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Plain,
    Cached,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(Mode::Plain),
            "cached" => Ok(Mode::Cached),
            other => Err(Error::Usage(format!(
                "unknown mode {other:?}; expected plain or cached"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Cached => "cached",
        })
    }
}

/// Uniform forward dispatch.
///
/// `Mode::Cached` is only meaningful for [`CurveId::H`] and needs `tables`
/// built for at least `n`.
pub fn curve_index(
    curve: CurveId,
    p: GridPoint,
    n: Granularity,
    mode: Mode,
    tables: Option<&HTables>,
) -> Result<CurveIndex> {
    match (curve, mode) {
        (CurveId::Z, Mode::Plain) => z_index(p, n),
        (CurveId::GrayZ, Mode::Plain) => gray_z_index(p, n),
        (CurveId::Hilbert, Mode::Plain) => hilbert_index(p, n),
        (CurveId::H, Mode::Plain) => h_index(p, n),
        (CurveId::H, Mode::Cached) => match tables {
            Some(t) if t.covers(n) => h_index_cached(t, p, n),
            _ => Err(Error::MissingTables { curve, n: n.get() }),
        },
        (_, Mode::Cached) => Err(Error::Usage(format!(
            "cached mode is only available for the h curve, not {curve}"
        ))),
    }
}

/// Uniform inverse dispatch.
pub fn curve_point(curve: CurveId, i: CurveIndex) -> GridPoint {
    match curve {
        CurveId::Z => z_point(i),
        CurveId::GrayZ => gray_z_point(i),
        CurveId::Hilbert => hilbert_point(i),
        CurveId::H => h_point(i),
    }
}

/// Raw forward kernel without range checks, used by hot loops that have
/// already validated their inputs.
#[inline]
pub(crate) fn raw_index(curve: CurveId, x: u32, y: u32, n: u32) -> u64 {
    match curve {
        CurveId::Z => z::interleave(x, y),
        CurveId::GrayZ => z::gray_rank(z::interleave(x, y)),
        CurveId::Hilbert => hilbert::index_raw(x, y, n),
        CurveId::H => h::index_raw(x, y, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Granularity {
        Granularity::new(n).unwrap()
    }

    #[test]
    fn granularity_bounds() {
        assert!(Granularity::new(0).is_err());
        assert!(Granularity::new(32).is_err());
        assert_eq!(g(31).cells(), 1 << 62);
        assert_eq!(g(3).side(), 8);
    }

    #[test]
    fn dispatch_examples() {
        let idx = |c, x, y, n| {
            curve_index(c, GridPoint::new(x, y), g(n), Mode::Plain, None)
                .unwrap()
                .value()
        };
        assert_eq!(idx(CurveId::Z, 0, 0, 8), 0);
        assert_eq!(idx(CurveId::Hilbert, 1, 0, 1), 3);
        assert_eq!(idx(CurveId::H, 1, 1, 1), 2);
    }

    #[test]
    fn cached_needs_tables() {
        let p = GridPoint::new(1, 1);
        let err = curve_index(CurveId::H, p, g(4), Mode::Cached, None).unwrap_err();
        assert!(matches!(err, Error::MissingTables { n: 4, .. }));

        let small = build_h_tables(g(2)).unwrap();
        assert!(curve_index(CurveId::H, p, g(4), Mode::Cached, Some(&small)).is_err());

        let t = build_h_tables(g(4)).unwrap();
        let cached = curve_index(CurveId::H, p, g(4), Mode::Cached, Some(&t)).unwrap();
        assert_eq!(cached, h_index(p, g(4)).unwrap());

        let err = curve_index(CurveId::Z, p, g(4), Mode::Cached, Some(&t)).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn out_of_range_cell_names_axis() {
        let err = z_index(GridPoint::new(0, 4), g(2)).unwrap_err();
        assert!(matches!(err, Error::CellOutOfRange { axis: Axis::Y, value: 4, limit: 4 }));
        let err = hilbert_index(GridPoint::new(9, 0), g(3)).unwrap_err();
        assert!(matches!(err, Error::CellOutOfRange { axis: Axis::X, .. }));
    }

    #[test]
    fn index_range_checked() {
        assert!(CurveIndex::new(16, g(2)).is_err());
        assert!(CurveIndex::new(15, g(2)).is_ok());
    }

    #[test]
    fn curve_names_round_trip() {
        for c in CurveId::ALL {
            assert_eq!(c.name().parse::<CurveId>().unwrap(), c);
        }
        assert!("peano".parse::<CurveId>().is_err());
    }
}
