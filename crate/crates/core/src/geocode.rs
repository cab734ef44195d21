//! Geographic coordinates to curve cells and base-32 hash strings.
//!
//! Longitude maps to `x`, latitude to `y`, both from the south-west corner.
//! A hash is the curve index zero-extended to a multiple of five bits and
//! written most-significant group first; curve and granularity travel
//! alongside the text.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curves::{self, CurveId, CurveIndex, Granularity, GridPoint, HTables, Mode};
use crate::error::{Error, Result};

pub const ALPHABET: &[u8; 32] = b"0123456789bcdefghjkmnpqrstuvwxyz";

/// Granularity used when none is given: 32-bit index, 7-character hash.
pub const DEFAULT_GRANULARITY: u32 = 16;

const INVALID: u8 = 0xFF;

const DECODE: [u8; 256] = {
    let mut t = [INVALID; 256];
    let mut i = 0;
    while i < 32 {
        t[ALPHABET[i] as usize] = i as u8;
        i += 1;
    }
    t
};

/// Hash length in characters for granularity `n`: `ceil(2n / 5)`.
pub const fn hash_len(n: u32) -> usize {
    (2 * n as usize).div_ceil(5)
}

/// A latitude/longitude pair stored at 32-bit float precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f32,
    lon: f32,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Latitude(lat));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::Longitude(lon));
        }
        Ok(Self {
            lat: lat as f32,
            lon: lon as f32,
        })
    }

    /// Builds a point from values already known to be in range, clamping
    /// anything that drifted past the boundaries.
    pub(crate) fn clamped(lat: f64, lon: f64) -> Self {
        Self {
            lat: lat.clamp(-90.0, 90.0) as f32,
            lon: lon.clamp(-180.0, 180.0) as f32,
        }
    }

    pub fn lat(self) -> f32 {
        self.lat
    }

    pub fn lon(self) -> f32 {
        self.lon
    }
}

/// Geographic extent of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellBounds {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

/// A curve hash string together with the curve and granularity it was made with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geohash {
    text: String,
    curve: CurveId,
    n: Granularity,
}

impl Geohash {
    /// Validates `text` as a hash for `curve` at granularity `n`.
    pub fn parse(text: &str, curve: CurveId, n: Granularity) -> Result<Self> {
        let expected = hash_len(n.get());
        let chars = text.chars().count();
        if let Some((pos, ch)) = text
            .chars()
            .enumerate()
            .find(|&(_, ch)| !ch.is_ascii() || DECODE[ch as usize] == INVALID)
        {
            return Err(Error::InvalidCharacter { ch, pos });
        }
        if chars != expected {
            return Err(Error::HashLength {
                expected,
                actual: chars,
                n: n.get(),
            });
        }
        let value = text
            .bytes()
            .fold(0u64, |acc, b| (acc << 5) | u64::from(DECODE[usize::from(b)]));
        if value >= n.cells() {
            return Err(Error::HashRange { value, n: n.get() });
        }
        Ok(Self {
            text: text.to_owned(),
            curve,
            n,
        })
    }

    /// Encodes a curve index.
    pub fn from_index(index: CurveIndex, curve: CurveId) -> Self {
        let n = index.granularity();
        Self {
            text: index_text(index.value(), n.get()),
            curve,
            n,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    pub fn granularity(&self) -> Granularity {
        self.n
    }

    /// The curve index the text encodes.
    pub fn index(&self) -> CurveIndex {
        let value = self
            .text
            .bytes()
            .fold(0u64, |acc, b| (acc << 5) | u64::from(DECODE[usize::from(b)]));
        CurveIndex::new_unchecked(value, self.n)
    }

    pub fn cell(&self) -> GridPoint {
        curves::curve_point(self.curve, self.index())
    }
}

impl fmt::Display for Geohash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[inline]
fn index_text(value: u64, n: u32) -> String {
    let len = hash_len(n);
    let mut text = String::with_capacity(len);
    for i in (0..len).rev() {
        let group = (value >> (5 * i)) & 31;
        text.push(char::from(ALPHABET[group as usize]));
    }
    text
}

#[inline]
fn axis_cell(v: f64, offset: f64, span: f64, side: u64) -> u32 {
    let c = ((v + offset) / span * side as f64).floor() as u64;
    c.min(side - 1) as u32
}

pub fn point_to_cell(g: GeoPoint, n: Granularity) -> GridPoint {
    let side = n.side();
    GridPoint::new(
        axis_cell(f64::from(g.lon), 180.0, 360.0, side),
        axis_cell(f64::from(g.lat), 90.0, 180.0, side),
    )
}

pub fn cell_bounds(p: GridPoint, n: Granularity) -> Result<CellBounds> {
    let p = p.check(n)?;
    let side = n.side() as f64;
    let lon = |x: f64| x / side * 360.0 - 180.0;
    let lat = |y: f64| y / side * 180.0 - 90.0;
    Ok(CellBounds {
        lat_min: lat(f64::from(p.y)),
        lat_max: lat(f64::from(p.y) + 1.0),
        lon_min: lon(f64::from(p.x)),
        lon_max: lon(f64::from(p.x) + 1.0),
    })
}

/// Moves an `f32` coordinate by whole ulps until it quantizes to `target`.
fn snap(value: f32, target: u32, quantize: impl Fn(f32) -> u32) -> f32 {
    let mut v = value;
    // a cell holding any f32 is reached within a couple of ulps
    for _ in 0..64 {
        let c = quantize(v);
        if c == target {
            return v;
        }
        v = if c < target { v.next_up() } else { v.next_down() };
    }
    value
}

/// Cell center, rounded to 32-bit precision and nudged so it still lies in
/// the cell when the cell is only a few ulps wide. Cells narrower than the
/// local `f32` spacing (possible near the antimeridian for `n > 24`) get the
/// rounded center.
pub fn cell_to_point(p: GridPoint, n: Granularity) -> Result<GeoPoint> {
    let p = p.check(n)?;
    let side = n.side();
    let sidef = side as f64;
    let lon = (f64::from(p.x) + 0.5) / sidef * 360.0 - 180.0;
    let lat = (f64::from(p.y) + 0.5) / sidef * 180.0 - 90.0;
    let lon = snap(lon as f32, p.x, |v| axis_cell(f64::from(v), 180.0, 360.0, side));
    let lat = snap(lat as f32, p.y, |v| axis_cell(f64::from(v), 90.0, 180.0, side));
    Ok(GeoPoint { lat, lon })
}

/// Hash of `g` under `curve`, plain evaluation.
pub fn encode_hash(g: GeoPoint, curve: CurveId, n: Granularity) -> Geohash {
    let cell = point_to_cell(g, n);
    let value = curves::raw_index(curve, cell.x, cell.y, n.get());
    Geohash {
        text: index_text(value, n.get()),
        curve,
        n,
    }
}

/// Hash of `g` with an explicit evaluation mode; `Mode::Cached` needs H tables.
pub fn encode_hash_with(
    g: GeoPoint,
    curve: CurveId,
    n: Granularity,
    mode: Mode,
    tables: Option<&HTables>,
) -> Result<Geohash> {
    let cell = point_to_cell(g, n);
    let index = curves::curve_index(curve, cell, n, mode, tables)?;
    Ok(Geohash::from_index(index, curve))
}

/// Cached H hash for hot loops; `tables` must cover `n`.
#[inline]
pub(crate) fn encode_h_cached(g: GeoPoint, n: Granularity, tables: &HTables) -> Geohash {
    debug_assert!(tables.covers(n));
    let cell = point_to_cell(g, n);
    let value = curves::h_index_cached_raw(tables, cell.x, cell.y, n.get());
    Geohash {
        text: index_text(value, n.get()),
        curve: CurveId::H,
        n,
    }
}

/// Center of the cell named by `h`.
pub fn decode_hash(h: &Geohash) -> GeoPoint {
    cell_to_point(h.cell(), h.granularity()).expect("decoded cell lies on the grid")
}

/// Parses and decodes in one step.
pub fn decode_str(text: &str, curve: CurveId, n: Granularity) -> Result<GeoPoint> {
    Geohash::parse(text, curve, n).map(|h| decode_hash(&h))
}
