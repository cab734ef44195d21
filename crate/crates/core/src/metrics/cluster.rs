//! Cluster counts for rectangular queries.
//!
//! A cluster is a maximal run of cells in the query that the curve numbers
//! consecutively; fewer clusters per query means better locality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curves::{self, CurveId, CurveIndex, Granularity, GridPoint};
use crate::error::{Axis, Error, Result};

/// Largest query class `average_clusters` will enumerate.
pub const MAX_QUERIES: u128 = 100_000_000;

/// Inclusive cell rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryRect {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

impl QueryRect {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::Config(format!(
                "empty rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    /// The whole grid.
    pub fn full(n: Granularity) -> Self {
        let m = (n.side() - 1) as u32;
        Self { x0: 0, y0: 0, x1: m, y1: m }
    }

    pub fn check(self, n: Granularity) -> Result<Self> {
        let limit = n.side();
        let (axis, value) = if u64::from(self.x1) >= limit {
            (Axis::X, self.x1)
        } else if u64::from(self.y1) >= limit {
            (Axis::Y, self.y1)
        } else {
            return Ok(self);
        };
        Err(Error::CellOutOfRange {
            axis,
            value: value.into(),
            limit,
        })
    }

    pub fn cell_count(self) -> u64 {
        u64::from(self.x1 - self.x0 + 1) * u64::from(self.y1 - self.y0 + 1)
    }

    #[inline]
    pub fn contains(self, p: GridPoint) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }

    pub fn cells(self) -> impl Iterator<Item = GridPoint> {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| GridPoint::new(x, y)))
    }
}

/// Number of maximal runs of consecutive curve indices among the cells of `q`.
pub fn count_clusters(q: QueryRect, curve: CurveId, n: Granularity) -> Result<u64> {
    let q = q.check(n)?;
    let mut idx: Vec<u64> = q
        .cells()
        .map(|p| curves::raw_index(curve, p.x, p.y, n.get()))
        .collect();
    idx.sort_unstable();
    Ok(1 + idx.windows(2).filter(|w| w[1] != w[0] + 1).count() as u64)
}

/// Query classes with exact averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryClass {
    /// Every axis-aligned rectangle of the grid.
    Rects,
    /// Every `k x k` window.
    Windows { k: u32 },
}

impl QueryClass {
    /// Number of queries in the class at granularity `n`.
    pub fn query_count(self, n: Granularity) -> Result<u128> {
        let side = u128::from(n.side());
        match self {
            QueryClass::Rects => {
                let per_axis = side * (side + 1) / 2;
                Ok(per_axis * per_axis)
            }
            QueryClass::Windows { k } => {
                let k = u128::from(k);
                if k == 0 || k > side {
                    return Err(Error::Config(format!(
                        "window size {k} must be in 1..={side} for n={n}"
                    )));
                }
                Ok((side - k + 1).pow(2))
            }
        }
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryClass::Rects => f.write_str("rects"),
            QueryClass::Windows { k } => write!(f, "windows-{k}x{k}"),
        }
    }
}

/// One row of a cluster report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub class: String,
    pub n: u32,
    pub curve: CurveId,
    pub avg_clusters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub rows: Vec<ClusterRow>,
}

/// Curve positions of every cell plus the inverse, for fast run counting.
struct Layout {
    side: u32,
    index: Vec<u64>,
    cell: Vec<GridPoint>,
}

impl Layout {
    fn new(curve: CurveId, n: Granularity) -> Self {
        let side = n.side() as u32;
        let mut index = vec![0; n.cells() as usize];
        let mut cell = vec![GridPoint::new(0, 0); n.cells() as usize];
        for p in GridPoint::all(n) {
            let i = curves::raw_index(curve, p.x, p.y, n.get());
            index[(p.y * side + p.x) as usize] = i;
            cell[i as usize] = p;
        }
        Self { side, index, cell }
    }

    /// Cells of `q` whose curve predecessor lies outside `q`; one per run.
    fn runs(&self, q: QueryRect) -> u64 {
        let mut runs = 0;
        for y in q.y0..=q.y1 {
            let row = (y * self.side) as usize;
            for x in q.x0..=q.x1 {
                let i = self.index[row + x as usize];
                if i == 0 || !q.contains(self.cell[(i - 1) as usize]) {
                    runs += 1;
                }
            }
        }
        runs
    }
}

/// Largest grid for which per-curve lookup tables are materialised.
const LAYOUT_MAX_N: u32 = 12;

fn runs_direct(q: QueryRect, curve: CurveId, n: Granularity) -> u64 {
    q.cells()
        .filter(|&p| {
            let i = curves::raw_index(curve, p.x, p.y, n.get());
            i == 0 || !q.contains(curves::curve_point(curve, CurveIndex::new_unchecked(i - 1, n)))
        })
        .count() as u64
}

/// Exact mean cluster count over every query of `class`.
pub fn average_clusters(class: QueryClass, curve: CurveId, n: Granularity) -> Result<ClusterRow> {
    let queries = class.query_count(n)?;
    if queries > MAX_QUERIES {
        return Err(Error::Capacity {
            queries,
            limit: MAX_QUERIES,
        });
    }
    let side = n.side() as u32;
    let layout = (n.get() <= LAYOUT_MAX_N).then(|| Layout::new(curve, n));
    let runs = |q: QueryRect| match &layout {
        Some(l) => l.runs(q),
        None => runs_direct(q, curve, n),
    };

    let mut total: u128 = 0;
    match class {
        QueryClass::Rects => {
            for x0 in 0..side {
                for x1 in x0..side {
                    for y0 in 0..side {
                        for y1 in y0..side {
                            total += u128::from(runs(QueryRect { x0, y0, x1, y1 }));
                        }
                    }
                }
            }
        }
        QueryClass::Windows { k } => {
            for y0 in 0..=side - k {
                for x0 in 0..=side - k {
                    let q = QueryRect { x0, y0, x1: x0 + k - 1, y1: y0 + k - 1 };
                    total += u128::from(runs(q));
                }
            }
        }
    }
    Ok(ClusterRow {
        class: class.to_string(),
        n: n.get(),
        curve,
        avg_clusters: total as f64 / queries as f64,
    })
}

pub fn cluster_report(class: QueryClass, curves: &[CurveId], n: Granularity) -> Result<ClusterReport> {
    let rows = curves
        .iter()
        .map(|&c| average_clusters(class, c, n))
        .collect::<Result<_>>()?;
    Ok(ClusterReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> Granularity {
        Granularity::new(n).unwrap()
    }

    fn rect(x0: u32, y0: u32, x1: u32, y1: u32) -> QueryRect {
        QueryRect::new(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn examples() {
        for c in CurveId::ALL {
            assert_eq!(count_clusters(QueryRect::full(g(2)), c, g(2)).unwrap(), 1);
        }
        assert_eq!(count_clusters(rect(0, 0, 0, 1), CurveId::Z, g(1)).unwrap(), 2);
        assert_eq!(count_clusters(rect(0, 0, 0, 1), CurveId::Hilbert, g(1)).unwrap(), 1);
    }

    #[test]
    fn bad_rectangles() {
        assert!(QueryRect::new(2, 0, 1, 0).is_err());
        let err = count_clusters(rect(0, 0, 4, 1), CurveId::Z, g(2)).unwrap_err();
        assert!(matches!(err, Error::CellOutOfRange { axis: Axis::X, .. }));
    }

    #[test]
    fn run_counting_matches_sorting() {
        let n = g(3);
        for c in CurveId::ALL {
            let layout = Layout::new(c, n);
            for q in [rect(0, 0, 7, 7), rect(1, 2, 5, 3), rect(3, 3, 3, 3), rect(0, 5, 6, 7)] {
                let want = count_clusters(q, c, n).unwrap();
                assert_eq!(layout.runs(q), want);
                assert_eq!(runs_direct(q, c, n), want);
            }
        }
    }

    #[test]
    fn singleton_windows() {
        for c in CurveId::ALL {
            for n in [1, 3, 5] {
                let row = average_clusters(QueryClass::Windows { k: 1 }, c, g(n)).unwrap();
                assert_eq!(row.avg_clusters, 1.0);
            }
        }
    }

    #[test]
    fn two_by_two_windows_at_n3() {
        // totals over the 49 windows, from the brute-force counter in tests/common
        let total = |c| average_clusters(QueryClass::Windows { k: 2 }, c, g(3)).unwrap().avg_clusters * 49.0;
        assert_eq!(total(CurveId::Hilbert), 88.0);
        assert_eq!(total(CurveId::Z), 116.0);
        assert_eq!(total(CurveId::H), 89.0);
        assert_eq!(total(CurveId::GrayZ), 112.0);
    }

    #[test]
    fn whole_grid_window() {
        for c in CurveId::ALL {
            let row = average_clusters(QueryClass::Windows { k: 8 }, c, g(3)).unwrap();
            assert_eq!(row.avg_clusters, 1.0);
        }
    }

    #[test]
    fn capacity_guard() {
        let err = average_clusters(QueryClass::Rects, CurveId::H, g(30)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(err.to_string().contains("smaller n"));
        assert!(average_clusters(QueryClass::Windows { k: 0 }, CurveId::H, g(3)).is_err());
        assert!(average_clusters(QueryClass::Windows { k: 9 }, CurveId::H, g(3)).is_err());
    }

    #[test]
    fn query_counts() {
        assert_eq!(QueryClass::Rects.query_count(g(3)).unwrap(), 1296);
        assert_eq!(QueryClass::Windows { k: 2 }.query_count(g(3)).unwrap(), 49);
    }
}
