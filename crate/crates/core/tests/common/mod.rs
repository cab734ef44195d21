//! Oracles shared by the integration tests. They use only the public API
//! and share no code with the crate's kernels.

#![allow(dead_code)]

use sfcgeo::curves::{curve_index, CurveId, Granularity, GridPoint, Mode};

pub fn g(n: u32) -> Granularity {
    Granularity::new(n).unwrap()
}

type Cell = (i64, i64);

/// Cells of the H order at granularity `n`, by literal triangle recursion.
///
/// The square splits into four right triangles around the center, one per
/// side, walked counter-clockwise. Each triangle halves at the foot of its
/// apex until its legs are one cell long; the two unit triangles covering a
/// 2x2 block contribute one diagonal cell each plus the shared off-diagonal
/// cell, and the diagonal cell kept depends on the block's checkerboard colour.
pub fn h_order(n: u32) -> Vec<(u32, u32)> {
    fn walk(a: Cell, b: Cell, c: Cell, out: &mut Vec<[Cell; 2]>) {
        let m = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
        if (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2) == 4 {
            let lo = |p: Cell, q: Cell| (p.0.min(q.0).min(c.0), p.1.min(q.1).min(c.1));
            out.push([lo(a, m), lo(m, b)]);
            return;
        }
        walk(a, c, m, out);
        walk(c, b, m, out);
    }
    let s = 1i64 << n;
    let c = (s / 2, s / 2);
    let mut halves = Vec::new();
    for (a, b) in [((0, 0), (s, 0)), ((s, 0), (s, s)), ((s, s), (0, s)), ((0, s), (0, 0))] {
        walk(a, b, c, &mut halves);
    }
    halves
        .chunks(2)
        .flat_map(|pass| {
            let ([d0, o], [_, d1]) = (pass[0], pass[1]);
            let odd = ((o.0 >> 1) + (o.1 >> 1)) & 1 == 1;
            if odd { [o, d1] } else { [d0, o] }
        })
        .map(|(x, y)| (x as u32, y as u32))
        .collect()
}

/// Clusters in the rectangle `[x0, x1] x [y0, y1]`, by sorting the curve
/// indices of its cells and counting gaps.
pub fn brute_clusters(curve: CurveId, n: Granularity, x0: u32, y0: u32, x1: u32, y1: u32) -> u64 {
    let mut idx = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            idx.push(curve_index(curve, GridPoint::new(x, y), n, Mode::Plain, None).unwrap().value());
        }
    }
    idx.sort();
    let mut clusters = 1;
    for i in 1..idx.len() {
        if idx[i] != idx[i - 1] + 1 {
            clusters += 1;
        }
    }
    clusters
}

/// Mean of `brute_clusters` over every `k x k` window.
pub fn brute_window_average(curve: CurveId, n: Granularity, k: u32) -> f64 {
    let side = n.side() as u32;
    let mut total = 0;
    let mut count = 0;
    for x0 in 0..=side - k {
        for y0 in 0..=side - k {
            total += brute_clusters(curve, n, x0, y0, x0 + k - 1, y0 + k - 1);
            count += 1;
        }
    }
    total as f64 / count as f64
}
