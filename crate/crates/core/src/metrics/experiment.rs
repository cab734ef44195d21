//! Edit-distance comparison of curve hashes for nearby point pairs.
//!
//! Random stream: iteration `i` uses a ChaCha8 generator keyed with
//! `seed_from_u64(seed)` on stream `i`. Point `j` of that iteration reads
//! four 64-bit words starting at word position `8 j` (32-bit words): base
//! longitude, base latitude, longitude offset, latitude offset. Each word
//! becomes a uniform `[0, 1)` double from its top 53 bits. Iterations are
//! independent, so any partition across threads gives the same counts.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::edit::levenshtein_slices;
use crate::curves::{CurveId, Granularity};
use crate::error::{Error, Result};
use crate::geocode::{encode_hash, GeoPoint, DEFAULT_GRANULARITY};

/// Seed used when neither a flag nor `SFC_GEOHASH_SEED` provides one.
pub const DEFAULT_SEED: u64 = 42;

/// Curves in the default three-way comparison.
pub const DEFAULT_COMPETITORS: [CurveId; 3] = [CurveId::Hilbert, CurveId::Z, CurveId::H];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub points_per_iteration: usize,
    pub iterations: usize,
    pub seed: u64,
    pub n: Granularity,
    pub neighbor_offset_degrees: f64,
    /// Adds the Gray-coded Z curve as a fourth competitor.
    pub include_gray_z: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            points_per_iteration: 1000,
            iterations: 100,
            seed: DEFAULT_SEED,
            n: Granularity::new(DEFAULT_GRANULARITY).expect("default granularity is valid"),
            neighbor_offset_degrees: 0.001,
            include_gray_z: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_iteration == 0 {
            return Err(Error::Config("points_per_iteration must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        let off = self.neighbor_offset_degrees;
        if !off.is_finite() || off <= 0.0 {
            return Err(Error::Config(format!(
                "neighbor_offset_degrees must be a positive number, got {off}"
            )));
        }
        Ok(())
    }

    pub fn competitors(&self) -> Vec<CurveId> {
        let mut c = DEFAULT_COMPETITORS.to_vec();
        if self.include_gray_z {
            c.push(CurveId::GrayZ);
        }
        c
    }
}

/// Strict wins per curve; shares are wins over all comparisons, so they sum
/// to one minus the tie fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyResult {
    pub wins: BTreeMap<CurveId, u64>,
    pub ties: u64,
    pub total_comparisons: u64,
    pub shares: BTreeMap<CurveId, f64>,
}

impl TallyResult {
    pub fn share(&self, curve: CurveId) -> f64 {
        self.shares.get(&curve).copied().unwrap_or(0.0)
    }

    pub fn tie_fraction(&self) -> f64 {
        ratio(self.ties, self.total_comparisons)
    }

    /// Flat rows with the stable field names used by the CSV/JSON output.
    pub fn rows(&self) -> Vec<TallyRow> {
        self.wins
            .iter()
            .map(|(&curve, &wins)| TallyRow {
                curve,
                wins,
                share: self.share(curve),
                ties: self.ties,
                total: self.total_comparisons,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyRow {
    pub curve: CurveId,
    pub wins: u64,
    pub share: f64,
    pub ties: u64,
    pub total: u64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Raw counts from one pass over the point stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Counts {
    wins: [u64; 4],
    ties: u64,
    total: u64,
    /// `better[a][b]`: comparisons where curve `a` was strictly closer than `b`.
    better: [[u64; 4]; 4],
}

impl Counts {
    fn merge(mut self, other: &Counts) -> Counts {
        for i in 0..4 {
            self.wins[i] += other.wins[i];
            for j in 0..4 {
                self.better[i][j] += other.better[i][j];
            }
        }
        self.ties += other.ties;
        self.total += other.total;
        self
    }
}

fn slot(c: CurveId) -> usize {
    match c {
        CurveId::Z => 0,
        CurveId::GrayZ => 1,
        CurveId::Hilbert => 2,
        CurveId::H => 3,
    }
}

#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The base point and its partner for point `j` of iteration `iteration`.
pub fn point_pair(cfg: &ExperimentConfig, iteration: usize, j: usize) -> (GeoPoint, GeoPoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(iteration as u64);
    rng.set_word_pos(8 * j as u128);
    pair_from(&mut rng, cfg.neighbor_offset_degrees)
}

fn pair_from(rng: &mut ChaCha8Rng, offset: f64) -> (GeoPoint, GeoPoint) {
    let lon = -180.0 + 360.0 * unit(rng);
    let lat = -90.0 + 180.0 * unit(rng);
    let base = GeoPoint::clamped(lat, lon);
    let dlon = offset * (2.0 * unit(rng) - 1.0);
    let dlat = offset * (2.0 * unit(rng) - 1.0);
    let partner = GeoPoint::clamped(
        f64::from(base.lat()) + dlat,
        f64::from(base.lon()) + dlon,
    );
    (base, partner)
}

fn run_iteration(cfg: &ExperimentConfig, competitors: &[CurveId], iteration: usize) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(iteration as u64);
    let mut counts = Counts::default();
    for j in 0..cfg.points_per_iteration {
        rng.set_word_pos(8 * j as u128);
        let (a, b) = pair_from(&mut rng, cfg.neighbor_offset_degrees);

        let mut dist = [0usize; 4];
        for c in CurveId::ALL {
            let ha = encode_hash(a, c, cfg.n);
            let hb = encode_hash(b, c, cfg.n);
            dist[slot(c)] = levenshtein_slices(ha.as_str().as_bytes(), hb.as_str().as_bytes());
        }

        for i in 0..4 {
            for k in 0..4 {
                if dist[i] < dist[k] {
                    counts.better[i][k] += 1;
                }
            }
        }

        let best = competitors.iter().map(|&c| dist[slot(c)]).min().unwrap_or(0);
        let mut leaders = competitors.iter().filter(|&&c| dist[slot(c)] == best);
        let first = leaders.next();
        match (first, leaders.next()) {
            (Some(&c), None) => counts.wins[slot(c)] += 1,
            _ => counts.ties += 1,
        }
        counts.total += 1;
    }
    counts
}

/// Tally plus pairwise counts from a single pass over the point stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tally: TallyResult,
    better: [[u64; 4]; 4],
}

impl Comparison {
    /// Fraction of non-tied comparisons in which `a` is strictly closer than `b`.
    pub fn pairwise_share(&self, a: CurveId, b: CurveId) -> Result<f64> {
        if a == b {
            return Err(Error::Usage(format!(
                "pairwise share needs two different curves, got {a} twice"
            )));
        }
        let ab = self.better[slot(a)][slot(b)];
        let ba = self.better[slot(b)][slot(a)];
        Ok(ratio(ab, ab + ba))
    }

    /// Comparisons where `a` and `b` were strictly ordered.
    pub fn decided(&self, a: CurveId, b: CurveId) -> u64 {
        self.better[slot(a)][slot(b)] + self.better[slot(b)][slot(a)]
    }
}

/// Runs the comparison, spreading iterations over `threads` workers (all
/// available cores when `None`). The result does not depend on `threads`.
pub fn run_comparison(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Comparison> {
    cfg.validate()?;
    let competitors = cfg.competitors();
    let per_iteration: Vec<Counts> = match threads {
        Some(1) => (0..cfg.iterations)
            .map(|i| run_iteration(cfg, &competitors, i))
            .collect(),
        _ => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            pool.install(|| {
                (0..cfg.iterations)
                    .into_par_iter()
                    .map(|i| run_iteration(cfg, &competitors, i))
                    .collect()
            })
        }
    };
    let counts = per_iteration
        .iter()
        .fold(Counts::default(), |acc, c| acc.merge(c));

    let wins: BTreeMap<_, _> = competitors
        .iter()
        .map(|&c| (c, counts.wins[slot(c)]))
        .collect();
    let shares = wins
        .iter()
        .map(|(&c, &w)| (c, ratio(w, counts.total)))
        .collect();
    Ok(Comparison {
        tally: TallyResult {
            wins,
            ties: counts.ties,
            total_comparisons: counts.total,
            shares,
        },
        better: counts.better,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TallyResult> {
    Ok(run_comparison(cfg, None)?.tally)
}

pub fn pairwise_share(cfg: &ExperimentConfig, a: CurveId, b: CurveId) -> Result<f64> {
    if a == b {
        return Err(Error::Usage(format!(
            "pairwise share needs two different curves, got {a} twice"
        )));
    }
    run_comparison(cfg, None)?.pairwise_share(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            points_per_iteration: 50,
            iterations: 2,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic() {
        let a = run_experiment(&small(7)).unwrap();
        let b = run_experiment(&small(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_comparisons, 100);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = ExperimentConfig { iterations: 9, ..small(3) };
        let one = run_comparison(&cfg, Some(1)).unwrap();
        let many = run_comparison(&cfg, Some(4)).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn accounting() {
        let t = run_experiment(&small(11)).unwrap();
        assert_eq!(t.wins.values().sum::<u64>() + t.ties, t.total_comparisons);
        let shares: f64 = t.shares.values().sum();
        assert!((shares + t.tie_fraction() - 1.0).abs() < 1e-12);
        assert!(t.shares.values().all(|s| (0.0..=1.0).contains(s)));
        assert_eq!(t.wins.len(), 3);
        assert!(!t.wins.contains_key(&CurveId::GrayZ));
    }

    #[test]
    fn gray_z_is_optional() {
        let cfg = ExperimentConfig { include_gray_z: true, ..small(5) };
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.wins.len(), 4);
        assert_eq!(t.wins.values().sum::<u64>() + t.ties, t.total_comparisons);
    }

    #[test]
    fn tiny_offset_ties_everything() {
        let cfg = ExperimentConfig {
            neighbor_offset_degrees: 1e-12,
            ..small(1)
        };
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.ties, t.total_comparisons);
        assert!(t.shares.values().all(|&s| s == 0.0));
    }

    #[test]
    fn pairwise_complement() {
        let c = run_comparison(&small(9), Some(1)).unwrap();
        let ab = c.pairwise_share(CurveId::Hilbert, CurveId::Z).unwrap();
        let ba = c.pairwise_share(CurveId::Z, CurveId::Hilbert).unwrap();
        if c.decided(CurveId::Hilbert, CurveId::Z) > 0 {
            assert!((ab + ba - 1.0).abs() < 1e-12);
        }
        assert!(c.pairwise_share(CurveId::H, CurveId::H).is_err());
        assert!(pairwise_share(&small(9), CurveId::Z, CurveId::Z).is_err());
    }

    #[test]
    fn stream_position_is_addressable() {
        let cfg = small(21);
        let (a, b) = point_pair(&cfg, 1, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        rng.set_stream(1);
        rng.set_word_pos(8 * 17);
        assert_eq!(pair_from(&mut rng, cfg.neighbor_offset_degrees), (a, b));
        assert!((a.lon() - b.lon()).abs() <= 0.001 + 1e-4);
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            ExperimentConfig { points_per_iteration: 0, ..Default::default() },
            ExperimentConfig { iterations: 0, ..Default::default() },
            ExperimentConfig { neighbor_offset_degrees: 0.0, ..Default::default() },
            ExperimentConfig { neighbor_offset_degrees: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
        }
    }
}
