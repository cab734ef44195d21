//! Timing harness for end-to-end geohash computation.
//!
//! Each variant hashes the same seeded batch of random points. Rounds cycle
//! through the variants so slow drift in machine state hits all of them alike.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::{build_h_tables, CurveId, Granularity, HTables};
use crate::error::{Error, Result};
use crate::geocode::{decode_hash, encode_h_cached, encode_hash, GeoPoint, DEFAULT_GRANULARITY};
use crate::metrics::DEFAULT_SEED;

/// Minimum batch time as a multiple of the timer granularity.
pub const TIMER_HEADROOM: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub warmup_rounds: usize,
    pub measured_rounds: usize,
    pub batch_size: usize,
    pub n: Granularity,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            warmup_rounds: 3,
            measured_rounds: 15,
            batch_size: 100_000,
            n: Granularity::new(DEFAULT_GRANULARITY).expect("default granularity is valid"),
            seed: DEFAULT_SEED,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.measured_rounds < 3 {
            return Err(Error::Config(format!(
                "measured_rounds must be at least 3, got {}",
                self.measured_rounds
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Z,
    H,
    Hilbert,
    HCached,
}

impl Variant {
    /// Report order.
    pub const ALL: [Variant; 4] = [Variant::Z, Variant::H, Variant::Hilbert, Variant::HCached];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Z => "Z",
            Variant::H => "H",
            Variant::Hilbert => "Hilbert",
            Variant::HCached => "H (cached)",
        }
    }

    pub fn from_label(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.label() == s)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub variant: Variant,
    pub median_ns: f64,
    pub mean_ns: f64,
    pub stddev_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub machine: String,
    pub timer_granularity_ns: u64,
    pub rows: Vec<VariantStats>,
    pub note: String,
}

/// The fields the CSV form carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: Vec<VariantStats>,
    pub batch: usize,
    pub rounds: usize,
    pub n: u32,
    pub seed: u64,
    pub machine: String,
}

impl BenchReport {
    pub fn stats(&self, v: Variant) -> Option<&VariantStats> {
        self.rows.iter().find(|r| r.variant == v)
    }

    pub fn median(&self, v: Variant) -> f64 {
        self.stats(v).map_or(f64::NAN, |s| s.median_ns)
    }

    pub fn summary(&self) -> BenchSummary {
        BenchSummary {
            rows: self.rows.clone(),
            batch: self.config.batch_size,
            rounds: self.config.measured_rounds,
            n: self.config.n.get(),
            seed: self.config.seed,
            machine: self.machine.clone(),
        }
    }
}

/// Deterministic batch of uniformly random points.
pub fn point_batch(seed: u64, len: usize) -> Vec<GeoPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let lon = rng.random_range(-180.0..180.0);
            let lat = rng.random_range(-90.0..90.0);
            GeoPoint::new(lat, lon).expect("sampled inside the valid ranges")
        })
        .collect()
}

/// Smallest positive step observed between consecutive clock reads.
pub fn timer_granularity() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..1000 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min(t1 - t0);
    }
    best
}

/// "model name, N logical cpus, os/arch".
pub fn machine_descriptor() -> String {
    let model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_owned())
        })
        .unwrap_or_else(|| "unknown cpu".to_owned());
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{model}, {cpus} logical cpus, {}/{}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

#[cfg(target_os = "linux")]
fn pin_to_current_cpu() -> bool {
    // SAFETY: cpu_set_t is plain data; the calls only touch the local set.
    unsafe {
        let cpu = libc::sched_getcpu();
        if cpu < 0 {
            return false;
        }
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu as usize, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_to_current_cpu() -> bool {
    false
}

fn correctness_sweep(points: &[GeoPoint], n: Granularity, tables: &HTables) -> Result<()> {
    for (i, &p) in points.iter().enumerate() {
        let plain = encode_hash(p, CurveId::H, n);
        let cached = encode_h_cached(p, n, tables);
        if plain != cached {
            return Err(Error::Correctness(format!(
                "point {i}: cached H hash {} differs from {}",
                cached.as_str(),
                plain.as_str()
            )));
        }
        for c in [CurveId::Z, CurveId::Hilbert, CurveId::H] {
            let h = encode_hash(p, c, n);
            let again = encode_hash(decode_hash(&h), c, n);
            if again != h {
                return Err(Error::Correctness(format!(
                    "point {i}: {c} hash {} re-encodes to {}",
                    h.as_str(),
                    again.as_str()
                )));
            }
        }
    }
    Ok(())
}

#[inline(never)]
fn time_batch(v: Variant, points: &[GeoPoint], n: Granularity, tables: &HTables) -> Duration {
    let mut sink = 0usize;
    let start = Instant::now();
    for &p in points {
        let p = black_box(p);
        let h = match v {
            Variant::Z => encode_hash(p, CurveId::Z, n),
            Variant::H => encode_hash(p, CurveId::H, n),
            Variant::Hilbert => encode_hash(p, CurveId::Hilbert, n),
            Variant::HCached => encode_h_cached(p, n, tables),
        };
        sink = sink.wrapping_add(black_box(h).as_str().len());
    }
    let elapsed = start.elapsed();
    black_box(sink);
    elapsed
}

fn stats(variant: Variant, samples: &mut [f64]) -> VariantStats {
    samples.sort_by(f64::total_cmp);
    let k = samples.len();
    let median = if k % 2 == 1 {
        samples[k / 2]
    } else {
        (samples[k / 2 - 1] + samples[k / 2]) / 2.0
    };
    let mean = samples.iter().sum::<f64>() / k as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    VariantStats {
        variant,
        median_ns: median,
        mean_ns: mean,
        stddev_ns: var.sqrt(),
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let points = point_batch(cfg.seed, cfg.batch_size);
    let tables = build_h_tables(cfg.n)?;
    correctness_sweep(&points, cfg.n, &tables)?;

    let pinned = pin_to_current_cpu();
    let granularity = timer_granularity();
    let required = granularity * TIMER_HEADROOM;

    let mut samples = vec![Vec::with_capacity(cfg.measured_rounds); Variant::ALL.len()];
    for round in 0..cfg.warmup_rounds + cfg.measured_rounds {
        for (slot, v) in Variant::ALL.into_iter().enumerate() {
            let t = time_batch(v, &points, cfg.n, &tables);
            if t < required {
                return Err(Error::TimerResolution {
                    batch_ns: t.as_nanos(),
                    required_ns: required.as_nanos(),
                });
            }
            if round >= cfg.warmup_rounds {
                samples[slot].push(t.as_nanos() as f64 / cfg.batch_size as f64);
            }
        }
    }

    let rows = Variant::ALL
        .into_iter()
        .zip(samples.iter_mut())
        .map(|(v, s)| stats(v, s))
        .collect();
    let note = format!(
        "each variant timed independently on the full hash computation; {} measured rounds after {} warmup; {}",
        cfg.measured_rounds,
        cfg.warmup_rounds,
        if pinned { "pinned to one cpu" } else { "not pinned" }
    );
    Ok(BenchReport {
        config: cfg.clone(),
        machine: machine_descriptor(),
        timer_granularity_ns: granularity.as_nanos() as u64,
        rows,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!(
                "unknown format {other:?}; expected text, csv or json"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    variant: String,
    median_ns: f64,
    mean_ns: f64,
    stddev_ns: f64,
    batch: usize,
    rounds: usize,
    n: u32,
    seed: u64,
    machine: String,
}

pub fn emit_table(r: &BenchReport, format: Format) -> Result<String> {
    match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{:<12} | time, ns", "Curves");
            for row in &r.rows {
                let _ = writeln!(out, "{:<12} | {:.0}", row.variant.label(), row.median_ns);
            }
            let _ = writeln!(out, "machine: {}", r.machine);
            let _ = writeln!(
                out,
                "n={} batch={} seed={}; {}",
                r.config.n, r.config.batch_size, r.config.seed, r.note
            );
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &r.rows {
                w.serialize(CsvRow {
                    variant: row.variant.label().to_owned(),
                    median_ns: row.median_ns,
                    mean_ns: row.mean_ns,
                    stddev_ns: row.stddev_ns,
                    batch: r.config.batch_size,
                    rounds: r.config.measured_rounds,
                    n: r.config.n.get(),
                    seed: r.config.seed,
                    machine: r.machine.clone(),
                })?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
        }
        Format::Json => Ok(serde_json::to_string_pretty(r)? + "\n"),
    }
}

/// Reads the CSV form back.
pub fn parse_csv(text: &str) -> Result<BenchSummary> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut summary: Option<BenchSummary> = None;
    for rec in rdr.deserialize::<CsvRow>() {
        let rec = rec?;
        let variant = Variant::from_label(&rec.variant)
            .ok_or_else(|| Error::Config(format!("unknown variant {:?}", rec.variant)))?;
        let stats = VariantStats {
            variant,
            median_ns: rec.median_ns,
            mean_ns: rec.mean_ns,
            stddev_ns: rec.stddev_ns,
        };
        match &mut summary {
            Some(s) => {
                if (s.batch, s.rounds, s.n, s.seed, &s.machine)
                    != (rec.batch, rec.rounds, rec.n, rec.seed, &rec.machine)
                {
                    return Err(Error::Config("inconsistent run fields across rows".into()));
                }
                s.rows.push(stats);
            }
            None => {
                summary = Some(BenchSummary {
                    rows: vec![stats],
                    batch: rec.batch,
                    rounds: rec.rounds,
                    n: rec.n,
                    seed: rec.seed,
                    machine: rec.machine,
                })
            }
        }
    }
    summary.ok_or_else(|| Error::Config("empty benchmark csv".into()))
}
