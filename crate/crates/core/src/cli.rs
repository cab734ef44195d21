//! Command-line front end. `render` produces the full output of one
//! invocation so it can be tested without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{self, BenchConfig, Format};
use crate::curves::{build_h_tables, CurveId, Granularity, Mode};
use crate::error::{Error, Result};
use crate::geocode::{cell_bounds, decode_hash, encode_hash_with, GeoPoint, Geohash, DEFAULT_GRANULARITY};
use crate::metrics::{
    cluster_report, run_comparison, ClusterReport, ExperimentConfig, QueryClass, TallyRow,
    DEFAULT_SEED,
};

pub const SEED_ENV: &str = "SFC_GEOHASH_SEED";

#[derive(Debug, Parser)]
#[command(name = "sfcgeo", version, about = "Space-filling-curve geohashes and locality metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format> {
    s.parse()
}

fn parse_n(s: &str) -> Result<Granularity> {
    let n: u32 = s
        .parse()
        .map_err(|_| Error::Usage(format!("granularity must be an integer, got {s:?}")))?;
    Granularity::new(n)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hash a coordinate.
    #[command(allow_negative_numbers = true)]
    Encode {
        #[arg(long)]
        lat: f64,
        #[arg(long)]
        lon: f64,
        #[arg(long, default_value = "h")]
        curve: CurveId,
        #[arg(long, default_value_t = default_n(), value_parser = parse_n)]
        n: Granularity,
        #[arg(long, default_value = "plain")]
        mode: Mode,
    },
    /// Cell center and bounds of a hash.
    Decode {
        hash: String,
        #[arg(long, default_value = "h")]
        curve: CurveId,
        #[arg(long, default_value_t = default_n(), value_parser = parse_n)]
        n: Granularity,
    },
    /// Edit-distance comparison of curve hashes on nearby point pairs.
    Compare(CompareArgs),
    /// Exact average cluster counts.
    Clusters {
        #[arg(long, value_enum, default_value_t = ClassArg::Windows)]
        class: ClassArg,
        /// Window side for `--class windows`.
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// A curve name or `all`.
        #[arg(long, default_value = "all")]
        curve: String,
        #[arg(long, default_value = "3", value_parser = parse_n)]
        n: Granularity,
    },
    /// Time geohash computation per curve.
    Bench(BenchArgs),
}

fn default_n() -> Granularity {
    Granularity::new(DEFAULT_GRANULARITY).expect("default granularity is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Rects,
    Windows,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, visible_alias = "points-per-iteration", default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = default_n(), value_parser = parse_n)]
    pub n: Granularity,
    /// Maximum per-axis partner offset in degrees.
    #[arg(long, visible_alias = "neighbor-offset-degrees", default_value_t = 0.001)]
    pub offset: f64,
    /// Add the Gray-coded Z curve as a fourth competitor.
    #[arg(long)]
    pub include_gray_z: bool,
    /// Worker threads; all cores when omitted. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, visible_alias = "measured-rounds", default_value_t = 15)]
    pub rounds: usize,
    #[arg(long, visible_alias = "warmup-rounds", default_value_t = 3)]
    pub warmup: usize,
    #[arg(long, visible_alias = "batch-size", default_value_t = 100_000)]
    pub batch: usize,
    #[arg(long, default_value_t = default_n(), value_parser = parse_n)]
    pub n: Granularity,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl CompareArgs {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            points_per_iteration: self.points,
            iterations: self.iterations,
            seed: self.seed,
            n: self.n,
            neighbor_offset_degrees: self.offset,
            include_gray_z: self.include_gray_z,
        }
    }
}

#[derive(Serialize)]
struct EncodeRecord {
    lat: f64,
    lon: f64,
    curve: CurveId,
    n: u32,
    hash: String,
}

#[derive(Serialize)]
struct DecodeRecord {
    hash: String,
    curve: CurveId,
    n: u32,
    lat: f32,
    lon: f32,
    lat_min: f64,
    lat_max: f64,
    lon_min: f64,
    lon_max: f64,
}

#[derive(Serialize)]
struct CompareRecord {
    config: ExperimentConfig,
    rows: Vec<TallyRow>,
    ties: u64,
    total: u64,
    hilbert_vs_z: f64,
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Runs one parsed invocation and returns what it prints.
pub fn render(cli: &Cli) -> Result<String> {
    let format = cli.format;
    match &cli.command {
        &Command::Encode { lat, lon, curve, n, mode } => {
            let g = GeoPoint::new(lat, lon)?;
            let tables = match mode {
                Mode::Cached => Some(build_h_tables(n)?),
                Mode::Plain => None,
            };
            let h = encode_hash_with(g, curve, n, mode, tables.as_ref())?;
            let rec = EncodeRecord { lat, lon, curve, n: n.get(), hash: h.as_str().to_owned() };
            match format {
                Format::Text => Ok(format!(
                    "{} lat {} lon {} curve {} n {}\n",
                    rec.hash, rec.lat, rec.lon, rec.curve, rec.n
                )),
                Format::Csv => csv_rows([rec]),
                Format::Json => json(&rec),
            }
        }
        Command::Decode { hash, curve, n } => {
            let h = Geohash::parse(hash, *curve, *n)?;
            let center = decode_hash(&h);
            let b = cell_bounds(h.cell(), *n)?;
            let rec = DecodeRecord {
                hash: h.as_str().to_owned(),
                curve: *curve,
                n: n.get(),
                lat: center.lat(),
                lon: center.lon(),
                lat_min: b.lat_min,
                lat_max: b.lat_max,
                lon_min: b.lon_min,
                lon_max: b.lon_max,
            };
            match format {
                Format::Text => Ok(format!(
                    "lat {} lon {}\nbounds lat [{}, {}] lon [{}, {}]\n",
                    rec.lat, rec.lon, rec.lat_min, rec.lat_max, rec.lon_min, rec.lon_max
                )),
                Format::Csv => csv_rows([rec]),
                Format::Json => json(&rec),
            }
        }
        Command::Compare(args) => {
            let cfg = args.config();
            let cmp = run_comparison(&cfg, args.threads)?;
            let t = &cmp.tally;
            let hz = cmp.pairwise_share(CurveId::Hilbert, CurveId::Z)?;
            match format {
                Format::Text => {
                    let mut out = String::new();
                    let _ = writeln!(out, "{:<8} {:>8} {:>6}", "curve", "wins", "share");
                    for r in t.rows() {
                        let _ = writeln!(out, "{:<8} {:>8} {:>6.2}", r.curve, r.wins, r.share);
                    }
                    let _ = writeln!(
                        out,
                        "ties: {} of {} comparisons ({:.2})",
                        t.ties,
                        t.total_comparisons,
                        t.tie_fraction()
                    );
                    let _ = writeln!(
                        out,
                        "hilbert vs z: {:.2} of {} decided comparisons",
                        hz,
                        cmp.decided(CurveId::Hilbert, CurveId::Z)
                    );
                    Ok(out)
                }
                Format::Csv => csv_rows(t.rows()),
                Format::Json => json(&CompareRecord {
                    config: cfg,
                    rows: t.rows(),
                    ties: t.ties,
                    total: t.total_comparisons,
                    hilbert_vs_z: hz,
                }),
            }
        }
        Command::Clusters { class, k, curve, n } => {
            let class = match class {
                ClassArg::Rects => QueryClass::Rects,
                ClassArg::Windows => QueryClass::Windows { k: *k },
            };
            let curves = if curve.eq_ignore_ascii_case("all") {
                CurveId::ALL.to_vec()
            } else {
                vec![curve.parse()?]
            };
            let report: ClusterReport = cluster_report(class, &curves, *n)?;
            match format {
                Format::Text => {
                    let mut out = String::new();
                    for r in &report.rows {
                        let _ = writeln!(out, "{} n={} {:<8} {:.6}", r.class, r.n, r.curve, r.avg_clusters);
                    }
                    Ok(out)
                }
                Format::Csv => csv_rows(&report.rows),
                Format::Json => json(&report),
            }
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                warmup_rounds: args.warmup,
                measured_rounds: args.rounds,
                batch_size: args.batch,
                n: args.n,
                seed: args.seed,
            };
            let report = bench::run_bench(&cfg)?;
            bench::emit_table(&report, format)
        }
    }
}

/// Renders and writes to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let text = render(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
