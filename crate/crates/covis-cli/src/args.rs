//! Command-line surface: subcommands and flag parsing.

use clap::{Args, Parser, Subcommand};
use covis::MinSup;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "covis",
    version,
    about = "Co-visitation hypergraphs from mobility trajectories"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results are
    /// identical for any thread count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build hypergraph files from a trajectory CSV over the parameter grid.
    Build(BuildArgs),
    /// Analyze hypergraph files: CCDF, size histogram, heatmap, spans, fits.
    Analyze(AnalyzeArgs),
    /// Build and diff hypergraphs for two labeled day ranges.
    Compare(CompareArgs),
    /// Generate synthetic trajectories from a JSON spec.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy)]
pub struct GridDims {
    pub width: u32,
    pub height: u32,
}

fn parse_grid_dims(s: &str) -> Result<GridDims, String> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| format!("`{s}` is not WxH (e.g. 200x200)"))?;
    let width: u32 = w.parse().map_err(|_| format!("bad grid width `{w}`"))?;
    let height: u32 = h.parse().map_err(|_| format!("bad grid height `{h}`"))?;
    if width == 0 || height == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok(GridDims { width, height })
}

#[derive(Debug, Clone, Copy)]
pub struct DayRange {
    pub lo: u32,
    pub hi: u32,
}

fn parse_day_range(s: &str) -> Result<DayRange, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("`{s}` is not LO..HI (e.g. 0..75)"))?;
    let lo: u32 = lo.parse().map_err(|_| format!("bad day `{lo}`"))?;
    let hi: u32 = hi.parse().map_err(|_| format!("bad day `{hi}`"))?;
    if lo >= hi {
        return Err(format!("empty day range {lo}..{hi}"));
    }
    Ok(DayRange { lo, hi })
}

#[derive(Debug, Clone)]
pub struct PhaseArg {
    pub label: String,
    pub days: DayRange,
}

fn parse_phase(s: &str) -> Result<PhaseArg, String> {
    let (label, range) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not LABEL=LO..HI (e.g. regular=0..60)"))?;
    if label.is_empty() {
        return Err("phase label must be non-empty".into());
    }
    Ok(PhaseArg {
        label: label.to_string(),
        days: parse_day_range(range)?,
    })
}

fn parse_min_sup(s: &str) -> Result<MinSup, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Trajectory CSV with header `uid,d,t,x,y`.
    #[arg(long)]
    pub input: PathBuf,

    /// Raw grid dimensions as WxH.
    #[arg(long, default_value = "200x200", value_parser = parse_grid_dims)]
    pub grid: GridDims,

    /// Spatial scaling factor (1 keeps the raw grid).
    #[arg(long, default_value_t = 10)]
    pub scale: u32,

    /// Observation window lengths in days, comma-separated.
    #[arg(long = "delta-t", default_value = "1,3,7", value_delimiter = ',')]
    pub delta_t: Vec<u32>,

    /// Minimum support thresholds, comma-separated decimals.
    #[arg(long = "min-sup", default_value = "0.005,0.01,0.015", value_delimiter = ',', value_parser = parse_min_sup)]
    pub min_sup: Vec<MinSup>,

    /// Minimum itemset size for a hyperedge.
    #[arg(long = "min-size", default_value_t = 2)]
    pub min_size: usize,

    /// Day range LO..HI; default: the full range observed in the input.
    #[arg(long, value_parser = parse_day_range)]
    pub days: Option<DayRange>,

    /// Keep only maximal frequent itemsets.
    #[arg(long)]
    pub maximal: bool,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Hypergraph files produced by `build`.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,

    /// Output directory (one subdirectory per input file).
    #[arg(long)]
    pub out: PathBuf,

    /// Restrict analysis to hyperedges of size exactly K.
    #[arg(long = "k-uniform")]
    pub k_uniform: Option<usize>,

    /// POI table CSV (`x,y,category,count` on the raw grid).
    #[arg(long)]
    pub poi: Option<PathBuf>,

    /// Raw grid dimensions for POI aggregation.
    #[arg(long, default_value = "200x200", value_parser = parse_grid_dims)]
    pub grid: GridDims,

    /// Spatial scaling factor for POI aggregation.
    #[arg(long, default_value_t = 10)]
    pub scale: u32,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Trajectory CSV with header `uid,d,t,x,y`.
    #[arg(long)]
    pub input: PathBuf,

    /// Raw grid dimensions as WxH.
    #[arg(long, default_value = "200x200", value_parser = parse_grid_dims)]
    pub grid: GridDims,

    /// Spatial scaling factor.
    #[arg(long, default_value_t = 10)]
    pub scale: u32,

    /// Observation window lengths in days, comma-separated.
    #[arg(long = "delta-t", default_value = "1,3,7", value_delimiter = ',')]
    pub delta_t: Vec<u32>,

    /// Minimum support thresholds, comma-separated decimals.
    #[arg(long = "min-sup", default_value = "0.005,0.01,0.015", value_delimiter = ',', value_parser = parse_min_sup)]
    pub min_sup: Vec<MinSup>,

    /// Minimum itemset size for a hyperedge.
    #[arg(long = "min-size", default_value_t = 2)]
    pub min_size: usize,

    /// Phase as LABEL=LO..HI; give exactly two, non-overlapping.
    #[arg(long = "phase", value_parser = parse_phase)]
    pub phases: Vec<PhaseArg>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,

    /// Override the spec's RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}
