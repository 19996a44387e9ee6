//! Subcommand implementations. Exit-code contract: 0 success, 1 usage error,
//! 2 data error.

use crate::args::{AnalyzeArgs, BuildArgs, CompareArgs, GridDims, SynthArgs};
use covis::analysis::{
    chebyshev_report, degree_ccdf, degree_heatmap, hyperedge_size_histogram, poi_degree_fit,
    write_size_histogram_csv, PoiTable,
};
use covis::fitting::{fit_degree_distribution, FitResult, PowerLawFit};
use covis::hypergraph::Hypergraph;
use covis::ingest::stream_visit_log;
use covis::mining::{fp_growth, maximal_filter, MiningParams};
use covis::phase::{compare_phases, PhaseSpec};
use covis::synth::{generate, write_trajectory_csv, SynthSpec};
use covis::window::{build_transactions, WindowSpec};
use covis::{GridSpec, MinSup};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

/// Errors with their exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an inconsistent configuration (exit 1).
    Usage(String),
    /// Unreadable, malformed, or insufficient data (exit 2).
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<covis::Error> for CliError {
    fn from(e: covis::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Edge-size floor used for Chebyshev spans and co-degree graphs: pairs are
/// not higher-order, so 3 is the smallest interesting size.
const HIGHER_ORDER_MIN_EDGE_SIZE: usize = 3;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("cannot open `{}`: {e}", path.display())))
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create `{}`: {e}", dir.display())))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| CliError::Data(format!("cannot create `{}`: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush())
        .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))
}

fn grid_spec(dims: GridDims, scale: u32) -> Result<GridSpec> {
    GridSpec::new(dims.width, dims.height, scale).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct BuildConfig {
    input: String,
    grid: String,
    scale: u32,
    delta_t: Vec<u32>,
    min_sup: Vec<MinSup>,
    min_size: usize,
    days: [u32; 2],
    maximal: bool,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    config: BuildConfig,
    /// SHA-256 over the canonical JSON of `config`.
    config_hash: String,
    m_per_delta_t: BTreeMap<u32, usize>,
    wall_time_secs: f64,
    outputs: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cmd_build(args: &BuildArgs) -> Result<()> {
    let start = Instant::now();
    if args.delta_t.is_empty() || args.min_sup.is_empty() {
        return Err(usage("need at least one --delta-t and one --min-sup"));
    }
    if args.min_size == 0 {
        return Err(usage("--min-size must be >= 1"));
    }
    let grid = grid_spec(args.grid, args.scale)?;
    let log = stream_visit_log(
        open_input(&args.input)?,
        &grid,
        args.days.map(|r| r.lo..r.hi),
    )?;
    let day_range = log.day_range();
    create_out_dir(&args.out)?;

    let mut m_per_delta_t = BTreeMap::new();
    let mut outputs = Vec::new();
    for &dt in &args.delta_t {
        let dataset = build_transactions(&log, WindowSpec::new(dt)?)?;
        if dataset.is_empty() {
            return Err(CliError::Data(format!(
                "no transactions for delta_t={dt} over days {}..{}",
                day_range.start, day_range.end
            )));
        }
        m_per_delta_t.insert(dt, dataset.len());
        for &ms in &args.min_sup {
            if ms.threshold(dataset.len()) == 1 {
                eprintln!(
                    "warning: min_sup {ms} over {} transactions gives an absolute \
                     threshold of 1; every observed itemset is frequent and the \
                     output enumerates the full subset lattice",
                    dataset.len()
                );
            }
            let params = MiningParams::new(ms, args.min_size)?;
            let mut patterns = fp_growth(&dataset, &params)?;
            if args.maximal {
                patterns = maximal_filter(&patterns);
            }
            let hg = Hypergraph::from_patterns(&patterns, &grid)?;
            let name = format!("hg_dt{dt}_ms{ms}.hg");
            write_file(&args.out.join(&name), |w| hg.write(w))?;
            println!(
                "{}: {} edges (M={}, threshold={})",
                name,
                hg.num_edges(),
                dataset.len(),
                ms.threshold(dataset.len())
            );
            outputs.push(name);
        }
    }

    let config = BuildConfig {
        input: args.input.display().to_string(),
        grid: format!("{}x{}", args.grid.width, args.grid.height),
        scale: args.scale,
        delta_t: args.delta_t.clone(),
        min_sup: args.min_sup.clone(),
        min_size: args.min_size,
        days: [day_range.start, day_range.end],
        maximal: args.maximal,
    };
    let config_json = serde_json::to_string(&config).expect("config serializes");
    let manifest = RunManifest {
        tool: "covis",
        version: env!("CARGO_PKG_VERSION"),
        config,
        config_hash: sha256_hex(config_json.as_bytes()),
        m_per_delta_t,
        wall_time_secs: start.elapsed().as_secs_f64(),
        outputs,
    };
    write_file(&args.out.join("run_manifest.json"), |w| {
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&manifest).expect("manifest serializes")
        )
    })?;
    Ok(())
}

/// Degree-distribution fit as written to fits.json; `unavailable` covers
/// degenerate inputs (too few or all-equal positive degrees).
#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum FitFile {
    Ok {
        #[serde(flatten)]
        fit: FitResult,
    },
    Unavailable {
        reason: String,
    },
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum PoiFitFile {
    Ok {
        #[serde(flatten)]
        fit: PowerLawFit,
    },
    Unavailable {
        reason: String,
    },
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    if let Some(k) = args.k_uniform {
        if k == 0 {
            return Err(usage("--k-uniform must be >= 1"));
        }
    }
    let poi = match &args.poi {
        Some(path) => {
            let spec = grid_spec(args.grid, args.scale)?;
            Some((PoiTable::from_csv(open_input(path)?, &spec)?, spec))
        }
        None => None,
    };
    create_out_dir(&args.out)?;

    for file in &args.files {
        let mut hg = Hypergraph::read(open_input(file)?)
            .map_err(|e| CliError::Data(format!("`{}`: {e}", file.display())))?;
        if let Some(k) = args.k_uniform {
            hg = hg.k_uniform_sub(k);
        }
        let stem = file
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| usage(format!("`{}`: cannot derive a name", file.display())))?;
        let dir = args.out.join(stem);
        create_out_dir(&dir)?;

        write_file(&dir.join("ccdf.csv"), |w| {
            if hg.num_nodes() == 0 {
                writeln!(w, "k,p")
            } else {
                degree_ccdf(&hg).write_csv(w)
            }
        })?;
        write_file(&dir.join("sizes.csv"), |w| {
            write_size_histogram_csv(&hyperedge_size_histogram(&hg), w)
        })?;
        write_file(&dir.join("heatmap.csv"), |w| degree_heatmap(&hg).write_csv(w))?;
        write_file(&dir.join("chebyshev.json"), |w| {
            writeln!(
                w,
                "{}",
                json_line(&chebyshev_report(&hg, HIGHER_ORDER_MIN_EDGE_SIZE))
            )
        })?;

        let degrees: Vec<u64> = hg.degrees().map(|(_, d)| d).collect();
        let fit_file = match fit_degree_distribution(&degrees) {
            Ok(fit) => FitFile::Ok { fit },
            Err(e) => FitFile::Unavailable {
                reason: e.to_string(),
            },
        };
        write_file(&dir.join("fits.json"), |w| writeln!(w, "{}", json_line(&fit_file)))?;

        if let Some((poi_table, poi_spec)) = &poi {
            let agg = poi_spec.aggregated();
            if agg != hg.grid() {
                return Err(CliError::Data(format!(
                    "`{}`: POI grid {}x{} does not match hypergraph grid {}x{}",
                    file.display(),
                    agg.width(),
                    agg.height(),
                    hg.grid().width(),
                    hg.grid().height()
                )));
            }
            let poi_fit = match poi_degree_fit(poi_table, &hg) {
                Ok(fit) => PoiFitFile::Ok { fit },
                Err(e) => PoiFitFile::Unavailable {
                    reason: e.to_string(),
                },
            };
            write_file(&dir.join("poi_fit.json"), |w| {
                writeln!(w, "{}", json_line(&poi_fit))
            })?;
        }
        println!("{stem}: analysis written to {}", dir.display());
    }
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    if args.phases.len() != 2 {
        return Err(usage(format!(
            "need exactly two --phase arguments, got {}",
            args.phases.len()
        )));
    }
    if args.delta_t.is_empty() || args.min_sup.is_empty() {
        return Err(usage("need at least one --delta-t and one --min-sup"));
    }
    let a = &args.phases[0];
    let b = &args.phases[1];
    if a.days.lo < b.days.hi && b.days.lo < a.days.hi {
        return Err(usage(format!(
            "phases `{}` and `{}` overlap",
            a.label, b.label
        )));
    }
    let max_dt = *args.delta_t.iter().max().expect("non-empty");
    for p in &args.phases {
        if p.days.hi - p.days.lo < max_dt {
            return Err(usage(format!(
                "phase `{}` spans {} days, shorter than delta_t={max_dt}",
                p.label,
                p.days.hi - p.days.lo
            )));
        }
    }

    let grid = grid_spec(args.grid, args.scale)?;
    let day_lo = a.days.lo.min(b.days.lo);
    let day_hi = a.days.hi.max(b.days.hi);
    let log = stream_visit_log(open_input(&args.input)?, &grid, Some(day_lo..day_hi))?;

    let phases = [
        PhaseSpec::new(a.label.clone(), a.days.lo..a.days.hi),
        PhaseSpec::new(b.label.clone(), b.days.lo..b.days.hi),
    ];
    let report = compare_phases(
        &log,
        &phases,
        &args.delta_t,
        &args.min_sup,
        args.min_size,
        HIGHER_ORDER_MIN_EDGE_SIZE,
    )?;
    create_out_dir(&args.out)?;
    let path = args.out.join("comparison.json");
    write_file(&path, |w| writeln!(w, "{}", report.to_json()))?;
    println!("comparison written to {}", path.display());
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let reader = open_input(&args.spec)?;
    let mut de = serde_json::Deserializer::from_reader(reader);
    let mut spec: SynthSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Data(format!(
            "invalid spec `{}` at `{}`: {}",
            args.spec.display(),
            e.path(),
            e.inner()
        ))
    })?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let output = generate(&spec)?;
    create_out_dir(&args.out)?;
    write_file(&args.out.join("trajectories.csv"), |w| {
        write_trajectory_csv(&output.log, w)
    })?;
    write_file(&args.out.join("manifest.json"), |w| {
        writeln!(w, "{}", json_line(&output.manifest))
    })?;
    println!(
        "seed {}: {} individuals over {} days written to {}",
        spec.seed,
        spec.individuals,
        spec.days,
        args.out.display()
    );
    Ok(())
}

/// Routing plus the global thread-pool setup.
pub fn run(cli: crate::args::Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    match &cli.command {
        crate::args::Command::Build(args) => cmd_build(args),
        crate::args::Command::Analyze(args) => cmd_analyze(args),
        crate::args::Command::Compare(args) => cmd_compare(args),
        crate::args::Command::Synth(args) => cmd_synth(args),
    }
}
