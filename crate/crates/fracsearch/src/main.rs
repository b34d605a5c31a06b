//! Command-line front end: lattice dumps, quantum search runs, classical
//! walks, series analysis, and the end-to-end scaling pipeline.

use clap::{Args, Parser, Subcommand};
use fracsearch::analysis::{
    check_hypothesis, estimate_period, inverse_spectral_comparison, mean_peak_probability,
    power_law_fit, spectral_dimension_from_fit, DimensionSet, Windowing,
};
use fracsearch::classical::{self, MoveRule};
use fracsearch::lattice::{self, CarpetLattice, CellCoord, Stage};
use fracsearch::manifest::{manifest_path_for, RunManifest};
use fracsearch::notation::parse_last_digit;
use fracsearch::series::{parse_points_csv, SeriesError, TimeSeries};
use fracsearch::walk::{self, SearchConfig, WalkError};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

const EXIT_DOMAIN: i32 = 2;
const EXIT_NUMERIC: i32 = 3;
const EXIT_RESOURCE: i32 = 4;

/// Simulations beyond this working-set size are refused before allocation.
const MEM_LIMIT_BYTES: u64 = 16 << 30;

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn domain(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn resource(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RESOURCE,
            message: message.into(),
        }
    }
}

impl From<lattice::LatticeError> for CliError {
    fn from(e: lattice::LatticeError) -> Self {
        CliError::domain(e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        let code = match e {
            WalkError::NormDrift { .. } => EXIT_NUMERIC,
            WalkError::NoSteps => EXIT_DOMAIN,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::domain(format!("io error: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "fracsearch", version, about = "Quantum spatial search on Sierpinski carpets")]
struct Cli {
    /// Worker threads (default: FRACSEARCH_THREADS or hardware parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a carpet lattice and emit its summary
    Lattice(LatticeArgs),
    /// Run the quantum spatial search and record the marked-vertex probability
    Search(SearchArgs),
    /// Run the classical random walk and record the return probability
    Classical(ClassicalArgs),
    /// Extract the dominant oscillation period from a series CSV
    Period(PeriodArgs),
    /// Fit a power law to two-column CSV data
    Fit(FitArgs),
    /// Evaluate the oracle-call scaling hypothesis
    Hypothesis(HypothesisArgs),
    /// Full reproduction pipeline: searches, fits, classical walk, hypothesis
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    stage: u32,
    /// Marked cell as `i,j` (default 0,0)
    #[arg(long)]
    marked: Option<String>,
    /// Summary JSON path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump the full adjacency table as CSV to this path
    #[arg(long)]
    adjacency: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    stage: u32,
    /// Step count, or `auto` for ~16 expected periods rounded to a power of two
    #[arg(long, default_value = "auto")]
    steps: String,
    #[arg(long)]
    marked: Option<String>,
    /// Recording stride for the probability series
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// Output CSV path (`t,P`); a manifest is written next to it
    #[arg(long)]
    out: PathBuf,
    /// Capture the spatial distribution at this step
    #[arg(long)]
    snapshot_step: Option<u64>,
    /// Snapshot CSV path (`i,j,P`); defaults to `<out>.snapshot.csv`
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ClassicalArgs {
    #[arg(long)]
    stage: u32,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value = "exact")]
    method: String,
    #[arg(long, default_value_t = 1_000_000)]
    walkers: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Move rule: `stay` (uniform over 4 directions) or `neighbor`
    #[arg(long, default_value = "stay")]
    rule: String,
    /// Start cell as `i,j` (default 0,0)
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PeriodArgs {
    /// Input `t,P` CSV
    #[arg(long)]
    input: PathBuf,
    /// Apply a Hann window before the FFT
    #[arg(long)]
    hann: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FitArgs {
    /// Input two-column CSV (x,y)
    #[arg(long)]
    input: PathBuf,
    /// Restrict the fit to x in `min:max`
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct HypothesisArgs {
    /// Measured Q-scaling exponent; accepts last-digit notation like 0.5647(6)
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    berr: Option<f64>,
    /// Measured peak-probability exponent (P ~ N^-a)
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    aerr: Option<f64>,
    /// Spectral dimension; defaults to the gasket closed form for the given dE
    #[arg(long)]
    ds: Option<String>,
    #[arg(long)]
    dserr: Option<f64>,
    #[arg(long = "dE", default_value_t = 2)]
    d_e: u32,
    /// Self-similar piece count M (8 for the carpet)
    #[arg(long = "M", default_value_t = 8)]
    pieces: u64,
    /// Scale factor s (3 for the carpet)
    #[arg(long, default_value_t = 3)]
    s: u32,
    /// Fractal dimension override (default: ln M / ln s)
    #[arg(long)]
    df: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct PipelineArgs {
    /// Stage list: `1:5` or `1,2,3`
    #[arg(long, default_value = "1:5")]
    stages: String,
    /// Step policy: `auto` or an explicit count applied to every stage
    #[arg(long, default_value = "auto")]
    steps: String,
    /// Marked vertex per stage: `interior` (next to the central hole),
    /// `corner`, or explicit `i,j`
    #[arg(long, default_value = "interior")]
    marked: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 6)]
    classical_stage: u32,
    #[arg(long, default_value_t = 10_000)]
    classical_steps: u64,
    /// Classical-fit window as `tmin:tmax` (default 100 : steps/2)
    #[arg(long)]
    window: Option<String>,
    #[arg(long, default_value = "exact")]
    method: String,
    #[arg(long, default_value_t = 1_000_000)]
    walkers: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    force: bool,
}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("FRACSEARCH_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match cli.command {
        Command::Lattice(args) => cmd_lattice(args),
        Command::Search(args) => cmd_search(args),
        Command::Classical(args) => cmd_classical(args),
        Command::Period(args) => cmd_period(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Hypothesis(args) => cmd_hypothesis(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

fn parse_coord(text: &str) -> Result<CellCoord, CliError> {
    let (i, j) = text
        .split_once(',')
        .ok_or_else(|| CliError::domain(format!("expected `i,j`, got `{text}`")))?;
    let i = i
        .trim()
        .parse()
        .map_err(|_| CliError::domain(format!("bad coordinate `{text}`")))?;
    let j = j
        .trim()
        .parse()
        .map_err(|_| CliError::domain(format!("bad coordinate `{text}`")))?;
    Ok(CellCoord::new(i, j))
}

fn parse_window(text: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::domain(format!("expected `min:max`, got `{text}`")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| CliError::domain(format!("bad window `{text}`")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| CliError::domain(format!("bad window `{text}`")))?;
    if !(hi > lo) {
        return Err(CliError::domain(format!("empty window `{text}`")));
    }
    Ok((lo, hi))
}

fn parse_rule(text: &str) -> Result<MoveRule, CliError> {
    match text {
        "stay" => Ok(MoveRule::Stay),
        "neighbor" => Ok(MoveRule::Neighbor),
        other => Err(CliError::domain(format!(
            "unknown rule `{other}` (expected stay or neighbor)"
        ))),
    }
}

/// Value with optional uncertainty from a flag pair like `--b 0.5647(6)` /
/// `--berr 0.0006`; the explicit err flag wins.
fn parse_measured(value: &str, err: Option<f64>, flag: &str) -> Result<(f64, f64), CliError> {
    let (v, e) = parse_last_digit(value)
        .ok_or_else(|| CliError::domain(format!("bad value for --{flag}: `{value}`")))?;
    Ok((v, err.unwrap_or(e)))
}

fn guard_output(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::domain(format!(
            "refusing to overwrite {} (pass --force)",
            path.display()
        )));
    }
    Ok(())
}

fn check_memory(bytes: u64, what: &str) -> Result<(), CliError> {
    if bytes > MEM_LIMIT_BYTES {
        return Err(CliError::resource(format!(
            "{what} needs {bytes} bytes, above the {MEM_LIMIT_BYTES}-byte guard"
        )));
    }
    Ok(())
}

fn build_lattice(stage_level: u32, marked: Option<&str>) -> Result<CarpetLattice, CliError> {
    let stage = Stage::new(stage_level)?;
    let marked = marked.map(parse_coord).transpose()?;
    Ok(CarpetLattice::build(stage, marked)?)
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>, force: bool) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => {
            guard_output(path, force)?;
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_lattice(args: LatticeArgs) -> Result<(), CliError> {
    let stage = Stage::new(args.stage)?;
    check_memory(lattice::lattice_bytes(stage), "lattice construction")?;
    let lat = build_lattice(args.stage, args.marked.as_deref())?;
    let hist = lat.degree_histogram();
    let summary = json!({
        "stage": args.stage,
        "side": lat.side(),
        "vertex_count": lat.vertex_count(),
        "marked": { "i": lat.marked_coord().i, "j": lat.marked_coord().j },
        "degree_histogram": hist,
    });
    emit_json(&summary, args.out.as_deref(), args.force)?;
    if let Some(adj_path) = args.adjacency {
        guard_output(&adj_path, args.force)?;
        let mut csv = String::from("vertex,+x,-x,+y,-y\n");
        for v in 0..lat.vertex_count() {
            let n = lat.neighbors_of(v);
            csv.push_str(&format!("{v},{},{},{},{}\n", n[0], n[1], n[2], n[3]));
        }
        std::fs::write(&adj_path, csv)?;
    }
    Ok(())
}

/// Auto step budget: ~16 expected periods of the paper's Q fit, rounded up to
/// a power of two, at least 64.
fn auto_steps(vertex_count: u64) -> u64 {
    let q = 3.79 * (vertex_count as f64).powf(0.5647);
    let raw = (16.0 * q).ceil() as u64;
    raw.max(64).next_power_of_two()
}

fn parse_steps(text: &str, vertex_count: u64) -> Result<u64, CliError> {
    if text == "auto" {
        Ok(auto_steps(vertex_count))
    } else {
        text.parse()
            .map_err(|_| CliError::domain(format!("bad --steps `{text}`")))
    }
}

fn cmd_search(args: SearchArgs) -> Result<(), CliError> {
    let stage = Stage::new(args.stage)?;
    check_memory(
        walk::state_bytes(stage.vertex_count()) + lattice::lattice_bytes(stage),
        "quantum search",
    )?;
    guard_output(&args.out, args.force)?;
    let lat = build_lattice(args.stage, args.marked.as_deref())?;
    let steps = parse_steps(&args.steps, lat.vertex_count() as u64)?;
    eprintln!(
        "search: stage {} (N = {}), {} steps",
        args.stage,
        lat.vertex_count(),
        steps
    );
    let config = SearchConfig {
        steps,
        record_stride: args.stride,
        snapshot_step: args.snapshot_step,
    };
    let started = Instant::now();
    let run = walk::evolve(&lat, &config)?;
    let wall = started.elapsed().as_secs_f64();
    eprintln!("search: done in {wall:.2} s, final |psi|^2 = {}", run.final_norm_sq);

    run.series.write_csv(&args.out)?;
    let mut manifest = RunManifest::new(
        "search",
        json!({
            "stage": args.stage,
            "vertex_count": run.vertex_count,
            "marked": { "i": run.marked.i, "j": run.marked.j },
            "steps": steps,
            "record_stride": args.stride,
            "snapshot_step": args.snapshot_step,
            "final_norm_sq": run.final_norm_sq,
        }),
        wall,
    );
    manifest.add_output(&args.out)?;
    if let Some(dist) = &run.snapshot {
        let snap_path = args
            .snapshot_out
            .unwrap_or_else(|| args.out.with_extension("snapshot.csv"));
        guard_output(&snap_path, args.force)?;
        let mut csv = String::from("i,j,P\n");
        for (v, p) in dist.iter().enumerate() {
            let c = lat.coord_of(v);
            csv.push_str(&format!("{},{},{:.16e}\n", c.i, c.j, p));
        }
        std::fs::write(&snap_path, csv)?;
        manifest.add_output(&snap_path)?;
    }
    manifest.write(&manifest_path_for(&args.out))?;
    Ok(())
}

fn cmd_classical(args: ClassicalArgs) -> Result<(), CliError> {
    let stage = Stage::new(args.stage)?;
    let rule = parse_rule(&args.rule)?;
    if args.method == "exact" {
        check_memory(
            classical::distribution_bytes(stage.vertex_count()) + lattice::lattice_bytes(stage),
            "exact classical propagation",
        )?;
    } else {
        check_memory(lattice::lattice_bytes(stage), "classical walk")?;
    }
    guard_output(&args.out, args.force)?;
    let lat = build_lattice(args.stage, None)?;
    let start = match &args.start {
        Some(text) => {
            let coord = parse_coord(text)?;
            lat.index_of(coord)
                .ok_or_else(|| CliError::domain(format!("start cell {text} is not in the carpet")))?
        }
        None => lat.marked(),
    };
    let started = Instant::now();
    let series = match args.method.as_str() {
        "exact" => classical::return_series_exact(&lat, start, args.steps, rule),
        "mc" => classical::return_series_mc(&lat, start, args.steps, args.walkers, args.seed, rule),
        other => {
            return Err(CliError::domain(format!(
                "unknown method `{other}` (expected exact or mc)"
            )))
        }
    }
    .map_err(|e| CliError::domain(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();

    series.write_csv(&args.out)?;
    let mut manifest = RunManifest::new(
        "classical",
        json!({
            "stage": args.stage,
            "method": args.method,
            "steps": args.steps,
            "walkers": if args.method == "mc" { Some(args.walkers) } else { None },
            "seed": if args.method == "mc" { Some(args.seed) } else { None },
            "rule": rule,
            "start": { "i": lat.coord_of(start).i, "j": lat.coord_of(start).j },
        }),
        wall,
    );
    manifest.add_output(&args.out)?;
    manifest.write(&manifest_path_for(&args.out))?;
    Ok(())
}

fn cmd_period(args: PeriodArgs) -> Result<(), CliError> {
    let series = TimeSeries::read_csv(&args.input)?;
    let windowing = if args.hann {
        Windowing::Hann
    } else {
        Windowing::None
    };
    let estimate =
        estimate_period(&series, windowing).map_err(|e| CliError::domain(e.to_string()))?;
    let report = serde_json::to_value(&estimate).expect("serializes");
    emit_json(&report, args.out.as_deref(), args.force)
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)?;
    let points = parse_points_csv(&text, &args.input.display().to_string())?;
    let range = args.window.as_deref().map(parse_window).transpose()?;
    let fit = power_law_fit(&points, range).map_err(|e| CliError::domain(e.to_string()))?;
    let report = serde_json::to_value(&fit).expect("serializes");
    emit_json(&report, args.out.as_deref(), args.force)
}

fn cmd_hypothesis(args: HypothesisArgs) -> Result<(), CliError> {
    let (ds, ds_err) = match &args.ds {
        Some(text) => parse_measured(text, args.dserr, "ds")?,
        None => (
            fracsearch::analysis::gasket_spectral_dimension(args.d_e),
            args.dserr.unwrap_or(0.0),
        ),
    };
    let mut dims = DimensionSet::new(args.d_e, args.pieces, args.s, ds, ds_err);
    if let Some(df) = args.df {
        dims.fractal = df;
    }
    let measured = match (&args.b, &args.a) {
        (Some(b), Some(a)) => {
            let (b, b_err) = parse_measured(b, args.berr, "b")?;
            let (a, a_err) = parse_measured(a, args.aerr, "a")?;
            Some((b, b_err, a, a_err))
        }
        (None, None) => None,
        _ => {
            return Err(CliError::domain(
                "--b and --a must be given together (or both omitted)",
            ))
        }
    };
    let report = check_hypothesis(measured, &dims);
    let mut value = serde_json::to_value(&report).expect("serializes");
    if let Some((b, b_err, _, _)) = measured {
        let inv = inverse_spectral_comparison(b, b_err, ds, ds_err);
        value["inverse_spectral"] = serde_json::to_value(&inv).expect("serializes");
    }
    emit_json(&value, args.out.as_deref(), args.force)
}

fn parse_stages(text: &str) -> Result<Vec<u32>, CliError> {
    let stages: Vec<u32> = if let Some((lo, hi)) = text.split_once(':') {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::domain(format!("bad --stages `{text}`")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::domain(format!("bad --stages `{text}`")))?;
        if hi < lo {
            return Err(CliError::domain(format!("empty stage range `{text}`")));
        }
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::domain(format!("bad --stages `{text}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if stages.is_empty() {
        return Err(CliError::domain("no stages given"));
    }
    if !stages.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::domain("stages must be strictly increasing"));
    }
    Ok(stages)
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let stages = parse_stages(&args.stages)?;
    let rule = MoveRule::Stay;
    std::fs::create_dir_all(&args.out)?;
    let summary_path = args.out.join("summary.json");
    guard_output(&summary_path, args.force)?;

    let started = Instant::now();
    let mut stage_reports = Vec::new();
    let mut q_points = Vec::new();
    let mut p_points = Vec::new();
    for &level in &stages {
        let stage = Stage::new(level)?;
        check_memory(
            walk::state_bytes(stage.vertex_count()) + lattice::lattice_bytes(stage),
            "quantum search",
        )?;
        let stage_dir = args.out.join(format!("stage{level}"));
        std::fs::create_dir_all(&stage_dir)?;
        let marked = match args.marked.as_str() {
            "interior" => Some(lattice::canonical_interior_mark(stage)),
            "corner" => None,
            explicit => Some(parse_coord(explicit)?),
        };
        let lat = CarpetLattice::build(stage, marked)?;
        let n = lat.vertex_count() as u64;
        let steps = parse_steps(&args.steps, n)?;
        eprintln!("pipeline: stage {level} (N = {n}), {steps} steps");

        let stage_started = Instant::now();
        let run = walk::evolve(&lat, &SearchConfig::new(steps))?;
        let wall = stage_started.elapsed().as_secs_f64();
        let csv_path = stage_dir.join("search.csv");
        guard_output(&csv_path, args.force)?;
        run.series.write_csv(&csv_path)?;
        let mut manifest = RunManifest::new(
            "pipeline/search",
            json!({
                "stage": level,
                "vertex_count": n,
                "marked": { "i": run.marked.i, "j": run.marked.j },
                "steps": steps,
                "final_norm_sq": run.final_norm_sq,
            }),
            wall,
        );
        manifest.add_output(&csv_path)?;
        let manifest_path = manifest_path_for(&csv_path);
        manifest.write(&manifest_path)?;

        let estimate =
            estimate_period(&run.series, Windowing::None).map_err(|e| CliError::domain(e.to_string()))?;
        let mean_peak = mean_peak_probability(&run.series, estimate.period)
            .map_err(|e| CliError::domain(e.to_string()))?;
        let period_path = stage_dir.join("period.json");
        emit_json(
            &json!({
                "estimate": estimate,
                "mean_peak_probability": mean_peak,
            }),
            Some(&period_path),
            args.force,
        )?;

        q_points.push((n as f64, estimate.period));
        p_points.push((n as f64, mean_peak));
        stage_reports.push(json!({
            "stage": level,
            "vertex_count": n,
            "steps": steps,
            "period": estimate.period,
            "harmonic_suspected": estimate.harmonic_suspected,
            "mean_peak_probability": mean_peak,
            "manifest": manifest_path.display().to_string(),
        }));
    }

    let q_fit = power_law_fit(&q_points, None).map_err(|e| CliError::domain(e.to_string()))?;
    // peak-probability fit over the largest 4 stages available
    let p_tail = &p_points[p_points.len().saturating_sub(4)..];
    let p_fit = power_law_fit(p_tail, None).map_err(|e| CliError::domain(e.to_string()))?;

    // classical leg
    let classical_stage = Stage::new(args.classical_stage)?;
    if args.method == "exact" {
        check_memory(
            classical::distribution_bytes(classical_stage.vertex_count())
                + lattice::lattice_bytes(classical_stage),
            "exact classical propagation",
        )?;
    }
    eprintln!(
        "pipeline: classical stage {} ({} steps, {})",
        args.classical_stage, args.classical_steps, args.method
    );
    let classical_lat = build_lattice(args.classical_stage, None)?;
    let classical_started = Instant::now();
    let classical_series = match args.method.as_str() {
        "exact" => classical::return_series_exact(
            &classical_lat,
            classical_lat.marked(),
            args.classical_steps,
            rule,
        ),
        "mc" => classical::return_series_mc(
            &classical_lat,
            classical_lat.marked(),
            args.classical_steps,
            args.walkers,
            args.seed,
            rule,
        ),
        other => {
            return Err(CliError::domain(format!(
                "unknown method `{other}` (expected exact or mc)"
            )))
        }
    }
    .map_err(|e| CliError::domain(e.to_string()))?;
    let classical_wall = classical_started.elapsed().as_secs_f64();
    let classical_path = args.out.join("classical.csv");
    guard_output(&classical_path, args.force)?;
    classical_series.write_csv(&classical_path)?;
    let mut classical_manifest = RunManifest::new(
        "pipeline/classical",
        json!({
            "stage": args.classical_stage,
            "method": args.method,
            "steps": args.classical_steps,
            "rule": rule,
        }),
        classical_wall,
    );
    classical_manifest.add_output(&classical_path)?;
    let classical_manifest_path = manifest_path_for(&classical_path);
    classical_manifest.write(&classical_manifest_path)?;

    let window = match &args.window {
        Some(text) => parse_window(text)?,
        None => (100.0, (args.classical_steps / 2) as f64),
    };
    let classical_points: Vec<(f64, f64)> = classical_series
        .iter()
        .filter(|&(t, _)| t >= 1)
        .map(|(t, v)| (t as f64, v))
        .collect();
    let classical_fit = power_law_fit(&classical_points, Some(window))
        .map_err(|e| CliError::domain(e.to_string()))?;
    let (ds, ds_err) =
        spectral_dimension_from_fit(&classical_fit).map_err(|e| CliError::domain(e.to_string()))?;

    let dims = DimensionSet::new(2, 8, 3, ds, ds_err);
    let a = -p_fit.exponent; // P ~ N^-a
    let a_err = p_fit.stderr_exponent;
    let hypothesis = check_hypothesis(
        Some((q_fit.exponent, q_fit.stderr_exponent, a, a_err)),
        &dims,
    );
    let inverse = inverse_spectral_comparison(q_fit.exponent, q_fit.stderr_exponent, ds, ds_err);

    let summary = json!({
        "stages": stage_reports,
        "q_fit": q_fit,
        "p_fit": p_fit,
        "classical": {
            "stage": args.classical_stage,
            "steps": args.classical_steps,
            "method": args.method,
            "fit_window": { "tmin": window.0, "tmax": window.1 },
            "fit": classical_fit,
            "spectral_dimension": ds,
            "spectral_dimension_err": ds_err,
            "manifest": classical_manifest_path.display().to_string(),
        },
        "hypothesis": hypothesis,
        "inverse_spectral": inverse,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    emit_json(&summary, Some(&summary_path), args.force)?;
    eprintln!(
        "pipeline: b = {} ({}), a = {} ({}), d_s = {:.4}",
        q_fit.exponent, q_fit.exponent_notation, a, p_fit.exponent_notation, ds
    );
    Ok(())
}
