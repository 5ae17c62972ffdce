use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use mfdepth::binning::BinCount;
use mfdepth::boxplot::run_boxplot;
use mfdepth::metrics::run_benchmark;
use mfdepth::simulate::{simulate, ModelId, OutlierType, SparsenessType, SparsityLevel};
use mfdepth::{DepthEngine, Method, MomentKind, PoolSize};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io;
use crate::provenance::Provenance;
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "mfdepth", version, about = "Depths and sparse functional boxplots for irregular multivariate curves")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (also MFDEPTH_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the curves of a CSV file.
    Depth(DepthCmd),
    /// Generate a simulated dataset with its outlier truth.
    Simulate(SimulateCmd),
    /// Run a factorial benchmark and write the metrics table.
    Benchmark(BenchmarkCmd),
    /// Sparse and intensity functional boxplots of a CSV file.
    Boxplot(BoxplotCmd),
    /// Check a CSV file and print diagnostics.
    Validate(ValidateCmd),
}

fn parse_core<T>(s: &str) -> std::result::Result<T, String>
where
    T: std::str::FromStr<Err = mfdepth::Error>,
{
    s.parse().map_err(|e: mfdepth::Error| e.to_string())
}

/// Comma-separated methods, kept as one value for clap.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodList(pub Vec<Method>);

fn parse_methods(s: &str) -> std::result::Result<MethodList, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(MethodList(Method::ALL.to_vec()));
    }
    s.split(',').map(parse_core::<Method>).collect::<std::result::Result<_, _>>().map(MethodList)
}

fn parse_bins(s: &str) -> std::result::Result<BinCount, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(BinCount::Auto);
    }
    s.parse().map(BinCount::Fixed).map_err(|_| format!("'{s}' is neither 'auto' nor a bin count"))
}

fn parse_pool(s: &str) -> std::result::Result<PoolSize, String> {
    match s.to_ascii_lowercase().as_str() {
        "default" => Ok(PoolSize::Default),
        "full" => Ok(PoolSize::Full),
        n => n.parse().map(PoolSize::Fixed).map_err(|_| format!("'{s}' is not default, full or a size")),
    }
}

fn parse_moments(s: &str) -> std::result::Result<MomentKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "plain" => Ok(MomentKind::Plain),
        "robust" => Ok(MomentKind::Robust),
        _ => Err(format!("'{s}' is not plain or robust")),
    }
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(format!("'{s}' is not on or off")),
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str, sep: &[char]) -> std::result::Result<(T, T), String> {
    let mut it = s.split(sep);
    match (it.next().map(str::parse), it.next().map(str::parse), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(format!("'{s}' is not a pair")),
    }
}

/// Options shared by every command that computes depths.
#[derive(Debug, Args, Default)]
pub struct DepthArgs {
    /// `auto` or a bin count.
    #[arg(long, value_parser = parse_bins)]
    pub n_bins: Option<BinCount>,
    #[arg(long)]
    pub min_count: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// `plain` or `robust`.
    #[arg(long, value_parser = parse_moments)]
    pub moments: Option<MomentKind>,
    /// Global pool size: `default`, `full` or a number.
    #[arg(long, value_parser = parse_pool)]
    pub pool: Option<PoolSize>,
    #[arg(long)]
    pub n_dirs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DepthCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Comma-separated methods or `all`.
    #[arg(long, short, value_parser = parse_methods)]
    pub method: Option<MethodList>,
    /// `csv`, `json` or `both`.
    #[arg(long, default_value = "both")]
    pub format: String,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct SimulateCmd {
    #[arg(long, value_parser = parse_core::<ModelId>)]
    pub model: Option<ModelId>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long, value_parser = parse_core::<OutlierType>)]
    pub outlier: Option<OutlierType>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, value_parser = parse_core::<SparsenessType>)]
    pub sparseness: Option<SparsenessType>,
    #[arg(long, value_parser = parse_core::<SparsityLevel>)]
    pub level: Option<SparsityLevel>,
    #[arg(long)]
    pub p_s: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchmarkCmd {
    #[arg(long, value_delimiter = ',', value_parser = parse_core::<ModelId>)]
    pub models: Option<Vec<ModelId>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_core::<OutlierType>)]
    pub outliers: Option<Vec<OutlierType>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_core::<SparsenessType>)]
    pub sparseness: Option<Vec<SparsenessType>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_core::<SparsityLevel>)]
    pub levels: Option<Vec<SparsityLevel>>,
    #[arg(long, value_parser = parse_methods)]
    pub methods: Option<MethodList>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub p_s: Option<f64>,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct BoxplotCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short, value_parser = parse_core::<Method>)]
    pub method: Option<Method>,
    /// Remove potential outliers first: `on` or `off`.
    #[arg(long, value_parser = parse_switch)]
    pub potential_outliers: Option<bool>,
    #[arg(long)]
    pub fence: Option<f64>,
    #[arg(long)]
    pub local_bins: Option<usize>,
    /// Intensity raster as `NTxNY`.
    #[arg(long, value_parser = |s: &str| parse_pair::<usize>(s, &['x', 'X']))]
    pub raster: Option<(usize, usize)>,
    /// Kernel bandwidths as `h_t,h_y`.
    #[arg(long, value_parser = |s: &str| parse_pair::<f64>(s, &[',']))]
    pub bandwidth: Option<(f64, f64)>,
    /// Compute the intensity surfaces: `on` or `off`.
    #[arg(long, value_parser = parse_switch)]
    pub intensity: Option<bool>,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct ValidateCmd {
    #[arg(long, short)]
    pub input: PathBuf,
}

fn apply_depth(cfg: &mut RunConfig, a: &DepthArgs) {
    let d = &mut cfg.depth;
    if let Some(v) = a.n_bins {
        d.n_bins = v;
    }
    if a.min_count.is_some() {
        d.min_count = a.min_count;
    }
    if let Some(v) = a.beta {
        d.beta = v;
    }
    if let Some(v) = a.moments {
        d.moments = v;
    }
    if let Some(v) = a.pool {
        d.pool = v;
    }
    if let Some(v) = a.n_dirs {
        d.n_dirs = v;
    }
}

macro_rules! set {
    ($target:expr, $value:expr) => {
        if let Some(v) = $value.clone() {
            $target = v;
        }
    };
}

/// Effective configuration: file, then flags, then [`RunConfig::resolve`].
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set!(cfg.seed, cli.seed);
    set!(cfg.output, cli.output);
    match &cli.command {
        Command::Depth(c) => {
            set!(cfg.methods, c.method.as_ref().map(|l| l.0.clone()));
            apply_depth(&mut cfg, &c.depth);
        }
        Command::Simulate(c) => {
            let s = &mut cfg.simulate;
            set!(s.model.model, c.model);
            set!(s.model.n, c.n);
            set!(s.model.t, c.t);
            set!(s.model.jitter, c.jitter);
            set!(s.contamination.kind, c.outlier);
            set!(s.contamination.rate, c.rate);
            set!(s.sparseness.kind, c.sparseness);
            set!(s.sparseness.level, c.level);
            set!(s.sparseness.p_s, c.p_s);
        }
        Command::Benchmark(c) => {
            let b = &mut cfg.benchmark;
            set!(b.models, c.models);
            set!(b.outliers, c.outliers);
            set!(b.sparseness, c.sparseness);
            set!(b.levels, c.levels);
            set!(b.methods, c.methods.as_ref().map(|l| l.0.clone()));
            set!(b.replicates, c.reps);
            set!(b.n, c.n);
            set!(b.t, c.t);
            set!(b.rate, c.rate);
            set!(b.p_s, c.p_s);
            apply_depth(&mut cfg, &c.depth);
        }
        Command::Boxplot(c) => {
            let b = &mut cfg.boxplot;
            set!(b.method, c.method);
            set!(b.potential, c.potential_outliers);
            set!(b.fence, c.fence);
            if c.local_bins.is_some() {
                b.local_bins = c.local_bins;
            }
            set!(b.raster, c.raster);
            if let Some((h_t, h_y)) = c.bandwidth {
                b.bandwidth = Some([h_t, h_y]);
            }
            set!(b.intensity, c.intensity);
            apply_depth(&mut cfg, &c.depth);
        }
        Command::Validate(_) => {}
    }
    cfg.resolve();
    Ok(cfg)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Depth(_) => "depth",
        Command::Simulate(_) => "simulate",
        Command::Benchmark(_) => "benchmark",
        Command::Boxplot(_) => "boxplot",
        Command::Validate(_) => "validate",
    }
}

/// Parse `args` and run; the binary maps the error to stderr and an exit code.
pub fn run_from<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}

/// Execute a parsed command line and return the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = effective_config(cli)?;
    let threads = cfg.worker_threads(cli.threads)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| dispatch(cli, &cfg))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let name = command_name(&cli.command);
    let prov = Provenance::new(name, &cfg.identity(), cfg.seed);
    let out = &cfg.output;
    let mut written = Vec::new();
    match &cli.command {
        Command::Depth(c) => {
            let ds = io::load_csv(&c.input)?;
            let engine = DepthEngine::new(&ds, cfg.depth.clone())?;
            let (csv, json) = match c.format.as_str() {
                "csv" => (true, false),
                "json" => (false, true),
                "both" => (true, true),
                other => return Err(CliError::Usage(format!("--format '{other}' is not csv, json or both"))),
            };
            for &m in &cfg.methods {
                let report = engine.compute(m)?;
                let stem = format!("depth_{}", m.name().to_ascii_lowercase());
                if csv {
                    written.push(out.join(format!("{stem}.csv")));
                    io::save_report_csv(written.last().unwrap(), &report, &prov)?;
                }
                if json {
                    written.push(out.join(format!("{stem}.json")));
                    io::save_json(written.last().unwrap(), &json!({ "report": report }), &prov)?;
                }
            }
        }
        Command::Simulate(_) => {
            let sim = simulate(&cfg.simulate, cfg.seed)?;
            for (file, ds) in [("clean.csv", &sim.clean), ("contaminated.csv", &sim.contaminated), ("observed.csv", &sim.observed)] {
                written.push(out.join(file));
                io::save_dataset_csv(written.last().unwrap(), ds, &prov)?;
            }
            written.push(out.join("truth.csv"));
            io::save_truth_csv(written.last().unwrap(), &sim.observed, &sim.outliers, &prov)?;
        }
        Command::Benchmark(_) => {
            let rows = run_benchmark(&cfg.benchmark);
            for r in rows.iter().filter(|r| r.error.is_some()) {
                warn!(
                    "{}/{}/{}/{} {} replicate {}: {}",
                    r.model,
                    r.outlier_type,
                    r.sparseness_type,
                    r.p_curve_level,
                    r.method,
                    r.replicate,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            written.push(out.join("metrics.csv"));
            io::save_metrics_csv(written.last().unwrap(), &rows, &prov)?;
            written.push(out.join("metrics.svg"));
            io::write_text(written.last().unwrap(), &svg::metrics_panels(&rows, &prov))?;
        }
        Command::Boxplot(c) => {
            let ds = io::load_csv(&c.input)?;
            let summary = run_boxplot(&ds, &cfg.boxplot)?;
            written.push(out.join("boxplot.json"));
            io::save_json(written.last().unwrap(), &json!({ "summary": summary }), &prov)?;
            for j in 0..ds.p {
                written.push(out.join(format!("sparse_y{}.svg", j + 1)));
                io::write_text(written.last().unwrap(), &svg::sparse_boxplot(&summary, &ds, j, &prov))?;
            }
            for surface in &summary.intensity {
                written.push(out.join(format!("intensity_y{}.svg", surface.component + 1)));
                io::write_text(written.last().unwrap(), &svg::intensity_boxplot(&summary, &ds, surface, &prov))?;
            }
        }
        Command::Validate(c) => {
            let ds = io::read_csv(&c.input)?;
            let violations = ds.validate();
            let d = ds.durations();
            let report = json!({
                "path": c.input.display().to_string(),
                "n": ds.n(),
                "p": ds.p,
                "total_obs": ds.total_obs(),
                "mean_obs": ds.mean_obs(),
                "span": ds.span(),
                "min_duration": d.lengths.iter().copied().fold(f64::INFINITY, f64::min),
                "max_duration": d.lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                "violations": violations,
            });
            println!("{report}");
            if let Some(v) = violations.first() {
                return Err(CliError::Invalid { count: violations.len(), first: v.to_string() });
            }
            return Ok(written);
        }
    }
    written.push(out.join("config.json"));
    io::save_json(written.last().unwrap(), &json!({ "config": cfg.identity() }), &prov)?;
    for p in &written {
        info!("wrote {}", p.display());
    }
    Ok(written)
}

/// Print the written paths, one per line.
pub fn print_outputs(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", Path::new(p).display());
    }
}
