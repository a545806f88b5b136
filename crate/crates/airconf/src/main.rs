use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airconf::compare::{compare, compare_text, DEFAULT_SIZES};
use airconf::error::AppError;
use airconf::export::{configuration_text, export_geojson};
use airconf::ingest::{
    prepare_subset, read_flights, FlightSchema, ParseOutcome, DEFAULT_DELAY_THRESHOLD_MIN,
};
use airconf::pipeline::{
    configuration_artifact, report_artifact, train_window_model, write_json, InputSummary,
};
use airconf::sweep::{run_sweep, summarize, summary_text};
use airconf::{registry, PipelineParams, RunManifest, WindowRun};
use airconf_core::embed::{AeConfig, AeModel};
use airconf_core::metrics::RegularCount;
use airconf_core::{
    window_stats, Date, EmbedChoice, IagParams, KernelParams, Registry, TimeWindow,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "airconf",
    version,
    about = "Airport workload clustering for dynamic airspace configuration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Configure one time window.
    Configure(ConfigureArgs),
    /// Configure every date x window combination and tally the pairs.
    Sweep(SweepArgs),
    /// Time spectral vs autoencoder embeddings and check cluster adjacency.
    CompareEmbeddings(CompareArgs),
    /// Cut a full on-time performance export down to registry origins.
    Prepare(PrepareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    Ae,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regular {
    NonDelayed,
    Total,
}

#[derive(Args)]
struct Common {
    /// Flight CSV (BTS column names). Without it every airport is idle.
    #[arg(long)]
    flights: Option<PathBuf>,
    /// Airport registry (.json or .csv); defaults to the bundled Florida registry.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "spectral")]
    method: Method,
    /// Autoencoder latent size, or spectral dimension (default: current k).
    #[arg(long)]
    latent_dim: Option<usize>,
    /// Azimuth sector width in degrees.
    #[arg(long, default_value_t = 120.0)]
    azimuth: f64,
    /// Bearing where the first azimuth sector starts.
    #[arg(long, default_value_t = 0.0)]
    sector_offset: f64,
    #[arg(long, default_value_t = 200.0)]
    max_range: f64,
    /// Kernel base B in (0, 1).
    #[arg(long, default_value_t = 0.99)]
    base: f64,
    /// Delays at or above this many minutes count as delayed.
    #[arg(long, default_value_t = DEFAULT_DELAY_THRESHOLD_MIN)]
    delay_threshold: i32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    ae_epochs: usize,
    #[arg(long, default_value_t = 1e-2)]
    ae_step: f64,
    /// Train the autoencoder once and re-encode later rounds with it.
    #[arg(long)]
    reuse_ae_model: bool,
    /// Pretrained autoencoder JSON used in every round.
    #[arg(long)]
    ae_model: Option<PathBuf>,
    /// What counts as regular traffic in the imbalance metric.
    #[arg(long, value_enum, default_value = "non-delayed")]
    regular_count: Regular,
    /// Print the adaptive-loop trace as JSON lines on stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ConfigureArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "2015-12-24")]
    date: Date,
    #[arg(long, default_value = "12:00-14:00")]
    window: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write map.geojson.
    #[arg(long)]
    geojson: bool,
    /// Train the autoencoder on this window's graph and save it here.
    #[arg(long)]
    save_ae_model: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', required = true)]
    date: Vec<Date>,
    #[arg(long, value_delimiter = ',', required = true)]
    window: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    geojson: bool,
    /// Windows evaluated in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "2015-12-24")]
    date: Date,
    #[arg(long, default_value = "12:00-14:00")]
    window: String,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
    sizes: Vec<usize>,
    /// Also write compare.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrepareArgs {
    /// Full flights.csv export.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    registry: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Configure(a) => configure(a),
        Command::Sweep(a) => sweep(a),
        Command::CompareEmbeddings(a) => compare_embeddings(a),
        Command::Prepare(a) => prepare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn require_file(path: &Path) -> Result<(), AppError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(AppError::missing_file(path))
    }
}

fn params(c: &Common) -> Result<PipelineParams, AppError> {
    let ae = AeConfig {
        latent_dim: c.latent_dim.unwrap_or(AeConfig::default().latent_dim),
        epochs: c.ae_epochs,
        step_size: c.ae_step,
        seed: c.seed,
    };
    let embedding = match c.method {
        Method::Spectral => EmbedChoice::Spectral { dim: c.latent_dim },
        Method::Ae => EmbedChoice::Autoencoder {
            config: ae,
            reuse_model: c.reuse_ae_model,
        },
    };
    Ok(PipelineParams {
        delay_threshold_min: c.delay_threshold,
        iag: IagParams {
            azimuth_width_deg: c.azimuth,
            max_range_nm: c.max_range,
            sector_offset_deg: c.sector_offset,
        },
        kernel: KernelParams::new(c.base, KernelParams::default().shift, 0.0)?,
        embedding,
        regular_count: match c.regular_count {
            Regular::NonDelayed => RegularCount::NonDelayed,
            Regular::Total => RegularCount::Total,
        },
        seed: c.seed,
        ..PipelineParams::default()
    })
}

struct Inputs {
    registry: Registry,
    parsed: ParseOutcome,
    model: Option<AeModel>,
}

fn load_inputs(c: &Common, dates: &[Date], threshold: i32) -> Result<Inputs, AppError> {
    for path in [&c.flights, &c.registry, &c.ae_model].into_iter().flatten() {
        require_file(path)?;
    }
    let registry = registry::load(c.registry.as_deref())?;
    let parsed = match &c.flights {
        Some(path) => {
            let dates: BTreeSet<Date> = dates.iter().copied().collect();
            read_flights(path, &FlightSchema::default(), threshold, |r| {
                dates.contains(&r.date) && registry.contains(r.origin)
            })?
        }
        None => ParseOutcome::default(),
    };
    let model = match &c.ae_model {
        Some(path) => Some(
            serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| {
                AppError::bad_input(
                    anyhow::Error::new(e).context(format!("reading model {}", path.display())),
                )
            })?,
        ),
        None => None,
    };
    Ok(Inputs {
        registry,
        parsed,
        model,
    })
}

fn input_summary(p: &ParseOutcome) -> InputSummary {
    InputSummary {
        records: p.records.len(),
        rejected: p.rejected,
        filtered: p.filtered,
    }
}

fn manifest(
    c: &Common,
    params: PipelineParams,
    dates: Vec<Date>,
    windows: Vec<String>,
    out: Option<PathBuf>,
) -> RunManifest {
    RunManifest {
        flights: c.flights.clone(),
        registry: c.registry.clone(),
        dates,
        windows,
        ae_model: c.ae_model.clone(),
        params,
        out,
    }
}

fn emit_trace(run: &WindowRun) -> Result<(), AppError> {
    let mut err = std::io::stderr().lock();
    for round in &run.clustering.trace {
        let line = serde_json::json!({ "window": run.window, "round": round });
        writeln!(err, "{line}")?;
    }
    Ok(())
}

fn write_window(
    out: &Path,
    m: &RunManifest,
    run: &WindowRun,
    registry: &Registry,
    input: InputSummary,
    geojson: bool,
) -> Result<(), AppError> {
    fs::create_dir_all(out)?;
    write_json(
        &out.join("configuration.json"),
        &configuration_artifact(m, run),
    )?;
    write_json(&out.join("report.json"), &report_artifact(m, run, input))?;
    if geojson {
        let window_manifest = m.for_window(&run.window);
        write_json(
            &out.join("map.geojson"),
            &export_geojson(
                &run.configuration,
                registry,
                &run.stats,
                Some(&window_manifest),
            ),
        )?;
    }
    Ok(())
}

fn configure(a: ConfigureArgs) -> Result<(), AppError> {
    let c = &a.common;
    let p = params(c)?;
    let window = TimeWindow::parse_span(a.date, &a.window)?;
    let inputs = load_inputs(c, &[a.date], p.delay_threshold_min)?;
    let mut model = inputs.model;
    if let Some(path) = &a.save_ae_model {
        let trained = train_window_model(&inputs.parsed.records, &inputs.registry, &window, &p)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        write_json(path, &trained)?;
        model = Some(trained);
    }
    let m = manifest(
        c,
        p,
        vec![a.date],
        vec![window.span_label()],
        Some(a.out.clone()),
    );
    let run = airconf::run_window(
        &inputs.parsed.records,
        &inputs.registry,
        &window,
        &m.params,
        model.as_ref(),
    )?;
    if c.verbose {
        emit_trace(&run)?;
    }
    write_window(
        &a.out,
        &m,
        &run,
        &inputs.registry,
        input_summary(&inputs.parsed),
        a.geojson,
    )?;
    print!("{}", configuration_text(&run.configuration, &run.stats));
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), AppError> {
    let c = &a.common;
    let p = params(c)?;
    let inputs = load_inputs(c, &a.date, p.delay_threshold_min)?;
    let m = manifest(c, p, a.date.clone(), a.window.clone(), Some(a.out.clone()));
    let runs = run_sweep(
        &inputs.parsed.records,
        &inputs.registry,
        &m,
        inputs.model.as_ref(),
        a.jobs,
    )?;
    let input = input_summary(&inputs.parsed);
    for run in &runs {
        if c.verbose {
            emit_trace(run)?;
        }
        let dir = a.out.join(format!(
            "{}_{}",
            run.window.date,
            run.window.span_label().replace(':', "")
        ));
        write_window(&dir, &m, run, &inputs.registry, input, a.geojson)?;
    }
    let summary = summarize(&m, &runs);
    let text = summary_text(&summary);
    write_json(&a.out.join("summary.json"), &summary)?;
    fs::write(a.out.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn compare_embeddings(a: CompareArgs) -> Result<(), AppError> {
    let c = &a.common;
    let p = params(c)?;
    let window = TimeWindow::parse_span(a.date, &a.window)?;
    let inputs = load_inputs(c, &[a.date], p.delay_threshold_min)?;
    let stats = window_stats(&inputs.parsed.records, &window, &inputs.registry)?;
    let ae = AeConfig {
        latent_dim: c.latent_dim.unwrap_or(10),
        epochs: c.ae_epochs,
        step_size: c.ae_step,
        seed: c.seed,
    };
    let report = compare(&inputs.registry, &stats, &p, &ae, &a.sizes)?;
    if let Some(out) = &a.out {
        fs::create_dir_all(out)?;
        write_json(&out.join("compare.json"), &report)?;
    }
    print!("{}", compare_text(&report));
    Ok(())
}

fn prepare(a: PrepareArgs) -> Result<(), AppError> {
    require_file(&a.input)?;
    if let Some(r) = &a.registry {
        require_file(r)?;
    }
    let registry = registry::load(a.registry.as_deref())?;
    let origins = registry.codes().into_iter().collect();
    let input = std::io::BufReader::new(fs::File::open(&a.input)?);
    let output = std::io::BufWriter::new(fs::File::create(&a.output)?);
    let (kept, scanned) = prepare_subset(input, output, &FlightSchema::default(), &origins)?;
    println!("kept {kept} of {scanned} rows");
    Ok(())
}
