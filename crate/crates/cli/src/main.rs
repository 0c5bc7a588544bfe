//! `stiefelgen` command-line front end.
//!
//! Exit codes: 0 success, 1 numeric or domain error, 2 usage, IO or parse
//! error.

mod fixtures;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stiefelgen::augment::{batch_generate, geodesic_path, geodesic_series, stiefelgen_matrix, stiefelgen_series, AugmentConfig};
use stiefelgen::dmd::{ensemble_forecast, fit_dmd, SnapshotMatrix};
use stiefelgen::fda::{functional_boxplot, FunctionalEnsemble, DEFAULT_FENCE_FACTOR};
use stiefelgen::novelty::{shm_study, DecisionFunction, ShmStudyConfig};
use stiefelgen::rng::{derived_stream, seeded};
use stiefelgen::signal::{FitStrategy, TimeSeries};
use stiefelgen::sphere::{sphere_gen, SphereGenConfig};
use stiefelgen::{DMatrix, C64};

use fixtures::Fixture;
use io::{CsvOut, IoError};

#[derive(Parser, Debug)]
#[command(name = "stiefelgen", version, about = "Geodesic data augmentation on the Stiefel manifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Augment a series (or each column of a table) once.
    Augment(AugmentArgs),
    /// Sample one geodesic and emit every step.
    Geodesic(GeodesicArgs),
    /// Independent augmentations of one series, one output column each.
    Batch(BatchArgs),
    /// Great-circle perturbation of a normalized series.
    Sphere(SphereArgs),
    /// Fit exact DMD and emit eigenvalues, rates and amplitudes.
    DmdFit(DmdFitArgs),
    /// Forecasts from perturbed DMD fits.
    DmdEnsemble(DmdEnsembleArgs),
    /// Band depths, central regions and outliers of a curve ensemble.
    Fboxplot(FboxplotArgs),
    /// Synthetic sensor study: PCA, one-class SVM and a tracked geodesic.
    ShmDemo(ShmArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Input CSV; columns are series, rows are time.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct Perturbation {
    /// Perturbation factor for both factors, in [0, 1].
    #[arg(long, default_value_t = 0.4)]
    beta: f64,
    /// Overrides --beta for the left factor.
    #[arg(long)]
    beta_u: Option<f64>,
    /// Overrides --beta for the right factor.
    #[arg(long)]
    beta_v: Option<f64>,
    /// Metric family parameter; -0.5 is Euclidean, 0 canonical.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Perturb only the leading singular directions.
    #[arg(long)]
    rank: Option<usize>,
}

impl Perturbation {
    fn config(&self, seed: u64) -> AugmentConfig {
        let mut cfg = AugmentConfig::new(self.beta)
            .with_betas(self.beta_u.unwrap_or(self.beta), self.beta_v.unwrap_or(self.beta))
            .with_alpha(self.alpha)
            .with_seed(seed);
        if let Some(r) = self.rank {
            cfg = cfg.with_rank(r);
        }
        cfg
    }
}

#[derive(Args, Debug)]
struct Paging {
    /// Page matrix row count.
    #[arg(long, default_value_t = 50)]
    rows: usize,
    /// Moving-average window applied after unstacking.
    #[arg(long, default_value_t = 1)]
    smooth: usize,
    #[arg(long, value_enum, default_value_t = Fit::Truncate)]
    fit: Fit,
    /// Built-in input used when --in is absent.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Treat a multi-column input as one matrix instead of a set of series.
    #[arg(long)]
    matrix: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fit {
    Truncate,
    PadEdge,
    Overlap,
}

impl From<Fit> for FitStrategy {
    fn from(f: Fit) -> Self {
        match f {
            Fit::Truncate => FitStrategy::Truncate,
            Fit::PadEdge => FitStrategy::PadEdge,
            Fit::Overlap => FitStrategy::Overlap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    perturbation: Perturbation,
    #[command(flatten)]
    paging: Paging,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    perturbation: Perturbation,
    #[command(flatten)]
    paging: Paging,
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Args, Debug)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    perturbation: Perturbation,
    #[command(flatten)]
    paging: Paging,
    #[arg(long, default_value_t = 10)]
    count: usize,
}

#[derive(Args, Debug)]
struct SphereArgs {
    #[command(flatten)]
    common: Common,
    /// Geodesic time.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Tangent norm; defaults to π/6.
    #[arg(long)]
    boundary: Option<f64>,
    #[arg(long, default_value_t = 20)]
    smooth: usize,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

#[derive(Args, Debug)]
struct DmdFitArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Snapshot spacing for file input.
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

#[derive(Args, Debug)]
struct DmdEnsembleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value_t = 30)]
    count: usize,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    /// Forecast this many steps past the last snapshot.
    #[arg(long, default_value_t = 0)]
    extend: usize,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

#[derive(Args, Debug)]
struct FboxplotArgs {
    #[command(flatten)]
    common: Common,
    /// Central-region proportions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.75])]
    proportions: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_FENCE_FACTOR)]
    fence: f64,
}

#[derive(Args, Debug)]
struct ShmArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 85.0)]
    percentile: f64,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    #[arg(long, default_value_t = 1e-3)]
    gamma: f64,
    /// Observation to track; defaults to the adversarial candidate.
    #[arg(long)]
    track: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(IoError),
    Domain(stiefelgen::Error),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(IoError::Io("output".into(), e))
    }
}

impl From<stiefelgen::Error> for Failure {
    fn from(e: stiefelgen::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Augment(a) => augment(a),
        Command::Geodesic(a) => geodesic(a),
        Command::Batch(a) => batch(a),
        Command::Sphere(a) => sphere(a),
        Command::DmdFit(a) => dmd_fit(a),
        Command::DmdEnsemble(a) => dmd_ensemble(a),
        Command::Fboxplot(a) => fboxplot(a),
        Command::ShmDemo(a) => shm_demo(a),
    };
    match outcome {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("STIEFELGEN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("STIEFELGEN_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("STIEFELGEN_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// The input table, or the fixture's series as one column.
fn load_table(common: &Common, fixture: Option<Fixture>) -> Result<DMatrix<f64>, Failure> {
    match (&common.input, fixture) {
        (Some(path), _) => Ok(io::read_table(path)?),
        (None, Some(Fixture::Steam)) => {
            let s = fixtures::steam_series();
            Ok(DMatrix::from_column_slice(s.len(), 1, s.values()))
        }
        (None, Some(Fixture::Spatiotemporal)) => Err(Failure::Usage(
            "the spatiotemporal fixture is a snapshot field; use it with dmd-fit or dmd-ensemble".into(),
        )),
        (None, None) => Err(Failure::Usage("one of --in or --fixture is required".into())),
    }
}

fn load_snapshots(common: &Common, fixture: Option<Fixture>, dt: f64) -> Result<SnapshotMatrix, Failure> {
    match (&common.input, fixture) {
        (Some(path), _) => Ok(SnapshotMatrix::from_real(&io::read_table(path)?, dt)?),
        (None, Some(Fixture::Spatiotemporal)) => Ok(fixtures::spatiotemporal()),
        (None, Some(Fixture::Steam)) => Err(Failure::Usage("the steam fixture is a single series, not a snapshot field".into())),
        (None, None) => Err(Failure::Usage("one of --in or --fixture is required".into())),
    }
}

fn columns(table: &DMatrix<f64>) -> Result<Vec<TimeSeries>, Failure> {
    table
        .column_iter()
        .map(|c| TimeSeries::new(c.iter().copied().collect()).map_err(Failure::from))
        .collect()
}

fn format_or(common: &Common, default: Format) -> Format {
    common.format.unwrap_or(default)
}

fn require_csv(common: &Common, command: &str) -> Result<(), Failure> {
    match common.format {
        Some(Format::Json) => Err(Failure::Usage(format!("{command} writes CSV only"))),
        _ => Ok(()),
    }
}

fn augment(a: AugmentArgs) -> Outcome {
    require_csv(&a.common, "augment")?;
    let cfg = a.perturbation.config(a.common.seed).with_smoothing(a.paging.smooth).with_fit(a.paging.fit.into());
    let table = load_table(&a.common, a.paging.fixture)?;
    let generated = if a.paging.matrix {
        stiefelgen_matrix(&table, &cfg, &mut seeded(cfg.seed))?.generated
    } else {
        // Column k draws from stream k so columns are independent of each other.
        let out = columns(&table)?
            .iter()
            .enumerate()
            .map(|(k, s)| stiefelgen_series(s, a.paging.rows, &cfg, &mut derived_stream(cfg.seed, k as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        let len = out.iter().map(TimeSeries::len).min().unwrap_or(0);
        DMatrix::from_fn(len, out.len(), |i, k| out[k].values()[i])
    };
    let mut csv = CsvOut::new(io::open_output(a.common.output.as_deref())?);
    csv.matrix(&generated)?;
    csv.finish()?;
    Ok(format!(
        "augment: {}x{} -> {}x{}, beta_u={} beta_v={} alpha={} seed={}",
        table.nrows(),
        table.ncols(),
        generated.nrows(),
        generated.ncols(),
        cfg.beta_u,
        cfg.beta_v,
        cfg.alpha,
        cfg.seed
    ))
}

fn geodesic(a: GeodesicArgs) -> Outcome {
    require_csv(&a.common, "geodesic")?;
    let cfg = a.perturbation.config(a.common.seed).with_smoothing(a.paging.smooth).with_fit(a.paging.fit.into());
    let table = load_table(&a.common, a.paging.fixture)?;
    let mut csv = CsvOut::new(io::open_output(a.common.output.as_deref())?);
    let mut rng = seeded(cfg.seed);
    let shape = if a.paging.matrix {
        let path = geodesic_path(&table, &cfg, a.steps, &mut rng)?;
        csv.header(&header("step", (0..table.ncols()).map(|j| format!("c{j}"))))?;
        for (k, m) in path.iter().enumerate() {
            for r in m.row_iter() {
                csv.row(&[k.to_string()], r.iter().copied())?;
            }
        }
        format!("{}x{} matrix", table.nrows(), table.ncols())
    } else {
        let series = match io::as_series(&table) {
            Some(v) => TimeSeries::new(v)?,
            None => return Err(Failure::Usage("geodesic takes one series; pass --matrix for a table".into())),
        };
        let path = geodesic_series(&series, a.paging.rows, &cfg, a.steps, &mut rng)?;
        csv.header(&(0..path.len()).map(|k| format!("step{k}")).collect::<Vec<_>>())?;
        let len = path[0].len();
        for i in 0..len {
            csv.row(&[], path.iter().map(|s| s.values()[i]))?;
        }
        format!("{} samples", series.len())
    };
    csv.finish()?;
    Ok(format!(
        "geodesic: {shape}, {} steps, beta_u={} beta_v={} seed={}",
        a.steps, cfg.beta_u, cfg.beta_v, cfg.seed
    ))
}

fn header(first: &str, rest: impl Iterator<Item = String>) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest).collect()
}

fn batch(a: BatchArgs) -> Outcome {
    require_csv(&a.common, "batch")?;
    let cfg = a.perturbation.config(a.common.seed).with_smoothing(a.paging.smooth).with_fit(a.paging.fit.into());
    let table = load_table(&a.common, a.paging.fixture)?;
    let series = match io::as_series(&table) {
        Some(v) => TimeSeries::new(v)?,
        None => return Err(Failure::Usage("batch takes one series".into())),
    };
    let draws = batch_generate(&series, a.count, a.paging.rows, &cfg)?;
    let mut csv = CsvOut::new(io::open_output(a.common.output.as_deref())?);
    csv.matrix(&draws.transpose())?;
    csv.finish()?;
    Ok(format!(
        "batch: {} samples x {} draws, beta_u={} beta_v={} seed={}",
        draws.ncols(),
        a.count,
        cfg.beta_u,
        cfg.beta_v,
        cfg.seed
    ))
}

fn sphere(a: SphereArgs) -> Outcome {
    require_csv(&a.common, "sphere")?;
    let table = load_table(&a.common, a.fixture)?;
    let series = match io::as_series(&table) {
        Some(v) => TimeSeries::new(v)?,
        None => return Err(Failure::Usage("sphere takes one series".into())),
    };
    let mut config = SphereGenConfig {
        t: a.t,
        smooth_len: a.smooth,
        ..SphereGenConfig::default()
    };
    if let Some(b) = a.boundary {
        config.boundary = b;
    }
    let out = sphere_gen(&series, &config, &mut seeded(a.common.seed))?;
    let mut csv = CsvOut::new(io::open_output(a.common.output.as_deref())?);
    csv.header(&["raw".to_string(), "smoothed".to_string()])?;
    for (r, s) in out.raw.values().iter().zip(out.smoothed.values()) {
        csv.row(&[], [*r, *s])?;
    }
    csv.finish()?;
    Ok(format!(
        "sphere: {} samples, norm={:.6}, t={} boundary={} seed={}",
        series.len(),
        out.sigma,
        config.t,
        config.boundary,
        a.common.seed
    ))
}

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
}

impl From<&C64> for ComplexValue {
    fn from(z: &C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct DmdSummary {
    rank: usize,
    dt: f64,
    spatial_len: usize,
    snapshot_count: usize,
    eigenvalues: Vec<ComplexValue>,
    omegas: Vec<ComplexValue>,
    amplitudes: Vec<ComplexValue>,
    reconstruction_error: f64,
}

fn dmd_fit(a: DmdFitArgs) -> Outcome {
    let snaps = load_snapshots(&a.common, a.fixture, a.dt)?;
    let model = fit_dmd(&snaps, a.rank)?;
    let recon = model.forecast(&snaps.times());
    let error = (&recon - snaps.data()).norm() / snaps.data().norm();
    let out = io::open_output(a.common.output.as_deref())?;
    match format_or(&a.common, Format::Json) {
        Format::Json => {
            let complex = |v: &[C64]| v.iter().map(ComplexValue::from).collect();
            io::write_json(
                out,
                &DmdSummary {
                    rank: model.rank,
                    dt: model.dt,
                    spatial_len: snaps.spatial_len(),
                    snapshot_count: snaps.snapshot_count(),
                    eigenvalues: complex(&model.eigenvalues),
                    omegas: complex(&model.omegas),
                    amplitudes: complex(&model.amplitudes),
                    reconstruction_error: error,
                },
            )?;
        }
        Format::Csv => {
            let mut csv = CsvOut::new(out);
            let names = ["mode", "mu_re", "mu_im", "omega_re", "omega_im", "amp_re", "amp_im"];
            csv.header(&names.map(String::from))?;
            for k in 0..model.rank {
                let (mu, om, b) = (model.eigenvalues[k], model.omegas[k], model.amplitudes[k]);
                csv.row(&[k.to_string()], [mu.re, mu.im, om.re, om.im, b.re, b.im])?;
            }
            csv.finish()?;
        }
    }
    let freqs: Vec<String> = model.omegas.iter().map(|w| format!("{:.6}", w.im)).collect();
    Ok(format!(
        "dmd-fit: {}x{} snapshots, rank {}, frequencies [{}], relative error {:.3e}",
        snaps.spatial_len(),
        snaps.snapshot_count(),
        model.rank,
        freqs.join(", "),
        error
    ))
}

fn dmd_ensemble(a: DmdEnsembleArgs) -> Outcome {
    require_csv(&a.common, "dmd-ensemble")?;
    let snaps = load_snapshots(&a.common, a.fixture, a.dt)?;
    let n = snaps.snapshot_count() + a.extend;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * snaps.dt()).collect();
    let ens = ensemble_forecast(&snaps, a.rank, a.beta, a.count, &times, a.common.seed)?;
    let mut csv = CsvOut::new(io::open_output(a.common.output.as_deref())?);
    csv.header(&header("member", std::iter::once("time".to_string()).chain((0..snaps.spatial_len()).map(|i| format!("x{i}")))))?;
    for (m, member) in ens.members.iter().enumerate() {
        for (k, t) in times.iter().enumerate() {
            let column = member.column(k);
            csv.row(&[m.to_string()], std::iter::once(*t).chain(column.iter().map(|z| z.re)))?;
        }
    }
    csv.finish()?;
    Ok(format!(
        "dmd-ensemble: {} members, {}x{} forecasts, rank {}, beta={} seed={}",
        a.count,
        snaps.spatial_len(),
        n,
        a.rank,
        a.beta,
        a.common.seed
    ))
}

#[derive(Serialize)]
struct RegionSummary {
    proportion: f64,
    members: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize)]
struct BoxplotSummary {
    curve_count: usize,
    grid_len: usize,
    depths: Vec<f64>,
    median_index: usize,
    regions: Vec<RegionSummary>,
    fence_lower: Vec<f64>,
    fence_upper: Vec<f64>,
    outlier_indices: Vec<usize>,
}

fn fboxplot(a: FboxplotArgs) -> Outcome {
    let table = load_table(&a.common, None)?;
    // Columns are curves, rows are the grid.
    let ens = FunctionalEnsemble::new(table.transpose())?;
    let bp = functional_boxplot(&ens, &a.proportions, a.fence)?;
    let out = io::open_output(a.common.output.as_deref())?;
    match format_or(&a.common, Format::Json) {
        Format::Json => io::write_json(
            out,
            &BoxplotSummary {
                curve_count: ens.curve_count(),
                grid_len: ens.grid_len(),
                depths: bp.depths.clone(),
                median_index: bp.median_index,
                regions: bp
                    .regions
                    .iter()
                    .map(|r| RegionSummary {
                        proportion: r.proportion,
                        members: r.members.clone(),
                        lower: r.envelope.lower.clone(),
                        upper: r.envelope.upper.clone(),
                    })
                    .collect(),
                fence_lower: bp.fences.lower.clone(),
                fence_upper: bp.fences.upper.clone(),
                outlier_indices: bp.outlier_indices.clone(),
            },
        )?,
        Format::Csv => {
            let mut csv = CsvOut::new(out);
            csv.header(&["curve", "depth", "median", "outlier"].map(String::from))?;
            for (k, d) in bp.depths.iter().enumerate() {
                let median = f64::from(u8::from(k == bp.median_index));
                let outlier = f64::from(u8::from(bp.outlier_indices.contains(&k)));
                csv.row(&[k.to_string()], [*d, median, outlier])?;
            }
            csv.finish()?;
        }
    }
    Ok(format!(
        "fboxplot: {} curves x {} points, median {}, {} outliers",
        ens.curve_count(),
        ens.grid_len(),
        bp.median_index,
        bp.outlier_indices.len()
    ))
}

#[derive(Serialize)]
struct ShmSummary {
    observations: usize,
    observation_shape: (usize, usize),
    explained_variance: Vec<f64>,
    support_vectors: usize,
    training_outliers: Vec<usize>,
    smo_iterations: usize,
    candidate_rank: Option<usize>,
    candidate_index: Option<usize>,
    track_index: usize,
    decisions: Vec<f64>,
    crossing_step: Option<usize>,
}

fn shm_demo(a: ShmArgs) -> Outcome {
    let cfg = ShmStudyConfig {
        augment: AugmentConfig::new(a.beta).with_seed(a.common.seed),
        steps: a.steps,
        percentile: a.percentile,
        nu: a.nu,
        gamma: a.gamma,
        track_index: a.track,
        ..ShmStudyConfig::default()
    };
    let study = shm_study(&cfg)?;
    let out = io::open_output(a.common.output.as_deref())?;
    match format_or(&a.common, Format::Csv) {
        Format::Csv => {
            let mut csv = CsvOut::new(out);
            let dims = study.space.dims();
            csv.header(&header("kind", ["index".to_string()].into_iter().chain((1..=dims).map(|d| format!("pc{d}"))).chain(["decision".to_string()])))?;
            let mut emit = |kind: &str, index: usize, p: &stiefelgen::DVector<f64>, decision: f64| {
                csv.row(&[kind.to_string(), index.to_string()], p.iter().copied().chain([decision]))
            };
            for (i, p) in study.space.points.iter().enumerate() {
                emit("train", i, p, study.model.decision(p))?;
            }
            for (i, p) in study.perturbed.iter().enumerate() {
                emit("perturbed", i, p, study.model.decision(p))?;
            }
            for (k, (p, d)) in study.track.path.iter().zip(&study.track.decisions).enumerate() {
                emit("path", k, p, *d)?;
            }
            csv.finish()?;
        }
        Format::Json => io::write_json(
            out,
            &ShmSummary {
                observations: study.dataset.observations.len(),
                observation_shape: study.dataset.shape(),
                explained_variance: study.space.explained_variance.clone(),
                support_vectors: study.model.support_vector_count(),
                training_outliers: study.model.training_outliers(),
                smo_iterations: study.model.iterations,
                candidate_rank: study.candidate.map(|c| c.rank),
                candidate_index: study.candidate.map(|c| c.index),
                track_index: study.track_index,
                decisions: study.track.decisions.clone(),
                crossing_step: study.track.crossing,
            },
        )?,
    }
    Ok(format!(
        "shm-demo: {} observations, {} training outliers, tracked {} crossing {}, beta={} seed={}",
        study.dataset.observations.len(),
        study.model.training_outliers().len(),
        study.track_index,
        study.track.crossing.map_or("none".to_string(), |s| format!("at step {s}")),
        a.beta,
        a.common.seed
    ))
}
