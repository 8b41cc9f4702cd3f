//! `smident`: Set Membership identification from the command line.
//!
//! Every subcommand reads CSV datasets (header `u1,...,u<n>,y`), writes
//! machine-readable JSON (or plot-ready CSV where noted) to stdout or
//! `--out`, and renders numbers with 17 significant digits so identical
//! inputs produce byte-identical outputs.

mod output;

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use smident::adversarial::{demonstrate_unreliability, DataInterpolant};
use smident::data::{points_from_csv, BoundingBox, Dataset, HypothesesConfig, NormQ, NormSpec, SmHypotheses};
use smident::envelope::{Envelope, ErrorReport};
use smident::falsification::{
    falsification_curve, falsify, FalsificationEvent, InflationPolicy, StreamState, Verdict,
};
use smident::parametric::{
    fit_least_squares, fit_linf, gaussian_delta, pp_falsify, BasisFamily, ConfidenceBound,
    CostKind, GradBound, ParametricModel,
};
use smident::psm::build_psm;
use smident::synth::{SyntheticTruth, TruthFn};

use output::{emit_json, emit_text};

/// Exit with 1 on domain errors (bad data, falsified hypotheses, IO) and 2
/// on usage errors (malformed flag values); clap handles its own usage exits.
struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

impl From<smident::Error> for CliError {
    fn from(e: smident::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "smident",
    version,
    about = "Set Membership envelope estimation, hypothesis falsification, and parametric fitting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate envelope bounds at points and report the worst-case error
    Estimate(EstimateArgs),
    /// Test SM hypotheses (gamma, epsilon) against a dataset
    Falsify(FalsifyArgs),
    /// Trace the falsification curve gamma*(epsilon) as CSV
    Curve(CurveArgs),
    /// Feed a stream of data, inflating hypotheses at falsification events
    Stream(StreamArgs),
    /// Fit a linear-in-parameters model by least squares or minimax
    Fit(FitArgs),
    /// Reject a parametric family against a disturbance confidence bound
    PpFalsify(PpFalsifyArgs),
    /// Combined parametric + residual-envelope estimator
    Psm(PsmArgs),
    /// Adversarial interpolants: exact-fit functions arbitrarily far from any estimate
    Lemma1(Lemma1Args),
    /// Generate a dataset from a known truth function with bounded noise
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum QArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "inf")]
    Inf,
}

impl From<QArg> for NormQ {
    fn from(q: QArg) -> Self {
        match q {
            QArg::One => NormQ::One,
            QArg::Two => NormQ::Two,
            QArg::Inf => NormQ::Inf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Ls,
    Linf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Dataset CSV with header u1,...,u<n>,y
    #[arg(long)]
    data: PathBuf,
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    gamma: Option<f64>,
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    epsilon: Option<f64>,
    /// JSON config {"gamma":..,"epsilon":..,"q":1|2|"inf","grid_resolution":..}
    #[arg(long)]
    config: Option<PathBuf>,
    /// Points CSV with header u1,...,u<n>
    #[arg(long)]
    at: PathBuf,
    #[arg(long, value_enum, default_value = "inf", conflicts_with = "config")]
    q: QArg,
    #[arg(long, default_value_t = 201, conflicts_with = "config")]
    grid_resolution: usize,
    /// Build the envelope even on falsified hypotheses (flagged output)
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    eps_min: f64,
    #[arg(long)]
    eps_max: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    /// Initial dataset; must be unfalsified at the initial hypotheses
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    init_gamma: f64,
    #[arg(long)]
    init_epsilon: f64,
    /// CSV of samples to feed, in order
    #[arg(long)]
    feed: PathBuf,
    /// Relative margin by which inflated hypotheses clear the curve
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    /// poly:<degree> | radial:<centers>:<width> | affine
    #[arg(long)]
    basis: String,
    #[arg(long, value_enum)]
    cost: CostArg,
    /// Gradient-norm bound enforced on a grid (minimax cost only)
    #[arg(long)]
    gamma: Option<f64>,
    /// Grid resolution per dimension for the gradient constraint
    #[arg(long, default_value_t = 101)]
    constraint_resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PpFalsifyArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    basis: String,
    /// Disturbance bound delta; alternatively derive it via --sigma/--alpha
    #[arg(long, required_unless_present_all = ["sigma", "alpha"], conflicts_with_all = ["sigma", "alpha"])]
    delta: Option<f64>,
    /// Gaussian noise scale (with --alpha)
    #[arg(long, requires = "alpha")]
    sigma: Option<f64>,
    /// Two-sided confidence level in percent (with --sigma)
    #[arg(long, requires = "sigma")]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PsmArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    basis: String,
    #[arg(long, value_enum, default_value = "ls")]
    cost: CostArg,
    #[arg(long)]
    gamma_delta: f64,
    #[arg(long)]
    epsilon_delta: f64,
    #[arg(long)]
    at: PathBuf,
    #[arg(long, value_enum, default_value = "inf")]
    q: QArg,
    #[arg(long, default_value_t = 201)]
    grid_resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Lemma1Args {
    #[arg(long)]
    data: PathBuf,
    /// Spike input: comma-separated coordinates
    #[arg(long)]
    spike_at: String,
    /// Ascending spike magnitudes, comma-separated
    #[arg(long)]
    b_list: String,
    #[arg(long, default_value_t = 1001)]
    grid_resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TruthArg {
    /// sin(u) on one input
    Sin,
    /// u^3 - 2u on one input
    Cubic,
    /// Fixed three-bump Gaussian mixture on two inputs
    Radial,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    truth: TruthArg,
    /// Sampling box: "lo,hi" per dimension, dimensions separated by ';'
    #[arg(long = "box")]
    sample_box: String,
    #[arg(long)]
    m: usize,
    /// Noise amplitude bound
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("SMIDENT_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: SMIDENT_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Estimate(args) => estimate(args),
        Command::Falsify(args) => run_falsify(args),
        Command::Curve(args) => curve(args),
        Command::Stream(args) => stream(args),
        Command::Fit(args) => fit(args),
        Command::PpFalsify(args) => run_pp_falsify(args),
        Command::Psm(args) => psm(args),
        Command::Lemma1(args) => lemma1(args),
        Command::Synth(args) => synth(args),
    }
}

fn load_dataset(path: &PathBuf) -> CliResult<Dataset> {
    let file = File::open(path)
        .map_err(|e| CliError { code: 1, message: format!("{}: {e}", path.display()) })?;
    Ok(Dataset::from_csv(file)?)
}

fn load_points(path: &PathBuf, expected_dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let file = File::open(path)
        .map_err(|e| CliError { code: 1, message: format!("{}: {e}", path.display()) })?;
    let points = points_from_csv(file)?;
    for p in &points {
        if p.len() != expected_dim {
            return Err(CliError {
                code: 1,
                message: format!(
                    "points in {} have dimension {}, dataset has {}",
                    path.display(),
                    p.len(),
                    expected_dim
                ),
            });
        }
    }
    Ok(points)
}

/// poly:<degree>, radial:<centers>:<width>, or the affine shorthand.
fn parse_basis(spec: &str, data: &Dataset) -> CliResult<BasisFamily> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["affine"] => Ok(BasisFamily::polynomial(data.input_dim(), 1)?),
        ["poly", deg] => {
            let degree: usize = deg
                .parse()
                .map_err(|_| usage(format!("bad polynomial degree {deg:?}")))?;
            Ok(BasisFamily::polynomial(data.input_dim(), degree)?)
        }
        ["radial", count, width] => {
            let count: usize = count
                .parse()
                .map_err(|_| usage(format!("bad radial center count {count:?}")))?;
            let width: f64 = width
                .parse()
                .map_err(|_| usage(format!("bad radial width {width:?}")))?;
            if count == 0 || count > data.len() {
                return Err(usage(format!(
                    "radial center count must be in 1..={}, got {count}",
                    data.len()
                )));
            }
            // Deterministic spread: sort sample inputs by first coordinate and
            // take evenly spaced ones as centers.
            let mut order: Vec<usize> = (0..data.len()).collect();
            order.sort_by(|&a, &b| {
                data.sample(a).input()[0].total_cmp(&data.sample(b).input()[0])
            });
            let centers: Vec<Vec<f64>> = (0..count)
                .map(|i| {
                    let idx = order[i * (data.len() - 1) / count.max(1)];
                    data.sample(idx).input().to_vec()
                })
                .collect();
            Ok(BasisFamily::radial(centers, width)?)
        }
        _ => Err(usage(format!(
            "unrecognized basis {spec:?}; expected poly:<degree>, radial:<centers>:<width>, or affine"
        ))),
    }
}

fn parse_number_list(text: &str, flag: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{flag}: bad number {tok:?}")))
        })
        .collect()
}

#[derive(Serialize)]
struct PointBand {
    u: Vec<f64>,
    lower: f64,
    central: f64,
    upper: f64,
}

#[derive(Serialize)]
struct EstimateReport {
    gamma: f64,
    epsilon: f64,
    /// True when --force built the envelope on falsified hypotheses.
    flagged: bool,
    points: Vec<PointBand>,
    norm: ErrorReport,
}

fn estimate(args: EstimateArgs) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let (hyp, spec) = match &args.config {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError { code: 1, message: format!("{}: {e}", path.display()) })?;
            let cfg: HypothesesConfig = serde_json::from_reader(file)
                .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?;
            (cfg.hypotheses()?, cfg.norm_spec()?)
        }
        None => (
            SmHypotheses::new(args.gamma.expect("clap"), args.epsilon.expect("clap"))?,
            NormSpec::new(args.q.into(), args.grid_resolution)?,
        ),
    };
    let points = load_points(&args.at, data.input_dim())?;

    let env = if args.force {
        Envelope::forced(data, hyp)
    } else {
        Envelope::new(data, hyp)?
    };
    let bands = points
        .into_iter()
        .map(|u| {
            let b = env.evaluate(&u)?;
            Ok(PointBand {
                u,
                lower: b.lower,
                central: b.central,
                upper: b.upper,
            })
        })
        .collect::<Result<Vec<_>, smident::Error>>()?;
    let norm = env.band_error(spec)?;
    let report = EstimateReport {
        gamma: hyp.gamma(),
        epsilon: hyp.epsilon(),
        flagged: env.is_flagged(),
        points: bands,
        norm,
    };
    emit_json(&report, args.out.as_deref())?;
    Ok(())
}

fn run_falsify(args: FalsifyArgs) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let verdict = falsify(&data, SmHypotheses::new(args.gamma, args.epsilon)?);
    emit_json(&verdict, args.out.as_deref())?;
    Ok(())
}

fn curve(args: CurveArgs) -> CliResult<()> {
    if args.steps < 1 {
        return Err(usage("--steps must be at least 1"));
    }
    if args.eps_min < 0.0 || args.eps_max < args.eps_min {
        return Err(usage("need 0 <= eps-min <= eps-max"));
    }
    let data = load_dataset(&args.data)?;
    let grid: Vec<f64> = if args.steps == 1 {
        vec![args.eps_min]
    } else {
        (0..args.steps)
            .map(|i| {
                args.eps_min
                    + (args.eps_max - args.eps_min) * i as f64 / (args.steps - 1) as f64
            })
            .collect()
    };
    let curve = falsification_curve(&data, &grid)?;
    let mut buf = Vec::new();
    curve.to_csv(&mut buf)?;
    emit_text(std::str::from_utf8(&buf).expect("csv is utf-8"), args.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct StreamReport {
    initial: SmHypotheses,
    #[serde(rename = "final")]
    final_hypotheses: SmHypotheses,
    samples_ingested: usize,
    events: Vec<FalsificationEvent>,
}

fn stream(args: StreamArgs) -> CliResult<()> {
    if !(args.margin.is_finite() && args.margin > 0.0) {
        return Err(usage("--margin must be a positive number"));
    }
    let data = load_dataset(&args.data)?;
    let feed = load_dataset(&args.feed)?;
    let initial = SmHypotheses::new(args.init_gamma, args.init_epsilon)?;
    let mut state = StreamState::new(data, initial, InflationPolicy { margin: args.margin })?;
    let mut ingested = 0usize;
    for sample in feed.samples() {
        state.push(sample.clone())?;
        ingested += 1;
    }
    let report = StreamReport {
        initial,
        final_hypotheses: state.hypotheses(),
        samples_ingested: ingested,
        events: state.events().to_vec(),
    };
    emit_json(&report, args.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    basis: String,
    cost: CostKind,
    p: Vec<f64>,
    j_value: f64,
    residuals: Vec<f64>,
    warnings: Vec<String>,
}

impl FitReport {
    fn new(model: &ParametricModel) -> Self {
        let d = model.diagnostics();
        Self {
            basis: model.basis().describe(),
            cost: d.cost,
            p: model.params().to_vec(),
            j_value: d.j_value,
            residuals: d.residuals.clone(),
            warnings: d.warnings.clone(),
        }
    }
}

fn fit_model(data: &Dataset, basis: &BasisFamily, cost: CostArg, gamma: Option<f64>, constraint_resolution: usize) -> CliResult<ParametricModel> {
    match (cost, gamma) {
        (CostArg::Ls, None) => Ok(fit_least_squares(data, basis)?),
        (CostArg::Ls, Some(_)) => Err(usage("--gamma requires --cost linf")),
        (CostArg::Linf, None) => Ok(fit_linf(data, basis, None)?),
        (CostArg::Linf, Some(g)) => {
            let gb = GradBound::on_grid(data, g, constraint_resolution)?;
            Ok(fit_linf(data, basis, Some(&gb))?)
        }
    }
}

fn fit(args: FitArgs) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let basis = parse_basis(&args.basis, &data)?;
    let model = fit_model(&data, &basis, args.cost, args.gamma, args.constraint_resolution)?;
    emit_json(&FitReport::new(&model), args.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct PpReport {
    delta: f64,
    sigma: Option<f64>,
    alpha: Option<f64>,
    minimax: f64,
    verdict: Verdict,
}

fn run_pp_falsify(args: PpFalsifyArgs) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let basis = parse_basis(&args.basis, &data)?;
    let bound = match (args.delta, args.sigma, args.alpha) {
        (Some(d), None, None) => ConfidenceBound::from_delta(d)?,
        (None, Some(s), Some(a)) => gaussian_delta(s, a)?,
        _ => return Err(usage("give either --delta or both --sigma and --alpha")),
    };
    let minimax = fit_linf(&data, &basis, None)?.diagnostics().j_value;
    let verdict = pp_falsify(&data, &basis, &bound)?;
    let report = PpReport {
        delta: bound.delta,
        sigma: bound.sigma,
        alpha: bound.alpha,
        minimax,
        verdict,
    };
    emit_json(&report, args.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct PsmPoint {
    u: Vec<f64>,
    lower: f64,
    central: f64,
    upper: f64,
    pointwise_error: f64,
}

#[derive(Serialize)]
struct PsmReport {
    model: FitReport,
    gamma_delta: f64,
    epsilon_delta: f64,
    points: Vec<PsmPoint>,
    norm: ErrorReport,
}

fn psm(args: PsmArgs) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let basis = parse_basis(&args.basis, &data)?;
    let model = fit_model(&data, &basis, args.cost, None, 101)?;
    let hyp_delta = SmHypotheses::new(args.gamma_delta, args.epsilon_delta)?;
    let estimator = build_psm(&data, &model, hyp_delta)?;
    let points = load_points(&args.at, data.input_dim())?;

    let rows = points
        .into_iter()
        .map(|u| {
            let bounds = estimator.bounds(&u)?;
            let central = estimator.estimate(&u)?;
            let pointwise_error = estimator.pointwise_error(&u)?;
            Ok(PsmPoint {
                u,
                lower: bounds.lower,
                central,
                upper: bounds.upper,
                pointwise_error,
            })
        })
        .collect::<Result<Vec<_>, smident::Error>>()?;
    let norm = estimator.error(NormSpec::new(args.q.into(), args.grid_resolution)?)?;
    let report = PsmReport {
        model: FitReport::new(&model),
        gamma_delta: args.gamma_delta,
        epsilon_delta: args.epsilon_delta,
        points: rows,
        norm,
    };
    emit_json(&report, args.out.as_deref())?;
    Ok(())
}

fn lemma1(args: Lemma1Args) -> CliResult<()> {
    let data = load_dataset(&args.data)?;
    let spike = parse_number_list(&args.spike_at, "--spike-at")?;
    if spike.len() != data.input_dim() {
        return Err(usage(format!(
            "--spike-at has dimension {}, dataset has {}",
            spike.len(),
            data.input_dim()
        )));
    }
    let b_values = parse_number_list(&args.b_list, "--b-list")?;
    // Gaps are measured against the plain interpolant of the data: itself an
    // estimate any purely data-driven method could have produced.
    let interpolant = DataInterpolant::new(&data)?;
    let estimate = |u: &[f64]| interpolant.evaluate(u).expect("dimension checked");
    let report =
        demonstrate_unreliability(&data, &estimate, &spike, &b_values, args.grid_resolution)?;
    emit_json(&report, args.out.as_deref())?;
    Ok(())
}

fn parse_box(text: &str) -> CliResult<BoundingBox> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for dim_spec in text.split(';') {
        let parts: Vec<&str> = dim_spec.split(',').collect();
        if parts.len() != 2 {
            return Err(usage(format!(
                "--box: each dimension needs \"lo,hi\", got {dim_spec:?}"
            )));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| usage(format!("--box: bad number {:?}", parts[0])))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| usage(format!("--box: bad number {:?}", parts[1])))?;
        lower.push(lo);
        upper.push(hi);
    }
    Ok(BoundingBox::new(lower, upper)?)
}

fn synth(args: SynthArgs) -> CliResult<()> {
    let bounds = parse_box(&args.sample_box)?;
    let shape = match args.truth {
        TruthArg::Sin => TruthFn::Sinusoid {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
            offset: 0.0,
        },
        TruthArg::Cubic => TruthFn::Polynomial {
            coeffs: vec![0.0, -2.0, 0.0, 1.0],
        },
        TruthArg::Radial => TruthFn::RadialMixture {
            centers: vec![vec![0.25, 0.25], vec![0.75, 0.5], vec![0.4, 0.8]],
            weights: vec![1.0, -0.7, 0.5],
            width: 0.35,
        },
    };
    if shape.input_dim() != bounds.dim() {
        return Err(usage(format!(
            "--box has {} dimensions but the truth needs {}",
            bounds.dim(),
            shape.input_dim()
        )));
    }
    let truth = SyntheticTruth::new(shape, bounds, args.eps)?;
    let data = truth.generate(args.m, args.seed)?;
    let mut buf = Vec::new();
    data.to_csv(&mut buf)?;
    emit_text(std::str::from_utf8(&buf).expect("csv is utf-8"), args.out.as_deref())?;
    Ok(())
}
