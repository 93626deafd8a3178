//! Command implementations. Every command returns its stdout payload as
//! a string; data products go to `--out` when given, otherwise they
//! become the payload themselves.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linkstream::filter::{
    build_qfilt, relational_convolve, time_convolve, ConvolutionMode, StructuralGains, TimeFilter,
};
use linkstream::graph;
use linkstream::io::{self, DomainConfig};
use linkstream::paths::{self, EventList, TemporalPath};
use linkstream::signal;
use linkstream::transform::{build_basis, fs_inverse, fs_transform, StructuralDictionary};
use linkstream::{from_event_set, to_event_set, EdgeEventSet, LinkStream};

use crate::synth::RouterRedirect;

#[derive(Debug, Parser)]
#[command(
    name = "lstream",
    version,
    about = "Analyze link streams: stream-graph metrics, temporal paths, joint frequency-structure decomposition and filtering"
)]
pub struct Cli {
    /// Domain configuration JSON (times, samples, relations, dictionary, gains)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Stdout report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the command's data product to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar stream metrics plus a per-node degree/clustering table
    Stats(StatsArgs),
    /// Fourier-Structure decomposition into a coefficient table
    Decompose(DecomposeArgs),
    /// Joint frequency-structure filtering
    Filter(FilterArgs),
    /// Cross-correlation surface over time and relation lags
    Xcorr(XcorrArgs),
    /// Shortest / fastest / foremost temporal paths
    Paths(PathsArgs),
    /// Per-sample k-core of the snapshot graphs
    Kcore(KcoreArgs),
    /// Deterministic synthetic scenarios with ground-truth sidecars
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    input: StreamInput,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Stream file to decompose
    #[arg(long)]
    input: PathBuf,
    /// Also invert the coefficients and report the reconstruction error
    #[arg(long)]
    roundtrip: bool,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Stream file to filter
    #[arg(long)]
    input: PathBuf,
    /// Impulse response file: comma- or line-separated taps
    #[arg(long)]
    impulse: Option<PathBuf>,
    /// Gains JSON ({"sigma": [...], "nu": [[...]]}); defaults to the
    /// config's gains, or unit gains
    #[arg(long)]
    gains: Option<PathBuf>,
    /// Time-axis boundary handling
    #[arg(long, value_enum, default_value_t = Mode::Circular)]
    mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Circular,
    Linear,
}

#[derive(Debug, Args)]
pub struct XcorrArgs {
    /// First stream (the one being shifted)
    #[arg(long)]
    input: PathBuf,
    /// Second stream
    #[arg(long)]
    other: PathBuf,
    /// Restrict reported time lags to |tau| <= this many seconds
    #[arg(long)]
    max_lag: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[command(flatten)]
    input: StreamInput,
    /// Source node
    #[arg(long)]
    from: String,
    /// Target node
    #[arg(long)]
    to: String,
    /// Earliest departure time (default: t_start)
    #[arg(long)]
    alpha: Option<f64>,
    /// Latest arrival time (default: t_end; unused by foremost)
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, value_enum)]
    kind: PathKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    Shortest,
    Fastest,
    Foremost,
}

#[derive(Debug, Args)]
pub struct KcoreArgs {
    #[command(flatten)]
    input: StreamInput,
    /// Minimum snapshot degree
    #[arg(long)]
    k: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scenario to generate
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Number of time samples
    #[arg(long, default_value_t = 128)]
    samples: usize,
    /// Number of relations
    #[arg(long, default_value_t = 8)]
    relations: usize,
    /// Pulse period in samples
    #[arg(long, default_value_t = 32)]
    period: usize,
    /// Redirection delay in samples
    #[arg(long, default_value_t = 4)]
    tau_steps: usize,
    /// Redirection offset along the relation axis
    #[arg(long, default_value_t = 3)]
    eta: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    RouterRedirect,
}

/// Exactly one of a weighted stream file or an event-set file.
#[derive(Debug, Args)]
pub struct StreamInput {
    /// Stream file (instantaneous or interval schema)
    #[arg(long, conflicts_with = "events")]
    input: Option<PathBuf>,
    /// Event-set file (interval schema, undirected activity)
    #[arg(long)]
    events: Option<PathBuf>,
    /// Activity threshold when deriving events from a weighted stream
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

pub struct CliError {
    pub usage: bool,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            usage: true,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            usage: false,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.usage {
            1
        } else {
            2
        }
    }
}

impl From<linkstream::Error> for CliError {
    fn from(e: linkstream::Error) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e.to_string())
    }
}

type CmdResult = Result<String, CliError>;

pub fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Stats(args) => cmd_stats(&cli, args),
        Command::Decompose(args) => cmd_decompose(&cli, args),
        Command::Filter(args) => cmd_filter(&cli, args),
        Command::Xcorr(args) => cmd_xcorr(&cli, args),
        Command::Paths(args) => cmd_paths(&cli, args),
        Command::Kcore(args) => cmd_kcore(&cli, args),
        Command::Synth(args) => cmd_synth(&cli, args),
    }
}

fn require_config(cli: &Cli) -> Result<DomainConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::usage("this command needs --config <json>"))?;
    DomainConfig::load(path).map_err(CliError::from)
}

fn load_stream(cli: &Cli, path: &Path) -> Result<(DomainConfig, LinkStream), CliError> {
    let config = require_config(cli)?;
    let stream = io::parse_stream(path, &config)?;
    Ok((config, stream))
}

/// Resolves a `StreamInput` into both domain views.
fn load_views(
    cli: &Cli,
    input: &StreamInput,
) -> Result<(DomainConfig, LinkStream, EdgeEventSet), CliError> {
    let config = require_config(cli)?;
    match (&input.input, &input.events) {
        (Some(path), None) => {
            let stream = io::parse_stream(path, &config)?;
            let events = to_event_set(&stream, input.threshold)?;
            Ok((config, stream, events))
        }
        (None, Some(path)) => {
            let events =
                io::parse_event_set_with_domain(path, config.t_start, config.t_end)?;
            let stream = from_event_set(&events, &config.grid()?)?;
            Ok((config, stream, events))
        }
        _ => Err(CliError::usage(
            "exactly one of --input or --events is required",
        )),
    }
}

fn dictionary_or_default(
    config: &DomainConfig,
    num_relations: usize,
) -> Result<StructuralDictionary, CliError> {
    Ok(match config.structural_dictionary()? {
        Some(d) => d,
        // without a declared dictionary every relation is its own block
        None => StructuralDictionary::singletons(num_relations)?,
    })
}

/// Writes a data product to `--out`, or returns it as the payload.
fn emit(cli: &Cli, data: String, report: Value) -> CmdResult {
    match &cli.out {
        Some(path) => {
            fs::write(path, data)?;
            Ok(render_report(cli, report))
        }
        None => Ok(data),
    }
}

fn render_report(cli: &Cli, report: Value) -> String {
    match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut out = String::from("field,value\n");
            flatten_json("", &report, &mut out);
            out
        }
    }
}

fn flatten_json(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push(',');
            match other {
                Value::String(s) => out.push_str(s),
                v => out.push_str(&v.to_string()),
            }
            out.push('\n');
        }
    }
}

fn cmd_stats(cli: &Cli, args: &StatsArgs) -> CmdResult {
    let (_, stream, events) = load_views(cli, &args.input)?;
    let reg = signal::regularity(&stream);
    let density = if events.num_nodes() >= 2 {
        Some(graph::density(&events)?)
    } else {
        None
    };
    let mut nodes = Vec::new();
    for name in events.nodes() {
        let degree = graph::degree(&events, name)?;
        let cc = graph::clustering_coefficient(&events, name)?;
        nodes.push(json!({
            "node": name,
            "degree": degree,
            "clustering": cc,
        }));
    }
    let report = json!({
        "num_links": graph::num_links(&events),
        "density": density,
        "energy": signal::energy(&stream),
        "regularity": reg.reg,
        "nodes": nodes,
    });
    match cli.format {
        Format::Json => Ok(render_report(cli, report)),
        Format::Csv => {
            let mut out = String::from("kind,name,value,clustering\n");
            out.push_str(&format!("metric,num_links,{},\n", graph::num_links(&events)));
            if let Some(d) = density {
                out.push_str(&format!("metric,density,{d},\n"));
            }
            out.push_str(&format!("metric,energy,{},\n", signal::energy(&stream)));
            out.push_str(&format!("metric,regularity,{},\n", reg.reg));
            for name in events.nodes() {
                let degree = graph::degree(&events, name)?;
                let cc = graph::clustering_coefficient(&events, name)?
                    .map(|c| c.to_string())
                    .unwrap_or_default();
                out.push_str(&format!("node,{name},{degree},{cc}\n"));
            }
            Ok(out)
        }
    }
}

fn cmd_decompose(cli: &Cli, args: &DecomposeArgs) -> CmdResult {
    let (config, stream) = load_stream(cli, &args.input)?;
    let dict = dictionary_or_default(&config, stream.num_relations())?;
    let basis = build_basis(stream.space(), &dict)?;
    let coeffs = fs_transform(&stream, &basis)?;
    let energy = signal::energy(&stream);
    let mut report = json!({
        "num_frequencies": coeffs.num_frequencies(),
        "num_atoms": coeffs.num_atoms(),
        "stream_energy": energy,
        "coefficient_energy": coeffs.energy(),
    });
    if args.roundtrip {
        let back = fs_inverse(&coeffs, &basis)?;
        let err = back
            .weights()
            .iter()
            .zip(stream.weights().iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        report["roundtrip_max_error"] = json!(err);
    }
    emit(cli, io::coefficients_to_string(&coeffs), report)
}

fn parse_impulse(path: &Path) -> Result<TimeFilter, CliError> {
    let text = fs::read_to_string(path)?;
    let mut taps = Vec::new();
    for piece in text.split([',', '\n', '\r']).map(str::trim) {
        if piece.is_empty() {
            continue;
        }
        let tap: f64 = piece
            .parse()
            .map_err(|_| CliError::data(format!("invalid impulse tap {piece:?}")))?;
        taps.push(tap);
    }
    TimeFilter::new(taps).map_err(CliError::from)
}

fn cmd_filter(cli: &Cli, args: &FilterArgs) -> CmdResult {
    let (config, stream) = load_stream(cli, &args.input)?;
    let dict = dictionary_or_default(&config, stream.num_relations())?;
    let basis = build_basis(stream.space(), &dict)?;

    let filter = match &args.impulse {
        Some(path) => parse_impulse(path)?,
        None => TimeFilter::unit_impulse(stream.grid()),
    };
    let gains_config = match &args.gains {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            Some(serde_json::from_str::<io::GainsConfig>(&text).map_err(linkstream::Error::from)?)
        }
        None => config.gains.clone(),
    };
    let gains = match gains_config {
        Some(g) => StructuralGains::new(g.sigma, g.nu, &basis)?,
        None => StructuralGains::unit(&basis),
    };

    let mode = match args.mode {
        Mode::Circular => ConvolutionMode::Circular,
        Mode::Linear => ConvolutionMode::Linear,
    };
    let smoothed = time_convolve(&stream, &filter, mode)?;
    let kernel = build_qfilt(&basis, &gains)?;
    let filtered = relational_convolve(&smoothed, &kernel)?;
    let out_stream = filtered.stream()?;
    let report = json!({
        "mode": match mode {
            ConvolutionMode::Circular => "circular",
            ConvolutionMode::Linear => "linear",
        },
        "energy_in": signal::energy(&stream),
        "energy_out": signal::energy(&out_stream),
        "max_virtual_leakage": filtered.max_virtual_leakage(),
    });
    emit(cli, io::stream_to_string(&out_stream), report)
}

fn lag_to_json(dt: f64, lag: Option<(i64, usize, f64)>) -> Value {
    match lag {
        Some((steps, eta, value)) => json!({
            "tau_steps": steps,
            "tau": steps as f64 * dt,
            "eta": eta,
            "value": value,
        }),
        None => Value::Null,
    }
}

fn cmd_xcorr(cli: &Cli, args: &XcorrArgs) -> CmdResult {
    let (config, s1) = load_stream(cli, &args.input)?;
    let s2 = io::parse_stream(&args.other, &config)?;
    let surface = signal::cross_correlation(&s1, &s2)?;
    let dt = surface.dt();
    let max_steps = match args.max_lag {
        Some(seconds) => {
            if seconds < 0.0 {
                return Err(CliError::usage("--max-lag must be non-negative"));
            }
            Some((seconds / dt).floor() as i64)
        }
        None => None,
    };
    let mut table = String::from("tau,eta,value\n");
    for (steps, eta, value) in surface.iter_lags() {
        if max_steps.map_or(true, |m| steps.abs() <= m) {
            table.push_str(&format!(
                "{},{eta},{}\n",
                io::format_float(steps as f64 * dt),
                io::format_float(value)
            ));
        }
    }
    let report = json!({
        "dt": dt,
        "argmax": lag_to_json(dt, surface.argmax_within(max_steps)),
        "off_origin_argmax": lag_to_json(dt, surface.argmax_off_origin_within(max_steps)),
    });
    match &cli.out {
        Some(path) => {
            fs::write(path, table)?;
            Ok(render_report(cli, report))
        }
        // without --out, ship the report alongside nothing else in csv
        // mode the table is the more useful payload
        None => match cli.format {
            Format::Csv => Ok(table),
            Format::Json => Ok(render_report(cli, report)),
        },
    }
}

fn path_report(kind: PathKind, found: Option<&TemporalPath>, list: &EventList, alpha: f64) -> Value {
    match found {
        None => json!({
            "kind": kind_name(kind),
            "found": false,
        }),
        Some(p) => {
            let events: Vec<Value> = p
                .hops
                .iter()
                .map(|h| {
                    json!({
                        "t": h.t,
                        "from": list.node_name(h.from),
                        "to": list.node_name(h.to),
                    })
                })
                .collect();
            let metric = match kind {
                PathKind::Shortest => json!({"distance": p.length()}),
                PathKind::Fastest => json!({"latency": p.duration()}),
                PathKind::Foremost => json!({"time_to_reach": p.arrival() - alpha}),
            };
            json!({
                "kind": kind_name(kind),
                "found": true,
                "length": p.length(),
                "duration": p.duration(),
                "arrival": p.arrival(),
                "metric": metric,
                "events": events,
            })
        }
    }
}

fn kind_name(kind: PathKind) -> &'static str {
    match kind {
        PathKind::Shortest => "shortest",
        PathKind::Fastest => "fastest",
        PathKind::Foremost => "foremost",
    }
}

fn cmd_paths(cli: &Cli, args: &PathsArgs) -> CmdResult {
    let (config, _, events) = load_views(cli, &args.input)?;
    let grid = config.grid()?;
    let list = EventList::from_event_set(&events, &grid)?;
    let alpha = args.alpha.unwrap_or(config.t_start);
    let omega = args.omega.unwrap_or(config.t_end);
    if alpha > omega {
        return Err(CliError::usage("--alpha must not exceed --omega"));
    }
    let path = match args.kind {
        PathKind::Shortest => paths::shortest_path(&list, alpha, &args.from, omega, &args.to)?,
        PathKind::Fastest => paths::fastest_path(&list, alpha, &args.from, omega, &args.to)?,
        PathKind::Foremost => paths::foremost_path(&list, alpha, &args.from, &args.to)?,
    };
    match cli.format {
        Format::Json => Ok(render_report(
            cli,
            path_report(args.kind, path.as_ref(), &list, alpha),
        )),
        Format::Csv => {
            let mut out = String::from("t,from,to\n");
            if let Some(p) = &path {
                for h in &p.hops {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        io::format_float(h.t),
                        list.node_name(h.from),
                        list.node_name(h.to)
                    ));
                }
            }
            Ok(out)
        }
    }
}

fn cmd_kcore(cli: &Cli, args: &KcoreArgs) -> CmdResult {
    if args.k == 0 {
        return Err(CliError::usage("--k must be at least 1"));
    }
    let (config, _, events) = load_views(cli, &args.input)?;
    let grid = config.grid()?;
    let cores = graph::kcore(&events, args.k, &grid);
    let mut table = String::from("sample,t,node\n");
    for (j, core) in cores.iter().enumerate() {
        for &v in core {
            table.push_str(&format!(
                "{j},{},{}\n",
                io::format_float(grid.midpoint(j)),
                events.node_name(v)
            ));
        }
    }
    let occupied = cores.iter().filter(|c| !c.is_empty()).count();
    let report = json!({
        "k": args.k,
        "samples": cores.len(),
        "samples_with_core": occupied,
    });
    emit(cli, table, report)
}

fn cmd_synth(cli: &Cli, args: &SynthArgs) -> CmdResult {
    let Scenario::RouterRedirect = args.scenario;
    let params = RouterRedirect {
        samples: args.samples,
        relations: args.relations,
        period: args.period,
        tau_steps: args.tau_steps,
        eta: args.eta,
        seed: args.seed,
    };
    params.validate().map_err(CliError::usage)?;
    let out = cli
        .out
        .as_ref()
        .ok_or_else(|| CliError::usage("synth needs --out <stream.csv>"))?;
    let (stream, sidecar) = params.generate();
    io::write_stream(&stream, out)?;
    let meta_path = sidecar_path(out);
    fs::write(
        &meta_path,
        format!("{}\n", serde_json::to_string_pretty(&sidecar).unwrap()),
    )?;
    let report = json!({
        "stream": out.display().to_string(),
        "sidecar": meta_path.display().to_string(),
        "ground_truth": serde_json::to_value(&sidecar.ground_truth).unwrap(),
    });
    Ok(render_report(cli, report))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}
