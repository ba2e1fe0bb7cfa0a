use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pickdrop::generator::{generate, GeneratorSpec, Kind, Placement, Sidecar};
use pickdrop::heavy_hitter::{HeavyHitter, HeavyHitterConfig, HeavyReport, ParamOverrides};
use pickdrop::moment_estimator::{estimate_fk_report, FkConfig};
use pickdrop::param_engine::{ParamSet, DEFAULT_REPS_CONSTANT};
use pickdrop::stream_model::format::{open_binary, read_stream_file, write_binary_file, write_text, MAGIC};
use pickdrop::stream_model::{ElementId, ExactStats, MatrixOverlay, StreamView};
use pickdrop::verification::oracle::exact_distribution;
use pickdrop::verification::pairs::check_lemma_exhaustive;
use pickdrop::verification::promise::{promise_problem_experiment, PromiseConfig};
use pickdrop::verification::theorems::{
    calibrate, calibrate_moment, check_theorem_2_1, check_theorem_3_1, ALPHA_GRID, BETA_GRID,
};
use pickdrop::verification::DEFAULT_TRIALS;
use pickdrop::Error;
use serde::Serialize;
use serde_json::{json, Value};

/// `println!` that exits quietly when stdout is a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {
        if let Err(e) = writeln!(io::stdout(), $($arg)*) {
            if e.kind() != io::ErrorKind::BrokenPipe {
                eprintln!("pickdrop: {e}");
                std::process::exit(3);
            }
            std::process::exit(0);
        }
    };
}

const SCHEMA: u32 = 1;
const CHUNK: usize = 4096;

#[derive(Parser)]
#[command(name = "pickdrop", version, about = "Pick-and-drop sampling for heavy elements and frequency moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic stream and its `<out>.stats.json` sidecar.
    Generate(GenerateArgs),
    /// Find a heavy element in one pass.
    Heavy(HeavyArgs),
    /// Estimate the k-th frequency moment.
    Fk(FkArgs),
    /// Ground-truth checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Time the finder and the moment estimator on a generated stream.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    PlantedHeavy,
    Zipf,
    UniformDistinct,
    AllEqual,
    PromiseCase1,
    PromiseCase2,
    AdversarialPlacement,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    UniformRows,
    BurstyPrefix,
    Random,
}

impl From<PlacementArg> for Placement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::UniformRows => Placement::UniformRows,
            PlacementArg::BurstyPrefix => Placement::BurstyPrefix,
            PlacementArg::Random => Placement::Random,
        }
    }
}

#[derive(Args)]
struct StreamSpecArgs {
    #[arg(long, value_enum, default_value = "planted-heavy")]
    kind: KindArg,
    /// Universe size.
    #[arg(long)]
    n: u64,
    /// Stream length; 0 lets the promise families choose `r * floor(n / r)`.
    #[arg(long, default_value_t = 0)]
    m: u64,
    #[arg(long, default_value_t = 0)]
    heavy_frequency: u64,
    #[arg(long, default_value_t = 1)]
    heavy_id: u32,
    #[arg(long, value_enum, default_value = "uniform-rows")]
    placement: PlacementArg,
    /// Zipf exponent.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Moment order; sets the promise-problem row count.
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl StreamSpecArgs {
    fn spec(&self) -> GeneratorSpec {
        let kind = match self.kind {
            KindArg::PlantedHeavy => Kind::PlantedHeavy,
            KindArg::Zipf => Kind::Zipf { s: self.s },
            KindArg::UniformDistinct => Kind::UniformDistinct,
            KindArg::AllEqual => Kind::AllEqual,
            KindArg::PromiseCase1 => Kind::PromiseCase1,
            KindArg::PromiseCase2 => Kind::PromiseCase2,
            KindArg::AdversarialPlacement => Kind::AdversarialPlacement,
        };
        GeneratorSpec {
            heavy_frequency: self.heavy_frequency,
            heavy_id: self.heavy_id,
            placement: self.placement.into(),
            k: self.k,
            ..GeneratorSpec::new(kind, self.n, self.m)
        }
        .seed(self.seed)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    spec: StreamSpecArgs,
    #[arg(long)]
    out: PathBuf,
    /// One id per line instead of the binary format.
    #[arg(long)]
    text: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Universe size for text input; defaults to the largest id.
    #[arg(long)]
    universe: Option<u64>,
}

#[derive(Args)]
struct HeavyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Stream length `F_1`, known up front.
    #[arg(long, conflicts_with = "doubling")]
    length: Option<u64>,
    /// Unknown length (the default).
    #[arg(long)]
    doubling: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPS_CONSTANT)]
    reps_constant: f64,
    /// Run a single delta instead of the whole grid.
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    lambda: Option<u64>,
    /// Matrix width override.
    #[arg(long)]
    t: Option<u64>,
    /// Independent copies of the finder, merged by max.
    #[arg(long, default_value_t = 1)]
    boost: u32,
    /// Ground truth to check the answer against; defaults to `<input>.stats.json` when present.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FkArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long, default_value_t = 5)]
    trials: u32,
    #[arg(long, default_value_t = 256)]
    buckets: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Verify {
    /// Exact law of the sampler's output on a small matrix.
    Oracle(OracleArgs),
    /// Fixed-shape bound on one matrix, or the calibration sweep.
    Thm21(Thm21Args),
    /// Derived-shape bound on one stream, or the calibration sweep.
    Thm31(Thm31Args),
    /// Exhaustive winning-pairs check.
    Pairs(PairsArgs),
    /// The two-case promise problem.
    Promise(PromiseArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// Rows separated by `;`, ids by `,`, e.g. `1,2;2,1`.
    #[arg(long, conflicts_with = "input")]
    matrix: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Matrix width when reading `--input`.
    #[arg(long)]
    t: Option<usize>,
}

impl MatrixArgs {
    fn overlay(&self) -> Result<MatrixOverlay, Failure> {
        match (&self.matrix, &self.input, self.t) {
            (Some(m), _, _) => {
                let rows = m
                    .split(';')
                    .map(|row| {
                        row.split(',')
                            .map(|v| v.trim().parse::<u32>().map_err(|_| Failure::usage(format!("bad matrix entry {v:?}"))))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(MatrixOverlay::from_rows(&rows)?)
            }
            (None, Some(path), Some(t)) => Ok(MatrixOverlay::new(&read_stream_file(path)?, t)?),
            _ => Err(Failure::usage("give --matrix, or --input with --t")),
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Thm21Args {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    /// Heavy id; defaults to the most frequent.
    #[arg(long)]
    heavy: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep the (alpha, beta) grid over the built-in family instead.
    #[arg(long)]
    calibrate: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Thm31Args {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long)]
    heavy: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep the (alpha, beta) grid over planted streams of these sizes.
    #[arg(long, value_delimiter = ',')]
    calibrate: Option<Vec<u64>>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PairsArgs {
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, default_value_t = 3)]
    max_entry: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PromiseArgs {
    #[arg(long, default_value_t = 256)]
    n: u64,
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Repetitions `T`; defaults to the smallest giving a miss bound below 1/3.
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    spec: StreamSpecArgs,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Skip the moment estimator.
    #[arg(long)]
    heavy_only: bool,
    #[arg(long)]
    json: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => 3,
            Error::OutOfRange { .. }
            | Error::Format(_)
            | Error::DimensionMismatch { .. }
            | Error::PrematureEnd { .. } => 4,
            Error::GuardExceeded { .. } => 5,
            Error::InvalidParameter(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Failure { code: 3, message: e.to_string() }
        } else {
            Failure { code: 4, message: format!("sidecar: {e}") }
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("pickdrop: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Heavy(a) => cmd_heavy(&a),
        Command::Fk(a) => cmd_fk(&a),
        Command::Verify(v) => match v {
            Verify::Oracle(a) => cmd_oracle(&a),
            Verify::Thm21(a) => cmd_thm21(&a),
            Verify::Thm31(a) => cmd_thm31(&a),
            Verify::Pairs(a) => cmd_pairs(&a),
            Verify::Promise(a) => cmd_promise(&a),
        },
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pickdrop: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> CliResult {
    let Ok(v) = std::env::var("PICKDROP_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("PICKDROP_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure { code: 1, message: e.to_string() })
}

fn emit(value: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn sidecar_path(stream: &Path) -> PathBuf {
    let mut s = stream.as_os_str().to_owned();
    s.push(".stats.json");
    PathBuf::from(s)
}

fn load_sidecar(explicit: Option<&Path>, input: &Path) -> Result<Option<(PathBuf, Sidecar)>, Failure> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let p = sidecar_path(input);
            if !p.exists() {
                return Ok(None);
            }
            p
        }
    };
    let sidecar: Sidecar = serde_json::from_reader(io::BufReader::new(File::open(&path)?))?;
    Ok(Some((path, sidecar)))
}

fn is_binary(path: &Path) -> io::Result<bool> {
    use std::io::Read;
    let mut magic = [0u8; 4];
    let n = File::open(path)?.read(&mut magic)?;
    Ok(n == 4 && magic == MAGIC)
}

/// Feeds the input to `sink` in chunks, reading binary files in one pass.
fn for_each_chunk(input: &InputArgs, mut sink: impl FnMut(&[ElementId]) -> CliResult) -> Result<u64, Failure> {
    if is_binary(&input.input)? {
        let mut reader = open_binary(&input.input)?;
        let universe = input.universe.unwrap_or(reader.header().universe);
        if universe != reader.header().universe {
            return Err(Failure::usage("--universe disagrees with the binary header"));
        }
        let mut buf = Vec::with_capacity(CHUNK);
        loop {
            buf.clear();
            for item in reader.by_ref().take(CHUNK) {
                buf.push(item?);
            }
            if buf.is_empty() {
                break;
            }
            sink(&buf)?;
        }
        Ok(universe)
    } else {
        let stream = read_stream_file(&input.input)?;
        let universe = input.universe.unwrap_or(stream.universe());
        let stream = StreamView::from_ids(stream.into_items(), universe)?;
        for chunk in stream.items().chunks(CHUNK) {
            sink(chunk)?;
        }
        Ok(universe)
    }
}

fn universe_of(input: &InputArgs) -> Result<u64, Failure> {
    if let Some(n) = input.universe {
        return Ok(n);
    }
    if is_binary(&input.input)? {
        Ok(open_binary(&input.input)?.header().universe)
    } else {
        Ok(read_stream_file(&input.input)?.universe())
    }
}

fn cmd_generate(a: &GenerateArgs) -> CliResult {
    let stream = generate(&a.spec.spec())?;
    if a.text {
        let mut w = BufWriter::new(File::create(&a.out)?);
        write_text(&mut w, &stream)?;
    } else {
        write_binary_file(&a.out, &stream)?;
    }
    let sidecar = Sidecar::from_stats(&ExactStats::from_stream(&stream));
    let side = sidecar_path(&a.out);
    let mut w = BufWriter::new(File::create(&side)?);
    serde_json::to_writer_pretty(&mut w, &sidecar)?;
    writeln!(w)?;
    w.flush()?;
    if a.json {
        emit(&json!({
            "schema": SCHEMA,
            "stream": a.out,
            "sidecar": side,
            "universe": sidecar.universe,
            "length": sidecar.length,
            "max_element": sidecar.max_element,
            "max_frequency": sidecar.max_frequency,
        }))
    } else {
        say!(
            "wrote {} items over [1, {}] to {} (stats in {})",
            sidecar.length,
            sidecar.universe,
            a.out.display(),
            side.display()
        );
        if let Some(id) = sidecar.max_element {
            let heavy = sidecar.heavy.get(&a.spec.k).copied().flatten();
            say!("most frequent id {id} x {}, heavy for k={}: {:?}", sidecar.max_frequency, a.spec.k, heavy);
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Soundness {
    sidecar: PathBuf,
    true_frequency: u64,
    holds: bool,
    /// `(1 - eps) f <= f~`, for the sidecar's most frequent id.
    accurate: Option<bool>,
}

#[derive(Serialize)]
struct HeavyOutput<'a> {
    schema: u32,
    element: u32,
    estimate: u64,
    mode: &'a pickdrop::Mode,
    params: &'a [ParamSet],
    repetitions: &'a [u64],
    items: u64,
    peak_live_runs: u64,
    fallback: Option<u64>,
    soundness: Option<Soundness>,
}

fn cmd_heavy(a: &HeavyArgs) -> CliResult {
    let n = universe_of(&a.input)?;
    let mut cfg = HeavyHitterConfig::new(n, a.k, a.eps).seed(a.seed).reps_constant(a.reps_constant);
    cfg = match a.length {
        Some(len) => cfg.known_length(len),
        None => cfg.doubling(),
    };
    cfg.boost = a.boost;
    cfg.overrides = ParamOverrides {
        delta: a.delta,
        lambda: a.lambda,
        cols: a.t,
    };
    let mut hh = HeavyHitter::new(cfg)?;
    for_each_chunk(&a.input, |chunk| Ok(hh.push_chunk(chunk)?))?;
    let report: HeavyReport = hh.finish()?;
    let e = report.estimate;
    let soundness = load_sidecar(a.sidecar.as_deref(), &a.input.input)?.map(|(path, s)| {
        let f = s.frequency(e.element);
        Soundness {
            sidecar: path,
            true_frequency: f,
            holds: e.count <= f,
            accurate: s.max_element.filter(|&id| id == e.element.get()).map(|_| e.count as f64 >= (1.0 - a.eps) * f as f64),
        }
    });
    // the generation whose length guess covers the whole stream
    let governing = report
        .generations
        .iter()
        .find(|g| g.guess >= report.items)
        .or(report.generations.last());
    let out = HeavyOutput {
        schema: SCHEMA,
        element: e.element.get(),
        estimate: e.count,
        mode: &report.mode,
        params: governing.map_or(&[][..], |g| &g.params),
        repetitions: governing.map_or(&[][..], |g| &g.repetitions),
        items: report.items,
        peak_live_runs: report.peak_live_runs,
        fallback: report.candidates.fallback.map(|f| f.count),
        soundness,
    };
    if a.json {
        return emit(&out);
    }
    if e.is_sentinel() {
        say!("no element sampled ({} items)", out.items);
    } else {
        say!("element {} with estimated frequency >= {}", out.element, out.estimate);
    }
    say!("{} items, {} generations, peak {} live runs", out.items, report.generations.len(), out.peak_live_runs);
    for (p, t) in out.params.iter().zip(out.repetitions) {
        say!("  delta={:<4} t={:<8} lambda={:<6} r={:<6} T={t}", p.delta, p.cols, p.lambda, p.rows);
    }
    if let Some(s) = &out.soundness {
        say!(
            "true frequency {} per {}: estimate {} it",
            s.true_frequency,
            s.sidecar.display(),
            if s.holds { "does not exceed" } else { "EXCEEDS" }
        );
    }
    Ok(())
}

fn cmd_fk(a: &FkArgs) -> CliResult {
    let n = universe_of(&a.input)?;
    let mut cfg = FkConfig::new(n, a.k, a.eps).seed(a.seed).trials(a.trials);
    cfg.levels = a.levels;
    cfg.buckets = a.buckets;
    cfg.validate()?;
    let mut items = Vec::new();
    for_each_chunk(&a.input, |chunk| {
        items.extend_from_slice(chunk);
        Ok(())
    })?;
    let report = estimate_fk_report(items, &cfg)?;
    let truth = load_sidecar(a.sidecar.as_deref(), &a.input.input)?.and_then(|(_, s)| s.moment(a.k));
    let peak = report.trials.iter().map(|t| t.peak_live_runs).max().unwrap_or(0);
    if a.json {
        return emit(&json!({
            "schema": SCHEMA,
            "k": a.k,
            "estimate": report.estimate,
            "items": report.items,
            "trials": report.trials.iter().map(|t| t.estimate).collect::<Vec<_>>(),
            "levels": report.median_trial().levels,
            "peak_live_runs": peak,
            "true_moment": truth.map(|t| t.to_string()),
            "ratio": truth.map(|t| report.estimate / t as f64),
        }));
    }
    say!("F_{} estimate {:.6e} over {} items", a.k, report.estimate, report.items);
    if let Some(t) = truth {
        say!("true F_{} {} (ratio {:.3})", a.k, t, report.estimate / t as f64);
    }
    say!("peak {peak} live runs in one trial");
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> CliResult {
    let ov = a.matrix.overlay()?;
    let d = exact_distribution(&ov, a.lambda)?;
    let outcomes = d.outcomes();
    if a.json {
        return emit(&json!({
            "schema": SCHEMA,
            "rows": ov.rows(),
            "cols": ov.cols(),
            "lambda": a.lambda,
            "tuples": d.tuples(),
            "outcomes": outcomes,
            "count_law": d.count_law(),
        }));
    }
    say!("{}x{} matrix, lambda={}, {} index tuples", ov.rows(), ov.cols(), a.lambda, d.tuples());
    for o in outcomes {
        say!("  S={:<6} C={:<6} P={:.6} ({} tuples)", o.element.get(), o.count, o.probability, o.tuples);
    }
    Ok(())
}

fn cmd_thm21(a: &Thm21Args) -> CliResult {
    if a.calibrate {
        let cal = calibrate(&ALPHA_GRID, &BETA_GRID, a.seed)?;
        if a.json {
            return emit(&json!({ "schema": SCHEMA, "calibration": cal }));
        }
        print_calibration(&cal);
        return Ok(());
    }
    let ov = a.matrix.overlay()?;
    let rep = check_theorem_2_1(&ov, a.lambda, a.alpha, a.beta, a.heavy.map(ElementId), a.trials, a.seed)?;
    if a.json {
        return emit(&json!({ "schema": SCHEMA, "report": rep }));
    }
    say!(
        "{}x{} lambda={} heavy={} f={}: P={:.6}{} bound f/2t={:.6}",
        rep.rows,
        rep.cols,
        rep.lambda,
        rep.heavy.get(),
        rep.hypothesis.frequency,
        rep.probability.value,
        if rep.probability.exact { " (exact)" } else { "" },
        rep.bound
    );
    say!(
        "hypothesis {} <= f <= {}: {}; verdict {:?}",
        a.alpha * rep.hypothesis.load,
        rep.hypothesis.upper,
        rep.hypothesis.holds,
        rep.verdict
    );
    Ok(())
}

fn print_calibration(cal: &pickdrop::verification::Calibration) {
    say!("{} instances", cal.instances);
    for c in &cal.cells {
        say!("  alpha={:<4} beta={:<4} eligible={:<4} violations={}", c.alpha, c.beta, c.eligible, c.violations);
    }
    match cal.chosen {
        Some((a, b)) => say!("chosen alpha={a} beta={b}"),
        None => say!("no feasible pair"),
    }
}

fn cmd_thm31(a: &Thm31Args) -> CliResult {
    if let Some(universes) = &a.calibrate {
        let (cal, _) = calibrate_moment(&ALPHA_GRID, &BETA_GRID, universes, a.trials, a.seed)?;
        if a.json {
            return emit(&json!({ "schema": SCHEMA, "calibration": cal }));
        }
        print_calibration(&cal);
        return Ok(());
    }
    let path = a.input.as_ref().ok_or_else(|| Failure::usage("give --input or --calibrate"))?;
    let stream = read_stream_file(path)?;
    let rep = check_theorem_3_1(&stream, a.k, a.alpha, a.beta, a.heavy.map(ElementId), a.trials, a.seed)?;
    if a.json {
        return emit(&json!({ "schema": SCHEMA, "report": rep }));
    }
    let p = &rep.params;
    say!(
        "n={} k={} heavy={} f={}: delta={} t={} lambda={} r={}",
        rep.universe,
        rep.k,
        rep.heavy.get(),
        rep.hypothesis.frequency,
        p.delta,
        p.cols,
        p.lambda,
        p.rows
    );
    say!("P={:.6} over {} runs, bound {:.6}", rep.probability.value, rep.probability.trials, rep.bound);
    say!(
        "hypothesis {:.2} <= f <= {:.2}: {}; verdict {:?}; moment inequalities hold: {}",
        a.alpha * rep.hypothesis.residual_root,
        rep.hypothesis.upper,
        rep.hypothesis.holds,
        rep.verdict,
        rep.sanity.all_hold()
    );
    Ok(())
}

fn cmd_pairs(a: &PairsArgs) -> CliResult {
    let rep = check_lemma_exhaustive(a.max_len, a.max_entry)?;
    if a.json {
        return emit(&json!({ "schema": SCHEMA, "report": rep }));
    }
    say!(
        "{} cases (length <= {}, entries <= {}), {} with positive surplus, {} counterexamples",
        rep.cases, rep.max_len, rep.max_entry, rep.positive, rep.counterexamples
    );
    if let Some(c) = &rep.first_counterexample {
        say!("first counterexample U={:?} W={:?}", c.u(), c.w());
    }
    Ok(())
}

fn cmd_promise(a: &PromiseArgs) -> CliResult {
    let mut cfg = PromiseConfig::new(a.n, a.k, a.trials);
    cfg.reps = a.reps;
    cfg.seed = a.seed;
    let rep = promise_problem_experiment(&cfg)?;
    if a.json {
        return emit(&json!({ "schema": SCHEMA, "report": rep }));
    }
    say!("r={} t={} T={} over {} trials per case", rep.rows, rep.cols, rep.reps, rep.trials);
    say!("case 1 answered case 2: {}", rep.case1_false_positives);
    say!(
        "case 2, z never sampled: {:.4} (bound {:.4}); answered case 1: {:.4} (bound {:.4})",
        rep.case2_never_sampled.value, rep.never_sampled_bound, rep.case2_misses.value, rep.miss_bound
    );
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> CliResult {
    let spec = a.spec.spec();
    let stream = generate(&spec)?;
    let n = stream.universe();
    let m = stream.len() as u64;
    if m == 0 {
        return Err(Failure { code: 2, message: "empty stream; pass --m".into() });
    }

    let cfg = HeavyHitterConfig::new(n, a.spec.k, a.eps).seed(spec.seed).known_length(m);
    let start = Instant::now();
    let mut hh = HeavyHitter::new(cfg)?;
    let runs = hh.live_runs();
    let words = hh.live_state_words();
    hh.push_chunk(stream.items())?;
    let report = hh.finish()?;
    let heavy_secs = start.elapsed().as_secs_f64();

    let fk = if a.heavy_only {
        None
    } else {
        let cfg = FkConfig::new(n, a.spec.k, a.eps).seed(spec.seed);
        let start = Instant::now();
        let r = estimate_fk_report(stream.items().iter().copied(), &cfg)?;
        let secs = start.elapsed().as_secs_f64();
        let truth = ExactStats::from_stream(&stream).moment(a.spec.k).ok();
        Some((r, secs, truth))
    };
    let threads = rayon::current_num_threads();
    if a.json {
        let fk_json: Value = match &fk {
            Some((r, secs, truth)) => json!({
                "estimate": r.estimate,
                "ratio": truth.map(|t| r.estimate / t as f64),
                "seconds": secs,
                "peak_live_runs": r.trials.iter().map(|t| t.peak_live_runs).max(),
            }),
            None => Value::Null,
        };
        return emit(&json!({
            "schema": SCHEMA,
            "universe": n,
            "items": m,
            "threads": threads,
            "heavy": {
                "element": report.estimate.element.get(),
                "estimate": report.estimate.count,
                "live_runs": runs,
                "state_words": words,
                "seconds": heavy_secs,
                "items_per_second": m as f64 / heavy_secs,
            },
            "fk": fk_json,
        }));
    }
    say!("n={n} m={m} threads={threads}");
    say!(
        "heavy: {} runs ({} words), {:.3}s, {:.0} items/s, answer {} x {}",
        runs,
        words,
        heavy_secs,
        m as f64 / heavy_secs,
        report.estimate.element.get(),
        report.estimate.count
    );
    if let Some((r, secs, truth)) = fk {
        let ratio = truth.map(|t| format!(" (ratio {:.3})", r.estimate / t as f64)).unwrap_or_default();
        say!("fk: estimate {:.6e}{ratio}, {secs:.3}s", r.estimate);
    }
    Ok(())
}
