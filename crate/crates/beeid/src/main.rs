//! The `beeid` command-line workbench.
//!
//! Subcommands: `gen` (codebook files), `decode` (run one identification),
//! `estimate` (analytical failure-probability bounds), `simulate` (Monte
//! Carlo sweeps with CSV output), `trellis-stats` (second-order-permanent
//! trellis counters), and `replay` (re-run a recorded manifest).
//!
//! Exit codes: 0 success (a decoder returning "failure" is still a
//! successful run), 2 usage, 3 input-semantic, 4 malformed data, 5 guard.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use beeid_core::bits::Bits;
use beeid_core::codes::{self, CodeError, Codebook, MatchStrategy};
use beeid_core::estimation::{self, Channel, Estimate, EstimationError, ScaledReal};
use beeid_core::identifiers::{self, FailureReason, IdentificationResult, Outcome};
use beeid_core::matching::BipartiteGraph;
use beeid_core::presets;

use beeid::formats::{CodebookFile, OutputsFile, ParsedOutputs, PlotSpec};
use beeid::manifest::{ManifestError, RunManifest};
use beeid::simulate::{self, DecoderSpec, SimError, SimResult};

const EXIT_USAGE: u8 = 2;
const EXIT_SEMANTIC: u8 = 3;
const EXIT_MALFORMED: u8 = 4;
const EXIT_GUARD: u8 = 5;

#[derive(Parser)]
#[command(name = "beeid", version, about = "Joint decoding workbench for the bee-identification problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a codebook JSON file
    Gen(GenArgs),
    /// Identify a set of channel outputs against a codebook
    Decode(DecodeArgs),
    /// Analytical bounds on the probability of erroneous identification
    Estimate(EstimateArgs),
    /// Monte Carlo failure-rate sweep with CSV output
    Simulate(SimulateArgs),
    /// Counters of the second-order-permanent trellis
    TrellisStats(TrellisArgs),
    /// Re-run a recorded manifest and reproduce its outputs
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeFamily {
    Linear,
    Rm,
    Preset,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetName {
    /// Length-7 simplex code (M = 8, d = 4)
    Example1Simplex,
    /// [5,2] code with codewords {00000, 11100, 00111, 11011}
    Example2,
}

#[derive(Args)]
struct GenArgs {
    /// Code family to build
    #[arg(long, value_enum)]
    code: CodeFamily,
    /// Generator matrix file (one 0/1 row per line); only with --code linear
    #[arg(long)]
    generator: Option<PathBuf>,
    /// Reed-Muller order r; only with --code rm
    #[arg(long)]
    r: Option<usize>,
    /// Reed-Muller log-blocklength m; only with --code rm
    #[arg(long)]
    m: Option<usize>,
    /// Built-in reference codebook; only with --code preset
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    /// Where to write the codebook JSON
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderName {
    Jedi,
    Jmdi,
    Jldi,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    codebook: PathBuf,
    /// Channel outputs JSON ({"channel": "bec"|"bsc", "outputs": [...]})
    #[arg(long)]
    outputs: PathBuf,
    #[arg(long, value_enum)]
    decoder: DecoderName,
    /// Pruning radius for jldi
    #[arg(long)]
    radius: Option<usize>,
    /// Number of absentee outputs (M - |outputs|)
    #[arg(long, default_value_t = 0)]
    absent: usize,
    /// Re-run jldi as jmdi when the pruned graph is infeasible
    #[arg(long, default_value_t = false)]
    fallback: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelName {
    Bec,
    Bsc,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long, value_enum)]
    channel: ChannelName,
    #[arg(long)]
    p: f64,
    /// Also compute V (second-order permanent) and the lower bound
    #[arg(long, default_value_t = false)]
    with_v: bool,
    /// Also report the fixed-point closed-form upper bound
    #[arg(long, default_value_t = false)]
    closed_form: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long, value_enum)]
    channel: ChannelName,
    /// Grid LO:HI:STEP (inclusive)
    #[arg(long)]
    p_grid: String,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    decoder: DecoderName,
    #[arg(long)]
    radius: Option<usize>,
    /// Attach analytical bounds to every row
    #[arg(long, default_value_t = false)]
    with_bounds: bool,
    /// Where to write the CSV (plot spec and manifest are written beside it)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrellisArgs {
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<ManifestError> for Failure {
    fn from(e: ManifestError) -> Self {
        fail(EXIT_MALFORMED, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with 2 on usage errors
    let argv: Vec<String> = env::args().skip(1).collect();
    match run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("beeid: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli, argv: &[String]) -> Result<(), Failure> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args, argv),
        Command::Decode(args) => cmd_decode(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args, argv),
        Command::TrellisStats(args) => cmd_trellis_stats(args),
        Command::Replay(args) => cmd_replay(args),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| fail(EXIT_SEMANTIC, format!("{}: {e}", path.display())))
}

fn load_codebook(path: &Path) -> Result<(Codebook, String), Failure> {
    let text = read_file(path)?;
    let file = CodebookFile::parse(&text)
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    let cb = file
        .to_codebook()
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    Ok((cb, file.name))
}

fn code_error_failure(e: CodeError) -> Failure {
    match e {
        CodeError::RankDeficient => fail(EXIT_SEMANTIC, format!("{e}")),
        CodeError::SizeGuard { .. } | CodeError::EnumerationCap { .. } => {
            fail(EXIT_GUARD, format!("guard: {e}"))
        }
        other => fail(EXIT_MALFORMED, format!("{other}")),
    }
}

// ---------------------------------------------------------------- gen

fn cmd_gen(args: GenArgs, argv: &[String]) -> Result<(), Failure> {
    let conflict = |msg: &str| Err(fail(EXIT_USAGE, msg.to_string()));
    let mut manifest = RunManifest::new("gen", &argv[1..], None);
    let (cb, name): (Codebook, String) = match args.code {
        CodeFamily::Linear => {
            if args.r.is_some() || args.m.is_some() || args.preset.is_some() {
                return conflict("--code linear takes only --generator");
            }
            let Some(generator) = args.generator else {
                return conflict("--code linear requires --generator");
            };
            let text = read_file(&generator)?;
            manifest.record_input(&generator)?;
            let rows: Vec<Bits> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    Bits::parse(l.trim()).map_err(|e| {
                        fail(EXIT_MALFORMED, format!("{}: {e}", generator.display()))
                    })
                })
                .collect::<Result<_, _>>()?;
            let cb = codes::build_linear_code(&rows).map_err(code_error_failure)?;
            let name = generator
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "linear".into());
            (cb, name)
        }
        CodeFamily::Rm => {
            if args.generator.is_some() || args.preset.is_some() {
                return conflict("--code rm takes only --r and --m");
            }
            let (Some(r), Some(m)) = (args.r, args.m) else {
                return conflict("--code rm requires --r and --m");
            };
            let cb = codes::build_reed_muller(r, m).map_err(code_error_failure)?;
            (cb, format!("rm-{r}-{m}"))
        }
        CodeFamily::Preset => {
            if args.generator.is_some() || args.r.is_some() || args.m.is_some() {
                return conflict("--code preset takes only --preset");
            }
            let Some(preset) = args.preset else {
                return conflict("--code preset requires --preset");
            };
            match preset {
                PresetName::Example1Simplex => (presets::simplex7(), "example1-simplex".into()),
                PresetName::Example2 => (presets::linear52(), "example2".into()),
            }
        }
    };
    let file = CodebookFile::from_codebook(&cb, &name);
    write_file(&args.out, &file.to_json())?;
    manifest.record_output(&args.out);
    manifest.write_beside(&args.out)?;
    let d = cb
        .min_distance()
        .map(|d| d.to_string())
        .unwrap_or_else(|| "?".into());
    println!("n={} M={} d={}", cb.block_len(), cb.size(), d);
    Ok(())
}

// ------------------------------------------------------------- decode

fn edges_json(graph: &BipartiteGraph) -> serde_json::Value {
    json!(graph.edges().map(|(l, r)| json!([l, r])).collect::<Vec<_>>())
}

fn result_json(res: &IdentificationResult, absent: Option<&[usize]>, wall_ms: f64) -> serde_json::Value {
    let mut body = match &res.outcome {
        Outcome::Identified { assignment, edge_order } => json!({
            "outcome": "identified",
            "assignment": assignment.sigma(),
            "cost": assignment.total_cost(),
            "order": edge_order,
        }),
        Outcome::Failure(reason) => match reason {
            FailureReason::NotUnique { residual } => json!({
                "outcome": "failure",
                "reason": "not-unique",
                "residual": edges_json(residual),
            }),
            FailureReason::NoPerfectMatching { side, index } => json!({
                "outcome": "failure",
                "reason": "no-perfect-matching",
                "stranded": format!("{side:?}:{index}"),
            }),
        },
        Outcome::Infeasible { max_matching } => json!({
            "outcome": "infeasible",
            "max_matching": max_matching,
        }),
    };
    let obj = body.as_object_mut().expect("object");
    if let Some(absent) = absent {
        obj.insert("absent".into(), json!(absent));
    }
    obj.insert(
        "stats".into(),
        json!({
            "edges": res.stats.edges,
            "strategy": res.stats.strategy,
            "wall_ms": wall_ms,
        }),
    );
    obj.insert("fallback".into(), json!(res.used_fallback));
    body
}

fn identify_error_failure(e: identifiers::IdentifyError) -> Failure {
    match e {
        identifiers::IdentifyError::Code(c) => code_error_failure(c),
        other => fail(EXIT_MALFORMED, format!("{other}")),
    }
}

fn cmd_decode(args: DecodeArgs) -> Result<(), Failure> {
    let (cb, _) = load_codebook(&args.codebook)?;
    let text = read_file(&args.outputs)?;
    let outputs_file = OutputsFile::parse(&text)
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", args.outputs.display())))?;
    let parsed = outputs_file
        .to_parsed()
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", args.outputs.display())))?;

    let count = match &parsed {
        ParsedOutputs::Bec(v) => v.len(),
        ParsedOutputs::Bsc(v) => v.len(),
    };
    let expected_absent = cb.size().checked_sub(count).ok_or_else(|| {
        fail(EXIT_MALFORMED, format!("{} outputs for a codebook of size {}", count, cb.size()))
    })?;
    if args.absent != expected_absent {
        return Err(fail(
            EXIT_MALFORMED,
            format!("--absent {} but M - |outputs| = {}", args.absent, expected_absent),
        ));
    }

    let start = Instant::now();
    let value = match (args.decoder, &parsed) {
        (DecoderName::Jedi, ParsedOutputs::Bec(outputs)) => {
            if args.absent == 0 {
                let res = jedi_checked(&cb, outputs)?;
                result_json(&res, None, wall_ms(start))
            } else {
                let res = identifiers::identify_with_absentees_bec(&cb, outputs, MatchStrategy::Auto)
                    .map_err(identify_error_failure)?;
                let shim = IdentificationResult {
                    outcome: res.outcome,
                    stats: res.stats,
                    used_fallback: false,
                };
                result_json(&shim, Some(&res.absent), wall_ms(start))
            }
        }
        (DecoderName::Jmdi, ParsedOutputs::Bsc(outputs)) => {
            if args.absent == 0 {
                let res = identifiers::jmdi(&cb, outputs).map_err(identify_error_failure)?;
                result_json(&res, None, wall_ms(start))
            } else {
                let res = identifiers::identify_with_absentees_bsc(&cb, outputs)
                    .map_err(identify_error_failure)?;
                let shim = IdentificationResult {
                    outcome: res.outcome,
                    stats: res.stats,
                    used_fallback: false,
                };
                result_json(&shim, Some(&res.absent), wall_ms(start))
            }
        }
        (DecoderName::Jldi, ParsedOutputs::Bsc(outputs)) => {
            if args.absent != 0 {
                return Err(fail(EXIT_MALFORMED, "jldi does not take absentees"));
            }
            let radius = args.radius.ok_or_else(|| fail(EXIT_USAGE, "jldi requires --radius"))?;
            let res = identifiers::jldi(&cb, outputs, radius, args.fallback)
                .map_err(identify_error_failure)?;
            result_json(&res, None, wall_ms(start))
        }
        (DecoderName::Jedi, ParsedOutputs::Bsc(_)) => {
            return Err(fail(EXIT_MALFORMED, "jedi needs erased-word (bec) outputs"))
        }
        (_, ParsedOutputs::Bec(_)) => {
            return Err(fail(EXIT_MALFORMED, "jmdi/jldi need bit-string (bsc) outputs"))
        }
    };
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    Ok(())
}

fn jedi_checked(
    cb: &Codebook,
    outputs: &[beeid_core::bits::ErasedWord],
) -> Result<IdentificationResult, Failure> {
    identifiers::jedi(cb, outputs, MatchStrategy::Auto).map_err(identify_error_failure)
}

fn wall_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

// ----------------------------------------------------------- estimate

fn estimation_failure(e: EstimationError) -> Failure {
    match e {
        EstimationError::SizeGuard { m, guard } => {
            fail(EXIT_GUARD, format!("guard: order {m} exceeds the limit {guard}"))
        }
        other => fail(EXIT_SEMANTIC, format!("{other}")),
    }
}

fn scaled_json(v: &ScaledReal) -> serde_json::Value {
    json!({ "value": v.to_f64(), "log2": if v.is_zero() { f64::NEG_INFINITY } else { v.log2() } })
}

fn estimate_json(e: &Estimate) -> serde_json::Value {
    match e {
        Estimate::Exact(v) => scaled_json(v),
        Estimate::Bracket { lower, upper } => json!({
            "lower": scaled_json(lower),
            "upper": scaled_json(upper),
        }),
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), Failure> {
    let (cb, name) = load_codebook(&args.codebook)?;
    let family = match args.channel {
        ChannelName::Bec => Channel::Bec,
        ChannelName::Bsc => Channel::Bsc,
    };
    let u = estimation::estimate_u(&cb, args.p, family).map_err(estimation_failure)?;
    let v = if args.with_v {
        Some(estimation::estimate_v(&cb, args.p, family).map_err(estimation_failure)?)
    } else {
        None
    };
    let bounds = estimation::error_bounds(&u, v.as_ref()).map_err(estimation_failure)?;

    let mut body = json!({
        "code": name,
        "channel": match args.channel { ChannelName::Bec => "bec", ChannelName::Bsc => "bsc" },
        "p": args.p,
        "M": cb.size(),
        "U": estimate_json(&u),
        "upper": bounds.upper,
        "lower": bounds.lower,
        "vacuous": bounds.vacuous,
    });
    let obj = body.as_object_mut().expect("object");
    if let Some(v) = &v {
        obj.insert("V".into(), estimate_json(v));
        let stats = estimation::trellis_stats(cb.size()).map_err(estimation_failure)?;
        obj.insert(
            "per2_stats".into(),
            json!({
                "vertices": stats.vertices,
                "edges": stats.edges,
                "mults": stats.multiplications,
                "adds": stats.additions,
            }),
        );
    }
    if args.closed_form {
        let d = cb.min_distance().ok_or_else(|| {
            fail(EXIT_SEMANTIC, "closed form needs the minimum distance, unknown for this codebook")
        })?;
        let theta = match args.channel {
            ChannelName::Bec => args.p.powi(d as i32),
            ChannelName::Bsc => (4.0 * args.p * (1.0 - args.p)).powf(d as f64 / 2.0),
        };
        let value = estimation::closed_form_upper_bound(cb.size(), theta)
            .map_err(estimation_failure)?;
        let p_err_upper = (value.to_f64() - 1.0).clamp(0.0, 1.0);
        obj.insert(
            "closed_form".into(),
            json!({ "theta": theta, "value": value.to_f64(), "p_err_upper": p_err_upper }),
        );
    }
    println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    Ok(())
}

// ----------------------------------------------------------- simulate

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(fail(EXIT_USAGE, format!("--p-grid must be LO:HI:STEP, got {spec:?}")));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| fail(EXIT_USAGE, format!("bad grid number {s:?} in {spec:?}")))
    };
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(step > 0.0 && lo > 0.0 && hi >= lo) {
        return Err(fail(EXIT_USAGE, format!("grid {spec:?} must be ascending in (0, 1)")));
    }
    let count = ((hi - lo) / step + 1.0 + 1e-9).floor() as usize;
    // snap accumulated values so 0.1 + 2*0.1 prints as 0.3, not 0.30000000000000004
    let snap = |x: f64| format!("{x:.12}").parse::<f64>().expect("formatted float");
    let grid: Vec<f64> = (0..count).map(|i| snap(lo + step * i as f64)).collect();
    if grid.iter().any(|&p| p <= 0.0 || p >= 1.0) {
        return Err(fail(EXIT_USAGE, format!("grid {spec:?} leaves (0, 1)")));
    }
    Ok(grid)
}

fn worker_count(trials: u64) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let capped = match env::var("BEEID_THREADS") {
        Ok(v) => v.parse::<usize>().unwrap_or(available).max(1),
        Err(_) => available,
    };
    capped.min(trials.max(1) as usize)
}

fn sim_error_failure(e: SimError) -> Failure {
    match e {
        SimError::Estimation(EstimationError::SizeGuard { m, guard }) => {
            fail(EXIT_GUARD, format!("guard: order {m} exceeds the limit {guard}"))
        }
        SimError::Incompatible { .. } => fail(EXIT_MALFORMED, format!("{e}")),
        other => fail(EXIT_SEMANTIC, format!("{other}")),
    }
}

fn cmd_simulate(args: SimulateArgs, argv: &[String]) -> Result<(), Failure> {
    let (cb, name) = load_codebook(&args.codebook)?;
    let grid = parse_grid(&args.p_grid)?;
    let decoder = match args.decoder {
        DecoderName::Jedi => DecoderSpec::Jedi,
        DecoderName::Jmdi => DecoderSpec::Jmdi,
        DecoderName::Jldi => DecoderSpec::Jldi {
            radius: args.radius.ok_or_else(|| fail(EXIT_USAGE, "jldi requires --radius"))?,
        },
    };
    let family = match args.channel {
        ChannelName::Bec => beeid_core::channels::ChannelKind::Bec,
        ChannelName::Bsc => beeid_core::channels::ChannelKind::Bsc,
    };
    let workers = worker_count(args.trials);
    let results = simulate::sweep(
        &cb,
        &name,
        family,
        &grid,
        args.trials,
        args.seed,
        decoder,
        args.with_bounds,
        workers,
    )
    .map_err(sim_error_failure)?;

    let mut csv = String::from(SimResult::CSV_HEADER);
    csv.push('\n');
    for r in &results {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    write_file(&args.out, &csv)?;

    let csv_name = args.out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let plot = PlotSpec::for_sweep(&csv_name, &name);
    let plot_path = {
        let mut name = args.out.file_name().unwrap_or_default().to_os_string();
        name.push(".plot.json");
        args.out.with_file_name(name)
    };
    write_file(&plot_path, &plot.to_json())?;

    let mut manifest = RunManifest::new("simulate", &argv[1..], Some(args.seed));
    manifest.record_input(&args.codebook)?;
    manifest.record_output(&args.out);
    manifest.record_output(&plot_path);
    manifest.write_beside(&args.out)?;

    eprintln!(
        "wrote {} ({} rows), {}, and {}",
        args.out.display(),
        results.len(),
        plot_path.display(),
        beeid::manifest::sidecar_path(&args.out).display()
    );
    Ok(())
}

// ------------------------------------------------------- trellis-stats

fn cmd_trellis_stats(args: TrellisArgs) -> Result<(), Failure> {
    let stats = estimation::trellis_stats(args.m).map_err(estimation_failure)?;
    let body = json!({
        "m": args.m,
        "vertices": stats.vertices,
        "edges": stats.edges,
        "mults": stats.multiplications,
        "adds": stats.additions,
    });
    println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    Ok(())
}

// -------------------------------------------------------------- replay

fn cmd_replay(args: ReplayArgs) -> Result<(), Failure> {
    let manifest = RunManifest::load(&args.manifest)?;
    manifest.verify_inputs()?;
    let mut argv: Vec<String> = vec!["beeid".into(), manifest.subcommand.clone()];
    argv.extend(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| fail(EXIT_MALFORMED, format!("manifest args do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(fail(EXIT_MALFORMED, "refusing to replay a replay"));
    }
    run(cli, &argv[1..])
}
