//! Command-line interface: exact capacity of classical and
//! classical-quantum channels, epsilon-family scans, and exact-vs-iterative
//! benchmarks.
//!
//! Exit codes: 0 success, 2 parse error, 3 singular channel, 4 inconclusive
//! subset search, 5 rank-deficient state, 1 anything else.

mod format;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use chancap::cq::{CqCapacityOptions, CqExactSolution};
use chancap::exact::{CapacityOptions, SolutionStatus, SubsetStrategy};
use chancap::families::{
    candidate_capacities, compute_thresholds, gate_functions, EpsilonFamilyChannel,
};
use chancap::{capacity, cq_capacity, sample, tol, CapacityError};

use format::{parse_channel_file, ParsedChannel, UnitsPref};
use output::{digest_bytes, sig17, CapacityOutput, OutputFormat, RunManifest, Units};

#[derive(Parser)]
#[command(
    name = "chancap",
    about = "Exact, non-iterative channel capacity computation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of a classical channel file
    Capacity(CapacityArgs),
    /// Capacity of a classical-quantum channel file
    CqCapacity(CqCapacityArgs),
    /// Scan the four-input/three-output epsilon family and emit CSV
    ScanEpsilon(ScanArgs),
    /// Compare exact and iterative solvers on random channels
    Bench(BenchArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl OnOff {
    fn is_on(self) -> bool {
        self == OnOff::On
    }
}

#[derive(Args)]
struct CapacityArgs {
    /// Channel file
    file: PathBuf,
    /// Presentation units (overrides a units preference in the file)
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// Oracle stopping tolerance override (nats)
    #[arg(long)]
    tol: Option<f64>,
    /// Run the independent iterative cross-check and allow oracle fallback
    #[arg(long, value_enum, default_value = "on")]
    oracle: OnOff,
    /// Subset strategy for channels with more inputs than outputs
    #[arg(long, default_value = "auto", value_parser = parse_subset)]
    subset: SubsetStrategy,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct CqCapacityArgs {
    /// Classical-quantum channel file
    file: PathBuf,
    #[arg(long, value_enum)]
    units: Option<Units>,
    #[arg(long)]
    tol: Option<f64>,
    /// Run the independent iterative cross-check
    #[arg(long, value_enum, default_value = "on")]
    oracle: OnOff,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Lower end of the epsilon range (must be > 0)
    #[arg(long, default_value_t = 0.01)]
    min: f64,
    /// Upper end of the epsilon range (must be < 0.5)
    #[arg(long, default_value_t = 0.49)]
    max: f64,
    /// Number of grid points (at least 2)
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Square channel sizes, comma separated (may be empty)
    #[arg(long, default_value = "")]
    sizes: String,
    /// Random instances per size
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Oracle stopping tolerance (nats)
    #[arg(long, default_value_t = tol::BA_DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    io: IoArgs,
}

fn parse_subset(s: &str) -> Result<SubsetStrategy, String> {
    match s {
        "auto" => Ok(SubsetStrategy::Auto),
        "exhaustive" => Ok(SubsetStrategy::Exhaustive),
        "hybrid" => Ok(SubsetStrategy::Hybrid),
        other => Err(format!("expected auto|exhaustive|hybrid, got '{other}'")),
    }
}

enum CliError {
    Parse(format::ParseError),
    Io(std::io::Error),
    Core(CapacityError),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(CapacityError::SingularChannel { .. }) => 3,
            CliError::Core(CapacityError::SubsetSearchInconclusive { .. }) => 4,
            CliError::Core(CapacityError::RankDeficient { .. }) => 5,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(e) => format!("parse error: {e}"),
            CliError::Io(e) => format!("io error: {e}"),
            CliError::Core(e) => format!("error: {e}"),
            CliError::Usage(m) => format!("usage error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity(args) => cmd_capacity(args),
        Command::CqCapacity(args) => cmd_cq_capacity(args),
        Command::ScanEpsilon(args) => cmd_scan_epsilon(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(io: &IoArgs, content: &str) -> Result<(), CliError> {
    match &io.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn resolve_units(cli_units: Option<Units>, file_units: Option<UnitsPref>) -> Units {
    cli_units.unwrap_or(match file_units {
        Some(UnitsPref::Bits) => Units::Bits,
        _ => Units::Nats,
    })
}

fn gate_status_string(status: &SolutionStatus) -> String {
    match status {
        SolutionStatus::Valid => "passed".to_string(),
        SolutionStatus::GateFailed { negative } => {
            format!("failed on inputs {negative:?} (1-based: {:?})",
                negative.iter().map(|i| i + 1).collect::<Vec<_>>())
        }
        SolutionStatus::ConditionViolated { reason } => format!("condition violated: {reason}"),
    }
}

fn cmd_capacity(args: CapacityArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.file)?;
    let text = String::from_utf8_lossy(&bytes);
    let parsed = parse_channel_file(&text).map_err(CliError::Parse)?;
    let ParsedChannel::Classical(channel) = parsed.channel else {
        return Err(CliError::Usage(
            "file holds a classical-quantum channel; use cq-capacity".into(),
        ));
    };
    let units = resolve_units(args.units, parsed.units);
    let options = CapacityOptions::<f64> {
        oracle_check: args.oracle.is_on(),
        ba_tol: args.tol.unwrap_or(tol::BA_DEFAULT_TOL),
        subset_strategy: args.subset,
        allow_oracle_fallback: args.oracle.is_on(),
        ..Default::default()
    };
    let t0 = Instant::now();
    let report = capacity(&channel, &options)?;
    let wall = t0.elapsed().as_secs_f64();
    let nats = report.capacity.nats();
    let out = CapacityOutput {
        capacity: units.convert(nats),
        units: units.label().to_string(),
        capacity_nats: nats,
        capacity_bits: nats / std::f64::consts::LN_2,
        optimal_input: report.optimal_input.probs().to_vec(),
        input_labels: channel.input_labels().map(|l| l.to_vec()),
        solver_path: report.path.to_string(),
        certified: report.certified,
        verification_gap: report.verification_gap,
        gate_status: None,
        oracle_check: report.oracle_check,
        oracle_delta: report.oracle_check.map(|v| (v - nats).abs()),
        cq_step_seconds: None,
        manifest: RunManifest {
            command: "capacity".into(),
            input_digest: digest_bytes(&bytes),
            ba_tolerance: options.ba_tol,
            gate_tolerance: tol::TAU_GATE,
            equal_divergence_tolerance: tol::TAU_EQ,
            solver_path: report.path.to_string(),
            wall_seconds: wall,
            seed: None,
        },
    };
    emit(&args.io, &out.render(args.io.format))
}

fn cq_gate_status(exact: &Option<CqExactSolution<f64>>) -> Option<String> {
    exact.as_ref().map(|sol| gate_status_string(&sol.status))
}

fn cmd_cq_capacity(args: CqCapacityArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.file)?;
    let text = String::from_utf8_lossy(&bytes);
    let parsed = parse_channel_file(&text).map_err(CliError::Parse)?;
    let ParsedChannel::Cq(cq) = parsed.channel else {
        return Err(CliError::Usage(
            "file holds a classical channel; use capacity".into(),
        ));
    };
    let units = resolve_units(args.units, parsed.units);
    let options = CqCapacityOptions::<f64> {
        oracle_check: args.oracle.is_on(),
        ba_tol: args.tol.unwrap_or(tol::BA_CQ_DEFAULT_TOL),
        ..Default::default()
    };
    let t0 = Instant::now();
    let report = cq_capacity(&cq, &options)?;
    let wall = t0.elapsed().as_secs_f64();
    let nats = report.capacity.nats();
    let out = CapacityOutput {
        capacity: units.convert(nats),
        units: units.label().to_string(),
        capacity_nats: nats,
        capacity_bits: nats / std::f64::consts::LN_2,
        optimal_input: report.optimal_input.probs().to_vec(),
        input_labels: None,
        solver_path: report.path.to_string(),
        certified: !report
            .path
            .steps
            .contains(&chancap::PathStep::OracleFallback),
        verification_gap: 0.0,
        gate_status: cq_gate_status(&report.exact),
        oracle_check: report.oracle_check,
        oracle_delta: report.oracle_check.map(|v| (v - nats).abs()),
        cq_step_seconds: report.exact.as_ref().map(|sol| output::CqStepSeconds {
            observable_basis: sol.timings.observable_basis.as_secs_f64(),
            natural_parameters: sol.timings.natural_parameters.as_secs_f64(),
            log_partition: sol.timings.log_partition.as_secs_f64(),
            weight_reconstruction: sol.timings.weight_reconstruction.as_secs_f64(),
        }),
        manifest: RunManifest {
            command: "cq-capacity".into(),
            input_digest: digest_bytes(&bytes),
            ba_tolerance: options.ba_tol,
            gate_tolerance: tol::TAU_GATE,
            equal_divergence_tolerance: tol::TAU_EQ,
            solver_path: report.path.to_string(),
            wall_seconds: wall,
            seed: None,
        },
    };
    emit(&args.io, &out.render(args.io.format))
}

fn cmd_scan_epsilon(args: ScanArgs) -> Result<(), CliError> {
    if !(args.min > 0.0 && args.max < 0.5 && args.min < args.max) {
        return Err(CliError::Usage(format!(
            "range [{}, {}] must satisfy 0 < min < max < 0.5",
            args.min, args.max
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Usage("steps must be at least 2".into()));
    }
    let thresholds = compute_thresholds::<f64>(1e-12)?;
    let opts = CapacityOptions::<f64>::default();
    let mut csv = String::new();
    csv.push_str(
        "epsilon,c1,c3,c4,c_star,c_double_star,g1,g2,g3,capacity,path\n",
    );
    for k in 0..args.steps {
        let e = args.min + (args.max - args.min) * k as f64 / (args.steps - 1) as f64;
        let set = candidate_capacities::<f64>(e)?;
        let (g1, g2, g3) = gate_functions::<f64>(e)?;
        let channel = EpsilonFamilyChannel::new(e)?.channel();
        let report = capacity(&channel, &opts)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            sig17(e),
            sig17(set.c1),
            sig17(set.c3),
            sig17(set.c4),
            sig17(set.c_star),
            sig17(set.c_double_star),
            sig17(g1),
            sig17(g2),
            sig17(g3),
            sig17(report.capacity.nats()),
            report.path,
        ));
    }
    csv.push_str(&format!(
        "# threshold_c_star_to_c4 {}\n",
        sig17(thresholds.c_star_to_c4)
    ));
    csv.push_str(&format!(
        "# threshold_c4_to_c_double_star {}\n",
        sig17(thresholds.c4_to_c_double_star)
    ));
    csv.push_str(&format!(
        "# threshold_g2_crossing {}\n",
        sig17(thresholds.g2_crossing)
    ));
    // sign region of the {2,3,4}-case weight on input 2, determined
    // numerically: positive below the branch threshold
    csv.push_str(&format!(
        "# case1_weight2_positive_below {}\n",
        sig17(thresholds.c4_to_c_double_star)
    ));
    csv.push_str(&format!(
        "# input_digest {}\n",
        digest_bytes(
            format!("scan-epsilon {} {} {}", args.min, args.max, args.steps).as_bytes()
        )
    ));
    emit(&args.io, &csv)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let mut csv = String::new();
    csv.push_str(
        "n,trials,median_exact_seconds,median_oracle_seconds,max_abs_delta,certified,oracle_completed\n",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let opts = CapacityOptions::<f64> {
        ba_tol: args.tol,
        ..Default::default()
    };
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad size '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    for &n in &sizes {
        if n < 2 {
            return Err(CliError::Usage(format!("size {n} too small")));
        }
        let mut exact_times = Vec::with_capacity(args.trials);
        let mut oracle_times = Vec::with_capacity(args.trials);
        let mut max_delta = 0.0f64;
        let mut certified = 0usize;
        let mut oracle_done = 0usize;
        for _ in 0..args.trials {
            let w = sample::random_channel::<f64, _>(&mut rng, n, n, 1e-4)?;
            let t0 = Instant::now();
            let report = capacity(&w, &opts)?;
            exact_times.push(t0.elapsed().as_secs_f64());
            let t1 = Instant::now();
            let ba = chancap::blahut_arimoto(&w, args.tol, 1_000_000);
            oracle_times.push(t1.elapsed().as_secs_f64());
            if let Ok((ba_value, _, _)) = ba {
                oracle_done += 1;
                if report.certified {
                    certified += 1;
                    max_delta = max_delta.max((report.capacity.nats() - ba_value.nats()).abs());
                }
            }
        }
        csv.push_str(&format!(
            "{n},{},{},{},{},{certified},{oracle_done}\n",
            args.trials,
            sig17(median(&mut exact_times)),
            sig17(median(&mut oracle_times)),
            sig17(max_delta),
        ));
    }
    csv.push_str(&format!("# seed {}\n", args.seed));
    csv.push_str(&format!("# oracle_tolerance {}\n", sig17(args.tol)));
    emit(&args.io, &csv)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}
