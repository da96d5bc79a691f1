//! Command-line front door: instance evaluation (`bounds`), randomized
//! verification suites (`verify`), closed-form sweeps (`sweep`), and
//! discrete-bath oracle comparisons (`oracle-compare`).
//!
//! Exit codes: 0 success, 2 usage/input error, 3 verification failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use entbound::bounds::{
    evaluate_instance_with, BoundReport, EvalOptions, PovmStrategy, BOUND_REPORT_CSV_HEADER,
};
use entbound::dynamics::{random_instance, InstanceKind};
use entbound::povm::PovmSearchConfig;
use entbound::schema::{parse_instance, SCHEMA_VERSION, SWEEP_CSV_HEADER};
use entbound::spinboson::{
    analytic_fidelity_physical, bound_curve, detect_peak, sample_bath, FockOracle, SpinBosonParams,
};
use entbound::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "entbound",
    about = "Coherence-to-entanglement bounds under pure-dephasing evolution",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file (JSON); command-specific, see each subcommand.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; results go to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// RNG seed for anything randomized.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the data-parallel paths; 0 = library default.
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound on a serialized instance, at each listed time.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the inequality-chain suite on seeded random instances.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of random instances.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Comma-separated d_SxD_E pairs to cycle through.
        #[arg(long, default_value = "2x2,2x3,2x4,3x2,3x3,3x4")]
        dims: String,
    },
    /// Tabulate the closed-form bound curves over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Accept non-integer Ohmicity s > 2 on a best-effort basis.
        #[arg(long = "best-effort-s", default_value_t = false)]
        best_effort_s: bool,
    },
    /// Compare the closed-form fidelity against the truncated-Fock oracle.
    OracleCompare {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of bath modes in the discretization.
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Maximum relative error for the pass verdict.
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        #[arg(long = "best-effort-s", default_value_t = false)]
        best_effort_s: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Bounds { common } => (common, cmd_bounds(common)),
        Command::Verify { common, count, dims } => (common, cmd_verify(common, *count, dims)),
        Command::Sweep { common, best_effort_s } => (common, cmd_sweep(common, *best_effort_s)),
        Command::OracleCompare {
            common,
            count,
            tolerance,
            best_effort_s,
        } => (
            common,
            cmd_oracle_compare(common, *count, *tolerance, *best_effort_s),
        ),
    };
    let _ = common; // thread pool is configured inside each command
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_parallelism(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn read_input(path: &Option<PathBuf>, what: &str) -> Result<String, Error> {
    match path {
        Some(p) => Ok(std::fs::read_to_string(p)?),
        None => Err(Error::Schema(format!("--input is required for {what}"))),
    }
}

fn write_output(path: &Option<PathBuf>, contents: &str) -> Result<(), Error> {
    match path {
        Some(p) => Ok(std::fs::write(p, contents)?),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

// ---------------------------------------------------------------- bounds ---

#[derive(Serialize)]
struct BoundsOutput {
    schema_version: u32,
    seed: u64,
    reports: Vec<BoundReport>,
    all_ok: bool,
}

fn cmd_bounds(common: &CommonArgs) -> Result<ExitCode, Error> {
    configure_parallelism(common.parallelism);
    let text = read_input(&common.input, "bounds")?;
    let (model, rho_s, rho_e, times) = parse_instance(&text)?.into_parts()?;

    let strategy = PovmStrategy::Optimize(PovmSearchConfig::new(common.seed));
    let opts = EvalOptions {
        seed: common.seed,
        ..EvalOptions::default()
    };
    let reports: Vec<BoundReport> = times
        .iter()
        .map(|&t| evaluate_instance_with(&model, &rho_s, &rho_e, t, &strategy, &opts))
        .collect::<Result<_, _>>()?;
    let all_ok = reports.iter().all(|r| r.all_ok());

    let out = BoundsOutput {
        schema_version: SCHEMA_VERSION,
        seed: common.seed,
        reports,
        all_ok,
    };
    let json = serde_json::to_string_pretty(&out).map_err(|e| Error::Schema(e.to_string()))?;
    write_output(&common.output, &json)?;
    // CSV companion next to the JSON report
    let mut csv = String::from(BOUND_REPORT_CSV_HEADER);
    csv.push('\n');
    for r in &out.reports {
        csv.push_str(&r.to_csv_row());
        csv.push('\n');
    }
    if let Some(p) = &common.output {
        std::fs::write(sibling(p, "csv"), &csv)?;
    } else {
        println!("{csv}");
    }
    if all_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("bound chain violated; see chain_ok entries in the report");
        Ok(ExitCode::from(EXIT_VERIFICATION))
    }
}

// ---------------------------------------------------------------- verify ---

#[derive(Serialize)]
struct VerifySummary {
    schema_version: u32,
    seed: u64,
    count: usize,
    dims: Vec<(usize, usize)>,
    pass_counts: BTreeMap<String, usize>,
    failures: Vec<VerifyFailure>,
    all_ok: bool,
}

#[derive(Serialize)]
struct VerifyFailure {
    index: usize,
    d_s: usize,
    d_e: usize,
    check: String,
    lhs: f64,
    rhs: f64,
}

fn parse_dims(spec: &str) -> Result<Vec<(usize, usize)>, Error> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Schema(format!("bad dims entry {part:?}, expected e.g. 2x3")))?;
        let d_s: usize = a.parse().map_err(|_| Error::Schema(format!("bad d_S in {part:?}")))?;
        let d_e: usize = b.parse().map_err(|_| Error::Schema(format!("bad d_E in {part:?}")))?;
        if d_s < 2 || d_e < 2 {
            return Err(Error::Schema(format!("dims {part:?} must be at least 2x2")));
        }
        out.push((d_s, d_e));
    }
    Ok(out)
}

fn cmd_verify(common: &CommonArgs, count: usize, dims: &str) -> Result<ExitCode, Error> {
    configure_parallelism(common.parallelism);
    if count == 0 {
        return Err(Error::OutOfRange("--count must be at least 1".into()));
    }
    let dims = parse_dims(dims)?;

    let mut pass_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for idx in 0..count {
        let (d_s, d_e) = dims[idx % dims.len()];
        let inst = random_instance(d_s, d_e, InstanceKind::Generic, common.seed + idx as u64)?;
        let strategy = PovmStrategy::Optimize(PovmSearchConfig::quick(common.seed + idx as u64));
        let opts = EvalOptions {
            seed: common.seed + idx as u64,
            ..EvalOptions::default()
        };
        let report = evaluate_instance_with(
            &inst.model,
            &inst.rho_s,
            &inst.rho_e,
            inst.t,
            &strategy,
            &opts,
        )?;
        for check in &report.chain_ok {
            if check.ok {
                *pass_counts.entry(check.name.clone()).or_insert(0) += 1;
            } else {
                failures.push(VerifyFailure {
                    index: idx,
                    d_s,
                    d_e,
                    check: check.name.clone(),
                    lhs: check.lhs,
                    rhs: check.rhs,
                });
            }
        }
    }

    let all_ok = failures.is_empty();
    let summary = VerifySummary {
        schema_version: SCHEMA_VERSION,
        seed: common.seed,
        count,
        dims,
        pass_counts,
        failures,
        all_ok,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Schema(e.to_string()))?;
    write_output(&common.output, &json)?;
    if all_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} inequality violations", summary.failures.len());
        Ok(ExitCode::from(EXIT_VERIFICATION))
    }
}

// ----------------------------------------------------------------- sweep ---

/// Grid for `sweep` and `oracle-compare`; every field is optional and falls
/// back to the defaults below.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    s_values: Option<Vec<f64>>,
    temperature_ratios: Option<Vec<f64>>,
    alphas: Option<Vec<f64>>,
    times: Option<Vec<f64>>,
    omega_max: Option<f64>,
    fock_cutoff: Option<usize>,
}

fn load_grid(input: &Option<PathBuf>) -> Result<GridConfig, Error> {
    match input {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))
        }
        None => Ok(GridConfig::default()),
    }
}

fn default_times(max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| max * i as f64 / steps as f64).collect()
}

#[derive(Serialize)]
struct PeakEntry {
    s: f64,
    #[serde(rename = "T_over_Lambda")]
    t_over_lambda: f64,
    alpha: f64,
    peak_lambda_t: Option<f64>,
    prominence: Option<f64>,
}

#[derive(Serialize)]
struct SweepSide {
    schema_version: u32,
    peaks: Vec<PeakEntry>,
}

fn cmd_sweep(common: &CommonArgs, best_effort_s: bool) -> Result<ExitCode, Error> {
    configure_parallelism(common.parallelism);
    let grid = load_grid(&common.input)?;
    let s_values = grid.s_values.unwrap_or_else(|| vec![2.0, 3.0]);
    let ratios = grid.temperature_ratios.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let alphas = grid
        .alphas
        .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let times = grid.times.unwrap_or_else(|| default_times(10.0, 200));

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    let mut peaks = Vec::new();
    for &s in &s_values {
        for &ratio in &ratios {
            for &alpha in &alphas {
                let mut p = SpinBosonParams::new(s, 1.0, ratio, alpha, times.clone())?;
                if best_effort_s {
                    p = p.with_general_s();
                }
                let curve = bound_curve(&p)?;
                for pt in &curve {
                    csv.push_str(&format!(
                        "{s},{ratio},{alpha},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                        pt.lambda_t, pt.b_vac, pt.b_th, pt.b, pt.raw, pt.clamped
                    ));
                }
                let peak = detect_peak(&curve);
                peaks.push(PeakEntry {
                    s,
                    t_over_lambda: ratio,
                    alpha,
                    peak_lambda_t: peak.map(|(lt, _)| lt),
                    prominence: peak.map(|(_, pr)| pr),
                });
            }
        }
    }
    write_output(&common.output, &csv)?;
    let side = SweepSide {
        schema_version: SCHEMA_VERSION,
        peaks,
    };
    let side_json = serde_json::to_string_pretty(&side).map_err(|e| Error::Schema(e.to_string()))?;
    match &common.output {
        Some(p) => std::fs::write(sibling(p, "peaks.json"), &side_json)?,
        None => println!("{side_json}"),
    }
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------- oracle-compare ---

fn cmd_oracle_compare(
    common: &CommonArgs,
    n_modes: usize,
    tolerance: f64,
    best_effort_s: bool,
) -> Result<ExitCode, Error> {
    configure_parallelism(common.parallelism);
    if n_modes == 0 {
        return Err(Error::OutOfRange("--count must be at least 1".into()));
    }
    if tolerance <= 0.0 {
        return Err(Error::OutOfRange("--tolerance must be positive".into()));
    }
    let grid = load_grid(&common.input)?;
    let s_values = grid.s_values.unwrap_or_else(|| vec![2.0, 3.0]);
    let ratios = grid.temperature_ratios.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let times = grid.times.unwrap_or_else(|| default_times(5.0, 5));
    let omega_max = grid.omega_max.unwrap_or(10.0);
    let fock_cutoff = grid.fock_cutoff.unwrap_or(768);

    let mut csv = String::from("s,T_over_Lambda,Lambda_t,analytic,oracle,rel_error\n");
    let mut max_rel: f64 = 0.0;
    for &s in &s_values {
        for &ratio in &ratios {
            let mut p = SpinBosonParams::new(s, 1.0, ratio, 0.0, times.clone())?;
            if best_effort_s {
                p = p.with_general_s();
            }
            let mut bath = sample_bath(&p, n_modes, omega_max, common.seed)?;
            bath.fock_cutoff = fock_cutoff;
            let oracle = FockOracle::new(&bath, ratio)?;
            for &lt in &times {
                let ana = analytic_fidelity_physical(lt, &p)?;
                let num = oracle.fidelity(lt)?;
                let rel = (num - ana).abs() / ana.max(1e-12);
                max_rel = max_rel.max(rel);
                csv.push_str(&format!("{s},{ratio},{lt},{ana:.12e},{num:.12e},{rel:.6e}\n"));
            }
        }
    }
    write_output(&common.output, &csv)?;
    let pass = max_rel <= tolerance;
    println!(
        "verdict: {} (max relative error {max_rel:.3e}, tolerance {tolerance:.1e})",
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFICATION))
    }
}
