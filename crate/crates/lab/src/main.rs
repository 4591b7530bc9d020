use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use mstlab::cache::Cache;
use mstlab::config::{ExperimentConfig, Kind};
use mstlab::error::{LabError, LabResult};
use mstlab::experiments;
use mstlab::output::{atomic_write, csv_string, Summary, CODE_VERSION};

const AFTER_HELP: &str = "\
Output: <out>/<kind>.csv and <kind>.json.

CSV columns, in order:
  n           box half-width, empty for rows that pool sizes (beta_hat)
  param       radius or level for arm_decay, otherwise empty
  statistic   mean, variance, kolmogorov, wasserstein (clt);
              phat, beta_hat (arm-decay);
              variance, normalized_variance (var-scaling);
              blocks, exact_t, f_mean, sigma2_hat, t_mean, t_var,
              third_moment_sum, bound_value, kolmogorov, wasserstein,
              dkw_slack (stein-bound)
  value, stderr, ci_lo, ci_hi, replicates
Numbers carry 10 significant digits.

The JSON summary holds config_hash, code_version, rows, elapsed_seconds
and seed. Set MSTLAB_CACHE_DIR to cache sampled Poisson configurations.

Exit codes: 0 success, 1 invalid config, 2 degenerate statistics,
3 internal error.";

#[derive(Parser, Debug)]
#[command(name = "mstlab", version, about = "Monte Carlo studies of minimal spanning trees", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Lift the desk-scale limits on sizes and replicates.
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Distances of the standardized MST length to the normal law (clt_poisson, clt_lattice).
    Clt,
    /// Arm probabilities over a size grid with a fitted decay exponent (arm_decay).
    ArmDecay,
    /// Variance of the MST length normalized by box size (variance_scaling).
    VarScaling,
    /// Stein bound next to the empirical distances (stein_bound).
    SteinBound,
}

impl Command {
    fn accepts(self, kind: Kind) -> bool {
        matches!(
            (self, kind),
            (Command::Clt, Kind::CltPoisson | Kind::CltLattice)
                | (Command::ArmDecay, Kind::ArmDecay)
                | (Command::VarScaling, Kind::VarianceScaling)
                | (Command::SteinBound, Kind::SteinBound)
        )
    }
}

fn execute(cli: &Cli) -> LabResult<()> {
    let path = cli.config.as_ref().ok_or_else(|| LabError::Config("--config is required".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if !cli.command.accepts(config.kind) {
        return Err(LabError::Config(format!(
            "config kind {} does not belong to this subcommand",
            config.kind.name()
        )));
    }
    config.validate(cli.allow_large)?;
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(LabError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| LabError::Internal(e.to_string()))?;
    }
    let out = cli.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let cache = Cache::from_env();
    let start = Instant::now();
    let rows = experiments::run(&config, cache.as_ref())?;
    let summary = Summary {
        config_hash: config.hash(),
        code_version: CODE_VERSION.to_string(),
        rows,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        seed: config.seed,
    };
    let name = config.kind.name();
    atomic_write(&out.join(format!("{name}.csv")), csv_string(&summary.rows).as_bytes())?;
    let json = serde_json::to_vec_pretty(&summary).map_err(|e| LabError::Internal(e.to_string()))?;
    atomic_write(&out.join(format!("{name}.json")), &json)?;
    println!(
        "{name}: {} rows in {:.2} s -> {}",
        summary.rows.len(),
        summary.elapsed_seconds,
        out.display()
    );
    let undefined: Vec<String> = summary
        .rows
        .iter()
        .filter(|r| r.statistic == "beta_hat" && r.value.is_nan())
        .map(|r| format!("{}", r.param.unwrap_or(f64::NAN)))
        .collect();
    if !undefined.is_empty() {
        return Err(LabError::Degenerate(format!(
            "decay fit undefined (no positive estimates at two sizes) for params {}",
            undefined.join(", ")
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| execute(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("mstlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
