//! Thin CLI over the ssd library: design, diagnose, benchmark, sweep.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssd::cli::{
    cmd_benchmark, cmd_design, cmd_diagnose, cmd_sweep, exit_code_for, resolve_bench,
    resolve_design, resolve_sweep, Overrides, EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "ssd", version, about = "Row-sparse sensing matrix design and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file with [design] / [benchmark] / [sweep] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for result files and the manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// RNG seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Rayon worker thread count (0 = automatic).
    #[arg(long)]
    threads: Option<usize>,
    /// Extra config overrides as key=value (e.g. --set lambda=0.5).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the alternating-minimization design and write phi + trace.
    Design {
        #[command(flatten)]
        common: Common,
        /// Write phi as SSMX binary instead of CSV.
        #[arg(long)]
        binary: bool,
    },
    /// Audit a design trace for monotone objective and sufficient decrease.
    Diagnose {
        /// Trace CSV produced by `ssd design`.
        #[arg(long)]
        trace: PathBuf,
        /// Sufficient-decrease constant the trace was produced with.
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Benchmark the configured systems at a single operating point.
    Benchmark {
        #[command(flatten)]
        common: Common,
    },
    /// Benchmark across an axis (snr | m | k | kappa | lambda).
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn overrides_from(common: &Common) -> Result<Overrides, String> {
    let mut ovr = Overrides::from_env();
    for pair in &common.sets {
        match pair.split_once('=') {
            Some((k, v)) => ovr.set(k, v.to_string()),
            None => return Err(format!("--set expects KEY=VALUE, got {pair:?}")),
        }
    }
    if let Some(seed) = common.seed {
        ovr.set("seed", seed.to_string());
    }
    Ok(ovr)
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run() -> Result<i32, (i32, String)> {
    let cli = Cli::parse();
    match cli.command {
        Command::Design { common, binary } => {
            init_threads(common.threads);
            let ovr = overrides_from(&common).map_err(|m| (EXIT_CONFIG, m))?;
            let (run, defaults) = resolve_design(common.config.as_deref(), &ovr)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let outs = cmd_design(&run, defaults, &common.out, binary)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!(
                "design: wrote {} and {}",
                outs.phi_path.display(),
                outs.trace_path.display()
            );
            Ok(0)
        }
        Command::Diagnose { trace, gamma, out } => cmd_diagnose(&trace, gamma, &out)
            .map_err(|e| (exit_code_for(&e), e.to_string())),
        Command::Benchmark { common } => {
            init_threads(common.threads);
            let ovr = overrides_from(&common).map_err(|m| (EXIT_CONFIG, m))?;
            let (run, defaults) = resolve_bench(common.config.as_deref(), &ovr)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let outs = cmd_benchmark(&run, defaults, &common.out)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!("benchmark: wrote {}", outs.report_path.display());
            Ok(0)
        }
        Command::Sweep { common } => {
            init_threads(common.threads);
            let ovr = overrides_from(&common).map_err(|m| (EXIT_CONFIG, m))?;
            let (run, axis, values, defaults) = resolve_sweep(common.config.as_deref(), &ovr)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let outs = cmd_sweep(&run, axis, &values, defaults, "sweep", &common.out)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!("sweep: wrote {}", outs.report_path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
