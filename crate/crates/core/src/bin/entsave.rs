use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entsave::plot::emit_plot_script;
use entsave::sweep::{run_sweep, write_csv_file, RunConfig, WORKERS_ENV};
use entsave::verify::{verify, Level};

#[derive(Parser)]
#[command(version, about = "Saved entanglement and channel biasness sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the functionals over a (family, p) grid and write CSV.
    Sweep(SweepArgs),
    /// Turn a sweep CSV into a gnuplot script.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in property checks.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

#[derive(Args)]
#[command(after_help = format!("Worker threads come from {WORKERS_ENV} (default: all cores)."))]
struct SweepArgs {
    /// key = value file applied before the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// comma-separated subset of dc,ad,bf,pf,bpf
    #[arg(long)]
    families: Option<String>,
    #[arg(long)]
    p_start: Option<String>,
    #[arg(long)]
    p_end: Option<String>,
    #[arg(long)]
    p_steps: Option<String>,
    /// comma-separated subset of se,ec,ddc,cds,ic,eb
    #[arg(long)]
    measures: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    top_k: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    /// nearest (default) or farthest depolarizing channel
    #[arg(long)]
    ddc_mode: Option<String>,
    /// record wall-clock milliseconds per row (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> entsave::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_kv_file(path)?;
        }
        let flags = [
            ("families", &self.families),
            ("p_start", &self.p_start),
            ("p_end", &self.p_end),
            ("p_steps", &self.p_steps),
            ("measures", &self.measures),
            ("restarts", &self.restarts),
            ("seed", &self.seed),
            ("top_k", &self.top_k),
            ("max_iterations", &self.max_iterations),
            ("ddc_mode", &self.ddc_mode),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.timing {
            cfg.timing = true;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> entsave::Result<bool> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results.csv"));
            let points = run_sweep(&cfg)?;
            write_csv_file(&points, &out)?;
            eprintln!("wrote {} rows to {}", points.len(), out.display());
            Ok(true)
        }
        Command::Plot { input, out } => {
            emit_plot_script(&input, &out)?;
            eprintln!("wrote {}", out.display());
            Ok(true)
        }
        Command::Verify { level } => {
            let report = verify(level)?;
            println!("{report}");
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
