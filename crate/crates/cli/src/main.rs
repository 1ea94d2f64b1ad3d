use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use proca_cli::commands::termination_label;
use proca_cli::{analyze, run, sweep, Overrides, RunConfig};
use proca_core::SchemeKind;

#[derive(Parser)]
#[command(name = "proca", version, about = "Proca-field simulations with the SPS and SS schemes")]
struct Cli {
    /// Worker threads for field loops and transforms.
    #[arg(long, env = "PROCA_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML file with run settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

impl Common {
    fn resolve(self) -> anyhow::Result<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), self.overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run(Common),
    /// Run several resolutions and compare final valid times.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Grid sizes n (n × n × n3).
        #[arg(long, value_delimiter = ',', default_value = "50,100")]
        resolutions: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "sps,ss")]
        schemes: Vec<SchemeKind>,
        /// Times at which ‖C2‖ is recorded.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<f64>,
    },
    /// Write the per-mode constraint and amplification analysis.
    Analyze(Common),
}

fn usage_error(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    // Configuration problems are usage errors (exit 2); failures after
    // stepping has started exit 1.
    let result = match cli.command {
        Command::Run(c) => {
            let cfg = match c.resolve() {
                Ok(cfg) => cfg,
                Err(e) => return usage_error(e),
            };
            run(&cfg).map(|s| {
                println!(
                    "{}: reached t = {} ({}), output in {}",
                    cfg.scheme,
                    s.final_valid_time,
                    termination_label(&s.termination),
                    cfg.out_dir.display()
                );
                !s.solver_failed()
            })
        }
        Command::Analyze(c) => {
            let cfg = match c.resolve() {
                Ok(cfg) => cfg,
                Err(e) => return usage_error(e),
            };
            analyze(&cfg).map(|s| {
                println!(
                    "{} modes, min discriminant {}, max radius sps {} ss {}",
                    s.modes, s.min_discriminant, s.max_radius_sps, s.max_radius_ss
                );
                true
            })
        }
        Command::Sweep {
            common,
            resolutions,
            schemes,
            checkpoints,
        } => {
            let cfg = match common.resolve() {
                Ok(cfg) => cfg,
                Err(e) => return usage_error(e),
            };
            sweep(&cfg, &resolutions, &schemes, &checkpoints).map(|s| {
                for r in &s.rows {
                    println!(
                        "n={} {}: final valid time {} ({})",
                        r.resolution, r.scheme, r.final_valid_time, r.termination
                    );
                }
                true
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
