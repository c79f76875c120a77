use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bellctx::commands::{self, RunConfig, EXIT_INPUT};
use bellctx::output::{Format, Report};
use bellctx::CliError;
use clap::{Args, Parser, Subcommand};

/// Bell-type and generalized Aspect experiments, joint-distribution
/// feasibility, hidden-variables and macrostate models.
#[derive(Parser, Debug)]
#[command(name = "bellctx", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON input file; each subcommand has a builtin default
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout if omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for every random stream
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: all cores); never changes results
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One generalized Aspect experiment (input: experiment JSON)
    Aspect,
    /// Bell value and joint feasibility over a γ₁ × γ₂ grid (input: experiment JSON)
    GammaSweep {
        /// Comma-separated transmissivities in [0, 1]
        #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
        gammas: String,
    },
    /// Does a quadrivariate joint exist? Exit 3 if not (input: quartet JSON)
    Joint,
    /// Hidden-variables model CHSH (input: hv-model JSON)
    HvRun {
        /// Monte-Carlo samples per pair; exact summation if omitted
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Macrostate model: quartet, quad construction, value assignments (input: macro-model JSON)
    MacroRun {
        /// Sampling rounds of the value-assignment demo
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
    },
    /// CHSH against averaging window for the relaxation toy (input: relaxation JSON)
    RelaxSweep {
        /// Comma-separated windows (default: 0 … 100 in units of tau)
        #[arg(long)]
        windows: Option<String>,
        /// Samples per context, overriding the input
        #[arg(long)]
        samples: Option<u64>,
    },
    /// LP feasibility against BCHS on generated quartets; exit 3 on any disagreement
    FineCheck {
        /// Quartets per family (random quads, noisy PR boxes)
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

fn run(cli: &Cli) -> Result<(Report, i32), CliError> {
    let cfg = RunConfig { input: cli.common.input.clone(), seed: cli.common.seed, threads: cli.common.threads };
    match &cli.command {
        Command::Aspect => commands::aspect(&cfg),
        Command::GammaSweep { gammas } => commands::gamma_sweep(&cfg, &commands::parse_list(gammas)?),
        Command::Joint => commands::joint(&cfg),
        Command::HvRun { samples } => commands::hv_run(&cfg, *samples),
        Command::MacroRun { rounds } => commands::macro_run(&cfg, *rounds),
        Command::RelaxSweep { windows, samples } => {
            let w = windows.as_deref().map(commands::parse_list).transpose()?;
            commands::relax_sweep(&cfg, w.as_deref(), *samples)
        }
        Command::FineCheck { count } => commands::fine_check(&cfg, *count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("bellctx: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let text = report.render(cli.common.format);
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| (path.display().to_string(), e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| ("stdout".into(), e)),
    };
    if let Err((path, e)) = written {
        eprintln!("bellctx: {path}: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    ExitCode::from(code as u8)
}
