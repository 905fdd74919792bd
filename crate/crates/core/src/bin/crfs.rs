use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crfs::io::commands::{self, exit_code_for_error, Overrides, EXIT_FAILURE, EXIT_OK};
use crfs::io::print_defaults;

#[derive(Parser)]
#[command(name = "crfs", version, about = "Spectral solver for chemically reacting power-law fluids")]
struct Cli {
    /// Output directory (overrides [output] out_dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Steps between diagnostics records (overrides [solver] cadence).
    #[arg(long, global = true)]
    cadence: Option<usize>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured scenario.
    Run { config: PathBuf },
    /// Manufactured-solution convergence study.
    Converge { config: PathBuf },
    /// Twin-run uniqueness experiment.
    Unique { config: PathBuf },
    /// Randomized checks of the structural stress bounds.
    CheckConstitutive {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Config whose constitutive section is checked.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print a config file with every key at its default.
    PrintDefaults,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let quiet = cli.quiet;
    let say = |s: String| {
        if !quiet {
            println!("{s}");
        }
    };
    let overrides = Overrides { out_dir: cli.out_dir.clone(), cadence: cli.cadence };

    let code = match cli.command {
        Command::PrintDefaults => {
            print!("{}", print_defaults());
            Ok(EXIT_OK)
        }
        Command::Run { config } => commands::cmd_run(&config, &overrides).map(|r| {
            let m = &r.manifest;
            say(format!("{:?} after {} steps; output in {}", m.termination, m.steps, r.out_dir.display()));
            if let Some(msg) = m.message.as_ref().or(m.error.as_ref()) {
                log::error!("{msg}");
            }
            r.exit_code()
        }),
        Command::Converge { config } => commands::cmd_converge(&config, &overrides).map(|t| {
            for (name, rows) in [("spatial", &t.spatial), ("temporal", &t.temporal)] {
                for r in rows {
                    say(format!("{name:8} n = {:4} dt = {:.2e} err_v = {:.3e} err_c = {:.3e}", r.n, r.dt, r.err_v, r.err_c));
                }
            }
            let (rv, rc) = t.spatial_ratios();
            let (sv, sc) = t.temporal_slopes();
            say(format!("spatial ratios v {rv:.2?} c {rc:.2?}; temporal slopes v {sv:.3} c {sc:.3}"));
            EXIT_OK
        }),
        Command::Unique { config } => commands::cmd_unique(&config, &overrides).map(|r| {
            if let Some(w) = &r.regime_warning {
                log::warn!("{w}");
            }
            say(format!(
                "eps = {:e}: envelope {} (C = {:.4e}, margin = {:.3e})",
                r.eps,
                if r.gronwall.passed { "holds" } else { "violated" },
                r.gronwall.constant,
                r.gronwall.margin
            ));
            if r.gronwall.passed {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }),
        Command::CheckConstitutive { samples, seed, config } => {
            commands::cmd_check_constitutive(config.as_deref(), samples, seed, cli.out_dir.as_deref()).map(|r| {
                say(format!(
                    "{} samples: K1 >= {:.4e}, K2 <= {:.4e}, K3 <= {:.4e}, K4 >= {:.4e}, violations {}",
                    r.samples, r.k1, r.k2, r.k3, r.k4, r.violations
                ));
                if r.passed() {
                    EXIT_OK
                } else {
                    EXIT_FAILURE
                }
            })
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}
