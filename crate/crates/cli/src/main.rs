use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use casimir_cli::config::{parse_overrides, RunConfig};
use casimir_cli::error::CliError;
use casimir_cli::pipeline::run_pipeline;
use casimir_cli::report::{write_json, write_run};
use casimir_cli::verify::verify_suite;
use casimir_core::force::{zeta3_quadrature, zeta3_series};
use casimir_core::par::Execution;

#[derive(Parser)]
#[command(name = "casimir", version, about = "Large-separation thermal Casimir force between conducting slabs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the configuration's output.dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Tolerance overrides, e.g. `sumrule=2e-2,leading=0.05`.
    #[arg(long, global = true)]
    tol_overrides: Option<String>,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the force at the configured separations.
    Run { config: PathBuf },
    /// Run the invariant checks of every module.
    Verify { config: PathBuf },
    /// Compute the force at the listed separations (input length units).
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        d_list: Vec<f64>,
    },
    /// Print the ζ(3)/2 quadrature and its series check.
    Zeta3,
}

fn load(cli: &Cli, path: &PathBuf) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(o) = &cli.tol_overrides {
        cfg.tolerances.apply_overrides(&parse_overrides(o)?)?;
        cfg.validate()?;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::Zeta3 => {
            let q = zeta3_quadrature();
            let s = zeta3_series(1_000_000);
            println!("quadrature  {:.16}  (error estimate {:.1e}, tail bound {:.1e})", q.value, q.error, q.tail_bound);
            println!("series      {:.16}  (10⁶ terms, tail ±{:.1e})", s.value, s.tail_uncertainty);
            println!("difference  {:.3e}", (q.value - s.value).abs());
            Ok(())
        }
        Command::Run { config } | Command::Sweep { config, .. } => {
            let cfg = load(cli, config)?;
            let d_list = match &cli.command {
                Command::Sweep { d_list, .. } => Some(d_list.as_slice()),
                _ => None,
            };
            let out = run_pipeline(&cfg, d_list, exec)?;
            write_run(cfg.output.dir.as_ref(), &out.report, &out.timing)?;
            for r in &out.report.rows {
                println!(
                    "d = {:<12.6e} f_leading = {:<14.6e} f_assembled = {:<14.6e} certified = {}",
                    r.d, r.f_leading, r.f_assembled, r.certified
                );
            }
            if out.report.certified {
                Ok(())
            } else {
                Err(CliError::Certification(format!("residuals above tolerance: {}", out.report.failing_residuals.join(", "))))
            }
        }
        Command::Verify { config } => {
            let cfg = load(cli, config)?;
            let report = verify_suite(&cfg, exec)?;
            let dir = std::path::Path::new(&cfg.output.dir);
            std::fs::create_dir_all(dir).map_err(|e| CliError::Output(e.to_string()))?;
            write_json(&dir.join("verify.json"), &report)?;
            for c in &report.checks {
                let verdict = match (c.passed, c.expected_fail) {
                    (true, _) => "PASS",
                    (false, true) => "XFAIL",
                    (false, false) => "FAIL",
                };
                println!("{verdict:<5} {:<10} {:<26} value = {:<12.4e} {}", c.module, c.name, c.value, c.detail);
            }
            if report.all_ok {
                Ok(())
            } else {
                Err(CliError::Certification("verification checks failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
