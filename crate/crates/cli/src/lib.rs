//! Command-line front end for `latmesh-core`: strict JSON/flag configuration,
//! subcommand dispatch, and CSV, JSON and gnuplot output.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;
use latmesh_core::precision::escalation_count;

pub use commands::{columns, dispatch, SUBCOMMANDS};
pub use config::RunConfig;
pub use error::CliError;
pub use report::{Report, Written};

#[derive(Debug, Parser)]
#[command(name = "latmesh", version, about = "Lattice points under h^a r^b <= x and moments of the error term")]
pub struct Cli {
    #[arg(value_parser = SUBCOMMANDS)]
    pub subcommand: String,
    #[command(flatten)]
    pub config: RunConfig,
}

/// Resolve, validate and run one subcommand, then write its files.
pub fn execute(sub: &str, flags: &RunConfig) -> Result<(Report, Written), CliError> {
    let cfg = RunConfig::resolve(flags)?;
    cfg.check_schema(sub)?;
    if cfg.threads == Some(0) {
        return Err(CliError::validation("threads must be positive"));
    }
    let start = Instant::now();
    let escalations = escalation_count();
    let table = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(CliError::internal)?
            .install(|| dispatch(sub, &cfg))?,
        None => dispatch(sub, &cfg)?,
    };
    let canonical = cfg.canonical();
    let mut report = Report {
        meta: report::Meta {
            subcommand: sub.to_string(),
            config: serde_json::from_str(&canonical).map_err(CliError::internal)?,
            config_hash: report::sha256_hex(&canonical),
            version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: latmesh_core::VERSION.to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
            escalations: escalation_count() - escalations,
            extra: table.extra,
        },
        columns: table.columns,
        rows: table.rows,
        warnings: table.warnings,
    };
    let written = report.write(&cfg.output_dir(), table.plot)?;
    Ok((report, written))
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_VALIDATION } else { error::EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.subcommand, &cli.config) {
        Ok((report, written)) => {
            if cli.subcommand == "count" {
                for row in &report.rows {
                    println!("{}", row[1]);
                }
            } else {
                print!("{}", report.csv());
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("wrote {}", written.csv.display());
            error::EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
