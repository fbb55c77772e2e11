//! `mastite` operator command line.
//!
//! Exit codes: `0` Healthy (and general success), `1` failure, `2`
//! Attention, `3` Sick, `4` Indeterminate. Status codes are only used by
//! `classify`.

mod commands;

use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mastite_core::{ClassificationMode, ReadingDate, ReportFormat};

#[derive(Debug, Parser)]
#[command(
    name = "mastite",
    version,
    about = "Teat-temperature screening for subclinical mastitis"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Store file (SQLite). Required by every command except `classify`.
    #[arg(long, global = true, env = "MASTITE_STORE")]
    pub store: Option<PathBuf>,

    /// Classification mode: `worst-teat` or `paper-faithful`.
    #[arg(
        long,
        global = true,
        env = "MASTITE_MODE",
        default_value = "worst-teat"
    )]
    pub mode: ClassificationMode,

    /// Output format: `text` or `json`.
    #[arg(long, global = true, env = "MASTITE_FORMAT", default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP service (legacy endpoint and JSON API).
    Serve {
        #[arg(long, env = "MASTITE_PORT", default_value_t = mastite_service::ServiceConfig::DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "MASTITE_HOST", default_value = "0.0.0.0")]
        host: IpAddr,
        /// Reject legacy inserts with teats outside 32.0..=42.9 °C.
        #[arg(long, env = "MASTITE_LEGACY_STRICT")]
        legacy_strict: bool,
    },
    /// Classify one quartet of teat temperatures. Exit code encodes the status.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[arg(value_name = "TEAT", num_args = 4, required = true)]
        teats: Vec<f64>,
    },
    /// Import a field CSV (IdCow,Date,Teat1,Teat2,Teat3,Teat4,Mastitis).
    Import { csv: PathBuf },
    /// Concordance report of temperature status against the cup test.
    Report,
    /// Show the most recently stored reading with both statuses.
    Last,
    /// List stored readings, oldest first.
    List {
        /// Only this animal.
        #[arg(long)]
        animal: Option<u32>,
        /// Inclusive lower date bound (YYYY-MM-DD, DD/MM/YYYY or DDMMYYYY).
        #[arg(long)]
        from: Option<ReadingDate>,
        /// Inclusive upper date bound.
        #[arg(long)]
        to: Option<ReadingDate>,
    },
}

pub const EXIT_FAILURE: u8 = 1;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_FAILURE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let default_level = if matches!(cli.command, Command::Serve { .. }) {
        "info"
    } else {
        "warn"
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default_level)),
        )
        .init();

    let g = &cli.global;
    let result = match cli.command {
        Command::Serve {
            port,
            host,
            legacy_strict,
        } => commands::serve(g, host, port, legacy_strict),
        Command::Classify { teats } => commands::classify(g, &teats),
        Command::Import { csv } => commands::import(g, &csv),
        Command::Report => commands::report(g),
        Command::Last => commands::last(g),
        Command::List { animal, from, to } => commands::list(g, animal, from, to),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
