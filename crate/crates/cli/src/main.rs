use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linklab::{errata, execute, parse_config, preset, CliError, RunOptions, SweepSpec};
use linklab_core::analytic::Method;

#[derive(Parser)]
#[command(
    name = "linklab",
    version,
    about = "Outage and BER sweeps for a dual-hop RF/FSO relay link"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario document
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in figure scenario (fig2 ... fig8)
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the errata log
    Errata {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated methods: closed, quad, mc
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Replace closed-form values that disagree with quadrature
    #[arg(long)]
    trusted: bool,
    /// Worker threads
    #[arg(long)]
    workers: Option<usize>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn config_error(key: &str, message: String) -> CliError {
    CliError::Config {
        key: key.to_string(),
        line: 0,
        message,
    }
}

fn apply_overrides(spec: &mut SweepSpec, c: &Common) -> Result<(), CliError> {
    if let Some(ms) = &c.methods {
        let mut methods = Vec::new();
        for m in ms {
            let v: Method = m
                .trim()
                .parse()
                .map_err(|_| config_error("--methods", format!("unknown method \"{m}\" (closed, quad, mc)")))?;
            if !methods.contains(&v) {
                methods.push(v);
            }
        }
        if methods.is_empty() {
            return Err(config_error("--methods", "at least one method is required".into()));
        }
        methods.sort();
        spec.methods = methods;
    }
    if let Some(t) = c.trials {
        if t == 0 {
            return Err(config_error("--trials", "must be at least 1".into()));
        }
        spec.mc.trials = t;
    }
    if let Some(s) = c.seed {
        spec.mc.seed = s;
    }
    if c.workers == Some(0) {
        return Err(config_error("--workers", "must be at least 1".into()));
    }
    Ok(())
}

fn run(spec: Result<SweepSpec, CliError>, name: &str, c: &Common) -> ExitCode {
    let mut spec = match spec {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = apply_overrides(&mut spec, c) {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(w) = c.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let report = match execute(&spec, name, &c.out, RunOptions { trusted: c.trusted }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    println!("wrote {}", report.csv.display());
    let n_errata = report.output.errata.len();
    if n_errata > 0 {
        println!(
            "{n_errata} errata entries appended to {}",
            c.out.join(errata::ERRATA_FILE).display()
        );
    }
    if report.output.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &report.output.failures {
            eprintln!(
                "numeric failure: {} at {} dB ({}): {}",
                f.series, f.gamma_avg_db, f.method, f.error
            );
        }
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, common } => {
            let spec = fs::read_to_string(&config)
                .map_err(|e| CliError::io(&config, e))
                .and_then(|t| parse_config(&t));
            let name = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sweep".into());
            run(spec, &name, &common)
        }
        Command::Preset { name, common } => run(preset(&name), &name, &common),
        Command::Errata { out } => {
            let path = out.join(errata::ERRATA_FILE);
            match fs::read_to_string(&path) {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    println!("no errata recorded in {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    ExitCode::FAILURE
                }
            }
        }
    }
}
