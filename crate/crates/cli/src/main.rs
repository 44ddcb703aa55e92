//! Command-line runner for tubekit experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::{execute, CliError};
use config::{CommandName, DomainKind, Format, NormalizationArg, RunConfig};
use output::Header;

/// Directory used for output files when `--out` is not given.
const OUT_DIR_ENV: &str = "TUBEKIT_OUT_DIR";

#[derive(Parser)]
#[command(name = "tubekit", version, about = "Hilbert, Kobayashi and hyperbolicity experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file; defaults to $TUBEKIT_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hilbert distance between two points of a body.
    HilbertDist {
        #[arg(long)]
        body: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        y: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Four-point alpha of Hilbert balls across scales.
    DeltaProfile {
        #[arg(long)]
        body: String,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
        /// Sampled quadruples per scale; omit for an exhaustive scan.
        #[arg(long)]
        quadruples: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        basepoint: Option<Vec<f64>>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Blow-up sequence at a boundary point and its limit verdict.
    OrbitLimit {
        #[arg(long)]
        body: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        target: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum)]
        normalization: Option<NormalizationArg>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Certified Kobayashi bracket; points are interleaved re,im pairs.
    KobaInterval {
        #[arg(long, value_enum)]
        domain: Option<DomainKind>,
        #[arg(long)]
        body: Option<String>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        w: Vec<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        functionals: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Brackets along an imaginary fiber of a tube.
    TubeFlat {
        #[arg(long)]
        base: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        c0: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        u: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        functionals: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Bidisk embedding errors into the tube over the square.
    AsymEmbed {
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        #[command(flatten)]
        common: Common,
    },
    /// Hypothesis indicators for a bounded base.
    Dashboard {
        #[arg(long)]
        base: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        quadruples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn spec(s: String) -> Value {
    Value::String(s)
}

fn to_config(cmd: Cmd) -> Result<RunConfig, String> {
    let mut c = RunConfig::default();
    let common = match cmd {
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            return RunConfig::from_json(&text).map_err(|e| e.0);
        }
        Cmd::HilbertDist { body, x, y, common } => {
            c.command = Some(CommandName::HilbertDist);
            c.body = Some(spec(body));
            c.x = Some(x);
            c.y = Some(y);
            common
        }
        Cmd::DeltaProfile { body, scales, points, quadruples, basepoint, seed, common } => {
            c.command = Some(CommandName::DeltaProfile);
            c.body = Some(spec(body));
            c.scales = scales;
            c.points = points;
            c.quadruples = quadruples;
            c.basepoint = basepoint;
            c.seed = Some(seed);
            common
        }
        Cmd::OrbitLimit { body, target, rates, radius, tol, normalization, seed, common } => {
            c.command = Some(CommandName::OrbitLimit);
            c.body = Some(spec(body));
            c.target = Some(target);
            c.rates = rates;
            c.radius = radius;
            c.tol = tol;
            c.normalization = normalization;
            c.seed = Some(seed);
            common
        }
        Cmd::KobaInterval { domain, body, z, w, steps, functionals, seed, common } => {
            c.command = Some(CommandName::KobaInterval);
            c.domain = domain;
            c.body = body.map(spec);
            c.z = Some(z);
            c.w = Some(w);
            c.steps = steps;
            c.functionals = functionals;
            c.seed = Some(seed);
            common
        }
        Cmd::TubeFlat { base, c0, u, t, steps, functionals, seed, common } => {
            c.command = Some(CommandName::TubeFlat);
            c.base = Some(spec(base));
            c.c0 = c0;
            c.u = u;
            c.t = t;
            c.steps = steps;
            c.functionals = functionals;
            c.seed = Some(seed);
            common
        }
        Cmd::AsymEmbed { n, common } => {
            c.command = Some(CommandName::AsymEmbed);
            c.n = n;
            common
        }
        Cmd::Dashboard { base, seed, scales, points, quadruples, common } => {
            c.command = Some(CommandName::Dashboard);
            c.base = Some(spec(base));
            c.seed = Some(seed);
            c.scales = scales;
            c.points = points;
            c.quadruples = quadruples;
            common
        }
    };
    c.output = common.out;
    c.format = common.format;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match to_config(cli.cmd) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(CliError::Module(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_contract_violation() { 3 } else { 2 });
        }
    };
    let command = cfg.command.expect("validated").as_str();
    let hash = cfg.hash();
    let header = Header {
        command,
        seed: cfg.seed,
        config_hash: &hash,
    };
    let format = cfg.format.unwrap_or_default();
    let (text, ext) = match format {
        Format::Csv => (report.to_csv(&header), "csv"),
        Format::Json => (report.to_json(&header), "json"),
    };
    let dest = cfg
        .output
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{command}.{ext}"))));
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    eprintln!("error: {}: {e}", parent.display());
                    return ExitCode::from(2);
                }
            }
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
            for line in &report.summary {
                println!("{line}");
            }
            println!("wrote {}", path.display());
        }
        None => {
            print!("{text}");
            for line in &report.summary {
                eprintln!("{line}");
            }
        }
    }
    ExitCode::SUCCESS
}
