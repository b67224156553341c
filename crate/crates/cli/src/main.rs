use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasetopo::config::{self, ConfigError, Overrides};
use phasetopo::output;
use phasetopo::pipeline::{self, PipelineError};
use phasetopo::presets::{self, PRESETS};

const DEFAULT_OUT_DIR: &str = "phasetopo-out";

#[derive(Parser)]
#[command(name = "phasetopo", version, about = "Betti-number signatures of ODE trajectories")]
struct Cli {
    /// Format of the summary printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; beats the config and PHASETOPO_OUT_DIR.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Use exact overlaps regardless of the config.
        #[arg(long)]
        exact: bool,
    },
    /// List the built-in presets, or print one preset's config.
    Presets { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    status: &'static str,
    exit_code: u8,
    kind: &'static str,
    module: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    message: String,
}

fn fail(report: ErrorReport<'_>) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&report).expect("error reports serialize"));
    ExitCode::from(report.exit_code)
}

fn config_error(e: &ConfigError) -> ExitCode {
    fail(ErrorReport {
        status: "error",
        exit_code: 2,
        kind: "config",
        module: "cli",
        field: e.field(),
        message: e.to_string(),
    })
}

fn pipeline_error(e: &PipelineError) -> ExitCode {
    fail(ErrorReport {
        status: "error",
        exit_code: 1,
        kind: "pipeline",
        module: e.module,
        field: None,
        message: e.message.clone(),
    })
}

fn run(path: PathBuf, overrides: Overrides, format: Format) -> ExitCode {
    let cfg = match config::load(&path, &overrides) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let out = match pipeline::run(&cfg) {
        Ok(o) => o,
        Err(e) => return pipeline_error(&e),
    };
    let dir = cfg
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("PHASETOPO_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    if let Err(e) = output::write_all(&dir, &output::render(&cfg, &out)) {
        return pipeline_error(&PipelineError {
            module: "cli",
            message: format!("writing {}: {e}", dir.display()),
        });
    }
    let label = out.signature.label.as_str();
    match format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "status": "ok",
                "system": cfg.name,
                "label": label,
                "out_dir": dir,
                "files": output::FILES,
            })
        ),
        Format::Csv => println!("status,system,label,out_dir\nok,{},{label},{}", cfg.name, dir.display()),
    }
    ExitCode::SUCCESS
}

fn list_presets(name: Option<String>, format: Format) -> ExitCode {
    if let Some(name) = name {
        return match presets::find(&name) {
            Some(p) => {
                print!("# {}: {}\n# {}\n{}", p.name, p.form, p.provenance, p.config);
                ExitCode::SUCCESS
            }
            None => config_error(&ConfigError::UnknownPreset(name)),
        };
    }
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(PRESETS).expect("presets serialize")),
        Format::Csv => {
            println!("name,form,provenance");
            for p in PRESETS {
                println!("{},\"{}\",\"{}\"", p.name, p.form, p.provenance);
            }
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            out_dir,
            exact,
        } => run(config, Overrides { seed, out_dir, exact }, cli.format),
        Command::Presets { name } => list_presets(name, cli.format),
    }
}
