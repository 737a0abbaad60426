//! `selberg-lab`: batch front end for the degree-one identification
//! pipeline.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::{CliError, Outcome};
use config::{Command, ConfigFile, Format, RouteArg, RunConfig};

const CSV_HELP: &str = "\
CSV columns by command:
  constants      quantity,value
  transform      alpha,T,route,re,im,normalized_re,normalized_im
  scan           alpha,k,den,magnitude,spread,peak
  extract        m,re,im,uncertainty
  identify       sigma,t,H_re,H_im
  verify-lemma   X,error,raw_error,terms
  verify-eq1     t,residual
  verify-expsum  n,quadrature_re,quadrature_im,main_re,main_im,normalized_residual
The first CSV line is a '#' comment holding the resolved config.

Exit status: 0 ok, 1 invalid input or missing data, 2 inconsistent
verdict or failed check, 3 numeric budget exceeded.";

#[derive(Parser, Debug)]
#[command(name = "selberg-lab", version, about = "Identify degree-one Dirichlet series from functional-equation data", after_help = CSV_HELP, allow_negative_numbers = true)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Functional-equation descriptor (JSON).
    #[arg(long = "fe-file")]
    fe_file: Option<PathBuf>,
    /// Coefficient file (JSON), character or explicit.
    #[arg(long = "coeff-file")]
    coeff_file: Option<PathBuf>,
    /// JSON file with default knobs; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Height T (for verify-lemma the height t, for verify-eq1 the largest t).
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    #[arg(long = "grid-den")]
    grid_den: Option<u64>,
    /// Scan α ∈ (0, M].
    #[arg(long = "M")]
    m: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for sampled checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

impl Cli {
    fn flags(&self) -> ConfigFile {
        ConfigFile {
            fe_path: self.fe_file.clone(),
            coeff_path: self.coeff_file.clone(),
            t: self.t,
            alpha: self.alpha,
            route: self.route,
            grid_den: self.grid_den,
            m: self.m,
            tol: self.tol,
            output_path: self.output.clone(),
            format: self.format,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

fn render(cfg: &RunConfig, out: &Result<Outcome, CliError>) -> String {
    let config = serde_json::to_value(cfg).expect("config serializes");
    match (cfg.format, out) {
        (Format::Json, Ok(o)) => {
            let doc = json!({ "command": cfg.command.name(), "config": config, "consistent": o.consistent, "result": o.result });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        (Format::Csv, Ok(o)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&o.header).expect("in-memory write");
            for row in &o.rows {
                w.write_record(row).expect("in-memory write");
            }
            let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
            format!("# config: {config}\n{body}")
        }
        (_, Err(e)) => {
            let doc = json!({
                "command": cfg.command.name(),
                "config": config,
                "error": { "kind": e.kind(), "message": e.message() },
            });
            serde_json::to_string_pretty(&doc).expect("error record serializes") + "\n"
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not usage errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => return usage_error(cli.command, &e),
    };
    let cfg = match RunConfig::resolve(cli.command, cli.flags(), file) {
        Ok(c) => c,
        Err(e) => return usage_error(cli.command, &e),
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return usage_error(cli.command, &e.to_string());
        }
    }
    let out = commands::run(&cfg);
    let text = render(&cfg, &out);
    let written = match &cfg.output_path {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("selberg-lab: cannot write report: {e}");
        return ExitCode::from(1);
    }
    let code = match &out {
        Ok(o) if o.consistent => 0,
        Ok(_) => 2,
        Err(e) => {
            eprintln!("selberg-lab: {}: {}", e.kind(), e.message());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

/// Problems found before a config could be resolved.
fn usage_error(command: Command, msg: &str) -> ExitCode {
    let doc = json!({ "command": command.name(), "error": { "kind": "InvalidInput", "message": msg } });
    println!("{}", serde_json::to_string_pretty(&doc).expect("error record serializes"));
    eprintln!("selberg-lab: {msg}");
    ExitCode::from(1)
}
