mod commands;
mod config;
mod failure;
mod output;

use clap::Parser;
use commands::Command;
use config::{parse_box, FieldSource, RunConfig};
use failure::Failure;
use output::{sha256_hex, Run};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Batch front end for torus domains: spectra, critical values, subfunctions.
#[derive(Parser, Debug)]
#[command(name = "torus-pencil", version)]
struct Cli {
    command: Command,
    /// `key value` configuration file
    config: Option<PathBuf>,
    /// Extra setting, applied after the file (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Search box re_min,re_max,im_min,im_max
    #[arg(long = "box", value_name = "BOX", allow_hyphen_values = true)]
    search_box: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Acceptance criterion to run under `verify` (repeatable; default all)
    #[arg(long)]
    criterion: Vec<usize>,
}

fn load(cli: &Cli) -> Result<(RunConfig, Vec<u8>), Failure> {
    let mut text = String::new();
    let mut cfg = match &cli.config {
        Some(path) => {
            text = fs::read_to_string(path).map_err(|e| Failure::config(format!("config {}: {e}", path.display())))?;
            RunConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))?
        }
        None => RunConfig::default(),
    };
    for s in &cli.set {
        let (k, v) = s.split_once('=').ok_or_else(|| Failure::config(format!("--set expects KEY=VALUE, got '{s}'")))?;
        cfg.set(k.trim(), v, Path::new("."))?;
        text.push_str(&format!("\n{k} {v}"));
    }
    if let Some(b) = &cli.search_box {
        cfg.search_box = Some(parse_box(b)?);
        text.push_str(&format!("\nbox {b}"));
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok((cfg, text.into_bytes()))
}

/// Hash of the command, the settings and every input file they name.
fn config_hash(command: &str, settings: &[u8], cfg: &RunConfig, criteria: &[usize]) -> String {
    let mut inputs: Vec<Vec<u8>> = vec![command.as_bytes().to_vec(), settings.to_vec()];
    let files = [cfg.shape.as_ref(), field_path(&cfg.field), field_path(&cfg.obstacle)];
    for p in files.into_iter().flatten() {
        inputs.push(fs::read(p).unwrap_or_default());
    }
    inputs.push(format!("{criteria:?}").into_bytes());
    let parts: Vec<&[u8]> = inputs.iter().map(|v| v.as_slice()).collect();
    sha256_hex(&parts)
}

fn field_path(src: &Option<FieldSource>) -> Option<&PathBuf> {
    match src {
        Some(FieldSource::File(p)) => Some(p),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|(cfg, settings)| {
        let name = cli.command.name();
        let mut run = Run::new(&name, config_hash(&name, &settings, &cfg, &cli.criterion));
        run.meta("seed", cfg.seed);
        commands::execute(cli.command, &cfg, &mut run, &cli.criterion)?;
        run.commit(&cfg.out)?;
        Ok(run)
    });
    match result {
        Ok(run) => {
            print!("{}", run.report_text());
            ExitCode::from(run.exit_code() as u8)
        }
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.kind.exit_code() as u8)
        }
    }
}
