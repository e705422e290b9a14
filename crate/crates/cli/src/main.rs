mod config;
mod experiments;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::{validate, ConfigError, Kind};
use record::Check;

#[derive(Parser)]
#[command(name = "kset", version, about = "Seeded batch experiments for k-edges, curve crossings and translation ranges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides the config, stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// k-edge and k-facet counts of generated point sets.
    Kedges(Global),
    /// Convex and concave chain decompositions of k-edge graphs.
    Chains(Global),
    /// Direct and formula estimates of expected k-facet counts.
    Expected(Global),
    /// Crossings of a fixed curve with k-edge graphs.
    CurveIntersect(Global),
    /// Seeded search for curves meeting many k-edges.
    Question1(Global),
    /// Translation k-set and k-edge counts.
    TcCount(Global),
    /// Growth of the mean translation k-set count with n.
    TcScaling(Global),
    /// Growth-function counts and 4-point shattering.
    Growth(Global),
    /// Check a config and list every problem found.
    Validate(Global),
}

fn load(g: &Global) -> Result<Value, ConfigError> {
    let mut v = config::read_json(&g.config)?;
    if let (Some(seed), Some(obj)) = (g.seed, v.as_object_mut()) {
        obj.insert("seed".into(), seed.into());
    }
    Ok(v)
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn run(kind: Kind, g: &Global) -> ExitCode {
    let value = match load(g) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let cfg = match validate(&value, Some(kind)) {
        Ok(c) => c,
        Err(violations) => {
            return fail(ConfigError::ConfigInvalid { path: g.config.display().to_string(), violations });
        }
    };
    let workers = g.workers.or(cfg.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let rows = match pool.install(|| experiments::run(&cfg)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let csv = record::to_csv(&rows);
    let out = g.out.clone().or_else(|| cfg.output.clone().map(PathBuf::from));
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                return fail(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
    let violations = rows.iter().filter(|r| r.check == Check::Violation).count();
    if violations > 0 {
        eprintln!("{violations} VIOLATION rows");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, g) = match &cli.command {
        Command::Kedges(g) => (Kind::KEdges, g),
        Command::Chains(g) => (Kind::Chains, g),
        Command::Expected(g) => (Kind::Expected, g),
        Command::CurveIntersect(g) => (Kind::CurveIntersect, g),
        Command::Question1(g) => (Kind::Question1, g),
        Command::TcCount(g) => (Kind::TcCount, g),
        Command::TcScaling(g) => (Kind::TcScaling, g),
        Command::Growth(g) => (Kind::Growth, g),
        Command::Validate(g) => {
            let value = match load(g) {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            return match validate(&value, None) {
                Ok(_) => {
                    println!("ok");
                    ExitCode::SUCCESS
                }
                Err(violations) => {
                    for v in &violations {
                        println!("{v}");
                    }
                    ExitCode::from(1)
                }
            };
        }
    };
    run(kind, g)
}
