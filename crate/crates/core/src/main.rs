use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kvol::cli_reports::{
    cmd_diagrams, cmd_enumerate, cmd_hyp_reduce, cmd_kvol_closed, cmd_kvol_empirical, cmd_ngon, cmd_pairing, cmd_scan, cmd_verify,
    parse_model, to_json, Precision, RunConfig,
};
use kvol::flat_core::Model;
use kvol::hecke_hyperbolic::UHPoint;
use kvol::kvol_engine::Grid;

#[derive(Parser)]
#[command(name = "kvol", version, about = "KVol on the Teichmuller disc of the double regular n-gon")]
struct Cli {
    #[arg(long, global = true, default_value = "standard")]
    precision: Precision,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value = "double", value_parser = parse_model)]
    model: Model,
    #[arg(long, default_value_t = 2.2)]
    lmax: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Template summary.
    Ngon(Common),
    /// Saddle connections up to a length bound, as CSV.
    Enumerate(Common),
    /// Intersection numbers of enumerated connections.
    Pairing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        check_oracle: bool,
    },
    /// Hyperbolic plane utilities.
    Hyp {
        #[command(subcommand)]
        cmd: HypCommand,
    },
    /// Closed-form or empirical KVol at a point of the disc.
    Kvol {
        #[command(subcommand)]
        cmd: KvolCommand,
    },
    /// KVol over a grid of the fundamental domain, as CSV.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        nx: usize,
        #[arg(long, default_value_t = 20)]
        ny: usize,
        #[arg(long, default_value_t = 3.0)]
        ymax: f64,
        /// Where to write the JSON summary of the extremal cells.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Transition diagrams of every sector.
    Diagrams {
        #[arg(long, default_value_t = 7)]
        n: usize,
    },
    /// Run every acceptance check and report.
    Verify {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HypCommand {
    /// Move a point into the fundamental domain of the Hecke group.
    Reduce {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Args)]
struct Point {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    y: f64,
}

#[derive(Subcommand)]
enum KvolCommand {
    Closed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
    Empirical {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: Point,
    },
}

fn config(cli: &Cli, c: &Common) -> RunConfig {
    RunConfig { n: c.n, model: c.model, lmax: c.lmax, precision: cli.precision, seed: cli.seed, ..RunConfig::default() }
}

fn emit(text: &str, out: Option<&PathBuf>) -> kvol::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> kvol::Result<bool> {
    if cli.threads > 0 {
        // Only fails when a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match &cli.cmd {
        Command::Ngon(c) => emit(&cmd_ngon(&config(cli, c))?, c.out.as_ref())?,
        Command::Enumerate(c) => emit(&cmd_enumerate(&config(cli, c))?, c.out.as_ref())?,
        Command::Pairing { common, check_oracle } => emit(&cmd_pairing(&config(cli, common), *check_oracle)?, common.out.as_ref())?,
        Command::Hyp { cmd: HypCommand::Reduce { n, z } } => emit(&cmd_hyp_reduce(*n, z)?, None)?,
        Command::Kvol { cmd } => {
            let (common, point, closed) = match cmd {
                KvolCommand::Closed { common, point } => (common, point, true),
                KvolCommand::Empirical { common, point } => (common, point, false),
            };
            let cfg = config(cli, common);
            let x = UHPoint::new(point.x, point.y)?;
            let text = if closed { cmd_kvol_closed(&cfg, &x)? } else { cmd_kvol_empirical(&cfg, &x)? };
            emit(&text, common.out.as_ref())?;
        }
        Command::Scan { common, nx, ny, ymax, summary } => {
            let cfg = RunConfig { grid: Grid { nx: *nx, ny: *ny, y_max: *ymax }, ..config(cli, common) };
            let out = cmd_scan(&cfg)?;
            emit(&out.csv, common.out.as_ref())?;
            match summary {
                Some(p) => std::fs::write(p, &out.summary)?,
                None => eprint!("{}", out.summary),
            }
        }
        Command::Diagrams { n } => emit(&cmd_diagrams(*n)?, None)?,
        Command::Verify { n, out } => {
            let cfg = RunConfig { n: *n, precision: cli.precision, seed: cli.seed, ..RunConfig::default() };
            let report = cmd_verify(&cfg)?;
            for c in &report.criteria {
                eprintln!("[{}] {:>2} {} ({:.2}s)", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.elapsed_s);
            }
            emit(&to_json(&report)?, out.as_ref())?;
            return Ok(report.all_pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
