//! `furstenberg`: build, verify and refine finite-field Furstenberg sets.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use furstenberg::constructions::{build_delta, build_prime_furstenberg, build_psquare};
use furstenberg::exact::Beta;
use furstenberg::incidence::{
    furstenberg_check, pair_count_certificate, run_pipeline, PipelineConfig,
};
use furstenberg::io;
use furstenberg::lw::{default_constant, refine};
use furstenberg::Field;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "furstenberg",
    version,
    about = "Finite-field Furstenberg sets: constructions, checks and refinements"
)]
struct Cli {
    /// Worker threads for the library (1 = serial).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Furstenberg set and write it as a JSON instance.
    #[command(subcommand)]
    Construct(Construct),
    /// Report the delta system used for F_q.
    Delta {
        #[arg(long)]
        q: u64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Check every direction exhaustively and the pair-count inequality.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        threshold: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Refine a grid and emit the certificate.
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        /// Removal constant, 100·n by default.
        #[arg(long)]
        constant: Option<u64>,
        /// Also write the refined grid here.
        #[arg(long)]
        refined: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Run the incidence pipeline on the prime-field construction.
    Lab {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long = "delta-coeff", default_value_t = 0.1)]
        delta_coeff: f64,
        /// Write the richness histogram as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Prime-field construction with exponent beta and constant K.
    Prime {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        /// Rational exponent, e.g. 1/2.
        #[arg(long)]
        beta: Beta,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Construction over F_{p^2} meeting every direction in p + 1 points.
    Psquare {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Check,
    Usage(String),
}

impl From<furstenberg::Error> for Failure {
    fn from(e: furstenberg::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Out, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn verdict(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    furstenberg::set_jobs(cli.jobs as usize)?;
    match cli.command {
        Command::Construct(Construct::Prime { p, n, beta, k, out }) => {
            let c = build_prime_furstenberg(p, n, beta, k)?;
            emit(&out, &io::instance_to_string(&c.instance))
        }
        Command::Construct(Construct::Psquare { p, n, out }) => {
            emit(&out, &io::instance_to_string(&build_psquare(p, n)?))
        }
        Command::Delta { q, k, out } => {
            let f = Field::of_order(q)?;
            let d = build_delta(&f, k)?;
            let doc = io::delta_to_value(&d);
            emit(&out, &io::to_pretty(&doc))?;
            verdict(doc["report"]["covered"] == true)
        }
        Command::Verify {
            input,
            threshold,
            out,
        } => {
            let inst = io::instance_from_str(&read(&input)?)?;
            let check = furstenberg_check(&inst, threshold);
            let pairs = pair_count_certificate(&inst);
            let ok = check.covered && pairs.holds;
            let doc = json!({ "furstenberg": check, "pair_count": pairs, "pass": ok });
            emit(&out, &io::to_pretty(&doc))?;
            verdict(ok)
        }
        Command::Refine {
            input,
            m,
            constant,
            refined,
            out,
        } => {
            let grid = io::grid_from_str(&read(&input)?)?;
            if m == 0 || m > grid.n() {
                return Err(Failure::Usage(format!(
                    "--m {m} must lie in [1, {}]",
                    grid.n()
                )));
            }
            let r = refine(
                &grid,
                m,
                constant.unwrap_or_else(|| default_constant(grid.n())),
            )?;
            if let Some(path) = refined {
                write(&path, &io::grid_to_string(&r.t2))?;
            }
            let ok = r.certificate.passes();
            let doc = serde_json::to_value(&r.certificate).map_err(furstenberg::Error::from)?;
            emit(&out, &io::to_pretty(&doc))?;
            verdict(ok)
        }
        Command::Lab {
            p,
            n,
            delta_coeff,
            csv,
            out,
        } => {
            let inst = build_prime_furstenberg(p, n, Beta::HALF, 1.0)?.instance;
            let mut cfg = PipelineConfig::new(p, n);
            cfg.delta_coefficient = delta_coeff;
            let report = run_pipeline(&cfg, &inst)?;
            if let Some(path) = csv {
                write(&path, &report.histogram_csv())?;
            }
            let doc = serde_json::to_value(&report).map_err(furstenberg::Error::from)?;
            emit(&out, &io::to_pretty(&doc))?;
            verdict(report.passes())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => {
            eprintln!("furstenberg: a check failed; see the report");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("furstenberg: {msg}");
            ExitCode::from(2)
        }
    }
}
