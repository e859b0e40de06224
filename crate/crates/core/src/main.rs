use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use absum::error::{Error, Result};
use absum::harness::{
    classify_report, falsify_report, run_demo, witness_report, CertificateFile, FalsifierBudget, Pipeline, Report,
};
use absum::norm2::NormSpec;
use absum::real::parse_q;
use absum::spaces::{DeskSpace, SliceSpec, Vector};

#[derive(Parser)]
#[command(name = "absum", version, about = "Daugavet- and Delta-points in absolute sums")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify an absolute normalized norm.
    Classify { norm: PathBuf },
    /// Diametral witness for a slice.
    Witness {
        space: PathBuf,
        x: PathBuf,
        slice: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Run a demo pipeline (thm22, prop23, prop24, thm31, thm32, thm41, ex43, prop44a, prop44b, prop45).
    Demo { pipeline: String, config: Option<PathBuf> },
    /// Try to break a certificate.
    Falsify {
        cert: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        ascent_steps: usize,
    },
}

fn read<T: DeserializeOwned>(p: &Path) -> Result<T> {
    let s = fs::read_to_string(p)?;
    serde_json::from_str(&s).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn run(cli: &Cli) -> Result<Report> {
    Ok(match &cli.cmd {
        Cmd::Classify { norm } => classify_report(&read::<NormSpec>(norm)?),
        Cmd::Witness { space, x, slice, eps } => {
            let space: DeskSpace = read(space)?;
            let x: Vector = read(x)?;
            let slice: SliceSpec = read(slice)?;
            let slice = SliceSpec::new(&space, slice.functional, slice.alpha)?;
            witness_report(&space, &x, &slice, &parse_q(eps)?)
        }
        Cmd::Demo { pipeline, config } => {
            let pipeline: Pipeline = pipeline.parse()?;
            let cfg = match config {
                Some(p) => read(p)?,
                None => serde_json::json!({}),
            };
            run_demo(pipeline, &cfg)
        }
        Cmd::Falsify { cert, samples, seed, ascent_steps } => {
            let file: CertificateFile = read(cert)?;
            let budget = FalsifierBudget {
                samples: *samples,
                ascent_steps: *ascent_steps,
                seed: *seed,
            };
            falsify_report(&file, &budget)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            return ExitCode::from(1);
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, text + "\n") {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("error [{}]: {}", e.code, e.message);
    }
    ExitCode::from(report.exit_code() as u8)
}
