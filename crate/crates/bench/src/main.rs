use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cram_bench::corpus::{self, Generator};
use cram_bench::harness::{self, Mode, Settings, VerifyOptions};
use cram_core::{Cram, XCram};

#[derive(Parser)]
#[command(name = "cram", version, about = "Compressed random access memory toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a structure and print its space report.
    Build {
        #[command(flatten)]
        common: Common,
        /// Build the insert/delete variant instead.
        #[arg(long)]
        xcram: bool,
        /// Write a snapshot here.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Fuzz both structures against flat arrays.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        ops: usize,
        /// Corrupt one stored bit before replaying, to exercise detection.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Overwrite one corpus with another, sampling space as CSV.
    Overwrite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_rotation: bool,
    },
    /// Time reads and writes at several unit sizes, as CSV.
    Throughput {
        #[command(flatten)]
        common: Common,
    },
    /// Print empirical entropies of order 0 to 3, as CSV.
    Entropy {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "theory")]
    mode: Mode,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    epsilon: f64,
    #[arg(long)]
    tau: Option<usize>,
    /// Migration pace for huffman-u mode.
    #[arg(long, default_value_t = 4)]
    u: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input file(s). A second file is the overwrite source.
    #[arg(long, num_args = 1..=2)]
    corpus: Vec<PathBuf>,
    /// Generator used when no corpus is given.
    #[arg(long = "gen", value_enum, default_value = "english")]
    generator: Generator,
    /// Generated corpus size in bytes.
    #[arg(long, default_value_t = 1 << 16)]
    size: usize,
}

impl Common {
    fn settings(&self, rotation: bool) -> Settings {
        Settings {
            mode: self.mode,
            epsilon: self.epsilon,
            tau: self.tau,
            u: self.u,
            rotation,
        }
    }

    fn primary(&self) -> Result<Vec<u8>> {
        match self.corpus.first() {
            Some(p) => corpus::load(p),
            None => Ok(corpus::generate(self.generator, self.size, self.seed)),
        }
    }

    /// Source and target for overwrite-style runs. Without files, English
    /// is overwritten with DNA.
    fn pair(&self) -> Result<(Vec<u8>, Vec<u8>)> {
        match self.corpus.as_slice() {
            [a, b] => Ok((corpus::load(a)?, corpus::load(b)?)),
            [_] => bail!("overwrite needs two corpora or none"),
            _ => Ok((
                corpus::english_like(self.size, self.seed),
                corpus::dna_like(self.size, self.seed.wrapping_add(1)),
            )),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build {
            common,
            xcram,
            snapshot,
        } => {
            let text = common.primary()?;
            let settings = common.settings(true);
            let mut bytes = Vec::new();
            let report = if xcram {
                let x = XCram::build(&text, harness::SIGMA, settings.xcram_config())?;
                let m = x.measure();
                if snapshot.is_some() {
                    x.save(&mut bytes)?;
                }
                format!(
                    "n={} super_blocks={} total_bits={} bpc_total={:.4} bpc_payload={:.4}\n",
                    x.len(),
                    x.super_blocks(),
                    m.total(),
                    m.bpc(),
                    m.payload_bpc()
                )
            } else {
                let built = harness::cmd_build(&text, &settings)?;
                if snapshot.is_some() {
                    built.cram.save(&mut bytes)?;
                }
                built.report
            };
            if let Some(p) = snapshot {
                std::fs::write(&p, &bytes).with_context(|| format!("writing {}", p.display()))?;
                // Round-trip check so a bad snapshot is caught at creation.
                if xcram {
                    XCram::load(&mut bytes.as_slice())?;
                } else {
                    Cram::load(&mut bytes.as_slice())?;
                }
            }
            common.emit(&report)?;
            Ok(true)
        }
        Command::Verify {
            common,
            ops,
            inject_fault,
        } => {
            let text = common.primary()?;
            let v = harness::cmd_verify(
                &text,
                &common.settings(true),
                &VerifyOptions {
                    seed: common.seed,
                    ops,
                    inject_fault,
                },
            )?;
            common.emit(&v.report)?;
            Ok(v.passed)
        }
        Command::Overwrite {
            common,
            no_rotation,
        } => {
            let (a, b) = common.pair()?;
            let rows = harness::cmd_overwrite(&a, &b, &common.settings(!no_rotation))?;
            common.emit(&harness::overwrite_csv(&rows))?;
            Ok(true)
        }
        Command::Throughput { common } => {
            let (a, b) = common.pair()?;
            let rows = harness::cmd_throughput(&a, &b, &common.settings(true))?;
            common.emit(&harness::throughput_csv(&rows))?;
            Ok(true)
        }
        Command::Entropy { common } => {
            let text = common.primary()?;
            common.emit(&harness::cmd_entropy(&text)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
