use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oar_core::codec::{Codebook, CodebookParams};
use oar_core::graph::{ged, GedCosts, OarGraph, Vocabulary};
use oar_link::codebook_io::save_codebook;
use oar_link::harness::{open_outputs, run_sweep, timing_report, write_outputs, Experiment};
use oar_link::vocab_io::{resolve_vocabulary, write_vocabulary};
use oar_link::{load_corpus, parse_graph, Error, ExperimentConfig};

#[derive(Parser)]
#[command(name = "oar-link", version, about = "O-A-R semantic link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one JSON record per trial.
        #[arg(long)]
        jsonl: bool,
        /// Worker threads (OAR_LINK_THREADS takes precedence).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the builtin vocabulary.
    GenVocab {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate and save a codebook.
    GenCodebook {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "builtin")]
        vocab: String,
    },
    /// Graph edit distance between two graph files.
    Ged { graph1: PathBuf, graph2: PathBuf },
    /// Check every line of a graph corpus.
    Validate {
        corpus: PathBuf,
        #[arg(long, default_value = "builtin")]
        vocab: String,
    },
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var("OAR_LINK_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("OAR_LINK_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(flag),
    }
}

fn read_graph(path: &Path) -> Result<OarGraph, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(text.trim()).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out, jsonl, threads: flag } => {
            let n = threads(flag)?;
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.clone());
            let exp = Experiment::new(cfg)?;
            let outputs = open_outputs(&dir, jsonl)?;
            let csv = outputs.csv_path.clone();
            let sweep = run_sweep(&exp, n)?;
            write_outputs(outputs, &sweep)?;
            eprint!("{}", timing_report(&sweep));
            println!("{} rows, {} trials -> {}", sweep.rows.len(), sweep.trials.len(), csv.display());
        }
        Command::GenVocab { out } => write_vocabulary(&out, &Vocabulary::builtin())?,
        Command::GenCodebook { seed, out, vocab } => {
            let v = resolve_vocabulary(&vocab)?;
            let cb = Codebook::for_vocabulary(CodebookParams::with_seed(seed), &v)
                .map_err(|e| Error::Config(format!("codebook: {e}")))?;
            save_codebook(&out, &cb)?;
        }
        Command::Ged { graph1, graph2 } => {
            let (a, b) = (read_graph(&graph1)?, read_graph(&graph2)?);
            let r = ged(&a, &b, &GedCosts::default()).map_err(|e| Error::Config(e.to_string()))?;
            println!(
                "{}",
                serde_json::json!({ "raw": r.raw, "normalized": r.normalized, "exact": r.exact })
            );
        }
        Command::Validate { corpus, vocab } => {
            let v = resolve_vocabulary(&vocab)?;
            let graphs = load_corpus(&corpus, &v)?;
            println!("{}: {} graphs ok", corpus.display(), graphs.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oar-link: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
