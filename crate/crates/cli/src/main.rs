mod batch;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FileConfig, RunConfig, RunFlags};
use nli_refine::informal::LexicalEmbedder;
use nli_refine::prop::{derive_implications, format_logical_information, parse_logical_information, PropError};
use nli_refine::refine::{faithfulness_rows, faithfulness_table};
use nli_refine::theory::parse_theory;

#[derive(Parser)]
#[command(name = "nli-refine", version, about = "Verify and refine NLI explanations with a theorem prover")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check each explanation once, without refinement.
    Verify(RunFlags),
    /// Run the full refinement loop on each instance.
    Refine(RunFlags),
    /// Print a logical-information block with derived implications.
    Derive { file: PathBuf },
    /// Informalise each clause of a theory and score it against its sentence.
    Informalise {
        file: PathBuf,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(Failure::usage)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Verify(flags) => {
            let mut config = RunConfig::merge(file, &flags).map_err(Failure::usage)?;
            config.refine.max_iterations = 0;
            batch_command(&flags.instances, &config)
        }
        Command::Refine(flags) => {
            let config = RunConfig::merge(file, &flags).map_err(Failure::usage)?;
            if config.refine.max_iterations == 0 {
                return Err(Failure::usage("--max-iters must be at least 1 (use verify for a single check)"));
            }
            batch_command(&flags.instances, &config)
        }
        Command::Derive { file } => derive(&file),
        Command::Informalise { file: path, out } => informalise(&path, out.as_deref(), &file),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn batch_command(instances: &Path, config: &RunConfig) -> Result<(), Failure> {
    if !instances.is_file() {
        return Err(Failure::usage(format!("{}: no such file", instances.display())));
    }
    let instances = nli_refine::dataset::load_instances(instances).map_err(|e| Failure::usage(e.to_string()))?;
    let summary = batch::run(&instances, config).map_err(Failure::runtime)?;
    println!("{summary}");
    Ok(())
}

fn derive(path: &Path) -> Result<(), Failure> {
    let text = read(path)?;
    let model = parse_logical_information(&text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    match derive_implications(&model) {
        Ok(derived) => {
            print!("{}", format_logical_information(&derived));
            Ok(())
        }
        Err(e @ PropError::TooManyAtoms { .. }) => Err(Failure { code: 3, message: e.to_string() }),
        Err(e) => Err(Failure::runtime(e.to_string())),
    }
}

fn informalise(path: &Path, out: Option<&Path>, file: &FileConfig) -> Result<(), Failure> {
    let text = read(path)?;
    let doc = parse_theory(&text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    let embedder = batch::embedder(file.embedder.as_ref());
    let rows = faithfulness_rows(&doc, embedder.as_deref().unwrap_or(&LexicalEmbedder));
    let table = faithfulness_table(&rows);
    match out {
        Some(p) => std::fs::write(p, table).map_err(|e| Failure::runtime(format!("{}: {e}", p.display()))),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}
