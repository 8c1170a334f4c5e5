use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use nli_refine::llm::ProviderConfig;
use nli_refine::prover::DEFAULT_TIMEOUT_SECS;
use nli_refine::refine::RefineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Live,
    Replay,
    Record,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProverConfig {
    /// Program and arguments; `{file}` is replaced by the theory path.
    pub command: Option<Vec<String>>,
    pub timeout_secs: Option<u64>,
    pub workdir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedderConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: Option<String>,
    #[serde(default = "default_embed_timeout")]
    pub timeout_secs: u64,
}

fn default_embed_timeout() -> u64 {
    60
}

/// Contents of the `--config` TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub cassette: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub average_over_all: bool,
    pub provider: ProviderConfig,
    pub refine: RefineConfig,
    pub prover: ProverConfig,
    pub embedder: Option<EmbedderConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    /// Instance file, one JSON record per line.
    pub instances: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Instances processed concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub max_syntax_repairs: Option<usize>,
    #[arg(long)]
    pub no_quantifier_refine: bool,
    /// Run quantifier refinement on the first iteration only.
    #[arg(long)]
    pub quantifier_first_only: bool,
    #[arg(long)]
    pub no_syntax_refine: bool,
    #[arg(long)]
    pub no_logical_relations: bool,
    #[arg(long)]
    pub binary_feedback: bool,
    /// Directory of per-instance cassettes (`<dir>/<instance>/{llm,prover}.jsonl`).
    #[arg(long)]
    pub cassette: Option<PathBuf>,
    /// Prover command line, split on whitespace. Without one the built-in
    /// ground prover is used.
    #[arg(long)]
    pub prover_cmd: Option<String>,
    /// Prover timeout in seconds.
    #[arg(long)]
    pub timeout: Option<u64>,
    /// Directory of prompt template overrides.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Output directory [default: runs/latest].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Average #Iter and #Calls over all instances instead of valid ones.
    #[arg(long)]
    pub average_over_all: bool,
}

/// Everything a batch run needs, after merging the file with the flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub jobs: usize,
    pub out: PathBuf,
    pub cassette: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub average_over_all: bool,
    pub provider: ProviderConfig,
    pub refine: RefineConfig,
    pub prover_command: Option<Vec<String>>,
    pub prover_timeout: u64,
    pub prover_workdir: PathBuf,
    pub embedder: Option<EmbedderConfig>,
}

impl RunConfig {
    /// Flags given on the command line take precedence over the file.
    pub fn merge(file: FileConfig, flags: &RunFlags) -> Result<Self, String> {
        let mut refine = file.refine;
        if let Some(n) = flags.max_iters {
            refine.max_iterations = n;
        }
        if let Some(n) = flags.max_syntax_repairs {
            refine.max_syntax_repairs = n;
        }
        refine.quantifier_refine &= !flags.no_quantifier_refine;
        refine.quantifier_first_iteration_only |= flags.quantifier_first_only;
        refine.syntax_refine &= !flags.no_syntax_refine;
        refine.logical_relations &= !flags.no_logical_relations;
        refine.binary_feedback |= flags.binary_feedback;

        let out = flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("runs/latest"));
        let prover_command = match &flags.prover_cmd {
            Some(cmd) => Some(cmd.split_whitespace().map(String::from).collect::<Vec<_>>()),
            None => file.prover.command.clone(),
        };
        if prover_command.as_ref().is_some_and(|c| c.is_empty()) {
            return Err("prover command is empty".into());
        }
        let config = RunConfig {
            mode: flags.mode.or(file.mode).unwrap_or_default(),
            jobs: flags.jobs.or(file.jobs).unwrap_or(1),
            cassette: flags.cassette.clone().or(file.cassette),
            templates: flags.templates.clone().or(file.templates),
            average_over_all: flags.average_over_all || file.average_over_all,
            provider: file.provider,
            refine,
            prover_command,
            prover_timeout: flags.timeout.or(file.prover.timeout_secs).unwrap_or(DEFAULT_TIMEOUT_SECS),
            prover_workdir: file.prover.workdir.unwrap_or_else(|| out.join("prover")),
            embedder: file.embedder,
            out,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.jobs == 0 {
            return Err("--jobs must be at least 1".into());
        }
        if self.refine.syntax_refine && self.refine.max_syntax_repairs == 0 {
            return Err("--max-syntax-repairs must be at least 1 (use --no-syntax-refine to disable)".into());
        }
        if self.prover_timeout == 0 {
            return Err("--timeout must be positive".into());
        }
        if self.mode != Mode::Live && self.cassette.is_none() {
            return Err("replay and record modes need --cassette".into());
        }
        Ok(())
    }
}
