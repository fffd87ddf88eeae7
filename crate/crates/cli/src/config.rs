//! Run configuration: TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use spacevolve::orchestrator::EvolveConfig;
use spacevolve::problems::{BinDataset, ProblemSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Capset,
    Admissible,
    Shannon,
    Binpack,
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Or,
    Weibull,
}

impl From<DatasetKind> for BinDataset {
    fn from(d: DatasetKind) -> Self {
        match d {
            DatasetKind::Or => BinDataset::Or,
            DatasetKind::Weibull => BinDataset::Weibull,
        }
    }
}

/// Problem selection flags shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub problem: Option<ProblemKind>,
    /// Dimension (capset, admissible) or power of the cycle (shannon).
    #[arg(long)]
    pub n: Option<usize>,
    /// Weight (admissible).
    #[arg(long)]
    pub w: Option<usize>,
    /// Cycle length (shannon).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetKind>,
    /// Bin-packing instances as JSON; generated from --data-seed otherwise.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    #[arg(long)]
    pub data_seed: Option<u64>,
}

fn need<T>(v: Option<T>, flag: &str, problem: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{flag} is required for {problem}")))
}

impl ProblemArgs {
    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        let kind = self.problem.ok_or_else(|| CliError::Config("--problem is required".into()))?;
        Ok(match kind {
            ProblemKind::Capset => ProblemSpec::Capset { n: need(self.n, "n", "capset")? },
            ProblemKind::Admissible => ProblemSpec::Admissible { n: need(self.n, "n", "admissible")?, w: need(self.w, "w", "admissible")? },
            ProblemKind::Shannon => ProblemSpec::Shannon { m: need(self.m, "m", "shannon")?, n: need(self.n, "n", "shannon")? },
            ProblemKind::Binpack => ProblemSpec::Binpack {
                dataset: self.dataset.unwrap_or(DatasetKind::Or).into(),
                path: self.data.clone(),
                instances: self.instances,
                items: self.items,
                data_seed: self.data_seed,
            },
            ProblemKind::Toy => ProblemSpec::Toy,
        })
    }

    /// Fills unset fields from `other`.
    fn or(self, other: ProblemArgs) -> ProblemArgs {
        ProblemArgs {
            problem: self.problem.or(other.problem),
            n: self.n.or(other.n),
            w: self.w.or(other.w),
            m: self.m.or(other.m),
            dataset: self.dataset.or(other.dataset),
            data: self.data.or(other.data),
            instances: self.instances.or(other.instances),
            items: self.items.or(other.items),
            data_seed: self.data_seed.or(other.data_seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Http,
    Scripted,
}

/// Flags of `spacevolve run`. Anything unset falls back to the config file,
/// then to the per-problem defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// JSON-lines script for the scripted backend.
    #[arg(long)]
    pub replay_file: Option<PathBuf>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub k_stall: Option<usize>,
    /// Calls between halving events; 0 disables halving.
    #[arg(long)]
    pub k_reset: Option<u64>,
    #[arg(long)]
    pub k_search: Option<usize>,
    #[arg(long)]
    pub k_ref: Option<usize>,
    #[arg(long)]
    pub k_cluster: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Prompt template TOML replacing the bundled one.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Starting program for every process.
    #[arg(long)]
    pub seed_program: Option<PathBuf>,
    /// Start from empty databases even if the template has a seed program.
    #[arg(long)]
    pub no_seed: bool,
    /// Drop the template's scoring hint.
    #[arg(long)]
    pub no_hint: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileProblem {
    kind: Option<ProblemKind>,
    n: Option<usize>,
    w: Option<usize>,
    m: Option<usize>,
    dataset: Option<DatasetKind>,
    data: Option<PathBuf>,
    instances: Option<usize>,
    items: Option<usize>,
    data_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBackend {
    kind: Option<BackendKind>,
    replay_file: Option<PathBuf>,
    model: Option<String>,
    temperature: Option<f64>,
    max_tokens: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEvolve {
    k_search: Option<usize>,
    k_reset: Option<u64>,
    k_ref: Option<usize>,
    k_cluster: Option<usize>,
    k_stall: Option<usize>,
    top_k: Option<usize>,
    p0: Option<f64>,
    budget: Option<u64>,
    batch_size: Option<usize>,
    temperature: Option<f64>,
    max_evaluations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    seed: Option<u64>,
    out: Option<PathBuf>,
    template: Option<PathBuf>,
    seed_program: Option<PathBuf>,
    #[serde(default)]
    problem: FileProblem,
    #[serde(default)]
    backend: FileBackend,
    #[serde(default)]
    evolve: FileEvolve,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub backend: BackendKind,
    pub replay_file: Option<PathBuf>,
    pub model: Option<String>,
    pub llm_temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub evolve: EvolveConfig,
    pub template: Option<PathBuf>,
    pub seed_program: Option<PathBuf>,
    pub no_seed: bool,
    pub no_hint: bool,
    pub out: PathBuf,
}

/// Resolves a path from the config file relative to the file's directory.
fn rel(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_absolute() { p } else { base.join(p) })
}

impl RunConfig {
    pub fn resolve(args: RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                toml::from_str::<RunFile>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => RunFile::default(),
        };
        let base = args.config.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
        let fp = file.problem;
        let from_file = ProblemArgs {
            problem: fp.kind,
            n: fp.n,
            w: fp.w,
            m: fp.m,
            dataset: fp.dataset,
            data: rel(&base, fp.data),
            instances: fp.instances,
            items: fp.items,
            data_seed: fp.data_seed,
        };
        let problem = args.problem.or(from_file).spec()?;

        let mut evolve = EvolveConfig::for_problem(&problem);
        let fe = file.evolve;
        macro_rules! set {
            ($field:ident, $cli:expr, $file:expr) => {
                if let Some(v) = $cli.or($file) {
                    evolve.$field = v;
                }
            };
        }
        set!(k_search, args.k_search, fe.k_search);
        set!(k_ref, args.k_ref, fe.k_ref);
        set!(k_cluster, args.k_cluster, fe.k_cluster);
        set!(k_stall, args.k_stall, fe.k_stall);
        set!(top_k, args.top_k, fe.top_k);
        set!(budget, args.budget, fe.budget);
        set!(batch_size, args.batch_size, fe.batch_size);
        set!(p0, None, fe.p0);
        set!(temperature, None, fe.temperature);
        set!(seed, args.seed, file.seed);
        if let Some(k) = args.k_reset.or(fe.k_reset) {
            evolve.k_reset = (k > 0).then_some(k);
        }
        if fe.max_evaluations.is_some() {
            evolve.max_evaluations = fe.max_evaluations;
        }
        evolve.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let backend = args.backend.or(file.backend.kind).unwrap_or(BackendKind::Http);
        let replay_file = args.replay_file.or(rel(&base, file.backend.replay_file));
        if backend == BackendKind::Scripted && replay_file.is_none() {
            return Err(CliError::Config("--replay-file is required for the scripted backend".into()));
        }
        Ok(Self {
            problem,
            backend,
            replay_file,
            model: file.backend.model,
            llm_temperature: file.backend.temperature,
            max_tokens: file.backend.max_tokens,
            evolve,
            template: args.template.or(rel(&base, file.template)),
            seed_program: args.seed_program.or(rel(&base, file.seed_program)),
            no_seed: args.no_seed,
            no_hint: args.no_hint,
            out: args.out.or(rel(&base, file.out)).unwrap_or_else(|| PathBuf::from("spacevolve-run")),
        })
    }
}
