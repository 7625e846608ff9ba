//! Command-line front end: `audit`, `mitigate` and `serve`.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discrim_core::data::Schema;
use discrim_core::discrim::AnalysisConfig;
use discrim_core::export::{write_json, write_predictions_csv, write_scatter_csv};
use discrim_core::pipeline::PipelineOptions;
use discrim_core::rules::DEFAULT_MAX_LENGTH;

use crate::engine::{summary_text, ConfigPatch, Engine, EngineError, Inputs};
use crate::server;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "discrim-audit", version, about = "Audit classifiers for discriminatory itemsets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine discriminatory itemsets for every model and write report files.
    Audit(AuditArgs),
    /// Plan reject-option flips for one model and write the mitigated predictions.
    Mitigate(MitigateArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Dataset CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON schema sidecar declaring column roles.
    #[arg(long)]
    pub schema: PathBuf,
    /// Prediction file for a model, as `id=path` (repeatable).
    #[arg(long = "pred", value_name = "ID=PATH", value_parser = parse_pred)]
    pub preds: Vec<(String, PathBuf)>,
    /// Minimum support of frequent conditions [default: max(5, 1% of rows)].
    #[arg(long)]
    pub min_support: Option<usize>,
    /// Longest condition mined.
    #[arg(long, default_value_t = DEFAULT_MAX_LENGTH)]
    pub max_length: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Risk-difference threshold.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Minimum items per group in an itemset.
    #[arg(long)]
    pub min_group_support: Option<usize>,
    /// Resolving attributes, replacing the schema roles and the suggestion
    /// (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub resolving: Option<Vec<String>>,
    /// Additional proxy attribute (repeatable).
    #[arg(long = "proxy")]
    pub proxies: Vec<String>,
    /// Value of the protected attribute marking the protected group.
    #[arg(long)]
    pub protected_group: Option<String>,
    /// Allow an empty resolving set.
    #[arg(long)]
    pub allow_empty_resolving: bool,
    /// Keep itemsets whose extra literals leave the member set unchanged.
    #[arg(long)]
    pub no_prune: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Also write a comparison of two models.
    #[arg(long, num_args = 2, value_names = ["M1", "M2"])]
    pub compare: Option<Vec<String>>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct MitigateArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Model to mitigate.
    #[arg(long)]
    pub model: String,
    /// Canonical key of an itemset to mitigate (repeatable) [default: all].
    #[arg(long = "select")]
    pub selected: Vec<String>,
    /// Target |rd| after mitigation [default: tau].
    #[arg(long)]
    pub tau_target: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8787")]
    pub addr: SocketAddr,
    /// Request body cap in megabytes.
    #[arg(long, default_value_t = 100)]
    pub max_body_mb: usize,
}

fn parse_pred(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((id, path)) if !id.is_empty() && !path.is_empty() => Ok((id.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected ID=PATH, got `{s}`")),
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.to_string(),
        }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: format!("cannot write {}: {e}", path.display()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::validation(e)
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let outcome = match cli.command {
        Command::Audit(a) => run_audit(&a),
        Command::Mitigate(m) => run_mitigate(&m),
        Command::Serve(s) => run_serve(&s),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))
}

pub fn load_inputs(args: &InputArgs) -> Result<Inputs, Failure> {
    let schema = Schema::from_json(&read(&args.schema)?)
        .map_err(|e| Failure::validation(format!("invalid schema {}: {e}", args.schema.display())))?;
    let predictions = args
        .preds
        .iter()
        .map(|(id, path)| Ok((id.clone(), read(path)?)))
        .collect::<Result<_, Failure>>()?;
    Ok(Inputs {
        data: read(&args.data)?,
        schema,
        predictions,
        options: PipelineOptions {
            min_support: args.min_support,
            max_length: args.max_length,
        },
    })
}

impl ConfigArgs {
    pub fn patch(&self, base: &AnalysisConfig) -> ConfigPatch {
        let proxies = if self.proxies.is_empty() {
            None
        } else {
            Some(base.proxies.iter().cloned().chain(self.proxies.iter().cloned()).collect())
        };
        ConfigPatch {
            tau: self.tau,
            resolving: self.resolving.as_ref().map(|r| r.iter().filter(|s| !s.is_empty()).cloned().collect()),
            proxies,
            protected_group: self.protected_group.clone(),
            min_group_support: self.min_group_support,
            allow_empty_resolving: self.allow_empty_resolving.then_some(true),
            prune_redundant: self.no_prune.then_some(false),
        }
    }
}

/// File-name-safe form of a model id.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.+".contains(c) { c } else { '_' })
        .collect()
}

fn write_file(path: &Path, f: impl FnOnce(&mut fs::File) -> Result<(), discrim_core::DataError>) -> Result<(), Failure> {
    let mut file = fs::File::create(path).map_err(|e| Failure::output(path, e))?;
    f(&mut file).map_err(|e| Failure::output(path, e))
}

pub fn run_audit(args: &AuditArgs) -> Result<(), Failure> {
    let engine = Engine::load(&load_inputs(&args.inputs)?)?;
    let config = args.config.patch(&engine.default_config()).apply(&engine.default_config());
    let results = engine.analyze_all(&config)?;
    let comparison = match &args.compare {
        Some(pair) => {
            let (l, r) = (&pair[0], &pair[1]);
            for m in [l, r] {
                if !results.contains_key(m) {
                    return Err(Failure::validation(format!("--compare: unknown model `{m}`")));
                }
            }
            Some((l, r, engine.compare(&config, l, r)?))
        }
        None => None,
    };
    let mut geometries = Vec::new();
    for (m, r) in &results {
        for k in 0..r.collections.len() {
            geometries.push((m, k, engine.geometry(r, k, &Default::default())?));
        }
    }

    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| Failure::output(out, e))?;
    for (m, r) in &results {
        let stem = file_stem(m);
        write_file(&out.join(format!("result_{stem}.json")), |f| write_json(f, &engine.view(r)))?;
        write_file(&out.join(format!("scatter_{stem}.csv")), |f| write_scatter_csv(f, &r.scatter()))?;
    }
    for (m, k, g) in &geometries {
        write_file(&out.join(format!("geometry_{}_{k}.json", file_stem(m))), |f| write_json(f, g))?;
    }
    if let Some((l, r, c)) = &comparison {
        write_file(&out.join(format!("comparison_{}_{}.json", file_stem(l), file_stem(r))), |f| write_json(f, c))?;
    }
    if let Some(p) = &engine.prepared.parents {
        write_file(&out.join("parents.json"), |f| write_json(f, p))?;
    }
    write_file(&out.join("discretization.json"), |f| write_json(f, &engine.prepared.cut_points))?;
    let summary = summary_text(&engine, &config, &results);
    fs::write(out.join("summary.txt"), &summary).map_err(|e| Failure::output(&out.join("summary.txt"), e))?;
    print!("{summary}");
    Ok(())
}

pub fn run_mitigate(args: &MitigateArgs) -> Result<(), Failure> {
    let engine = Engine::load(&load_inputs(&args.inputs)?)?;
    let config = args.config.patch(&engine.default_config()).apply(&engine.default_config());
    let result = engine.analyze(&config, &args.model)?;
    let selected = (!args.selected.is_empty()).then_some(args.selected.as_slice());
    let (outcome, preds) = engine.mitigate(&result, selected, args.tau_target)?;

    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| Failure::output(out, e))?;
    let id = &outcome.report.mitigated_model_id;
    write_file(&out.join("plan.json"), |f| write_json(f, &outcome.plan))?;
    write_file(&out.join("mitigation_report.json"), |f| write_json(f, &outcome.report))?;
    write_file(&out.join(format!("predictions_{}.csv", file_stem(id))), |f| {
        write_predictions_csv(f, &engine.prepared.dataset, id, &preds)
    })?;
    let r = &outcome.report;
    println!(
        "{}: {} flips, accuracy {:.4} -> {:.4}, {} unresolved, {} reverse-discrimination itemsets",
        r.model_id,
        r.flip_count,
        r.accuracy_before,
        r.accuracy_after,
        outcome.plan.unresolved.len(),
        r.reverse_discrimination_count
    );
    for c in r.itemsets.iter().filter(|c| c.selected) {
        println!("  {:+.4} -> {:+.4}  {}", c.rd_before, c.rd_after, c.canonical_key);
    }
    Ok(())
}

fn run_serve(args: &ServeArgs) -> Result<(), Failure> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot start runtime: {e}"),
    })?;
    let limit = args.max_body_mb.saturating_mul(1024 * 1024);
    runtime
        .block_on(server::serve(args.addr, limit))
        .map_err(|e| Failure {
            code: EXIT_FAILURE,
            message: format!("server on {}: {e}", args.addr),
        })
}

