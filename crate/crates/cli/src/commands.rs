use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use imp_core::alphabet::{block_letter, Alphabet};
use imp_core::deinterleave::{
    deinterleave_exhaustive, deinterleave_heuristic, Estimate, SearchParams, DEFAULT_K_CAP,
};
use imp_core::harness::{
    calibrate_baseline, calibration_to_csv, run_experiment, trial_model, ExperimentConfig,
    COMPATIBLE_CAP,
};
use imp_core::imp::{
    count_fsm_params, count_imp_params, project, switch_sequence, OrderVector, Partition,
};
use imp_core::io::{
    alphabet_of, format_sequence, parse_sequence, ImpFile, MarkovFile, SequenceFormat,
};
use imp_core::rng::seeded;
use imp_core::structure::{canonicalize, domination_report, enumerate_compatible_partitions};
use imp_core::{Error, ImpModel64, MarkovModel64, Symbol};

use crate::bands;
use crate::error::CliError;
use crate::manifest::{default_manifest_path, read_bytes, read_text, write_file, RunManifest};

/// Key under which text printed to standard output is digested.
const STDOUT: &str = "<stdout>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Whitespace-separated tokens, written one per line.
    #[default]
    Tokens,
    /// One character per symbol, written without separators.
    Chars,
}

impl From<Format> for SequenceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Tokens => SequenceFormat::Tokens,
            Format::Chars => SequenceFormat::Chars,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every partition with at most `--max-blocks` blocks.
    Exhaustive,
    /// Randomized local search.
    #[default]
    Heuristic,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// Model file: an IMP (`partition`, `components`, `switch`) or a single Markov chain.
    #[arg(long)]
    pub model: PathBuf,
    /// Number of symbols to draw.
    #[arg(short, long)]
    pub n: usize,
    #[arg(long, env = "IMP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Sequence file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also write the hidden component streams and switch sequence here (IMP models only).
    #[arg(long)]
    pub truth_dir: Option<PathBuf>,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeinterleaveArgs {
    /// Sequence file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Penalty coefficient.
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    /// Block cap of the exhaustive search [default: alphabet size].
    #[arg(long)]
    pub max_blocks: Option<usize>,
    /// Largest Markov order considered for any stream.
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    pub k_cap: usize,
    #[arg(long, env = "IMP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Independent local-search runs.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Non-improving perturbations before a run stops.
    #[arg(long, default_value_t = 15)]
    pub patience: usize,
    /// Descent neighborhood radius.
    #[arg(long = "t", default_value_t = 1)]
    pub t: usize,
    /// Perturbation neighborhood radius.
    #[arg(long = "r", default_value_t = 2)]
    pub r: usize,
    /// Result JSON file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the recovered streams (`stream_A.txt`, ...) and `switch.txt`.
    #[arg(long)]
    pub streams_dir: Option<PathBuf>,
    /// Manifest path [default: <out>.manifest.json when --out is given].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    /// IMP model file.
    pub model: PathBuf,
    /// Report file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Most compatible partitions to list.
    #[arg(long, default_value_t = COMPATIBLE_CAP)]
    pub max_compatible: usize,
    /// Manifest path [default: <out>.manifest.json when --out is given].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// CSV file with columns n, method, success_exact, success_canonical, success_compatible.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check the reference acceptance tolerances and exit 1 on violation.
    #[arg(long)]
    pub assert: bool,
    /// Overrides the configuration's master seed.
    #[arg(long, env = "IMP_SEED")]
    pub seed: Option<u64>,
    /// Manifest path [default: <out>.manifest.json when --out is given].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateArgs {
    /// Experiment configuration (JSON); its methods are ignored.
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated tolerance scales.
    #[arg(long, value_delimiter = ',', required = true)]
    pub scales: Vec<f64>,
    /// CSV file with columns scale, n, success_exact [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configuration's master seed.
    #[arg(long, env = "IMP_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrawModelArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Trial index.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Overrides the configuration's master seed.
    #[arg(long, env = "IMP_SEED")]
    pub seed: Option<u64>,
    /// IMP model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn emit(manifest: &mut RunManifest, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_file(path, bytes)?;
    manifest.output(path, bytes);
    Ok(())
}

/// Writes to `out` or prints, recording the digest either way.
fn emit_or_print(
    manifest: &mut RunManifest,
    out: Option<&Path>,
    text: &str,
) -> Result<(), CliError> {
    match out {
        Some(p) => emit(manifest, p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::input(format!("stdout: {e}")))?;
            manifest
                .outputs
                .insert(STDOUT.into(), crate::manifest::sha256_hex(text.as_bytes()));
            Ok(())
        }
    }
}

fn finish(
    manifest: &RunManifest,
    explicit: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = explicit
        .map(Path::to_path_buf)
        .or_else(|| out.map(default_manifest_path))
    {
        manifest.write(&path)?;
    }
    Ok(())
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    manifest: &mut RunManifest,
) -> Result<ExperimentConfig, CliError> {
    let bytes = read_bytes(path)?;
    manifest.input(path, &bytes);
    let mut config: ExperimentConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config
        .validate()
        .map_err(|e| CliError::core(path.display(), e))?;
    manifest.seed = Some(config.seed);
    Ok(config)
}

enum AnyModel {
    Imp(ImpModel64),
    Markov(MarkovModel64),
}

fn load_model(path: &Path, manifest: &mut RunManifest) -> Result<AnyModel, CliError> {
    let text = read_text(path)?;
    manifest.input(path, text.as_bytes());
    let located = |e: serde_json::Error| CliError::input(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(located)?;
    if value.get("partition").is_some() {
        let file: ImpFile = serde_json::from_value(value).map_err(located)?;
        Ok(AnyModel::Imp(
            file.to_model()
                .map_err(|e| CliError::core(path.display(), e))?,
        ))
    } else {
        let file: MarkovFile = serde_json::from_value(value).map_err(located)?;
        Ok(AnyModel::Markov(
            file.to_model()
                .map_err(|e| CliError::core(path.display(), e))?,
        ))
    }
}

fn labels<'a>(alphabet: &'a Alphabet, seq: &'a [Symbol]) -> Vec<&'a str> {
    alphabet.decode(seq).collect()
}

fn sequence_text(tokens: &[&str], format: Format, what: &str) -> Result<String, CliError> {
    format_sequence(tokens, format.into()).map_err(|e| CliError::input(format!("{what}: {e}")))
}

/// One file per block with its projected symbols, plus the block-label sequence.
fn write_streams(
    manifest: &mut RunManifest,
    dir: &Path,
    alphabet: &Alphabet,
    partition: &Partition,
    block_labels: &[String],
    seq: &[Symbol],
    format: Format,
) -> Result<(), CliError> {
    for (i, block) in partition.blocks().iter().enumerate() {
        let stream = project(seq, block);
        let text = sequence_text(&labels(alphabet, &stream), format, "stream")?;
        emit(
            manifest,
            &dir.join(format!("stream_{}.txt", block_labels[i])),
            text.as_bytes(),
        )?;
    }
    let sw = switch_sequence(seq, partition).map_err(|e| CliError::core("switch sequence", e))?;
    let mut text = sw
        .iter()
        .map(|&b| block_labels[b].as_str())
        .collect::<Vec<_>>()
        .join(" ");
    if !sw.is_empty() {
        text.push('\n');
    }
    emit(manifest, &dir.join("switch.txt"), text.as_bytes())
}

pub fn generate(a: &GenerateArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("generate", Some(a.seed), a);
    let model = load_model(&a.model, &mut manifest)?;
    let mut rng = seeded(a.seed);
    match &model {
        AnyModel::Imp(imp) => {
            let seq = imp.sample(a.n, &mut rng);
            let text = sequence_text(&labels(imp.alphabet(), &seq), a.format, "sequence")?;
            emit(&mut manifest, &a.out, text.as_bytes())?;
            if let Some(dir) = &a.truth_dir {
                let block_labels = imp.switch().alphabet().labels().to_vec();
                write_streams(
                    &mut manifest,
                    dir,
                    imp.alphabet(),
                    imp.partition(),
                    &block_labels,
                    &seq,
                    a.format,
                )?;
            }
        }
        AnyModel::Markov(chain) => {
            if a.truth_dir.is_some() {
                return Err(CliError::input("--truth-dir needs an IMP model"));
            }
            let seq = chain.sample(a.n, &mut rng);
            let text = sequence_text(&labels(chain.alphabet(), &seq), a.format, "sequence")?;
            emit(&mut manifest, &a.out, text.as_bytes())?;
        }
    }
    finish(&manifest, a.manifest.as_deref(), Some(&a.out))?;
    Ok(manifest)
}

#[derive(Debug, Serialize)]
struct CostJson {
    entropy_bits: f64,
    kappa: u128,
    penalty_bits: f64,
    total_bits: f64,
}

#[derive(Debug, Serialize)]
struct DeinterleaveResult {
    partition: Vec<Vec<String>>,
    orders: OrderVector,
    cost: CostJson,
}

impl DeinterleaveResult {
    fn from_estimate(alphabet: &Alphabet, e: &Estimate<f64>) -> Self {
        Self {
            partition: e.partition.labelled(alphabet),
            orders: e.cost.orders.clone(),
            cost: CostJson {
                entropy_bits: e.cost.entropy_bits,
                kappa: e.cost.kappa,
                penalty_bits: e.cost.penalty_bits,
                total_bits: e.cost.total_bits,
            },
        }
    }

    fn empty() -> Self {
        Self {
            partition: vec![Vec::new()],
            orders: OrderVector::new(vec![0], 0),
            cost: CostJson {
                entropy_bits: 0.0,
                kappa: 0,
                penalty_bits: 0.0,
                total_bits: 0.0,
            },
        }
    }
}

pub fn deinterleave(a: &DeinterleaveArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("deinterleave", Some(a.seed), a);
    let text = read_text(&a.input)?;
    manifest.input(&a.input, text.as_bytes());
    let tokens = parse_sequence(&text, a.format.into());
    let encoded = alphabet_of(&tokens).map_err(|e| CliError::core(a.input.display(), e))?;
    let result = match &encoded {
        None => {
            if let Some(dir) = &a.streams_dir {
                emit(&mut manifest, &dir.join("stream_A.txt"), b"")?;
                emit(&mut manifest, &dir.join("switch.txt"), b"")?;
            }
            DeinterleaveResult::empty()
        }
        Some((alphabet, seq)) => {
            let alpha = alphabet.len();
            let estimate = match a.mode {
                Mode::Exhaustive => deinterleave_exhaustive(
                    seq,
                    alpha,
                    a.beta,
                    a.max_blocks.unwrap_or(alpha),
                    a.k_cap,
                ),
                Mode::Heuristic => {
                    let params = SearchParams {
                        restarts: a.restarts,
                        patience: a.patience,
                        descent_radius: a.t,
                        perturb_radius: a.r,
                        seed: a.seed,
                        k_cap: a.k_cap,
                    };
                    deinterleave_heuristic(seq, alpha, a.beta, &params)
                }
            }
            .map_err(|e| CliError::core(a.input.display(), e))?;
            if let Some(dir) = &a.streams_dir {
                let block_labels: Vec<String> = (0..estimate.partition.num_blocks())
                    .map(block_letter)
                    .collect();
                write_streams(
                    &mut manifest,
                    dir,
                    alphabet,
                    &estimate.partition,
                    &block_labels,
                    seq,
                    a.format,
                )?;
            }
            DeinterleaveResult::from_estimate(alphabet, &estimate)
        }
    };
    emit_or_print(&mut manifest, a.out.as_deref(), &json_text(&result))?;
    finish(&manifest, a.manifest.as_deref(), a.out.as_deref())?;
    Ok(manifest)
}

#[derive(Debug, Serialize)]
struct DominationJson {
    /// `[a, b]` for every `a` dominating `b`.
    pairs: Vec<[String; 2]>,
    mutual: Vec<[String; 2]>,
}

#[derive(Debug, Serialize)]
struct KappaJson {
    imp: u128,
    fsm: u128,
    canonical_imp: u128,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    domination: DominationJson,
    totally_dominant: Vec<String>,
    /// `None` when some pair is in mutual domination.
    layers: Option<Vec<Vec<String>>>,
    layers_absent: bool,
    /// No domination in the given representation, its canonical form, or
    /// any enumerated memoryless refinement.
    domination_free: bool,
    domination_free_scope: &'static str,
    canonical_partition: Vec<Vec<String>>,
    compatible_partitions: Option<Vec<Vec<Vec<String>>>>,
    kappa: KappaJson,
}

fn analyze_model(imp: &ImpModel64, max_compatible: usize) -> Result<AnalyzeReport, Error> {
    let report = domination_report(imp.switch());
    let name = |i: usize| report.labels[i].clone();
    let pair = |(a, b): (usize, usize)| [name(a), name(b)];
    let canonical = canonicalize(imp)?;
    let compatible = match enumerate_compatible_partitions(imp, max_compatible) {
        Ok(parts) => Some(parts.iter().map(|p| p.labelled(imp.alphabet())).collect()),
        Err(Error::DominationPresent) => None,
        Err(e) => return Err(e),
    };
    Ok(AnalyzeReport {
        domination: DominationJson {
            pairs: report.dominating_pairs().into_iter().map(pair).collect(),
            mutual: report.mutual_pairs.iter().copied().map(pair).collect(),
        },
        totally_dominant: report.totally_dominant.iter().map(|&i| name(i)).collect(),
        layers: report.layers.as_ref().map(|ls| {
            ls.iter()
                .map(|l| l.iter().map(|&i| name(i)).collect())
                .collect()
        }),
        layers_absent: report.layers.is_none(),
        domination_free: compatible.is_some(),
        domination_free_scope: "checked representations",
        canonical_partition: canonical.partition().labelled(canonical.alphabet()),
        compatible_partitions: compatible,
        kappa: KappaJson {
            imp: count_imp_params(imp.partition(), &imp.orders()),
            fsm: count_fsm_params(imp.partition(), &imp.orders()),
            canonical_imp: count_imp_params(canonical.partition(), &canonical.orders()),
        },
    })
}

pub fn analyze(a: &AnalyzeArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("analyze", None, a);
    let AnyModel::Imp(imp) = load_model(&a.model, &mut manifest)? else {
        return Err(CliError::input(format!(
            "{}: not an IMP model file",
            a.model.display()
        )));
    };
    let report =
        analyze_model(&imp, a.max_compatible).map_err(|e| CliError::core(a.model.display(), e))?;
    emit_or_print(&mut manifest, a.out.as_deref(), &json_text(&report))?;
    finish(&manifest, a.manifest.as_deref(), a.out.as_deref())?;
    Ok(manifest)
}

pub fn benchmark(a: &BenchmarkArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("benchmark", a.seed, a);
    let config = load_config(&a.config, a.seed, &mut manifest)?;
    let table = run_experiment(&config).map_err(|e| CliError::core("benchmark", e))?;
    print!("{table}");
    if let Some(out) = &a.out {
        emit(&mut manifest, out, table.to_csv().as_bytes())?;
    }
    finish(&manifest, a.manifest.as_deref(), a.out.as_deref())?;
    if a.assert {
        let violations = bands::check(&config, &table).map_err(CliError::Input)?;
        if !violations.is_empty() {
            return Err(CliError::Assertion(violations.join("; ")));
        }
        println!("all acceptance tolerances hold");
    }
    Ok(manifest)
}

pub fn calibrate(a: &CalibrateArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("calibrate", a.seed, a);
    let config = load_config(&a.config, a.seed, &mut manifest)?;
    let rows =
        calibrate_baseline(&config, &a.scales).map_err(|e| CliError::core("calibrate", e))?;
    emit_or_print(&mut manifest, a.out.as_deref(), &calibration_to_csv(&rows))?;
    finish(&manifest, a.manifest.as_deref(), a.out.as_deref())?;
    Ok(manifest)
}

pub fn draw_model(a: &DrawModelArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("draw-model", a.seed, a);
    let config = load_config(&a.config, a.seed, &mut manifest)?;
    let model = trial_model(&config, a.index).map_err(|e| CliError::core("draw-model", e))?;
    emit(
        &mut manifest,
        &a.out,
        json_text(&ImpFile::from_model(&model)).as_bytes(),
    )?;
    finish(&manifest, a.manifest.as_deref(), Some(&a.out))?;
    Ok(manifest)
}

fn rerun<A: serde::de::DeserializeOwned>(
    recorded: &RunManifest,
    run: impl FnOnce(&A) -> Result<RunManifest, CliError>,
) -> Result<RunManifest, CliError> {
    let args: A = serde_json::from_value(recorded.config.clone())
        .map_err(|e| CliError::input(format!("manifest config: {e}")))?;
    run(&args)
}

pub fn replay(a: &ReplayArgs) -> Result<(), CliError> {
    let recorded = RunManifest::load(&a.manifest)?;
    for (path, digest) in &recorded.inputs {
        let bytes = read_bytes(Path::new(path))?;
        if crate::manifest::sha256_hex(&bytes) != *digest {
            return Err(CliError::input(format!(
                "input {path} changed since the manifest was written"
            )));
        }
    }
    let fresh = match recorded.subcommand.as_str() {
        "generate" => rerun(&recorded, generate)?,
        "deinterleave" => rerun(&recorded, deinterleave)?,
        "analyze" => rerun(&recorded, analyze)?,
        "benchmark" => rerun(&recorded, benchmark)?,
        "calibrate" => rerun(&recorded, calibrate)?,
        "draw-model" => rerun(&recorded, draw_model)?,
        other => {
            return Err(CliError::input(format!(
                "unknown subcommand {other:?} in manifest"
            )))
        }
    };
    if fresh.outputs != recorded.outputs {
        let differing: Vec<&str> = recorded
            .outputs
            .iter()
            .filter(|(k, v)| fresh.outputs.get(*k) != Some(*v))
            .map(|(k, _)| k.as_str())
            .collect();
        return Err(CliError::Assertion(format!(
            "replayed outputs differ: {}",
            differing.join(", ")
        )));
    }
    eprintln!("replay reproduced {} output(s)", recorded.outputs.len());
    Ok(())
}
