//! Shared plumbing for the `qdesk` binary: output documents, error
//! classification, and the per-subcommand drivers. The binary itself only
//! parses flags, reads files, and writes what these functions return.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use qdesk::algorithms::{
    default_beta_grid, default_gamma_grid, qaoa_landscape, qaoa_optimize, AlgorithmError,
    QaoaParams,
};
use qdesk::anneal::{evolve_closed, simulated_annealing, AnnealError, Schedule};
use qdesk::circuit::CircuitError;
use qdesk::embed::{
    chimera_graph, embed_model, find_embedding, validate_embedding, EmbedError, Embedding,
};
use qdesk::ising::{
    parse_problem_json, problem_to_json, qubo_to_ising, IsingError, IsingModel, Problem,
    SpinConfig,
};
use qdesk::parser::ParseError;
use qdesk::state::{bitstring_of_index, SampleRow, SampleSet, StateError, ValueDomain};

/// Anything a subcommand can fail with, tagged by process exit code:
/// 1 usage, 2 input or parse, 3 capacity, 4 no solution.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Capacity(String),
    NoSolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::NoSolution(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Capacity(m)
            | CliError::NoSolution(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::CapacityExceeded { .. } => CliError::Capacity(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::UnitaryCapExceeded { .. } => CliError::Capacity(e.to_string()),
            CircuitError::State(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<IsingError> for CliError {
    fn from(e: IsingError) -> Self {
        match e {
            IsingError::BruteForceCapExceeded { .. } => CliError::Capacity(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<AlgorithmError> for CliError {
    fn from(e: AlgorithmError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnnealError> for CliError {
    fn from(e: AnnealError) -> Self {
        match e {
            AnnealError::CapacityExceeded { .. } => CliError::Capacity(e.to_string()),
            AnnealError::Ising(inner) => inner.into(),
            AnnealError::State(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::CapExceeded { .. } => CliError::Capacity(e.to_string()),
            EmbedError::NoEmbeddingFound { .. } | EmbedError::InvalidEmbedding { .. } => {
                CliError::NoSolution(e.to_string())
            }
            EmbedError::Ising(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Provenance block embedded in every JSON output so a document alone is
/// enough to rerun the command that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl Metadata {
    fn new(command: &str, seed: u64) -> Self {
        Metadata {
            command: command.to_string(),
            seed,
            parameters: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CountsDocument {
    pub metadata: Metadata,
    pub samples: SampleSet,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BestParamsDocument {
    pub metadata: Metadata,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub energy: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LevelProbability {
    pub bitstring: String,
    pub probability: f64,
    pub energy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnnealDocument {
    pub metadata: Metadata,
    pub ground_probability: f64,
    /// The most probable basis states, largest first, at most eight.
    pub levels: Vec<LevelProbability>,
}

fn pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    text
}

fn read_problem(text: &str) -> Result<Problem, CliError> {
    Ok(parse_problem_json(text)?)
}

/// The spin-domain view of a problem; QUBO input converts exactly.
fn as_ising(problem: &Problem) -> IsingModel {
    match problem {
        Problem::Ising(m) => m.clone(),
        Problem::Qubo(q) => qubo_to_ising(q),
    }
}

fn domain_of(problem: &Problem) -> ValueDomain {
    match problem {
        Problem::Ising(_) => ValueDomain::Spin,
        Problem::Qubo(_) => ValueDomain::Binary,
    }
}

/// Spin configuration of a basis index under the gate-order convention:
/// qubit 0 is the most significant bit and bit 0 encodes spin +1.
fn spins_of_index(j: usize, n: usize) -> SpinConfig {
    let values: Vec<i8> = (0..n)
        .map(|i| if (j >> (n - 1 - i)) & 1 == 0 { 1 } else { -1 })
        .collect();
    SpinConfig::new(values).expect("entries are +-1 by construction")
}

pub enum RunFormat {
    Counts,
    Statevector,
}

pub fn cmd_run(
    source: &str,
    shots: u64,
    seed: u64,
    format: RunFormat,
) -> Result<String, CliError> {
    if source.trim().is_empty() {
        return Err(CliError::Input("circuit file is empty".to_string()));
    }
    let circuit = qdesk::parser::parse_circuit(source)?;
    let state = circuit.simulate_from_zero()?;
    match format {
        RunFormat::Counts => {
            let samples = state.sample_counts(shots, seed)?;
            let metadata = Metadata::new("run", seed).with("shots", shots);
            Ok(pretty(&CountsDocument { metadata, samples }))
        }
        RunFormat::Statevector => {
            let n = state.num_qubits();
            let mut out = String::new();
            for (j, amp) in state.amplitudes().iter().enumerate() {
                if amp.norm() > 1e-12 {
                    let re = if amp.re == 0.0 { 0.0 } else { amp.re };
                    let im = if amp.im == 0.0 { 0.0 } else { amp.im };
                    out.push_str(&format!("{} {} {}\n", bitstring_of_index(j, n), re, im));
                }
            }
            Ok(out)
        }
    }
}

pub struct QaoaGridArgs {
    pub betas: usize,
    pub gammas: usize,
    pub target: Option<String>,
}

pub struct QaoaOptimizeArgs {
    pub p: usize,
    pub init_betas: Vec<f64>,
    pub init_gammas: Vec<f64>,
    pub max_evaluations: usize,
}

/// Falls back to the brute-force ground state when no target is named.
fn resolve_target(model: &IsingModel, target: Option<String>) -> Result<String, CliError> {
    match target {
        Some(t) => Ok(t),
        None => {
            let ground = model.brute_force_solve()?;
            Ok(ground.configs[0]
                .values()
                .iter()
                .map(|&s| if s == 1 { '0' } else { '1' })
                .collect())
        }
    }
}

pub fn cmd_qaoa_grid(problem_text: &str, args: QaoaGridArgs, seed: u64) -> Result<String, CliError> {
    let model = as_ising(&read_problem(problem_text)?);
    let target = resolve_target(&model, args.target)?;
    let beta_grid = default_beta_grid(args.betas);
    let gamma_grid = default_gamma_grid(args.gammas);
    let surface = qaoa_landscape(&model, &beta_grid, &gamma_grid, &target)?;
    let mut out = format!(
        "# qaoa grid, seed {}, target {}, {} betas x {} gammas\n",
        seed, target, args.betas, args.gammas
    );
    out.push_str(&surface.to_csv());
    Ok(out)
}

pub fn cmd_qaoa_optimize(
    problem_text: &str,
    args: QaoaOptimizeArgs,
    seed: u64,
) -> Result<String, CliError> {
    let model = as_ising(&read_problem(problem_text)?);
    let init = QaoaParams::new(args.init_betas, args.init_gammas)?;
    let result = qaoa_optimize(&model, args.p, &init, args.max_evaluations, seed)?;
    let metadata = Metadata::new("qaoa", seed)
        .with("p", args.p as u64)
        .with("max_evaluations", args.max_evaluations as u64);
    Ok(pretty(&BestParamsDocument {
        metadata,
        betas: result.params.betas,
        gammas: result.params.gammas,
        energy: result.energy,
        converged: result.converged,
        evaluations: result.evaluations,
    }))
}

pub fn cmd_anneal(
    problem_text: &str,
    schedule: &Schedule,
    schedule_name: &str,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> Result<String, CliError> {
    let model = as_ising(&read_problem(problem_text)?);
    let state = evolve_closed(&model, schedule, t_max, steps)?;
    let ground_probability = qdesk::anneal::ground_subspace_probability(&model, &state)?;

    let n = state.num_qubits();
    let mut levels: Vec<LevelProbability> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, amp)| LevelProbability {
            bitstring: bitstring_of_index(j, n),
            probability: amp.norm_sqr(),
            energy: model
                .energy(&spins_of_index(j, n))
                .expect("basis index always fits the model"),
        })
        .collect();
    levels.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.bitstring.cmp(&b.bitstring))
    });
    levels.truncate(8);

    let metadata = Metadata::new("anneal", seed)
        .with("schedule", schedule_name)
        .with("t_max", t_max)
        .with("steps", steps as u64);
    Ok(pretty(&AnnealDocument {
        metadata,
        ground_probability,
        levels,
    }))
}

pub enum SolveMethod {
    Brute,
    Sa,
}

pub struct SaArgs {
    pub reads: usize,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

pub fn cmd_solve(
    problem_text: &str,
    method: SolveMethod,
    sa: SaArgs,
    seed: u64,
) -> Result<String, CliError> {
    let problem = read_problem(problem_text)?;
    let model = as_ising(&problem);
    let mut samples = match method {
        SolveMethod::Brute => {
            let result = model.brute_force_solve()?;
            let rows = result
                .configs
                .iter()
                .map(|config| SampleRow {
                    bitstring: config.to_bitstring(),
                    energy: Some(result.energy),
                    occurrences: 1,
                    chain_break_fraction: 0.0,
                })
                .collect::<Vec<_>>();
            SampleSet {
                num_variables: model.num_variables(),
                total_shots: rows.len() as u64,
                rows,
                domain: domain_of(&problem),
            }
        }
        SolveMethod::Sa => {
            let mut set =
                simulated_annealing(&model, sa.reads, sa.sweeps, (sa.beta_start, sa.beta_end), seed)?;
            set.domain = domain_of(&problem);
            set
        }
    };
    samples.sort_rows();
    let metadata = match method {
        SolveMethod::Brute => Metadata::new("solve", seed).with("method", "brute"),
        SolveMethod::Sa => Metadata::new("solve", seed)
            .with("method", "sa")
            .with("reads", sa.reads as u64)
            .with("sweeps", sa.sweeps as u64)
            .with("beta_start", sa.beta_start)
            .with("beta_end", sa.beta_end),
    };
    Ok(pretty(&CountsDocument { metadata, samples }))
}

pub struct EmbedArgs {
    pub chimera: (usize, usize, usize),
    pub tries: usize,
    pub chain_strength: f64,
}

/// Output of `embed`: the embedding document and the physical model
/// document, in that order.
pub fn cmd_embed(
    problem_text: &str,
    args: EmbedArgs,
    seed: u64,
) -> Result<(String, String), CliError> {
    let model = as_ising(&read_problem(problem_text)?);
    let (m, n, t) = args.chimera;
    let hw = chimera_graph(m, n, t)?;
    let edges: Vec<(usize, usize)> = model.couplings().keys().copied().collect();

    let mut chains = if edges.is_empty() {
        BTreeMap::new()
    } else {
        find_embedding(&edges, &hw, seed, args.tries)?.chains().clone()
    };

    // Variables that carry only a field never reach the edge-driven search;
    // give each one a free hardware node as a length-1 chain.
    let mut used: BTreeSet<usize> = chains.values().flatten().copied().collect();
    for variable in model.variables() {
        if chains.contains_key(&variable) {
            continue;
        }
        let free = (0..hw.num_nodes()).find(|node| !used.contains(node));
        let Some(node) = free else {
            return Err(CliError::NoSolution(format!(
                "no hardware node left for isolated variable {variable}"
            )));
        };
        used.insert(node);
        chains.insert(variable, BTreeSet::from([node]));
    }
    let emb = Embedding::new(chains)?;

    let violations = validate_embedding(&edges, &hw, &emb);
    if !violations.is_empty() {
        return Err(CliError::NoSolution(format!(
            "embedding failed validation: {violations:?}"
        )));
    }
    let physical = embed_model(&model, &emb, &hw, args.chain_strength)?;

    let metadata = Metadata::new("embed", seed)
        .with("chimera", vec![m as u64, n as u64, t as u64])
        .with("tries", args.tries as u64)
        .with("chain_strength", args.chain_strength);
    let metadata_value = serde_json::to_value(&metadata).expect("metadata always serializes");

    let embedding_doc = annotate(&emb.to_json(), &metadata_value);
    let physical_doc = annotate(
        &problem_to_json(&Problem::Ising(physical)),
        &metadata_value,
    );
    Ok((embedding_doc, physical_doc))
}

/// Injects the metadata block into a JSON object rendered by the core
/// serializers; their readers ignore unknown keys, so round-trips survive.
fn annotate(json: &str, metadata: &serde_json::Value) -> String {
    let mut value: serde_json::Value =
        serde_json::from_str(json).expect("core serializers emit valid JSON");
    value
        .as_object_mut()
        .expect("core documents are objects")
        .insert("metadata".to_string(), metadata.clone());
    pretty(&value)
}
