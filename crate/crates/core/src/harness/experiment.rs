//! Experiment configs, the Monte-Carlo runner, and ratio estimation.
//!
//! An experiment is a pure function of its config: instance `i` is generated
//! from the derived seed `derive_seed(master, i, u64::MAX)` and trial `t` on
//! it runs with `derive_seed(master, i, t)` (trial indices never reach
//! `u64::MAX`, so the two streams cannot collide). Re-running a config
//! reproduces every trial — and the rendered CSV — byte for byte.
//!
//! The competitive ratio of an instance is estimated as
//! `optimum / mean(algorithm values)`, never as a mean of per-trial ratios:
//! the guarantee under study bounds the ratio of expectations, and per-trial
//! ratios may divide by zero. The standard error of that quotient comes from
//! the delta method, `se(ratio) = optimum · se(mean) / mean²`. When the
//! algorithm's mean value is exactly zero against a positive optimum the
//! estimate is flagged unbounded instead of dividing by zero.
//!
//! Every trial's output is re-checked for feasibility against the instance
//! (matchings must be endpoint-disjoint, assignments must fit capacities,
//! selected vertex sets must be independent). An infeasible output is a
//! contract violation and aborts the experiment with an error — it is never
//! folded into the statistics.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::format::{parse_f64, parse_u64, parse_usize, tokenize, Instance};
use crate::harness::generate::{
    gen_bipartite, gen_general, gen_graph, gen_packing, gen_unit_disk,
};
use crate::indepset::{
    default_price_probability, max_weight_independent_set_exact, sample_and_price, simulate,
    LocalGraph,
};
use crate::matching::{
    bipartite_secretary, general_secretary, max_weight_bipartite_matching,
    max_weight_general_matching,
};
use crate::matroid::matroid_greedy_ordinal;
use crate::ordinal::ElementId;
use crate::packing::{fractional_lp_optimum, packing_secretary, packing_secretary_with};
use crate::seeds::derive_seed;

// ---------------------------------------------------------------------------
// Problem kinds and algorithms
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Bipartite,
    General,
    Packing,
    UnitDisk,
    Graph,
    Matroid,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Bipartite => "bipartite",
            ProblemKind::General => "general",
            ProblemKind::Packing => "packing",
            ProblemKind::UnitDisk => "unit-disk",
            ProblemKind::Graph => "graph",
            ProblemKind::Matroid => "matroid",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "bipartite" => ProblemKind::Bipartite,
            "general" => ProblemKind::General,
            "packing" => ProblemKind::Packing,
            "unit-disk" => ProblemKind::UnitDisk,
            "graph" => ProblemKind::Graph,
            "matroid" => ProblemKind::Matroid,
            other => {
                return Err(Error::InvalidParameter(format!("unknown problem kind '{other}'")))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    BipartiteSecretary,
    GeneralSecretary,
    PackingSecretary,
    SampleAndPrice,
    Simulate,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::BipartiteSecretary,
        Algorithm::GeneralSecretary,
        Algorithm::PackingSecretary,
        Algorithm::SampleAndPrice,
        Algorithm::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BipartiteSecretary => "bipartite-secretary",
            Algorithm::GeneralSecretary => "general-secretary",
            Algorithm::PackingSecretary => "packing-secretary",
            Algorithm::SampleAndPrice => "sample-and-price",
            Algorithm::Simulate => "simulate",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "bipartite-secretary" => Algorithm::BipartiteSecretary,
            "general-secretary" => Algorithm::GeneralSecretary,
            "packing-secretary" => Algorithm::PackingSecretary,
            "sample-and-price" => Algorithm::SampleAndPrice,
            "simulate" => Algorithm::Simulate,
            other => return Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        })
    }

    /// The algorithm an experiment runs when the config names none.
    pub fn default_for(kind: ProblemKind) -> Option<Algorithm> {
        match kind {
            ProblemKind::Bipartite => Some(Algorithm::BipartiteSecretary),
            ProblemKind::General => Some(Algorithm::GeneralSecretary),
            ProblemKind::Packing => Some(Algorithm::PackingSecretary),
            ProblemKind::UnitDisk | ProblemKind::Graph => Some(Algorithm::SampleAndPrice),
            ProblemKind::Matroid => None,
        }
    }

    /// Whether the algorithm applies to instances of `kind`.
    pub fn runs_on(self, kind: ProblemKind) -> bool {
        match self {
            Algorithm::BipartiteSecretary => kind == ProblemKind::Bipartite,
            Algorithm::GeneralSecretary => kind == ProblemKind::General,
            Algorithm::PackingSecretary => kind == ProblemKind::Packing,
            Algorithm::SampleAndPrice | Algorithm::Simulate => {
                kind == ProblemKind::UnitDisk || kind == ProblemKind::Graph
            }
        }
    }

    /// Whether the algorithm takes a probability parameter `p`.
    fn takes_probability(self) -> bool {
        !matches!(self, Algorithm::BipartiteSecretary | Algorithm::GeneralSecretary)
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Kind-specific generator knobs; irrelevant fields are ignored (and not
/// echoed) for other kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    /// Edge probability for `general` and `graph` instances.
    pub edge_prob: f64,
    /// Declared local independence bound for `graph` instances
    /// (`None` = the always-valid `n - 1`).
    pub alpha1: Option<usize>,
    /// Packing: resources, options per request, sparsity, capacity ratio.
    pub resources: usize,
    pub options: usize,
    pub sparsity: usize,
    pub capacity_ratio: usize,
    /// Target average degree for `unit-disk` instances.
    pub avg_degree: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            edge_prob: 0.5,
            alpha1: None,
            resources: 6,
            options: 2,
            sparsity: 2,
            capacity_ratio: 2,
            avg_degree: 5.0,
        }
    }
}

/// Everything that defines an experiment. Every field is echoed back into
/// the config serialization and the summary so a run can be reproduced from
/// its own report.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Identifier echoed in the CSV `experiment` column.
    pub id: String,
    pub problem: ProblemKind,
    pub algorithm: Algorithm,
    /// Number of random instances.
    pub instances: usize,
    /// Monte-Carlo trials per instance (at least 1).
    pub trials: usize,
    /// Master seed; all per-instance and per-trial seeds derive from it.
    pub seed: u64,
    /// Size knob: left/right side, vertices, requests, or points.
    pub n: usize,
    /// Optional override of the algorithm's sampling probability.
    pub p: Option<f64>,
    pub gen: GeneratorParams,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, n: usize, trials: usize, seed: u64) -> Result<Self> {
        let algorithm = Algorithm::default_for(problem).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "problem kind '{}' has no experiment algorithm; use the threshold sweep instead",
                problem.name()
            ))
        })?;
        Ok(ExperimentConfig {
            id: "exp".to_string(),
            problem,
            algorithm,
            instances: 1,
            trials,
            seed,
            n,
            p: None,
            gen: GeneratorParams::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty()
            || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::InvalidParameter(format!(
                "experiment id '{}' must be non-empty and use only [A-Za-z0-9_-]",
                self.id
            )));
        }
        if self.instances == 0 {
            return Err(Error::InvalidParameter("need at least one instance".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("instance size must be at least 1".into()));
        }
        if !self.algorithm.runs_on(self.problem) {
            return Err(Error::InvalidParameter(format!(
                "algorithm '{}' cannot run on problem '{}'",
                self.algorithm.name(),
                self.problem.name()
            )));
        }
        if let Some(p) = self.p {
            if !self.algorithm.takes_probability() {
                return Err(Error::InvalidParameter(format!(
                    "algorithm '{}' takes no probability parameter",
                    self.algorithm.name()
                )));
            }
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
            }
        }
        match self.problem {
            ProblemKind::General | ProblemKind::Graph => {
                if !(0.0..=1.0).contains(&self.gen.edge_prob) {
                    return Err(Error::InvalidParameter(format!(
                        "edge probability {} outside [0, 1]",
                        self.gen.edge_prob
                    )));
                }
            }
            ProblemKind::Packing => {
                let g = &self.gen;
                if g.resources == 0 || g.options == 0 {
                    return Err(Error::InvalidParameter(
                        "packing needs at least one resource and option".into(),
                    ));
                }
                if g.sparsity == 0 || g.sparsity > g.resources {
                    return Err(Error::InvalidParameter(format!(
                        "sparsity {} must lie in 1..={}",
                        g.sparsity, g.resources
                    )));
                }
                if g.capacity_ratio == 0 {
                    return Err(Error::InvalidParameter("capacity ratio must be at least 1".into()));
                }
            }
            ProblemKind::UnitDisk => {
                if !self.gen.avg_degree.is_finite() || self.gen.avg_degree <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "average degree {} must be positive",
                        self.gen.avg_degree
                    )));
                }
            }
            ProblemKind::Bipartite | ProblemKind::Matroid => {}
        }
        Ok(())
    }
}

/// Parse a config file (`ordsec v1 experiment`). Missing optional keys take
/// their documented defaults; unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut doc = tokenize(text)?;
    if doc.kind != "experiment" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected 'ordsec v1 experiment', found kind '{}'", doc.kind),
        });
    }
    let (p_line, problem) = doc.scalar("problem")?;
    let problem = ProblemKind::from_name(problem)
        .map_err(|e| Error::Parse { line: p_line, msg: e.to_string() })?;
    let (n_line, n) = doc.scalar("n")?;
    let n = parse_usize(n_line, n)?;
    let (t_line, trials) = doc.scalar("trials")?;
    let trials = parse_usize(t_line, trials)?;

    let id = doc.scalar_opt("id").map(|(_, v)| v.to_string()).unwrap_or_else(|| "exp".into());
    let algorithm = match doc.scalar_opt("algorithm") {
        Some((line, name)) => {
            Algorithm::from_name(name).map_err(|e| Error::Parse { line, msg: e.to_string() })?
        }
        None => Algorithm::default_for(problem).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "problem kind '{}' has no experiment algorithm; use the threshold sweep instead",
                problem.name()
            ))
        })?,
    };
    let instances = match doc.scalar_opt("instances") {
        Some((line, v)) => parse_usize(line, v)?,
        None => 1,
    };
    let seed = match doc.scalar_opt("seed") {
        Some((line, v)) => parse_u64(line, v)?,
        None => 0,
    };
    let p = match doc.scalar_opt("p") {
        Some((line, v)) => Some(parse_f64(line, v)?),
        None => None,
    };

    let mut gen = GeneratorParams::default();
    if let Some((line, v)) = doc.scalar_opt("edge-prob") {
        gen.edge_prob = parse_f64(line, v)?;
    }
    if let Some((line, v)) = doc.scalar_opt("alpha1") {
        gen.alpha1 = Some(parse_usize(line, v)?);
    }
    if let Some((line, v)) = doc.scalar_opt("resources") {
        gen.resources = parse_usize(line, v)?;
    }
    if let Some((line, v)) = doc.scalar_opt("options") {
        gen.options = parse_usize(line, v)?;
    }
    if let Some((line, v)) = doc.scalar_opt("sparsity") {
        gen.sparsity = parse_usize(line, v)?;
    }
    if let Some((line, v)) = doc.scalar_opt("capacity-ratio") {
        gen.capacity_ratio = parse_usize(line, v)?;
    }
    if let Some((line, v)) = doc.scalar_opt("avg-degree") {
        gen.avg_degree = parse_f64(line, v)?;
    }
    doc.finish()?;

    let cfg = ExperimentConfig { id, problem, algorithm, instances, trials, seed, n, p, gen };
    cfg.validate()?;
    Ok(cfg)
}

/// Render a config with every effective parameter spelled out. Parsing the
/// result reproduces the config exactly.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::from("ordsec v1 experiment\n");
    let _ = writeln!(out, "id: {}", cfg.id);
    let _ = writeln!(out, "problem: {}", cfg.problem.name());
    let _ = writeln!(out, "algorithm: {}", cfg.algorithm.name());
    let _ = writeln!(out, "instances: {}", cfg.instances);
    let _ = writeln!(out, "trials: {}", cfg.trials);
    let _ = writeln!(out, "seed: {}", cfg.seed);
    let _ = writeln!(out, "n: {}", cfg.n);
    if let Some(p) = cfg.p {
        let _ = writeln!(out, "p: {p}");
    }
    match cfg.problem {
        ProblemKind::General => {
            let _ = writeln!(out, "edge-prob: {}", cfg.gen.edge_prob);
        }
        ProblemKind::Graph => {
            let _ = writeln!(out, "edge-prob: {}", cfg.gen.edge_prob);
            if let Some(a) = cfg.gen.alpha1 {
                let _ = writeln!(out, "alpha1: {a}");
            }
        }
        ProblemKind::Packing => {
            let _ = writeln!(out, "resources: {}", cfg.gen.resources);
            let _ = writeln!(out, "options: {}", cfg.gen.options);
            let _ = writeln!(out, "sparsity: {}", cfg.gen.sparsity);
            let _ = writeln!(out, "capacity-ratio: {}", cfg.gen.capacity_ratio);
        }
        ProblemKind::UnitDisk => {
            let _ = writeln!(out, "avg-degree: {}", cfg.gen.avg_degree);
        }
        ProblemKind::Bipartite | ProblemKind::Matroid => {}
    }
    out
}

// ---------------------------------------------------------------------------
// Running trials
// ---------------------------------------------------------------------------

/// The i-th instance of an experiment, as a pure function of the config.
pub fn generate_instance(cfg: &ExperimentConfig, index: usize) -> Result<Instance> {
    let seed = derive_seed(cfg.seed, index as u64, u64::MAX);
    Ok(match cfg.problem {
        ProblemKind::Bipartite => Instance::Bipartite(gen_bipartite(cfg.n, cfg.n, seed)?),
        ProblemKind::General => Instance::General(gen_general(cfg.n, cfg.gen.edge_prob, seed)?),
        ProblemKind::Packing => Instance::Packing(gen_packing(
            cfg.n,
            cfg.gen.resources,
            cfg.gen.options,
            cfg.gen.sparsity,
            cfg.gen.capacity_ratio,
            seed,
        )?),
        ProblemKind::UnitDisk => Instance::UnitDisk(gen_unit_disk(cfg.n, cfg.gen.avg_degree, seed)?),
        ProblemKind::Graph => {
            Instance::Graph(gen_graph(cfg.n, cfg.gen.edge_prob, cfg.gen.alpha1, seed)?)
        }
        ProblemKind::Matroid => {
            return Err(Error::InvalidParameter(
                "matroid instances are exercised by the threshold sweep, not experiments".into(),
            ))
        }
    })
}

/// The exact benchmark value the ratio estimator divides by: a maximum-weight
/// matching, the fractional packing optimum, a maximum-weight independent
/// set, or the matroid greedy optimum.
pub fn exact_optimum(inst: &Instance) -> Result<f64> {
    Ok(match inst {
        Instance::Bipartite(b) => max_weight_bipartite_matching(b).value,
        Instance::General(g) => max_weight_general_matching(g)?.value,
        Instance::Packing(p) => fractional_lp_optimum(p)?.value,
        Instance::Graph(g) => max_weight_independent_set_exact(g)?.1,
        Instance::UnitDisk(d) => max_weight_independent_set_exact(d.graph())?.1,
        Instance::Matroid(m) => {
            let oracle = m.oracle_over_full_set();
            let basis = matroid_greedy_ordinal(&oracle, m.matroid());
            m.evaluator().total(basis)
        }
    })
}

/// One algorithm run: the selected items (as canonical sorted indices — edge
/// ids, flat `request × options + option` ids, or vertex ids), its sealed
/// objective value, and an independent feasibility re-check.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub selection: Vec<usize>,
    pub value: f64,
    pub feasible: bool,
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    order
}

fn indep_trial(graph: &LocalGraph, algorithm: Algorithm, p: Option<f64>, seed: u64) -> Result<TrialOutcome> {
    let p = p.unwrap_or_else(|| default_price_probability(graph.alpha1()));
    let mut selection = match algorithm {
        Algorithm::SampleAndPrice => sample_and_price(graph, p, seed)?.selected,
        Algorithm::Simulate => simulate(graph, p, seed)?.selected,
        _ => unreachable!("guarded by the caller"),
    };
    selection.sort_unstable();
    let value = graph.value_of(&selection);
    let feasible = graph.is_independent(&selection);
    Ok(TrialOutcome { selection, value, feasible })
}

/// Run one algorithm trial on an instance with the given seed.
pub fn run_trial(
    inst: &Instance,
    algorithm: Algorithm,
    p: Option<f64>,
    seed: u64,
) -> Result<TrialOutcome> {
    match (inst, algorithm) {
        (Instance::Bipartite(b), Algorithm::BipartiteSecretary) => {
            let run = bipartite_secretary(&b.view(), seed);
            let value = b.evaluator().total(run.matched.iter().copied());
            let mut left_used = vec![false; b.left_count()];
            let mut right_used = vec![false; b.right_count()];
            let mut feasible = true;
            for &e in &run.matched {
                let (l, r) = b.endpoints(e);
                if left_used[l] || right_used[r] {
                    feasible = false;
                }
                left_used[l] = true;
                right_used[r] = true;
            }
            let mut selection: Vec<usize> = run.matched.iter().map(|e| e.index()).collect();
            selection.sort_unstable();
            Ok(TrialOutcome { selection, value, feasible })
        }
        (Instance::General(g), Algorithm::GeneralSecretary) => {
            let run = general_secretary(&g.view(), seed);
            let value = g.evaluator().total(run.matched.iter().copied());
            let mut used = vec![false; g.vertex_count()];
            let mut feasible = true;
            for &e in &run.matched {
                let (u, v) = g.endpoints(e);
                if used[u] || used[v] || u == v {
                    feasible = false;
                }
                used[u] = true;
                used[v] = true;
            }
            let mut selection: Vec<usize> = run.matched.iter().map(|e| e.index()).collect();
            selection.sort_unstable();
            Ok(TrialOutcome { selection, value, feasible })
        }
        (Instance::Packing(pi), Algorithm::PackingSecretary) => {
            let view = pi.view();
            let run = match p {
                None => packing_secretary(&view, seed)?,
                Some(p) => {
                    let arrival = shuffled(pi.request_count(), seed);
                    packing_secretary_with(&view, p, &arrival)?
                }
            };
            let value = pi.value_of(&run.assignment);
            let feasible = pi.is_feasible(&run.assignment);
            let mut selection: Vec<usize> = run
                .assignment
                .rows
                .iter()
                .map(|&(j, k)| pi.flat_id(j, k).index())
                .collect();
            selection.sort_unstable();
            Ok(TrialOutcome { selection, value, feasible })
        }
        (Instance::UnitDisk(d), Algorithm::SampleAndPrice | Algorithm::Simulate) => {
            indep_trial(d.graph(), algorithm, p, seed)
        }
        (Instance::Graph(g), Algorithm::SampleAndPrice | Algorithm::Simulate) => {
            indep_trial(g, algorithm, p, seed)
        }
        _ => Err(Error::InvalidParameter(format!(
            "algorithm '{}' cannot run on a {} instance",
            algorithm.name(),
            inst.kind()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Ratio estimation
// ---------------------------------------------------------------------------

/// One trial's record, exactly what a CSV row carries.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub alg_value: f64,
    pub opt_value: f64,
    pub feasible: bool,
}

/// A per-instance competitive-ratio estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioEstimate {
    /// `optimum / mean(algorithm values)`.
    pub ratio: f64,
    /// Delta-method standard error; 0 when fewer than two trials exist.
    pub std_error: f64,
    pub trials: usize,
    /// The algorithm's mean value was exactly zero against a positive
    /// optimum, so the ratio is reported as infinite rather than computed
    /// by a division by zero.
    pub unbounded: bool,
}

/// Estimate `optimum / E[algorithm value]` from trial reports.
pub fn aggregate_ratio(reports: &[TrialReport], optimum: f64) -> Result<RatioEstimate> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("cannot estimate a ratio from zero trials".into()));
    }
    if !optimum.is_finite() || optimum < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "optimum {optimum} must be finite and non-negative"
        )));
    }
    if let Some(bad) = reports.iter().find(|r| !r.alg_value.is_finite() || r.alg_value < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trial {} has invalid algorithm value {}",
            bad.trial, bad.alg_value
        )));
    }
    let r = reports.len() as f64;
    let mean = reports.iter().map(|t| t.alg_value).sum::<f64>() / r;
    if mean == 0.0 {
        return Ok(if optimum > 0.0 {
            RatioEstimate {
                ratio: f64::INFINITY,
                std_error: f64::INFINITY,
                trials: reports.len(),
                unbounded: true,
            }
        } else {
            // A worthless optimum matched exactly: ratio 1 by convention.
            RatioEstimate { ratio: 1.0, std_error: 0.0, trials: reports.len(), unbounded: false }
        });
    }
    let ratio = optimum / mean;
    let std_error = if reports.len() < 2 {
        0.0
    } else {
        let var = reports.iter().map(|t| (t.alg_value - mean).powi(2)).sum::<f64>() / (r - 1.0);
        optimum * (var / r).sqrt() / (mean * mean)
    };
    Ok(RatioEstimate { ratio, std_error, trials: reports.len(), unbounded: false })
}

// ---------------------------------------------------------------------------
// The experiment runner
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub instance: usize,
    pub optimum: f64,
    pub reports: Vec<TrialReport>,
    pub estimate: RatioEstimate,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceResult>,
    /// Mean of the per-instance ratio estimates.
    pub mean_ratio: f64,
    /// Worst per-instance ratio estimate.
    pub max_ratio: f64,
}

/// Execute a full experiment: generate instances, run every trial with its
/// derived seed, re-check feasibility, and estimate per-instance ratios.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let mut instances = Vec::with_capacity(cfg.instances);
    for i in 0..cfg.instances {
        let inst = generate_instance(cfg, i)?;
        let optimum = exact_optimum(&inst).map_err(|e| match e {
            Error::CapabilityExceeded(msg) => {
                Error::CapabilityExceeded(format!("instance {i}: {msg}"))
            }
            other => other,
        })?;
        let mut reports = Vec::with_capacity(cfg.trials);
        for t in 0..cfg.trials {
            let seed = derive_seed(cfg.seed, i as u64, t as u64);
            let out = run_trial(&inst, cfg.algorithm, cfg.p, seed)?;
            if !out.feasible {
                return Err(Error::Infeasible(format!(
                    "instance {i} trial {t}: algorithm output violates feasibility"
                )));
            }
            // The benchmark is exact (or a relaxation), so up to solver
            // rounding no feasible output may beat it.
            if out.value > optimum + 1e-7 * (1.0 + optimum.abs()) {
                return Err(Error::Infeasible(format!(
                    "instance {i} trial {t}: algorithm value {} exceeds optimum {optimum}",
                    out.value
                )));
            }
            reports.push(TrialReport {
                trial: t,
                seed,
                alg_value: out.value,
                opt_value: optimum,
                feasible: out.feasible,
            });
        }
        let estimate = aggregate_ratio(&reports, optimum)?;
        instances.push(InstanceResult { instance: i, optimum, reports, estimate });
    }
    let mean_ratio =
        instances.iter().map(|r| r.estimate.ratio).sum::<f64>() / instances.len() as f64;
    let max_ratio =
        instances.iter().map(|r| r.estimate.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExperimentOutcome { config: cfg.clone(), instances, mean_ratio, max_ratio })
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Fixed-column CSV: `experiment,instance,trial,seed,alg_value,opt_value,feasible`.
/// Floats use the shortest round-tripping decimal, so re-running the same
/// config reproduces the bytes exactly.
pub fn render_csv(outcome: &ExperimentOutcome) -> String {
    let mut out = String::from("experiment,instance,trial,seed,alg_value,opt_value,feasible\n");
    for inst in &outcome.instances {
        for rep in &inst.reports {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                outcome.config.id,
                inst.instance,
                rep.trial,
                rep.seed,
                rep.alg_value,
                rep.opt_value,
                rep.feasible
            );
        }
    }
    out
}

/// Human-readable report: the full config echo followed by per-instance
/// estimates and the aggregate.
pub fn render_summary(outcome: &ExperimentOutcome) -> String {
    let mut out = String::new();
    for line in serialize_config(&outcome.config).lines().skip(1) {
        let _ = writeln!(out, "config {line}");
    }
    for inst in &outcome.instances {
        let est = &inst.estimate;
        if est.unbounded {
            let _ = writeln!(
                out,
                "instance {}: optimum {} ratio unbounded (mean algorithm value 0, {} trials)",
                inst.instance, inst.optimum, est.trials
            );
        } else {
            let mean = inst.optimum / est.ratio;
            let _ = writeln!(
                out,
                "instance {}: optimum {} mean {} ratio {} se {} trials {}",
                inst.instance, inst.optimum, mean, est.ratio, est.std_error, est.trials
            );
        }
    }
    let _ = writeln!(out, "mean ratio {}", outcome.mean_ratio);
    let _ = writeln!(out, "max ratio {}", outcome.max_ratio);
    out
}

// ---------------------------------------------------------------------------
// Weight transforms
// ---------------------------------------------------------------------------

/// Rebuild an instance with every sealed weight/profit mapped through `f`;
/// structure (edges, consumptions, capacities, points) is untouched. With a
/// strictly increasing `f` this preserves all rank information, so ordinal
/// algorithms must make identical decisions on the result.
pub fn transform_instance(inst: &Instance, f: impl Fn(f64) -> f64) -> Result<Instance> {
    Ok(match inst {
        Instance::Bipartite(b) => {
            let eval = b.evaluator();
            let edges: Vec<(usize, usize, f64)> = (0..b.edge_count())
                .map(|e| {
                    let id = ElementId::new(e);
                    let (l, r) = b.endpoints(id);
                    (l, r, f(eval.weight(id)))
                })
                .collect();
            Instance::Bipartite(crate::matching::BipartiteInstance::new(
                b.left_count(),
                b.right_count(),
                edges,
            )?)
        }
        Instance::General(g) => {
            let eval = g.evaluator();
            let edges: Vec<(usize, usize, f64)> = (0..g.edge_count())
                .map(|e| {
                    let id = ElementId::new(e);
                    let (u, v) = g.endpoints(id);
                    (u, v, f(eval.weight(id)))
                })
                .collect();
            Instance::General(crate::matching::GeneralInstance::new(g.vertex_count(), edges)?)
        }
        Instance::Packing(p) => {
            let eval = p.profit_evaluator();
            let (n, kk, m) = (p.request_count(), p.option_count(), p.resource_count());
            let profits: Vec<Vec<f64>> = (0..n)
                .map(|j| (0..kk).map(|k| f(eval.weight(p.flat_id(j, k)))).collect())
                .collect();
            let consumption: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|j| {
                    (0..kk)
                        .map(|k| (0..m).map(|i| p.consumption(j, k, i)).collect())
                        .collect()
                })
                .collect();
            let capacities: Vec<f64> = (0..m).map(|i| p.capacity(i)).collect();
            Instance::Packing(crate::packing::PackingInstance::new(
                capacities,
                profits,
                consumption,
            )?)
        }
        Instance::Graph(g) => Instance::Graph(transform_graph(g, &f)?),
        Instance::UnitDisk(d) => {
            let eval = d.graph().evaluator();
            let weights: Vec<f64> = (0..d.graph().vertex_count())
                .map(|v| f(eval.weight(ElementId::new(v))))
                .collect();
            Instance::UnitDisk(crate::indepset::UnitDiskInstance::from_points(
                d.points.clone(),
                weights,
                d.radius,
            )?)
        }
        Instance::Matroid(m) => {
            let eval = m.evaluator();
            let weights: Vec<f64> =
                (0..m.element_count()).map(|e| f(eval.weight(ElementId::new(e)))).collect();
            Instance::Matroid(crate::matroid::MatroidGround::new(m.matroid().clone(), weights)?)
        }
    })
}

fn transform_graph(g: &LocalGraph, f: &impl Fn(f64) -> f64) -> Result<LocalGraph> {
    let eval = g.evaluator();
    let weights: Vec<f64> =
        (0..g.vertex_count()).map(|v| f(eval.weight(ElementId::new(v)))).collect();
    let mut edges = Vec::new();
    for u in 0..g.vertex_count() {
        for &v in g.neighbors(u) {
            if u < v {
                edges.push((u, v));
            }
        }
    }
    LocalGraph::new(weights, &edges, g.alpha1())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(trial: usize, alg_value: f64, opt_value: f64) -> TrialReport {
        TrialReport { trial, seed: trial as u64, alg_value, opt_value, feasible: true }
    }

    #[test]
    fn ratio_is_one_with_zero_error_when_algorithm_always_matches_optimum() {
        let reports: Vec<TrialReport> = (0..10).map(|t| report(t, 4.25, 4.25)).collect();
        let est = aggregate_ratio(&reports, 4.25).unwrap();
        assert_eq!(est.ratio, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.trials, 10);
        assert!(!est.unbounded);
    }

    #[test]
    fn ratio_divides_optimum_by_the_mean_not_the_mean_of_ratios() {
        // Values 0 and 2 against optimum 2: the ratio of expectations is
        // 2 / 1 = 2, while a per-trial ratio would divide by zero.
        let reports = vec![report(0, 0.0, 2.0), report(1, 2.0, 2.0)];
        let est = aggregate_ratio(&reports, 2.0).unwrap();
        assert!((est.ratio - 2.0).abs() < 1e-15);
        // sd = sqrt(2), se(mean) = 1, se(ratio) = 2 * 1 / 1^2 = 2.
        assert!((est.std_error - 2.0).abs() < 1e-12);

        // Values 1 and 3 against optimum 3: mean of per-trial ratios would
        // be (3/1 + 3/3)/2 = 2; the correct estimate is 3/2.
        let reports = vec![report(0, 1.0, 3.0), report(1, 3.0, 3.0)];
        let est = aggregate_ratio(&reports, 3.0).unwrap();
        assert!((est.ratio - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_mean_against_positive_optimum_is_flagged_unbounded() {
        let reports = vec![report(0, 0.0, 1.0), report(1, 0.0, 1.0)];
        let est = aggregate_ratio(&reports, 1.0).unwrap();
        assert!(est.unbounded);
        assert!(est.ratio.is_infinite());

        let est = aggregate_ratio(&reports, 0.0).unwrap();
        assert!(!est.unbounded);
        assert_eq!(est.ratio, 1.0);
    }

    #[test]
    fn aggregate_ratio_rejects_degenerate_inputs() {
        assert!(aggregate_ratio(&[], 1.0).is_err());
        assert!(aggregate_ratio(&[report(0, 1.0, 1.0)], f64::NAN).is_err());
        assert!(aggregate_ratio(&[report(0, -1.0, 1.0)], 1.0).is_err());
    }

    #[test]
    fn estimator_recovers_a_known_bernoulli_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let reports: Vec<TrialReport> = (0..20_000)
            .map(|t| report(t, if rng.gen::<f64>() < 0.5 { 2.0 } else { 0.0 }, 2.0))
            .collect();
        let est = aggregate_ratio(&reports, 2.0).unwrap();
        // True mean 1, true ratio 2; with 2e4 trials the estimate must sit
        // within 4 standard errors.
        assert!((est.ratio - 2.0).abs() <= 4.0 * est.std_error, "{est:?}");
        assert!(est.std_error < 0.06);
    }

    #[test]
    fn config_files_roundtrip_for_every_kind() {
        let mut configs = Vec::new();
        for problem in [
            ProblemKind::Bipartite,
            ProblemKind::General,
            ProblemKind::Packing,
            ProblemKind::UnitDisk,
            ProblemKind::Graph,
        ] {
            let mut cfg = ExperimentConfig::new(problem, 6, 10, 42).unwrap();
            cfg.instances = 3;
            configs.push(cfg);
        }
        configs[3].p = Some(0.75);
        configs[4].gen.alpha1 = Some(4);
        for cfg in &configs {
            let text = serialize_config(cfg);
            let parsed = parse_config(&text).unwrap();
            assert_eq!(&parsed, cfg);
            assert_eq!(serialize_config(&parsed), text);
        }
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_config("ordsec v1 experiment\nproblem: bipartite\nn: 5\ntrials: 7\n")
            .unwrap();
        assert_eq!(cfg.id, "exp");
        assert_eq!(cfg.algorithm, Algorithm::BipartiteSecretary);
        assert_eq!(cfg.instances, 1);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.p, None);
    }

    #[test]
    fn config_validation_rejects_bad_setups() {
        let mut cfg = ExperimentConfig::new(ProblemKind::Bipartite, 5, 10, 1).unwrap();
        cfg.trials = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));

        let mut cfg = ExperimentConfig::new(ProblemKind::Bipartite, 5, 10, 1).unwrap();
        cfg.p = Some(0.5);
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));

        let mut cfg = ExperimentConfig::new(ProblemKind::Packing, 5, 10, 1).unwrap();
        cfg.p = Some(1.5);
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));

        let mut cfg = ExperimentConfig::new(ProblemKind::Packing, 5, 10, 1).unwrap();
        cfg.gen.sparsity = 10;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));

        let mut cfg = ExperimentConfig::new(ProblemKind::General, 5, 10, 1).unwrap();
        cfg.algorithm = Algorithm::PackingSecretary;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));

        assert!(ExperimentConfig::new(ProblemKind::Matroid, 5, 10, 1).is_err());

        let mut cfg = ExperimentConfig::new(ProblemKind::Bipartite, 5, 10, 1).unwrap();
        cfg.id = "has space".into();
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn experiments_replay_byte_identically() {
        let mut cfg = ExperimentConfig::new(ProblemKind::Bipartite, 4, 3, 7).unwrap();
        cfg.instances = 2;
        let first = render_csv(&run_experiment(&cfg).unwrap());
        let second = render_csv(&run_experiment(&cfg).unwrap());
        assert_eq!(first, second);
        let mut lines = first.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,instance,trial,seed,alg_value,opt_value,feasible"
        );
        assert_eq!(first.lines().count(), 1 + 2 * 3);
        for line in lines {
            assert_eq!(line.split(',').count(), 7);
            assert!(line.starts_with("exp,"));
            assert!(line.ends_with(",true"));
        }
    }

    #[test]
    fn every_kind_runs_feasibly_and_below_optimum() {
        let mut configs = vec![
            ExperimentConfig::new(ProblemKind::Bipartite, 5, 20, 11).unwrap(),
            ExperimentConfig::new(ProblemKind::General, 8, 20, 12).unwrap(),
            ExperimentConfig::new(ProblemKind::Packing, 6, 20, 13).unwrap(),
            ExperimentConfig::new(ProblemKind::UnitDisk, 10, 20, 14).unwrap(),
            ExperimentConfig::new(ProblemKind::Graph, 9, 20, 15).unwrap(),
        ];
        configs[2].gen.resources = 3;
        let mut simulate_cfg = ExperimentConfig::new(ProblemKind::UnitDisk, 10, 20, 16).unwrap();
        simulate_cfg.algorithm = Algorithm::Simulate;
        configs.push(simulate_cfg);

        for cfg in &configs {
            let outcome = run_experiment(cfg).unwrap();
            for inst in &outcome.instances {
                assert!(inst.optimum > 0.0);
                for rep in &inst.reports {
                    assert!(rep.feasible);
                    assert!(rep.alg_value <= inst.optimum + 1e-7 * (1.0 + inst.optimum));
                }
                assert!(
                    inst.estimate.ratio >= 1.0 - 1e-9 || inst.estimate.unbounded,
                    "ratio {} for {}",
                    inst.estimate.ratio,
                    cfg.problem.name()
                );
            }
            let summary = render_summary(&outcome);
            assert!(summary.contains(&format!("config problem: {}", cfg.problem.name())));
            assert!(summary.contains("mean ratio "));
            assert!(summary.contains("max ratio "));
        }
    }

    #[test]
    fn capability_errors_name_the_offending_instance() {
        let cfg = ExperimentConfig::new(ProblemKind::General, 20, 2, 3).unwrap();
        match run_experiment(&cfg) {
            Err(Error::CapabilityExceeded(msg)) => {
                assert!(msg.contains("instance 0"), "message was: {msg}")
            }
            other => panic!("expected a capability error, got {other:?}"),
        }
    }

    #[test]
    fn monotone_weight_transforms_never_change_selections() {
        let cube = |x: f64| x * x * x + x;
        let mut configs = vec![
            ExperimentConfig::new(ProblemKind::Bipartite, 5, 1, 21).unwrap(),
            ExperimentConfig::new(ProblemKind::General, 8, 1, 22).unwrap(),
            ExperimentConfig::new(ProblemKind::Packing, 6, 1, 23).unwrap(),
            ExperimentConfig::new(ProblemKind::UnitDisk, 10, 1, 24).unwrap(),
        ];
        configs[2].gen.resources = 3;
        let mut simulate_cfg = ExperimentConfig::new(ProblemKind::UnitDisk, 10, 1, 25).unwrap();
        simulate_cfg.algorithm = Algorithm::Simulate;
        configs.push(simulate_cfg);

        for cfg in &configs {
            for i in 0..3 {
                let inst = generate_instance(cfg, i).unwrap();
                let twisted = transform_instance(&inst, cube).unwrap();
                for t in 0..10 {
                    let seed = derive_seed(cfg.seed, i as u64, t);
                    let a = run_trial(&inst, cfg.algorithm, cfg.p, seed).unwrap();
                    let b = run_trial(&twisted, cfg.algorithm, cfg.p, seed).unwrap();
                    assert_eq!(
                        a.selection, b.selection,
                        "{} instance {i} trial {t}",
                        cfg.problem.name()
                    );
                }
            }
        }
    }

    #[test]
    fn mismatched_algorithm_and_instance_is_an_error() {
        let inst = generate_instance(
            &ExperimentConfig::new(ProblemKind::Bipartite, 3, 1, 1).unwrap(),
            0,
        )
        .unwrap();
        assert!(matches!(
            run_trial(&inst, Algorithm::PackingSecretary, None, 0),
            Err(Error::InvalidParameter(_))
        ));
    }
}
