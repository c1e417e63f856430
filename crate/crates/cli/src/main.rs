//! Command-line front end for the ordsec harness: generate instance files,
//! run seeded experiments, verify runtime properties of instances, and sweep
//! cutoff policies on the hard partition-matroid family.
//!
//! Exit codes are part of the contract: 0 on success, 2 for invalid
//! configuration or malformed input, 3 for a feasibility-contract violation,
//! 4 when an exact oracle's size capability is exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ordsec_core::harness::{
    exact_optimum, gen_matroid, generate_instance, parse_config, parse_instance, render_csv,
    render_summary, run_experiment, run_trial, serialize_instance, transform_instance, Algorithm,
    ExperimentConfig, GeneratorParams, Instance, ProblemKind,
};
use ordsec_core::matroid::{estimate_threshold_value, matroid_greedy_ordinal, sweep_thresholds};
use ordsec_core::seeds::derive_seed;
use ordsec_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ordsec",
    version,
    about = "Online selection under ordinal information: instance generation, \
             seeded experiments, property verification, and threshold sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an instance file (the same instance `run` would use at --index)
    Gen(GenCmd),
    /// Run an experiment and report per-trial CSV or a ratio summary
    Run(RunCmd),
    /// Check runtime properties of an instance: feasibility of every
    /// applicable algorithm, values never above the exact optimum, seed
    /// determinism, and invariance under monotone weight transforms
    Verify(VerifyCmd),
    /// Sweep every deterministic cutoff policy on the hard instance family
    /// and report the best cutoff's value and ratio
    LowerBound(LowerBoundCmd),
}

/// Generator knobs; unset knobs keep the kind's defaults.
#[derive(Args, Debug, Default)]
struct GenOpts {
    /// Edge probability for general/graph instances (default 0.5)
    #[arg(long, value_name = "PROB")]
    edge_prob: Option<f64>,
    /// Declared local independence bound for graph instances (default n-1)
    #[arg(long, value_name = "A1")]
    alpha1: Option<usize>,
    /// Packing: number of resources (default 6)
    #[arg(long, value_name = "M")]
    resources: Option<usize>,
    /// Packing: options per request (default 2)
    #[arg(long, value_name = "K")]
    options: Option<usize>,
    /// Packing: resources consumed per option (default 2)
    #[arg(long, value_name = "D")]
    sparsity: Option<usize>,
    /// Packing: capacity-to-consumption ratio B (default 2)
    #[arg(long, value_name = "B")]
    capacity_ratio: Option<usize>,
    /// Unit-disk: target average degree (default 5.0)
    #[arg(long, value_name = "DEG")]
    avg_degree: Option<f64>,
}

impl GenOpts {
    fn apply(&self, g: &mut GeneratorParams) {
        if let Some(v) = self.edge_prob {
            g.edge_prob = v;
        }
        if let Some(v) = self.alpha1 {
            g.alpha1 = Some(v);
        }
        if let Some(v) = self.resources {
            g.resources = v;
        }
        if let Some(v) = self.options {
            g.options = v;
        }
        if let Some(v) = self.sparsity {
            g.sparsity = v;
        }
        if let Some(v) = self.capacity_ratio {
            g.capacity_ratio = v;
        }
        if let Some(v) = self.avg_degree {
            g.avg_degree = v;
        }
    }
}

#[derive(Args)]
struct GenCmd {
    /// Problem kind: bipartite|general|packing|graph|unit-disk|matroid
    #[arg(long)]
    problem: String,
    /// Instance size (vertices per side, vertices, requests, or elements)
    #[arg(long)]
    n: usize,
    /// Master seed; the instance is a pure function of (seed, index)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which instance of the experiment stream to emit
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Matroid rank (default max(1, n/2); matroid instances only)
    #[arg(long)]
    k: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    gen: GenOpts,
}

#[derive(Args)]
struct RunCmd {
    /// Experiment config file (line-oriented, kind `experiment`);
    /// conflicts with the inline experiment flags
    #[arg(
        long,
        conflicts_with_all = [
            "problem", "algorithm", "id", "n", "trials", "instances", "seed", "p",
            "edge_prob", "alpha1", "resources", "options", "sparsity",
            "capacity_ratio", "avg_degree",
        ]
    )]
    config: Option<PathBuf>,
    /// Problem kind: bipartite|general|packing|graph|unit-disk
    #[arg(long, required_unless_present = "config")]
    problem: Option<String>,
    /// Algorithm name (default: the kind's canonical algorithm)
    #[arg(long)]
    algorithm: Option<String>,
    /// Experiment id echoed into reports
    #[arg(long, default_value = "exp")]
    id: String,
    /// Instance size
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    /// Trials per instance
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Number of instances
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability parameter for algorithms that take one
    #[arg(long)]
    p: Option<f64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    gen: GenOpts,
}

#[derive(Args)]
struct VerifyCmd {
    /// Instance file to verify; alternatively generate one with
    /// --problem/--n/--seed
    #[arg(long, conflicts_with_all = ["problem", "n", "seed", "index", "k"])]
    instance: Option<PathBuf>,
    /// Problem kind to generate and verify
    #[arg(long, required_unless_present = "instance")]
    problem: Option<String>,
    /// Instance size to generate
    #[arg(long, required_unless_present = "instance")]
    n: Option<usize>,
    /// Master seed for generation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which instance of the experiment stream to generate
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Matroid rank (matroid instances only)
    #[arg(long)]
    k: Option<usize>,
    /// Trials per property check
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[command(flatten)]
    gen: GenOpts,
}

#[derive(Args)]
struct LowerBoundCmd {
    /// Ground-set parameter; each family member has n+1 elements
    #[arg(long)]
    n: usize,
    /// Segments parameter (default: round(sqrt(n)); must divide n)
    #[arg(long)]
    k: Option<usize>,
    /// Trials per family member and cutoff estimate
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Summary,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(cmd) => cmd_gen(cmd),
        Command::Run(cmd) => cmd_run(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
        Command::LowerBound(cmd) => cmd_lower_bound(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The exit-code contract: invalid configuration or input is 2, a
/// feasibility-contract violation is 3, exceeding an exact oracle's size
/// capability is 4.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => 3,
        Error::CapabilityExceeded(_) => 4,
        _ => 2,
    }
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Build the instance `run` would use at `index`, or a matroid ground set.
fn build_instance(
    problem: &str,
    n: usize,
    seed: u64,
    index: usize,
    opts: &GenOpts,
    k: Option<usize>,
) -> Result<Instance> {
    let kind = ProblemKind::from_name(problem)?;
    if kind == ProblemKind::Matroid {
        let rank = k.unwrap_or_else(|| (n / 2).max(1));
        let s = derive_seed(seed, index as u64, u64::MAX);
        return Ok(Instance::Matroid(gen_matroid(n, rank, s)?));
    }
    if k.is_some() {
        return Err(Error::InvalidParameter(
            "--k applies only to matroid instances".into(),
        ));
    }
    let mut cfg = ExperimentConfig::new(kind, n, 1, seed)?;
    opts.apply(&mut cfg.gen);
    cfg.validate()?;
    generate_instance(&cfg, index)
}

fn cmd_gen(cmd: GenCmd) -> Result<()> {
    let inst = build_instance(&cmd.problem, cmd.n, cmd.seed, cmd.index, &cmd.gen, cmd.k)?;
    emit(cmd.out, &serialize_instance(&inst))
}

fn cmd_run(cmd: RunCmd) -> Result<()> {
    let cfg = match cmd.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => {
            let kind = ProblemKind::from_name(cmd.problem.as_deref().expect("required"))?;
            let mut cfg =
                ExperimentConfig::new(kind, cmd.n.expect("required"), cmd.trials, cmd.seed)?;
            cfg.id = cmd.id;
            cfg.instances = cmd.instances;
            if let Some(name) = cmd.algorithm.as_deref() {
                cfg.algorithm = Algorithm::from_name(name)?;
            }
            cfg.p = cmd.p;
            cmd.gen.apply(&mut cfg.gen);
            cfg
        }
    };
    cfg.validate()?;
    let outcome = run_experiment(&cfg)?;
    let text = match cmd.format {
        Format::Csv => render_csv(&outcome),
        Format::Summary => render_summary(&outcome),
    };
    emit(cmd.out, &text)
}

fn cmd_verify(cmd: VerifyCmd) -> Result<()> {
    let inst = match &cmd.instance {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let inst = parse_instance(&text)?;
            // Serialization must be canonical: parsing its own output and
            // serializing again reproduces the bytes.
            let canon = serialize_instance(&inst);
            let reparsed = parse_instance(&canon)?;
            if serialize_instance(&reparsed) != canon {
                return Err(Error::Infeasible(
                    "serialize/parse round-trip is not canonical".into(),
                ));
            }
            println!("property parse round-trip: ok");
            inst
        }
        None => build_instance(
            cmd.problem.as_deref().expect("required"),
            cmd.n.expect("required"),
            cmd.seed,
            cmd.index,
            &cmd.gen,
            cmd.k,
        )?,
    };
    verify_instance(&inst, cmd.trials)
}

/// The runtime property suite for one instance. Every check that fails
/// converts into the corresponding contract error so the exit code reflects
/// the first violated property.
fn verify_instance(inst: &Instance, trials: usize) -> Result<()> {
    let kind = ProblemKind::from_name(inst.kind())?;
    let opt = exact_optimum(inst)?;
    println!("property exact-optimum: ok (value {opt})");
    let tol = 1e-7 * (1.0 + opt.abs());
    let cube = |x: f64| x * x * x + x;

    if let Instance::Matroid(ground) = inst {
        let greedy = matroid_greedy_ordinal(&ground.oracle_over_full_set(), ground.matroid());
        if !ground.matroid().is_independent(&greedy) {
            return Err(Error::Infeasible("greedy selection is not independent".into()));
        }
        let value = ground.evaluator().total(greedy.iter().copied());
        if (value - opt).abs() > tol {
            return Err(Error::Infeasible(format!(
                "greedy value {value} disagrees with the optimum {opt}"
            )));
        }
        println!("property greedy feasibility and optimality: ok");
        let twisted = transform_instance(inst, cube)?;
        let Instance::Matroid(tg) = &twisted else { unreachable!() };
        if matroid_greedy_ordinal(&tg.oracle_over_full_set(), tg.matroid()) != greedy {
            return Err(Error::Infeasible(
                "greedy selection changed under a monotone weight transform".into(),
            ));
        }
        println!("property ordinal purity: ok");
        return Ok(());
    }

    let twisted = transform_instance(inst, cube)?;
    for alg in Algorithm::ALL.into_iter().filter(|a| a.runs_on(kind)) {
        for t in 0..trials {
            let seed = derive_seed(0xC11, 0, t as u64);
            let run = run_trial(inst, alg, None, seed)?;
            if !run.feasible {
                return Err(Error::Infeasible(format!(
                    "{} returned an infeasible selection at trial {t}",
                    alg.name()
                )));
            }
            if run.value > opt + tol {
                return Err(Error::Infeasible(format!(
                    "{} value {} exceeds the optimum {opt} at trial {t}",
                    alg.name(),
                    run.value
                )));
            }
        }
        println!("property {} feasibility ({trials} trials): ok", alg.name());

        let seed = derive_seed(0xC11, 1, 0);
        if run_trial(inst, alg, None, seed)?.selection
            != run_trial(inst, alg, None, seed)?.selection
        {
            return Err(Error::Infeasible(format!(
                "{} is not deterministic in the seed",
                alg.name()
            )));
        }
        println!("property {} seed determinism: ok", alg.name());

        for t in 0..trials.min(25) {
            let seed = derive_seed(0xC11, 2, t as u64);
            if run_trial(inst, alg, None, seed)?.selection
                != run_trial(&twisted, alg, None, seed)?.selection
            {
                return Err(Error::Infeasible(format!(
                    "{} selection changed under a monotone weight transform",
                    alg.name()
                )));
            }
        }
        println!("property {} ordinal purity: ok", alg.name());
    }
    Ok(())
}

fn cmd_lower_bound(cmd: LowerBoundCmd) -> Result<()> {
    let k = match cmd.k {
        Some(k) => k,
        None => (cmd.n as f64).sqrt().round() as usize,
    };
    let sweep = sweep_thresholds(cmd.n, k, cmd.trials, cmd.seed)?;
    let text = match cmd.format {
        Format::Csv => {
            let mut text = String::from("position,expected_value\n");
            for (idx, value) in sweep.expected_value.iter().enumerate() {
                text.push_str(&format!("{},{}\n", idx + 1, value));
            }
            text
        }
        Format::Summary => {
            let (idx, sweep_value) = sweep
                .expected_value
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite estimates"))
                .expect("at least one cutoff");
            let position = idx + 1;
            // Re-measure the winner with fresh randomness: the in-sweep
            // maximum of noisy estimates is upward-biased.
            let fresh = estimate_threshold_value(
                cmd.n,
                k,
                position,
                cmd.trials,
                derive_seed(cmd.seed, u64::MAX, 0),
            )?;
            let optimum = (k + 1) as f64;
            let ratio =
                if fresh > 0.0 { optimum / fresh } else { f64::INFINITY };
            format!(
                "config n {}\nconfig k {}\nconfig trials {}\nconfig seed {}\n\
                 best position {position}\nsweep value {sweep_value}\n\
                 fresh value {fresh}\noptimum {optimum}\nratio {ratio}\n",
                cmd.n, k, cmd.trials, cmd.seed
            )
        }
    };
    emit(cmd.out, &text)
}
