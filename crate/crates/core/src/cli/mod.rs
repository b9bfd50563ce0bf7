//! The `submodlab` command line: reads a JSON instance, runs one procedure or
//! experiment and prints a JSON (or one-row CSV) report.
//!
//! Exit status is 0 for a solution or report, 2 when a decision procedure
//! fails, and 1 on any error.

mod instance;
mod report;

pub use instance::{InstanceSpec, Member, ModularSpec, OracleSpec, ProblemSpec};
pub use report::{round12, to_csv, Outcome, RunReport, Status};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::approx::{approximate_everywhere, SampleBudget};
use crate::cut::{sbc_general, sbc_symmetric, ssc_approximate, ssc_decide, SbcOptions, SscInstance};
use crate::decision::{derive_seed, BudgetPolicy, DecisionOptions};
use crate::oracle::BoxedOracle;
use crate::partition::{slb_decide, slb_simple, slb_solve, sml_decide, PartitionResult, SlbInstance, SmlInstance};
use crate::sfm::{minimize, SfmConfig};
use crate::verify::{
    brute_force_optimum, check_sampling_bound, check_structure, distinguish_experiment, gap_report, BruteProblem,
    GapProblem, PairSpec, QueryStrategy, StructureMode,
};
use report::{object, redact};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SUBMODLAB_THREADS";
const DEFAULT_PROB: f64 = 0.9;

#[derive(Parser, Debug)]
#[command(name = "submodlab", version, about = "Submodular cut, partition and learning procedures in the value-oracle model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed; trial `i` uses seed XOR i.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Success probability (overrides the instance's `p`).
    #[arg(long = "prob", global = true)]
    pub prob: Option<f64>,
    /// Iteration budget: a cap N or `paper` for the analytical count.
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<BudgetPolicy>,
    /// Relative gap at which binary searches stop.
    #[arg(long = "rel-gap", global = true, default_value_t = 0.05)]
    pub rel_gap: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Independent seeded runs (decision commands) or experiment trials.
    #[arg(long, global = true, default_value_t = 1)]
    pub trials: u64,
    /// Include hidden sets of hard pairs in reports.
    #[arg(long = "reveal-hidden", global = true)]
    pub reveal_hidden: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimize the instance's function over all subsets.
    Sfm { instance: PathBuf },
    /// Submodular sparsest cut.
    #[command(subcommand)]
    Ssc(SscCommand),
    /// Submodular balanced cut.
    #[command(subcommand)]
    Sbc(SbcCommand),
    /// Minimization under a weight lower bound.
    Sml { instance: PathBuf },
    /// Load balancing into `m` blocks.
    #[command(subcommand)]
    Slb(SlbCommand),
    /// Learn a monotone two-partition function everywhere.
    ApproxEverywhere {
        instance: PathBuf,
        /// `scaled:C`, `paper`, or a fixed count per set size.
        #[arg(long, value_parser = parse_samples, default_value = "scaled:200")]
        samples: SampleBudget,
    },
    /// Structural checks, bounds and brute-force experiments.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum SscCommand {
    /// One run of the decision procedure at the instance's `b`.
    Decide { instance: PathBuf },
    /// Geometric binary search over the target.
    Approx { instance: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SbcCommand {
    /// Symmetric functions, `b'`-balanced output.
    Sym { instance: PathBuf },
    /// General functions, `b'/2`-balanced output.
    Gen { instance: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SlbCommand {
    /// Contiguous blocks of near-equal size.
    Simple { instance: PathBuf },
    /// Sampling decision procedure at the instance's `b`.
    Sampled { instance: PathBuf },
    /// The better-guaranteed of the two, searching over `b`.
    Auto { instance: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairKind {
    F1f2,
    F3f4,
    F5f6,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[arg(long, value_enum)]
    pub pair: PairKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub beta: usize,
    /// Cap of f3/f4.
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Number of hidden blocks of f5/f6.
    #[arg(long)]
    pub m: Option<usize>,
}

impl PairArgs {
    fn spec(&self) -> Result<PairSpec> {
        let need = |x: Option<usize>, name: &str| x.ok_or_else(|| anyhow!("--{name} is required for this pair"));
        Ok(match self.pair {
            PairKind::F1f2 => PairSpec::F1F2 { n: self.n, beta: self.beta },
            PairKind::F3f4 => PairSpec::F3F4 { n: self.n, alpha: need(self.alpha, "alpha")?, beta: self.beta },
            PairKind::F5f6 => PairSpec::F5F6 { n: self.n, m: need(self.m, "m")?, beta: self.beta },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    RandomMasks,
    SizeTargeted,
    EmptyOnly,
    RevealHidden,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GapKind {
    Ssc,
    Sml,
    Slb,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Submodularity, monotonicity, symmetry and nonnegativity.
    Structure {
        instance: PathBuf,
        /// Check this many random triples instead of all of them.
        #[arg(long)]
        sampled: Option<u64>,
    },
    /// Binomial point mass against the sampling lower bound.
    Bound {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Count trials in which a query strategy tells a hard pair apart.
    Distinguish {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = StrategyKind::RandomMasks)]
        strategy: StrategyKind,
        /// Query size for `size-targeted`.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        queries: u64,
    },
    /// Brute-force optima of both members of a hard pair.
    Gap {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum)]
        problem: GapKind,
        /// `W` for `sml`.
        #[arg(long = "target-weight")]
        target_weight: Option<usize>,
        /// Machines for `slb`; defaults to the pair's `m`.
        #[arg(long)]
        machines: Option<usize>,
    },
    /// Brute-force optimum of the instance's problem.
    Brute { instance: PathBuf },
}

fn parse_budget(s: &str) -> Result<BudgetPolicy, String> {
    if s == "paper" {
        return Ok(BudgetPolicy::Analytical);
    }
    s.parse::<u64>()
        .map(BudgetPolicy::capped)
        .map_err(|_| format!("expected a nonnegative integer or `paper`, got `{s}`"))
}

fn parse_samples(s: &str) -> Result<SampleBudget, String> {
    if s == "paper" {
        return Ok(SampleBudget::Analytical);
    }
    if let Some(c) = s.strip_prefix("scaled:") {
        return c
            .parse::<f64>()
            .ok()
            .filter(|c| c.is_finite() && *c > 0.0)
            .map(|c| SampleBudget::Scaled { c })
            .ok_or_else(|| format!("expected a positive scale after `scaled:`, got `{c}`"));
    }
    s.parse::<u64>()
        .map(|per_size| SampleBudget::Fixed { per_size })
        .map_err(|_| format!("expected `scaled:C`, `paper` or a count, got `{s}`"))
}

/// Worker count from the environment, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&n| n > 0)
}

/// Parses `args`, runs the command and writes the report. Returns the exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut report) => {
            report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut value = report.to_value();
            if !cli.common.reveal_hidden {
                hide(&mut value);
            }
            let text = match cli.common.format {
                Format::Json => serde_json::to_string_pretty(&value).expect("value prints") + "\n",
                Format::Csv => to_csv(&value),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            report.status.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Witnesses of secret hidden structure are marked during execution with a
/// `hidden_witness` key; they are replaced here unless revealing was requested.
fn hide(v: &mut Value) {
    redact(v, "hidden_witness");
}

fn pool() -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap().unwrap_or(0))
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

/// Runs `one(seed_i)` for every trial in parallel.
fn fan_out(common: &Common, one: impl Fn(u64) -> Result<Outcome> + Sync) -> Result<Vec<Outcome>> {
    if common.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if common.trials == 1 {
        return Ok(vec![one(common.seed)?]);
    }
    pool()?.install(|| (0..common.trials).into_par_iter().map(|i| one(derive_seed(common.seed, i))).collect())
}

struct Loaded {
    spec: InstanceSpec,
    oracle: BoxedOracle,
    secret_hidden: bool,
}

fn load(path: &PathBuf) -> Result<Loaded> {
    let spec = InstanceSpec::load(path)?;
    let built = spec.build()?;
    Ok(Loaded { spec, oracle: built.oracle, secret_hidden: built.secret_hidden })
}

fn prob(common: &Common, spec: &InstanceSpec) -> f64 {
    common.prob.or(spec.p).unwrap_or(DEFAULT_PROB)
}

fn options(common: &Common) -> DecisionOptions {
    DecisionOptions { budget: common.budget.unwrap_or_default(), ..DecisionOptions::default() }
}

fn partition_outcome(r: &PartitionResult, seed: u64) -> Outcome {
    Outcome {
        status: Status::Solution,
        fail_reason: None,
        solution: None,
        blocks: Some(r.blocks.iter().map(|b| b.to_vec()).collect()),
        objective: Some(r.makespan),
        iterations: None,
        queries: r.queries,
        seed,
        budget: None,
        details: Some(object([("method", json!(r.method)), ("notice", json!(r.notice))])),
    }
}

fn execute(cli: &Cli) -> Result<RunReport> {
    let c = &cli.common;
    match &cli.command {
        Command::Sfm { instance } => {
            let l = load(instance)?;
            let r = minimize(&l.oracle, &SfmConfig::default())?;
            let out = Outcome::solved(&r.minimizer, r.min_value, r.queries_used, c.seed).with_details(object([
                ("min_value", json!(r.min_value)),
                ("method", json!(r.method)),
                ("iterations", json!(r.iterations)),
            ]));
            Ok(RunReport::from_outcomes("sfm", vec![out]))
        }
        Command::Ssc(SscCommand::Decide { instance }) => {
            let l = load(instance)?;
            let b = l.spec.target()?;
            let inst = SscInstance::new(&l.oracle, l.spec.demands()?)?;
            let p = prob(c, &l.spec);
            let opts = options(c);
            let outs = fan_out(c, |seed| {
                let out = ssc_decide(&inst, b, p, &opts, seed)?;
                Ok(Outcome::from_decision(&out, |s| Some(s)).with_details(object([("b", json!(b))])))
            })?;
            Ok(RunReport::from_outcomes("ssc decide", outs))
        }
        Command::Ssc(SscCommand::Approx { instance }) => {
            let l = load(instance)?;
            let inst = SscInstance::new(&l.oracle, l.spec.demands()?)?;
            let p = prob(c, &l.spec);
            let opts = options(c);
            let outs = fan_out(c, |seed| {
                let a = ssc_approximate(&inst, p, c.rel_gap, &opts, seed)?;
                let mut out = Outcome::solved(&a.set, a.ratio, a.queries, seed);
                if !a.certified {
                    out.status = Status::Fail;
                }
                out.iterations = Some(a.decisions);
                Ok(out.with_details(object([
                    ("ratio", json!(a.ratio)),
                    ("window", json!(a.window)),
                    ("certified", json!(a.certified)),
                    ("decisions", json!(a.decisions)),
                ])))
            })?;
            Ok(RunReport::from_outcomes("ssc approx", outs))
        }
        Command::Sbc(cmd) => {
            let (instance, symmetric) = match cmd {
                SbcCommand::Sym { instance } => (instance, true),
                SbcCommand::Gen { instance } => (instance, false),
            };
            let l = load(instance)?;
            let (w, b_prime) = l.spec.sbc()?;
            let mut opts = SbcOptions { p: prob(c, &l.spec), rel_gap: c.rel_gap, ..SbcOptions::default() };
            if let Some(budget) = c.budget {
                opts.inner.budget = budget;
            }
            let outs = fan_out(c, |seed| {
                let r = if symmetric {
                    sbc_symmetric(&l.oracle, &w, b_prime, &opts, seed)?
                } else {
                    sbc_general(&l.oracle, &w, b_prime, &opts, seed)?
                };
                Ok(Outcome::solved(&r.set, r.f_value, r.queries, seed).with_details(object([
                    ("balance_achieved", json!(r.balance_achieved)),
                    ("pieces", json!(r.pieces.len())),
                    ("windows", json!(r.windows)),
                ])))
            })?;
            Ok(RunReport::from_outcomes(if symmetric { "sbc sym" } else { "sbc gen" }, outs))
        }
        Command::Sml { instance } => {
            let l = load(instance)?;
            let (weighted, target) = l.spec.sml()?;
            let inst = SmlInstance::new(&l.oracle, weighted, target, l.spec.target()?, prob(c, &l.spec))?;
            let opts = options(c);
            let outs = fan_out(c, |seed| {
                let out = sml_decide(&inst, &opts, seed)?;
                let mut o = Outcome::from_decision(&out, |s| Some(&s.set));
                if let Some(s) = out.solution() {
                    o = o.with_details(object([("weight", json!(s.weight)), ("pieces", json!(s.pieces.len()))]));
                }
                Ok(o)
            })?;
            Ok(RunReport::from_outcomes("sml", outs))
        }
        Command::Slb(cmd) => {
            let (instance, name) = match cmd {
                SlbCommand::Simple { instance } => (instance, "slb simple"),
                SlbCommand::Sampled { instance } => (instance, "slb sampled"),
                SlbCommand::Auto { instance } => (instance, "slb auto"),
            };
            let l = load(instance)?;
            let m = l.spec.slb()?;
            let p = prob(c, &l.spec);
            let opts = options(c);
            let outs = match cmd {
                SlbCommand::Simple { .. } => vec![partition_outcome(&slb_simple(&l.oracle, m)?, c.seed)],
                SlbCommand::Sampled { .. } => {
                    let inst = SlbInstance::new(&l.oracle, m, l.spec.target()?, p)?;
                    fan_out(c, |seed| {
                        let out = slb_decide(&inst, &opts, seed)?;
                        Ok(match out.solution() {
                            Some(r) => {
                                let mut o = partition_outcome(r, seed);
                                o.iterations = Some(out.iterations);
                                o.budget = Some(out.budget);
                                o
                            }
                            None => Outcome::from_decision(&out, |_| None),
                        })
                    })?
                }
                SlbCommand::Auto { .. } => {
                    fan_out(c, |seed| Ok(partition_outcome(&slb_solve(&l.oracle, m, p, c.rel_gap, &opts, seed)?, seed)))?
                }
            };
            Ok(RunReport::from_outcomes(name, outs))
        }
        Command::ApproxEverywhere { instance, samples } => {
            let l = load(instance)?;
            let p = prob(c, &l.spec);
            let (function, log) = approximate_everywhere(&l.oracle, p, *samples, c.seed)?;
            let sizes: Vec<usize> = log.classes.iter().map(|k| k.samples.len()).collect();
            Ok(RunReport::from_report(
                "approx-everywhere",
                object([
                    ("function", json!(function)),
                    ("exact", json!(function.is_exact())),
                    ("collision", json!(log.collision)),
                    ("samples_per_probability", json!(log.samples_per_probability)),
                    ("samples_by_size", json!(sizes)),
                    ("queries", json!(log.queries)),
                    ("seed", json!(c.seed)),
                ]),
            ))
        }
        Command::Verify(v) => verify(c, v),
    }
}

fn verify(c: &Common, v: &VerifyCommand) -> Result<RunReport> {
    match v {
        VerifyCommand::Structure { instance, sampled } => {
            let l = load(instance)?;
            let mode = match sampled {
                Some(count) => StructureMode::Sampled { count: *count, seed: c.seed },
                None => StructureMode::Exhaustive,
            };
            Ok(RunReport::from_report("verify structure", check_structure(&l.oracle, mode)?))
        }
        VerifyCommand::Bound { m, q, eps } => {
            Ok(RunReport::from_report("verify bound", check_sampling_bound(*m, *q, *eps)?))
        }
        VerifyCommand::Distinguish { pair, strategy, size, queries } => {
            let strategy = match strategy {
                StrategyKind::RandomMasks => QueryStrategy::RandomMasks,
                StrategyKind::SizeTargeted => {
                    QueryStrategy::SizeTargeted { size: size.ok_or_else(|| anyhow!("--size is required for size-targeted"))? }
                }
                StrategyKind::EmptyOnly => QueryStrategy::EmptyOnly,
                StrategyKind::RevealHidden => QueryStrategy::RevealHidden,
            };
            let r = distinguish_experiment(pair.spec()?, strategy, *queries, c.trials, c.seed, thread_cap())?;
            Ok(RunReport::from_report("verify distinguish", r))
        }
        VerifyCommand::Gap { pair, problem, target_weight, machines } => {
            let spec = pair.spec()?;
            let problem = match problem {
                GapKind::Ssc => GapProblem::Ssc,
                GapKind::Sml => GapProblem::Sml {
                    target_weight: target_weight.ok_or_else(|| anyhow!("--target-weight is required for sml"))?,
                },
                GapKind::Slb => GapProblem::Slb {
                    m: machines.or(pair.m).ok_or_else(|| anyhow!("--machines is required for slb"))?,
                },
            };
            let r = gap_report(spec, problem, c.seed)?;
            let mut value = serde_json::to_value(&r)?;
            // the second witness is built on the hidden set
            if let Some(second) = value.get_mut("second").and_then(Value::as_object_mut) {
                if let Some(w) = second.remove("witness") {
                    second.insert("hidden_witness".into(), w);
                }
            }
            Ok(RunReport::from_report("verify gap", value))
        }
        VerifyCommand::Brute { instance } => {
            let l = load(instance)?;
            let f = &l.oracle;
            let opt = match l.spec.problem()? {
                ProblemSpec::Ssc { .. } => {
                    brute_force_optimum(BruteProblem::Ssc(&SscInstance::new(f, l.spec.demands()?)?))?
                }
                ProblemSpec::Sbc { .. } => {
                    let (weights, balance) = l.spec.sbc()?;
                    brute_force_optimum(BruteProblem::Sbc { oracle: &f, weights: &weights, balance })?
                }
                ProblemSpec::Sml { .. } => {
                    let (weighted, target) = l.spec.sml()?;
                    let inst = SmlInstance::new(f, weighted, target, 1.0, DEFAULT_PROB)?;
                    brute_force_optimum(BruteProblem::Sml(&inst))?
                }
                ProblemSpec::Slb { m } => brute_force_optimum(BruteProblem::Slb { oracle: &f, m: *m })?,
            };
            let mut value = serde_json::to_value(&opt)?;
            if l.secret_hidden {
                if let Some(o) = value.as_object_mut() {
                    let w = o.remove("witness").context("witness present")?;
                    o.insert("hidden_witness".into(), w);
                }
            }
            Ok(RunReport::from_report("verify brute", value))
        }
    }
}
