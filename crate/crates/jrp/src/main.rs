use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use jrp_core::baseline::{baseline, easy_regime_policy};
use jrp_core::density::DEFAULT_EXPONENT_CAP;
use jrp_core::eoq::Instance;
use jrp_core::policy::{evaluate_exact, evaluate_uncrossing, CostReport, JointMethod};
use jrp_core::solver::{certify, SolverConfig};
use jrp_core::{Error, Rational};
use serde::Serialize;

use jrp::bench::{run_bench, write_csv};
use jrp::format::{
    instance_to_json, parse_instance, parse_policy, result_to_json, BaselineDoc, CostDoc, PolicyDoc,
};
use jrp::generate::{generate, Family, GenSpec};
use jrp::solve_parallel;

#[derive(Parser)]
#[command(name = "jrp", version, about = "Joint replenishment policies on rational grids")]
struct Cli {
    /// Seed for instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output format; bench defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Cli {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve an instance.
    Solve(SolveArgs),
    /// Evaluate a policy on an instance.
    Eval(EvalArgs),
    /// Lower bound, power-of-2 and overloaded-EOQ costs.
    Baseline(BaselineArgs),
    /// Solve every instance in a directory and tabulate the results.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// random, identical or two_scale
    #[arg(long, default_value = "random")]
    family: String,
    #[arg(long, default_value_t = 0.01)]
    k0_min: f64,
    #[arg(long, default_value_t = 100.0)]
    k0_max: f64,
    #[arg(long, default_value_t = 0.01)]
    k_min: f64,
    #[arg(long, default_value_t = 100.0)]
    k_max: f64,
    #[arg(long, default_value_t = 0.01)]
    h_min: f64,
    #[arg(long, default_value_t = 100.0)]
    h_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    /// Rational accuracy parameter in (0, 1/2), as p/q or a decimal.
    #[arg(long)]
    epsilon: String,
    /// Cap on the multiple bound.
    #[arg(long, default_value_t = 64, conflicts_with = "no_psi_cap")]
    psi_cap: u64,
    /// Enumerate the theoretical multiple bound.
    #[arg(long)]
    no_psi_cap: bool,
    #[arg(long, default_value_t = 100_000)]
    guess_budget: u64,
    /// Only try this minimal-interval candidate.
    #[arg(long)]
    tmin_index: Option<usize>,
    /// Break near-ties by exact rational cost.
    #[arg(long)]
    exact_compare: bool,
    #[arg(long, default_value_t = DEFAULT_EXPONENT_CAP)]
    exponent_cap: usize,
}

impl SolverArgs {
    fn config(&self) -> anyhow::Result<(Rational, SolverConfig)> {
        let epsilon: Rational = self.epsilon.parse()?;
        let config = SolverConfig {
            psi_cap: (!self.no_psi_cap).then_some(self.psi_cap),
            guess_budget: self.guess_budget,
            tmin_index: self.tmin_index,
            exact_compare: self.exact_compare,
            exponent_cap: self.exponent_cap,
        };
        Ok((epsilon, config))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    /// Bound the cost of an arbitrary policy by charging the joint cost on
    /// every commodity order.
    #[arg(long)]
    certified: bool,
    #[arg(long, default_value_t = DEFAULT_EXPONENT_CAP)]
    exponent_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance JSON files.
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text)?)
}

fn single_row_csv<T: Serialize>(row: &T) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(row)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize") + "\n"
}

fn run_gen(cli: &Cli, args: &GenArgs) -> anyhow::Result<()> {
    let spec = GenSpec {
        n: args.n,
        seed: cli.seed,
        k0_range: (args.k0_min, args.k0_max),
        k_range: (args.k_min, args.k_max),
        h_range: (args.h_min, args.h_max),
        family: args.family.parse::<Family>()?,
    };
    let instance = generate(&spec)?;
    let text = match cli.format_or(Format::Json) {
        Format::Json => instance_to_json(&instance),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "K0")]
                k0: f64,
                id: u64,
                #[serde(rename = "K")]
                k: f64,
                #[serde(rename = "H")]
                h: f64,
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in instance.commodities() {
                w.serialize(Row {
                    k0: instance.joint_cost(),
                    id: c.id,
                    k: c.model.ordering_cost,
                    h: c.model.holding_rate,
                })?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(args.out.as_ref(), &text)
}

fn run_solve(cli: &Cli, args: &SolveArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let (epsilon, config) = args.solver.config()?;
    let result = solve_parallel(&instance, &epsilon, &config, cli.threads)?;
    let text = match cli.format_or(Format::Json) {
        Format::Json => result_to_json(&result),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                best_method: &'a str,
                best_cost: f64,
                lower_bound: f64,
                ratio: f64,
                pow2_cost: f64,
                easy_cost: f64,
                candidates_evaluated: u64,
                guesses_pruned: u64,
                budget_exhausted: bool,
                psi_effective: u64,
            }
            single_row_csv(&Row {
                best_method: result.best_method.as_str(),
                best_cost: result.best_cost,
                lower_bound: result.lower_bound,
                ratio: certify(&result).ratio,
                pow2_cost: result.pow2_cost,
                easy_cost: result.easy_cost,
                candidates_evaluated: result.candidates_evaluated,
                guesses_pruned: result.guesses_pruned,
                budget_exhausted: result.budget_exhausted,
                psi_effective: result.psi_effective,
            })?
        }
    };
    emit(args.out.as_ref(), &text)
}

/// `Σ (K0 + K_i)/T_i + H_i·T_i`: every commodity order pays the joint cost.
fn certified_report(instance: &Instance, intervals: &[(u64, f64)]) -> anyhow::Result<CostReport> {
    let mut per = Vec::with_capacity(instance.len());
    let mut joint = 0.0;
    for c in instance.commodities() {
        let &(_, t) = intervals
            .iter()
            .find(|(id, _)| *id == c.id)
            .ok_or(Error::UnknownCommodity(c.id))?;
        per.push(c.model.cost(t)?);
        joint += instance.joint_cost() / t;
    }
    let total = per.iter().fold(joint, |acc, c| acc + c);
    Ok(CostReport { joint, per_commodity: per, total, method: JointMethod::CertifiedUpperBound, fallback: false })
}

fn run_eval(cli: &Cli, args: &EvalArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let text = std::fs::read_to_string(&args.policy)
        .with_context(|| format!("reading {}", args.policy.display()))?;
    let doc = parse_policy(&text)?;
    #[derive(Serialize)]
    struct EvalDoc {
        #[serde(skip_serializing_if = "Option::is_none")]
        exact: Option<CostDoc>,
        #[serde(skip_serializing_if = "Option::is_none")]
        uncrossing: Option<CostDoc>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certified: Option<CostDoc>,
    }
    let out = if args.certified {
        let intervals = match &doc {
            PolicyDoc::Grid(g) => g.raw_intervals()?,
            PolicyDoc::Easy(e) => e.intervals.iter().map(|i| (i.id, i.interval)).collect(),
        };
        let report = certified_report(&instance, &intervals)?;
        EvalDoc { exact: None, uncrossing: None, certified: Some(CostDoc::from_report(&report)) }
    } else {
        let PolicyDoc::Grid(grid) = &doc else {
            return Err(Error::Validation(
                "policy intervals are not on a rational grid; rerun with --certified for an upper bound".into(),
            )
            .into());
        };
        let policy = grid.to_policy().map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("{m} (rerun with --certified)")),
            other => other,
        })?;
        let exact = evaluate_exact(&instance, &policy, args.exponent_cap)?;
        let uncrossing = evaluate_uncrossing(&instance, &policy, args.exponent_cap)?;
        EvalDoc {
            exact: Some(CostDoc::from_report(&exact)),
            uncrossing: Some(CostDoc::from_report(&uncrossing)),
            certified: None,
        }
    };
    let text = match cli.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["evaluation", "J", "F", "j_method"])?;
            for (name, cost) in [("exact", &out.exact), ("uncrossing", &out.uncrossing), ("certified", &out.certified)] {
                if let Some(c) = cost {
                    w.write_record([name, &c.joint.to_string(), &c.total.to_string(), &c.j_method])?;
                }
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(args.out.as_ref(), &text)
}

fn run_baseline(cli: &Cli, args: &BaselineArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let b = baseline(&instance)?;
    let doc = BaselineDoc {
        lower_bound: b.lower_bound,
        pow2_cost: b.pow2_cost,
        opt_estimate: b.opt_estimate,
        easy_cost: easy_regime_policy(&instance).certified_cost,
    };
    let text = match cli.format_or(Format::Json) {
        Format::Json => to_json(&doc),
        Format::Csv => single_row_csv(&doc)?,
    };
    emit(args.out.as_ref(), &text)
}

fn run_bench_cmd(cli: &Cli, args: &BenchArgs) -> anyhow::Result<()> {
    let (epsilon, config) = args.solver.config()?;
    jrp_core::alignment::validate_epsilon(&epsilon)?;
    let rows = run_bench(&args.corpus, &epsilon, &config, cli.threads)?;
    let text = match cli.format_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Json => to_json(&rows),
    };
    emit(args.out.as_ref(), &text)
}

/// Input and configuration problems exit with 2, everything else with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Validation(_)
            | Error::Config(_)
            | Error::Parse(_)
            | Error::Domain(_)
            | Error::UnknownCommodity(_)
            | Error::InvalidCandidate(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(a) => run_gen(&cli, a),
        Command::Solve(a) => run_solve(&cli, a),
        Command::Eval(a) => run_eval(&cli, a),
        Command::Baseline(a) => run_baseline(&cli, a),
        Command::Bench(a) => run_bench_cmd(&cli, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
