//! `thln`: generate THLNs, inject faults, embed fault-tolerant paths, and run
//! the stress and check campaigns.
//!
//! Exit codes: 0 success, 1 failure (invalid result, failed suite, internal
//! error), 2 bad configuration, 3 precondition violated, 4 search budget
//! exhausted.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thln::campaign::{self, CheckConfig, StressConfig};
use thln::embed::{embed_with, fault_bound, EmbedError, EmbedOptions};
use thln::faults::{FaultElement, FaultSet};
use thln::oracle::{SearchBudget, DEFAULT_MAX_EXPANSIONS};
use thln::topology::{make_preset, Node, ThlnGraph, VariantSpec, MAX_DIMENSION};

#[derive(Parser)]
#[command(name = "thln", version, about = "Fault-tolerant hamiltonian paths in twisted hypercube-like networks")]
struct Cli {
    /// Search budget in node expansions per oracle call.
    #[arg(long, global = true, env = "THLN_BUDGET", default_value_t = DEFAULT_MAX_EXPANSIONS)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a THLN and optionally a random fault set for it.
    Generate(GenerateArgs),
    /// Embed a hamiltonian or near-hamiltonian path between two nodes.
    Embed(EmbedArgs),
    /// Run seeded embedding trials and tabulate the outcomes.
    Stress(StressArgs),
    /// Run the topology sweep and the search verification suites.
    Check(CheckArgs),
    /// Convert a graph file to DOT or canonical JSON.
    Export(ExportArgs),
}

#[derive(Args)]
struct VariantArgs {
    /// base3, base3-custom, crossed, mobius0, mobius1, locally-twisted or random.
    #[arg(long, default_value = "random")]
    variant: String,
    /// JSON edge list `[[u,v],...]` of a custom 8-node base (base3-custom).
    #[arg(long)]
    base: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    variant: VariantArgs,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Graph JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a DOT rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Number of random faults to draw.
    #[arg(long)]
    faults: Option<usize>,
    /// Fault JSON destination (required with --faults).
    #[arg(long, requires = "faults")]
    faults_out: Option<PathBuf>,
    /// Allow more than 2n-10 faults.
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Fault JSON; no faults when absent.
    #[arg(long)]
    faults: Option<PathBuf>,
    #[arg(short, long)]
    s: Node,
    #[arg(short, long)]
    t: Node,
    /// Result JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept more than 2n-10 faults; the result is marked out-of-contract.
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Args)]
struct StressArgs {
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Faults per trial; defaults to 2n-10.
    #[arg(long)]
    faults: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fixed family for every trial; a fresh random THLN per trial when absent.
    #[arg(long)]
    variant: Option<String>,
    /// Report JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV destination.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Drop one edge from every swept graph; the topology sweep must fail.
    #[arg(long)]
    mutant: bool,
    /// Run only the named suites.
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
    /// Fault JSON; faulty nodes and the ends of faulty edges are highlighted.
    #[arg(long)]
    faults: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = SearchBudget::new(cli.budget).map_err(|e| Failure::config(anyhow!("--budget: {e}"))).and_then(
        |budget| match cli.command {
            Command::Generate(a) => generate(a),
            Command::Embed(a) => embed(a, budget),
            Command::Stress(a) => stress(a, budget),
            Command::Check(a) => check(a, budget),
            Command::Export(a) => export(a),
        },
    );
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::config)
}

fn load_graph(path: &Path) -> Result<ThlnGraph, Failure> {
    ThlnGraph::from_json(&read(path)?)
        .with_context(|| format!("loading graph {}", path.display()))
        .map_err(Failure::config)
}

fn load_faults(path: Option<&Path>) -> Result<FaultSet, Failure> {
    match path {
        None => Ok(FaultSet::new()),
        Some(p) => FaultSet::from_json(&read(p)?)
            .with_context(|| format!("loading faults {}", p.display()))
            .map_err(Failure::config),
    }
}

fn variant_spec(args: &VariantArgs, seed: u64) -> Result<VariantSpec, Failure> {
    if args.variant == "base3-custom" {
        let path = args.base.as_deref().ok_or_else(|| Failure::config(anyhow!("base3-custom needs --base")))?;
        let edges: Vec<[Node; 2]> = serde_json::from_str(&read(path)?)
            .with_context(|| format!("parsing base edge list {}", path.display()))
            .map_err(Failure::config)?;
        return Ok(VariantSpec::Base3Custom(edges.into_iter().map(|[u, v]| (u, v)).collect()));
    }
    VariantSpec::from_name(&args.variant, seed)
        .ok_or_else(|| Failure::config(anyhow!("unknown variant {:?}", args.variant)))
}

fn check_fault_count(n: u32, faults: usize, allow_unsafe: bool) -> Outcome {
    if faults > fault_bound(n) && !allow_unsafe {
        return Err(Failure::config(anyhow!(
            "{faults} faults exceed 2n-10 = {} at n = {n}; pass --unsafe to probe beyond the bound",
            fault_bound(n)
        )));
    }
    Ok(())
}

fn generate(a: GenerateArgs) -> Outcome {
    let spec = variant_spec(&a.variant, a.seed)?;
    let g = make_preset(&spec, a.n).map_err(|e| Failure::config(e.into()))?;
    let mut faults = None;
    if let Some(k) = a.faults {
        check_fault_count(a.n, k, a.allow_unsafe)?;
        let out = a.faults_out.as_deref().ok_or_else(|| Failure::config(anyhow!("--faults needs --faults-out")))?;
        let mut rng = campaign::trial_rng(a.seed, 1);
        let f = campaign::sample_faults(&g, k, &mut rng);
        emit(Some(out), &f.to_json())?;
        faults = Some(f);
    }
    emit(a.out.as_deref(), &g.to_json())?;
    if let Some(dot) = a.dot.as_deref() {
        emit(Some(dot), &g.to_dot(&highlighted(faults.as_ref())))?;
    }
    Ok(())
}

fn highlighted(f: Option<&FaultSet>) -> BTreeSet<Node> {
    let mut out = BTreeSet::new();
    for e in f.into_iter().flat_map(FaultSet::elements) {
        match e {
            FaultElement::Node(v) => {
                out.insert(v);
            }
            FaultElement::Edge(u, v) => {
                out.insert(u);
                out.insert(v);
            }
        }
    }
    out
}

fn embed(a: EmbedArgs, budget: SearchBudget) -> Outcome {
    let g = load_graph(&a.graph)?;
    let f = load_faults(a.faults.as_deref())?;
    let options = EmbedOptions { budget, allow_out_of_contract: a.allow_unsafe };
    match embed_with(&g, &f, a.s, a.t, &options) {
        Ok(r) => {
            emit(a.out.as_deref(), &r.to_json())?;
            Ok(())
        }
        Err(e) => {
            emit(a.out.as_deref(), &e.to_json())?;
            let code = match e {
                EmbedError::PreconditionViolated(_) => 3,
                EmbedError::OracleBudgetExhausted { .. } => 4,
                _ => 1,
            };
            Err(Failure { code, error: e.into() })
        }
    }
}

fn stress(a: StressArgs, budget: SearchBudget) -> Outcome {
    let faults = a.faults.unwrap_or_else(|| fault_bound(a.n));
    check_fault_count(a.n, faults, a.allow_unsafe)?;
    let variant = match &a.variant {
        Some(name) => Some(variant_spec(&VariantArgs { variant: name.clone(), base: None }, a.seed)?),
        None => None,
    };
    if let Some(spec) = &variant {
        make_preset(spec, a.n).map_err(|e| Failure::config(e.into()))?;
    } else if !(7..=MAX_DIMENSION).contains(&a.n) {
        return Err(Failure::config(anyhow!("stress needs 7 <= n <= {}", MAX_DIMENSION)));
    }
    let config = StressConfig {
        dimension: a.n,
        faults,
        trials: a.trials,
        seed: a.seed,
        variant,
        options: EmbedOptions { budget, allow_out_of_contract: a.allow_unsafe },
    };
    let start = Instant::now();
    let report = campaign::stress(&config);
    eprintln!(
        "{}/{} trials succeeded, {} near-hamiltonian, top cases {:?}",
        report.successes, report.trials, report.near_hamiltonian, report.top_cases
    );
    if let Some(l) = report.latency() {
        eprintln!(
            "latency p50 {:?} p90 {:?} p99 {:?} max {:?}; wall {:?}",
            l.p50,
            l.p90,
            l.p99,
            l.max,
            start.elapsed()
        );
    }
    emit(a.out.as_deref(), &report.to_json())?;
    if let Some(csv) = a.csv.as_deref() {
        emit(Some(csv), &report.to_csv())?;
    }
    if !report.all_passed() {
        return Err(anyhow!("{} trial(s) failed: {:?}", report.failures.len(), report.failures).into());
    }
    Ok(())
}

fn check(a: CheckArgs, budget: SearchBudget) -> Outcome {
    let known: Vec<&str> = campaign::SUITES.iter().map(|(name, _)| *name).collect();
    if let Some(bad) = a.suites.iter().find(|s| !known.contains(&s.as_str())) {
        return Err(Failure::config(anyhow!("unknown suite {bad:?}; known: {}", known.join(", "))));
    }
    let config = CheckConfig { seed: a.seed, budget, mutant: a.mutant };
    let mut suites = Vec::new();
    for (name, run) in campaign::SUITES {
        if !a.suites.is_empty() && !a.suites.iter().any(|s| s == name) {
            continue;
        }
        let start = Instant::now();
        let r = run(&config);
        let verdict = if r.ok() { "pass" } else { "FAIL" };
        eprintln!("{verdict} {name}: {}/{} in {:?}", r.passed, r.trials, start.elapsed());
        if let Some(why) = &r.failure {
            eprintln!("  first failure: {why}");
        }
        suites.push(r);
    }
    let report = campaign::CheckReport { seed: a.seed, suites };
    emit(a.out.as_deref(), &report.to_json())?;
    if !report.all_passed() {
        return Err(anyhow!("check suite failed").into());
    }
    Ok(())
}

fn export(a: ExportArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let f = load_faults(a.faults.as_deref())?;
    let text = match a.format {
        Format::Dot => g.to_dot(&highlighted(Some(&f))),
        Format::Json => g.to_json(),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(())
}
