use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use subiso_core::harness::{run_bench, verify_matching_bounds, Algorithm, ExperimentConfig, Family, Format};
use subiso_core::lcst::{lcst_with_witness, llcs_with_witness};
use subiso_core::matching::{search_decision_tree_3x3, verify_decision_tree_3x3, DecisionTree3x3, TreeVerification};
use subiso_core::ov::{
    build_bounded_instance, build_lcst_instance, build_simple_instance, ov_witness, OvInstance, ReductionSidecar,
};
use subiso_core::subiso::{rand_binary, rand_dary, rand_ternary, recurrence_constants, subiso_det, subiso_det_cached};
use subiso_core::{parse_tree, serialize_tree, Error, Tree};

const EXIT_PARSE: u8 = 2;
const EXIT_CONSTRAINT: u8 = 3;
const EXIT_DISAGREEMENT: u8 = 4;
const EXIT_BOUND: u8 = 5;

#[derive(Parser)]
#[command(name = "subiso", version, about = "Rooted subtree isomorphism, largest common subtree and OV tree gadgets")]
struct Cli {
    /// Random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path (file or prefix, depending on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the pattern tree is contained in the host tree.
    Solve(SolveArgs),
    /// Size of the largest common subtree.
    Lcst(LcstArgs),
    /// Build trees from an OV instance file.
    Reduce(ReduceArgs),
    /// Brute-force answer of an OV instance file.
    OvCheck(OvCheckArgs),
    /// Run a benchmark and write a report.
    Bench(BenchArgs),
    /// Exhaustive verifications with a pass/fail table.
    Verify(VerifyArgs),
    /// Search for a ternary decision tree and verify it exactly.
    SearchTernary(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Det,
    DetCached,
    RandBinary,
    RandTernary,
    RandDary,
}

#[derive(Args)]
struct TreePair {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    host: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Algo::Det)]
    algo: Algo,
    #[command(flatten)]
    trees: TreePair,
    /// Degree bound for rand-dary.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Decision tree file for rand-ternary (built-in reference tree if absent).
    #[arg(long)]
    decision_tree: Option<PathBuf>,
    /// Write the stats record to this JSON file.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct LcstArgs {
    #[command(flatten)]
    trees: TreePair,
    /// Require matched nodes to carry equal labels.
    #[arg(long)]
    labelled: bool,
    /// Also print the matched node pairs.
    #[arg(long)]
    witness: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Simple,
    Bounded,
    Lcst,
}

#[derive(Args)]
struct ReduceArgs {
    /// OV instance file.
    #[arg(long)]
    ov: PathBuf,
    #[arg(long, value_enum, default_value_t = Kind::Simple)]
    kind: Kind,
    #[arg(long, default_value_t = 2)]
    degree: usize,
}

#[derive(Args)]
struct OvCheckArgs {
    #[arg(long)]
    ov: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment config; the flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BenchAlgo::RandBinary)]
    algo: BenchAlgo,
    #[arg(long, value_enum, default_value_t = BenchFamily::Complete)]
    family: BenchFamily,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 4)]
    min_height: usize,
    #[arg(long, default_value_t = 11)]
    max_height: usize,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    #[arg(long, default_value_t = 200)]
    max_size: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Also compute exact expectations.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 1.05)]
    tolerance: f64,
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    host: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchAlgo {
    Det,
    RandBinary,
    RandTernary,
    RandDary,
    Lcst,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamily {
    Random,
    Complete,
    OvSimple,
    OvBounded,
    OvLcst,
    File,
}

#[derive(Args)]
struct VerifyArgs {
    /// Exhaustive matching-protocol bounds for this degree.
    #[arg(long)]
    matching_bounds: Option<usize>,
    /// Recurrence constants.
    #[arg(long)]
    constants: bool,
    /// Verify this decision tree file.
    #[arg(long)]
    decision_tree: Option<PathBuf>,
    /// Verify the built-in reference decision tree.
    #[arg(long)]
    reference_tree: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// Candidate trees to explore.
    #[arg(long, default_value_t = 200)]
    budget: usize,
}

enum Failure {
    Core(Error),
    Io(String),
    Bound(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<Tree, Failure> {
    Ok(parse_tree(&read(path)?)?)
}

fn load_decision_tree(path: Option<&Path>) -> Result<DecisionTree3x3, Failure> {
    Ok(match path {
        Some(p) => read(p)?.trim().parse()?,
        None => DecisionTree3x3::reference(),
    })
}

/// Prints to stdout, or writes to `out` when given.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Outcome {
    let h = load_tree(&a.trees.pattern)?;
    let g = load_tree(&a.trees.host)?;
    let start = Instant::now();
    let (name, answer) = match a.algo {
        Algo::Det => ("det", subiso_det(&h, &g)),
        Algo::DetCached => ("det-cached", subiso_det_cached(&h, &g)),
        Algo::RandBinary => ("rand-binary", rand_binary(&h, &g, cli.seed)?),
        Algo::RandTernary => {
            let t = load_decision_tree(a.decision_tree.as_deref())?;
            ("rand-ternary", rand_ternary(&h, &g, cli.seed, &t)?)
        }
        Algo::RandDary => ("rand-dary", rand_dary(&h, &g, a.degree, cli.seed)?),
    };
    let elapsed_ns = start.elapsed().as_nanos() as u64;
    println!("{}", answer.contained);
    let record = json!({
        "algorithm": name,
        "seed": cli.seed,
        "yes_base_calls": answer.stats.yes_base_calls,
        "no_base_calls": answer.stats.no_base_calls,
        "edge_queries": answer.stats.edge_queries,
        "answer": answer.contained,
        "h_size": h.len(),
        "g_size": g.len(),
        "height": h.height().max(g.height()),
        "elapsed_ns": elapsed_ns,
    });
    if let Some(p) = a.stats.as_deref().or(cli.out.as_deref()) {
        write(p, &serde_json::to_string_pretty(&record).expect("json"))?;
    }
    Ok(())
}

fn cmd_lcst(cli: &Cli, a: &LcstArgs) -> Outcome {
    let h = load_tree(&a.trees.pattern)?;
    let g = load_tree(&a.trees.host)?;
    let (value, witness) = if a.labelled {
        llcs_with_witness(&h, &g)
    } else {
        lcst_with_witness(&h, &g)
    };
    println!("{}", value.size);
    if a.witness {
        println!("{}", serde_json::to_string(&witness).expect("json"));
    }
    if let Some(p) = cli.out.as_deref() {
        let record = json!({ "size": value.size, "pair_calls": value.pair_calls, "witness": witness });
        write(p, &serde_json::to_string_pretty(&record).expect("json"))?;
    }
    Ok(())
}

fn write_pair(prefix: &str, h: &Tree, g: &Tree, sidecar: &ReductionSidecar) -> Outcome {
    write(Path::new(&format!("{prefix}.h.tree")), &serialize_tree(h))?;
    write(Path::new(&format!("{prefix}.g.tree")), &serialize_tree(g))?;
    write(
        Path::new(&format!("{prefix}.json")),
        &serde_json::to_string_pretty(sidecar).expect("json"),
    )?;
    println!("{prefix}.h.tree {prefix}.g.tree {prefix}.json");
    Ok(())
}

fn cmd_reduce(cli: &Cli, a: &ReduceArgs) -> Outcome {
    let inst: OvInstance = read(&a.ov)?.parse()?;
    let prefix = cli
        .out
        .clone()
        .unwrap_or_else(|| a.ov.with_extension(""))
        .to_string_lossy()
        .into_owned();
    let flags = |trivial: bool| if trivial { vec!["trivial".to_string()] } else { Vec::new() };
    match a.kind {
        Kind::Simple => {
            let (h, g) = build_simple_instance(&inst);
            let s = ReductionSidecar::measure("simple", None, None, flags(inst.is_trivial()), &h, &g);
            write_pair(&prefix, &h, &g, &s)
        }
        Kind::Bounded => {
            let b = build_bounded_instance(&inst, a.degree)?;
            let s = ReductionSidecar::measure("bounded", Some(a.degree), None, flags(b.trivial), &b.h, &b.g);
            write_pair(&prefix, &b.h, &b.g, &s)
        }
        Kind::Lcst => {
            let bundle = build_lcst_instance(&inst, a.degree)?;
            for (k, t) in bundle.triples.iter().enumerate() {
                let f = vec![format!("popcount={}", t.popcount)];
                let s = ReductionSidecar::measure("lcst", Some(a.degree), Some(t.threshold), f, &t.h, &t.g);
                write_pair(&format!("{prefix}.{k}"), &t.h, &t.g, &s)?;
            }
            Ok(())
        }
    }
}

fn cmd_ov_check(a: &OvCheckArgs) -> Outcome {
    let inst: OvInstance = read(&a.ov)?.parse()?;
    match ov_witness(&inst) {
        Some((i, j)) => println!("true {i} {j}"),
        None => println!("false"),
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<ExperimentConfig>(&read(p)?).map_err(|e| {
            Failure::Core(Error::Parse {
                offset: 0,
                message: format!("config: {e}"),
            })
        })?,
        None => {
            let algorithm = match a.algo {
                BenchAlgo::Det => Algorithm::Det,
                BenchAlgo::RandBinary => Algorithm::RandBinary,
                BenchAlgo::RandTernary => Algorithm::RandTernary,
                BenchAlgo::RandDary => Algorithm::RandDary,
                BenchAlgo::Lcst => Algorithm::Lcst,
            };
            let family = match a.family {
                BenchFamily::Random => Family::Random,
                BenchFamily::Complete => Family::Complete,
                BenchFamily::OvSimple => Family::OvSimple,
                BenchFamily::OvBounded => Family::OvBounded,
                BenchFamily::OvLcst => Family::OvLcst,
                BenchFamily::File => Family::File,
            };
            let mut c = ExperimentConfig::new(algorithm, family, a.degree);
            c.heights = [a.min_height, a.max_height];
            c.sizes = [a.min_size, a.max_size];
            c.dim = a.dim;
            c.trials = a.trials;
            c.seed = cli.seed;
            c.exact = a.exact;
            c.tolerance = a.tolerance;
            c.pattern = a.pattern.clone();
            c.host = a.host.clone();
            c.out = cli.out.clone();
            c.format = cli.format.into();
            c
        }
    };
    if a.config.is_some() && cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    let report = run_bench(&cfg)?;
    emit(cfg.out.as_deref(), &report.render(cfg.format))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Bound("benchmark exceeded a bound".into()))
    }
}

fn row(name: &str, detail: &str, pass: bool) -> bool {
    println!("{:<4}  {name:<34} {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn report_tree(name: &str, v: &TreeVerification) -> bool {
    let frontier = |f: &[subiso_core::matching::CostPair]| {
        f.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    };
    let ok = row(
        &format!("{name}: consistent, <= 9 queries"),
        &format!("max total {}", v.max_total),
        v.max_total_at_most(9),
    );
    println!("      worst yes {}  worst no {}", v.worst_yes, v.worst_no);
    println!("      yes frontier {}", frontier(&v.yes_frontier));
    println!("      no frontier {}", frontier(&v.no_frontier));
    println!("      recurrence spectral radius {:.4}", v.spectral_radius());
    let target = v.meets_target_costs();
    println!(
        "{:<4}  {name}: target costs (26/9, 37/9; 131/36, 61/36; 133/36, 5/3)",
        if target { "PASS" } else { "ATTEMPTED" }
    );
    ok
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let all = a.matching_bounds.is_none() && !a.constants && a.decision_tree.is_none() && !a.reference_tree;
    let mut ok = true;
    if all || a.constants {
        let c = recurrence_constants();
        for (name, got, want, tol) in c.checks() {
            ok &= row(name, &format!("{got:.6} (expected {want:.4} +- {tol:e})"), (got - want).abs() <= tol);
        }
    }
    let degrees: Vec<usize> = match a.matching_bounds {
        Some(d) => vec![d],
        None if all => vec![2, 3],
        None => Vec::new(),
    };
    for d in degrees {
        let m = verify_matching_bounds(d)?;
        println!("      d={d}: {} graphs", m.graphs);
        ok &= row("mixed protocol", &format!("worst {} <= {}", m.worst_mixed, m.mixed_bound), m.mixed_pass);
        ok &= row("no-case protocol", &format!("worst {} <= {}", m.worst_nocase, m.nocase_bound), m.nocase_pass);
        ok &= row("yes-case protocol", &format!("worst {} <= {}", m.worst_yescase, m.yescase_bound), m.yescase_pass);
    }
    if all {
        let v = verify_decision_tree_3x3(&DecisionTree3x3::full_order())?;
        ok &= report_tree("full-order tree", &v);
    }
    if all || a.reference_tree {
        let v = verify_decision_tree_3x3(&DecisionTree3x3::reference())?;
        ok &= report_tree("reference tree", &v);
    }
    if let Some(p) = &a.decision_tree {
        let t = load_decision_tree(Some(p))?;
        let v = verify_decision_tree_3x3(&t)?;
        ok &= report_tree(&p.display().to_string(), &v);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Bound("verification failed".into()))
    }
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Outcome {
    let r = search_decision_tree_3x3(a.budget, cli.seed);
    println!("{}", r.tree);
    report_tree("searched tree", &r.verification);
    if let Some(p) = cli.out.as_deref() {
        write(p, &format!("{}\n", r.tree))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Lcst(a) => cmd_lcst(cli, a),
        Command::Reduce(a) => cmd_reduce(cli, a),
        Command::OvCheck(a) => cmd_ov_check(a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Verify(a) => cmd_verify(a),
        Command::SearchTernary(a) => cmd_search(cli, a),
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Core(Error::Parse { .. } | Error::TooDeep { .. }) | Failure::Io(_) => EXIT_PARSE,
        Failure::Core(Error::Disagreement(_)) => EXIT_DISAGREEMENT,
        Failure::Core(_) => EXIT_CONSTRAINT,
        Failure::Bound(_) => EXIT_BOUND,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || run(&cli))
        .expect("spawn solver thread")
        .join()
        .expect("solver thread panicked");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Core(e) => e.to_string(),
                Failure::Io(m) | Failure::Bound(m) => m.clone(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&f))
        }
    }
}
