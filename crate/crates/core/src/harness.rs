//! Benchmark orchestration: instance families, parallel seeded trials,
//! aggregation and growth-ratio fitting.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lcst::lcst;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::matching::{
    exact_expected_queries_mixed, exact_expected_queries_nocase, exact_expected_queries_yescase,
    has_perfect_matching, Adjacency, DecisionTree3x3,
};
use crate::ov::{build_bounded_instance, build_lcst_instance, build_simple_instance, ov_bruteforce, OvInstance};
use crate::subiso::{
    expected_cost_exact, rand_binary, rand_dary, rand_ternary, recurrence_constants, subiso_det, CostModel, RunStats,
};
use crate::tree::{capacity, complete_dary, parse_tree, random_tree, Tree};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SUBISO_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Det,
    RandBinary,
    RandTernary,
    RandDary,
    Lcst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Independent random pattern and host of bounded degree and height.
    Random,
    /// Pattern and host both the complete tree of the group's height.
    Complete,
    OvSimple,
    OvBounded,
    OvLcst,
    /// A fixed pair read from `pattern` and `host`.
    File,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn default_dim() -> usize {
    8
}

fn default_tolerance() -> f64 {
    1.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub family: Family,
    /// Degree bound of generated trees and of `rand-dary`.
    pub degree: usize,
    /// Inclusive height range; one group per height (random and complete).
    pub heights: [usize; 2],
    /// Inclusive size range of random trees, or of `N` for the OV families.
    pub sizes: [usize; 2],
    /// Vector dimension of the OV families.
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Also compute exact expected base calls per instance.
    #[serde(default)]
    pub exact: bool,
    /// Decision tree for `rand-ternary`; the built-in reference tree if absent.
    #[serde(default)]
    pub decision_tree: Option<String>,
    #[serde(default)]
    pub pattern: Option<PathBuf>,
    #[serde(default)]
    pub host: Option<PathBuf>,
    /// Growth ratios pass when at most `bound * tolerance`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, family: Family, degree: usize) -> Self {
        ExperimentConfig {
            algorithm,
            family,
            degree,
            heights: [4, 11],
            sizes: [1, 200],
            dim: default_dim(),
            trials: 10,
            seed: 0,
            exact: false,
            decision_tree: None,
            pattern: None,
            host: None,
            tolerance: default_tolerance(),
            out: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.trials == 0 {
            return bad("trial count must be at least 1".into());
        }
        if self.heights[0] > self.heights[1] || self.sizes[0] > self.sizes[1] {
            return bad("ranges must be non-empty (min <= max)".into());
        }
        if self.degree == 0 {
            return bad("degree must be at least 1".into());
        }
        let is_ov = matches!(self.family, Family::OvSimple | Family::OvBounded | Family::OvLcst);
        if is_ov && (self.sizes[0] == 0 || self.dim == 0) {
            return bad("OV families need N >= 1 and dim >= 1".into());
        }
        if matches!(self.family, Family::OvBounded | Family::OvLcst) && self.degree < 2 {
            return bad("bounded and LCST constructions need degree >= 2".into());
        }
        if self.family == Family::OvLcst && self.algorithm != Algorithm::Lcst {
            return bad("the ov-lcst family is decided by the lcst algorithm".into());
        }
        if self.family == Family::File && (self.pattern.is_none() || self.host.is_none()) {
            return bad("the file family needs pattern and host paths".into());
        }
        if self.tolerance < 1.0 {
            return bad("tolerance must be at least 1".into());
        }
        if self.exact && matches!(self.algorithm, Algorithm::Det | Algorithm::Lcst) {
            return bad("exact mode applies to the randomized solvers only".into());
        }
        if self.exact && self.algorithm == Algorithm::RandDary && self.degree > 4 {
            return bad("exact mode supports rand-dary with degree <= 4".into());
        }
        self.decision_tree()?;
        Ok(())
    }

    fn decision_tree(&self) -> Result<DecisionTree3x3> {
        let t = match &self.decision_tree {
            Some(s) => s.parse()?,
            None => DecisionTree3x3::reference(),
        };
        t.check_consistent()?;
        Ok(t)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn cost_model(&self) -> Option<CostModel> {
        match self.algorithm {
            Algorithm::RandBinary => Some(CostModel::Binary),
            Algorithm::RandTernary => Some(CostModel::Ternary(self.decision_tree().ok()?)),
            Algorithm::RandDary => Some(CostModel::Dary(self.degree)),
            _ => None,
        }
    }

    /// Per-level growth bound of the chosen solver and its source.
    pub fn growth_bound(&self) -> Option<(f64, String)> {
        let c = recurrence_constants();
        match self.algorithm {
            Algorithm::RandBinary => Some((c.binary_growth, "(17+sqrt(33))/8".into())),
            Algorithm::RandTernary => Some((c.ternary_growth, "(281+sqrt(25185))/72".into())),
            Algorithm::RandDary => {
                let d = self.degree as f64;
                Some((d * d - d / 3.0 + 2.0 / 3.0, format!("d^2-d/3+2/3 at d={}", self.degree)))
            }
            _ => None,
        }
    }
}

/// Mixes three words into a seed (splitmix64 finalizer).
pub fn derive_seed(base: u64, group: u64, trial: u64) -> u64 {
    let mut z = base
        .wrapping_add(group.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(trial.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(0x94d0_49bb_1331_11eb);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Summary::default();
        }
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary { mean, stddev: var.sqrt() }
    }
}

/// One trial's flat record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub group: usize,
    pub trial: usize,
    pub seed: u64,
    pub answer: bool,
    pub yes_base_calls: u64,
    pub no_base_calls: u64,
    pub edge_queries: u64,
    pub h_size: usize,
    pub g_size: usize,
    pub height: i64,
    pub elapsed_ns: u64,
    /// Exact expected total base calls of this instance, in exact mode.
    pub exact_total: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupReport {
    /// Height for the random and complete families, `N` range start for OV.
    pub key: usize,
    pub trials: usize,
    pub yes_base_calls: Summary,
    pub no_base_calls: Summary,
    pub total_base_calls: Summary,
    pub edge_queries: Summary,
    pub wall_ns: Summary,
    pub max_total_base_calls: u64,
    /// Mean of the exact expected totals, in exact mode.
    pub exact_mean_total: Option<f64>,
    /// Trials whose base calls exceeded `4^(height+1)` (binary solver only).
    pub four_pow_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    /// Geometric mean of successive per-height ratios of mean total base calls.
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The same fit applied to the exact expectations, in exact mode.
    pub exact_ratio: Option<f64>,
    pub bound: f64,
    pub bound_source: String,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub groups: Vec<GroupReport>,
    pub growth: Option<GrowthFit>,
    pub pass: bool,
}

/// Geometric mean of successive ratios with a normal 95% interval over the
/// log ratios. Needs at least two positive values.
pub fn geometric_growth(means: &[f64]) -> Option<(f64, f64, f64)> {
    if means.len() < 2 || means.iter().any(|&m| m <= 0.0) {
        return None;
    }
    let logs: Vec<f64> = means.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let s = Summary::of(&logs);
    let half = 1.96 * s.stddev / (logs.len() as f64).sqrt();
    Some((s.mean.exp(), (s.mean - half).exp(), (s.mean + half).exp()))
}

struct Instance {
    h: Tree,
    g: Tree,
    /// Ground truth when it is cheaper than running the deterministic solver.
    expected: Option<bool>,
    lcst_threshold: Vec<(Tree, Tree, usize)>,
}

fn group_keys(cfg: &ExperimentConfig) -> Vec<usize> {
    match cfg.family {
        Family::Random | Family::Complete => (cfg.heights[0]..=cfg.heights[1]).collect(),
        _ => vec![cfg.sizes[0]],
    }
}

fn random_ov(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<OvInstance> {
    let n = rng.gen_range(cfg.sizes[0]..=cfg.sizes[1]);
    let density = rng.gen_range(0.2..0.8);
    OvInstance::random(n, cfg.dim, density, rng.gen())
}

fn make_instance(cfg: &ExperimentConfig, key: usize, seed: u64, file: &Option<(Tree, Tree)>) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plain = |h, g| Instance {
        h,
        g,
        expected: None,
        lcst_threshold: Vec::new(),
    };
    let d = cfg.degree;
    Ok(match cfg.family {
        Family::Complete => {
            let t = complete_dary(d, key)?;
            Instance {
                expected: Some(true),
                ..plain(t.clone(), t)
            }
        }
        Family::Random => {
            let cap = capacity(d, key).min(usize::MAX as u64) as usize;
            let lo = cfg.sizes[0].clamp(1, cap);
            let hi = cfg.sizes[1].clamp(lo, cap);
            let h = random_tree(rng.gen_range(lo..=hi), d, key, rng.gen())?;
            let g = random_tree(rng.gen_range(lo..=hi), d, key, rng.gen())?;
            plain(h, g)
        }
        Family::OvSimple => {
            let inst = random_ov(cfg, &mut rng)?;
            let (h, g) = build_simple_instance(&inst);
            Instance {
                expected: Some(ov_bruteforce(&inst)),
                ..plain(h, g)
            }
        }
        Family::OvBounded => {
            let inst = random_ov(cfg, &mut rng)?;
            let b = build_bounded_instance(&inst, d)?;
            Instance {
                expected: Some(ov_bruteforce(&inst)),
                ..plain(b.h, b.g)
            }
        }
        Family::OvLcst => {
            let inst = random_ov(cfg, &mut rng)?;
            let bundle = build_lcst_instance(&inst, d)?;
            Instance {
                h: Tree::empty(),
                g: Tree::empty(),
                expected: Some(ov_bruteforce(&inst)),
                lcst_threshold: bundle.triples.into_iter().map(|t| (t.h, t.g, t.threshold)).collect(),
            }
        }
        Family::File => {
            let (h, g) = file.clone().expect("file family loads trees");
            plain(h, g)
        }
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    t3: &DecisionTree3x3,
    file: &Option<(Tree, Tree)>,
    group: usize,
    key: usize,
    trial: usize,
) -> Result<TrialRecord> {
    let seed = derive_seed(cfg.seed, group as u64, trial as u64);
    let inst = make_instance(cfg, key, derive_seed(seed, u64::MAX, 0), file)?;
    let start = Instant::now();
    let (answer, stats) = if cfg.family == Family::OvLcst {
        let mut queries = 0;
        let mut answer = false;
        for (h, g, threshold) in &inst.lcst_threshold {
            let v = lcst(h, g);
            queries += v.pair_calls;
            answer |= v.size >= *threshold;
        }
        (answer, RunStats { edge_queries: queries, seed, ..RunStats::default() })
    } else {
        let (h, g) = (&inst.h, &inst.g);
        match cfg.algorithm {
            Algorithm::Det => {
                let a = subiso_det(h, g);
                (a.contained, a.stats)
            }
            Algorithm::Lcst => {
                let v = lcst(h, g);
                (v.size == h.len(), RunStats { edge_queries: v.pair_calls, seed, ..RunStats::default() })
            }
            Algorithm::RandBinary => {
                let a = rand_binary(h, g, seed)?;
                (a.contained, a.stats)
            }
            Algorithm::RandTernary => {
                let a = rand_ternary(h, g, seed, t3)?;
                (a.contained, a.stats)
            }
            Algorithm::RandDary => {
                let a = rand_dary(h, g, cfg.degree, seed)?;
                (a.contained, a.stats)
            }
        }
    };
    let elapsed_ns = start.elapsed().as_nanos() as u64;

    let truth = match inst.expected {
        Some(t) => t,
        None if cfg.algorithm == Algorithm::Det => answer,
        None => subiso_det(&inst.h, &inst.g).contained,
    };
    if truth != answer {
        return Err(Error::Disagreement(format!(
            "group {group}, trial {trial}, seed {seed}: solver said {answer}, expected {truth}"
        )));
    }
    let exact_total = match (cfg.exact, cfg.cost_model()) {
        (true, Some(model)) => Some(expected_cost_exact(&inst.h, &inst.g, &model)?.to_f64()).map(|(y, n)| y + n),
        _ => None,
    };
    Ok(TrialRecord {
        group,
        trial,
        seed,
        answer,
        yes_base_calls: stats.yes_base_calls,
        no_base_calls: stats.no_base_calls,
        edge_queries: stats.edge_queries,
        h_size: inst.h.len(),
        g_size: inst.g.len(),
        height: inst.h.height().max(inst.g.height()),
        elapsed_ns,
        exact_total,
    })
}

fn load_tree(path: &PathBuf) -> Result<Tree> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_tree(&text)
}

/// A rayon pool capped by [`THREADS_ENV`], with stacks deep enough for the
/// recursive solvers.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new().stack_size(256 << 20);
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

/// Runs every trial and returns the records in `(group, trial)` order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let t3 = cfg.decision_tree()?;
    let file = match cfg.family {
        Family::File => Some((
            load_tree(cfg.pattern.as_ref().expect("validated"))?,
            load_tree(cfg.host.as_ref().expect("validated"))?,
        )),
        _ => None,
    };
    let jobs: Vec<(usize, usize, usize)> = group_keys(cfg)
        .into_iter()
        .enumerate()
        .flat_map(|(g, key)| (0..cfg.trials).map(move |t| (g, key, t)))
        .collect();
    thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(g, key, t)| run_trial(cfg, &t3, &file, g, key, t))
            .collect()
    })
}

/// Aggregates trial records into a report.
pub fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> BenchReport {
    let keys = group_keys(cfg);
    let groups: Vec<GroupReport> = keys
        .iter()
        .enumerate()
        .map(|(gi, &key)| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.group == gi).collect();
            let col = |f: &dyn Fn(&TrialRecord) -> f64| Summary::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let exact: Vec<f64> = rs.iter().filter_map(|r| r.exact_total).collect();
            let four_pow_violations = if cfg.algorithm == Algorithm::RandBinary {
                rs.iter()
                    .filter(|r| (r.yes_base_calls + r.no_base_calls) as f64 > 4f64.powi(r.height as i32 + 1))
                    .count()
            } else {
                0
            };
            GroupReport {
                key,
                trials: rs.len(),
                yes_base_calls: col(&|r| r.yes_base_calls as f64),
                no_base_calls: col(&|r| r.no_base_calls as f64),
                total_base_calls: col(&|r| (r.yes_base_calls + r.no_base_calls) as f64),
                edge_queries: col(&|r| r.edge_queries as f64),
                wall_ns: col(&|r| r.elapsed_ns as f64),
                max_total_base_calls: rs.iter().map(|r| r.yes_base_calls + r.no_base_calls).max().unwrap_or(0),
                exact_mean_total: (!exact.is_empty()).then(|| Summary::of(&exact).mean),
                four_pow_violations,
            }
        })
        .collect();

    let growth = match (cfg.family, cfg.growth_bound()) {
        (Family::Random | Family::Complete, Some((bound, bound_source))) => {
            let means: Vec<f64> = groups.iter().map(|g| g.total_base_calls.mean).collect();
            geometric_growth(&means).map(|(ratio, ci_low, ci_high)| {
                let exact_ratio = groups
                    .iter()
                    .map(|g| g.exact_mean_total)
                    .collect::<Option<Vec<f64>>>()
                    .and_then(|m| geometric_growth(&m))
                    .map(|r| r.0);
                let limit = bound * cfg.tolerance;
                GrowthFit {
                    ratio,
                    ci_low,
                    ci_high,
                    exact_ratio,
                    bound,
                    bound_source,
                    tolerance: cfg.tolerance,
                    pass: exact_ratio.unwrap_or(ratio) <= limit,
                }
            })
        }
        _ => None,
    };
    let pass = growth.as_ref().map_or(true, |g| g.pass) && groups.iter().all(|g| g.four_pow_violations == 0);
    BenchReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        groups,
        growth,
        pass,
    }
}

pub fn run_bench(cfg: &ExperimentConfig) -> Result<BenchReport> {
    let records = run_trials(cfg)?;
    Ok(summarize(cfg, &records))
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per group; nested fields flattened.
    pub fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct Row {
            key: usize,
            trials: usize,
            yes_mean: f64,
            yes_stddev: f64,
            no_mean: f64,
            no_stddev: f64,
            total_mean: f64,
            total_stddev: f64,
            edge_queries_mean: f64,
            wall_ns_mean: f64,
            max_total: u64,
            exact_mean_total: Option<f64>,
            four_pow_violations: usize,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for g in &self.groups {
            w.serialize(Row {
                key: g.key,
                trials: g.trials,
                yes_mean: g.yes_base_calls.mean,
                yes_stddev: g.yes_base_calls.stddev,
                no_mean: g.no_base_calls.mean,
                no_stddev: g.no_base_calls.stddev,
                total_mean: g.total_base_calls.mean,
                total_stddev: g.total_base_calls.stddev,
                edge_queries_mean: g.edge_queries.mean,
                wall_ns_mean: g.wall_ns.mean,
                max_total: g.max_total_base_calls,
                exact_mean_total: g.exact_mean_total,
                four_pow_violations: g.four_pow_violations,
            })
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Worst exact expected query counts of the matching protocols over every
/// `d x d` graph, against their bounds.
#[derive(Clone, Debug, Serialize)]
pub struct MatchingBounds {
    pub d: usize,
    pub graphs: usize,
    /// Over all graphs; bound `d^2 - d/3 + 2/3`.
    pub worst_mixed: String,
    pub mixed_bound: String,
    /// Over graphs without a perfect matching; bound `d^2 - d/2 + 1`.
    pub worst_nocase: String,
    pub nocase_bound: String,
    /// Over graphs with a perfect matching; bound `d^2 - d + 2`.
    pub worst_yescase: String,
    pub yescase_bound: String,
    pub mixed_pass: bool,
    pub nocase_pass: bool,
    pub yescase_pass: bool,
    pub pass: bool,
}

/// Exhaustive check for `1 <= d <= 3`.
pub fn verify_matching_bounds(d: usize) -> Result<MatchingBounds> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("exhaustive matching bounds support 1 <= d <= 3, got {d}")));
    }
    let q = |n: i64, den: i64| BigRational::new(n.into(), den.into());
    let dd = d as i64;
    let mixed_bound = q(3 * dd * dd - dd + 2, 3);
    let nocase_bound = q(2 * dd * dd - dd + 2, 2);
    let yescase_bound = q(dd * dd - dd + 2, 1);
    let graphs: Vec<Adjacency> = (0..1u64 << (d * d)).map(|m| Adjacency::from_mask(d, m)).collect();
    let rows: Vec<(BigRational, Option<BigRational>, Option<BigRational>)> = graphs
        .par_iter()
        .map(|a| -> Result<_> {
            let pm = has_perfect_matching(a);
            Ok((
                exact_expected_queries_mixed(a)?,
                (!pm).then(|| exact_expected_queries_nocase(a)).transpose()?,
                pm.then(|| exact_expected_queries_yescase(a)).transpose()?,
            ))
        })
        .collect::<Result<_>>()?;
    let zero = || q(0, 1);
    let worst_mixed = rows.iter().map(|r| r.0.clone()).max().unwrap_or_else(zero);
    let worst_nocase = rows.iter().filter_map(|r| r.1.clone()).max().unwrap_or_else(zero);
    let worst_yescase = rows.iter().filter_map(|r| r.2.clone()).max().unwrap_or_else(zero);
    let mixed_pass = worst_mixed <= mixed_bound;
    let nocase_pass = worst_nocase <= nocase_bound;
    let yescase_pass = worst_yescase <= yescase_bound;
    let show = |r: &BigRational| format!("{r} ({:.4})", r.to_f64().unwrap_or(f64::NAN));
    Ok(MatchingBounds {
        d,
        graphs: graphs.len(),
        worst_mixed: show(&worst_mixed),
        mixed_bound: show(&mixed_bound),
        worst_nocase: show(&worst_nocase),
        nocase_bound: show(&nocase_bound),
        worst_yescase: show(&worst_yescase),
        yescase_bound: show(&yescase_bound),
        mixed_pass,
        nocase_pass,
        yescase_pass,
        pass: mixed_pass && nocase_pass && yescase_pass,
    })
}
