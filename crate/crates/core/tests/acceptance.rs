mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use subiso_core::harness::{derive_seed, geometric_growth, run_bench, verify_matching_bounds, Algorithm, ExperimentConfig, Family};
use subiso_core::lcst::lcst;
use subiso_core::matching::{search_decision_tree_3x3, verify_decision_tree_3x3, DecisionTree3x3};
use subiso_core::ov::{
    build_bounded_instance, build_lcst_instance, build_simple_instance, index_gadget, logdepth_host_gadget,
    logdepth_pattern_gadget, ov_bruteforce, simple_host_gadget, simple_pattern_gadget, BitVector, OvInstance,
};
use subiso_core::subiso::{
    expected_cost_exact, expected_cost_exact_binary, rand_binary, rand_dary, rand_ternary, recurrence_constants,
    subiso_det, CostModel, RecurrenceMatrix,
};
use subiso_core::tree::{complete_dary, random_tree, Tree};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn las_vegas() -> Outcome {
    let reference = DecisionTree3x3::reference();
    let mut report = Vec::new();
    let mut pass = true;
    for d in [2usize, 3, 4] {
        let pairs: Vec<(Tree, Tree)> = (0..10_000u64)
            .into_par_iter()
            .map(|i| common::random_pair(d, 200, &mut common::rng(derive_seed(1, d as u64, i))))
            .collect();
        let check = |h: &Tree, g: &Tree, seed: u64| -> usize {
            let truth = subiso_det(h, g).contained;
            let mut wrong = 0;
            if d <= 2 && rand_binary(h, g, seed).unwrap().contained != truth {
                wrong += 1;
            }
            if d <= 3 && rand_ternary(h, g, seed, &reference).unwrap().contained != truth {
                wrong += 1;
            }
            if rand_dary(h, g, d, seed).unwrap().contained != truth {
                wrong += 1;
            }
            wrong
        };
        let single: usize = pairs.par_iter().enumerate().map(|(i, (h, g))| check(h, g, i as u64)).sum();
        let multi: usize = pairs[..100]
            .par_iter()
            .map(|(h, g)| (1000..1100u64).map(|s| check(h, g, s)).sum::<usize>())
            .sum();
        let yes = pairs.iter().filter(|(h, g)| subiso_det(h, g).contained).count();
        pass &= single == 0 && multi == 0;
        report.push(format!("d={d}: 10000 pairs ({yes} yes), 100x100 reseeded, {} disagreements", single + multi));
    }
    outcome(pass, report.join("; "))
}

fn reductions() -> Outcome {
    let instances: Vec<OvInstance> = (0..500u64)
        .map(|i| {
            let mut rng = common::rng(derive_seed(2, 0, i));
            let n = rng.gen_range(1..=16);
            let dim = rng.gen_range(1..=8);
            OvInstance::random(n, dim, rng.gen_range(0.2..0.8), rng.gen()).unwrap()
        })
        .collect();
    let yes = instances.iter().filter(|i| ov_bruteforce(i)).count();
    let count = |f: &(dyn Fn(&OvInstance) -> bool + Sync)| instances.par_iter().filter(|i| f(i) != ov_bruteforce(i)).count();
    let simple = count(&|i| {
        let (h, g) = build_simple_instance(i);
        subiso_det(&h, &g).contained
    });
    let mut shape_errors = 0;
    let mut bounded = [0usize; 2];
    for (k, d) in [2usize, 3].into_iter().enumerate() {
        bounded[k] = count(&|i| {
            let b = build_bounded_instance(i, d).unwrap();
            subiso_det(&b.h, &b.g).contained
        });
        shape_errors += instances
            .par_iter()
            .filter(|i| {
                let b = build_bounded_instance(i, d).unwrap();
                b.h.max_degree() > d
                    || b.g.max_degree() > d
                    || b.h.height() as usize > b.height_bound
                    || b.g.height() as usize > b.height_bound
            })
            .count();
    }
    let lcst_errors = count(&|i| build_lcst_instance(i, 2).unwrap().decide());
    let total = simple + bounded[0] + bounded[1] + lcst_errors + shape_errors;
    outcome(
        total == 0,
        format!(
            "500 instances ({yes} yes): simple {simple}, bounded d=2 {}, bounded d=3 {}, lcst d=2 {lcst_errors} mismatches; {shape_errors} degree/height violations",
            bounded[0], bounded[1]
        ),
    )
}

fn gadgets() -> Outcome {
    let vs: Vec<BitVector> = (0..16).map(|m| BitVector::from_mask(4, m)).collect();
    let mut simple = 0;
    let mut logdepth = 0;
    for a in &vs {
        for b in &vs {
            let want = a.orthogonal(b);
            simple += usize::from(subiso_det(&simple_pattern_gadget(a), &simple_host_gadget(b)).contained != want);
            logdepth += usize::from(subiso_det(&logdepth_pattern_gadget(a), &logdepth_host_gadget(b)).contained != want);
        }
    }
    let mut index = 0;
    for x in 0..8u32 {
        for y in 0..8u32 {
            let bits = |v: u32| (0..3).map(|i| v >> i & 1 == 1).collect::<Vec<_>>();
            let got = subiso_det(&index_gadget(&bits(x)).unwrap(), &index_gadget(&bits(y)).unwrap()).contained;
            index += usize::from(got != (x & !y == 0));
        }
    }
    outcome(
        simple + logdepth + index == 0,
        format!("D=4 simple {simple}/256, log-depth {logdepth}/256, index l=3 {index}/64 exceptions"),
    )
}

fn matching_bounds() -> Outcome {
    let m = verify_matching_bounds(3).unwrap();
    outcome(
        m.mixed_pass && m.nocase_pass,
        format!(
            "{} graphs: mixed worst {} <= {}; no-case worst {} <= {}; yes-case worst {} <= {}",
            m.graphs, m.worst_mixed, m.mixed_bound, m.worst_nocase, m.nocase_bound, m.worst_yescase, m.yescase_bound
        ),
    )
}

fn constants() -> Outcome {
    let c = recurrence_constants();
    let detail = c
        .checks()
        .iter()
        .take(4)
        .map(|(name, got, want, tol)| format!("{name} {got:.5} (want {want} +- {tol:e})"))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(c.all_pass(), detail)
}

fn exact_total(h: &Tree, model: &CostModel) -> f64 {
    expected_cost_exact(h, h, model).unwrap().total().to_f64().unwrap()
}

fn growth() -> Outcome {
    let mut pass = true;
    let mut report = Vec::new();
    let bound = |d: usize| {
        let c = recurrence_constants();
        match d {
            2 => c.binary_growth,
            _ => {
                let d = d as f64;
                d * d - d / 3.0 + 2.0 / 3.0
            }
        }
    };
    for (d, model) in [(2, CostModel::Binary), (3, CostModel::Dary(3)), (4, CostModel::Dary(4))] {
        let totals: Vec<f64> = (4..=11).map(|h| exact_total(&complete_dary(d, h).unwrap(), &model)).collect();
        let (ratio, _, _) = geometric_growth(&totals).unwrap();
        let limit = bound(d) * 1.05;
        pass &= ratio <= limit;
        report.push(format!("complete d={d} exact ratio {ratio:.4} <= {limit:.4}"));
    }

    let mut four_pow = 0;
    for (d, alg) in [(2, Algorithm::RandBinary), (3, Algorithm::RandDary), (4, Algorithm::RandDary)] {
        let mut cfg = ExperimentConfig::new(alg, Family::Random, d);
        cfg.heights = [4, 11];
        cfg.sizes = [1, 200];
        cfg.trials = 200;
        cfg.seed = 6;
        cfg.exact = true;
        let r = run_bench(&cfg).unwrap();
        let g = r.growth.unwrap();
        let limit = g.bound * g.tolerance;
        let exact = g.exact_ratio.unwrap();
        pass &= g.ratio <= limit && exact <= limit;
        four_pow += r.groups.iter().map(|x| x.four_pow_violations).sum::<usize>();
        report.push(format!("random d={d} ratio {:.4} (exact {exact:.4}) <= {limit:.4}", g.ratio));
    }

    let mut cfg = ExperimentConfig::new(Algorithm::RandBinary, Family::Complete, 2);
    cfg.heights = [4, 11];
    cfg.trials = 50;
    let r = run_bench(&cfg).unwrap();
    four_pow += r.groups.iter().map(|x| x.four_pow_violations).sum::<usize>();
    let g = r.growth.unwrap();
    pass &= g.pass && four_pow == 0;
    report.push(format!("complete d=2 sampled ratio {:.4}; 4^h violations {four_pow}", g.ratio));
    outcome(pass, report.join("; "))
}

fn exact_vs_monte_carlo() -> Outcome {
    const RUNS: u64 = 100_000;
    let pairs: Vec<(Tree, Tree)> = (0..100u64)
        .map(|i| {
            let mut rng = common::rng(derive_seed(7, 0, i));
            loop {
                let (h, g) = common::random_pair(2, 200, &mut rng);
                if h.len() * g.len() <= 100_000 {
                    break (h, g);
                }
            }
        })
        .collect();
    let results: Vec<(bool, bool, f64)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (h, g))| {
            let exact = expected_cost_exact_binary(h, g).unwrap();
            let (ey, en) = exact.to_f64();
            let (mut sy, mut sy2, mut sn, mut sn2) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..RUNS {
                let s = rand_binary(h, g, derive_seed(i as u64, 7, k)).unwrap().stats;
                let (y, n) = (s.yes_base_calls as f64, s.no_base_calls as f64);
                sy += y;
                sy2 += y * y;
                sn += n;
                sn2 += n * n;
            }
            let r = RUNS as f64;
            let within = |sum: f64, sq: f64, want: f64| {
                let mean = sum / r;
                let var = (sq / r - mean * mean).max(0.0) * r / (r - 1.0);
                let se = (var / r).sqrt();
                ((mean - want).abs() <= 3.0 * se + 1e-9, (mean - want).abs() / se.max(1e-300))
            };
            let (ok_y, zy) = within(sy, sy2, ey);
            let (ok_n, zn) = within(sn, sn2, en);
            let levels = (h.height().max(g.height()) + 1) as u32;
            let bounded = exact.dominated_by(&RecurrenceMatrix::binary().bound_after(levels));
            (ok_y && ok_n, bounded, if ok_y && ok_n { 0.0 } else { zy.max(zn) })
        })
        .collect();
    let outside: Vec<f64> = results.iter().filter(|r| !r.0).map(|r| r.2).collect();
    let unbounded = results.iter().filter(|r| !r.1).count();
    outcome(
        outside.is_empty() && unbounded == 0,
        format!(
            "100 pairs x {RUNS} runs: {} pairs outside 3 SE {:?}; {unbounded} above M^h(1,1)",
            outside.len(),
            outside.iter().map(|z| format!("{z:.2} SE")).collect::<Vec<_>>()
        ),
    )
}

fn lcst_checks() -> Outcome {
    let mut rng = common::rng(8);
    let mut wrong = 0;
    let mut self_wrong = 0;
    let mut over = 0;
    for _ in 0..1000 {
        let h = random_tree(rng.gen_range(1..=9), 3, 5, rng.gen()).unwrap();
        let g = random_tree(rng.gen_range(1..=9), 3, 5, rng.gen()).unwrap();
        let h = common::relabel(&h, &["a", "b"], &mut rng);
        let g = common::relabel(&g, &["a", "b"], &mut rng);
        let v = subiso_core::lcst::llcs(&h, &g);
        wrong += usize::from(v.size != common::llcs_bruteforce(&h, &g));
        over += usize::from(v.pair_calls > (h.len() * g.len()) as u64);
        let u = lcst(&h, &g);
        over += usize::from(u.pair_calls > (h.len() * g.len()) as u64);
    }
    for _ in 0..1000 {
        let t = random_tree(rng.gen_range(1..=200), 4, 12, rng.gen()).unwrap();
        let v = lcst(&t, &t);
        self_wrong += usize::from(v.size != t.len());
        over += usize::from(v.pair_calls > (t.len() * t.len()) as u64);
    }
    outcome(
        wrong + self_wrong + over == 0,
        format!("llcs vs brute force {wrong}/1000 wrong; lcst(T,T) {self_wrong}/1000 wrong; pair-count bound exceeded {over} times"),
    )
}

fn ternary_verifier() -> Outcome {
    let full = verify_decision_tree_3x3(&DecisionTree3x3::full_order()).unwrap();
    let full_ok = full.max_total_at_most(9);
    let searched = search_decision_tree_3x3(20, 9);
    let again = verify_decision_tree_3x3(&searched.tree).unwrap();
    let reverified = again.per_graph == searched.verification.per_graph && again.recurrence == searched.verification.recurrence;
    let reference = verify_decision_tree_3x3(&DecisionTree3x3::reference()).unwrap();
    let stretch = reference.meets_target_costs();
    outcome(
        full_ok && reverified,
        format!(
            "full-order max total {}; searched tree (budget 20) re-verified: {reverified}, spectral radius {:.4}; reference tree spectral radius {:.4}, target costs {}",
            full.max_total,
            searched.verification.spectral_radius(),
            reference.spectral_radius(),
            if stretch { "pass" } else { "attempted" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Las Vegas equivalence", las_vegas),
        ("reduction oracle equivalence", reductions),
        ("gadget exhaustive checks", gadgets),
        ("matching query bounds", matching_bounds),
        ("recurrence constants", constants),
        ("growth-rate upper bounds", growth),
        ("exact vs Monte Carlo", exact_vs_monte_carlo),
        ("largest common subtree", lcst_checks),
        ("ternary verifier", ternary_verifier),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "criterion {} {} {name} ({:.1}s): {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
