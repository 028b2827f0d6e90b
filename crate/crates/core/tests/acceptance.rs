//! Acceptance criteria for the Gurudeniya benchmark and the GA/oracle pair.
//!
//! `acceptance_criteria` runs criteria 1-7 and prints one PASS/FAIL line per
//! criterion. Criterion 8 (full enumeration of the 7^10 space) is opt-in:
//!
//! ```text
//! cargo test -p wdnopt --test acceptance -- --ignored --nocapture
//! ```

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use wdnopt::benchmark::{
    self, GA_DESIGN_MM, GA_PRINTED_COST, GA_PRINTED_GRADIENTS, GA_PRINTED_RESIDUALS,
    HBMO_DESIGN_MM, HBMO_PRINTED_COST, NWSDB_DESIGN_MM, NWSDB_PRINTED_COST,
};
use wdnopt::ga::operators::{crossover_genes, selection_probabilities};
use wdnopt::ga::{DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR};
use wdnopt::hydraulics::compute_flows;
use wdnopt::oracle::random_tree_instance;
use wdnopt::{
    brute_force, evaluate_fitness, friction_gradient, run_ga, GaConfig, GeneticAlgorithm,
    Problem, SearchMode,
};

const GRADIENT_TOLERANCE: f64 = 0.0005;
const HEAD_TOLERANCE: f64 = 0.5;
const GA_SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const SMALL_INSTANCES: usize = 50;
const SEEDS_PER_INSTANCE: u64 = 2;
const SMALL_GENERATIONS: usize = 500;
const ORACLE_HIT_RATE: f64 = 0.8;

struct Outcome {
    id: u8,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn gurudeniya() -> Problem {
    Problem::from_dataset(benchmark::gurudeniya()).unwrap()
}

fn cost_reproduction() -> Outcome {
    let p = gurudeniya();
    let designs = [GA_DESIGN_MM, HBMO_DESIGN_MM, NWSDB_DESIGN_MM].map(|mm| p.design_from_diameters(&mm).unwrap());
    let start = Instant::now();
    let costs: Vec<f64> = designs.iter().map(|d| p.design_cost(d).unwrap()).collect();
    let elapsed = start.elapsed();
    let passed = costs[0] == GA_PRINTED_COST
        && costs[1] == HBMO_PRINTED_COST
        && (costs[2] - 89_110.0).abs() <= 1.0
        && elapsed < Duration::from_millis(1);
    Outcome {
        id: 1,
        title: "cost reproduction",
        passed,
        detail: format!("GA {} HBMO {} NWS&DB {} in {elapsed:?}", costs[0], costs[1], costs[2]),
    }
}

fn point_formula() -> Outcome {
    let s = benchmark::gurudeniya().settings;
    let start = Instant::now();
    let g = friction_gradient(37.50, 50.8, &s).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        id: 2,
        title: "point formula",
        passed: format!("{g:.4}") == "0.0018",
        detail: format!("g_FF = {g:.6} m/m in {elapsed:?}"),
    }
}

fn feasibility_reproduction() -> Outcome {
    let p = gurudeniya();
    let r = p.simulate(&p.design_from_diameters(&GA_DESIGN_MM).unwrap()).unwrap();
    let all_yes = r.feasible()
        && r.pipe_gradient.iter().all(|&g| g <= 0.005)
        && r.node_residual.iter().skip(1).all(|&h| h >= 10.0);
    let gradient_misses: Vec<String> = GA_PRINTED_GRADIENTS
        .iter()
        .enumerate()
        .filter(|(i, printed)| (r.pipe_gradient[*i] - **printed).abs() > GRADIENT_TOLERANCE)
        .map(|(i, printed)| format!("P{} {:.4}/{printed}", i + 1, r.pipe_gradient[i]))
        .collect();
    let head_misses: Vec<String> = GA_PRINTED_RESIDUALS
        .iter()
        .enumerate()
        .filter(|(j, printed)| (r.node_residual[j + 1] - **printed).abs() > HEAD_TOLERANCE)
        .map(|(j, printed)| format!("N{} {:.4}/{printed}", j + 1, r.node_residual[j + 1]))
        .collect();
    Outcome {
        id: 3,
        title: "feasibility reproduction",
        passed: all_yes && gradient_misses.is_empty() && head_misses.is_empty(),
        detail: format!(
            "all constraints satisfied: {all_yes}; g_FF outside ±{GRADIENT_TOLERANCE}: [{}]; H_R outside ±{HEAD_TOLERANCE} m: [{}]",
            gradient_misses.join(", "),
            head_misses.join(", ")
        ),
    }
}

fn penalty_reproduction() -> Outcome {
    let p = gurudeniya();
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, mm) in [("NWS&DB", NWSDB_DESIGN_MM), ("HBMO", HBMO_DESIGN_MM), ("GA", GA_DESIGN_MM)] {
        let design = p.design_from_diameters(&mm).unwrap();
        let e = evaluate_fitness(&p, &design, DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR)
            .unwrap();
        passed &= e.nodal_penalty == 0.0 && e.pipe_penalty == 0.0;
        parts.push(format!("{name} NP={:.2} PP={:.2}", e.nodal_penalty, e.pipe_penalty));
    }
    Outcome {
        id: 4,
        title: "penalty reproduction",
        passed,
        detail: parts.join("; "),
    }
}

fn ga_statistics() -> Outcome {
    let p = gurudeniya();
    let runs: Vec<(f64, Duration)> = GA_SEEDS
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|seed| {
            let report = run_ga(&p, GaConfig::with_seed(seed)).unwrap();
            let cost = report.best_feasible.map_or(f64::INFINITY, |b| b.cost);
            (cost, report.elapsed)
        })
        .collect();
    let every_beats_implemented = runs.iter().all(|r| r.0 <= NWSDB_PRINTED_COST);
    let at_most_hbmo = runs.iter().filter(|r| r.0 <= HBMO_PRINTED_COST).count();
    let at_most_ga = runs.iter().filter(|r| r.0 <= GA_PRINTED_COST).count();
    let slowest = runs.iter().map(|r| r.1).max().unwrap();
    Outcome {
        id: 5,
        title: "GA statistical performance",
        passed: every_beats_implemented && at_most_hbmo >= 5 && at_most_ga >= 1 && slowest < Duration::from_secs(10),
        detail: format!(
            "best feasible costs {:?}; <=84520: {at_most_hbmo}/10; <=83650: {at_most_ga}/10; slowest run {slowest:?}",
            runs.iter().map(|r| r.0).collect::<Vec<_>>()
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut instances = Vec::new();
    let mut skipped = 0;
    while instances.len() < SMALL_INSTANCES {
        let pipes = rng.random_range(1..=5);
        let size = rng.random_range(2..=4);
        let p = random_tree_instance(&mut rng, pipes, size).unwrap();
        let oracle = brute_force(&p, 1024, SearchMode::Exhaustive).unwrap();
        match oracle.best_cost {
            Some(cost) => instances.push((p, cost)),
            None => skipped += 1,
        }
    }
    let results: Vec<(bool, bool, bool)> = instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (p, optimum))| {
            (0..SEEDS_PER_INSTANCE).map(move |s| {
                let config = GaConfig {
                    max_generations: SMALL_GENERATIONS,
                    ..GaConfig::with_seed(1000 * i as u64 + s)
                };
                let report = run_ga(p, config).unwrap();
                let best = report.best;
                let cheapest_feasible = report.best_feasible.is_some_and(|b| b.cost == *optimum);
                (best.feasible && best.cost == *optimum, best.feasible, cheapest_feasible)
            })
        })
        .collect();
    let hits = results.iter().filter(|r| r.0).count();
    let infeasible = results.iter().filter(|r| !r.1).count();
    let feasible_hits = results.iter().filter(|r| r.2).count();
    let rate = hits as f64 / results.len() as f64;
    Outcome {
        id: 6,
        title: "oracle equivalence on small instances",
        passed: rate >= ORACLE_HIT_RATE && infeasible == 0,
        detail: format!(
            "optimum returned in {hits}/{} runs ({:.1}%), infeasible bests {infeasible}, optimum among feasible designs seen in {feasible_hits}/{}, {skipped} instances without feasible designs skipped",
            results.len(),
            100.0 * rate,
            results.len()
        ),
    }
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);

    for _ in 0..200 {
        let pipes = rng.random_range(1..=15);
        let p = random_tree_instance(&mut rng, pipes, 3).unwrap();
        let net = p.network();
        let flows = compute_flows(net).unwrap();
        for node in net.nodes.iter().filter(|n| n.id != net.reservoir) {
            let inflow: f64 = net.pipes.iter().zip(&flows).filter(|(q, _)| q.to == node.id).map(|(_, f)| f).sum();
            let outflow: f64 = net.pipes.iter().zip(&flows).filter(|(q, _)| q.from == node.id).map(|(_, f)| f).sum();
            if (inflow - outflow - node.demand).abs() > 1e-9 * inflow.abs().max(1.0) {
                failures.push(format!("continuity at {}", node.id));
            }
        }
    }

    let s = benchmark::gurudeniya().settings;
    for _ in 0..10_000 {
        let q = rng.random_range(0.1..5000.0);
        let d = rng.random_range(10.0..600.0);
        let k: f64 = rng.random_range(1.01..10.0);
        let g = friction_gradient(q, d, &s).unwrap();
        let gq = friction_gradient(k * q, d, &s).unwrap();
        let gd = friction_gradient(q, k * d, &s).unwrap();
        if !(gq > g && gd < g) {
            failures.push(format!("monotonicity at q={q} d={d}"));
        }
        if ((gq - g * k.powf(1.85)) / gq).abs() > 1e-9 || ((gd - g * k.powf(-4.87)) / gd).abs() > 1e-9 {
            failures.push(format!("scaling at q={q} d={d} k={k}"));
        }
    }

    for _ in 0..10_000 {
        let len = rng.random_range(2..=12);
        let a: Vec<usize> = (0..len).map(|_| rng.random_range(0..7)).collect();
        let b: Vec<usize> = (0..len).map(|_| rng.random_range(0..7)).collect();
        let (x, y) = crossover_genes(&a, &b, 0.8, &mut rng).unwrap();
        if (0..len).any(|i| !((x[i], y[i]) == (a[i], b[i]) || (x[i], y[i]) == (b[i], a[i]))) {
            failures.push("crossover gene conservation".into());
        }
    }

    for _ in 0..1000 {
        let n = rng.random_range(1..=40);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..10.0)).collect();
        let c = rng.random_range(1e-3..1e3);
        let p = selection_probabilities(&f).unwrap();
        let scaled: Vec<f64> = f.iter().map(|x| x * c).collect();
        let q = selection_probabilities(&scaled).unwrap();
        if (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 || p.iter().zip(&q).any(|(a, b)| (a - b).abs() > 1e-12) {
            failures.push("selection probabilities".into());
        }
    }

    let g = gurudeniya();
    let config = GaConfig {
        max_generations: 300,
        ..GaConfig::with_seed(99)
    };
    let a = GeneticAlgorithm::new(&g, config.clone()).run().unwrap();
    let b = GeneticAlgorithm::new(&g, config.clone()).run().unwrap();
    let c = GeneticAlgorithm::new(&g, config).parallel(true).run().unwrap();
    if a.best != b.best || a.history != b.history || a.best != c.best || a.history != c.history {
        failures.push("fixed-seed reproducibility".into());
    }

    failures.dedup();
    Outcome {
        id: 7,
        title: "property suites",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "continuity, gradient laws, crossover conservation, selection, reproducibility".into()
        } else {
            failures.join("; ")
        },
    }
}

#[test]
fn acceptance_criteria() {
    let outcomes = [
        cost_reproduction(),
        point_formula(),
        feasibility_reproduction(),
        penalty_reproduction(),
        ga_statistics(),
        oracle_equivalence(),
        property_suites(),
    ];
    println!();
    for o in &outcomes {
        println!(
            "[{}] criterion {} ({}): {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
    }
    println!("[SKIP] criterion 8 (full enumeration): opt-in, run with --ignored");
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
#[ignore = "full 7^10 enumeration; run explicitly"]
fn criterion_8_full_enumeration() {
    let p = gurudeniya();
    let start = Instant::now();
    let result = brute_force(&p, u64::MAX, SearchMode::Pruned).unwrap();
    let best = result.best.expect("a feasible design exists");
    let cost = result.best_cost.unwrap();
    let optimal = cost == GA_PRINTED_COST;
    println!(
        "[{}] criterion 8 (full enumeration): optimum {cost} with {:?} mm; 83650 is {}globally optimal ({} complete designs reached after pruning, {:?})",
        if optimal { "PASS" } else { "FAIL" },
        best.diameters(p.catalog()),
        if optimal { "" } else { "not " },
        result.n_enumerated,
        start.elapsed()
    );
    assert!(cost <= GA_PRINTED_COST);
}
