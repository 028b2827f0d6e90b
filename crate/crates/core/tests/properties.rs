use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wdnopt::ga::operators::{crossover_genes, selection_probabilities};
use wdnopt::ga::{DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR};
use wdnopt::hydraulics::compute_flows;
use wdnopt::oracle::random_tree_instance;
use wdnopt::{benchmark, design_cost, evaluate_fitness, friction_gradient, DesignVector, Problem};

fn settings() -> wdnopt::HydraulicSettings {
    benchmark::gurudeniya().settings
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn instance(seed: u64, pipes: usize, catalog: usize) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_instance(&mut rng, pipes, catalog).unwrap()
}

proptest! {
    #[test]
    fn gradient_increases_with_flow(q in 0.1f64..5000.0, dq in 0.01f64..1000.0, d in 10.0f64..600.0) {
        let s = settings();
        prop_assert!(friction_gradient(q + dq, d, &s).unwrap() > friction_gradient(q, d, &s).unwrap());
    }

    #[test]
    fn gradient_decreases_with_diameter(q in 0.1f64..5000.0, d in 10.0f64..600.0, dd in 0.01f64..100.0) {
        let s = settings();
        prop_assert!(friction_gradient(q, d + dd, &s).unwrap() < friction_gradient(q, d, &s).unwrap());
    }

    #[test]
    fn gradient_scaling_laws(q in 0.1f64..5000.0, d in 10.0f64..600.0, k in 0.1f64..10.0) {
        let s = settings();
        let base = friction_gradient(q, d, &s).unwrap();
        let flow_scaled = friction_gradient(k * q, d, &s).unwrap();
        prop_assert!(rel(flow_scaled, base * k.powf(1.85)) < 1e-9);
        let diameter_scaled = friction_gradient(q, k * d, &s).unwrap();
        prop_assert!(rel(diameter_scaled, base * k.powf(-4.87)) < 1e-9);
    }

    #[test]
    fn continuity_holds_at_every_node(seed in any::<u64>(), pipes in 1usize..12) {
        let p = instance(seed, pipes, 3);
        let net = p.network();
        let flows = compute_flows(net).unwrap();
        for node in net.nodes.iter().filter(|n| n.id != net.reservoir) {
            let inflow: f64 = net.pipes.iter().zip(&flows).filter(|(q, _)| q.to == node.id).map(|(_, f)| f).sum();
            let outflow: f64 = net.pipes.iter().zip(&flows).filter(|(q, _)| q.from == node.id).map(|(_, f)| f).sum();
            prop_assert!((inflow - outflow - node.demand).abs() <= 1e-9 * inflow.abs().max(1.0));
        }
    }

    #[test]
    fn heads_never_rise_downstream(seed in any::<u64>(), pipes in 1usize..12, genes_seed in any::<u64>()) {
        let p = instance(seed, pipes, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(genes_seed);
        let design = random_design(&p, &mut rng);
        let r = p.simulate(&design).unwrap();
        let topo = p.topology();
        for pipe in 0..p.pipe_count() {
            prop_assert!(r.node_head[topo.pipe_to[pipe]] <= r.node_head[topo.pipe_from[pipe]]);
        }
        // Pure: identical inputs, bit-identical outputs.
        prop_assert_eq!(r, p.simulate(&design).unwrap());
    }

    #[test]
    fn cost_strictly_monotone_per_gene(seed in any::<u64>(), pipes in 1usize..10, genes_seed in any::<u64>()) {
        let p = instance(seed, pipes, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(genes_seed);
        let design = random_design(&p, &mut rng);
        let base = p.design_cost(&design).unwrap();
        for i in 0..design.len() {
            if design.genes()[i] + 1 < p.catalog().len() {
                let mut up = design.clone();
                up.genes_mut()[i] += 1;
                prop_assert!(p.design_cost(&up).unwrap() > base);
            }
        }
    }

    #[test]
    fn cost_ignores_pipe_storage_order(seed in any::<u64>(), pipes in 2usize..10, genes_seed in any::<u64>()) {
        let p = instance(seed, pipes, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(genes_seed);
        let design = random_design(&p, &mut rng);
        let mut net = p.network().clone();
        let mut genes = design.genes().to_vec();
        net.pipes.reverse();
        genes.reverse();
        let a = p.design_cost(&design).unwrap();
        let b = design_cost(&net, p.catalog(), &DesignVector::new(genes)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn crossover_conserves_genes_by_position(
        a in prop::collection::vec(0usize..7, 1..20),
        seed in any::<u64>(),
        pc in 0.0f64..=1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<usize> = a.iter().map(|g| (g * 3 + 1) % 7).collect();
        let (x, y) = crossover_genes(&a, &b, pc, &mut rng).unwrap();
        for i in 0..a.len() {
            let mut parents = [a[i], b[i]];
            let mut children = [x[i], y[i]];
            parents.sort_unstable();
            children.sort_unstable();
            prop_assert_eq!(parents, children);
        }
    }

    #[test]
    fn selection_probabilities_normalised_and_scale_free(
        f in prop::collection::vec(1e-6f64..1e3, 1..50),
        c in 1e-3f64..1e3,
    ) {
        let p = selection_probabilities(&f).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        let scaled: Vec<f64> = f.iter().map(|x| x * c).collect();
        let q = selection_probabilities(&scaled).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fitness_orders_like_penalized_cost(seed in any::<u64>(), g1 in any::<u64>(), g2 in any::<u64>()) {
        let p = instance(seed, 4, 4);
        let d1 = random_design(&p, &mut ChaCha8Rng::seed_from_u64(g1));
        let d2 = random_design(&p, &mut ChaCha8Rng::seed_from_u64(g2));
        let e1 = evaluate_fitness(&p, &d1, DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR).unwrap();
        let e2 = evaluate_fitness(&p, &d2, DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR).unwrap();
        prop_assert!(e1.fitness > 0.0);
        prop_assert_eq!(e1.feasible, e1.total_penalty() == 0.0);
        if e1.fitness > e2.fitness {
            prop_assert!(e1.penalized_cost() < e2.penalized_cost());
        }
        if e1.penalized_cost() < e2.penalized_cost() {
            prop_assert!(e1.fitness >= e2.fitness);
        }
    }
}

fn random_design(p: &Problem, rng: &mut ChaCha8Rng) -> DesignVector {
    use rand::Rng;
    (0..p.pipe_count())
        .map(|_| rng.random_range(0..p.catalog().len()))
        .collect::<Vec<_>>()
        .into()
}
