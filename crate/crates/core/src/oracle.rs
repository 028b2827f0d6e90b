//! Ground truth for the GA: enumeration of the whole design space and
//! single-gene neighbourhood audits.
//!
//! Enumeration visits designs in ascending lexicographic order of their gene
//! vectors and keeps the first design of minimal cost. [`SearchMode::Pruned`]
//! is a depth-first branch and bound that returns the same design as the
//! plain scan. It cuts a subtree when either
//!
//! - the prefix cost plus the cheapest completion cannot beat the incumbent, or
//! - a pipe or node whose path from the reservoir is fully assigned already
//!   violates its constraint (heads only fall downstream, so no completion
//!   can repair it).

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydraulics::{friction_gradient, node_ok, pipe_ok, HydraulicSettings};
use crate::network::{DesignVector, Network, Node, Pipe, PipeCatalog};
use crate::problem::Problem;

/// Default enumeration limit.
pub const DEFAULT_MAX_COMBINATIONS: u64 = 10_000_000;

/// Relative margin before the cost bound prunes; near-ties are always examined.
const BOUND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Simulate every design.
    Exhaustive,
    /// Branch and bound, partitioned over the first gene.
    Pruned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    /// Cheapest feasible design; `None` when no design is feasible.
    pub best: Option<DesignVector>,
    pub best_cost: Option<f64>,
    pub space_size: u64,
    /// Complete designs examined (in pruned mode, only those that survived pruning).
    pub n_enumerated: u64,
    /// Feasible designs among those examined.
    pub n_feasible: u64,
    pub mode: SearchMode,
}

/// Finds the cheapest feasible design by enumeration. Refuses spaces larger
/// than `max_combinations`.
pub fn brute_force(
    problem: &Problem,
    max_combinations: u64,
    mode: SearchMode,
) -> Result<EnumerationResult> {
    let space_size = match problem.search_space_size() {
        Some(size) if size <= u128::from(max_combinations) => size as u64,
        size => {
            return Err(Error::SearchSpaceTooLarge {
                size: size.map_or_else(
                    || format!("{}^{}", problem.catalog().len(), problem.pipe_count()),
                    |s| s.to_string(),
                ),
                limit: max_combinations,
            })
        }
    };
    match mode {
        SearchMode::Exhaustive => exhaustive(problem, space_size),
        SearchMode::Pruned => pruned(problem, space_size),
    }
}

fn exhaustive(problem: &Problem, space_size: u64) -> Result<EnumerationResult> {
    let m = problem.catalog().len();
    let mut genes = vec![0usize; problem.pipe_count()];
    let mut best: Option<(f64, DesignVector)> = None;
    let mut n_feasible = 0;
    for _ in 0..space_size {
        let design = DesignVector::new(genes.clone());
        if problem.simulate(&design)?.feasible() {
            n_feasible += 1;
            let cost = problem.design_cost(&design)?;
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, design));
            }
        }
        // Odometer with the last gene varying fastest.
        for g in genes.iter_mut().rev() {
            *g += 1;
            if *g < m {
                break;
            }
            *g = 0;
        }
    }
    Ok(EnumerationResult {
        best_cost: best.as_ref().map(|(c, _)| *c),
        best: best.map(|(_, d)| d),
        space_size,
        n_enumerated: space_size,
        n_feasible,
        mode: SearchMode::Exhaustive,
    })
}

/// Design-independent tables for the branch and bound.
struct SearchTables {
    n_pipes: usize,
    n_values: usize,
    /// [pipe][value]
    cost: Vec<Vec<f64>>,
    headloss: Vec<Vec<f64>>,
    gradient_ok: Vec<Vec<bool>>,
    /// Cheapest cost of pipes `k..`.
    min_tail: Vec<f64>,
    /// Pipes whose path from the reservoir becomes fully assigned at depth k,
    /// parents first.
    resolve: Vec<Vec<usize>>,
    pipe_from: Vec<usize>,
    pipe_to: Vec<usize>,
    elevation: Vec<f64>,
    reservoir: usize,
    settings: HydraulicSettings,
}

impl SearchTables {
    fn new(problem: &Problem) -> Result<Self> {
        let network = problem.network();
        let catalog = problem.catalog();
        let settings = *problem.settings();
        let topology = problem.topology();
        let n_pipes = network.pipe_count();
        let n_values = catalog.len();

        let mut cost = Vec::with_capacity(n_pipes);
        let mut headloss = Vec::with_capacity(n_pipes);
        let mut gradient_ok = Vec::with_capacity(n_pipes);
        for (pipe, flow) in network.pipes.iter().zip(problem.flows()) {
            let mut c = Vec::with_capacity(n_values);
            let mut h = Vec::with_capacity(n_values);
            let mut ok = Vec::with_capacity(n_values);
            for k in 0..n_values {
                let g = friction_gradient(*flow, catalog.diameter(k), &settings)?;
                c.push(catalog.unit_cost(k) * pipe.length);
                h.push(g * pipe.length);
                ok.push(pipe_ok(g, &settings));
            }
            cost.push(c);
            headloss.push(h);
            gradient_ok.push(ok);
        }

        let mut min_tail = vec![0.0; n_pipes + 1];
        for k in (0..n_pipes).rev() {
            let cheapest = cost[k].iter().copied().fold(f64::INFINITY, f64::min);
            min_tail[k] = min_tail[k + 1] + cheapest;
        }

        let mut path_max = vec![0usize; n_pipes];
        let mut resolve = vec![Vec::new(); n_pipes];
        for &pipe in &topology.order {
            let upstream = topology.incoming[topology.pipe_from[pipe]].map(|p| path_max[p]);
            path_max[pipe] = upstream.map_or(pipe, |u| u.max(pipe));
            resolve[path_max[pipe]].push(pipe);
        }

        Ok(Self {
            n_pipes,
            n_values,
            cost,
            headloss,
            gradient_ok,
            min_tail,
            resolve,
            pipe_from: topology.pipe_from.clone(),
            pipe_to: topology.pipe_to.clone(),
            elevation: network.nodes.iter().map(|n| n.elevation).collect(),
            reservoir: topology.reservoir,
            settings,
        })
    }
}

#[derive(Default)]
struct Incumbent {
    best: Option<(f64, Vec<usize>)>,
    n_enumerated: u64,
    n_feasible: u64,
}

impl Incumbent {
    fn bound(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(f64::INFINITY, |(c, _)| c + BOUND_MARGIN * c.abs().max(1.0))
    }
}

struct Search<'t> {
    tables: &'t SearchTables,
    genes: Vec<usize>,
    heads: Vec<f64>,
    found: Incumbent,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, prefix: f64, values: std::ops::Range<usize>) {
        let t = self.tables;
        if depth == t.n_pipes {
            self.found.n_enumerated += 1;
            self.found.n_feasible += 1;
            if self.found.best.as_ref().is_none_or(|(c, _)| prefix < *c) {
                self.found.best = Some((prefix, self.genes.clone()));
            }
            return;
        }
        for v in values {
            let cost = prefix + t.cost[depth][v];
            // Unit costs increase with the index, so every later value is cut too.
            if cost + t.min_tail[depth + 1] > self.found.bound() {
                break;
            }
            self.genes[depth] = v;
            if self.resolve_ok(depth) {
                self.descend(depth + 1, cost, 0..t.n_values);
            }
        }
    }

    fn resolve_ok(&mut self, depth: usize) -> bool {
        let t = self.tables;
        for &pipe in &t.resolve[depth] {
            let gene = self.genes[pipe];
            if !t.gradient_ok[pipe][gene] {
                return false;
            }
            let to = t.pipe_to[pipe];
            self.heads[to] = self.heads[t.pipe_from[pipe]] - t.headloss[pipe][gene];
            if !node_ok(self.heads[to] - t.elevation[to], &t.settings) {
                return false;
            }
        }
        true
    }
}

fn pruned(problem: &Problem, space_size: u64) -> Result<EnumerationResult> {
    let tables = SearchTables::new(problem)?;
    let run = |values: std::ops::Range<usize>| {
        let mut heads = vec![0.0; tables.elevation.len()];
        heads[tables.reservoir] = tables.elevation[tables.reservoir];
        let mut search = Search {
            tables: &tables,
            genes: vec![0; tables.n_pipes],
            heads,
            found: Incumbent::default(),
        };
        search.descend(0, 0.0, values);
        search.found
    };

    let partitions: Vec<Incumbent> = if tables.n_pipes == 0 {
        vec![run(0..0)]
    } else {
        (0..tables.n_values)
            .into_par_iter()
            .map(|v| run(v..v + 1))
            .collect()
    };

    // Partitions are in leading-gene order, so keeping the first strict
    // minimum preserves the lexicographic tie-break.
    let mut total = Incumbent::default();
    for part in partitions {
        total.n_enumerated += part.n_enumerated;
        total.n_feasible += part.n_feasible;
        if let Some((cost, genes)) = part.best {
            if total.best.as_ref().is_none_or(|(c, _)| cost < *c) {
                total.best = Some((cost, genes));
            }
        }
    }
    Ok(EnumerationResult {
        best_cost: total.best.as_ref().map(|(c, _)| *c),
        best: total.best.map(|(_, g)| DesignVector::new(g)),
        space_size,
        n_enumerated: total.n_enumerated,
        n_feasible: total.n_feasible,
        mode: SearchMode::Pruned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub design: DesignVector,
    pub pipe: usize,
    pub catalog_index: usize,
    pub cost: f64,
    pub feasible: bool,
    /// Feasible and strictly cheaper than the audited design.
    pub improves: bool,
}

/// Evaluates every single-gene substitution of `design`, pipe by pipe and in
/// catalog order within a pipe.
pub fn neighborhood_audit(problem: &Problem, design: &DesignVector) -> Result<Vec<Neighbor>> {
    let base_cost = problem.design_cost(design)?;
    let mut neighbors = Vec::with_capacity(design.len() * (problem.catalog().len() - 1));
    for pipe in 0..design.len() {
        for k in (0..problem.catalog().len()).filter(|&k| k != design.genes()[pipe]) {
            let mut genes = design.genes().to_vec();
            genes[pipe] = k;
            let neighbor = DesignVector::new(genes);
            let cost = problem.design_cost(&neighbor)?;
            let feasible = problem.simulate(&neighbor)?.feasible();
            neighbors.push(Neighbor {
                design: neighbor,
                pipe,
                catalog_index: k,
                cost,
                feasible,
                improves: feasible && cost < base_cost,
            });
        }
    }
    Ok(neighbors)
}

/// Commercial diameters (mm) and unit costs the random instances draw from.
const COMMERCIAL_SIZES: [(f64, f64); 7] = [
    (25.4, 2.0),
    (50.8, 5.0),
    (76.2, 8.0),
    (101.6, 11.0),
    (152.4, 16.0),
    (203.2, 23.0),
    (254.0, 32.0),
];

/// A random tree instance with `n_pipes` pipes and a catalog of
/// `catalog_size` commercial sizes (2 ≤ `catalog_size` ≤ 7).
pub fn random_tree_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n_pipes: usize,
    catalog_size: usize,
) -> Result<Problem> {
    if !(2..=COMMERCIAL_SIZES.len()).contains(&catalog_size) {
        return Err(Error::InvalidCatalog(format!(
            "random catalogs hold 2..=7 entries, got {catalog_size}"
        )));
    }
    let reservoir_elevation = 100.0;
    let mut nodes = vec![Node::new("N0", reservoir_elevation, 0.0)];
    let mut pipes = Vec::with_capacity(n_pipes);
    for i in 1..=n_pipes {
        let demand = (rng.random_range(20.0..400.0_f64) * 100.0).round() / 100.0;
        let drop = rng.random_range(15.0..70.0_f64).round();
        nodes.push(Node::new(format!("N{i}"), reservoir_elevation - drop, demand));
        let parent = rng.random_range(0..i);
        let length = rng.random_range(100..=1000) as f64;
        pipes.push(Pipe::new(format!("P{i}"), format!("N{parent}"), format!("N{i}"), length));
    }
    nodes[0].demand = -nodes[1..].iter().map(|n| n.demand).sum::<f64>();

    let mut picks = sample(rng, COMMERCIAL_SIZES.len(), catalog_size).into_vec();
    picks.sort_unstable();
    let catalog =
        PipeCatalog::from_pairs(&picks.iter().map(|&i| COMMERCIAL_SIZES[i]).collect::<Vec<_>>())?;
    let settings = HydraulicSettings::new(130.0, 1.15, 10.0, 0.01)?;
    Problem::new(Network::new(nodes, pipes, "N0"), catalog, settings)
}
