//! Network graph, pipe catalog and design vectors.
//!
//! A [`Network`] is plain data; [`validate_network`] reports every structural
//! problem at once and [`Network::topology`] turns a valid network into the
//! index-based [`Topology`] the hydraulic solver walks.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the demand balance, m³/day.
pub const DEMAND_BALANCE_TOLERANCE: f64 = 1e-6;

/// Relative tolerance used when matching a diameter against the catalog.
const DIAMETER_MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(rename = "elevation_m")]
    pub elevation: f64,
    /// m³/day; negative for the supply node.
    #[serde(rename = "demand_m3_per_day")]
    pub demand: f64,
}

impl Node {
    pub fn new(id: impl Into<String>, elevation: f64, demand: f64) -> Self {
        Self {
            id: id.into(),
            elevation,
            demand,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipe {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(rename = "length_m")]
    pub length: f64,
}

impl Pipe {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        length: f64,
    ) -> Self {
        Self {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub pipes: Vec<Pipe>,
    pub reservoir: String,
}

/// A violated structural invariant of a [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateNode(String),
    DuplicatePipe(String),
    MissingReservoir(String),
    ReservoirDemandPositive(String),
    ExtraSupplyNode(String),
    NonFiniteNode(String),
    NegativeElevation(String),
    NonPositiveLength(String),
    UnknownEndpoint { pipe: String, node: String },
    SelfLoop(String),
    ReservoirHasInflow(String),
    MultipleIncoming { node: String, count: usize },
    Unreachable(String),
    Cycle(Vec<String>),
    DemandImbalance(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            Violation::DuplicatePipe(id) => write!(f, "duplicate pipe id {id}"),
            Violation::MissingReservoir(id) => write!(f, "reservoir {id} is not a node"),
            Violation::ReservoirDemandPositive(id) => {
                write!(f, "reservoir {id} must not carry a positive demand")
            }
            Violation::ExtraSupplyNode(id) => {
                write!(f, "node {id} has negative demand but is not the reservoir")
            }
            Violation::NonFiniteNode(id) => write!(f, "node {id} has a non-finite value"),
            Violation::NegativeElevation(id) => write!(f, "node {id} has negative elevation"),
            Violation::NonPositiveLength(id) => write!(f, "pipe {id} has non-positive length"),
            Violation::UnknownEndpoint { pipe, node } => {
                write!(f, "pipe {pipe} references unknown node {node}")
            }
            Violation::SelfLoop(id) => write!(f, "pipe {id} starts and ends at the same node"),
            Violation::ReservoirHasInflow(id) => write!(f, "reservoir {id} has an incoming pipe"),
            Violation::MultipleIncoming { node, count } => {
                write!(f, "node {node} has {count} incoming pipes")
            }
            Violation::Unreachable(id) => write!(f, "node {id} is unreachable from the reservoir"),
            Violation::Cycle(ids) => write!(f, "cycle through nodes {}", ids.join(" -> ")),
            Violation::DemandImbalance(sum) => {
                write!(f, "demands sum to {sum} m3/day instead of 0")
            }
        }
    }
}

/// Index form of a valid tree network.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub reservoir: usize,
    pub pipe_from: Vec<usize>,
    pub pipe_to: Vec<usize>,
    /// Incoming pipe of each node; `None` only for the reservoir.
    pub incoming: Vec<Option<usize>>,
    /// Pipe indices ordered so that every pipe comes after the pipe feeding its start node.
    pub order: Vec<usize>,
}

impl Network {
    pub fn new(nodes: Vec<Node>, pipes: Vec<Pipe>, reservoir: impl Into<String>) -> Self {
        Self {
            nodes,
            pipes,
            reservoir: reservoir.into(),
        }
    }

    pub fn pipe_count(&self) -> usize {
        self.pipes.len()
    }

    /// Number of demand nodes (every node except the reservoir).
    pub fn demand_node_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn pipe_index(&self, id: &str) -> Option<usize> {
        self.pipes.iter().position(|p| p.id == id)
    }

    /// Validates the network and returns its index form.
    pub fn topology(&self) -> Result<Topology> {
        let violations = validate_network(self);
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }
        let index: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let reservoir = index[self.reservoir.as_str()];
        let pipe_from: Vec<usize> = self.pipes.iter().map(|p| index[p.from.as_str()]).collect();
        let pipe_to: Vec<usize> = self.pipes.iter().map(|p| index[p.to.as_str()]).collect();

        let mut incoming = vec![None; self.nodes.len()];
        let mut outgoing = vec![Vec::new(); self.nodes.len()];
        for (i, (&from, &to)) in pipe_from.iter().zip(&pipe_to).enumerate() {
            incoming[to] = Some(i);
            outgoing[from].push(i);
        }

        let mut order = Vec::with_capacity(self.pipes.len());
        let mut stack = vec![reservoir];
        while let Some(node) = stack.pop() {
            for &pipe in outgoing[node].iter().rev() {
                order.push(pipe);
                stack.push(pipe_to[pipe]);
            }
        }

        Ok(Topology {
            reservoir,
            pipe_from,
            pipe_to,
            incoming,
            order,
        })
    }
}

/// Lists every violated structural invariant; an empty list means the network
/// is a valid tree rooted at its reservoir with balanced demands.
pub fn validate_network(network: &Network) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, node) in network.nodes.iter().enumerate() {
        if index.insert(node.id.as_str(), i).is_some() {
            violations.push(Violation::DuplicateNode(node.id.clone()));
        }
        if !node.elevation.is_finite() || !node.demand.is_finite() {
            violations.push(Violation::NonFiniteNode(node.id.clone()));
        } else if node.elevation < 0.0 {
            violations.push(Violation::NegativeElevation(node.id.clone()));
        }
        if node.demand < 0.0 && node.id != network.reservoir {
            violations.push(Violation::ExtraSupplyNode(node.id.clone()));
        }
    }

    let reservoir = index.get(network.reservoir.as_str()).copied();
    match reservoir {
        None => violations.push(Violation::MissingReservoir(network.reservoir.clone())),
        Some(r) => {
            // Zero is allowed: an all-zero-demand network is still a valid tree.
            if network.nodes[r].demand > 0.0 {
                violations.push(Violation::ReservoirDemandPositive(
                    network.reservoir.clone(),
                ));
            }
        }
    }

    let mut pipe_ids = HashMap::new();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); network.nodes.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); network.nodes.len()];
    for (i, pipe) in network.pipes.iter().enumerate() {
        if pipe_ids.insert(pipe.id.as_str(), i).is_some() {
            violations.push(Violation::DuplicatePipe(pipe.id.clone()));
        }
        if !(pipe.length > 0.0 && pipe.length.is_finite()) {
            violations.push(Violation::NonPositiveLength(pipe.id.clone()));
        }
        let from = index.get(pipe.from.as_str()).copied();
        let to = index.get(pipe.to.as_str()).copied();
        for (end, id) in [(from, &pipe.from), (to, &pipe.to)] {
            if end.is_none() {
                violations.push(Violation::UnknownEndpoint {
                    pipe: pipe.id.clone(),
                    node: id.clone(),
                });
            }
        }
        if let (Some(from), Some(to)) = (from, to) {
            if from == to {
                violations.push(Violation::SelfLoop(pipe.id.clone()));
            } else {
                incoming[to].push(i);
                outgoing[from].push(to);
            }
        }
    }

    for (node, pipes) in incoming.iter().enumerate() {
        let id = &network.nodes[node].id;
        if Some(node) == reservoir {
            if !pipes.is_empty() {
                violations.push(Violation::ReservoirHasInflow(id.clone()));
            }
        } else if pipes.len() > 1 {
            violations.push(Violation::MultipleIncoming {
                node: id.clone(),
                count: pipes.len(),
            });
        }
    }

    if let Some(root) = reservoir {
        let mut reached = vec![false; network.nodes.len()];
        reached[root] = true;
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            for &next in &outgoing[node] {
                if !reached[next] {
                    reached[next] = true;
                    stack.push(next);
                }
            }
        }
        for (node, _) in reached.iter().enumerate().filter(|(_, r)| !**r) {
            violations.push(Violation::Unreachable(network.nodes[node].id.clone()));
        }
        violations.extend(find_cycles(network, &incoming, &reached));
    }

    let balance: f64 = network.nodes.iter().map(|n| n.demand).sum();
    if balance.abs() > DEMAND_BALANCE_TOLERANCE {
        violations.push(Violation::DemandImbalance(balance));
    }

    violations
}

/// Cycles among unreachable nodes, found by walking single parent links.
fn find_cycles(network: &Network, incoming: &[Vec<usize>], reached: &[bool]) -> Vec<Violation> {
    let parent = |node: usize| -> Option<usize> {
        let pipe = &network.pipes[*incoming[node].first()?];
        network.node_index(&pipe.from)
    };
    let mut state = vec![0u8; network.nodes.len()]; // 0 new, 1 on walk, 2 done
    let mut cycles = Vec::new();
    for start in 0..network.nodes.len() {
        if reached[start] || state[start] != 0 {
            continue;
        }
        let mut walk: Vec<usize> = Vec::new();
        let mut node = Some(start);
        while let Some(n) = node {
            if reached[n] || state[n] == 2 {
                break;
            }
            if state[n] == 1 {
                let pos = walk.iter().position(|&w| w == n).unwrap_or(0);
                cycles.push(Violation::Cycle(
                    walk[pos..]
                        .iter()
                        .map(|&i| network.nodes[i].id.clone())
                        .collect(),
                ));
                break;
            }
            state[n] = 1;
            walk.push(n);
            node = parent(n);
        }
        for n in walk {
            state[n] = 2;
        }
    }
    cycles
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub diameter_mm: f64,
    pub unit_cost: f64,
}

/// Commercially available diameters in ascending order with their unit costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CatalogEntry>", into = "Vec<CatalogEntry>")]
pub struct PipeCatalog {
    entries: Vec<CatalogEntry>,
}

impl PipeCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidCatalog(format!(
                "need at least 2 entries, got {}",
                entries.len()
            )));
        }
        for e in &entries {
            if !(e.diameter_mm > 0.0 && e.diameter_mm.is_finite())
                || !(e.unit_cost >= 0.0 && e.unit_cost.is_finite())
            {
                return Err(Error::InvalidCatalog(format!(
                    "entry {} mm at {} per m is out of range",
                    e.diameter_mm, e.unit_cost
                )));
            }
        }
        for pair in entries.windows(2) {
            if pair[1].diameter_mm <= pair[0].diameter_mm {
                return Err(Error::InvalidCatalog(
                    "diameters must be strictly increasing".into(),
                ));
            }
            if pair[1].unit_cost <= pair[0].unit_cost {
                return Err(Error::InvalidCatalog(
                    "unit costs must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(diameter_mm, unit_cost)| CatalogEntry {
                    diameter_mm,
                    unit_cost,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<&CatalogEntry> {
        self.entries.get(index)
    }

    pub fn diameter(&self, index: usize) -> f64 {
        self.entries[index].diameter_mm
    }

    pub fn unit_cost(&self, index: usize) -> f64 {
        self.entries[index].unit_cost
    }

    /// Catalog index of a diameter given in millimetres.
    pub fn index_of(&self, diameter_mm: f64) -> Option<usize> {
        self.entries.iter().position(|e| {
            (e.diameter_mm - diameter_mm).abs() <= DIAMETER_MATCH_TOLERANCE * e.diameter_mm
        })
    }
}

impl TryFrom<Vec<CatalogEntry>> for PipeCatalog {
    type Error = Error;

    fn try_from(entries: Vec<CatalogEntry>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<PipeCatalog> for Vec<CatalogEntry> {
    fn from(catalog: PipeCatalog) -> Self {
        catalog.entries
    }
}

/// One genome: a catalog index per pipe, in pipe order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(Vec<usize>);

impl DesignVector {
    pub fn new(genes: Vec<usize>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_genes(self) -> Vec<usize> {
        self.0
    }

    /// Maps diameters in millimetres onto catalog indices.
    pub fn from_diameters(catalog: &PipeCatalog, diameters_mm: &[f64]) -> Result<Self> {
        diameters_mm
            .iter()
            .map(|&d| {
                catalog
                    .index_of(d)
                    .ok_or_else(|| Error::InvalidDesign(format!("{d} mm is not in the catalog")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn diameters(&self, catalog: &PipeCatalog) -> Vec<f64> {
        self.0.iter().map(|&g| catalog.diameter(g)).collect()
    }

    pub fn check(&self, pipe_count: usize, catalog: &PipeCatalog) -> Result<()> {
        if self.0.len() != pipe_count {
            return Err(Error::InvalidDesign(format!(
                "expected {pipe_count} genes, got {}",
                self.0.len()
            )));
        }
        if let Some((pipe, gene)) = self
            .0
            .iter()
            .enumerate()
            .find(|(_, &g)| g >= catalog.len())
        {
            return Err(Error::InvalidDesign(format!(
                "gene {gene} of pipe {pipe} is outside a catalog of {} entries",
                catalog.len()
            )));
        }
        Ok(())
    }
}

impl From<Vec<usize>> for DesignVector {
    fn from(genes: Vec<usize>) -> Self {
        Self(genes)
    }
}

/// Σ unit_cost(dᵢ)·Lᵢ over all pipes.
pub fn design_cost(network: &Network, catalog: &PipeCatalog, design: &DesignVector) -> Result<f64> {
    design.check(network.pipe_count(), catalog)?;
    Ok(network
        .pipes
        .iter()
        .zip(design.genes())
        .fold(0.0, |acc, (pipe, &gene)| {
            acc + catalog.unit_cost(gene) * pipe.length
        }))
}
