//! Steady-state hydraulics of a tree network.
//!
//! Flows follow from continuity alone, so a design only changes the loss
//! gradients and the heads. Demands are in m³/day and diameters in mm at the
//! interface; [`friction_gradient`] converts to m³/s and m internally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{DesignVector, Network, PipeCatalog, Topology};

/// Numerator constant of the SI Hazen-Williams gradient.
pub const HAZEN_WILLIAMS_CONSTANT: f64 = 10.666;
pub const FLOW_EXPONENT: f64 = 1.85;
pub const DIAMETER_EXPONENT: f64 = 4.87;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Absolute slack applied when comparing heads and gradients against their limits.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSettings", into = "RawSettings")]
pub struct HydraulicSettings {
    /// Hazen-Williams roughness coefficient.
    pub c_hw: f64,
    /// Fitting loss multiplier.
    pub c_ft: f64,
    /// Minimum residual head at demand nodes, m.
    pub hr_min: f64,
    /// Maximum friction-and-fitting loss gradient, m/m.
    pub gff_max: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSettings {
    c_hw: f64,
    c_ft: f64,
    hr_min_m: f64,
    gff_max_m_per_m: f64,
}

impl HydraulicSettings {
    pub fn new(c_hw: f64, c_ft: f64, hr_min: f64, gff_max: f64) -> Result<Self> {
        let fields = [
            ("c_hw", c_hw),
            ("c_ft", c_ft),
            ("hr_min", hr_min),
            ("gff_max", gff_max),
        ];
        if let Some((name, value)) = fields
            .iter()
            .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidSettings(format!(
                "{name} must be positive and finite, got {value}"
            )));
        }
        Ok(Self {
            c_hw,
            c_ft,
            hr_min,
            gff_max,
        })
    }
}

impl TryFrom<RawSettings> for HydraulicSettings {
    type Error = Error;

    fn try_from(raw: RawSettings) -> Result<Self> {
        Self::new(raw.c_hw, raw.c_ft, raw.hr_min_m, raw.gff_max_m_per_m)
    }
}

impl From<HydraulicSettings> for RawSettings {
    fn from(s: HydraulicSettings) -> Self {
        Self {
            c_hw: s.c_hw,
            c_ft: s.c_ft,
            hr_min_m: s.hr_min,
            gff_max_m_per_m: s.gff_max,
        }
    }
}

/// Friction-and-fitting loss gradient (m/m) of a pipe carrying `flow_m3_per_day`
/// through `diameter_mm`:
///
/// `g = c_ft · 10.666 · Q^1.85 / (c_hw^1.85 · d^4.87)` with Q in m³/s and d in m.
pub fn friction_gradient(
    flow_m3_per_day: f64,
    diameter_mm: f64,
    settings: &HydraulicSettings,
) -> Result<f64> {
    if !(flow_m3_per_day >= 0.0 && flow_m3_per_day.is_finite()) {
        return Err(Error::Domain(format!(
            "flow must be finite and non-negative, got {flow_m3_per_day}"
        )));
    }
    if !(diameter_mm > 0.0 && diameter_mm.is_finite()) {
        return Err(Error::Domain(format!(
            "diameter must be positive, got {diameter_mm}"
        )));
    }
    let q = flow_m3_per_day / SECONDS_PER_DAY;
    let d = diameter_mm / 1000.0;
    Ok(settings.c_ft * HAZEN_WILLIAMS_CONSTANT * q.powf(FLOW_EXPONENT)
        / (settings.c_hw.powf(FLOW_EXPONENT) * d.powf(DIAMETER_EXPONENT)))
}

/// Per-pipe flow (m³/day): the total demand of the subtree below each pipe.
pub fn compute_flows(network: &Network) -> Result<Vec<f64>> {
    let topology = network.topology()?;
    Ok(flows_on(network, &topology))
}

pub(crate) fn flows_on(network: &Network, topology: &Topology) -> Vec<f64> {
    let mut subtree: Vec<f64> = network.nodes.iter().map(|n| n.demand).collect();
    let mut flows = vec![0.0; network.pipe_count()];
    for &pipe in topology.order.iter().rev() {
        let to = topology.pipe_to[pipe];
        flows[pipe] = subtree[to];
        subtree[topology.pipe_from[pipe]] += subtree[to];
    }
    flows
}

/// Evaluation of one design on a tree network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydraulicResult {
    /// m³/day
    pub pipe_flow: Vec<f64>,
    /// m/m
    pub pipe_gradient: Vec<f64>,
    /// m
    pub pipe_headloss: Vec<f64>,
    /// Hydraulic grade line, m.
    pub node_head: Vec<f64>,
    /// Head above ground, m. Zero at the reservoir.
    pub node_residual: Vec<f64>,
    pub pipe_feasible: Vec<bool>,
    /// Always `true` at the reservoir, which carries no head constraint.
    pub node_feasible: Vec<bool>,
}

impl HydraulicResult {
    pub fn feasible(&self) -> bool {
        self.pipe_feasible.iter().all(|&ok| ok) && self.node_feasible.iter().all(|&ok| ok)
    }

    /// Σ max(hr_min − H_R, 0) over failing demand nodes, m.
    pub fn head_deficit(&self, settings: &HydraulicSettings) -> f64 {
        self.node_residual
            .iter()
            .zip(&self.node_feasible)
            .filter(|(_, &ok)| !ok)
            .fold(0.0, |acc, (&h, _)| acc + (settings.hr_min - h))
    }

    /// Σ max(g_FF − gff_max, 0) over failing pipes, m/m.
    pub fn gradient_excess(&self, settings: &HydraulicSettings) -> f64 {
        self.pipe_gradient
            .iter()
            .zip(&self.pipe_feasible)
            .filter(|(_, &ok)| !ok)
            .fold(0.0, |acc, (&g, _)| acc + (g - settings.gff_max))
    }
}

pub(crate) fn pipe_ok(gradient: f64, settings: &HydraulicSettings) -> bool {
    gradient <= settings.gff_max + FEASIBILITY_SLACK
}

pub(crate) fn node_ok(residual: f64, settings: &HydraulicSettings) -> bool {
    residual >= settings.hr_min - FEASIBILITY_SLACK
}

/// Evaluates `design` on `network`. The reservoir head equals its elevation.
pub fn simulate(
    network: &Network,
    catalog: &PipeCatalog,
    settings: &HydraulicSettings,
    design: &DesignVector,
) -> Result<HydraulicResult> {
    let topology = network.topology()?;
    let flows = flows_on(network, &topology);
    simulate_on(network, &topology, &flows, catalog, settings, design)
}

pub(crate) fn simulate_on(
    network: &Network,
    topology: &Topology,
    flows: &[f64],
    catalog: &PipeCatalog,
    settings: &HydraulicSettings,
    design: &DesignVector,
) -> Result<HydraulicResult> {
    design.check(network.pipe_count(), catalog)?;
    let n_pipes = network.pipe_count();
    let mut pipe_gradient = vec![0.0; n_pipes];
    let mut pipe_headloss = vec![0.0; n_pipes];
    let mut node_head = vec![0.0; network.nodes.len()];
    node_head[topology.reservoir] = network.nodes[topology.reservoir].elevation;

    for &pipe in &topology.order {
        let diameter = catalog.diameter(design.genes()[pipe]);
        let gradient = friction_gradient(flows[pipe], diameter, settings)?;
        let headloss = gradient * network.pipes[pipe].length;
        pipe_gradient[pipe] = gradient;
        pipe_headloss[pipe] = headloss;
        node_head[topology.pipe_to[pipe]] = node_head[topology.pipe_from[pipe]] - headloss;
    }

    let node_residual: Vec<f64> = node_head
        .iter()
        .zip(&network.nodes)
        .map(|(h, n)| h - n.elevation)
        .collect();
    let node_feasible = node_residual
        .iter()
        .enumerate()
        .map(|(j, &r)| j == topology.reservoir || node_ok(r, settings))
        .collect();
    let pipe_feasible = pipe_gradient.iter().map(|&g| pipe_ok(g, settings)).collect();

    Ok(HydraulicResult {
        pipe_flow: flows.to_vec(),
        pipe_gradient,
        pipe_headloss,
        node_head,
        node_residual,
        pipe_feasible,
        node_feasible,
    })
}

/// Traversal direction of a pipe within a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Loop runs from the pipe's start node to its end node.
    Along,
    Against,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Along => 1.0,
            Orientation::Against => -1.0,
        }
    }
}

/// A closed loop as an ordered list of (pipe index, orientation).
pub type Loop = Vec<(usize, Orientation)>;

/// Signed head-loss sum around each loop. Head losses are signed with the
/// flow direction (positive when flowing from a pipe's start to its end); a
/// balanced looped solution gives residuals near zero.
///
/// Panics if a loop references a pipe index outside `headloss`.
pub fn loop_balance_residuals(loops: &[Loop], headloss: &[f64]) -> Vec<f64> {
    loops
        .iter()
        .map(|l| {
            l.iter()
                .map(|&(pipe, orientation)| orientation.sign() * headloss[pipe])
                .sum()
        })
        .collect()
}

/// Fundamental loop basis of the undirected pipe graph: one loop per pipe
/// outside a breadth-first spanning forest. Trees yield no loops.
pub fn fundamental_loops(network: &Network) -> Vec<Loop> {
    let n = network.nodes.len();
    let ends: Vec<Option<(usize, usize)>> = network
        .pipes
        .iter()
        .map(|p| Some((network.node_index(&p.from)?, network.node_index(&p.to)?)))
        .collect();
    let mut adjacent = vec![Vec::new(); n];
    for (pipe, e) in ends.iter().enumerate() {
        if let Some((a, b)) = *e {
            adjacent[a].push((pipe, b));
            adjacent[b].push((pipe, a));
        }
    }

    // parent[node] = (pipe, parent node)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; network.pipes.len()];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(pipe, v) in &adjacent[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some((pipe, u));
                    in_tree[pipe] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let step = |node: usize| -> (usize, usize) { parent[node].expect("non-root has a parent") };
    let orient = |pipe: usize, from: usize| {
        if ends[pipe].map(|(a, _)| a) == Some(from) {
            Orientation::Along
        } else {
            Orientation::Against
        }
    };

    let mut loops = Vec::new();
    for (pipe, e) in ends.iter().enumerate() {
        let Some((a, b)) = *e else { continue };
        if in_tree[pipe] || a == b {
            continue;
        }
        // Loop: a -> b along the chord, then b up to the common ancestor, then down to a.
        let mut up_from_b = Vec::new();
        let mut down_to_a = Vec::new();
        let (mut x, mut y) = (b, a);
        while depth[x] > depth[y] {
            let (p, px) = step(x);
            up_from_b.push((p, orient(p, x)));
            x = px;
        }
        while depth[y] > depth[x] {
            let (p, py) = step(y);
            down_to_a.push((p, orient(p, py)));
            y = py;
        }
        while x != y {
            let (p, px) = step(x);
            up_from_b.push((p, orient(p, x)));
            x = px;
            let (q, qy) = step(y);
            down_to_a.push((q, orient(q, qy)));
            y = qy;
        }
        let mut l = vec![(pipe, Orientation::Along)];
        l.extend(up_from_b);
        l.extend(down_to_a.into_iter().rev());
        loops.push(l);
    }
    loops
}
