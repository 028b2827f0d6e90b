//! Human-readable constraint tables, machine-readable design reports and the
//! per-generation convergence log. Every emitted format has a parser.
//!
//! Gradients and residual heads print with 4 decimals and diameters with 1.
//! Costs and penalties print as integers when they are whole numbers,
//! otherwise with 2 decimals.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{evaluate_fitness, GaConfig, GenerationRecord, RunReport};
use crate::network::DesignVector;
use crate::oracle::{EnumerationResult, SearchMode};
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq)]
pub struct PipeRow {
    pub id: String,
    pub diameter_mm: f64,
    pub gradient: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRow {
    pub id: String,
    pub residual: f64,
    pub satisfied: bool,
}

/// Per-pipe gradient and per-node residual-head verdicts for one design,
/// with its cost and penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub gff_max: f64,
    pub hr_min: f64,
    pub pipes: Vec<PipeRow>,
    /// Demand nodes only.
    pub nodes: Vec<NodeRow>,
    pub total_cost: f64,
    pub nodal_penalty: f64,
    pub pipe_penalty: f64,
    pub total_penalty: f64,
    pub feasible: bool,
}

const PIPE_HEADER: &str = "Pipe\tDiameter (mm)\tg_FF (m/m)\tSatisfied";
const NODE_HEADER: &str = "Node\tH_R (m)\tSatisfied";

impl ConstraintReport {
    pub fn build(
        problem: &Problem,
        design: &DesignVector,
        nodal_penalty_factor: f64,
        pipe_penalty_factor: f64,
    ) -> Result<Self> {
        let result = problem.simulate(design)?;
        let scored = evaluate_fitness(problem, design, nodal_penalty_factor, pipe_penalty_factor)?;
        let network = problem.network();
        let reservoir = problem.topology().reservoir;
        let pipes = network
            .pipes
            .iter()
            .enumerate()
            .map(|(i, p)| PipeRow {
                id: p.id.clone(),
                diameter_mm: problem.catalog().diameter(design.genes()[i]),
                gradient: result.pipe_gradient[i],
                satisfied: result.pipe_feasible[i],
            })
            .collect();
        let nodes = network
            .nodes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != reservoir)
            .map(|(j, n)| NodeRow {
                id: n.id.clone(),
                residual: result.node_residual[j],
                satisfied: result.node_feasible[j],
            })
            .collect();
        Ok(Self {
            gff_max: problem.settings().gff_max,
            hr_min: problem.settings().hr_min,
            pipes,
            nodes,
            total_cost: scored.cost,
            nodal_penalty: scored.nodal_penalty,
            pipe_penalty: scored.pipe_penalty,
            total_penalty: scored.total_penalty(),
            feasible: scored.feasible,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Pipe constraints: g_FF <= {} m/m", self.gff_max);
        let _ = writeln!(out, "{PIPE_HEADER}");
        for row in &self.pipes {
            let _ = writeln!(
                out,
                "{}\t{:.1}\t{:.4}\t{}",
                row.id,
                row.diameter_mm,
                row.gradient,
                yes_no(row.satisfied)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Node constraints: H_R >= {} m", self.hr_min);
        let _ = writeln!(out, "{NODE_HEADER}");
        for row in &self.nodes {
            let _ = writeln!(out, "{}\t{:.4}\t{}", row.id, row.residual, yes_no(row.satisfied));
        }
        let _ = writeln!(out);
        write_totals(
            &mut out,
            self.total_cost,
            self.nodal_penalty,
            self.pipe_penalty,
            self.total_penalty,
        );
        let _ = writeln!(out, "Feasible\t{}", yes_no(self.feasible));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| {
            lines
                .by_ref()
                .find(|(_, l)| !l.trim().is_empty())
                .ok_or_else(|| Error::MalformedReport(format!("missing {what}")))
        };

        let (_, title) = next("pipe title")?;
        let gff_max = parse_limit(title, "Pipe constraints: g_FF <= ", " m/m")?;
        expect_line(next("pipe header")?, PIPE_HEADER)?;
        let mut pipes = Vec::new();
        let node_title = loop {
            let (n, line) = next("node section")?;
            if line.starts_with("Node constraints:") {
                break line;
            }
            let f = fields(n, line, 4)?;
            pipes.push(PipeRow {
                id: f[0].to_string(),
                diameter_mm: number(n, f[1])?,
                gradient: number(n, f[2])?,
                satisfied: parse_yes_no(n, f[3])?,
            });
        };
        let hr_min = parse_limit(node_title, "Node constraints: H_R >= ", " m")?;
        expect_line(next("node header")?, NODE_HEADER)?;
        let mut nodes = Vec::new();
        let first_total = loop {
            let (n, line) = next("totals")?;
            if line.starts_with("Total Cost\t") {
                break (n, line);
            }
            let f = fields(n, line, 3)?;
            nodes.push(NodeRow {
                id: f[0].to_string(),
                residual: number(n, f[1])?,
                satisfied: parse_yes_no(n, f[2])?,
            });
        };
        let total_cost = labelled(first_total, "Total Cost")?;
        let nodal_penalty = labelled(next("nodal penalty")?, "Nodal Penalty")?;
        let pipe_penalty = labelled(next("pipe penalty")?, "Pipe Penalty")?;
        let total_penalty = labelled(next("total penalty")?, "Total Penalty")?;
        let (n, line) = next("feasibility")?;
        let f = fields(n, line, 2)?;
        if f[0] != "Feasible" {
            return Err(Error::MalformedReport(format!("line {}: expected Feasible", n + 1)));
        }
        let feasible = parse_yes_no(n, f[1])?;

        Ok(Self {
            gff_max,
            hr_min,
            pipes,
            nodes,
            total_cost,
            nodal_penalty,
            pipe_penalty,
            total_penalty,
            feasible,
        })
    }
}

fn yes_no(ok: bool) -> &'static str {
    if ok {
        "Yes"
    } else {
        "No"
    }
}

/// Whole amounts print as integers, anything else with 2 decimals.
pub fn format_amount(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

fn write_totals(out: &mut String, cost: f64, nodal: f64, pipe: f64, total: f64) {
    let _ = writeln!(out, "Total Cost\t{}", format_amount(cost));
    let _ = writeln!(out, "Nodal Penalty\t{}", format_amount(nodal));
    let _ = writeln!(out, "Pipe Penalty\t{}", format_amount(pipe));
    let _ = writeln!(out, "Total Penalty\t{}", format_amount(total));
}

fn malformed(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::MalformedReport(format!("line {}: {msg}", line + 1))
}

fn fields(n: usize, line: &str, count: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != count {
        return Err(malformed(n, format!("expected {count} fields, got {}", f.len())));
    }
    Ok(f)
}

fn number(n: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| malformed(n, format!("not a number: {s:?}")))
}

fn parse_yes_no(n: usize, s: &str) -> Result<bool> {
    match s.trim() {
        "Yes" => Ok(true),
        "No" => Ok(false),
        other => Err(malformed(n, format!("expected Yes/No, got {other:?}"))),
    }
}

fn expect_line((n, line): (usize, &str), expected: &str) -> Result<()> {
    if line == expected {
        Ok(())
    } else {
        Err(malformed(n, format!("expected {expected:?}")))
    }
}

fn labelled((n, line): (usize, &str), label: &str) -> Result<f64> {
    let f = fields(n, line, 2)?;
    if f[0] != label {
        return Err(malformed(n, format!("expected {label}")));
    }
    number(n, f[1])
}

fn parse_limit(line: &str, prefix: &str, suffix: &str) -> Result<f64> {
    line.strip_prefix(prefix)
        .and_then(|s| s.strip_suffix(suffix))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedReport(format!("bad section title {line:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRow {
    pub pipe: String,
    pub diameter_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaSummary {
    pub config: GaConfig,
    pub generations: usize,
    pub best_fitness: f64,
    /// Cheapest feasible design seen; differs from the report's design when
    /// a slightly infeasible design won on penalized cost.
    pub best_feasible: Option<FeasibleDesign>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleDesign {
    pub pipes: Vec<DesignRow>,
    pub total_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub mode: SearchMode,
    pub space_size: u64,
    pub n_enumerated: u64,
    pub n_feasible: u64,
}

/// One design in the shape of a results table: diameter per pipe, total
/// cost and penalties. GA runs and enumerations share it so their outputs
/// diff cleanly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub method: String,
    /// Empty when an enumeration found nothing feasible.
    pub pipes: Vec<DesignRow>,
    pub total_cost: f64,
    pub nodal_penalty: f64,
    pub pipe_penalty: f64,
    pub total_penalty: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationSummary>,
}

pub const GA_METHOD: &str = "genetic-algorithm";
pub const BRUTE_FORCE_METHOD: &str = "brute-force";

impl DesignReport {
    fn rows(problem: &Problem, design: &DesignVector) -> Vec<DesignRow> {
        problem
            .network()
            .pipes
            .iter()
            .zip(design.genes())
            .map(|(p, &g)| DesignRow {
                pipe: p.id.clone(),
                diameter_mm: problem.catalog().diameter(g),
            })
            .collect()
    }

    pub fn from_run(problem: &Problem, run: &RunReport) -> Self {
        let best = &run.best;
        Self {
            method: GA_METHOD.into(),
            pipes: Self::rows(problem, &best.design),
            total_cost: best.cost,
            nodal_penalty: best.nodal_penalty,
            pipe_penalty: best.pipe_penalty,
            total_penalty: best.total_penalty(),
            feasible: best.feasible,
            ga: Some(GaSummary {
                config: run.config.clone(),
                generations: run.history.len(),
                best_fitness: best.fitness,
                best_feasible: run.best_feasible.as_ref().map(|b| FeasibleDesign {
                    pipes: Self::rows(problem, &b.design),
                    total_cost: b.cost,
                }),
            }),
            enumeration: None,
        }
    }

    pub fn from_enumeration(problem: &Problem, result: &EnumerationResult) -> Self {
        let summary = EnumerationSummary {
            mode: result.mode,
            space_size: result.space_size,
            n_enumerated: result.n_enumerated,
            n_feasible: result.n_feasible,
        };
        let (pipes, total_cost, feasible) = match (&result.best, result.best_cost) {
            (Some(d), Some(c)) => (Self::rows(problem, d), c, true),
            _ => (Vec::new(), 0.0, false),
        };
        Self {
            method: BRUTE_FORCE_METHOD.into(),
            pipes,
            total_cost,
            nodal_penalty: 0.0,
            pipe_penalty: 0.0,
            total_penalty: 0.0,
            feasible,
            ga: None,
            enumeration: Some(summary),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text table: one diameter row per pipe, then cost and penalties.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Pipe\tDiameter (mm)");
        for row in &self.pipes {
            let _ = writeln!(out, "{}\t{:.1}", row.pipe, row.diameter_mm);
        }
        write_totals(
            &mut out,
            self.total_cost,
            self.nodal_penalty,
            self.pipe_penalty,
            self.total_penalty,
        );
        out
    }
}

pub fn write_convergence_csv<W: Write>(history: &[GenerationRecord], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for record in history {
        csv.serialize(record)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_convergence_csv<R: Read>(reader: R) -> Result<Vec<GenerationRecord>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
