//! Least-cost sizing of gravity-fed, tree-shaped water distribution networks.
//!
//! The crate is organised around a [`Problem`]: a validated [`Network`], the
//! commercially available [`PipeCatalog`] and the [`HydraulicSettings`] that
//! define the design constraints. A candidate design is a [`DesignVector`], one
//! catalog index per pipe.
//!
//! - [`hydraulics`] evaluates a design: flows by continuity, loss gradients by
//!   the Hazen-Williams relation with a fitting-loss multiplier, residual heads
//!   and constraint verdicts.
//! - [`ga`] searches the design space with a penalty-based genetic algorithm
//!   (roulette reproduction, single-point crossover, per-gene mutation).
//! - [`oracle`] provides exhaustive and branch-and-bound enumeration plus a
//!   single-gene neighbourhood audit, used as ground truth for the GA.
//! - [`report`] renders constraint tables, design reports and convergence logs,
//!   and parses them back.
//!
//! ```
//! use wdnopt::{benchmark, Problem};
//!
//! let dataset = benchmark::gurudeniya();
//! let problem = Problem::from_dataset(dataset).unwrap();
//! let design = problem.design_from_diameters(&benchmark::GA_DESIGN_MM).unwrap();
//! assert_eq!(problem.design_cost(&design).unwrap(), 83_650.0);
//! assert!(problem.simulate(&design).unwrap().feasible());
//! ```

pub mod benchmark;
pub mod dataset;
mod error;
pub mod ga;
pub mod hydraulics;
pub mod network;
pub mod oracle;
mod problem;
pub mod report;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use ga::{
    evaluate_fitness, run_ga, EvaluatedIndividual, GaConfig, GenerationRecord, GeneticAlgorithm,
    RunReport,
};
pub use hydraulics::{friction_gradient, HydraulicResult, HydraulicSettings};
pub use network::{
    design_cost, validate_network, CatalogEntry, DesignVector, Network, Node, Pipe, PipeCatalog,
    Violation,
};
pub use oracle::{brute_force, neighborhood_audit, EnumerationResult, Neighbor, SearchMode};
pub use problem::Problem;
