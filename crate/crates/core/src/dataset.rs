//! The network dataset document: nodes, pipes, reservoir, catalog and settings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hydraulics::HydraulicSettings;
use crate::network::{Network, Node, Pipe, PipeCatalog};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub nodes: Vec<Node>,
    pub pipes: Vec<Pipe>,
    pub reservoir: String,
    pub catalog: PipeCatalog,
    pub settings: HydraulicSettings,
}

impl Dataset {
    /// Parses a dataset. Syntax and schema errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn network(&self) -> Network {
        Network::new(self.nodes.clone(), self.pipes.clone(), self.reservoir.clone())
    }
}
