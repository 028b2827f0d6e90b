use crate::dataset::Dataset;
use crate::error::Result;
use crate::hydraulics::{self, HydraulicResult, HydraulicSettings};
use crate::network::{self, DesignVector, Network, PipeCatalog, Topology};

/// A validated network with its catalog and settings, plus the
/// design-independent data (topology, flows) every evaluation reuses.
#[derive(Debug, Clone)]
pub struct Problem {
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    topology: Topology,
    flows: Vec<f64>,
}

impl Problem {
    pub fn new(network: Network, catalog: PipeCatalog, settings: HydraulicSettings) -> Result<Self> {
        let topology = network.topology()?;
        let flows = hydraulics::flows_on(&network, &topology);
        Ok(Self {
            network,
            catalog,
            settings,
            topology,
            flows,
        })
    }

    pub fn from_dataset(dataset: Dataset) -> Result<Self> {
        let network = dataset.network();
        Self::new(network, dataset.catalog, dataset.settings)
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn catalog(&self) -> &PipeCatalog {
        &self.catalog
    }

    pub fn settings(&self) -> &HydraulicSettings {
        &self.settings
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Per-pipe flow, m³/day.
    pub fn flows(&self) -> &[f64] {
        &self.flows
    }

    pub fn pipe_count(&self) -> usize {
        self.network.pipe_count()
    }

    pub fn design_from_diameters(&self, diameters_mm: &[f64]) -> Result<DesignVector> {
        let design = DesignVector::from_diameters(&self.catalog, diameters_mm)?;
        design.check(self.pipe_count(), &self.catalog)?;
        Ok(design)
    }

    pub fn design_cost(&self, design: &DesignVector) -> Result<f64> {
        network::design_cost(&self.network, &self.catalog, design)
    }

    pub fn simulate(&self, design: &DesignVector) -> Result<HydraulicResult> {
        hydraulics::simulate_on(
            &self.network,
            &self.topology,
            &self.flows,
            &self.catalog,
            &self.settings,
            design,
        )
    }

    /// Number of distinct designs, `None` if it overflows `u128`.
    pub fn search_space_size(&self) -> Option<u128> {
        (self.catalog.len() as u128).checked_pow(u32::try_from(self.pipe_count()).ok()?)
    }
}
