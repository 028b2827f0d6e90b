//! The Gurudeniya Service Zone dataset and the three reference designs
//! (implemented, HBMO and GA), diameters in millimetres and pipe order P1..P10.

use crate::dataset::Dataset;

pub const GURUDENIYA_JSON: &str = include_str!("../../../data/gurudeniya.json");

pub const NWSDB_DESIGN_MM: [f64; 10] = [
    254.0, 203.2, 203.2, 152.4, 203.2, 101.6, 101.6, 76.2, 76.2, 76.2,
];
pub const HBMO_DESIGN_MM: [f64; 10] = [
    254.0, 203.2, 203.2, 203.2, 152.4, 101.6, 101.6, 76.2, 101.6, 50.8,
];
pub const GA_DESIGN_MM: [f64; 10] = [
    203.2, 203.2, 203.2, 203.2, 152.4, 152.4, 152.4, 152.4, 101.6, 50.8,
];

/// Printed total costs of the three reference designs.
pub const NWSDB_PRINTED_COST: f64 = 89_111.0;
pub const HBMO_PRINTED_COST: f64 = 84_520.0;
pub const GA_PRINTED_COST: f64 = 83_650.0;

/// Printed loss gradients (m/m) of the GA design, P1..P10.
pub const GA_PRINTED_GRADIENTS: [f64; 10] = [
    0.0042, 0.0019, 0.0016, 0.0013, 0.0042, 0.0025, 0.0018, 0.0010, 0.0024, 0.0018,
];

/// Printed residual heads (m) of the GA design, N1..N10.
pub const GA_PRINTED_RESIDUALS: [f64; 10] = [
    100.1171, 33.0224, 30.8328, 14.4703, 56.8433, 65.1481, 69.3995, 59.1601, 82.4587, 62.6765,
];

pub fn gurudeniya() -> Dataset {
    Dataset::from_json(GURUDENIYA_JSON).expect("bundled dataset parses")
}
