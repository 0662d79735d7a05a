//! Data pricing for IoT services: quality curves fitted from training
//! data, standalone and bundled pricing, and profit sharing between
//! cooperating providers.

pub mod bundle;
pub mod coalition;
pub mod error;
pub mod numfmt;
pub mod numopt;
pub mod quality;
pub mod simulate;
pub mod standalone;

pub use bundle::{
    optimize, optimize_report, BundleMarket, BundleReport, BundleSolution, CaseOutcome, DemandCase, Infeasibility,
    ServiceOffer,
};
pub use coalition::{
    build_game, core_interval_2p, core_membership, shapley, CharacteristicFunction, CoreInterval, PayoffAllocation,
};
pub use error::{Error, Result};
pub use quality::{fit, AccuracySample, FitReport, QualityCurve};
pub use simulate::{mc_bundle_demand, mc_standalone_demand, Estimate, SimulationConfig};
pub use standalone::{StandaloneMarket, StandaloneSolution};
