//! Consumption-based biodiversity and carbon footprint accounting.
//!
//! The crate derives country-resolved biodiversity and carbon impact factors
//! per unit of consumption from multi-regional input-output tables
//! ([`mrio`], [`characterization`], [`factors`]), harmonizes organizational
//! ledgers onto them ([`ledger`]), computes footprints and the biodiversity
//! equivalent ([`footprint`]), prices offsets ([`offsets`]) and assembles the
//! impact statement and the quadrant figure ([`statement`], [`quadrant`]).
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root pin `f64`, which is what the strict CSV layer in
//! [`io`] produces and consumes.

pub mod characterization;
pub mod error;
pub mod factors;
pub mod footprint;
pub mod index;
pub mod io;
pub mod ledger;
pub mod linalg;
pub mod mrio;
pub mod num;
pub mod offsets;
pub mod quadrant;
pub mod statement;
pub mod types;

pub use error::{Error, Result};
pub use index::RegionSectorIndex;
pub use num::Scalar;
pub use types::{ByEcosystem, Ecosystem};

/// Default scalar for the I/O layer and the CLI.
pub type Real = f64;

pub type Matrix = linalg::Matrix<Real>;
pub type EconomicCore = mrio::EconomicCore<Real>;
pub type SatelliteTable = mrio::SatelliteTable<Real>;
pub type AttributionTensor = mrio::AttributionTensor<Real>;
pub type IntensityTable = mrio::IntensityTable<Real>;
pub type CharacterizationTable = characterization::CharacterizationTable<Real>;
pub type ClimateCharacterization = characterization::ClimateCharacterization<Real>;
pub type DriverConcordance = characterization::DriverConcordance<Real>;
pub type ImpactFactorSet = characterization::ImpactFactorSet<Real>;
pub type Ledger = ledger::Ledger<Real>;
pub type AccountMapping = ledger::AccountMapping<Real>;
pub type InflationTable = ledger::InflationTable<Real>;
pub type BasicPriceInputs = ledger::BasicPriceInputs<Real>;
pub type MappedLedger = ledger::MappedLedger<Real>;
pub type LineFootprint = footprint::LineFootprint<Real>;
pub type CategoryFootprint = footprint::CategoryFootprint<Real>;
pub type BdeQuantity = footprint::BdeQuantity<Real>;
pub type OffsetScenario = offsets::OffsetScenario<Real>;
pub type OffsetQuote = offsets::OffsetQuote<Real>;
pub type CarbonOffsetQuote = offsets::CarbonOffsetQuote<Real>;
pub type ImpactStatement = statement::ImpactStatement<Real>;
pub type QuadrantAnalysis = quadrant::QuadrantAnalysis<Real>;
