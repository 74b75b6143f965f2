//! Pipeline configuration file (TOML).
//!
//! Paths are resolved relative to the directory containing the config file.
//! The factor stage runs either from economic tables (`[factors.tables]`)
//! or from a precomputed factor-set file (`factors.precomputed`), in which
//! case the MRIO inputs are not needed at all.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use biovalent::characterization::ClimateCharacterization;
use biovalent::offsets::{AveragingConvention, OffsetScenario};
use biovalent::types::Ecosystem;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Base year of the impact factors; ledger years are deflated to it.
    pub base_year: i32,
    pub factors: FactorsConfig,
    #[serde(default)]
    pub climate: ClimateConfig,
    pub ledger: LedgerConfig,
    #[serde(default)]
    pub footprint: FootprintConfig,
    #[serde(default)]
    pub statement: StatementConfig,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default)]
    pub quadrant: QuadrantConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsConfig {
    /// Path of a previously exported factor set; skips the MRIO stage.
    pub precomputed: Option<PathBuf>,
    pub tables: Option<TableSet>,
    /// Second table set for source attribution when shares and intensities
    /// come from differently dated releases. Defaults to `tables`.
    pub attribution_tables: Option<TableSet>,
    pub concordance: Option<ConcordanceConfig>,
    #[serde(default)]
    pub aggregate_stressors: Vec<AggregationRule>,
    /// Year tag of the attribution tables, recorded as provenance.
    pub attribution_year: Option<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSet {
    pub flows: PathBuf,
    pub final_demand: PathBuf,
    pub gross_output: Option<PathBuf>,
    pub satellite: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcordanceConfig {
    pub regions: PathBuf,
    pub drivers: PathBuf,
    pub characterization: PathBuf,
    pub continents: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregationRule {
    /// Row-name selector; a trailing `*` makes it a prefix match.
    pub pattern: String,
    pub name: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClimateConfig {
    #[serde(default)]
    pub gwp: toml::Table,
    #[serde(default, rename = "gases")]
    pub gas_rows: Vec<GasRow>,
    #[serde(default, rename = "cf")]
    pub factors: Vec<ClimateCf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasRow {
    /// Satellite row name.
    pub stressor: String,
    /// Canonical gas key: co2, ch4, ...
    pub gas: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClimateCf {
    pub gas: String,
    /// terrestrial, freshwater, marine, or aquatic (= freshwater + marine).
    pub ecosystem: String,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerConfig {
    pub file: PathBuf,
    pub mapping: PathBuf,
    pub inflation: PathBuf,
    pub basic_prices: PathBuf,
    /// Fail on positions without factor coverage instead of flagging.
    #[serde(default)]
    pub strict_coverage: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FootprintConfig {
    /// Fixed category partition; when set, ledger categories must match it.
    pub categories: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatementConfig {
    #[serde(default)]
    pub revenue: Vec<FinancialLineConfig>,
    #[serde(default)]
    pub gains: Vec<FinancialLineConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinancialLineConfig {
    pub name: String,
    pub amount_eur: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub country: String,
    /// Impact factor of continued intensive use, BDe per m2.
    pub c0: f64,
    pub t_rec: f64,
    pub horizon_years: f64,
    pub land_price_eur_per_ha: f64,
    /// Carbon price per tonne in the pricing currency.
    pub carbon_price: f64,
    /// Currency units per pricing-currency unit.
    pub fx_rate: f64,
    #[serde(default = "default_averaging")]
    pub averaging: String,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    pub notes: Option<String>,
}

fn default_averaging() -> String {
    "continuous".to_string()
}

fn default_fraction() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn to_scenario(&self) -> Result<OffsetScenario<f64>> {
        let scenario = OffsetScenario {
            name: self.name.clone(),
            country: self.country.clone(),
            c0: self.c0,
            t_rec: self.t_rec,
            horizon: self.horizon_years,
            land_price: self.land_price_eur_per_ha,
            averaging: AveragingConvention::parse(&self.averaging)?,
            fraction: self.fraction,
            notes: self.notes.clone(),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrantConfig {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default = "default_iso_shares")]
    pub iso_shares: Vec<f64>,
    pub title: Option<String>,
}

fn default_kind() -> String {
    "bde".to_string()
}

fn default_iso_shares() -> Vec<f64> {
    vec![0.01, 0.05, 0.10]
}

impl Default for QuadrantConfig {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            iso_shares: default_iso_shares(),
            title: None,
        }
    }
}

/// A loaded config together with its base directory for path resolution.
pub struct LoadedConfig {
    pub config: Config,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let config: Config = toml::from_str(&text)
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    if config.factors.precomputed.is_none() {
        if config.factors.tables.is_none() {
            bail!("config needs either factors.precomputed or factors.tables");
        }
        if config.factors.concordance.is_none() {
            bail!("config needs factors.concordance to build factors from tables");
        }
    }
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(LoadedConfig { config, base_dir })
}

/// Build the climate characterization from config, expanding `aquatic`
/// entries to freshwater and marine unless those are set explicitly.
pub fn build_climate(config: &ClimateConfig) -> Result<ClimateCharacterization<f64>> {
    let mut climate = ClimateCharacterization::new();
    for (gas, value) in &config.gwp {
        let value = value
            .as_float()
            .or_else(|| value.as_integer().map(|v| v as f64))
            .with_context(|| format!("GWP of {gas:?} must be a number"))?;
        climate.set_gwp(gas.clone(), value)?;
    }
    // explicit per-ecosystem entries win over aquatic expansion
    let mut explicit: Vec<(String, Ecosystem)> = Vec::new();
    for cf in &config.factors {
        if !cf.ecosystem.trim().eq_ignore_ascii_case("aquatic") {
            let eco = Ecosystem::parse(&cf.ecosystem)?;
            climate.set_cf(cf.gas.clone(), eco, cf.value)?;
            explicit.push((cf.gas.clone(), eco));
        }
    }
    for cf in &config.factors {
        if cf.ecosystem.trim().eq_ignore_ascii_case("aquatic") {
            for eco in [Ecosystem::Freshwater, Ecosystem::Marine] {
                if !explicit.iter().any(|(g, e)| *g == cf.gas && *e == eco) {
                    climate.set_cf(cf.gas.clone(), eco, cf.value)?;
                }
            }
        }
    }
    Ok(climate)
}
