//! Conversion of attributed driver quantities into biodiversity impact
//! factors per unit of consumption.
//!
//! The chain per stressor is: normalize the attribution into per-column
//! shares, split each impact region's share equally over its characterization
//! countries, multiply by the monetary intensity to locate the driver
//! quantity per euro, then apply country/ecosystem characterization factors.
//! Climate gases skip the spatial chain and are characterized globally from
//! the CO2-equivalent intensity.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::index::RegionSectorIndex;
use crate::linalg::Matrix;
use crate::mrio::{AttributionTensor, IntensityTable};
use crate::num::Scalar;
use crate::types::{ByEcosystem, Ecosystem};

/// Canonical gas key for carbon dioxide in climate tables.
pub const GAS_CO2: &str = "co2";

// ---------------------------------------------------------------------------
// Shares and country allocation
// ---------------------------------------------------------------------------

/// Per-column share of each impact region in the attributed stressor.
#[derive(Debug, Clone)]
pub struct ShareTensor<S> {
    pub index: RegionSectorIndex,
    /// |regions| x N, columns follow the flattened (region, sector) index.
    pub values: Matrix<S>,
    /// Columns whose attribution total was zero; their shares are all zero.
    pub degenerate_columns: Vec<bool>,
}

/// Normalize an attribution tensor into per-column shares.
///
/// Columns with a zero total keep an all-zero share column and are flagged
/// rather than treated as an error.
pub fn driver_share<S: Scalar>(attribution: &AttributionTensor<S>) -> ShareTensor<S> {
    let n = attribution.index().len();
    let n_regions = attribution.index().n_regions();
    let mut values = Matrix::zeros(n_regions, n);
    let mut degenerate = vec![false; n];
    for (column, flag) in degenerate.iter_mut().enumerate() {
        let total = attribution.column_total(column);
        if total.is_zero() {
            *flag = true;
            continue;
        }
        for region in 0..n_regions {
            values.set(region, column, attribution.get(region, column) / total);
        }
    }
    ShareTensor {
        index: attribution.index().clone(),
        values,
        degenerate_columns: degenerate,
    }
}

/// Mapping from MRIO regions to characterization countries.
///
/// Every MRIO region maps to at least one country and every country belongs
/// to exactly one region. `frequency` is the country count of a region: a
/// rest-of-world share is split equally over that many countries.
#[derive(Debug, Clone)]
pub struct RegionConcordance {
    regions: Vec<(String, Vec<String>)>,
}

impl RegionConcordance {
    /// Build from (mrio_region, country) pairs, preserving file order.
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self> {
        let mut regions: Vec<(String, Vec<String>)> = Vec::new();
        let mut seen_countries = BTreeSet::new();
        for (region, country) in pairs {
            if !seen_countries.insert(country.clone()) {
                return Err(Error::Concordance(format!(
                    "country {country:?} is mapped under more than one region"
                )));
            }
            match regions.iter_mut().find(|(r, _)| *r == region) {
                Some((_, countries)) => countries.push(country),
                None => regions.push((region, vec![country])),
            }
        }
        if regions.is_empty() {
            return Err(Error::Concordance("region concordance is empty".into()));
        }
        Ok(Self { regions })
    }

    pub fn countries_of(&self, region: &str) -> Option<&[String]> {
        self.regions
            .iter()
            .find(|(r, _)| r == region)
            .map(|(_, c)| c.as_slice())
    }

    /// Number of countries a region is split over (R_i).
    pub fn frequency(&self, region: &str) -> Option<usize> {
        self.countries_of(region).map(<[String]>::len)
    }

    /// All countries in declaration order, following the given region order.
    pub fn countries_for_regions(&self, regions: &[String]) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for region in regions {
            let countries = self.countries_of(region).ok_or_else(|| {
                Error::Concordance(format!("MRIO region {region:?} has no country mapping"))
            })?;
            out.extend(countries.iter().cloned());
        }
        Ok(out)
    }
}

/// Share of one stressor unit located in each characterization country.
#[derive(Debug, Clone)]
pub struct CountryAllocation<S> {
    pub index: RegionSectorIndex,
    pub countries: Vec<String>,
    /// |countries| x N.
    pub values: Matrix<S>,
}

/// Split regional shares equally across each region's countries.
pub fn allocate_to_countries<S: Scalar>(
    share: &ShareTensor<S>,
    concordance: &RegionConcordance,
) -> Result<CountryAllocation<S>> {
    let regions = share.index.regions();
    let countries = concordance.countries_for_regions(regions)?;
    let n = share.index.len();
    let mut values = Matrix::zeros(countries.len(), n);
    let mut row = 0usize;
    for (region_idx, region) in regions.iter().enumerate() {
        let frequency = concordance
            .frequency(region)
            .expect("regions validated above");
        let split = S::one() / S::from_count(frequency);
        for _ in 0..frequency {
            for column in 0..n {
                values.set(row, column, share.values.get(region_idx, column) * split);
            }
            row += 1;
        }
    }
    Ok(CountryAllocation {
        index: share.index.clone(),
        countries,
        values,
    })
}

/// Located driver quantity per unit of consumption: allocation times the
/// monetary intensity of the stressor.
pub fn driver_monetary_factor<S: Scalar>(
    unit: &CountryAllocation<S>,
    intensity: &IntensityTable<S>,
) -> Result<CountryAllocation<S>> {
    if unit.index != *intensity.index() {
        return Err(Error::Dimension {
            axis: "allocation vs intensity index".into(),
            expected: unit.index.len(),
            found: intensity.index().len(),
        });
    }
    let mut values = Matrix::zeros(unit.countries.len(), unit.index.len());
    for c in 0..unit.countries.len() {
        for column in 0..unit.index.len() {
            values.set(c, column, unit.values.get(c, column) * intensity.get(column));
        }
    }
    Ok(CountryAllocation {
        index: unit.index.clone(),
        countries: unit.countries.clone(),
        values,
    })
}

// ---------------------------------------------------------------------------
// Characterization factors
// ---------------------------------------------------------------------------

/// Where a characterization factor was found for a (driver, country) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfResolution {
    Exact,
    Continental,
    Global,
    Missing,
}

/// Country- and ecosystem-resolved characterization factors per driver.
///
/// Factor rows may be keyed by a real country, by a continent name (used as
/// fallback via the country-to-continent map) or by the reserved key
/// `GLOBAL`.
#[derive(Debug, Clone)]
pub struct CharacterizationTable<S> {
    cells: BTreeMap<(String, String), ByEcosystem<S>>,
    units: BTreeMap<String, String>,
    continents: BTreeMap<String, String>,
}

/// Reserved country key holding a driver's global average factor.
pub const GLOBAL_CF_KEY: &str = "GLOBAL";

impl<S: Scalar> CharacterizationTable<S> {
    pub fn new() -> Self {
        Self {
            cells: BTreeMap::new(),
            units: BTreeMap::new(),
            continents: BTreeMap::new(),
        }
    }

    /// Register the continent of a country for continental fallback lookups.
    pub fn set_continent(&mut self, country: impl Into<String>, continent: impl Into<String>) {
        self.continents.insert(country.into(), continent.into());
    }

    /// Insert one factor cell. The unit is the physical unit of the driver
    /// quantity the factor applies to and must be consistent per driver.
    pub fn insert(
        &mut self,
        driver: impl Into<String>,
        country: impl Into<String>,
        ecosystem: Ecosystem,
        value: S,
        unit: impl Into<String>,
    ) -> Result<()> {
        let driver = driver.into();
        let country = country.into();
        let unit = unit.into();
        if value < S::zero() || !value.is_finite() {
            return Err(Error::Invalid(format!(
                "characterization factor for {driver:?}/{country:?} must be finite and >= 0"
            )));
        }
        match self.units.get(&driver) {
            Some(existing) if *existing != unit => {
                return Err(Error::UnitMismatch(format!(
                    "driver {driver:?} characterized in {existing:?} and {unit:?}"
                )));
            }
            Some(_) => {}
            None => {
                self.units.insert(driver.clone(), unit);
            }
        }
        let cell = self
            .cells
            .entry((driver, country))
            .or_insert_with(ByEcosystem::zero);
        cell.set(ecosystem, value);
        Ok(())
    }

    pub fn unit_of(&self, driver: &str) -> Option<&str> {
        self.units.get(driver).map(String::as_str)
    }

    pub fn has_driver(&self, driver: &str) -> bool {
        self.units.contains_key(driver)
    }

    /// Factor for a (driver, country) cell, falling back to the country's
    /// continental average and then to the global average when supplied.
    pub fn lookup(&self, driver: &str, country: &str) -> (ByEcosystem<S>, CfResolution) {
        let key = (driver.to_string(), country.to_string());
        if let Some(cell) = self.cells.get(&key) {
            return (*cell, CfResolution::Exact);
        }
        if let Some(continent) = self.continents.get(country) {
            if let Some(cell) = self.cells.get(&(driver.to_string(), continent.clone())) {
                return (*cell, CfResolution::Continental);
            }
        }
        if let Some(cell) = self.cells.get(&(driver.to_string(), GLOBAL_CF_KEY.to_string())) {
            return (*cell, CfResolution::Global);
        }
        (ByEcosystem::zero(), CfResolution::Missing)
    }
}

impl<S: Scalar> Default for CharacterizationTable<S> {
    fn default() -> Self {
        Self::new()
    }
}

// ---------------------------------------------------------------------------
// Driver concordance
// ---------------------------------------------------------------------------

/// How one MRIO stressor maps onto characterization drivers.
#[derive(Debug, Clone)]
pub enum DriverMapping<S> {
    /// Weighted targets; weights are positive and sum to one.
    Targets(Vec<(String, S)>),
    /// Deliberately excluded, with the reason recorded.
    Excluded(String),
}

/// Stressor-to-driver concordance with averaging weights.
#[derive(Debug, Clone)]
pub struct DriverConcordance<S> {
    entries: BTreeMap<String, DriverMapping<S>>,
}

impl<S: Scalar> DriverConcordance<S> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn exclude(&mut self, stressor: impl Into<String>, reason: impl Into<String>) {
        self.entries
            .insert(stressor.into(), DriverMapping::Excluded(reason.into()));
    }

    /// Map a stressor onto weighted targets. Weights must be positive and sum
    /// to one (uniform weights express an unweighted average).
    pub fn map_stressor(
        &mut self,
        stressor: impl Into<String>,
        targets: Vec<(String, S)>,
    ) -> Result<()> {
        let stressor = stressor.into();
        if targets.is_empty() {
            return Err(Error::Concordance(format!(
                "stressor {stressor:?} mapped to no targets"
            )));
        }
        if targets.iter().any(|(_, w)| *w <= S::zero()) {
            return Err(Error::Concordance(format!(
                "stressor {stressor:?} has a non-positive weight"
            )));
        }
        let total: S = targets.iter().map(|(_, w)| *w).sum();
        if (total - S::one()).abs() > S::from_f64_lossy(1e-9) {
            return Err(Error::Concordance(format!(
                "weights for stressor {stressor:?} sum to {total}, expected 1"
            )));
        }
        self.entries
            .insert(stressor, DriverMapping::Targets(targets));
        Ok(())
    }

    pub fn get(&self, stressor: &str) -> Option<&DriverMapping<S>> {
        self.entries.get(stressor)
    }

    pub fn excluded(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.entries.iter().filter_map(|(name, m)| match m {
            DriverMapping::Excluded(reason) => Some((name.as_str(), reason.as_str())),
            DriverMapping::Targets(_) => None,
        })
    }
}

impl<S: Scalar> Default for DriverConcordance<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Effective per-country characterization of one stressor.
#[derive(Debug, Clone)]
pub struct EffectiveCf<S> {
    pub countries: Vec<String>,
    pub per_country: Vec<ByEcosystem<S>>,
    /// Unit the factors apply to; `None` for excluded stressors.
    pub unit: Option<String>,
    /// Set when the stressor is excluded; factors are all zero then.
    pub exclusion: Option<String>,
    /// Fallback level used per country (aligned with `countries`).
    pub resolution: Vec<CfResolution>,
}

/// Resolve a stressor's effective characterization vector per country.
///
/// Weighted targets are averaged per the concordance; an excluded stressor
/// yields an all-zero vector tagged with its exclusion reason. A stressor
/// that is neither mapped nor excluded is a concordance error.
pub fn map_driver_categories<S: Scalar>(
    stressor: &str,
    concordance: &DriverConcordance<S>,
    table: &CharacterizationTable<S>,
    countries: &[String],
) -> Result<EffectiveCf<S>> {
    let mapping = concordance.get(stressor).ok_or_else(|| {
        Error::Concordance(format!(
            "stressor {stressor:?} is neither mapped nor excluded"
        ))
    })?;
    match mapping {
        DriverMapping::Excluded(reason) => Ok(EffectiveCf {
            countries: countries.to_vec(),
            per_country: vec![ByEcosystem::zero(); countries.len()],
            unit: None,
            exclusion: Some(reason.clone()),
            resolution: vec![CfResolution::Missing; countries.len()],
        }),
        DriverMapping::Targets(targets) => {
            let mut unit: Option<String> = None;
            for (target, _) in targets {
                let target_unit = table.unit_of(target).ok_or_else(|| {
                    Error::Concordance(format!(
                        "driver {target:?} (target of {stressor:?}) is not characterized"
                    ))
                })?;
                match &unit {
                    None => unit = Some(target_unit.to_string()),
                    Some(existing) if existing != target_unit => {
                        return Err(Error::UnitMismatch(format!(
                            "targets of {stressor:?} mix units {existing:?} and {target_unit:?}"
                        )));
                    }
                    Some(_) => {}
                }
            }
            let mut per_country = Vec::with_capacity(countries.len());
            let mut resolution = Vec::with_capacity(countries.len());
            for country in countries {
                let mut acc = ByEcosystem::zero();
                // the weakest fallback over the averaged targets is reported
                let mut level = CfResolution::Exact;
                for (target, weight) in targets {
                    let (cell, res) = table.lookup(target, country);
                    acc.add_assign(&cell.scale(*weight));
                    level = weaker(level, res);
                }
                per_country.push(acc);
                resolution.push(level);
            }
            Ok(EffectiveCf {
                countries: countries.to_vec(),
                per_country,
                unit,
                exclusion: None,
                resolution,
            })
        }
    }
}

fn weaker(a: CfResolution, b: CfResolution) -> CfResolution {
    use CfResolution::*;
    match (a, b) {
        (Missing, _) | (_, Missing) => Missing,
        (Global, _) | (_, Global) => Global,
        (Continental, _) | (_, Continental) => Continental,
        _ => Exact,
    }
}

// ---------------------------------------------------------------------------
// Located biodiversity factors
// ---------------------------------------------------------------------------

/// Biodiversity impact per unit of consumption, located by country.
#[derive(Debug, Clone)]
pub struct LocatedBdFactors<S> {
    pub index: RegionSectorIndex,
    pub countries: Vec<String>,
    /// One |countries| x N matrix per ecosystem.
    pub values: ByEcosystem<Matrix<S>>,
}

impl<S: Scalar> LocatedBdFactors<S> {
    /// Sum over countries for one ecosystem and column.
    pub fn column_total(&self, eco: Ecosystem, column: usize) -> S {
        let m = match eco {
            Ecosystem::Terrestrial => &self.values.terrestrial,
            Ecosystem::Freshwater => &self.values.freshwater,
            Ecosystem::Marine => &self.values.marine,
        };
        m.col_sum(column)
    }
}

/// Multiply located driver quantities with their effective characterization.
///
/// `driver_unit` is the physical unit of the located quantities and must
/// match the unit the characterization factors apply to.
pub fn biodiversity_factor<S: Scalar>(
    located: &CountryAllocation<S>,
    driver_unit: &str,
    cf: &EffectiveCf<S>,
) -> Result<LocatedBdFactors<S>> {
    if located.countries != cf.countries {
        return Err(Error::Concordance(
            "country lists of allocation and characterization differ".into(),
        ));
    }
    if let Some(cf_unit) = &cf.unit {
        if cf_unit != driver_unit {
            return Err(Error::UnitMismatch(format!(
                "driver quantities in {driver_unit:?} but factors apply per {cf_unit:?}"
            )));
        }
    }
    let n = located.index.len();
    let n_countries = located.countries.len();
    let mut terrestrial = Matrix::zeros(n_countries, n);
    let mut freshwater = Matrix::zeros(n_countries, n);
    let mut marine = Matrix::zeros(n_countries, n);
    for c in 0..n_countries {
        let factor = cf.per_country[c];
        for column in 0..n {
            let quantity = located.values.get(c, column);
            terrestrial.set(c, column, quantity * factor.terrestrial);
            freshwater.set(c, column, quantity * factor.freshwater);
            marine.set(c, column, quantity * factor.marine);
        }
    }
    Ok(LocatedBdFactors {
        index: located.index.clone(),
        countries: located.countries.clone(),
        values: ByEcosystem::new(terrestrial, freshwater, marine),
    })
}

// ---------------------------------------------------------------------------
// Climate characterization
// ---------------------------------------------------------------------------

/// Global (non-spatial) climate characterization: per-gas biodiversity
/// factors by ecosystem plus 100-year CO2-equivalence factors.
#[derive(Debug, Clone)]
pub struct ClimateCharacterization<S> {
    cf: BTreeMap<String, ByEcosystem<S>>,
    gwp: BTreeMap<String, S>,
}

impl<S: Scalar> ClimateCharacterization<S> {
    pub fn new() -> Self {
        Self {
            cf: BTreeMap::new(),
            gwp: BTreeMap::new(),
        }
    }

    /// Set a gas's biodiversity factor per kg for one ecosystem. An
    /// `aquatic` factor is entered by setting freshwater and marine to the
    /// same value at the call site.
    pub fn set_cf(&mut self, gas: impl Into<String>, eco: Ecosystem, value: S) -> Result<()> {
        if value < S::zero() || !value.is_finite() {
            return Err(Error::Invalid(
                "climate characterization factor must be finite and >= 0".into(),
            ));
        }
        self.cf
            .entry(gas.into())
            .or_insert_with(ByEcosystem::zero)
            .set(eco, value);
        Ok(())
    }

    /// Register a gas's 100-year global warming potential. CO2 must be 1.
    pub fn set_gwp(&mut self, gas: impl Into<String>, value: S) -> Result<()> {
        let gas = gas.into();
        if gas == GAS_CO2 && (value - S::one()).abs() > S::from_f64_lossy(1e-12) {
            return Err(Error::Config("the GWP of CO2 must be 1".into()));
        }
        if value < S::zero() || !value.is_finite() {
            return Err(Error::Config(format!("GWP of {gas:?} must be finite and >= 0")));
        }
        self.gwp.insert(gas, value);
        Ok(())
    }

    pub fn gwp(&self, gas: &str) -> Option<S> {
        self.gwp.get(gas).copied()
    }

    pub fn cf(&self, gas: &str) -> Option<&ByEcosystem<S>> {
        self.cf.get(gas)
    }
}

impl<S: Scalar> Default for ClimateCharacterization<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Climate biodiversity factor per column: the CO2e intensity multiplied by
/// the (non-spatial) CO2 characterization factor per ecosystem.
pub fn climate_biodiversity_factor<S: Scalar>(
    co2e_per_unit: &[S],
    climate: &ClimateCharacterization<S>,
) -> Result<Vec<ByEcosystem<S>>> {
    let co2_cf = climate.cf(GAS_CO2).ok_or_else(|| {
        Error::Config("climate characterization is missing the co2 factor".into())
    })?;
    Ok(co2e_per_unit
        .iter()
        .map(|amount| co2_cf.scale(*amount))
        .collect())
}

/// Per-gas climate characterization: gases with their own factor are
/// characterized directly, the rest fold into CO2 equivalents through their
/// GWP and take the CO2 factor.
pub fn climate_biodiversity_factor_per_gas<S: Scalar>(
    gas_intensities: &BTreeMap<String, Vec<S>>,
    climate: &ClimateCharacterization<S>,
) -> Result<Vec<ByEcosystem<S>>> {
    let n = gas_intensities
        .values()
        .map(Vec::len)
        .next()
        .unwrap_or(0);
    let co2_cf = climate.cf(GAS_CO2).ok_or_else(|| {
        Error::Config("climate characterization is missing the co2 factor".into())
    })?;
    let mut out = vec![ByEcosystem::<S>::zero(); n];
    for (gas, intensity) in gas_intensities {
        if intensity.len() != n {
            return Err(Error::Dimension {
                axis: format!("gas intensity {gas:?}"),
                expected: n,
                found: intensity.len(),
            });
        }
        match climate.cf(gas) {
            Some(own_cf) => {
                for (acc, amount) in out.iter_mut().zip(intensity) {
                    acc.add_assign(&own_cf.scale(*amount));
                }
            }
            None => {
                let gwp = climate.gwp(gas).ok_or_else(|| {
                    Error::Config(format!("no GWP configured for gas {gas:?}"))
                })?;
                for (acc, amount) in out.iter_mut().zip(intensity) {
                    acc.add_assign(&co2_cf.scale(gwp * *amount));
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Impact factor set
// ---------------------------------------------------------------------------

/// Coverage of one consumption position in the factor set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageFlag {
    Ok,
    /// All factors of the position are zero.
    ZeroCoverage,
}

impl CoverageFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverageFlag::Ok => "ok",
            CoverageFlag::ZeroCoverage => "zero_coverage",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "ok" => Ok(CoverageFlag::Ok),
            "zero_coverage" => Ok(CoverageFlag::ZeroCoverage),
            other => Err(Error::Invalid(format!("unknown coverage flag {other:?}"))),
        }
    }
}

/// Biodiversity and carbon impact factors per unit of consumption for every
/// (consumption region, product sector) position.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactFactorSet<S> {
    pub index: RegionSectorIndex,
    /// Biodiversity factor per currency unit, by ecosystem; length N.
    pub bde_per_eur: Vec<ByEcosystem<S>>,
    /// kg CO2e per currency unit; length N.
    pub co2e_per_eur: Vec<S>,
    pub coverage: Vec<CoverageFlag>,
    /// Free-form provenance (source tables, base years, concordance ids).
    pub provenance: Vec<(String, String)>,
}

impl<S: Scalar> ImpactFactorSet<S> {
    pub fn position(&self, region: &str, sector: &str) -> Result<usize> {
        self.index.position(region, sector)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.index.len();
        if self.bde_per_eur.len() != n || self.co2e_per_eur.len() != n || self.coverage.len() != n
        {
            return Err(Error::Dimension {
                axis: "impact factor set".into(),
                expected: n,
                found: self.bde_per_eur.len(),
            });
        }
        for (i, bde) in self.bde_per_eur.iter().enumerate() {
            if !bde.is_finite()
                || bde.terrestrial < S::zero()
                || bde.freshwater < S::zero()
                || bde.marine < S::zero()
            {
                return Err(Error::Invalid(format!(
                    "factor for {} must be finite and >= 0",
                    self.index.label(i)
                )));
            }
        }
        if self
            .co2e_per_eur
            .iter()
            .any(|v| !v.is_finite() || *v < S::zero())
        {
            return Err(Error::Invalid("carbon factors must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Sum located biodiversity factors over countries and drivers, add the
/// climate component, and flag positions without any coverage.
pub fn total_factor<S: Scalar>(
    index: &RegionSectorIndex,
    located: &[LocatedBdFactors<S>],
    climate: &[ByEcosystem<S>],
    co2e_per_eur: Vec<S>,
    provenance: Vec<(String, String)>,
) -> Result<ImpactFactorSet<S>> {
    let n = index.len();
    if climate.len() != n {
        return Err(Error::Dimension {
            axis: "climate factors".into(),
            expected: n,
            found: climate.len(),
        });
    }
    if co2e_per_eur.len() != n {
        return Err(Error::Dimension {
            axis: "carbon factors".into(),
            expected: n,
            found: co2e_per_eur.len(),
        });
    }
    for lbf in located {
        if lbf.index != *index {
            return Err(Error::Dimension {
                axis: "located factor index".into(),
                expected: n,
                found: lbf.index.len(),
            });
        }
    }
    let mut bde = vec![ByEcosystem::<S>::zero(); n];
    for column in 0..n {
        for lbf in located {
            for eco in Ecosystem::ALL {
                let v = bde[column].get(eco) + lbf.column_total(eco, column);
                bde[column].set(eco, v);
            }
        }
        bde[column].add_assign(&climate[column]);
    }
    let coverage = (0..n)
        .map(|i| {
            if bde[i].is_zero() && co2e_per_eur[i].is_zero() {
                CoverageFlag::ZeroCoverage
            } else {
                CoverageFlag::Ok
            }
        })
        .collect();
    let set = ImpactFactorSet {
        index: index.clone(),
        bde_per_eur: bde,
        co2e_per_eur,
        coverage,
        provenance,
    };
    set.validate()?;
    Ok(set)
}
