//! End-to-end derivation of the impact factor set from economic tables,
//! satellite accounts, concordances and characterization data.
//!
//! Source attribution and monetary intensities may come from two differently
//! dated cores of the same index (attribution shares from one base year,
//! intensities from another); pass the same tables twice when a single year
//! is used.

use std::collections::BTreeMap;

use crate::characterization::{
    allocate_to_countries, biodiversity_factor, climate_biodiversity_factor_per_gas,
    driver_share, map_driver_categories, total_factor, CfResolution, CharacterizationTable,
    ClimateCharacterization, DriverConcordance, ImpactFactorSet, LocatedBdFactors,
    RegionConcordance,
};
use crate::error::{Error, Result};
use crate::mrio::{footprint_intensity, source_attribution, EconomicCore, SatelliteTable};
use crate::num::Scalar;

/// One role's economic core and its satellite accounts.
#[derive(Debug, Clone, Copy)]
pub struct FactorTables<'a, S> {
    pub core: &'a EconomicCore<S>,
    pub satellite: &'a SatelliteTable<S>,
}

/// Climate handling: which satellite rows are greenhouse gases, and their
/// global characterization.
#[derive(Debug, Clone)]
pub struct ClimateSpec<S> {
    /// satellite row name -> canonical gas key (e.g. "co2", "ch4").
    pub gas_rows: BTreeMap<String, String>,
    pub characterization: ClimateCharacterization<S>,
}

/// All inputs needed to derive an impact factor set.
pub struct FactorBuildInputs<'a, S> {
    pub intensity: FactorTables<'a, S>,
    pub attribution: FactorTables<'a, S>,
    pub regions: &'a RegionConcordance,
    pub drivers: &'a DriverConcordance<S>,
    pub characterization: &'a CharacterizationTable<S>,
    pub climate: &'a ClimateSpec<S>,
    pub provenance: Vec<(String, String)>,
}

/// What the characterization stage could and could not cover.
#[derive(Debug, Clone, Default)]
pub struct CoverageReport {
    /// Stressors excluded by the concordance, with reasons.
    pub excluded_stressors: Vec<(String, String)>,
    /// (stressor, country) pairs characterized from a continental average.
    pub continental_fallbacks: Vec<(String, String)>,
    /// (stressor, country) pairs characterized from the global average.
    pub global_fallbacks: Vec<(String, String)>,
    /// (stressor, country) pairs with no factor at all (treated as zero).
    pub missing_factors: Vec<(String, String)>,
    /// Consumption positions whose attribution total was zero per stressor.
    pub degenerate_columns: Vec<(String, String)>,
    /// Positions flagged zero-coverage in the final set.
    pub zero_coverage_positions: Vec<String>,
    pub warnings: Vec<String>,
}

impl CoverageReport {
    pub fn summary(&self) -> String {
        format!(
            "excluded stressors: {}; continental fallbacks: {}; global fallbacks: {}; \
             missing factors: {}; zero-coverage positions: {}; warnings: {}",
            self.excluded_stressors.len(),
            self.continental_fallbacks.len(),
            self.global_fallbacks.len(),
            self.missing_factors.len(),
            self.zero_coverage_positions.len(),
            self.warnings.len()
        )
    }
}

/// Derive biodiversity and carbon factors per unit of consumption.
pub fn derive_impact_factors<S: Scalar>(
    inputs: &FactorBuildInputs<'_, S>,
) -> Result<(ImpactFactorSet<S>, CoverageReport)> {
    let index = inputs.intensity.core.index();
    if inputs.attribution.core.index() != index {
        return Err(Error::Config(
            "attribution and intensity tables use different region/sector indices".into(),
        ));
    }
    let n = index.len();
    if inputs.intensity.satellite.width() != n || inputs.attribution.satellite.width() != n {
        return Err(Error::Dimension {
            axis: "satellite width".into(),
            expected: n,
            found: inputs.intensity.satellite.width(),
        });
    }

    let mut report = CoverageReport::default();
    let l_intensity = inputs.intensity.core.total_requirements()?;
    let l_attribution = inputs.attribution.core.total_requirements()?;
    let countries = inputs
        .regions
        .countries_for_regions(index.regions())?;

    let mut located: Vec<LocatedBdFactors<S>> = Vec::new();
    let mut co2e_per_eur = vec![S::zero(); n];
    let mut gas_intensities: BTreeMap<String, Vec<S>> = BTreeMap::new();

    for row in inputs.intensity.satellite.rows() {
        if let Some(gas) = inputs.climate.gas_rows.get(row.name) {
            // greenhouse gases bypass the spatial chain; the carbon factor
            // folds every gas into CO2 equivalents through its GWP
            if inputs.drivers.get(row.name).is_some() {
                return Err(Error::Config(format!(
                    "stressor {:?} is configured both as a gas and in the driver concordance",
                    row.name
                )));
            }
            let gwp = inputs.climate.characterization.gwp(gas).ok_or_else(|| {
                Error::Config(format!("no GWP configured for gas {gas:?}"))
            })?;
            let intensity = footprint_intensity(inputs.intensity.core, &l_intensity, row.values)?;
            for (acc, v) in co2e_per_eur.iter_mut().zip(intensity.values()) {
                *acc += gwp * *v;
            }
            let per_gas = gas_intensities
                .entry(gas.clone())
                .or_insert_with(|| vec![S::zero(); n]);
            for (acc, v) in per_gas.iter_mut().zip(intensity.values()) {
                *acc += *v;
            }
            continue;
        }

        let cf = map_driver_categories(
            row.name,
            inputs.drivers,
            inputs.characterization,
            &countries,
        )?;
        if let Some(reason) = &cf.exclusion {
            report
                .excluded_stressors
                .push((row.name.to_string(), reason.clone()));
            continue;
        }
        for (country, resolution) in cf.countries.iter().zip(&cf.resolution) {
            match resolution {
                CfResolution::Continental => report
                    .continental_fallbacks
                    .push((row.name.to_string(), country.clone())),
                CfResolution::Global => report
                    .global_fallbacks
                    .push((row.name.to_string(), country.clone())),
                CfResolution::Missing => report
                    .missing_factors
                    .push((row.name.to_string(), country.clone())),
                CfResolution::Exact => {}
            }
        }

        let attribution_row = inputs.attribution.satellite.row(row.name).ok_or_else(|| {
            Error::Config(format!(
                "stressor {:?} is missing from the attribution satellite table",
                row.name
            ))
        })?;
        if attribution_row.unit != row.unit {
            return Err(Error::UnitMismatch(format!(
                "stressor {:?} recorded in {:?} (attribution) vs {:?} (intensity)",
                row.name, attribution_row.unit, row.unit
            )));
        }

        let tensor = source_attribution(
            inputs.attribution.core,
            &l_attribution,
            attribution_row.values,
        )?;
        let share = driver_share(&tensor);
        for (column, degenerate) in share.degenerate_columns.iter().enumerate() {
            if *degenerate {
                report
                    .degenerate_columns
                    .push((row.name.to_string(), index.label(column)));
            }
        }
        let unit_allocation = allocate_to_countries(&share, inputs.regions)?;
        let intensity = footprint_intensity(inputs.intensity.core, &l_intensity, row.values)?;
        let dr = crate::characterization::driver_monetary_factor(&unit_allocation, &intensity)?;
        located.push(biodiversity_factor(&dr, row.unit, &cf)?);
    }

    // gases with their own characterization factor are applied directly; the
    // rest take the CO2 factor through their CO2-equivalent amount
    let climate_factors = if gas_intensities.is_empty() {
        vec![crate::types::ByEcosystem::zero(); n]
    } else {
        climate_biodiversity_factor_per_gas(&gas_intensities, &inputs.climate.characterization)?
    };
    let set = total_factor(
        index,
        &located,
        &climate_factors,
        co2e_per_eur,
        inputs.provenance.clone(),
    )?;
    report.zero_coverage_positions = set
        .coverage
        .iter()
        .enumerate()
        .filter(|(_, flag)| **flag == crate::characterization::CoverageFlag::ZeroCoverage)
        .map(|(i, _)| index.label(i))
        .collect();
    report
        .warnings
        .extend(inputs.intensity.satellite.diagnostics());
    Ok((set, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::RegionSectorIndex;
    use crate::linalg::Matrix;
    use crate::types::Ecosystem;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    /// One-region, two-sector world with R = 1: the full chain must reduce
    /// to intensity times characterization factor.
    #[test]
    fn one_region_chain_reduces_to_intensity_times_cf() {
        let index = RegionSectorIndex::new(["FI"], ["AGR", "IND"]).unwrap();
        let z = Matrix::from_rows(vec![vec![10.0, 20.0], vec![30.0, 40.0]]).unwrap();
        let y = Matrix::from_rows(vec![vec![70.0], vec![130.0]]).unwrap();
        let core = EconomicCore::new(index.clone(), z, y).unwrap();
        let satellite = SatelliteTable::new(vec![(
            "Cropland".to_string(),
            "m2".to_string(),
            vec![50.0, 0.0],
        )])
        .unwrap();

        let regions = RegionConcordance::new(vec![("FI".into(), "FIN".into())]).unwrap();
        let mut drivers = DriverConcordance::new();
        drivers
            .map_stressor("Cropland", vec![("Annual crops".into(), 1.0)])
            .unwrap();
        let mut table = CharacterizationTable::new();
        let cf_value = 2.0e-17;
        table
            .insert("Annual crops", "FIN", Ecosystem::Terrestrial, cf_value, "m2")
            .unwrap();
        let mut climate = ClimateCharacterization::new();
        climate.set_cf("co2", Ecosystem::Terrestrial, 0.0).unwrap();
        let spec = ClimateSpec {
            gas_rows: BTreeMap::new(),
            characterization: climate,
        };

        let tables = FactorTables {
            core: &core,
            satellite: &satellite,
        };
        let (set, report) = derive_impact_factors(&FactorBuildInputs {
            intensity: tables,
            attribution: tables,
            regions: &regions,
            drivers: &drivers,
            characterization: &table,
            climate: &spec,
            provenance: vec![],
        })
        .unwrap();

        // brute-force expectation: with one region and R = 1 the share chain
        // is the identity, so the factor is just intensity * cf
        let l = core.total_requirements().unwrap();
        let intensity = footprint_intensity(&core, &l, &[50.0, 0.0]).unwrap();
        for column in 0..index.len() {
            let expected = intensity.get(column) * cf_value;
            assert!(
                close(set.bde_per_eur[column].terrestrial, expected, 1e-12),
                "column {column}: {} vs {expected}",
                set.bde_per_eur[column].terrestrial
            );
            assert_eq!(set.bde_per_eur[column].freshwater, 0.0);
        }
        assert!(report.excluded_stressors.is_empty());
        assert!(report.missing_factors.is_empty());
    }

    #[test]
    fn gas_rows_fold_into_co2e_and_climate_factor() {
        let index = RegionSectorIndex::new(["FI"], ["AGR", "IND"]).unwrap();
        let z = Matrix::zeros(2, 2);
        let y = Matrix::from_rows(vec![vec![100.0], vec![100.0]]).unwrap();
        let core = EconomicCore::new(index.clone(), z, y).unwrap();
        let satellite = SatelliteTable::new(vec![
            ("CO2".to_string(), "kg".to_string(), vec![50.0, 0.0]),
            ("CH4".to_string(), "kg".to_string(), vec![1.0, 0.0]),
        ])
        .unwrap();

        let regions = RegionConcordance::new(vec![("FI".into(), "FIN".into())]).unwrap();
        let drivers = DriverConcordance::new();
        let table = CharacterizationTable::new();
        let mut climate = ClimateCharacterization::new();
        climate.set_gwp("co2", 1.0).unwrap();
        climate.set_gwp("ch4", 28.0).unwrap();
        climate.set_cf("co2", Ecosystem::Terrestrial, 1e-16).unwrap();
        climate.set_cf("co2", Ecosystem::Freshwater, 2e-17).unwrap();
        climate.set_cf("co2", Ecosystem::Marine, 2e-17).unwrap();
        let mut gas_rows = BTreeMap::new();
        gas_rows.insert("CO2".to_string(), "co2".to_string());
        gas_rows.insert("CH4".to_string(), "ch4".to_string());
        let spec = ClimateSpec {
            gas_rows,
            characterization: climate,
        };

        let tables = FactorTables {
            core: &core,
            satellite: &satellite,
        };
        let (set, _) = derive_impact_factors(&FactorBuildInputs {
            intensity: tables,
            attribution: tables,
            regions: &regions,
            drivers: &drivers,
            characterization: &table,
            climate: &spec,
            provenance: vec![],
        })
        .unwrap();

        // L = I here, so the AGR column carries (50 + 28 * 1) / 100 kg CO2e per
        // currency unit and the climate biodiversity factor follows it
        assert!(close(set.co2e_per_eur[0], 0.78, 1e-12));
        assert_eq!(set.co2e_per_eur[1], 0.0);
        assert!(close(set.bde_per_eur[0].terrestrial, 0.78 * 1e-16, 1e-12));
        assert!(close(set.bde_per_eur[0].freshwater, 0.78 * 2e-17, 1e-12));
    }

    #[test]
    fn gases_with_own_factors_skip_the_co2e_fold() {
        let index = RegionSectorIndex::new(["FI"], ["AGR"]).unwrap();
        let core = EconomicCore::new(
            index,
            Matrix::zeros(1, 1),
            Matrix::from_rows(vec![vec![100.0]]).unwrap(),
        )
        .unwrap();
        let satellite = SatelliteTable::new(vec![
            ("CO2".to_string(), "kg".to_string(), vec![50.0]),
            ("CH4".to_string(), "kg".to_string(), vec![2.0]),
        ])
        .unwrap();
        let regions = RegionConcordance::new(vec![("FI".into(), "FIN".into())]).unwrap();
        let drivers = DriverConcordance::new();
        let table = CharacterizationTable::new();
        let mut climate = ClimateCharacterization::new();
        climate.set_gwp("co2", 1.0).unwrap();
        climate.set_gwp("ch4", 28.0).unwrap();
        climate.set_cf("co2", Ecosystem::Terrestrial, 1e-16).unwrap();
        // methane carries its own terrestrial factor
        climate.set_cf("ch4", Ecosystem::Terrestrial, 5e-15).unwrap();
        let mut gas_rows = BTreeMap::new();
        gas_rows.insert("CO2".to_string(), "co2".to_string());
        gas_rows.insert("CH4".to_string(), "ch4".to_string());
        let spec = ClimateSpec {
            gas_rows,
            characterization: climate,
        };
        let tables = FactorTables {
            core: &core,
            satellite: &satellite,
        };
        let (set, _) = derive_impact_factors(&FactorBuildInputs {
            intensity: tables,
            attribution: tables,
            regions: &regions,
            drivers: &drivers,
            characterization: &table,
            climate: &spec,
            provenance: vec![],
        })
        .unwrap();

        // the carbon factor always folds through GWP
        assert!(close(set.co2e_per_eur[0], (50.0 + 28.0 * 2.0) / 100.0, 1e-12));
        // the biodiversity factor applies methane's own characterization
        let expected = 0.5 * 1e-16 + 0.02 * 5e-15;
        assert!(close(set.bde_per_eur[0].terrestrial, expected, 1e-12));
    }

    #[test]
    fn gas_also_in_driver_concordance_is_rejected() {
        let index = RegionSectorIndex::new(["FI"], ["AGR"]).unwrap();
        let core = EconomicCore::new(
            index,
            Matrix::zeros(1, 1),
            Matrix::from_rows(vec![vec![10.0]]).unwrap(),
        )
        .unwrap();
        let satellite =
            SatelliteTable::new(vec![("CO2".to_string(), "kg".to_string(), vec![1.0])]).unwrap();
        let regions = RegionConcordance::new(vec![("FI".into(), "FIN".into())]).unwrap();
        let mut drivers = DriverConcordance::new();
        drivers
            .map_stressor("CO2", vec![("Climate".into(), 1.0)])
            .unwrap();
        let table = CharacterizationTable::new();
        let mut climate = ClimateCharacterization::new();
        climate.set_gwp("co2", 1.0).unwrap();
        climate.set_cf("co2", Ecosystem::Terrestrial, 1e-16).unwrap();
        let mut gas_rows = BTreeMap::new();
        gas_rows.insert("CO2".to_string(), "co2".to_string());
        let spec = ClimateSpec {
            gas_rows,
            characterization: climate,
        };
        let tables = FactorTables {
            core: &core,
            satellite: &satellite,
        };
        let err = derive_impact_factors(&FactorBuildInputs {
            intensity: tables,
            attribution: tables,
            regions: &regions,
            drivers: &drivers,
            characterization: &table,
            climate: &spec,
            provenance: vec![],
        })
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
