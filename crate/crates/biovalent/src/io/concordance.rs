//! Characterization factors and concordance files.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::characterization::{CharacterizationTable, DriverConcordance, RegionConcordance};
use crate::error::{Error, Result};
use crate::types::Ecosystem;

use super::{expect_header, field, location, open, parse_number, records, source_label};

/// Characterization file: `driver, country_iso3, ecosystem, cf, unit`.
///
/// The country column may hold a real country, a continent name (resolved
/// through the continents file) or the reserved key `GLOBAL`.
pub fn read_characterization_from(
    read: impl Read,
    continents: &BTreeMap<String, String>,
    source: &str,
) -> Result<CharacterizationTable<f64>> {
    let rows = records(read, source)?;
    expect_header(
        &rows[0],
        &["driver", "country_iso3", "ecosystem", "cf", "unit"],
        source,
    )?;
    let mut table = CharacterizationTable::new();
    for (country, continent) in continents {
        table.set_continent(country.clone(), continent.clone());
    }
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let driver = field(record, 0, source, row_num, "driver")?.to_string();
        let country = field(record, 1, source, row_num, "country_iso3")?.to_string();
        let eco_text = field(record, 2, source, row_num, "ecosystem")?;
        let ecosystem = Ecosystem::parse(eco_text).map_err(|e| {
            Error::parse(location(source, row_num, "ecosystem"), e.to_string())
        })?;
        let cf = parse_number(
            field(record, 3, source, row_num, "cf")?,
            source,
            row_num,
            "cf",
        )?;
        let unit = field(record, 4, source, row_num, "unit")?.to_string();
        table
            .insert(driver, country, ecosystem, cf, unit)
            .map_err(|e| Error::parse(location(source, row_num, "cf"), e.to_string()))?;
    }
    Ok(table)
}

pub fn read_characterization(
    path: &Path,
    continents: &BTreeMap<String, String>,
) -> Result<CharacterizationTable<f64>> {
    read_characterization_from(open(path)?, continents, &source_label(path))
}

/// Region concordance file: `mrio_region, country_iso3`.
pub fn read_region_concordance_from(
    read: impl Read,
    source: &str,
) -> Result<RegionConcordance> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["mrio_region", "country_iso3"], source)?;
    let mut pairs = Vec::with_capacity(rows.len() - 1);
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let region = field(record, 0, source, row_num, "mrio_region")?.to_string();
        let country = field(record, 1, source, row_num, "country_iso3")?.to_string();
        if region.is_empty() || country.is_empty() {
            return Err(Error::parse(
                location(source, row_num, "mrio_region"),
                "region and country must be non-empty",
            ));
        }
        pairs.push((region, country));
    }
    RegionConcordance::new(pairs)
}

pub fn read_region_concordance(path: &Path) -> Result<RegionConcordance> {
    read_region_concordance_from(open(path)?, &source_label(path))
}

/// Continents file: `country_iso3, continent`. Used for continental CF
/// fallback lookups; optional in the pipeline.
pub fn read_continents_from(read: impl Read, source: &str) -> Result<BTreeMap<String, String>> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["country_iso3", "continent"], source)?;
    let mut map = BTreeMap::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let country = field(record, 0, source, row_num, "country_iso3")?.to_string();
        let continent = field(record, 1, source, row_num, "continent")?.to_string();
        if map.insert(country.clone(), continent).is_some() {
            return Err(Error::parse(
                location(source, row_num, "country_iso3"),
                format!("duplicate country {country:?}"),
            ));
        }
    }
    Ok(map)
}

pub fn read_continents(path: &Path) -> Result<BTreeMap<String, String>> {
    read_continents_from(open(path)?, &source_label(path))
}

/// Driver concordance file: `mrio_stressor, lcia_driver, weight`.
///
/// Rows with `lcia_driver = EXCLUDED` mark deliberate exclusions; the weight
/// column then holds the reason. Weighted rows of one stressor must sum to 1.
pub fn read_driver_concordance_from(
    read: impl Read,
    source: &str,
) -> Result<DriverConcordance<f64>> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["mrio_stressor", "lcia_driver", "weight"], source)?;
    let mut targets: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut excluded: Vec<(String, String)> = Vec::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let stressor = field(record, 0, source, row_num, "mrio_stressor")?.to_string();
        let driver = field(record, 1, source, row_num, "lcia_driver")?.to_string();
        let weight_text = field(record, 2, source, row_num, "weight")?;
        if driver == "EXCLUDED" {
            excluded.push((stressor, weight_text.to_string()));
            continue;
        }
        let weight = parse_number(weight_text, source, row_num, "weight")?;
        targets.entry(stressor).or_default().push((driver, weight));
    }
    let mut concordance = DriverConcordance::new();
    for (stressor, reason) in excluded {
        if targets.contains_key(&stressor) {
            return Err(Error::Concordance(format!(
                "stressor {stressor:?} is both mapped and excluded"
            )));
        }
        concordance.exclude(stressor, reason);
    }
    for (stressor, list) in targets {
        concordance.map_stressor(stressor, list)?;
    }
    Ok(concordance)
}

pub fn read_driver_concordance(path: &Path) -> Result<DriverConcordance<f64>> {
    read_driver_concordance_from(open(path)?, &source_label(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterization::{CfResolution, DriverMapping};

    #[test]
    fn characterization_with_fallback_keys() {
        let mut continents = BTreeMap::new();
        continents.insert("NOR".to_string(), "Europe".to_string());
        let text = "\
driver,country_iso3,ecosystem,cf,unit
Annual crops,FIN,terrestrial,1.1e-17,m2
Annual crops,Europe,terrestrial,1.2e-17,m2
Annual crops,GLOBAL,terrestrial,2.1e-16,m2
Water stress,FIN,freshwater,3.0e-16,Mm3
";
        let table = read_characterization_from(text.as_bytes(), &continents, "cf.csv").unwrap();
        let (v, res) = table.lookup("Annual crops", "NOR");
        assert_eq!(res, CfResolution::Continental);
        assert_eq!(v.terrestrial, 1.2e-17);
        assert_eq!(table.unit_of("Water stress"), Some("Mm3"));
    }

    #[test]
    fn characterization_rejects_bad_ecosystem() {
        let text = "\
driver,country_iso3,ecosystem,cf,unit
Annual crops,FIN,ocean,1.1e-17,m2
";
        let err =
            read_characterization_from(text.as_bytes(), &BTreeMap::new(), "cf.csv").unwrap_err();
        assert!(err.to_string().contains("ecosystem"));
    }

    #[test]
    fn region_concordance_orders_and_counts() {
        let text = "\
mrio_region,country_iso3
FI,FIN
RW,SWE
RW,NOR
";
        let conc = read_region_concordance_from(text.as_bytes(), "rc.csv").unwrap();
        assert_eq!(conc.frequency("RW"), Some(2));
        assert_eq!(conc.frequency("FI"), Some(1));
    }

    #[test]
    fn driver_concordance_mixes_mappings_and_exclusions() {
        let text = "\
mrio_stressor,lcia_driver,weight
Forest area - Forestry,Intensive forestry,0.5
Forest area - Forestry,Extensive forestry,0.5
Forest area - Marginal use,EXCLUDED,no source data
";
        let conc = read_driver_concordance_from(text.as_bytes(), "dc.csv").unwrap();
        match conc.get("Forest area - Forestry").unwrap() {
            DriverMapping::Targets(t) => assert_eq!(t.len(), 2),
            other => panic!("unexpected mapping {other:?}"),
        }
        match conc.get("Forest area - Marginal use").unwrap() {
            DriverMapping::Excluded(reason) => assert_eq!(reason, "no source data"),
            other => panic!("unexpected mapping {other:?}"),
        }
    }

    #[test]
    fn driver_concordance_weights_must_sum_to_one() {
        let text = "\
mrio_stressor,lcia_driver,weight
Cropland,Annual crops,0.5
Cropland,Permanent crops,0.4
";
        assert!(read_driver_concordance_from(text.as_bytes(), "dc.csv").is_err());
    }
}
