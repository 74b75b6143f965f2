//! The factor-set exchange file.
//!
//! CSV with columns `consumption_region, sector, ecosystem, bde_per_eur,
//! co2e_per_eur, coverage_flag`: one row per (region, sector, ecosystem) in
//! index order. Provenance is carried as leading `# key: value` comment
//! lines so that an export/import round-trip is lossless. Factors are
//! written in scientific notation with a shortest round-trippable mantissa.

use std::io::{Read, Write};
use std::path::Path;

use crate::characterization::{CoverageFlag, ImpactFactorSet};
use crate::error::{Error, Result};
use crate::index::RegionSectorIndex;
use crate::types::{ByEcosystem, Ecosystem};

use super::{expect_header, field, location, parse_number, records};

const HEADER: [&str; 6] = [
    "consumption_region",
    "sector",
    "ecosystem",
    "bde_per_eur",
    "co2e_per_eur",
    "coverage_flag",
];

/// Serialize a factor set to a writer.
pub fn write_factor_set(set: &ImpactFactorSet<f64>, mut out: impl Write) -> Result<()> {
    set.validate()?;
    let io_err = |source: std::io::Error| Error::Io {
        path: "factor set".to_string(),
        source,
    };
    for (key, value) in &set.provenance {
        writeln!(out, "# {key}: {value}").map_err(io_err)?;
    }
    writeln!(out, "{}", HEADER.join(",")).map_err(io_err)?;
    for position in 0..set.index.len() {
        let region = &set.index.regions()[set.index.region_of(position)];
        let sector = &set.index.sectors()[set.index.sector_of(position)];
        for eco in Ecosystem::ALL {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{}",
                region,
                sector,
                eco.as_str(),
                set.bde_per_eur[position].get(eco),
                set.co2e_per_eur[position],
                set.coverage[position].as_str()
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Write a factor set to a file path.
pub fn export_factor_set(set: &ImpactFactorSet<f64>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_factor_set(set, std::io::BufWriter::new(file))
}

/// Read a factor set back, reconstructing the index from row order.
pub fn import_factor_set_from(mut read: impl Read, source: &str) -> Result<ImpactFactorSet<f64>> {
    let mut text = String::new();
    read.read_to_string(&mut text).map_err(|source_err| Error::Io {
        path: source.to_string(),
        source: source_err,
    })?;

    // leading comment lines carry provenance
    let mut provenance = Vec::new();
    let mut body_start = 0usize;
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            body_start += line.len() + 1;
            if let Some((key, value)) = comment.split_once(':') {
                provenance.push((key.trim().to_string(), value.trim().to_string()));
            }
        } else {
            break;
        }
    }
    let body = &text[body_start.min(text.len())..];

    let rows = records(body.as_bytes(), source)?;
    expect_header(&rows[0], &HEADER, source)?;

    let mut regions: Vec<String> = Vec::new();
    let mut sectors: Vec<String> = Vec::new();
    struct Cell {
        bde: ByEcosystem<f64>,
        seen: [bool; 3],
        co2e: f64,
        coverage: CoverageFlag,
    }
    let mut cells: Vec<((String, String), Cell)> = Vec::new();

    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let region = field(record, 0, source, row_num, "consumption_region")?.to_string();
        let sector = field(record, 1, source, row_num, "sector")?.to_string();
        let eco = Ecosystem::parse(field(record, 2, source, row_num, "ecosystem")?)
            .map_err(|e| Error::parse(location(source, row_num, "ecosystem"), e.to_string()))?;
        let bde = parse_number(
            field(record, 3, source, row_num, "bde_per_eur")?,
            source,
            row_num,
            "bde_per_eur",
        )?;
        let co2e = parse_number(
            field(record, 4, source, row_num, "co2e_per_eur")?,
            source,
            row_num,
            "co2e_per_eur",
        )?;
        let coverage = CoverageFlag::parse(field(record, 5, source, row_num, "coverage_flag")?)
            .map_err(|e| {
                Error::parse(location(source, row_num, "coverage_flag"), e.to_string())
            })?;

        if !regions.contains(&region) {
            regions.push(region.clone());
        }
        if !sectors.contains(&sector) {
            sectors.push(sector.clone());
        }
        let key = (region, sector);
        let eco_idx = Ecosystem::ALL.iter().position(|e| *e == eco).unwrap();
        match cells.iter_mut().find(|(k, _)| *k == key) {
            Some((_, cell)) => {
                if cell.seen[eco_idx] {
                    return Err(Error::parse(
                        location(source, row_num, "ecosystem"),
                        format!("duplicate {} row for {}:{}", eco.as_str(), key.0, key.1),
                    ));
                }
                if cell.co2e != co2e {
                    return Err(Error::parse(
                        location(source, row_num, "co2e_per_eur"),
                        "carbon factor differs between ecosystem rows of one position",
                    ));
                }
                cell.seen[eco_idx] = true;
                cell.bde.set(eco, bde);
            }
            None => {
                let mut cell = Cell {
                    bde: ByEcosystem::zero(),
                    seen: [false; 3],
                    co2e,
                    coverage,
                };
                cell.seen[eco_idx] = true;
                cell.bde.set(eco, bde);
                cells.push((key, cell));
            }
        }
    }

    let index = RegionSectorIndex::new(regions, sectors)?;
    if cells.len() != index.len() {
        return Err(Error::parse(
            source,
            format!(
                "found {} positions but the index spans {}",
                cells.len(),
                index.len()
            ),
        ));
    }
    let mut bde_per_eur = vec![ByEcosystem::zero(); index.len()];
    let mut co2e_per_eur = vec![0.0; index.len()];
    let mut coverage = vec![CoverageFlag::Ok; index.len()];
    for ((region, sector), cell) in cells {
        if cell.seen != [true; 3] {
            return Err(Error::parse(
                source,
                format!("position {region}:{sector} is missing ecosystem rows"),
            ));
        }
        let position = index.position(&region, &sector)?;
        bde_per_eur[position] = cell.bde;
        co2e_per_eur[position] = cell.co2e;
        coverage[position] = cell.coverage;
    }
    let set = ImpactFactorSet {
        index,
        bde_per_eur,
        co2e_per_eur,
        coverage,
        provenance,
    };
    set.validate()?;
    Ok(set)
}

/// Read a factor set from a file path.
pub fn import_factor_set(path: &Path) -> Result<ImpactFactorSet<f64>> {
    import_factor_set_from(super::open(path)?, &super::source_label(path))
}
