//! Economic core and satellite table files.
//!
//! The flow matrix file carries `region:sector` labels both as the column
//! header (after an empty corner cell) and as the first field of each row;
//! labels must enumerate the full region x sector grid row-major with the
//! region as the outer axis. Final demand and satellite files reuse the same
//! label order.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::index::RegionSectorIndex;
use crate::linalg::Matrix;
use crate::mrio::SatelliteTable;

use super::{expect_header, field, location, open, parse_number, records, source_label};

type Real = f64;

/// Derive the index from an ordered list of `region:sector` labels and check
/// that the list is the exact row-major enumeration.
fn index_from_labels(labels: &[String], source: &str) -> Result<RegionSectorIndex> {
    let mut regions: Vec<String> = Vec::new();
    let mut sectors: Vec<String> = Vec::new();
    for label in labels {
        let (region, sector) = label.split_once(':').ok_or_else(|| {
            Error::parse(
                format!("{source}: header"),
                format!("label {label:?} is not region:sector"),
            )
        })?;
        if !regions.iter().any(|r| r == region) {
            regions.push(region.to_string());
        }
        if !sectors.iter().any(|s| s == sector) {
            sectors.push(sector.to_string());
        }
    }
    let index = RegionSectorIndex::new(regions, sectors)?;
    if index.len() != labels.len() {
        return Err(Error::parse(
            format!("{source}: header"),
            format!(
                "{} labels do not span the {} grid",
                labels.len(),
                index
            ),
        ));
    }
    for (position, label) in labels.iter().enumerate() {
        if index.label(position) != *label {
            return Err(Error::parse(
                format!("{source}: header"),
                format!(
                    "label {label:?} at position {position} breaks row-major region-outer order"
                ),
            ));
        }
    }
    Ok(index)
}

/// Read the inter-industry flow matrix and derive the region/sector index.
pub fn read_flow_matrix_from(
    read: impl Read,
    source: &str,
) -> Result<(RegionSectorIndex, Matrix<Real>)> {
    let rows = records(read, source)?;
    let header = &rows[0];
    if header.get(0).map(str::trim) != Some("") {
        return Err(Error::parse(
            format!("{source}: header"),
            "first header cell must be empty (label corner)",
        ));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let index = index_from_labels(&labels, source)?;
    let n = index.len();
    if rows.len() - 1 != n {
        return Err(Error::Dimension {
            axis: format!("{source} rows"),
            expected: n,
            found: rows.len() - 1,
        });
    }
    let mut matrix = Matrix::zeros(n, n);
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let label = field(record, 0, source, row_num, "label")?;
        if label != index.label(r) {
            return Err(Error::parse(
                location(source, row_num, "label"),
                format!("expected row label {:?}, found {label:?}", index.label(r)),
            ));
        }
        if record.len() != n + 1 {
            return Err(Error::Dimension {
                axis: format!("{source} row {row_num}"),
                expected: n + 1,
                found: record.len(),
            });
        }
        for c in 0..n {
            let text = field(record, c + 1, source, row_num, &index.label(c))?;
            matrix.set(r, c, parse_number(text, source, row_num, &index.label(c))?);
        }
    }
    Ok((index, matrix))
}

pub fn read_flow_matrix(path: &Path) -> Result<(RegionSectorIndex, Matrix<Real>)> {
    read_flow_matrix_from(open(path)?, &source_label(path))
}

/// Read final demand: rows are `region:sector`, columns are consuming regions.
pub fn read_final_demand_from(
    read: impl Read,
    index: &RegionSectorIndex,
    source: &str,
) -> Result<Matrix<Real>> {
    let rows = records(read, source)?;
    let header = &rows[0];
    let mut expected: Vec<&str> = vec![""];
    expected.extend(index.regions().iter().map(String::as_str));
    expect_header(header, &expected, source)?;
    let n = index.len();
    if rows.len() - 1 != n {
        return Err(Error::Dimension {
            axis: format!("{source} rows"),
            expected: n,
            found: rows.len() - 1,
        });
    }
    let mut matrix = Matrix::zeros(n, index.n_regions());
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let label = field(record, 0, source, row_num, "label")?;
        if label != index.label(r) {
            return Err(Error::parse(
                location(source, row_num, "label"),
                format!("expected row label {:?}, found {label:?}", index.label(r)),
            ));
        }
        for (j, region) in index.regions().iter().enumerate() {
            let text = field(record, j + 1, source, row_num, region)?;
            matrix.set(r, j, parse_number(text, source, row_num, region)?);
        }
    }
    Ok(matrix)
}

pub fn read_final_demand(path: &Path, index: &RegionSectorIndex) -> Result<Matrix<Real>> {
    read_final_demand_from(open(path)?, index, &source_label(path))
}

/// Read a gross output vector: one `(region_sector, value)` row per position.
pub fn read_gross_output_from(
    read: impl Read,
    index: &RegionSectorIndex,
    source: &str,
) -> Result<Vec<Real>> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["region_sector", "value"], source)?;
    if rows.len() - 1 != index.len() {
        return Err(Error::Dimension {
            axis: format!("{source} rows"),
            expected: index.len(),
            found: rows.len() - 1,
        });
    }
    let mut out = vec![0.0; index.len()];
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let label = field(record, 0, source, row_num, "region_sector")?;
        let position = index.parse_label(label).map_err(|e| {
            Error::parse(location(source, row_num, "region_sector"), e.to_string())
        })?;
        out[position] = parse_number(
            field(record, 1, source, row_num, "value")?,
            source,
            row_num,
            "value",
        )?;
    }
    Ok(out)
}

pub fn read_gross_output(path: &Path, index: &RegionSectorIndex) -> Result<Vec<Real>> {
    read_gross_output_from(open(path)?, index, &source_label(path))
}

/// Read satellite accounts: stressor name, unit, then one column per
/// (region, sector) in index order.
pub fn read_satellite_from(
    read: impl Read,
    index: &RegionSectorIndex,
    source: &str,
) -> Result<SatelliteTable<Real>> {
    let rows = records(read, source)?;
    let header = &rows[0];
    let mut expected: Vec<String> = vec!["stressor".to_string(), "unit".to_string()];
    expected.extend((0..index.len()).map(|p| index.label(p)));
    let expected_refs: Vec<&str> = expected.iter().map(String::as_str).collect();
    expect_header(header, &expected_refs, source)?;

    let mut table_rows = Vec::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let name = field(record, 0, source, row_num, "stressor")?.to_string();
        let unit = field(record, 1, source, row_num, "unit")?.to_string();
        if unit.is_empty() {
            return Err(Error::parse(
                location(source, row_num, "unit"),
                "satellite rows must carry a unit",
            ));
        }
        let mut values = Vec::with_capacity(index.len());
        for p in 0..index.len() {
            let column = index.label(p);
            let text = field(record, p + 2, source, row_num, &column)?;
            values.push(parse_number(text, source, row_num, &column)?);
        }
        table_rows.push((name, unit, values));
    }
    SatelliteTable::new(table_rows)
}

pub fn read_satellite(path: &Path, index: &RegionSectorIndex) -> Result<SatelliteTable<Real>> {
    read_satellite_from(open(path)?, index, &source_label(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOWS: &str = "\
,FI:AGR,FI:IND,BR:AGR,BR:IND
FI:AGR,10,20,0,1
FI:IND,30,40,2,0
BR:AGR,0,0,5,6
BR:IND,1,2,7,8
";

    #[test]
    fn flow_matrix_roundtrip() {
        let (index, z) = read_flow_matrix_from(FLOWS.as_bytes(), "flows.csv").unwrap();
        assert_eq!(index.regions(), &["FI".to_string(), "BR".to_string()]);
        assert_eq!(index.sectors(), &["AGR".to_string(), "IND".to_string()]);
        assert_eq!(z.get(1, 0), 30.0);
        assert_eq!(z.get(3, 3), 8.0);
    }

    #[test]
    fn flow_matrix_rejects_scrambled_labels() {
        let scrambled = "\
,FI:AGR,BR:AGR,FI:IND,BR:IND
FI:AGR,0,0,0,0
BR:AGR,0,0,0,0
FI:IND,0,0,0,0
BR:IND,0,0,0,0
";
        let err = read_flow_matrix_from(scrambled.as_bytes(), "flows.csv").unwrap_err();
        assert!(err.to_string().contains("row-major"));
    }

    #[test]
    fn final_demand_checks_consuming_regions() {
        let (index, _) = read_flow_matrix_from(FLOWS.as_bytes(), "flows.csv").unwrap();
        let demand = "\
,FI,BR
FI:AGR,70,5
FI:IND,130,10
BR:AGR,3,50
BR:IND,4,60
";
        let y = read_final_demand_from(demand.as_bytes(), &index, "fd.csv").unwrap();
        assert_eq!(y.get(0, 0), 70.0);
        assert_eq!(y.get(3, 1), 60.0);

        let wrong = ",FI,XX\nFI:AGR,1,1\nFI:IND,1,1\nBR:AGR,1,1\nBR:IND,1,1\n";
        assert!(read_final_demand_from(wrong.as_bytes(), &index, "fd.csv").is_err());
    }

    #[test]
    fn satellite_needs_units_and_full_width() {
        let (index, _) = read_flow_matrix_from(FLOWS.as_bytes(), "flows.csv").unwrap();
        let sat = "\
stressor,unit,FI:AGR,FI:IND,BR:AGR,BR:IND
Cropland,m2,1,0,2,0
CO2,kg,5,6,7,8
";
        let table = read_satellite_from(sat.as_bytes(), &index, "sat.csv").unwrap();
        assert_eq!(table.row("CO2").unwrap().values, &[5.0, 6.0, 7.0, 8.0]);

        let no_unit = "\
stressor,unit,FI:AGR,FI:IND,BR:AGR,BR:IND
Cropland,,1,0,2,0
";
        let err = read_satellite_from(no_unit.as_bytes(), &index, "sat.csv").unwrap_err();
        assert!(err.to_string().contains("unit"));
    }

    #[test]
    fn bad_numbers_are_located() {
        let bad = "\
,FI:AGR,FI:IND,BR:AGR,BR:IND
FI:AGR,10,20,0,1
FI:IND,30,4x0,2,0
BR:AGR,0,0,5,6
BR:IND,1,2,7,8
";
        let err = read_flow_matrix_from(bad.as_bytes(), "flows.csv").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("row 2"), "{text}");
        assert!(text.contains("FI:IND"), "{text}");
    }

    #[test]
    fn gross_output_resolves_labels() {
        let (index, _) = read_flow_matrix_from(FLOWS.as_bytes(), "flows.csv").unwrap();
        let x = "\
region_sector,value
FI:AGR,100
FI:IND,200
BR:AGR,300
BR:IND,400
";
        let v = read_gross_output_from(x.as_bytes(), &index, "x.csv").unwrap();
        assert_eq!(v, vec![100.0, 200.0, 300.0, 400.0]);
    }
}
