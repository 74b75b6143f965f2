//! Ledger, account mapping and price-harmonization files.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ledger::{
    AccountMapping, AccountRoute, BasicPriceInputs, EntryKind, InflationTable, Ledger,
    LedgerEntry, PriceComponents,
};
use crate::types::ByEcosystem;

use super::{expect_header, field, location, open, parse_number, parse_year, records, source_label};

/// Ledger file:
/// `account_id, account_name, year, kind, amount, unit, category, statement_line`.
pub fn read_ledger_from(read: impl Read, source: &str) -> Result<Ledger<f64>> {
    let rows = records(read, source)?;
    expect_header(
        &rows[0],
        &[
            "account_id",
            "account_name",
            "year",
            "kind",
            "amount",
            "unit",
            "category",
            "statement_line",
        ],
        source,
    )?;
    let mut entries = Vec::with_capacity(rows.len() - 1);
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let year_text = field(record, 2, source, row_num, "year")?;
        if year_text.is_empty() {
            return Err(Error::parse(
                location(source, row_num, "year"),
                "year is required",
            ));
        }
        let kind = EntryKind::parse(field(record, 3, source, row_num, "kind")?)
            .map_err(|e| Error::parse(location(source, row_num, "kind"), e.to_string()))?;
        let unit_text = field(record, 5, source, row_num, "unit")?;
        let unit = (!unit_text.is_empty()).then(|| unit_text.to_string());
        if kind == EntryKind::Physical && unit.is_none() {
            return Err(Error::parse(
                location(source, row_num, "unit"),
                "physical entries must carry a unit",
            ));
        }
        entries.push(LedgerEntry {
            account_id: field(record, 0, source, row_num, "account_id")?.to_string(),
            account_name: field(record, 1, source, row_num, "account_name")?.to_string(),
            year: parse_year(year_text, source, row_num, "year")?,
            kind,
            amount: parse_number(
                field(record, 4, source, row_num, "amount")?,
                source,
                row_num,
                "amount",
            )?,
            unit,
            category: field(record, 6, source, row_num, "category")?.to_string(),
            statement_line: field(record, 7, source, row_num, "statement_line")?.to_string(),
        });
    }
    Ledger::new(entries)
}

pub fn read_ledger(path: &Path) -> Result<Ledger<f64>> {
    read_ledger_from(open(path)?, &source_label(path))
}

/// Account mapping file:
/// `account_id, route, region, sector, bde_terrestrial_per_unit,
///  bde_freshwater_per_unit, bde_marine_per_unit, co2e_per_unit`.
///
/// `route = sector` rows fill region and sector and leave the intensity
/// columns empty; `route = direct` rows do the opposite.
pub fn read_account_mapping_from(read: impl Read, source: &str) -> Result<AccountMapping<f64>> {
    let rows = records(read, source)?;
    expect_header(
        &rows[0],
        &[
            "account_id",
            "route",
            "region",
            "sector",
            "bde_terrestrial_per_unit",
            "bde_freshwater_per_unit",
            "bde_marine_per_unit",
            "co2e_per_unit",
        ],
        source,
    )?;
    let mut routes = BTreeMap::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let account = field(record, 0, source, row_num, "account_id")?.to_string();
        let route_kind = field(record, 1, source, row_num, "route")?;
        let region = field(record, 2, source, row_num, "region")?;
        let sector = field(record, 3, source, row_num, "sector")?;
        let intensity_fields = [
            field(record, 4, source, row_num, "bde_terrestrial_per_unit")?,
            field(record, 5, source, row_num, "bde_freshwater_per_unit")?,
            field(record, 6, source, row_num, "bde_marine_per_unit")?,
            field(record, 7, source, row_num, "co2e_per_unit")?,
        ];
        let route = match route_kind {
            "sector" => {
                if region.is_empty() || sector.is_empty() {
                    return Err(Error::parse(
                        location(source, row_num, "region"),
                        "sector routes need region and sector",
                    ));
                }
                if intensity_fields.iter().any(|f| !f.is_empty()) {
                    return Err(Error::parse(
                        location(source, row_num, "route"),
                        "sector routes must leave intensity columns empty",
                    ));
                }
                AccountRoute::Sector {
                    region: region.to_string(),
                    sector: sector.to_string(),
                }
            }
            "direct" => {
                if !region.is_empty() || !sector.is_empty() {
                    return Err(Error::parse(
                        location(source, row_num, "route"),
                        "direct routes must leave region and sector empty",
                    ));
                }
                let columns = [
                    "bde_terrestrial_per_unit",
                    "bde_freshwater_per_unit",
                    "bde_marine_per_unit",
                    "co2e_per_unit",
                ];
                let mut values = [0.0; 4];
                for (i, (text, column)) in
                    intensity_fields.iter().zip(columns.iter()).enumerate()
                {
                    values[i] = parse_number(text, source, row_num, column)?;
                }
                AccountRoute::Direct {
                    bde_per_unit: ByEcosystem::new(values[0], values[1], values[2]),
                    co2e_per_unit: values[3],
                }
            }
            other => {
                return Err(Error::parse(
                    location(source, row_num, "route"),
                    format!("route must be sector or direct, found {other:?}"),
                ));
            }
        };
        if routes.insert(account.clone(), route).is_some() {
            return Err(Error::parse(
                location(source, row_num, "account_id"),
                format!("duplicate mapping for account {account:?}"),
            ));
        }
    }
    AccountMapping::new(routes)
}

pub fn read_account_mapping(path: &Path) -> Result<AccountMapping<f64>> {
    read_account_mapping_from(open(path)?, &source_label(path))
}

/// Basic price inputs file: `sector, tax, sub, vat, ttm, sup`.
pub fn read_basic_prices_from(read: impl Read, source: &str) -> Result<BasicPriceInputs<f64>> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["sector", "tax", "sub", "vat", "ttm", "sup"], source)?;
    let mut components = BTreeMap::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let sector = field(record, 0, source, row_num, "sector")?.to_string();
        let mut values = [0.0; 5];
        for (i, column) in ["tax", "sub", "vat", "ttm", "sup"].iter().enumerate() {
            values[i] = parse_number(
                field(record, i + 1, source, row_num, column)?,
                source,
                row_num,
                column,
            )?;
        }
        if components
            .insert(
                sector.clone(),
                PriceComponents {
                    tax: values[0],
                    sub: values[1],
                    vat: values[2],
                    ttm: values[3],
                    sup: values[4],
                },
            )
            .is_some()
        {
            return Err(Error::parse(
                location(source, row_num, "sector"),
                format!("duplicate sector {sector:?}"),
            ));
        }
    }
    Ok(BasicPriceInputs::new(components))
}

pub fn read_basic_prices(path: &Path) -> Result<BasicPriceInputs<f64>> {
    read_basic_prices_from(open(path)?, &source_label(path))
}

/// Inflation file: `year, inflation_factor` relative to the factor base year.
pub fn read_inflation_from(read: impl Read, source: &str) -> Result<InflationTable<f64>> {
    let rows = records(read, source)?;
    expect_header(&rows[0], &["year", "inflation_factor"], source)?;
    let mut factors = BTreeMap::new();
    for (r, record) in rows[1..].iter().enumerate() {
        let row_num = r + 1;
        let year = parse_year(
            field(record, 0, source, row_num, "year")?,
            source,
            row_num,
            "year",
        )?;
        let factor = parse_number(
            field(record, 1, source, row_num, "inflation_factor")?,
            source,
            row_num,
            "inflation_factor",
        )?;
        if factors.insert(year, factor).is_some() {
            return Err(Error::parse(
                location(source, row_num, "year"),
                format!("duplicate year {year}"),
            ));
        }
    }
    InflationTable::new(factors)
}

pub fn read_inflation(path: &Path) -> Result<InflationTable<f64>> {
    read_inflation_from(open(path)?, &source_label(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEDGER: &str = "\
account_id,account_name,year,kind,amount,unit,category,statement_line
4100,District heating,2023,monetary,1800000,,Heat,Energy
4115,Electricity PPA,2023,physical,12000000,kWh,Electricity,Energy
4210,Catering refund,2023,monetary,-60000,,Food,Services
";

    #[test]
    fn ledger_parses_and_preserves_rows() {
        let ledger = read_ledger_from(LEDGER.as_bytes(), "ledger.csv").unwrap();
        assert_eq!(ledger.len(), 3);
        assert_eq!(ledger.entries[0].category, "Heat");
        assert!(ledger.entries[2].is_credit());
        assert_eq!(ledger.entries[1].unit.as_deref(), Some("kWh"));
    }

    #[test]
    fn ledger_locates_bad_amounts() {
        let bad = "\
account_id,account_name,year,kind,amount,unit,category,statement_line
4100,A,2023,monetary,100,,Heat,Energy
4200,B,2023,monetary,\"12,3,4\",,Heat,Energy
";
        let err = read_ledger_from(bad.as_bytes(), "ledger.csv").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("row 2"), "{text}");
        assert!(text.contains("amount"), "{text}");
    }

    #[test]
    fn ledger_requires_year_and_unit_rules() {
        let missing_year = "\
account_id,account_name,year,kind,amount,unit,category,statement_line
4100,A,,monetary,100,,Heat,Energy
";
        assert!(read_ledger_from(missing_year.as_bytes(), "l.csv").is_err());

        let physical_no_unit = "\
account_id,account_name,year,kind,amount,unit,category,statement_line
4100,A,2023,physical,100,,Heat,Energy
";
        assert!(read_ledger_from(physical_no_unit.as_bytes(), "l.csv").is_err());
    }

    #[test]
    fn ledger_rejects_unknown_columns() {
        let wrong = "\
account_id,name,year,kind,amount,unit,category,statement_line
4100,A,2023,monetary,100,,Heat,Energy
";
        let err = read_ledger_from(wrong.as_bytes(), "l.csv").unwrap_err();
        assert!(err.to_string().contains("header"));
    }

    #[test]
    fn account_mapping_routes() {
        let text = "\
account_id,route,region,sector,bde_terrestrial_per_unit,bde_freshwater_per_unit,bde_marine_per_unit,co2e_per_unit
4100,sector,FI,IND,,,,
4115,direct,,,8.0e-18,9.0e-19,4.0e-19,0.12
";
        let mapping = read_account_mapping_from(text.as_bytes(), "map.csv").unwrap();
        assert!(matches!(
            mapping.route("4100"),
            Some(AccountRoute::Sector { .. })
        ));
        match mapping.route("4115") {
            Some(AccountRoute::Direct { co2e_per_unit, .. }) => {
                assert_eq!(*co2e_per_unit, 0.12)
            }
            other => panic!("unexpected route {other:?}"),
        }
    }

    #[test]
    fn account_mapping_rejects_mixed_routes() {
        let text = "\
account_id,route,region,sector,bde_terrestrial_per_unit,bde_freshwater_per_unit,bde_marine_per_unit,co2e_per_unit
4100,sector,FI,IND,1e-18,,,
";
        assert!(read_account_mapping_from(text.as_bytes(), "map.csv").is_err());
    }

    #[test]
    fn price_tables_parse() {
        let prices = "\
sector,tax,sub,vat,ttm,sup
AGR,12,30,10,18,400
IND,45,10,60,95,1900
";
        let basic = read_basic_prices_from(prices.as_bytes(), "bp.csv").unwrap();
        assert!((basic.bpcf("AGR").unwrap() - 10.0 / 410.0).abs() < 1e-15);

        let inflation = "\
year,inflation_factor
2022,0.08
2023,0.12
";
        let table = read_inflation_from(inflation.as_bytes(), "inf.csv").unwrap();
        assert_eq!(table.factor(2023).unwrap(), 0.12);
        assert!(table.factor(1999).is_err());
    }
}
