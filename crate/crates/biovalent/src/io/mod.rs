//! Strict CSV schemas for every input table and the factor-set exchange file.
//!
//! All files are UTF-8 with a header row and '.' as the decimal separator;
//! scientific notation is accepted anywhere a number is. Parsing is strict:
//! unexpected or missing columns, malformed numerals and non-finite values
//! are reported with their file, row and column. This layer is concrete in
//! `f64`; it feeds the generic core through the crate-root aliases.

mod accounts;
mod concordance;
mod economic;
mod factor_file;

pub use accounts::{
    read_account_mapping, read_basic_prices, read_inflation, read_ledger,
    read_account_mapping_from, read_basic_prices_from, read_inflation_from, read_ledger_from,
};
pub use concordance::{
    read_characterization, read_characterization_from, read_continents, read_continents_from,
    read_driver_concordance, read_driver_concordance_from, read_region_concordance,
    read_region_concordance_from,
};
pub use economic::{
    read_final_demand, read_final_demand_from, read_flow_matrix, read_flow_matrix_from,
    read_gross_output, read_gross_output_from, read_satellite, read_satellite_from,
};
pub use factor_file::{
    export_factor_set, import_factor_set, import_factor_set_from, write_factor_set,
};

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn source_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// 1-based data-row location inside a file (the header is row 0).
pub(crate) fn location(source: &str, row: usize, column: &str) -> String {
    format!("{source}: row {row}, column {column}")
}

pub(crate) fn parse_number(
    text: &str,
    source: &str,
    row: usize,
    column: &str,
) -> Result<f64> {
    let trimmed = text.trim();
    let value: f64 = trimmed.parse().map_err(|_| {
        Error::parse(
            location(source, row, column),
            format!("cannot parse {trimmed:?} as a number"),
        )
    })?;
    if !value.is_finite() {
        return Err(Error::parse(
            location(source, row, column),
            "number must be finite",
        ));
    }
    Ok(value)
}

pub(crate) fn parse_year(text: &str, source: &str, row: usize, column: &str) -> Result<i32> {
    text.trim().parse().map_err(|_| {
        Error::parse(
            location(source, row, column),
            format!("cannot parse {:?} as a year", text.trim()),
        )
    })
}

/// Verify an exact header sequence.
pub(crate) fn expect_header(
    actual: &csv::StringRecord,
    expected: &[&str],
    source: &str,
) -> Result<()> {
    let found: Vec<&str> = actual.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::parse(
            format!("{source}: header"),
            format!("expected columns {expected:?}, found {found:?}"),
        ));
    }
    Ok(())
}

pub(crate) fn reader_from(read: impl Read) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(read)
}

pub(crate) fn records(
    read: impl Read,
    source: &str,
) -> Result<Vec<csv::StringRecord>> {
    let mut reader = reader_from(read);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            Error::parse(format!("{source}: row {i}"), e.to_string())
        })?;
        out.push(record);
    }
    if out.is_empty() {
        return Err(Error::parse(source, "file is empty"));
    }
    Ok(out)
}

pub(crate) fn field<'a>(
    record: &'a csv::StringRecord,
    index: usize,
    source: &str,
    row: usize,
    column: &str,
) -> Result<&'a str> {
    record.get(index).ok_or_else(|| {
        Error::parse(location(source, row, column), "missing field")
    })
}
