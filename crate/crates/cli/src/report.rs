//! Report serialization. CSV output follows the statement's presentation
//! style (thousands of euros with space separators, two-decimal nBDe);
//! JSON output carries raw numbers next to the display strings. All writers
//! iterate ordered structures so output bytes are deterministic.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use biovalent::footprint::format_bde;
use biovalent::statement::ImpactStatement;
use serde::Serialize;

use crate::pipeline::FootprintBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => anyhow::bail!("unknown output format {other:?} (expected csv or json)"),
        }
    }

    pub fn file_name(self, stem: &str) -> String {
        match self {
            OutputFormat::Csv => format!("{stem}.csv"),
            OutputFormat::Json => format!("{stem}.json"),
        }
    }
}

/// Thousands of euros, rounded, with space-separated digit groups.
pub fn format_keur(eur: f64) -> String {
    let keur = (eur / 1000.0).round() as i64;
    group_thousands(keur)
}

/// Tonnes from kilograms, rounded, space-separated digit groups.
pub fn format_tonnes(kg: f64) -> String {
    group_thousands((kg / 1000.0).round() as i64)
}

/// Biodiversity column of the statement: the value in nBDe, two decimals.
pub fn format_nbde(bde: f64) -> String {
    format!("{:.2}", bde * 1e9)
}

fn group_thousands(value: i64) -> String {
    let negative = value < 0;
    let digits = value.abs().to_string();
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            grouped.push(' ');
        }
        grouped.push(ch);
    }
    if negative {
        format!("-{grouped}")
    } else {
        grouped
    }
}

// ---------------------------------------------------------------------------
// Footprint reports
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct CategoryRecord {
    category: String,
    consumption_eur: f64,
    consumption_harmonized_eur: f64,
    bde: f64,
    bde_display: String,
    tco2e: f64,
    bde_intensity: Option<f64>,
    co2e_intensity: Option<f64>,
    bde_share: f64,
    co2e_share: f64,
}

fn category_records(bundle: &FootprintBundle) -> Vec<CategoryRecord> {
    bundle
        .categories
        .iter()
        .map(|category| CategoryRecord {
            category: category.category.clone(),
            consumption_eur: category.consumption_eur,
            consumption_harmonized_eur: category.consumption_harmonized_eur,
            bde: category.bde.value,
            bde_display: category.bde.display(),
            tco2e: category.co2e_kg / 1000.0,
            bde_intensity: category.bde_intensity,
            co2e_intensity: category.co2e_intensity,
            bde_share: if bundle.total_bde != 0.0 {
                category.bde.value / bundle.total_bde
            } else {
                0.0
            },
            co2e_share: if bundle.total_co2e_kg != 0.0 {
                category.co2e_kg / bundle.total_co2e_kg
            } else {
                0.0
            },
        })
        .collect()
}

fn optional(value: Option<f64>) -> String {
    value.map(|v| format!("{v:e}")).unwrap_or_default()
}

pub fn write_category_report(
    bundle: &FootprintBundle,
    path: &Path,
    format: OutputFormat,
) -> Result<()> {
    let records = category_records(bundle);
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&records)? + "\n",
        OutputFormat::Csv => {
            let mut out = String::from(
                "category,consumption_eur,consumption_harmonized_eur,bde,bde_display,tco2e,\
                 bde_intensity,co2e_intensity,bde_share,co2e_share\n",
            );
            for r in &records {
                out.push_str(&format!(
                    "{},{},{},{:e},{},{},{},{},{:.6},{:.6}\n",
                    r.category,
                    r.consumption_eur,
                    r.consumption_harmonized_eur,
                    r.bde,
                    r.bde_display,
                    r.tco2e,
                    optional(r.bde_intensity),
                    optional(r.co2e_intensity),
                    r.bde_share,
                    r.co2e_share,
                ));
            }
            out
        }
    };
    fs::write(path, text).with_context(|| path.display().to_string())
}

#[derive(Debug, Serialize)]
struct StatementLineRecord {
    statement_line: String,
    consumption_eur: f64,
    bde: f64,
    bde_display: String,
    tco2e: f64,
    bde_intensity: Option<f64>,
    co2e_intensity: Option<f64>,
}

pub fn write_statement_line_report(
    bundle: &FootprintBundle,
    path: &Path,
    format: OutputFormat,
) -> Result<()> {
    let records: Vec<StatementLineRecord> = bundle
        .statement_lines
        .iter()
        .map(|line| StatementLineRecord {
            statement_line: line.name.clone(),
            consumption_eur: line.amount_eur,
            bde: line.bde,
            bde_display: format_bde(line.bde),
            tco2e: line.co2e_kg / 1000.0,
            bde_intensity: (line.amount_eur > 0.0).then(|| line.bde / line.amount_eur),
            co2e_intensity: (line.amount_eur > 0.0).then(|| line.co2e_kg / line.amount_eur),
        })
        .collect();
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&records)? + "\n",
        OutputFormat::Csv => {
            let mut out = String::from(
                "statement_line,consumption_eur,bde,bde_display,tco2e,bde_intensity,co2e_intensity\n",
            );
            for r in &records {
                out.push_str(&format!(
                    "{},{},{:e},{},{},{},{}\n",
                    r.statement_line,
                    r.consumption_eur,
                    r.bde,
                    r.bde_display,
                    r.tco2e,
                    optional(r.bde_intensity),
                    optional(r.co2e_intensity),
                ));
            }
            out
        }
    };
    fs::write(path, text).with_context(|| path.display().to_string())
}

// ---------------------------------------------------------------------------
// Impact statement
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct StatementRow {
    section: String,
    line: String,
    financial_keur: String,
    carbon_tco2e: String,
    biodiversity_nbde: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    financial_eur: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    co2e_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bde: Option<f64>,
}

fn statement_rows(statement: &ImpactStatement<f64>) -> Vec<StatementRow> {
    let mut rows = Vec::new();
    let absent = "-".to_string();
    for line in &statement.revenue {
        rows.push(StatementRow {
            section: "Revenue".to_string(),
            line: line.name.clone(),
            financial_keur: format_keur(line.amount_eur),
            carbon_tco2e: absent.clone(),
            biodiversity_nbde: absent.clone(),
            financial_eur: Some(line.amount_eur),
            co2e_kg: None,
            bde: None,
        });
    }
    for line in &statement.expenses {
        rows.push(StatementRow {
            section: "Expenses".to_string(),
            line: line.name.clone(),
            financial_keur: format_keur(line.amount_eur),
            carbon_tco2e: format_tonnes(line.co2e_kg),
            biodiversity_nbde: format_nbde(line.bde),
            financial_eur: Some(line.amount_eur),
            co2e_kg: Some(line.co2e_kg),
            bde: Some(line.bde),
        });
    }
    let total = &statement.total_expenses;
    rows.push(StatementRow {
        section: "Expenses".to_string(),
        line: total.name.clone(),
        financial_keur: format_keur(total.amount_eur),
        carbon_tco2e: format_tonnes(total.co2e_kg),
        biodiversity_nbde: format_nbde(total.bde),
        financial_eur: Some(total.amount_eur),
        co2e_kg: Some(total.co2e_kg),
        bde: Some(total.bde),
    });
    for line in &statement.gains_and_losses {
        rows.push(StatementRow {
            section: "Losses and gains".to_string(),
            line: line.name.clone(),
            financial_keur: format_keur(line.amount_eur),
            carbon_tco2e: absent.clone(),
            biodiversity_nbde: absent.clone(),
            financial_eur: Some(line.amount_eur),
            co2e_kg: None,
            bde: None,
        });
    }
    for line in &statement.impact_pricing {
        rows.push(StatementRow {
            section: "Impact pricing".to_string(),
            line: line.name.clone(),
            financial_keur: format_keur(line.cost_eur),
            carbon_tco2e: line
                .co2e_offset_kg
                .map(|kg| format_tonnes(-kg))
                .unwrap_or_else(|| absent.clone()),
            biodiversity_nbde: line
                .bde_offset
                .map(|bde| format_nbde(-bde))
                .unwrap_or_else(|| absent.clone()),
            financial_eur: Some(line.cost_eur),
            co2e_kg: line.co2e_offset_kg.map(|kg| -kg),
            bde: line.bde_offset.map(|b| -b),
        });
    }
    let net = &statement.net_without_offsets;
    rows.push(StatementRow {
        section: "Net income / footprint".to_string(),
        line: net.label.clone(),
        financial_keur: format_keur(net.income_eur),
        carbon_tco2e: format_tonnes(net.co2e_kg),
        biodiversity_nbde: format_nbde(net.bde),
        financial_eur: Some(net.income_eur),
        co2e_kg: Some(net.co2e_kg),
        bde: Some(net.bde),
    });
    for net in &statement.net_with_offsets {
        rows.push(StatementRow {
            section: "Net income / footprint".to_string(),
            line: net.label.clone(),
            financial_keur: format_keur(net.income_eur),
            carbon_tco2e: format_tonnes(net.co2e_kg),
            biodiversity_nbde: format_nbde(net.bde),
            financial_eur: Some(net.income_eur),
            co2e_kg: Some(net.co2e_kg),
            bde: Some(net.bde),
        });
    }
    rows
}

pub fn write_statement(
    statement: &ImpactStatement<f64>,
    path: &Path,
    format: OutputFormat,
) -> Result<()> {
    let rows = statement_rows(statement);
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
        OutputFormat::Csv => {
            let mut out =
                String::from("section,line,financial_keur,carbon_tco2e,biodiversity_nbde\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.section,
                    escape_csv(&row.line),
                    escape_csv(&row.financial_keur),
                    escape_csv(&row.carbon_tco2e),
                    escape_csv(&row.biodiversity_nbde),
                ));
            }
            out
        }
    };
    fs::write(path, text).with_context(|| path.display().to_string())
}

fn escape_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
