//! The value-transforming financial-environmental impact statement.
//!
//! An income-statement layout extended with footprint columns: expenses carry
//! carbon (kg CO2e) and biodiversity (BDe) columns next to their currency
//! amounts, offset lines price the footprints and carry negative footprint
//! columns, and net positions show the financial result with and without the
//! offsets. All arithmetic is in full currency units; thousands-rounding
//! happens only at presentation.
//!
//! Following the published layout, the per-scenario net income deducts the
//! selected biodiversity offset cost from the plain net income; the carbon
//! offset line prices the carbon column but is shown as a line item only.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::offsets::{CarbonOffsetQuote, OffsetQuote};

/// A plain financial line (revenue, gains and losses).
#[derive(Debug, Clone)]
pub struct FinancialLine<S> {
    pub name: String,
    pub amount_eur: S,
}

/// An expense line with its footprint columns.
#[derive(Debug, Clone)]
pub struct ExpenseLine<S> {
    pub name: String,
    pub amount_eur: S,
    pub co2e_kg: S,
    pub bde: S,
}

/// A priced offset line. Offset columns are the (positive) footprint amounts
/// the line balances; they render negated in the statement.
#[derive(Debug, Clone)]
pub struct OffsetLine<S> {
    pub name: String,
    pub cost_eur: S,
    pub co2e_offset_kg: Option<S>,
    pub bde_offset: Option<S>,
    /// Biodiversity offset lines are scenario alternatives selected by name.
    pub scenario: Option<String>,
}

impl<S: Scalar> OffsetLine<S> {
    /// Carbon offset line from a quote, balancing the given footprint.
    pub fn carbon(quote: &CarbonOffsetQuote<S>, footprint_co2e_kg: S) -> Self {
        Self {
            name: "Carbon offsets".to_string(),
            cost_eur: quote.cost(),
            co2e_offset_kg: Some(footprint_co2e_kg),
            bde_offset: None,
            scenario: None,
        }
    }

    /// Biodiversity offset line from a quote, priced at its annual cost.
    pub fn biodiversity(scenario: &str, country: &str, quote: &OffsetQuote<S>) -> Self {
        Self {
            name: format!("Biodiversity offsets in {country}"),
            cost_eur: quote.annual_cost,
            co2e_offset_kg: None,
            bde_offset: Some(quote.offset_bde),
            scenario: Some(scenario.to_string()),
        }
    }
}

/// One net row: income plus remaining footprint columns.
#[derive(Debug, Clone)]
pub struct NetPosition<S> {
    pub label: String,
    pub scenario: Option<String>,
    pub income_eur: S,
    pub co2e_kg: S,
    pub bde: S,
}

/// The assembled statement.
#[derive(Debug, Clone)]
pub struct ImpactStatement<S> {
    pub revenue: Vec<FinancialLine<S>>,
    pub expenses: Vec<ExpenseLine<S>>,
    pub total_expenses: ExpenseLine<S>,
    pub gains_and_losses: Vec<FinancialLine<S>>,
    pub impact_pricing: Vec<OffsetLine<S>>,
    pub net_without_offsets: NetPosition<S>,
    pub net_with_offsets: Vec<NetPosition<S>>,
    /// Structural notes, e.g. footprint lines without a financial amount.
    pub warnings: Vec<String>,
}

/// Assemble the statement from its lines and priced offsets.
///
/// Totals are column sums over the expense lines. Expense lines with a
/// footprint but no financial amount produce a warning, not an error.
pub fn assemble_statement<S: Scalar>(
    revenue: Vec<FinancialLine<S>>,
    expenses: Vec<ExpenseLine<S>>,
    gains_and_losses: Vec<FinancialLine<S>>,
    impact_pricing: Vec<OffsetLine<S>>,
) -> Result<ImpactStatement<S>> {
    let mut warnings = Vec::new();
    let mut total = ExpenseLine {
        name: "Total expenses".to_string(),
        amount_eur: S::zero(),
        co2e_kg: S::zero(),
        bde: S::zero(),
    };
    for line in &expenses {
        total.amount_eur += line.amount_eur;
        total.co2e_kg += line.co2e_kg;
        total.bde += line.bde;
        if line.amount_eur.is_zero() && (!line.co2e_kg.is_zero() || !line.bde.is_zero()) {
            warnings.push(format!(
                "statement line {:?} carries a footprint but no financial amount",
                line.name
            ));
        }
    }

    let revenue_total: S = revenue.iter().map(|l| l.amount_eur).sum();
    let gains_total: S = gains_and_losses.iter().map(|l| l.amount_eur).sum();
    let net_income = revenue_total + gains_total - total.amount_eur;

    // footprint columns net against every offset line that targets them
    let carbon_offset: S = impact_pricing
        .iter()
        .filter_map(|l| l.co2e_offset_kg)
        .sum();
    let net_without = NetPosition {
        label: "Net footprint without offsets".to_string(),
        scenario: None,
        income_eur: net_income,
        co2e_kg: total.co2e_kg,
        bde: total.bde,
    };
    let mut net_with = Vec::new();
    for line in &impact_pricing {
        let Some(scenario) = &line.scenario else {
            continue;
        };
        let bde_offset = line.bde_offset.unwrap_or_else(S::zero);
        net_with.push(NetPosition {
            label: format!("Net footprint with offsets ({})", line.name),
            scenario: Some(scenario.clone()),
            income_eur: net_income - line.cost_eur,
            co2e_kg: total.co2e_kg - carbon_offset,
            bde: total.bde - bde_offset,
        });
    }

    Ok(ImpactStatement {
        revenue,
        expenses,
        total_expenses: total,
        gains_and_losses,
        impact_pricing,
        net_without_offsets: net_without,
        net_with_offsets: net_with,
        warnings,
    })
}

impl<S: Scalar> ImpactStatement<S> {
    /// Net position for a named offset scenario.
    pub fn net_position(&self, scenario: &str) -> Result<&NetPosition<S>> {
        self.net_with_offsets
            .iter()
            .find(|n| n.scenario.as_deref() == Some(scenario))
            .ok_or_else(|| Error::Scenario(format!("unknown offset scenario {scenario:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEUR: f64 = 1_000.0;

    fn fin(name: &str, keur: f64) -> FinancialLine<f64> {
        FinancialLine {
            name: name.to_string(),
            amount_eur: keur * KEUR,
        }
    }

    fn exp(name: &str, keur: f64, tco2e: f64, nbde: f64) -> ExpenseLine<f64> {
        ExpenseLine {
            name: name.to_string(),
            amount_eur: keur * KEUR,
            co2e_kg: tco2e * 1_000.0,
            bde: nbde * 1e-9,
        }
    }

    fn sample_statement() -> ImpactStatement<f64> {
        assemble_statement(
            vec![fin("Revenue", 1_000.0)],
            vec![
                exp("Energy", 400.0, 100.0, 2.0),
                exp("Travel", 200.0, 50.0, 1.0),
            ],
            vec![fin("Gains", 50.0), fin("Losses", -10.0)],
            vec![
                OffsetLine {
                    name: "Carbon offsets".to_string(),
                    cost_eur: 30.0 * KEUR,
                    co2e_offset_kg: Some(150.0 * 1_000.0),
                    bde_offset: None,
                    scenario: None,
                },
                OffsetLine {
                    name: "Biodiversity offsets in X".to_string(),
                    cost_eur: 500.0 * KEUR,
                    co2e_offset_kg: None,
                    bde_offset: Some(3.0e-9),
                    scenario: Some("x".to_string()),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn totals_are_column_sums() {
        let s = sample_statement();
        assert_eq!(s.total_expenses.amount_eur, 600.0 * KEUR);
        assert_eq!(s.total_expenses.co2e_kg, 150_000.0);
        assert!((s.total_expenses.bde - 3.0e-9).abs() < 1e-21);
    }

    #[test]
    fn net_positions_follow_the_layout() {
        let s = sample_statement();
        // 1000 + 40 - 600 = 440
        assert_eq!(s.net_without_offsets.income_eur, 440.0 * KEUR);
        assert_eq!(s.net_without_offsets.co2e_kg, 150_000.0);

        let with = s.net_position("x").unwrap();
        assert_eq!(with.income_eur, (440.0 - 500.0) * KEUR);
        // full offsetting zeroes both footprint columns
        assert_eq!(with.co2e_kg, 0.0);
        assert!(with.bde.abs() < 1e-22);
    }

    #[test]
    fn unknown_scenario_is_a_selection_error() {
        let s = sample_statement();
        assert!(matches!(s.net_position("nowhere"), Err(Error::Scenario(_))));
    }

    #[test]
    fn footprint_without_financials_warns() {
        let s = assemble_statement(
            vec![],
            vec![exp("Phantom", 0.0, 10.0, 0.0)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("Phantom"));
    }
}
