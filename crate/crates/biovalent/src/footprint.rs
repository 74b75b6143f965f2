//! Footprint computation: apply impact factors to mapped consumption lines,
//! collapse ecosystem footprints into the biodiversity equivalent, and format
//! the very small numbers with metric prefixes.

use std::collections::BTreeMap;

use crate::characterization::ImpactFactorSet;
use crate::error::{Error, Result};
use crate::ledger::{MappedLine, ResolvedRoute};
use crate::num::Scalar;
use crate::types::ByEcosystem;

/// Ecosystem-resolved biodiversity footprint. Components must not be summed
/// across ecosystems directly; use [`biodiversity_equivalent`].
pub type EcosystemFootprint<S> = ByEcosystem<S>;

/// Species-share weights that collapse the three ecosystem footprints into
/// one biodiversity equivalent. The published weights sum to 0.999 and are
/// applied verbatim, without renormalization.
pub fn bde_weights<S: Scalar>() -> ByEcosystem<S> {
    ByEcosystem::new(
        S::from_f64_lossy(0.801),
        S::from_f64_lossy(0.096),
        S::from_f64_lossy(0.102),
    )
}

/// Weighted combination of the ecosystem footprints:
/// `0.801 * terrestrial + 0.096 * freshwater + 0.102 * marine`.
pub fn biodiversity_equivalent<S: Scalar>(footprint: &EcosystemFootprint<S>) -> S {
    let w = bde_weights::<S>();
    footprint.terrestrial * w.terrestrial
        + footprint.freshwater * w.freshwater
        + footprint.marine * w.marine
}

// ---------------------------------------------------------------------------
// Display formatting
// ---------------------------------------------------------------------------

/// A biodiversity equivalent value with its display form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdeQuantity<S> {
    pub value: S,
}

impl<S: Scalar> BdeQuantity<S> {
    pub fn new(value: S) -> Self {
        Self { value }
    }

    pub fn display(&self) -> String {
        format_bde(self.value.to_f64().unwrap_or(f64::NAN))
    }
}

const PREFIXES: [(&str, f64); 3] = [("n", 1e-9), ("p", 1e-12), ("f", 1e-15)];

/// Format a biodiversity equivalent with a nano/pico/femto prefix.
///
/// The first prefix whose mantissa, rounded to two decimals, lands in
/// [1, 1000) is used; zero renders as `0.00 BDe` and everything else falls
/// back to scientific notation.
pub fn format_bde(value: f64) -> String {
    if value == 0.0 {
        return "0.00 BDe".to_string();
    }
    for (prefix, scale) in PREFIXES {
        let mantissa = value / scale;
        let rounded = (mantissa * 100.0).round() / 100.0;
        let magnitude = rounded.abs();
        if (1.0..1000.0).contains(&magnitude) {
            return format!("{rounded:.2} {prefix}BDe");
        }
    }
    format!("{value:.2e} BDe")
}

/// Parse the output of [`format_bde`] back into a value.
pub fn parse_bde(text: &str) -> Result<f64> {
    let body = text
        .strip_suffix("BDe")
        .ok_or_else(|| Error::Invalid(format!("not a BDe quantity: {text:?}")))?
        .trim_end();
    for (prefix, scale) in PREFIXES {
        if let Some(mantissa) = body.strip_suffix(prefix) {
            let parsed: f64 = mantissa.trim().parse().map_err(|_| {
                Error::Invalid(format!("bad BDe mantissa in {text:?}"))
            })?;
            return Ok(parsed * scale);
        }
    }
    body.trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("bad BDe value in {text:?}")))
}

// ---------------------------------------------------------------------------
// Line footprints
// ---------------------------------------------------------------------------

/// How to treat consumption positions without factor coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMode {
    /// Fail on the first position without a factor.
    Strict,
    /// Contribute zero and flag the line.
    FlagZero,
}

/// Footprint of one mapped ledger line.
#[derive(Debug, Clone)]
pub struct LineFootprint<S> {
    pub account_id: String,
    pub category: String,
    pub statement_line: String,
    /// Nominal currency amount; zero for physical lines.
    pub nominal_eur: S,
    /// Harmonized currency amount; zero for physical lines.
    pub harmonized_eur: S,
    pub ecosystems: EcosystemFootprint<S>,
    pub co2e_kg: S,
    /// True when the line hit a position without factor coverage.
    pub flagged: bool,
}

/// Multiply one mapped line with its factors.
pub fn line_footprint<S: Scalar>(
    line: &MappedLine<S>,
    factors: &ImpactFactorSet<S>,
    mode: CoverageMode,
) -> Result<LineFootprint<S>> {
    match &line.resolved {
        ResolvedRoute::Sector {
            region,
            sector,
            nominal_eur,
            harmonized_eur,
        } => {
            let position = factors.index.position(region, sector).map_err(|_| {
                Error::Coverage(format!(
                    "no factor position for {region}:{sector} (account {})",
                    line.entry.account_id
                ))
            })?;
            let zero_coverage = factors.coverage[position]
                == crate::characterization::CoverageFlag::ZeroCoverage;
            if zero_coverage && mode == CoverageMode::Strict {
                return Err(Error::Coverage(format!(
                    "position {region}:{sector} has zero factor coverage (account {})",
                    line.entry.account_id
                )));
            }
            let amount = *harmonized_eur;
            Ok(LineFootprint {
                account_id: line.entry.account_id.clone(),
                category: line.entry.category.clone(),
                statement_line: line.entry.statement_line.clone(),
                nominal_eur: *nominal_eur,
                harmonized_eur: amount,
                ecosystems: factors.bde_per_eur[position].scale(amount),
                co2e_kg: amount * factors.co2e_per_eur[position],
                flagged: zero_coverage,
            })
        }
        ResolvedRoute::Direct {
            amount,
            bde_per_unit,
            co2e_per_unit,
        } => Ok(LineFootprint {
            account_id: line.entry.account_id.clone(),
            category: line.entry.category.clone(),
            statement_line: line.entry.statement_line.clone(),
            nominal_eur: S::zero(),
            harmonized_eur: S::zero(),
            ecosystems: bde_per_unit.scale(*amount),
            co2e_kg: *amount * *co2e_per_unit,
            flagged: false,
        }),
    }
}

/// Total carbon footprint over lines, in kg CO2e. Presentation divides by
/// 1000 for tonnes.
pub fn carbon_footprint<S: Scalar>(lines: &[LineFootprint<S>]) -> S {
    lines.iter().map(|l| l.co2e_kg).sum()
}

/// Total ecosystem footprint over lines.
pub fn total_ecosystem_footprint<S: Scalar>(lines: &[LineFootprint<S>]) -> EcosystemFootprint<S> {
    let mut total = ByEcosystem::zero();
    for line in lines {
        total.add_assign(&line.ecosystems);
    }
    total
}

// ---------------------------------------------------------------------------
// Category aggregation
// ---------------------------------------------------------------------------

/// Footprint of one consumption category.
#[derive(Debug, Clone)]
pub struct CategoryFootprint<S> {
    pub category: String,
    pub consumption_eur: S,
    pub consumption_harmonized_eur: S,
    pub ecosystems: EcosystemFootprint<S>,
    pub bde: BdeQuantity<S>,
    pub co2e_kg: S,
    /// BDe per nominal euro; `None` when the category has no consumption.
    pub bde_intensity: Option<S>,
    /// kg CO2e per nominal euro; `None` when the category has no consumption.
    pub co2e_intensity: Option<S>,
}

/// Group line footprints into categories.
///
/// When `allowed` is given it fixes the category partition: every line must
/// carry one of the allowed tags, and empty allowed categories still appear
/// with zero footprints. Untagged lines are always an error.
pub fn aggregate_categories<S: Scalar>(
    lines: &[LineFootprint<S>],
    allowed: Option<&[String]>,
) -> Result<Vec<CategoryFootprint<S>>> {
    let mut order: Vec<String> = Vec::new();
    if let Some(allowed) = allowed {
        order.extend(allowed.iter().cloned());
    }
    let mut groups: BTreeMap<String, Vec<&LineFootprint<S>>> = BTreeMap::new();
    for line in lines {
        if line.category.trim().is_empty() {
            return Err(Error::Invalid(format!(
                "line for account {} has no category tag",
                line.account_id
            )));
        }
        if let Some(allowed) = allowed {
            if !allowed.contains(&line.category) {
                return Err(Error::Invalid(format!(
                    "category {:?} (account {}) is not in the configured partition",
                    line.category, line.account_id
                )));
            }
        } else if !order.contains(&line.category) {
            order.push(line.category.clone());
        }
        groups.entry(line.category.clone()).or_default().push(line);
    }

    let mut out = Vec::with_capacity(order.len());
    for category in order {
        let members = groups.remove(&category).unwrap_or_default();
        let mut consumption = S::zero();
        let mut harmonized = S::zero();
        let mut ecosystems = ByEcosystem::zero();
        let mut co2e = S::zero();
        for line in members {
            consumption += line.nominal_eur;
            harmonized += line.harmonized_eur;
            ecosystems.add_assign(&line.ecosystems);
            co2e += line.co2e_kg;
        }
        let bde_value = biodiversity_equivalent(&ecosystems);
        let has_consumption = consumption > S::zero();
        out.push(CategoryFootprint {
            category,
            consumption_eur: consumption,
            consumption_harmonized_eur: harmonized,
            ecosystems,
            bde: BdeQuantity::new(bde_value),
            co2e_kg: co2e,
            bde_intensity: has_consumption.then(|| bde_value / consumption),
            co2e_intensity: has_consumption.then(|| co2e / consumption),
        });
    }
    Ok(out)
}
