//! Organizational consumption accounts and their harmonization to the factor
//! base year's basic prices.
//!
//! Monetary amounts go through two adjustments before factors apply:
//! inflation back to the base year, `IAP = FAP * (1 - IF)`, and the
//! purchaser-to-basic price conversion, `HP = IAP * (1 - BPCF)`. The factored
//! form keeps the two-step route bit-identical to the closed form
//! `FAP * (1 - IF) * (1 - BPCF)`. `IF` is the fraction of the nominal value
//! attributable to price increase since the base year, as supplied by the
//! inflation table. Physical amounts pass through untouched.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::types::ByEcosystem;

// ---------------------------------------------------------------------------
// Entries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Monetary,
    Physical,
}

impl EntryKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "monetary" => Ok(EntryKind::Monetary),
            "physical" => Ok(EntryKind::Physical),
            other => Err(Error::Invalid(format!("unknown entry kind {other:?}"))),
        }
    }
}

/// One dated consumption entry. Monetary amounts are in currency units and
/// may be negative (credit notes); physical entries carry their own unit.
#[derive(Debug, Clone)]
pub struct LedgerEntry<S> {
    pub account_id: String,
    pub account_name: String,
    pub year: i32,
    pub kind: EntryKind,
    pub amount: S,
    pub unit: Option<String>,
    pub category: String,
    pub statement_line: String,
}

impl<S: Scalar> LedgerEntry<S> {
    /// Credit notes flow through with their sign preserved.
    pub fn is_credit(&self) -> bool {
        self.kind == EntryKind::Monetary && self.amount < S::zero()
    }
}

#[derive(Debug, Clone)]
pub struct Ledger<S> {
    pub entries: Vec<LedgerEntry<S>>,
}

impl<S: Scalar> Ledger<S> {
    pub fn new(entries: Vec<LedgerEntry<S>>) -> Result<Self> {
        for entry in &entries {
            if !entry.amount.is_finite() {
                return Err(Error::Invalid(format!(
                    "account {} has a non-finite amount",
                    entry.account_id
                )));
            }
            if entry.kind == EntryKind::Physical && entry.unit.is_none() {
                return Err(Error::Invalid(format!(
                    "physical account {} has no unit",
                    entry.account_id
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Price harmonization
// ---------------------------------------------------------------------------

/// Inflation factors per accounting year, relative to the factor base year.
#[derive(Debug, Clone)]
pub struct InflationTable<S> {
    factors: BTreeMap<i32, S>,
}

impl<S: Scalar> InflationTable<S> {
    pub fn new(factors: BTreeMap<i32, S>) -> Result<Self> {
        if factors.values().any(|v| !v.is_finite()) {
            return Err(Error::Config("inflation factors must be finite".into()));
        }
        Ok(Self { factors })
    }

    pub fn factor(&self, year: i32) -> Result<S> {
        self.factors.get(&year).copied().ok_or_else(|| {
            Error::Config(format!("no inflation factor configured for year {year}"))
        })
    }
}

/// Inflation adjustment: `IAP = FAP * (1 - IF)`.
pub fn adjust_inflation<S: Scalar>(amount: S, inflation: S) -> S {
    amount * (S::one() - inflation)
}

/// National-accounts components needed for the basic price conversion.
#[derive(Debug, Clone, Copy)]
pub struct PriceComponents<S> {
    /// Taxes on products excluding invoiced VAT.
    pub tax: S,
    /// Subsidies on products.
    pub sub: S,
    /// VAT not deductible by the purchaser.
    pub vat: S,
    /// Trade and transport margins.
    pub ttm: S,
    /// Total supply of the sector.
    pub sup: S,
}

/// Basic price conversion factor:
/// `BPCF = (TAX - SUB + VAT + TTM) / (SUP + TAX - SUB + VAT + TTM)`.
///
/// The factor may be negative when subsidies dominate.
pub fn compute_bpcf<S: Scalar>(c: &PriceComponents<S>) -> Result<S> {
    let margins = c.tax - c.sub + c.vat + c.ttm;
    let denominator = c.sup + margins;
    if denominator.is_zero() || !denominator.is_finite() {
        return Err(Error::DegenerateSector {
            label: "basic price inputs".into(),
            reason: "zero or non-finite conversion denominator".into(),
        });
    }
    Ok(margins / denominator)
}

/// Per-sector basic price inputs.
#[derive(Debug, Clone)]
pub struct BasicPriceInputs<S> {
    components: BTreeMap<String, PriceComponents<S>>,
}

impl<S: Scalar> BasicPriceInputs<S> {
    pub fn new(components: BTreeMap<String, PriceComponents<S>>) -> Self {
        Self { components }
    }

    pub fn bpcf(&self, sector: &str) -> Result<S> {
        let c = self.components.get(sector).ok_or_else(|| {
            Error::Config(format!("no basic price inputs for sector {sector:?}"))
        })?;
        compute_bpcf(c).map_err(|_| Error::DegenerateSector {
            label: sector.to_string(),
            reason: "zero basic price conversion denominator".into(),
        })
    }
}

/// Full harmonization: `HP = FAP * (1 - IF) * (1 - BPCF)`.
pub fn harmonize_price<S: Scalar>(amount: S, inflation: S, bpcf: S) -> S {
    adjust_inflation(amount, inflation) * (S::one() - bpcf)
}

// ---------------------------------------------------------------------------
// Account mapping
// ---------------------------------------------------------------------------

/// How a ledger account reaches impact factors: through a product sector of
/// the factor set, or directly with per-unit intensities.
#[derive(Debug, Clone)]
pub enum AccountRoute<S> {
    Sector { region: String, sector: String },
    Direct {
        bde_per_unit: ByEcosystem<S>,
        co2e_per_unit: S,
    },
}

#[derive(Debug, Clone)]
pub struct AccountMapping<S> {
    routes: BTreeMap<String, AccountRoute<S>>,
}

impl<S: Scalar> AccountMapping<S> {
    pub fn new(routes: BTreeMap<String, AccountRoute<S>>) -> Result<Self> {
        for (account, route) in &routes {
            if let AccountRoute::Direct {
                bde_per_unit,
                co2e_per_unit,
            } = route
            {
                let ok = bde_per_unit.is_finite()
                    && bde_per_unit.terrestrial >= S::zero()
                    && bde_per_unit.freshwater >= S::zero()
                    && bde_per_unit.marine >= S::zero()
                    && co2e_per_unit.is_finite()
                    && *co2e_per_unit >= S::zero();
                if !ok {
                    return Err(Error::Invalid(format!(
                        "direct intensities for account {account:?} must be finite and >= 0"
                    )));
                }
            }
        }
        Ok(Self { routes })
    }

    pub fn route(&self, account_id: &str) -> Option<&AccountRoute<S>> {
        self.routes.get(account_id)
    }
}

/// A ledger entry resolved against the mapping and price tables.
#[derive(Debug, Clone)]
pub struct MappedLine<S> {
    pub entry: LedgerEntry<S>,
    pub resolved: ResolvedRoute<S>,
}

#[derive(Debug, Clone)]
pub enum ResolvedRoute<S> {
    Sector {
        region: String,
        sector: String,
        nominal_eur: S,
        harmonized_eur: S,
    },
    Direct {
        amount: S,
        bde_per_unit: ByEcosystem<S>,
        co2e_per_unit: S,
    },
}

/// Mapping audit: one record per entry.
#[derive(Debug, Clone)]
pub struct AuditRecord {
    pub account_id: String,
    pub assignment: String,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MappedLedger<S> {
    pub lines: Vec<MappedLine<S>>,
    /// Harmonized currency totals grouped by (region, sector).
    pub sector_totals: BTreeMap<(String, String), S>,
    pub audit: Vec<AuditRecord>,
}

/// Resolve every ledger entry against the account mapping, harmonizing
/// monetary amounts and carrying physical amounts through untouched.
///
/// Unmapped accounts fail collectively so the error lists them all.
pub fn map_accounts<S: Scalar>(
    ledger: &Ledger<S>,
    mapping: &AccountMapping<S>,
    inflation: &InflationTable<S>,
    prices: &BasicPriceInputs<S>,
) -> Result<MappedLedger<S>> {
    let mut unmapped: Vec<String> = Vec::new();
    for entry in &ledger.entries {
        if mapping.route(&entry.account_id).is_none() && !unmapped.contains(&entry.account_id) {
            unmapped.push(entry.account_id.clone());
        }
    }
    if !unmapped.is_empty() {
        return Err(Error::UnmappedAccounts(unmapped.join(", ")));
    }

    let mut lines = Vec::with_capacity(ledger.entries.len());
    let mut sector_totals: BTreeMap<(String, String), S> = BTreeMap::new();
    let mut audit = Vec::with_capacity(ledger.entries.len());
    for entry in &ledger.entries {
        let route = mapping.route(&entry.account_id).expect("checked above");
        match (entry.kind, route) {
            (EntryKind::Monetary, AccountRoute::Sector { region, sector }) => {
                let inflation_factor = inflation.factor(entry.year)?;
                let bpcf = prices.bpcf(sector)?;
                let harmonized = harmonize_price(entry.amount, inflation_factor, bpcf);
                *sector_totals
                    .entry((region.clone(), sector.clone()))
                    .or_insert_with(S::zero) += harmonized;
                audit.push(AuditRecord {
                    account_id: entry.account_id.clone(),
                    assignment: format!("{region}:{sector}"),
                    note: entry.is_credit().then(|| "credit note".to_string()),
                });
                lines.push(MappedLine {
                    entry: entry.clone(),
                    resolved: ResolvedRoute::Sector {
                        region: region.clone(),
                        sector: sector.clone(),
                        nominal_eur: entry.amount,
                        harmonized_eur: harmonized,
                    },
                });
            }
            (EntryKind::Physical, AccountRoute::Direct {
                bde_per_unit,
                co2e_per_unit,
            }) => {
                audit.push(AuditRecord {
                    account_id: entry.account_id.clone(),
                    assignment: "direct intensities".to_string(),
                    note: None,
                });
                lines.push(MappedLine {
                    entry: entry.clone(),
                    resolved: ResolvedRoute::Direct {
                        amount: entry.amount,
                        bde_per_unit: *bde_per_unit,
                        co2e_per_unit: *co2e_per_unit,
                    },
                });
            }
            (EntryKind::Monetary, AccountRoute::Direct { .. }) => {
                return Err(Error::Config(format!(
                    "monetary account {} is mapped to direct intensities",
                    entry.account_id
                )));
            }
            (EntryKind::Physical, AccountRoute::Sector { .. }) => {
                return Err(Error::Config(format!(
                    "physical account {} is mapped to a product sector",
                    entry.account_id
                )));
            }
        }
    }
    Ok(MappedLedger {
        lines,
        sector_totals,
        audit,
    })
}
