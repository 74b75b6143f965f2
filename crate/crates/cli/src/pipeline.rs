//! Pipeline orchestration: each stage loads or computes one piece, errors are
//! tagged with their stage name, and outputs are written only by this module.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use biovalent::characterization::ImpactFactorSet;
use biovalent::factors::{
    derive_impact_factors, ClimateSpec, CoverageReport, FactorBuildInputs, FactorTables,
};
use biovalent::footprint::{
    aggregate_categories, biodiversity_equivalent, carbon_footprint, line_footprint,
    total_ecosystem_footprint, CategoryFootprint, CoverageMode, LineFootprint,
};
use biovalent::io;
use biovalent::ledger::{map_accounts, MappedLedger};
use biovalent::mrio::{EconomicCore, SatelliteTable};
use biovalent::offsets::CarbonOffsetQuote;
use biovalent::quadrant::{quadrant_data, render_quadrant, FootprintKind, QuadrantAnalysis, RenderConfig};
use biovalent::statement::{
    assemble_statement, ExpenseLine, FinancialLine, ImpactStatement, OffsetLine,
};

use crate::config::{build_climate, LoadedConfig, TableSet};
use crate::report::{self, OutputFormat};

/// One role's loaded economic inputs.
struct LoadedTables {
    core: EconomicCore<f64>,
    satellite: SatelliteTable<f64>,
}

fn load_tables(cfg: &LoadedConfig, tables: &TableSet, aggregations: &[(String, String)]) -> Result<LoadedTables> {
    let flows_path = cfg.resolve(&tables.flows);
    let (index, z) = io::read_flow_matrix(&flows_path)?;
    let y = io::read_final_demand(&cfg.resolve(&tables.final_demand), &index)?;
    let core = match &tables.gross_output {
        Some(path) => {
            let x = io::read_gross_output(&cfg.resolve(path), &index)?;
            EconomicCore::with_output(index.clone(), z, y, x)?
        }
        None => EconomicCore::new(index.clone(), z, y)?,
    };
    let mut satellite = io::read_satellite(&cfg.resolve(&tables.satellite), &index)?;
    for (pattern, name) in aggregations {
        let (aggregated, warning) = satellite.aggregate_rows(pattern, name)?;
        if let Some(warning) = warning {
            eprintln!("warning: {warning}");
        }
        satellite = aggregated;
    }
    Ok(LoadedTables { core, satellite })
}

/// Build the factor set from economic tables per the config.
pub fn build_factors(cfg: &LoadedConfig) -> Result<(ImpactFactorSet<f64>, CoverageReport)> {
    let factors_cfg = &cfg.config.factors;
    let tables_cfg = factors_cfg
        .tables
        .as_ref()
        .ok_or_else(|| anyhow!("factors.tables is required to build factors"))?;
    let concordance_cfg = factors_cfg
        .concordance
        .as_ref()
        .ok_or_else(|| anyhow!("factors.concordance is required to build factors"))?;

    let aggregations: Vec<(String, String)> = factors_cfg
        .aggregate_stressors
        .iter()
        .map(|rule| (rule.pattern.clone(), rule.name.clone()))
        .collect();

    let intensity = load_tables(cfg, tables_cfg, &aggregations)?;
    let attribution = match &factors_cfg.attribution_tables {
        Some(tables) => Some(load_tables(cfg, tables, &aggregations)?),
        None => None,
    };

    let regions = io::read_region_concordance(&cfg.resolve(&concordance_cfg.regions))?;
    let drivers = io::read_driver_concordance(&cfg.resolve(&concordance_cfg.drivers))?;
    let continents = match &concordance_cfg.continents {
        Some(path) => io::read_continents(&cfg.resolve(path))?,
        None => BTreeMap::new(),
    };
    let characterization =
        io::read_characterization(&cfg.resolve(&concordance_cfg.characterization), &continents)?;

    let climate_characterization = build_climate(&cfg.config.climate)?;
    let mut gas_rows = BTreeMap::new();
    for row in &cfg.config.climate.gas_rows {
        gas_rows.insert(row.stressor.clone(), row.gas.clone());
    }
    let climate = ClimateSpec {
        gas_rows,
        characterization: climate_characterization,
    };

    let mut provenance = vec![
        ("base_year".to_string(), cfg.config.base_year.to_string()),
        (
            "source".to_string(),
            tables_cfg.flows.display().to_string(),
        ),
    ];
    if let Some(year) = factors_cfg.attribution_year {
        provenance.push(("attribution_year".to_string(), year.to_string()));
    }

    let attribution_ref = attribution.as_ref().unwrap_or(&intensity);
    derive_impact_factors(&FactorBuildInputs {
        intensity: FactorTables {
            core: &intensity.core,
            satellite: &intensity.satellite,
        },
        attribution: FactorTables {
            core: &attribution_ref.core,
            satellite: &attribution_ref.satellite,
        },
        regions: &regions,
        drivers: &drivers,
        characterization: &characterization,
        climate: &climate,
        provenance,
    })
    .map_err(Into::into)
}

/// Import a precomputed factor set or build one from tables.
pub fn load_or_build_factors(
    cfg: &LoadedConfig,
) -> Result<(ImpactFactorSet<f64>, Option<CoverageReport>)> {
    match &cfg.config.factors.precomputed {
        Some(path) => {
            let set = io::import_factor_set(&cfg.resolve(path))?;
            Ok((set, None))
        }
        None => {
            let (set, report) = build_factors(cfg)?;
            Ok((set, Some(report)))
        }
    }
}

/// Everything the footprint stage produces.
pub struct FootprintBundle {
    pub lines: Vec<LineFootprint<f64>>,
    pub categories: Vec<CategoryFootprint<f64>>,
    pub statement_lines: Vec<ExpenseLine<f64>>,
    pub total_bde: f64,
    pub total_co2e_kg: f64,
}

/// Map the ledger and apply the factors.
pub fn compute_footprints(
    cfg: &LoadedConfig,
    factors: &ImpactFactorSet<f64>,
) -> Result<FootprintBundle> {
    let ledger_cfg = &cfg.config.ledger;
    let ledger = io::read_ledger(&cfg.resolve(&ledger_cfg.file))?;
    let mapping = io::read_account_mapping(&cfg.resolve(&ledger_cfg.mapping))?;
    let inflation = io::read_inflation(&cfg.resolve(&ledger_cfg.inflation))?;
    let prices = io::read_basic_prices(&cfg.resolve(&ledger_cfg.basic_prices))?;
    let mapped: MappedLedger<f64> = map_accounts(&ledger, &mapping, &inflation, &prices)?;

    let mode = if ledger_cfg.strict_coverage {
        CoverageMode::Strict
    } else {
        CoverageMode::FlagZero
    };
    let mut lines = Vec::with_capacity(mapped.lines.len());
    for mapped_line in &mapped.lines {
        lines.push(line_footprint(mapped_line, factors, mode)?);
    }

    let categories = aggregate_categories(&lines, cfg.config.footprint.categories.as_deref())?;
    let statement_lines = group_statement_lines(&lines);
    let total = total_ecosystem_footprint(&lines);
    Ok(FootprintBundle {
        total_bde: biodiversity_equivalent(&total),
        total_co2e_kg: carbon_footprint(&lines),
        lines,
        categories,
        statement_lines,
    })
}

/// Group line footprints into statement expense lines, in order of first
/// appearance. Financial amounts are the nominal ledger values.
fn group_statement_lines(lines: &[LineFootprint<f64>]) -> Vec<ExpenseLine<f64>> {
    let mut order: Vec<String> = Vec::new();
    let mut totals: BTreeMap<String, ExpenseLine<f64>> = BTreeMap::new();
    for line in lines {
        if !order.contains(&line.statement_line) {
            order.push(line.statement_line.clone());
        }
        let entry = totals
            .entry(line.statement_line.clone())
            .or_insert_with(|| ExpenseLine {
                name: line.statement_line.clone(),
                amount_eur: 0.0,
                co2e_kg: 0.0,
                bde: 0.0,
            });
        entry.amount_eur += line.nominal_eur;
        entry.co2e_kg += line.co2e_kg;
        entry.bde += biodiversity_equivalent(&line.ecosystems);
    }
    order
        .into_iter()
        .map(|name| totals.remove(&name).expect("grouped above"))
        .collect()
}

/// Assemble the impact statement from config financials, footprint lines and
/// the configured offset scenarios. The first scenario prices the carbon
/// offset line (the carbon price is market-wide, not country-specific).
pub fn build_statement(
    cfg: &LoadedConfig,
    bundle: &FootprintBundle,
    scenario_filter: Option<&str>,
) -> Result<ImpactStatement<f64>> {
    let revenue: Vec<FinancialLine<f64>> = cfg
        .config
        .statement
        .revenue
        .iter()
        .map(|line| FinancialLine {
            name: line.name.clone(),
            amount_eur: line.amount_eur,
        })
        .collect();
    let gains: Vec<FinancialLine<f64>> = cfg
        .config
        .statement
        .gains
        .iter()
        .map(|line| FinancialLine {
            name: line.name.clone(),
            amount_eur: line.amount_eur,
        })
        .collect();

    let mut offset_lines: Vec<OffsetLine<f64>> = Vec::new();
    if let Some(first) = cfg.config.scenarios.first() {
        let quote = CarbonOffsetQuote::new(
            bundle.total_co2e_kg / 1000.0,
            first.carbon_price,
            first.fx_rate,
        )?;
        offset_lines.push(OffsetLine::carbon(&quote, bundle.total_co2e_kg));
    }
    for scenario_cfg in &cfg.config.scenarios {
        if let Some(filter) = scenario_filter {
            if scenario_cfg.name != filter {
                continue;
            }
        }
        let scenario = scenario_cfg.to_scenario()?;
        let quote = scenario.quote(bundle.total_bde)?;
        offset_lines.push(OffsetLine::biodiversity(
            &scenario.name,
            &scenario.country,
            &quote,
        ));
    }
    if let Some(filter) = scenario_filter {
        if !offset_lines.iter().any(|l| l.scenario.as_deref() == Some(filter)) {
            bail!("unknown offset scenario {filter:?}");
        }
    }

    let statement = assemble_statement(
        revenue,
        bundle.statement_lines.clone(),
        gains,
        offset_lines,
    )?;
    for warning in &statement.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(statement)
}

/// Quadrant analysis for the configured footprint kind.
pub fn build_quadrant(
    cfg: &LoadedConfig,
    categories: &[CategoryFootprint<f64>],
) -> Result<QuadrantAnalysis<f64>> {
    let kind = FootprintKind::parse(&cfg.config.quadrant.kind)?;
    quadrant_data(categories, kind, &cfg.config.quadrant.iso_shares).map_err(Into::into)
}

pub fn render_quadrant_svg(cfg: &LoadedConfig, analysis: &QuadrantAnalysis<f64>) -> String {
    let mut render = RenderConfig::default();
    if let Some(title) = &cfg.config.quadrant.title {
        render.title = title.clone();
    }
    render_quadrant(analysis, &render)
}

/// Files written by a full pipeline run.
pub struct RunOutputs {
    pub files: Vec<PathBuf>,
}

/// Execute the whole pipeline and write every report into `out_dir`.
///
/// Partially written outputs are removed when any stage fails.
pub fn run_pipeline(
    cfg: &LoadedConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<RunOutputs> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = run_pipeline_inner(cfg, out_dir, format, &mut written);
    match result {
        Ok(()) => Ok(RunOutputs { files: written }),
        Err(error) => {
            for path in &written {
                let _ = fs::remove_file(path);
            }
            Err(error)
        }
    }
}

fn run_pipeline_inner(
    cfg: &LoadedConfig,
    out_dir: &Path,
    format: OutputFormat,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("stage write: cannot create {}", out_dir.display()))?;

    let (factors, coverage) = load_or_build_factors(cfg).context("stage factors")?;
    if let Some(report) = &coverage {
        eprintln!("coverage: {}", report.summary());
    }

    let factors_path = out_dir.join("factors.csv");
    io::export_factor_set(&factors, &factors_path).context("stage write")?;
    written.push(factors_path);

    let bundle = compute_footprints(cfg, &factors).context("stage footprint")?;

    let categories_path = out_dir.join(format.file_name("footprint_categories"));
    report::write_category_report(&bundle, &categories_path, format)
        .context("stage write")?;
    written.push(categories_path);

    let lines_path = out_dir.join(format.file_name("footprint_lines"));
    report::write_statement_line_report(&bundle, &lines_path, format).context("stage write")?;
    written.push(lines_path);

    let statement = build_statement(cfg, &bundle, None).context("stage statement")?;
    let statement_path = out_dir.join(format.file_name("statement"));
    report::write_statement(&statement, &statement_path, format).context("stage write")?;
    written.push(statement_path);

    let analysis = build_quadrant(cfg, &bundle.categories).context("stage quadrant")?;
    let svg = render_quadrant_svg(cfg, &analysis);
    let quadrant_path = out_dir.join("quadrant.svg");
    fs::write(&quadrant_path, svg)
        .with_context(|| format!("stage write: {}", quadrant_path.display()))?;
    written.push(quadrant_path);

    Ok(())
}

/// Validate every configured input and report diagnostics.
pub fn validate(cfg: &LoadedConfig) -> Result<Vec<String>> {
    let mut notes = Vec::new();
    let (factors, coverage) = load_or_build_factors(cfg)?;
    factors.validate()?;
    notes.push(format!(
        "factor set: {} positions, {} zero-coverage",
        factors.index.len(),
        factors
            .coverage
            .iter()
            .filter(|f| **f == biovalent::characterization::CoverageFlag::ZeroCoverage)
            .count()
    ));
    if let Some(report) = coverage {
        notes.push(format!("coverage: {}", report.summary()));
        for warning in &report.warnings {
            notes.push(format!("satellite: {warning}"));
        }
    }
    let bundle = compute_footprints(cfg, &factors)?;
    notes.push(format!(
        "ledger: {} lines, total {:.1} tCO2e, {}",
        bundle.lines.len(),
        bundle.total_co2e_kg / 1000.0,
        biovalent::footprint::format_bde(bundle.total_bde)
    ));
    for scenario in &cfg.config.scenarios {
        let quote = scenario.to_scenario()?.quote(bundle.total_bde)?;
        notes.push(format!(
            "scenario {}: {:.0} ha, {:.0} EUR total, {:.0} EUR/yr",
            scenario.name, quote.required_area_ha, quote.total_cost, quote.annual_cost
        ));
    }
    Ok(notes)
}
