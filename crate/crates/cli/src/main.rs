use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use biovalent_cli::report::{self, OutputFormat};
use biovalent_cli::{config, pipeline};

/// Consumption-based biodiversity and carbon footprint accounting.
#[derive(Parser)]
#[command(name = "biovalent", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Pipeline configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Report format for tabular outputs.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Build the impact factor set and export it.
    Factors(CommonArgs),
    /// Compute footprints per category and statement line.
    Footprint(CommonArgs),
    /// Assemble the financial-environmental impact statement.
    Statement {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict offset lines and net positions to one scenario.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Compute the quadrant of opportunities and render it as SVG.
    Quadrant(CommonArgs),
    /// Validate all configured inputs and print diagnostics.
    Validate {
        /// Pipeline configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the full pipeline and write every report.
    Run(CommonArgs),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Factors(common) => {
            let cfg = config::load_config(&common.config)?;
            let (factors, coverage) =
                pipeline::load_or_build_factors(&cfg).context("stage factors")?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("cannot create {}", common.out.display()))?;
            let path = common.out.join("factors.csv");
            biovalent::io::export_factor_set(&factors, &path).context("stage write")?;
            if let Some(report) = coverage {
                println!("coverage: {}", report.summary());
            }
            println!("wrote {}", path.display());
        }
        Command::Footprint(common) => {
            let format = OutputFormat::parse(&common.format)?;
            let cfg = config::load_config(&common.config)?;
            let (factors, _) = pipeline::load_or_build_factors(&cfg).context("stage factors")?;
            let bundle =
                pipeline::compute_footprints(&cfg, &factors).context("stage footprint")?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("cannot create {}", common.out.display()))?;
            let categories = common.out.join(format.file_name("footprint_categories"));
            report::write_category_report(&bundle, &categories, format)?;
            let lines = common.out.join(format.file_name("footprint_lines"));
            report::write_statement_line_report(&bundle, &lines, format)?;
            println!(
                "total: {:.1} tCO2e, {}",
                bundle.total_co2e_kg / 1000.0,
                biovalent::footprint::format_bde(bundle.total_bde)
            );
            println!("wrote {}", categories.display());
            println!("wrote {}", lines.display());
        }
        Command::Statement { common, scenario } => {
            let format = OutputFormat::parse(&common.format)?;
            let cfg = config::load_config(&common.config)?;
            let (factors, _) = pipeline::load_or_build_factors(&cfg).context("stage factors")?;
            let bundle =
                pipeline::compute_footprints(&cfg, &factors).context("stage footprint")?;
            let statement = pipeline::build_statement(&cfg, &bundle, scenario.as_deref())
                .context("stage statement")?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("cannot create {}", common.out.display()))?;
            let path = common.out.join(format.file_name("statement"));
            report::write_statement(&statement, &path, format)?;
            println!("wrote {}", path.display());
        }
        Command::Quadrant(common) => {
            let cfg = config::load_config(&common.config)?;
            let (factors, _) = pipeline::load_or_build_factors(&cfg).context("stage factors")?;
            let bundle =
                pipeline::compute_footprints(&cfg, &factors).context("stage footprint")?;
            let analysis =
                pipeline::build_quadrant(&cfg, &bundle.categories).context("stage quadrant")?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("cannot create {}", common.out.display()))?;
            let path = common.out.join("quadrant.svg");
            std::fs::write(&path, pipeline::render_quadrant_svg(&cfg, &analysis))
                .with_context(|| path.display().to_string())?;
            println!("wrote {}", path.display());
        }
        Command::Validate { config: path } => {
            let cfg = config::load_config(&path)?;
            for note in pipeline::validate(&cfg).context("validate")? {
                println!("{note}");
            }
            println!("ok");
        }
        Command::Run(common) => {
            let format = OutputFormat::parse(&common.format)?;
            let cfg = config::load_config(&common.config)?;
            let outputs = pipeline::run_pipeline(&cfg, &common.out, format)?;
            for path in &outputs.files {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
