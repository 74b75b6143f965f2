//! Library surface of the command-line pipeline, exposed so integration
//! tests can drive the stages directly.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{load_config, LoadedConfig};
pub use pipeline::{
    build_factors, build_quadrant, build_statement, compute_footprints, load_or_build_factors,
    render_quadrant_svg, run_pipeline, validate, FootprintBundle, RunOutputs,
};
pub use report::OutputFormat;
