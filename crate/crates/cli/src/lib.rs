//! Scenario runner for the `husimi` library: strict JSON scenarios in,
//! CSV/JSON artifacts with metadata sidecars out.

pub mod error;
pub mod run;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use run::{run_canonical, run_scenario, run_scenario_file, sha256_hex, Metadata, RunSummary, TOOL_VERSION};
pub use scenario::{FranckCondonRequest, OutputKind, OverlapRequest, QDeformRequest, Scenario, StateRequest};
