//! Ledger files, market data files, certificate terms and scripted scenarios
//! on top of `dcm-core`.

pub mod error;
pub mod ledger_file;
pub mod market_io;
pub mod scenario;
pub mod terms;

pub use error::DcmError;
pub use scenario::{run_scenario, Scenario, ScenarioReport, StepRecord};
