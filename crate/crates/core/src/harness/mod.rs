//! Config-driven experiments: scenario runs, DPI series, defense sweeps,
//! multi-session tables, oracle checks and Lipschitz certificates.

pub mod certify;
pub mod config;
pub mod defense;
pub mod multisession;
pub mod oracle;
pub mod output;
pub mod scenario;

pub use certify::{certificates_csv, certify, CertificateRow};
pub use config::{LabelSpec, Objective, OracleSpec, ScenarioConfig, SweepSpec, MIN_TRIALS};
pub use defense::{defense_sweep, efficiency, EfficiencyMetrics, SweepOutcome, SweepPoint};
pub use multisession::{bsc_spec, multi_session_experiment, oracle_sessions, OracleSessionRow, SessionRow};
pub use oracle::{oracle_suite, OracleSettings, OracleSummary, Violation};
pub use scenario::{dpi_check, evaluate, run_scenario, DpiSeries, ExperimentResult, LayerMi, Soundness};
