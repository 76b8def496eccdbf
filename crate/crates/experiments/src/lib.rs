//! Executable experiment protocols over the compiled-schedule engine:
//! Rabi scans, simultaneous Ramsey, individual and parallel randomized
//! benchmarking, and crosstalk characterization.
//!
//! Every protocol is a deterministic function of (spec, model, master seed):
//! each stochastic decision draws from a stream addressed by purpose, point,
//! shot and site, so results do not depend on execution order or thread
//! count and matched seeds give matched noise across protocol variants.

pub mod crosstalk_scan;
pub mod engine;
pub mod model;
pub mod rabi;
pub mod ramsey;
pub mod rb;
mod runner;
pub mod table;

pub use crosstalk_scan::{
    run_crosstalk_scan, CrosstalkScanEntry, CrosstalkScanResult, CrosstalkScanSpec,
};
pub use engine::{run_shot, Timeline};
pub use model::{ModelError, SystemModel};
pub use rabi::{run_rabi, RabiScanSpec};
pub use ramsey::{run_ramsey, RamseySpec};
pub use rb::{run_rb, RbSpec};
pub use table::{RbSequenceRecord, ResultTable, SiteSeries, TableMetadata};

use fiberq_core::noise::NoiseError;
use fiberq_pulse::CompileError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Fit(#[from] fiberq_fit::FitError),
    #[error("post-selection failed: site occupancy never satisfied after {0} attempts")]
    PostSelection(u64),
}
