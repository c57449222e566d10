//! Experiment orchestration for the PNC workbench: seeded Monte Carlo BER
//! sweeps, rate and energy tables, the cut-set locus and scheduling runs,
//! all written as CSV.

pub mod ber;
pub mod config;
pub mod csv;
pub mod sched;
pub mod stats;
pub mod tables;

pub use ber::{run_ber_sweep, run_ber_sweeps, substream_seed, BerPoint, BerScheme};
pub use config::{parse_grid, ExperimentConfig, ExperimentKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pnc_core::PncError),
    #[error(transparent)]
    Sched(#[from] pnc_netsched::SchedError),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// 2 for bad input, 3 for anything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
