//! File formats, road-graph ingestion, experiment sweeps and the command
//! line for [`clqaoa_core`].

pub mod cli;
pub mod clock;
mod error;
pub mod formats;
pub mod graph;
pub mod records;
pub mod report;
pub mod sweep;

pub use clock::SystemClock;
pub use error::{Error, Result};
