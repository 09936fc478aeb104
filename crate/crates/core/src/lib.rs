pub mod cli_reports;
pub mod error;
pub mod flat_core;
pub mod hecke_hyperbolic;
pub mod homology_pairing;
pub mod kvol_engine;
pub mod saddle_scan;
pub mod tolerance;

pub use error::{Error, Result};
