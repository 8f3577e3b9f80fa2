//! Quadratic residue patterns over prime fields and the point counts behind them.

pub mod curves;
pub mod error;
pub mod k3;
pub mod modarith;
pub mod oracle;
pub mod patterns;
pub mod quadgraphs;
pub mod record;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use modarith::{build_context, primes_in, FieldContext, ResidueFilter};
pub use record::{Value, VerificationRecord};
pub use verify::{run_campaign, with_workers, Claim, RunManifest, Tally};
