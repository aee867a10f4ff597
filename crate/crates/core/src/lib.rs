//! Records of random sequences.
//!
//! - [`order`]: comparison outcomes, record kinds and ordered spaces.
//! - [`dist`]: distributions with cdf, quantile and hazard functions.
//! - [`extract`]: batch and streaming record extraction.
//! - [`laws`]: closed-form laws of record values and record times.
//! - [`oracle`]: exact enumeration and simplex quadrature to check the laws.
//! - [`mc`]: reproducible parallel Monte-Carlo and goodness-of-fit tests.
//! - [`verify`]: the acceptance suite and its tables.
//! - [`cli`]: the `records` command line.

pub mod cli;
pub mod dist;
pub mod extract;
pub mod laws;
pub mod mc;
pub mod oracle;
pub mod order;
pub mod verify;

pub use dist::{DistError, DistributionSpec};
pub use extract::{extract_all, ExtractError, ExtractorState, RecordEvent, RecordSequence};
pub use laws::{FormulaId, LawError, LawValue};
pub use order::{ComparisonOutcome, OrderedSpace, ProductOrder, RealLine, RecordKind};
