//! Exact finite-depth laboratory for blind randomness.
//!
//! Blind components ([`randomness::build_blind_test`]) see only a
//! [`approx::LogApproximation`] `(f, c)`; auditor components additionally
//! read a [`measure::Measure`]. All masses, thresholds and code lengths are
//! exact dyadic values; complexity is relative to the fixed monotone machine
//! in [`complexity`].

pub mod approx;
pub mod bits;
pub mod coding;
pub mod complexity;
pub mod dyadic;
pub mod measure;
pub mod prefix;
pub mod randomness;

pub use approx::{feasibility_check, validate_log_approx, LogApproximation};
pub use bits::BitString;
pub use complexity::{enumerate_km, ComplexityTable, EnumerationBudget};
pub use dyadic::{Dyadic, LogBounds};
pub use measure::{Measure, MeasureRegistry, MeasureSpec};
pub use prefix::{cover_mass, minimal_cover, PrefixFreeSet, StreamingCover};
pub use randomness::{TestFamily, build_blind_test, build_measure_test};
