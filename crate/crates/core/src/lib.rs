//! Exact certification of zero terms in rational linear recurrences.

pub mod certificate;
pub mod certifier;
pub mod classifier;
pub mod cubic;
pub mod exact_arith;
pub mod recurrence;
pub mod residue_symbol;
pub mod verifier;

pub use exact_arith::Rat;
