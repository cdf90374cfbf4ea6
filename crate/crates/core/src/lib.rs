//! Set families over a small ground set `[n]`: intersection statistics, transversals and
//! their bases, extremal constructions, exact closed forms, branching processes and
//! exhaustive searches.

pub mod acceptance;
mod bits;
pub mod branching;
pub mod checks;
pub mod constructions;
pub mod error;
pub mod family;
pub mod formulas;
pub mod search;
pub mod text;
pub mod transversal;

pub use bits::KSubsets;
pub use error::{Error, Result};
pub use family::{Family, GroundSet, Subset};
