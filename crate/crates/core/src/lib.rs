//! Isomorphism classification of (ind-)varieties of generalized flags.

pub mod acceptance;
pub mod counting;
pub mod decision;
pub mod derived;
pub mod error;
pub mod flag;
pub mod linalg;
pub mod oracle;
pub mod order;
pub mod sample;
pub mod syntax;
pub mod witness;

pub use error::{Error, Result, Violation};
pub use flag::{FiniteFlagVariety, FlagDescriptor, FormType, LieType, Middle};
pub use order::{Atom, BlockSize, Cardinality, WeightedOrder};
