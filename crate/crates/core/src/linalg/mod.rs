//! Exact linear algebra over the rationals and prime fields.

pub mod field;
pub mod forms;
pub mod matrix;
pub mod subspace;

pub use field::{Field, PrimeField, Rationals};
pub use forms::{Form, FormKind};
pub use matrix::Matrix;
pub use subspace::Subspace;
