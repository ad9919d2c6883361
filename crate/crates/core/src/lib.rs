//! Numerics for the thermal Casimir force between two conducting slabs in
//! the loop (Feynman–Kac–Itô) representation of a quantum Coulomb plasma
//! coupled to the transverse electromagnetic field.

pub mod error;
pub mod fit;
pub mod force;
pub mod loopspace;
pub mod par;
pub mod potentials;
pub mod quadrature;
pub mod screening;
pub mod special;

pub use error::{Error, Result};
pub use par::Execution;
