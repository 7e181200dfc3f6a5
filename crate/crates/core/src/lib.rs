//! Constructions and numerical checks for generalized Yang–Baxter solutions.

pub mod blocks;
pub mod error;
pub mod gates;
pub mod integrability;
pub mod parallel;
pub mod perm;
pub mod registry;
pub mod tensor;
pub mod verify;
pub mod xshape;

pub use error::{GybeError, Result};
pub use tensor::CMatrix;
