//! Factored Hilbert spaces, sparse operators and states.

pub mod density;
pub mod operator;
pub mod space;
pub mod sparse;
pub mod state;

pub use operator::{
    annihilation, cavity_annihilation, creation, number, projector, transition, LinearOperator,
};
pub use space::{Axis, BasisLabel, Factor, SpaceSpec, LEVEL_A, LEVEL_B, LEVEL_C};
pub use sparse::CsrMatrix;
pub use state::StateVector;
