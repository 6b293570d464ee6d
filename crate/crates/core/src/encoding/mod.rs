//! The two-dimensional motional code: subspaces, encoding, jump structure
//! and the reversibility conditions that make the jumps correctable.

pub mod bogolyubov;
pub mod code;
pub mod dyson;
pub mod reversibility;

pub use bogolyubov::{bogolyubov, rotated_fock, rotated_ladder, ModeRotation};
pub use code::{
    build_code, build_code_at, decode, decode_on, encode, encode_on, gram_deviation,
    orthonormalize, CodeSubspaces, Decoded, LogicalQubit,
};
pub use dyson::{branch_probabilities, dyson_first_order, JumpMixture};
pub use reversibility::{
    check_no_jump_condition, check_reversibility, NoJumpReport, NoJumpSample, ReversibilityReport,
};
