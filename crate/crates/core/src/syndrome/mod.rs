//! Syndrome extraction: number-sensitive entanglers and photon readout.

pub mod detect;
pub mod entangler;
pub mod readout;

pub use detect::{leakage, Detector, EntanglerStage, PhotonRecord, SyndromeOutcome, LEAKAGE_TOL};
pub use entangler::{
    entangler, number_rotation, EntanglerCoupling, EntanglerPulse, SYNDROME_ROTATION,
};
pub use readout::{
    cavity_model, photon_gun_probability, readout_branches, simulate_cavity_readout, CavityReadout,
    ReadoutBranch, BRANCH_FLOOR, READOUT_LEVEL_TOL, READOUT_TAIL,
};
