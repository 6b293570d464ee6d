//! Time evolution: Schrödinger, effective non-Hermitian, Lindblad and
//! quantum-jump trajectories.

pub mod ensemble;
pub mod hamiltonian;
pub mod integrate;
pub mod lindblad;
pub mod trajectory;

pub use ensemble::{run_ensemble, EnsembleComparison, EnsembleResult};
pub use hamiltonian::{Envelope, PulsedHamiltonian, Term};
pub use integrate::{
    check_positive, evolve_effective, evolve_lindblad, evolve_lindblad_sampled, evolve_schrodinger,
    evolve_schrodinger_observed, StepControl,
};
pub use lindblad::{dissipator_superoperator, JumpChannel, LindbladModel};
pub use trajectory::{
    run_trajectory, run_trajectory_with_rng, trajectory_rng, JumpEvent, TrajectoryOptions,
    TrajectoryResult,
};
