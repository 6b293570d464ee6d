//! Laser-driven couplings: pulse envelopes, Raman and sideband Hamiltonians,
//! Λ-system adiabatic passage and the derived timescales.

pub mod builders;
pub mod pulse;
pub mod timescales;

pub use builders::{
    carrier_factor, dipole_coupling_for, effective_coupling, first_pair_coupling, full_raman,
    lambda_dark_state, lambda_hamiltonian, number_sensitive, number_sensitive_composite, rwa_raman,
    series_tail_bound, sideband_coupling, sideband_jcm, sideband_series, split, split_composite,
    LambdaLeg, SidebandSeries, DEFAULT_SERIES_ORDER, SERIES_TOL,
};
pub use pulse::{pulse_area, Drive, PulseKind, PulseShape};
pub use timescales::{
    readout_threshold, syndrome_pulse_length, timescale_report, TimescaleRow, Tolerance,
};
