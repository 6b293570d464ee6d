//! Parallel trajectory ensembles with order-independent averaging.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::lindblad::LindbladModel;
use super::trajectory::{run_trajectory_with_rng, trajectory_rng, TrajectoryOptions};
use crate::error::{Error, Result};
use crate::hilbert::{density, StateVector};

/// Number of batches used for the statistical error of ensemble averages.
pub const ENSEMBLE_BATCHES: usize = 20;

/// Averaged trajectory ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// `(1/N) Σ |ψᵢ⟩⟨ψᵢ|`.
    pub density: DMatrix<C64>,
    /// Averages over contiguous index batches.
    pub batch_densities: Vec<DMatrix<C64>>,
    /// Jump count of every trajectory, in index order.
    pub jump_counts: Vec<usize>,
    pub trajectories: usize,
}

/// Trace distance to a reference together with its sampling error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleComparison {
    pub trace_distance: f64,
    /// Expected trace distance produced by sampling noise alone, estimated
    /// from the spread of batch averages.
    pub standard_error: f64,
}

impl EnsembleResult {
    /// Compares the ensemble average with a reference density matrix.
    pub fn compare(&self, reference: &DMatrix<C64>) -> EnsembleComparison {
        let trace_distance = density::trace_distance(&self.density, reference);
        let k = self.batch_densities.len();
        let standard_error = if k > 1 {
            let spread: f64 = self
                .batch_densities
                .iter()
                .map(|b| density::trace_distance(b, &self.density))
                .sum::<f64>()
                / k as f64;
            spread / ((k - 1) as f64).sqrt()
        } else {
            f64::INFINITY
        };
        EnsembleComparison {
            trace_distance,
            standard_error,
        }
    }
}

/// Runs `n` trajectories in parallel. Trajectory `i` draws from the stream
/// keyed by `(seed, i)`, and results are summed in index order, so the output
/// does not depend on thread scheduling.
pub fn run_ensemble(
    model: &LindbladModel,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    n: usize,
    seed: u64,
    opts: TrajectoryOptions,
) -> Result<EnsembleResult> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "ensemble needs at least one trajectory".into(),
        ));
    }
    let runs: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| {
            run_trajectory_with_rng(
                model,
                psi0,
                t0,
                t1,
                opts,
                &mut trajectory_rng(seed, i as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let d = model.space().dim();
    let k = ENSEMBLE_BATCHES.min(n);
    let mut batches = vec![DMatrix::<C64>::zeros(d, d); k];
    let mut sizes = vec![0usize; k];
    let mut jump_counts = Vec::with_capacity(n);
    for (i, run) in runs.iter().enumerate() {
        let b = i * k / n;
        let a = run.final_state.amplitudes();
        batches[b] += a * a.adjoint();
        sizes[b] += 1;
        jump_counts.push(run.jumps.len());
    }
    let mut total = DMatrix::<C64>::zeros(d, d);
    for (b, size) in batches.iter_mut().zip(&sizes) {
        total += &*b;
        *b /= C64::new(*size as f64, 0.0);
    }
    total /= C64::new(n as f64, 0.0);
    Ok(EnsembleResult {
        density: total,
        batch_densities: batches,
        jump_counts,
        trajectories: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate::{evolve_lindblad, StepControl};
    use crate::hilbert::SpaceSpec;

    #[test]
    fn ensemble_is_deterministic_and_tracks_lindblad() {
        let s = SpaceSpec::new(vec![2], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[2], 0, 0).unwrap();
        let a = run_ensemble(&m, &psi, 0.0, 0.5, 2000, 11, TrajectoryOptions::default()).unwrap();
        let b = run_ensemble(&m, &psi, 0.0, 0.5, 2000, 11, TrajectoryOptions::default()).unwrap();
        assert_eq!(a.density, b.density);
        let exact = evolve_lindblad(&m, &psi.density(), 0.0, 0.5, StepControl::default()).unwrap();
        let cmp = a.compare(&exact);
        assert!(cmp.trace_distance < 4.0 * cmp.standard_error, "{cmp:?}");
        assert!((a.density.trace().re - 1.0).abs() < 1e-12);
    }
}
