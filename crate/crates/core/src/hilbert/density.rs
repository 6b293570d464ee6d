//! Dense density-matrix utilities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::state::StateVector;

/// Eigenvalues of a Hermitian matrix (the anti-Hermitian part is discarded).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> DVector<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
}

/// Trace distance `½‖ρ − σ‖₁` for Hermitian arguments.
pub fn trace_distance(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    0.5 * hermitian_eigenvalues(&(rho - sigma))
        .iter()
        .map(|e| e.abs())
        .sum::<f64>()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
pub fn pure_fidelity(psi: &StateVector, rho: &DMatrix<C64>) -> f64 {
    let a = psi.amplitudes();
    (a.adjoint() * rho * a)[(0, 0)].re
}

/// `Tr(Pρ)` for the projector onto the span of an orthonormal set.
pub fn subspace_population(basis: &[&StateVector], rho: &DMatrix<C64>) -> f64 {
    basis.iter().map(|b| pure_fidelity(b, rho)).sum()
}

pub fn trace(m: &DMatrix<C64>) -> C64 {
    m.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::space::SpaceSpec;

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let s = SpaceSpec::new(vec![2], 1, None).unwrap();
        let a = StateVector::basis(&s, &[0], 0, 0).unwrap().density();
        let b = StateVector::basis(&s, &[2], 0, 0).unwrap().density();
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
        assert!(trace_distance(&a, &a) < 1e-14);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        );
        let mut e: Vec<f64> = hermitian_eigenvalues(&m).iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&m) + 1.0).abs() < 1e-14);
    }
}
