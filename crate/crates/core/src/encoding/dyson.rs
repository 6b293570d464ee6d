//! First-order Dyson expansion of the free decay over one waiting period.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::code::{encode, CodeSubspaces, LogicalQubit};
use crate::dynamics::{evolve_effective, LindbladModel, StepControl};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, Axis, StateVector};

/// Branch weights and normalized branch states after a waiting period `τ`.
#[derive(Clone, Debug)]
pub struct JumpMixture {
    /// `[p₀, p_x, p_y]`.
    pub probabilities: [f64; 3],
    /// `[no jump, x jump, y jump]`.
    pub states: [StateVector; 3],
    pub gamma_tau: f64,
}

impl JumpMixture {
    /// Subnormalized mixture `Σ pₖ|ψₖ⟩⟨ψₖ|`.
    pub fn density(&self) -> DMatrix<C64> {
        self.probabilities
            .iter()
            .zip(&self.states)
            .map(|(p, s)| s.density() * C64::new(*p, 0.0))
            .fold(
                DMatrix::zeros(self.states[0].dim(), self.states[0].dim()),
                |a, b| a + b,
            )
    }

    /// Probability not covered by the three branches.
    pub fn residual(&self) -> f64 {
        1.0 - self.probabilities.iter().sum::<f64>()
    }
}

/// Closed-form branch weights `(p₀, p_x = p_y)` for a code state of four
/// quanta at zero temperature.
pub fn branch_probabilities(gamma_tau: f64) -> (f64, f64) {
    let p0 = (-4.0 * gamma_tau).exp();
    (p0, 2.0 * p0 * (gamma_tau.exp() - 1.0))
}

/// Builds the no-jump and single-jump branches to first order in the jumps.
///
/// The no-jump branch is `U(τ)ψ` under the effective Hamiltonian and a jump
/// branch is `√((e^{γτ} − 1)/γ) A U(τ)ψ` with `A = √γ a`.
pub fn dyson_first_order(
    q: &LogicalQubit,
    code: &CodeSubspaces,
    gamma: f64,
    tau: f64,
) -> Result<JumpMixture> {
    if !(gamma > 0.0 && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need gamma > 0 and tau >= 0, got {gamma}, {tau}"
        )));
    }
    let space = code.space();
    let psi = encode(q, code)?;
    let model = LindbladModel::motional_damping(space, gamma, 0.0)?;
    let survived = evolve_effective(&model, &psi, 0.0, tau, StepControl::default())?;
    let weight = C64::new(((gamma * tau).exp_m1() / gamma).sqrt() * gamma.sqrt(), 0.0);
    let jx = annihilation(space, Axis::X)?
        .apply(&survived)?
        .scaled(weight);
    let jy = annihilation(space, Axis::Y)?
        .apply(&survived)?
        .scaled(weight);
    let probabilities = [survived.norm_sqr(), jx.norm_sqr(), jy.norm_sqr()];
    Ok(JumpMixture {
        probabilities,
        states: [survived.normalized()?, jx.normalized()?, jy.normalized()?],
        gamma_tau: gamma * tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::code::{build_code, decode_on};
    use crate::hilbert::SpaceSpec;

    #[test]
    fn branch_weights_match_closed_form() {
        let code = build_code(&SpaceSpec::two_mode(5, 1).unwrap(), 0.0, 0.0).unwrap();
        let q = LogicalQubit::new(C64::new(0.8, 0.0), C64::new(0.0, 0.6)).unwrap();
        let m = dyson_first_order(&q, &code, 2.0, 0.025).unwrap();
        let (p0, px) = branch_probabilities(0.05);
        assert!((p0 - 0.818730753).abs() < 1e-9);
        assert!((px - 0.083_954_446_7).abs() < 1e-9);
        assert!((m.probabilities[0] - p0).abs() < 1e-8);
        assert!((m.probabilities[1] - px).abs() < 1e-8);
        assert!((m.probabilities[2] - px).abs() < 1e-8);
        // The x branch carries the logical amplitudes unchanged.
        let d = decode_on(&m.states[1], &code.h1x).unwrap();
        assert!((d.c_plus - q.c_plus).norm() < 1e-9 && (d.c_minus - q.c_minus).norm() < 1e-9);
    }
}
