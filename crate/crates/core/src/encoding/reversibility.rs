//! Reversibility and no-jump conditions on a candidate code space.

use num_complex::Complex64 as C64;

use super::code::{gram_deviation, ORTHONORMAL_TOL};
use crate::dynamics::{evolve_effective, LindbladModel, StepControl};
use crate::error::{Error, Result};
use crate::hilbert::{LinearOperator, StateVector};

/// Tolerance on `P A†A P = µ² P` and on the no-jump Gram matrix.
pub const REVERSIBILITY_TOL: f64 = 1e-10;

/// Result of the reversibility test for one jump operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReversibilityReport {
    /// Mean diagonal of `⟨bᵢ|A†A|bⱼ⟩`.
    pub mu_squared: f64,
    /// Largest entry of `⟨bᵢ|A†A|bⱼ⟩ − µ²δᵢⱼ`.
    pub max_deviation: f64,
    pub reversible: bool,
}

/// Checks `⟨ψ|A†A|ψ⟩ = µ²` for every normalized `ψ` in the span of `basis`.
pub fn check_reversibility(
    op: &LinearOperator,
    basis: &[StateVector],
) -> Result<ReversibilityReport> {
    let refs: Vec<&StateVector> = basis.iter().collect();
    let gram = gram_deviation(&refs)?;
    if gram > ORTHONORMAL_TOL {
        return Err(Error::NonOrthonormalBasis(gram));
    }
    let images: Vec<StateVector> = basis.iter().map(|b| op.apply(b)).collect::<Result<_>>()?;
    let n = basis.len();
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = images[i].inner(&images[j])?;
        }
    }
    let mu_squared = (0..n).map(|i| m[i][i].re).sum::<f64>() / n as f64;
    let mut max_deviation: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { mu_squared } else { 0.0 };
            max_deviation = max_deviation.max((v - C64::new(target, 0.0)).norm());
        }
    }
    Ok(ReversibilityReport {
        mu_squared,
        max_deviation,
        reversible: max_deviation <= REVERSIBILITY_TOL,
    })
}

/// One waiting time of the no-jump check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoJumpSample {
    pub tau: f64,
    /// Largest entry of `⟨U bᵢ|U bⱼ⟩ − s δᵢⱼ` with `s` the mean survival.
    pub max_deviation: f64,
    pub holds: bool,
}

/// Result of the no-jump check.
#[derive(Clone, Debug, PartialEq)]
pub struct NoJumpReport {
    /// Common decay rate `Γ` when every basis state is an eigenvector of
    /// `½ΣA†A` with the same eigenvalue.
    pub decay_rate: Option<f64>,
    pub samples: Vec<NoJumpSample>,
    /// True when the condition holds at every `τ` by the eigenvector argument.
    pub holds_for_all_tau: bool,
}

/// Checks that the no-jump evolution `U(τ)` at zero temperature shrinks
/// every state of the span by the same factor.
pub fn check_no_jump_condition(
    basis: &[StateVector],
    gamma: f64,
    taus: &[f64],
) -> Result<NoJumpReport> {
    let refs: Vec<&StateVector> = basis.iter().collect();
    let gram = gram_deviation(&refs)?;
    if gram > ORTHONORMAL_TOL {
        return Err(Error::NonOrthonormalBasis(gram));
    }
    let space = basis
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty basis".into()))?
        .space();
    let model = LindbladModel::motional_damping(space, gamma, 0.0)?;
    let decay = model.decay_matrix();

    let mut rates = Vec::with_capacity(basis.len());
    let mut eigen = true;
    for b in basis {
        let v = decay.mul_vec(b.amplitudes());
        let g = b.amplitudes().dotc(&v);
        eigen &= (v - b.amplitudes() * g).norm() <= REVERSIBILITY_TOL;
        rates.push(g.re);
    }
    let common = eigen
        && rates
            .iter()
            .all(|r| (r - rates[0]).abs() <= REVERSIBILITY_TOL);
    let decay_rate = common.then(|| rates[0]);

    let mut samples = Vec::with_capacity(taus.len());
    for &tau in taus {
        let evolved: Vec<StateVector> = basis
            .iter()
            .map(|b| evolve_effective(&model, b, 0.0, tau, StepControl::default()))
            .collect::<Result<_>>()?;
        let n = evolved.len();
        let mean = evolved.iter().map(|e| e.norm_sqr()).sum::<f64>() / n as f64;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { mean } else { 0.0 };
                dev = dev.max((evolved[i].inner(&evolved[j])? - C64::new(target, 0.0)).norm());
            }
        }
        // Integration error scales with the survival; compare relative to it.
        samples.push(NoJumpSample {
            tau,
            max_deviation: dev,
            holds: dev <= 1e-7 * mean.max(1e-300),
        });
    }
    Ok(NoJumpReport {
        decay_rate,
        samples,
        holds_for_all_tau: decay_rate.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::code::build_code;
    use crate::hilbert::{annihilation, creation, Axis, SpaceSpec};

    #[test]
    fn lowering_and_raising_on_code_space() {
        let s = SpaceSpec::two_mode(6, 1).unwrap();
        let code = build_code(&s, 0.0, 0.0).unwrap();
        let r = check_reversibility(&annihilation(&s, Axis::X).unwrap(), &code.h0).unwrap();
        assert!(r.reversible && (r.mu_squared - 2.0).abs() < 1e-12);
        let r = check_reversibility(&creation(&s, Axis::Y).unwrap(), &code.h0).unwrap();
        assert!(r.reversible && (r.mu_squared - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lowering_on_jump_space_is_irreversible() {
        let s = SpaceSpec::two_mode(6, 1).unwrap();
        let code = build_code(&s, 0.0, 0.0).unwrap();
        let r = check_reversibility(&annihilation(&s, Axis::X).unwrap(), &code.h1x).unwrap();
        assert!(!r.reversible);
        assert!((r.max_deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let s = SpaceSpec::two_mode(4, 1).unwrap();
        let a = StateVector::basis(&s, &[1, 0], 0, 0).unwrap();
        let r = check_reversibility(&annihilation(&s, Axis::X).unwrap(), &[a.clone(), a]);
        assert!(matches!(r, Err(Error::NonOrthonormalBasis(_))));
    }

    #[test]
    fn no_jump_condition_on_code_and_single_mode_pair() {
        let s = SpaceSpec::two_mode(5, 1).unwrap();
        let code = build_code(&s, 0.0, 0.0).unwrap();
        let r = check_no_jump_condition(&code.h0, 1.0, &[0.1, 0.5]).unwrap();
        assert!((r.decay_rate.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.samples.iter().all(|x| x.holds));

        let one = C64::new(1.0, 0.0);
        let p = StateVector::fock_superposition(&s, 0, &[(one, &[0, 0]), (one, &[4, 0])]).unwrap();
        let m = StateVector::fock_superposition(&s, 0, &[(one, &[0, 0]), (-one, &[4, 0])]).unwrap();
        let r = check_no_jump_condition(&[p, m], 1.0, &[0.0, 0.5]).unwrap();
        assert!(r.decay_rate.is_none() && !r.holds_for_all_tau);
        assert!(r.samples[0].holds);
        assert!(!r.samples[1].holds);
        assert!((r.samples[1].max_deviation - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-7);
    }
}
