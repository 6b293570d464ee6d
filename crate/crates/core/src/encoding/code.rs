//! Code and jump subspaces, logical qubits, encoding and decoding.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, Axis, SpaceSpec, StateVector, LEVEL_A};

/// Orthonormality tolerance for basis pairs.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Logical qubit `c₊|ψ₊⟩ + c₋|ψ₋⟩` with the code phases it was defined for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalQubit {
    pub c_plus: C64,
    pub c_minus: C64,
    pub phi1: f64,
    pub phi2: f64,
}

impl LogicalQubit {
    /// Normalizes the amplitudes; phases default to zero.
    pub fn new(c_plus: C64, c_minus: C64) -> Result<Self> {
        let n = (c_plus.norm_sqr() + c_minus.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            c_plus: c_plus / n,
            c_minus: c_minus / n,
            phi1: 0.0,
            phi2: 0.0,
        })
    }

    pub fn with_phases(mut self, phi1: f64, phi2: f64) -> Self {
        self.phi1 = phi1;
        self.phi2 = phi2;
        self
    }

    /// Haar-random qubit.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(q) = Self::new(C64::new(g[0], g[1]), C64::new(g[2], g[3])) {
                return q;
            }
        }
    }
}

/// Basis pairs `(|ψ₊⟩, |ψ₋⟩)` of the code space and the two jump subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSubspaces {
    pub h0: [StateVector; 2],
    pub h1x: [StateVector; 2],
    pub h1y: [StateVector; 2],
    pub phi1: f64,
    pub phi2: f64,
}

/// Builds the code with all states on electronic level `|a⟩`.
pub fn build_code(space: &SpaceSpec, phi1: f64, phi2: f64) -> Result<CodeSubspaces> {
    build_code_at(space, phi1, phi2, LEVEL_A)
}

/// Builds the code with all states on the given electronic level.
///
/// `H₀` is spanned by `(|4,0⟩ + e^{iφ₁}|0,4⟩ ± √2 e^{iφ₂}|2,2⟩)/2`. The jump
/// bases are the normalized images under `a_x` and `a_y`.
pub fn build_code_at(
    space: &SpaceSpec,
    phi1: f64,
    phi2: f64,
    level: usize,
) -> Result<CodeSubspaces> {
    if space.num_modes() != 2 || space.mode_cutoffs.iter().any(|&c| c < 4) {
        return Err(Error::InvalidSpace(
            "the code needs two modes with cutoff >= 4".into(),
        ));
    }
    let one = C64::new(1.0, 0.0);
    let e1 = C64::from_polar(1.0, phi1);
    let e2 = C64::from_polar(2f64.sqrt(), phi2);
    let plus = StateVector::fock_superposition(
        space,
        level,
        &[(one, &[4, 0]), (e1, &[0, 4]), (e2, &[2, 2])],
    )?;
    let minus = StateVector::fock_superposition(
        space,
        level,
        &[(one, &[4, 0]), (e1, &[0, 4]), (-e2, &[2, 2])],
    )?;
    let ax = annihilation(space, Axis::X)?;
    let ay = annihilation(space, Axis::Y)?;
    let h1x = orthonormalize([ax.apply(&plus)?, ax.apply(&minus)?])?;
    let h1y = orthonormalize([ay.apply(&plus)?, ay.apply(&minus)?])?;
    Ok(CodeSubspaces {
        h0: [plus, minus],
        h1x,
        h1y,
        phi1,
        phi2,
    })
}

/// Gram–Schmidt on a pair.
pub fn orthonormalize(pair: [StateVector; 2]) -> Result<[StateVector; 2]> {
    let [a, b] = pair;
    let a = a.normalized()?;
    let ov = a.inner(&b)?;
    let b = b.add_scaled(-ov, &a)?.normalized()?;
    Ok([a, b])
}

/// Largest deviation of the Gram matrix of `basis` from the identity.
pub fn gram_deviation(basis: &[&StateVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b)? - C64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

impl CodeSubspaces {
    pub fn space(&self) -> &SpaceSpec {
        self.h0[0].space()
    }

    /// Basis pair of the jump subspace for the given axis.
    pub fn jump_basis(&self, axis: Axis) -> &[StateVector; 2] {
        match axis {
            Axis::X => &self.h1x,
            Axis::Y => &self.h1y,
        }
    }

    /// All six basis states in the order `H₀, H₁ˣ, H₁ʸ`.
    pub fn all_states(&self) -> [&StateVector; 6] {
        [
            &self.h0[0],
            &self.h0[1],
            &self.h1x[0],
            &self.h1x[1],
            &self.h1y[0],
            &self.h1y[1],
        ]
    }

    /// Gram deviation of the six states together.
    pub fn orthonormality_error(&self) -> Result<f64> {
        gram_deviation(&self.all_states())
    }

    /// The same code on another electronic level of the same space.
    pub fn at_level(&self, level: usize) -> Result<CodeSubspaces> {
        build_code_at(self.space(), self.phi1, self.phi2, level)
    }
}

/// `c₊|ψ₊⟩₀ + c₋|ψ₋⟩₀`.
pub fn encode(q: &LogicalQubit, code: &CodeSubspaces) -> Result<StateVector> {
    encode_in(q, &code.h0, (q.phi1, q.phi2), (code.phi1, code.phi2))
}

fn encode_in(
    q: &LogicalQubit,
    basis: &[StateVector; 2],
    qp: (f64, f64),
    cp: (f64, f64),
) -> Result<StateVector> {
    if (qp.0 - cp.0).abs() > 1e-15 || (qp.1 - cp.1).abs() > 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "qubit phases ({}, {}) differ from code phases ({}, {})",
            qp.0, qp.1, cp.0, cp.1
        )));
    }
    basis[0]
        .clone()
        .scaled(q.c_plus)
        .add_scaled(q.c_minus, &basis[1])
}

/// `c₊|ψ₊⟩ + c₋|ψ₋⟩` on an arbitrary basis pair.
pub fn encode_on(q: &LogicalQubit, basis: &[StateVector; 2]) -> Result<StateVector> {
    encode_in(q, basis, (0.0, 0.0), (0.0, 0.0))
}

/// Amplitudes of a state on a basis pair and the weight outside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decoded {
    pub c_plus: C64,
    pub c_minus: C64,
    /// `1 − (|c₊|² + |c₋|²)/‖ψ‖²`.
    pub residual: f64,
}

impl Decoded {
    /// The decoded amplitudes as a normalized qubit.
    pub fn qubit(&self) -> Result<LogicalQubit> {
        LogicalQubit::new(self.c_plus, self.c_minus)
    }
}

/// Projects onto the code space.
pub fn decode(psi: &StateVector, code: &CodeSubspaces) -> Result<Decoded> {
    decode_on(psi, &code.h0)
}

/// Projects onto an arbitrary orthonormal basis pair.
pub fn decode_on(psi: &StateVector, basis: &[StateVector; 2]) -> Result<Decoded> {
    let c_plus = basis[0].inner(psi)?;
    let c_minus = basis[1].inner(psi)?;
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let residual = (1.0 - (c_plus.norm_sqr() + c_minus.norm_sqr()) / n).max(0.0);
    Ok(Decoded {
        c_plus,
        c_minus,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::trajectory_rng;

    fn space() -> SpaceSpec {
        SpaceSpec::two_mode(5, 1).unwrap()
    }

    #[test]
    fn code_is_orthonormal() {
        let code = build_code(&space(), 0.3, -1.1).unwrap();
        assert!(code.orthonormality_error().unwrap() < 1e-14);
    }

    #[test]
    fn jump_bases_at_zero_phase() {
        let s = space();
        let code = build_code(&s, 0.0, 0.0).unwrap();
        let one = C64::new(1.0, 0.0);
        let x_plus =
            StateVector::fock_superposition(&s, 0, &[(one, &[3, 0]), (one, &[1, 2])]).unwrap();
        let y_minus =
            StateVector::fock_superposition(&s, 0, &[(one, &[0, 3]), (-one, &[2, 1])]).unwrap();
        assert!((code.h1x[0].fidelity(&x_plus).unwrap() - 1.0).abs() < 1e-14);
        assert!((code.h1x[0].inner(&x_plus).unwrap() - one).norm() < 1e-14);
        assert!((code.h1y[1].inner(&y_minus).unwrap() - one).norm() < 1e-14);
    }

    #[test]
    fn encode_decode_round_trip() {
        let code = build_code(&space(), 0.0, 0.0).unwrap();
        let q = LogicalQubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let d = decode(&encode(&q, &code).unwrap(), &code).unwrap();
        assert!((d.c_plus - q.c_plus).norm() < 1e-14 && (d.c_minus - q.c_minus).norm() < 1e-14);
        assert!(d.residual < 1e-14);
    }

    #[test]
    fn qubit_normalization_and_phase_check() {
        assert!(LogicalQubit::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).is_err());
        let q = LogicalQubit::new(C64::new(3.0, 0.0), C64::new(4.0, 0.0)).unwrap();
        assert!((q.c_plus.re - 0.6).abs() < 1e-15);
        let code = build_code(&space(), 0.0, 0.0).unwrap();
        assert!(encode(&q.with_phases(0.0, 0.2), &code).is_err());
        let mut rng = trajectory_rng(5, 0);
        let r = LogicalQubit::random(&mut rng);
        assert!((r.c_plus.norm_sqr() + r.c_minus.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_cutoff_rejected() {
        assert!(build_code(&SpaceSpec::two_mode(3, 1).unwrap(), 0.0, 0.0).is_err());
    }
}
