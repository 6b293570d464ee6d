//! Master-equation models: a Hamiltonian plus weighted jump channels.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::hamiltonian::PulsedHamiltonian;
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, creation, Axis, CsrMatrix, LinearOperator, SpaceSpec};

/// Jump channel with operator `√rate · op`.
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub label: String,
    pub op: LinearOperator,
    pub rate: f64,
}

impl JumpChannel {
    pub fn new(label: impl Into<String>, op: LinearOperator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "jump rate must be finite and >= 0, got {rate}"
            )));
        }
        Ok(Self {
            label: label.into(),
            op,
            rate,
        })
    }

    /// Scaled jump operator `√rate · op`.
    pub fn jump_operator(&self) -> LinearOperator {
        self.op.scale(C64::new(self.rate.sqrt(), 0.0))
    }
}

/// Hamiltonian and jump channels on a common space.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    space: SpaceSpec,
    hamiltonian: Option<PulsedHamiltonian>,
    channels: Vec<JumpChannel>,
    jumps: Vec<CsrMatrix>,
    decay: CsrMatrix,
}

impl LindbladModel {
    pub fn new(
        space: &SpaceSpec,
        hamiltonian: Option<PulsedHamiltonian>,
        channels: Vec<JumpChannel>,
    ) -> Result<Self> {
        if let Some(h) = &hamiltonian {
            if h.space() != space {
                return Err(Error::SpaceMismatch);
            }
        }
        if channels.iter().any(|c| c.op.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let jumps: Vec<CsrMatrix> = channels
            .iter()
            .map(|c| c.jump_operator().matrix().clone())
            .collect();
        let d = space.dim();
        let decay = jumps.iter().fold(CsrMatrix::zeros(d, d), |acc, l| {
            acc.add_scaled(C64::new(0.5, 0.0), &l.adjoint().matmul(l))
        });
        Ok(Self {
            space: space.clone(),
            hamiltonian,
            channels,
            jumps,
            decay,
        })
    }

    /// Motional damping of every mode toward a thermal state with mean
    /// occupation `n_bar`: channels `√(γ(n̄+1)) a` and, for `n̄ > 0`, `√(γn̄) a†`.
    pub fn motional_damping(space: &SpaceSpec, gamma: f64, n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "n_bar must be >= 0, got {n_bar}"
            )));
        }
        let mut channels = Vec::new();
        for axis in [Axis::X, Axis::Y].into_iter().take(space.num_modes()) {
            channels.push(JumpChannel::new(
                format!("{}-", axis.name()),
                annihilation(space, axis)?,
                gamma * (n_bar + 1.0),
            )?);
            if n_bar > 0.0 {
                channels.push(JumpChannel::new(
                    format!("{}+", axis.name()),
                    creation(space, axis)?,
                    gamma * n_bar,
                )?);
            }
        }
        Self::new(space, None, channels)
    }

    pub fn with_hamiltonian(mut self, h: PulsedHamiltonian) -> Result<Self> {
        if h.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn hamiltonian(&self) -> Option<&PulsedHamiltonian> {
        self.hamiltonian.as_ref()
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    /// Scaled jump matrices `√rate · op`, in channel order.
    pub fn jump_matrices(&self) -> &[CsrMatrix] {
        &self.jumps
    }

    /// `½ Σ L†L`.
    pub fn decay_matrix(&self) -> &CsrMatrix {
        &self.decay
    }

    /// Effective non-Hermitian Hamiltonian `H(t) − (i/2)ΣL†L` at time `t`.
    pub fn effective_hamiltonian_at(&self, t: f64) -> CsrMatrix {
        let d = self.space.dim();
        let h = self
            .hamiltonian
            .as_ref()
            .map(|h| h.matrix_at(t))
            .unwrap_or_else(|| CsrMatrix::zeros(d, d));
        h.add_scaled(C64::new(0.0, -1.0), &self.decay)
    }

    /// Rate bound for step control.
    pub fn rate_bound(&self) -> f64 {
        self.hamiltonian
            .as_ref()
            .map(|h| h.rate_bound())
            .unwrap_or(0.0)
            + self.decay.norm_inf()
    }
}

/// Dense Lindblad dissipator for column-stacked `vec(ρ)`, built from
/// already-scaled jump operators.
pub fn dissipator_superoperator(jumps: &[LinearOperator]) -> DMatrix<C64> {
    let d = jumps.first().map(|j| j.space().dim()).unwrap_or(0);
    let id = DMatrix::<C64>::identity(d, d);
    let mut out = DMatrix::zeros(d * d, d * d);
    for j in jumps {
        let a = j.matrix().to_dense();
        let ata = a.adjoint() * &a;
        out += a.conjugate().kronecker(&a);
        out -= id.kronecker(&ata) * C64::new(0.5, 0.0);
        out -= ata.transpose().kronecker(&id) * C64::new(0.5, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::StateVector;

    #[test]
    fn thermal_channels() {
        let s = SpaceSpec::two_mode(3, 1).unwrap();
        let m = LindbladModel::motional_damping(&s, 2.0, 0.0).unwrap();
        assert_eq!(m.channels().len(), 2);
        let m = LindbladModel::motional_damping(&s, 2.0, 0.5).unwrap();
        let labels: Vec<_> = m.channels().iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["x-", "x+", "y-", "y+"]);
        assert!((m.channels()[0].rate - 3.0).abs() < 1e-15);
        assert!((m.channels()[1].rate - 1.0).abs() < 1e-15);
        assert!(LindbladModel::motional_damping(&s, 1.0, -0.1).is_err());
    }

    #[test]
    fn decay_matrix_is_half_number_at_zero_temperature() {
        let s = SpaceSpec::two_mode(3, 1).unwrap();
        let m = LindbladModel::motional_damping(&s, 2.0, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[2, 1], 0, 0).unwrap();
        let v = m.decay_matrix().mul_vec(psi.amplitudes());
        assert!((v - psi.amplitudes() * C64::new(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn superoperator_is_trace_preserving() {
        let s = SpaceSpec::two_mode(2, 1).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.3).unwrap();
        let jumps: Vec<_> = m.channels().iter().map(|c| c.jump_operator()).collect();
        let sup = dissipator_superoperator(&jumps);
        let d = s.dim();
        for k in 0..d * d {
            let tr: C64 = (0..d).map(|i| sup[(i * d + i, k)]).sum();
            assert!(tr.norm() < 1e-13);
        }
    }
}
