//! Two-interrogation jump detection: entangle along x, read out, entangle
//! along y, read out.

use rand::Rng;
use serde::Serialize;

use super::entangler::{entangler, EntanglerCoupling, EntanglerPulse, SYNDROME_ROTATION};
use super::readout::{readout_branches, ReadoutBranch};
use crate::config::{Preset, StageMode};
use crate::encoding::CodeSubspaces;
use crate::error::{Error, Result};
use crate::hilbert::{Axis, LinearOperator, SpaceSpec, StateVector};

/// Largest weight tolerated outside `H₀ ⊕ H₁ˣ ⊕ H₁ʸ` on input.
pub const LEAKAGE_TOL: f64 = 1e-9;

/// Photon record of one interrogation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhotonRecord {
    pub stage: Axis,
    pub detected: bool,
}

/// Result of the two interrogations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SyndromeOutcome {
    pub x_jump: bool,
    pub y_jump: bool,
    pub post_state: StateVector,
    pub photon_records: Vec<PhotonRecord>,
    /// Exchanges `|ψ±⟩ → |ψ∓⟩` applied by the entanglers. Each syndrome
    /// rotation exchanges the labels in every subspace.
    pub label_swaps: u32,
    /// Input weight outside the three subspaces.
    pub leakage: f64,
}

impl SyndromeOutcome {
    /// The detected jump channel, `None` for no jump or contradictory flags.
    pub fn jump(&self) -> Option<Axis> {
        match (self.x_jump, self.y_jump) {
            (true, false) => Some(Axis::X),
            (false, true) => Some(Axis::Y),
            _ => None,
        }
    }
}

/// Entangler implementation used by the detector.
#[derive(Clone, Debug, PartialEq)]
pub enum EntanglerStage {
    Analytic {
        theta: f64,
    },
    Pulsed(EntanglerPulse),
    /// Precomputed propagators of both interrogations on one space.
    Compiled {
        x: LinearOperator,
        y: LinearOperator,
    },
}

/// Syndrome detector.
#[derive(Clone, Debug, PartialEq)]
pub struct Detector {
    pub entangler: EntanglerStage,
    pub efficiency: f64,
    pub leakage_tol: f64,
}

impl Detector {
    /// Analytic entanglers at `|g|A = π/2` and a perfect detector.
    pub fn ideal() -> Self {
        Self {
            entangler: EntanglerStage::Analytic {
                theta: SYNDROME_ROTATION,
            },
            efficiency: 1.0,
            leakage_tol: LEAKAGE_TOL,
        }
    }

    /// Detector for the preset couplings. Pulsed mode integrates the
    /// number-sensitive Hamiltonian over the syndrome pulse.
    pub fn from_preset(p: &Preset, mode: StageMode) -> Self {
        let entangler = match mode {
            StageMode::Ideal => EntanglerStage::Analytic {
                theta: SYNDROME_ROTATION,
            },
            StageMode::Pulsed => {
                EntanglerStage::Pulsed(EntanglerPulse::from_preset(p, EntanglerCoupling::Ideal))
            }
        };
        Self {
            entangler,
            efficiency: p.readout.detector_efficiency,
            leakage_tol: LEAKAGE_TOL,
        }
    }

    pub fn entangle(&self, psi: &StateVector, axis: Axis) -> Result<StateVector> {
        match &self.entangler {
            EntanglerStage::Analytic { theta } => entangler(psi.space(), axis, *theta)?.apply(psi),
            EntanglerStage::Pulsed(p) => p.apply(psi, axis),
            EntanglerStage::Compiled { x, y } => match axis {
                Axis::X => x.apply(psi),
                Axis::Y => y.apply(psi),
            },
        }
    }

    /// Same detector with both entanglers replaced by their propagators on
    /// `space`, obtained by evolving every basis state once.
    pub fn compile(&self, space: &SpaceSpec) -> Result<Self> {
        let prop = |axis| -> Result<LinearOperator> {
            let cols = (0..space.dim())
                .map(|i| {
                    let l = space.label(i);
                    self.entangle(
                        &StateVector::basis(space, &l.modes, l.level, l.photons)?,
                        axis,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            LinearOperator::from_columns(space, &cols)
        };
        Ok(Self {
            entangler: EntanglerStage::Compiled {
                x: prop(Axis::X)?,
                y: prop(Axis::Y)?,
            },
            ..self.clone()
        })
    }

    fn check_input(&self, psi: &StateVector, code: &CodeSubspaces) -> Result<f64> {
        if psi.space() != code.space() {
            return Err(Error::SpaceMismatch);
        }
        let l = leakage(psi, code)?;
        if l > self.leakage_tol {
            return Err(Error::OutsideCode(l));
        }
        Ok(l)
    }

    /// Samples the readout outcomes by the Born rule.
    pub fn detect<R: Rng + ?Sized>(
        &self,
        psi: &StateVector,
        code: &CodeSubspaces,
        rng: &mut R,
    ) -> Result<SyndromeOutcome> {
        let leak = self.check_input(psi, code)?;
        let mut state = psi.clone().normalized()?;
        let mut records = Vec::with_capacity(2);
        for axis in [Axis::X, Axis::Y] {
            let branches = readout_branches(&self.entangle(&state, axis)?, self.efficiency)?;
            let chosen = sample(branches, rng);
            records.push(PhotonRecord {
                stage: axis,
                detected: chosen.photon,
            });
            state = chosen.state;
        }
        Ok(finish(state, records, leak))
    }

    /// Every readout branch with its probability.
    pub fn detect_branches(
        &self,
        psi: &StateVector,
        code: &CodeSubspaces,
    ) -> Result<Vec<(f64, SyndromeOutcome)>> {
        let leak = self.check_input(psi, code)?;
        let mut frontier = vec![(1.0, psi.clone().normalized()?, Vec::new())];
        for axis in [Axis::X, Axis::Y] {
            let mut next = Vec::new();
            for (p, state, records) in frontier {
                for b in readout_branches(&self.entangle(&state, axis)?, self.efficiency)? {
                    let mut r: Vec<PhotonRecord> = records.clone();
                    r.push(PhotonRecord {
                        stage: axis,
                        detected: b.photon,
                    });
                    next.push((p * b.probability, b.state, r));
                }
            }
            frontier = next;
        }
        Ok(frontier
            .into_iter()
            .map(|(p, s, r)| (p, finish(s, r, leak)))
            .collect())
    }
}

fn sample<R: Rng + ?Sized>(branches: Vec<ReadoutBranch>, rng: &mut R) -> ReadoutBranch {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let mut u = rng.random::<f64>() * total;
    let last = branches.len() - 1;
    for (k, b) in branches.into_iter().enumerate() {
        if u < b.probability || k == last {
            return b;
        }
        u -= b.probability;
    }
    unreachable!("readout has at least one branch")
}

fn finish(state: StateVector, records: Vec<PhotonRecord>, leakage: f64) -> SyndromeOutcome {
    SyndromeOutcome {
        x_jump: records[0].detected,
        y_jump: records[1].detected,
        post_state: state,
        photon_records: records,
        label_swaps: 2,
        leakage,
    }
}

/// Weight of `psi` outside the span of the six code states.
pub fn leakage(psi: &StateVector, code: &CodeSubspaces) -> Result<f64> {
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut inside = 0.0;
    for e in code.all_states() {
        inside += e.inner(psi)?.norm_sqr();
    }
    Ok((1.0 - inside / n).max(0.0))
}
