//! Number-sensitive entanglers between the motion and the electronic levels.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::config::Preset;
use crate::dynamics::{evolve_schrodinger, PulsedHamiltonian, StepControl};
use crate::error::{Error, Result};
use crate::hilbert::{Axis, CsrMatrix, LinearOperator, SpaceSpec, StateVector, LEVEL_A, LEVEL_B};
use crate::raman::{
    first_pair_coupling, number_sensitive, number_sensitive_composite, pulse_area,
    syndrome_pulse_length, Drive, PulseShape,
};

/// Rotation `|g|A` that sends odd occupations to `|b⟩` and swaps the code labels.
pub const SYNDROME_ROTATION: f64 = PI / 2.0;

/// `cos(θ(n))(|a⟩⟨a| + |b⟩⟨b|) + sin(θ(n))(|a⟩⟨b| − |b⟩⟨a|)` with a
/// Fock-diagonal angle `θ(n)`; identity on `|c⟩`.
pub fn number_rotation(
    space: &SpaceSpec,
    angle: impl Fn(&[usize]) -> f64,
) -> Result<LinearOperator> {
    if space.electronic_levels < 2 {
        return Err(Error::InvalidSpace(
            "needs electronic levels |a> and |b>".into(),
        ));
    }
    let d = space.dim();
    let mut t = Vec::with_capacity(2 * d);
    for col in 0..d {
        let l = space.label(col);
        if l.level > LEVEL_B {
            t.push((col, col, C64::new(1.0, 0.0)));
            continue;
        }
        let th = angle(&l.modes);
        let (s, c) = th.sin_cos();
        let partner = space.index(&l.modes, 1 - l.level, l.photons)?;
        t.push((col, col, C64::new(c, 0.0)));
        // U|a⟩ = cos|a⟩ − sin|b⟩, U|b⟩ = cos|b⟩ + sin|a⟩.
        let sign = if l.level == LEVEL_A { -1.0 } else { 1.0 };
        t.push((partner, col, C64::new(sign * s, 0.0)));
    }
    LinearOperator::new(space.clone(), CsrMatrix::from_triplets(d, d, t), false)
}

/// Analytic entangler `U(A)` along `axis` at rotation `θ = |g|A`.
pub fn entangler(space: &SpaceSpec, axis: Axis, theta: f64) -> Result<LinearOperator> {
    if space.num_modes() <= axis.index() {
        return Err(Error::InvalidSpace(format!(
            "space has no {} mode",
            axis.name()
        )));
    }
    number_rotation(space, |m| theta * m[axis.index()] as f64)
}

/// Raman realization of the entangler pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntanglerCoupling {
    /// `g(t) n̂ ⊗ |a⟩⟨b| + h.c.`
    Ideal,
    /// Two Raman pairs with Lamb-Dicke parameter `eta`, series to `order`.
    Composite { eta: f64, order: usize },
}

/// A sin² pulse with effective coupling `i|g|` and power-2 envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglerPulse {
    /// `|g|`, angular.
    pub g_eff: f64,
    pub duration: f64,
    pub coupling: EntanglerCoupling,
    pub ctrl: StepControl,
}

impl EntanglerPulse {
    /// Pulse reaching rotation `theta` with effective coupling `g_eff`.
    pub fn for_rotation(g_eff: f64, theta: f64, coupling: EntanglerCoupling) -> Self {
        let duration = syndrome_pulse_length(g_eff) * theta / SYNDROME_ROTATION;
        Self {
            g_eff,
            duration,
            coupling,
            ctrl: StepControl::default(),
        }
    }

    /// Syndrome pulse for the preset couplings.
    pub fn from_preset(p: &Preset, coupling: EntanglerCoupling) -> Self {
        Self::for_rotation(p.raman.g_eff(), SYNDROME_ROTATION, coupling)
    }

    fn shape(&self) -> Result<PulseShape> {
        PulseShape::sin_squared(self.duration, 0.0)
    }

    /// `|g| ∫ f² dt`.
    pub fn rotation(&self) -> f64 {
        self.shape()
            .map(|s| self.g_eff * pulse_area(&s, 2))
            .unwrap_or(0.0)
    }

    pub fn hamiltonian(&self, space: &SpaceSpec, axis: Axis) -> Result<PulsedHamiltonian> {
        let g = C64::new(0.0, self.g_eff);
        match self.coupling {
            EntanglerCoupling::Ideal => {
                number_sensitive(space, axis, &Drive::complex(g, self.shape()?, 2))
            }
            EntanglerCoupling::Composite { eta, order } => {
                let d1 = Drive::complex(first_pair_coupling(g, eta), self.shape()?, 2);
                number_sensitive_composite(space, axis, eta, &d1, order)
            }
        }
    }

    /// Integrates the pulse on `psi`.
    pub fn apply(&self, psi: &StateVector, axis: Axis) -> Result<StateVector> {
        let h = self.hamiltonian(psi.space(), axis)?;
        evolve_schrodinger(&h, psi, 0.0, self.duration, self.ctrl)
    }
}
