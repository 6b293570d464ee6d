//! Pure states on a [`SpaceSpec`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::space::{Factor, SpaceSpec};
use crate::error::{Error, Result};

/// Complex amplitudes tagged with their space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: SpaceSpec,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(space: SpaceSpec, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { space, amps })
    }

    pub fn zeros(space: &SpaceSpec) -> Self {
        Self {
            space: space.clone(),
            amps: DVector::zeros(space.dim()),
        }
    }

    /// Product basis state `|modes⟩|level⟩|photons⟩`.
    pub fn basis(space: &SpaceSpec, modes: &[usize], level: usize, photons: usize) -> Result<Self> {
        let mut s = Self::zeros(space);
        s.amps[space.index(modes, level, photons)?] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Superposition `Σ cₖ|modesₖ⟩|level⟩` without a cavity photon, normalized.
    pub fn fock_superposition(
        space: &SpaceSpec,
        level: usize,
        terms: &[(C64, &[usize])],
    ) -> Result<Self> {
        let mut s = Self::zeros(space);
        for (c, modes) in terms {
            s.amps[space.index(modes, level, 0)?] += *c;
        }
        s.normalized()
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        self.amps /= C64::new(n, 0.0);
        Ok(self)
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.amps *= c;
        self
    }

    fn check_space(&self, other: &StateVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: C64, other: &StateVector) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            amps: &self.amps + &other.amps * c,
        })
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_space(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|² / (‖self‖²‖other‖²)`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?;
        let n = self.norm_sqr() * other.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(ov.norm_sqr() / n)
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DMatrix<C64> {
        &self.amps * self.amps.adjoint()
    }

    /// Population of one electronic level.
    pub fn level_population(&self, level: usize) -> f64 {
        (0..self.dim())
            .filter(|&i| self.space.label(i).level == level)
            .map(|i| self.amps[i].norm_sqr())
            .sum()
    }

    /// Largest population found at the top Fock level of any mode, relative
    /// to the squared norm.
    pub fn top_level_population(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let cutoffs = &self.space.mode_cutoffs;
        let mut worst: f64 = 0.0;
        for (m, &cut) in cutoffs.iter().enumerate() {
            let p: f64 = (0..self.dim())
                .filter(|&i| self.space.label(i).modes[m] == cut)
                .map(|i| self.amps[i].norm_sqr())
                .sum();
            worst = worst.max(p / total);
        }
        worst
    }

    /// Expected occupation of a motional mode.
    pub fn mean_occupation(&self, mode: usize) -> f64 {
        (0..self.dim())
            .map(|i| self.space.label(i).modes[mode] as f64 * self.amps[i].norm_sqr())
            .sum()
    }

    /// Copies the amplitudes into a space that differs only in its motional
    /// cutoffs. Returns the dropped weight alongside the state.
    pub fn recut(&self, target: &SpaceSpec) -> Result<(Self, f64)> {
        if target.num_modes() != self.space.num_modes()
            || target.electronic_levels != self.space.electronic_levels
            || target.cavity_cutoff != self.space.cavity_cutoff
        {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Self::zeros(target);
        let mut dropped = 0.0;
        for i in 0..self.dim() {
            let l = self.space.label(i);
            match target.index(&l.modes, l.level, l.photons) {
                Ok(j) => out.amps[j] = self.amps[i],
                Err(_) => dropped += self.amps[i].norm_sqr(),
            }
        }
        Ok((out, dropped))
    }

    /// Copies every amplitude whose label exists in `target`, which may differ
    /// in cutoffs and electronic levels. Returns the dropped weight.
    pub fn transfer(&self, target: &SpaceSpec) -> Result<(Self, f64)> {
        if target.num_modes() != self.space.num_modes()
            || target.cavity_cutoff.is_some() != self.space.cavity_cutoff.is_some()
        {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Self::zeros(target);
        let mut dropped = 0.0;
        for i in 0..self.dim() {
            let l = self.space.label(i);
            if l.level >= target.electronic_levels {
                dropped += self.amps[i].norm_sqr();
                continue;
            }
            match target.index(&l.modes, l.level, l.photons) {
                Ok(j) => out.amps[j] = self.amps[i],
                Err(_) => dropped += self.amps[i].norm_sqr(),
            }
        }
        Ok((out, dropped))
    }

    /// Lifts a motional-only state into `target` with the given electronic level.
    pub fn with_level(&self, target: &SpaceSpec, level: usize) -> Result<Self> {
        if self.space.electronic_levels != 1 || self.space.cavity_cutoff.is_some() {
            return Err(Error::InvalidSpace(
                "source must be a motional-only space".into(),
            ));
        }
        if target.mode_cutoffs != self.space.mode_cutoffs {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Self::zeros(target);
        for i in 0..self.dim() {
            let l = self.space.label(i);
            out.amps[target.index(&l.modes, level, 0)?] = self.amps[i];
        }
        Ok(out)
    }

    /// Motional amplitudes attached to one electronic level (photon number 0).
    pub fn level_component(&self, level: usize) -> Result<Self> {
        let motional = self.space.motional();
        let mut out = Self::zeros(&motional);
        for j in 0..motional.dim() {
            let l = motional.label(j);
            out.amps[j] = self.amps[self.space.index(&l.modes, level, 0)?];
        }
        Ok(out)
    }

    /// Reduced density matrix of the motional modes.
    pub fn motional_density(&self) -> DMatrix<C64> {
        let motional = self.space.motional();
        let nm = motional.dim();
        let inner = self
            .space
            .stride(Factor::Mode(self.space.num_modes() - 1))
            .unwrap_or(1);
        let mut rho = DMatrix::zeros(nm, nm);
        for r in 0..nm {
            for c in 0..nm {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..inner {
                    acc += self.amps[r * inner + k] * self.amps[c * inner + k].conj();
                }
                rho[(r, c)] = acc;
            }
        }
        rho
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    space: SpaceSpec,
    amplitudes: Vec<C64>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            space: self.space.clone(),
            amplitudes: self.amps.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = StateRepr::deserialize(d)?;
        repr.space.validate().map_err(D::Error::custom)?;
        let state = StateVector::new(repr.space, DVector::from_vec(repr.amplitudes))
            .map_err(D::Error::custom)?;
        if state.norm() == 0.0 {
            return Err(D::Error::custom("state vector has zero norm"));
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> SpaceSpec {
        SpaceSpec::two_mode(4, 2).unwrap()
    }

    #[test]
    fn json_round_trip_uses_pairs() {
        let s = StateVector::fock_superposition(
            &space(),
            1,
            &[(C64::new(1.0, 0.0), &[4, 0]), (C64::new(0.0, 1.0), &[0, 4])],
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(
            text.contains("[0.7071067811865475,0.0]") || text.contains("[0.7071067811865476,0.0]")
        );
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn zero_state_rejected_on_load() {
        let text = serde_json::to_string(&StateVector::zeros(&space())).unwrap();
        assert!(serde_json::from_str::<StateVector>(&text).is_err());
        assert!(StateVector::zeros(&space()).normalized().is_err());
    }

    #[test]
    fn level_lift_and_component() {
        let sp = space();
        let m = StateVector::basis(&sp.motional(), &[3, 1], 0, 0).unwrap();
        let lifted = m.with_level(&sp, 1).unwrap();
        assert_eq!(lifted.level_population(1), 1.0);
        assert_eq!(lifted.level_component(1).unwrap(), m);
        assert_eq!(lifted.mean_occupation(0), 3.0);
    }

    #[test]
    fn recut_reports_dropped_weight() {
        let sp = space();
        let s = StateVector::fock_superposition(
            &sp,
            0,
            &[(C64::new(1.0, 0.0), &[4, 0]), (C64::new(1.0, 0.0), &[1, 1])],
        )
        .unwrap();
        let (small, dropped) = s.recut(&sp.with_mode_cutoff(3).unwrap()).unwrap();
        assert!((dropped - 0.5).abs() < 1e-15);
        assert!((small.norm_sqr() - 0.5).abs() < 1e-15);
    }
}
