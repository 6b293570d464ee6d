//! Factored Hilbert space: motional modes, electronic levels, optional cavity.
//!
//! Basis index order is row-major over `(n_x, n_y, …, electronic, photons)`,
//! so the last factor varies fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electronic level `|a⟩`.
pub const LEVEL_A: usize = 0;
/// Electronic level `|b⟩`.
pub const LEVEL_B: usize = 1;
/// Electronic level `|c⟩`.
pub const LEVEL_C: usize = 2;

/// Spatial axis of a motional mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Mode index of this axis.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    /// The other axis.
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// One tensor factor of a [`SpaceSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Mode(usize),
    Electronic,
    Cavity,
}

/// Basis label of a product state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub modes: Vec<usize>,
    pub level: usize,
    pub photons: usize,
}

/// Shape of the product space.
///
/// A cutoff `N` keeps Fock states `0..=N`, so a mode contributes `N + 1`
/// dimensions. The cavity factor is absent when `cavity_cutoff` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub mode_cutoffs: Vec<usize>,
    pub electronic_levels: usize,
    pub cavity_cutoff: Option<usize>,
}

impl SpaceSpec {
    pub fn new(
        mode_cutoffs: Vec<usize>,
        electronic_levels: usize,
        cavity_cutoff: Option<usize>,
    ) -> Result<Self> {
        let spec = Self {
            mode_cutoffs,
            electronic_levels,
            cavity_cutoff,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two motional modes with a common cutoff and the given electronic levels.
    pub fn two_mode(cutoff: usize, electronic_levels: usize) -> Result<Self> {
        Self::new(vec![cutoff, cutoff], electronic_levels, None)
    }

    /// Checks the invariants of a spec that may have been deserialized.
    pub fn validate(&self) -> Result<()> {
        if self.electronic_levels == 0 || self.electronic_levels > 3 {
            return Err(Error::InvalidSpace(format!(
                "electronic levels must be 1, 2 or 3, got {}",
                self.electronic_levels
            )));
        }
        if self.mode_cutoffs.len() > 2 {
            return Err(Error::InvalidSpace(format!(
                "at most two motional modes are supported, got {}",
                self.mode_cutoffs.len()
            )));
        }
        if self.mode_cutoffs.contains(&0) || self.cavity_cutoff == Some(0) {
            return Err(Error::InvalidSpace("cutoffs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn num_modes(&self) -> usize {
        self.mode_cutoffs.len()
    }

    /// Dimensions of every factor in index order.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.mode_cutoffs.iter().map(|c| c + 1).collect();
        dims.push(self.electronic_levels);
        if let Some(c) = self.cavity_cutoff {
            dims.push(c + 1);
        }
        dims
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    /// Position of a factor in [`SpaceSpec::dims`].
    pub fn factor_position(&self, factor: Factor) -> Result<usize> {
        match factor {
            Factor::Mode(m) if m < self.num_modes() => Ok(m),
            Factor::Mode(m) => Err(Error::InvalidSpace(format!("no motional mode {m}"))),
            Factor::Electronic => Ok(self.num_modes()),
            Factor::Cavity if self.cavity_cutoff.is_some() => Ok(self.num_modes() + 1),
            Factor::Cavity => Err(Error::InvalidSpace("space has no cavity factor".into())),
        }
    }

    /// Index stride of a factor.
    pub fn stride(&self, factor: Factor) -> Result<usize> {
        let pos = self.factor_position(factor)?;
        Ok(self.dims()[pos + 1..].iter().product())
    }

    /// Flat index of a basis label.
    pub fn index(&self, modes: &[usize], level: usize, photons: usize) -> Result<usize> {
        if modes.len() != self.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes(),
                found: modes.len(),
            });
        }
        let mut digits: Vec<usize> = modes.to_vec();
        digits.push(level);
        match self.cavity_cutoff {
            Some(_) => digits.push(photons),
            None if photons != 0 => {
                return Err(Error::InvalidSpace(
                    "photon number given without a cavity".into(),
                ))
            }
            None => {}
        }
        let dims = self.dims();
        let mut idx = 0;
        for (d, (&digit, &dim)) in digits.iter().zip(&dims).enumerate() {
            if digit >= dim {
                return Err(Error::InvalidSpace(format!(
                    "label component {d} = {digit} exceeds dimension {dim}"
                )));
            }
            idx = idx * dim + digit;
        }
        Ok(idx)
    }

    /// Basis label of a flat index.
    pub fn label(&self, mut index: usize) -> BasisLabel {
        let dims = self.dims();
        let mut digits = vec![0; dims.len()];
        for (slot, &dim) in digits.iter_mut().zip(&dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        let nm = self.num_modes();
        BasisLabel {
            modes: digits[..nm].to_vec(),
            level: digits[nm],
            photons: if self.cavity_cutoff.is_some() {
                digits[nm + 1]
            } else {
                0
            },
        }
    }

    /// Same factors with every motional cutoff replaced.
    pub fn with_mode_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(
            vec![cutoff; self.num_modes()],
            self.electronic_levels,
            self.cavity_cutoff,
        )
    }

    /// Same factors with a different number of electronic levels.
    pub fn with_levels(&self, levels: usize) -> Result<Self> {
        Self::new(self.mode_cutoffs.clone(), levels, self.cavity_cutoff)
    }

    /// Motional factors only, with a single electronic level and no cavity.
    pub fn motional(&self) -> Self {
        Self {
            mode_cutoffs: self.mode_cutoffs.clone(),
            electronic_levels: 1,
            cavity_cutoff: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_row_major() {
        let s = SpaceSpec::new(vec![2, 3], 3, Some(1)).unwrap();
        assert_eq!(s.dims(), vec![3, 4, 3, 2]);
        assert_eq!(s.dim(), 72);
        assert_eq!(s.index(&[0, 0], 0, 1).unwrap(), 1);
        assert_eq!(s.index(&[0, 0], 1, 0).unwrap(), 2);
        assert_eq!(s.index(&[0, 1], 0, 0).unwrap(), 6);
        assert_eq!(s.index(&[1, 0], 0, 0).unwrap(), 24);
        for i in 0..s.dim() {
            let l = s.label(i);
            assert_eq!(s.index(&l.modes, l.level, l.photons).unwrap(), i);
        }
    }

    #[test]
    fn strides_match_dims() {
        let s = SpaceSpec::new(vec![4, 4], 2, Some(1)).unwrap();
        assert_eq!(s.stride(Factor::Cavity).unwrap(), 1);
        assert_eq!(s.stride(Factor::Electronic).unwrap(), 2);
        assert_eq!(s.stride(Factor::Mode(1)).unwrap(), 4);
        assert_eq!(s.stride(Factor::Mode(0)).unwrap(), 20);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SpaceSpec::new(vec![4], 0, None).is_err());
        assert!(SpaceSpec::new(vec![4], 4, None).is_err());
        assert!(SpaceSpec::new(vec![0], 1, None).is_err());
        assert!(SpaceSpec::new(vec![4], 1, None)
            .unwrap()
            .index(&[5], 0, 0)
            .is_err());
        assert!(SpaceSpec::new(vec![4], 1, None)
            .unwrap()
            .index(&[1], 0, 1)
            .is_err());
    }
}
