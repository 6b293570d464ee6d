//! Linear operators on a [`SpaceSpec`] and the standard ladder constructions.

use num_complex::Complex64 as C64;

use super::space::{Axis, Factor, SpaceSpec};
use super::sparse::CsrMatrix;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Tolerance for the hermiticity flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Sparse operator tagged with its space.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    space: SpaceSpec,
    matrix: CsrMatrix,
    hermitian: bool,
}

impl LinearOperator {
    /// Wraps a matrix. When `hermitian` is set the matrix must equal its
    /// adjoint to [`HERMITIAN_TOL`].
    pub fn new(space: SpaceSpec, matrix: CsrMatrix, hermitian: bool) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        if hermitian {
            let dev = matrix.max_abs_diff(&matrix.adjoint());
            if dev > HERMITIAN_TOL {
                return Err(Error::NotHermitian(dev));
            }
        }
        Ok(Self {
            space,
            matrix,
            hermitian,
        })
    }

    pub fn identity(space: &SpaceSpec) -> Self {
        Self {
            space: space.clone(),
            matrix: CsrMatrix::identity(space.dim()),
            hermitian: true,
        }
    }

    /// Operator whose `k`-th column is `columns[k]`.
    pub fn from_columns(space: &SpaceSpec, columns: &[StateVector]) -> Result<Self> {
        let d = space.dim();
        if columns.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: columns.len(),
            });
        }
        let mut t = Vec::new();
        for (c, col) in columns.iter().enumerate() {
            if col.space() != space {
                return Err(Error::SpaceMismatch);
            }
            for (r, v) in col.amplitudes().iter().enumerate() {
                if *v != C64::new(0.0, 0.0) {
                    t.push((r, c, *v));
                }
            }
        }
        Self::new(space.clone(), CsrMatrix::from_triplets(d, d, t), false)
    }

    pub fn zero(space: &SpaceSpec) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CsrMatrix::zeros(d, d),
            hermitian: true,
        }
    }

    /// Embeds a single-factor matrix into the full space.
    pub fn embed(space: &SpaceSpec, factor: Factor, local: &CsrMatrix) -> Result<Self> {
        let pos = space.factor_position(factor)?;
        let dims = space.dims();
        if local.nrows() != dims[pos] || local.ncols() != dims[pos] {
            return Err(Error::DimensionMismatch {
                expected: dims[pos],
                found: local.nrows(),
            });
        }
        let stride = space.stride(factor)?;
        let d = space.dim();
        let mut t = Vec::with_capacity(d * 2);
        for r in 0..d {
            let lr = (r / stride) % dims[pos];
            for (lc, v) in local.row(lr) {
                let c = r + lc * stride - lr * stride;
                t.push((r, c, v));
            }
        }
        let matrix = CsrMatrix::from_triplets(d, d, t);
        let hermitian = local.max_abs_diff(&local.adjoint()) <= HERMITIAN_TOL;
        Ok(Self {
            space: space.clone(),
            matrix,
            hermitian,
        })
    }

    /// Diagonal operator with entries computed from basis labels.
    pub fn diagonal(space: &SpaceSpec, f: impl Fn(&super::space::BasisLabel) -> C64) -> Self {
        let d = space.dim();
        let t: Vec<_> = (0..d).map(|i| (i, i, f(&space.label(i)))).collect();
        let matrix = CsrMatrix::from_triplets(d, d, t);
        let hermitian = matrix.iter().all(|(_, _, v)| v.im == 0.0);
        Self {
            space: space.clone(),
            matrix,
            hermitian,
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Deviation from hermiticity, regardless of the flag.
    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.max_abs_diff(&self.matrix.adjoint())
    }

    fn check(&self, other: &LinearOperator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<Self> {
        self.check(other)?;
        let matrix = self.matrix.matmul(&other.matrix);
        let hermitian = matrix.max_abs_diff(&matrix.adjoint()) <= HERMITIAN_TOL;
        Ok(Self {
            space: self.space.clone(),
            matrix,
            hermitian,
        })
    }

    /// `self^k` with `self^0 = 1`.
    pub fn power(&self, k: u32) -> Self {
        let mut out = Self::identity(&self.space);
        for _ in 0..k {
            out = out.compose(self).expect("same space");
        }
        out
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: C64, other: &LinearOperator) -> Result<Self> {
        self.check(other)?;
        let matrix = self.matrix.add_scaled(c, &other.matrix);
        let hermitian = matrix.max_abs_diff(&matrix.adjoint()) <= HERMITIAN_TOL;
        Ok(Self {
            space: self.space.clone(),
            matrix,
            hermitian,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        let matrix = self.matrix.scale(c);
        let hermitian = self.hermitian && c.im == 0.0;
        Self {
            space: self.space.clone(),
            matrix,
            hermitian,
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        StateVector::new(self.space.clone(), self.matrix.mul_vec(psi.amplitudes()))
    }

    /// `⟨ψ|O|ψ⟩` for a normalized or unnormalized `ψ` (no renormalization).
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        psi.inner(&self.apply(psi)?)
    }

    /// `⟨φ|O|ψ⟩`.
    pub fn matrix_element(&self, phi: &StateVector, psi: &StateVector) -> Result<C64> {
        phi.inner(&self.apply(psi)?)
    }
}

fn ladder_local(dim: usize, lower: bool) -> CsrMatrix {
    let t = (1..dim)
        .map(|n| {
            let v = C64::new((n as f64).sqrt(), 0.0);
            if lower {
                (n - 1, n, v)
            } else {
                (n, n - 1, v)
            }
        })
        .collect();
    CsrMatrix::from_triplets(dim, dim, t)
}

/// Annihilation operator of a motional mode.
pub fn annihilation(space: &SpaceSpec, axis: Axis) -> Result<LinearOperator> {
    let f = Factor::Mode(axis.index());
    let dim = space.dims()[space.factor_position(f)?];
    LinearOperator::embed(space, f, &ladder_local(dim, true))
}

/// Creation operator of a motional mode. Raising the top Fock level gives zero.
pub fn creation(space: &SpaceSpec, axis: Axis) -> Result<LinearOperator> {
    let f = Factor::Mode(axis.index());
    let dim = space.dims()[space.factor_position(f)?];
    LinearOperator::embed(space, f, &ladder_local(dim, false))
}

/// Number operator of a motional mode.
pub fn number(space: &SpaceSpec, axis: Axis) -> Result<LinearOperator> {
    space.factor_position(Factor::Mode(axis.index()))?;
    let m = axis.index();
    Ok(LinearOperator::diagonal(space, |l| {
        C64::new(l.modes[m] as f64, 0.0)
    }))
}

/// Cavity photon annihilation operator.
pub fn cavity_annihilation(space: &SpaceSpec) -> Result<LinearOperator> {
    let dim = space.dims()[space.factor_position(Factor::Cavity)?];
    LinearOperator::embed(space, Factor::Cavity, &ladder_local(dim, true))
}

/// Electronic transition `|to⟩⟨from|`.
pub fn transition(space: &SpaceSpec, to: usize, from: usize) -> Result<LinearOperator> {
    let n = space.electronic_levels;
    if to >= n || from >= n {
        return Err(Error::InvalidSpace(format!(
            "level out of range for {n} electronic levels"
        )));
    }
    let local = CsrMatrix::from_triplets(n, n, vec![(to, from, C64::new(1.0, 0.0))]);
    LinearOperator::embed(space, Factor::Electronic, &local)
}

/// Projector `|ψ⟩⟨ψ|` onto a normalized state.
pub fn projector(psi: &StateVector) -> LinearOperator {
    let d = psi.dim();
    let a = psi.amplitudes();
    let nz: Vec<usize> = (0..d).filter(|&i| a[i] != C64::new(0.0, 0.0)).collect();
    let mut t = Vec::with_capacity(nz.len() * nz.len());
    for &r in &nz {
        for &c in &nz {
            t.push((r, c, a[r] * a[c].conj()));
        }
    }
    LinearOperator {
        space: psi.space().clone(),
        matrix: CsrMatrix::from_triplets(d, d, t),
        hermitian: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn ladder_action_on_fock_states() {
        let s = SpaceSpec::two_mode(5, 2).unwrap();
        let a = annihilation(&s, Axis::X).unwrap();
        let ad = creation(&s, Axis::Y).unwrap();
        let psi = StateVector::basis(&s, &[4, 2], 1, 0).unwrap();
        let out = a.apply(&psi).unwrap();
        let expect = StateVector::basis(&s, &[3, 2], 1, 0)
            .unwrap()
            .scaled(C64::new(2.0, 0.0));
        assert!((out.amplitudes() - expect.amplitudes()).norm() < 1e-14);
        let out = ad.apply(&psi).unwrap();
        let expect = StateVector::basis(&s, &[4, 3], 1, 0)
            .unwrap()
            .scaled(C64::new(3f64.sqrt(), 0.0));
        assert!((out.amplitudes() - expect.amplitudes()).norm() < 1e-14);
    }

    #[test]
    fn raising_at_cutoff_is_zero() {
        let s = SpaceSpec::two_mode(3, 1).unwrap();
        let ad = creation(&s, Axis::X).unwrap();
        let top = StateVector::basis(&s, &[3, 1], 0, 0).unwrap();
        assert_eq!(ad.apply(&top).unwrap().norm(), 0.0);
    }

    #[test]
    fn number_equals_adag_a() {
        let s = SpaceSpec::two_mode(4, 3).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let a = annihilation(&s, axis).unwrap();
            let n = a.dagger().compose(&a).unwrap();
            assert!(n.matrix().max_abs_diff(number(&s, axis).unwrap().matrix()) < 1e-14);
            assert!(n.is_hermitian());
        }
    }

    #[test]
    fn hermitian_flag_is_checked() {
        let s = SpaceSpec::two_mode(2, 2).unwrap();
        let a = annihilation(&s, Axis::X).unwrap();
        assert!(LinearOperator::new(s.clone(), a.matrix().clone(), true).is_err());
        let x = a.add_scaled(c1(), &a.dagger()).unwrap();
        assert!(LinearOperator::new(s, x.matrix().clone(), true).is_ok());
    }

    #[test]
    fn transitions_and_cavity() {
        let s = SpaceSpec::new(vec![2], 2, Some(1)).unwrap();
        let sab = transition(&s, 0, 1).unwrap();
        let ac = cavity_annihilation(&s).unwrap();
        let psi = StateVector::basis(&s, &[1], 1, 1).unwrap();
        let out = sab.compose(&ac).unwrap().apply(&psi).unwrap();
        assert_eq!(out, StateVector::basis(&s, &[1], 0, 0).unwrap());
        assert!(transition(&s, 2, 0).is_err());
    }
}
