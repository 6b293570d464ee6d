//! Unitary mixing of the two mode decay channels.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hilbert::{annihilation, Axis, LinearOperator, SpaceSpec, StateVector};

/// Rotation `(θ, φ)` of the jump-operator pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRotation {
    pub theta: f64,
    pub phi: f64,
}

/// Rotated jump operators
/// `A_x = √γ(cos θ a_x + e^{iφ} sin θ a_y)` and
/// `A_y = √γ(−e^{−iφ} sin θ a_x + cos θ a_y)`.
pub fn bogolyubov(space: &SpaceSpec, rot: ModeRotation, gamma: f64) -> Result<[LinearOperator; 2]> {
    let ax = annihilation(space, Axis::X)?;
    let ay = annihilation(space, Axis::Y)?;
    let g = C64::new(gamma.sqrt(), 0.0);
    let (c, s) = (
        C64::new(rot.theta.cos(), 0.0),
        C64::new(rot.theta.sin(), 0.0),
    );
    let e = C64::from_polar(1.0, rot.phi);
    let a1 = ax.scale(g * c).add_scaled(g * e * s, &ay)?;
    let a2 = ay.scale(g * c).add_scaled(-g * e.conj() * s, &ax)?;
    Ok([a1, a2])
}

/// Rotated ladder operators `a_g = (a_x + e^{iφ}a_y)/√2` and
/// `a_d = (a_y − e^{−iφ}a_x)/√2`, returned as `(a_g, a_d)`.
pub fn rotated_ladder(space: &SpaceSpec, phi: f64) -> Result<(LinearOperator, LinearOperator)> {
    let ax = annihilation(space, Axis::X)?;
    let ay = annihilation(space, Axis::Y)?;
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let e = C64::from_polar(1.0, phi);
    let ag = ax.scale(r).add_scaled(r * e, &ay)?;
    let ad = ay.scale(r).add_scaled(-r * e.conj(), &ax)?;
    Ok((ag, ad))
}

/// Fock state `a_d†^{n_d} a_g†^{n_g}|0,0⟩/√(n_d! n_g!)` of the rotated modes,
/// on electronic level `|a⟩`.
pub fn rotated_fock(space: &SpaceSpec, n_d: u32, n_g: u32, phi: f64) -> Result<StateVector> {
    let (ag, ad) = rotated_ladder(space, phi)?;
    let mut psi = StateVector::basis(space, &vec![0; space.num_modes()], 0, 0)?;
    let (agd, add) = (ag.dagger(), ad.dagger());
    for _ in 0..n_g {
        psi = agd.apply(&psi)?;
    }
    for _ in 0..n_d {
        psi = add.apply(&psi)?;
    }
    let norm = ((1..=n_d).product::<u32>() as f64 * (1..=n_g).product::<u32>() as f64).sqrt();
    Ok(psi.scaled(C64::new(1.0 / norm, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotated_ladders_commute_like_modes() {
        let s = SpaceSpec::two_mode(4, 1).unwrap();
        let (ag, ad) = rotated_ladder(&s, 0.7).unwrap();
        let comm = ag
            .compose(&ad.dagger())
            .unwrap()
            .add_scaled(C64::new(-1.0, 0.0), &ad.dagger().compose(&ag).unwrap())
            .unwrap();
        // [a_g, a_d†] vanishes away from the truncation edge.
        let vac = StateVector::basis(&s, &[1, 1], 0, 0).unwrap();
        assert!(comm.apply(&vac).unwrap().norm() < 1e-14);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let s = SpaceSpec::two_mode(3, 1).unwrap();
        let [a1, a2] = bogolyubov(
            &s,
            ModeRotation {
                theta: 0.0,
                phi: 0.4,
            },
            4.0,
        )
        .unwrap();
        let ax = annihilation(&s, Axis::X).unwrap().scale(C64::new(2.0, 0.0));
        let ay = annihilation(&s, Axis::Y).unwrap().scale(C64::new(2.0, 0.0));
        assert!(a1.matrix().max_abs_diff(ax.matrix()) < 1e-15);
        assert!(a2.matrix().max_abs_diff(ay.matrix()) < 1e-15);
    }
}
