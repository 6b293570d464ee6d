//! Laser-driven Hamiltonians: stimulated Raman couplings with and without the
//! vibrational rotating-wave approximation, number-sensitive couplings,
//! κ-quantum sideband couplings and Λ-system adiabatic-passage Hamiltonians.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::pulse::Drive;
use crate::dynamics::{Envelope, PulsedHamiltonian};
use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, creation, number, transition, Axis, LinearOperator, SpaceSpec, StateVector,
    LEVEL_A, LEVEL_B, LEVEL_C,
};

/// Default order of the Lamb-Dicke series (total power of η).
pub const DEFAULT_SERIES_ORDER: usize = 6;

/// Largest admissible bound on the dropped part of a truncated series.
pub const SERIES_TOL: f64 = 1e-3;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(−iη)^k`.
fn minus_i_eta_pow(eta: f64, k: usize) -> C64 {
    C64::new(0.0, -eta).powu(k as u32)
}

/// Upper bound on the operator norm of the series terms with `m + n > order`
/// on a mode with Fock cutoff `cutoff`.
pub fn series_tail_bound(eta: f64, cutoff: usize, order: usize) -> f64 {
    let x = 2.0 * eta * (cutoff as f64).sqrt();
    (order + 1..order + 80)
        .map(|k| x.powi(k as i32) / factorial(k))
        .sum()
}

fn check_series(eta: f64, cutoff: usize, order: usize) -> Result<()> {
    let tail = series_tail_bound(eta, cutoff, order);
    if tail > SERIES_TOL {
        return Err(Error::InvalidParameter(format!(
            "series order {order} too low for eta = {eta} at cutoff {cutoff}: dropped terms bounded by {tail:.3e}"
        )));
    }
    Ok(())
}

fn cutoff_of(space: &SpaceSpec, axis: Axis) -> Result<usize> {
    space
        .mode_cutoffs
        .get(axis.index())
        .copied()
        .ok_or_else(|| Error::InvalidSpace(format!("space has no {} mode", axis.name())))
}

fn need_levels(space: &SpaceSpec, levels: usize) -> Result<()> {
    if space.electronic_levels < levels {
        return Err(Error::InvalidSpace(format!(
            "needs {levels} electronic levels, space has {}",
            space.electronic_levels
        )));
    }
    Ok(())
}

/// `Σ (−iη)^{m+n}/(m! n!) a†^m a^n` over `m + n ≤ order`, grouped by `n − m`.
/// Each group oscillates as `e^{−iν(n−m)t}` in the interaction picture.
pub fn sideband_series(
    space: &SpaceSpec,
    axis: Axis,
    eta: f64,
    order: usize,
) -> Result<BTreeMap<i64, LinearOperator>> {
    let cutoff = cutoff_of(space, axis)?;
    let a = annihilation(space, axis)?;
    let ad = creation(space, axis)?;
    let top = order.min(cutoff);
    let a_pow: Vec<LinearOperator> = (0..=top).map(|k| a.power(k as u32)).collect();
    let ad_pow: Vec<LinearOperator> = (0..=top).map(|k| ad.power(k as u32)).collect();
    let mut out: BTreeMap<i64, LinearOperator> = BTreeMap::new();
    for m in 0..=top {
        for n in 0..=top {
            if m + n > order {
                continue;
            }
            let c = minus_i_eta_pow(eta, m + n) / (factorial(m) * factorial(n));
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let term = ad_pow[m].compose(&a_pow[n])?;
            let key = n as i64 - m as i64;
            let acc = out
                .remove(&key)
                .unwrap_or_else(|| LinearOperator::zero(space));
            out.insert(key, acc.add_scaled(c, &term)?);
        }
    }
    Ok(out)
}

/// Raman coupling between `|a⟩` and `|b⟩` with non-resonant sidebands.
///
/// `H = −g(t) e^{−(ηx²+ηy²)/2} |a⟩⟨b| ⊗ Πⱼ Σ (−iηⱼ)^{m+n}/(m!n!) aⱼ†^m aⱼ^n e^{−iνⱼ(n−m)t} + h.c.`
/// in the interaction picture of the trap. `drive` carries `g(t) = g f(t)²`.
/// Each per-axis series is truncated at total power `order`.
pub fn full_raman(
    space: &SpaceSpec,
    eta: [f64; 2],
    nu: [f64; 2],
    drive: &Drive,
    order: usize,
) -> Result<PulsedHamiltonian> {
    need_levels(space, 2)?;
    let flip = transition(space, LEVEL_A, LEVEL_B)?;
    let mut per_axis: Vec<BTreeMap<i64, LinearOperator>> = Vec::new();
    for axis in [Axis::X, Axis::Y] {
        let e = eta[axis.index()];
        if e == 0.0 || space.num_modes() <= axis.index() {
            per_axis.push(BTreeMap::from([(0, LinearOperator::identity(space))]));
            continue;
        }
        check_series(e, cutoff_of(space, axis)?, order)?;
        per_axis.push(sideband_series(space, axis, e, order)?);
    }
    let dw = (-(eta[0] * eta[0] + eta[1] * eta[1]) / 2.0).exp();
    let mut h = PulsedHamiltonian::new(space);
    for (&dx, ox) in &per_axis[0] {
        for (&dy, oy) in &per_axis[1] {
            let op = flip.compose(&ox.compose(oy)?)?;
            if op.matrix().nnz() == 0 {
                continue;
            }
            let w = nu[0] * dx as f64 + nu[1] * dy as f64;
            let d = drive.clone();
            let scale = C64::new(-dw, 0.0);
            let env = Envelope::new(
                move |t| scale * d.value(t) * C64::from_polar(1.0, -w * t),
                dw * drive.peak,
                w.abs() + drive.power as f64 * drive.shape.bandwidth(),
            );
            h.add_with_hc(op, env)?;
        }
    }
    Ok(h)
}

/// Resonant part of the single-axis Raman coupling:
/// `−g(t) e^{−η²/2} |a⟩⟨b| ⊗ Σ_{2n ≤ order} (−iη)^{2n}/(n!)² a†^n a^n + h.c.`
pub fn rwa_raman(
    space: &SpaceSpec,
    axis: Axis,
    eta: f64,
    drive: &Drive,
    order: usize,
) -> Result<PulsedHamiltonian> {
    need_levels(space, 2)?;
    let series = sideband_series(space, axis, eta, order)?;
    let carrier = series
        .get(&0)
        .cloned()
        .unwrap_or_else(|| LinearOperator::identity(space));
    let op = transition(space, LEVEL_A, LEVEL_B)?.compose(&carrier)?;
    let mut h = PulsedHamiltonian::new(space);
    h.add_with_hc(op, drive.envelope(C64::new(-(-eta * eta / 2.0).exp(), 0.0)))?;
    Ok(h)
}

/// `Σ_{k ≤ min(n, order/2)} (−η²)^k/(k!)² · n!/(n−k)!`, the carrier series on `|n⟩`.
pub fn carrier_factor(eta: f64, n: usize, order: usize) -> f64 {
    (0..=n.min(order / 2))
        .map(|k| {
            (-eta * eta).powi(k as i32) / factorial(k).powi(2) * factorial(n) / factorial(n - k)
        })
        .sum()
}

/// Idealized number-sensitive coupling `g(t) n̂_axis ⊗ |a⟩⟨b| + h.c.`
pub fn number_sensitive(space: &SpaceSpec, axis: Axis, drive: &Drive) -> Result<PulsedHamiltonian> {
    need_levels(space, 2)?;
    let op = transition(space, LEVEL_A, LEVEL_B)?.compose(&number(space, axis)?)?;
    let mut h = PulsedHamiltonian::new(space);
    h.add_with_hc(op, drive.envelope(C64::new(1.0, 0.0)))?;
    Ok(h)
}

/// Raman coupling `g⁽¹⁾` whose leading motional term equals the effective
/// number-sensitive coupling `g = η² e^{−η²/2} g⁽¹⁾`.
pub fn first_pair_coupling(g_eff: C64, eta: f64) -> C64 {
    g_eff / (eta * eta * (-eta * eta / 2.0).exp())
}

/// Effective number-sensitive coupling `η² e^{−η²/2} g⁽¹⁾`.
pub fn effective_coupling(g1: C64, eta: f64) -> C64 {
    g1 * eta * eta * (-eta * eta / 2.0).exp()
}

/// Two Raman pairs realizing the number-sensitive coupling: one aligned with
/// `axis` (RWA series to `order`) and one co-propagating with
/// `g⁽²⁾ = −e^{−η²/2} g⁽¹⁾`. `drive1` carries `g⁽¹⁾(t)`.
pub fn number_sensitive_composite(
    space: &SpaceSpec,
    axis: Axis,
    eta: f64,
    drive1: &Drive,
    order: usize,
) -> Result<PulsedHamiltonian> {
    check_series(eta, cutoff_of(space, axis)?, order)?;
    let mut h = rwa_raman(space, axis, eta, drive1, order)?;
    let flip = transition(space, LEVEL_A, LEVEL_B)?;
    // −g⁽²⁾ = e^{−η²/2} g⁽¹⁾.
    h.add_with_hc(
        flip,
        drive1.envelope(C64::new((-eta * eta / 2.0).exp(), 0.0)),
    )?;
    Ok(h)
}

/// Idealized splitting coupling `g(t)(n̂_x − n̂_y) ⊗ |a⟩⟨b| + h.c.`
pub fn split(space: &SpaceSpec, drive: &Drive) -> Result<PulsedHamiltonian> {
    need_levels(space, 2)?;
    let diff = number(space, Axis::X)?.add_scaled(C64::new(-1.0, 0.0), &number(space, Axis::Y)?)?;
    let op = transition(space, LEVEL_A, LEVEL_B)?.compose(&diff)?;
    let mut h = PulsedHamiltonian::new(space);
    h.add_with_hc(op, drive.envelope(C64::new(1.0, 0.0)))?;
    Ok(h)
}

/// Two Raman pairs, aligned with x and y, with `g_y⁽¹⁾ = −g_x⁽¹⁾`. The leading
/// terms give `η² e^{−η²/2} g⁽¹⁾ (n̂_x − n̂_y)`.
pub fn split_composite(
    space: &SpaceSpec,
    eta: f64,
    drive1: &Drive,
    order: usize,
) -> Result<PulsedHamiltonian> {
    for axis in [Axis::X, Axis::Y] {
        check_series(eta, cutoff_of(space, axis)?, order)?;
    }
    let mut h = rwa_raman(space, Axis::X, eta, drive1, order)?;
    let mut flipped = drive1.clone();
    flipped.phase += std::f64::consts::PI;
    h.extend(&rwa_raman(space, Axis::Y, eta, &flipped, order)?)?;
    Ok(h)
}

/// Which part of the κ-quantum sideband series to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SidebandSeries {
    /// `(−iη)^κ/κ! a†^κ`.
    Leading,
    /// `Σₙ (−iη)^{2n+κ}/(n!(n+κ)!) a†^{n+κ} aⁿ`, complete on the truncated space.
    Full,
}

/// Leading-order coupling `g̃ e^{−η²/2} (−iη)^κ/κ!`.
pub fn sideband_coupling(g_tilde: C64, eta: f64, kappa: u32) -> C64 {
    g_tilde * (-eta * eta / 2.0).exp() * minus_i_eta_pow(eta, kappa as usize)
        / factorial(kappa as usize)
}

/// Dipole coupling `g̃` that yields the leading-order coupling `g`.
pub fn dipole_coupling_for(g: C64, eta: f64, kappa: u32) -> C64 {
    g / sideband_coupling(C64::new(1.0, 0.0), eta, kappa)
}

/// κ-th red sideband of `|leg⟩ ↔ |c⟩` along `axis`:
/// `−g̃(t) e^{−η²/2} |leg⟩⟨c| ⊗ S + h.c.` with `drive` carrying `g̃(t)`.
pub fn sideband_jcm(
    space: &SpaceSpec,
    leg: usize,
    axis: Axis,
    kappa: u32,
    eta: f64,
    drive: &Drive,
    series: SidebandSeries,
) -> Result<PulsedHamiltonian> {
    need_levels(space, 3)?;
    if leg == LEVEL_C {
        return Err(Error::InvalidParameter(
            "sideband leg must be |a> or |b>".into(),
        ));
    }
    let cutoff = cutoff_of(space, axis)?;
    if kappa as usize > cutoff {
        return Err(Error::InvalidSpace(format!(
            "sideband order {kappa} exceeds cutoff {cutoff}"
        )));
    }
    let a = annihilation(space, axis)?;
    let ad = creation(space, axis)?;
    let k = kappa as usize;
    let top = match series {
        SidebandSeries::Leading => 0,
        SidebandSeries::Full => cutoff - k,
    };
    let mut s = LinearOperator::zero(space);
    for n in 0..=top {
        let c = minus_i_eta_pow(eta, 2 * n + k) / (factorial(n) * factorial(n + k));
        s = s.add_scaled(c, &ad.power((n + k) as u32).compose(&a.power(n as u32))?)?;
    }
    let op = transition(space, leg, LEVEL_C)?.compose(&s)?;
    let mut h = PulsedHamiltonian::new(space);
    h.add_with_hc(op, drive.envelope(C64::new(-(-eta * eta / 2.0).exp(), 0.0)))?;
    Ok(h)
}

/// One leg `−g_i(t) a_axis†^κ ⊗ |i⟩⟨c|` of a Λ system, with `drive` carrying
/// the leading-order coupling `g_i(t)`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LambdaLeg {
    pub level: usize,
    pub axis: Axis,
    pub kappa: u32,
    pub drive: Drive,
}

impl LambdaLeg {
    fn motional(&self, space: &SpaceSpec) -> Result<LinearOperator> {
        Ok(creation(space, self.axis)?.power(self.kappa))
    }
}

/// `Σᵢ −gᵢ(t) a_{axisᵢ}†^{κᵢ} ⊗ |i⟩⟨c| + h.c.` over the legs.
pub fn lambda_hamiltonian(space: &SpaceSpec, legs: &[LambdaLeg]) -> Result<PulsedHamiltonian> {
    need_levels(space, 3)?;
    let mut h = PulsedHamiltonian::new(space);
    for leg in legs {
        if leg.level == LEVEL_C {
            return Err(Error::InvalidParameter(
                "lambda leg must end on |a> or |b>".into(),
            ));
        }
        let op = transition(space, leg.level, LEVEL_C)?.compose(&leg.motional(space)?)?;
        h.add_with_hc(op, leg.drive.envelope(C64::new(-1.0, 0.0)))?;
    }
    Ok(h)
}

/// Instantaneous dark state of a two-leg Λ Hamiltonian generated by the
/// motional state `chi`: `g_b* O_b†χ ⊗ |a⟩ − g_a* O_a†χ ⊗ |b⟩` (normalized),
/// where `O_i = a†^{κᵢ}` and legs are ordered `[a, b]`. It is annihilated by
/// the Hamiltonian because the `O_i†` commute. Returns `None` when it vanishes.
pub fn lambda_dark_state(
    space: &SpaceSpec,
    legs: &[LambdaLeg; 2],
    chi: &StateVector,
    t: f64,
) -> Result<Option<StateVector>> {
    let m = space.motional();
    if chi.space() != &m {
        return Err(Error::SpaceMismatch);
    }
    let [la, lb] = legs;
    if la.level != LEVEL_A || lb.level != LEVEL_B {
        return Err(Error::InvalidParameter(
            "legs must be ordered [a, b]".into(),
        ));
    }
    let ga = la.drive.value(t);
    let gb = lb.drive.value(t);
    let part_a = la.motional(&m)?.dagger().apply(chi)?;
    let part_b = lb.motional(&m)?.dagger().apply(chi)?;
    let d = part_b
        .with_level(space, LEVEL_A)?
        .scaled(gb.conj())
        .add_scaled(-ga.conj(), &part_a.with_level(space, LEVEL_B)?)?;
    if d.norm() < 1e-300 {
        return Ok(None);
    }
    Ok(Some(d.normalized()?))
}

#[cfg(test)]
mod tests {
    use super::super::pulse::PulseShape;
    use super::*;
    use std::f64::consts::PI;

    fn sq(t: f64) -> PulseShape {
        PulseShape::sin_squared(t, 0.0).unwrap()
    }

    /// Laguerre polynomial by the three-term recurrence.
    fn laguerre(n: usize, x: f64) -> f64 {
        let (mut l0, mut l1) = (1.0, 1.0 - x);
        if n == 0 {
            return l0;
        }
        for k in 1..n {
            let l2 =
                ((2 * k + 1) as f64 - x) * l1 / (k + 1) as f64 - k as f64 * l0 / (k + 1) as f64;
            l0 = l1;
            l1 = l2;
        }
        l1
    }

    #[test]
    fn zero_eta_is_pure_flip() {
        let s = SpaceSpec::two_mode(3, 2).unwrap();
        let d = Drive::new(1.3, 0.4, sq(1.0), 2);
        let h = full_raman(&s, [0.0, 0.0], [10.0, 11.0], &d, 6).unwrap();
        let t = 0.3;
        let mut want = PulsedHamiltonian::new(&s);
        want.add_with_hc(
            transition(&s, LEVEL_A, LEVEL_B).unwrap(),
            d.envelope(C64::new(-1.0, 0.0)),
        )
        .unwrap();
        assert!(h.matrix_at(t).max_abs_diff(&want.matrix_at(t)) < 1e-14);
    }

    #[test]
    fn full_raman_is_hermitian() {
        let s = SpaceSpec::two_mode(4, 2).unwrap();
        let d = Drive::new(1.0, 0.2, sq(1.0), 2);
        let h = full_raman(&s, [0.2, 0.1], [30.0, 33.0], &d, 6).unwrap();
        let times: Vec<f64> = (0..20).map(|k| k as f64 / 19.0).collect();
        assert!(h.hermiticity_error(&times) < 1e-12);
    }

    #[test]
    fn low_series_order_rejected() {
        let s = SpaceSpec::two_mode(8, 2).unwrap();
        let d = Drive::new(1.0, 0.0, sq(1.0), 2);
        assert!(full_raman(&s, [0.5, 0.0], [1.0, 1.0], &d, 2).is_err());
    }

    #[test]
    fn rwa_matches_laguerre_series() {
        let s = SpaceSpec::new(vec![8], 2, None).unwrap();
        let eta = 0.2;
        let d = Drive::new(1.0, 0.0, PulseShape::flat(1.0, 0.0).unwrap(), 1);
        let h = rwa_raman(&s, Axis::X, eta, &d, 16)
            .unwrap()
            .operator_at(0.5);
        for n in 0..=8 {
            let a = StateVector::basis(&s, &[n], LEVEL_A, 0).unwrap();
            let b = StateVector::basis(&s, &[n], LEVEL_B, 0).unwrap();
            let el = h.matrix_element(&a, &b).unwrap();
            let want = -(-eta * eta / 2.0).exp() * laguerre(n, eta * eta);
            assert!((el - C64::new(want, 0.0)).norm() < 1e-13, "n = {n}");
            assert!((carrier_factor(eta, n, 16) - laguerre(n, eta * eta)).abs() < 1e-13);
        }
    }

    #[test]
    fn rwa_commutes_with_number() {
        let s = SpaceSpec::two_mode(5, 2).unwrap();
        let d = Drive::new(1.0, 0.3, sq(1.0), 2);
        let h = rwa_raman(&s, Axis::X, 0.2, &d, 6).unwrap().operator_at(0.4);
        let n = number(&s, Axis::X).unwrap();
        let c = h
            .compose(&n)
            .unwrap()
            .add_scaled(C64::new(-1.0, 0.0), &n.compose(&h).unwrap())
            .unwrap();
        assert!(c.matrix().norm_inf() < 1e-14);
    }

    #[test]
    fn number_sensitive_properties() {
        let s = SpaceSpec::two_mode(4, 2).unwrap();
        let d = Drive::new(2.0, PI / 2.0, sq(1.0), 2);
        let h = number_sensitive(&s, Axis::X, &d).unwrap().operator_at(0.5);
        let vac = StateVector::basis(&s, &[0, 3], LEVEL_B, 0).unwrap();
        assert!(h.apply(&vac).unwrap().norm() < 1e-15);
        for axis in [Axis::X, Axis::Y] {
            let n = number(&s, axis).unwrap();
            let c = h
                .compose(&n)
                .unwrap()
                .add_scaled(C64::new(-1.0, 0.0), &n.compose(&h).unwrap())
                .unwrap();
            assert!(c.matrix().norm_inf() < 1e-14);
        }
    }

    #[test]
    fn composite_leading_order_matches_ideal() {
        let s = SpaceSpec::new(vec![6], 2, None).unwrap();
        let eta: f64 = 0.2;
        let g = C64::new(0.0, 1.0);
        let g1 = first_pair_coupling(g, eta);
        assert!((effective_coupling(g1, eta) - g).norm() < 1e-15);
        let shape = PulseShape::flat(1.0, 0.0).unwrap();
        let comp =
            number_sensitive_composite(&s, Axis::X, eta, &Drive::complex(g1, shape.clone(), 2), 12)
                .unwrap()
                .operator_at(0.5);
        let ideal = number_sensitive(&s, Axis::X, &Drive::complex(g, shape, 2))
            .unwrap()
            .operator_at(0.5);
        for n in 0..=6usize {
            let a = StateVector::basis(&s, &[n], LEVEL_A, 0).unwrap();
            let b = StateVector::basis(&s, &[n], LEVEL_B, 0).unwrap();
            let dev = (comp.matrix_element(&a, &b).unwrap()
                - ideal.matrix_element(&a, &b).unwrap())
            .norm();
            // Next term: e^{−η²/2} g⁽¹⁾ η⁴ n(n−1)/4.
            let next = eta.powi(4) * (n * n.saturating_sub(1)) as f64 / 4.0
                * g1.norm()
                * (-eta * eta / 2.0).exp();
            assert!(
                (dev - next).abs() <= 0.05 * next + 1e-14,
                "n = {n}: {dev} vs {next}"
            );
        }
    }

    #[test]
    fn split_ignores_balanced_states() {
        let s = SpaceSpec::two_mode(4, 2).unwrap();
        let d = Drive::new(1.0, 0.0, sq(1.0), 2);
        let h = split(&s, &d).unwrap().operator_at(0.5);
        let st = StateVector::basis(&s, &[2, 2], LEVEL_B, 0).unwrap();
        assert!(h.apply(&st).unwrap().norm() < 1e-15);
        let comp = split_composite(&s, 0.2, &d, 8).unwrap().operator_at(0.5);
        assert!(comp.apply(&st).unwrap().norm() < 1e-15);
        let tot = number(&s, Axis::X)
            .unwrap()
            .add_scaled(C64::new(1.0, 0.0), &number(&s, Axis::Y).unwrap())
            .unwrap();
        let c = comp
            .compose(&tot)
            .unwrap()
            .add_scaled(C64::new(-1.0, 0.0), &tot.compose(&comp).unwrap())
            .unwrap();
        assert!(c.matrix().norm_inf() < 1e-14);
    }

    #[test]
    fn fourth_sideband_coupling() {
        let g = sideband_coupling(C64::new(2.0 * PI * 15e6, 0.0), 0.2, 4);
        let want = 2.0 * PI * 15e6 * (-0.02f64).exp() * 0.2f64.powi(4) / 24.0;
        assert!((g - C64::new(want, 0.0)).norm() < 1e-9 * want);
        assert!((g.norm() / (2.0 * PI) - 980.2).abs() < 0.1);
        let back = dipole_coupling_for(g, 0.2, 4);
        assert!((back - C64::new(2.0 * PI * 15e6, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn first_sideband_leading_form() {
        let s = SpaceSpec::new(vec![3], 3, None).unwrap();
        let d = Drive::new(1.0, 0.0, PulseShape::flat(1.0, 0.0).unwrap(), 1);
        let eta = 0.2;
        let h = sideband_jcm(&s, LEVEL_B, Axis::X, 1, eta, &d, SidebandSeries::Leading)
            .unwrap()
            .operator_at(0.5);
        let c1 = StateVector::basis(&s, &[1], LEVEL_C, 0).unwrap();
        let b2 = StateVector::basis(&s, &[2], LEVEL_B, 0).unwrap();
        let el = h.matrix_element(&b2, &c1).unwrap();
        let want = -(-eta * eta / 2.0f64).exp() * C64::new(0.0, -eta) * 2f64.sqrt();
        assert!((el - want).norm() < 1e-15);
        let full = sideband_jcm(&s, LEVEL_B, Axis::X, 1, eta, &d, SidebandSeries::Full)
            .unwrap()
            .operator_at(0.5);
        assert!(full.hermiticity_error() < 1e-15);
        assert!((full.matrix_element(&b2, &c1).unwrap() - want).norm() < 0.05 * want.norm());
    }

    #[test]
    fn lambda_dark_state_is_annihilated() {
        let s = SpaceSpec::two_mode(5, 3).unwrap();
        let m = s.motional();
        let t_len = 1.0;
        let legs = [
            LambdaLeg {
                level: LEVEL_A,
                axis: Axis::X,
                kappa: 0,
                drive: Drive::new(3.0, 0.3, sq(t_len), 1),
            },
            LambdaLeg {
                level: LEVEL_B,
                axis: Axis::X,
                kappa: 1,
                drive: Drive::new(
                    3.0,
                    -0.7,
                    PulseShape::sin_squared(t_len, -t_len / 3.0).unwrap(),
                    1,
                ),
            },
        ];
        let h = lambda_hamiltonian(&s, &legs).unwrap();
        let chi = StateVector::basis(&m, &[3, 1], 0, 0).unwrap();
        for k in 1..50 {
            let t = -t_len / 3.0 + k as f64 * (4.0 * t_len / 3.0) / 50.0;
            if let Some(d) = lambda_dark_state(&s, &legs, &chi, t).unwrap() {
                let hn = h.operator_at(t).matrix().norm_inf();
                assert!(h.apply(t, &d).unwrap().norm() <= 1e-10 * hn.max(1.0));
            }
        }
    }
}
