//! Fixed-step fourth-order Runge–Kutta integrators for states and density
//! matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::hamiltonian::PulsedHamiltonian;
use super::lindblad::LindbladModel;
use crate::error::{Error, Result};
use crate::hilbert::{density, CsrMatrix, StateVector};

/// Norm drift tolerated during unitary evolution before an error is raised.
pub const NORM_DRIFT_TOL: f64 = 1e-6;
/// Trace drift tolerated during master-equation evolution.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

/// Step-size control: the step is chosen so that `rate · dt ≤ max_phase`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub max_phase: f64,
    /// Optional hard cap on the step.
    pub max_dt: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            max_phase: 0.05,
            max_dt: None,
        }
    }
}

impl StepControl {
    /// Number of steps and step length covering `span` at the given rate bound.
    pub fn steps(&self, span: f64, rate: f64) -> Result<(usize, f64)> {
        if !(self.max_phase > 0.0) {
            return Err(Error::InvalidParameter("max_phase must be positive".into()));
        }
        if span == 0.0 {
            return Ok((0, 0.0));
        }
        let mut dt = if rate > 0.0 {
            self.max_phase / rate
        } else {
            span
        };
        if let Some(cap) = self.max_dt {
            dt = dt.min(cap);
        }
        let n = (span / dt).ceil().max(1.0) as usize;
        Ok((n, span / n as f64))
    }
}

/// Right-hand side `dψ/dt = −i H(t) ψ − D ψ`.
struct StateRhs<'a> {
    h: Option<&'a PulsedHamiltonian>,
    decay: Option<&'a CsrMatrix>,
}

impl StateRhs<'_> {
    fn eval(&self, t: f64, x: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(x.len());
        if let Some(h) = self.h {
            h.apply_acc(t, -I, x.as_slice(), out.as_mut_slice());
        }
        if let Some(d) = self.decay {
            d.mul_vec_acc(C64::new(-1.0, 0.0), x.as_slice(), out.as_mut_slice());
        }
        out
    }

    fn step(&self, t: f64, dt: f64, x: &DVector<C64>) -> DVector<C64> {
        let h = C64::new(dt, 0.0);
        let half = C64::new(0.5 * dt, 0.0);
        let k1 = self.eval(t, x);
        let k2 = self.eval(t + 0.5 * dt, &(x + &k1 * half));
        let k3 = self.eval(t + 0.5 * dt, &(x + &k2 * half));
        let k4 = self.eval(t + dt, &(x + &k3 * h));
        x + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
    }
}

fn check_interval(t0: f64, t1: f64) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "invalid time interval [{t0}, {t1}]"
        )));
    }
    Ok(())
}

/// Integrates the Schrödinger equation, calling `observe(t, ψ)` after every step.
pub fn evolve_schrodinger_observed(
    h: &PulsedHamiltonian,
    psi: &StateVector,
    t0: f64,
    t1: f64,
    ctrl: StepControl,
    mut observe: impl FnMut(f64, &DVector<C64>),
) -> Result<StateVector> {
    check_interval(t0, t1)?;
    if psi.space() != h.space() {
        return Err(Error::SpaceMismatch);
    }
    let rhs = StateRhs {
        h: Some(h),
        decay: None,
    };
    let (n, dt) = ctrl.steps(t1 - t0, h.rate_bound())?;
    let n0 = psi.norm();
    let mut x = psi.amplitudes().clone();
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        x = rhs.step(t, dt, &x);
        observe(t + dt, &x);
    }
    let drift = (x.norm() - n0).abs();
    if drift > NORM_DRIFT_TOL * n0.max(1.0) {
        return Err(Error::NormDrift(drift));
    }
    StateVector::new(psi.space().clone(), x)
}

/// Integrates the Schrödinger equation over `[t0, t1]`.
pub fn evolve_schrodinger(
    h: &PulsedHamiltonian,
    psi: &StateVector,
    t0: f64,
    t1: f64,
    ctrl: StepControl,
) -> Result<StateVector> {
    evolve_schrodinger_observed(h, psi, t0, t1, ctrl, |_, _| {})
}

/// Evolves under the effective non-Hermitian Hamiltonian. The norm of the
/// result is the no-jump survival amplitude.
pub fn evolve_effective(
    model: &LindbladModel,
    psi: &StateVector,
    t0: f64,
    t1: f64,
    ctrl: StepControl,
) -> Result<StateVector> {
    check_interval(t0, t1)?;
    if psi.space() != model.space() {
        return Err(Error::SpaceMismatch);
    }
    let rhs = StateRhs {
        h: model.hamiltonian(),
        decay: Some(model.decay_matrix()),
    };
    let (n, dt) = ctrl.steps(t1 - t0, model.rate_bound())?;
    let n0 = psi.norm();
    let mut x = psi.amplitudes().clone();
    for k in 0..n {
        x = rhs.step(t0 + k as f64 * dt, dt, &x);
    }
    let growth = x.norm() - n0;
    if growth > NORM_DRIFT_TOL * n0.max(1.0) {
        return Err(Error::NormDrift(growth));
    }
    StateVector::new(psi.space().clone(), x)
}

/// Single effective-evolution step, used by the trajectory sampler.
pub(crate) fn effective_step(
    model: &LindbladModel,
    t: f64,
    dt: f64,
    x: &DVector<C64>,
) -> DVector<C64> {
    StateRhs {
        h: model.hamiltonian(),
        decay: Some(model.decay_matrix()),
    }
    .step(t, dt, x)
}

/// Right-hand side of the master equation.
fn lindblad_rhs(model: &LindbladModel, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let d = rho.nrows();
    // X = −iKρ with K = H − iD.
    let mut x = DMatrix::zeros(d, d);
    if let Some(h) = model.hamiltonian() {
        for term in h.terms() {
            let e = term.envelope.eval(t);
            if e != C64::new(0.0, 0.0) {
                term.op.matrix().mul_dense_acc(-I * e, rho, &mut x);
            }
        }
    }
    model
        .decay_matrix()
        .mul_dense_acc(C64::new(-1.0, 0.0), rho, &mut x);
    let mut out = &x + x.adjoint();
    for l in model.jump_matrices() {
        let lr = l.mul_dense(rho);
        l.mul_dense_acc(C64::new(1.0, 0.0), &lr.adjoint(), &mut out);
    }
    out
}

fn lindblad_step(model: &LindbladModel, t: f64, dt: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = lindblad_rhs(model, t, rho);
    let k2 = lindblad_rhs(model, t + 0.5 * dt, &(rho + &k1 * half));
    let k3 = lindblad_rhs(model, t + 0.5 * dt, &(rho + &k2 * half));
    let k4 = lindblad_rhs(model, t + dt, &(rho + &k3 * C64::new(dt, 0.0)));
    let mut next = rho
        + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
    // Remove the anti-Hermitian rounding residue.
    next = (&next + next.adjoint()) * C64::new(0.5, 0.0);
    next
}

/// Integrates the master equation and returns `ρ` at each requested time.
///
/// `times` must be non-decreasing and start at or after `t0`.
pub fn evolve_lindblad_sampled(
    model: &LindbladModel,
    rho: &DMatrix<C64>,
    t0: f64,
    times: &[f64],
    ctrl: StepControl,
) -> Result<Vec<DMatrix<C64>>> {
    let d = model.space().dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.nrows(),
        });
    }
    let tr0 = rho.trace();
    let rate = model.rate_bound()
        + model
            .jump_matrices()
            .iter()
            .map(|l| l.norm_inf().powi(2))
            .sum::<f64>();
    let mut out = Vec::with_capacity(times.len());
    let mut current = rho.clone();
    let mut t = t0;
    for &target in times {
        check_interval(t, target)?;
        let (n, dt) = ctrl.steps(target - t, rate)?;
        for k in 0..n {
            current = lindblad_step(model, t + k as f64 * dt, dt, &current);
        }
        t = target;
        let drift = (current.trace() - tr0).norm();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::TraceDrift(drift));
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// Integrates the master equation over `[t0, t1]`.
pub fn evolve_lindblad(
    model: &LindbladModel,
    rho: &DMatrix<C64>,
    t0: f64,
    t1: f64,
    ctrl: StepControl,
) -> Result<DMatrix<C64>> {
    Ok(evolve_lindblad_sampled(model, rho, t0, &[t1], ctrl)?
        .pop()
        .expect("one sample"))
}

/// Fails when `ρ` has an eigenvalue below `−POSITIVITY_TOL`.
pub fn check_positive(rho: &DMatrix<C64>) -> Result<()> {
    let e = density::min_eigenvalue(rho);
    if e < -POSITIVITY_TOL {
        return Err(Error::NotPositive(e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::Envelope;
    use crate::hilbert::{annihilation, number, transition, Axis, SpaceSpec};

    #[test]
    fn rabi_flop_matches_closed_form() {
        let s = SpaceSpec::new(vec![1], 2, None).unwrap();
        let mut h = PulsedHamiltonian::new(&s);
        let omega = 2.0;
        h.add_with_hc(
            transition(&s, 1, 0).unwrap(),
            Envelope::constant(C64::new(omega, 0.0)),
        )
        .unwrap();
        let psi = StateVector::basis(&s, &[0], 0, 0).unwrap();
        let t = 0.7;
        let out = evolve_schrodinger(&h, &psi, 0.0, t, StepControl::default()).unwrap();
        let err = (out.level_population(1) - (omega * t).sin().powi(2)).abs();
        assert!(err < 1e-7, "{err:e}");
    }

    #[test]
    fn effective_decay_of_fock_state() {
        let s = SpaceSpec::new(vec![4], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.5, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[3], 0, 0).unwrap();
        let out = evolve_effective(&m, &psi, 0.0, 0.4, StepControl::default()).unwrap();
        let err = (out.norm_sqr() - (-3.0 * 1.5 * 0.4f64).exp()).abs();
        assert!(err < 1e-7, "{err:e}");
    }

    #[test]
    fn lindblad_population_decay() {
        let s = SpaceSpec::new(vec![3], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.0).unwrap();
        let rho = StateVector::basis(&s, &[1], 0, 0).unwrap().density();
        let t = 0.3;
        let out = evolve_lindblad(&m, &rho, 0.0, t, StepControl::default()).unwrap();
        assert!((out[(1, 1)].re - (-t).exp()).abs() < 1e-9);
        assert!((out[(0, 0)].re - (1.0 - (-t).exp())).abs() < 1e-9);
        check_positive(&out).unwrap();
    }

    #[test]
    fn thermal_steady_state_occupation() {
        let s = SpaceSpec::new(vec![14], 1, None).unwrap();
        let nbar = 0.3;
        let m = LindbladModel::motional_damping(&s, 1.0, nbar).unwrap();
        let rho = StateVector::basis(&s, &[0], 0, 0).unwrap().density();
        let out = evolve_lindblad(&m, &rho, 0.0, 20.0, StepControl::default()).unwrap();
        let n = number(&s, Axis::X).unwrap().matrix().to_dense();
        let occ = (n * &out).trace().re;
        assert!((occ - nbar).abs() < 1e-6, "occupation {occ}");
    }

    #[test]
    fn step_control_counts() {
        let c = StepControl::default();
        assert_eq!(c.steps(1.0, 1.0).unwrap(), (20, 0.05));
        assert_eq!(c.steps(0.0, 1.0).unwrap().0, 0);
        let capped = StepControl {
            max_dt: Some(0.01),
            ..c
        };
        assert_eq!(capped.steps(1.0, 0.0).unwrap().0, 100);
    }

    #[test]
    fn annihilation_drift_guard() {
        // A non-Hermitian "Hamiltonian" grows the norm and must be rejected.
        let s = SpaceSpec::new(vec![3], 1, None).unwrap();
        let mut h = PulsedHamiltonian::new(&s);
        h.add_raw(
            annihilation(&s, Axis::X).unwrap().dagger(),
            Envelope::constant(C64::new(0.0, 1.0)),
        )
        .unwrap();
        let psi = StateVector::basis(&s, &[0], 0, 0).unwrap();
        assert!(matches!(
            evolve_schrodinger(&h, &psi, 0.0, 1.0, StepControl::default()),
            Err(Error::NormDrift(_))
        ));
    }
}
