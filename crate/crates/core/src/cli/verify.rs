//! Invariant suite behind `mqec verify`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::{Preset, StageMode};
use crate::dynamics::{evolve_lindblad, LindbladModel, StepControl};
use crate::encoding::{
    bogolyubov, build_code, check_no_jump_condition, check_reversibility, dyson_first_order,
    CodeSubspaces, LogicalQubit, ModeRotation,
};
use crate::error::Result;
use crate::hilbert::{annihilation, density, Axis, LinearOperator, SpaceSpec, StateVector};
use crate::raman::{lambda_dark_state, lambda_hamiltonian};
use crate::restore::RestorePlan;
use crate::syndrome::Detector;

/// Outcome of one invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// Runs every invariant on the preset's code.
pub fn verify_suite(p: &Preset) -> Result<Vec<Check>> {
    let space = SpaceSpec::two_mode(p.code.cutoff, 1)?;
    let code = build_code(&space, p.code.phi1, p.code.phi2)?;
    verify_code(p, &code)
}

fn max_diff(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.add_scaled(C64::new(-1.0, 0.0), b)?
        .amplitudes()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

fn matrix_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs every invariant on `code`, which may be supplied corrupted.
pub fn verify_code(p: &Preset, code: &CodeSubspaces) -> Result<Vec<Check>> {
    let space = code.space().clone();
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "subspace orthonormality",
        code.orthonormality_error()?,
        1e-12,
    ));

    for axis in [Axis::X, Axis::Y] {
        let a = annihilation(&space, axis)?;
        let jb = code.jump_basis(axis);
        let mut alg: f64 = 0.0;
        let mut orth: f64 = 0.0;
        for k in 0..2 {
            let img = a.apply(&code.h0[k])?;
            alg = alg.max(max_diff(
                &img,
                &jb[k].clone().scaled(C64::new(2f64.sqrt(), 0.0)),
            )?);
            orth = orth.max(jb[1 - k].inner(&img)?.norm());
        }
        checks.push(Check::at_most(
            format!("{}-jump algebra", axis.name()),
            alg,
            1e-12,
        ));
        checks.push(Check::at_most(
            format!("{}-jump orthogonality", axis.name()),
            orth,
            1e-12,
        ));
    }

    let n_bar = p.protocol.n_bar;
    let model = LindbladModel::motional_damping(&space, 1.0, n_bar)?;
    for ch in model.channels() {
        let r = check_reversibility(&ch.op, &code.h0)?;
        checks.push(Check::at_most(
            format!("reversibility of {} on H0", ch.label),
            r.max_deviation,
            1e-10,
        ));
    }
    let nj = check_no_jump_condition(&code.h0, 1.0, &[0.05, 0.5])?;
    let nj_dev = nj
        .samples
        .iter()
        .map(|s| s.max_deviation)
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "no-jump condition".into(),
        value: nj_dev,
        tolerance: 1e-7,
        pass: nj.holds_for_all_tau && nj.samples.iter().all(|s| s.holds),
    });

    checks.push(bogolyubov_check(p)?);
    checks.extend(dyson_check(p, code)?);
    checks.push(interrogation_check(code)?);
    checks.push(dark_state_check(p)?);
    Ok(checks)
}

/// `Σ AᵢρAᵢ†` and `Σ Aᵢ†Aᵢ` are unchanged by a rotation of the decay pair.
fn bogolyubov_check(p: &Preset) -> Result<Check> {
    let s = SpaceSpec::two_mode(4, 1)?;
    let code = build_code(&s, p.code.phi1, p.code.phi2)?;
    let mixed = StateVector::fock_superposition(
        &s,
        0,
        &[
            (C64::new(0.3, 0.1), &[1, 2]),
            (C64::new(-0.2, 0.5), &[3, 0]),
            (C64::new(0.4, 0.0), &[2, 2]),
        ],
    )?;
    let sandwich = |ops: &[LinearOperator], rho: &DMatrix<C64>| {
        ops.iter()
            .map(|o| o.matrix().to_dense() * rho * o.matrix().to_dense().adjoint())
            .fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |a, b| a + b)
    };
    let base = bogolyubov(
        &s,
        ModeRotation {
            theta: 0.0,
            phi: 0.0,
        },
        1.0,
    )?;
    let mut worst: f64 = 0.0;
    for (theta, phi) in [(0.3, 0.0), (0.9, 1.7), (FRAC_1_SQRT_2, -2.2)] {
        let rot = bogolyubov(&s, ModeRotation { theta, phi }, 1.0)?;
        for rho in [code.h0[0].density(), mixed.density()] {
            worst = worst.max(matrix_diff(&sandwich(&rot, &rho), &sandwich(&base, &rho)));
        }
        let gram = |ops: &[LinearOperator]| {
            ops.iter()
                .map(|o| o.matrix().to_dense().adjoint() * o.matrix().to_dense())
                .fold(DMatrix::zeros(s.dim(), s.dim()), |a, b| a + b)
        };
        worst = worst.max(matrix_diff(&gram(&rot), &gram(&base)));
    }
    Ok(Check::at_most("Bogolyubov invariance", worst, 1e-10))
}

/// First-order mixture against the master equation at the protocol `γτ`
/// (0.05 when the preset has no decay).
fn dyson_check(p: &Preset, code: &CodeSubspaces) -> Result<Vec<Check>> {
    let tau = p.protocol.tau;
    let gamma = if p.protocol.gamma > 0.0 {
        p.protocol.gamma
    } else {
        0.05 / tau
    };
    let gt = gamma * tau;
    let q = LogicalQubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8))?
        .with_phases(code.phi1, code.phi2);
    let mix = dyson_first_order(&q, code, gamma, tau)?;
    let model = LindbladModel::motional_damping(code.space(), gamma, 0.0)?;
    let psi = crate::encoding::encode(&q, code)?;
    let exact = evolve_lindblad(&model, &psi.density(), 0.0, tau, StepControl::default())?;
    let residual = density::trace_distance(&mix.density(), &exact);
    Ok(vec![Check::at_most(
        format!("Dyson residual at gamma*tau = {gt:.3e}"),
        residual,
        10.0 * gt * gt,
    )])
}

/// Both interrogations leave a code state untouched without a photon.
fn interrogation_check(code: &CodeSubspaces) -> Result<Check> {
    let s = SpaceSpec::two_mode(code.space().mode_cutoffs[0], 2)?;
    let lifted = build_code(&s, code.phi1, code.phi2)?;
    let q = LogicalQubit::new(C64::new(0.28, -0.5), C64::new(0.7, 0.42))?
        .with_phases(code.phi1, code.phi2);
    let psi = crate::encoding::encode(&q, &lifted)?;
    let mut worst: f64 = 0.0;
    for (prob, out) in Detector::ideal().detect_branches(&psi, &lifted)? {
        if !out.x_jump && !out.y_jump {
            worst = worst
                .max((1.0 - prob).abs())
                .max(1.0 - out.post_state.fidelity(&psi)?);
        } else {
            worst = worst.max(prob);
        }
    }
    Ok(Check::at_most(
        "double interrogation identity on H0",
        worst,
        1e-9,
    ))
}

/// The recombine dark state is annihilated by the Λ Hamiltonian.
fn dark_state_check(p: &Preset) -> Result<Check> {
    let plan = RestorePlan::x_channel(p, StageMode::Pulsed)?;
    let s = SpaceSpec::two_mode(plan.pulsed_cutoff, 3)?;
    let legs = plan.combine.legs();
    let h = lambda_hamiltonian(&s, &legs)?;
    let chi = StateVector::basis(&s.motional(), &[4, 4], 0, 0)?;
    let mut worst: f64 = 0.0;
    for frac in [0.3, 0.5, 0.7] {
        let t = frac * plan.combine.duration();
        if let Some(d) = lambda_dark_state(&s, &legs, &chi, t)? {
            let scale = h.operator_at(t).matrix().norm_inf();
            worst = worst.max(h.apply(t, &d)?.norm() / scale);
        }
    }
    Ok(Check::at_most("dark-state annihilation", worst, 1e-10))
}
