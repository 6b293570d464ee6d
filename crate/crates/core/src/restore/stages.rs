//! The individual restoration stages in ideal and pulsed form.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::plan::{Passage, RestorePlan, SplitStage, ADIABATIC_MIN_AREA};
use crate::config::StageMode;
use crate::dynamics::{evolve_schrodinger, evolve_schrodinger_observed, StepControl};
use crate::error::{Error, Result};
use crate::hilbert::{LinearOperator, SpaceSpec, StateVector, LEVEL_A, LEVEL_B, LEVEL_C};
use crate::raman::lambda_hamiltonian;
use crate::syndrome::number_rotation;

/// Amplitudes below this are treated as absent when choosing tracked states.
const PRESENT: f64 = 1e-30;

/// Diagnostics of one stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    /// Largest `|c⟩` population seen during the stage.
    pub max_excited: f64,
    /// Smallest weight in the instantaneous dark subspace, for pulsed passages.
    pub min_dark_overlap: Option<f64>,
    /// `∫|g| dt` of each passage pulse.
    pub area: Option<f64>,
    pub adiabaticity_warning: bool,
}

impl StageReport {
    fn exact(stage: &'static str) -> Self {
        Self {
            stage,
            max_excited: 0.0,
            min_dark_overlap: None,
            area: None,
            adiabaticity_warning: false,
        }
    }
}

/// One transferred component: `|n⟩|a⟩` at `a_idx`, target `|m⟩|b⟩` at
/// `b_idx`, and the factors `‖O_b†χ‖`, `‖O_a†χ‖`.
struct Tracked {
    a_idx: usize,
    b_idx: usize,
    s_b: f64,
    s_a: f64,
}

fn falling(n: usize, k: u32) -> f64 {
    (0..k as usize)
        .map(|j| (n - j) as f64)
        .product::<f64>()
        .sqrt()
}

/// Runs a pulsed passage on `psi` (three-level space), tracking the `|c⟩`
/// population and the weight in the span of the instantaneous dark states of
/// the populated `|a⟩` components plus the stationary spectator components.
pub fn run_passage(
    psi: &StateVector,
    passage: &Passage,
    ctrl: StepControl,
    stage: &'static str,
) -> Result<(StateVector, StageReport)> {
    let space = psi.space();
    if space.electronic_levels < 3 {
        return Err(Error::InvalidSpace("pulsed passage needs level |c>".into()));
    }
    let h = lambda_hamiltonian(space, &passage.legs())?;
    let amps = psi.amplitudes();
    let mut tracked = Vec::new();
    let mut covered = vec![false; space.dim()];
    for i in 0..space.dim() {
        let l = space.label(i);
        if l.level != LEVEL_A || amps[i].norm_sqr() < PRESENT {
            continue;
        }
        if let Some((chi, m)) = passage.partner(&l.modes, &space.mode_cutoffs) {
            let b_idx = space.index(&m, LEVEL_B, l.photons)?;
            covered[i] = true;
            covered[b_idx] = true;
            tracked.push(Tracked {
                a_idx: i,
                b_idx,
                s_b: falling(chi[passage.stokes.axis.index()], passage.stokes.kappa),
                s_a: falling(chi[passage.pump.axis.index()], passage.pump.kappa),
            });
        }
    }
    let h_mid = h.operator_at(passage.duration() / 2.0);
    let mut spectators = Vec::new();
    for i in 0..space.dim() {
        if covered[i] || amps[i].norm_sqr() < PRESENT {
            continue;
        }
        let e = StateVector::basis(
            space,
            &space.label(i).modes,
            space.label(i).level,
            space.label(i).photons,
        )?;
        if h_mid.apply(&e)?.norm() == 0.0 {
            spectators.push(i);
        }
    }
    let excited: Vec<usize> = (0..space.dim())
        .filter(|&i| space.label(i).level == LEVEL_C)
        .collect();
    let c_pop = |x: &nalgebra::DVector<C64>| excited.iter().map(|&i| x[i].norm_sqr()).sum::<f64>();
    let mut max_c = c_pop(amps);
    let mut min_dark: Option<f64> = None;
    let out = evolve_schrodinger_observed(&h, psi, 0.0, passage.duration(), ctrl, |t, x| {
        max_c = max_c.max(c_pop(x));
        let ga = passage.pump.drive.value(t);
        let gb = passage.stokes.drive.value(t);
        let mut w: f64 = spectators.iter().map(|&i| x[i].norm_sqr()).sum();
        for k in &tracked {
            let den = (gb * k.s_b).norm_sqr() + (ga * k.s_a).norm_sqr();
            if den == 0.0 {
                return;
            }
            w += (gb * k.s_b * x[k.a_idx] - ga * k.s_a * x[k.b_idx]).norm_sqr() / den;
        }
        let frac = w / x.norm_squared();
        min_dark = Some(min_dark.map_or(frac, |m: f64| m.min(frac)));
    })?;
    let area = passage.area();
    let report = StageReport {
        stage,
        max_excited: max_c,
        min_dark_overlap: min_dark,
        area: Some(area),
        adiabaticity_warning: area < ADIABATIC_MIN_AREA,
    };
    Ok((out, report))
}

fn passage_stage(
    psi: &StateVector,
    passage: &Passage,
    mode: StageMode,
    ctrl: StepControl,
    name: &'static str,
) -> Result<(StateVector, StageReport)> {
    match mode {
        StageMode::Ideal => Ok((
            passage.ideal(psi.space())?.apply(psi)?,
            StageReport::exact(name),
        )),
        StageMode::Pulsed => run_passage(psi, passage, ctrl, name),
    }
}

/// Step 1: adds one quantum along the channel axis, `|n⟩|a⟩ → |n + e⟩|b⟩`.
pub fn add_quantum(psi: &StateVector, plan: &RestorePlan) -> Result<(StateVector, StageReport)> {
    passage_stage(psi, &plan.add, plan.mode, plan.ctrl, "add")
}

/// Step 2: splits the `|b⟩` population of `|4,0⟩` (x channel) into
/// `(|a⟩ + |b⟩)/√2`, leaving `|2,2⟩` untouched.
pub fn split_stage(psi: &StateVector, plan: &RestorePlan) -> Result<(StateVector, StageReport)> {
    let s: &SplitStage = &plan.split;
    let out = match plan.mode {
        StageMode::Ideal => s.ideal(psi.space())?.apply(psi)?,
        StageMode::Pulsed => evolve_schrodinger(
            &s.hamiltonian(psi.space())?,
            psi,
            0.0,
            s.duration,
            plan.ctrl,
        )?,
    };
    Ok((out, StageReport::exact("split")))
}

/// Step 3: moves four quanta from the channel axis to the other axis while
/// transferring `|a⟩ → |b⟩`, disentangling motion and electronic state.
pub fn recombine(psi: &StateVector, plan: &RestorePlan) -> Result<(StateVector, StageReport)> {
    passage_stage(psi, &plan.combine, plan.mode, plan.ctrl, "combine")
}

/// Carrier π pulse returning `|b⟩ → |a⟩`, with `|a⟩ → −|b⟩`; identity on `|c⟩`.
pub fn carrier_swap(space: &SpaceSpec) -> Result<LinearOperator> {
    number_rotation(space, |_| std::f64::consts::FRAC_PI_2)
}

/// Population of `psi` on electronic level `level`, relative to its norm.
pub fn level_fraction(psi: &StateVector, level: usize) -> f64 {
    psi.level_population(level) / psi.norm_sqr().max(f64::MIN_POSITIVE)
}
