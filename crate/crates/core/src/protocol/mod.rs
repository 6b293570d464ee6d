//! The stabilization loop: free decay over `τ`, two interrogations and
//! restoration, repeated over many cycles, plus baselines and figures of merit.

pub mod merit;

pub use merit::{
    double_jump_leading, double_jump_probability, figure_of_merit, run_unprotected, scaling_study,
    unprotected_trajectories, FailureEstimate, FigureOfMerit, ScalingFit, UnprotectedPoint,
    QUOTED_DOUBLE_JUMP, QUOTED_SUPPRESSION, SCALING_GRID,
};

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Preset, StageMode};
use crate::dynamics::{
    evolve_effective, run_trajectory_with_rng, trajectory_rng, LindbladModel, StepControl,
    TrajectoryOptions,
};
use crate::encoding::{build_code, encode, CodeSubspaces, LogicalQubit};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, Axis, SpaceSpec, StateVector};
use crate::restore::{restore_channel, Restorer};
use crate::syndrome::{leakage, Detector, SyndromeOutcome, LEAKAGE_TOL};

/// `γτ` at and above which the first-order treatment is flagged.
pub const FIRST_ORDER_LIMIT: f64 = 0.3;

/// Leakage tolerated with pulsed stages. Their residue (about 1e-4 per
/// restoration) is projected out and counted as lost weight; a second jump
/// moves the whole state out and still marks the cycle failed.
pub const PULSED_LEAKAGE_TOL: f64 = 1e-2;

/// Resolved loop parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub gamma: f64,
    pub n_bar: f64,
    pub tau: f64,
    pub cycles: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub stage_mode: StageMode,
    pub detection: bool,
    pub cutoff: usize,
    pub qubit: LogicalQubit,
}

impl ProtocolConfig {
    pub fn from_preset(p: &Preset) -> Result<Self> {
        let s = &p.protocol;
        let q = LogicalQubit::new(
            C64::new(s.qubit[0][0], s.qubit[0][1]),
            C64::new(s.qubit[1][0], s.qubit[1][1]),
        )?
        .with_phases(p.code.phi1, p.code.phi2);
        Ok(Self {
            gamma: s.gamma,
            n_bar: s.n_bar,
            tau: s.tau,
            cycles: s.cycles,
            trajectories: s.trajectories,
            seed: p.seed,
            stage_mode: s.stage_mode,
            detection: s.detection,
            cutoff: p.code.cutoff,
            qubit: q,
        })
    }

    pub fn gamma_tau(&self) -> f64 {
        self.gamma * self.tau
    }
}

/// Key of one trajectory's random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TrajectorySeed {
    pub seed: u64,
    pub index: u64,
}

/// Readout flags of one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SyndromeFlags {
    pub x_jump: bool,
    pub y_jump: bool,
}

/// Record of one cycle of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    /// 1-based.
    pub cycle: usize,
    /// Jumps per damping channel, in model channel order.
    pub jumps: Vec<usize>,
    /// `None` when no interrogation took place.
    pub syndrome: Option<SyndromeFlags>,
    /// `w |⟨target|ψ⟩|²`, where `w` is the weight kept by the pulsed stages.
    pub fidelity: f64,
    /// Weight outside the code and jump subspaces before interrogation.
    pub leakage: f64,
    /// Set from the first cycle whose state left the correctable subspaces.
    pub failed: bool,
    /// Largest population at any mode cutoff.
    pub top_level: f64,
}

/// Restoration of a jump subspace precomputed on its basis pair.
#[derive(Clone, Debug)]
struct CompiledRestore {
    basis: [StateVector; 2],
    images: [StateVector; 2],
}

impl CompiledRestore {
    fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let c0 = self.basis[0].inner(psi)?;
        let c1 = self.basis[1].inner(psi)?;
        self.images[0]
            .clone()
            .scaled(c0)
            .add_scaled(c1, &self.images[1])
    }
}

/// Everything needed to run cycles for one configuration.
#[derive(Clone, Debug)]
pub struct Protocol {
    pub config: ProtocolConfig,
    pub preset: Preset,
    pub space: SpaceSpec,
    pub code: CodeSubspaces,
    pub target: StateVector,
    pub model: LindbladModel,
    pub detector: Detector,
    pub restorer: Restorer,
    pub ctrl: StepControl,
    /// Leakage above which a cycle is marked failed.
    pub leakage_tol: f64,
    /// Non-fatal configuration notes.
    pub warnings: Vec<String>,
    compiled: Option<[CompiledRestore; 2]>,
}

impl Protocol {
    /// Builds the loop. Detection is defined for zero temperature only.
    pub fn new(p: &Preset) -> Result<Self> {
        p.validate()?;
        let config = ProtocolConfig::from_preset(p)?;
        if config.detection && config.n_bar > 0.0 {
            return Err(Error::Unsupported(format!(
                "detection and restoration need n_bar = 0 (got {}); disable protocol.detection for evolution-only runs",
                config.n_bar
            )));
        }
        let mut warnings = Vec::new();
        if config.gamma_tau() >= FIRST_ORDER_LIMIT {
            warnings.push(format!(
                "gamma*tau = {:.3} is outside the first-order regime (< {FIRST_ORDER_LIMIT})",
                config.gamma_tau()
            ));
        }
        let space = SpaceSpec::two_mode(config.cutoff, 2)?;
        let code = build_code(&space, p.code.phi1, p.code.phi2)?;
        let target = encode(&config.qubit, &code)?;
        let model = LindbladModel::motional_damping(&space, config.gamma, config.n_bar)?;
        let mode = config.stage_mode;
        let restorer = Restorer::from_preset(p, mode)?;
        let (detector, compiled) = match mode {
            StageMode::Ideal => (Detector::from_preset(p, mode), None),
            StageMode::Pulsed => {
                let det = Detector::from_preset(p, mode).compile(&space)?;
                let comp = |axis| -> Result<CompiledRestore> {
                    let basis = code.jump_basis(axis).clone();
                    let img =
                        |k: usize| restore_channel(&basis[k], restorer.plan(axis)).map(|o| o.state);
                    Ok(CompiledRestore {
                        images: [img(0)?, img(1)?],
                        basis,
                    })
                };
                (det, Some([comp(Axis::X)?, comp(Axis::Y)?]))
            }
        };
        Ok(Self {
            config,
            preset: p.clone(),
            space,
            code,
            target,
            model,
            detector,
            restorer,
            ctrl: StepControl::default(),
            leakage_tol: match mode {
                StageMode::Ideal => LEAKAGE_TOL,
                StageMode::Pulsed => PULSED_LEAKAGE_TOL,
            },
            warnings,
            compiled,
        })
    }

    /// Labels of the damping channels.
    pub fn channel_labels(&self) -> Vec<String> {
        self.model
            .channels()
            .iter()
            .map(|c| c.label.clone())
            .collect()
    }

    /// Undoes the detected jump. The result may be unnormalized when pulsed
    /// stages lose weight.
    pub fn correct(&self, outcome: &SyndromeOutcome) -> Result<StateVector> {
        match (&self.compiled, outcome.jump()) {
            (Some(c), Some(axis)) if outcome.label_swaps % 2 == 0 => {
                c[axis.index()].apply(&outcome.post_state)
            }
            _ => Ok(self.restorer.restore(outcome)?.state),
        }
    }

    /// Projection onto the code and jump subspaces.
    pub fn project(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zeros(&self.space);
        for e in self.code.all_states() {
            out = out.add_scaled(e.inner(psi)?, e)?;
        }
        Ok(out)
    }

    /// Mean fidelity to the target over every readout branch of `psi`, whose
    /// norm is taken as its weight. Input leaking beyond `leakage_tol` scores
    /// zero; smaller leakage is projected out.
    pub fn expected_fidelity(&self, psi: &StateVector) -> Result<f64> {
        if leakage(psi, &self.code)? > self.leakage_tol {
            return Ok(0.0);
        }
        let psi = self.project(psi)?;
        let w = psi.norm_sqr();
        if w == 0.0 {
            return Ok(0.0);
        }
        let mut f = 0.0;
        for (p, out) in self.detector.detect_branches(&psi, &self.code)? {
            f += p * self.target.inner(&self.correct(&out)?)?.norm_sqr();
        }
        Ok(w * f)
    }

    /// One cycle from `psi` (normalized, on `|a⟩`). `weight` carries the
    /// trajectory weight kept by earlier pulsed stages; `failed` marks a
    /// trajectory that already left the correctable subspaces, after which
    /// only free decay is applied.
    pub fn run_cycle<R: Rng + ?Sized>(
        &self,
        psi: &StateVector,
        cycle: usize,
        weight: f64,
        failed: bool,
        rng: &mut R,
    ) -> Result<(CycleReport, StateVector, f64)> {
        let opts = TrajectoryOptions {
            ctrl: self.ctrl,
            ..TrajectoryOptions::default()
        };
        let traj = run_trajectory_with_rng(&self.model, psi, 0.0, self.config.tau, opts, rng)?;
        let mut jumps = vec![0; self.model.channels().len()];
        for j in &traj.jumps {
            jumps[j.channel] += 1;
        }
        let mut state = traj.final_state;
        let leak = leakage(&state, &self.code)?;
        let mut report = CycleReport {
            cycle,
            jumps,
            syndrome: None,
            fidelity: 0.0,
            leakage: leak,
            failed: failed || (self.config.detection && leak > self.leakage_tol),
            top_level: state.top_level_population(),
        };
        let mut weight = weight;
        if self.config.detection && !report.failed {
            if leak > 0.0 {
                let kept = self.project(&state)?;
                weight *= kept.norm_sqr();
                state = kept.normalized()?;
            }
            let out = self.detector.detect(&state, &self.code, rng)?;
            report.syndrome = Some(SyndromeFlags {
                x_jump: out.x_jump,
                y_jump: out.y_jump,
            });
            let fixed = self.correct(&out)?;
            weight *= fixed.norm_sqr();
            state = fixed.normalized()?;
        }
        report.fidelity = (weight * state.fidelity(&self.target)?).clamp(0.0, 1.0);
        Ok((report, state, weight))
    }

    /// All cycles of one trajectory.
    pub fn run_trajectory(&self, key: TrajectorySeed) -> Result<Vec<CycleReport>> {
        let mut rng = trajectory_rng(key.seed, key.index);
        let mut state = self.target.clone();
        let mut weight = 1.0;
        let mut failed = false;
        let mut out = Vec::with_capacity(self.config.cycles);
        for cycle in 1..=self.config.cycles {
            let (report, next, w) = self.run_cycle(&state, cycle, weight, failed, &mut rng)?;
            failed = report.failed;
            state = next;
            weight = w;
            out.push(report);
        }
        Ok(out)
    }

    /// Default stream keys `(seed, 0..trajectories)`.
    pub fn default_seeds(&self) -> Vec<TrajectorySeed> {
        (0..self.config.trajectories as u64)
            .map(|index| TrajectorySeed {
                seed: self.config.seed,
                index,
            })
            .collect()
    }

    /// Runs the default trajectories.
    pub fn run(&self) -> Result<ProtocolRun> {
        self.run_seeds(&self.default_seeds())
    }

    /// Runs one trajectory per key in parallel.
    pub fn run_seeds(&self, seeds: &[TrajectorySeed]) -> Result<ProtocolRun> {
        if seeds.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one trajectory is required".into(),
            ));
        }
        let runs = seeds
            .par_iter()
            .map(|&k| self.run_trajectory(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProtocolRun::aggregate(self, runs))
    }

    /// Exact cycle with one forced jump on `axis` at `t_jump`: no-jump
    /// evolution, the jump, no-jump evolution to `τ`, then every readout
    /// branch restored. Returns the branch-averaged and worst fidelities.
    pub fn forced_jump(&self, q: &LogicalQubit, axis: Axis, t_jump: f64) -> Result<ForcedJump> {
        let tau = self.config.tau;
        if !(0.0..=tau).contains(&t_jump) {
            return Err(Error::InvalidParameter(format!(
                "jump time {t_jump} outside [0, {tau}]"
            )));
        }
        let psi0 = encode(q, &self.code)?;
        let before = evolve_effective(&self.model, &psi0, 0.0, t_jump, self.ctrl)?;
        let jumped = annihilation(&self.space, axis)?
            .apply(&before)?
            .normalized()?;
        let after = evolve_effective(&self.model, &jumped, t_jump, tau, self.ctrl)?.normalized()?;
        let mut mean = 0.0;
        let mut worst: f64 = 1.0;
        let mut flagged = 0.0;
        for (p, out) in self.detector.detect_branches(&after, &self.code)? {
            let f = psi0.inner(&self.correct(&out)?)?.norm_sqr();
            mean += p * f;
            worst = worst.min(f);
            if out.jump() == Some(axis) {
                flagged += p;
            }
        }
        Ok(ForcedJump {
            axis,
            time: t_jump,
            mean_fidelity: mean,
            min_fidelity: worst,
            flagged_probability: flagged,
        })
    }
}

/// Outcome of [`Protocol::forced_jump`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForcedJump {
    pub axis: Axis,
    pub time: f64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Probability that the readout flags the injected channel.
    pub flagged_probability: f64,
}

/// Ensemble statistics of one cycle index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleSummary {
    pub cycle: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub failed_fraction: f64,
    pub x_flag_fraction: f64,
    pub y_flag_fraction: f64,
    pub mean_jumps: Vec<f64>,
}

/// Aggregated protocol run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolRun {
    pub config: ProtocolConfig,
    pub channels: Vec<String>,
    pub cycles: Vec<CycleSummary>,
    /// Trajectories that failed over exposed cycles (geometric estimate of
    /// the per-cycle failure probability).
    pub failure_per_cycle: f64,
    pub failure_std_error: f64,
    /// Fraction of cycles, before any failure, with exactly one jump.
    pub single_jump_fraction: f64,
    pub exposed_cycles: usize,
    pub max_top_level: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trajectories: Vec<Vec<CycleReport>>,
}

/// Sum that does not depend on the order of `values`.
fn ordered_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

impl ProtocolRun {
    fn aggregate(p: &Protocol, runs: Vec<Vec<CycleReport>>) -> Self {
        let n = runs.len() as f64;
        let nch = p.model.channels().len();
        let mut cycles = Vec::with_capacity(p.config.cycles);
        for c in 0..p.config.cycles {
            let fids: Vec<f64> = runs.iter().map(|r| r[c].fidelity).collect();
            let mean = ordered_sum(fids.clone()) / n;
            let var =
                ordered_sum(fids.iter().map(|f| (f - mean).powi(2)).collect()) / (n - 1.0).max(1.0);
            let frac = |pred: &dyn Fn(&CycleReport) -> bool| {
                runs.iter().filter(|r| pred(&r[c])).count() as f64 / n
            };
            cycles.push(CycleSummary {
                cycle: c + 1,
                mean_fidelity: mean,
                std_error: (var / n).sqrt(),
                failed_fraction: frac(&|r| r.failed),
                x_flag_fraction: frac(&|r| r.syndrome.is_some_and(|s| s.x_jump)),
                y_flag_fraction: frac(&|r| r.syndrome.is_some_and(|s| s.y_jump)),
                mean_jumps: (0..nch)
                    .map(|k| runs.iter().map(|r| r[c].jumps[k]).sum::<usize>() as f64 / n)
                    .collect(),
            });
        }
        let mut exposed = 0usize;
        let mut failures = 0usize;
        let mut single = 0usize;
        for r in &runs {
            for (k, rep) in r.iter().enumerate() {
                let before = k > 0 && r[k - 1].failed;
                if before {
                    break;
                }
                exposed += 1;
                if rep.jumps.iter().sum::<usize>() == 1 {
                    single += 1;
                }
                if rep.failed {
                    failures += 1;
                }
            }
        }
        let e = exposed.max(1) as f64;
        let q = failures as f64 / e;
        let max_top_level = runs
            .iter()
            .flatten()
            .map(|r| r.top_level)
            .fold(0.0, f64::max);
        Self {
            config: p.config.clone(),
            channels: p.channel_labels(),
            cycles,
            failure_per_cycle: q,
            failure_std_error: (q * (1.0 - q) / e).sqrt(),
            single_jump_fraction: single as f64 / e,
            exposed_cycles: exposed,
            max_top_level,
            warnings: p.warnings.clone(),
            trajectories: runs,
        }
    }
}
