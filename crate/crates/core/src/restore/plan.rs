//! Pulse parameters of the three restoration stages.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::{Preset, StageMode};
use crate::dynamics::{PulsedHamiltonian, StepControl};
use crate::error::{Error, Result};
use crate::hilbert::{Axis, LinearOperator, SpaceSpec, LEVEL_A, LEVEL_B};
use crate::raman::{
    first_pair_coupling, sideband_coupling, split, split_composite, syndrome_pulse_length, Drive,
    LambdaLeg, PulseShape,
};
use crate::syndrome::{number_rotation, EntanglerCoupling};

/// Areas below this are flagged as non-adiabatic.
pub const ADIABATIC_MIN_AREA: f64 = 10.0;

/// Rotation `|g|A` of the split stage.
pub const SPLIT_ROTATION: f64 = std::f64::consts::PI / 16.0;

/// Counter-intuitive adiabatic passage on a Λ system: the Stokes pulse on
/// `|b⟩ ↔ |c⟩` precedes the pump pulse on `|a⟩ ↔ |c⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Passage {
    pub pump: LambdaLeg,
    pub stokes: LambdaLeg,
    /// Delay of the pump relative to the Stokes pulse, in pulse lengths.
    pub advance: f64,
}

impl Passage {
    /// Equal sin² pulses of peak coupling `g_peak` and area `area` each, the
    /// Stokes pulse carrying the relative phase `phase`.
    pub fn counter_intuitive(
        pump: (Axis, u32),
        stokes: (Axis, u32),
        g_peak: f64,
        area: f64,
        advance: f64,
        phase: f64,
    ) -> Result<Self> {
        if !(g_peak > 0.0 && area > 0.0) || !(0.0..1.0).contains(&advance) {
            return Err(Error::InvalidParameter(format!(
                "passage needs positive coupling and area and advance in [0, 1), got {g_peak}, {area}, {advance}"
            )));
        }
        let t = 2.0 * area / g_peak;
        let leg = |level, (axis, kappa): (Axis, u32), start, phase| -> Result<LambdaLeg> {
            Ok(LambdaLeg {
                level,
                axis,
                kappa,
                drive: Drive::new(g_peak, phase, PulseShape::sin_squared(t, start)?, 1),
            })
        };
        Ok(Self {
            pump: leg(LEVEL_A, pump, advance * t, 0.0)?,
            stokes: leg(LEVEL_B, stokes, 0.0, phase)?,
            advance,
        })
    }

    pub fn legs(&self) -> [LambdaLeg; 2] {
        [self.pump.clone(), self.stokes.clone()]
    }

    /// `φ_b − φ_a`.
    pub fn phase_difference(&self) -> f64 {
        self.stokes.drive.phase - self.pump.drive.phase
    }

    pub fn duration(&self) -> f64 {
        self.pump
            .drive
            .shape
            .end()
            .max(self.stokes.drive.shape.end())
    }

    /// Smaller of the two pulse areas `∫|g| dt`.
    pub fn area(&self) -> f64 {
        self.pump.drive.area().min(self.stokes.drive.area())
    }

    /// Same couplings and phases with a different area.
    pub fn with_area(&self, area: f64) -> Result<Self> {
        let mut p = Self::counter_intuitive(
            (self.pump.axis, self.pump.kappa),
            (self.stokes.axis, self.stokes.kappa),
            self.pump.drive.peak,
            area,
            self.advance,
            self.stokes.drive.phase,
        )?;
        p.pump.drive.phase = self.pump.drive.phase;
        Ok(p)
    }

    fn mirrored(&self) -> Self {
        let mut p = self.clone();
        p.pump.axis = p.pump.axis.other();
        p.stokes.axis = p.stokes.axis.other();
        p
    }

    /// Motional state `χ = n + κ_b e_b` generating the dark state that starts
    /// on `|n⟩ ⊗ |a⟩`, and the transfer target `m = χ − κ_a e_a`. `None` when
    /// either lies outside the cutoffs.
    pub fn partner(&self, n: &[usize], cutoffs: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut chi = n.to_vec();
        let b = self.stokes.axis.index();
        chi[b] += self.stokes.kappa as usize;
        if chi[b] > cutoffs[b] {
            return None;
        }
        let a = self.pump.axis.index();
        let mut m = chi.clone();
        m[a] = m[a].checked_sub(self.pump.kappa as usize)?;
        Some((chi, m))
    }

    /// Exact adiabatic transfer `|n⟩|a⟩ → −e^{iΔ}|m⟩|b⟩`, completed to a
    /// unitary by `|m⟩|b⟩ → e^{−iΔ}|n⟩|a⟩`; identity elsewhere.
    pub fn ideal(&self, space: &SpaceSpec) -> Result<LinearOperator> {
        if space.electronic_levels < 2 || space.num_modes() < 2 {
            return Err(Error::InvalidSpace(
                "passage needs two modes and levels |a>, |b>".into(),
            ));
        }
        let d = space.dim();
        let mut partner_of = vec![None; d];
        for col in 0..d {
            let l = space.label(col);
            if l.level != LEVEL_A {
                continue;
            }
            if let Some((_, m)) = self.partner(&l.modes, &space.mode_cutoffs) {
                let row = space.index(&m, LEVEL_B, l.photons)?;
                partner_of[col] = Some(row);
                partner_of[row] = Some(col);
            }
        }
        let fwd = -C64::from_polar(1.0, self.phase_difference());
        let mut t = Vec::with_capacity(d);
        for (col, p) in partner_of.iter().enumerate() {
            match p {
                None => t.push((col, col, C64::new(1.0, 0.0))),
                Some(row) if space.label(col).level == LEVEL_A => t.push((*row, col, fwd)),
                Some(row) => t.push((*row, col, -fwd.conj())),
            }
        }
        LinearOperator::new(
            space.clone(),
            crate::hilbert::CsrMatrix::from_triplets(d, d, t),
            false,
        )
    }
}

/// Coherent split: a number-difference-sensitive flip with rotation
/// `|g|A = π/16`, `sign = +1` for `n_x − n_y` and `−1` for `n_y − n_x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitStage {
    /// `|g|`, angular.
    pub g_eff: f64,
    pub duration: f64,
    pub sign: f64,
    #[serde(skip)]
    pub coupling: EntanglerCoupling,
}

impl SplitStage {
    pub fn new(g_eff: f64, sign: f64, coupling: EntanglerCoupling) -> Self {
        let duration = syndrome_pulse_length(g_eff) * SPLIT_ROTATION / (std::f64::consts::PI / 2.0);
        Self {
            g_eff,
            duration,
            sign,
            coupling,
        }
    }

    fn shape(&self) -> Result<PulseShape> {
        PulseShape::sin_squared(self.duration, 0.0)
    }

    /// `|g| ∫ f⁴ dt`.
    pub fn rotation(&self) -> f64 {
        self.shape()
            .map(|s| self.g_eff * crate::raman::pulse_area(&s, 2))
            .unwrap_or(0.0)
    }

    pub fn ideal(&self, space: &SpaceSpec) -> Result<LinearOperator> {
        if space.num_modes() < 2 {
            return Err(Error::InvalidSpace("split needs two modes".into()));
        }
        let th = self.sign * self.rotation();
        number_rotation(space, |m| th * (m[0] as f64 - m[1] as f64))
    }

    pub fn hamiltonian(&self, space: &SpaceSpec) -> Result<PulsedHamiltonian> {
        let g = C64::new(0.0, self.sign * self.g_eff);
        match self.coupling {
            EntanglerCoupling::Ideal => split(space, &Drive::complex(g, self.shape()?, 2)),
            EntanglerCoupling::Composite { eta, order } => split_composite(
                space,
                eta,
                &Drive::complex(first_pair_coupling(g, eta), self.shape()?, 2),
                order,
            ),
        }
    }
}

/// Complete restoration sequence for one jump channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestorePlan {
    pub channel: Axis,
    pub mode: StageMode,
    pub add: Passage,
    pub split: SplitStage,
    pub combine: Passage,
    /// Relative laser phase of the recombine passage before the code phase.
    pub phase_offset: f64,
    /// Mode cutoff of the three-level space used by pulsed stages.
    pub pulsed_cutoff: usize,
    #[serde(skip)]
    pub ctrl: StepControl,
}

impl RestorePlan {
    /// x-channel plan from the preset couplings. Both passages use the
    /// leading-order fourth-sideband coupling as peak coupling.
    pub fn x_channel(p: &Preset, mode: StageMode) -> Result<Self> {
        let r = &p.restore;
        let g_ab = sideband_coupling(
            C64::new(2.0 * std::f64::consts::PI * r.g_tilde_hz, 0.0),
            p.raman.eta,
            r.recombine_order,
        )
        .norm();
        let k = r.recombine_order;
        Ok(Self {
            channel: Axis::X,
            mode,
            add: Passage::counter_intuitive(
                (Axis::X, 0),
                (Axis::X, 1),
                g_ab,
                r.adiabatic_area,
                r.stokes_advance,
                0.0,
            )?,
            split: SplitStage::new(p.raman.g_eff(), 1.0, EntanglerCoupling::Ideal),
            combine: Passage::counter_intuitive(
                (Axis::X, k),
                (Axis::Y, k),
                g_ab,
                r.adiabatic_area,
                r.stokes_advance,
                r.recombine_phase_offset + p.code.phi1,
            )?,
            phase_offset: r.recombine_phase_offset,
            pulsed_cutoff: r.pulsed_cutoff,
            ctrl: StepControl::default(),
        })
    }

    /// Plan for `channel`, the y plan being the mirror of the x plan.
    pub fn from_preset(p: &Preset, channel: Axis, mode: StageMode) -> Result<Self> {
        let x = Self::x_channel(p, mode)?;
        Ok(match channel {
            Axis::X => x,
            Axis::Y => x.mirrored(),
        })
    }

    /// Swaps the axis labels. The split sign flips and the code phase enters
    /// the recombine phase with the opposite sign.
    pub fn mirrored(&self) -> Self {
        let mut p = self.clone();
        p.channel = self.channel.other();
        p.add = self.add.mirrored();
        p.combine = self.combine.mirrored();
        p.split.sign = -self.split.sign;
        p.combine.stokes.drive.phase = 2.0 * self.phase_offset - self.combine.stokes.drive.phase;
        p
    }

    /// Same plan with both passages at area `area`.
    pub fn with_area(&self, area: f64) -> Result<Self> {
        let mut p = self.clone();
        p.add = self.add.with_area(area)?;
        p.combine = self.combine.with_area(area)?;
        Ok(p)
    }

    /// Three-level space on which pulsed stages run.
    pub fn stage_space(&self, space: &SpaceSpec) -> Result<SpaceSpec> {
        SpaceSpec::new(vec![self.pulsed_cutoff; space.num_modes()], 3, None)
    }
}
