//! Run configuration: JSON presets, dotted-path overrides and unit conversion.
//!
//! Frequencies are stored in presets as ordinary frequencies (`*_hz` fields)
//! and converted to angular frequencies by the accessor methods.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

const BE9_PRESET: &str = include_str!("../presets/be9.json");
const DEMO_PRESET: &str = include_str!("../presets/demo.json");

/// Names of the built-in presets.
pub const BUILTIN_PRESETS: [&str; 2] = ["be9", "demo"];

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Atomic mass unit, kg.
pub const AMU_SI: f64 = 1.660_539_066_60e-27;

fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Harmonic trap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    pub nu_x_hz: f64,
    pub nu_y_hz: f64,
    pub mass_amu: f64,
}

impl TrapConfig {
    /// Angular trap frequencies `[ν_x, ν_y]`.
    pub fn nu(&self) -> [f64; 2] {
        [angular(self.nu_x_hz), angular(self.nu_y_hz)]
    }

    /// Ground-state widths `(ħ/2νm)^{1/2}` in metres.
    pub fn ground_state_widths(&self) -> [f64; 2] {
        let m = self.mass_amu * AMU_SI;
        self.nu().map(|nu| (HBAR_SI / (2.0 * nu * m)).sqrt())
    }
}

/// Raman couplings for the entanglers and the split step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanConfig {
    /// Lamb-Dicke parameter along both axes.
    pub eta: f64,
    /// Peak first-pair Raman coupling `|g⁽¹⁾|/2π`.
    pub g1_hz: f64,
    /// Total η power kept in sideband series.
    pub series_order: usize,
}

impl RamanConfig {
    pub fn g1(&self) -> f64 {
        angular(self.g1_hz)
    }

    /// Effective number-sensitive coupling `η² e^{−η²/2} |g⁽¹⁾|`.
    pub fn g_eff(&self) -> f64 {
        self.eta * self.eta * (-self.eta * self.eta / 2.0).exp() * self.g1()
    }
}

/// Cavity photon readout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    /// Cavity field decay rate `κ/2π`.
    pub kappa_hz: f64,
    pub g_c_hz: f64,
    pub g_l_hz: f64,
    /// Detuning from the excited level `|Δ|/2π`.
    pub delta_hz: f64,
    /// Laser pulse duration, s.
    pub duration_s: f64,
    pub detector_efficiency: f64,
    /// Include the Stark shifts `δ_a`, `δ_b(t)` in the readout simulation.
    pub stark_shifts: bool,
}

impl ReadoutConfig {
    pub fn kappa(&self) -> f64 {
        angular(self.kappa_hz)
    }

    /// Peak Raman coupling `|g_C g_L/Δ|`.
    pub fn g_peak(&self) -> f64 {
        angular(self.g_c_hz * self.g_l_hz / self.delta_hz)
    }

    /// Cavity Stark shift `|g_C|²/Δ`.
    pub fn delta_a(&self) -> f64 {
        angular(self.g_c_hz * self.g_c_hz / self.delta_hz)
    }

    /// Peak laser Stark shift `|g_L|²/Δ`.
    pub fn delta_b_peak(&self) -> f64 {
        angular(self.g_l_hz * self.g_l_hz / self.delta_hz)
    }
}

/// Adiabatic-passage restoration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestoreConfig {
    /// Resonant dipole coupling `|g̃|/2π` for the recombine sidebands.
    pub g_tilde_hz: f64,
    /// Sideband order of the recombine step.
    pub recombine_order: u32,
    /// Adiabatic area `∫|g(t)| dt` of each passage.
    pub adiabatic_area: f64,
    /// Stokes lead as a fraction of the pulse length.
    pub stokes_advance: f64,
    /// Relative phase of the two recombine lasers, rad.
    pub recombine_phase_offset: f64,
    /// Mode cutoff of the invariant subspace used for pulsed stages.
    pub pulsed_cutoff: usize,
}

/// Stage implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageMode {
    /// Exact unitaries.
    Ideal,
    /// Time-integrated pulse sequences.
    Pulsed,
}

/// Code construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    /// Fock cutoff of each mode.
    pub cutoff: usize,
    pub phi1: f64,
    pub phi2: f64,
}

/// Stabilization loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSettings {
    /// Amplitude damping rate `γ`, s⁻¹.
    pub gamma: f64,
    pub n_bar: f64,
    /// Interrogation period, s.
    pub tau: f64,
    pub cycles: usize,
    pub trajectories: usize,
    /// Samples of the conditional per-cycle failure estimator.
    pub merit_trajectories: usize,
    /// Samples per point of the failure-scaling study.
    pub scaling_trajectories: usize,
    pub stage_mode: StageMode,
    /// Run detection and restoration; `false` is the no-correction ablation.
    pub detection: bool,
    /// Logical amplitudes `[[re, im], [re, im]]`; normalized on use.
    pub qubit: [[f64; 2]; 2],
}

/// Free-evolution experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSettings {
    /// Duration, s.
    pub duration: f64,
    pub samples: usize,
    /// Trajectories for the unravelled estimate; zero skips it.
    pub trajectories: usize,
}

/// Complete, resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub trap: TrapConfig,
    pub raman: RamanConfig,
    pub readout: ReadoutConfig,
    pub restore: RestoreConfig,
    pub code: CodeConfig,
    pub protocol: ProtocolSettings,
    pub evolve: EvolveSettings,
}

impl Preset {
    /// A built-in preset by name.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "be9" => BE9_PRESET,
            "demo" => DEMO_PRESET,
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}' (built-in: {})",
                    BUILTIN_PRESETS.join(", ")
                )))
            }
        };
        Self::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// A built-in name, or else a path to a JSON file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if BUILTIN_PRESETS.contains(&name_or_path) {
            Self::builtin(name_or_path)
        } else {
            let path = Path::new(name_or_path);
            if !path.exists() {
                return Err(Error::Config(format!(
                    "no preset or file named '{name_or_path}'"
                )));
            }
            Self::from_file(path)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("preset serializes")
    }

    /// Applies `key.path=value`. The value is parsed as JSON, falling back to
    /// a plain string. Unknown keys are rejected.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "override '{assignment}' is not of the form key=value"
            ))
        })?;
        let key = key.trim();
        let raw = raw.trim();
        let value: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut tree = serde_json::to_value(&*self)?;
        let mut node = &mut tree;
        for part in key.split('.') {
            node = node
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown configuration key '{key}'")))?;
        }
        *node = value;
        let updated: Self =
            serde_json::from_value(tree).map_err(|e| Error::Config(format!("{key}: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    /// Range checks on every parameter.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("trap.nu_x_hz", self.trap.nu_x_hz),
            ("trap.nu_y_hz", self.trap.nu_y_hz),
            ("trap.mass_amu", self.trap.mass_amu),
            ("raman.g1_hz", self.raman.g1_hz),
            ("readout.kappa_hz", self.readout.kappa_hz),
            ("readout.g_c_hz", self.readout.g_c_hz),
            ("readout.g_l_hz", self.readout.g_l_hz),
            ("readout.delta_hz", self.readout.delta_hz),
            ("readout.duration_s", self.readout.duration_s),
            ("restore.g_tilde_hz", self.restore.g_tilde_hz),
            ("restore.adiabatic_area", self.restore.adiabatic_area),
            ("protocol.tau", self.protocol.tau),
            ("evolve.duration", self.evolve.duration),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("raman.eta", self.raman.eta),
            ("protocol.gamma", self.protocol.gamma),
            ("protocol.n_bar", self.protocol.n_bar),
        ];
        for (k, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.readout.detector_efficiency) {
            return Err(Error::Config(
                "readout.detector_efficiency must lie in [0, 1]".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.restore.stokes_advance) {
            return Err(Error::Config(
                "restore.stokes_advance must lie in [0, 1)".into(),
            ));
        }
        if self.code.cutoff < 4 {
            return Err(Error::Config(format!(
                "code.cutoff must be at least 4, got {}",
                self.code.cutoff
            )));
        }
        if self.restore.pulsed_cutoff < 4 || self.restore.pulsed_cutoff > self.code.cutoff {
            return Err(Error::Config(
                "restore.pulsed_cutoff must lie in [4, code.cutoff]".into(),
            ));
        }
        if self.restore.recombine_order == 0 {
            return Err(Error::Config(
                "restore.recombine_order must be positive".into(),
            ));
        }
        if self.protocol.merit_trajectories < 2 || self.protocol.scaling_trajectories < 2 {
            return Err(Error::Config(
                "protocol.merit_trajectories and protocol.scaling_trajectories must be at least 2"
                    .into(),
            ));
        }
        if self.protocol.cycles == 0 || self.protocol.trajectories == 0 || self.evolve.samples < 2 {
            return Err(Error::Config(
                "cycles and trajectories must be positive and samples at least 2".into(),
            ));
        }
        let q = self.protocol.qubit;
        if q.iter().flatten().all(|v| *v == 0.0) || q.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "protocol.qubit must be finite and nonzero".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_round_trip() {
        for name in BUILTIN_PRESETS {
            let p = Preset::builtin(name).unwrap();
            assert_eq!(p.name, name);
            assert_eq!(Preset::from_json(&p.to_json()).unwrap(), p);
        }
    }

    #[test]
    fn be9_derived_couplings() {
        let p = Preset::builtin("be9").unwrap();
        assert!((p.raman.g_eff() / (2.0 * PI) - 19_604.0).abs() < 1.0);
        assert!((p.readout.g_peak() / (2.0 * PI) - 1e5).abs() < 1e-6);
        let w = p.trap.ground_state_widths();
        assert!(w[0] > 5e-9 && w[0] < 1e-8);
    }

    #[test]
    fn overrides() {
        let mut p = Preset::builtin("demo").unwrap();
        p.apply_override("protocol.gamma=0.25").unwrap();
        assert_eq!(p.protocol.gamma, 0.25);
        p.apply_override("protocol.stage_mode=pulsed").unwrap();
        assert_eq!(p.protocol.stage_mode, StageMode::Pulsed);
        assert!(p.apply_override("protocol.gamma_typo=1").is_err());
        assert!(p.apply_override("protocol.gamma=-1").is_err());
        assert!(p.apply_override("protocol.cycles=abc").is_err());
        assert!(p.apply_override("no_equals_sign").is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v: Value = serde_json::from_str(BE9_PRESET).unwrap();
        v["trap"]["extra"] = Value::from(1.0);
        assert!(Preset::from_json(&v.to_string()).is_err());
        assert!(Preset::builtin("nope").is_err());
    }
}
