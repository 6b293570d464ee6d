//! Electronic-state readout by cavity-assisted single-photon emission.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::ReadoutConfig;
use crate::dynamics::{
    evolve_effective, Envelope, JumpChannel, LindbladModel, PulsedHamiltonian, StepControl,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    cavity_annihilation, transition, LinearOperator, SpaceSpec, StateVector, LEVEL_A, LEVEL_B,
};

/// Cavity decay times integrated after the laser pulse ends.
pub const READOUT_TAIL: f64 = 12.0;

/// Largest population tolerated outside `|a⟩, |b⟩` at readout.
pub const READOUT_LEVEL_TOL: f64 = 1e-9;

/// Branches below this probability are rounding residue and are dropped.
pub const BRANCH_FLOOR: f64 = 1e-14;

/// `∫₀ᵗ sin⁴(πs/T) ds`, clamped to the pulse window.
fn sin4_integral(t: f64, duration: f64) -> f64 {
    let t = t.clamp(0.0, duration);
    let w = 2.0 * PI / duration;
    3.0 * t / 8.0 - (w * t).sin() / (2.0 * w) + (2.0 * w * t).sin() / (16.0 * w)
}

/// Probability `1 − exp(−2∫₀ᵗ|g(s)|²/κ ds)` that a photon has left the cavity
/// by time `t`, for `|g(t)| = f(t)|g_C g_L/Δ|` with a sin² envelope of length
/// `cfg.duration_s`.
pub fn photon_gun_probability(cfg: &ReadoutConfig, t: f64) -> f64 {
    let g = cfg.g_peak();
    1.0 - (-2.0 * g * g * sin4_integral(t, cfg.duration_s) / cfg.kappa()).exp()
}

/// Outcome of the ion–cavity simulation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavityReadout {
    /// Probability that a photon leaves the cavity.
    pub emission_probability: f64,
    /// Emission probability times detector efficiency.
    pub detection_probability: f64,
    /// Closed-form emission probability for the same input.
    pub analytic_probability: f64,
    /// Electronic amplitudes `[a, b]` conditioned on no emission.
    pub no_photon_amplitudes: [C64; 2],
    /// Cavity population left at the end, relative to the surviving norm.
    pub residual_excitation: f64,
    /// `κ > 3|g|`.
    pub bad_cavity: bool,
}

fn envelope(duration: f64, scale: f64, power: i32) -> Envelope {
    Envelope::new(
        move |t| {
            if (0.0..=duration).contains(&t) {
                C64::new(scale * (PI * t / duration).sin().powi(2 * power), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        },
        scale.abs(),
        power as f64 * 2.0 * PI / duration,
    )
}

/// Electronic level ⊗ cavity (0 or 1 photon) model with cavity field decay `κ`:
/// `H = −g(t)|a⟩⟨b| ⊗ A† + h.c.`, plus Stark shifts when enabled.
pub fn cavity_model(cfg: &ReadoutConfig) -> Result<LindbladModel> {
    let space = SpaceSpec::new(vec![], 2, Some(1))?;
    let a_cav = cavity_annihilation(&space)?;
    let raise = transition(&space, LEVEL_A, LEVEL_B)?.compose(&a_cav.dagger())?;
    let mut h = PulsedHamiltonian::new(&space);
    h.add_with_hc(raise, envelope(cfg.duration_s, -cfg.g_peak(), 1))?;
    if cfg.stark_shifts {
        let aa = transition(&space, LEVEL_A, LEVEL_A)?.compose(&a_cav.dagger().compose(&a_cav)?)?;
        h.add_static(aa.scale(C64::new(-cfg.delta_a(), 0.0)))?;
        let bb = transition(&space, LEVEL_B, LEVEL_B)?;
        h.add_raw(bb, envelope(cfg.duration_s, -cfg.delta_b_peak(), 2))?;
    }
    let channel = JumpChannel::new("cavity", a_cav, 2.0 * cfg.kappa())?;
    LindbladModel::new(&space, Some(h), vec![channel])
}

/// Integrates the readout of the electronic state `[a, b]` (normalized on use)
/// through the pulse and a tail of [`READOUT_TAIL`] cavity decay times.
pub fn simulate_cavity_readout(
    cfg: &ReadoutConfig,
    electronic: [C64; 2],
    ctrl: StepControl,
) -> Result<CavityReadout> {
    let model = cavity_model(cfg)?;
    let space = model.space().clone();
    let mut psi = StateVector::zeros(&space);
    psi.amplitudes_mut()[space.index(&[], LEVEL_A, 0)?] = electronic[0];
    psi.amplitudes_mut()[space.index(&[], LEVEL_B, 0)?] = electronic[1];
    let psi = psi.normalized()?;
    let p_b = psi.level_population(LEVEL_B);
    let t_end = cfg.duration_s + READOUT_TAIL / cfg.kappa();
    let out = evolve_effective(&model, &psi, 0.0, t_end, ctrl)?;
    let survive = out.norm_sqr();
    let emission = (1.0 - survive).clamp(0.0, 1.0);
    let amp =
        |level, photons| out.amplitudes()[space.index(&[], level, photons).expect("valid label")];
    let vac = [amp(LEVEL_A, 0), amp(LEVEL_B, 0)];
    let vac_norm = (vac[0].norm_sqr() + vac[1].norm_sqr()).sqrt();
    let no_photon_amplitudes = if vac_norm > 0.0 {
        vac.map(|c| c / vac_norm)
    } else {
        [C64::new(0.0, 0.0); 2]
    };
    let excited = amp(LEVEL_A, 1).norm_sqr() + amp(LEVEL_B, 1).norm_sqr();
    Ok(CavityReadout {
        emission_probability: emission,
        detection_probability: cfg.detector_efficiency * emission,
        analytic_probability: p_b * photon_gun_probability(cfg, cfg.duration_s),
        no_photon_amplitudes,
        residual_excitation: if survive > 0.0 {
            excited / survive
        } else {
            0.0
        },
        bad_cavity: cfg.kappa() > 3.0 * cfg.g_peak(),
    })
}

/// One measurement branch of the projective readout.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutBranch {
    pub photon: bool,
    pub probability: f64,
    /// Normalized post-measurement state, electronic level reset to `|a⟩`.
    pub state: StateVector,
}

/// Born-rule readout of `|b⟩` versus `|a⟩` with detector efficiency
/// `efficiency`. Both outcomes leave the ion in `|a⟩`; a missed photon is a
/// separate no-photon branch. Branches below [`BRANCH_FLOOR`] are omitted.
pub fn readout_branches(psi: &StateVector, efficiency: f64) -> Result<Vec<ReadoutBranch>> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::InvalidParameter(format!(
            "detector efficiency {efficiency} outside [0, 1]"
        )));
    }
    let space = psi.space();
    let total = psi.norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let p_a = psi.level_population(LEVEL_A) / total;
    let p_b = psi.level_population(LEVEL_B) / total;
    if 1.0 - p_a - p_b > READOUT_LEVEL_TOL {
        return Err(Error::InvalidParameter(format!(
            "population {:.3e} outside |a>, |b> at readout",
            1.0 - p_a - p_b
        )));
    }
    let keep_a = transition(space, LEVEL_A, LEVEL_A)?;
    let reset_b = transition(space, LEVEL_A, LEVEL_B)?;
    let mut out = Vec::with_capacity(3);
    let mut push = |photon: bool, probability: f64, op: &LinearOperator| -> Result<()> {
        if probability > BRANCH_FLOOR {
            out.push(ReadoutBranch {
                photon,
                probability,
                state: op.apply(psi)?.normalized()?,
            });
        }
        Ok(())
    };
    push(true, efficiency * p_b, &reset_b)?;
    push(false, p_a, &keep_a)?;
    push(false, (1.0 - efficiency) * p_b, &reset_b)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;

    fn cfg() -> ReadoutConfig {
        Preset::builtin("be9").unwrap().readout
    }

    #[test]
    fn closed_form_limits() {
        let c = cfg();
        assert_eq!(photon_gun_probability(&c, 0.0), 0.0);
        let full = photon_gun_probability(&c, c.duration_s);
        assert!((full - 0.998133).abs() < 1e-6);
        assert_eq!(photon_gun_probability(&c, 2.0 * c.duration_s), full);
        let n = 30000;
        let dt = c.duration_s / n as f64;
        let third: f64 = (0..n / 3)
            .map(|k| (PI * (k as f64 + 0.5) / n as f64).sin().powi(4) * dt)
            .sum();
        assert!(
            (sin4_integral(c.duration_s / 3.0, c.duration_s) - third).abs() < 1e-8 * c.duration_s
        );
        assert!(
            (sin4_integral(c.duration_s, c.duration_s) - 3.0 * c.duration_s / 8.0).abs() < 1e-15
        );
    }

    #[test]
    fn ground_state_never_emits() {
        let r = simulate_cavity_readout(
            &cfg(),
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            StepControl::default(),
        )
        .unwrap();
        assert!(r.emission_probability < 1e-12);
        assert!(r.bad_cavity);
    }

    #[test]
    fn efficiency_thins_detection() {
        let mut c = cfg();
        c.duration_s = 25e-6;
        c.detector_efficiency = 0.5;
        let r = simulate_cavity_readout(
            &c,
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            StepControl::default(),
        )
        .unwrap();
        assert!((r.detection_probability - 0.5 * r.emission_probability).abs() < 1e-15);
    }

    #[test]
    fn branches_reset_to_a() {
        let s = SpaceSpec::two_mode(2, 2).unwrap();
        let a = StateVector::basis(&s, &[1, 0], LEVEL_A, 0).unwrap();
        let b = StateVector::basis(&s, &[0, 1], LEVEL_B, 0).unwrap();
        let psi = a
            .scaled(C64::new(0.6, 0.0))
            .add_scaled(C64::new(0.8, 0.0), &b)
            .unwrap();
        let br = readout_branches(&psi, 0.9).unwrap();
        assert_eq!(br.len(), 3);
        let total: f64 = br.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((br[0].probability - 0.9 * 0.64).abs() < 1e-14);
        for b in &br {
            assert!((b.state.level_population(LEVEL_A) - 1.0).abs() < 1e-14);
        }
    }
}
