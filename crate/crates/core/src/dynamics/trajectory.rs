//! Quantum-jump trajectories by the waiting-time method.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::integrate::{effective_step, StepControl};
use super::lindblad::LindbladModel;
use crate::error::{Error, Result};
use crate::hilbert::StateVector;

/// Jump-time resolution in units of the inverse total jump rate.
pub const JUMP_TIME_TOL: f64 = 1e-6;

/// A recorded jump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: usize,
}

/// Sampler settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrajectoryOptions {
    pub ctrl: StepControl,
    /// Stop right after this many jumps.
    pub max_jumps: Option<usize>,
    /// Record `(t, ‖ψ̃‖²)` of the unnormalized state after each step.
    pub record_norms: bool,
}

/// Outcome of one trajectory.
#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    pub jumps: Vec<JumpEvent>,
    /// Normalized state at `end_time`.
    pub final_state: StateVector,
    /// `t1`, or the time of the last jump when stopped by `max_jumps`.
    pub end_time: f64,
    pub norm_history: Vec<(f64, f64)>,
    /// Thresholds crossed while every channel weight vanished; no jump was applied.
    pub null_jumps: usize,
}

/// Generator for trajectory `index` of an ensemble with master seed `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs trajectory `index` of the ensemble keyed by `seed`.
pub fn run_trajectory(
    model: &LindbladModel,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    seed: u64,
    index: u64,
) -> Result<TrajectoryResult> {
    run_trajectory_with_rng(
        model,
        psi0,
        t0,
        t1,
        TrajectoryOptions::default(),
        &mut trajectory_rng(seed, index),
    )
}

/// Runs one trajectory drawing from `rng`.
pub fn run_trajectory_with_rng<R: Rng + ?Sized>(
    model: &LindbladModel,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    opts: TrajectoryOptions,
    rng: &mut R,
) -> Result<TrajectoryResult> {
    if psi0.space() != model.space() {
        return Err(Error::SpaceMismatch);
    }
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "invalid time interval [{t0}, {t1}]"
        )));
    }
    let total_rate: f64 = model.channels().iter().map(|c| c.rate).sum();
    let t_tol = if total_rate > 0.0 {
        JUMP_TIME_TOL / total_rate
    } else {
        f64::INFINITY
    };
    let (_, dt) = opts
        .ctrl
        .steps((t1 - t0).max(f64::MIN_POSITIVE), model.rate_bound())?;

    let mut psi: DVector<C64> = psi0.clone().normalized()?.into_amplitudes();
    let mut threshold: f64 = rng.random();
    let mut t = t0;
    let mut jumps = Vec::new();
    let mut history = Vec::new();
    let mut null_jumps = 0;
    if opts.record_norms {
        history.push((t, 1.0));
    }

    while t < t1 {
        let h = dt.min(t1 - t);
        let next = effective_step(model, t, h, &psi);
        if next.norm_squared() > threshold {
            psi = next;
            t += h;
            if opts.record_norms {
                history.push((t, psi.norm_squared()));
            }
            continue;
        }
        // Threshold crossed inside [t, t + h]: bisect on the single-step map.
        let (mut lo, mut hi) = (0.0, h);
        let mut at_jump = next;
        while hi - lo > t_tol {
            let mid = 0.5 * (lo + hi);
            let cand = effective_step(model, t, mid, &psi);
            if cand.norm_squared() > threshold {
                lo = mid;
            } else {
                hi = mid;
                at_jump = cand;
            }
        }
        t += hi;
        if opts.record_norms {
            history.push((t, at_jump.norm_squared()));
        }
        let candidates: Vec<DVector<C64>> = model
            .jump_matrices()
            .iter()
            .map(|l| l.mul_vec(&at_jump))
            .collect();
        let weights: Vec<f64> = candidates.iter().map(|v| v.norm_squared()).collect();
        let total: f64 = weights.iter().sum();
        threshold = rng.random();
        if !(total > 1e-300 && total > 1e-14 * at_jump.norm_squared()) {
            null_jumps += 1;
            psi = &at_jump / C64::new(at_jump.norm(), 0.0);
            continue;
        }
        let mut u = rng.random::<f64>() * total;
        let mut channel = weights.len() - 1;
        for (m, w) in weights.iter().enumerate() {
            if u < *w {
                channel = m;
                break;
            }
            u -= w;
        }
        let chosen = &candidates[channel];
        psi = chosen / C64::new(chosen.norm(), 0.0);
        jumps.push(JumpEvent { time: t, channel });
        if opts.max_jumps.is_some_and(|m| jumps.len() >= m) {
            break;
        }
    }

    let n = psi.norm();
    let final_state = StateVector::new(psi0.space().clone(), psi / C64::new(n, 0.0))?;
    Ok(TrajectoryResult {
        jumps,
        final_state,
        end_time: t,
        norm_history: history,
        null_jumps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpaceSpec;

    #[test]
    fn same_key_same_trajectory() {
        let s = SpaceSpec::new(vec![3], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[3], 0, 0).unwrap();
        let a = run_trajectory(&m, &psi, 0.0, 2.0, 7, 3).unwrap();
        let b = run_trajectory(&m, &psi, 0.0, 2.0, 7, 3).unwrap();
        assert_eq!(a.jumps, b.jumps);
        assert_eq!(a.final_state, b.final_state);
        let c = run_trajectory(&m, &psi, 0.0, 2.0, 7, 4).unwrap();
        assert_ne!(a.jumps, c.jumps);
    }

    #[test]
    fn jump_lowers_fock_number() {
        let s = SpaceSpec::new(vec![3], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[2], 0, 0).unwrap();
        let r = run_trajectory(&m, &psi, 0.0, 50.0, 1, 0).unwrap();
        assert_eq!(r.jumps.len(), 2);
        assert!(r.jumps[0].time < r.jumps[1].time);
        assert!((r.final_state.mean_occupation(0)).abs() < 1e-12);
    }

    #[test]
    fn norm_history_is_monotone_between_jumps() {
        let s = SpaceSpec::new(vec![3], 1, None).unwrap();
        let m = LindbladModel::motional_damping(&s, 1.0, 0.0).unwrap();
        let psi = StateVector::basis(&s, &[1], 0, 0).unwrap();
        let opts = TrajectoryOptions {
            record_norms: true,
            ..Default::default()
        };
        let r =
            run_trajectory_with_rng(&m, &psi, 0.0, 0.2, opts, &mut trajectory_rng(2, 0)).unwrap();
        if r.jumps.is_empty() {
            assert!(r.norm_history.windows(2).all(|w| w[1].1 <= w[0].1));
            let last = r.norm_history.last().unwrap().1;
            assert!((last - (-0.2f64).exp()).abs() < 1e-9);
        }
    }
}
