//! Pulse envelopes and drives.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Envelope;
use crate::error::{Error, Result};

/// Envelope family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseKind {
    /// `sin²(π(t − start)/T)` on `[start, start + T]`.
    SinSquared,
    /// Unit envelope on `[start, start + T]`.
    Flat,
    /// Equally spaced samples over `[start, start + T]`, linearly interpolated.
    Sampled { values: Vec<f64> },
}

/// Dimensionless envelope `f(t)` with peak value one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub duration: f64,
    pub start: f64,
}

impl PulseShape {
    pub fn sin_squared(duration: f64, start: f64) -> Result<Self> {
        Self::validated(PulseKind::SinSquared, duration, start)
    }

    pub fn flat(duration: f64, start: f64) -> Result<Self> {
        Self::validated(PulseKind::Flat, duration, start)
    }

    /// Sampled envelope. Samples must lie in `[0, 1]` and vanish at both ends.
    pub fn sampled(values: Vec<f64>, duration: f64, start: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "sampled pulse needs at least two samples".into(),
            ));
        }
        if values[0].abs() > 1e-12 || values[values.len() - 1].abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "sampled pulse must start and end at zero".into(),
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "sampled pulse values must lie in [0, 1]".into(),
            ));
        }
        Self::validated(PulseKind::Sampled { values }, duration, start)
    }

    fn validated(kind: PulseKind, duration: f64, start: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite() && start.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        Ok(Self {
            kind,
            duration,
            start,
        })
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Envelope value at time `t`; zero outside the pulse window.
    pub fn value(&self, t: f64) -> f64 {
        let s = (t - self.start) / self.duration;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match &self.kind {
            PulseKind::SinSquared => (PI * s).sin().powi(2),
            PulseKind::Flat => 1.0,
            PulseKind::Sampled { values } => {
                let x = s * (values.len() - 1) as f64;
                let i = (x.floor() as usize).min(values.len() - 2);
                let w = x - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    /// Angular rate scale of the envelope, used for step control.
    pub fn bandwidth(&self) -> f64 {
        match &self.kind {
            PulseKind::SinSquared => 2.0 * PI / self.duration,
            PulseKind::Flat => 0.0,
            PulseKind::Sampled { values } => {
                let dt = self.duration / (values.len() - 1) as f64;
                values
                    .windows(2)
                    .map(|w| (w[1] - w[0]).abs() / dt)
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// `∫ f(t)^power dt` over the pulse window.
pub fn pulse_area(shape: &PulseShape, power: u32) -> f64 {
    match &shape.kind {
        // ∫₀ᵀ sin^{2p}(πt/T) dt = T·C(2p, p)/4^p.
        PulseKind::SinSquared => {
            let p = power as u64;
            let binom = (1..=p).fold(1.0, |acc, k| acc * (p + k) as f64 / k as f64);
            shape.duration * binom / 4f64.powi(power as i32)
        }
        PulseKind::Flat => shape.duration,
        PulseKind::Sampled { values } => {
            let dt = shape.duration / (values.len() - 1) as f64;
            let q = power as i32 + 1;
            values
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    if (b - a).abs() < 1e-15 {
                        dt * a.powi(power as i32)
                    } else {
                        dt * (b.powi(q) - a.powi(q)) / (q as f64 * (b - a))
                    }
                })
                .sum()
        }
    }
}

/// Complex coupling `peak · e^{iφ} · f(t)^power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub peak: f64,
    pub phase: f64,
    pub shape: PulseShape,
    pub power: u32,
}

impl Drive {
    pub fn new(peak: f64, phase: f64, shape: PulseShape, power: u32) -> Self {
        Self {
            peak,
            phase,
            shape,
            power,
        }
    }

    /// Coupling with complex peak value `c`.
    pub fn complex(c: C64, shape: PulseShape, power: u32) -> Self {
        Self::new(c.norm(), c.arg(), shape, power)
    }

    pub fn value(&self, t: f64) -> C64 {
        C64::from_polar(
            self.peak * self.shape.value(t).powi(self.power as i32),
            self.phase,
        )
    }

    /// `∫|g(t)| dt`.
    pub fn area(&self) -> f64 {
        self.peak * pulse_area(&self.shape, self.power)
    }

    /// Envelope `scale · g(t)` for a Hamiltonian term.
    pub fn envelope(&self, scale: C64) -> Envelope {
        let d = self.clone();
        Envelope::new(
            move |t| scale * d.value(t),
            scale.norm() * self.peak,
            self.power as f64 * self.shape.bandwidth(),
        )
    }
}
