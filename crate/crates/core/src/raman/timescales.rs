//! Derived timescales and coupling strengths for a parameter set, next to the
//! values quoted for the Be⁺ example.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::builders::sideband_coupling;
use super::pulse::{pulse_area, PulseShape};
use crate::config::Preset;
use crate::syndrome::photon_gun_probability;

/// Acceptance band around a quoted value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    pub fn admits(&self, quoted: f64, computed: f64) -> bool {
        match *self {
            Tolerance::Absolute(t) => (computed - quoted).abs() <= t,
            Tolerance::Relative(r) => (computed - quoted).abs() <= r * quoted.abs(),
        }
    }
}

/// One line of the timescale table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimescaleRow {
    pub key: &'static str,
    pub description: &'static str,
    pub unit: &'static str,
    pub quoted: Option<f64>,
    pub computed: f64,
    /// `None` for informational rows.
    pub tolerance: Option<Tolerance>,
}

impl TimescaleRow {
    /// `None` when the row has no acceptance band.
    pub fn within(&self) -> Option<bool> {
        match (self.quoted, self.tolerance) {
            (Some(q), Some(t)) => Some(t.admits(q, self.computed)),
            _ => None,
        }
    }

    /// `(computed − quoted)/quoted`.
    pub fn relative_deviation(&self) -> Option<f64> {
        self.quoted.map(|q| (self.computed - q) / q)
    }
}

/// Syndrome pulse length for a sin² pulse of power 2 reaching `|g|A = π/2`.
pub fn syndrome_pulse_length(g_eff: f64) -> f64 {
    let unit = PulseShape::sin_squared(1.0, 0.0).expect("unit pulse");
    (PI / 2.0) / (g_eff * pulse_area(&unit, 2))
}

/// Readout threshold `4κ/3|g|²` for a sin² laser pulse.
pub fn readout_threshold(kappa: f64, g_peak: f64) -> f64 {
    4.0 * kappa / (3.0 * g_peak * g_peak)
}

/// Recomputes every derived number from the raw parameters of `p`.
pub fn timescale_report(p: &Preset) -> Vec<TimescaleRow> {
    let g = p.raman.g_eff();
    let kappa = p.readout.kappa();
    let g_read = p.readout.g_peak();
    let order = p.restore.recombine_order;
    let g_ab = sideband_coupling(
        C64::new(2.0 * PI * p.restore.g_tilde_hz, 0.0),
        p.raman.eta,
        order,
    )
    .norm();
    let nu = p.trap.nu();
    let quoted_g = 2.0 * PI * 20e3;
    let khz = |w: f64| w / (2.0 * PI) / 1e3;
    let us = 1e6;
    let row = |key, description, unit, quoted, computed, tolerance| TimescaleRow {
        key,
        description,
        unit,
        quoted,
        computed,
        tolerance,
    };
    vec![
        row(
            "syndrome_coupling",
            "number-sensitive coupling |g|/2pi",
            "kHz",
            Some(20.0),
            khz(g),
            Some(Tolerance::Absolute(0.5)),
        ),
        row(
            "syndrome_pulse",
            "syndrome pulse length 4pi/3|g|",
            "us",
            Some(33.0),
            syndrome_pulse_length(g) * us,
            Some(Tolerance::Absolute(1.0)),
        ),
        row(
            "syndrome_pulse_rounded_coupling",
            "syndrome pulse length with |g|/2pi = 20 kHz",
            "us",
            Some(33.0),
            syndrome_pulse_length(quoted_g) * us,
            None,
        ),
        row(
            "rwa_ratio",
            "vibrational RWA ratio eta|g1|/nu",
            "",
            Some(1e-2),
            p.raman.eta * p.raman.g1() / nu[0].min(nu[1]),
            Some(Tolerance::Relative(0.05)),
        ),
        row(
            "readout_coupling",
            "readout Raman coupling |g_C g_L/Delta|/2pi",
            "kHz",
            Some(100.0),
            khz(g_read),
            Some(Tolerance::Absolute(0.5)),
        ),
        row(
            "cavity_stark_shift",
            "cavity Stark shift |g_C|^2/Delta/2pi",
            "kHz",
            Some(100.0),
            khz(p.readout.delta_a()),
            None,
        ),
        row(
            "readout_threshold",
            "readout threshold 4kappa/3|g|^2",
            "us",
            Some(16.0),
            readout_threshold(kappa, g_read) * us,
            Some(Tolerance::Absolute(1.0)),
        ),
        row(
            "readout_probability",
            "photon probability P(T_L)",
            "%",
            Some(99.8),
            100.0 * photon_gun_probability(&p.readout, p.readout.duration_s),
            Some(Tolerance::Absolute(0.1)),
        ),
        row(
            "trap_period",
            "inverse trap frequency 1/nu",
            "ns",
            Some(16.0),
            1e9 / nu[0].min(nu[1]),
            None,
        ),
        row(
            "split_pulse",
            "split pulse length for |g|A = pi/16",
            "us",
            Some(8.0),
            syndrome_pulse_length(g) / 8.0 * us,
            None,
        ),
        row(
            "sideband_coupling",
            "recombine sideband coupling |g_ab|/2pi",
            "kHz",
            Some(1.0),
            khz(g_ab),
            Some(Tolerance::Relative(0.05)),
        ),
        row(
            "adiabatic_bound",
            "adiabatic bound 2/|g_ab|",
            "us",
            Some(320.0),
            2.0 / g_ab * us,
            Some(Tolerance::Absolute(10.0)),
        ),
        row(
            "sideband_rwa_ratio",
            "sideband RWA ratio |g_tilde|/4nu",
            "",
            None,
            2.0 * PI * p.restore.g_tilde_hz / (4.0 * nu[0].min(nu[1])),
            None,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get<'a>(rows: &'a [TimescaleRow], key: &str) -> &'a TimescaleRow {
        rows.iter().find(|r| r.key == key).unwrap()
    }

    #[test]
    fn be9_numbers() {
        let rows = timescale_report(&Preset::builtin("be9").unwrap());
        assert!((get(&rows, "syndrome_coupling").computed - 19.604).abs() < 1e-3);
        assert!((get(&rows, "syndrome_pulse").computed - 34.007).abs() < 1e-3);
        assert!((get(&rows, "syndrome_pulse_rounded_coupling").computed - 33.333).abs() < 1e-3);
        assert!((get(&rows, "readout_threshold").computed - 15.915).abs() < 1e-3);
        assert!((get(&rows, "readout_probability").computed - 99.8133).abs() < 1e-3);
        assert!((get(&rows, "sideband_coupling").computed - 0.98020).abs() < 1e-4);
        assert!((get(&rows, "adiabatic_bound").computed - 324.74).abs() < 1e-2);
        assert!((get(&rows, "rwa_ratio").computed - 0.01).abs() < 1e-15);
        assert!((get(&rows, "split_pulse").computed - 4.2509).abs() < 1e-3);
        assert_eq!(get(&rows, "syndrome_pulse").within(), Some(false));
        assert_eq!(get(&rows, "trap_period").within(), None);
    }
}
