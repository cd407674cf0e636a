//! Configurations that regenerate the published key-rate curves.
//!
//! Only the forward noise of the first figure is stated numerically (1e-5).
//! The other noise levels are chosen to show the described behaviour: high
//! reverse and loop noise tolerated at tiny forward noise, and a shrinking
//! window of good α as the forward noise grows.

use super::config::{Axis, Mode, NoiseGrid, Range, SweepConfig};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig5"];

fn alpha_range(max: f64, step: f64) -> Axis {
    Axis::Range(Range { min: 0.0, max, step })
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    let base = SweepConfig { mode: Mode::Sweep, ..SweepConfig::default() };
    let cfg = match name {
        // Q_F = 1e-5, Q_R = Q_X rising towards 10%
        "fig1" => SweepConfig {
            alpha: alpha_range(0.5, 0.005),
            noise: NoiseGrid {
                q_f: Axis::Value(1e-5),
                q_r: Axis::List(vec![0.02, 0.05, 0.08, 0.1]),
                loop_follows_reverse: true,
                ..NoiseGrid::default()
            },
            ..base
        },
        // slightly larger forward noise, rising reverse and loop noise
        "fig2" => SweepConfig {
            alpha: alpha_range(0.5, 0.005),
            noise: NoiseGrid {
                q_f: Axis::Value(1e-4),
                q_r: Axis::List(vec![0.0, 0.01, 0.02, 0.04]),
                loop_follows_reverse: true,
                ..NoiseGrid::default()
            },
            ..base
        },
        // forward noise raised until only a narrow α window survives
        "fig3" => SweepConfig {
            alpha: alpha_range(0.5, 0.005),
            noise: NoiseGrid {
                q_f: Axis::List(vec![1e-4, 3e-4, 6e-4]),
                q_r: Axis::Value(0.01),
                loop_follows_reverse: true,
                ..NoiseGrid::default()
            },
            ..base
        },
        "fig5" => SweepConfig { mode: Mode::Intercept, alpha: alpha_range(1.0, 0.01), ..base },
        _ => {
            return Err(Error::Config(format!(
                "unknown preset '{name}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}
