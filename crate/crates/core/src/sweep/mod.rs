//! Parameter sweeps, the random-attack soundness suite and their CSV/JSON
//! output.

mod config;
mod output;
mod presets;
mod run;

pub use config::{Axis, Format, Mode, NoiseGrid, Range, SweepConfig};
pub use output::{format_number, Cell, Table};
pub use presets::{preset, PRESET_NAMES};
pub use run::{
    evaluate_point, run, run_to_string, soundness_case, soundness_suite, SoundnessCase, INTERCEPT_COLUMNS,
    SOUNDNESS_COLUMNS, SOUNDNESS_TOL, SWEEP_COLUMNS,
};
