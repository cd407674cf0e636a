use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel_models::NoisePoint;
use crate::error::{Error, Result};
use crate::keyrate_bound::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Keyrate,
    Sweep,
    Soundness,
    Intercept,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Keyrate => "keyrate",
            Mode::Sweep => "sweep",
            Mode::Soundness => "soundness",
            Mode::Intercept => "intercept",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keyrate" => Ok(Mode::Keyrate),
            "sweep" => Ok(Mode::Sweep),
            "soundness" => Ok(Mode::Soundness),
            "intercept" => Ok(Mode::Intercept),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// Inclusive `min, min + step, …, ≤ max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Config(format!("{name}: step must be positive, got {}", self.step)));
        }
        if !(self.min <= self.max) {
            return Err(Error::Config(format!("{name}: min {} exceeds max {}", self.min, self.max)));
        }
        if (self.max - self.min) / self.step > 1e7 {
            return Err(Error::Config(format!("{name}: range has too many points")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| (self.min + i as f64 * self.step).min(self.max)).collect()
    }
}

/// A single value, an explicit list, or a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    List(Vec<f64>),
    Range(Range),
}

impl Default for Axis {
    fn default() -> Self {
        Axis::Value(0.0)
    }
}

impl Axis {
    pub fn validate(&self, name: &str) -> Result<()> {
        match self {
            Axis::Range(r) => r.validate(name),
            Axis::List(v) if v.is_empty() => Err(Error::Config(format!("{name}: empty list"))),
            _ => Ok(()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Value(v) => vec![*v],
            Axis::List(v) => v.clone(),
            Axis::Range(r) => r.values(),
        }
    }

    fn check_interval(&self, name: &str, lo: f64, hi: f64) -> Result<()> {
        self.validate(name)?;
        for v in self.values() {
            if !(lo..=hi).contains(&v) {
                return Err(Error::Config(format!("{name}: value {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseGrid {
    pub q_f: Axis,
    pub q_r: Axis,
    /// Ignored when `loop_follows_reverse` is set.
    pub q_x: Axis,
    /// Use `Q_X = Q_R` at every grid point.
    pub loop_follows_reverse: bool,
}

impl NoiseGrid {
    pub fn point(p: NoisePoint) -> Self {
        Self { q_f: Axis::Value(p.q_f), q_r: Axis::Value(p.q_r), q_x: Axis::Value(p.q_x), loop_follows_reverse: false }
    }

    /// Row-major over `(q_f, q_r, q_x)`.
    pub fn points(&self) -> Vec<NoisePoint> {
        let mut out = Vec::new();
        for q_f in self.q_f.values() {
            for q_r in self.q_r.values() {
                if self.loop_follows_reverse {
                    out.push(NoisePoint { q_f, q_r, q_x: q_r });
                    continue;
                }
                for q_x in self.q_x.values() {
                    out.push(NoisePoint { q_f, q_r, q_x });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Mode,
    pub alpha: Axis,
    pub noise: NoiseGrid,
    /// POVM scale; defaults to `1/(1 + α)` at each α.
    pub p_override: Option<f64>,
    pub grid_points: usize,
    pub refine_passes: usize,
    pub clamp_cauchy_schwarz: bool,
    pub seed: u64,
    pub attacks: usize,
    pub d_e: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Worker threads; defaults to the available cores.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Sweep,
            alpha: Axis::Range(Range { min: 0.0, max: 0.5, step: 0.01 }),
            noise: NoiseGrid::default(),
            p_override: None,
            grid_points: 64,
            refine_passes: 1,
            clamp_cauchy_schwarz: false,
            seed: 0,
            attacks: 1000,
            d_e: 4,
            output: None,
            format: Format::Csv,
            workers: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            points_per_axis: self.grid_points,
            refine_passes: self.refine_passes,
            clamp_cauchy_schwarz: self.clamp_cauchy_schwarz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.check_interval("alpha", 0.0, 1.0)?;
        self.noise.q_f.check_interval("noise.q_f", 0.0, 0.5)?;
        self.noise.q_r.check_interval("noise.q_r", 0.0, 0.5)?;
        self.noise.q_x.check_interval("noise.q_x", 0.0, 0.5)?;
        if self.grid_points < 8 {
            return Err(Error::Config(format!("grid_points must be at least 8, got {}", self.grid_points)));
        }
        if let Some(p) = self.p_override {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Config(format!("p_override = {p} outside (0, 1]")));
            }
        }
        if self.d_e < 2 {
            return Err(Error::Config(format!("d_e must be at least 2, got {}", self.d_e)));
        }
        if self.mode == Mode::Soundness && self.attacks == 0 {
            return Err(Error::Config("attacks must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        if self.mode == Mode::Keyrate && (self.alpha.values().len() != 1 || self.noise.points().len() != 1) {
            return Err(Error::Config("keyrate mode takes a single alpha and a single noise point".into()));
        }
        Ok(())
    }
}
