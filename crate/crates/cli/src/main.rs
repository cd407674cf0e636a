use std::path::PathBuf;
use std::process::ExitCode;

use alphasqkd::sweep::{self, Axis, Format, Mode, Range, SweepConfig};
use alphasqkd::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "alphasqkd", version, about = "Key-rate bounds for the α-tuneable semi-quantum protocol")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key rate at a single α and noise point.
    Keyrate(RunArgs),
    /// Key-rate curves over α and noise grids.
    Sweep(RunArgs),
    /// Compare the bound with the exact entropy for seeded random attacks.
    Soundness(RunArgs),
    /// Key rate of the projective-measurement variant under intercept-resend.
    Intercept(RunArgs),
    /// Print a preset configuration (fig1, fig2, fig3, fig5).
    Preset {
        name: String,
        /// Write the configuration here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    /// Forward noise; a comma-separated list sweeps it.
    #[arg(long, value_delimiter = ',')]
    qf: Option<Vec<f64>>,
    /// Reverse noise; a comma-separated list sweeps it.
    #[arg(long, value_delimiter = ',')]
    qr: Option<Vec<f64>>,
    /// Loop noise; a comma-separated list sweeps it.
    #[arg(long, value_delimiter = ',')]
    qx: Option<Vec<f64>>,
    /// Set Q_X equal to Q_R at every point.
    #[arg(long)]
    loop_follows_reverse: bool,
    #[arg(long)]
    p_override: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    refine_passes: Option<usize>,
    #[arg(long)]
    clamp_cauchy_schwarz: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    attacks: Option<usize>,
    #[arg(long)]
    d_e: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

fn axis_from(values: Vec<f64>) -> Axis {
    match values.as_slice() {
        [v] => Axis::Value(*v),
        _ => Axis::List(values),
    }
}

fn build_config(mode: Mode, a: RunArgs) -> Result<SweepConfig> {
    let mut cfg = match &a.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    cfg.mode = mode;

    if a.alpha.is_some() && (a.alpha_min.is_some() || a.alpha_max.is_some() || a.alpha_step.is_some()) {
        return Err(Error::Config("--alpha cannot be combined with --alpha-min/--alpha-max/--alpha-step".into()));
    }
    if let Some(v) = a.alpha {
        cfg.alpha = Axis::Value(v);
    } else if a.alpha_min.is_some() || a.alpha_max.is_some() || a.alpha_step.is_some() {
        let base = match &cfg.alpha {
            Axis::Range(r) => *r,
            _ => Range { min: 0.0, max: 0.5, step: 0.01 },
        };
        cfg.alpha = Axis::Range(Range {
            min: a.alpha_min.unwrap_or(base.min),
            max: a.alpha_max.unwrap_or(base.max),
            step: a.alpha_step.unwrap_or(base.step),
        });
    }
    if let Some(v) = a.qf {
        cfg.noise.q_f = axis_from(v);
    }
    if let Some(v) = a.qr {
        cfg.noise.q_r = axis_from(v);
    }
    if let Some(v) = a.qx {
        cfg.noise.q_x = axis_from(v);
    }
    cfg.noise.loop_follows_reverse |= a.loop_follows_reverse;
    cfg.clamp_cauchy_schwarz |= a.clamp_cauchy_schwarz;
    if a.p_override.is_some() {
        cfg.p_override = a.p_override;
    }
    if let Some(v) = a.grid_points {
        cfg.grid_points = v;
    }
    if let Some(v) = a.refine_passes {
        cfg.refine_passes = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.attacks {
        cfg.attacks = v;
    }
    if let Some(v) = a.d_e {
        cfg.d_e = v;
    }
    if a.output.is_some() {
        cfg.output = a.output;
    }
    if let Some(f) = a.format {
        cfg.format = f.parse::<Format>()?;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (mode, args) = match cli.command {
        Command::Preset { name, output } => {
            let cfg = sweep::preset(&name)?;
            let mut text = serde_json::to_string_pretty(&cfg)?;
            text.push('\n');
            return emit(&text, output.as_ref());
        }
        Command::Keyrate(a) => (Mode::Keyrate, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Soundness(a) => (Mode::Soundness, a),
        Command::Intercept(a) => (Mode::Intercept, a),
    };
    let cfg = build_config(mode, args)?;
    let table = sweep::run(&cfg)?;
    emit(&table.render(&cfg), cfg.output.as_ref())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alphasqkd: {e}");
            ExitCode::FAILURE
        }
    }
}
