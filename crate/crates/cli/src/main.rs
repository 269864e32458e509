mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oculomotor::stats::DBands;
use oculomotor::ScreenGeometry;

#[derive(Debug, Parser)]
#[command(name = "oculomotor", version, about = "Oculomotor features and condition statistics from eye-tracker CSV exports")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the 31 features from every recording in a directory.
    Extract(ExtractArgs),
    /// Normality gate, omnibus tests, FDR and post-hoc comparisons.
    Stats(StatsArgs),
    /// Generate a synthetic cohort with ground-truth sidecars.
    Synth(SynthArgs),
    /// Long-format per-feature files for boxplots.
    PlotData(PlotDataArgs),
}

#[derive(Debug, Args)]
struct Acquisition {
    /// Sampling rate in Hz.
    #[arg(long, default_value_t = 100.0)]
    fs: f64,
    /// Display resolution, WIDTHxHEIGHT in pixels.
    #[arg(long, default_value = "1920x1080", value_parser = parse_screen)]
    screen: (u32, u32),
    /// Field of view, HORIZxVERT in degrees.
    #[arg(long, default_value = "95x63", value_parser = parse_fov)]
    fov: (f64, f64),
}

impl Acquisition {
    fn geometry(&self) -> Result<ScreenGeometry, String> {
        ScreenGeometry::new(self.screen.0, self.screen.1, self.fov.0, self.fov.1).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of `<subject>_<condition>.csv` files.
    #[arg(long)]
    input: PathBuf,
    /// Feature table to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    acq: Acquisition,
    /// Probability mass enclosed by the PRL density contour.
    #[arg(long, default_value_t = oculomotor::dispersion::DEFAULT_PRL_MASS)]
    prl_mass: f64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Feature table produced by `extract`.
    #[arg(long)]
    input: PathBuf,
    /// Report (JSON) to write.
    #[arg(long)]
    out: PathBuf,
    /// Upper bounds of the Cohen's |d| bands, five increasing values.
    #[arg(long, default_value = "0.2,0.5,0.8,1.2,2.0")]
    d_bands: DBands,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory for recordings and `.truth.json` sidecars.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    subjects: usize,
    /// Baseline, Ride and Fog durations in seconds.
    #[arg(long, default_value = "900,600,120", value_parser = parse_durations)]
    durations: [f64; 3],
    /// Condition effect as `CONDITION:KNOB=FACTOR`, e.g. `fog:blink_rate=2`.
    /// Knobs: saccade_rate, amplitude, noise, drift, blink_rate, pupil.
    #[arg(long = "effect")]
    effects: Vec<commands::Effect>,
    #[command(flatten)]
    acq: Acquisition,
}

#[derive(Debug, Args)]
pub struct PlotDataArgs {
    /// Feature table produced by `extract`.
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving one `<feature>.csv` per feature.
    #[arg(long)]
    out: PathBuf,
}

fn split_pair(s: &str) -> Result<(&str, &str), String> {
    s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got `{s}`"))
}

fn parse_screen(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = split_pair(s)?;
    let w = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    Ok((w, h))
}

fn parse_fov(s: &str) -> Result<(f64, f64), String> {
    let (h, v) = split_pair(s)?;
    let h = h.trim().parse().map_err(|e| format!("horizontal: {e}"))?;
    let v = v.trim().parse().map_err(|e| format!("vertical: {e}"))?;
    Ok((h, v))
}

fn parse_durations(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [b, r, f] if v.iter().all(|d| d.is_finite() && *d > 0.0) => Ok([b, r, f]),
        _ => Err("expected three positive durations, e.g. 900,600,120".into()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            log::error!("cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };

    let outcome = pool.install(|| match &cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Stats(a) => commands::stats(a),
        Command::Synth(a) => commands::synth(a),
        Command::PlotData(a) => commands::plot_data(a),
    });
    match outcome {
        Ok(commands::Status::Complete) => ExitCode::SUCCESS,
        Ok(commands::Status::Partial) => ExitCode::from(2),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(1)
        }
    }
}
