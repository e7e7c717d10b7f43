use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relit::validate::ValidationConfig;
use relit_cli::{
    cmd_interpolate, cmd_lightprobe, cmd_render, cmd_sweep_specular, cmd_validate, parse_grid,
    parse_range, parse_size, ConfigFile, RenderJob,
};

/// Relightable tri-plane volume renderer.
///
/// Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O or
/// parse or numeric error.
#[derive(Parser)]
#[command(name = "relit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one view of a scene.
    Render(RenderArgs),
    /// Render the same view under several specular scales, stacked vertically.
    SweepSpecular(SweepArgs),
    /// Render a camera-yaw x lighting interpolation grid with probe insets.
    Interpolate(InterpolateArgs),
    /// Visualize a lighting file as a half-sphere probe image.
    Lightprobe(ProbeArgs),
    /// Run every numerical oracle and emit a JSON report.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scene file (FLIT format).
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Lighting JSON; uniform white light when omitted.
    #[arg(long)]
    light: Option<PathBuf>,
    /// Image size as WxH (or N for square).
    #[arg(long, value_parser = parse_size)]
    size: Option<(usize, usize)>,
    /// Samples per ray.
    #[arg(long)]
    samples: Option<usize>,
    /// Stratified-jitter seed; midpoint sampling when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Render the constant-illumination albedo image instead of shading.
    #[arg(long)]
    albedo: bool,
    /// Multiplier on the decoded specular coefficient.
    #[arg(long)]
    specular_scale: Option<f64>,
    /// Camera yaw around the scene center, degrees.
    #[arg(long)]
    yaw: Option<f64>,
    /// Camera pitch, degrees.
    #[arg(long)]
    pitch: Option<f64>,
    /// Camera distance from the scene center (default: scene bounds).
    #[arg(long)]
    distance: Option<f64>,
    /// Near plane (default derived from distance and bounds).
    #[arg(long)]
    near: Option<f64>,
    /// Far plane (default derived from distance and bounds).
    #[arg(long)]
    far: Option<f64>,
    /// Horizontal field of view, degrees.
    #[arg(long)]
    fov: Option<f64>,
    /// Output image path (.ppm or .png).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional depth dump path (RLIT float planes).
    #[arg(long)]
    depth_out: Option<PathBuf>,
    /// Optional feature-image dump path (RLIT float planes).
    #[arg(long)]
    features_out: Option<PathBuf>,
    /// JSON config file; flags take precedence over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    /// flags > config file > defaults.
    fn job(&self) -> Result<RenderJob, String> {
        let config = match &self.config {
            Some(path) => ConfigFile::load(path).map_err(|e| format!("config {}: {e}", path.display()))?,
            None => ConfigFile::default(),
        };
        let scene = self
            .scene
            .clone()
            .or(config.scene)
            .ok_or("missing --scene (or a scene entry in the config file)")?;
        let out = self
            .out
            .clone()
            .or(config.out)
            .ok_or("missing --out (or an out entry in the config file)")?;
        let mut job = RenderJob::new(scene, out);
        job.light = self.light.clone().or(config.light);
        let size = match self.size {
            Some(s) => Some(s),
            None => match &config.size {
                Some(text) => Some(parse_size(text).map_err(|e| format!("config size: {e}"))?),
                None => None,
            },
        };
        if let Some((w, h)) = size {
            job.width = w;
            job.height = h;
        }
        if let Some(samples) = self.samples.or(config.samples) {
            job.samples = samples;
        }
        job.yaw_deg = self.yaw.or(config.yaw).unwrap_or(job.yaw_deg);
        job.pitch_deg = self.pitch.or(config.pitch).unwrap_or(job.pitch_deg);
        job.distance = self.distance.or(config.distance);
        job.near = self.near.or(config.near);
        job.far = self.far.or(config.far);
        job.fov_deg = self.fov.or(config.fov).unwrap_or(job.fov_deg);
        job.albedo = self.albedo || config.albedo.unwrap_or(false);
        job.specular_scale = self.specular_scale.or(config.specular_scale).unwrap_or(1.0);
        job.seed = self.seed.or(config.seed);
        job.raw_camera = config.camera;
        job.depth_out = self.depth_out.clone().or(config.depth_out);
        job.features_out = self.features_out.clone().or(config.features_out);
        Ok(job)
    }
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Specular scales, one render per value (e.g. 0,1,4).
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4")]
    scales: Vec<f64>,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lighting at the top row.
    #[arg(long)]
    light_a: PathBuf,
    /// Lighting at the bottom row.
    #[arg(long)]
    light_b: PathBuf,
    /// Yaw sweep across columns, degrees, as lo,hi.
    #[arg(long, value_parser = parse_range, default_value = "-30,30")]
    yaw_range: (f64, f64),
    /// Grid layout as COLSxROWS.
    #[arg(long, value_parser = parse_grid, default_value = "4x3")]
    grid: (usize, usize),
}

#[derive(Args)]
struct ProbeArgs {
    /// Lighting JSON to visualize.
    #[arg(long)]
    light: PathBuf,
    /// Probe image size (square).
    #[arg(long, value_parser = parse_size, default_value = "256")]
    size: (usize, usize),
    /// Scale the image so the brightest sample is 1.
    #[arg(long)]
    normalize: bool,
    /// Output image path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Node budget for the spherical quadratures.
    #[arg(long, default_value_t = 1_000_000)]
    quad_samples: usize,
    /// Replace every check's tolerance with this value.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_OPERATION_FAILED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    let outcome: Result<ExitCode, relit::Error> = match cli.command {
        Command::Render(args) => match args.common.job() {
            Err(msg) => return usage_error(&msg),
            Ok(job) => cmd_render(&job).map(|()| ExitCode::SUCCESS),
        },
        Command::SweepSpecular(args) => match args.common.job() {
            Err(msg) => return usage_error(&msg),
            Ok(job) => cmd_sweep_specular(&job, &args.scales).map(|()| ExitCode::SUCCESS),
        },
        Command::Interpolate(args) => match args.common.job() {
            Err(msg) => return usage_error(&msg),
            Ok(job) => cmd_interpolate(
                &job,
                &args.light_a,
                &args.light_b,
                args.yaw_range,
                args.grid.0,
                args.grid.1,
            )
            .map(|()| ExitCode::SUCCESS),
        },
        Command::Lightprobe(args) => {
            cmd_lightprobe(&args.light, args.size.0, args.normalize, &args.out)
                .map(|()| ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let cfg = ValidationConfig {
                quad_samples: args.quad_samples,
                tolerance_override: args.tolerance,
            };
            cmd_validate(&cfg, args.report.as_deref()).map(|passed| {
                if passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_VALIDATION_FAILED)
                }
            })
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_OPERATION_FAILED)
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(EXIT_USAGE)
}
