//! Command implementations behind the `relit` binary.
//!
//! Each subcommand is a plain function over a [`RenderJob`] so the
//! integration tests drive them directly. Camera parameters are an orbit
//! (yaw/pitch/distance) around the volume center; a raw camera matrix can be
//! supplied through the JSON config file instead. Option precedence is
//! command-line flags, then config file, then defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use relit::error::{Error, Result};
use relit::image::{write_color, write_float_planes, Image};
use relit::math::{Rgb, Vec3};
use relit::render::{render_image, Camera, RenderOptions, RenderOutput, Sampling};
use relit::scene_io::{load_lighting, load_scene};
use relit::sh::{render_light_sphere, IrradianceSH};
use relit::validate::{run_validation, ValidationConfig};

/// Everything a render needs; unresolved camera fields fall back to
/// bounds-derived defaults once the scene is loaded.
#[derive(Debug, Clone)]
pub struct RenderJob {
    pub scene: PathBuf,
    /// Lighting JSON; a uniform white environment when absent.
    pub light: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub samples: usize,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub distance: Option<f64>,
    pub near: Option<f64>,
    pub far: Option<f64>,
    pub fov_deg: f64,
    pub albedo: bool,
    pub specular_scale: f64,
    /// Stratified jitter seed; midpoint sampling when absent.
    pub seed: Option<u64>,
    /// Raw world-from-camera pose from the config file, overriding the orbit.
    pub raw_camera: Option<RawCamera>,
    pub out: PathBuf,
    pub depth_out: Option<PathBuf>,
    pub features_out: Option<PathBuf>,
}

impl RenderJob {
    pub fn new(scene: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RenderJob {
            scene: scene.into(),
            light: None,
            width: 256,
            height: 256,
            samples: 64,
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            distance: None,
            near: None,
            far: None,
            fov_deg: 40.0,
            albedo: false,
            specular_scale: 1.0,
            seed: None,
            raw_camera: None,
            out: out.into(),
            depth_out: None,
            features_out: None,
        }
    }

    fn options(&self) -> RenderOptions {
        RenderOptions {
            samples_per_ray: self.samples,
            sampling: match self.seed {
                None => Sampling::Midpoint,
                Some(seed) => Sampling::Stratified { seed },
            },
            albedo_mode: self.albedo,
            specular_scale: self.specular_scale,
            clamp_shading: true,
        }
    }

    /// Camera for this job at the given yaw, framing the scene cube when
    /// distance/near/far are unset.
    pub fn camera(&self, bounds: f64, yaw_deg: f64) -> Result<Camera> {
        if let Some(raw) = &self.raw_camera {
            return raw.build(self.width, self.height);
        }
        let distance = self.distance.unwrap_or(bounds);
        let near = self.near.unwrap_or((distance - 0.6 * bounds).max(0.05 * distance));
        let far = self.far.unwrap_or(distance + 0.6 * bounds);
        Camera::orbit(
            Vec3::ZERO,
            yaw_deg.to_radians(),
            self.pitch_deg.to_radians(),
            distance,
            self.fov_deg,
            self.width,
            self.height,
            near,
            far,
        )
    }

    fn lighting(&self) -> Result<IrradianceSH> {
        match &self.light {
            Some(path) => load_lighting(path),
            None => Ok(IrradianceSH::uniform(Rgb::WHITE)),
        }
    }
}

/// Explicit pinhole pose for config files: rotation columns are the camera
/// x/y/z axes in world coordinates.
#[derive(Debug, Clone, Deserialize)]
pub struct RawCamera {
    pub rotation: [[f64; 3]; 3],
    pub position: [f64; 3],
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub near: f64,
    pub far: f64,
}

impl RawCamera {
    fn build(&self, width: usize, height: usize) -> Result<Camera> {
        let col = |c: [f64; 3]| Vec3::new(c[0], c[1], c[2]);
        let cam = Camera {
            rotation: [col(self.rotation[0]), col(self.rotation[1]), col(self.rotation[2])],
            position: col(self.position),
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
            width,
            height,
            t_near: self.near,
            t_far: self.far,
        };
        cam.validate()?;
        Ok(cam)
    }
}

/// Runs a job end to end and returns the raw render planes.
pub fn render_job(job: &RenderJob) -> Result<RenderOutput> {
    let field = load_scene(&job.scene)?;
    let env = job.lighting()?;
    let cam = job.camera(field.bounds() as f64, job.yaw_deg)?;
    render_image(&field, &env, &cam, &job.options())
}

/// `render`: one image (plus optional depth/feature dumps).
pub fn cmd_render(job: &RenderJob) -> Result<()> {
    let out = render_job(job)?;
    write_color(&out.color, &job.out)?;
    if let Some(path) = &job.depth_out {
        write_float_planes(&out.depth, path)?;
    }
    if let Some(path) = &job.features_out {
        write_float_planes(&out.features, path)?;
    }
    Ok(())
}

/// `sweep-specular` as an image: one render per scale, stacked top to bottom.
pub fn render_specular_sweep(job: &RenderJob, scales: &[f64]) -> Result<Image> {
    if scales.is_empty() {
        return Err(Error::InvalidScene { reason: "need at least one specular scale".into() });
    }
    if let Some(bad) = scales.iter().find(|s| !(**s >= 0.0)) {
        return Err(Error::InvalidScene { reason: format!("specular scale must be non-negative, got {bad}") });
    }
    let field = load_scene(&job.scene)?;
    let env = job.lighting()?;
    let cam = job.camera(field.bounds() as f64, job.yaw_deg)?;
    let mut rows = Vec::with_capacity(scales.len());
    for &scale in scales {
        let opt = RenderOptions { specular_scale: scale, ..job.options() };
        rows.push(render_image(&field, &env, &cam, &opt)?.color);
    }
    Ok(Image::stack_vertical(&rows))
}

pub fn cmd_sweep_specular(job: &RenderJob, scales: &[f64]) -> Result<()> {
    let strip = render_specular_sweep(job, scales)?;
    write_color(&strip, &job.out)
}

/// Fractional size of the light-probe inset relative to the cell.
const PROBE_INSET_DIVISOR: usize = 4;

/// `interpolate` as an image: columns sweep yaw across `yaw_range`, rows
/// sweep the environment linearly from `light_a` to `light_b`; each cell
/// carries its row's normalized light probe in the bottom-right corner.
pub fn render_interpolation_grid(
    job: &RenderJob,
    light_a: &Path,
    light_b: &Path,
    yaw_range_deg: (f64, f64),
    cols: usize,
    rows: usize,
) -> Result<Image> {
    if cols == 0 || rows == 0 {
        return Err(Error::InvalidScene { reason: "interpolation grid must be at least 1x1".into() });
    }
    let field = load_scene(&job.scene)?;
    let env_a = load_lighting(light_a)?;
    let env_b = load_lighting(light_b)?;
    let mut grid = Image::new(cols * job.width, rows * job.height, 3);
    let inset = job.width.min(job.height) / PROBE_INSET_DIVISOR;
    for row in 0..rows {
        let u = if rows == 1 { 0.0 } else { row as f64 / (rows - 1) as f64 };
        let env = env_a.lerp(&env_b, u);
        let probe = render_light_sphere(&env, inset, true);
        for col in 0..cols {
            let v = if cols == 1 { 0.0 } else { col as f64 / (cols - 1) as f64 };
            let yaw = yaw_range_deg.0 + (yaw_range_deg.1 - yaw_range_deg.0) * v;
            let cam = job.camera(field.bounds() as f64, yaw)?;
            let mut cell = render_image(&field, &env, &cam, &job.options())?.color;
            if inset > 0 {
                cell.paste(&probe, job.width - inset, job.height - inset);
            }
            grid.paste(&cell, col * job.width, row * job.height);
        }
    }
    Ok(grid)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_interpolate(
    job: &RenderJob,
    light_a: &Path,
    light_b: &Path,
    yaw_range_deg: (f64, f64),
    cols: usize,
    rows: usize,
) -> Result<()> {
    let grid = render_interpolation_grid(job, light_a, light_b, yaw_range_deg, cols, rows)?;
    write_color(&grid, &job.out)
}

/// `lightprobe`: half-sphere visualization of a lighting file.
pub fn cmd_lightprobe(light: &Path, resolution: usize, normalize: bool, out: &Path) -> Result<()> {
    let env = load_lighting(light)?;
    let probe = render_light_sphere(&env, resolution, normalize);
    write_color(&probe, out)
}

/// `validate`: runs every oracle, emits the JSON report, returns overall pass.
pub fn cmd_validate(cfg: &ValidationConfig, report_path: Option<&Path>) -> Result<bool> {
    let report = run_validation(cfg)?;
    let json = serde_json::to_string_pretty(&report)?;
    match report_path {
        Some(path) => std::fs::write(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    for check in &report.checks {
        eprintln!(
            "  {:<32} {}  measured {:.3e}  tolerance {:.3e}",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.measured,
            check.tolerance
        );
    }
    Ok(report.passed)
}

/// Optional JSON config; every field mirrors a flag and loses to it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scene: Option<PathBuf>,
    pub light: Option<PathBuf>,
    pub size: Option<String>,
    pub samples: Option<usize>,
    pub yaw: Option<f64>,
    pub pitch: Option<f64>,
    pub distance: Option<f64>,
    pub near: Option<f64>,
    pub far: Option<f64>,
    pub fov: Option<f64>,
    pub albedo: Option<bool>,
    pub specular_scale: Option<f64>,
    pub seed: Option<u64>,
    pub camera: Option<RawCamera>,
    pub out: Option<PathBuf>,
    pub depth_out: Option<PathBuf>,
    pub features_out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Parses `WxH` (or a single `N` for square) image sizes.
pub fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse_one = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size component {t:?}: {e}"));
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (parse_one(w)?, parse_one(h)?),
        None => {
            let n = parse_one(s)?;
            (n, n)
        }
    };
    if w == 0 || h == 0 {
        return Err("image size must be at least 1x1".into());
    }
    Ok((w, h))
}

/// Parses `lo,hi` yaw ranges in degrees.
pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi — got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad angle {t:?}: {e}"));
    Ok((p(lo)?, p(hi)?))
}

/// Parses `CxR` grid sizes.
pub fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    parse_size(s)
}
